//! Pass/fail records of sampled property checks.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub clause: String,
    pub samples: usize,
    pub failures: usize,
    /// Lexicographically smallest failing state, if any.
    pub first_counterexample: Option<Vec<f64>>,
    pub detail: Option<String>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    /// Builds a report from `(state, passed)` results in any order.
    pub fn from_results(
        clause: impl Into<String>,
        results: impl IntoIterator<Item = (Vec<f64>, bool)>,
    ) -> Self {
        let mut samples = 0;
        let mut failures = 0;
        let mut first: Option<Vec<f64>> = None;
        for (state, ok) in results {
            samples += 1;
            if !ok {
                failures += 1;
                let smaller = first.as_ref().is_none_or(|f| lex_less(&state, f));
                if smaller {
                    first = Some(state);
                }
            }
        }
        Self {
            clause: clause.into(),
            samples,
            failures,
            first_counterexample: first,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// `key=value` stanza.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "clause={}", self.clause);
        let _ = writeln!(out, "samples={}", self.samples);
        let _ = writeln!(out, "failures={}", self.failures);
        let _ = writeln!(
            out,
            "status={}",
            if self.passed() { "pass" } else { "FAIL" }
        );
        if let Some(c) = self.first_counterexample.as_ref().filter(|c| !c.is_empty()) {
            let coords: Vec<String> = c.iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(out, "first_counterexample={}", coords.join(","));
        }
        if let Some(d) = &self.detail {
            let _ = writeln!(out, "detail={d}");
        }
        out
    }
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .is_some_and(|o| o.is_lt())
}
