//! One- and two-step bounds of the normalized hemophilia operator.

use std::fmt;

use super::SimplexState;
use crate::error::{Error, Result};

/// Absolute slack allowed on every inequality.
pub const BOUND_SLACK: f64 = 1e-12;

/// Contraction constant of `v(n+1) ≤ α y(n)` as originally stated.
pub const STATED_ALPHA: f64 = 13.0 / 24.0;

/// The sharp contraction constant: for `n ≥ 2`, `v(n+1)/y(n) = (3u+4v)/(12(x+y)(u+v))`
/// at `s(n)`, and `v ≤ u`, `x + y ≥ 5/12` give at most `7/10`, attained from
/// `(0, 1/2, 0, 1/2)`.
pub const SHARP_ALPHA: f64 = 7.0 / 10.0;

/// Last `n` probed by the contraction checks.
pub const CONTRACTION_LAST_N: usize = 20;

/// The normalized hemophilia operator written out in closed form.
pub fn hemophilia_normalized([x, y, u, v]: [f64; 4]) -> [f64; 4] {
    let d = 12.0 * (x + y) * (u + v);
    [
        (6.0 * x * u + 3.0 * y * u) / d,
        (6.0 * x * v + 3.0 * y * u + 4.0 * y * v) / d,
        (6.0 * x * u + 6.0 * x * v + 3.0 * y * u + 4.0 * y * v) / d,
        (3.0 * y * u + 4.0 * y * v) / d,
    ]
}

/// One inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + BOUND_SLACK
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub checks: Vec<BoundCheck>,
}

impl EstimateReport {
    pub fn violations(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| !c.holds())
    }

    pub fn all_hold(&self) -> bool {
        self.violations().next().is_none()
    }

    /// True if every check whose name starts with `prefix` holds.
    pub fn group_holds(&self, prefix: &str) -> bool {
        self.checks
            .iter()
            .filter(|c| c.name.starts_with(prefix))
            .all(BoundCheck::holds)
    }
}

impl fmt::Display for EstimateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let verdict = if c.holds() { "ok" } else { "VIOLATED" };
            writeln!(f, "{} lhs={:e} rhs={:e} {verdict}", c.name, c.lhs, c.rhs)?;
        }
        Ok(())
    }
}

/// Evaluates `V(s)`, `V²(s)`, … and checks the one-step bounds, the two-step
/// band `5/12 ≤ x(2)+y(2) ≤ 1/2`, and `v(n+1) ≤ α y(n)` for `n = 2..=20`
/// (wherever `y(n) > 1e-12`) with both the stated and the sharp `α`.
pub fn check_estimates(s: &SimplexState) -> Result<EstimateReport> {
    let [x, y, u, v] = s
        .state()
        .as_quad()
        .ok_or_else(|| Error::InvalidState("estimates need a two-by-two state".into()))?;
    let [x1, y1, u1, v1] = hemophilia_normalized([x, y, u, v]);
    let mut checks = Vec::with_capacity(64);
    let mut le = |name: &str, lhs: f64, rhs: f64| {
        checks.push(BoundCheck {
            name: name.to_string(),
            lhs,
            rhs,
        })
    };
    let m = u + v;
    let f = x + y;

    le("lo.x' lower", u / (4.0 * m), x1);
    le("lo.x' upper", x1, u / (2.0 * m));
    le("lo.x' upper <= 1/2", u / (2.0 * m), 0.5);
    le("lo.y' lower", v / (3.0 * m), y1);
    le("lo.y' upper", y1, (u + 2.0 * v) / (4.0 * m));
    le("lo.y' upper <= 1/2", (u + 2.0 * v) / (4.0 * m), 0.5);
    le("lo.u' lower >= 1/4", 0.25, (2.0 * x + y) / (4.0 * f));
    le("lo.u' lower", (2.0 * x + y) / (4.0 * f), u1);
    le("lo.u' upper", u1, (3.0 * x + 2.0 * y) / (6.0 * f));
    le("lo.u' upper <= 1/2", (3.0 * x + 2.0 * y) / (6.0 * f), 0.5);
    le("lo.v' lower", y / (4.0 * f), v1);
    le("lo.v' upper", v1, y / (3.0 * f));
    le("lo.v' upper <= 1/3", y / (3.0 * f), 1.0 / 3.0);
    le("lo.x'+y' lower", 1.0 / 3.0 + u / (6.0 * m), x1 + y1);
    le("lo.x'+y' upper", x1 + y1, 0.5);
    le("lo.u'+v' lower", 0.5, u1 + v1);
    le("lo.u'+v' upper", u1 + v1, 0.5 + y * v / (6.0 * f * m));
    le(
        "lo.u'+v' upper <= 2/3",
        0.5 + y * v / (6.0 * f * m),
        2.0 / 3.0,
    );
    le("lo.v' <= y'", v1, y1);
    le("lo.y' <= u'", y1, u1);
    le("lo.x' <= u'", x1, u1);

    let s2 = hemophilia_normalized([x1, y1, u1, v1]);
    le("ly.x(2)+y(2) lower", 5.0 / 12.0, s2[0] + s2[1]);
    le("ly.x(2)+y(2) upper", s2[0] + s2[1], 0.5);

    let mut cur = s2;
    for n in 2..=CONTRACTION_LAST_N {
        let next = hemophilia_normalized(cur);
        if cur[1] > 1e-12 {
            le(
                &format!("ly.contraction 13/24 n={n}"),
                next[3],
                STATED_ALPHA * cur[1],
            );
            le(
                &format!("ly.contraction 7/10 n={n}"),
                next[3],
                SHARP_ALPHA * cur[1],
            );
        }
        cur = next;
    }
    Ok(EstimateReport { checks })
}
