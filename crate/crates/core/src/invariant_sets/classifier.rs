//! Decision procedure for the limit of `Wⁿ(s)` under the hemophilia operator.

use std::fmt;

use super::{dominant_ratio, hemophilia_raw, membership_of, quad_of, SET_TOL};
use crate::error::{Error, Result};
use crate::state::PopulationState;

/// Steps probed when searching a `Q₄` trajectory for `y⁽ᵏ⁾v⁽ᵏ⁾ ≠ 0`.
pub const DEFAULT_PROBE_BUDGET: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimitKind {
    Zero,
    S2,
    Infinity,
    Undecided,
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Zero => "Zero",
            Self::S2 => "S2",
            Self::Infinity => "Infinity",
            Self::Undecided => "Undecided",
        })
    }
}

/// The clause that decided a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    /// `s ∈ P₀`.
    I1,
    /// `s ∈ Q₄` with some `y⁽ᵏ⁾v⁽ᵏ⁾ ≠ 0`.
    I2,
    /// `s ∈ 𝒩`, `W(s) ∈ P₀`.
    I3,
    /// `s ∈ 𝒩₀`, `W²(s) ∈ P₀`.
    I4,
    /// `s ∈ 𝒩₁`, `W²(s) ∈ P₀`.
    I5,
    /// `s ∈ F`.
    IiA,
    /// `s ∈ 𝒩`, `W(s) ∈ F`.
    IiB,
    /// `s ∈ 𝒩₀`, `W²(s) ∈ F`.
    IiC,
    /// `s ∈ 𝒩₁`, `W²(s) ∈ F`.
    IiD,
    /// `s ∈ Q₄` and every probed iterate has `y = v = 0`, `x = u = 2`.
    Lemma3ii,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Self::I1 => "(i)-1",
            Self::I2 => "(i)-2",
            Self::I3 => "(i)-3",
            Self::I4 => "(i)-4",
            Self::I5 => "(i)-5",
            Self::IiA => "(ii)-a",
            Self::IiB => "(ii)-b",
            Self::IiC => "(ii)-c",
            Self::IiD => "(ii)-d",
            Self::Lemma3ii => "Lemma3(ii)",
        }
    }

    pub fn condition(self) -> &'static str {
        match self {
            Self::I1 => "s∈P₀",
            Self::I2 => "s∈Q₄, y⁽ᵏ⁾v⁽ᵏ⁾≠0",
            Self::I3 => "s∈𝒩, W(s)∈P₀",
            Self::I4 => "s∈𝒩₀, W²(s)∈P₀",
            Self::I5 => "s∈𝒩₁, W²(s)∈P₀",
            Self::IiA => "s∈F",
            Self::IiB => "s∈𝒩, W(s)∈F",
            Self::IiC => "s∈𝒩₀, W²(s)∈F",
            Self::IiD => "s∈𝒩₁, W²(s)∈F",
            Self::Lemma3ii => "s∈Q₄, y⁽ᵏ⁾=v⁽ᵏ⁾=0",
        }
    }

    /// The limit this clause implies.
    pub fn kind(self) -> LimitKind {
        match self {
            Self::I1 | Self::I2 | Self::I3 | Self::I4 | Self::I5 => LimitKind::Zero,
            Self::IiA | Self::IiB | Self::IiC | Self::IiD => LimitKind::Infinity,
            Self::Lemma3ii => LimitKind::S2,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Witness {
    /// First probed step with `y⁽ᵏ⁾v⁽ᵏ⁾ ≠ 0`.
    Step(usize),
    /// Number of iterates probed without finding one.
    Probed(usize),
    /// The dominating ratio among `xu/4`, `yu/16`, `yv/9`.
    Ratio { name: &'static str, value: f64 },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Step(k) => write!(f, "k={k}"),
            Self::Probed(k) => write!(f, "probed={k}"),
            Self::Ratio { name, value } => write!(f, "{name}={value:?}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitVerdict {
    pub kind: LimitKind,
    pub rule: Option<Rule>,
    pub witness: Option<Witness>,
}

impl LimitVerdict {
    fn decided(rule: Rule, witness: Option<Witness>) -> Self {
        Self {
            kind: rule.kind(),
            rule: Some(rule),
            witness,
        }
    }

    const UNDECIDED: Self = Self {
        kind: LimitKind::Undecided,
        rule: None,
        witness: None,
    };

    pub fn is_decided(&self) -> bool {
        self.kind != LimitKind::Undecided
    }
}

const RATIO_NAMES: [&str; 3] = ["xu/4", "yu/16", "yv/9"];

fn ratio_witness(s: [f64; 4]) -> Witness {
    let (i, value) = dominant_ratio(s);
    Witness::Ratio {
        name: RATIO_NAMES[i],
        value,
    }
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= SET_TOL
}

/// Checks `P₀` then `F` on a forwarded image.
fn forwarded(image: [f64; 4], zero: Rule, infinity: Rule) -> Option<LimitVerdict> {
    let m = membership_of(image);
    if m.p0 {
        Some(LimitVerdict::decided(zero, None))
    } else if m.f {
        Some(LimitVerdict::decided(infinity, Some(ratio_witness(image))))
    } else {
        None
    }
}

/// Classifies the limit of the hemophilia trajectory from `s`.
///
/// Clauses are tried in order: `P₀`, the `Q₄` probe (which may yield the
/// `(2,0,2,0)` limit), `F`, then one forwarding step for `𝒩`, `𝒩₀`, `𝒩₁`.
/// States covered by none of them are `Undecided`.
pub fn classify_limit(s: &PopulationState, probe_budget: usize) -> Result<LimitVerdict> {
    if probe_budget == 0 {
        return Err(Error::InvalidArgument(
            "probe budget must be at least 1".into(),
        ));
    }
    let s = quad_of(s)?;
    let m = membership_of(s);

    if m.p0 {
        return Ok(LimitVerdict::decided(Rule::I1, None));
    }

    if m.in_q(4.0) {
        let mut t = s;
        let mut on_s2 = true;
        for k in 0..=probe_budget {
            let [x, y, u, v] = t;
            if (y * v).abs() > SET_TOL {
                return Ok(LimitVerdict::decided(Rule::I2, Some(Witness::Step(k))));
            }
            on_s2 &= y.abs() <= SET_TOL && v.abs() <= SET_TOL && same(x, 2.0) && same(u, 2.0);
            t = hemophilia_raw(t);
        }
        if on_s2 {
            return Ok(LimitVerdict::decided(
                Rule::Lemma3ii,
                Some(Witness::Probed(probe_budget + 1)),
            ));
        }
    }

    if m.f {
        return Ok(LimitVerdict::decided(Rule::IiA, Some(ratio_witness(s))));
    }

    let once = hemophilia_raw(s);
    let twice = hemophilia_raw(once);
    let verdict = if m.n {
        forwarded(once, Rule::I3, Rule::IiB)
    } else if m.n0 {
        forwarded(twice, Rule::I4, Rule::IiC)
    } else if m.n1 {
        forwarded(twice, Rule::I5, Rule::IiD)
    } else {
        None
    };
    Ok(verdict.unwrap_or(LimitVerdict::UNDECIDED))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(x: f64, y: f64, u: f64, v: f64) -> LimitVerdict {
        classify_limit(&PopulationState::quad(x, y, u, v), DEFAULT_PROBE_BUDGET).unwrap()
    }

    #[test]
    fn q4_with_nonzero_product() {
        let v = verdict(1.0, 1.0, 1.0, 1.0);
        assert_eq!(v.kind, LimitKind::Zero);
        assert_eq!(v.rule, Some(Rule::I2));
        assert_eq!(v.witness, Some(Witness::Step(0)));
    }

    #[test]
    fn fixed_point_s2() {
        let v = verdict(2.0, 0.0, 2.0, 0.0);
        assert_eq!(v.kind, LimitKind::S2);
        assert_eq!(v.rule, Some(Rule::Lemma3ii));
    }

    #[test]
    fn q4_boundary_reaches_a_product_later() {
        // y = 0 at the start, y⁽²⁾v⁽²⁾ = v²/4.
        let v = verdict(2.0, 0.0, 1.0, 1.0);
        assert_eq!(v.rule, Some(Rule::I2));
        assert_eq!(v.witness, Some(Witness::Step(2)));
    }

    #[test]
    fn f_clause() {
        let v = verdict(3.0, 0.0, 3.0, 0.0);
        assert_eq!(v.kind, LimitKind::Infinity);
        assert_eq!(v.rule.unwrap().id(), "(ii)-a");
        assert_eq!(
            v.witness,
            Some(Witness::Ratio {
                name: "xu/4",
                value: 2.25
            })
        );
        let v = verdict(5.0, 5.0, 5.0, 5.0);
        assert_eq!(v.rule, Some(Rule::IiA));
    }

    #[test]
    fn negative_orthant_forwarding() {
        let v = verdict(-1.0, 0.0, -3.0, 0.0);
        assert_eq!(v.kind, LimitKind::Zero);
        assert_eq!(v.rule.unwrap().to_string(), "(i)-3");

        let v = verdict(-3.0, 0.0, -3.0, 0.0);
        assert_eq!(v.rule, Some(Rule::IiB));
    }

    #[test]
    fn mixed_orthants_forward_twice() {
        // W(-1,0,1,0) = (-1/2,0,-1/2,0), W² = (1/8,0,1/8,0) ∈ P₀.
        assert_eq!(verdict(-1.0, 0.0, 1.0, 0.0).rule, Some(Rule::I4));
        assert_eq!(verdict(1.0, 0.0, -1.0, 0.0).rule, Some(Rule::I5));
        // W² = (2(9/4)², 0, ...) explodes.
        assert_eq!(verdict(-3.0, 0.0, 3.0, 0.0).rule, Some(Rule::IiC));
        assert_eq!(verdict(3.0, 0.0, -3.0, 0.0).rule, Some(Rule::IiD));
    }

    #[test]
    fn uncovered_states_are_undecided() {
        // Sum > 4, product ≥ 4, every ratio ≤ 1.
        let v = verdict(1.5, 1.5, 1.5, 1.5);
        assert_eq!(v.kind, LimitKind::Undecided);
        assert_eq!(v.rule, None);
        // Mixed signs within a block.
        assert!(!verdict(1.0, -1.0, 2.0, 3.0).is_decided());
    }

    #[test]
    fn rule_kind_consistency() {
        for r in [Rule::I1, Rule::I2, Rule::I3, Rule::I4, Rule::I5] {
            assert_eq!(r.kind(), LimitKind::Zero);
            assert!(r.id().starts_with("(i)-"));
        }
        for r in [Rule::IiA, Rule::IiB, Rule::IiC, Rule::IiD] {
            assert_eq!(r.kind(), LimitKind::Infinity);
        }
        assert_eq!(Rule::Lemma3ii.kind(), LimitKind::S2);
    }

    #[test]
    fn rejects_zero_budget_and_wrong_layout() {
        let s = PopulationState::quad(1.0, 1.0, 1.0, 1.0);
        assert!(classify_limit(&s, 0).is_err());
        let s = PopulationState::new(&[1.0], &[1.0, 2.0]).unwrap();
        assert!(classify_limit(&s, 10).is_err());
    }
}
