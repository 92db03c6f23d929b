//! Sign- and level-defined subsets of `R⁴` for the hemophilia operator and
//! the limit behaviour of trajectories started in them.
//!
//! With `s = (x, y, u, v)`:
//!
//! | set  | definition |
//! |------|------------|
//! | `O`  | `x = y = 0` or `u = v = 0` |
//! | `I`  | `y = v = 0` |
//! | `J`  | `s ∈ I`, `x = u` |
//! | `P`  | all coordinates `≥ 0` |
//! | `Q_a`| `s ∈ P`, `x + y + u + v ≤ a` |
//! | `N`  | all coordinates `≤ 0` |
//! | `N0` | `x, y ≤ 0`, `u, v ≥ 0` |
//! | `N1` | `x, y ≥ 0`, `u, v ≤ 0` |
//! | `P0` | `s ∈ P`, `(x + y)(u + v) < 4` |
//! | `F`  | `s ∈ P`, `x+y+u+v > 4`, `max(xu/4, yu/16, yv/9) > 1` |

mod classifier;
mod properties;

pub use classifier::{
    classify_limit, LimitKind, LimitVerdict, Rule, Witness, DEFAULT_PROBE_BUDGET,
};
pub use properties::{
    check_classifier_soundness, check_i_trichotomy, check_lemma4, check_lemma5_bound,
    observed_limit, verify_lemma1, SoundnessReport, TrichotomyCase, LIMIT_TOL,
};

use crate::error::{Error, Result};
use crate::state::PopulationState;

/// Tolerance on all defining equalities and inequalities.
pub const SET_TOL: f64 = 1e-12;

/// The hemophilia operator in closed form.
pub fn hemophilia_raw([x, y, u, v]: [f64; 4]) -> [f64; 4] {
    let yu = 0.25 * y * u;
    let yv = y * v / 3.0;
    [
        0.5 * x * u + yu,
        0.5 * x * v + yu + yv,
        0.5 * x * u + 0.5 * x * v + yu + yv,
        yu + yv,
    ]
}

pub(crate) fn quad_of(s: &PopulationState) -> Result<[f64; 4]> {
    s.as_quad()
        .ok_or_else(|| Error::InvalidState("expected a state (x, y, u, v)".into()))
}

/// Membership of a state in each of the sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetMembership {
    pub o: bool,
    pub i: bool,
    pub j: bool,
    pub p: bool,
    pub n: bool,
    pub n0: bool,
    pub n1: bool,
    /// `x + y + u + v` when `s ∈ P`: the smallest `a` with `s ∈ Q_a`.
    pub q_level: Option<f64>,
    pub p0: bool,
    pub f: bool,
}

impl SetMembership {
    pub fn in_q(&self, a: f64) -> bool {
        self.q_level.is_some_and(|q| q <= a + SET_TOL)
    }
}

fn zero(v: f64) -> bool {
    v.abs() <= SET_TOL
}

fn nonneg(v: f64) -> bool {
    v >= -SET_TOL
}

fn nonpos(v: f64) -> bool {
    v <= SET_TOL
}

/// The largest of `xu/4`, `yu/16`, `yv/9`, with its index (0, 1, 2).
pub fn dominant_ratio([x, y, u, v]: [f64; 4]) -> (usize, f64) {
    [x * u / 4.0, y * u / 16.0, y * v / 9.0]
        .into_iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, r)| {
            if r > best.1 {
                (i, r)
            } else {
                best
            }
        })
}

pub fn membership_of([x, y, u, v]: [f64; 4]) -> SetMembership {
    let i = zero(y) && zero(v);
    let p = [x, y, u, v].into_iter().all(nonneg);
    let sum = x + y + u + v;
    let product = (x + y) * (u + v);
    SetMembership {
        o: (zero(x) && zero(y)) || (zero(u) && zero(v)),
        i,
        j: i && zero(x - u),
        p,
        n: [x, y, u, v].into_iter().all(nonpos),
        n0: nonpos(x) && nonpos(y) && nonneg(u) && nonneg(v),
        n1: nonneg(x) && nonneg(y) && nonpos(u) && nonpos(v),
        q_level: p.then_some(sum),
        p0: p && product < 4.0 - SET_TOL,
        f: p && sum > 4.0 + SET_TOL && dominant_ratio([x, y, u, v]).1 > 1.0 + SET_TOL,
    }
}

pub fn membership(s: &PopulationState) -> Result<SetMembership> {
    Ok(membership_of(quad_of(s)?))
}

/// `2 (x0/2)^(2^k)`, the `k`-th iterate of `x ↦ x²/2` (the dynamics on `J`).
///
/// Small `k` use repeated squaring; large `k` go through the log-magnitude,
/// returning `+∞` on overflow and `0` on underflow.
pub fn closed_form_j(x0: f64, k: u32) -> f64 {
    if x0 == 0.0 {
        return 0.0;
    }
    if k == 0 {
        return x0;
    }
    let half = x0 / 2.0;
    if k <= 64 {
        let mut r = half;
        for _ in 0..k {
            r *= r;
        }
        return 2.0 * r;
    }
    let log_mag = half.abs().ln();
    if log_mag == 0.0 {
        return 2.0;
    }
    let log_val = std::f64::consts::LN_2 + 2f64.powi(k.min(i32::MAX as u32) as i32) * log_mag;
    if log_val > f64::MAX.ln() {
        f64::INFINITY
    } else {
        log_val.exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_matches_tensor() {
        let op = crate::operator::GonosomalOperator::hemophilia();
        let s = [0.3, -1.2, 2.5, 0.7];
        let a = hemophilia_raw(s);
        let b = op
            .apply_raw(&PopulationState::quad(s[0], s[1], s[2], s[3]))
            .unwrap();
        for (p, q) in a.iter().zip(b.coords()) {
            assert!((p - q).abs() < 1e-15);
        }
    }

    #[test]
    fn membership_examples() {
        let m = membership_of([1.0, 0.0, 1.0, 0.0]);
        assert!(m.i && m.j && m.p);
        assert_eq!(m.q_level, Some(2.0));
        assert!(m.p0);

        let m = membership_of([-1.0, -1.0, 1.0, 1.0]);
        assert!(m.n0 && !m.p && !m.n && !m.n1);
        assert_eq!(m.q_level, None);

        let m = membership_of([1.0, 1.0, 1.0, 1.0]);
        assert!(m.p && !m.p0 && !m.f);
        assert_eq!(m.q_level, Some(4.0));
        assert!(m.in_q(4.0) && !m.in_q(3.9));

        let m = membership_of([0.0, 0.0, 3.0, -2.0]);
        assert!(m.o && !m.i);

        let m = membership_of([3.0, 0.0, 3.0, 0.0]);
        assert!(m.f && !m.p0);
    }

    #[test]
    fn j_implies_i() {
        for s in [[1.0, 0.0, 1.0, 0.0], [-2.0, 0.0, -2.0, 0.0], [0.0; 4]] {
            let m = membership_of(s);
            assert!(m.j && m.i);
        }
    }

    #[test]
    fn closed_form_values() {
        for k in [0, 1, 5, 40, 100, 5000] {
            assert_eq!(closed_form_j(2.0, k), 2.0);
            assert_eq!(closed_form_j(0.0, k), 0.0);
        }
        assert!((closed_form_j(1.0, 3) - 1.0 / 128.0).abs() < 1e-18);
        assert_eq!(closed_form_j(-2.0, 3), 2.0);
        assert_eq!(closed_form_j(-1.5, 0), -1.5);
        assert_eq!(closed_form_j(3.0, 200), f64::INFINITY);
        assert_eq!(closed_form_j(1.9, 200), 0.0);
        assert_eq!(closed_form_j(-3.0, 2000), f64::INFINITY);
    }
}
