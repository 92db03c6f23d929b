//! Sampled checks of the invariant-set statements for the hemophilia operator.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::classifier::{classify_limit, LimitKind};
use super::{hemophilia_raw, membership_of, SET_TOL};
use crate::error::{Error, Result};
use crate::operator::GonosomalOperator;
use crate::report::PropertyReport;
use crate::sampling::{stream, uniform_box, uniform_simplex};
use crate::state::PopulationState;
use crate::tensor::InheritanceTensor;
use crate::trajectory::{iterate, IterateOptions, Mode, StopReason};

/// Distance from a limit point accepted as convergence to it.
pub const LIMIT_TOL: f64 = 1e-8;

const S2: [f64; 4] = [2.0, 0.0, 2.0, 0.0];

fn require_hemophilia(op: &GonosomalOperator) -> Result<()> {
    let same = op
        .tensor()
        .max_abs_diff(&InheritanceTensor::hemophilia())
        .is_some_and(|d| d <= 1e-12);
    if same {
        Ok(())
    } else {
        Err(Error::InvalidArgument(
            "the check is stated for the hemophilia operator only".into(),
        ))
    }
}

/// Runs `check` on `samples` states drawn by `draw`, each from its own stream.
fn sampled<D, C>(
    clause: &str,
    samples: usize,
    seed: u64,
    tag: u64,
    draw: D,
    check: C,
) -> PropertyReport
where
    D: Fn(&mut ChaCha8Rng, usize) -> [f64; 4] + Sync,
    C: Fn([f64; 4]) -> bool + Sync,
{
    let results: Vec<(Vec<f64>, bool)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, (tag << 32) | i as u64);
            let s = draw(&mut rng, i);
            (s.to_vec(), check(s))
        })
        .collect();
    PropertyReport::from_results(clause, results)
}

fn quad(v: Vec<f64>) -> [f64; 4] {
    [v[0], v[1], v[2], v[3]]
}

fn signed_box(rng: &mut ChaCha8Rng, signs: [f64; 4]) -> [f64; 4] {
    let b = uniform_box(rng, 4, 0.0, 3.0);
    [
        b[0] * signs[0],
        b[1] * signs[1],
        b[2] * signs[2],
        b[3] * signs[3],
    ]
}

/// A state of `Q_a`. Every second sample lies on `Σ = a`; half of those
/// split evenly as `x + y = u + v = a/2`, where `W` attains `a²/4`.
fn draw_q(rng: &mut ChaCha8Rng, i: usize, a: f64) -> [f64; 4] {
    match i % 4 {
        0 | 2 => {
            let r: f64 = rng.random();
            quad(uniform_simplex(rng, 4)).map(|c| c * a * r)
        }
        1 => quad(uniform_simplex(rng, 4)).map(|c| c * a),
        _ => {
            let half = a / 2.0;
            let x = rng.random_range(0.0..=half);
            let u = rng.random_range(0.0..=half);
            [x, half - x, u, half - u]
        }
    }
}

/// Image containments for `I`, `J`, `P`, `Q_a` (`a = 1, 2, 3, 4`), `O`,
/// `𝒩`, `𝒩₀` and `𝒩₁`, `samples` states each.
pub fn verify_lemma1(
    op: &GonosomalOperator,
    samples: usize,
    seed: u64,
) -> Result<Vec<PropertyReport>> {
    require_hemophilia(op)?;
    let image = |s: [f64; 4]| membership_of(hemophilia_raw(s));
    let mut reports = vec![
        sampled(
            "W(I)⊂I",
            samples,
            seed,
            1,
            |rng, _| {
                let b = uniform_box(rng, 2, -3.0, 3.0);
                [b[0], 0.0, b[1], 0.0]
            },
            |s| image(s).i,
        ),
        sampled(
            "W(J)⊂J",
            samples,
            seed,
            2,
            |rng, _| {
                let x = rng.random_range(-3.0..=3.0);
                [x, 0.0, x, 0.0]
            },
            |s| image(s).j,
        ),
        sampled(
            "W(P)⊂P",
            samples,
            seed,
            3,
            |rng, _| signed_box(rng, [1.0; 4]),
            |s| image(s).p,
        ),
    ];
    for a in [1.0, 2.0, 3.0, 4.0] {
        let bound = a * a / 4.0;
        reports.push(sampled(
            &format!("W(Q_{a})⊂Q_{bound}"),
            samples,
            seed,
            3 + a as u64,
            |rng, i| draw_q(rng, i, a),
            |s| {
                let m = image(s);
                m.p && m.q_level.is_some_and(|q| q <= bound + SET_TOL)
            },
        ));
    }
    reports.extend([
        sampled(
            "W(O)={0}",
            samples,
            seed,
            8,
            |rng, i| {
                let b = uniform_box(rng, 2, -3.0, 3.0);
                if i % 2 == 0 {
                    [0.0, 0.0, b[0], b[1]]
                } else {
                    [b[0], b[1], 0.0, 0.0]
                }
            },
            |s| hemophilia_raw(s).iter().all(|&c| c == 0.0),
        ),
        sampled(
            "W(N)⊂P",
            samples,
            seed,
            9,
            |rng, _| signed_box(rng, [-1.0; 4]),
            |s| image(s).p,
        ),
        sampled(
            "W(N0)⊂N",
            samples,
            seed,
            10,
            |rng, _| signed_box(rng, [-1.0, -1.0, 1.0, 1.0]),
            |s| image(s).n,
        ),
        sampled(
            "W(N1)⊂N",
            samples,
            seed,
            11,
            |rng, _| signed_box(rng, [1.0, 1.0, -1.0, -1.0]),
            |s| image(s).n,
        ),
    ]);
    Ok(reports)
}

/// Outcome of one start on the line `I`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrichotomyCase {
    pub start: [f64; 4],
    pub expected: LimitKind,
    pub observed: LimitKind,
    pub stop_reason: StopReason,
    pub limit: Option<Vec<f64>>,
}

impl TrichotomyCase {
    pub fn agrees(&self) -> bool {
        self.expected == self.observed
    }
}

/// What `iterate()` did, read as a limit kind.
pub fn observed_limit(
    op: &GonosomalOperator,
    s: [f64; 4],
    opts: &IterateOptions,
) -> Result<(LimitKind, StopReason, Option<PopulationState>)> {
    let start = PopulationState::quad(s[0], s[1], s[2], s[3]);
    let rec = iterate(op, &start, Mode::Raw, opts)?;
    let kind = match (&rec.stop_reason, &rec.limit) {
        (StopReason::Diverged, _) => LimitKind::Infinity,
        (StopReason::ConvergedToPoint, Some(p)) if p.max_norm() <= LIMIT_TOL => LimitKind::Zero,
        (StopReason::ConvergedToPoint, Some(p))
            if p.distance(&PopulationState::quad(S2[0], S2[1], S2[2], S2[3])) <= LIMIT_TOL =>
        {
            LimitKind::S2
        }
        _ => LimitKind::Undecided,
    };
    Ok((kind, rec.stop_reason, rec.limit))
}

/// Starts `(x₀, 0, 1, 0)` and `(−x₀, 0, 1, 0)` for each `x₀ = |x₀u₀|`,
/// compared with the limit predicted by the sign of `|x₀u₀| − 4`.
pub fn check_i_trichotomy(
    op: &GonosomalOperator,
    products: &[f64],
    opts: &IterateOptions,
) -> Result<Vec<TrichotomyCase>> {
    require_hemophilia(op)?;
    let mut cases = Vec::new();
    for &p in products {
        let expected = match p.abs().partial_cmp(&4.0) {
            Some(std::cmp::Ordering::Less) => LimitKind::Zero,
            Some(std::cmp::Ordering::Equal) => LimitKind::S2,
            _ => LimitKind::Infinity,
        };
        for x0 in [p, -p] {
            let start = [x0, 0.0, 1.0, 0.0];
            let (observed, stop_reason, limit) = observed_limit(op, start, opts)?;
            cases.push(TrichotomyCase {
                start,
                expected,
                observed,
                stop_reason,
                limit: limit.map(PopulationState::into_coords),
            });
        }
    }
    Ok(cases)
}

/// On `x + y = u + v = 2`: `y⁽ᵏ⁾v⁽ᵏ⁾` vanishes for every probed `k` exactly
/// when `y = v = 0`, and then `y⁽ᵏ⁾ = v⁽ᵏ⁾ = 0`, `x⁽ᵏ⁾ = u⁽ᵏ⁾ = 2` throughout.
pub fn check_lemma4(samples: usize, seed: u64, probe: usize) -> PropertyReport {
    sampled(
        "Lemma 4",
        samples,
        seed,
        20,
        |rng, i| {
            let t = rng.random_range(1e-3..=2.0);
            match i % 3 {
                0 => [2.0, 0.0, 2.0 - t, t],
                1 => [2.0 - t, t, 2.0, 0.0],
                _ => S2,
            }
        },
        |s| {
            let trivial = s[1] == 0.0 && s[3] == 0.0;
            let mut t = s;
            let mut products_vanish = true;
            let mut stays_on_s2 = true;
            for _ in 0..=probe {
                products_vanish &= (t[1] * t[3]).abs() <= SET_TOL;
                stays_on_s2 &= t == S2;
                t = hemophilia_raw(t);
            }
            products_vanish == trivial && (!trivial || stays_on_s2)
        },
    )
    .with_detail(format!("probe={probe}"))
}

/// For `s ∈ P` with `xu/4 = r > 1`: `x⁽ᵏ⁺¹⁾, u⁽ᵏ⁺¹⁾ ≥ 2 r^(2ᵏ)` for `k ≤ 4`.
pub fn check_lemma5_bound(samples: usize, seed: u64) -> PropertyReport {
    sampled(
        "Lemma 5(b) growth",
        samples,
        seed,
        21,
        |rng, _| {
            let r = rng.random_range(1.0..=2.0);
            let x = rng.random_range(2.0..=5.0);
            let yv = uniform_box(rng, 2, 0.0, 3.0);
            [x, yv[0], 4.0 * r / x, yv[1]]
        },
        |s| {
            let r = s[0] * s[2] / 4.0;
            let mut t = s;
            (0..=4).all(|k| {
                t = hemophilia_raw(t);
                let bound = 2.0 * r.powi(1 << k);
                let slack = 1e-12 * bound;
                t[0] >= bound - slack && t[2] >= bound - slack
            })
        },
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct SoundnessReport {
    pub report: PropertyReport,
    pub decided: usize,
    pub undecided: usize,
    /// Decided samples per rule id.
    pub by_rule: BTreeMap<&'static str, usize>,
}

impl SoundnessReport {
    pub fn undecided_rate(&self) -> f64 {
        let total = self.decided + self.undecided;
        if total == 0 {
            0.0
        } else {
            self.undecided as f64 / total as f64
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = self.report.to_text();
        out.push_str(&format!("decided={}\n", self.decided));
        out.push_str(&format!("undecided={}\n", self.undecided));
        out.push_str(&format!("undecided_rate={:.4}\n", self.undecided_rate()));
        for (rule, count) in &self.by_rule {
            out.push_str(&format!("rule.{rule}={count}\n"));
        }
        out
    }
}

/// Compares `classify_limit` with `iterate()` on states drawn from `[0,3]⁴`
/// and the sign patterns of `𝒩`, `𝒩₀`, `𝒩₁` (magnitudes up to 3).
///
/// Only decided verdicts count as samples of the property.
pub fn check_classifier_soundness(
    op: &GonosomalOperator,
    samples: usize,
    seed: u64,
    probe_budget: usize,
    opts: &IterateOptions,
) -> Result<SoundnessReport> {
    require_hemophilia(op)?;
    const SIGNS: [[f64; 4]; 4] = [
        [1.0; 4],
        [-1.0; 4],
        [-1.0, -1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0, -1.0],
    ];
    type Outcome = ([f64; 4], Option<(&'static str, bool)>);
    let outcomes: Vec<Outcome> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let mut rng = stream(seed, (22 << 32) | i as u64);
            let s = signed_box(&mut rng, SIGNS[i % 4]);
            let verdict =
                classify_limit(&PopulationState::quad(s[0], s[1], s[2], s[3]), probe_budget)?;
            let Some(rule) = verdict.rule else {
                return Ok((s, None));
            };
            let (observed, _, _) = observed_limit(op, s, opts)?;
            Ok((s, Some((rule.id(), observed == verdict.kind))))
        })
        .collect::<Result<_>>()?;

    let mut by_rule = BTreeMap::new();
    let mut undecided = 0;
    let mut decided = Vec::new();
    for (s, outcome) in outcomes {
        match outcome {
            Some((rule, ok)) => {
                *by_rule.entry(rule).or_insert(0) += 1;
                decided.push((s.to_vec(), ok));
            }
            None => undecided += 1,
        }
    }
    Ok(SoundnessReport {
        decided: decided.len(),
        report: PropertyReport::from_results("classifier soundness", decided),
        undecided,
        by_rule,
    })
}
