//! The property battery behind `gonosomal verify`.

use rayon::prelude::*;

use crate::error::Result;
use crate::invariant_sets::{
    check_classifier_soundness, check_i_trichotomy, check_lemma4, check_lemma5_bound,
    verify_lemma1, DEFAULT_PROBE_BUDGET,
};
use crate::linalg::{central_difference, Matrix};
use crate::normalized::{
    check_estimates, ec_condition, reduced_jacobian, reduced_map, SimplexState,
};
use crate::operator::GonosomalOperator;
use crate::report::PropertyReport;
use crate::sampling::{stream, uniform_box, uniform_simplex, DEFAULT_SEED};
use crate::state::PopulationState;
use crate::tensor::{InheritanceTensor, ROW_SUM_TOL};
use crate::trajectory::IterateOptions;

/// Relative tolerance of the sum-product identity.
pub const SUM_PRODUCT_TOL: f64 = 1e-12;
/// Step and tolerance of the finite-difference Jacobian oracle.
pub const FD_STEP: f64 = 1e-6;
pub const FD_TOL: f64 = 1e-6;

/// Limits `|x_i u_0|` on the line `I` checked against the trichotomy.
pub const TRICHOTOMY_PRODUCTS: [f64; 5] = [1.0, 3.99, 4.0, 4.01, 9.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
    pub probe_budget: usize,
    pub iterate: IterateOptions,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            samples: 10_000,
            seed: DEFAULT_SEED,
            probe_budget: DEFAULT_PROBE_BUDGET,
            iterate: IterateOptions::default(),
        }
    }
}

/// `|Σ W(s) − (Σx)(Σy)|` scaled by `1 + (Σ|x|)(Σ|y|)`, the size of the
/// terms that cancel in either sum.
pub fn relative_sum_product_residual(op: &GonosomalOperator, s: &PopulationState) -> Result<f64> {
    let abs = |b: &[f64]| b.iter().map(|v| v.abs()).sum::<f64>();
    let scale = 1.0 + abs(s.female()) * abs(s.male());
    Ok(op.sum_product_residual(s)? / scale)
}

fn gap(a: &Matrix, b: &Matrix) -> f64 {
    if (a.rows(), a.cols()) == (b.rows(), b.cols()) {
        a.max_abs_diff(b)
    } else {
        f64::INFINITY
    }
}

/// Raw Jacobian against central differences at `s`.
pub fn raw_jacobian_gap(op: &GonosomalOperator, s: &PopulationState) -> Result<f64> {
    let analytic = op.jacobian_raw(s)?;
    let n = op.n();
    let numeric = central_difference(
        |c| {
            Ok(op
                .apply_raw(&PopulationState::from_coords(c.to_vec(), n)?)?
                .into_coords())
        },
        s.coords(),
        FD_STEP,
    )?;
    Ok(gap(&analytic, &numeric))
}

/// Reduced normalized Jacobian against central differences of the reduced
/// map at `s`.
pub fn reduced_jacobian_gap(
    op: &GonosomalOperator,
    s: &PopulationState,
    eliminate: usize,
) -> Result<f64> {
    let analytic = reduced_jacobian(op, s, eliminate)?;
    let t = crate::normalized::project(s, eliminate);
    let numeric = central_difference(|t| reduced_map(op, t, eliminate), &t, FD_STEP)?;
    Ok(gap(&analytic, &numeric))
}

/// A simplex point whose block sums both lie in `[0.1, 0.9]`.
pub fn interior_simplex_point(rng: &mut rand_chacha::ChaCha8Rng, n: usize, dim: usize) -> Vec<f64> {
    loop {
        let s = uniform_simplex(rng, dim);
        let f: f64 = s[..n].iter().sum();
        if (0.1..=0.9).contains(&f) {
            return s;
        }
    }
}

fn per_sample<F>(clause: &str, samples: usize, seed: u64, tag: u64, f: F) -> Result<PropertyReport>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<(Vec<f64>, bool)> + Sync,
{
    let results = (0..samples)
        .into_par_iter()
        .map(|i| f(&mut stream(seed, (tag << 32) | i as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PropertyReport::from_results(clause, results))
}

fn generic(op: &GonosomalOperator, cfg: &VerifyConfig) -> Result<Vec<PropertyReport>> {
    let t = op.tensor();
    let (n, dim) = (op.n(), op.dim());
    let rows: Vec<(Vec<f64>, bool)> = t
        .pairs()
        .map(|(i, k)| {
            let defect = (t.row_sum(i, k) - 1.0).abs();
            (vec![i as f64 + 1.0, k as f64 + 1.0], defect <= ROW_SUM_TOL)
        })
        .collect();
    let mut reports = vec![PropertyReport::from_results("tensor rows sum to 1", rows)
        .with_detail(format!("max_defect={:e}", t.max_row_sum_defect()))];

    reports.push(per_sample(
        "sum-product identity",
        cfg.samples,
        cfg.seed,
        100,
        |rng| {
            let s = PopulationState::from_coords(uniform_box(rng, dim, -10.0, 10.0), n)?;
            let ok = relative_sum_product_residual(op, &s)? <= SUM_PRODUCT_TOL;
            Ok((s.into_coords(), ok))
        },
    )?);
    reports.push(per_sample(
        "raw Jacobian vs central differences",
        cfg.samples,
        cfg.seed,
        101,
        |rng| {
            let s = PopulationState::from_coords(uniform_box(rng, dim, -10.0, 10.0), n)?;
            let ok = raw_jacobian_gap(op, &s)? <= FD_TOL;
            Ok((s.into_coords(), ok))
        },
    )?);

    let simplex_ready = t.check_stochastic().is_ok() && ec_condition(t)?;
    if simplex_ready {
        reports.push(per_sample(
            "V maps the simplex to itself",
            cfg.samples,
            cfg.seed,
            102,
            |rng| {
                let s = PopulationState::from_coords(interior_simplex_point(rng, n, dim), n)?;
                let image = op.normalized_image(&s)?;
                let ok = image.coords().iter().all(|&c| c >= 0.0)
                    && (image.total() - 1.0).abs() <= 1e-12;
                Ok((s.into_coords(), ok))
            },
        )?);
        reports.push(per_sample(
            "reduced Jacobian vs central differences",
            cfg.samples,
            cfg.seed,
            103,
            |rng| {
                let s = PopulationState::from_coords(interior_simplex_point(rng, n, dim), n)?;
                let ok = reduced_jacobian_gap(op, &s, n)? <= FD_TOL;
                Ok((s.into_coords(), ok))
            },
        )?);
    }
    Ok(reports)
}

fn is_hemophilia(t: &InheritanceTensor) -> bool {
    t.max_abs_diff(&InheritanceTensor::hemophilia())
        .is_some_and(|d| d <= 1e-12)
}

fn estimate_reports(cfg: &VerifyConfig) -> Result<Vec<PropertyReport>> {
    const GROUPS: [(&str, &str); 4] = [
        ("one-step estimates", "lo."),
        ("5/12 <= x(2)+y(2) <= 1/2", "ly.x(2)+y(2)"),
        ("v(n+1) <= 13/24 y(n), n >= 2", "ly.contraction 13/24"),
        ("v(n+1) <= 7/10 y(n), n >= 2", "ly.contraction 7/10"),
    ];
    let per_state: Vec<(Vec<f64>, [bool; 4])> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(cfg.seed, (104 << 32) | i as u64);
            let c = uniform_simplex(&mut rng, 4);
            let s = SimplexState::quad(c[0], c[1], c[2], c[3])?;
            let r = check_estimates(&s)?;
            Ok((c, GROUPS.map(|(_, prefix)| r.group_holds(prefix))))
        })
        .collect::<Result<_>>()?;
    Ok(GROUPS
        .iter()
        .enumerate()
        .map(|(g, (clause, _))| {
            PropertyReport::from_results(
                *clause,
                per_state.iter().map(|(c, ok)| (c.clone(), ok[g])),
            )
        })
        .collect())
}

fn hemophilia_reports(op: &GonosomalOperator, cfg: &VerifyConfig) -> Result<Vec<PropertyReport>> {
    let mut reports = verify_lemma1(op, cfg.samples, cfg.seed)?;

    let cases = check_i_trichotomy(op, &TRICHOTOMY_PRODUCTS, &cfg.iterate)?;
    reports.push(PropertyReport::from_results(
        "trichotomy on I",
        cases.iter().map(|c| (c.start.to_vec(), c.agrees())),
    ));
    reports.push(check_lemma4(cfg.samples, cfg.seed, cfg.probe_budget));
    reports.push(check_lemma5_bound(cfg.samples, cfg.seed));

    let soundness =
        check_classifier_soundness(op, cfg.samples, cfg.seed, cfg.probe_budget, &cfg.iterate)?;
    let detail = format!(
        "undecided={} undecided_rate={:.4}",
        soundness.undecided,
        soundness.undecided_rate()
    );
    reports.push(soundness.report.with_detail(detail));

    reports.extend(estimate_reports(cfg)?);
    Ok(reports)
}

/// Runs every suite that applies to `op`: the generic identities for any
/// tensor, the simplex checks when the tensor is stochastic with positive
/// block sub-sums, and the invariant-set and estimate checks when it is the
/// hemophilia tensor.
pub fn run_verify(op: &GonosomalOperator, cfg: &VerifyConfig) -> Result<Vec<PropertyReport>> {
    let mut reports = generic(op, cfg)?;
    if is_hemophilia(op.tensor()) {
        reports.extend(hemophilia_reports(op, cfg)?);
    }
    Ok(reports)
}
