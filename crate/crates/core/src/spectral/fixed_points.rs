use rand::Rng;
use rayon::prelude::*;

use super::{classify, eigenvalues, Classification, FixedPointReport};
use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};
use crate::normalized::{embed, project, reduced_jacobian, reduced_map};
use crate::operator::GonosomalOperator;
use crate::sampling::{stream, uniform_box, uniform_simplex, DEFAULT_SEED};
use crate::state::PopulationState;
use crate::trajectory::Mode;

/// Roots closer than this (∞-norm) are merged.
pub const DEDUP_RADIUS: f64 = 1e-6;

const MAX_NEWTON_STEPS: usize = 200;
const MAX_HALVINGS: usize = 40;
const SINGULAR_DET: f64 = 1e-14;
const JITTER: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointSearch {
    pub mode: Mode,
    pub n_seeds: usize,
    /// Raw mode seeds are uniform in `[lo, hi]^d`; normalized seeds are uniform
    /// on the simplex and ignore the box.
    pub seed_box: (f64, f64),
    pub rng_seed: u64,
    /// Residual a root must reach to be reported.
    pub tol: f64,
}

impl Default for FixedPointSearch {
    fn default() -> Self {
        Self {
            mode: Mode::Raw,
            n_seeds: 1000,
            seed_box: (-5.0, 5.0),
            rng_seed: DEFAULT_SEED,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    /// Distinct roots, sorted lexicographically.
    pub reports: Vec<FixedPointReport>,
    /// Seeds whose Newton run did not reach the tolerance.
    pub dropped: usize,
}

/// The residual map `F(t) = T(t) − t` whose roots are fixed points, in the
/// coordinates Newton works in.
struct Residual<'a> {
    op: &'a GonosomalOperator,
    mode: Mode,
}

impl Residual<'_> {
    // Normalized mode works on the simplex with the first male coordinate
    // eliminated.
    fn eliminated(&self) -> usize {
        self.op.n()
    }

    fn to_coords(&self, s: &PopulationState) -> Vec<f64> {
        match self.mode {
            Mode::Raw => s.coords().to_vec(),
            Mode::Normalized => project(s, self.eliminated()),
        }
    }

    fn to_state(&self, t: &[f64]) -> PopulationState {
        match self.mode {
            Mode::Raw => PopulationState::from_raw_parts(t.to_vec(), self.op.n()),
            Mode::Normalized => embed(t, self.eliminated(), self.op.n()),
        }
    }

    fn value(&self, t: &[f64]) -> Option<Vec<f64>> {
        let image = match self.mode {
            Mode::Raw => self.op.apply_raw(&self.to_state(t)).ok()?.into_coords(),
            Mode::Normalized => reduced_map(self.op, t, self.eliminated()).ok()?,
        };
        let f: Vec<f64> = image.iter().zip(t).map(|(a, b)| a - b).collect();
        f.iter().all(|v| v.is_finite()).then_some(f)
    }

    fn jacobian(&self, t: &[f64]) -> Option<Matrix> {
        let s = self.to_state(t);
        let j = match self.mode {
            Mode::Raw => self.op.jacobian_raw(&s).ok()?,
            Mode::Normalized => reduced_jacobian(self.op, &s, self.eliminated()).ok()?,
        };
        j.is_finite().then_some(j)
    }
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Damped Newton on `F(t) = T(t) − t` from `start`. Returns the final iterate
/// if its residual is at most `tol`.
///
/// A step is accepted when it lowers the residual or lands at the rounding
/// floor; otherwise it is halved up to 40 times. A numerically singular
/// Jacobian triggers one random jitter of size 1e-8, after which the seed is
/// abandoned.
pub fn newton_solve(
    op: &GonosomalOperator,
    mode: Mode,
    start: &PopulationState,
    tol: f64,
    rng: &mut impl Rng,
) -> Option<PopulationState> {
    let res = Residual { op, mode };
    let mut t = res.to_coords(start);
    let mut f = res.value(&t)?;
    let mut jittered = false;
    for _ in 0..MAX_NEWTON_STEPS {
        let r = norm_inf(&f);
        if r == 0.0 {
            break;
        }
        let jac = res.jacobian(&t)?.sub_identity();
        let lu = Lu::factor(&jac).ok()?;
        let scale = jac.norm_inf().max(1.0).powi(jac.rows() as i32);
        let step = if lu.determinant().abs() <= SINGULAR_DET * scale {
            None
        } else {
            let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
            lu.solve(&rhs)
        };
        let Some(step) = step else {
            if r <= tol {
                break;
            }
            if jittered {
                return None;
            }
            jittered = true;
            for c in t.iter_mut() {
                *c += rng.random_range(-JITTER..=JITTER);
            }
            f = res.value(&t)?;
            continue;
        };

        let floor = 1e-14 * (1.0 + norm_inf(&t)).powi(2);
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let cand: Vec<f64> = t.iter().zip(&step).map(|(a, d)| a + lambda * d).collect();
            if let Some(fc) = res.value(&cand) {
                let rc = norm_inf(&fc);
                if rc < r || rc <= floor {
                    accepted = Some((cand, fc));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((cand, fc)) = accepted else { break };
        let moved = lambda * norm_inf(&step);
        t = cand;
        f = fc;
        if moved <= 1e-15 * (1.0 + norm_inf(&t)) {
            break;
        }
    }
    let s = res.to_state(&t);
    // independent re-check in the full coordinates
    let residual = full_residual(op, mode, &s)?;
    (residual <= tol).then_some(s)
}

fn full_residual(op: &GonosomalOperator, mode: Mode, s: &PopulationState) -> Option<f64> {
    let image = match mode {
        Mode::Raw => op.apply_raw(s).ok()?,
        Mode::Normalized => op.normalized_image(s).ok()?,
    };
    let r = image.distance(s);
    r.is_finite().then_some(r)
}

fn build_report(
    op: &GonosomalOperator,
    mode: Mode,
    point: PopulationState,
) -> Result<FixedPointReport> {
    let residual = full_residual(op, mode, &point).ok_or(Error::NonFinite("residual"))?;
    let jacobian = match mode {
        Mode::Raw => op.jacobian_raw(&point)?,
        Mode::Normalized => reduced_jacobian(op, &point, op.n())?,
    };
    let eigenvalues = eigenvalues(&jacobian)?;
    let classification = classify(&eigenvalues);
    let note = (classification == Classification::NonHyperbolic)
        .then(|| "unit-modulus eigenvalue: linearization does not decide stability".to_string());
    Ok(FixedPointReport {
        point,
        residual,
        jacobian,
        eigenvalues,
        classification,
        note,
    })
}

fn lexicographic(a: &PopulationState, b: &PopulationState) -> std::cmp::Ordering {
    a.coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Runs Newton from explicit seeds and reports the distinct roots.
pub fn find_fixed_points_from(
    op: &GonosomalOperator,
    mode: Mode,
    seeds: &[PopulationState],
    tol: f64,
    rng_seed: u64,
) -> Result<SearchOutcome> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    for s in seeds {
        op.check_state(s)?;
    }
    let roots: Vec<Option<PopulationState>> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let mut rng = stream(rng_seed ^ 0x9e37_79b9_7f4a_7c15, i as u64);
            newton_solve(op, mode, s, tol, &mut rng)
        })
        .collect();

    let dropped = roots.iter().filter(|r| r.is_none()).count();
    let mut distinct: Vec<(PopulationState, f64)> = Vec::new();
    for root in roots.into_iter().flatten() {
        let residual = full_residual(op, mode, &root).unwrap_or(f64::INFINITY);
        match distinct
            .iter_mut()
            .find(|(p, _)| p.distance(&root) <= DEDUP_RADIUS)
        {
            Some(entry) if residual < entry.1 => *entry = (root, residual),
            Some(_) => {}
            None => distinct.push((root, residual)),
        }
    }
    distinct.sort_by(|a, b| lexicographic(&a.0, &b.0));
    let reports = distinct
        .into_iter()
        .map(|(p, _)| build_report(op, mode, p))
        .collect::<Result<_>>()?;
    Ok(SearchOutcome { reports, dropped })
}

/// Multistart Newton search for fixed points of the raw or normalized
/// operator.
pub fn find_fixed_points(
    op: &GonosomalOperator,
    search: &FixedPointSearch,
) -> Result<SearchOutcome> {
    if search.n_seeds == 0 {
        return Err(Error::InvalidArgument(
            "at least one seed is required".into(),
        ));
    }
    let (lo, hi) = search.seed_box;
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::InvalidArgument("empty seed box".into()));
    }
    let d = op.dim();
    let seeds: Vec<PopulationState> = (0..search.n_seeds)
        .map(|i| {
            let mut rng = stream(search.rng_seed, i as u64);
            let coords = match search.mode {
                Mode::Raw => uniform_box(&mut rng, d, lo, hi),
                Mode::Normalized => uniform_simplex(&mut rng, d),
            };
            PopulationState::from_raw_parts(coords, op.n())
        })
        .collect();
    find_fixed_points_from(op, search.mode, &seeds, search.tol, search.rng_seed)
}
