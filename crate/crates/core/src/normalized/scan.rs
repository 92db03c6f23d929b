//! Monte Carlo scan of trajectories of the normalized hemophilia operator,
//! testing whether every start on the punctured simplex reaches `p`.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::{NormalizedOperator, SimplexState};
use crate::error::{Error, Result};
use crate::sampling::{stream, uniform_simplex};
use crate::state::PopulationState;

/// The fixed point `p = (1/2, 0, 1/2, 0)`.
pub const HEMOPHILIA_P: [f64; 4] = [0.5, 0.0, 0.5, 0.0];

/// A step below this while still away from `p` marks a stalled trajectory.
const STALL_STEP: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub samples: usize,
    pub rng_seed: u64,
    /// Convergence radius around `p` in the ∞-norm.
    pub tol: f64,
    pub budget: usize,
    /// Samples with a block sum below this are redrawn.
    pub boundary_margin: f64,
    /// Width of the steps-to-converge histogram buckets.
    pub bucket_width: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            samples: 10_000,
            rng_seed: crate::sampling::DEFAULT_SEED,
            tol: 1e-8,
            budget: 500,
            boundary_margin: 1e-9,
            bucket_width: 10,
        }
    }
}

/// A trajectory that is a potential counterexample: it stalled away from `p`
/// or left the punctured simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanFailure {
    pub start: Vec<f64>,
    pub last: Vec<f64>,
    pub steps: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Outcome {
    Converged { steps: usize, distance: f64 },
    Exhausted { distance: f64 },
    Failed(ScanFailure, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureScanReport {
    pub samples: usize,
    pub converged: usize,
    pub budget_exhausted: usize,
    /// Largest steps-to-converge among converged samples.
    pub max_steps_observed: usize,
    /// Largest final distance to `p` over all samples.
    pub worst_final_distance: f64,
    pub failures: Vec<ScanFailure>,
    /// `(bucket_start, count)` of steps-to-converge, ascending.
    pub histogram: Vec<(usize, usize)>,
    pub bucket_width: usize,
    pub tol: f64,
    pub budget: usize,
}

impl ConjectureScanReport {
    /// Key-value record of the scan.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "samples={}", self.samples);
        let _ = writeln!(out, "tol={:e}", self.tol);
        let _ = writeln!(out, "budget={}", self.budget);
        let _ = writeln!(out, "converged={}", self.converged);
        let _ = writeln!(out, "budget_exhausted={}", self.budget_exhausted);
        let _ = writeln!(out, "failures={}", self.failures.len());
        let _ = writeln!(out, "max_steps_observed={}", self.max_steps_observed);
        let _ = writeln!(out, "worst_final_distance={:e}", self.worst_final_distance);
        for f in &self.failures {
            let _ = writeln!(out);
            let _ = writeln!(out, "failure.start={}", join(&f.start, ","));
            let _ = writeln!(out, "failure.last={}", join(&f.last, ","));
            let _ = writeln!(out, "failure.steps={}", f.steps);
            let _ = writeln!(out, "failure.reason={}", f.reason);
        }
        out
    }

    /// Delimited table: one row per histogram bucket, then one per failure.
    pub fn to_table(&self) -> String {
        let mut out = String::from("kind,steps_lo,steps_hi,count,start,reason\n");
        for &(lo, count) in &self.histogram {
            let hi = lo + self.bucket_width - 1;
            let _ = writeln!(out, "bucket,{lo},{hi},{count},,");
        }
        for f in &self.failures {
            let _ = writeln!(
                out,
                "failure,{},{},1,{},{}",
                f.steps,
                f.steps,
                join(&f.start, " "),
                f.reason
            );
        }
        out
    }
}

fn join(values: &[f64], sep: &str) -> String {
    values
        .iter()
        .map(|v| format!("{v:?}"))
        .collect::<Vec<_>>()
        .join(sep)
}

fn distance_to_p(s: &PopulationState) -> f64 {
    s.coords()
        .iter()
        .zip(HEMOPHILIA_P)
        .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

fn run_one(op: &NormalizedOperator, start: &PopulationState, tol: f64, budget: usize) -> Outcome {
    let mut s = start.clone();
    let mut distance = distance_to_p(&s);
    let fail = |s: &PopulationState, steps: usize, reason: String, distance: f64| {
        Outcome::Failed(
            ScanFailure {
                start: start.coords().to_vec(),
                last: s.coords().to_vec(),
                steps,
                reason,
            },
            distance,
        )
    };
    for steps in 0..=budget {
        if distance <= tol {
            return Outcome::Converged { steps, distance };
        }
        if steps == budget {
            break;
        }
        let next = match op.operator().normalized_image(&s) {
            Ok(next) => next,
            Err(e) => return fail(&s, steps, e.to_string(), distance),
        };
        if let Err(e) = SimplexState::new(next.clone()) {
            return fail(&next, steps + 1, e.to_string(), distance_to_p(&next));
        }
        if next.distance(&s) <= STALL_STEP {
            return fail(
                &next,
                steps + 1,
                "stalled away from p".into(),
                distance_to_p(&next),
            );
        }
        s = next;
        distance = distance_to_p(&s);
    }
    Outcome::Exhausted { distance }
}

fn draw_start(cfg: &ScanConfig, index: usize) -> PopulationState {
    let mut rng = stream(cfg.rng_seed, index as u64);
    loop {
        let c = uniform_simplex(&mut rng, 4);
        if c[0] + c[1] >= cfg.boundary_margin && c[2] + c[3] >= cfg.boundary_margin {
            return PopulationState::quad(c[0], c[1], c[2], c[3]);
        }
    }
}

fn validate(cfg: &ScanConfig) -> Result<()> {
    if cfg.samples == 0 || cfg.bucket_width == 0 || cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(Error::InvalidArgument(
            "samples, bucket width and tolerance must be positive".into(),
        ));
    }
    Ok(())
}

/// Scans `cfg.samples` uniform starts on the punctured simplex. Each sample
/// draws from its own random stream, so the report does not depend on thread
/// scheduling.
pub fn scan_conjecture(cfg: &ScanConfig) -> Result<ConjectureScanReport> {
    validate(cfg)?;
    let op = NormalizedOperator::hemophilia();
    let outcomes: Vec<Outcome> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| run_one(&op, &draw_start(cfg, i), cfg.tol, cfg.budget))
        .collect();
    Ok(summarize(cfg, outcomes))
}

/// Runs the scan from explicit starting states (which must lie on the
/// punctured simplex).
pub fn scan_from(starts: &[SimplexState], cfg: &ScanConfig) -> Result<ConjectureScanReport> {
    validate(cfg)?;
    let op = NormalizedOperator::hemophilia();
    for s in starts {
        op.operator().check_state(s.state())?;
    }
    let outcomes: Vec<Outcome> = starts
        .par_iter()
        .map(|s| run_one(&op, s.state(), cfg.tol, cfg.budget))
        .collect();
    Ok(summarize(
        &ScanConfig {
            samples: starts.len(),
            ..*cfg
        },
        outcomes,
    ))
}

fn summarize(cfg: &ScanConfig, outcomes: Vec<Outcome>) -> ConjectureScanReport {
    let mut report = ConjectureScanReport {
        samples: cfg.samples,
        converged: 0,
        budget_exhausted: 0,
        max_steps_observed: 0,
        worst_final_distance: 0.0,
        failures: Vec::new(),
        histogram: Vec::new(),
        bucket_width: cfg.bucket_width,
        tol: cfg.tol,
        budget: cfg.budget,
    };
    let mut buckets = std::collections::BTreeMap::new();
    for outcome in outcomes {
        let distance = match outcome {
            Outcome::Converged { steps, distance } => {
                report.converged += 1;
                report.max_steps_observed = report.max_steps_observed.max(steps);
                *buckets
                    .entry(steps / cfg.bucket_width * cfg.bucket_width)
                    .or_insert(0) += 1;
                distance
            }
            Outcome::Exhausted { distance } => {
                report.budget_exhausted += 1;
                distance
            }
            Outcome::Failed(f, distance) => {
                report.failures.push(f);
                distance
            }
        };
        report.worst_final_distance = report.worst_final_distance.max(distance);
    }
    report.histogram = buckets.into_iter().collect();
    report
}
