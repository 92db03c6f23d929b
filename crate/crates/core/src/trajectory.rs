use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::normalized::{NormalizedOperator, SimplexState};
use crate::operator::GonosomalOperator;
use crate::state::PopulationState;

/// Every iterate up to this step is stored; afterwards only every
/// [`THIN_STRIDE`]-th one (plus the last).
pub const FULL_DETAIL_STEPS: usize = 1_000;
pub const THIN_STRIDE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Raw,
    Normalized,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Self::Raw),
            "normalized" => Ok(Self::Normalized),
            other => Err(Error::InvalidArgument(format!("unknown mode {other:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Raw => "raw",
            Self::Normalized => "normalized",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterateOptions {
    pub budget: usize,
    /// Step size (and fixed-point residual) below which the trajectory is
    /// considered converged.
    pub tol_fp: f64,
    /// Any coordinate beyond this magnitude counts as divergence.
    pub div_threshold: f64,
}

impl Default for IterateOptions {
    fn default() -> Self {
        Self {
            budget: 10_000,
            tol_fp: 1e-12,
            div_threshold: 1e12,
        }
    }
}

impl IterateOptions {
    fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::InvalidArgument("budget must be at least 1".into()));
        }
        if [self.tol_fp, self.div_threshold]
            .iter()
            .any(|v| v.is_nan() || *v <= 0.0)
        {
            return Err(Error::InvalidArgument(
                "tolerance and divergence threshold must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ConvergedToPoint,
    Diverged,
    BudgetExhausted,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ConvergedToPoint => "ConvergedToPoint",
            Self::Diverged => "Diverged",
            Self::BudgetExhausted => "BudgetExhausted",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Iterate {
    pub step: usize,
    pub state: PopulationState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    /// Stored iterates, starting with the initial state; thinned past
    /// [`FULL_DETAIL_STEPS`]. The final iterate is always present.
    pub iterates: Vec<Iterate>,
    pub stop_reason: StopReason,
    /// Set iff the trajectory converged.
    pub limit: Option<PopulationState>,
    pub steps_taken: usize,
}

impl TrajectoryRecord {
    pub fn last(&self) -> &PopulationState {
        &self
            .iterates
            .last()
            .expect("a trajectory stores its start")
            .state
    }
}

fn keep(step: usize) -> bool {
    step <= FULL_DETAIL_STEPS || step.is_multiple_of(THIN_STRIDE)
}

/// Iterates the operator from `s0`.
///
/// In normalized mode the tensor must satisfy the simplex conditions and `s0`
/// must lie on the punctured simplex; reaching an annihilated state is an
/// error carrying the step index.
pub fn iterate(
    op: &GonosomalOperator,
    s0: &PopulationState,
    mode: Mode,
    opts: &IterateOptions,
) -> Result<TrajectoryRecord> {
    opts.validate()?;
    op.check_state(s0)?;
    if mode == Mode::Normalized {
        NormalizedOperator::new(op.clone())?;
        SimplexState::new(s0.clone())?;
    }
    let step_fn = |s: &PopulationState, step: usize| match mode {
        Mode::Raw => op.apply_raw(s),
        Mode::Normalized => op.normalized_image(s).map_err(|e| match e {
            Error::Annihilated { .. } => Error::Annihilated { step },
            other => other,
        }),
    };

    let mut iterates = vec![Iterate {
        step: 0,
        state: s0.clone(),
    }];
    if s0.max_norm() > opts.div_threshold {
        return Ok(TrajectoryRecord {
            iterates,
            stop_reason: StopReason::Diverged,
            limit: None,
            steps_taken: 0,
        });
    }

    let mut current = s0.clone();
    for k in 0..opts.budget {
        let next = step_fn(&current, k)?;
        let step = k + 1;
        let diverged = !next.is_finite() || next.max_norm() > opts.div_threshold;
        let converged = !diverged && next.distance(&current) <= opts.tol_fp && {
            let again = step_fn(&next, step)?;
            again.distance(&next) <= opts.tol_fp
        };
        if diverged || converged || step == opts.budget || keep(step) {
            iterates.push(Iterate {
                step,
                state: next.clone(),
            });
        }
        if diverged {
            return Ok(TrajectoryRecord {
                iterates,
                stop_reason: StopReason::Diverged,
                limit: None,
                steps_taken: step,
            });
        }
        if converged {
            return Ok(TrajectoryRecord {
                iterates,
                stop_reason: StopReason::ConvergedToPoint,
                limit: Some(next),
                steps_taken: step,
            });
        }
        current = next;
    }
    Ok(TrajectoryRecord {
        iterates,
        stop_reason: StopReason::BudgetExhausted,
        limit: None,
        steps_taken: opts.budget,
    })
}
