//! Gonosomal evolution operators.
//!
//! A state is a female block `x ∈ Rⁿ` followed by a male block `y ∈ R^ν`.
//! The raw operator `W` is bilinear in the two blocks; the normalized
//! operator `V = W / ((Σx)(Σy))` acts on the simplex minus the states with
//! an empty block. The crate finds and classifies fixed points, checks the
//! invariant-set statements for the hemophilia model, classifies limits of
//! its trajectories, and scans the simplex for convergence to its interior
//! fixed point.

pub mod error;
pub mod invariant_sets;
pub mod linalg;
pub mod normalized;
pub mod operator;
pub mod report;
pub mod sampling;
pub mod spectral;
pub mod state;
pub mod suite;
pub mod tensor;
pub mod trajectory;

pub use error::{Error, Result};
pub use invariant_sets::{classify_limit, membership, LimitKind, LimitVerdict, SetMembership};
pub use linalg::Matrix;
pub use normalized::{NormalizedOperator, SimplexState};
pub use operator::GonosomalOperator;
pub use report::PropertyReport;
pub use spectral::{
    classify, eigenvalues, find_fixed_points, Classification, FixedPointReport, FixedPointSearch,
};
pub use state::PopulationState;
pub use tensor::{CoefficientMode, InheritanceTensor};
pub use trajectory::{iterate, IterateOptions, Mode, StopReason, TrajectoryRecord};
