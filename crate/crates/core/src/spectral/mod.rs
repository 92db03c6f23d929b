//! Eigenvalues, hyperbolicity classification and fixed-point search.

mod classify;
mod eigen;
mod fixed_points;
mod report;

pub use classify::{classify, Classification, HYPERBOLICITY_TOL};
pub use eigen::eigenvalues;
pub use fixed_points::{
    find_fixed_points, find_fixed_points_from, newton_solve, FixedPointSearch, SearchOutcome,
    DEDUP_RADIUS,
};
pub use report::FixedPointReport;
