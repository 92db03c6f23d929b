use std::fmt::Write as _;

use num_complex::Complex64;

use super::Classification;
use crate::linalg::Matrix;
use crate::state::PopulationState;

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointReport {
    pub point: PopulationState,
    /// `‖W(p) − p‖∞` (or `‖V(p) − p‖∞` in normalized mode).
    pub residual: f64,
    /// Full Jacobian in raw mode; the reduced Jacobian in normalized mode.
    pub jacobian: Matrix,
    pub eigenvalues: Vec<Complex64>,
    pub classification: Classification,
    pub note: Option<String>,
}

impl FixedPointReport {
    /// Flat `key=value` record, one line per field.
    pub fn to_record(&self) -> String {
        let mut out = String::new();
        let coords: Vec<String> = self
            .point
            .coords()
            .iter()
            .map(|c| format!("{c:?}"))
            .collect();
        let _ = writeln!(out, "point={}", coords.join(","));
        let _ = writeln!(out, "residual={:e}", self.residual);
        for (i, l) in self.eigenvalues.iter().enumerate() {
            let _ = writeln!(out, "eigenvalue.{i}={:?},{:?}", clean(l.re), clean(l.im));
        }
        let _ = writeln!(out, "classification={}", self.classification);
        if let Some(note) = &self.note {
            let _ = writeln!(out, "note={note}");
        }
        out
    }
}

// Rounds away sub-1e-13 noise so that records diff cleanly.
fn clean(v: f64) -> f64 {
    if v.abs() < 1e-13 {
        0.0
    } else {
        v
    }
}
