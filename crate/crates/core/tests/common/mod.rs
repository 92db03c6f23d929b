#![allow(dead_code)]

use gonosomal::sampling::uniform_simplex;
use gonosomal::InheritanceTensor;
use rand::Rng;

/// A tensor with non-negative rows summing to one, every entry positive.
pub fn random_stochastic<R: Rng>(rng: &mut R, n: usize, nu: usize) -> InheritanceTensor {
    let rows: Vec<Vec<f64>> = (0..n * nu).map(|_| uniform_simplex(rng, n + nu)).collect();
    InheritanceTensor::from_rows(n, nu, &rows).expect("simplex rows are valid")
}

/// A tensor with signed coefficients in `[-1, 1]`, the last entry of each
/// row absorbing the remainder so rows sum to one.
pub fn random_signed<R: Rng>(rng: &mut R, n: usize, nu: usize) -> InheritanceTensor {
    let d = n + nu;
    let rows: Vec<Vec<f64>> = (0..n * nu)
        .map(|_| {
            let mut row: Vec<f64> = (0..d - 1).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let partial: f64 = row.iter().sum();
            row.push(1.0 - partial);
            row
        })
        .collect();
    InheritanceTensor::from_rows(n, nu, &rows).expect("rows sum to one")
}

pub fn approx(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
