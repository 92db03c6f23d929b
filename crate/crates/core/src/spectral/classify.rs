use std::fmt;

use num_complex::Complex64;

/// Eigenvalues with `| |λ| − 1 | ≤ HYPERBOLICITY_TOL` count as lying on the
/// unit circle.
pub const HYPERBOLICITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Attracting,
    Repelling,
    Saddle,
    NonHyperbolic,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Attracting => "Attracting",
            Self::Repelling => "Repelling",
            Self::Saddle => "Saddle",
            Self::NonHyperbolic => "NonHyperbolic",
        })
    }
}

/// Classifies a fixed point from the eigenvalues of its Jacobian.
pub fn classify(eigs: &[Complex64]) -> Classification {
    let moduli: Vec<f64> = eigs.iter().map(|l| l.norm()).collect();
    if moduli.iter().any(|m| (m - 1.0).abs() <= HYPERBOLICITY_TOL) {
        Classification::NonHyperbolic
    } else if moduli.iter().all(|&m| m < 1.0) {
        Classification::Attracting
    } else if moduli.iter().all(|&m| m > 1.0) {
        Classification::Repelling
    } else {
        Classification::Saddle
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(values: &[f64]) -> Vec<Complex64> {
        values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
    }

    #[test]
    fn definition_cases() {
        assert_eq!(classify(&c(&[0.0; 4])), Classification::Attracting);
        assert_eq!(
            classify(&c(&[-0.5, 0.0, 1.0, 2.0])),
            Classification::NonHyperbolic
        );
        assert_eq!(classify(&c(&[0.5, 2.0])), Classification::Saddle);
        assert_eq!(classify(&c(&[-3.0, 1.5])), Classification::Repelling);
    }

    #[test]
    fn unit_modulus_complex_pair_is_nonhyperbolic() {
        let th = 0.3f64;
        let e = [Complex64::new(th.cos(), th.sin()), Complex64::new(0.1, 0.0)];
        assert_eq!(classify(&e), Classification::NonHyperbolic);
        let near = [Complex64::new(1.0 + 5e-9, 0.0)];
        assert_eq!(classify(&near), Classification::NonHyperbolic);
        let off = [Complex64::new(1.0 + 1e-6, 0.0)];
        assert_eq!(classify(&off), Classification::Repelling);
    }
}
