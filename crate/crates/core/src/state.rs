use std::fmt;

use crate::error::{Error, Result};

/// A joint state of the female and male type frequencies.
///
/// Coordinates are stored contiguously: the first `n` entries are the female
/// block, the remaining `nu` entries the male block. In raw mode the entries are
/// arbitrary finite reals (a signed measure), so nothing beyond finiteness is
/// enforced here.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationState {
    coords: Vec<f64>,
    n: usize,
}

impl PopulationState {
    pub fn new(female: &[f64], male: &[f64]) -> Result<Self> {
        let mut coords = Vec::with_capacity(female.len() + male.len());
        coords.extend_from_slice(female);
        coords.extend_from_slice(male);
        Self::from_coords(coords, female.len())
    }

    /// Builds a state from concatenated coordinates with a female block of length `n`.
    pub fn from_coords(coords: Vec<f64>, n: usize) -> Result<Self> {
        if n == 0 || n >= coords.len() {
            return Err(Error::InvalidState(format!(
                "female block length {n} is incompatible with {} coordinates",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("state"));
        }
        Ok(Self { coords, n })
    }

    /// `(x, y, u, v)` for the two-female, two-male case.
    pub fn quad(x: f64, y: f64, u: f64, v: f64) -> Self {
        Self {
            coords: vec![x, y, u, v],
            n: 2,
        }
    }

    pub fn zeros(n: usize, nu: usize) -> Self {
        Self {
            coords: vec![0.0; n + nu],
            n,
        }
    }

    // Internal constructor for operator outputs, which may overflow to inf.
    pub(crate) fn from_raw_parts(coords: Vec<f64>, n: usize) -> Self {
        debug_assert!(n > 0 && n < coords.len());
        Self { coords, n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nu(&self) -> usize {
        self.coords.len() - self.n
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn female(&self) -> &[f64] {
        &self.coords[..self.n]
    }

    pub fn male(&self) -> &[f64] {
        &self.coords[self.n..]
    }

    pub fn female_sum(&self) -> f64 {
        self.female().iter().sum()
    }

    pub fn male_sum(&self) -> f64 {
        self.male().iter().sum()
    }

    pub fn total(&self) -> f64 {
        self.coords.iter().sum()
    }

    /// `(Σ female)(Σ male)`, the total mass of the next generation.
    pub fn block_product(&self) -> f64 {
        self.female_sum() * self.male_sum()
    }

    pub fn max_norm(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    /// ∞-norm distance. Both states must share a layout.
    pub fn distance(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.coords.len(), other.coords.len());
        self.coords
            .iter()
            .zip(&other.coords)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coords: self.coords.iter().map(|c| c * factor).collect(),
            n: self.n,
        }
    }

    /// Returns `[x, y, u, v]` when the layout is two-by-two.
    pub fn as_quad(&self) -> Option<[f64; 4]> {
        (self.n == 2 && self.coords.len() == 4).then(|| {
            [
                self.coords[0],
                self.coords[1],
                self.coords[2],
                self.coords[3],
            ]
        })
    }

    pub(crate) fn same_layout(&self, n: usize, nu: usize) -> Result<()> {
        if self.n != n || self.nu() != nu {
            return Err(Error::DimensionMismatch {
                expected: format!("({n}, {nu})"),
                got: format!("({}, {})", self.n, self.nu()),
            });
        }
        Ok(())
    }
}

impl fmt::Display for PopulationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Parses a comma-separated coordinate list with a `.` decimal point.
pub fn parse_coords(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>()
                .map_err(|_| Error::InvalidState(format!("cannot parse coordinate {tok:?}")))
        })
        .collect()
}
