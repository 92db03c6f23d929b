//! Inheritance coefficient tensors and their text file format.
//!
//! A tensor holds, for every mating pair `(i, k)` of female type `i` and male
//! type `k`, the share of offspring of each female type `j` (`gamma_f`) and
//! each male type `l` (`gamma_m`). Every such row sums to one.
//!
//! File format (whitespace delimited, `#` starts a comment):
//!
//! ```text
//! # n nu [raw|normalized]
//! 2 2 normalized
//! 1/2 0   1/2 0      # (i,k) = (1,1): female offspring 1..n, then male 1..nu
//! 0   1/2 1/2 0      # (1,2)
//! ...
//! ```
//!
//! Rows are listed with `i` outer and `k` inner. Coefficients may be written as
//! decimals or as `p/q` fractions. The optional mode flag says whether the
//! coefficients are meant for the raw operator (any reals) or the normalized
//! one (non-negative); it defaults to `raw`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Row-sum tolerance enforced on constructed tensors.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Row-sum tolerance accepted when reading a tensor file.
pub const FILE_ROW_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct InheritanceTensor {
    n: usize,
    nu: usize,
    // (i, k, j) -> (i * nu + k) * n + j
    gamma_f: Vec<f64>,
    // (i, k, l) -> (i * nu + k) * nu + l
    gamma_m: Vec<f64>,
}

impl InheritanceTensor {
    /// Builds a tensor from flat coefficient arrays, checking that every row
    /// sums to one within [`ROW_SUM_TOL`].
    pub fn new(n: usize, nu: usize, gamma_f: Vec<f64>, gamma_m: Vec<f64>) -> Result<Self> {
        if n == 0 || nu == 0 {
            return Err(Error::InvalidArgument("n and nu must be positive".into()));
        }
        if gamma_f.len() != n * nu * n || gamma_m.len() != n * nu * nu {
            return Err(Error::DimensionMismatch {
                expected: format!(
                    "{} female and {} male coefficients",
                    n * nu * n,
                    n * nu * nu
                ),
                got: format!("{} and {}", gamma_f.len(), gamma_m.len()),
            });
        }
        if gamma_f.iter().chain(&gamma_m).any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("tensor"));
        }
        let t = Self {
            n,
            nu,
            gamma_f,
            gamma_m,
        };
        t.check_row_sums(ROW_SUM_TOL)?;
        Ok(t)
    }

    /// Builds a tensor from one coefficient row per `(i, k)` pair (i-major),
    /// each of length `n + nu`.
    pub fn from_rows(n: usize, nu: usize, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() != n * nu {
            return Err(Error::DimensionMismatch {
                expected: format!("{} rows", n * nu),
                got: format!("{} rows", rows.len()),
            });
        }
        let mut gamma_f = Vec::with_capacity(n * nu * n);
        let mut gamma_m = Vec::with_capacity(n * nu * nu);
        for row in rows {
            if row.len() != n + nu {
                return Err(Error::DimensionMismatch {
                    expected: format!("{} coefficients per row", n + nu),
                    got: format!("{}", row.len()),
                });
            }
            gamma_f.extend_from_slice(&row[..n]);
            gamma_m.extend_from_slice(&row[n..]);
        }
        Self::new(n, nu, gamma_f, gamma_m)
    }

    /// The two-female, two-male tensor of X-linked recessive lethal inheritance
    /// (hemophilia). Female types are `XX, XXʰ`; male types `XY, XʰY`.
    pub fn hemophilia() -> Self {
        let q = 0.25;
        let t = 1.0 / 3.0;
        let rows = [
            // XX x XY
            vec![0.5, 0.0, 0.5, 0.0],
            // XX x XʰY
            vec![0.0, 0.5, 0.5, 0.0],
            // XXʰ x XY
            vec![q, q, q, q],
            // XXʰ x XʰY, XʰXʰ is lethal
            vec![0.0, t, t, t],
        ];
        Self::from_rows(2, 2, &rows).expect("hemophilia coefficients are valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    /// Female offspring coefficient, zero-based `(i, k, j)`.
    #[inline]
    pub fn female(&self, i: usize, k: usize, j: usize) -> f64 {
        self.gamma_f[(i * self.nu + k) * self.n + j]
    }

    /// Male offspring coefficient, zero-based `(i, k, l)`.
    #[inline]
    pub fn male(&self, i: usize, k: usize, l: usize) -> f64 {
        self.gamma_m[(i * self.nu + k) * self.nu + l]
    }

    /// Female offspring shares of the mating `(i, k)`.
    pub fn female_row(&self, i: usize, k: usize) -> &[f64] {
        let start = (i * self.nu + k) * self.n;
        &self.gamma_f[start..start + self.n]
    }

    /// Male offspring shares of the mating `(i, k)`.
    pub fn male_row(&self, i: usize, k: usize) -> &[f64] {
        let start = (i * self.nu + k) * self.nu;
        &self.gamma_m[start..start + self.nu]
    }

    /// The full `n + nu` coefficient row of the mating `(i, k)`.
    pub fn row(&self, i: usize, k: usize) -> Vec<f64> {
        let mut r = self.female_row(i, k).to_vec();
        r.extend_from_slice(self.male_row(i, k));
        r
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (0..self.nu).map(move |k| (i, k)))
    }

    pub fn row_sum(&self, i: usize, k: usize) -> f64 {
        self.female_row(i, k).iter().sum::<f64>() + self.male_row(i, k).iter().sum::<f64>()
    }

    /// Largest deviation of a row sum from one.
    pub fn max_row_sum_defect(&self) -> f64 {
        self.pairs()
            .map(|(i, k)| (self.row_sum(i, k) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.gamma_f.iter().chain(&self.gamma_m).all(|&g| g >= 0.0)
    }

    /// Checks the conditions required by the normalized operator: all
    /// coefficients non-negative and rows summing to one.
    pub fn check_stochastic(&self) -> Result<()> {
        for (i, k) in self.pairs() {
            if let Some(&value) = self.row_slice_iter(i, k).find(|&&g| g < 0.0) {
                return Err(Error::NegativeCoefficient {
                    i: i + 1,
                    k: k + 1,
                    value,
                });
            }
        }
        self.check_row_sums(ROW_SUM_TOL)
    }

    /// Largest coefficient difference, for comparing tensors of equal shape.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        if (self.n, self.nu) != (other.n, other.nu) {
            return None;
        }
        Some(
            self.gamma_f
                .iter()
                .chain(&self.gamma_m)
                .zip(other.gamma_f.iter().chain(&other.gamma_m))
                .fold(0.0, |m, (a, b)| m.max((a - b).abs())),
        )
    }

    fn row_slice_iter(&self, i: usize, k: usize) -> impl Iterator<Item = &f64> {
        self.female_row(i, k).iter().chain(self.male_row(i, k))
    }

    fn check_row_sums(&self, tol: f64) -> Result<()> {
        for (i, k) in self.pairs() {
            let sum = self.row_sum(i, k);
            if (sum - 1.0).abs() > tol {
                return Err(Error::RowSum {
                    i: i + 1,
                    k: k + 1,
                    sum,
                });
            }
        }
        Ok(())
    }
}

/// Whether a tensor file targets the raw or the normalized operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoefficientMode {
    #[default]
    Raw,
    Normalized,
}

impl FromStr for CoefficientMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Self::Raw),
            "normalized" => Ok(Self::Normalized),
            other => Err(Error::InvalidArgument(format!("unknown mode {other:?}"))),
        }
    }
}

impl fmt::Display for CoefficientMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Raw => "raw",
            Self::Normalized => "normalized",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorFile {
    pub mode: CoefficientMode,
    pub tensor: InheritanceTensor,
}

fn parse_coefficient(tok: &str) -> Option<f64> {
    match tok.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.parse().ok()?;
            let q: f64 = q.parse().ok()?;
            (q != 0.0).then(|| p / q)
        }
        None => tok.parse().ok(),
    }
}

/// Parses the tensor text format described in the module docs.
///
/// Rows within [`FILE_ROW_SUM_TOL`] of summing to one are rescaled to sum to
/// one exactly (up to rounding), so that truncated decimals like `0.333333333`
/// are accepted.
pub fn parse_tensor(text: &str) -> Result<TensorFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(no, l)| (no + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        msg: "missing header line \"n nu\"".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if !(2..=3).contains(&fields.len()) {
        return Err(Error::Parse {
            line: hline,
            msg: "header must be \"n nu [raw|normalized]\"".into(),
        });
    }
    let dim = |s: &str| {
        s.parse::<usize>()
            .ok()
            .filter(|&d| d > 0)
            .ok_or(Error::Parse {
                line: hline,
                msg: format!("invalid dimension {s:?}"),
            })
    };
    let n = dim(fields[0])?;
    let nu = dim(fields[1])?;
    let mode = match fields.get(2) {
        Some(m) => m.parse().map_err(|_| Error::Parse {
            line: hline,
            msg: format!("invalid mode flag {m:?}"),
        })?,
        None => CoefficientMode::Raw,
    };

    let mut rows = Vec::with_capacity(n * nu);
    for (no, line) in lines {
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|tok| {
                parse_coefficient(tok)
                    .filter(|v| v.is_finite())
                    .ok_or(Error::Parse {
                        line: no,
                        msg: format!("invalid coefficient {tok:?}"),
                    })
            })
            .collect::<Result<_>>()?;
        if row.len() != n + nu {
            return Err(Error::Parse {
                line: no,
                msg: format!("expected {} coefficients, found {}", n + nu, row.len()),
            });
        }
        let sum: f64 = row.iter().sum();
        let (i, k) = (rows.len() / nu + 1, rows.len() % nu + 1);
        if rows.len() >= n * nu {
            return Err(Error::Parse {
                line: no,
                msg: format!("more than {} coefficient rows", n * nu),
            });
        }
        if (sum - 1.0).abs() > FILE_ROW_SUM_TOL {
            return Err(Error::RowSum { i, k, sum });
        }
        if mode == CoefficientMode::Normalized {
            if let Some(&value) = row.iter().find(|&&g| g < 0.0) {
                return Err(Error::NegativeCoefficient { i, k, value });
            }
        }
        rows.push(row.iter().map(|g| g / sum).collect::<Vec<_>>());
    }
    if rows.len() != n * nu {
        return Err(Error::Parse {
            line: 0,
            msg: format!("expected {} coefficient rows, found {}", n * nu, rows.len()),
        });
    }
    Ok(TensorFile {
        mode,
        tensor: InheritanceTensor::from_rows(n, nu, &rows)?,
    })
}

pub fn read_tensor(path: &Path) -> Result<TensorFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_tensor(&text)
}

/// Serializes a tensor in the file format accepted by [`parse_tensor`].
pub fn format_tensor(t: &InheritanceTensor, mode: CoefficientMode) -> String {
    let mut out = format!("{} {} {}\n", t.n(), t.nu(), mode);
    for (i, k) in t.pairs() {
        let row: Vec<String> = t.row(i, k).iter().map(|g| format!("{g:?}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
