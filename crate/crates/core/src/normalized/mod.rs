//! The normalized operator `V(s) = W(s) / ((Σ female)(Σ male))` on the
//! punctured simplex, where both blocks keep a positive mass.

mod estimates;
mod scan;

pub use estimates::{check_estimates, hemophilia_normalized, BoundCheck, EstimateReport};
pub use scan::{scan_conjecture, scan_from, ConjectureScanReport, ScanConfig, ScanFailure};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::operator::{GonosomalOperator, BLOCK_SUM_FLOOR};
use crate::state::PopulationState;
use crate::tensor::InheritanceTensor;

/// Tolerance on the simplex constraints (non-negativity, unit sum).
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Index of `u` (first male coordinate) in the two-by-two layout.
pub const ELIMINATE_U: usize = 2;
/// Index of `v` (second male coordinate) in the two-by-two layout.
pub const ELIMINATE_V: usize = 3;

/// A state on the punctured simplex: non-negative, unit sum, and neither
/// block identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexState(PopulationState);

impl SimplexState {
    pub fn new(s: PopulationState) -> Result<Self> {
        if let Some(c) = s.coords().iter().find(|&&c| c < -SIMPLEX_TOL) {
            return Err(Error::NotOnSimplex(format!("negative coordinate {c}")));
        }
        let total = s.total();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::NotOnSimplex(format!("coordinates sum to {total}")));
        }
        if s.female_sum() <= BLOCK_SUM_FLOOR || s.male_sum() <= BLOCK_SUM_FLOOR {
            return Err(Error::NotOnSimplex("a block sum is zero".into()));
        }
        Ok(Self(s))
    }

    pub fn quad(x: f64, y: f64, u: f64, v: f64) -> Result<Self> {
        Self::new(PopulationState::quad(x, y, u, v))
    }

    pub fn state(&self) -> &PopulationState {
        &self.0
    }

    pub fn into_state(self) -> PopulationState {
        self.0
    }
}

/// Whether every coefficient row, read as a point of the simplex, has both a
/// female and a male share. Errors if the tensor has negative coefficients.
pub fn ec_condition(t: &InheritanceTensor) -> Result<bool> {
    t.check_stochastic()?;
    Ok(t.pairs().all(|(i, k)| {
        t.female_row(i, k).iter().sum::<f64>() > 0.0 && t.male_row(i, k).iter().sum::<f64>() > 0.0
    }))
}

fn first_degenerate_row(t: &InheritanceTensor) -> Option<Error> {
    t.pairs().find_map(|(i, k)| {
        if t.female_row(i, k).iter().sum::<f64>() <= 0.0 {
            Some(Error::DegenerateRow {
                i: i + 1,
                k: k + 1,
                block: "female",
            })
        } else if t.male_row(i, k).iter().sum::<f64>() <= 0.0 {
            Some(Error::DegenerateRow {
                i: i + 1,
                k: k + 1,
                block: "male",
            })
        } else {
            None
        }
    })
}

/// A gonosomal operator whose tensor is stochastic and satisfies
/// [`ec_condition`], so that `V` maps the punctured simplex into itself.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedOperator {
    op: GonosomalOperator,
}

impl NormalizedOperator {
    pub fn new(op: GonosomalOperator) -> Result<Self> {
        op.tensor().check_stochastic()?;
        if let Some(err) = first_degenerate_row(op.tensor()) {
            return Err(err);
        }
        Ok(Self { op })
    }

    pub fn hemophilia() -> Self {
        Self::new(GonosomalOperator::hemophilia()).expect("hemophilia tensor is stochastic")
    }

    pub fn operator(&self) -> &GonosomalOperator {
        &self.op
    }

    pub fn apply(&self, s: &SimplexState) -> Result<SimplexState> {
        self.op.check_state(s.state())?;
        Ok(SimplexState(self.op.normalized_image(s.state())?))
    }

    /// `‖V(s) − s‖∞`.
    pub fn residual(&self, s: &SimplexState) -> Result<f64> {
        Ok(self.apply(s)?.state().distance(s.state()))
    }

    /// Jacobian of the map obtained by eliminating coordinate `eliminate`
    /// through the unit-sum constraint; rows and columns skip that coordinate.
    pub fn reduced_jacobian_at(&self, s: &SimplexState, eliminate: usize) -> Result<Matrix> {
        reduced_jacobian(&self.op, s.state(), eliminate)
    }
}

/// Rebuilds a full state from reduced coordinates `t`, setting the eliminated
/// coordinate to `1 − Σ t`.
pub fn embed(t: &[f64], eliminate: usize, n: usize) -> PopulationState {
    let mut coords = Vec::with_capacity(t.len() + 1);
    coords.extend_from_slice(&t[..eliminate]);
    coords.push(1.0 - t.iter().sum::<f64>());
    coords.extend_from_slice(&t[eliminate..]);
    PopulationState::from_raw_parts(coords, n)
}

/// Drops coordinate `eliminate` from a full state.
pub fn project(s: &PopulationState, eliminate: usize) -> Vec<f64> {
    s.coords()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != eliminate)
        .map(|(_, &c)| c)
        .collect()
}

fn check_eliminate(op: &GonosomalOperator, eliminate: usize) -> Result<()> {
    if eliminate >= op.dim() {
        return Err(Error::InvalidArgument(format!(
            "cannot eliminate coordinate {eliminate} of {}",
            op.dim()
        )));
    }
    Ok(())
}

/// The normalized map in reduced coordinates.
pub fn reduced_map(op: &GonosomalOperator, t: &[f64], eliminate: usize) -> Result<Vec<f64>> {
    check_eliminate(op, eliminate)?;
    if t.len() + 1 != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} reduced coordinates", op.dim() - 1),
            got: format!("{}", t.len()),
        });
    }
    let image = op.normalized_image(&embed(t, eliminate, op.n()))?;
    Ok(project(&image, eliminate))
}

/// Analytic Jacobian of [`reduced_map`] at the full state `s`.
pub fn reduced_jacobian(
    op: &GonosomalOperator,
    s: &PopulationState,
    eliminate: usize,
) -> Result<Matrix> {
    check_eliminate(op, eliminate)?;
    let full = op.jacobian_normalized(s)?;
    let d = op.dim();
    let keep: Vec<usize> = (0..d).filter(|&i| i != eliminate).collect();
    let mut jac = Matrix::zeros(d - 1, d - 1);
    for (a, &r) in keep.iter().enumerate() {
        for (b, &c) in keep.iter().enumerate() {
            // the eliminated coordinate moves by -1 when t_c moves by +1
            jac[(a, b)] = full[(r, c)] - full[(r, eliminate)];
        }
    }
    Ok(jac)
}

/// A converted fixed point together with its residual under the target map.
#[derive(Debug, Clone, PartialEq)]
pub struct Converted<T> {
    pub state: T,
    pub residual: f64,
}

impl<T> Converted<T> {
    pub fn is_fixed(&self, tol: f64) -> bool {
        self.residual <= tol
    }
}

/// Maps a non-negative, normalizeable raw fixed point `s` to `s / Σ s`, which
/// is a fixed point of the normalized operator; the residual under `V` is
/// reported.
pub fn normalize_fp(
    op: &GonosomalOperator,
    s_raw: &PopulationState,
) -> Result<Converted<SimplexState>> {
    op.check_state(s_raw)?;
    if let Some(c) = s_raw.coords().iter().find(|&&c| c < 0.0) {
        return Err(Error::InvalidState(format!("negative coordinate {c}")));
    }
    let total = s_raw.total();
    if total <= 0.0 {
        return Err(Error::InvalidState("coordinates sum to zero".into()));
    }
    let state = SimplexState::new(s_raw.scaled(1.0 / total))?;
    let residual = op.normalized_image(state.state())?.distance(state.state());
    Ok(Converted { state, residual })
}

/// Maps a fixed point of the normalized operator back to the raw fixed point
/// `s / ((Σ female)(Σ male))`; the residual under `W` is reported.
pub fn denormalize_fp(
    op: &GonosomalOperator,
    s: &SimplexState,
) -> Result<Converted<PopulationState>> {
    op.check_state(s.state())?;
    let z = s.state().block_product();
    let state = s.state().scaled(1.0 / z);
    let residual = op.apply_raw(&state)?.distance(&state);
    Ok(Converted { state, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ec_condition_examples() {
        assert!(ec_condition(&InheritanceTensor::hemophilia()).unwrap());
        let half = InheritanceTensor::from_rows(1, 1, &[vec![0.5, 0.5]]).unwrap();
        assert!(ec_condition(&half).unwrap());
        let all_female =
            InheritanceTensor::from_rows(2, 1, &[vec![0.5, 0.0, 0.5], vec![0.5, 0.5, 0.0]])
                .unwrap();
        assert!(!ec_condition(&all_female).unwrap());
        let negative = InheritanceTensor::from_rows(1, 1, &[vec![1.5, -0.5]]).unwrap();
        assert!(ec_condition(&negative).is_err());
    }

    #[test]
    fn normalized_operator_rejects_degenerate_rows() {
        let t = InheritanceTensor::from_rows(1, 1, &[vec![1.0, 0.0]]).unwrap();
        let err = NormalizedOperator::new(GonosomalOperator::new(t)).unwrap_err();
        assert!(matches!(err, Error::DegenerateRow { block: "male", .. }));
    }

    #[test]
    fn apply_examples() {
        let v = NormalizedOperator::hemophilia();
        let p = SimplexState::quad(0.5, 0.0, 0.5, 0.0).unwrap();
        assert_eq!(v.apply(&p).unwrap(), p);

        let s = SimplexState::quad(0.25, 0.25, 0.25, 0.25).unwrap();
        let out = v.apply(&s).unwrap();
        let expected = [3.0 / 16.0, 13.0 / 48.0, 19.0 / 48.0, 7.0 / 48.0];
        for (a, b) in out.state().coords().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(SimplexState::quad(1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn simplex_state_validation() {
        assert!(SimplexState::quad(0.5, 0.5, 0.5, 0.0).is_err());
        assert!(SimplexState::quad(-0.1, 0.6, 0.5, 0.0).is_err());
        assert!(SimplexState::quad(0.0, 0.5, 0.5, 0.0).is_ok());
    }

    #[test]
    fn fixed_point_correspondence() {
        let op = GonosomalOperator::hemophilia();
        let s2 = PopulationState::quad(2.0, 0.0, 2.0, 0.0);
        let p = normalize_fp(&op, &s2).unwrap();
        assert_eq!(p.state.state(), &PopulationState::quad(0.5, 0.0, 0.5, 0.0));
        assert!(p.is_fixed(1e-12));
        let back = denormalize_fp(&op, &p.state).unwrap();
        assert_eq!(back.state, s2);
        assert!(back.is_fixed(1e-12));

        assert!(normalize_fp(&op, &PopulationState::zeros(2, 2)).is_err());
        assert!(normalize_fp(&op, &PopulationState::quad(-1.0, 0.0, 2.0, 0.0)).is_err());

        // not a fixed point: the residual says so
        let s = SimplexState::quad(0.1, 0.2, 0.3, 0.4).unwrap();
        assert!(!denormalize_fp(&op, &s).unwrap().is_fixed(1e-12));
    }

    #[test]
    fn embed_and_project_invert() {
        let s = PopulationState::quad(0.1, 0.2, 0.3, 0.4);
        for e in 0..4 {
            let t = project(&s, e);
            let back = embed(&t, e, 2);
            assert!(back.distance(&s) < 1e-15);
        }
    }
}
