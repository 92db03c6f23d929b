use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::state::PopulationState;
use crate::tensor::InheritanceTensor;

/// Block sums at or below this are treated as zero by the normalized map.
pub const BLOCK_SUM_FLOOR: f64 = 1e-300;

/// The gonosomal evolution operator `W` of an inheritance tensor.
///
/// `W` is bilinear in the female and male blocks:
/// `x'_j = Σ γf(i,k,j) x_i y_k`, `y'_l = Σ γm(i,k,l) x_i y_k`.
/// The type is immutable and `Sync`, so one operator can be shared by many
/// trajectory workers.
#[derive(Debug, Clone, PartialEq)]
pub struct GonosomalOperator {
    tensor: InheritanceTensor,
}

impl GonosomalOperator {
    pub fn new(tensor: InheritanceTensor) -> Self {
        Self { tensor }
    }

    pub fn hemophilia() -> Self {
        Self::new(InheritanceTensor::hemophilia())
    }

    pub fn tensor(&self) -> &InheritanceTensor {
        &self.tensor
    }

    pub fn n(&self) -> usize {
        self.tensor.n()
    }

    pub fn nu(&self) -> usize {
        self.tensor.nu()
    }

    pub fn dim(&self) -> usize {
        self.n() + self.nu()
    }

    pub fn check_state(&self, s: &PopulationState) -> Result<()> {
        s.same_layout(self.n(), self.nu())
    }

    /// Applies the raw operator. The result may contain infinities if the
    /// state is large enough to overflow.
    pub fn apply_raw(&self, s: &PopulationState) -> Result<PopulationState> {
        self.check_state(s)?;
        let (n, nu) = (self.n(), self.nu());
        let (x, y) = (s.female(), s.male());
        let mut out = vec![0.0; n + nu];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (k, &yk) in y.iter().enumerate() {
                let w = xi * yk;
                if w == 0.0 {
                    continue;
                }
                for (o, g) in out[..n].iter_mut().zip(self.tensor.female_row(i, k)) {
                    *o += g * w;
                }
                for (o, g) in out[n..].iter_mut().zip(self.tensor.male_row(i, k)) {
                    *o += g * w;
                }
            }
        }
        Ok(PopulationState::from_raw_parts(out, n))
    }

    /// Exact Jacobian of the raw operator; rows are outputs, columns inputs.
    pub fn jacobian_raw(&self, s: &PopulationState) -> Result<Matrix> {
        self.check_state(s)?;
        let (n, nu) = (self.n(), self.nu());
        let (x, y) = (s.female(), s.male());
        let mut jac = Matrix::zeros(n + nu, n + nu);
        for i in 0..n {
            for k in 0..nu {
                let frow = self.tensor.female_row(i, k);
                let mrow = self.tensor.male_row(i, k);
                // d(x_i y_k)/dx_i = y_k, d(x_i y_k)/dy_k = x_i
                for (out, g) in frow.iter().chain(mrow).enumerate() {
                    jac[(out, i)] += g * y[k];
                    jac[(out, n + k)] += g * x[i];
                }
            }
        }
        Ok(jac)
    }

    /// `|Σ W(s) − (Σ female)(Σ male)|`, zero up to rounding for valid tensors.
    pub fn sum_product_residual(&self, s: &PopulationState) -> Result<f64> {
        let image = self.apply_raw(s)?;
        Ok((image.total() - s.block_product()).abs())
    }

    /// `W(s) / ((Σ female)(Σ male))`, the normalized operator evaluated on any
    /// state with positive block sums. Validity of the tensor for simplex
    /// dynamics is checked by [`crate::normalized::NormalizedOperator`].
    pub fn normalized_image(&self, s: &PopulationState) -> Result<PopulationState> {
        let (fx, fy) = (s.female_sum(), s.male_sum());
        if fx <= BLOCK_SUM_FLOOR || fy <= BLOCK_SUM_FLOOR {
            return Err(Error::Annihilated { step: 0 });
        }
        Ok(self.apply_raw(s)?.scaled(1.0 / (fx * fy)))
    }

    /// Jacobian of [`Self::normalized_image`] in the full coordinates.
    pub fn jacobian_normalized(&self, s: &PopulationState) -> Result<Matrix> {
        let (fx, fy) = (s.female_sum(), s.male_sum());
        if fx <= BLOCK_SUM_FLOOR || fy <= BLOCK_SUM_FLOOR {
            return Err(Error::Annihilated { step: 0 });
        }
        let z = fx * fy;
        let w = self.apply_raw(s)?;
        let jw = self.jacobian_raw(s)?;
        let n = self.n();
        let d = self.dim();
        let mut jac = Matrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                // dZ/dx_i = Σy, dZ/dy_k = Σx
                let dz = if b < n { fy } else { fx };
                jac[(a, b)] = jw[(a, b)] / z - w.coords()[a] * dz / (z * z);
            }
        }
        Ok(jac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hemo() -> GonosomalOperator {
        GonosomalOperator::hemophilia()
    }

    #[test]
    fn apply_raw_matches_hand_computation() {
        // x' = 1/2 + 1/4, y' = 1/2 + 1/4 + 1/3, u' = 1/2 + 1/2 + 1/4 + 1/3, v' = 1/4 + 1/3
        let out = hemo()
            .apply_raw(&PopulationState::quad(1.0, 1.0, 1.0, 1.0))
            .unwrap();
        let expected = [3.0 / 4.0, 13.0 / 12.0, 19.0 / 12.0, 7.0 / 12.0];
        for (a, b) in out.coords().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
        assert!((out.total() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn fixed_point_and_origin() {
        let s2 = PopulationState::quad(2.0, 0.0, 2.0, 0.0);
        assert_eq!(hemo().apply_raw(&s2).unwrap(), s2);
        let zero = PopulationState::zeros(2, 2);
        assert_eq!(hemo().apply_raw(&zero).unwrap(), zero);
    }

    #[test]
    fn jacobian_at_s2_first_row() {
        // first row (u/2, u/4, x/2 + y/4, 0) at (2, 0, 2, 0)
        let j = hemo()
            .jacobian_raw(&PopulationState::quad(2.0, 0.0, 2.0, 0.0))
            .unwrap();
        assert_eq!(j.row(0), &[1.0, 0.5, 1.0, 0.0]);
        let j0 = hemo().jacobian_raw(&PopulationState::zeros(2, 2)).unwrap();
        assert!(j0.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn jacobian_matches_displayed_matrix() {
        let (x, y, u, v) = (0.7, -1.3, 2.1, 0.4);
        let j = hemo()
            .jacobian_raw(&PopulationState::quad(x, y, u, v))
            .unwrap();
        let expected = Matrix::from_rows(&[
            vec![u / 2.0, u / 4.0, x / 2.0 + y / 4.0, 0.0],
            vec![v / 2.0, u / 4.0 + v / 3.0, y / 4.0, x / 2.0 + y / 3.0],
            vec![
                u / 2.0 + v / 2.0,
                u / 4.0 + v / 3.0,
                x / 2.0 + y / 4.0,
                x / 2.0 + y / 3.0,
            ],
            vec![0.0, u / 4.0 + v / 3.0, y / 4.0, y / 3.0],
        ])
        .unwrap();
        assert!(j.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let s = PopulationState::new(&[1.0], &[1.0, 2.0]).unwrap();
        assert!(matches!(
            hemo().apply_raw(&s),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(hemo().jacobian_raw(&s).is_err());
    }

    #[test]
    fn normalized_image_rejects_annihilated() {
        let s = PopulationState::quad(1.0, 0.0, 0.0, 0.0);
        assert!(matches!(
            hemo().normalized_image(&s),
            Err(Error::Annihilated { .. })
        ));
    }
}
