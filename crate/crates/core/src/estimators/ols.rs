use nalgebra::{DMatrix, DVector};

use super::{check_inputs, prepare, response_is_constant, Method, SubspaceEstimate};
use crate::error::{Result, SdrError};
use crate::numerics::{canonical_sign, DataMatrix};

/// Single direction S_n⁻¹·n⁻¹ΣY_jX̃_j, normalized.
///
/// Under an elliptical design E(YX) lies in Σ_X·span(B), so this direction
/// falls in the central subspace whenever the moment is nonzero.
pub fn ols_direction(data: &DataMatrix, response: &[f64]) -> Result<SubspaceEstimate> {
    check_inputs(data, response, None)?;
    let prep = prepare(data)?;
    let (n, p) = (data.nrows(), data.ncols());
    if response_is_constant(response) {
        return Err(SdrError::DegenerateSpectrum);
    }
    let y = DVector::from_column_slice(response);
    let moment = prep.centered.transpose() * &y / n as f64;

    let rms_y = (y.norm_squared() / n as f64).sqrt();
    let rms_x = (prep.centered.norm_squared() / n as f64).sqrt();
    if moment.norm() < 1e-12 * rms_y * rms_x {
        return Err(SdrError::DegenerateSpectrum);
    }
    let direction = prep
        .factor
        .solve(&DMatrix::from_column_slice(p, 1, moment.as_slice()));
    let norm = direction.norm();
    let mut eigenvalues = DVector::zeros(p);
    eigenvalues[0] = norm * norm;
    Ok(SubspaceEstimate {
        basis: canonical_sign(direction / norm),
        eigenvalues,
        method: Method::Ols,
        k: 1,
    })
}
