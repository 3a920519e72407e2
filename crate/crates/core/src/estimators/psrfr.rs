use nalgebra::DMatrix;

use super::{check_inputs, prepare, symmetrize, Method, SubspaceEstimate};
use crate::error::{Result, SdrError};
use crate::numerics::{sym_eig_desc, DataMatrix};

/// Spectra whose largest eigenvalue falls below this fraction of
/// mean(Y²)·trace(S_n⁻¹) are treated as degenerate.
const DEGENERATE_REL: f64 = 1e-12;

/// The transformed observations and their second-moment matrix.
#[derive(Debug, Clone)]
pub struct PsrfrKernel {
    /// n×p; row j is Z_jᵀ = (S_n⁻¹ Y_j X̃_j)ᵀ.
    pub z_rows: DMatrix<f64>,
    /// Ẑ = n⁻¹ Σ Z_j Z_jᵀ, symmetric positive semidefinite.
    pub z_hat: DMatrix<f64>,
    /// mean(Y²)·trace(S_n⁻¹); the natural size of Ẑ's spectrum.
    pub(crate) scale: f64,
}

/// Computes Z_j = S_n⁻¹ Y_j X̃_j for every observation and Ẑ.
///
/// The response is used uncentered. S_n⁻¹ is applied through its Cholesky
/// factor; the inverse is never formed.
pub fn psrfr_kernel(data: &DataMatrix, response: &[f64]) -> Result<PsrfrKernel> {
    check_inputs(data, response, None)?;
    let prep = prepare(data)?;
    let n = data.nrows();
    let mut weighted = prep.centered.transpose();
    for (j, mut col) in weighted.column_iter_mut().enumerate() {
        col.scale_mut(response[j]);
    }
    let z_cols = prep.factor.solve(&weighted);
    let z_hat = symmetrize(&((&z_cols * z_cols.transpose()) / n as f64));

    let inv_lower = prep
        .factor
        .solve_lower(&DMatrix::identity(data.ncols(), data.ncols()));
    let trace_inv = inv_lower.norm_squared();
    let mean_sq = response.iter().map(|y| y * y).sum::<f64>() / n as f64;
    Ok(PsrfrKernel {
        z_rows: z_cols.transpose(),
        z_hat,
        scale: mean_sq * trace_inv,
    })
}

/// Fits the principal square response forward regression estimator.
///
/// Centers X, forms Z_j = S_n⁻¹ Y_j X̃_j and Ẑ = n⁻¹ Σ Z_j Z_jᵀ, and returns
/// the leading `k` eigenvectors of Ẑ together with its full spectrum.
pub fn psrfr_fit(data: &DataMatrix, response: &[f64], k: usize) -> Result<SubspaceEstimate> {
    check_inputs(data, response, Some(k))?;
    let kernel = psrfr_kernel(data, response)?;
    let eig = sym_eig_desc(&kernel.z_hat)?;
    let top = eig.eigenvalues[0];
    if !(top > DEGENERATE_REL * kernel.scale) {
        return Err(SdrError::DegenerateSpectrum);
    }
    Ok(SubspaceEstimate {
        basis: eig.leading(k),
        eigenvalues: eig.eigenvalues,
        method: Method::Psrfr,
        k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::orthonormality_error;

    fn small_data() -> (DataMatrix, Vec<f64>) {
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|i| {
                let t = i as f64;
                vec![(t * 0.7).sin() * 2.0, (t * 1.3).cos(), t * 0.1 - 0.4]
            })
            .collect();
        let y = rows.iter().map(|r| r[0] * r[0] - r[1] + 0.2).collect();
        (DataMatrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn zero_response_is_degenerate() {
        let (x, y) = small_data();
        let zeros = vec![0.0; y.len()];
        assert!(matches!(
            psrfr_fit(&x, &zeros, 1),
            Err(SdrError::DegenerateSpectrum)
        ));
    }

    #[test]
    fn requires_more_rows_than_columns() {
        let x = DataMatrix::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![0.0, 1.0, 5.0],
            vec![2.0, 2.0, 2.0],
        ])
        .unwrap();
        assert!(matches!(
            psrfr_fit(&x, &[1.0, 2.0, 3.0], 1),
            Err(SdrError::InsufficientRows { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn bad_k_and_lengths() {
        let (x, y) = small_data();
        assert!(matches!(
            psrfr_fit(&x, &y, 0),
            Err(SdrError::InvalidDimension { .. })
        ));
        assert!(matches!(
            psrfr_fit(&x, &y, 4),
            Err(SdrError::InvalidDimension { .. })
        ));
        assert!(matches!(
            psrfr_fit(&x, &y[1..], 1),
            Err(SdrError::LengthMismatch { .. })
        ));
        let mut bad = y.clone();
        bad[3] = f64::INFINITY;
        assert!(matches!(
            psrfr_fit(&x, &bad, 1),
            Err(SdrError::NonFinite { row: 3, .. })
        ));
    }

    #[test]
    fn kernel_is_psd_and_basis_orthonormal() {
        let (x, y) = small_data();
        let kernel = psrfr_kernel(&x, &y).unwrap();
        let eig = sym_eig_desc(&kernel.z_hat).unwrap();
        let max = eig.eigenvalues[0];
        assert!(eig.eigenvalues.iter().all(|&l| l >= -1e-8 * max));
        assert_eq!(kernel.z_rows.shape(), (12, 3));
        let fit = psrfr_fit(&x, &y, 2).unwrap();
        assert!(orthonormality_error(&fit.basis) < 1e-10);
        assert_eq!(fit.eigenvalues.len(), 3);
        assert!(
            fit.eigenvalues[0] >= fit.eigenvalues[1] && fit.eigenvalues[1] >= fit.eigenvalues[2]
        );
    }

    #[test]
    fn collinear_predictors_are_rejected() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let x = DataMatrix::from_rows(&rows).unwrap();
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let err = psrfr_fit(&x, &y, 1).unwrap_err();
        assert!(matches!(
            err,
            SdrError::NotPositiveDefinite | SdrError::IllConditioned { .. }
        ));
    }
}
