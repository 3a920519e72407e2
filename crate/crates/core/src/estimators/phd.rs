use nalgebra::{DMatrix, DVector};

use super::{check_inputs, prepare, response_is_constant, symmetrize, Method, SubspaceEstimate};
use crate::error::{Result, SdrError};
use crate::numerics::{canonical_sign, sym_eig_desc, DataMatrix};

/// Response-based principal Hessian directions.
///
/// M̂ = S_n⁻¹ Σ̂_YXX S_n⁻¹ with Σ̂_YXX = n⁻¹ Σ (Y_j − Ȳ) X̃_j X̃_jᵀ. The Hessian
/// eigenvalues are signed, so directions are ranked by |λ| and the
/// reported spectrum is |λ| in descending order.
pub fn phd_fit(data: &DataMatrix, response: &[f64], k: usize) -> Result<SubspaceEstimate> {
    check_inputs(data, response, Some(k))?;
    let prep = prepare(data)?;
    if response_is_constant(response) {
        return Err(SdrError::DegenerateSpectrum);
    }
    let n = data.nrows();
    let y_mean = response.iter().sum::<f64>() / n as f64;
    let mut weighted = prep.centered.clone();
    for (i, mut row) in weighted.row_iter_mut().enumerate() {
        row.scale_mut(response[i] - y_mean);
    }
    let syxx = symmetrize(&(weighted.transpose() * &prep.centered / n as f64));
    // S⁻¹·Σ, then (S⁻¹·(S⁻¹Σ)ᵀ)ᵀ = S⁻¹ΣS⁻¹
    let left = prep.factor.solve(&syxx);
    let m = symmetrize(&prep.factor.solve(&left.transpose()).transpose());

    let eig = sym_eig_desc(&m)?;
    let p = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .abs()
            .total_cmp(&eig.eigenvalues[a].abs())
    });
    let eigenvalues = DVector::from_fn(p, |i, _| eig.eigenvalues[order[i]].abs());
    if !(eigenvalues[0] > 0.0) {
        return Err(SdrError::DegenerateSpectrum);
    }
    let basis = DMatrix::from_fn(p, k, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SubspaceEstimate {
        basis: canonical_sign(basis),
        eigenvalues,
        method: Method::Phd,
        k,
    })
}
