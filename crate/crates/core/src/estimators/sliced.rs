//! Slicing estimators: SIR and SAVE.
//!
//! Both work on the standardized scale Z = X̃·L⁻ᵀ with S_n = L·Lᵀ, so that
//! Z has identity sample covariance, and map eigenvectors η back through
//! β = L⁻ᵀη before re-orthonormalizing.

use nalgebra::DMatrix;

use super::{check_inputs, prepare, response_is_constant, Method, SubspaceEstimate};
use crate::error::{Result, SdrError};
use crate::numerics::{canonical_sign, gram_schmidt, sym_eig_desc, DataMatrix, SpdFactor};

/// Partitions observation indices into `slices` groups of near-equal size
/// by ascending response; ties keep their original order and the first
/// `n mod slices` groups get one extra observation.
pub fn slice_indices(response: &[f64], slices: usize) -> Vec<Vec<usize>> {
    let n = response.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| response[a].total_cmp(&response[b]));
    let (base, extra) = (n / slices, n % slices);
    let mut out = Vec::with_capacity(slices);
    let mut start = 0;
    for h in 0..slices {
        let size = base + usize::from(h < extra);
        out.push(order[start..start + size].to_vec());
        start += size;
    }
    out
}

struct Standardized {
    z: DMatrix<f64>,
    factor: SpdFactor,
    groups: Vec<Vec<usize>>,
}

fn standardize_and_slice(
    data: &DataMatrix,
    response: &[f64],
    k: usize,
    slices: usize,
) -> Result<Standardized> {
    check_inputs(data, response, Some(k))?;
    let n = data.nrows();
    if slices == 0 || n < 2 * slices {
        return Err(SdrError::TooFewRows {
            slices,
            needed: 2 * slices.max(1),
            got: n,
        });
    }
    let prep = prepare(data)?;
    if response_is_constant(response) {
        return Err(SdrError::DegenerateSpectrum);
    }
    let z = prep
        .factor
        .solve_lower(&prep.centered.transpose())
        .transpose();
    Ok(Standardized {
        z,
        factor: prep.factor,
        groups: slice_indices(response, slices),
    })
}

fn back_transform(
    kernel: &DMatrix<f64>,
    factor: &SpdFactor,
    method: Method,
    k: usize,
) -> Result<SubspaceEstimate> {
    let eig = sym_eig_desc(kernel)?;
    let eta = eig.leading(k);
    let basis = canonical_sign(gram_schmidt(&factor.solve_upper(&eta))?);
    Ok(SubspaceEstimate {
        basis,
        eigenvalues: eig.eigenvalues,
        method,
        k,
    })
}

fn slice_mean(z: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    let p = z.ncols();
    let mut m = DMatrix::zeros(p, 1);
    for &i in idx {
        for c in 0..p {
            m[(c, 0)] += z[(i, c)];
        }
    }
    m / idx.len() as f64
}

/// Sliced inverse regression: M̂ = Σ_h (n_h/n)·m̄_h m̄_hᵀ on the
/// standardized scale.
pub fn sir_fit(
    data: &DataMatrix,
    response: &[f64],
    k: usize,
    slices: usize,
) -> Result<SubspaceEstimate> {
    let st = standardize_and_slice(data, response, k, slices)?;
    let n = data.nrows() as f64;
    let p = data.ncols();
    let mut m = DMatrix::zeros(p, p);
    for idx in &st.groups {
        let mean = slice_mean(&st.z, idx);
        m += (&mean * mean.transpose()) * (idx.len() as f64 / n);
    }
    back_transform(&m, &st.factor, Method::Sir, k)
}

/// Sliced average variance estimation: M̂ = Σ_h (n_h/n)·(I − V̂_h)² with
/// V̂_h the within-slice covariance ((n_h − 1) divisor) of standardized X.
pub fn save_fit(
    data: &DataMatrix,
    response: &[f64],
    k: usize,
    slices: usize,
) -> Result<SubspaceEstimate> {
    let st = standardize_and_slice(data, response, k, slices)?;
    let n = data.nrows() as f64;
    let p = data.ncols();
    let identity = DMatrix::<f64>::identity(p, p);
    let mut m = DMatrix::zeros(p, p);
    for idx in &st.groups {
        let mean = slice_mean(&st.z, idx);
        let mut dev = DMatrix::zeros(idx.len(), p);
        for (r, &i) in idx.iter().enumerate() {
            for c in 0..p {
                dev[(r, c)] = st.z[(i, c)] - mean[(c, 0)];
            }
        }
        let v = dev.transpose() * &dev / (idx.len() - 1) as f64;
        let d = &identity - v;
        m += (&d * &d) * (idx.len() as f64 / n);
    }
    back_transform(&((&m + m.transpose()) * 0.5), &st.factor, Method::Save, k)
}
