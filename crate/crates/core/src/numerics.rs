//! Dense-matrix primitives shared by the estimators.
//!
//! Conventions fixed here are relied on by golden tests elsewhere:
//! eigenvalues come back in descending order, and every eigenvector is
//! signed so that its entry of largest magnitude is positive (the lowest
//! index wins a tie). Eigenvectors belonging to tied eigenvalues are only
//! identified up to their span.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Result, SdrError};

/// Cholesky factorizations whose reciprocal condition estimate falls
/// below this are rejected.
pub const RCOND_FLOOR: f64 = 1e-12;

/// Relative asymmetry accepted by [`sym_eig_desc`].
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Relative pivot norm below which [`gram_schmidt`] reports rank deficiency.
pub const PIVOT_TOL: f64 = 1e-10;

/// n×p predictor observations, one row per observation.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix(DMatrix<f64>);

impl DataMatrix {
    /// Validates that every entry is finite and that there are at least two
    /// rows and one column.
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() < 2 {
            return Err(SdrError::InsufficientRows {
                needed: 2,
                got: values.nrows(),
            });
        }
        if values.ncols() == 0 {
            return Err(SdrError::ShapeMismatch("data has no columns".into()));
        }
        for j in 0..values.ncols() {
            for i in 0..values.nrows() {
                if !values[(i, j)].is_finite() {
                    return Err(SdrError::NonFinite { row: i, column: j });
                }
            }
        }
        Ok(DataMatrix(values))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != p) {
            return Err(SdrError::ShapeMismatch(format!(
                "row {i} has {} columns, expected {p}",
                r.len()
            )));
        }
        Self::new(DMatrix::from_fn(n, p, |i, j| rows[i][j]))
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// Rows with `mean` subtracted.
    pub fn centered(&self, mean: &DVector<f64>) -> DMatrix<f64> {
        let mut out = self.0.clone();
        for (j, mut col) in out.column_iter_mut().enumerate() {
            col.add_scalar_mut(-mean[j]);
        }
        out
    }
}

/// Column means and the (n−1)-divisor sample covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredStats {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
    pub n: usize,
}

/// Eigenvalues in descending order with their eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairs {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl EigenPairs {
    /// First `k` eigenvectors as a p×k matrix.
    pub fn leading(&self, k: usize) -> DMatrix<f64> {
        self.eigenvectors.columns(0, k).into_owned()
    }
}

// Summing a sorted copy makes the result depend only on the multiset of
// terms, so reordering observations cannot change a single bit.
fn order_free_sum(terms: &mut [f64]) -> f64 {
    terms.sort_unstable_by(f64::total_cmp);
    terms.iter().sum()
}

/// Column means and sample covariance S_n = (n−1)⁻¹ Σ X̃ⱼX̃ⱼᵀ.
///
/// Both are bit-for-bit invariant under row permutations.
pub fn center_and_covariance(data: &DataMatrix) -> Result<CenteredStats> {
    let x = data.values();
    let (n, p) = x.shape();
    if n < 2 {
        return Err(SdrError::InsufficientRows { needed: 2, got: n });
    }
    let mut scratch = vec![0.0; n];
    let mean = DVector::from_fn(p, |j, _| {
        scratch.copy_from_slice(x.column(j).as_slice());
        order_free_sum(&mut scratch) / n as f64
    });
    let centered = data.centered(&mean);
    let mut covariance = DMatrix::zeros(p, p);
    for a in 0..p {
        for b in 0..=a {
            for (i, s) in scratch.iter_mut().enumerate() {
                *s = centered[(i, a)] * centered[(i, b)];
            }
            let v = order_free_sum(&mut scratch) / (n - 1) as f64;
            covariance[(a, b)] = v;
            covariance[(b, a)] = v;
        }
    }
    Ok(CenteredStats {
        mean,
        covariance,
        n,
    })
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    lower: DMatrix<f64>,
}

impl SpdFactor {
    /// Factors `a = L·Lᵀ`.
    ///
    /// A pivot at or below rounding-noise level is a failed factorization
    /// ([`SdrError::NotPositiveDefinite`]); a successful factorization whose
    /// reciprocal condition estimate `(min Lᵢᵢ / max Lᵢᵢ)²` is under
    /// [`RCOND_FLOOR`] is [`SdrError::IllConditioned`].
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        let p = a.nrows();
        if a.ncols() != p {
            return Err(SdrError::ShapeMismatch(format!(
                "expected a square matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let scale = (0..p).map(|i| a[(i, i)].abs()).fold(0.0, f64::max);
        let noise = scale * f64::EPSILON * p.max(1) as f64;
        let mut lower = DMatrix::zeros(p, p);
        for j in 0..p {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= lower[(j, k)] * lower[(j, k)];
            }
            if !(d > noise) {
                return Err(SdrError::NotPositiveDefinite);
            }
            let ljj = d.sqrt();
            lower[(j, j)] = ljj;
            for i in (j + 1)..p {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= lower[(i, k)] * lower[(j, k)];
                }
                lower[(i, j)] = s / ljj;
            }
        }
        let factor = SpdFactor { lower };
        let rcond = factor.rcond_estimate();
        if rcond < RCOND_FLOOR {
            return Err(SdrError::IllConditioned { rcond });
        }
        Ok(factor)
    }

    pub fn lower(&self) -> &DMatrix<f64> {
        &self.lower
    }

    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    pub fn rcond_estimate(&self) -> f64 {
        let diag = self.lower.diagonal();
        if diag.is_empty() {
            return 1.0;
        }
        let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| {
            (lo.min(d), hi.max(d))
        });
        (lo / hi).powi(2)
    }

    /// L⁻¹·b
    pub fn solve_lower(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.lower
            .solve_lower_triangular(b)
            .expect("factor has a positive diagonal")
    }

    /// L⁻ᵀ·b
    pub fn solve_upper(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.lower
            .tr_solve_lower_triangular(b)
            .expect("factor has a positive diagonal")
    }

    /// A⁻¹·b
    pub fn solve(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.solve_upper(&self.solve_lower(b))
    }
}

/// Solves `a·x = b` for symmetric positive-definite `a` without forming a⁻¹.
pub fn solve_spd(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if b.nrows() != a.nrows() {
        return Err(SdrError::ShapeMismatch(format!(
            "right-hand side has {} rows, matrix is {}x{}",
            b.nrows(),
            a.nrows(),
            a.ncols()
        )));
    }
    check_symmetric(a)?;
    Ok(SpdFactor::new(a)?.solve(b))
}

fn check_symmetric(a: &DMatrix<f64>) -> Result<()> {
    if !a.is_square() {
        return Err(SdrError::ShapeMismatch(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let scale = a.amax();
    let asymmetry = (a - a.transpose()).amax();
    if asymmetry > SYMMETRY_TOL * scale {
        return Err(SdrError::NotSymmetric { asymmetry });
    }
    Ok(())
}

/// Applies the sign convention: the entry of largest magnitude is
/// positive, ties going to the lowest index.
pub fn canonical_sign(mut v: DMatrix<f64>) -> DMatrix<f64> {
    for mut col in v.column_iter_mut() {
        let mut best = 0;
        for i in 1..col.len() {
            if col[i].abs() > col[best].abs() {
                best = i;
            }
        }
        if !col.is_empty() && col[best] < 0.0 {
            col.neg_mut();
        }
    }
    v
}

/// Symmetric eigendecomposition with descending eigenvalues and
/// canonically signed eigenvectors.
pub fn sym_eig_desc(a: &DMatrix<f64>) -> Result<EigenPairs> {
    check_symmetric(a)?;
    let sym = (a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let p = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..p).collect();
    // stable: equal eigenvalues keep solver order
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let eigenvalues = DVector::from_fn(p, |i, _| eig.eigenvalues[order[i]]);
    let eigenvectors = DMatrix::from_fn(p, p, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigenPairs {
        eigenvalues,
        eigenvectors: canonical_sign(eigenvectors),
    })
}

/// Modified Gram–Schmidt with one re-orthogonalization pass.
///
/// Column signs are preserved. A column whose residual norm drops below
/// [`PIVOT_TOL`] times its original norm is [`SdrError::RankDeficient`].
pub fn gram_schmidt(columns: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (p, k) = columns.shape();
    if k > p {
        return Err(SdrError::RankDeficient { column: p });
    }
    let mut q = columns.clone();
    for j in 0..k {
        let original = columns.column(j).norm();
        for _pass in 0..2 {
            for i in 0..j {
                let proj = q.column(i).dot(&q.column(j));
                let qi = q.column(i).into_owned();
                q.column_mut(j).axpy(-proj, &qi, 1.0);
            }
        }
        let norm = q.column(j).norm();
        if !(original > 0.0) || !(norm >= PIVOT_TOL * original) {
            return Err(SdrError::RankDeficient { column: j });
        }
        q.column_mut(j).unscale_mut(norm);
    }
    Ok(q)
}

/// Orthogonal projection onto the span of orthonormal columns: B·Bᵀ.
pub fn projection(orthonormal: &DMatrix<f64>) -> DMatrix<f64> {
    orthonormal * orthonormal.transpose()
}

/// max |GᵀG − I|
pub fn orthonormality_error(g: &DMatrix<f64>) -> f64 {
    let k = g.ncols();
    (g.transpose() * g - DMatrix::<f64>::identity(k, k)).amax()
}
