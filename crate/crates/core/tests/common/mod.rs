//! Independent reference implementations used only by tests. Nothing here
//! calls into the crate's numerics.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_rows(rng: &mut impl Rng, n: usize, p: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            (0..p)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect()
}

/// Gauss–Jordan inverse with partial pivoting.
pub fn gauss_jordan_inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..p).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        let d = m[col][col];
        assert!(d.abs() > 1e-300, "singular matrix");
        for v in m[col].iter_mut() {
            *v /= d;
        }
        for r in 0..p {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    let pivot_row = m[col].clone();
                    for (v, pv) in m[r].iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[p..].to_vec()).collect()
}

pub fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (n, m, q) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; q]; n];
    for i in 0..n {
        for k in 0..m {
            for j in 0..q {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn transpose(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..a[0].len())
        .map(|j| a.iter().map(|r| r[j]).collect())
        .collect()
}

/// Sample covariance with the n−1 divisor, by direct loops.
pub fn naive_covariance(x: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let (n, p) = (x.len(), x[0].len());
    let mean: Vec<f64> = (0..p)
        .map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let mut cov = vec![vec![0.0; p]; p];
    for r in x {
        for i in 0..p {
            for j in 0..p {
                cov[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]);
            }
        }
    }
    for row in cov.iter_mut() {
        for v in row.iter_mut() {
            *v /= (n - 1) as f64;
        }
    }
    (mean, cov)
}

/// K = S⁻¹ (zᵀz / n) S⁻¹ with z = (X − X̄)·y row-wise; the reference
/// form of the PSRFR kernel.
pub fn brute_force_kernel(x: &[Vec<f64>], y: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let (mean, cov) = naive_covariance(x);
    let z: Vec<Vec<f64>> = x
        .iter()
        .zip(y)
        .map(|(r, yi)| r.iter().zip(&mean).map(|(v, m)| (v - m) * yi).collect())
        .collect();
    let mut ztz = matmul(&transpose(&z), &z);
    for row in ztz.iter_mut() {
        for v in row.iter_mut() {
            *v /= n as f64;
        }
    }
    let inv = gauss_jordan_inverse(&cov);
    matmul(&matmul(&inv, &ztz), &inv)
}

pub fn to_dmatrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

/// Orthogonal Q factor of a Gaussian matrix.
pub fn random_orthogonal(rng: &mut impl Rng, p: usize) -> DMatrix<f64> {
    let g = to_dmatrix(&gaussian_rows(rng, p, p));
    g.qr().q()
}

/// Projection onto the column span via the pseudo-inverse route
/// A (AᵀA)⁻¹ Aᵀ, using the Gauss–Jordan inverse.
pub fn span_projection(a: &DMatrix<f64>) -> DMatrix<f64> {
    let ata = a.transpose() * a;
    let rows: Vec<Vec<f64>> = (0..ata.nrows())
        .map(|i| (0..ata.ncols()).map(|j| ata[(i, j)]).collect())
        .collect();
    let inv = to_dmatrix(&gauss_jordan_inverse(&rows));
    a * inv * a.transpose()
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

/// 1-D energy distance 2∫(F_a − F_b)² for labelled values sorted by
/// value; `is_a[i]` marks membership.
fn energy_1d_sorted(values: &[f64], is_a: &[bool], na: usize, nb: usize) -> f64 {
    let (mut ca, mut cb) = (0usize, 0usize);
    let mut total = 0.0;
    for i in 0..values.len() - 1 {
        if is_a[i] {
            ca += 1;
        } else {
            cb += 1;
        }
        let diff = ca as f64 / na as f64 - cb as f64 / nb as f64;
        total += diff * diff * (values[i + 1] - values[i]);
    }
    2.0 * total
}

/// Two-sample energy-distance permutation test on random one-dimensional
/// projections. Energy distance in R^d is proportional to the average of
/// the one-dimensional energy distances over uniformly random directions,
/// so the averaged statistic targets the same discrepancy.
/// Returns the permutation p-value.
pub fn energy_test(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    directions: usize,
    permutations: usize,
    seed: u64,
) -> f64 {
    let mut rng = rng(seed);
    let (na, nb, p) = (a.nrows(), b.nrows(), a.ncols());
    let pooled_n = na + nb;
    let mut projected: Vec<Vec<(f64, usize)>> = Vec::with_capacity(directions);
    for _ in 0..directions {
        let mut u: Vec<f64> = (0..p)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        u.iter_mut().for_each(|v| *v /= norm);
        let mut vals: Vec<(f64, usize)> = (0..pooled_n)
            .map(|i| {
                let row = if i < na { a.row(i) } else { b.row(i - na) };
                (row.iter().zip(&u).map(|(x, w)| x * w).sum(), i)
            })
            .collect();
        vals.sort_by(|x, y| x.0.total_cmp(&y.0));
        projected.push(vals);
    }
    let statistic = |labels: &[bool]| -> f64 {
        projected
            .iter()
            .map(|vals| {
                let values: Vec<f64> = vals.iter().map(|v| v.0).collect();
                let is_a: Vec<bool> = vals.iter().map(|v| labels[v.1]).collect();
                energy_1d_sorted(&values, &is_a, na, nb)
            })
            .sum::<f64>()
            / directions as f64
    };
    let mut labels: Vec<bool> = (0..pooled_n).map(|i| i < na).collect();
    let observed = statistic(&labels);
    let mut exceed = 0;
    for _ in 0..permutations {
        for i in (1..pooled_n).rev() {
            let j = rng.random_range(0..=i);
            labels.swap(i, j);
        }
        if statistic(&labels) >= observed {
            exceed += 1;
        }
    }
    (1 + exceed) as f64 / (1 + permutations) as f64
}
