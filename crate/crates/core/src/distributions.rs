//! Seeded samplers for the elliptical predictor laws and the
//! normal/uniform mixture.
//!
//! Every sampler is a pure function of `(spec, n, stream)`. Streams are
//! ChaCha20 keyed by `base_seed` with `stream_id` selecting an independent
//! counter stream, so any replicate can be regenerated in isolation.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{ChiSquared, Distribution, Gamma, StandardNormal};

use crate::error::{Result, SdrError};
use crate::numerics::{DataMatrix, SpdFactor};

/// Identifies one deterministic random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeededStream {
    pub base_seed: u64,
    pub stream_id: u64,
}

impl SeededStream {
    pub fn new(base_seed: u64, stream_id: u64) -> Self {
        SeededStream {
            base_seed,
            stream_id,
        }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.base_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionKind {
    Normal,
    /// Multivariate Student's t; `nu = 1` is the multivariate Cauchy.
    StudentT {
        nu: f64,
    },
    /// Density ∝ exp(−½ (xᵀΣ⁻¹x)^β).
    PowerExponential {
        beta: f64,
    },
    /// With probability `weight` a N(μ, Σ) draw, otherwise independent
    /// Uniform(−h, h) components around μ.
    NormalUniformMixture {
        weight: f64,
        halfwidth: f64,
    },
}

impl DistributionKind {
    /// Stable identifier used in result files.
    pub fn id(&self) -> &'static str {
        match self {
            DistributionKind::Normal => "normal",
            DistributionKind::StudentT { .. } => "t",
            DistributionKind::PowerExponential { .. } => "pe",
            DistributionKind::NormalUniformMixture { .. } => "mixture",
        }
    }

    pub fn nu(&self) -> Option<f64> {
        match *self {
            DistributionKind::StudentT { nu } => Some(nu),
            _ => None,
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match *self {
            DistributionKind::PowerExponential { beta } => Some(beta),
            _ => None,
        }
    }
}

/// A predictor law: kind plus location `mu` and SPD scale matrix `sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSpec {
    pub kind: DistributionKind,
    pub mu: DVector<f64>,
    pub sigma: DMatrix<f64>,
}

impl DistributionSpec {
    /// Zero-mean law with scale matrix `sigma`.
    pub fn centered(kind: DistributionKind, sigma: DMatrix<f64>) -> Self {
        let p = sigma.nrows();
        DistributionSpec {
            kind,
            mu: DVector::zeros(p),
            sigma,
        }
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    /// Checks parameters and returns the Cholesky factor of `sigma`.
    pub fn validate(&self) -> Result<SpdFactor> {
        let p = self.mu.len();
        if p == 0 {
            return Err(SdrError::InvalidSpec("dimension must be positive".into()));
        }
        if self.sigma.shape() != (p, p) {
            return Err(SdrError::InvalidSpec(format!(
                "sigma is {}x{} but mu has length {p}",
                self.sigma.nrows(),
                self.sigma.ncols()
            )));
        }
        if self.mu.iter().any(|v| !v.is_finite()) || self.sigma.iter().any(|v| !v.is_finite()) {
            return Err(SdrError::InvalidSpec("non-finite parameter".into()));
        }
        match self.kind {
            DistributionKind::Normal => {}
            DistributionKind::StudentT { nu } if !(nu > 0.0 && nu.is_finite()) => {
                return Err(SdrError::InvalidSpec(format!(
                    "nu must be positive, got {nu}"
                )));
            }
            DistributionKind::PowerExponential { beta } if !(beta > 0.0 && beta.is_finite()) => {
                return Err(SdrError::InvalidSpec(format!(
                    "beta must be positive, got {beta}"
                )));
            }
            DistributionKind::NormalUniformMixture { weight, halfwidth } => {
                if !(0.0..=1.0).contains(&weight) {
                    return Err(SdrError::InvalidSpec(format!(
                        "mixture weight must lie in [0, 1], got {weight}"
                    )));
                }
                if !(halfwidth > 0.0 && halfwidth.is_finite()) {
                    return Err(SdrError::InvalidSpec(format!(
                        "uniform half-width must be positive, got {halfwidth}"
                    )));
                }
            }
            _ => {}
        }
        SpdFactor::new(&self.sigma).map_err(|e| match e {
            SdrError::IllConditioned { .. } => SdrError::NotPositiveDefinite,
            other => other,
        })
    }

    /// Draws `n` rows from this law.
    pub fn sample(&self, n: usize, stream: SeededStream) -> Result<DataMatrix> {
        match self.kind {
            DistributionKind::Normal => sample_normal(self, n, stream),
            DistributionKind::StudentT { .. } => sample_student_t(self, n, stream),
            DistributionKind::PowerExponential { .. } => sample_power_exponential(self, n, stream),
            DistributionKind::NormalUniformMixture { .. } => sample_mixture(self, n, stream),
        }
    }
}

fn expect_kind(spec: &DistributionSpec, want: &str) -> Result<()> {
    if spec.kind.id() == want {
        Ok(())
    } else {
        Err(SdrError::InvalidSpec(format!(
            "expected a {want} spec, got {}",
            spec.kind.id()
        )))
    }
}

/// n×p matrix of i.i.d. standard normals, drawn row by row.
fn standard_normal_rows<R: Rng>(rng: &mut R, n: usize, p: usize) -> DMatrix<f64> {
    let mut z = DMatrix::zeros(n, p);
    for i in 0..n {
        for j in 0..p {
            z[(i, j)] = rng.sample(StandardNormal);
        }
    }
    z
}

// rows ← mu + rows·Lᵀ
fn affine(rows: DMatrix<f64>, factor: &SpdFactor, mu: &DVector<f64>) -> DMatrix<f64> {
    let mut x = rows * factor.lower().transpose();
    for (j, mut col) in x.column_iter_mut().enumerate() {
        col.add_scalar_mut(mu[j]);
    }
    x
}

/// `n` i.i.d. N(0, 1) draws, used as regression noise.
pub fn sample_noise(n: usize, stream: SeededStream) -> Vec<f64> {
    let mut rng = stream.rng();
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn sample_normal(
    spec: &DistributionSpec,
    n: usize,
    stream: SeededStream,
) -> Result<DataMatrix> {
    expect_kind(spec, "normal")?;
    let factor = spec.validate()?;
    let mut rng = stream.rng();
    let z = standard_normal_rows(&mut rng, n, spec.dim());
    DataMatrix::new(affine(z, &factor, &spec.mu))
}

/// Rows are μ + Z/√(W/ν) with Z ~ N(0, Σ) and W ~ χ²(ν).
pub fn sample_student_t(
    spec: &DistributionSpec,
    n: usize,
    stream: SeededStream,
) -> Result<DataMatrix> {
    expect_kind(spec, "t")?;
    let factor = spec.validate()?;
    let nu = spec.kind.nu().expect("checked kind");
    let chi = ChiSquared::new(nu).map_err(|e| SdrError::InvalidSpec(e.to_string()))?;
    let mut rng = stream.rng();
    let p = spec.dim();
    let mut rows = DMatrix::zeros(n, p);
    for i in 0..n {
        for j in 0..p {
            rows[(i, j)] = rng.sample(StandardNormal);
        }
        let w: f64 = chi.sample(&mut rng);
        // W can underflow to 0 for tiny nu; keep the draw finite
        let scale = (nu / w.max(f64::MIN_POSITIVE)).sqrt();
        rows.row_mut(i).scale_mut(scale);
    }
    DataMatrix::new(affine(rows, &factor, &spec.mu))
}

/// Rows are μ + R·L·u with u uniform on the unit sphere and
/// R = T^{1/(2β)}, T ~ Gamma(p/(2β), scale 2).
///
/// The radius of a standardized draw has density ∝ r^{p−1}·exp(−r^{2β}/2);
/// substituting T = r^{2β} gives T^{p/(2β)−1}·e^{−T/2}. At β = 1 this is
/// χ²(p) and the law is N(μ, Σ).
pub fn sample_power_exponential(
    spec: &DistributionSpec,
    n: usize,
    stream: SeededStream,
) -> Result<DataMatrix> {
    expect_kind(spec, "pe")?;
    let factor = spec.validate()?;
    let beta = spec.kind.beta().expect("checked kind");
    let p = spec.dim();
    let gamma = Gamma::new(p as f64 / (2.0 * beta), 2.0)
        .map_err(|e| SdrError::InvalidSpec(e.to_string()))?;
    let mut rng = stream.rng();
    let mut rows = DMatrix::zeros(n, p);
    for i in 0..n {
        let mut norm2 = 0.0;
        for j in 0..p {
            let g: f64 = rng.sample(StandardNormal);
            rows[(i, j)] = g;
            norm2 += g * g;
        }
        let t: f64 = gamma.sample(&mut rng);
        let radius = t.powf(1.0 / (2.0 * beta));
        rows.row_mut(i).scale_mut(radius / norm2.sqrt());
    }
    DataMatrix::new(affine(rows, &factor, &spec.mu))
}

/// Per-row component choice: N(μ, Σ) with probability `weight`, otherwise
/// μ + independent Uniform(−h, h) components.
///
/// The normal block is drawn first exactly as [`sample_normal`] draws it,
/// so `weight = 1` reproduces that sampler bit for bit on the same stream.
pub fn sample_mixture(
    spec: &DistributionSpec,
    n: usize,
    stream: SeededStream,
) -> Result<DataMatrix> {
    expect_kind(spec, "mixture")?;
    let factor = spec.validate()?;
    let (weight, halfwidth) = match spec.kind {
        DistributionKind::NormalUniformMixture { weight, halfwidth } => (weight, halfwidth),
        _ => unreachable!(),
    };
    let p = spec.dim();
    let mut rng = stream.rng();
    let z = standard_normal_rows(&mut rng, n, p);
    let mut x = affine(z, &factor, &spec.mu);
    for i in 0..n {
        if !rng.random_bool(weight) {
            for j in 0..p {
                x[(i, j)] = spec.mu[j] + rng.random_range(-halfwidth..halfwidth);
            }
        }
    }
    DataMatrix::new(x)
}
