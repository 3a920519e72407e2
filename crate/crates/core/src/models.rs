//! Synthetic regression models with known central subspaces.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, SdrError};
use crate::numerics::DataMatrix;

/// Noise scale used by every model except [`ModelId::Gb4`].
pub const DEFAULT_SIGMA: f64 = 0.5;
/// Default noise scale for [`ModelId::Gb4`] (the other studied level is 4).
pub const GB4_DEFAULT_SIGMA: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelId {
    N1,
    N2,
    N3,
    N4,
    N5,
    Nn1,
    Nn2,
    Nn3,
    Nn4,
    Ne1,
    Ne2,
    Ne3,
    Gb4,
}

impl ModelId {
    pub const ALL: [ModelId; 13] = [
        ModelId::N1,
        ModelId::N2,
        ModelId::N3,
        ModelId::N4,
        ModelId::N5,
        ModelId::Nn1,
        ModelId::Nn2,
        ModelId::Nn3,
        ModelId::Nn4,
        ModelId::Ne1,
        ModelId::Ne2,
        ModelId::Ne3,
        ModelId::Gb4,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelId::N1 => "n1",
            ModelId::N2 => "n2",
            ModelId::N3 => "n3",
            ModelId::N4 => "n4",
            ModelId::N5 => "n5",
            ModelId::Nn1 => "nn1",
            ModelId::Nn2 => "nn2",
            ModelId::Nn3 => "nn3",
            ModelId::Nn4 => "nn4",
            ModelId::Ne1 => "ne1",
            ModelId::Ne2 => "ne2",
            ModelId::Ne3 => "ne3",
            ModelId::Gb4 => "gb4",
        }
    }

    /// Structural dimension of the model.
    pub fn structural_dim(&self) -> usize {
        match self {
            ModelId::Gb4 => 4,
            _ => 2,
        }
    }

    pub fn valid_ids() -> String {
        Self::ALL.map(|m| m.as_str()).join(", ")
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = SdrError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        ModelId::ALL
            .into_iter()
            .find(|m| m.as_str() == lower)
            .ok_or_else(|| SdrError::UnknownId {
                given: s.to_string(),
                expected: ModelId::valid_ids(),
            })
    }
}

/// A model together with its true basis and noise scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub model_id: ModelId,
    pub p: usize,
    pub sigma_noise: f64,
    /// p×k with orthonormal columns.
    pub true_basis: DMatrix<f64>,
}

impl ModelSpec {
    pub fn k(&self) -> usize {
        self.true_basis.ncols()
    }

    pub fn with_sigma(mut self, sigma_noise: f64) -> Self {
        self.sigma_noise = sigma_noise;
        self
    }
}

/// Canonical basis and noise scale for `model_id` in dimension `p`.
///
/// Two-direction models use (e₁, e₂). GB4 uses the four two-sparse
/// directions (e₁ ± e₂)/√2, (e₃ ± e₄)/√2.
pub fn default_spec(model_id: ModelId, p: usize) -> Result<ModelSpec> {
    let k = model_id.structural_dim();
    if p < k {
        return Err(SdrError::DimensionTooSmall {
            model: model_id.to_string(),
            p,
            needed: k,
        });
    }
    let mut basis = DMatrix::zeros(p, k);
    let sigma_noise = match model_id {
        ModelId::Gb4 => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            basis[(0, 0)] = h;
            basis[(1, 0)] = h;
            basis[(0, 1)] = h;
            basis[(1, 1)] = -h;
            basis[(2, 2)] = h;
            basis[(3, 2)] = h;
            basis[(2, 3)] = h;
            basis[(3, 3)] = -h;
            GB4_DEFAULT_SIGMA
        }
        _ => {
            basis[(0, 0)] = 1.0;
            basis[(1, 1)] = 1.0;
            DEFAULT_SIGMA
        }
    };
    Ok(ModelSpec {
        model_id,
        p,
        sigma_noise,
        true_basis: basis,
    })
}

/// Predictors, responses, and the model that produced them.
#[derive(Debug, Clone)]
pub struct LabeledSample {
    pub predictors: DataMatrix,
    pub response: Vec<f64>,
    pub truth: ModelSpec,
}

/// Response for one observation given its projections `b = BᵀX` and noise `e`.
fn link(model: ModelId, b: &[f64], e: f64, s: f64) -> f64 {
    match model {
        ModelId::N1 => b[0] + b[1] * e,
        ModelId::N2 => b[0].sin() + (b[1] + 1.0).abs().sqrt() * e,
        ModelId::N3 => (4.0 + b[0]) * (b[1] + 2.0) + s * e,
        ModelId::N4 => b[0] / (0.5 + (b[1] + 3.0).powi(2)) + s * e,
        ModelId::N5 => b[0] * b[0] + b[1].abs() + s * e,
        // noise enters squared here, as written for this model
        ModelId::Nn1 => (4.0 + b[0]) + (b[1] + 2.0) * s * e * e,
        ModelId::Nn2 => (4.0 + b[0]).abs().sqrt() * (b[1] + 2.0).abs().sqrt() + s * e,
        // the same ε appears inside the root and as additive noise
        ModelId::Nn3 => b[0].abs().sqrt() + (b[1] * e).abs().sqrt() + s * e,
        ModelId::Nn4 => 0.4 * b[0] + 3.0 * (b[1] / 4.0).sin() + s * e,
        ModelId::Ne1 => b[0] / (0.5 + (b[1] + 1.5).powi(2)) + s * e,
        ModelId::Ne2 => b[0] * (b[1] + 1.0) + s * e,
        ModelId::Ne3 => 0.4 * b[0] + 3.0 * (b[0] * b[1] / 4.0).sin() + s * e,
        ModelId::Gb4 => (b[0] + 4.0).sin() + b[1].exp() + b[2] * b[2] + b[3].abs() + s * e,
    }
}

/// Evaluates the model row by row with caller-supplied N(0, 1) noise.
pub fn generate(spec: &ModelSpec, predictors: DataMatrix, noise: &[f64]) -> Result<LabeledSample> {
    let n = predictors.nrows();
    if noise.len() != n {
        return Err(SdrError::LengthMismatch {
            expected: n,
            got: noise.len(),
        });
    }
    if predictors.ncols() != spec.p || spec.true_basis.nrows() != spec.p {
        return Err(SdrError::ShapeMismatch(format!(
            "model expects p = {}, predictors have {} columns",
            spec.p,
            predictors.ncols()
        )));
    }
    if spec.k() != spec.model_id.structural_dim() {
        return Err(SdrError::ShapeMismatch(format!(
            "model {} needs {} basis columns, spec has {}",
            spec.model_id,
            spec.model_id.structural_dim(),
            spec.k()
        )));
    }
    let proj = predictors.values() * &spec.true_basis;
    let mut b = vec![0.0; spec.k()];
    let mut response = Vec::with_capacity(n);
    for (i, &e) in noise.iter().enumerate() {
        for (c, slot) in b.iter_mut().enumerate() {
            *slot = proj[(i, c)];
        }
        let y = link(spec.model_id, &b, e, spec.sigma_noise);
        if !y.is_finite() {
            return Err(SdrError::NonFinite { row: i, column: 0 });
        }
        response.push(y);
    }
    Ok(LabeledSample {
        predictors,
        response,
        truth: spec.clone(),
    })
}

/// Diagonal scale-matrix presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CovarianceScenario {
    NormP10,
    EllpP10,
    NormP30,
    NormP40,
    EllpP30,
    EllpP40,
}

impl CovarianceScenario {
    pub const ALL: [CovarianceScenario; 6] = [
        CovarianceScenario::NormP10,
        CovarianceScenario::EllpP10,
        CovarianceScenario::NormP30,
        CovarianceScenario::NormP40,
        CovarianceScenario::EllpP30,
        CovarianceScenario::EllpP40,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CovarianceScenario::NormP10 => "norm_p10",
            CovarianceScenario::EllpP10 => "ellp_p10",
            CovarianceScenario::NormP30 => "norm_p30",
            CovarianceScenario::NormP40 => "norm_p40",
            CovarianceScenario::EllpP30 => "ellp_p30",
            CovarianceScenario::EllpP40 => "ellp_p40",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            CovarianceScenario::NormP10 | CovarianceScenario::EllpP10 => 10,
            CovarianceScenario::NormP30 | CovarianceScenario::EllpP30 => 30,
            CovarianceScenario::NormP40 | CovarianceScenario::EllpP40 => 40,
        }
    }
}

impl FromStr for CovarianceScenario {
    type Err = SdrError;

    fn from_str(s: &str) -> Result<Self> {
        CovarianceScenario::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| SdrError::UnknownId {
                given: s.to_string(),
                expected: CovarianceScenario::ALL.map(|c| c.as_str()).join(", "),
            })
    }
}

/// Σ_norm has diagonal 1..10 and Σ_ellp has 1, 6, …, 46; the p = 30 and
/// p = 40 variants repeat each entry 3 or 4 times in order.
pub fn covariance_for(scenario: CovarianceScenario) -> DMatrix<f64> {
    let (base, repeat): (fn(usize) -> f64, usize) = match scenario {
        CovarianceScenario::NormP10 => (|i| (i + 1) as f64, 1),
        CovarianceScenario::NormP30 => (|i| (i + 1) as f64, 3),
        CovarianceScenario::NormP40 => (|i| (i + 1) as f64, 4),
        CovarianceScenario::EllpP10 => (|i| (1 + 5 * i) as f64, 1),
        CovarianceScenario::EllpP30 => (|i| (1 + 5 * i) as f64, 3),
        CovarianceScenario::EllpP40 => (|i| (1 + 5 * i) as f64, 4),
    };
    let d = DVector::from_fn(10 * repeat, |i, _| base(i / repeat));
    DMatrix::from_diagonal(&d)
}
