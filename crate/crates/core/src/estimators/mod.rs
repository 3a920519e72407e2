//! Central-subspace estimators.
//!
//! [`psrfr_fit`] is the principal square response forward regression
//! estimator; [`ols_direction`], [`phd_fit`], [`sir_fit`] and [`save_fit`]
//! are baselines. Every estimator returns a [`SubspaceEstimate`] whose basis
//! has orthonormal columns, or an error.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, SdrError};
use crate::numerics::{center_and_covariance, DataMatrix, SpdFactor};

mod ols;
mod phd;
mod psrfr;
mod sliced;

pub use ols::ols_direction;
pub use phd::phd_fit;
pub use psrfr::{psrfr_fit, psrfr_kernel, PsrfrKernel};
pub use sliced::{save_fit, sir_fit, slice_indices};

/// Default slice count for SIR and SAVE.
pub const DEFAULT_SLICES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Psrfr,
    Ols,
    Phd,
    Sir,
    Save,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Psrfr,
        Method::Ols,
        Method::Phd,
        Method::Sir,
        Method::Save,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Psrfr => "psrfr",
            Method::Ols => "ols",
            Method::Phd => "phd",
            Method::Sir => "sir",
            Method::Save => "save",
        }
    }

    pub fn valid_ids() -> String {
        Self::ALL.map(|m| m.as_str()).join(", ")
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = SdrError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == lower)
            .ok_or_else(|| SdrError::UnknownId {
                given: s.to_string(),
                expected: Method::valid_ids(),
            })
    }
}

/// Estimated basis plus the full descending spectrum of the method's
/// kernel matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceEstimate {
    /// p×k, orthonormal columns.
    pub basis: DMatrix<f64>,
    /// Length p, descending.
    pub eigenvalues: DVector<f64>,
    pub method: Method,
    pub k: usize,
}

impl SubspaceEstimate {
    /// λᵢ / Σλ for every eigenvalue.
    pub fn eigenvalue_proportions(&self) -> Vec<f64> {
        let total: f64 = self.eigenvalues.iter().sum();
        self.eigenvalues.iter().map(|v| v / total).collect()
    }
}

/// Fits `method`; `slices` is only read by SIR and SAVE, and OLS always
/// returns a single direction.
pub fn fit(
    method: Method,
    data: &DataMatrix,
    response: &[f64],
    k: usize,
    slices: usize,
) -> Result<SubspaceEstimate> {
    match method {
        Method::Psrfr => psrfr_fit(data, response, k),
        Method::Ols => ols_direction(data, response),
        Method::Phd => phd_fit(data, response, k),
        Method::Sir => sir_fit(data, response, k, slices),
        Method::Save => save_fit(data, response, k, slices),
    }
}

/// Moments and covariance factor shared by the estimators.
pub(crate) struct Prepared {
    pub centered: DMatrix<f64>,
    pub factor: SpdFactor,
}

pub(crate) fn check_inputs(data: &DataMatrix, response: &[f64], k: Option<usize>) -> Result<()> {
    let (n, p) = (data.nrows(), data.ncols());
    if response.len() != n {
        return Err(SdrError::LengthMismatch {
            expected: n,
            got: response.len(),
        });
    }
    if let Some(i) = response.iter().position(|y| !y.is_finite()) {
        return Err(SdrError::NonFinite { row: i, column: p });
    }
    if let Some(k) = k {
        if k == 0 || k > p {
            return Err(SdrError::InvalidDimension { k, p });
        }
    }
    Ok(())
}

/// Requires n > p, then centers and factors S_n.
pub(crate) fn prepare(data: &DataMatrix) -> Result<Prepared> {
    let (n, p) = (data.nrows(), data.ncols());
    if n <= p {
        return Err(SdrError::InsufficientRows {
            needed: p + 1,
            got: n,
        });
    }
    let stats = center_and_covariance(data)?;
    let factor = SpdFactor::new(&stats.covariance)?;
    let centered = data.centered(&stats.mean);
    Ok(Prepared { centered, factor })
}

pub(crate) fn response_is_constant(response: &[f64]) -> bool {
    let (lo, hi, amax) = response.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, 0.0f64),
        |(lo, hi, a), &y| (lo.min(y), hi.max(y), a.max(y.abs())),
    );
    hi - lo <= 1e-12 * amax
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}
