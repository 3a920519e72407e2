//! Sufficient dimension reduction centered on principal square response
//! forward regression (PSRFR).
//!
//! Given predictors X (n×p) and a response Y, PSRFR estimates a basis of
//! the central subspace from the leading eigenvectors of
//! Ẑ = n⁻¹ Σ Z_j Z_jᵀ with Z_j = S_n⁻¹ Y_j (X_j − X̄). The crate also ships
//! OLS, PHD, SIR and SAVE baselines, samplers for elliptical predictor
//! laws, the synthetic benchmark models, a deterministic Monte Carlo
//! harness, and a real-data analysis pipeline.
//!
//! ```
//! use psrfr_core::prelude::*;
//!
//! let dist = presets::normal(CovarianceScenario::NormP10);
//! let x = dist.sample(500, SeededStream::new(7, 0)).unwrap();
//! let noise = sample_noise(500, SeededStream::new(7, 1));
//! let model = default_spec(ModelId::N5, 10).unwrap();
//! let sample = generate(&model, x, &noise).unwrap();
//! let fit = psrfr_fit(&sample.predictors, &sample.response, 2).unwrap();
//! let r = trace_correlation(&model.true_basis, &fit.basis).unwrap();
//! assert!(r > 0.9);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataio;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod metrics;
pub mod models;
pub mod montecarlo;
pub mod numerics;

pub use error::{Result, SdrError};
pub use nalgebra;

pub mod prelude {
    pub use crate::dataio::{
        analyze, load_csv, qq_pairs, standardize, write_qq_csvs, AnalysisOptions, AnalysisReport,
        CsvOptions, Dataset, ImportanceFrame,
    };
    pub use crate::distributions::{
        sample_mixture, sample_noise, sample_normal, sample_power_exponential, sample_student_t,
        DistributionKind, DistributionSpec, SeededStream,
    };
    pub use crate::error::{Result, SdrError};
    pub use crate::estimators::{
        fit, ols_direction, phd_fit, psrfr_fit, psrfr_kernel, save_fit, sir_fit, Method,
        SubspaceEstimate, DEFAULT_SLICES,
    };
    pub use crate::metrics::{direction_cosines, score, trace_correlation, SubspaceScore};
    pub use crate::models::{
        covariance_for, default_spec, generate, CovarianceScenario, LabeledSample, ModelId,
        ModelSpec,
    };
    pub use crate::montecarlo::{
        aggregate, grid, markdown_table, presets, run_experiment, AggregateRow, ExperimentConfig,
        ReplicateRecord, Status,
    };
    pub use crate::numerics::{
        center_and_covariance, gram_schmidt, solve_spd, sym_eig_desc, DataMatrix, EigenPairs,
    };
}
