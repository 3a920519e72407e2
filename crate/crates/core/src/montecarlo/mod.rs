//! Deterministic, parallel replication of simulation experiments.
//!
//! Replicate `r` draws its predictors from stream `2r` and its noise from
//! stream `2r + 1` of the configuration's base seed, so each replicate is
//! a pure function of `(config, r)` and results do not depend on how
//! replicates are scheduled across threads.

use rayon::prelude::*;

use crate::distributions::{sample_noise, DistributionSpec, SeededStream};
use crate::error::{Result, SdrError};
use crate::estimators::{fit, Method, DEFAULT_SLICES};
use crate::metrics::score;
use crate::models::{default_spec, generate, ModelId, ModelSpec};

mod output;
pub mod presets;

pub use output::{
    grid, markdown_table, write_aggregate_csv, write_replicate_csv, AGGREGATE_HEADER,
    REPLICATE_HEADER,
};

/// One cell of a simulation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model_id: ModelId,
    pub distribution: DistributionSpec,
    pub n: usize,
    pub p: usize,
    pub k: usize,
    pub methods: Vec<Method>,
    pub slices: usize,
    pub replicates: usize,
    pub base_seed: u64,
    pub sigma_noise: f64,
}

impl ExperimentConfig {
    /// Config with the model's canonical noise scale and structural
    /// dimension, [`DEFAULT_SLICES`] slices, and p taken from the
    /// distribution.
    pub fn new(
        model_id: ModelId,
        distribution: DistributionSpec,
        n: usize,
        methods: Vec<Method>,
        replicates: usize,
        base_seed: u64,
    ) -> Result<Self> {
        let p = distribution.dim();
        let spec = default_spec(model_id, p)?;
        Ok(ExperimentConfig {
            model_id,
            distribution,
            n,
            p,
            k: spec.k(),
            methods,
            slices: DEFAULT_SLICES,
            replicates,
            base_seed,
            sigma_noise: spec.sigma_noise,
        })
    }

    pub fn with_sigma(mut self, sigma_noise: f64) -> Self {
        self.sigma_noise = sigma_noise;
        self
    }

    /// The model with this config's noise scale.
    pub fn model_spec(&self) -> Result<ModelSpec> {
        Ok(default_spec(self.model_id, self.p)?.with_sigma(self.sigma_noise))
    }

    pub fn validate(&self) -> Result<ModelSpec> {
        let invalid = |m: String| Err(SdrError::ConfigInvalid(m));
        if self.replicates == 0 {
            return invalid("replicates must be at least 1".into());
        }
        if self.methods.is_empty() {
            return invalid("no methods selected".into());
        }
        if self.n <= self.p {
            return invalid(format!("need n > p, got n = {} and p = {}", self.n, self.p));
        }
        if self.distribution.dim() != self.p {
            return invalid(format!(
                "distribution has dimension {}, config has p = {}",
                self.distribution.dim(),
                self.p
            ));
        }
        if !(self.sigma_noise >= 0.0 && self.sigma_noise.is_finite()) {
            return invalid(format!(
                "noise scale must be nonnegative, got {}",
                self.sigma_noise
            ));
        }
        let spec = self
            .model_spec()
            .map_err(|e| SdrError::ConfigInvalid(e.to_string()))?;
        if self.k != spec.k() {
            return invalid(format!(
                "model {} has structural dimension {}, config asks for k = {}",
                self.model_id,
                spec.k(),
                self.k
            ));
        }
        if self.methods.contains(&Method::Ols) && self.k != 1 {
            return invalid("ols estimates a single direction and needs k = 1".into());
        }
        if self
            .methods
            .iter()
            .any(|m| matches!(m, Method::Sir | Method::Save))
            && (self.slices == 0 || self.n < 2 * self.slices)
        {
            return invalid(format!(
                "{} slices need n ≥ {}",
                self.slices,
                2 * self.slices
            ));
        }
        self.distribution
            .validate()
            .map_err(|e| SdrError::ConfigInvalid(e.to_string()))?;
        Ok(spec)
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            model: self.model_id,
            dist: self.distribution.kind.id(),
            nu: self.distribution.kind.nu(),
            beta: self.distribution.kind.beta(),
            n: self.n,
            p: self.p,
            k: self.k,
        }
    }
}

/// Identifying columns repeated on every output row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfigEcho {
    pub model: ModelId,
    pub dist: &'static str,
    pub nu: Option<f64>,
    pub beta: Option<f64>,
    pub n: usize,
    pub p: usize,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed(&'static str),
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Failed(code) => code,
        }
    }
}

/// Score of one method on one replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRecord {
    pub replicate: usize,
    pub method: Method,
    pub status: Status,
    pub trace_correlation: Option<f64>,
    pub cos1: Option<f64>,
    pub cos2: Option<f64>,
}

impl ReplicateRecord {
    fn failed(replicate: usize, method: Method, err: &SdrError) -> Self {
        ReplicateRecord {
            replicate,
            method,
            status: Status::Failed(err.code()),
            trace_correlation: None,
            cos1: None,
            cos2: None,
        }
    }
}

/// Runs every method on one replicate's data.
pub fn run_replicate(
    config: &ExperimentConfig,
    spec: &ModelSpec,
    r: usize,
) -> Vec<ReplicateRecord> {
    let data = config
        .distribution
        .sample(config.n, SeededStream::new(config.base_seed, 2 * r as u64))
        .and_then(|x| {
            let noise = sample_noise(
                config.n,
                SeededStream::new(config.base_seed, 2 * r as u64 + 1),
            );
            generate(spec, x, &noise)
        });
    let sample = match data {
        Ok(s) => s,
        Err(e) => {
            return config
                .methods
                .iter()
                .map(|&m| ReplicateRecord::failed(r, m, &e))
                .collect()
        }
    };
    config
        .methods
        .iter()
        .map(|&method| {
            let scored = fit(
                method,
                &sample.predictors,
                &sample.response,
                config.k,
                config.slices,
            )
            .and_then(|est| score(&spec.true_basis, &est.basis));
            match scored {
                Ok(s) => ReplicateRecord {
                    replicate: r,
                    method,
                    status: Status::Ok,
                    trace_correlation: Some(s.trace_correlation),
                    cos1: s.cosines.map(|c| c.0),
                    cos2: s.cosines.map(|c| c.1),
                },
                Err(e) => ReplicateRecord::failed(r, method, &e),
            }
        })
        .collect()
}

/// All replicates of `config`, ordered by (replicate, method position).
///
/// Estimator failures are recorded per replicate; only an invalid config
/// is an error. Runs on the current rayon pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ReplicateRecord>> {
    let spec = config.validate()?;
    let per_rep: Vec<Vec<ReplicateRecord>> = (0..config.replicates)
        .into_par_iter()
        .map(|r| run_replicate(config, &spec, r))
        .collect();
    Ok(per_rep.into_iter().flatten().collect())
}

/// Mean and sample SD of one score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

fn mean_sd(values: &[f64]) -> Option<MeanSd> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Some(MeanSd { mean, sd })
}

/// Per-method summary over successful replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodAggregate {
    pub method: Method,
    pub n_ok: usize,
    pub n_failed: usize,
    pub r: Option<MeanSd>,
    pub cos1: Option<MeanSd>,
    pub cos2: Option<MeanSd>,
}

/// Groups records by method (first-appearance order) and summarizes the
/// successful ones; SDs use the (count − 1) divisor and are 0 for a single
/// success.
pub fn aggregate(records: &[ReplicateRecord]) -> Vec<MethodAggregate> {
    let mut methods: Vec<Method> = Vec::new();
    for rec in records {
        if !methods.contains(&rec.method) {
            methods.push(rec.method);
        }
    }
    methods
        .into_iter()
        .map(|method| {
            let mine: Vec<&ReplicateRecord> =
                records.iter().filter(|r| r.method == method).collect();
            let ok: Vec<&&ReplicateRecord> =
                mine.iter().filter(|r| r.status == Status::Ok).collect();
            let collect = |f: fn(&ReplicateRecord) -> Option<f64>| -> Vec<f64> {
                ok.iter().filter_map(|r| f(r)).collect()
            };
            MethodAggregate {
                method,
                n_ok: ok.len(),
                n_failed: mine.len() - ok.len(),
                r: mean_sd(&collect(|r| r.trace_correlation)),
                cos1: mean_sd(&collect(|r| r.cos1)),
                cos2: mean_sd(&collect(|r| r.cos2)),
            }
        })
        .collect()
}

/// An aggregate summary together with the config it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub echo: ConfigEcho,
    pub stats: MethodAggregate,
}

/// Runs a config and aggregates it in one step.
pub fn run_and_aggregate(
    config: &ExperimentConfig,
) -> Result<(Vec<ReplicateRecord>, Vec<AggregateRow>)> {
    let records = run_experiment(config)?;
    let echo = config.echo();
    let rows = aggregate(&records)
        .into_iter()
        .map(|stats| AggregateRow { echo, stats })
        .collect();
    Ok((records, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DistributionKind;
    use crate::models::{covariance_for, CovarianceScenario};

    fn rec(method: Method, r: Option<f64>) -> ReplicateRecord {
        ReplicateRecord {
            replicate: 0,
            method,
            status: if r.is_some() {
                Status::Ok
            } else {
                Status::Failed("IllConditioned")
            },
            trace_correlation: r,
            cos1: None,
            cos2: None,
        }
    }

    #[test]
    fn two_point_aggregate() {
        let agg = aggregate(&[rec(Method::Psrfr, Some(0.9)), rec(Method::Psrfr, Some(1.0))]);
        let r = agg[0].r.unwrap();
        assert!((r.mean - 0.95).abs() < 1e-15);
        assert!((r.sd - 0.5f64.sqrt() * 0.1).abs() < 1e-15);
        assert_eq!(agg[0].n_ok, 2);
    }

    #[test]
    fn single_and_failed_aggregates() {
        let agg = aggregate(&[rec(Method::Sir, Some(0.4))]);
        assert_eq!(agg[0].r, Some(MeanSd { mean: 0.4, sd: 0.0 }));
        assert_eq!(agg[0].n_ok, 1);

        let agg = aggregate(&[rec(Method::Save, None), rec(Method::Save, None)]);
        assert_eq!(agg[0].n_ok, 0);
        assert_eq!(agg[0].n_failed, 2);
        assert!(agg[0].r.is_none());
        assert!(aggregate(&[]).is_empty());
    }

    #[test]
    fn invalid_configs() {
        let dist = DistributionSpec::centered(
            DistributionKind::Normal,
            covariance_for(CovarianceScenario::NormP10),
        );
        let base = ExperimentConfig::new(ModelId::N1, dist, 50, vec![Method::Psrfr], 2, 1).unwrap();
        let check =
            |c: ExperimentConfig| matches!(run_experiment(&c), Err(SdrError::ConfigInvalid(_)));
        assert!(check(ExperimentConfig {
            replicates: 0,
            ..base.clone()
        }));
        assert!(check(ExperimentConfig {
            methods: vec![],
            ..base.clone()
        }));
        assert!(check(ExperimentConfig {
            n: 10,
            ..base.clone()
        }));
        assert!(check(ExperimentConfig {
            k: 3,
            ..base.clone()
        }));
        assert!(check(ExperimentConfig {
            methods: vec![Method::Ols],
            ..base.clone()
        }));
        assert!(check(ExperimentConfig {
            methods: vec![Method::Sir],
            slices: 30,
            ..base.clone()
        }));
        assert!(check(base.clone().with_sigma(-1.0)));
        assert!(run_experiment(&base).is_ok());
    }
}
