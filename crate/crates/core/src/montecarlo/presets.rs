//! Named simulation grids.
//!
//! `table1`–`table7` and `table9` are the numbered designs for the methods
//! implemented here. `nonelliptical` (normal/uniform mixture) and `highdim`
//! (p = 30, 40) cover the remaining settings.

use super::ExperimentConfig;
use crate::distributions::{DistributionKind, DistributionSpec};
use crate::error::{Result, SdrError};
use crate::estimators::Method;
use crate::models::{covariance_for, CovarianceScenario, ModelId};

pub const PRESET_NAMES: [&str; 10] = [
    "table1",
    "table2",
    "table3",
    "table4",
    "table5",
    "table6",
    "table7",
    "table9",
    "nonelliptical",
    "highdim",
];

/// Sample sizes used by every preset.
pub const SAMPLE_SIZES: [usize; 3] = [100, 300, 500];

pub fn normal(scenario: CovarianceScenario) -> DistributionSpec {
    DistributionSpec::centered(DistributionKind::Normal, covariance_for(scenario))
}

pub fn student_t(nu: f64, scenario: CovarianceScenario) -> DistributionSpec {
    DistributionSpec::centered(DistributionKind::StudentT { nu }, covariance_for(scenario))
}

pub fn power_exponential(beta: f64, scenario: CovarianceScenario) -> DistributionSpec {
    DistributionSpec::centered(
        DistributionKind::PowerExponential { beta },
        covariance_for(scenario),
    )
}

/// 0.8·N(0, Σ_norm) + 0.2·U(−3, 3)^p.
pub fn mixture(scenario: CovarianceScenario) -> DistributionSpec {
    DistributionSpec::centered(
        DistributionKind::NormalUniformMixture {
            weight: 0.8,
            halfwidth: 3.0,
        },
        covariance_for(scenario),
    )
}

/// t(3), t(2), Cauchy, PE(0.5), PE(5), all with scale Σ_ellp.
pub fn elliptical_family() -> Vec<DistributionSpec> {
    use CovarianceScenario::EllpP10;
    vec![
        student_t(3.0, EllpP10),
        student_t(2.0, EllpP10),
        student_t(1.0, EllpP10),
        power_exponential(0.5, EllpP10),
        power_exponential(5.0, EllpP10),
    ]
}

fn cells(
    models: &[ModelId],
    dists: &[DistributionSpec],
    methods: &[Method],
    replicates: usize,
    seed: u64,
) -> Result<Vec<ExperimentConfig>> {
    let mut out = Vec::new();
    for &model in models {
        for dist in dists {
            for n in SAMPLE_SIZES {
                out.push(ExperimentConfig::new(
                    model,
                    dist.clone(),
                    n,
                    methods.to_vec(),
                    replicates,
                    seed,
                )?);
            }
        }
    }
    Ok(out)
}

/// Configs for a named preset.
pub fn preset(name: &str, replicates: usize, seed: u64) -> Result<Vec<ExperimentConfig>> {
    use CovarianceScenario::*;
    use Method::*;
    use ModelId::*;
    let all = [Psrfr, Phd, Sir, Save];
    match name {
        "table1" => cells(
            &[N1, N2],
            &[normal(NormP10)],
            &[Psrfr, Phd],
            replicates,
            seed,
        ),
        "table2" => cells(&[N3, N4, N5], &[normal(NormP10)], &all, replicates, seed),
        "table3" => cells(&[Nn1], &elliptical_family(), &all, replicates, seed),
        "table4" => cells(&[Nn2], &elliptical_family(), &all, replicates, seed),
        "table5" => cells(&[Nn3], &elliptical_family(), &all, replicates, seed),
        "table6" => cells(&[Nn4], &elliptical_family(), &all, replicates, seed),
        "table7" => cells(
            &[Nn1, Nn4],
            &[normal(NormP10), student_t(3.0, EllpP10)],
            &[Psrfr],
            replicates,
            seed,
        ),
        "table9" => {
            let mut out = Vec::new();
            for sigma in [2.0, 4.0] {
                out.extend(
                    cells(&[Gb4], &[normal(NormP10)], &all, replicates, seed)?
                        .into_iter()
                        .map(|c| c.with_sigma(sigma)),
                );
            }
            Ok(out)
        }
        "nonelliptical" => cells(
            &[Ne1, Ne2, Ne3],
            &[mixture(NormP10)],
            &[Psrfr],
            replicates,
            seed,
        ),
        "highdim" => {
            let mut out = Vec::new();
            for (norm, ellp) in [(NormP30, EllpP30), (NormP40, EllpP40)] {
                out.extend(cells(
                    &[N4],
                    &[normal(norm)],
                    &[Psrfr, Sir],
                    replicates,
                    seed,
                )?);
                out.extend(cells(
                    &[Nn3],
                    &[student_t(1.0, ellp)],
                    &[Psrfr, Sir],
                    replicates,
                    seed,
                )?);
            }
            Ok(out)
        }
        other => Err(SdrError::UnknownId {
            given: other.to_string(),
            expected: PRESET_NAMES.join(", "),
        }),
    }
}
