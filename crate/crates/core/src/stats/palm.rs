use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::pointprocess::{MarkDistribution, Window};
use crate::solver::Model;

use super::estimate::{ratio_estimate, Estimate};
use super::realization::{sample_and_solve, RealizationTally};
use super::StatsError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub model: Model,
    pub lambda: f64,
    pub window: Window,
    /// Guard width for minus sampling.
    pub margin: f64,
    pub replications: usize,
    /// Replication `r` uses seed `base_seed + r`.
    pub base_seed: u64,
    #[serde(default)]
    pub marks: MarkDistribution,
}

impl McConfig {
    pub fn validate(&self) -> Result<(), StatsError> {
        self.window.validate()?;
        self.marks.validate()?;
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(StatsError::InvalidConfig(format!("intensity {}", self.lambda)));
        }
        if self.replications == 0 {
            return Err(StatsError::InvalidConfig("at least one replication is required".into()));
        }
        let room = match self.window {
            Window::Rectangle { xmin, ymin, xmax, ymax } => 0.5 * (xmax - xmin).min(ymax - ymin),
            Window::Disk { radius, .. } => radius,
        };
        if !(self.margin >= 0.0 && self.margin < room) {
            return Err(StatsError::InvalidConfig(format!(
                "margin {} leaves no inner region (limit {room})",
                self.margin
            )));
        }
        Ok(())
    }
}

/// Hex SHA-256 of any serializable configuration.
pub fn config_hash<C: Serialize>(config: &C) -> String {
    let bytes = serde_json::to_vec(config).expect("configurations serialize");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PalmEstimates {
    pub model: Model,
    pub replications: usize,
    pub aborted: usize,
    /// Realizations where most inner germs failed certification.
    pub flagged: usize,
    /// Mean number of touching neighbours.
    pub nu: Estimate,
    /// Fraction of germs in a doublet (Model 2) or on any cycle (Model 1).
    pub varpi: Estimate,
    /// Model 1: fraction of germs on cycles of each length.
    pub varpi_by_length: BTreeMap<usize, Estimate>,
    /// Mean size of finite clusters, counted once each by their lexicographic minimum.
    pub mu_direct: Estimate,
    /// Fraction of inner germs whose cluster has no infinite segment.
    pub p_finite: Estimate,
    /// Realizations where a neighbour-count identity failed.
    pub identity_failures: usize,
    pub identity_segments: usize,
    pub mass_transport_lhs: usize,
    pub mass_transport_rhs: usize,
    /// Fraction of all sampled germs with an infinite radius in their window.
    pub infinite_fraction: f64,
    pub germs: usize,
}

impl PalmEstimates {
    /// `sqrt(se_ν² + se_ϖ²)`, if both are defined.
    pub fn pooled_stderr(&self) -> Option<f64> {
        Some(self.nu.stderr?.hypot(self.varpi.stderr?))
    }
}

/// Samples, solves and analyses each replication in parallel, then reduces
/// in replication order so the result does not depend on scheduling.
pub fn run_monte_carlo(config: &McConfig) -> Result<PalmEstimates, StatsError> {
    config.validate()?;
    let results: Vec<Result<RealizationTally, StatsError>> = (0..config.replications)
        .into_par_iter()
        .map(|r| {
            let seed = config.base_seed.wrapping_add(r as u64);
            let sample = sample_and_solve(config.lambda, &config.window, seed, config.model, &config.marks)?;
            Ok(RealizationTally::new(&sample, &config.window, config.margin))
        })
        .collect();

    let mut tallies = Vec::with_capacity(results.len());
    let mut aborted = 0;
    for (r, res) in results.into_iter().enumerate() {
        match res {
            Ok(t) => tallies.push(t),
            Err(e) if e.is_internal() => return Err(e),
            Err(e) => {
                log::warn!("replication {r} aborted: {e}");
                aborted += 1;
            }
        }
    }
    if aborted * 100 > config.replications {
        return Err(StatsError::TooManyAborted {
            aborted,
            total: config.replications,
        });
    }
    Ok(reduce(config.model, config.replications, aborted, &tallies))
}

fn reduce(model: Model, replications: usize, aborted: usize, tallies: &[RealizationTally]) -> PalmEstimates {
    let per = |f: &dyn Fn(&RealizationTally) -> (usize, usize)| -> Estimate {
        let batches: Vec<(f64, f64)> = tallies
            .iter()
            .map(|t| {
                let (a, b) = f(t);
                (a as f64, b as f64)
            })
            .collect();
        ratio_estimate(&batches)
    };
    let nu = per(&|t| (t.nu_sum, t.certified));
    let varpi = match model {
        Model::Model1 => per(&|t| (t.cycle_germs.values().sum(), t.certified)),
        Model::Model2 => per(&|t| (t.doublet_germs, t.certified)),
    };
    let lengths: BTreeSet<usize> = tallies.iter().flat_map(|t| t.cycle_germs.keys().copied()).collect();
    let varpi_by_length = lengths
        .into_iter()
        .map(|len| {
            let e = per(&|t| (t.cycle_germs.get(&len).copied().unwrap_or(0), t.certified));
            (len, e)
        })
        .collect();
    let germs: usize = tallies.iter().map(|t| t.germs).sum();
    let infinite: usize = tallies.iter().map(|t| t.infinite_segments).sum();
    PalmEstimates {
        model,
        replications,
        aborted,
        flagged: tallies.iter().filter(|t| t.flagged).count(),
        nu,
        varpi,
        varpi_by_length,
        mu_direct: per(&|t| (t.cluster_members, t.clusters)),
        p_finite: per(&|t| (t.inner_in_finite_cluster, t.inner)),
        identity_failures: tallies.iter().filter(|t| !t.identity.holds()).count(),
        identity_segments: tallies.iter().map(|t| t.identity.segments).sum(),
        mass_transport_lhs: tallies.iter().map(|t| t.mass_transport.lhs).sum(),
        mass_transport_rhs: tallies.iter().map(|t| t.mass_transport.rhs).sum(),
        infinite_fraction: if germs > 0 { infinite as f64 / germs as f64 } else { 0.0 },
        germs,
    }
}

/// Mean finite-cluster size measured directly and through the cycle or
/// doublet fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuConsistency {
    pub direct: Estimate,
    /// `2 / ϖ` (Model 2) or `p_finite / Σ_r ϖ_r / r` (Model 1).
    pub formula: Option<f64>,
    pub relative_discrepancy: Option<f64>,
    /// The formula's denominator estimate was zero.
    pub division_by_zero: bool,
}

pub fn estimate_mu_consistency(est: &PalmEstimates) -> MuConsistency {
    let denominator = match est.model {
        Model::Model2 => est.varpi.value / 2.0,
        Model::Model1 => est
            .varpi_by_length
            .iter()
            .map(|(&len, e)| e.value / len as f64)
            .sum::<f64>(),
    };
    let numerator = match est.model {
        Model::Model2 => 1.0,
        Model::Model1 => est.p_finite.value,
    };
    let division_by_zero = !(denominator > 0.0);
    let formula = (!division_by_zero).then(|| numerator / denominator);
    let relative_discrepancy = formula
        .filter(|_| est.mu_direct.is_defined())
        .map(|f| (est.mu_direct.value - f).abs() / f);
    MuConsistency {
        direct: est.mu_direct,
        formula,
        relative_discrepancy,
        division_by_zero,
    }
}
