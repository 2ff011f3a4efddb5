//! Reproducible variance-reduction experiments: Monte Carlo integration on
//! the Wang-Sloan family, CLT checks for generalized Latin hypercube
//! averages, antithetically coupled MCMC, and sampling-time studies.

mod clt;
mod integrate;
mod probit;
mod pumps;
mod timing;

pub use clt::{clt_check, CltBase, CltIntegrand, CltRow};
pub use integrate::{mc_integrate, IntegrationConfig, IntegrationRow, Integrand, Scheme};
pub use probit::{probit_gibbs, synthetic_probit_csv, ProbitData};
pub use pumps::{pumps_mwg, PumpsData};
pub use timing::{construction_by_name, sampling_time_study, TimingRow};

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Configuration shared by the MCMC experiments.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McmcConfig {
    /// CSV input; `None` uses the built-in synthetic generator (probit only).
    pub data_path: Option<PathBuf>,
    /// Coupling width: number of chains sharing each antithetic vector.
    pub d: usize,
    pub iterations: usize,
    pub burn_in: usize,
    pub replications: usize,
    /// Couple the Metropolis accept/reject uniforms too (pumps only).
    pub antithetic_acceptance: bool,
    pub seed: u64,
}

impl McmcConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if self.d < 2 {
            return Err(crate::Error::BadConstruction(
                "coupling width d must be at least 2".into(),
            ));
        }
        if self.iterations <= self.burn_in {
            return Err(crate::Error::BadConstruction(
                "iterations must exceed burn-in".into(),
            ));
        }
        Ok(())
    }
}

/// Per-parameter asymptotic-variance ratios (antithetic / iid) with the
/// replication spread, plus the posterior means needed to check that
/// coupling does not bias the chains.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VarianceRatioResult {
    pub parameters: Vec<String>,
    pub ratio_mean: Vec<f64>,
    pub ratio_min: Vec<f64>,
    pub ratio_max: Vec<f64>,
    /// Across-replication mean of one coupled chain's posterior means.
    pub coupled_mean: Vec<f64>,
    pub coupled_se: Vec<f64>,
    /// Across-replication mean of one iid chain's posterior means.
    pub iid_mean: Vec<f64>,
    pub iid_se: Vec<f64>,
    pub replications: usize,
}

impl VarianceRatioResult {
    pub(crate) fn from_replications(
        parameters: Vec<String>,
        // per replication: (ratios, coupled chain-0 means, iid chain-0 means)
        rows: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)>,
    ) -> Self {
        let n_par = parameters.len();
        let reps = rows.len();
        let mut ratio_mean = vec![0.0; n_par];
        let mut ratio_min = vec![f64::INFINITY; n_par];
        let mut ratio_max = vec![f64::NEG_INFINITY; n_par];
        let mut coupled = vec![Vec::with_capacity(reps); n_par];
        let mut iid = vec![Vec::with_capacity(reps); n_par];
        for (ratios, c_means, i_means) in &rows {
            for j in 0..n_par {
                ratio_mean[j] += ratios[j] / reps as f64;
                ratio_min[j] = ratio_min[j].min(ratios[j]);
                ratio_max[j] = ratio_max[j].max(ratios[j]);
                coupled[j].push(c_means[j]);
                iid[j].push(i_means[j]);
            }
        }
        let se = |xs: &[f64]| (crate::stats::sample_variance(xs) / xs.len() as f64).sqrt();
        VarianceRatioResult {
            parameters,
            ratio_mean,
            ratio_min,
            ratio_max,
            coupled_mean: coupled.iter().map(|xs| crate::stats::mean(xs)).collect(),
            coupled_se: coupled.iter().map(|xs| se(xs)).collect(),
            iid_mean: iid.iter().map(|xs| crate::stats::mean(xs)).collect(),
            iid_se: iid.iter().map(|xs| se(xs)).collect(),
            replications: reps,
        }
    }
}

/// The antithetic coupling vehicle for `d` chains: the exchangeable
/// circulant construction on `C_d({1})`, sampled through the random-balanced
/// form because it is the fastest route.
pub(crate) fn coupling_uniforms(
    d: usize,
    antithetic: bool,
    rng: &mut rand_chacha::ChaCha8Rng,
    out: &mut [f64],
) {
    use rand::Rng;
    if !antithetic {
        for x in out.iter_mut() {
            *x = rng.random();
        }
        return;
    }
    let z1 = 2.0 * rng.random::<f64>() - 1.0;
    let slope = 1.0 / (2.0 * (d as f64 - 1.0));
    out[0] = (z1 + 1.0) / 2.0;
    for l in 2..=d {
        out[l - 1] = (2.0 * l as f64 - 3.0 - z1) * slope;
    }
    for i in (1..d).rev() {
        let j = rng.random_range(0..=i);
        out.swap(i, j);
    }
}
