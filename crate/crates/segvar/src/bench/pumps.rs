//! Metropolis-within-Gibbs for the hierarchical Poisson pump-failure model,
//! with antithetic coupling of every uniform (optionally including the
//! Metropolis acceptance draws).

use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use super::{coupling_uniforms, McmcConfig, VarianceRatioResult};
use crate::error::{Error, Result};
use crate::sampling::stream_rng;
use crate::stats;

/// Failure counts `s` and operation times `t`.
#[derive(Debug, Clone)]
pub struct PumpsData {
    pub s: Vec<f64>,
    pub t: Vec<f64>,
}

impl PumpsData {
    pub fn from_csv_text(text: &str) -> Result<PumpsData> {
        let mut s = Vec::new();
        let mut t = Vec::new();
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        for record in reader.records() {
            let record = record?;
            if record.len() < 2 {
                return Err(Error::BadData("pumps data needs columns s,t".into()));
            }
            let parse = |i: usize| -> Result<f64> {
                record[i]
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::BadData(format!("pumps data: {e}")))
            };
            s.push(parse(0)?);
            t.push(parse(1)?);
        }
        if s.is_empty() {
            return Err(Error::BadData("pumps data file is empty".into()));
        }
        Ok(PumpsData { s, t })
    }

    pub fn load(path: &std::path::Path) -> Result<PumpsData> {
        Self::from_csv_text(&std::fs::read_to_string(path)?)
    }
}

/// Random-walk proposal scale for the alpha step.
const PROPOSAL_SD: f64 = 0.7;

/// Run the coupled-vs-iid pumps benchmark; parameters are `alpha` and
/// `beta`.
pub fn pumps_mwg(config: &McmcConfig) -> Result<VarianceRatioResult> {
    config.validate()?;
    let path = config
        .data_path
        .as_ref()
        .ok_or_else(|| Error::BadData("pumps experiment needs a data CSV".into()))?;
    let data = PumpsData::load(path)?;
    let rows: Vec<_> = (0..config.replications)
        .into_par_iter()
        .map(|rep| {
            let (anti_var, anti_mean) = run_group(&data, config, true, rep as u64);
            let (iid_var, iid_mean) = run_group(&data, config, false, rep as u64);
            let ratios: Vec<f64> = anti_var
                .iter()
                .zip(&iid_var)
                .map(|(a, b)| a / b)
                .collect();
            (ratios, anti_mean, iid_mean)
        })
        .collect();
    Ok(VarianceRatioResult::from_replications(
        vec!["alpha".into(), "beta".into()],
        rows,
    ))
}

fn log_alpha_posterior(alpha: f64, n: usize, log_beta: f64, sum_log_lambda: f64) -> f64 {
    if alpha <= 0.0 {
        return f64::NEG_INFINITY;
    }
    alpha * (n as f64 * log_beta + sum_log_lambda - 1.0) - n as f64 * ln_gamma(alpha)
}

fn run_group(
    data: &PumpsData,
    config: &McmcConfig,
    antithetic: bool,
    rep: u64,
) -> (Vec<f64>, Vec<f64>) {
    let d = config.d;
    let n = data.s.len();
    let mut rng = stream_rng(config.seed, 2 * rep + antithetic as u64);
    let init: Vec<f64> = (0..n).map(|k| (data.s[k] + 0.5) / (data.t[k] + 0.5)).collect();
    let mut lambda = vec![init; d];
    let mut alpha = vec![1.0f64; d];
    let mut beta = vec![1.0f64; d];
    let mut u = vec![0.0; d];
    let kept = config.iterations - config.burn_in;
    let mut pooled_alpha = Vec::with_capacity(kept);
    let mut pooled_beta = Vec::with_capacity(kept);
    let mut chain0 = [0.0f64; 2];
    let clamp = |x: f64| x.clamp(1e-12, 1.0 - 1e-12);
    for it in 0..config.iterations {
        // Gibbs for each failure rate.
        for (k, (&s, &t)) in data.s.iter().zip(&data.t).enumerate() {
            coupling_uniforms(d, antithetic, &mut rng, &mut u);
            for c in 0..d {
                lambda[c][k] = stats::gamma_inv_cdf(alpha[c] + s, beta[c] + t, clamp(u[c]));
            }
        }
        // Gibbs for beta (conjugate gamma).
        coupling_uniforms(d, antithetic, &mut rng, &mut u);
        for c in 0..d {
            let sum_lambda: f64 = lambda[c].iter().sum();
            beta[c] = stats::gamma_inv_cdf(
                0.1 + n as f64 * alpha[c],
                1.0 + sum_lambda,
                clamp(u[c]),
            );
        }
        // Random-walk Metropolis for alpha; the proposal normals are always
        // coupled, the acceptance uniforms only in the coupled-acceptance
        // mode.
        coupling_uniforms(d, antithetic, &mut rng, &mut u);
        let mut proposal = vec![0.0; d];
        for c in 0..d {
            proposal[c] = alpha[c] + PROPOSAL_SD * stats::normal_inv_cdf(clamp(u[c]));
        }
        coupling_uniforms(
            d,
            antithetic && config.antithetic_acceptance,
            &mut rng,
            &mut u,
        );
        for c in 0..d {
            let sum_log_lambda: f64 = lambda[c].iter().map(|l| l.ln()).sum();
            let current = log_alpha_posterior(alpha[c], n, beta[c].ln(), sum_log_lambda);
            let candidate = log_alpha_posterior(proposal[c], n, beta[c].ln(), sum_log_lambda);
            if clamp(u[c]).ln() < candidate - current {
                alpha[c] = proposal[c];
            }
        }
        if it >= config.burn_in {
            pooled_alpha.push(alpha.iter().sum::<f64>() / d as f64);
            pooled_beta.push(beta.iter().sum::<f64>() / d as f64);
            chain0[0] += alpha[0] / kept as f64;
            chain0[1] += beta[0] / kept as f64;
        }
    }
    (
        vec![
            stats::batch_means_asymptotic_variance(&pooled_alpha),
            stats::batch_means_asymptotic_variance(&pooled_beta),
        ],
        chain0.to_vec(),
    )
}
