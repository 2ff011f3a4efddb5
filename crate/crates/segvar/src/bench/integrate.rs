//! Monte Carlo integration study on the Wang-Sloan two-parameter family.

use std::path::PathBuf;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{random_permutation, stream_rng};
use crate::stats;

/// `f(x) = prod_i (1 + a tau^i (x_i - 1/2))`; integrates to 1 over the
/// hypercube. `a` mostly moves the truncation dimension, `tau` the
/// superposition dimension.
pub fn wang_sloan(x: &[f64], a: f64, tau: f64) -> f64 {
    let mut prod = 1.0;
    let mut weight = 1.0;
    for &xi in x {
        weight *= tau;
        prod *= 1.0 + a * weight * (xi - 0.5);
    }
    prod
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrand {
    WangSloan,
    /// `f(x) = x_1 x_2` on the first two coordinates (integral 1/4).
    Product2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Independent points.
    McIid,
    /// Each coordinate of the point set is one exchangeable circulant
    /// antithetic vector of dimension n, passed through one Latin hypercube
    /// iteration; coordinates are independent of one another.
    GlhCcv,
    /// Deterministic points from a CSV file (one point per row), evaluated
    /// once.
    ExternalPointFile(PathBuf),
}

impl Scheme {
    pub fn label(&self) -> String {
        match self {
            Scheme::McIid => "mc-iid".into(),
            Scheme::GlhCcv => "glh-ccv".into(),
            Scheme::ExternalPointFile(p) => format!("points:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntegrationConfig {
    pub integrand: Integrand,
    pub a: f64,
    pub tau: f64,
    /// Ambient dimension of the integrand.
    pub p: usize,
    /// Points per estimate, one study row per entry.
    pub points: Vec<usize>,
    pub replications: usize,
    pub schemes: Vec<Scheme>,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntegrationRow {
    pub scheme: String,
    pub n_points: usize,
    pub mse: f64,
    pub mse_se: f64,
    pub mean_time_s: f64,
}

/// Exact integral of the configured integrand.
pub fn exact_integral(config: &IntegrationConfig) -> f64 {
    match config.integrand {
        Integrand::WangSloan => 1.0,
        Integrand::Product2 => 0.25,
    }
}

fn evaluate(config: &IntegrationConfig, x: &[f64]) -> f64 {
    match config.integrand {
        Integrand::WangSloan => wang_sloan(x, config.a, config.tau),
        Integrand::Product2 => x[0] * x[1],
    }
}

/// Run the study: for each scheme and point count, the mean squared error of
/// the integral estimate over the replications, against the known value.
pub fn mc_integrate(config: &IntegrationConfig) -> Result<Vec<IntegrationRow>> {
    if config.p == 0 || config.replications < 2 {
        return Err(Error::BadConstruction(
            "integration study needs p >= 1 and at least 2 replications".into(),
        ));
    }
    if config.integrand == Integrand::Product2 && config.p < 2 {
        return Err(Error::BadConstruction("product2 needs p >= 2".into()));
    }
    let exact = exact_integral(config);
    let mut rows = Vec::new();
    for scheme in &config.schemes {
        if let Scheme::ExternalPointFile(path) = scheme {
            rows.push(external_row(config, path, exact)?);
            continue;
        }
        for &n in &config.points {
            let start = Instant::now();
            let sq_errors: Vec<f64> = (0..config.replications)
                .into_par_iter()
                .map(|rep| {
                    let mut rng = stream_rng(config.seed, rep as u64);
                    let est = match scheme {
                        Scheme::McIid => {
                            let mut acc = 0.0;
                            let mut x = vec![0.0; config.p];
                            for _ in 0..n {
                                for xi in x.iter_mut() {
                                    *xi = rng.random();
                                }
                                acc += evaluate(config, &x);
                            }
                            acc / n as f64
                        }
                        Scheme::GlhCcv => {
                            // Column-major point set: one antithetic
                            // n-vector per coordinate.
                            let mut cols = vec![0.0; config.p * n];
                            for i in 0..config.p {
                                let col = &mut cols[i * n..(i + 1) * n];
                                super::coupling_uniforms(n, true, &mut rng, col);
                                let perm = random_permutation(n, &mut rng);
                                for (x, &pi) in col.iter_mut().zip(&perm) {
                                    *x = (pi as f64 + *x) / n as f64;
                                }
                            }
                            let mut acc = 0.0;
                            let mut x = vec![0.0; config.p];
                            for j in 0..n {
                                for i in 0..config.p {
                                    x[i] = cols[i * n + j];
                                }
                                acc += evaluate(config, &x);
                            }
                            acc / n as f64
                        }
                        Scheme::ExternalPointFile(_) => unreachable!(),
                    };
                    (est - exact) * (est - exact)
                })
                .collect();
            let elapsed = start.elapsed().as_secs_f64();
            rows.push(IntegrationRow {
                scheme: scheme.label(),
                n_points: n,
                mse: stats::mean(&sq_errors),
                mse_se: (stats::sample_variance(&sq_errors) / sq_errors.len() as f64).sqrt(),
                mean_time_s: elapsed / config.replications as f64,
            });
        }
    }
    Ok(rows)
}

fn external_row(config: &IntegrationConfig, path: &PathBuf, exact: f64) -> Result<IntegrationRow> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .from_path(path)?;
    let mut n = 0usize;
    let mut acc = 0.0;
    let start = Instant::now();
    for record in reader.records() {
        let record = record?;
        let x: Vec<f64> = record
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::BadData(format!("point file {}: {e}", path.display())))?;
        if x.len() < config.p {
            return Err(Error::BadData(format!(
                "point file rows have {} coordinates, need {}",
                x.len(),
                config.p
            )));
        }
        acc += evaluate(config, &x[..config.p]);
        n += 1;
    }
    if n == 0 {
        return Err(Error::BadData("point file is empty".into()));
    }
    let est = acc / n as f64;
    Ok(IntegrationRow {
        scheme: Scheme::ExternalPointFile(path.clone()).label(),
        n_points: n,
        mse: (est - exact) * (est - exact),
        mse_se: 0.0,
        mean_time_s: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wang_sloan_values() {
        let half = vec![0.5; 7];
        assert_eq!(wang_sloan(&half, 3.0, 0.9), 1.0);
        // p=2, a=1, tau=1 at (1,1): (1 + 1/2)^2
        assert!((wang_sloan(&[1.0, 1.0], 1.0, 1.0) - 2.25).abs() < 1e-15);
    }

    #[test]
    fn wang_sloan_quadrature_oracle_matches_unit_integral() {
        // Tensor midpoint rule on p=2 confirms the analytic integral 1.
        let n = 400;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = [(i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64];
                acc += wang_sloan(&x, 2.0, 0.7);
            }
        }
        let integral = acc / (n * n) as f64;
        assert!((integral - 1.0).abs() < 1e-6, "{integral}");
    }

    #[test]
    fn constant_integrand_has_zero_mse() {
        // a = 0 makes the integrand constant 1.
        let config = IntegrationConfig {
            integrand: Integrand::WangSloan,
            a: 0.0,
            tau: 0.5,
            p: 4,
            points: vec![50],
            replications: 20,
            schemes: vec![Scheme::McIid, Scheme::GlhCcv],
            seed: 0,
        };
        for row in mc_integrate(&config).unwrap() {
            assert!(row.mse < 1e-28, "{row:?}");
        }
    }

    #[test]
    fn glh_beats_iid_on_additive_like_integrand() {
        let config = IntegrationConfig {
            integrand: Integrand::WangSloan,
            a: 0.1,
            tau: 0.1,
            p: 5,
            points: vec![64],
            replications: 400,
            schemes: vec![Scheme::McIid, Scheme::GlhCcv],
            seed: 11,
        };
        let rows = mc_integrate(&config).unwrap();
        let mse_of = |label: &str| {
            rows.iter()
                .find(|r| r.scheme == label)
                .map(|r| r.mse)
                .unwrap()
        };
        assert!(
            mse_of("glh-ccv") < mse_of("mc-iid"),
            "glh {} vs iid {}",
            mse_of("glh-ccv"),
            mse_of("mc-iid")
        );
    }

    #[test]
    fn mse_scales_as_one_over_n() {
        let config = IntegrationConfig {
            integrand: Integrand::WangSloan,
            a: 1.0,
            tau: 0.5,
            p: 8,
            points: vec![250, 500],
            replications: 4000,
            schemes: vec![Scheme::McIid],
            seed: 3,
        };
        let rows = mc_integrate(&config).unwrap();
        let ratio = rows[0].mse / rows[1].mse;
        assert!(
            (2.0 / 1.5..=2.0 * 1.5).contains(&ratio),
            "doubling points gave MSE ratio {ratio}"
        );
    }

    #[test]
    fn results_reproducible_for_fixed_seed() {
        let config = IntegrationConfig {
            integrand: Integrand::WangSloan,
            a: 0.5,
            tau: 0.5,
            p: 4,
            points: vec![64],
            replications: 100,
            schemes: vec![Scheme::McIid, Scheme::GlhCcv],
            seed: 9,
        };
        let a = mc_integrate(&config).unwrap();
        let b = mc_integrate(&config).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.mse, y.mse);
            assert_eq!(x.mse_se, y.mse_se);
        }
    }

    #[test]
    fn external_point_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("points.csv");
        // Midpoint grid on [0,1]^2, 16 points.
        let mut text = String::new();
        for i in 0..4 {
            for j in 0..4 {
                text.push_str(&format!(
                    "{},{}\n",
                    (i as f64 + 0.5) / 4.0,
                    (j as f64 + 0.5) / 4.0
                ));
            }
        }
        std::fs::write(&path, text).unwrap();
        let config = IntegrationConfig {
            integrand: Integrand::WangSloan,
            a: 1.0,
            tau: 0.8,
            p: 2,
            points: vec![],
            replications: 2,
            schemes: vec![Scheme::ExternalPointFile(path)],
            seed: 0,
        };
        let rows = mc_integrate(&config).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].n_points, 16);
        assert!(rows[0].mse < 1e-4);
    }

    #[test]
    fn bad_point_file_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "0.5,not-a-number\n").unwrap();
        let config = IntegrationConfig {
            integrand: Integrand::WangSloan,
            a: 1.0,
            tau: 0.8,
            p: 2,
            points: vec![],
            replications: 2,
            schemes: vec![Scheme::ExternalPointFile(path)],
            seed: 0,
        };
        assert!(matches!(mc_integrate(&config), Err(Error::BadData(_))));
    }
}
