//! Central-limit check for generalized Latin hypercube averages: the scaled
//! average variance must converge to the ANOVA residual integral, whatever
//! base measure supplies the V vectors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{Construction, Kind};
use crate::error::Result;
use crate::sampling::{glh_sample_with_rng, stream_rng, IidUniform, Sampler};
use crate::stats;

/// Integrands with known mean and known ANOVA residual variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CltIntegrand {
    /// `f(u) = u1 u2`: mean 1/4, residual `(u1-1/2)(u2-1/2)`, integral 1/144.
    Product2,
    /// `f(u) = u1 + u2`: mean 1, additive so the residual vanishes.
    Additive2,
}

impl CltIntegrand {
    pub fn mean(&self) -> f64 {
        match self {
            CltIntegrand::Product2 => 0.25,
            CltIntegrand::Additive2 => 1.0,
        }
    }

    /// `int r(u)^2 du` of the ANOVA decomposition.
    pub fn residual_variance(&self) -> f64 {
        match self {
            CltIntegrand::Product2 => 1.0 / 144.0,
            CltIntegrand::Additive2 => 0.0,
        }
    }

    /// Marginal variance of `f` under iid uniforms (the iid-sampling CLT
    /// variance).
    pub fn iid_variance(&self) -> f64 {
        match self {
            // E[(u1 u2)^2] - 1/16 = 1/9 - 1/16
            CltIntegrand::Product2 => 1.0 / 9.0 - 1.0 / 16.0,
            CltIntegrand::Additive2 => 1.0 / 6.0,
        }
    }

    pub fn inputs(&self) -> usize {
        2
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        match self {
            CltIntegrand::Product2 => u[0] * u[1],
            CltIntegrand::Additive2 => u[0] + u[1],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CltRow {
    pub d: usize,
    pub base: String,
    /// Empirical variance of `sqrt(d) (X_bar - mean)` over the replications.
    pub variance: f64,
    /// Delta-method standard error of that variance estimate.
    pub variance_se: f64,
    /// The CLT target `int r^2`.
    pub analytic: f64,
}

/// Base measures for the V vectors of the GLH sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CltBase {
    Iid,
    Aj2,
}

impl CltBase {
    fn sampler(&self, d: usize) -> Result<Box<dyn Sampler>> {
        match self {
            CltBase::Iid => Ok(Box::new(IidUniform { d })),
            CltBase::Aj2 => Construction::new(Kind::Aj { d, b: 2 }).sampler(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            CltBase::Iid => "iid",
            CltBase::Aj2 => "aj2",
        }
    }
}

/// For each d, estimate `Var(sqrt(d) (X_bar - E))` where `X_bar` averages
/// the integrand over the d points of a GLH sample with the given base.
pub fn clt_check(
    f: CltIntegrand,
    d_list: &[usize],
    replications: usize,
    base: CltBase,
    seed: u64,
) -> Result<Vec<CltRow>> {
    let p = f.inputs();
    let mut rows = Vec::with_capacity(d_list.len());
    for &d in d_list {
        let sampler = base.sampler(d)?;
        let stats_values: Vec<f64> = (0..replications)
            .into_par_iter()
            .map(|rep| {
                let mut rng = stream_rng(seed, rep as u64);
                let sample = glh_sample_with_rng(p, d, &*sampler, &mut rng);
                let mut acc = 0.0;
                let mut point = vec![0.0; p];
                for l in 0..d {
                    for (i, x) in point.iter_mut().enumerate() {
                        *x = sample.matrix[i * d + l];
                    }
                    acc += f.eval(&point);
                }
                let xbar = acc / d as f64;
                (d as f64).sqrt() * (xbar - f.mean())
            })
            .collect();
        rows.push(CltRow {
            d,
            base: base.label().to_string(),
            variance: stats::sample_variance(&stats_values),
            variance_se: stats::variance_standard_error(&stats_values),
            analytic: f.residual_variance(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_variance_converges_to_residual_integral() {
        let rows = clt_check(CltIntegrand::Product2, &[256], 4000, CltBase::Iid, 3).unwrap();
        let row = &rows[0];
        let target = 1.0 / 144.0;
        assert!(
            (row.variance - target).abs() < 0.12 * target,
            "variance {} vs {target}",
            row.variance
        );
    }

    #[test]
    fn additive_variance_collapses() {
        let rows = clt_check(CltIntegrand::Additive2, &[256], 2000, CltBase::Iid, 4).unwrap();
        let row = &rows[0];
        assert!(
            row.variance < 0.1 * CltIntegrand::Additive2.iid_variance(),
            "variance {}",
            row.variance
        );
    }

    #[test]
    fn base_measure_is_asymptotically_irrelevant() {
        let iid = clt_check(CltIntegrand::Product2, &[256], 3000, CltBase::Iid, 5).unwrap();
        let aj = clt_check(CltIntegrand::Product2, &[256], 3000, CltBase::Aj2, 6).unwrap();
        let diff = (iid[0].variance - aj[0].variance).abs();
        let se = (iid[0].variance_se.powi(2) + aj[0].variance_se.powi(2)).sqrt();
        assert!(diff <= 3.0 * se, "diff {diff} vs 3se {}", 3.0 * se);
    }
}
