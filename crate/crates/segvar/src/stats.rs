//! Shared statistical utilities: normal and gamma quantiles driven by a
//! single uniform (so antithetic coupling is well-defined), KS tests, and
//! batch-means variance estimation.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use statrs::function::erf;
use statrs::function::gamma::{gamma_lr, ln_gamma};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal quantile function.
///
/// `erf_inv` is only good to ~1e-11; one Newton step in the CDF polishes it
/// to full double precision, which keeps antithetic couplings symmetric.
pub fn normal_inv_cdf(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    let x = std::f64::consts::SQRT_2 * erf::erf_inv(2.0 * p - 1.0);
    let density = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if density > 1e-300 {
        x - (normal_cdf(x) - p) / density
    } else {
        x
    }
}

/// Euler beta function `B(a, b)`.
pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Quantile of the Gamma(shape, rate) distribution.
///
/// Newton iterations on the regularized lower incomplete gamma with a
/// Wilson-Hilferty starting point, bisection-guarded so it cannot leave the
/// bracketing interval.
pub fn gamma_inv_cdf(shape: f64, rate: f64, p: f64) -> f64 {
    debug_assert!(shape > 0.0 && rate > 0.0);
    debug_assert!(p > 0.0 && p < 1.0);
    let ln_norm = ln_gamma(shape);
    // Starting point: Wilson-Hilferty, or the small-x expansion
    // P(a,x) ~ x^a / (a Gamma(a)) when that lands near zero.
    let z = normal_inv_cdf(p);
    let c = 1.0 - 1.0 / (9.0 * shape) + z / (3.0 * shape.sqrt());
    let mut x = shape * c * c * c;
    if x.is_nan() || x <= 1e-8 {
        x = ((p.ln() + shape.ln() + ln_norm) / shape).exp();
    }
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    for _ in 0..128 {
        let f = gamma_lr(shape, x) - p;
        if f.abs() <= 1e-14 {
            break;
        }
        if f > 0.0 {
            hi = hi.min(x);
        } else {
            lo = lo.max(x);
        }
        let pdf = ((shape - 1.0) * x.ln() - x - ln_norm).exp();
        let mut next = x - f / pdf;
        if !next.is_finite() || next <= lo || next >= hi {
            next = if hi.is_finite() {
                0.5 * (lo + hi)
            } else {
                x * 2.0
            };
        }
        if (next - x).abs() <= 1e-15 * x {
            break;
        }
        x = next;
    }
    x / rate
}

/// One-sample Kolmogorov-Smirnov statistic against Uniform(0,1).
pub fn ks_statistic_uniform(sample: &mut [f64]) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sample.iter().enumerate() {
        let hi = (i as f64 + 1.0) / n - x;
        let lo = x - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    d
}

/// Asymptotic one-sample KS critical value at level `alpha`.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// Two-sample KS statistic in one dimension.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value at level `alpha`.
pub fn ks_two_sample_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Two-sample distribution-equality test for points in `[0,1]^2`.
///
/// The statistic is the sup over a regular grid of the empirical-CDF
/// difference; the null distribution is calibrated by label permutation, so
/// the grid coarsening does not bias the level. Returns `(statistic,
/// p_value)`.
pub fn ks2d_two_sample_permutation(
    a: &[(f64, f64)],
    b: &[(f64, f64)],
    grid: usize,
    n_perm: usize,
    rng: &mut ChaCha8Rng,
) -> (f64, f64) {
    let bin = |p: &(f64, f64)| -> usize {
        let gx = ((p.0 * grid as f64) as usize).min(grid - 1);
        let gy = ((p.1 * grid as f64) as usize).min(grid - 1);
        gx * grid + gy
    };
    let mut bins: Vec<usize> = a.iter().map(bin).collect();
    bins.extend(b.iter().map(bin));
    let (n, m) = (a.len(), b.len());

    let stat = |labels: &[bool]| -> f64 {
        let mut count_a = vec![0i64; grid * grid];
        let mut count_b = vec![0i64; grid * grid];
        for (&cell, &is_a) in bins.iter().zip(labels) {
            if is_a {
                count_a[cell] += 1;
            } else {
                count_b[cell] += 1;
            }
        }
        // 2-d prefix sums give the empirical CDF at grid corners.
        let mut d = 0.0f64;
        let mut pref_a = vec![0i64; grid + 1];
        let mut pref_b = vec![0i64; grid + 1];
        for gx in 0..grid {
            for gy in 0..grid {
                pref_a[gy + 1] += count_a[gx * grid + gy];
                pref_b[gy + 1] += count_b[gx * grid + gy];
            }
            let mut run_a = 0i64;
            let mut run_b = 0i64;
            for gy in 0..grid {
                run_a += pref_a[gy + 1];
                run_b += pref_b[gy + 1];
                let diff = (run_a as f64 / n as f64 - run_b as f64 / m as f64).abs();
                if diff > d {
                    d = diff;
                }
            }
        }
        d
    };

    let mut labels: Vec<bool> = (0..n + m).map(|i| i < n).collect();
    let observed = stat(&labels);
    let mut at_least = 0usize;
    for _ in 0..n_perm {
        labels.shuffle(rng);
        if stat(&labels) >= observed {
            at_least += 1;
        }
    }
    let p = (1 + at_least) as f64 / (1 + n_perm) as f64;
    (observed, p)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Delta-method standard error of the sample variance.
pub fn variance_standard_error(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = mean(xs);
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
    ((m4 - m2 * m2).max(0.0) / n).sqrt()
}

/// Batch-means estimate of the asymptotic variance of a Markov chain mean.
///
/// Splits the series into batches of `floor(sqrt(len))` and returns
/// `batch_size * var(batch means)`.
pub fn batch_means_asymptotic_variance(series: &[f64]) -> f64 {
    let t = series.len();
    let batch = (t as f64).sqrt().floor() as usize;
    let n_batches = t / batch;
    let means: Vec<f64> = (0..n_batches)
        .map(|b| mean(&series[b * batch..(b + 1) * batch]))
        .collect();
    batch as f64 * sample_variance(&means)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn normal_quantile_round_trip() {
        for &p in &[1e-6, 0.01, 0.3, 0.5, 0.9, 1.0 - 1e-6] {
            let x = normal_inv_cdf(p);
            assert!((normal_cdf(x) - p).abs() < 1e-12, "p = {p}");
        }
    }

    #[test]
    fn beta_matches_factorials() {
        // B(m+1, d-m+1) = m! (d-m)! / (d+1)!
        assert!((beta(2.0, 3.0) - 1.0 / 12.0).abs() < 1e-14);
        assert!((beta(1.0, 1.0) - 1.0).abs() < 1e-14);
        assert!((beta(3.0, 2.0) - 1.0 / 12.0).abs() < 1e-14);
    }

    #[test]
    fn gamma_quantile_round_trip() {
        for &shape in &[0.3, 1.0, 2.5, 17.0] {
            for &p in &[0.01, 0.2, 0.5, 0.9, 0.999] {
                let x = gamma_inv_cdf(shape, 1.0, p);
                assert!(
                    (gamma_lr(shape, x) - p).abs() < 1e-10,
                    "shape {shape} p {p}"
                );
            }
        }
        // Exponential special case: shape 1, rate 2.
        let x = gamma_inv_cdf(1.0, 2.0, 0.5);
        assert!((x - 0.5f64.ln().abs() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn ks_accepts_true_uniforms_and_rejects_biased() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut u: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>()).collect();
        let crit = ks_critical(u.len(), 0.01);
        assert!(ks_statistic_uniform(&mut u) < crit);
        let mut v: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>().powf(1.1)).collect();
        assert!(ks_statistic_uniform(&mut v) > crit);
    }

    #[test]
    fn two_sample_ks_same_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut a: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        let mut b: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        let d = ks_two_sample(&mut a, &mut b);
        assert!(d < ks_two_sample_critical(10_000, 10_000, 0.01));
    }

    #[test]
    fn permutation_ks2d_detects_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a: Vec<(f64, f64)> = (0..4000)
            .map(|_| {
                let v: f64 = rng.random();
                (v, 1.0 - v)
            })
            .collect();
        let b: Vec<(f64, f64)> = (0..4000)
            .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
            .collect();
        let (_, p_diff) = ks2d_two_sample_permutation(&a, &b, 32, 99, &mut rng);
        assert!(p_diff <= 0.01);
        let c: Vec<(f64, f64)> = (0..4000)
            .map(|_| {
                let v: f64 = rng.random();
                (v, 1.0 - v)
            })
            .collect();
        let (_, p_same) = ks2d_two_sample_permutation(&a, &c, 32, 99, &mut rng);
        assert!(p_same > 0.01);
    }

    #[test]
    fn batch_means_on_iid_matches_marginal_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let series: Vec<f64> = (0..100_000).map(|_| rng.random::<f64>()).collect();
        let v = batch_means_asymptotic_variance(&series);
        assert!((v - 1.0 / 12.0).abs() < 0.01, "batch means variance {v}");
    }
}
