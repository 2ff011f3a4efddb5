//! Multivariate Kendall's tau and Spearman's rho for segment-set vectors:
//! exact values from the geometry, attainable minima, the iterated Latin
//! hypercube closed forms, and empirical estimators with standard errors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{random_permutation, stream_rng, DrawBatch};
use crate::segments::SegmentSet;
use crate::stats;

/// Which V model drives the generalized representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VModel {
    /// One shared uniform per draw (representation with a common V).
    Common,
    /// Independent uniforms per coordinate.
    Iid,
}

/// Concordance measures with provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConcordanceReport {
    pub d: usize,
    pub tau: Option<f64>,
    pub tau_se: Option<f64>,
    pub tau_min: f64,
    pub rho: Option<f64>,
    pub rho_se: Option<f64>,
    pub rho_min: Option<f64>,
    pub xi_star: Option<f64>,
    /// `exact-polygon` (common V: tau by clipping, rho by the Beta
    /// decomposition), `exact-iid`, `exact-beta` (rho only) or `empirical`.
    pub method: String,
    pub draws: Option<usize>,
}

/// Minimal multivariate Kendall's tau: `-1 / (2^(d-1) - 1)`, attained by
/// every d-CTM vector.
pub fn kendall_tau_min(d: usize) -> f64 {
    -1.0 / (2f64.powi(d as i32 - 1) - 1.0)
}

/// Tabulated minimum of multivariate Spearman's rho.
///
/// The bound derivation is consumed as a lookup; dimensions outside the
/// table are an error rather than a guess.
pub fn spearman_rho_min(d: usize) -> Result<f64> {
    let v = match d {
        2 => -1.0,
        3 => -0.56,
        4 => -0.32,
        5 => -0.18,
        10 => -0.01,
        20 => -1.99e-5,
        50 => -4.53e-14,
        100 => -7.97e-29,
        _ => return Err(Error::UnsupportedDimension(d)),
    };
    Ok(v)
}

fn tau_scale(d: usize) -> f64 {
    2f64.powi(d as i32) / (2f64.powi(d as i32 - 1) - 1.0)
}

fn rho_scale(d: usize) -> f64 {
    let two_d = 2f64.powi(d as i32);
    two_d * (d as f64 + 1.0) / (two_d - (d as f64 + 1.0))
}

/// Exact multivariate Kendall's tau of a segment-set vector.
///
/// Common V: for every ordered edge pair the event `{U <= W}` is an
/// intersection of `d` half-planes in the (V, V') square, whose area is
/// computed exactly by convex clipping. Iid V: the event factorizes into
/// per-coordinate comparisons of independent uniforms on intervals.
pub fn kendall_tau_exact(s: &SegmentSet, model: VModel) -> Result<f64> {
    let ne = s.edge_count();
    // Conditional supports up front; degenerate edges are an error here.
    let mut supports = vec![(0.0f64, 0.0f64); ne * s.d];
    for k in 1..=ne {
        for l in 1..=s.d {
            supports[(k - 1) * s.d + (l - 1)] = s.conditional_support(k, l)?;
        }
    }
    let partials: Vec<f64> = (0..ne)
        .into_par_iter()
        .map(|ku| {
            let (iu, ju) = s.edges[ku];
            let mut acc = 0.0;
            match model {
                VModel::Common => {
                    let mut halfplanes = vec![(0.0f64, 0.0f64, 0.0f64); s.d];
                    for kw in 0..ne {
                        let (iw, jw) = s.edges[kw];
                        for l in 1..=s.d {
                            let p = s.x(l, iu) - s.x(l, ju);
                            let q = -(s.x(l, iw) - s.x(l, jw));
                            let r = s.x(l, ju) - s.x(l, jw);
                            halfplanes[l - 1] = (p, q, r);
                        }
                        acc += clip_unit_square_area(&halfplanes);
                    }
                }
                VModel::Iid => {
                    for kw in 0..ne {
                        let mut prod = 1.0;
                        for l in 0..s.d {
                            let (a1, b1) = supports[ku * s.d + l];
                            let (a2, b2) = supports[kw * s.d + l];
                            prod *= prob_uniform_le(a1, b1, a2, b2);
                            if prod == 0.0 {
                                break;
                            }
                        }
                        acc += prod;
                    }
                }
            }
            acc
        })
        .collect();
    // Deterministic reduction: per-edge partial sums added in index order.
    let p_le: f64 = partials.iter().sum::<f64>() / (ne as f64 * ne as f64);
    Ok(tau_scale(s.d) * (p_le - 0.5f64.powi(s.d as i32)))
}

/// `P(A <= B)` for independent `A ~ U[a1,b1]`, `B ~ U[a2,b2]`.
fn prob_uniform_le(a1: f64, b1: f64, a2: f64, b2: f64) -> f64 {
    if b1 <= a2 {
        return 1.0;
    }
    if b2 <= a1 {
        return 0.0;
    }
    let len_b = b2 - a2;
    // Region of B above the support of A contributes fully.
    let full = (b2 - b1.max(a2)).max(0.0);
    // Overlap region integrates the CDF of A.
    let lo = a1.max(a2);
    let hi = b1.min(b2);
    let overlap = if hi > lo {
        ((hi - a1).powi(2) - (lo - a1).powi(2)) / (2.0 * (b1 - a1))
    } else {
        0.0
    };
    (full + overlap) / len_b
}

/// Area of `[0,1]^2` intersected with the half-planes `p x + q y + r <= 0`.
///
/// Sutherland-Hodgman clipping; the region is convex so the clip is exact.
/// Half-planes with both coefficients below 1e-14 degenerate to all-in or
/// all-out by the sign of the constant.
pub(crate) fn clip_unit_square_area(halfplanes: &[(f64, f64, f64)]) -> f64 {
    const EPS_COEF: f64 = 1e-14;
    const EPS_VERT: f64 = 1e-12;
    let mut poly: Vec<(f64, f64)> = vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    let mut next = Vec::with_capacity(8);
    for &(p, q, r) in halfplanes {
        if p.abs() < EPS_COEF && q.abs() < EPS_COEF {
            if r <= EPS_VERT {
                continue;
            }
            return 0.0;
        }
        next.clear();
        let n = poly.len();
        for i in 0..n {
            let s = poly[i];
            let e = poly[(i + 1) % n];
            let sd = p * s.0 + q * s.1 + r;
            let ed = p * e.0 + q * e.1 + r;
            let s_in = sd <= EPS_VERT;
            let e_in = ed <= EPS_VERT;
            if s_in != e_in {
                let t = (sd / (sd - ed)).clamp(0.0, 1.0);
                next.push((s.0 + t * (e.0 - s.0), s.1 + t * (e.1 - s.1)));
            }
            if e_in {
                next.push(e);
            }
        }
        std::mem::swap(&mut poly, &mut next);
        if poly.len() < 3 {
            return 0.0;
        }
    }
    shoelace(&poly)
}

fn shoelace(poly: &[(f64, f64)]) -> f64 {
    let n = poly.len();
    let mut twice = 0.0;
    for i in 0..n {
        let (x0, y0) = poly[i];
        let (x1, y1) = poly[(i + 1) % n];
        twice += x0 * y1 - x1 * y0;
    }
    (twice / 2.0).abs()
}

/// Per-edge coefficients `c_m = sum_{|L|=m} xi_L` of the polynomial
/// `prod_l (x_{l,i(k)} t + x_{l,j(k)})`, averaged over edges.
fn subset_coefficients(s: &SegmentSet) -> Vec<f64> {
    let d = s.d;
    let mut avg = vec![0.0; d + 1];
    let mut coeffs = vec![0.0; d + 1];
    for &(i, j) in &s.edges {
        coeffs.fill(0.0);
        coeffs[0] = 1.0;
        for l in 1..=d {
            let xi = s.x(l, i);
            let xj = s.x(l, j);
            for m in (1..=l).rev() {
                coeffs[m] = coeffs[m] * xj + coeffs[m - 1] * xi;
            }
            coeffs[0] *= xj;
        }
        for m in 0..=d {
            avg[m] += coeffs[m];
        }
    }
    let ne = s.edge_count() as f64;
    avg.iter_mut().for_each(|c| *c /= ne);
    avg
}

/// `xi* = (1/|E|) sum_k prod_l (x_{l,i(k)} + x_{l,j(k)})`.
pub fn xi_star(s: &SegmentSet) -> f64 {
    let mut total = 0.0;
    for &(i, j) in &s.edges {
        let mut prod = 1.0;
        for l in 1..=s.d {
            prod *= s.x(l, i) + s.x(l, j);
        }
        total += prod;
    }
    total / s.edge_count() as f64
}

/// Exact multivariate Spearman's rho of a segment-set vector.
///
/// Common V: the subset-sum decomposition with `E[V^m (1-V)^(d-m)]` given by
/// the Euler beta function. Iid V: every reflected-V rho vanishes and only
/// the `xi*` correction survives.
pub fn spearman_rho_exact(s: &SegmentSet, model: VModel) -> Result<f64> {
    // Degenerate projected edges make the measure ill-defined.
    for k in 1..=s.edge_count() {
        for l in 1..=s.d {
            s.conditional_support(k, l)?;
        }
    }
    let d = s.d;
    let scale = rho_scale(d);
    let two_d = 2f64.powi(d as i32);
    let coeffs = subset_coefficients(s);
    let xi: f64 = coeffs.iter().sum();
    match model {
        VModel::Common => {
            let mut rho = scale / two_d * (xi - 1.0);
            for (m, &c) in coeffs.iter().enumerate() {
                let beta = stats::beta(m as f64 + 1.0, (d - m) as f64 + 1.0);
                rho += c * scale * (beta - 1.0 / two_d);
            }
            Ok(rho)
        }
        VModel::Iid => Ok(scale / two_d * (xi - 1.0)),
    }
}

/// Closed-form concordance for `T` Latin hypercube iterations on an iid
/// start: `(tau, xi*, rho)`.
///
/// `xi*` is evaluated directly from the multinomial sum, with the inner
/// combination sums computed as elementary symmetric polynomials; the direct
/// envelope is `d <= 10`, `T <= 5`.
pub fn ilh_tau_rho(d: usize, t: usize) -> Result<(f64, f64, f64)> {
    if d < 2 || t < 1 {
        return Err(Error::BadConstruction("ilh needs d >= 2 and T >= 1".into()));
    }
    if d > 10 || t > 5 {
        return Err(Error::SizeLimit {
            requested: d as u128 * t as u128,
            cap: 50,
            unit: "d*T for direct evaluation",
        });
    }
    let d_fact: f64 = (1..=d as u32).map(f64::from).product();
    let tau = (d_fact.powi(-(t as i32)) - 1.0) / (2f64.powi(d as i32 - 1) - 1.0);
    let xi = ilh_xi_star(d, t);
    let rho = (1.0 - xi) * (-(d as f64 + 1.0) / (2f64.powi(d as i32) - (d as f64 + 1.0)));
    Ok((tau, xi, rho))
}

fn ilh_xi_star(d: usize, t: usize) -> f64 {
    // factor[s][m] = C(d,m)^{-1} e_m(2(i-1)/d^{t-s}) over i = 1..d,
    // for iteration s = 1..t (s indexes the inner product factors).
    let mut factors = Vec::with_capacity(t);
    for s in 1..=t {
        let scale = (d as f64).powi((t - s + 1) as i32);
        let values: Vec<f64> = (1..=d).map(|i| 2.0 * (i as f64 - 1.0) / scale).collect();
        let mut e = vec![0.0; d + 1];
        e[0] = 1.0;
        for &v in &values {
            for m in (1..=d).rev() {
                e[m] += v * e[m - 1];
            }
        }
        let mut f = vec![0.0; d + 1];
        for m in 0..=d {
            f[m] = e[m] / binomial(d, m);
        }
        factors.push(f);
    }
    let leak = (d as f64).powi(-(t as i32));
    // Sum over compositions m_0 + m_1 + ... + m_t = d.
    let mut total = 0.0;
    let mut parts = vec![0usize; t + 1];
    compositions(d, t + 1, &mut parts, &mut |parts| {
        let m0 = parts[0];
        let mut term = multinomial(d, parts) * leak.powi(m0 as i32);
        for s in 1..=t {
            term *= factors[s - 1][parts[s]];
        }
        total += term;
    });
    total
}

fn compositions(total: usize, slots: usize, parts: &mut [usize], f: &mut impl FnMut(&[usize])) {
    fn rec(
        remaining: usize,
        idx: usize,
        slots: usize,
        parts: &mut [usize],
        f: &mut impl FnMut(&[usize]),
    ) {
        if idx == slots - 1 {
            parts[idx] = remaining;
            f(parts);
            return;
        }
        for v in 0..=remaining {
            parts[idx] = v;
            rec(remaining - v, idx + 1, slots, parts, f);
        }
    }
    rec(total, 0, slots, parts, f);
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut out = 1.0;
    for i in 0..k.min(n - k) {
        out = out * (n - i) as f64 / (i + 1) as f64;
    }
    out
}

fn multinomial(n: usize, parts: &[usize]) -> f64 {
    let mut out = 1.0;
    let mut used = 0;
    for &p in parts {
        used += p;
        out *= binomial(used, p);
    }
    debug_assert_eq!(used, n);
    out
}

/// Monte Carlo estimate of the ILH `xi*_T` beyond the direct envelope:
/// averages the permutation product over random permutation tuples.
pub fn ilh_xi_star_mc(d: usize, t: usize, reps: usize, seed: u64) -> (f64, f64) {
    let mut rng = stream_rng(seed, 0x11);
    let leak = (d as f64).powi(-(t as i32));
    let mut values = Vec::with_capacity(reps);
    let mut shift = vec![0.0f64; d];
    for _ in 0..reps {
        shift.fill(leak);
        for s in 1..=t {
            let scale = (d as f64).powi((t - s + 1) as i32);
            let perm = random_permutation(d, &mut rng);
            for l in 0..d {
                shift[l] += 2.0 * perm[l] as f64 / scale;
            }
        }
        values.push(shift.iter().product());
    }
    let mean = stats::mean(&values);
    let se = (stats::sample_variance(&values) / reps as f64).sqrt();
    (mean, se)
}

/// Empirical Kendall's tau from two independent batches of the same
/// construction, with the binomial delta-method standard error.
pub fn empirical_tau(batch1: &DrawBatch, batch2: &DrawBatch) -> Result<(f64, f64)> {
    if batch1.n != batch2.n {
        return Err(Error::LengthMismatch {
            left: batch1.n,
            right: batch2.n,
        });
    }
    if batch1.d != batch2.d {
        return Err(Error::DimensionMismatch {
            left: batch1.d,
            right: batch2.d,
        });
    }
    let n = batch1.n;
    let d = batch1.d;
    let mut hits = 0usize;
    for i in 0..n {
        let u = batch1.row(i);
        let w = batch2.row(i);
        if u.iter().zip(w).all(|(a, b)| a <= b) {
            hits += 1;
        }
    }
    let p = hits as f64 / n as f64;
    let scale = tau_scale(d);
    let tau = scale * (p - 0.5f64.powi(d as i32));
    let se = scale * (p * (1.0 - p) / n as f64).sqrt();
    Ok((tau, se))
}

/// Empirical Spearman's rho from the mean coordinate product.
pub fn empirical_rho(batch: &DrawBatch) -> (f64, f64) {
    let d = batch.d;
    let products: Vec<f64> = batch.rows().map(|row| row.iter().product()).collect();
    let scale = rho_scale(d);
    let rho = scale * (stats::mean(&products) - 0.5f64.powi(d as i32));
    let se = scale * (stats::sample_variance(&products) / batch.n as f64).sqrt();
    (rho, se)
}

/// Exact report for a segment set under the given V model.
pub fn exact_report(s: &SegmentSet, model: VModel) -> Result<ConcordanceReport> {
    let tau = kendall_tau_exact(s, model)?;
    let rho = spearman_rho_exact(s, model)?;
    Ok(ConcordanceReport {
        d: s.d,
        tau: Some(tau),
        tau_se: None,
        tau_min: kendall_tau_min(s.d),
        rho: Some(rho),
        rho_se: None,
        rho_min: spearman_rho_min(s.d).ok(),
        xi_star: Some(xi_star(s)),
        method: match model {
            VModel::Common => "exact-polygon".into(),
            VModel::Iid => "exact-iid".into(),
        },
        draws: None,
    })
}

/// Empirical report from paired batches.
pub fn empirical_report(batch1: &DrawBatch, batch2: &DrawBatch) -> Result<ConcordanceReport> {
    let (tau, tau_se) = empirical_tau(batch1, batch2)?;
    let (rho, rho_se) = empirical_rho(batch1);
    Ok(ConcordanceReport {
        d: batch1.d,
        tau: Some(tau),
        tau_se: Some(tau_se),
        tau_min: kendall_tau_min(batch1.d),
        rho: Some(rho),
        rho_se: Some(rho_se),
        rho_min: spearman_rho_min(batch1.d).ok(),
        xi_star: None,
        method: "empirical".into(),
        draws: Some(batch1.n),
    })
}
