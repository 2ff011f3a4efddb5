//! Transformations preserving uniformity and strict countermonotonicity:
//! reflections, permutations, stochastic composition (graph disjoint union)
//! and deterministic composition (map composition on segment sets).

use crate::error::{Error, Result};
use crate::segments::{build_segment_set, SegmentSet};

/// Default cap on composed edge counts.
pub const DEFAULT_EDGE_CAP: u128 = 1_000_000;

/// Reflect the coordinates listed in `subset` (1-based) through 1/2:
/// component `l` becomes `1 - u_l`. Applying it twice is the identity.
pub fn reflect(u: &[f64], subset: &[usize]) -> Vec<f64> {
    let mut out = u.to_vec();
    for &l in subset {
        out[l - 1] = 1.0 - out[l - 1];
    }
    out
}

/// Permute coordinates: `w_l = u_{pi(l)}` with `pi` a 1-based permutation of
/// `1..=d`. Preserves the coordinate sum exactly.
pub fn permute_vector(u: &[f64], pi: &[usize]) -> Result<Vec<f64>> {
    let d = u.len();
    if pi.len() != d {
        return Err(Error::BadPermutation { d });
    }
    let mut seen = vec![false; d];
    for &p in pi {
        if p < 1 || p > d || seen[p - 1] {
            return Err(Error::BadPermutation { d });
        }
        seen[p - 1] = true;
    }
    Ok(pi.iter().map(|&p| u[p - 1]).collect())
}

/// Stochastic composition: the disjoint union of two segment sets.
///
/// Sampling an edge uniformly on the union picks branch 1 with probability
/// `|E1| / (|E1| + |E2|)`, realizing the mixture with those weights; strict
/// d-CTM is preserved when both inputs satisfy it.
pub fn stochastic_compose(s1: &SegmentSet, s2: &SegmentSet) -> Result<SegmentSet> {
    if s1.d != s2.d {
        return Err(Error::DimensionMismatch {
            left: s1.d,
            right: s2.d,
        });
    }
    let mut coordinates = s1.coordinates.clone();
    for (row, other) in coordinates.iter_mut().zip(&s2.coordinates) {
        row.extend_from_slice(other);
    }
    let mut edges = s1.edges.clone();
    edges.extend(s2.edges.iter().map(|&(i, j)| (i + s1.n, j + s1.n)));
    build_segment_set(coordinates, edges)
}

/// Deterministic composition of the segment maps: outer set `s_y` (a
/// standard-uniform solution) applied to draws from the inner set `s_x`.
///
/// Vertices are pairs (outer edge k, inner vertex i') in lexicographic
/// order; edges are pairs (outer edge, inner edge); coordinates follow
/// `z = y_i x + y_j (1 - x)`.
pub fn deterministic_compose(s_y: &SegmentSet, s_x: &SegmentSet) -> Result<SegmentSet> {
    deterministic_compose_capped(s_y, s_x, DEFAULT_EDGE_CAP)
}

pub fn deterministic_compose_capped(
    s_y: &SegmentSet,
    s_x: &SegmentSet,
    edge_cap: u128,
) -> Result<SegmentSet> {
    if s_y.d != s_x.d {
        return Err(Error::DimensionMismatch {
            left: s_y.d,
            right: s_x.d,
        });
    }
    let n_edges = s_y.edge_count() as u128 * s_x.edge_count() as u128;
    if n_edges > edge_cap {
        return Err(Error::SizeLimit {
            requested: n_edges,
            cap: edge_cap,
            unit: "edges",
        });
    }
    let d = s_y.d;
    let n_out = s_y.edge_count() * s_x.n;
    let mut coordinates = vec![vec![0.0; n_out]; d];
    for (k, &(i, j)) in s_y.edges.iter().enumerate() {
        for ip in 1..=s_x.n {
            let col = k * s_x.n + (ip - 1);
            for l in 1..=d {
                let x = s_x.x(l, ip);
                coordinates[l - 1][col] = s_y.x(l, i) * x + s_y.x(l, j) * (1.0 - x);
            }
        }
    }
    let mut edges = Vec::with_capacity(n_edges as usize);
    for k in 0..s_y.edge_count() {
        for &(ip, jp) in &s_x.edges {
            edges.push((k * s_x.n + ip, k * s_x.n + jp));
        }
    }
    build_segment_set(coordinates, edges)
}

/// Result of checking the sufficient condition for a composition with outer
/// set `s_y` to preserve the constant sum.
#[derive(Debug, Clone, Copy)]
pub struct CtmCompositionCheck {
    /// Common edge width `|y_{l,i(k)} - y_{l,j(k)}|`, when constant.
    pub c1: f64,
    pub c1_constant: bool,
    /// Common offset sum over the `j` endpoints, when constant.
    pub c2: f64,
    pub c2_constant: bool,
    /// `(1 - c1) d/2 == c2` within 1e-10 (and both premises hold).
    pub preserves: bool,
}

/// Check the `(1 - c1) d/2 = c2` sufficient condition on the outer set.
pub fn ctm_composition_check(s_y: &SegmentSet) -> CtmCompositionCheck {
    let d = s_y.d;
    let mut c1 = f64::NAN;
    let mut c1_constant = true;
    let mut c2 = f64::NAN;
    let mut c2_constant = true;
    for (k, &(i, j)) in s_y.edges.iter().enumerate() {
        let mut offset_sum = 0.0;
        for l in 1..=d {
            let width = (s_y.x(l, i) - s_y.x(l, j)).abs();
            if k == 0 && l == 1 {
                c1 = width;
            } else if (width - c1).abs() > 1e-10 {
                c1_constant = false;
            }
            offset_sum += s_y.x(l, j);
        }
        if k == 0 {
            c2 = offset_sum;
        } else if (offset_sum - c2).abs() > 1e-10 {
            c2_constant = false;
        }
    }
    let preserves =
        c1_constant && c2_constant && ((1.0 - c1) * d as f64 / 2.0 - c2).abs() <= 1e-10;
    CtmCompositionCheck {
        c1,
        c1_constant,
        c2,
        c2_constant,
        preserves,
    }
}
