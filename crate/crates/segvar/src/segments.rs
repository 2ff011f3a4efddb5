//! Segment sets: the pair (graph, coordinate matrix) supporting a sampler.
//!
//! A segment set holds `n` vertices in the unit hypercube `[0,1]^d` and an
//! edge list describing which pairs are joined by a segment. Samplers pick an
//! edge uniformly and a uniform point on it, so marginal uniformity of the
//! resulting vector is a property of the coordinates alone. This module owns
//! the data model, the per-coordinate projections, and the residual checks
//! behind the three admissibility/range/coordinate assumptions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for grouping numerically equal coordinates.
///
/// Solver outputs are floating point, so exact distinctness cannot be
/// assumed. Values closer than this are treated as one projected node.
pub const GROUP_TOL: f64 = 1e-12;

/// Tolerance band accepted around [0,1] for raw coordinate entries.
pub const RANGE_TOL: f64 = 1e-12;

/// A collection of line segments in `[0,1]^d`.
///
/// Vertex indices are 1-based in the API and on disk, matching the usual
/// graph-theoretic notation. Edges are kept lexicographically sorted so the
/// edge index `k` is the position in `edges`. Duplicate edges are allowed and
/// counted with multiplicity (stochastic composition relies on this).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SegmentSet {
    /// Ambient dimension.
    pub d: usize,
    /// Number of vertices.
    pub n: usize,
    /// Coordinate matrix, `d` rows of `n` entries; column `k` is vertex `k+1`.
    pub coordinates: Vec<Vec<f64>>,
    /// Sorted edge list, 1-based vertex pairs with `i < j`.
    pub edges: Vec<(usize, usize)>,
}

/// Projection of a segment set onto one coordinate.
#[derive(Debug, Clone)]
pub struct CoordinateProjection {
    /// 1-based coordinate index `l`.
    pub coordinate: usize,
    /// Sorted distinct values `a_l` (strictly increasing after grouping).
    pub values: Vec<f64>,
    /// Position sets: `position_sets[m]` lists the 1-based vertices whose
    /// `l`-th coordinate equals `values[m]`.
    pub position_sets: Vec<Vec<usize>>,
    /// For each edge `k` (0-based), the projected node pair `(m_alpha, m_beta)`
    /// as 0-based indices into `values`, with `m_alpha <= m_beta`.
    pub edge_nodes: Vec<(usize, usize)>,
    /// Symmetric multiplicity map `n^l_{(m,m')}` over projected node pairs,
    /// keyed with `m < m'` (0-based). Projected self-loops are not counted
    /// here; they are listed in `self_loops`.
    pub multiplicities: BTreeMap<(usize, usize), usize>,
    /// Edges (0-based) whose endpoints project to the same node: the
    /// admissibility violations of this coordinate.
    pub self_loops: Vec<usize>,
    /// Total number of edges in the parent set.
    pub edge_count: usize,
}

/// Outcome of checking the three assumptions behind marginal uniformity.
///
/// Violations are reported, never repaired.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniformityReport {
    /// `(edge, coordinate)` pairs (1-based) where the projected endpoints
    /// coincide, i.e. the segment is parallel to a hyperface.
    pub admissibility_violations: Vec<(usize, usize)>,
    /// Coordinates (1-based) whose row minimum is not 0 or maximum is not 1.
    pub range_violations: Vec<usize>,
    /// Per coordinate `l`, the residuals `F_{l,m}` for the interior cells
    /// `m = 2..n_l-1` (1-based cell numbering). Empty when a
    /// coordinate has fewer than three distinct values.
    pub coordinate_residuals: Vec<Vec<f64>>,
    /// Per vertex, `sum_l x_{l,k} - d/2`.
    pub constant_sum_residuals: Vec<f64>,
}

impl UniformityReport {
    /// True when admissibility, range, and the coordinate equations all hold.
    pub fn is_standard_uniform(&self, tol: f64) -> bool {
        self.admissibility_violations.is_empty()
            && self.range_violations.is_empty()
            && self
                .coordinate_residuals
                .iter()
                .flatten()
                .all(|r| r.abs() <= tol)
    }

    /// True when every vertex lies on the constant-sum hyperplane.
    pub fn is_constant_sum(&self, tol: f64) -> bool {
        self.constant_sum_residuals.iter().all(|r| r.abs() <= tol)
    }

    /// Largest absolute coordinate residual, 0 when there are none.
    pub fn max_coordinate_residual(&self) -> f64 {
        self.coordinate_residuals
            .iter()
            .flatten()
            .fold(0.0, |acc, r| acc.max(r.abs()))
    }

    /// Largest absolute constant-sum residual.
    pub fn max_constant_sum_residual(&self) -> f64 {
        self.constant_sum_residuals
            .iter()
            .fold(0.0, |acc, r| acc.max(r.abs()))
    }
}

/// Validate a coordinate matrix and edge list into a [`SegmentSet`].
///
/// `coordinates` is `d` rows of `n` entries, every entry in `[0,1]` up to
/// `1e-12`; `edges` holds 1-based pairs `(i, j)` with `i < j`. The edge list
/// is sorted lexicographically; duplicates are kept as distinct entries.
pub fn build_segment_set(
    coordinates: Vec<Vec<f64>>,
    edges: Vec<(usize, usize)>,
) -> Result<SegmentSet> {
    let d = coordinates.len();
    if d < 2 {
        return Err(Error::BadConstruction(format!(
            "dimension must be at least 2, got {d}"
        )));
    }
    let n = coordinates[0].len();
    if n < 2 {
        return Err(Error::BadConstruction(format!(
            "need at least 2 vertices, got {n}"
        )));
    }
    for (row, xs) in coordinates.iter().enumerate() {
        if xs.len() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: xs.len(),
            });
        }
        for (col, &x) in xs.iter().enumerate() {
            if !x.is_finite() || !(-RANGE_TOL..=1.0 + RANGE_TOL).contains(&x) {
                return Err(Error::OutOfRangeCoordinate { row, col, value: x });
            }
        }
    }
    for &(i, j) in &edges {
        if i == j {
            return Err(Error::SelfLoop { i, j });
        }
        if i < 1 || j < 1 || i > n || j > n || i > j {
            return Err(Error::BadIndex { i, j, n });
        }
    }
    let mut edges = edges;
    edges.sort_unstable();
    Ok(SegmentSet {
        d,
        n,
        coordinates,
        edges,
    })
}

impl SegmentSet {
    /// Coordinate `x_{l,k}` with 1-based `l` and `k`.
    pub fn x(&self, l: usize, k: usize) -> f64 {
        self.coordinates[l - 1][k - 1]
    }

    /// The 1-based vertex pair of edge `k` (1-based).
    pub fn edge(&self, k: usize) -> (usize, usize) {
        self.edges[k - 1]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sum of the coordinates of vertex `k` (1-based).
    pub fn vertex_sum(&self, k: usize) -> f64 {
        (1..=self.d).map(|l| self.x(l, k)).sum()
    }

    /// Project onto coordinate `l` (1-based), grouping values within
    /// [`GROUP_TOL`].
    pub fn project_coordinate(&self, l: usize) -> CoordinateProjection {
        assert!(l >= 1 && l <= self.d, "coordinate index out of range");
        let row = &self.coordinates[l - 1];
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&a, &b| row[a].total_cmp(&row[b]));

        let mut values = Vec::new();
        let mut position_sets: Vec<Vec<usize>> = Vec::new();
        let mut node_of_vertex = vec![0usize; self.n];
        for &k in &order {
            let x = row[k];
            match values.last() {
                Some(&last) if x - last <= GROUP_TOL => {
                    node_of_vertex[k] = values.len() - 1;
                    position_sets.last_mut().unwrap().push(k + 1);
                }
                _ => {
                    node_of_vertex[k] = values.len();
                    values.push(x);
                    position_sets.push(vec![k + 1]);
                }
            }
        }
        for set in &mut position_sets {
            set.sort_unstable();
        }

        let mut multiplicities = BTreeMap::new();
        let mut self_loops = Vec::new();
        let mut edge_nodes = Vec::with_capacity(self.edges.len());
        for (k, &(i, j)) in self.edges.iter().enumerate() {
            let (mut m, mut mp) = (node_of_vertex[i - 1], node_of_vertex[j - 1]);
            if m > mp {
                std::mem::swap(&mut m, &mut mp);
            }
            edge_nodes.push((m, mp));
            if m == mp {
                self_loops.push(k);
            } else {
                *multiplicities.entry((m, mp)).or_insert(0) += 1;
            }
        }

        CoordinateProjection {
            coordinate: l,
            values,
            position_sets,
            edge_nodes,
            multiplicities,
            self_loops,
            edge_count: self.edges.len(),
        }
    }

    /// Evaluate the residuals of all three uniformity assumptions.
    pub fn uniformity_residuals(&self) -> UniformityReport {
        let mut admissibility_violations = Vec::new();
        let mut range_violations = Vec::new();
        let mut coordinate_residuals = Vec::new();
        for l in 1..=self.d {
            let proj = self.project_coordinate(l);
            for &k in &proj.self_loops {
                admissibility_violations.push((k + 1, l));
            }
            let lo = *proj.values.first().unwrap();
            let hi = *proj.values.last().unwrap();
            if lo.abs() > RANGE_TOL || (hi - 1.0).abs() > RANGE_TOL {
                range_violations.push(l);
            }
            coordinate_residuals.push(proj.interior_residuals());
        }
        // Report admissibility violations sorted by (edge, coordinate).
        admissibility_violations.sort_unstable();
        let half = self.d as f64 / 2.0;
        let constant_sum_residuals = (1..=self.n).map(|k| self.vertex_sum(k) - half).collect();
        UniformityReport {
            admissibility_violations,
            range_violations,
            coordinate_residuals,
            constant_sum_residuals,
        }
    }

    /// Support interval of `U_l` conditional on edge `k` (both 1-based).
    ///
    /// Returns `(alpha, beta)` with `alpha < beta`, or `DegenerateEdge` when
    /// the segment is parallel to the `l`-th hyperface.
    pub fn conditional_support(&self, k: usize, l: usize) -> Result<(f64, f64)> {
        let (i, j) = self.edge(k);
        let (a, b) = (self.x(l, i), self.x(l, j));
        let (alpha, beta) = if a <= b { (a, b) } else { (b, a) };
        if beta - alpha <= GROUP_TOL {
            return Err(Error::DegenerateEdge {
                edge: k,
                coordinate: l,
                value: alpha,
            });
        }
        Ok((alpha, beta))
    }

    /// Read a segment set from its canonical JSON form.
    pub fn from_json(text: &str) -> Result<SegmentSet> {
        let raw: SegmentSetJson = serde_json::from_str(text)?;
        build_segment_set(raw.coordinates, raw.edges)
    }

    /// Canonical JSON serialization (edges sorted lexicographically).
    pub fn to_json(&self) -> String {
        let raw = SegmentSetJson {
            d: self.d,
            n: self.n,
            coordinates: self.coordinates.clone(),
            edges: self.edges.clone(),
        };
        serde_json::to_string_pretty(&raw).expect("segment set serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct SegmentSetJson {
    d: usize,
    n: usize,
    coordinates: Vec<Vec<f64>>,
    edges: Vec<(usize, usize)>,
}

impl CoordinateProjection {
    /// Number of distinct projected values `n_l`.
    pub fn node_count(&self) -> usize {
        self.values.len()
    }

    /// Multiplicity `n^l_{(m,m')}` for 0-based node indices.
    pub fn multiplicity(&self, m: usize, mp: usize) -> usize {
        if m == mp {
            return 0;
        }
        let key = if m < mp { (m, mp) } else { (mp, m) };
        self.multiplicities.get(&key).copied().unwrap_or(0)
    }

    /// Residuals `F_{l,m}` of the coordinate equations for the interior cells
    /// `m = 2..n_l-1` in 1-based cell numbering; entry `t` is cell `m = t + 2`.
    ///
    /// Cell `A_{l,m} = [a_{m-1}, a_m)` is covered by edge `k` exactly when
    /// `m_alpha(k) + 1 <= m <= m_beta(k)`. Projected self-loops contribute
    /// nothing (they are admissibility violations, reported separately).
    pub fn interior_residuals(&self) -> Vec<f64> {
        let nl = self.node_count();
        if nl < 3 {
            return Vec::new();
        }
        let inv_e = 1.0 / self.edge_count as f64;
        // Paper cell m (1-based) covers values[m-2..m-1]; iterate m = 2..nl-1.
        (2..nl)
            .map(|m| {
                let mut sum = 0.0;
                for &(ma, mb) in &self.edge_nodes {
                    if ma == mb {
                        continue;
                    }
                    // covered when ma + 1 <= m - 1 and m - 1 <= mb (0-based cell top)
                    if ma < m - 1 && m - 1 <= mb {
                        sum += 1.0 / (self.values[mb] - self.values[ma]);
                    }
                }
                inv_e * sum - 1.0
            })
            .collect()
    }

    /// Reconstruct the projected row from values and position sets.
    pub fn reconstruct_row(&self, n: usize) -> Vec<f64> {
        let mut row = vec![f64::NAN; n];
        for (m, set) in self.position_sets.iter().enumerate() {
            for &k in set {
                row[k - 1] = self.values[m];
            }
        }
        row
    }
}
