//! Convex solvers for the marginal-uniformity and strict countermonotonicity
//! problems on a segment graph.
//!
//! The objective per coordinate is a sum of `-log` gap terms over the
//! projected edges; its stationary points are exactly the solutions of the
//! coordinate equations, and it acts as its own barrier against collapsing
//! any connected gap. The constant-sum requirement enters as affine equality
//! rows (one per vertex). Minimization runs a damped Newton iteration on the
//! null space of the equality rows with an active-set treatment of the [0,1]
//! box: published solutions such as the circulant first row (0,0,1/2,1,1)
//! genuinely sit on the box boundary, so bound handling is not optional.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::segments::{build_segment_set, CoordinateProjection, SegmentSet, UniformityReport};

/// Stopping rules for the Newton iteration.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Infinity-norm threshold on the projected gradient.
    pub grad_tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grad_tol: 1e-10,
            max_iterations: 500,
        }
    }
}

/// Outcome of a solve: the re-coordinatized segment set plus diagnostics.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub segment_set: SegmentSet,
    /// Objective value: the sum of the per-coordinate Psi functions.
    pub objective: f64,
    pub projected_grad_norm: f64,
    pub iterations: usize,
    pub report: UniformityReport,
}

/// A projected node is either pinned (the 0/1 endpoints) or a free variable.
#[derive(Debug, Clone, Copy)]
enum Node {
    Fixed(f64),
    Var(usize),
}

/// One `-weight * log(gap)` term between two projected nodes, oriented so the
/// gap starts positive.
#[derive(Debug, Clone, Copy)]
struct Term {
    lo: Node,
    hi: Node,
    weight: f64,
}

/// The optimization problem assembled from a segment set's projections.
#[derive(Debug, Clone)]
pub struct UniformityProblem {
    base: SegmentSet,
    /// Per coordinate: node kinds, in projected (ascending) order.
    nodes: Vec<Vec<Node>>,
    /// Per coordinate: index range of its variables in the global vector.
    var_ranges: Vec<(usize, usize)>,
    n_vars: usize,
    terms: Vec<Term>,
    /// Affine rows (strict CTM only): one per vertex, `A v = b`.
    constraints: Option<(DMatrix<f64>, DVector<f64>)>,
}

impl UniformityProblem {
    /// Marginal-uniformity problem: endpoints pinned to 0 and 1 per
    /// coordinate, interior projected values free, no coupling rows.
    pub fn standard_uniform(s: &SegmentSet) -> Result<Self> {
        Self::build(s, false)
    }

    /// Strict d-CTM problem: the uniformity problem plus one constant-sum row
    /// per vertex.
    pub fn strict_ctm(s: &SegmentSet) -> Result<Self> {
        Self::build(s, true)
    }

    pub fn has_constraints(&self) -> bool {
        self.constraints.is_some()
    }

    fn build(s: &SegmentSet, constrained: bool) -> Result<Self> {
        let mut nodes = Vec::with_capacity(s.d);
        let mut var_ranges = Vec::with_capacity(s.d);
        let mut terms = Vec::new();
        let mut n_vars = 0usize;
        let mut projections = Vec::with_capacity(s.d);
        for l in 1..=s.d {
            let proj = s.project_coordinate(l);
            if let Some(&k) = proj.self_loops.first() {
                return Err(Error::Infeasible(format!(
                    "edge {} projects to a point on coordinate {}; the objective is +inf everywhere",
                    k + 1,
                    l
                )));
            }
            let nl = proj.node_count();
            if nl < 2 {
                return Err(Error::Infeasible(format!(
                    "coordinate {l} has a single projected value; endpoints 0 and 1 cannot both be pinned"
                )));
            }
            let mut coord_nodes = Vec::with_capacity(nl);
            let first_var = n_vars;
            for m in 0..nl {
                if m == 0 {
                    coord_nodes.push(Node::Fixed(0.0));
                } else if m == nl - 1 {
                    coord_nodes.push(Node::Fixed(1.0));
                } else {
                    coord_nodes.push(Node::Var(n_vars));
                    n_vars += 1;
                }
            }
            var_ranges.push((first_var, n_vars));
            let inv_e = 1.0 / s.edge_count() as f64;
            for (&(m, mp), &mult) in &proj.multiplicities {
                terms.push(Term {
                    lo: coord_nodes[m],
                    hi: coord_nodes[mp],
                    weight: mult as f64 * inv_e,
                });
            }
            nodes.push(coord_nodes);
            projections.push(proj);
        }

        let constraints = if constrained {
            let half = s.d as f64 / 2.0;
            let mut a = DMatrix::zeros(s.n, n_vars);
            let mut b = DVector::from_element(s.n, half);
            for (l_idx, proj) in projections.iter().enumerate() {
                for (m, set) in proj.position_sets.iter().enumerate() {
                    for &k in set {
                        match nodes[l_idx][m] {
                            Node::Fixed(x) => b[k - 1] -= x,
                            Node::Var(v) => a[(k - 1, v)] += 1.0,
                        }
                    }
                }
            }
            Some((a, b))
        } else {
            None
        };

        Ok(UniformityProblem {
            base: s.clone(),
            nodes,
            var_ranges,
            n_vars,
            terms,
            constraints,
        })
    }

    /// Equally spaced interior values per coordinate.
    fn initial_point(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.n_vars];
        for coord_nodes in &self.nodes {
            let nl = coord_nodes.len();
            for (m, node) in coord_nodes.iter().enumerate() {
                if let Node::Var(i) = node {
                    v[*i] = m as f64 / (nl - 1) as f64;
                }
            }
        }
        v
    }

    /// Rebuild the coordinate matrix from solved node values.
    fn rebuild(&self, v: &[f64]) -> Result<SegmentSet> {
        let mut coordinates = vec![vec![0.0; self.base.n]; self.base.d];
        for l in 1..=self.base.d {
            let proj = self.base.project_coordinate(l);
            for (m, set) in proj.position_sets.iter().enumerate() {
                let value = node_value(self.nodes[l - 1][m], v);
                for &k in set {
                    coordinates[l - 1][k - 1] = value;
                }
            }
        }
        build_segment_set(coordinates, self.base.edges.clone())
    }
}

fn node_value(node: Node, v: &[f64]) -> f64 {
    match node {
        Node::Fixed(x) => x,
        Node::Var(i) => v[i],
    }
}

/// Value and gradient of `Psi_l` at the given interior values, with the
/// endpoints pinned at 0 and 1.
///
/// The gradient is the analytic derivative of `Psi_l`, component `m` being
/// `(1/|E|) * sum_{m'} n_{(m,m')} / (a_{m'} - a_m)` with signed gaps.
pub fn psi_value_grad(proj: &CoordinateProjection, a_interior: &[f64]) -> Result<(f64, Vec<f64>)> {
    let nl = proj.node_count();
    assert_eq!(
        a_interior.len(),
        nl.saturating_sub(2),
        "expected one value per interior projected node"
    );
    let value_of = |m: usize| -> f64 {
        if m == 0 {
            0.0
        } else if m == nl - 1 {
            1.0
        } else {
            a_interior[m - 1]
        }
    };
    let inv_e = 1.0 / proj.edge_count as f64;
    let mut value = 0.0;
    let mut grad = vec![0.0; a_interior.len()];
    for (&(m, mp), &mult) in &proj.multiplicities {
        let w = mult as f64 * inv_e;
        let gap = value_of(mp) - value_of(m);
        if gap.abs() < 1e-15 {
            return Err(Error::DomainViolation {
                coordinate: proj.coordinate,
                m: m + 1,
                m_prime: mp + 1,
            });
        }
        value -= w * gap.abs().ln();
        if m > 0 && m < nl - 1 {
            grad[m - 1] += w / gap;
        }
        if mp > 0 && mp < nl - 1 {
            grad[mp - 1] -= w / gap;
        }
    }
    Ok((value, grad))
}

/// Kullback-Leibler divergence of the (U_l, K) law from the independent
/// uniform reference, evaluated at the set's own projected values. Equals
/// `Psi_l`.
pub fn kl_divergence(s: &SegmentSet, l: usize) -> Result<f64> {
    let proj = s.project_coordinate(l);
    if let Some(&k) = proj.self_loops.first() {
        return Err(Error::DomainViolation {
            coordinate: l,
            m: proj.edge_nodes[k].0 + 1,
            m_prime: proj.edge_nodes[k].1 + 1,
        });
    }
    let inv_e = 1.0 / proj.edge_count as f64;
    let mut value = 0.0;
    for (&(m, mp), &mult) in &proj.multiplicities {
        value -= mult as f64 * inv_e * (proj.values[mp] - proj.values[m]).abs().ln();
    }
    Ok(value)
}

/// Solve the per-coordinate marginal-uniformity problems (no affine rows);
/// coordinates are independent and solved in parallel.
pub fn solve_standard_uniform(
    problem: &UniformityProblem,
    opts: SolverOptions,
) -> Result<SolveResult> {
    assert!(
        !problem.has_constraints(),
        "standard-uniform solve takes a problem without affine rows"
    );
    let v0 = problem.initial_point();
    let chunks: Vec<(usize, usize)> = problem.var_ranges.clone();
    let solved: Result<Vec<CoreResult>> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let local: Vec<Term> = problem
                .terms
                .iter()
                .filter(|t| term_in_range(t, lo, hi))
                .map(|t| shift_term(t, lo))
                .collect();
            minimize(&local, hi - lo, None, v0[lo..hi].to_vec(), opts)
        })
        .collect();
    let solved = solved?;
    let mut v = vec![0.0; problem.n_vars];
    let mut objective = 0.0;
    let mut grad_norm = 0.0f64;
    let mut iterations = 0;
    for (&(lo, hi), res) in chunks.iter().zip(&solved) {
        v[lo..hi].copy_from_slice(&res.v);
        objective += res.objective;
        grad_norm = grad_norm.max(res.projected_grad_norm);
        iterations = iterations.max(res.iterations);
    }
    finish(problem, v, objective, grad_norm, iterations)
}

/// Solve the strict d-CTM problem (uniformity plus constant-sum rows).
pub fn solve_strict_ctm(problem: &UniformityProblem, opts: SolverOptions) -> Result<SolveResult> {
    let (a, b) = problem
        .constraints
        .as_ref()
        .expect("strict-CTM solve takes a problem with affine rows");
    let v0 = feasible_start(problem, a, b)?;
    let res = minimize(&problem.terms, problem.n_vars, Some((a, b)), v0, opts)?;
    finish(
        problem,
        res.v,
        res.objective,
        res.projected_grad_norm,
        res.iterations,
    )
}

fn finish(
    problem: &UniformityProblem,
    v: Vec<f64>,
    objective: f64,
    projected_grad_norm: f64,
    iterations: usize,
) -> Result<SolveResult> {
    let segment_set = problem.rebuild(&v)?;
    let report = segment_set.uniformity_residuals();
    Ok(SolveResult {
        segment_set,
        objective,
        projected_grad_norm,
        iterations,
        report,
    })
}

fn term_in_range(t: &Term, lo: usize, hi: usize) -> bool {
    let ok = |n: Node| match n {
        Node::Fixed(_) => true,
        Node::Var(i) => i >= lo && i < hi,
    };
    // Terms never straddle coordinates, so checking one variable suffices;
    // fixed-fixed terms belong to every range but contribute a constant 0
    // (endpoints are 0 and 1) or were caught as infeasible earlier. Keep
    // them in the first coordinate only to avoid double counting.
    match (t.lo, t.hi) {
        (Node::Fixed(_), Node::Fixed(_)) => lo == 0,
        (a, b) => ok(a) && ok(b),
    }
}

fn shift_term(t: &Term, lo: usize) -> Term {
    let shift = |n: Node| match n {
        Node::Fixed(x) => Node::Fixed(x),
        Node::Var(i) => Node::Var(i - lo),
    };
    Term {
        lo: shift(t.lo),
        hi: shift(t.hi),
        weight: t.weight,
    }
}

/// Equally spaced start projected onto the affine rows, pulled back into the
/// box if the projection leaves it.
fn feasible_start(
    problem: &UniformityProblem,
    a: &DMatrix<f64>,
    b: &DVector<f64>,
) -> Result<Vec<f64>> {
    let mut v = DVector::from_vec(problem.initial_point());
    if problem.n_vars > 0 {
        let svd = a.clone().svd(true, true);
        for _ in 0..100 {
            let resid = b - a * &v;
            if resid.amax() <= 1e-12 {
                break;
            }
            let correction = svd.solve(&resid, 1e-12).map_err(|e| {
                Error::Infeasible(format!("affine projection failed: {e}"))
            })?;
            v += correction;
            for x in v.iter_mut() {
                *x = x.clamp(0.0, 1.0);
            }
        }
    }
    let resid = (b - a * &v).amax();
    if resid > 1e-8 {
        return Err(Error::InconsistentConstraints { residual: resid });
    }
    // The barrier needs every connected gap strictly positive at the start.
    let vs = v.as_slice().to_vec();
    for t in &problem.terms {
        let gap = node_value(t.hi, &vs) - node_value(t.lo, &vs);
        if gap <= 0.0 {
            return Err(Error::Infeasible(
                "affine projection forces two connected projected values together".into(),
            ));
        }
    }
    Ok(vs)
}

/// Solve the circulant countermonotonic problem: minimize the edge-gap log
/// objective over first rows `x` with `x_1 = 0`, `x_d = 1`, `sum x = d/2`.
///
/// For offsets `{1}` the equally spaced row is the known closed form and is
/// returned without iterating.
pub fn solve_circulant(d: usize, offsets: &[usize], opts: SolverOptions) -> Result<Vec<f64>> {
    if d < 2 {
        return Err(Error::BadConstruction(format!(
            "circulant problems need d >= 2, got {d}"
        )));
    }
    if offsets.is_empty() {
        return Err(Error::BadConstruction("offsets must be nonempty".into()));
    }
    if offsets == [1] || d == 2 {
        return Ok((0..d).map(|i| i as f64 / (d - 1) as f64).collect());
    }
    let edges = circulant_edges(d, offsets)?;
    let n_vars = d - 2;
    let node = |i: usize| -> Node {
        // vertex i is 1-based; interior vertices are the variables
        if i == 1 {
            Node::Fixed(0.0)
        } else if i == d {
            Node::Fixed(1.0)
        } else {
            Node::Var(i - 2)
        }
    };
    let w = 1.0 / edges.len() as f64;
    let terms: Vec<Term> = edges
        .iter()
        .map(|&(i, j)| Term {
            lo: node(i),
            hi: node(j),
            weight: w,
        })
        .collect();
    // Single affine row: the interior coordinates sum to d/2 - 1.
    let a = DMatrix::from_element(1, n_vars, 1.0);
    let b = DVector::from_element(1, d as f64 / 2.0 - 1.0);
    let v0: Vec<f64> = (1..d - 1).map(|i| i as f64 / (d - 1) as f64).collect();
    let res = minimize(&terms, n_vars, Some((&a, &b)), v0, opts)?;
    let mut row = Vec::with_capacity(d);
    row.push(0.0);
    row.extend_from_slice(&res.v);
    row.push(1.0);
    Ok(row)
}

/// Edge set of the circulant graph `C_d(L)`: `(i,j)` with `|i-j|` or
/// `d - |i-j|` in the offset set.
pub fn circulant_edges(d: usize, offsets: &[usize]) -> Result<Vec<(usize, usize)>> {
    let max_offset = d / 2;
    for &o in offsets {
        if o == 0 || o > max_offset {
            return Err(Error::BadConstruction(format!(
                "offset {o} outside 1..={max_offset} for d = {d}"
            )));
        }
    }
    let mut edges = Vec::new();
    for i in 1..=d {
        for j in i + 1..=d {
            let diff = j - i;
            if offsets.contains(&diff) || offsets.contains(&(d - diff)) {
                edges.push((i, j));
            }
        }
    }
    if edges.is_empty() {
        return Err(Error::EmptyEdgeSet);
    }
    Ok(edges)
}

#[derive(Debug)]
struct CoreResult {
    v: Vec<f64>,
    objective: f64,
    projected_grad_norm: f64,
    iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Bound {
    Lower,
    Upper,
}

fn eval_f(terms: &[Term], v: &[f64]) -> f64 {
    let mut f = 0.0;
    for t in terms {
        let gap = node_value(t.hi, v) - node_value(t.lo, v);
        if gap <= 0.0 {
            return f64::INFINITY;
        }
        f -= t.weight * gap.ln();
    }
    f
}

fn eval(terms: &[Term], n: usize, v: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
    let mut f = 0.0;
    let mut g = DVector::zeros(n);
    let mut h = DMatrix::zeros(n, n);
    for t in terms {
        let gap = node_value(t.hi, v) - node_value(t.lo, v);
        f -= t.weight * gap.ln();
        let d1 = t.weight / gap;
        let d2 = t.weight / (gap * gap);
        if let Node::Var(i) = t.hi {
            g[i] -= d1;
            h[(i, i)] += d2;
        }
        if let Node::Var(i) = t.lo {
            g[i] += d1;
            h[(i, i)] += d2;
        }
        if let (Node::Var(i), Node::Var(j)) = (t.lo, t.hi) {
            h[(i, j)] -= d2;
            h[(j, i)] -= d2;
        }
    }
    (f, g, h)
}

/// Orthonormal null-space basis of `m` restricted to nothing (full matrix),
/// via the symmetric eigendecomposition of `m' m`.
fn null_basis(m: &DMatrix<f64>) -> DMatrix<f64> {
    let nf = m.ncols();
    let gram = m.transpose() * m;
    let eig = gram.symmetric_eigen();
    let max_ev = eig.eigenvalues.amax().max(1e-300);
    let keep: Vec<usize> = (0..nf)
        .filter(|&i| eig.eigenvalues[i] <= 1e-12 * max_ev)
        .collect();
    let mut basis = DMatrix::zeros(nf, keep.len());
    for (col, &i) in keep.iter().enumerate() {
        basis.set_column(col, &eig.eigenvectors.column(i));
    }
    basis
}

/// Active-set damped Newton over the box with equality rows eliminated by a
/// null-space basis.
fn minimize(
    terms: &[Term],
    n_vars: usize,
    affine: Option<(&DMatrix<f64>, &DVector<f64>)>,
    v0: Vec<f64>,
    opts: SolverOptions,
) -> Result<CoreResult> {
    let mut v = v0;
    if n_vars == 0 {
        if let Some((a, b)) = affine {
            let resid = (b - a * DVector::from_vec(v.clone())).amax();
            if resid > 1e-8 {
                return Err(Error::InconsistentConstraints { residual: resid });
            }
        }
        return Ok(CoreResult {
            v,
            objective: eval_f(terms, &[]),
            projected_grad_norm: 0.0,
            iterations: 0,
        });
    }
    let mut working: Vec<Option<Bound>> = v
        .iter()
        .map(|&x| {
            if x <= 1e-14 {
                Some(Bound::Lower)
            } else if x >= 1.0 - 1e-14 {
                Some(Bound::Upper)
            } else {
                None
            }
        })
        .collect();
    let mut iterations = 0usize;

    loop {
        iterations += 1;
        if iterations > opts.max_iterations {
            return Err(Error::MaxIterations(opts.max_iterations));
        }
        let (f, g, h) = eval(terms, n_vars, &v);
        if !f.is_finite() {
            return Err(Error::Infeasible(
                "objective not finite at the current iterate".into(),
            ));
        }
        let free: Vec<usize> = (0..n_vars).filter(|&i| working[i].is_none()).collect();
        let nf = free.len();

        // Reduced space: null basis of the equality rows over free variables.
        let basis = match affine {
            Some((a, _)) if nf > 0 => {
                let af = a.select_columns(free.iter());
                Some(null_basis(&af))
            }
            _ => None,
        };
        let q = basis.as_ref().map_or(nf, |n| n.ncols());

        let gf = DVector::from_iterator(nf, free.iter().map(|&i| g[i]));
        let gr = match &basis {
            Some(nmat) => nmat.transpose() * &gf,
            None => gf.clone(),
        };
        let grad_norm = if q == 0 { 0.0 } else { gr.amax() };

        if grad_norm <= opts.grad_tol {
            // KKT: check the signs of the bound multipliers before declaring
            // optimality; release the worst offender otherwise.
            let release = released_variable(&g, affine, &free, &working);
            match release {
                Some(i) => {
                    working[i] = None;
                    continue;
                }
                None => {
                    return Ok(CoreResult {
                        v,
                        objective: f,
                        projected_grad_norm: grad_norm,
                        iterations,
                    });
                }
            }
        }

        // Newton direction in the reduced space, ridged if needed.
        let hff = h.select_rows(free.iter()).select_columns(free.iter());
        let hr = match &basis {
            Some(nmat) => nmat.transpose() * &hff * nmat,
            None => hff.clone(),
        };
        let mut pr = None;
        let mut ridge = 0.0;
        let scale = hr.diagonal().amax().max(1.0);
        for _ in 0..8 {
            let mut m = hr.clone();
            for i in 0..q {
                m[(i, i)] += ridge;
            }
            if let Some(chol) = m.cholesky() {
                pr = Some(chol.solve(&(-&gr)));
                break;
            }
            ridge = if ridge == 0.0 { 1e-12 * scale } else { ridge * 100.0 };
        }
        let pr = pr.unwrap_or_else(|| -&gr);
        let pf = match &basis {
            Some(nmat) => nmat * &pr,
            None => pr,
        };
        let mut p = vec![0.0; n_vars];
        for (idx, &i) in free.iter().enumerate() {
            p[i] = pf[idx];
        }
        let slope: f64 = (0..n_vars).map(|i| g[i] * p[i]).sum();
        if slope >= 0.0 {
            // Numerical stall: the reduced gradient is tiny but above tol.
            return Ok(CoreResult {
                v,
                objective: f,
                projected_grad_norm: grad_norm,
                iterations,
            });
        }

        // Longest step before a bound or a connected gap closes.
        let mut t_bound = f64::INFINITY;
        let mut blocking: Option<(usize, Bound)> = None;
        for &i in &free {
            if p[i] < 0.0 {
                let t = v[i] / -p[i];
                if t < t_bound {
                    t_bound = t;
                    blocking = Some((i, Bound::Lower));
                }
            } else if p[i] > 0.0 {
                let t = (1.0 - v[i]) / p[i];
                if t < t_bound {
                    t_bound = t;
                    blocking = Some((i, Bound::Upper));
                }
            }
        }
        let mut t_gap = f64::INFINITY;
        for t in terms {
            let gap = node_value(t.hi, &v) - node_value(t.lo, &v);
            let dgap = dir_value(t.hi, &p) - dir_value(t.lo, &p);
            if dgap < 0.0 {
                t_gap = t_gap.min(-gap / dgap);
            }
        }
        let t_start = 1.0f64.min(t_bound).min(0.995 * t_gap);

        // Armijo backtracking.
        let mut t = t_start;
        let mut accepted = false;
        for _ in 0..70 {
            let vt = step(&v, &p, t, t_bound, blocking);
            let ft = eval_f(terms, &vt);
            if ft <= f + 1e-4 * t * slope {
                let hit_bound = (t - t_bound).abs() < 1e-15 && blocking.is_some();
                v = vt;
                if hit_bound {
                    let (i, side) = blocking.unwrap();
                    working[i] = Some(side);
                }
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::MaxIterations(opts.max_iterations));
        }
    }
}

fn dir_value(node: Node, p: &[f64]) -> f64 {
    match node {
        Node::Fixed(_) => 0.0,
        Node::Var(i) => p[i],
    }
}

fn step(v: &[f64], p: &[f64], t: f64, t_bound: f64, blocking: Option<(usize, Bound)>) -> Vec<f64> {
    let mut out: Vec<f64> = v.iter().zip(p).map(|(&x, &px)| x + t * px).collect();
    if (t - t_bound).abs() < 1e-15 {
        if let Some((i, side)) = blocking {
            out[i] = match side {
                Bound::Lower => 0.0,
                Bound::Upper => 1.0,
            };
        }
    }
    out
}

/// Multiplier sign check for the working set; returns a variable to release.
fn released_variable(
    g: &DVector<f64>,
    affine: Option<(&DMatrix<f64>, &DVector<f64>)>,
    free: &[usize],
    working: &[Option<Bound>],
) -> Option<usize> {
    let n_vars = working.len();
    // Estimate equality multipliers from the free block: nu minimizing
    // ||g_F + A_F' nu||.
    let at_nu: DVector<f64> = match affine {
        Some((a, _)) => {
            let af = a.select_columns(free.iter());
            let gf = DVector::from_iterator(free.len(), free.iter().map(|&i| g[i]));
            let gram = &af * af.transpose();
            let rhs = -(&af * gf);
            let nu = gram
                .svd(true, true)
                .solve(&rhs, 1e-12)
                .unwrap_or_else(|_| DVector::zeros(a.nrows()));
            a.transpose() * nu
        }
        None => DVector::zeros(n_vars),
    };
    let tol = 1e-8 * (1.0 + g.amax());
    let mut worst: Option<(usize, f64)> = None;
    for i in 0..n_vars {
        let viol = match working[i] {
            Some(Bound::Lower) => -(g[i] + at_nu[i]), // need g + A'nu >= 0
            Some(Bound::Upper) => g[i] + at_nu[i],    // need g + A'nu <= 0
            None => continue,
        };
        if viol > tol && worst.is_none_or(|(_, w)| viol > w) {
            worst = Some((i, viol));
        }
    }
    worst.map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segments::build_segment_set;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c3_triangle() -> SegmentSet {
        // CCV on C_3({1}): rows are circular shifts of (0, 1/2, 1).
        build_segment_set(
            vec![
                vec![0.0, 0.5, 1.0],
                vec![0.5, 1.0, 0.0],
                vec![1.0, 0.0, 0.5],
            ],
            vec![(1, 2), (1, 3), (2, 3)],
        )
        .unwrap()
    }

    #[test]
    fn psi_gradient_vanishes_at_c3_solution() {
        let s = c3_triangle();
        let p = s.project_coordinate(1);
        let (value, grad) = psi_value_grad(&p, &[0.5]).unwrap();
        assert!(grad[0].abs() < 1e-14, "gradient {grad:?}");
        // Psi = (1/3)(-ln(1/2) - ln(1/2) - ln 1) = (2/3) ln 2
        assert!((value - 2.0 / 3.0 * 2.0f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn psi_empty_interior_is_zero() {
        let s = build_segment_set(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![(1, 2)]).unwrap();
        let p = s.project_coordinate(1);
        let (value, grad) = psi_value_grad(&p, &[]).unwrap();
        assert_eq!(value, 0.0);
        assert!(grad.is_empty());
    }

    #[test]
    fn psi_gradient_matches_central_differences() {
        // 100 random feasible interior points on the C_4({1}) projection.
        let row = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];
        let mut coords = Vec::new();
        for shift in 0..4usize {
            coords.push((0..4).map(|i| row[(i + shift) % 4]).collect::<Vec<_>>());
        }
        let s = build_segment_set(coords, circulant_edges(4, &[1]).unwrap()).unwrap();
        let p = s.project_coordinate(1);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let h = 1e-6;
        for _ in 0..100 {
            // Gaps bounded away from zero keep the finite-difference step
            // valid against the 1/gap^2 curvature.
            let a = 0.02 + 0.46 * rng.random::<f64>();
            let b = (a + 0.02 + (0.96 - a) * rng.random::<f64>()).min(0.98);
            let x = vec![a, b];
            let (_, grad) = psi_value_grad(&p, &x).unwrap();
            for i in 0..2 {
                let mut hi = x.clone();
                let mut lo = x.clone();
                hi[i] += h;
                lo[i] -= h;
                let (fh, _) = psi_value_grad(&p, &hi).unwrap();
                let (fl, _) = psi_value_grad(&p, &lo).unwrap();
                let fd = (fh - fl) / (2.0 * h);
                let denom = grad[i].abs().max(1.0);
                assert!(
                    (grad[i] - fd).abs() / denom < 1e-6,
                    "grad {} vs fd {}",
                    grad[i],
                    fd
                );
            }
        }
    }

    #[test]
    fn psi_domain_violation_on_coincident_values() {
        let s = c3_triangle();
        let p = s.project_coordinate(1);
        assert!(matches!(
            psi_value_grad(&p, &[0.0]),
            Err(Error::DomainViolation { .. })
        ));
    }

    #[test]
    fn kl_equals_psi_at_projection_values() {
        let s = c3_triangle();
        let p = s.project_coordinate(1);
        let (psi, _) = psi_value_grad(&p, &[0.5]).unwrap();
        let kl = kl_divergence(&s, 1).unwrap();
        assert!((kl - psi).abs() < 1e-12);
        // Independent oracle: direct summation of -log segment widths over
        // the edge list.
        let direct: f64 = (1..=s.edge_count())
            .map(|k| {
                let (a, b) = s.conditional_support(k, 1).unwrap();
                -(b - a).ln() / s.edge_count() as f64
            })
            .sum();
        assert!((kl - direct).abs() < 1e-12);
        // Antithetic pair: KL = -ln(1) = 0.
        let pair =
            build_segment_set(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![(1, 2)]).unwrap();
        assert_eq!(kl_divergence(&pair, 1).unwrap(), 0.0);
    }

    #[test]
    fn two_diagonal_square_solves_to_zero_objective() {
        // Both coordinates project to the pinned endpoints only; nothing to
        // optimize and the objective is exactly 0.
        let s = build_segment_set(
            vec![vec![1.0, 0.0, 1.0, 0.0], vec![0.0, 1.0, 1.0, 0.0]],
            vec![(1, 2), (3, 4)],
        )
        .unwrap();
        let problem = UniformityProblem::standard_uniform(&s).unwrap();
        let res = solve_standard_uniform(&problem, SolverOptions::default()).unwrap();
        assert_eq!(res.objective, 0.0);
        assert!(res.report.is_standard_uniform(1e-12));
    }

    #[test]
    fn circulant_closed_forms_match_published_rows() {
        let opts = SolverOptions::default();
        let cases: Vec<(usize, Vec<usize>, Vec<f64>)> = vec![
            (2, vec![1], vec![0.0, 1.0]),
            (3, vec![1], vec![0.0, 0.5, 1.0]),
            (4, vec![1], vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]),
            (
                4,
                vec![1, 2],
                vec![
                    0.0,
                    0.5 - 0.5 / 5.0f64.sqrt(),
                    0.5 + 0.5 / 5.0f64.sqrt(),
                    1.0,
                ],
            ),
            (4, vec![2], vec![0.0, 0.0, 1.0, 1.0]),
            (5, vec![1], vec![0.0, 0.25, 0.5, 0.75, 1.0]),
            (
                5,
                vec![1, 2],
                vec![
                    0.0,
                    0.5 - 3.0f64.sqrt() / (2.0 * 7.0f64.sqrt()),
                    0.5,
                    0.5 + 3.0f64.sqrt() / (2.0 * 7.0f64.sqrt()),
                    1.0,
                ],
            ),
            (5, vec![2], vec![0.0, 0.0, 0.5, 1.0, 1.0]),
        ];
        for (d, offsets, expected) in cases {
            let row = solve_circulant(d, &offsets, opts).unwrap();
            for (got, want) in row.iter().zip(&expected) {
                assert!(
                    (got - want).abs() < 1e-8,
                    "C_{d}({offsets:?}): got {row:?}, want {expected:?}"
                );
            }
        }
    }

    #[test]
    fn general_ctm_solver_recovers_circulant_solution() {
        // Build the C_4({1}) segment set, scramble its interior coordinates
        // is not possible (the problem is built from the graph), so solve
        // directly and compare against the closed form.
        let row = vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];
        let mut coords = Vec::new();
        for shift in 0..4usize {
            coords.push((0..4).map(|i| row[(i + shift) % 4]).collect::<Vec<_>>());
        }
        let s = build_segment_set(coords, circulant_edges(4, &[1]).unwrap()).unwrap();
        let problem = UniformityProblem::strict_ctm(&s).unwrap();
        let res = solve_strict_ctm(&problem, SolverOptions::default()).unwrap();
        assert!(res.projected_grad_norm <= 1e-10);
        assert!(res.report.is_standard_uniform(1e-8));
        assert!(res.report.is_constant_sum(1e-10));
        let mut first_row = res.segment_set.coordinates[0].clone();
        first_row.sort_by(f64::total_cmp);
        for (got, want) in first_row.iter().zip(&row) {
            assert!((got - want).abs() < 1e-8, "{first_row:?}");
        }
    }

    #[test]
    fn antithetic_pair_ctm_solution() {
        let s = build_segment_set(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![(1, 2)]).unwrap();
        let problem = UniformityProblem::strict_ctm(&s).unwrap();
        let res = solve_strict_ctm(&problem, SolverOptions::default()).unwrap();
        let x = &res.segment_set;
        assert!((x.vertex_sum(1) - 1.0).abs() < 1e-12);
        assert!((x.vertex_sum(2) - 1.0).abs() < 1e-12);
        let mut col1: Vec<f64> = (1..=2).map(|l| x.x(l, 1)).collect();
        col1.sort_by(f64::total_cmp);
        assert_eq!(col1, vec![0.0, 1.0]);
    }

    #[test]
    fn inconsistent_constraints_detected() {
        // Comonotone diagonal: both coordinates pinned to the endpoints, so
        // every vertex sum is 0 or d, never d/2.
        let s = build_segment_set(vec![vec![0.0, 1.0], vec![0.0, 1.0]], vec![(1, 2)]).unwrap();
        let problem = UniformityProblem::strict_ctm(&s).unwrap();
        match solve_strict_ctm(&problem, SolverOptions::default()) {
            Err(Error::InconsistentConstraints { .. }) => {}
            other => panic!("expected InconsistentConstraints, got {other:?}"),
        }
    }

    #[test]
    fn admissibility_violation_is_infeasible() {
        let s = build_segment_set(
            vec![vec![0.0, 1.0, 0.5], vec![0.5, 0.5, 1.0]],
            vec![(1, 2), (1, 3)],
        )
        .unwrap();
        match UniformityProblem::standard_uniform(&s) {
            Err(Error::Infeasible(_)) => {}
            other => panic!("expected Infeasible, got {other:?}"),
        }
    }

    #[test]
    fn standard_uniform_solve_on_aj_graph_gives_equal_spacing() {
        let s = crate::catalog::aj_segment_set(3, 2).unwrap();
        let problem = UniformityProblem::standard_uniform(&s).unwrap();
        let res = solve_standard_uniform(&problem, SolverOptions::default()).unwrap();
        assert!(res.report.max_coordinate_residual() < 1e-8);
        for l in 1..=3usize {
            let p = res.segment_set.project_coordinate(l);
            let nl = p.node_count();
            for (m, &val) in p.values.iter().enumerate() {
                let want = m as f64 / (nl - 1) as f64;
                assert!((val - want).abs() < 1e-8, "coordinate {l} values {:?}", p.values);
            }
        }
    }

    #[test]
    fn example_square_solves_to_half() {
        // Admissible 3-edge set of the worked 2-d example; the solved first
        // coordinate must put the middle value at 1/2.
        let s = build_segment_set(
            vec![vec![0.0, 0.25, 1.0, 0.0], vec![0.25, 0.0, 0.25, 0.0]],
            vec![(1, 2), (2, 3), (3, 4)],
        )
        .unwrap();
        let problem = UniformityProblem::standard_uniform(&s).unwrap();
        let res = solve_standard_uniform(&problem, SolverOptions::default()).unwrap();
        let p = res.segment_set.project_coordinate(1);
        assert!((p.values[1] - 0.5).abs() < 1e-9, "{:?}", p.values);
        assert!(res.report.is_standard_uniform(1e-8));
    }

    #[test]
    fn midpoint_convexity_along_feasible_chords() {
        let s = c3_triangle();
        let p = s.project_coordinate(1);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let a = [rng.random::<f64>() * 0.9 + 0.05];
            let b = [rng.random::<f64>() * 0.9 + 0.05];
            let mid = [(a[0] + b[0]) / 2.0];
            let (fa, _) = psi_value_grad(&p, &a).unwrap();
            let (fb, _) = psi_value_grad(&p, &b).unwrap();
            let (fm, _) = psi_value_grad(&p, &mid).unwrap();
            assert!(fm <= 0.5 * (fa + fb) + 1e-10);
        }
    }
}
