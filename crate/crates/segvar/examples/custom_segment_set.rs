//! Design a sampler from scratch: pick a graph, let the solvers place the
//! coordinates.
//!
//! Part 1 rebuilds the worked 2-d example: a 3-segment path across the unit
//! square whose middle value must sit at 1/2 for standard uniformity.
//! Part 2 takes a pentagon graph whose rows are circular shifts of a wrong
//! guess and lets the strict solver recover the equally spaced circulant
//! solution.
//!
//! Run with: `cargo run --release --example custom_segment_set`

use segvar::concordance::{exact_report, VModel};
use segvar::optimizer::{
    solve_standard_uniform, solve_strict_ctm, SolverOptions, UniformityProblem,
};
use segvar::sampling::draw;
use segvar::segments::build_segment_set;

fn main() {
    // Part 1: the admissible 3-edge square. Structure fixes which values
    // coincide; the solver moves the middle value to 1/2.
    let square = build_segment_set(
        vec![
            vec![0.0, 0.25, 1.0, 0.0],
            vec![0.25, 0.0, 0.25, 0.0],
        ],
        vec![(1, 2), (2, 3), (3, 4)],
    )
    .unwrap();
    let problem = UniformityProblem::standard_uniform(&square).unwrap();
    let solved = solve_standard_uniform(&problem, SolverOptions::default()).unwrap();
    println!(
        "square: solved middle value = {:.6} (expect 0.5), max residual {:.1e}",
        solved.segment_set.project_coordinate(1).values[1],
        solved.report.max_coordinate_residual()
    );

    // Part 2: pentagon graph, rows are shifts of a deliberately wrong first
    // row. The strict solver must land on the circulant closed form.
    let guess = [0.0, 0.1, 0.3, 0.7, 1.0];
    let rows: Vec<Vec<f64>> = (0..5)
        .map(|shift| (0..5).map(|i| guess[(i + shift) % 5]).collect())
        .collect();
    let edges = vec![(1, 2), (1, 5), (2, 3), (3, 4), (4, 5)];
    let pentagon = build_segment_set(rows, edges).unwrap();
    let problem = UniformityProblem::strict_ctm(&pentagon).unwrap();
    let solved = solve_strict_ctm(&problem, SolverOptions::default()).unwrap();
    println!(
        "pentagon: solved in {} iterations, projected gradient {:.1e}",
        solved.iterations, solved.projected_grad_norm
    );
    println!("  first row: {:?}", solved.segment_set.coordinates[0]);
    println!(
        "  uniform: {}   constant sum: {}",
        solved.report.is_standard_uniform(1e-8),
        solved.report.is_constant_sum(1e-10)
    );

    let batch = draw(&solved.segment_set, 50_000, 11).unwrap();
    let max_residual = batch
        .rows()
        .map(|row| (row.iter().sum::<f64>() - 2.5).abs())
        .fold(0.0f64, f64::max);
    println!("  max |sum - 5/2| over 50k draws: {max_residual:.2e}");

    let measures = exact_report(&solved.segment_set, VModel::Common).unwrap();
    println!(
        "  exact tau = {:.4} (minimum {:.4}), exact rho = {:.4}",
        measures.tau.unwrap(),
        measures.tau_min,
        measures.rho.unwrap()
    );
}
