//! Solve the circulant countermonotonic problems behind the published
//! first-row table and print each solution with its exact Spearman rho.
//!
//! Run with: `cargo run --release --example solve_circulant`

use segvar::catalog::ccv_segment_set;
use segvar::concordance::{spearman_rho_exact, VModel};
use segvar::optimizer::{solve_circulant, SolverOptions};

fn main() {
    let graphs: Vec<(usize, Vec<usize>)> = vec![
        (2, vec![1]),
        (3, vec![1]),
        (4, vec![1]),
        (4, vec![1, 2]),
        (4, vec![2]),
        (5, vec![1]),
        (5, vec![1, 2]),
        (5, vec![2]),
    ];
    println!("{:<14} {:<44} {:>8}", "graph", "first row", "rho");
    for (d, offsets) in graphs {
        let row = solve_circulant(d, &offsets, SolverOptions::default()).unwrap();
        let set = ccv_segment_set(d, &offsets).unwrap();
        let rho = spearman_rho_exact(&set, VModel::Common).unwrap();
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.6}")).collect();
        println!(
            "C_{d}({offsets:?})      {:<44} {rho:>8.4}",
            cells.join(", ")
        );
    }
}
