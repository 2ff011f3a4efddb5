//! Closed-form joint and conditional CDFs of a segment-set vector, checked
//! against the empirical CDF of one million draws.
//!
//! Run with: `cargo run --release --example joint_cdf`

use segvar::catalog::aj_segment_set;
use segvar::sampling::{conditional_cdf, draw, joint_cdf};

fn main() {
    let set = aj_segment_set(3, 2).unwrap();
    let batch = draw(&set, 1_000_000, 11).unwrap();

    let points = [
        [0.3, 0.6, 0.8],
        [0.5, 0.5, 0.5],
        [0.9, 0.2, 0.7],
        [1.0, 1.0, 1.0],
    ];
    println!("{:<18} {:>10} {:>10}", "u", "F(u)", "empirical");
    for u in &points {
        let exact = joint_cdf(&set, u).unwrap();
        let hits = batch
            .rows()
            .filter(|row| row.iter().zip(u).all(|(x, b)| x <= b))
            .count();
        let emp = hits as f64 / batch.n as f64;
        println!("{:<18} {exact:>10.5} {emp:>10.5}", format!("{u:?}"));
    }

    println!("\nconditional on each segment at u = [0.3, 0.6, 0.8]:");
    for k in 1..=set.edge_count() {
        println!(
            "  edge {k}: {:.5}",
            conditional_cdf(&set, k, &[0.3, 0.6, 0.8]).unwrap()
        );
    }
}
