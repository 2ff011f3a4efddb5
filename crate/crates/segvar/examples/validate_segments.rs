//! Build segment sets by hand and inspect the three assumption checks:
//! admissibility (no segment parallel to a hyperface), range (each
//! coordinate spans [0,1]), and the per-cell coordinate equations.
//!
//! Run with: `cargo run --release --example validate_segments`

use segvar::segments::build_segment_set;

fn show(name: &str, set: &segvar::segments::SegmentSet) {
    let report = set.uniformity_residuals();
    println!("{name}:");
    println!("  admissibility violations: {:?}", report.admissibility_violations);
    println!("  range violations:         {:?}", report.range_violations);
    println!("  max |F_lm| residual:      {:.3e}", report.max_coordinate_residual());
    println!("  max |sum - d/2|:          {:.3e}", report.max_constant_sum_residual());
    println!(
        "  standard uniform: {}   constant sum: {}",
        report.is_standard_uniform(1e-8),
        report.is_constant_sum(1e-10),
    );
}

fn main() {
    // The antithetic pair: the smallest strictly countermonotonic set.
    let pair = build_segment_set(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![(1, 2)]).unwrap();
    show("antithetic pair", &pair);

    // Both diagonals of the unit square: a mixture of an antithetic and a
    // comonotonic couple, still standard uniform, sums not constant.
    let cross = build_segment_set(
        vec![vec![1.0, 0.0, 1.0, 0.0], vec![0.0, 1.0, 1.0, 0.0]],
        vec![(1, 2), (3, 4)],
    )
    .unwrap();
    show("two diagonals", &cross);

    // A flawed set: the middle value sits at 0.25 where the coordinate
    // equations demand 1/2, and the second coordinate never reaches 1.
    let flawed = build_segment_set(
        vec![
            vec![0.0, 0.25, 1.0, 0.0],
            vec![0.25, 0.0, 0.25, 0.0],
        ],
        vec![(1, 2), (2, 3), (3, 4)],
    )
    .unwrap();
    show("flawed square", &flawed);
    println!(
        "  flawed residuals per coordinate: {:?}",
        flawed.uniformity_residuals().coordinate_residuals
    );
}
