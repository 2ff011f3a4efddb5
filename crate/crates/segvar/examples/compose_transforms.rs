//! The transformation algebra: reflections, permutations, stochastic
//! composition (graph union) and deterministic composition (map
//! composition), with the sufficient condition for preserving the constant
//! sum.
//!
//! Run with: `cargo run --release --example compose_transforms`

use segvar::catalog::{aj_segment_set, ccv_segment_set, lh_segment_set};
use segvar::transforms::{
    ctm_composition_check, deterministic_compose, permute_vector, reflect, stochastic_compose,
};

fn main() {
    let u = vec![0.2, 0.5, 0.8]; // a strictly countermonotonic point: sum 3/2
    println!("u                = {u:?}  (sum {})", u.iter().sum::<f64>());
    let full = reflect(&u, &[1, 2, 3]);
    println!("full reflection  = {full:?}  (sum {})", full.iter().sum::<f64>());
    let partial = reflect(&u, &[1]);
    println!("partial reflect  = {partial:?}  (sum {})", partial.iter().sum::<f64>());
    let perm = permute_vector(&u, &[3, 1, 2]).unwrap();
    println!("permutation      = {perm:?}  (sum {})", perm.iter().sum::<f64>());
    println!();

    // Stochastic composition: union of the triangle and the displacement
    // segments; both strictly countermonotonic, so the union is too.
    let triangle = ccv_segment_set(3, &[1]).unwrap();
    let aj = aj_segment_set(3, 2).unwrap();
    let union = stochastic_compose(&triangle, &aj).unwrap();
    let report = union.uniformity_residuals();
    println!(
        "stochastic composition: {} vertices, {} edges, uniform {}, constant sum {}",
        union.n,
        union.edge_count(),
        report.is_standard_uniform(1e-9),
        report.is_constant_sum(1e-10)
    );

    // Deterministic composition: the Latin hypercube structure over the
    // triangle. The LH structure has constant edge width c1 = 1/d and
    // offset sum c2 = (1 - 1/d) d/2, so it preserves the constant sum.
    let lh = lh_segment_set(3).unwrap();
    let check = ctm_composition_check(&lh);
    println!(
        "lh structure: c1 = {:.4} (constant {}), c2 = {:.4} (constant {}), preserves = {}",
        check.c1, check.c1_constant, check.c2, check.c2_constant, check.preserves
    );
    let composed = deterministic_compose(&lh, &triangle).unwrap();
    let report = composed.uniformity_residuals();
    println!(
        "lh over triangle: {} vertices, {} edges, uniform {}, constant sum {}",
        composed.n,
        composed.edge_count(),
        report.is_standard_uniform(1e-9),
        report.is_constant_sum(1e-10)
    );
}
