//! The central limit theorem for generalized Latin hypercube averages: the
//! variance of sqrt(d) (X_bar - E f) converges to the ANOVA residual
//! integral, and the base measure of the V vectors does not matter in the
//! limit.
//!
//! Run with: `cargo run --release --example clt_check`

use segvar::bench::{clt_check, CltBase, CltIntegrand};

fn main() {
    let d_list = [16usize, 64, 256, 1024];
    let reps = 4000;

    println!("f(u) = u1 u2: residual integral 1/144 = {:.6e}", 1.0 / 144.0);
    for base in [CltBase::Iid, CltBase::Aj2] {
        let rows = clt_check(CltIntegrand::Product2, &d_list, reps, base, 11).unwrap();
        println!("  base = {}", base.label());
        for row in rows {
            println!(
                "    d = {:>5}: var = {:.4e} (se {:.1e})",
                row.d, row.variance, row.variance_se
            );
        }
    }

    println!(
        "\nf(u) = u1 + u2 (additive): residual 0, iid-sampling variance {:.4}",
        CltIntegrand::Additive2.iid_variance()
    );
    let rows = clt_check(CltIntegrand::Additive2, &d_list, reps, CltBase::Iid, 12).unwrap();
    for row in rows {
        println!("    d = {:>5}: var = {:.4e}", row.d, row.variance);
    }
}
