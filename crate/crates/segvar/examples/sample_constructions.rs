//! Draw from every catalog construction and inspect the two properties that
//! define the class: uniform marginals (KS test) and, where advertised, the
//! almost-sure constant sum.
//!
//! Run with: `cargo run --release --example sample_constructions`

use segvar::catalog::{Construction, Kind};
use segvar::sampling::sample_batch;
use segvar::stats;

fn main() {
    let d = 4;
    let n = 100_000;
    let constructions = vec![
        Construction::new(Kind::Rotation { d }),
        Construction::new(Kind::Aj { d, b: 2 }),
        Construction::new(Kind::Aj { d, b: 3 }),
        Construction::new(Kind::GaffkeD { d }),
        Construction::new(Kind::Ccv { d, offsets: vec![1] }),
        Construction::new(Kind::Ccv { d, offsets: vec![1, 2] }),
        Construction::new(Kind::Rbs { d }),
        Construction::new(Kind::Ilh { d, t: 1, base: None }),
        Construction::new(Kind::Ccv { d, offsets: vec![1] }).exchangeable(),
    ];
    let crit = stats::ks_critical(n, 0.01);
    println!(
        "{:<22} {:>10} {:>14} {:>9}",
        "construction", "worst KS", "max|sum-d/2|", "CTM?"
    );
    for (i, c) in constructions.iter().enumerate() {
        let batch = sample_batch(&*c.sampler().unwrap(), n, 11, i as u64, &c.label());
        let mut worst_ks = 0.0f64;
        for l in 0..d {
            let mut col = batch.column(l);
            worst_ks = worst_ks.max(stats::ks_statistic_uniform(&mut col));
        }
        let max_residual = batch
            .rows()
            .map(|row| (row.iter().sum::<f64>() - d as f64 / 2.0).abs())
            .fold(0.0f64, f64::max);
        println!(
            "{:<22} {:>10.5} {:>14.2e} {:>9}",
            c.label(),
            worst_ks,
            max_residual,
            if c.advertises_ctm() { "yes" } else { "no" }
        );
    }
    println!("(KS critical value at 1%: {crit:.5})");
}
