//! Metropolis-within-Gibbs for the hierarchical Poisson pump-failure model,
//! comparing the two antithetic coupling modes: proposals only, or
//! proposals plus the Metropolis acceptance uniforms.
//!
//! Run with: `cargo run --release --example mcmc_pumps`

use segvar::bench::{pumps_mwg, McmcConfig};
use std::path::PathBuf;

fn main() {
    let data = PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data/pumps.csv"));
    for antithetic_acceptance in [false, true] {
        let config = McmcConfig {
            data_path: Some(data.clone()),
            d: 2,
            iterations: 2000,
            burn_in: 500,
            replications: 40,
            antithetic_acceptance,
            seed: 11,
        };
        let result = pumps_mwg(&config).unwrap();
        println!(
            "acceptance uniforms coupled: {antithetic_acceptance} ({} replications)",
            result.replications
        );
        for j in 0..result.parameters.len() {
            println!(
                "  {:<6} ratio = {:.3} [{:.3}, {:.3}]   posterior mean: coupled {:.4} vs iid {:.4}",
                result.parameters[j],
                result.ratio_mean[j],
                result.ratio_min[j],
                result.ratio_max[j],
                result.coupled_mean[j],
                result.iid_mean[j],
            );
        }
        println!();
    }
}
