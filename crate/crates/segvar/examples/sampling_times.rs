//! Wall-clock cost of the sampling schemes as the dimension grows. The
//! random-balanced route to the exchangeable circulant draws avoids the
//! segment machinery entirely and is the one to use inside tight loops.
//!
//! Run with: `cargo run --release --example sampling_times`

use segvar::bench::sampling_time_study;

fn main() {
    let names: Vec<String> = ["rbs", "ccv-exch", "aj2", "rotation", "gaffke-d", "lh"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let d_values = [2usize, 5, 10, 20];
    let rows = sampling_time_study(&names, &d_values, 5000, 20, 11).unwrap();
    println!("mean seconds to draw 5000 vectors (20 runs):");
    print!("{:<12}", "d");
    for &d in &d_values {
        print!("{d:>12}");
    }
    println!();
    for name in &names {
        print!("{name:<12}");
        for &d in &d_values {
            let row = rows
                .iter()
                .find(|r| &r.construction == name && r.d == d)
                .unwrap();
            print!("{:>12.2e}", row.mean_time_s);
        }
        println!();
    }
}
