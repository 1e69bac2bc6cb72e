//! Admissibility diagnostics for candidate weight sequences: monotonicity,
//! the doubling constant of w(n²) ≤ C·w(n), envelope ratios against log and
//! log², and partial sums of Σ 1/(n·w(n)).
//!
//! Run with `cargo run --example weight_diagnostics`.

use trigsys::lab::weight_check;
use trigsys::weights::WeightSequence;

fn main() -> trigsys::Result<()> {
    let n_max = 1_000_000u64;
    for (name, w) in [
        ("log(n+2)", WeightSequence::log()),
        ("log²(n+2)", WeightSequence::log_sq()),
        ("n^0.1", WeightSequence::power(0.1)),
        ("n", WeightSequence::power(1.0)),
    ] {
        let report = weight_check(&w, n_max)?;
        println!("w(n) = {name}, scanned to N = {n_max}:");
        println!(
            "  monotone violations: {}, doubling constant C(N) = {:.3}{}",
            report.monotone_violations,
            report.doubling_constant,
            if report.doubling_growing {
                "  <- still growing, incompatible with w(n²) ≤ C·w(n)"
            } else {
                ""
            }
        );
        for point in &report.envelope {
            println!(
                "  n = {:>7}: w = {:>10.3}, w/log n = {:>8.3}, w/log² n = {:>6.3}",
                point.n, point.w, point.over_log, point.over_log_sq
            );
        }
        let (n_last, sum_last) = *report.partial_sums.last().expect("checkpoints");
        println!("  Σ 1/(n·w(n)) up to {n_last}: {sum_last:.4} (diagnostic only)\n");
    }
    Ok(())
}
