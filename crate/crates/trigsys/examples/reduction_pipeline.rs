//! The full reduction pipeline on a small two-dimensional input: block
//! moduli, certified equivalence errors, spectrum-separating shifts, the
//! offset recurrence, and the weight-transfer inequality for the rearranged
//! series.
//!
//! Run with `cargo run --example reduction_pipeline`.

use trigsys::reduction::{
    block_certificate, build_reduction, flat_series, map_coefficients, random_indices,
    verify_weight_transfer, PlanTermsView, ReductionInput, BLOCK_ERROR_LAW_CONSTANT,
};
use trigsys::weights::WeightSequence;

fn main() -> trigsys::Result<()> {
    // Sixteen distinct two-dimensional frequencies, deterministically seeded.
    let indices = random_indices(2, 16, 8, 42)?;
    let input = ReductionInput::from_indices(2, indices)?;
    let plan = build_reduction(&input, 16)?;

    println!("blocks:");
    for block in plan.blocks() {
        println!(
            "  k = {}: moduli {:?} (p = {}), shift {}, disc ≤ {:.4}, trunc ≤ {:.4}, ε_k = {:.4} \
             (law bound {:.4})",
            block.k,
            block.moduli.moduli(),
            block.moduli.product(),
            block.shift,
            block.disc_bound,
            block.trunc_bound,
            block.eps,
            BLOCK_ERROR_LAW_CONSTANT * 0.5f64.powi(block.k as i32),
        );
    }

    println!("\noffsets s_1..s_17 (slot sizes are 4^k):");
    println!("  {:?}", plan.offsets());

    let report = plan.validate()?;
    println!(
        "structure audit: offsets ok ({} violations), s_n ≤ n⁴ ok ({} violations), slot norms \
         ≤ 1 ok (max {:.9}), spectra disjoint: {}",
        report.offset_law_violations,
        report.offset_bound_violations,
        report.max_slot_norm_sq,
        report.spectra_disjoint,
    );

    // Per-block equivalence certificates.
    println!("\ncertificates (per-member truncation distances):");
    for k in 0..plan.block_count() as u32 {
        let cert = block_certificate(&plan, k)?;
        let worst = cert
            .member_distances
            .iter()
            .cloned()
            .fold(0.0f64, f64::max);
        println!(
            "  k = {k}: disc {:.4}, worst member distance {:.4}, ε_k = {:.4} ≤ {:.4}: {}",
            cert.disc_bound, worst, cert.eps, cert.law_bound, cert.law_holds
        );
    }

    // Coefficients flow through slots: c_s = a_n·b_s.
    let a: Vec<f64> = (1..=16).map(|n| 1.0 / n as f64).collect();
    let c = map_coefficients(&plan, &a)?;
    let mass: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    let input_mass: f64 = a.iter().map(|x| x * x).sum();
    println!(
        "\nflat series: {} slots, {} carrying actual terms, Σ|c|² = {:.6} ≤ Σ|a|² = {:.6}",
        c.len(),
        flat_series(&plan, &a)?.len(),
        mass,
        input_mass
    );

    // The weighted mass moves to the rearranged series at a bounded rate.
    let w = WeightSequence::log_sq();
    let transfer = verify_weight_transfer(&plan, &a, &w)?;
    println!(
        "weight transfer with w = log²(n+2): Σ|c_s|²w(s) = {:.4} ≤ C*·Σ|a_n|²w(n) = \
         {:.3}·{:.4}: {}",
        transfer.lhs, transfer.c_star, transfer.rhs, transfer.holds
    );
    Ok(())
}
