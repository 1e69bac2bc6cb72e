//! Distributional comparison of block maxima between systems: exactly zero
//! for a multiple discrete block against its transported one-dimensional
//! block on cell-aligned grids, and within ε_k plus a grid term for a
//! two-dimensional trigonometric block against its reduced plan block.
//!
//! Run with `cargo run --example distribution_distance` (release mode is
//! noticeably faster for the truncated part).

use trigsys::crt::{self, CoprimeModuli};
use trigsys::dts::DiscreteTrigSystem;
use trigsys::lab::{
    distribution_compare, Dts1dBlock, Grid, MultiDtsBlock, MultiTrig, PlanBlockSystem,
};
use trigsys::mp::CellPartition;
use trigsys::reduction::{block_certificate, build_reduction, random_indices, ReductionInput};

fn main() -> trigsys::Result<()> {
    // Exact part: the (3,5) block against its image of order 15.
    let moduli = CoprimeModuli::new(vec![3, 5])?;
    let p = moduli.product() as u64;
    let part = CellPartition::new(vec![3, 5])?;
    let indices: Vec<Vec<u64>> = (0..7).map(|c| part.multi_of(c)).collect::<Result<_, _>>()?;
    let taus: Vec<u64> = indices
        .iter()
        .map(|v| crt::tau(&moduli, v).map(|t| t as u64))
        .collect::<Result<_, _>>()?;
    let sys_a = MultiDtsBlock::new(DiscreteTrigSystem::new(vec![3, 5])?, indices)?;
    let sys_b = Dts1dBlock::new(p, taus)?;
    let a: Vec<f64> = (1..=7).map(|n| 1.0 / n as f64).collect();
    let grid_a = Grid::new(vec![3, 5])?;
    let grid_b = Grid::new(vec![p])?;
    println!("exact discrete blocks on cell-aligned grids:");
    for k in 0..=2u32 {
        let d = distribution_compare(&sys_a, &a, &grid_a, &sys_b, &a, &grid_b, k)?;
        println!("  k = {k}: Kolmogorov distance = {d}");
    }

    // Truncated part: a seeded two-dimensional block against its plan image.
    let res = 256u64;
    let indices = random_indices(2, 32, 16, 1312)?;
    let input = ReductionInput::from_indices(2, indices.clone())?;
    let plan = build_reduction(&input, 32)?;
    let sys_a = MultiTrig::new(2, indices)?;
    let sys_b = PlanBlockSystem::from_plan(&plan, 31, 1 << 10)?;
    let a: Vec<f64> = (1..=32).map(|n| 1.0 / n as f64).collect();
    let grid_a = Grid::uniform(2, res)?;
    let grid_b = Grid::new(vec![res * res])?;
    println!("\ntruncated blocks, d = 2, grid {res}²:");
    for k in 2..=4u32 {
        let cert = block_certificate(&plan, k)?;
        let bound = cert.eps + 2.0 / res as f64;
        let d = distribution_compare(&sys_a, &a, &grid_a, &sys_b, &a, &grid_b, k)?;
        println!(
            "  k = {k}: distance = {d:.4} ≤ ε_k + 2/grid = {bound:.4}  ({})",
            if d <= bound { "within bound" } else { "EXCEEDED" }
        );
    }
    Ok(())
}
