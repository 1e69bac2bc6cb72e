//! The coprime-moduli bridge between a multiple system and a one-dimensional
//! one: the index maps τ and τ̄, the induced measure-preserving cell map, and
//! exact probabilistic equivalence of the two full systems.
//!
//! Run with `cargo run --example crt_equivalence`.

use trigsys::crt::{self, CoprimeModuli};
use trigsys::dts::DiscreteTrigSystem;
use trigsys::mp::{self, CellPartition, DistributionDocument};

fn main() -> trigsys::Result<()> {
    let moduli = CoprimeModuli::new(vec![3, 5])?;
    let p = moduli.product() as u64;

    // τ solves the simultaneous congruences; τ̄ twists it by Σ p/p_j.
    println!("index maps for moduli (3, 5), q = Σ p/p_j = {}:", moduli.cofactor_sum());
    for cell in [(0u64, 0u64), (2, 3), (1, 1), (2, 4)] {
        let v = vec![cell.0, cell.1];
        println!(
            "  ({}, {})  τ = {:>2}  τ̄ = {:>2}",
            cell.0,
            cell.1,
            crt::tau(&moduli, &v)?,
            crt::tau_bar(&moduli, &v)?
        );
    }

    // The cell map sends box cell u to interval cell τ̄(u) and preserves
    // measures of arbitrary unions.
    let theta = crt::build_theta(&moduli)?;
    let report = mp::check_axioms(&theta, 200, 1);
    println!(
        "\ncell map axioms: {} checks on random unions, {} failures",
        report.checks,
        report.failures.len()
    );

    // Transporting the multiple system function t_(n1,n2) along the map
    // yields exactly the one-dimensional function with index τ(n1,n2).
    let multi = DiscreteTrigSystem::new(vec![3, 5])?;
    let one = DiscreteTrigSystem::one_dimensional(p)?;
    let box_part = CellPartition::new(vec![3, 5])?;
    let mut verified = 0;
    for cell in 0..p {
        let n_vec = box_part.multi_of(cell)?;
        let n = crt::dts_correspondence(&moduli, &n_vec)? as u64;
        let mapped = theta.apply(&multi.step_function(&n_vec)?)?;
        assert_eq!(mapped, one.step_function(&[n])?);
        verified += 1;
    }
    println!("transport identity verified for all {verified} indices");

    // The full systems share their joint value distribution, exactly.
    let fs = multi.all_step_functions()?;
    let gs: Vec<_> = (0..p)
        .map(|cell| {
            let n_vec = box_part.multi_of(cell).unwrap();
            let n = crt::tau(&moduli, &n_vec).unwrap() as u64;
            one.step_function(&[n]).unwrap()
        })
        .collect();
    let fs_ref: Vec<_> = fs.iter().collect();
    let gs_ref: Vec<_> = gs.iter().collect();
    println!(
        "full systems probabilistically equivalent: {}",
        mp::verify_prob_equiv(&fs_ref, &gs_ref)?
    );

    // A small joint distribution, serialized in the report format.
    let pair = [&fs[1], &fs[2]];
    let dist = mp::joint_distribution(&pair)?;
    let doc = DistributionDocument::from_distribution(&dist);
    println!(
        "\njoint distribution of two members ({} atoms):\n{}",
        dist.atoms().len(),
        serde_json::to_string_pretty(&doc).expect("serializable report")
    );
    Ok(())
}
