//! Discrete trigonometric systems from scratch: exact cell values,
//! orthonormality, Fourier coefficients on an arithmetic progression, and
//! truncated polynomial approximants.
//!
//! Run with `cargo run --example dts_basics`.

use num_complex::Complex64;
use trigsys::dts::{self, DiscreteTrigSystem};

fn main() -> trigsys::Result<()> {
    // The order-6 system: six step functions, constant on sixths of [0,1),
    // taking sixth-root-of-unity values.
    let sys = DiscreteTrigSystem::one_dimensional(6)?;
    println!("order-6 system, values of t_n on each cell (as turns num/den):");
    for n in 0..6u64 {
        let f = sys.step_function(&[n])?;
        let row: Vec<String> = f
            .values()
            .iter()
            .map(|v| format!("{}/{}", v.phase().num(), v.phase().den()))
            .collect();
        println!("  t_{n}: {}", row.join("  "));
    }

    // Exact orthonormality of the family.
    let mut max_offdiag = 0.0f64;
    for n in 0..6u64 {
        for m in 0..6u64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for cell in 0..6u64 {
                let a = sys.value_on_cell(&[n], &[cell])?;
                let b = sys.value_on_cell(&[m], &[cell])?;
                acc += a.mul(&b.conj()).to_complex();
            }
            acc /= 6.0;
            if n != m {
                max_offdiag = max_offdiag.max(acc.norm());
            }
        }
    }
    println!("max |off-diagonal inner product| = {max_offdiag:.2e}");

    // Fourier coefficients live on the progression n + 6j and nowhere else.
    println!("\ncoefficients c_m(t_2) for m = -6..12:");
    for m in -6i128..=12 {
        let c = dts::fourier_coeff(6, 2, m)?;
        if c.norm() > 0.0 {
            println!("  m = {m:>3}: {:+.6} {:+.6}i", c.re, c.im);
        }
    }
    println!("(all other coefficients vanish exactly)");

    // Truncation: keep a budget of central spectral terms; the L² error is
    // read off Parseval.
    println!("\ntruncations of t_1 of order 2 (reference: |c_1| = 2/π):");
    for budget in [1u64, 3, 9, 27] {
        let g = dts::truncate(2, 1, budget)?;
        let err = (1.0 - g.norm_sq()).max(0.0).sqrt();
        println!(
            "  budget {budget:>2}: {} terms, ‖g‖ = {:.6}, ‖t - g‖ = {:.6}",
            g.len(),
            g.l2_norm(),
            err
        );
    }

    // A two-axis product system evaluated at a point.
    let multi = DiscreteTrigSystem::new(vec![2, 3])?;
    let z = multi.eval(&[1, 1], &[0.6, 0.7])?;
    println!("\nt_(1,1) of the (2,3) system at (0.6, 0.7) = {:+.4} {:+.4}i", z.re, z.im);
    Ok(())
}
