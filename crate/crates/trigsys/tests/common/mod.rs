//! Independent oracles for the integration suites: numerical quadrature,
//! exhaustive index-map search, and naive re-summation of block maxima.
//! These deliberately avoid the closed forms used by the library.

use num_complex::Complex64;
use trigsys::lab::{FunctionSystem, Grid};

/// Adaptive Simpson on complex integrands.
fn simpson(a: f64, b: f64, fa: Complex64, fm: Complex64, fb: Complex64) -> Complex64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_step(
    f: &dyn Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Complex64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.norm() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

pub fn adaptive_simpson(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Complex64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    adaptive_step(f, a, b, fa, fm, fb, whole, tol, 32)
}

/// ∫₀¹ t_n(x)·e^{-2πimx} dx by quadrature over each cell, with the step
/// value taken from the plain evaluation path. Each cell is pre-split into
/// panels finer than the oscillation so the adaptive rule never aliases.
pub fn quadrature_fourier_coeff(l: u64, n: u64, m: i64) -> Complex64 {
    use std::f64::consts::TAU;
    let oscillations = m.unsigned_abs() / l + 1;
    let panels = 4 * oscillations + 4;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..l {
        let phase = TAU * (n as f64) * (k as f64) / l as f64;
        let value = Complex64::new(phase.cos(), phase.sin());
        let f = move |x: f64| {
            let t = TAU * m as f64 * x;
            value * Complex64::new(t.cos(), -t.sin())
        };
        for panel in 0..panels {
            let a = (k as f64 + panel as f64 / panels as f64) / l as f64;
            let b = (k as f64 + (panel + 1) as f64 / panels as f64) / l as f64;
            acc += adaptive_simpson(&f, a, b, 1e-13 / panels as f64);
        }
    }
    acc
}

/// Naive partial-sum re-summation of the block-k maxima: every partial sum
/// is recomputed from scratch.
pub fn naive_block_maxima(
    sys: &dyn FunctionSystem,
    a: &[f64],
    k: u32,
    grid: &Grid,
) -> Vec<f64> {
    let lo = 1u64 << k;
    let hi = (1u64 << (k + 1)) - 1;
    let points = grid.len();
    let mut out = vec![0.0f64; points as usize];
    for (t, slot) in out.iter_mut().enumerate() {
        let x = grid.point(t as u64);
        let mut best = 0.0f64;
        for m in lo..=hi {
            let mut acc = Complex64::new(0.0, 0.0);
            for n in lo..=m {
                acc += a[n as usize - 1] * sys.eval(n, &x);
            }
            best = best.max(acc.norm());
        }
        *slot = best;
    }
    out
}

/// Prints the acceptance verdict line for one criterion and panics on
/// failure so the suite reports it.
pub fn criterion(index: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("[{verdict}] criterion {index} ({name}): {detail}");
    assert!(pass, "criterion {index} ({name}) failed: {detail}");
}
