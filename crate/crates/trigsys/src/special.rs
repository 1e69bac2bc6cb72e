//! Closed forms for the spectral tails of discrete trigonometric functions.
//!
//! The squared Fourier coefficients of an order-`p` step exponential with
//! residue `r` sit on the progression `r + p·j` and satisfy
//! `|c_{r+pj}|² = sin²(πx) / (π²(x+j)²)` with `x = r/p`. Partial energies over
//! a window of `j` therefore reduce to trigamma differences, which keeps slot
//! norms and truncation errors O(1) per member even when a window holds
//! millions of terms.

use std::f64::consts::PI;

/// Trigamma ψ₁(x) = Σ_{t≥0} 1/(x+t)² for x > 0.
///
/// Recurrence up to x ≥ 10, then the asymptotic series; absolute error is
/// below 1e-13 on the whole positive axis.
pub fn trigamma(mut x: f64) -> f64 {
    assert!(x > 0.0, "trigamma requires a positive argument");
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // 1/x + 1/(2x²) + Σ B_{2n} / x^{2n+1}
    let series = inv
        + 0.5 * inv2
        + inv * inv2 * (1.0 / 6.0 + inv2 * (-1.0 / 30.0 + inv2 * (1.0 / 42.0 + inv2 * (-1.0 / 30.0 + inv2 * (5.0 / 66.0)))));
    acc + series
}

/// Spectral tail energy of the order-`p` DTS function with phase fraction
/// `x = r/p ∈ [0,1)` outside the window `lo ≤ j ≤ hi`:
/// `Σ_{j<lo} |c|² + Σ_{j>hi} |c|²`.
///
/// Needs `lo ≤ 0` and `hi ≥ -1` so both trigamma arguments stay positive.
/// `x == 0` is the constant function, whose spectrum is the single frequency
/// zero, so the tail vanishes.
pub fn dts_tail_energy(x: f64, lo: i64, hi: i64) -> f64 {
    assert!((0.0..1.0).contains(&x), "phase fraction out of range");
    assert!(lo <= hi && lo <= 0 && hi >= -1, "bad window [{lo}, {hi}]");
    if x == 0.0 {
        return 0.0;
    }
    let s = (PI * x).sin();
    let scale = s * s / (PI * PI);
    scale * (trigamma(1.0 - lo as f64 - x) + trigamma(hi as f64 + 1.0 + x))
}

/// Energy kept by the window `lo ≤ j ≤ hi`; complements [`dts_tail_energy`]
/// so that kept + tail = 1 (Parseval).
pub fn dts_kept_energy(x: f64, lo: i64, hi: i64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    1.0 - dts_tail_energy(x, lo, hi)
}
