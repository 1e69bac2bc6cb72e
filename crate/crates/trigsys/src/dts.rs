//! Discrete trigonometric systems: the order-l family of orthonormal step
//! functions t_n(x) = exp(2πi·n·⌊lx⌋/l) on half-open cells [k/l, (k+1)/l),
//! their tensor products, Fourier coefficients, spectra, and truncated
//! polynomial approximants.

use crate::error::{Error, Result};
use crate::exact::{ExactValue, UnitPhase};
use crate::mp::{CellPartition, StepFunction};
use crate::poly::{FrequencySet, TrigPolynomial};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// A discrete trigonometric system, one-dimensional of order l or the tensor
/// product of one-dimensional systems of orders p_1..p_d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteTrigSystem {
    axis_orders: Vec<u64>,
}

impl DiscreteTrigSystem {
    pub fn new(axis_orders: Vec<u64>) -> Result<DiscreteTrigSystem> {
        if axis_orders.is_empty() {
            return Err(Error::InvalidParameter(
                "system needs at least one axis".into(),
            ));
        }
        if axis_orders.iter().any(|&p| p < 2) {
            return Err(Error::InvalidParameter(
                "axis orders must be at least 2".into(),
            ));
        }
        let mut total: u128 = 1;
        for &p in &axis_orders {
            total = total
                .checked_mul(p as u128)
                .ok_or_else(|| Error::TooLarge("system order overflow".into()))?;
        }
        Ok(DiscreteTrigSystem { axis_orders })
    }

    pub fn one_dimensional(l: u64) -> Result<DiscreteTrigSystem> {
        DiscreteTrigSystem::new(vec![l])
    }

    pub fn dim(&self) -> usize {
        self.axis_orders.len()
    }

    pub fn axis_orders(&self) -> &[u64] {
        &self.axis_orders
    }

    /// Total number of functions, Π p_j.
    pub fn order(&self) -> u128 {
        self.axis_orders.iter().map(|&p| p as u128).product()
    }

    pub fn partition(&self) -> CellPartition {
        CellPartition::new(self.axis_orders.clone()).expect("orders validated on construction")
    }

    fn check_index(&self, n: &[u64]) -> Result<()> {
        if n.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: n.len(),
            });
        }
        for (&nj, &pj) in n.iter().zip(&self.axis_orders) {
            if nj >= pj {
                return Err(Error::IndexOutOfRange {
                    index: nj as i128,
                    order: pj as u128,
                });
            }
        }
        Ok(())
    }

    /// Exact value of t_n on cell u: the root of unity with phase
    /// Σ_j n_j·u_j/p_j.
    pub fn value_on_cell(&self, n: &[u64], cell: &[u64]) -> Result<ExactValue> {
        self.check_index(n)?;
        if cell.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: cell.len(),
            });
        }
        let mut phase = UnitPhase::zero();
        for ((&nj, &uj), &pj) in n.iter().zip(cell).zip(&self.axis_orders) {
            if uj >= pj {
                return Err(Error::IndexOutOfRange {
                    index: uj as i128,
                    order: pj as u128,
                });
            }
            phase = phase.add(UnitPhase::new((nj as i128) * (uj as i128), pj));
        }
        Ok(ExactValue::new(num_rational::Ratio::new(1, 1), phase))
    }

    /// Pointwise evaluation; coordinates are reduced mod 1 (the functions are
    /// 1-periodic).
    pub fn eval(&self, n: &[u64], x: &[f64]) -> Result<Complex64> {
        self.check_index(n)?;
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let cell: Vec<u64> = x
            .iter()
            .zip(&self.axis_orders)
            .map(|(&xi, &p)| {
                let f = xi.rem_euclid(1.0);
                ((f * p as f64).floor() as u64).min(p - 1)
            })
            .collect();
        Ok(self.value_on_cell(n, &cell)?.to_complex())
    }

    /// The function t_n as an exact-valued step function on the system's cell
    /// partition.
    pub fn step_function(&self, n: &[u64]) -> Result<StepFunction<ExactValue>> {
        self.check_index(n)?;
        let partition = self.partition();
        let q = partition.total_cells();
        let mut values = Vec::with_capacity(q as usize);
        for cell in 0..q {
            let multi = partition.multi_of(cell)?;
            values.push(self.value_on_cell(n, &multi)?);
        }
        StepFunction::new(partition, values)
    }

    /// All functions of the system, indexed lexicographically over the
    /// multi-index box.
    pub fn all_step_functions(&self) -> Result<Vec<StepFunction<ExactValue>>> {
        let partition = self.partition();
        let q = partition.total_cells();
        let mut out = Vec::with_capacity(q as usize);
        for idx in 0..q {
            let n = partition.multi_of(idx)?;
            out.push(self.step_function(&n)?);
        }
        Ok(out)
    }
}

/// One-dimensional evaluation: exp(2πi·n·⌊lx⌋/l).
pub fn eval_1d(l: u64, n: u64, x: f64) -> Result<Complex64> {
    DiscreteTrigSystem::one_dimensional(l)?.eval(&[n], &[x])
}

/// Fourier coefficient c_m(t_n) with respect to exp(2πi·m·x).
///
/// Exactly zero unless m ≡ n (mod l); on the progression it equals
/// l·I(m) with I(0) = 1/l and I(m) = (1 − e^{−2πim/l})/(2πim) otherwise.
pub fn fourier_coeff(l: u64, n: u64, m: i128) -> Result<Complex64> {
    if l < 2 {
        return Err(Error::InvalidParameter("order must be at least 2".into()));
    }
    if n >= l {
        return Err(Error::IndexOutOfRange {
            index: n as i128,
            order: l as u128,
        });
    }
    if (m - n as i128).rem_euclid(l as i128) != 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if m == 0 {
        // only reachable for n = 0; t_0 ≡ 1
        return Ok(Complex64::new(1.0, 0.0));
    }
    // m ≡ n (mod l), so e^{-2πim/l} = e^{-2πin/l}
    let w = UnitPhase::new(-(n as i128), l).to_complex();
    let numer = Complex64::new(1.0 - w.re, -w.im);
    let denom = Complex64::new(0.0, TAU * m as f64);
    Ok(l as f64 * numer / denom)
}

/// The spectrum window {n + l·j : |j| ≤ half_width}. Distinct residues n give
/// disjoint sets for every half width.
pub fn spectrum(l: u64, n: u64, half_width: u64) -> Result<FrequencySet> {
    if n >= l {
        return Err(Error::IndexOutOfRange {
            index: n as i128,
            order: l as u128,
        });
    }
    let j = half_width as i128;
    Ok(FrequencySet::from_freqs_1d(
        (-j..=j).map(|t| n as i128 + l as i128 * t),
    ))
}

/// Central selection order over progression offsets: 0, -1, 1, -2, 2, ...
/// Ties at equal |j| prefer the negative side.
pub fn central_offset(rank: u64) -> i64 {
    if rank == 0 {
        0
    } else if rank % 2 == 1 {
        -((rank as i64 + 1) / 2)
    } else {
        rank as i64 / 2
    }
}

/// Truncation of t_n to the `budget` spectral terms n + l·j with smallest
/// |j|. The result has norm at most 1 and squared truncation error
/// 1 − Σ(kept |c|²).
pub fn truncate(l: u64, n: u64, budget: u64) -> Result<TrigPolynomial> {
    if budget == 0 {
        return Err(Error::InvalidParameter(
            "term budget must be positive".into(),
        ));
    }
    if n >= l {
        return Err(Error::IndexOutOfRange {
            index: n as i128,
            order: l as u128,
        });
    }
    if n == 0 {
        // t_0 ≡ 1: the spectrum is the single frequency 0
        return TrigPolynomial::from_terms_1d([(0i128, Complex64::new(1.0, 0.0))]);
    }
    let mut poly = TrigPolynomial::new(1);
    for rank in 0..budget {
        let j = central_offset(rank) as i128;
        let m = n as i128 + l as i128 * j;
        poly.add_term(vec![m], fourier_coeff(l, n, m)?)?;
    }
    Ok(poly)
}
