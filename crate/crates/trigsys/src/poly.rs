//! Sparse trigonometric polynomials: finite maps from integer frequency
//! vectors to complex coefficients, with Parseval bookkeeping.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;

/// A set of integer frequencies (1-d) or frequency vectors (d-dim) with exact
/// disjointness queries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencySet {
    dim: usize,
    freqs: BTreeSet<Vec<i128>>,
}

impl FrequencySet {
    pub fn new(dim: usize) -> FrequencySet {
        FrequencySet {
            dim,
            freqs: BTreeSet::new(),
        }
    }

    pub fn from_freqs_1d(freqs: impl IntoIterator<Item = i128>) -> FrequencySet {
        FrequencySet {
            dim: 1,
            freqs: freqs.into_iter().map(|m| vec![m]).collect(),
        }
    }

    pub fn insert(&mut self, freq: Vec<i128>) -> Result<bool> {
        if freq.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: freq.len(),
            });
        }
        Ok(self.freqs.insert(freq))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn contains(&self, freq: &[i128]) -> bool {
        self.freqs.contains(freq)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<i128>> {
        self.freqs.iter()
    }

    pub fn is_disjoint(&self, other: &FrequencySet) -> bool {
        self.freqs.is_disjoint(&other.freqs)
    }
}

/// Finite association of frequency vectors to complex coefficients.
///
/// The squared L² norm is the sum of squared coefficient moduli, exactly, by
/// orthonormality of the exponentials.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPolynomial {
    dim: usize,
    terms: BTreeMap<Vec<i128>, Complex64>,
}

impl TrigPolynomial {
    pub fn new(dim: usize) -> TrigPolynomial {
        TrigPolynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms_1d(
        terms: impl IntoIterator<Item = (i128, Complex64)>,
    ) -> Result<TrigPolynomial> {
        let mut p = TrigPolynomial::new(1);
        for (m, c) in terms {
            p.add_term(vec![m], c)?;
        }
        Ok(p)
    }

    pub fn from_terms(
        dim: usize,
        terms: impl IntoIterator<Item = (Vec<i128>, Complex64)>,
    ) -> Result<TrigPolynomial> {
        let mut p = TrigPolynomial::new(dim);
        for (m, c) in terms {
            p.add_term(m, c)?;
        }
        Ok(p)
    }

    /// Single exponential `exp(2πi⟨n,x⟩)`.
    pub fn monomial(freq: Vec<i128>) -> TrigPolynomial {
        let dim = freq.len();
        let mut terms = BTreeMap::new();
        terms.insert(freq, Complex64::new(1.0, 0.0));
        TrigPolynomial { dim, terms }
    }

    /// Accumulates into an existing term; frequencies stay pairwise distinct.
    pub fn add_term(&mut self, freq: Vec<i128>, coeff: Complex64) -> Result<()> {
        if freq.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: freq.len(),
            });
        }
        *self.terms.entry(freq).or_insert(Complex64::new(0.0, 0.0)) += coeff;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, freq: &[i128]) -> Complex64 {
        self.terms
            .get(freq)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i128>, &Complex64)> {
        self.terms.iter()
    }

    /// Frequencies with nonzero coefficient.
    pub fn spectrum(&self) -> FrequencySet {
        FrequencySet {
            dim: self.dim,
            freqs: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm_sqr() > 0.0)
                .map(|(m, _)| m.clone())
                .collect(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (freq, c) in &self.terms {
            let phase: f64 = freq
                .iter()
                .zip(x)
                .map(|(&m, &xi)| (m as f64) * xi)
                .sum::<f64>()
                .fract();
            acc += c * Complex64::new((TAU * phase).cos(), (TAU * phase).sin());
        }
        Ok(acc)
    }

    /// Values at the 1-d grid points t/grid, t = 0..grid, with phases reduced
    /// exactly as integers so arbitrarily large frequencies stay accurate.
    pub fn eval_on_grid_1d(&self, grid: u64) -> Result<Vec<Complex64>> {
        if self.dim != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: self.dim,
            });
        }
        if grid == 0 {
            return Err(Error::InvalidParameter("grid must be positive".into()));
        }
        let g = grid as i128;
        let roots: Vec<Complex64> = (0..grid)
            .map(|r| {
                let t = TAU * r as f64 / grid as f64;
                Complex64::new(t.cos(), t.sin())
            })
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); grid as usize];
        for (freq, c) in &self.terms {
            let step = freq[0].rem_euclid(g) as u64;
            let mut r = 0u64;
            for v in out.iter_mut() {
                *v += c * roots[r as usize];
                r += step;
                if r >= grid {
                    r -= grid;
                }
            }
        }
        Ok(out)
    }

    pub fn norm_sq(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// ⟨f, g⟩ = Σ over shared frequencies of c_f · conj(c_g).
    pub fn inner(&self, other: &TrigPolynomial) -> Result<Complex64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (freq, c) in &self.terms {
            if let Some(d) = other.terms.get(freq) {
                acc += c * d.conj();
            }
        }
        Ok(acc)
    }

    /// Parseval distance ‖f − g‖₂.
    pub fn l2_distance(&self, other: &TrigPolynomial) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut sq = 0.0;
        for (freq, c) in &self.terms {
            let d = other.coeff(freq);
            sq += (c - d).norm_sqr();
        }
        for (freq, d) in &other.terms {
            if !self.terms.contains_key(freq) {
                sq += d.norm_sqr();
            }
        }
        Ok(sq.sqrt())
    }

    /// Frequency translation by `shift` (1-d): multiplies by exp(2πi·shift·x).
    pub fn modulate_1d(&self, shift: i128) -> Result<TrigPolynomial> {
        if self.dim != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: self.dim,
            });
        }
        Ok(TrigPolynomial {
            dim: 1,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (vec![m[0] + shift], *c))
                .collect(),
        })
    }

    pub fn scaled(&self, k: Complex64) -> TrigPolynomial {
        TrigPolynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn add(&self, other: &TrigPolynomial) -> Result<TrigPolynomial> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c)?;
        }
        Ok(out)
    }
}

/// Serialized form: `{dim, terms:[{freq:[...], re, im}]}` with exact integer
/// frequencies.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PolyDocument {
    pub dim: usize,
    pub terms: Vec<TermDocument>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermDocument {
    pub freq: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

impl PolyDocument {
    pub fn from_poly(p: &TrigPolynomial) -> Result<PolyDocument> {
        let mut terms = Vec::with_capacity(p.len());
        for (freq, c) in p.terms() {
            let freq: Vec<i64> = freq
                .iter()
                .map(|&m| {
                    i64::try_from(m).map_err(|_| {
                        Error::TooLarge(format!("frequency {m} does not fit a 64-bit integer"))
                    })
                })
                .collect::<Result<_>>()?;
            terms.push(TermDocument {
                freq,
                re: c.re,
                im: c.im,
            });
        }
        Ok(PolyDocument { dim: p.dim(), terms })
    }

    pub fn to_poly(&self) -> Result<TrigPolynomial> {
        TrigPolynomial::from_terms(
            self.dim,
            self.terms.iter().map(|t| {
                (
                    t.freq.iter().map(|&m| m as i128).collect(),
                    Complex64::new(t.re, t.im),
                )
            }),
        )
    }
}
