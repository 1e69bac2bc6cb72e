//! Exact cell values: roots of unity with a rational phase, optionally scaled
//! by a rational magnitude. Step functions built from discrete trigonometric
//! systems take values in this type, which makes distribution comparisons
//! exact instead of float-fuzzy.

use num_complex::Complex64;
use num_rational::Ratio;
use std::f64::consts::TAU;

pub(crate) fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A point on the unit circle, `exp(2πi·num/den)`, stored as the reduced
/// fraction of a full turn with `0 <= num < den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitPhase {
    num: u64,
    den: u64,
}

impl UnitPhase {
    /// Reduce `num/den` modulo one full turn. `den` must be nonzero.
    pub fn new(num: i128, den: u64) -> UnitPhase {
        assert!(den != 0, "phase denominator must be nonzero");
        let num = num.rem_euclid(den as i128) as u128;
        if num == 0 {
            return UnitPhase { num: 0, den: 1 };
        }
        let g = gcd_u128(num, den as u128);
        UnitPhase {
            num: (num / g) as u64,
            den: (den as u128 / g) as u64,
        }
    }

    pub fn zero() -> UnitPhase {
        UnitPhase { num: 0, den: 1 }
    }

    /// Half turn, i.e. the value -1.
    pub fn half() -> UnitPhase {
        UnitPhase { num: 1, den: 2 }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Phase addition modulo one turn.
    pub fn add(self, rhs: UnitPhase) -> UnitPhase {
        let den = self.den as u128 * rhs.den as u128;
        let num = self.num as u128 * rhs.den as u128 + rhs.num as u128 * self.den as u128;
        let num = num % den;
        if num == 0 {
            return UnitPhase { num: 0, den: 1 };
        }
        let g = gcd_u128(num, den);
        UnitPhase {
            num: (num / g) as u64,
            den: (den / g) as u64,
        }
    }

    pub fn conj(self) -> UnitPhase {
        if self.num == 0 {
            self
        } else {
            UnitPhase {
                num: self.den - self.num,
                den: self.den,
            }
        }
    }

    pub fn to_complex(self) -> Complex64 {
        let t = TAU * self.num as f64 / self.den as f64;
        Complex64::new(t.cos(), t.sin())
    }
}

/// Exact complex value `magnitude · exp(2πi·phase)`.
///
/// Canonical form: `magnitude >= 0`, a zero magnitude forces a zero phase,
/// and negative rational scalars fold a half turn into the phase. Structural
/// equality and hashing therefore agree with mathematical equality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactValue {
    magnitude: Ratio<i64>,
    phase: UnitPhase,
}

impl Default for ExactValue {
    fn default() -> ExactValue {
        ExactValue::zero()
    }
}

impl ExactValue {
    pub fn new(magnitude: Ratio<i64>, phase: UnitPhase) -> ExactValue {
        if magnitude == Ratio::new(0, 1) {
            return ExactValue {
                magnitude,
                phase: UnitPhase::zero(),
            };
        }
        if magnitude < Ratio::new(0, 1) {
            ExactValue {
                magnitude: -magnitude,
                phase: phase.add(UnitPhase::half()),
            }
        } else {
            ExactValue { magnitude, phase }
        }
    }

    pub fn zero() -> ExactValue {
        ExactValue::new(Ratio::new(0, 1), UnitPhase::zero())
    }

    pub fn one() -> ExactValue {
        ExactValue::new(Ratio::new(1, 1), UnitPhase::zero())
    }

    pub fn integer(k: i64) -> ExactValue {
        ExactValue::new(Ratio::new(k, 1), UnitPhase::zero())
    }

    pub fn rational(r: Ratio<i64>) -> ExactValue {
        ExactValue::new(r, UnitPhase::zero())
    }

    /// `exp(2πi·num/den)`.
    pub fn root_of_unity(num: i128, den: u64) -> ExactValue {
        ExactValue::new(Ratio::new(1, 1), UnitPhase::new(num, den))
    }

    pub fn magnitude(&self) -> Ratio<i64> {
        self.magnitude
    }

    pub fn phase(&self) -> UnitPhase {
        self.phase
    }

    pub fn is_zero(&self) -> bool {
        self.magnitude == Ratio::new(0, 1)
    }

    /// True for points on the unit circle.
    pub fn is_unit(&self) -> bool {
        self.magnitude == Ratio::new(1, 1)
    }

    pub fn mul(&self, rhs: &ExactValue) -> ExactValue {
        ExactValue::new(self.magnitude * rhs.magnitude, self.phase.add(rhs.phase))
    }

    pub fn conj(&self) -> ExactValue {
        ExactValue::new(self.magnitude, self.phase.conj())
    }

    pub fn to_complex(&self) -> Complex64 {
        let m = *self.magnitude.numer() as f64 / *self.magnitude.denom() as f64;
        m * self.phase.to_complex()
    }

    /// |v|² as an exact rational.
    pub fn abs_sq(&self) -> Ratio<i64> {
        self.magnitude * self.magnitude
    }
}
