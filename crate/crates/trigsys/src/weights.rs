//! Candidate weight sequences w(n) and their admissibility surrogates.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A named, reproducible rule n ↦ w(n) > 0. Presets avoid an expression
/// parser; tables come from files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "arg", rename_all = "lowercase")]
pub enum WeightRule {
    /// ln(n + 2)
    Log,
    /// ln²(n + 2)
    #[serde(rename = "log2")]
    LogSq,
    /// n^alpha
    Pow(f64),
    /// w(n) = table[n-1]
    Table(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSequence {
    rule: WeightRule,
}

impl WeightSequence {
    pub fn log() -> WeightSequence {
        WeightSequence {
            rule: WeightRule::Log,
        }
    }

    pub fn log_sq() -> WeightSequence {
        WeightSequence {
            rule: WeightRule::LogSq,
        }
    }

    pub fn power(alpha: f64) -> WeightSequence {
        WeightSequence {
            rule: WeightRule::Pow(alpha),
        }
    }

    pub fn from_table(table: Vec<f64>) -> WeightSequence {
        WeightSequence {
            rule: WeightRule::Table(table),
        }
    }

    pub fn from_rule(rule: WeightRule) -> WeightSequence {
        WeightSequence { rule }
    }

    /// Parses the command-line spec forms `log`, `log2`, `pow:α`,
    /// `table:<path>`.
    pub fn parse_spec(spec: &str) -> Result<WeightSequence> {
        if spec == "log" {
            return Ok(WeightSequence::log());
        }
        if spec == "log2" {
            return Ok(WeightSequence::log_sq());
        }
        if let Some(arg) = spec.strip_prefix("pow:") {
            let alpha: f64 = arg
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad exponent in `{spec}`")))?;
            return Ok(WeightSequence::power(alpha));
        }
        if let Some(path) = spec.strip_prefix("table:") {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidParameter(format!("cannot read `{path}`: {e}")))?;
            let table: Vec<f64> = serde_json::from_str(&text)
                .map_err(|e| Error::InvalidParameter(format!("bad weight table: {e}")))?;
            return Ok(WeightSequence::from_table(table));
        }
        Err(Error::InvalidParameter(format!(
            "unknown weight spec `{spec}` (expected log, log2, pow:α, table:file)"
        )))
    }

    pub fn rule(&self) -> &WeightRule {
        &self.rule
    }

    /// w(n) for n ≥ 1. Errors on nonpositive values and on indices past the
    /// end of a table.
    pub fn value(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidParameter("weights are indexed from 1".into()));
        }
        let w = match &self.rule {
            WeightRule::Log => ((n + 2) as f64).ln(),
            WeightRule::LogSq => {
                let t = ((n + 2) as f64).ln();
                t * t
            }
            WeightRule::Pow(alpha) => (n as f64).powf(*alpha),
            WeightRule::Table(t) => *t.get(n as usize - 1).ok_or_else(|| {
                Error::InadmissibleWeight(format!("table has no entry for n = {n}"))
            })?,
        };
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::InadmissibleWeight(format!(
                "w({n}) = {w} is not positive and finite"
            )));
        }
        Ok(w)
    }

    /// Light admissibility screen over [1, n_max]: positivity, monotonicity
    /// along a dyadic ladder, and strict growth from w(1) to w(n_max). The
    /// last clause is the finite-scale surrogate for w(n) → ∞; constants fail
    /// it.
    pub fn screen(&self, n_max: u64) -> Result<()> {
        let first = self.value(1)?;
        let last = self.value(n_max)?;
        if !(last > first) {
            return Err(Error::InadmissibleWeight(format!(
                "w({n_max}) = {last} does not exceed w(1) = {first}; the sequence must increase"
            )));
        }
        let mut n = 1u64;
        let mut prev = first;
        while n < n_max {
            n = (n * 2).min(n_max);
            let w = self.value(n)?;
            if w < prev {
                return Err(Error::InadmissibleWeight(format!(
                    "w({n}) = {w} dips below an earlier value {prev}"
                )));
            }
            prev = w;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn presets_evaluate() {
        let w = WeightSequence::log_sq();
        assert_relative_eq!(w.value(1).unwrap(), (3f64).ln().powi(2), epsilon = 1e-14);
        let w = WeightSequence::power(0.5);
        assert_relative_eq!(w.value(9).unwrap(), 3.0, epsilon = 1e-14);
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(WeightSequence::parse_spec("log").unwrap(), WeightSequence::log());
        assert_eq!(
            WeightSequence::parse_spec("log2").unwrap(),
            WeightSequence::log_sq()
        );
        assert_eq!(
            WeightSequence::parse_spec("pow:0.25").unwrap(),
            WeightSequence::power(0.25)
        );
        assert!(WeightSequence::parse_spec("cosh").is_err());
    }

    #[test]
    fn constant_weight_fails_screen() {
        let w = WeightSequence::from_table(vec![1.0; 64]);
        assert!(matches!(w.screen(64), Err(Error::InadmissibleWeight(_))));
    }

    #[test]
    fn table_bounds_are_checked() {
        let w = WeightSequence::from_table(vec![1.0, 2.0]);
        assert!(w.value(2).is_ok());
        assert!(w.value(3).is_err());
        assert!(w.value(0).is_err());
    }
}
