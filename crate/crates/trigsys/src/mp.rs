//! Measure-preserving cell maps on finite uniform partitions, their action on
//! step functions, and exact verification of probabilistic equivalence.
//!
//! Everything here lives on the finite algebra generated by uniform cells of
//! the unit cube: measures are exact rationals, values of the interesting
//! step functions are exact roots of unity, and distribution comparisons are
//! exact multiset equality.

use crate::error::{Error, Result};
use crate::exact::ExactValue;
use crate::poly::TrigPolynomial;
use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::TAU;

/// Exact measure of a union of cells: a reduced fraction of the unit cube.
pub type Measure = Ratio<u64>;

/// Uniform partition of the d-dimensional unit cube into half-open boxes
/// `[u_j/q_j, (u_j+1)/q_j)`, all of measure 1/Q with Q = Π q_j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellPartition {
    axes: Vec<u64>,
}

impl CellPartition {
    pub fn new(axes: Vec<u64>) -> Result<CellPartition> {
        if axes.is_empty() {
            return Err(Error::InvalidParameter(
                "partition needs at least one axis".into(),
            ));
        }
        if axes.iter().any(|&q| q == 0) {
            return Err(Error::InvalidParameter(
                "cell counts must be positive".into(),
            ));
        }
        let mut total: u128 = 1;
        for &q in &axes {
            total = total
                .checked_mul(q as u128)
                .ok_or_else(|| Error::TooLarge("partition cell count overflow".into()))?;
        }
        if total > u64::MAX as u128 {
            return Err(Error::TooLarge("partition cell count overflow".into()));
        }
        Ok(CellPartition { axes })
    }

    pub fn one_dim(q: u64) -> CellPartition {
        CellPartition { axes: vec![q] }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[u64] {
        &self.axes
    }

    pub fn total_cells(&self) -> u64 {
        self.axes.iter().product()
    }

    pub fn cell_measure(&self) -> Measure {
        Ratio::new(1, self.total_cells())
    }

    /// Linear index of a multi-cell, last axis fastest.
    pub fn index_of(&self, multi: &[u64]) -> Result<u64> {
        if multi.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: multi.len(),
            });
        }
        let mut idx = 0u64;
        for (u, q) in multi.iter().zip(&self.axes) {
            if u >= q {
                return Err(Error::IndexOutOfRange {
                    index: *u as i128,
                    order: *q as u128,
                });
            }
            idx = idx * q + u;
        }
        Ok(idx)
    }

    pub fn multi_of(&self, mut index: u64) -> Result<Vec<u64>> {
        if index >= self.total_cells() {
            return Err(Error::IndexOutOfRange {
                index: index as i128,
                order: self.total_cells() as u128,
            });
        }
        let mut multi = vec![0u64; self.dim()];
        for (slot, q) in multi.iter_mut().zip(&self.axes).rev() {
            *slot = index % q;
            index /= q;
        }
        Ok(multi)
    }

    /// Cell containing point `x` (coordinates reduced mod 1).
    pub fn cell_of_point(&self, x: &[f64]) -> Result<u64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let multi: Vec<u64> = x
            .iter()
            .zip(&self.axes)
            .map(|(&xi, &q)| {
                let f = xi.rem_euclid(1.0);
                ((f * q as f64).floor() as u64).min(q - 1)
            })
            .collect();
        self.index_of(&multi)
    }
}

/// A function constant on each cell of a partition.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction<V> {
    partition: CellPartition,
    values: Vec<V>,
}

impl<V: Clone> StepFunction<V> {
    pub fn new(partition: CellPartition, values: Vec<V>) -> Result<StepFunction<V>> {
        if values.len() as u64 != partition.total_cells() {
            return Err(Error::LengthMismatch {
                expected: partition.total_cells() as usize,
                got: values.len(),
            });
        }
        Ok(StepFunction { partition, values })
    }

    pub fn constant(partition: CellPartition, value: V) -> StepFunction<V> {
        let n = partition.total_cells() as usize;
        StepFunction {
            partition,
            values: vec![value; n],
        }
    }

    pub fn partition(&self) -> &CellPartition {
        &self.partition
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn value(&self, cell: u64) -> &V {
        &self.values[cell as usize]
    }

    pub fn map<W>(&self, f: impl Fn(&V) -> W) -> StepFunction<W> {
        StepFunction {
            partition: self.partition.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }
}

impl StepFunction<ExactValue> {
    /// Indicator of a single cell.
    pub fn indicator(partition: CellPartition, cell: u64) -> Result<StepFunction<ExactValue>> {
        if cell >= partition.total_cells() {
            return Err(Error::IndexOutOfRange {
                index: cell as i128,
                order: partition.total_cells() as u128,
            });
        }
        let mut values = vec![ExactValue::zero(); partition.total_cells() as usize];
        values[cell as usize] = ExactValue::one();
        Ok(StepFunction { partition, values })
    }

    pub fn to_complex(&self) -> StepFunction<Complex64> {
        self.map(|v| v.to_complex())
    }
}

impl StepFunction<Complex64> {
    /// Exact squared L² norm: (1/Q)·Σ|values|².
    pub fn norm_sq(&self) -> f64 {
        let q = self.partition.total_cells() as f64;
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / q
    }
}

/// Equal-measure bijection between the cells of two partitions with the same
/// total cell count; the carrier of the map Θ.
#[derive(Clone, Debug, PartialEq)]
pub struct MPCellMap {
    source: CellPartition,
    target: CellPartition,
    forward: Vec<u64>,
}

impl MPCellMap {
    pub fn new(source: CellPartition, target: CellPartition, forward: Vec<u64>) -> Result<MPCellMap> {
        let q = source.total_cells();
        if target.total_cells() != q {
            return Err(Error::PartitionMismatch(format!(
                "source has {} cells, target has {}",
                q,
                target.total_cells()
            )));
        }
        if forward.len() as u64 != q {
            return Err(Error::LengthMismatch {
                expected: q as usize,
                got: forward.len(),
            });
        }
        let mut seen = vec![false; q as usize];
        for &t in &forward {
            if t >= q {
                return Err(Error::IndexOutOfRange {
                    index: t as i128,
                    order: q as u128,
                });
            }
            if seen[t as usize] {
                return Err(Error::InvalidParameter(format!(
                    "cell map is not injective: target cell {t} hit twice"
                )));
            }
            seen[t as usize] = true;
        }
        Ok(MPCellMap {
            source,
            target,
            forward,
        })
    }

    /// Skips the bijectivity validation. Intended for constructing broken
    /// maps that the axiom checker is expected to reject.
    pub fn new_unchecked(source: CellPartition, target: CellPartition, forward: Vec<u64>) -> MPCellMap {
        MPCellMap {
            source,
            target,
            forward,
        }
    }

    pub fn identity(partition: CellPartition) -> MPCellMap {
        let q = partition.total_cells();
        MPCellMap {
            source: partition.clone(),
            target: partition,
            forward: (0..q).collect(),
        }
    }

    pub fn source(&self) -> &CellPartition {
        &self.source
    }

    pub fn target(&self) -> &CellPartition {
        &self.target
    }

    pub fn forward(&self) -> &[u64] {
        &self.forward
    }

    pub fn image_of_cell(&self, cell: u64) -> u64 {
        self.forward[cell as usize]
    }

    /// Transport of a step function: the value on Θ(cell) equals the value on
    /// cell. Preserves the L² norm exactly.
    pub fn apply<V: Clone + Default>(&self, f: &StepFunction<V>) -> Result<StepFunction<V>> {
        if f.partition() != &self.source {
            return Err(Error::PartitionMismatch(
                "step function does not live on the map's source partition".into(),
            ));
        }
        let mut values = vec![V::default(); self.forward.len()];
        for (cell, v) in f.values().iter().enumerate() {
            values[self.forward[cell] as usize] = v.clone();
        }
        StepFunction::new(self.target.clone(), values)
    }
}

fn measure_of(set: &[bool], q: u64) -> Measure {
    Ratio::new(set.iter().filter(|&&b| b).count() as u64, q)
}

fn image_set(map: &MPCellMap, set: &[bool]) -> Vec<bool> {
    let mut img = vec![false; map.target.total_cells() as usize];
    for (cell, &inc) in set.iter().enumerate() {
        if inc {
            img[map.forward[cell] as usize] = true;
        }
    }
    img
}

/// One failed set identity, with the witnessing cell sets.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AxiomWitness {
    pub identity: String,
    pub set_a: Vec<u64>,
    pub set_b: Vec<u64>,
    pub lhs: (u64, u64),
    pub rhs: (u64, u64),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AxiomReport {
    pub trials: u64,
    pub checks: u64,
    pub failures: Vec<AxiomWitness>,
    pub seed: u64,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }
}

fn check_pair(
    map: &MPCellMap,
    e: &[bool],
    f: &[bool],
    report: &mut AxiomReport,
) {
    let q = map.source.total_cells();
    let cells = |s: &[bool]| -> Vec<u64> {
        s.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as u64)
            .collect()
    };
    let ie = image_set(map, e);
    let i_f = image_set(map, f);
    let ops: [(&str, Vec<bool>, Vec<bool>); 4] = [
        (
            "measure",
            e.to_vec(),
            ie.clone(),
        ),
        (
            "union",
            e.iter().zip(f).map(|(&a, &b)| a | b).collect(),
            ie.iter().zip(&i_f).map(|(&a, &b)| a | b).collect(),
        ),
        (
            "difference",
            e.iter().zip(f).map(|(&a, &b)| a & !b).collect(),
            ie.iter().zip(&i_f).map(|(&a, &b)| a & !b).collect(),
        ),
        (
            "intersection",
            e.iter().zip(f).map(|(&a, &b)| a & b).collect(),
            ie.iter().zip(&i_f).map(|(&a, &b)| a & b).collect(),
        ),
    ];
    for (name, src, tgt) in ops {
        report.checks += 1;
        let mu = measure_of(&src, q);
        let nu = measure_of(&tgt, q);
        if mu != nu {
            report.failures.push(AxiomWitness {
                identity: name.into(),
                set_a: cells(e),
                set_b: cells(f),
                lhs: (*mu.numer(), *mu.denom()),
                rhs: (*nu.numer(), *nu.denom()),
            });
        }
    }
}

/// Verifies the measure-preservation axioms and the derived set identities
/// (difference, finite unions, intersection) on `trials` random pairs and
/// triples of cell unions.
pub fn check_axioms(map: &MPCellMap, trials: u64, seed: u64) -> AxiomReport {
    let q = map.source.total_cells() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AxiomReport {
        trials,
        checks: 0,
        failures: Vec::new(),
        seed,
    };
    for _ in 0..trials {
        let e: Vec<bool> = (0..q).map(|_| rng.gen_bool(0.5)).collect();
        let f: Vec<bool> = (0..q).map(|_| rng.gen_bool(0.5)).collect();
        check_pair(map, &e, &f, &mut report);

        // finite-union analog over a random triple
        let g: Vec<bool> = (0..q).map(|_| rng.gen_bool(0.5)).collect();
        let src: Vec<bool> = (0..q).map(|i| e[i] | f[i] | g[i]).collect();
        let tgt = {
            let (ie, i_f, ig) = (image_set(map, &e), image_set(map, &f), image_set(map, &g));
            (0..ie.len()).map(|i| ie[i] | i_f[i] | ig[i]).collect::<Vec<_>>()
        };
        report.checks += 1;
        let mu = measure_of(&src, q as u64);
        let nu = measure_of(&tgt, q as u64);
        if mu != nu {
            report.failures.push(AxiomWitness {
                identity: "finite union".into(),
                set_a: (0..q as u64).filter(|&i| src[i as usize]).collect(),
                set_b: Vec::new(),
                lhs: (*mu.numer(), *mu.denom()),
                rhs: (*nu.numer(), *nu.denom()),
            });
        }
    }
    report
}

/// Exhaustive version of [`check_axioms`] over every pair of cell unions,
/// on bitmasks. Only feasible for small partitions; guarded at 14 cells.
pub fn check_axioms_exhaustive(map: &MPCellMap) -> Result<AxiomReport> {
    let q = map.source.total_cells();
    if q > 14 {
        return Err(Error::TooLarge(format!(
            "exhaustive axiom check over {q} cells needs 4^{q} set pairs"
        )));
    }
    let mut report = AxiomReport {
        trials: 1 << (2 * q),
        checks: 0,
        failures: Vec::new(),
        seed: 0,
    };
    // image of each singleton, as a mask over target cells
    let singleton: Vec<u64> = (0..q)
        .map(|cell| 1u64 << map.forward[cell as usize])
        .collect();
    let image = |mask: u64| -> u64 {
        let mut img = 0u64;
        let mut rest = mask;
        while rest != 0 {
            let cell = rest.trailing_zeros() as usize;
            img |= singleton[cell];
            rest &= rest - 1;
        }
        img
    };
    let cells_of = |mask: u64| -> Vec<u64> { (0..q).filter(|i| mask >> i & 1 == 1).collect() };
    for ma in 0u64..(1 << q) {
        let ia = image(ma);
        for mb in 0u64..(1 << q) {
            let ib = image(mb);
            let checks: [(&str, u64, u64); 4] = [
                ("measure", ma, ia),
                ("union", ma | mb, ia | ib),
                ("difference", ma & !mb, ia & !ib),
                ("intersection", ma & mb, ia & ib),
            ];
            report.checks += 4;
            for (name, src, tgt) in checks {
                if src.count_ones() != tgt.count_ones() {
                    report.failures.push(AxiomWitness {
                        identity: name.into(),
                        set_a: cells_of(ma),
                        set_b: cells_of(mb),
                        lhs: (src.count_ones() as u64, q),
                        rhs: (tgt.count_ones() as u64, q),
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Finite joint distribution of a tuple of step functions: a multiset of
/// (value tuple, total measure) pairs with exact rational measures.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    atoms: BTreeMap<Vec<ExactValue>, Measure>,
}

impl JointDistribution {
    pub fn atoms(&self) -> &BTreeMap<Vec<ExactValue>, Measure> {
        &self.atoms
    }

    pub fn total(&self) -> Measure {
        self.atoms
            .values()
            .fold(Ratio::new(0, 1), |acc, &m| acc + m)
    }
}

/// Aggregates cells with equal value tuples. All functions must live on one
/// partition.
pub fn joint_distribution(fs: &[&StepFunction<ExactValue>]) -> Result<JointDistribution> {
    let partition = match fs.first() {
        Some(f) => f.partition().clone(),
        None => {
            return Ok(JointDistribution {
                atoms: BTreeMap::new(),
            })
        }
    };
    for f in fs {
        if f.partition() != &partition {
            return Err(Error::PartitionMismatch(
                "joint distribution requires a common partition".into(),
            ));
        }
    }
    let q = partition.total_cells();
    let mut atoms: BTreeMap<Vec<ExactValue>, u64> = BTreeMap::new();
    for cell in 0..q {
        let tuple: Vec<ExactValue> = fs.iter().map(|f| *f.value(cell)).collect();
        *atoms.entry(tuple).or_insert(0) += 1;
    }
    Ok(JointDistribution {
        atoms: atoms
            .into_iter()
            .map(|(t, count)| (t, Ratio::new(count, q)))
            .collect(),
    })
}

/// Exact probabilistic equivalence: equality of joint distributions as
/// multisets. For finite-valued step functions this is equivalent to equality
/// of the joint cumulative distribution over all Borel sets.
pub fn verify_prob_equiv(
    fs: &[&StepFunction<ExactValue>],
    gs: &[&StepFunction<ExactValue>],
) -> Result<bool> {
    if fs.len() != gs.len() {
        return Err(Error::LengthMismatch {
            expected: fs.len(),
            got: gs.len(),
        });
    }
    Ok(joint_distribution(fs)? == joint_distribution(gs)?)
}

/// Exact L² distance between step functions on a common refinement
/// (per-axis lcm of the cell counts).
pub fn l2_distance_steps(
    f: &StepFunction<Complex64>,
    g: &StepFunction<Complex64>,
) -> Result<f64> {
    if f.partition().dim() != g.partition().dim() {
        return Err(Error::DimensionMismatch {
            expected: f.partition().dim(),
            got: g.partition().dim(),
        });
    }
    fn lcm(a: u64, b: u64) -> u64 {
        a / crate::exact::gcd_u128(a as u128, b as u128) as u64 * b
    }
    let axes: Vec<u64> = f
        .partition()
        .axes()
        .iter()
        .zip(g.partition().axes())
        .map(|(&a, &b)| lcm(a, b))
        .collect();
    let refined = CellPartition::new(axes)?;
    let q = refined.total_cells();
    let mut sq = 0.0;
    for cell in 0..q {
        let multi = refined.multi_of(cell)?;
        let coarse = |p: &CellPartition| -> Result<u64> {
            let m: Vec<u64> = multi
                .iter()
                .zip(refined.axes())
                .zip(p.axes())
                .map(|((&u, &r), &a)| u * a / r)
                .collect();
            p.index_of(&m)
        };
        let vf = f.value(coarse(f.partition())?);
        let vg = g.value(coarse(g.partition())?);
        sq += (vf - vg).norm_sqr();
    }
    Ok((sq / q as f64).sqrt())
}

/// Fourier coefficient of a 1-d step function with respect to exp(2πi·m·x).
pub fn step_fourier_coeff(f: &StepFunction<Complex64>, m: i128) -> Result<Complex64> {
    if f.partition().dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: f.partition().dim(),
        });
    }
    let q = f.partition().total_cells();
    // ∫_{k/q}^{(k+1)/q} e^{-2πimx} dx = e^{-2πimk/q} · I_q(m)
    let base = if m == 0 {
        Complex64::new(1.0 / q as f64, 0.0)
    } else {
        let r = m.rem_euclid(q as i128) as u64;
        let t = TAU * r as f64 / q as f64;
        let w = Complex64::new(t.cos(), -t.sin());
        (Complex64::new(1.0, 0.0) - w) / Complex64::new(0.0, TAU * m as f64)
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, v) in f.values().iter().enumerate() {
        let r = (m * k as i128).rem_euclid(q as i128) as u64;
        let t = TAU * r as f64 / q as f64;
        acc += v * Complex64::new(t.cos(), -t.sin());
    }
    Ok(acc * base)
}

/// L² distance between a 1-d step function and a trigonometric polynomial,
/// computed spectrally: ‖f‖² − 2Re⟨f,g⟩ + ‖g‖² with ⟨f,g⟩ summed over the
/// polynomial's finite spectrum.
pub fn l2_distance_step_poly(f: &StepFunction<Complex64>, g: &TrigPolynomial) -> Result<f64> {
    if f.partition().dim() != 1 || g.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: f.partition().dim().max(g.dim()),
        });
    }
    let mut cross = Complex64::new(0.0, 0.0);
    for (freq, c) in g.terms() {
        cross += step_fourier_coeff(f, freq[0])? * c.conj();
    }
    let sq = f.norm_sq() - 2.0 * cross.re + g.norm_sq();
    Ok(sq.max(0.0).sqrt())
}

/// Serialized distribution report, a JSON list of atoms: values are
/// `{num, mod}` for roots of unity and `{re, im}` otherwise; measures are
/// exact fractions.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(transparent)]
pub struct DistributionDocument {
    pub atoms: Vec<AtomDocument>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AtomDocument {
    pub values: Vec<ValueDocument>,
    pub measure: RatioDocument,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ValueDocument {
    Unit {
        num: u64,
        #[serde(rename = "mod")]
        modulus: u64,
    },
    Complex {
        re: f64,
        im: f64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RatioDocument {
    pub num: u64,
    pub den: u64,
}

impl DistributionDocument {
    pub fn from_distribution(d: &JointDistribution) -> DistributionDocument {
        DistributionDocument {
            atoms: d
                .atoms()
                .iter()
                .map(|(tuple, m)| AtomDocument {
                    values: tuple
                        .iter()
                        .map(|v| {
                            if v.is_unit() {
                                ValueDocument::Unit {
                                    num: v.phase().num(),
                                    modulus: v.phase().den(),
                                }
                            } else {
                                let z = v.to_complex();
                                ValueDocument::Complex { re: z.re, im: z.im }
                            }
                        })
                        .collect(),
                    measure: RatioDocument {
                        num: *m.numer(),
                        den: *m.denom(),
                    },
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::UnitPhase;
    use approx::assert_relative_eq;

    fn dts_step(l: u64, n: u64) -> StepFunction<ExactValue> {
        crate::dts::DiscreteTrigSystem::one_dimensional(l)
            .unwrap()
            .step_function(&[n])
            .unwrap()
    }

    #[test]
    fn identity_map_fixes_functions() {
        let part = CellPartition::one_dim(6);
        let f = dts_step(6, 2);
        let map = MPCellMap::identity(part);
        assert_eq!(map.apply(&f).unwrap(), f);
    }

    #[test]
    fn bijections_fix_constants() {
        let part = CellPartition::new(vec![2, 3]).unwrap();
        let f = StepFunction::constant(part.clone(), ExactValue::integer(7));
        let map = MPCellMap::new(
            part.clone(),
            CellPartition::one_dim(6),
            vec![3, 1, 4, 0, 5, 2],
        )
        .unwrap();
        let g = map.apply(&f).unwrap();
        assert!(g.values().iter().all(|v| *v == ExactValue::integer(7)));
    }

    #[test]
    fn apply_preserves_l2_norm() {
        let part = CellPartition::one_dim(5);
        let f = dts_step(5, 3);
        let map = MPCellMap::new(
            part.clone(),
            part.clone(),
            vec![2, 0, 4, 1, 3],
        )
        .unwrap();
        let g = map.apply(&f).unwrap();
        assert_relative_eq!(
            f.to_complex().norm_sq(),
            g.to_complex().norm_sq(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn axioms_pass_for_equal_measure_bijection() {
        let part = CellPartition::one_dim(8);
        let map = MPCellMap::new(
            part.clone(),
            part.clone(),
            vec![5, 3, 7, 1, 0, 2, 6, 4],
        )
        .unwrap();
        let report = check_axioms(&map, 64, 7);
        assert!(report.all_pass(), "failures: {:?}", report.failures);
    }

    #[test]
    fn corrupted_map_fails_with_witness() {
        // Two cells both sent to cell 0: intersection identity must fail.
        let part = CellPartition::one_dim(2);
        let broken = MPCellMap::new_unchecked(part.clone(), part.clone(), vec![0, 0]);
        let report = check_axioms_exhaustive(&broken).unwrap();
        assert!(!report.all_pass());
        assert!(report
            .failures
            .iter()
            .any(|w| w.identity == "intersection" || w.identity == "measure"));
        // And the checked constructor rejects it outright.
        assert!(MPCellMap::new(part.clone(), part, vec![0, 0]).is_err());
    }

    #[test]
    fn exhaustive_axioms_small_partitions() {
        for axes in [vec![12], vec![2, 3], vec![3, 2, 2]] {
            let part = CellPartition::new(axes).unwrap();
            let q = part.total_cells();
            let forward: Vec<u64> = (0..q).map(|i| (i * 5 + 3) % q).collect();
            let map = MPCellMap::new(part.clone(), part, forward).unwrap();
            let report = check_axioms_exhaustive(&map).unwrap();
            assert!(report.all_pass());
        }
    }

    #[test]
    fn joint_distribution_of_rademacher_like_step() {
        let f = dts_step(2, 1);
        let d = joint_distribution(&[&f]).unwrap();
        let one = vec![ExactValue::one()];
        let minus = vec![ExactValue::new(
            Ratio::new(1, 1),
            UnitPhase::half(),
        )];
        assert_eq!(d.atoms().len(), 2);
        assert_eq!(d.atoms()[&one], Ratio::new(1, 2));
        assert_eq!(d.atoms()[&minus], Ratio::new(1, 2));
    }

    #[test]
    fn joint_distribution_of_constant() {
        let part = CellPartition::one_dim(4);
        let f = StepFunction::constant(part, ExactValue::integer(3));
        let d = joint_distribution(&[&f]).unwrap();
        assert_eq!(d.atoms().len(), 1);
        assert_eq!(d.atoms()[&vec![ExactValue::integer(3)]], Ratio::new(1, 1));
    }

    #[test]
    fn joint_distribution_order_three_pair() {
        let f = dts_step(3, 1);
        let g = dts_step(3, 2);
        let d = joint_distribution(&[&f, &g]).unwrap();
        assert_eq!(d.atoms().len(), 3);
        for k in 0..3i128 {
            let tuple = vec![
                ExactValue::root_of_unity(k, 3),
                ExactValue::root_of_unity(2 * k, 3),
            ];
            assert_eq!(d.atoms()[&tuple], Ratio::new(1, 3));
        }
    }

    #[test]
    fn prob_equiv_trivial_cases() {
        let f = dts_step(4, 1);
        let g = dts_step(4, 1);
        assert!(verify_prob_equiv(&[&f], &[&g]).unwrap());
        let part = CellPartition::one_dim(3);
        let one = StepFunction::constant(part.clone(), ExactValue::one());
        let zero = StepFunction::constant(part, ExactValue::zero());
        assert!(!verify_prob_equiv(&[&one], &[&zero]).unwrap());
        assert!(verify_prob_equiv(&[&one], &[]).is_err());
    }

    #[test]
    fn prob_equiv_invariant_under_common_map() {
        let part = CellPartition::one_dim(6);
        let fs: Vec<_> = (0..3).map(|n| dts_step(6, n)).collect();
        let map = MPCellMap::new(
            part.clone(),
            part,
            vec![4, 2, 0, 5, 1, 3],
        )
        .unwrap();
        let gs: Vec<_> = fs.iter().map(|f| map.apply(f).unwrap()).collect();
        let fs_ref: Vec<&StepFunction<ExactValue>> = fs.iter().collect();
        let gs_ref: Vec<&StepFunction<ExactValue>> = gs.iter().collect();
        assert!(verify_prob_equiv(&fs_ref, &gs_ref).unwrap());
        // symmetry
        assert!(verify_prob_equiv(&gs_ref, &fs_ref).unwrap());
    }

    #[test]
    fn transport_is_linear_and_multiplicative() {
        let part = CellPartition::new(vec![2, 4]).unwrap();
        let map = MPCellMap::new(
            part.clone(),
            CellPartition::one_dim(8),
            vec![6, 1, 7, 0, 3, 5, 2, 4],
        )
        .unwrap();
        let f = StepFunction::new(
            part.clone(),
            (0..8).map(|i| Complex64::new(i as f64, -(i as f64))).collect(),
        )
        .unwrap();
        let g = StepFunction::new(
            part.clone(),
            (0..8).map(|i| Complex64::new(1.0 / (i + 1) as f64, 0.3)).collect(),
        )
        .unwrap();
        let (alpha, beta) = (Complex64::new(2.0, 1.0), Complex64::new(-0.5, 0.25));
        let combo = StepFunction::new(
            part.clone(),
            f.values()
                .iter()
                .zip(g.values())
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        )
        .unwrap();
        let product = StepFunction::new(
            part.clone(),
            f.values().iter().zip(g.values()).map(|(a, b)| a * b).collect(),
        )
        .unwrap();
        let (tf, tg) = (map.apply(&f).unwrap(), map.apply(&g).unwrap());
        let t_combo = map.apply(&combo).unwrap();
        let t_product = map.apply(&product).unwrap();
        for cell in 0..8u64 {
            let lin = alpha * tf.value(cell) + beta * tg.value(cell);
            assert_eq!(*t_combo.value(cell), lin);
            assert_eq!(*t_product.value(cell), tf.value(cell) * tg.value(cell));
        }
        assert_relative_eq!(f.norm_sq(), tf.norm_sq(), epsilon = 0.0);
    }

    #[test]
    fn transport_preserves_joint_distributions() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for axes in [vec![16u64], vec![4, 8], vec![256], vec![2, 3, 7]] {
            let part = CellPartition::new(axes).unwrap();
            let q = part.total_cells();
            let mut forward: Vec<u64> = (0..q).collect();
            forward.shuffle(&mut rng);
            let map = MPCellMap::new(part.clone(), CellPartition::one_dim(q), forward).unwrap();
            // random step functions with exact root-of-unity values
            let fs: Vec<StepFunction<ExactValue>> = (0..3)
                .map(|_| {
                    StepFunction::new(
                        part.clone(),
                        (0..q)
                            .map(|_| {
                                ExactValue::root_of_unity(
                                    rng.gen_range(0..12) as i128,
                                    12,
                                )
                            })
                            .collect(),
                    )
                    .unwrap()
                })
                .collect();
            let gs: Vec<_> = fs.iter().map(|f| map.apply(f).unwrap()).collect();
            let fs_ref: Vec<&StepFunction<_>> = fs.iter().collect();
            let gs_ref: Vec<&StepFunction<_>> = gs.iter().collect();
            assert!(verify_prob_equiv(&fs_ref, &gs_ref).unwrap());
        }
    }

    #[test]
    fn distribution_document_round_trips() {
        let f = dts_step(3, 1);
        let g = dts_step(3, 2);
        let d = joint_distribution(&[&f, &g]).unwrap();
        let doc = DistributionDocument::from_distribution(&d);
        let json = serde_json::to_string_pretty(&doc).unwrap();
        let back: DistributionDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(doc, back);
        let total: f64 = doc
            .atoms
            .iter()
            .map(|a| a.measure.num as f64 / a.measure.den as f64)
            .sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn l2_distance_of_disjoint_indicators() {
        let part = CellPartition::one_dim(4);
        let a = StepFunction::indicator(part.clone(), 0).unwrap().to_complex();
        let b = StepFunction::indicator(part, 2).unwrap().to_complex();
        assert_relative_eq!(
            l2_distance_steps(&a, &b).unwrap(),
            (0.5f64).sqrt(),
            epsilon = 1e-14
        );
        assert_eq!(l2_distance_steps(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn l2_distance_step_function_to_truncation() {
        // the order-2 step exponential against its one-term truncation:
        // ‖t − g‖ = √(1 − 4/π²)
        let t = dts_step(2, 1).to_complex();
        let g = crate::dts::truncate(2, 1, 1).unwrap();
        let d = l2_distance_step_poly(&t, &g).unwrap();
        let expected = (1.0 - 4.0 / (std::f64::consts::PI * std::f64::consts::PI)).sqrt();
        assert_relative_eq!(d, expected, epsilon = 1e-12);
        assert_relative_eq!(d, 0.771178, epsilon = 1e-6);
    }

    mod properties {
        use super::*;
        use proptest::prelude::{any, ProptestConfig};
        use proptest::{prop_assert, prop_assert_eq, proptest};
        use rand::seq::SliceRandom;
        use rand::SeedableRng;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn joint_distribution_total_measure_is_one(
                q in 1u64..64,
                seed in any::<u64>(),
            ) {
                let part = CellPartition::one_dim(q);
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let f = StepFunction::new(
                    part,
                    (0..q)
                        .map(|_| ExactValue::root_of_unity(rng.gen_range(0..8) as i128, 8))
                        .collect(),
                )
                .unwrap();
                let d = joint_distribution(&[&f]).unwrap();
                prop_assert_eq!(d.total(), Ratio::new(1, 1));
            }

            #[test]
            fn equivalence_survives_shuffled_transport(
                q in 2u64..48,
                seed in any::<u64>(),
            ) {
                let part = CellPartition::one_dim(q);
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let mut forward: Vec<u64> = (0..q).collect();
                forward.shuffle(&mut rng);
                let map = MPCellMap::new(part.clone(), part.clone(), forward).unwrap();
                let fs: Vec<StepFunction<ExactValue>> = (0..2)
                    .map(|_| {
                        StepFunction::new(
                            part.clone(),
                            (0..q)
                                .map(|_| {
                                    ExactValue::root_of_unity(
                                        rng.gen_range(0..6) as i128,
                                        6,
                                    )
                                })
                                .collect(),
                        )
                        .unwrap()
                    })
                    .collect();
                let gs: Vec<_> = fs.iter().map(|f| map.apply(f).unwrap()).collect();
                let fs_ref: Vec<&StepFunction<_>> = fs.iter().collect();
                let gs_ref: Vec<&StepFunction<_>> = gs.iter().collect();
                prop_assert!(verify_prob_equiv(&fs_ref, &gs_ref).unwrap());
                prop_assert!(verify_prob_equiv(&gs_ref, &fs_ref).unwrap());
            }
        }
    }

    #[test]
    fn l2_distance_across_refinements() {
        // Same function expressed on 2 cells and on 6 cells.
        let coarse = StepFunction::new(
            CellPartition::one_dim(2),
            vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
        )
        .unwrap();
        let fine = StepFunction::new(
            CellPartition::one_dim(6),
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(-1.0, 0.0),
            ],
        )
        .unwrap();
        assert_relative_eq!(l2_distance_steps(&coarse, &fine).unwrap(), 0.0, epsilon = 1e-14);
    }
}
