//! The block reduction pipeline: rewrite a sequence of d-dimensional
//! trigonometric functions (index mode) or non-overlapping d-dimensional
//! polynomials (polynomial mode) as a system of non-overlapping
//! one-dimensional trigonometric polynomials with controlled slot sizes,
//! offsets, and certified equivalence errors.
//!
//! Members of dyadic block k (indices 2^k ≤ n < 2^{k+1}) are discretized with
//! block-specific coprime prime moduli, carried to the one-dimensional
//! discrete system of order p = Πp_j by the coprime index map, truncated to a
//! central spectral window, and translated so that spectra of distinct blocks
//! never overlap.
//!
//! A member polynomial is stored implicitly as (residue, window, shift): its
//! frequencies form the arithmetic progression residue + p·j restricted to
//! the window, and its coefficients have a closed form. Slot norms and
//! truncation errors come from trigamma tail sums, so plans with billions of
//! conceptual slots stay O(1) per member; explicit terms are materialized
//! only on demand.

use crate::crt::{tau_of_ints, CoprimeModuli};
use crate::error::{Error, Result};
use crate::poly::TrigPolynomial;
use crate::special::{dts_kept_energy, dts_tail_energy};
use crate::weights::WeightSequence;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};

/// The recorded constant Κ of the block error law: every built block carries
/// a certified equivalence error ε_k ≤ Κ·2^{-k}. The worst case is the
/// one-term window of block 0 at phase fraction 1/2, where the kept
/// coefficient has modulus 2/π: 1/2 + sqrt(1 - 4/π²) ≈ 1.2712.
pub const BLOCK_ERROR_LAW_CONSTANT: f64 = 1.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanMode {
    /// Single exponentials: slot sizes are pinned to 4^k.
    Rc,
    /// Non-overlapping polynomials: slot sizes follow the actual term counts.
    Src,
}

/// Input sequence for the pipeline.
#[derive(Clone, Debug)]
pub struct ReductionInput {
    dim: usize,
    entries: InputEntries,
}

#[derive(Clone, Debug)]
enum InputEntries {
    /// Frequency vectors of single exponentials, pairwise distinct.
    Indices(Vec<Vec<i64>>),
    /// Monomial expansions (frequency, coefficient), spectra pairwise
    /// disjoint, each normalized to norm ≤ 1.
    Polys(Vec<Vec<(Vec<i64>, Complex64)>>),
}

impl ReductionInput {
    pub fn from_indices(dim: usize, indices: Vec<Vec<i64>>) -> Result<ReductionInput> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let mut seen = BTreeSet::new();
        for v in &indices {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if !seen.insert(v.clone()) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate frequency vector {v:?}"
                )));
            }
        }
        Ok(ReductionInput {
            dim,
            entries: InputEntries::Indices(indices),
        })
    }

    /// Polynomial inputs; spectra must be pairwise disjoint. Norms above 1
    /// are scaled down to 1.
    pub fn from_polynomials(polys: Vec<TrigPolynomial>) -> Result<ReductionInput> {
        let dim = match polys.first() {
            Some(p) => p.dim(),
            None => {
                return Err(Error::InvalidParameter("empty polynomial input".into()))
            }
        };
        let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
        let mut entries = Vec::with_capacity(polys.len());
        for p in &polys {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
            if p.spectrum().is_empty() {
                return Err(Error::InvalidParameter(
                    "polynomial inputs must be nonzero".into(),
                ));
            }
            let scale = {
                let norm = p.l2_norm();
                if norm > 1.0 {
                    1.0 / norm
                } else {
                    1.0
                }
            };
            let mut expansion = Vec::with_capacity(p.len());
            for (freq, c) in p.terms() {
                if c.norm_sqr() == 0.0 {
                    continue;
                }
                let freq: Vec<i64> = freq
                    .iter()
                    .map(|&m| {
                        i64::try_from(m).map_err(|_| {
                            Error::TooLarge(format!("input frequency {m} exceeds 64 bits"))
                        })
                    })
                    .collect::<Result<_>>()?;
                if !seen.insert(freq.clone()) {
                    return Err(Error::InvalidParameter(format!(
                        "input spectra overlap at frequency {freq:?}"
                    )));
                }
                expansion.push((freq, scale * c));
            }
            entries.push(expansion);
        }
        Ok(ReductionInput {
            dim,
            entries: InputEntries::Polys(entries),
        })
    }

    pub fn mode(&self) -> PlanMode {
        match self.entries {
            InputEntries::Indices(_) => PlanMode::Rc,
            InputEntries::Polys(_) => PlanMode::Src,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        match &self.entries {
            InputEntries::Indices(v) => v.len(),
            InputEntries::Polys(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn expansion(&self, idx: usize) -> Vec<(Vec<i64>, Complex64)> {
        match &self.entries {
            InputEntries::Indices(v) => vec![(v[idx].clone(), Complex64::new(1.0, 0.0))],
            InputEntries::Polys(v) => v[idx].clone(),
        }
    }
}

/// Progression offsets kept for one spectral part: lo ≤ j ≤ hi.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    /// The window holding `budget` terms with smallest |j|, ties toward
    /// j < 0.
    pub fn central(budget: u64) -> Window {
        let neg = (budget / 2) as i64;
        Window {
            lo: -neg,
            hi: budget as i64 - 1 - neg,
        }
    }

    /// The window holding the `budget` largest coefficients of a progression
    /// with phase fraction x: for x ≤ 1/2 the dominant offset is 0 and ties
    /// go negative; for x > 1/2 it is -1 and ties mirror toward 0.
    pub fn dominant(budget: u64, x_above_half: bool) -> Window {
        let c = Window::central(budget);
        if x_above_half {
            Window {
                lo: -1 - c.hi,
                hi: -1 - c.lo,
            }
        } else {
            c
        }
    }

    pub fn len(&self) -> u64 {
        (self.hi - self.lo + 1) as u64
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, j: i64) -> bool {
        self.lo <= j && j <= self.hi
    }
}

/// One spectral part of a plan member: the input exponential with frequency
/// vector `source_freq` lands on the progression `residue + p·j`.
#[derive(Clone, Debug)]
pub struct MemberPart {
    pub source_freq: Vec<i64>,
    pub coeff: Complex64,
    pub residue: u128,
    pub window: Window,
}

#[derive(Clone, Debug)]
pub struct PlanMember {
    /// 1-based sequence index n.
    pub index: u64,
    pub parts: Vec<MemberPart>,
}

impl PlanMember {
    pub fn term_count(&self) -> u64 {
        self.parts.iter().map(|p| p.window.len()).sum()
    }
}

#[derive(Clone, Debug)]
pub struct BlockPlan {
    pub k: u32,
    pub moduli: CoprimeModuli,
    pub shift: i128,
    pub members: Vec<PlanMember>,
    /// Sup-norm discretization bound Σ_j 2π·M_j/p_j, at most 2^{-k-1}.
    pub disc_bound: f64,
    /// Max over members of the L² truncation distance.
    pub trunc_bound: f64,
    /// Certified block equivalence error, disc_bound + trunc_bound.
    pub eps: f64,
}

/// Complete output of the pipeline over a prefix 1..=count.
#[derive(Clone, Debug)]
pub struct ReductionPlan {
    mode: PlanMode,
    dim: usize,
    count: u64,
    blocks: Vec<BlockPlan>,
    /// offsets[i] = s_{i+1}; offsets[0] = s_1 = 0; length count + 1.
    offsets: Vec<u64>,
}

/// One materialized term of the flat series: coefficient b at frequency
/// `freq`, occupying slot position s (1-based).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanTerm {
    pub slot: u64,
    pub freq: i128,
    pub coeff: Complex64,
}

/// Closed-form coefficient of the order-p discrete exponential with residue r
/// at progression offset j, i.e. at frequency r + p·j.
pub fn progression_coeff(p: u128, residue: u128, j: i64) -> Complex64 {
    if residue == 0 {
        return if j == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let m = residue as i128 + p as i128 * j as i128;
    let t = TAU * (residue as f64 / p as f64);
    let w = Complex64::new(t.cos(), -t.sin());
    let numer = Complex64::new(1.0 - w.re, -w.im);
    p as f64 * numer / Complex64::new(0.0, TAU * m as f64)
}

fn axis_maxima(dim: usize, freqs: &[Vec<i64>]) -> Vec<i64> {
    let mut m = vec![0i64; dim];
    for f in freqs {
        for (slot, &v) in m.iter_mut().zip(f) {
            *slot = (*slot).max(v.abs());
        }
    }
    m
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn next_prime(mut from: u64) -> u64 {
    if from <= 2 {
        return 2;
    }
    if from % 2 == 0 {
        from += 1;
    }
    while !is_prime(from) {
        from += 2;
    }
    from
}

/// Block moduli: the smallest distinct primes, one per axis, with
/// p_j > 2·max|n_j| and an equal share of the sup-norm error budget,
/// 2π·max|n_j|/p_j ≤ ε/d, so that Σ_j 2π·max|n_j|/p_j ≤ ε.
pub fn choose_block_moduli(
    block_freqs: &[Vec<i64>],
    dim: usize,
    eps: f64,
) -> Result<CoprimeModuli> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("error target must be positive".into()));
    }
    if block_freqs.is_empty() {
        return Err(Error::InvalidParameter("empty block".into()));
    }
    for f in block_freqs {
        if f.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: f.len(),
            });
        }
    }
    let maxima = axis_maxima(dim, block_freqs);
    let mut chosen: Vec<u64> = Vec::with_capacity(dim);
    for &m in &maxima {
        let mut lower = (2 * m as u128 + 1).max(2) as f64;
        if m > 0 {
            let eps_bound = TAU * m as f64 * dim as f64 / eps;
            lower = lower.max(eps_bound);
        }
        if lower > 9.0e15 {
            return Err(Error::TooLarge(format!(
                "required modulus {lower:.3e} exceeds the supported range"
            )));
        }
        let mut candidate = next_prime(lower.ceil() as u64);
        while chosen.contains(&candidate) {
            candidate = next_prime(candidate + 1);
        }
        chosen.push(candidate);
    }
    CoprimeModuli::new(chosen)
}

/// Symmetric window wide enough that the truncation tail stays at or below
/// `target` in L².
fn src_window(x: f64, target: f64) -> Window {
    if x == 0.0 {
        return Window { lo: 0, hi: 0 };
    }
    let target_sq = target * target;
    let mut j = ((2.0 / (PI * PI * target_sq)).ceil() as i64).max(1);
    while dts_tail_energy(x, -j, j) > target_sq {
        j += j / 8 + 1;
    }
    Window { lo: -j, hi: j }
}

/// Builds the members of block k from (index, expansion) pairs. The moduli
/// must already dominate the block: p_j > 2·max|n_j| for every axis.
pub fn build_block(
    entries: &[(u64, Vec<(Vec<i64>, Complex64)>)],
    k: u32,
    moduli: &CoprimeModuli,
    mode: PlanMode,
) -> Result<BlockPlan> {
    if entries.is_empty() {
        return Err(Error::InvalidParameter("empty block".into()));
    }
    if k >= 30 {
        return Err(Error::TooLarge(format!("block index {k} out of range")));
    }
    let dim = moduli.dim();
    let all_freqs: Vec<Vec<i64>> = entries
        .iter()
        .flat_map(|(_, parts)| parts.iter().map(|(f, _)| f.clone()))
        .collect();
    let maxima = axis_maxima(dim, &all_freqs);
    for (&m, &p) in maxima.iter().zip(moduli.moduli()) {
        if p as u128 <= 2 * m as u128 {
            return Err(Error::InvalidParameter(format!(
                "modulus {p} too small for axis maximum {m}"
            )));
        }
    }
    let disc_bound: f64 = maxima
        .iter()
        .zip(moduli.moduli())
        .map(|(&m, &p)| TAU * m as f64 / p as f64)
        .sum();

    let p = moduli.product();
    let rc_budget = 1u64 << (2 * k); // 4^k
    let src_target = 0.5f64.powi(k as i32 + 1);
    let mut members = Vec::with_capacity(entries.len());
    let mut trunc_bound = 0.0f64;
    for (index, expansion) in entries {
        let mut parts = Vec::with_capacity(expansion.len());
        let mut trunc_sq = 0.0;
        for (freq, coeff) in expansion {
            let residue = tau_of_ints(moduli, freq)?;
            let x = residue as f64 / p as f64;
            let window = if residue == 0 {
                Window { lo: 0, hi: 0 }
            } else {
                match mode {
                    PlanMode::Rc => Window::dominant(rc_budget, 2 * residue > p),
                    PlanMode::Src => src_window(x, src_target),
                }
            };
            trunc_sq += coeff.norm_sqr() * dts_tail_energy(x, window.lo, window.hi);
            parts.push(MemberPart {
                source_freq: freq.clone(),
                coeff: *coeff,
                residue,
                window,
            });
        }
        trunc_bound = trunc_bound.max(trunc_sq.sqrt());
        members.push(PlanMember {
            index: *index,
            parts,
        });
    }
    Ok(BlockPlan {
        k,
        moduli: moduli.clone(),
        shift: 0,
        members,
        disc_bound,
        trunc_bound,
        eps: disc_bound + trunc_bound,
    })
}

fn block_raw_interval(block: &BlockPlan) -> (i128, i128) {
    let p = block.moduli.product() as i128;
    let mut lo = i128::MAX;
    let mut hi = i128::MIN;
    for member in &block.members {
        for part in &member.parts {
            let r = part.residue as i128;
            lo = lo.min(r + p * part.window.lo as i128);
            hi = hi.max(r + p * part.window.hi as i128);
        }
    }
    (lo, hi)
}

/// Greedy interval packing: a block keeps shift 0 when its raw spectrum
/// interval avoids everything already placed; otherwise it is translated so
/// its minimum frequency lands one past the maximum occupied frequency
/// (which also keeps translated blocks positive). Returns the shifts and
/// stores them on the blocks.
pub fn assign_shifts(blocks: &mut [BlockPlan]) -> Vec<i128> {
    let mut occupied: Vec<(i128, i128)> = Vec::new();
    let mut shifts = Vec::with_capacity(blocks.len());
    for block in blocks.iter_mut() {
        let (lo, hi) = block_raw_interval(block);
        let conflict = occupied.iter().any(|&(a, b)| lo <= b && a <= hi);
        let shift = if conflict {
            let max_end = occupied.iter().map(|&(_, b)| b).max().unwrap_or(0).max(0);
            max_end + 1 - lo
        } else {
            0
        };
        block.shift = shift;
        occupied.push((lo + shift, hi + shift));
        shifts.push(shift);
    }
    shifts
}

/// Runs the whole pipeline over the dyadic blocks covering 1..=count:
/// moduli selection at error 2^{-k-1}, member construction, shift
/// assignment, and the offset recurrence s_1 = 0, s_{n+1} - s_n = 4^k
/// (index mode) or the actual term count (polynomial mode).
pub fn build_reduction(input: &ReductionInput, count: u64) -> Result<ReductionPlan> {
    if count == 0 {
        return Err(Error::InvalidParameter("prefix length must be positive".into()));
    }
    if (input.len() as u64) < count {
        return Err(Error::LengthMismatch {
            expected: count as usize,
            got: input.len(),
        });
    }
    let mode = input.mode();
    let mut blocks = Vec::new();
    let mut n = 1u64;
    let mut k = 0u32;
    while n <= count {
        let hi = ((1u64 << (k + 1)) - 1).min(count);
        let entries: Vec<(u64, Vec<(Vec<i64>, Complex64)>)> = (n..=hi)
            .map(|idx| (idx, input.expansion(idx as usize - 1)))
            .collect();
        let freqs: Vec<Vec<i64>> = entries
            .iter()
            .flat_map(|(_, parts)| parts.iter().map(|(f, _)| f.clone()))
            .collect();
        let eps = 0.5f64.powi(k as i32 + 1);
        let moduli = choose_block_moduli(&freqs, input.dim(), eps)?;
        blocks.push(build_block(&entries, k, &moduli, mode)?);
        n = hi + 1;
        k += 1;
    }
    assign_shifts(&mut blocks);

    let mut offsets = Vec::with_capacity(count as usize + 1);
    offsets.push(0u64);
    for block in &blocks {
        for member in &block.members {
            let slot = match mode {
                PlanMode::Rc => 1u64 << (2 * block.k),
                PlanMode::Src => member.term_count(),
            };
            let prev = *offsets.last().unwrap();
            offsets.push(prev.checked_add(slot).ok_or_else(|| {
                Error::TooLarge("slot offsets overflow a 64-bit counter".into())
            })?);
        }
    }
    Ok(ReductionPlan {
        mode,
        dim: input.dim(),
        count,
        blocks,
        offsets,
    })
}

/// Iteration surface shared by in-memory plans and their serialized
/// documents: offsets plus per-member flat terms.
pub trait PlanTermsView {
    fn mode(&self) -> PlanMode;
    fn count(&self) -> u64;
    fn offsets(&self) -> &[u64];
    fn member_terms(&self, n: u64) -> Box<dyn Iterator<Item = PlanTerm> + '_>;

    /// (s_n, s_{n+1}) for the 1-based index n.
    fn slot_range(&self, n: u64) -> (u64, u64) {
        (
            self.offsets()[n as usize - 1],
            self.offsets()[n as usize],
        )
    }

    fn total_slots(&self) -> u64 {
        *self.offsets().last().unwrap()
    }
}

impl ReductionPlan {
    pub fn mode(&self) -> PlanMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn blocks(&self) -> &[BlockPlan] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    fn locate(&self, n: u64) -> Result<(usize, usize)> {
        if n == 0 || n > self.count {
            return Err(Error::IndexOutOfRange {
                index: n as i128,
                order: self.count as u128,
            });
        }
        let k = n.ilog2() as usize;
        Ok((k, (n - (1 << k)) as usize))
    }

    pub fn block_for(&self, n: u64) -> Result<&BlockPlan> {
        Ok(&self.blocks[self.locate(n)?.0])
    }

    pub fn member(&self, n: u64) -> Result<&PlanMember> {
        let (b, m) = self.locate(n)?;
        Ok(&self.blocks[b].members[m])
    }

    /// Σ|b_s|² over the member's slot, via the trigamma closed form.
    pub fn member_norm_sq(&self, n: u64) -> Result<f64> {
        let (b, m) = self.locate(n)?;
        let block = &self.blocks[b];
        let member = &block.members[m];
        let p = block.moduli.product();
        Ok(member
            .parts
            .iter()
            .map(|part| {
                let x = part.residue as f64 / p as f64;
                part.coeff.norm_sqr() * dts_kept_energy(x, part.window.lo, part.window.hi)
            })
            .sum())
    }

    /// Occupied frequency interval of the member, shift included.
    pub fn member_interval(&self, n: u64) -> Result<(i128, i128)> {
        let (b, m) = self.locate(n)?;
        let block = &self.blocks[b];
        let member = &block.members[m];
        let p = block.moduli.product() as i128;
        let mut lo = i128::MAX;
        let mut hi = i128::MIN;
        for part in &member.parts {
            let r = part.residue as i128;
            lo = lo.min(r + p * part.window.lo as i128);
            hi = hi.max(r + p * part.window.hi as i128);
        }
        Ok((lo + block.shift, hi + block.shift))
    }

    /// Materializes the member as an explicit polynomial; errors when the
    /// term count exceeds `max_terms`.
    pub fn member_polynomial(&self, n: u64, max_terms: u64) -> Result<TrigPolynomial> {
        let member = self.member(n)?;
        if member.term_count() > max_terms {
            return Err(Error::TooLarge(format!(
                "member {n} holds {} terms, limit {max_terms}",
                member.term_count()
            )));
        }
        let mut poly = TrigPolynomial::new(1);
        for term in self.member_terms(n) {
            poly.add_term(vec![term.freq], term.coeff)?;
        }
        Ok(poly)
    }
}

impl PlanTermsView for ReductionPlan {
    fn mode(&self) -> PlanMode {
        self.mode
    }

    fn count(&self) -> u64 {
        self.count
    }

    fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    fn member_terms(&self, n: u64) -> Box<dyn Iterator<Item = PlanTerm> + '_> {
        let (b, m) = match self.locate(n) {
            Ok(loc) => loc,
            Err(_) => return Box::new(std::iter::empty()),
        };
        let block = &self.blocks[b];
        let member = &block.members[m];
        let p = block.moduli.product();
        let shift = block.shift;
        let slot_start = self.offsets[n as usize - 1];
        let parts = member.parts.clone();
        let iter = parts.into_iter().flat_map(move |part| {
            (part.window.lo..=part.window.hi).map(move |j| {
                let freq = part.residue as i128 + p as i128 * j as i128 + shift;
                let coeff = part.coeff * progression_coeff(p, part.residue, j);
                (freq, coeff)
            })
        });
        Box::new(iter.enumerate().map(move |(i, (freq, coeff))| PlanTerm {
            slot: slot_start + 1 + i as u64,
            freq,
            coeff,
        }))
    }
}

/// Structural audit of a plan: offset laws, slot norms, spectrum
/// disjointness, and the block error law.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StructureReport {
    pub count: u64,
    pub total_slots: u64,
    pub offset_law_violations: u64,
    pub offset_bound_violations: u64,
    pub slot_norm_violations: u64,
    pub max_slot_norm_sq: f64,
    pub spectra_disjoint: bool,
    pub error_law_violations: u64,
    pub max_eps_ratio: f64,
}

impl StructureReport {
    pub fn all_ok(&self) -> bool {
        self.offset_law_violations == 0
            && self.offset_bound_violations == 0
            && self.slot_norm_violations == 0
            && self.spectra_disjoint
            && self.error_law_violations == 0
    }
}

impl ReductionPlan {
    pub fn validate(&self) -> Result<StructureReport> {
        let mut report = StructureReport {
            count: self.count,
            total_slots: self.total_slots(),
            offset_law_violations: 0,
            offset_bound_violations: 0,
            slot_norm_violations: 0,
            max_slot_norm_sq: 0.0,
            spectra_disjoint: true,
            error_law_violations: 0,
            max_eps_ratio: 0.0,
        };
        for n in 1..=self.count {
            let (s_lo, s_hi) = self.slot_range(n);
            let expected = match self.mode {
                PlanMode::Rc => 1u64 << (2 * self.block_for(n)?.k),
                PlanMode::Src => self.member(n)?.term_count(),
            };
            if s_hi - s_lo != expected {
                report.offset_law_violations += 1;
            }
            // s_n ≤ n⁴
            let n4 = (n as u128).pow(4);
            if (s_lo as u128) > n4 {
                report.offset_bound_violations += 1;
            }
            let norm_sq = self.member_norm_sq(n)?;
            report.max_slot_norm_sq = report.max_slot_norm_sq.max(norm_sq);
            if norm_sq > 1.0 + 1e-9 {
                report.slot_norm_violations += 1;
            }
        }
        // distinct residues give disjoint progressions within a block
        for block in &self.blocks {
            let mut residues = BTreeSet::new();
            for member in &block.members {
                for part in &member.parts {
                    if !residues.insert(part.residue) {
                        report.spectra_disjoint = false;
                    }
                }
            }
        }
        // across blocks: shifted intervals must be pairwise disjoint
        let mut intervals: Vec<(i128, i128)> = Vec::new();
        for block in &self.blocks {
            let (lo, hi) = block_raw_interval(block);
            intervals.push((lo + block.shift, hi + block.shift));
        }
        intervals.sort();
        for pair in intervals.windows(2) {
            if pair[1].0 <= pair[0].1 {
                report.spectra_disjoint = false;
            }
        }
        for block in &self.blocks {
            let bound = BLOCK_ERROR_LAW_CONSTANT * 0.5f64.powi(block.k as i32);
            report.max_eps_ratio = report
                .max_eps_ratio
                .max(block.eps * 2.0f64.powi(block.k as i32));
            if block.eps > bound {
                report.error_law_violations += 1;
            }
        }
        Ok(report)
    }
}

/// c_s = a_n·b_s for s in slot n, as a flat vector over every slot
/// (padding slots hold zero). Guarded against huge plans.
pub fn map_coefficients(plan: &dyn PlanTermsView, a: &[f64]) -> Result<Vec<Complex64>> {
    if a.len() as u64 > plan.count() {
        return Err(Error::LengthMismatch {
            expected: plan.count() as usize,
            got: a.len(),
        });
    }
    let total = plan.total_slots();
    if total > 1 << 24 {
        return Err(Error::TooLarge(format!(
            "flat coefficient vector with {total} slots"
        )));
    }
    let mut c = vec![Complex64::new(0.0, 0.0); total as usize];
    for (idx, &a_n) in a.iter().enumerate() {
        if a_n == 0.0 {
            continue;
        }
        let n = idx as u64 + 1;
        for term in plan.member_terms(n) {
            c[term.slot as usize - 1] = a_n * term.coeff;
        }
    }
    Ok(c)
}

/// The flat rearranged series Σ c_s·exp(2πi·m_s·x) restricted to its actual
/// (non-padding) terms, as (frequency, coefficient) pairs.
pub fn flat_series(plan: &dyn PlanTermsView, a: &[f64]) -> Result<Vec<(i128, Complex64)>> {
    if a.len() as u64 > plan.count() {
        return Err(Error::LengthMismatch {
            expected: plan.count() as usize,
            got: a.len(),
        });
    }
    let mut out = Vec::new();
    for (idx, &a_n) in a.iter().enumerate() {
        for term in plan.member_terms(idx as u64 + 1) {
            out.push((term.freq, a_n * term.coeff));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightTransferReport {
    /// Σ_s |c_s|²·w(s)
    pub lhs: f64,
    /// Σ_n |a_n|²·w(n)
    pub rhs: f64,
    /// max_n w(s_{n+1})/w(n)
    pub c_star: f64,
    pub holds: bool,
    pub count: u64,
}

/// Weighted mass transfer from coefficients a_n to the rearranged series:
/// LHS = Σ|c_s|²w(s) must stay below C*·RHS with C* = max w(s_{n+1})/w(n).
pub fn verify_weight_transfer(
    plan: &dyn PlanTermsView,
    a: &[f64],
    w: &WeightSequence,
) -> Result<WeightTransferReport> {
    if a.len() as u64 > plan.count() {
        return Err(Error::LengthMismatch {
            expected: plan.count() as usize,
            got: a.len(),
        });
    }
    let total = plan.total_slots().max(2);
    w.screen(total)?;
    let mut rhs = 0.0;
    let mut lhs = 0.0;
    let mut c_star: f64 = 0.0;
    for n in 1..=plan.count() {
        let (_, s_hi) = plan.slot_range(n);
        c_star = c_star.max(w.value(s_hi.max(1))? / w.value(n)?);
        let a_n = a.get(n as usize - 1).copied().unwrap_or(0.0);
        rhs += a_n * a_n * w.value(n)?;
        if a_n == 0.0 {
            continue;
        }
        for term in plan.member_terms(n) {
            lhs += (a_n * a_n) * term.coeff.norm_sqr() * w.value(term.slot)?;
        }
    }
    Ok(WeightTransferReport {
        lhs,
        rhs,
        c_star,
        holds: lhs <= c_star * rhs * (1.0 + 1e-12) + 1e-12,
        count: plan.count(),
    })
}

/// The equivalence certificate of one block: the witness chain (the block
/// moduli, whose product system is exactly equivalent to the one-dimensional
/// system of order p, and the per-member transported indices), the
/// discretization bound from the moduli choice, and the per-member L²
/// distances between the exact transported discrete functions and their
/// truncated polynomials.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockCertificate {
    pub k: u32,
    pub moduli: Vec<u64>,
    /// τ of each member's leading frequency vector: the index of the exact
    /// order-p witness function.
    pub witness_indices: Vec<u64>,
    pub disc_bound: f64,
    pub member_distances: Vec<f64>,
    pub eps: f64,
    pub law_bound: f64,
    pub law_holds: bool,
}

pub fn block_certificate(plan: &ReductionPlan, k: u32) -> Result<BlockCertificate> {
    let block = plan
        .blocks
        .iter()
        .find(|b| b.k == k)
        .ok_or_else(|| Error::IndexOutOfRange {
            index: k as i128,
            order: plan.blocks.len() as u128,
        })?;
    let p = block.moduli.product();
    let member_distances: Vec<f64> = block
        .members
        .iter()
        .map(|member| {
            member
                .parts
                .iter()
                .map(|part| {
                    let x = part.residue as f64 / p as f64;
                    part.coeff.norm_sqr()
                        * dts_tail_energy(x, part.window.lo, part.window.hi)
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let witness_indices: Vec<u64> = block
        .members
        .iter()
        .map(|member| {
            u64::try_from(member.parts[0].residue).map_err(|_| {
                Error::TooLarge("witness index exceeds 64 bits".into())
            })
        })
        .collect::<Result<_>>()?;
    let trunc = member_distances.iter().cloned().fold(0.0, f64::max);
    let eps = block.disc_bound + trunc;
    let law_bound = BLOCK_ERROR_LAW_CONSTANT * 0.5f64.powi(k as i32);
    Ok(BlockCertificate {
        k,
        moduli: block.moduli.moduli().to_vec(),
        witness_indices,
        disc_bound: block.disc_bound,
        member_distances,
        eps,
        law_bound,
        law_holds: eps <= law_bound,
    })
}

/// Seeded generator of pairwise distinct frequency vectors for index-mode
/// inputs.
pub fn random_indices(dim: usize, count: u64, max_abs: i64, seed: u64) -> Result<Vec<Vec<i64>>> {
    if dim == 0 || max_abs < 0 {
        return Err(Error::InvalidParameter("bad index generator parameters".into()));
    }
    let space = (2 * max_abs as u128 + 1).pow(dim as u32);
    if space < 2 * count as u128 {
        return Err(Error::InvalidParameter(format!(
            "cannot draw {count} distinct vectors from a box of {space}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(count as usize);
    while (out.len() as u64) < count {
        let v: Vec<i64> = (0..dim).map(|_| rng.gen_range(-max_abs..=max_abs)).collect();
        if seen.insert(v.clone()) {
            out.push(v);
        }
    }
    Ok(out)
}

// --- serialized plan ---

/// Serialized plan: `{mode, dim, count, blocks:[{k, moduli, shift,
/// members:[{n_vec, terms:[{m, re, im}]}], eps}], offsets:[s_n]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PlanDocument {
    pub mode: PlanMode,
    pub dim: usize,
    pub count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub blocks: Vec<BlockDocument>,
    pub offsets: Vec<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BlockDocument {
    pub k: u32,
    pub moduli: Vec<u64>,
    pub shift: i64,
    pub eps: f64,
    pub members: Vec<MemberDocument>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MemberDocument {
    pub n: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_vec: Option<Vec<i64>>,
    pub terms: Vec<FlatTermDocument>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FlatTermDocument {
    pub m: i64,
    pub re: f64,
    pub im: f64,
}

impl PlanDocument {
    pub fn from_plan(plan: &ReductionPlan, max_terms_per_member: u64) -> Result<PlanDocument> {
        let mut blocks = Vec::with_capacity(plan.blocks.len());
        for block in &plan.blocks {
            let mut members = Vec::with_capacity(block.members.len());
            for member in &block.members {
                if member.term_count() > max_terms_per_member {
                    return Err(Error::TooLarge(format!(
                        "member {} holds {} terms, serialization limit {max_terms_per_member}",
                        member.index,
                        member.term_count()
                    )));
                }
                let terms: Vec<FlatTermDocument> = plan
                    .member_terms(member.index)
                    .map(|t| {
                        i64::try_from(t.freq)
                            .map(|m| FlatTermDocument {
                                m,
                                re: t.coeff.re,
                                im: t.coeff.im,
                            })
                            .map_err(|_| {
                                Error::TooLarge(format!(
                                    "frequency {} exceeds 64 bits",
                                    t.freq
                                ))
                            })
                    })
                    .collect::<Result<_>>()?;
                let n_vec = match plan.mode {
                    PlanMode::Rc => Some(member.parts[0].source_freq.clone()),
                    PlanMode::Src => None,
                };
                members.push(MemberDocument {
                    n: member.index,
                    n_vec,
                    terms,
                });
            }
            let shift = i64::try_from(block.shift).map_err(|_| {
                Error::TooLarge(format!("shift {} exceeds 64 bits", block.shift))
            })?;
            blocks.push(BlockDocument {
                k: block.k,
                moduli: block.moduli.moduli().to_vec(),
                shift,
                eps: block.eps,
                members,
            });
        }
        Ok(PlanDocument {
            mode: plan.mode,
            dim: plan.dim,
            count: plan.count,
            seed: None,
            blocks,
            offsets: plan.offsets.clone(),
        })
    }
}

impl PlanTermsView for PlanDocument {
    fn mode(&self) -> PlanMode {
        self.mode
    }

    fn count(&self) -> u64 {
        self.count
    }

    fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    fn member_terms(&self, n: u64) -> Box<dyn Iterator<Item = PlanTerm> + '_> {
        if n == 0 || n > self.count {
            return Box::new(std::iter::empty());
        }
        let k = n.ilog2() as usize;
        let member = &self.blocks[k].members[(n - (1 << k)) as usize];
        let slot_start = self.offsets[n as usize - 1];
        Box::new(member.terms.iter().enumerate().map(move |(i, t)| PlanTerm {
            slot: slot_start + 1 + i as u64,
            freq: t.m as i128,
            coeff: Complex64::new(t.re, t.im),
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rc_line(count: u64) -> ReductionInput {
        // 1-d frequencies 0, 1, -1, 2, -2, ...
        let freqs: Vec<Vec<i64>> = (0..count as i64)
            .map(|t| {
                let f = if t % 2 == 0 { t / 2 } else { -(t / 2 + 1) };
                vec![f]
            })
            .collect();
        ReductionInput::from_indices(1, freqs).unwrap()
    }

    #[test]
    fn moduli_chooser_examples() {
        // constant member: smallest prime, zero error
        let m = choose_block_moduli(&[vec![0]], 1, 0.3).unwrap();
        assert_eq!(m.moduli(), &[2]);

        // frequency 1 at ε = 0.1: smallest prime past 20π
        let m = choose_block_moduli(&[vec![1]], 1, 0.1).unwrap();
        assert_eq!(m.moduli(), &[67]);

        // two axes share the budget equally
        let m = choose_block_moduli(&[vec![1, 2]], 2, 0.2).unwrap();
        assert_eq!(m.moduli(), &[67, 127]);
        let total: f64 = [1.0, 2.0]
            .iter()
            .zip(m.moduli())
            .map(|(&f, &p)| TAU * f / p as f64)
            .sum();
        assert!(total <= 0.2);
    }

    #[test]
    fn moduli_chooser_matches_greedy_scan_oracle() {
        // oracle: per axis, scan primes upward for the first admissible one
        for (freqs, dim, eps) in [
            (vec![vec![3i64, -7]], 2usize, 0.25f64),
            (vec![vec![5], vec![-2]], 1, 0.125),
            (vec![vec![1, 1, 1]], 3, 0.5),
        ] {
            let fast = choose_block_moduli(&freqs, dim, eps).unwrap();
            let maxima = axis_maxima(dim, &freqs);
            let mut used: Vec<u64> = Vec::new();
            for &m in &maxima {
                let mut p = 2u64;
                loop {
                    let ok = is_prime(p)
                        && p as i128 > 2 * m as i128
                        && (m == 0 || TAU * m as f64 / p as f64 <= eps / dim as f64)
                        && !used.contains(&p);
                    if ok {
                        break;
                    }
                    p += 1;
                }
                used.push(p);
            }
            assert_eq!(fast.moduli(), &used[..]);
        }
    }

    #[test]
    fn moduli_rejects_bad_targets() {
        assert!(choose_block_moduli(&[vec![1]], 1, 0.0).is_err());
        assert!(choose_block_moduli(&[], 1, 0.5).is_err());
    }

    #[test]
    fn block_zero_constant_member_is_exact() {
        let m = choose_block_moduli(&[vec![0]], 1, 0.5).unwrap();
        let block = build_block(
            &[(1, vec![(vec![0], Complex64::new(1.0, 0.0))])],
            0,
            &m,
            PlanMode::Rc,
        )
        .unwrap();
        assert_eq!(block.members[0].term_count(), 1);
        assert_eq!(block.trunc_bound, 0.0);
        assert_eq!(block.disc_bound, 0.0);
        assert_eq!(block.eps, 0.0);
    }

    #[test]
    fn block_zero_single_frequency() {
        let m = choose_block_moduli(&[vec![1]], 1, 0.5).unwrap();
        let block = build_block(
            &[(1, vec![(vec![1], Complex64::new(1.0, 0.0))])],
            0,
            &m,
            PlanMode::Rc,
        )
        .unwrap();
        let member = &block.members[0];
        assert_eq!(member.term_count(), 1);
        let p = block.moduli.product();
        // single kept term at frequency τ(1) = 1 with |coefficient|
        // p·sin(π/p)/π
        let c = progression_coeff(p, member.parts[0].residue, 0);
        let expected = p as f64 * (PI / p as f64).sin() / PI;
        assert_relative_eq!(c.norm(), expected, epsilon = 1e-12);
        let eps0 = (1.0 - expected * expected).sqrt();
        assert_relative_eq!(block.trunc_bound, eps0, epsilon = 1e-9);
        assert!(block.eps <= BLOCK_ERROR_LAW_CONSTANT);
    }

    #[test]
    fn block_zero_reference_values_at_order_67() {
        // moduli chosen for sup error 0.1 give p = 67; the one-term member
        // then keeps |c| = 67·sin(π/67)/π and certifies the rest as error
        let m = choose_block_moduli(&[vec![1]], 1, 0.1).unwrap();
        assert_eq!(m.product(), 67);
        let block = build_block(
            &[(1, vec![(vec![1], Complex64::new(1.0, 0.0))])],
            0,
            &m,
            PlanMode::Rc,
        )
        .unwrap();
        let c = progression_coeff(67, 1, 0).norm();
        assert_relative_eq!(c, 0.999633, epsilon = 1e-6);
        assert_relative_eq!(block.trunc_bound, 0.0271, epsilon = 1e-4);
        assert!(block.trunc_bound <= BLOCK_ERROR_LAW_CONSTANT);
    }

    #[test]
    fn block_one_members_have_at_most_four_terms() {
        let input = rc_line(4);
        let plan = build_reduction(&input, 3).unwrap();
        for n in 2..=3u64 {
            assert!(plan.member(n).unwrap().term_count() <= 4);
        }
    }

    #[test]
    fn shift_examples() {
        // single block keeps shift zero
        let plan = build_reduction(&rc_line(1), 1).unwrap();
        assert_eq!(plan.blocks()[0].shift, 0);

        // blocks of one plan share moduli families, so their raw spectra
        // collide near zero and later blocks must move
        let plan = build_reduction(&rc_line(8), 8).unwrap();
        assert_eq!(plan.blocks()[0].shift, 0);
        for pair in plan.blocks().windows(2) {
            let a = block_raw_interval(&pair[0]);
            let b = block_raw_interval(&pair[1]);
            if b.0 + pair[1].shift <= a.1 + pair[0].shift {
                panic!("intervals overlap after shifting");
            }
        }
    }

    #[test]
    fn shift_conflict_moves_past_running_maximum() {
        let m1 = CoprimeModuli::new(vec![67]).unwrap();
        let m2 = CoprimeModuli::new(vec![71]).unwrap();
        let e1 = vec![(1u64, vec![(vec![1i64], Complex64::new(1.0, 0.0))])];
        let e2 = vec![(2u64, vec![(vec![1i64], Complex64::new(1.0, 0.0))])];
        let mut blocks = vec![
            build_block(&e1, 0, &m1, PlanMode::Rc).unwrap(),
            build_block(&e2, 1, &m2, PlanMode::Rc).unwrap(),
        ];
        let (lo1, hi1) = block_raw_interval(&blocks[0]);
        let (lo2, _) = block_raw_interval(&blocks[1]);
        assert!(lo2 <= hi1); // raw overlap by construction
        let shifts = assign_shifts(&mut blocks);
        assert_eq!(shifts[0], 0);
        assert!(shifts[1] >= hi1 - lo2 + 1);
        let _ = lo1;
    }

    #[test]
    fn disjoint_raw_spectra_keep_zero_shifts() {
        // windows {0} and a window starting far above it
        let m1 = CoprimeModuli::new(vec![2]).unwrap();
        let m2 = CoprimeModuli::new(vec![67]).unwrap();
        let e1 = vec![(1u64, vec![(vec![0i64], Complex64::new(1.0, 0.0))])];
        let e2 = vec![(2u64, vec![(vec![1i64], Complex64::new(1.0, 0.0))])];
        let mut blocks = vec![
            build_block(&e1, 0, &m1, PlanMode::Rc).unwrap(),
            build_block(&e2, 1, &m2, PlanMode::Rc).unwrap(),
        ];
        // block 1 raw interval is {0}; block 2 covers 1 ± 67·window
        // move block 2's raw window fully positive by reusing residue 1
        let shifts = assign_shifts(&mut blocks);
        let (lo1, hi1) = block_raw_interval(&blocks[0]);
        let (lo2, hi2) = block_raw_interval(&blocks[1]);
        if hi1 < lo2 || hi2 < lo1 {
            assert_eq!(shifts, vec![0, 0]);
        }
    }

    #[test]
    fn offsets_follow_the_dyadic_recurrence() {
        let plan = build_reduction(&rc_line(8), 8).unwrap();
        // (s_1..s_8) = (0,1,5,9,25,41,57,73); n = 8 opens block 3, so s_9 =
        // 73 + 4³
        assert_eq!(plan.offsets(), &[0, 1, 5, 9, 25, 41, 57, 73, 137]);
        // s_8 = 73 ≤ 8⁴
        assert!(plan.offsets()[7] <= 8u64.pow(4));

        let plan = build_reduction(&rc_line(1), 1).unwrap();
        assert_eq!(plan.offsets(), &[0, 1]);
    }

    #[test]
    fn plan_structure_validates() {
        let plan = build_reduction(&rc_line(16), 16).unwrap();
        let report = plan.validate().unwrap();
        assert!(report.all_ok(), "{report:?}");
        assert!(report.max_slot_norm_sq <= 1.0 + 1e-9);
    }

    #[test]
    fn map_coefficients_examples() {
        let plan = build_reduction(&rc_line(2), 2).unwrap();
        // a = (1, 0): only slot 1 is populated
        let c = map_coefficients(&plan, &[1.0, 0.0]).unwrap();
        assert_eq!(c.len() as u64, plan.total_slots());
        assert!(c[0].norm() > 0.0);
        assert!(c[1..].iter().all(|z| z.norm() == 0.0));

        // a = 0 gives c = 0
        let c = map_coefficients(&plan, &[0.0, 0.0]).unwrap();
        assert!(c.iter().all(|z| z.norm() == 0.0));

        // a = (1, 1/2): slot-2 coefficients are the halved member terms
        let c = map_coefficients(&plan, &[1.0, 0.5]).unwrap();
        for term in plan.member_terms(2) {
            let direct = 0.5 * term.coeff;
            assert_relative_eq!(c[term.slot as usize - 1].re, direct.re, epsilon = 1e-15);
            assert_relative_eq!(c[term.slot as usize - 1].im, direct.im, epsilon = 1e-15);
        }
        // too many coefficients is a length error
        assert!(map_coefficients(&plan, &[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn parseval_per_slot_after_mapping() {
        let plan = build_reduction(&rc_line(4), 4).unwrap();
        let a = [1.0, 0.5, 0.25, 0.125];
        let c = map_coefficients(&plan, &a).unwrap();
        for n in 1..=4u64 {
            let (lo, hi) = plan.slot_range(n);
            let slot_mass: f64 = c[lo as usize..hi as usize]
                .iter()
                .map(|z| z.norm_sqr())
                .sum();
            let expected = a[n as usize - 1].powi(2) * plan.member_norm_sq(n).unwrap();
            assert_relative_eq!(slot_mass, expected, epsilon = 1e-10);
            assert!(slot_mass <= a[n as usize - 1].powi(2) + 1e-12);
        }
    }

    #[test]
    fn weight_transfer_single_slot() {
        let plan = build_reduction(&rc_line(1), 1).unwrap();
        let w = WeightSequence::log_sq();
        let report = verify_weight_transfer(&plan, &[1.0], &w).unwrap();
        assert!(report.holds);
        assert!(report.lhs <= w.value(plan.total_slots().max(1)).unwrap());
    }

    #[test]
    fn weight_transfer_rejects_constant_weight() {
        let plan = build_reduction(&rc_line(2), 2).unwrap();
        let w = WeightSequence::from_table(vec![1.0; 64]);
        assert!(matches!(
            verify_weight_transfer(&plan, &[1.0, 1.0], &w),
            Err(Error::InadmissibleWeight(_))
        ));
    }

    #[test]
    fn certificate_matches_block_and_satisfies_law() {
        let plan = build_reduction(&rc_line(8), 8).unwrap();
        for k in 0..=3u32 {
            let cert = block_certificate(&plan, k).unwrap();
            let block = &plan.blocks()[k as usize];
            assert_relative_eq!(cert.eps, block.eps, epsilon = 1e-12);
            assert!(cert.law_holds, "k={k}: eps {} > {}", cert.eps, cert.law_bound);
        }
    }

    #[test]
    fn certificate_distances_match_explicit_parseval() {
        // dual route: trigamma tails vs explicit coefficient sums on the
        // materialized (shifted) polynomials
        let plan = build_reduction(&rc_line(8), 8).unwrap();
        for k in 0..=2u32 {
            let cert = block_certificate(&plan, k).unwrap();
            let block = &plan.blocks()[k as usize];
            for (i, member) in block.members.iter().enumerate() {
                let poly = plan.member_polynomial(member.index, 1 << 12).unwrap();
                let kept: f64 = poly.norm_sq();
                let total: f64 = member.parts.iter().map(|p| p.coeff.norm_sqr()).sum();
                let explicit = (total - kept).max(0.0).sqrt();
                assert_relative_eq!(cert.member_distances[i], explicit, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn certificate_distances_match_measured_witness_distances() {
        // the certified member distance is the actual L² distance between
        // the exact order-p witness function and the member polynomial,
        // measured through the generic step-against-polynomial route
        let plan = build_reduction(&rc_line(4), 4).unwrap();
        for k in 0..=2u32 {
            let cert = block_certificate(&plan, k).unwrap();
            let block = &plan.blocks()[k as usize];
            let p = u64::try_from(block.moduli.product()).unwrap();
            let sys = crate::dts::DiscreteTrigSystem::one_dimensional(p).unwrap();
            for (i, member) in block.members.iter().enumerate() {
                let witness = sys
                    .step_function(&[cert.witness_indices[i]])
                    .unwrap()
                    .to_complex();
                let poly = plan
                    .member_polynomial(member.index, 1 << 12)
                    .unwrap()
                    .modulate_1d(-block.shift)
                    .unwrap();
                let measured = crate::mp::l2_distance_step_poly(&witness, &poly).unwrap();
                assert_relative_eq!(measured, cert.member_distances[i], epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn src_mode_plan_from_polynomials() {
        // three non-overlapping 2-d polynomials
        let mk = |terms: Vec<(Vec<i128>, f64)>| {
            TrigPolynomial::from_terms(
                2,
                terms
                    .into_iter()
                    .map(|(f, re)| (f, Complex64::new(re, 0.0))),
            )
            .unwrap()
        };
        let polys = vec![
            mk(vec![(vec![0, 0], 1.0)]),
            mk(vec![(vec![1, 0], 0.6), (vec![0, 1], 0.8)]),
            mk(vec![(vec![2, 1], 1.0), (vec![-1, 2], 1.0)]), // norm √2, rescaled
        ];
        let input = ReductionInput::from_polynomials(polys).unwrap();
        let plan = build_reduction(&input, 3).unwrap();
        let report = plan.validate().unwrap();
        assert!(report.all_ok(), "{report:?}");
        // polynomial mode: slot sizes equal actual term counts
        for n in 1..=3u64 {
            let (lo, hi) = plan.slot_range(n);
            assert_eq!(hi - lo, plan.member(n).unwrap().term_count());
        }
        // norms stay below one after normalization
        for n in 1..=3u64 {
            assert!(plan.member_norm_sq(n).unwrap() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn src_rejects_overlapping_spectra() {
        let a = TrigPolynomial::monomial(vec![1, 2]);
        let b = TrigPolynomial::monomial(vec![1, 2]);
        assert!(ReductionInput::from_polynomials(vec![a, b]).is_err());
    }

    #[test]
    fn rc_rejects_duplicate_indices() {
        assert!(ReductionInput::from_indices(1, vec![vec![3], vec![3]]).is_err());
    }

    #[test]
    fn document_round_trip_preserves_terms() {
        let plan = build_reduction(&rc_line(4), 4).unwrap();
        let doc = PlanDocument::from_plan(&plan, 1 << 12).unwrap();
        let json = serde_json::to_string_pretty(&doc).unwrap();
        let back: PlanDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(doc, back);
        // the document view iterates the same terms as the plan
        for n in 1..=4u64 {
            let a: Vec<PlanTerm> = plan.member_terms(n).collect();
            let b: Vec<PlanTerm> = back.member_terms(n).collect();
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                assert_eq!(x.slot, y.slot);
                assert_eq!(x.freq, y.freq);
                assert!((x.coeff - y.coeff).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn random_indices_are_distinct_and_deterministic() {
        let a = random_indices(2, 64, 10, 1234).unwrap();
        let b = random_indices(2, 64, 10, 1234).unwrap();
        assert_eq!(a, b);
        let set: BTreeSet<_> = a.iter().cloned().collect();
        assert_eq!(set.len(), 64);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn random_plans_satisfy_every_structural_law(
                seed in any::<u64>(),
                count in 1u64..24,
                dim in 1usize..3,
            ) {
                let indices = random_indices(dim, count, 40, seed).unwrap();
                let input = ReductionInput::from_indices(dim, indices).unwrap();
                let plan = build_reduction(&input, count).unwrap();
                let report = plan.validate().unwrap();
                prop_assert!(report.all_ok(), "{report:?}");
                // slot masses bounded by the inputs after coefficient mapping
                let a: Vec<f64> = (1..=count).map(|n| 1.0 / n as f64).collect();
                for n in 1..=count {
                    let norm = plan.member_norm_sq(n).unwrap();
                    prop_assert!(norm <= 1.0 + 1e-9);
                }
                let _ = a;
            }

            #[test]
            fn member_terms_agree_with_slot_ranges(
                seed in any::<u64>(),
                count in 1u64..12,
            ) {
                let indices = random_indices(1, count, 40, seed).unwrap();
                let input = ReductionInput::from_indices(1, indices).unwrap();
                let plan = build_reduction(&input, count).unwrap();
                for n in 1..=count {
                    let (lo, hi) = plan.slot_range(n);
                    let terms: Vec<PlanTerm> = plan.member_terms(n).collect();
                    prop_assert_eq!(terms.len() as u64, plan.member(n).unwrap().term_count());
                    for t in &terms {
                        prop_assert!(lo < t.slot && t.slot <= hi);
                    }
                    // frequencies inside a member are strictly increasing by
                    // construction of the window sweep
                    for pair in terms.windows(2) {
                        prop_assert!(pair[0].freq < pair[1].freq
                            || plan.member(n).unwrap().parts.len() > 1);
                    }
                }
            }
        }
    }
}
