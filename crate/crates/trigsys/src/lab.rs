//! Grid diagnostics: dyadic block maxima of partial sums, block error
//! bounds, distributional comparison of block maxima between systems, and
//! weight admissibility reports.

use crate::dts::DiscreteTrigSystem;
use crate::error::{Error, Result};
use crate::poly::TrigPolynomial;
use crate::reduction::{BlockCertificate, ReductionPlan};
use crate::weights::WeightSequence;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Uniform evaluation grid: axis j is sampled at t/res_j, t = 0..res_j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    axes: Vec<u64>,
}

impl Grid {
    pub fn new(axes: Vec<u64>) -> Result<Grid> {
        if axes.is_empty() || axes.iter().any(|&r| r == 0) {
            return Err(Error::InvalidParameter(
                "grid needs positive resolutions".into(),
            ));
        }
        let mut total: u128 = 1;
        for &r in &axes {
            total = total
                .checked_mul(r as u128)
                .ok_or_else(|| Error::TooLarge("grid point count overflow".into()))?;
        }
        if total > 1 << 30 {
            return Err(Error::TooLarge(format!("grid with {total} points")));
        }
        Ok(Grid { axes })
    }

    pub fn uniform(dim: usize, res: u64) -> Result<Grid> {
        Grid::new(vec![res; dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[u64] {
        &self.axes
    }

    pub fn len(&self) -> u64 {
        self.axes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Integer coordinates of point t, last axis fastest.
    pub fn coords(&self, mut t: u64) -> Vec<u64> {
        let mut c = vec![0u64; self.axes.len()];
        for (slot, &r) in c.iter_mut().zip(&self.axes).rev() {
            *slot = t % r;
            t /= r;
        }
        c
    }

    pub fn point(&self, t: u64) -> Vec<f64> {
        self.coords(t)
            .iter()
            .zip(&self.axes)
            .map(|(&c, &r)| c as f64 / r as f64)
            .collect()
    }
}

/// Grid sampling of a function: one value per grid point, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSignal<T> {
    pub grid: Grid,
    pub values: Vec<T>,
}

/// What a system needs from an evaluation grid to be sampled faithfully.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GridRequirement {
    /// Any grid is fine (evaluation is exact at every point).
    None,
    /// Step structure: each axis resolution must be a multiple of the cell
    /// count.
    MultipleOf(Vec<u64>),
    /// Band-limited: each axis resolution must reach this minimum.
    AtLeast(Vec<u64>),
}

/// An evaluable orthonormal sequence: global index n ≥ 1 to a function on
/// the torus or cube. Each realization has L² norm at most 1 per member.
pub trait FunctionSystem: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, n: u64, x: &[f64]) -> Complex64;

    /// Values of member n at every grid point. Implementations override this
    /// when an exact or faster path exists.
    fn eval_on_grid(&self, n: u64, grid: &Grid) -> Vec<Complex64> {
        (0..grid.len())
            .into_par_iter()
            .map(|t| self.eval(n, &grid.point(t)))
            .collect()
    }

    fn grid_requirement(&self) -> GridRequirement {
        GridRequirement::None
    }
}

/// One-dimensional exponentials indexed by their frequency: n ↦ exp(2πi·n·x).
#[derive(Clone, Copy, Debug, Default)]
pub struct Trig1D;

impl FunctionSystem for Trig1D {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, n: u64, x: &[f64]) -> Complex64 {
        let t = TAU * ((n as f64) * x[0]).fract();
        Complex64::new(t.cos(), t.sin())
    }
}

/// d-dimensional exponentials over an explicit index list (1-based).
#[derive(Clone, Debug)]
pub struct MultiTrig {
    dim: usize,
    freqs: Vec<Vec<i64>>,
}

impl MultiTrig {
    pub fn new(dim: usize, freqs: Vec<Vec<i64>>) -> Result<MultiTrig> {
        for f in &freqs {
            if f.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: f.len(),
                });
            }
        }
        Ok(MultiTrig { dim, freqs })
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Modulation: every member multiplied by exp(2πi⟨nu,x⟩), i.e. all
    /// frequencies translated by nu.
    pub fn modulated(&self, nu: &[i64]) -> Result<MultiTrig> {
        if nu.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: nu.len(),
            });
        }
        Ok(MultiTrig {
            dim: self.dim,
            freqs: self
                .freqs
                .iter()
                .map(|f| f.iter().zip(nu).map(|(&a, &b)| a + b).collect())
                .collect(),
        })
    }
}

impl FunctionSystem for MultiTrig {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, n: u64, x: &[f64]) -> Complex64 {
        let f = &self.freqs[n as usize - 1];
        let phase: f64 = f
            .iter()
            .zip(x)
            .map(|(&m, &xi)| (m as f64) * xi)
            .sum::<f64>()
            .fract();
        let t = TAU * phase;
        Complex64::new(t.cos(), t.sin())
    }

    fn grid_requirement(&self) -> GridRequirement {
        let mut req = vec![1u64; self.dim];
        for f in &self.freqs {
            for (slot, &m) in req.iter_mut().zip(f) {
                *slot = (*slot).max(4 * m.unsigned_abs());
            }
        }
        GridRequirement::AtLeast(req)
    }
}

/// A block of a multiple discrete trigonometric system over an explicit
/// index list; evaluation on aligned grids goes through exact cell values.
#[derive(Clone, Debug)]
pub struct MultiDtsBlock {
    system: DiscreteTrigSystem,
    indices: Vec<Vec<u64>>,
}

impl MultiDtsBlock {
    pub fn new(system: DiscreteTrigSystem, indices: Vec<Vec<u64>>) -> Result<MultiDtsBlock> {
        for idx in &indices {
            system.value_on_cell(idx, &vec![0; system.dim()])?;
        }
        Ok(MultiDtsBlock { system, indices })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

impl FunctionSystem for MultiDtsBlock {
    fn dim(&self) -> usize {
        self.system.dim()
    }

    fn eval(&self, n: u64, x: &[f64]) -> Complex64 {
        self.system
            .eval(&self.indices[n as usize - 1], x)
            .expect("index validated on construction")
    }

    fn eval_on_grid(&self, n: u64, grid: &Grid) -> Vec<Complex64> {
        let idx = &self.indices[n as usize - 1];
        let orders = self.system.axis_orders();
        (0..grid.len())
            .into_par_iter()
            .map(|t| {
                // integer cell lookup is exact on aligned grids
                let cell: Vec<u64> = grid
                    .coords(t)
                    .iter()
                    .zip(grid.axes())
                    .zip(orders)
                    .map(|((&c, &r), &p)| c * p / r)
                    .collect();
                self.system
                    .value_on_cell(idx, &cell)
                    .expect("cell in range")
                    .to_complex()
            })
            .collect()
    }

    fn grid_requirement(&self) -> GridRequirement {
        GridRequirement::MultipleOf(self.system.axis_orders().to_vec())
    }
}

/// A block of the one-dimensional discrete system of order p.
#[derive(Clone, Debug)]
pub struct Dts1dBlock {
    system: DiscreteTrigSystem,
    order: u64,
    indices: Vec<u64>,
}

impl Dts1dBlock {
    pub fn new(order: u64, indices: Vec<u64>) -> Result<Dts1dBlock> {
        let system = DiscreteTrigSystem::one_dimensional(order)?;
        for &n in &indices {
            system.value_on_cell(&[n], &[0])?;
        }
        Ok(Dts1dBlock {
            system,
            order,
            indices,
        })
    }
}

impl FunctionSystem for Dts1dBlock {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, n: u64, x: &[f64]) -> Complex64 {
        self.system
            .eval(&[self.indices[n as usize - 1]], x)
            .expect("index validated on construction")
    }

    fn eval_on_grid(&self, n: u64, grid: &Grid) -> Vec<Complex64> {
        let idx = self.indices[n as usize - 1];
        let res = grid.axes()[0];
        (0..grid.len())
            .into_par_iter()
            .map(|t| {
                let cell = t * self.order / res;
                self.system
                    .value_on_cell(&[idx], &[cell])
                    .expect("cell in range")
                    .to_complex()
            })
            .collect()
    }

    fn grid_requirement(&self) -> GridRequirement {
        GridRequirement::MultipleOf(vec![self.order])
    }
}

/// Slot polynomials g_n of a reduction plan, materialized up to a term
/// limit; grid evaluation reduces phases exactly, so large frequencies stay
/// accurate.
#[derive(Clone, Debug)]
pub struct PlanBlockSystem {
    polys: Vec<TrigPolynomial>,
}

impl PlanBlockSystem {
    pub fn from_plan(plan: &ReductionPlan, n_max: u64, max_terms: u64) -> Result<PlanBlockSystem> {
        if n_max > plan.count() {
            return Err(Error::IndexOutOfRange {
                index: n_max as i128,
                order: plan.count() as u128,
            });
        }
        let polys = (1..=n_max)
            .map(|n| plan.member_polynomial(n, max_terms))
            .collect::<Result<_>>()?;
        Ok(PlanBlockSystem { polys })
    }

    pub fn from_polys(polys: Vec<TrigPolynomial>) -> PlanBlockSystem {
        PlanBlockSystem { polys }
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn poly(&self, n: u64) -> &TrigPolynomial {
        &self.polys[n as usize - 1]
    }
}

impl FunctionSystem for PlanBlockSystem {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, n: u64, x: &[f64]) -> Complex64 {
        self.polys[n as usize - 1]
            .eval(x)
            .expect("1-d polynomial evaluation")
    }

    fn eval_on_grid(&self, n: u64, grid: &Grid) -> Vec<Complex64> {
        self.polys[n as usize - 1]
            .eval_on_grid_1d(grid.axes()[0])
            .expect("1-d polynomial grid evaluation")
    }
}

#[derive(Clone, Debug)]
pub struct BlockMaxima {
    pub k: u32,
    pub values: GridSignal<f64>,
    pub sup: f64,
    pub mean: f64,
    pub q50: f64,
    pub q90: f64,
    pub q99: f64,
}

#[derive(Clone, Debug)]
pub struct BlockMaximaReport {
    pub per_block: Vec<BlockMaxima>,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

fn summarize(k: u32, grid: Grid, values: Vec<f64>) -> BlockMaxima {
    let mut sorted = values.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let sup = *sorted.last().unwrap();
    let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
    BlockMaxima {
        k,
        sup,
        mean,
        q50: quantile(&sorted, 0.5),
        q90: quantile(&sorted, 0.9),
        q99: quantile(&sorted, 0.99),
        values: GridSignal { grid, values },
    }
}

/// M_k(x) = max_{2^k ≤ m < 2^{k+1}} |Σ_{n=2^k}^m a_n·φ_n(x)| on the grid,
/// accumulated incrementally (one add per member per point), for every
/// k ≤ k_max.
pub fn block_maxima(
    sys: &dyn FunctionSystem,
    a: &[f64],
    k_max: u32,
    grid: &Grid,
) -> Result<BlockMaximaReport> {
    if grid.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: grid.dim(),
        });
    }
    if grid.axes().iter().any(|&r| r < 2) {
        return Err(Error::GridTooCoarse {
            required: 2,
            got: *grid.axes().iter().min().unwrap(),
        });
    }
    let needed = (1u64 << (k_max + 1)) - 1;
    if (a.len() as u64) < needed {
        return Err(Error::LengthMismatch {
            expected: needed as usize,
            got: a.len(),
        });
    }
    let points = grid.len() as usize;
    let mut per_block = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        let mut acc = vec![Complex64::new(0.0, 0.0); points];
        let mut maxv = vec![0.0f64; points];
        for n in (1u64 << k)..(1u64 << (k + 1)) {
            let member = sys.eval_on_grid(n, grid);
            let a_n = a[n as usize - 1];
            for ((acc, maxv), val) in acc.iter_mut().zip(&mut maxv).zip(&member) {
                *acc += a_n * val;
                let mag = acc.norm();
                if mag > *maxv {
                    *maxv = mag;
                }
            }
        }
        per_block.push(summarize(k, grid.clone(), maxv));
    }
    Ok(BlockMaximaReport { per_block })
}

impl BlockMaximaReport {
    /// CSV with the summary columns, one row per block.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,sup_Mk,mean_Mk,q50,q90,q99\n");
        for b in &self.per_block {
            out.push_str(&format!(
                "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
                b.k, b.sup, b.mean, b.q50, b.q90, b.q99
            ));
        }
        out
    }
}

/// Two-sample Kolmogorov–Smirnov distance between empirical distributions.
pub fn ks_distance(mut xs: Vec<f64>, mut ys: Vec<f64>) -> f64 {
    assert!(!xs.is_empty() && !ys.is_empty());
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (nx, ny) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        sup = sup.max((i as f64 / nx - j as f64 / ny).abs());
    }
    sup
}

fn check_resolution(sys: &dyn FunctionSystem, grid: &Grid) -> Result<()> {
    match sys.grid_requirement() {
        GridRequirement::None => {}
        GridRequirement::MultipleOf(req) => {
            for (&need, &have) in req.iter().zip(grid.axes()) {
                if need > 0 && have % need != 0 {
                    return Err(Error::GridTooCoarse {
                        required: need,
                        got: have,
                    });
                }
            }
        }
        GridRequirement::AtLeast(req) => {
            for (&need, &have) in req.iter().zip(grid.axes()) {
                if have < need {
                    return Err(Error::GridTooCoarse {
                        required: need,
                        got: have,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Kolmogorov–Smirnov distance between the empirical distributions of the
/// block-k maxima under two systems, each sampled on its own grid. Both
/// grids are treated as uniform samples of the underlying space.
#[allow(clippy::too_many_arguments)]
pub fn distribution_compare(
    sys_a: &dyn FunctionSystem,
    a_coeffs: &[f64],
    grid_a: &Grid,
    sys_b: &dyn FunctionSystem,
    b_coeffs: &[f64],
    grid_b: &Grid,
    k: u32,
) -> Result<f64> {
    check_resolution(sys_a, grid_a)?;
    check_resolution(sys_b, grid_b)?;
    let ma = single_block_maxima(sys_a, a_coeffs, k, grid_a)?;
    let mb = single_block_maxima(sys_b, b_coeffs, k, grid_b)?;
    Ok(ks_distance(ma, mb))
}

fn single_block_maxima(
    sys: &dyn FunctionSystem,
    a: &[f64],
    k: u32,
    grid: &Grid,
) -> Result<Vec<f64>> {
    if grid.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: grid.dim(),
        });
    }
    let needed = (1u64 << (k + 1)) - 1;
    if (a.len() as u64) < needed {
        return Err(Error::LengthMismatch {
            expected: needed as usize,
            got: a.len(),
        });
    }
    let points = grid.len() as usize;
    let mut acc = vec![Complex64::new(0.0, 0.0); points];
    let mut maxv = vec![0.0f64; points];
    for n in (1u64 << k)..(1u64 << (k + 1)) {
        let member = sys.eval_on_grid(n, grid);
        let a_n = a[n as usize - 1];
        for ((acc, maxv), val) in acc.iter_mut().zip(&mut maxv).zip(&member) {
            *acc += a_n * val;
            let mag = acc.norm();
            if mag > *maxv {
                *maxv = mag;
            }
        }
    }
    Ok(maxv)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaBoundReport {
    pub k: u32,
    pub sum_coeff_sq: f64,
    pub sum_dist_sq: f64,
    /// The product bound (Σ a²)·(Σ‖f − g‖²) on ‖δ_k‖².
    pub bound: f64,
    pub per_member_dist_sq: Vec<f64>,
}

/// Cauchy–Schwarz bound on the block defect: ‖δ_k‖² ≤ (Σ_block a_n²)·
/// (Σ_block ‖f_n − g_n‖²), distances by Parseval.
pub fn delta_bound(
    a_block: &[f64],
    fs: &[TrigPolynomial],
    gs: &[TrigPolynomial],
    k: u32,
) -> Result<DeltaBoundReport> {
    if fs.len() != gs.len() || fs.len() != a_block.len() {
        return Err(Error::LengthMismatch {
            expected: fs.len(),
            got: gs.len().min(a_block.len()),
        });
    }
    let per_member_dist_sq: Vec<f64> = fs
        .iter()
        .zip(gs)
        .map(|(f, g)| f.l2_distance(g).map(|d| d * d))
        .collect::<Result<_>>()?;
    let sum_coeff_sq = a_block.iter().map(|a| a * a).sum::<f64>();
    let sum_dist_sq = per_member_dist_sq.iter().sum::<f64>();
    Ok(DeltaBoundReport {
        k,
        sum_coeff_sq,
        sum_dist_sq,
        bound: sum_coeff_sq * sum_dist_sq,
        per_member_dist_sq,
    })
}

/// Same bound assembled from a block certificate's member distances.
pub fn delta_bound_from_certificate(
    a_block: &[f64],
    cert: &BlockCertificate,
) -> Result<DeltaBoundReport> {
    if a_block.len() != cert.member_distances.len() {
        return Err(Error::LengthMismatch {
            expected: cert.member_distances.len(),
            got: a_block.len(),
        });
    }
    let per_member_dist_sq: Vec<f64> =
        cert.member_distances.iter().map(|d| d * d).collect();
    let sum_coeff_sq = a_block.iter().map(|a| a * a).sum::<f64>();
    let sum_dist_sq = per_member_dist_sq.iter().sum::<f64>();
    Ok(DeltaBoundReport {
        k: cert.k,
        sum_coeff_sq,
        sum_dist_sq,
        bound: sum_coeff_sq * sum_dist_sq,
        per_member_dist_sq,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnvelopePoint {
    pub n: u64,
    pub w: f64,
    pub over_log: f64,
    pub over_log_sq: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightCheckReport {
    pub n_max: u64,
    pub monotone_violations: u64,
    pub first_violation: Option<u64>,
    /// C(N) = max_{n ≤ √N} w(n²)/w(n)
    pub doubling_constant: f64,
    /// Heuristic flag: the doubling ratio keeps growing with the range,
    /// which is incompatible with w(n²) ≤ C·w(n).
    pub doubling_growing: bool,
    pub envelope: Vec<EnvelopePoint>,
    /// Running Σ 1/(n·w(n)) at dyadic checkpoints; convergence is not
    /// decidable at finite range, these are diagnostics only.
    pub partial_sums: Vec<(u64, f64)>,
    pub note: String,
}

/// Scans w over [1, n_max]: monotonicity, the doubling constant of
/// w(n²) ≤ C·w(n), envelope ratios against log and log², and partial sums
/// of Σ 1/(n·w(n)).
pub fn weight_check(w: &WeightSequence, n_max: u64) -> Result<WeightCheckReport> {
    if n_max < 4 {
        return Err(Error::InvalidParameter("range must be at least 4".into()));
    }
    let mut monotone_violations = 0u64;
    let mut first_violation = None;
    let mut prev = w.value(1)?;
    let mut partial = 1.0 / prev;
    let mut partial_sums = Vec::new();
    let mut next_checkpoint = 2u64;
    for n in 2..=n_max {
        let wn = w.value(n)?;
        if wn < prev {
            monotone_violations += 1;
            first_violation.get_or_insert(n);
        }
        prev = wn;
        partial += 1.0 / (n as f64 * wn);
        if n == next_checkpoint || n == n_max {
            partial_sums.push((n, partial));
            next_checkpoint = next_checkpoint.saturating_mul(2);
        }
    }

    let doubling = |range: u64| -> Result<f64> {
        let mut c: f64 = 1.0;
        let root = (range as f64).sqrt() as u64;
        for n in 2..=root.max(2) {
            c = c.max(w.value(n * n)? / w.value(n)?);
        }
        Ok(c)
    };
    let doubling_constant = doubling(n_max)?;
    let doubling_inner = doubling((n_max / 16).max(4))?;
    let doubling_growing = doubling_constant > 1.2 * doubling_inner;

    let mut envelope = Vec::new();
    for n in [n_max / 4, n_max / 2, n_max] {
        let n = n.max(2);
        let wn = w.value(n)?;
        let ln = (n as f64).ln();
        envelope.push(EnvelopePoint {
            n,
            w: wn,
            over_log: wn / ln,
            over_log_sq: wn / (ln * ln),
        });
    }

    Ok(WeightCheckReport {
        n_max,
        monotone_violations,
        first_violation,
        doubling_constant,
        doubling_growing,
        envelope,
        partial_sums,
        note: "finite-range report: growth to infinity is replaced by strict increase over \
               the scanned range, and the partial sums of 1/(n·w(n)) do not decide convergence"
            .into(),
    })
}
