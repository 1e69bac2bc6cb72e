//! Index maps between a multi-residue box and a single residue ring for
//! pairwise coprime moduli, and the induced measure-preserving cell map that
//! carries the multiple discrete trigonometric system onto the
//! one-dimensional one.
//!
//! All congruence arithmetic here is exact integer arithmetic mod p; there
//! are no floats in this module.

use crate::error::{Error, Result};
use crate::mp::{CellPartition, MPCellMap};

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Modular inverse of `a` mod `m` for coprime arguments.
fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        None
    } else {
        Some(t0.rem_euclid(m as i128) as u64)
    }
}

/// a·b mod m without overflow; the fast path covers every product that fits
/// in 128 bits, the fallback is double-and-add.
fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    let (a, b) = (a % m, b % m);
    if let Some(p) = a.checked_mul(b) {
        return p % m;
    }
    let (mut a, mut b, mut acc) = (a, b, 0u128);
    while b > 0 {
        if b & 1 == 1 {
            acc = (acc + a) % m;
        }
        a = (a + a) % m;
        b >>= 1;
    }
    acc
}

/// Pairwise coprime moduli p_1..p_d, each at least 2, with product p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoprimeModuli {
    moduli: Vec<u64>,
    product: u128,
}

impl CoprimeModuli {
    pub fn new(moduli: Vec<u64>) -> Result<CoprimeModuli> {
        if moduli.is_empty() {
            return Err(Error::InvalidParameter("need at least one modulus".into()));
        }
        if moduli.iter().any(|&p| p < 2) {
            return Err(Error::InvalidParameter("moduli must be at least 2".into()));
        }
        for i in 0..moduli.len() {
            for j in i + 1..moduli.len() {
                if gcd_u64(moduli[i], moduli[j]) != 1 {
                    return Err(Error::NotCoprime {
                        a: moduli[i],
                        b: moduli[j],
                    });
                }
            }
        }
        let mut product: u128 = 1;
        for &p in &moduli {
            product = product
                .checked_mul(p as u128)
                .ok_or_else(|| Error::TooLarge("moduli product overflow".into()))?;
        }
        Ok(CoprimeModuli { moduli, product })
    }

    pub fn dim(&self) -> usize {
        self.moduli.len()
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn product(&self) -> u128 {
        self.product
    }

    /// Σ_j p/p_j mod p; coprime to p, which is what makes the twisted index
    /// map injective.
    pub fn cofactor_sum(&self) -> u128 {
        let p = self.product;
        self.moduli
            .iter()
            .fold(0u128, |acc, &pj| (acc + p / pj as u128) % p)
    }

    fn check_residues(&self, r: &[u64]) -> Result<()> {
        if r.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: r.len(),
            });
        }
        for (&rj, &pj) in r.iter().zip(&self.moduli) {
            if rj >= pj {
                return Err(Error::IndexOutOfRange {
                    index: rj as i128,
                    order: pj as u128,
                });
            }
        }
        Ok(())
    }
}

/// The unique l in [0, p) with l ≡ r_j (mod p_j) for all j, computed by
/// constructive CRT with modular inverses.
pub fn tau(m: &CoprimeModuli, residues: &[u64]) -> Result<u128> {
    m.check_residues(residues)?;
    let p = m.product();
    let mut acc: u128 = 0;
    for (&rj, &pj) in residues.iter().zip(m.moduli()) {
        let cofactor = p / pj as u128;
        let inv = mod_inverse((cofactor % pj as u128) as u64, pj)
            .expect("cofactor is coprime to its modulus");
        // keep intermediates below p: reduce mod p_j before the cofactor
        let t = (rj as u128 * inv as u128) % pj as u128;
        acc = (acc + t * cofactor) % p;
    }
    Ok(acc)
}

/// Like [`tau`] but accepts signed integers, reducing each coordinate mod its
/// modulus first.
pub fn tau_of_ints(m: &CoprimeModuli, ints: &[i64]) -> Result<u128> {
    if ints.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: ints.len(),
        });
    }
    let residues: Vec<u64> = ints
        .iter()
        .zip(m.moduli())
        .map(|(&n, &p)| (n as i128).rem_euclid(p as i128) as u64)
        .collect();
    tau(m, &residues)
}

/// The twisted index map ⟨τ(u)·Σ_j p/p_j⟩ mod p, a bijection of the residue
/// box onto [0, p).
pub fn tau_bar(m: &CoprimeModuli, residues: &[u64]) -> Result<u128> {
    let t = tau(m, residues)?;
    Ok(mul_mod(t, m.cofactor_sum(), m.product()))
}

const THETA_CELL_LIMIT: u128 = 1 << 22;

/// The measure-preserving cell map sending the box cell u = (u_1..u_d) to the
/// one-dimensional cell with index τ̄(u).
pub fn build_theta(m: &CoprimeModuli) -> Result<MPCellMap> {
    let p = m.product();
    if p > THETA_CELL_LIMIT {
        return Err(Error::TooLarge(format!(
            "cell map with {p} cells exceeds the materialization limit"
        )));
    }
    let source = CellPartition::new(m.moduli().to_vec())?;
    let target = CellPartition::one_dim(p as u64);
    let mut forward = vec![0u64; p as usize];
    for cell in 0..p as u64 {
        let multi = source.multi_of(cell)?;
        forward[cell as usize] = tau_bar(m, &multi)? as u64;
    }
    MPCellMap::new(source, target, forward)
}

/// Returns n = τ(n_vec) after asserting, cell by cell in exact integer
/// arithmetic, that transporting the multi-dimensional function with index
/// n_vec along the cell map yields the one-dimensional function with index n:
/// Σ_j n_j·u_j·(p/p_j) ≡ n·τ̄(u) (mod p) for every u in the box.
pub fn dts_correspondence(m: &CoprimeModuli, n_vec: &[u64]) -> Result<u128> {
    m.check_residues(n_vec)?;
    let p = m.product();
    if p > THETA_CELL_LIMIT {
        return Err(Error::TooLarge(format!(
            "exhaustive correspondence check over {p} cells exceeds the limit"
        )));
    }
    let n = tau(m, n_vec)?;
    let source = CellPartition::new(m.moduli().to_vec())?;
    for cell in 0..p as u64 {
        let u = source.multi_of(cell)?;
        let mut lhs: u128 = 0;
        for ((&nj, &uj), &pj) in n_vec.iter().zip(&u).zip(m.moduli()) {
            let term = mul_mod(nj as u128 * uj as u128, p / pj as u128, p);
            lhs = (lhs + term) % p;
        }
        let rhs = mul_mod(n, tau_bar(m, &u)?, p);
        if lhs != rhs {
            return Err(Error::Internal(format!(
                "correspondence congruence failed at cell {u:?}: {lhs} != {rhs} (mod {p})"
            )));
        }
    }
    Ok(n)
}

/// Exhaustively checks that τ and τ̄ are bijections of the residue box onto
/// [0, p).
pub fn verify_bijectivity(m: &CoprimeModuli) -> Result<bool> {
    let p = m.product();
    if p > THETA_CELL_LIMIT {
        return Err(Error::TooLarge(format!(
            "bijectivity check over {p} indices exceeds the limit"
        )));
    }
    let source = CellPartition::new(m.moduli().to_vec())?;
    let mut seen_tau = vec![false; p as usize];
    let mut seen_bar = vec![false; p as usize];
    for cell in 0..p as u64 {
        let multi = source.multi_of(cell)?;
        let t = tau(m, &multi)? as usize;
        let b = tau_bar(m, &multi)? as usize;
        if seen_tau[t] || seen_bar[b] {
            return Ok(false);
        }
        seen_tau[t] = true;
        seen_bar[b] = true;
    }
    Ok(seen_tau.iter().all(|&s| s) && seen_bar.iter().all(|&s| s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp;

    fn moduli(v: &[u64]) -> CoprimeModuli {
        CoprimeModuli::new(v.to_vec()).unwrap()
    }

    #[test]
    fn rejects_non_coprime_moduli() {
        assert!(matches!(
            CoprimeModuli::new(vec![4, 6]),
            Err(Error::NotCoprime { a: 4, b: 6 })
        ));
        assert!(CoprimeModuli::new(vec![4, 9]).is_ok());
        assert!(CoprimeModuli::new(vec![1, 5]).is_err());
    }

    #[test]
    fn tau_examples() {
        let m = moduli(&[3, 5]);
        assert_eq!(tau(&m, &[0, 0]).unwrap(), 0);
        assert_eq!(tau(&m, &[2, 3]).unwrap(), 8);
        let m3 = moduli(&[2, 3, 5]);
        assert_eq!(tau(&m3, &[1, 2, 0]).unwrap(), 5);
    }

    #[test]
    fn tau_matches_exhaustive_search() {
        for mods in [vec![3u64, 5], vec![2, 3, 5], vec![4, 9], vec![7, 11]] {
            let m = moduli(&mods);
            let p = m.product() as u64;
            let box_part = CellPartition::new(mods.clone()).unwrap();
            for cell in 0..p {
                let r = box_part.multi_of(cell).unwrap();
                let fast = tau(&m, &r).unwrap() as u64;
                // oracle: scan 0..p for the congruence solution
                let slow = (0..p)
                    .find(|&l| {
                        r.iter()
                            .zip(&mods)
                            .all(|(&rj, &pj)| l % pj == rj)
                    })
                    .unwrap();
                assert_eq!(fast, slow);
            }
        }
    }

    #[test]
    fn tau_bar_examples() {
        let m = moduli(&[3, 5]);
        // q = 5 + 3 = 8
        assert_eq!(m.cofactor_sum(), 8);
        assert_eq!(tau_bar(&m, &[0, 0]).unwrap(), 0);
        assert_eq!(tau_bar(&m, &[2, 3]).unwrap(), 4); // 8·8 = 64 ≡ 4 (mod 15)
        assert_eq!(tau_bar(&m, &[1, 1]).unwrap(), 8); // τ = 1, 1·8 = 8
    }

    #[test]
    fn bijectivity_small_tuples() {
        for mods in [
            vec![2u64, 3],
            vec![3, 5],
            vec![2, 3, 5],
            vec![3, 5, 7],
            vec![4, 9, 25],
        ] {
            assert!(verify_bijectivity(&moduli(&mods)).unwrap(), "{mods:?}");
        }
    }

    #[test]
    fn bijectivity_every_coprime_pair_up_to_1000() {
        fn gcd(mut a: u64, mut b: u64) -> u64 {
            while b != 0 {
                (a, b) = (b, a % b);
            }
            a
        }
        let mut pairs = 0;
        for a in 2u64..=31 {
            for b in a + 1..=(1000 / a) {
                if gcd(a, b) == 1 {
                    assert!(verify_bijectivity(&moduli(&[a, b])).unwrap(), "({a},{b})");
                    pairs += 1;
                }
            }
        }
        assert!(pairs > 500);
    }

    #[test]
    fn theta_examples() {
        let m = moduli(&[2, 3]);
        let theta = build_theta(&m).unwrap();
        let part = theta.source().clone();
        assert_eq!(theta.image_of_cell(part.index_of(&[0, 0]).unwrap()), 0);
        // τ(1,2) = 5, q = 5, 25 mod 6 = 1
        assert_eq!(theta.image_of_cell(part.index_of(&[1, 2]).unwrap()), 1);
    }

    #[test]
    fn theta_is_measure_preserving() {
        let theta = build_theta(&moduli(&[3, 5])).unwrap();
        let report = mp::check_axioms(&theta, 64, 11);
        assert!(report.all_pass(), "failures: {:?}", report.failures);
    }

    #[test]
    fn theta_transports_indicators() {
        let m = moduli(&[2, 3]);
        let theta = build_theta(&m).unwrap();
        let src = theta.source().clone();
        let ind = mp::StepFunction::indicator(src.clone(), src.index_of(&[0, 0]).unwrap()).unwrap();
        let img = theta.apply(&ind).unwrap();
        let expected =
            mp::StepFunction::indicator(theta.target().clone(), 0).unwrap();
        assert_eq!(img, expected);
    }

    #[test]
    fn correspondence_examples() {
        let m = moduli(&[2, 3]);
        assert_eq!(dts_correspondence(&m, &[0, 0]).unwrap(), 0);
        assert_eq!(dts_correspondence(&m, &[1, 1]).unwrap(), 1);
        let m2 = moduli(&[3, 5]);
        assert_eq!(dts_correspondence(&m2, &[2, 3]).unwrap(), 8);
    }

    #[test]
    fn correspondence_holds_for_every_index() {
        for mods in [vec![2u64, 3], vec![3, 5], vec![2, 3, 5]] {
            let m = moduli(&mods);
            let box_part = CellPartition::new(mods).unwrap();
            for cell in 0..m.product() as u64 {
                let n_vec = box_part.multi_of(cell).unwrap();
                dts_correspondence(&m, &n_vec).unwrap();
            }
        }
    }

    #[test]
    fn theta_carries_multi_dts_onto_one_dim_dts() {
        let m = moduli(&[2, 3]);
        let theta = build_theta(&m).unwrap();
        let multi = crate::dts::DiscreteTrigSystem::new(vec![2, 3]).unwrap();
        let one = crate::dts::DiscreteTrigSystem::one_dimensional(6).unwrap();
        let box_part = theta.source().clone();
        for cell in 0..6u64 {
            let n_vec = box_part.multi_of(cell).unwrap();
            let n = tau(&m, &n_vec).unwrap() as u64;
            let f = multi.step_function(&n_vec).unwrap();
            let mapped = theta.apply(&f).unwrap();
            let g = one.step_function(&[n]).unwrap();
            assert_eq!(mapped, g, "index {n_vec:?}");
        }
    }

    #[test]
    fn mul_mod_handles_large_operands() {
        let m = u128::MAX / 2;
        let a = m - 1;
        let b = m - 2;
        // brute double-and-add equals the value computed via i128-free path
        assert_eq!(mul_mod(a, b, m), mul_mod(b, a, m));
        assert_eq!(mul_mod(a, 1, m), a % m);
        assert_eq!(mul_mod(123456789, 987654321, 1_000_003), {
            (123456789u128 * 987654321u128) % 1_000_003
        });
    }
}
