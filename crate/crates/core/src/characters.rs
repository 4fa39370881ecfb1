//! Characters of `S(n)` and `S(∞)`.
//!
//! Extreme characters are Thoma's multiplicative formula in the supersymmetric
//! power sums `p_k(α, β)`. Irreducible characters `χ^λ_ρ` come from the
//! Murnaghan-Nakayama rule on beta-sets; `χ_z` is their average against the
//! z-measure. Everything is evaluated from cycle statistics, so an element of
//! `S(∞)` is represented by its nontrivial cycle type.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::arith::{factorial, Scalar};
use crate::error::{domain, invalid, Result};
use crate::partitions::{dimension, enumerate_partitions, Partition, ThomaPoint};
use crate::permutations::{all_permutations, CycleStats, Permutation};
use crate::zmeasure::{zmeasure_prob, ZParams};

/// Default tolerance on the smallest Gram eigenvalue.
pub const DEFAULT_PSD_TOLERANCE: f64 = 1e-9;

/// Largest degree for which [`sgn_twist_check`] runs over all of `S(n)`.
pub const SGN_TWIST_MAX_DEGREE: usize = 6;

/// `p_k(α, β) = Σ α_i^k + (−1)^(k−1) Σ β_j^k`, `k ≥ 2`.
pub fn p_k<T: Scalar>(omega: &ThomaPoint<T>, k: u32) -> Result<T> {
    if k < 2 {
        return domain("p_k is only defined on the Thoma set for k ≥ 2");
    }
    let a = omega.alpha().iter().fold(T::zero(), |acc, x| acc + x.powi(k));
    let b = omega.beta().iter().fold(T::zero(), |acc, x| acc + x.powi(k));
    Ok(if k % 2 == 1 { a + b } else { a - b })
}

/// `χ^(ω)(σ) = Π_{k≥2} p_k(ω)^{m_k(σ)}`, with `0^0 = 1`.
pub fn extreme_character<T: Scalar>(omega: &ThomaPoint<T>, stats: &CycleStats) -> T {
    (2..=stats.max_len()).fold(T::one(), |acc, k| {
        let m = stats.m(k);
        if m == 0 {
            acc
        } else {
            acc * p_k(omega, k as u32).expect("k ≥ 2").powi(m)
        }
    })
}

/// Checks `χ^(α,β)·sgn = χ^(β,α)` on every element of `S(n)`.
pub fn sgn_twist_check<T: Scalar>(omega: &ThomaPoint<T>, n: usize) -> Result<bool> {
    if n > SGN_TWIST_MAX_DEGREE {
        return Err(crate::Error::Resource(format!(
            "sgn twist check enumerates S(n), n ≤ {SGN_TWIST_MAX_DEGREE}"
        )));
    }
    let swapped = omega.swapped();
    Ok(all_permutations(n).iter().all(|s| {
        let stats = s.cycle_stats();
        let lhs = extreme_character(omega, &stats) * T::from_i64(s.sign() as i64);
        let rhs = extreme_character(&swapped, &stats);
        (lhs - rhs).abs_val() <= T::constraint_slack()
    }))
}

/// A conjugacy class `ρ ∪ 1^(n−m)` given by its cycle lengths.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType {
    rho: Partition,
}

impl CycleType {
    pub fn new(rho: Partition) -> Self {
        CycleType { rho }
    }

    pub fn identity() -> Self {
        CycleType { rho: Partition::empty() }
    }

    pub fn transposition() -> Self {
        CycleType { rho: Partition::row(2) }
    }

    pub fn of(sigma: &Permutation) -> Self {
        CycleType { rho: sigma.cycle_stats().nontrivial_type() }
    }

    /// The parts, with any fixed points that were given.
    pub fn rho(&self) -> &Partition {
        &self.rho
    }

    /// Cycle lengths ≥ 2.
    pub fn nontrivial(&self) -> Vec<u32> {
        self.rho.parts().iter().copied().filter(|&p| p > 1).collect()
    }

    /// Points moved by the class.
    pub fn support_size(&self) -> usize {
        self.nontrivial().iter().map(|&p| p as usize).sum()
    }

    /// The full cycle type in `S(n)`.
    pub fn padded(&self, n: usize) -> Result<Partition> {
        let moved = self.support_size();
        if n < moved || n < self.rho.size() {
            return domain(format!("class {self} does not fit in S({n})"));
        }
        let mut parts = self.nontrivial();
        parts.extend(std::iter::repeat_n(1, n - moved));
        Partition::new(parts)
    }

    pub fn stats(&self, n: usize) -> Result<CycleStats> {
        Ok(CycleStats::from_cycle_type(&self.padded(n)?))
    }

    /// `n! / z_ρ` with `z_ρ = Π k^{m_k} m_k!`.
    pub fn class_size(&self, n: usize) -> Result<BigUint> {
        let stats = self.stats(n)?;
        let z = (1..=stats.max_len()).fold(BigUint::one(), |acc, k| {
            let m = stats.m(k);
            acc * BigUint::from(k).pow(m) * factorial(m as usize).magnitude()
        });
        Ok(factorial(n).magnitude() / z)
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.rho, f)
    }
}

/// One value `χ^λ_ρ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterTableEntry {
    pub lambda: Partition,
    pub rho: CycleType,
    pub value: BigInt,
}

/// Murnaghan-Nakayama evaluator with a shared memo on `(λ, remaining ρ)`.
#[derive(Debug, Default)]
pub struct CharacterTable {
    memo: Mutex<HashMap<(Partition, Vec<u32>), BigInt>>,
}

impl CharacterTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// `χ^λ` at the class `ρ ∪ 1^(|λ|−|ρ|)`.
    pub fn value(&self, lambda: &Partition, rho: &CycleType) -> Result<BigInt> {
        let cycles = rho.padded(lambda.size())?;
        Ok(self.eval(lambda, cycles.parts()))
    }

    /// Memoized entries currently held.
    pub fn cached(&self) -> usize {
        self.memo.lock().expect("memo lock").len()
    }

    fn eval(&self, lambda: &Partition, rho: &[u32]) -> BigInt {
        // a class of fixed points only: the character is the dimension
        if rho.iter().all(|&p| p == 1) {
            return BigInt::from(dimension(lambda));
        }
        let key = (lambda.clone(), rho.to_vec());
        if let Some(v) = self.memo.lock().expect("memo lock").get(&key) {
            return v.clone();
        }
        let k = rho[0] as usize;
        let rest = &rho[1..];
        let len = lambda.len();
        let beta: Vec<usize> = lambda.parts().iter().enumerate().map(|(i, &p)| p as usize + len - 1 - i).collect();
        let mut total = BigInt::zero();
        for (idx, &b) in beta.iter().enumerate() {
            if b < k || beta.contains(&(b - k)) {
                continue;
            }
            let crossed = beta.iter().filter(|&&c| c > b - k && c < b).count();
            let mut next = beta.clone();
            next[idx] = b - k;
            next.sort_unstable_by(|x, y| y.cmp(x));
            let parts: Vec<u32> = next
                .iter()
                .enumerate()
                .map(|(i, &c)| (c + i + 1 - len) as u32)
                .filter(|&p| p > 0)
                .collect();
            let v = self.eval(&Partition::from_parts_unchecked(parts), rest);
            if crossed % 2 == 0 {
                total += v;
            } else {
                total -= v;
            }
        }
        self.memo.lock().expect("memo lock").insert(key, total.clone());
        total
    }
}

/// `χ^λ_ρ` by the Murnaghan-Nakayama rule.
pub fn mn_character(lambda: &Partition, rho: &CycleType) -> Result<BigInt> {
    if rho.rho().size() > lambda.size() {
        return domain(format!("class {rho} is larger than |λ| = {}", lambda.size()));
    }
    CharacterTable::new().value(lambda, rho)
}

/// Every class of `S(n)`, reverse lexicographic.
pub fn classes(n: usize) -> Result<Vec<CycleType>> {
    Ok(enumerate_partitions(n)?.into_iter().map(CycleType::new).collect())
}

/// The full character table of `S(n)`, rows `λ` and columns `ρ` in reverse lexicographic order.
pub fn character_table(n: usize) -> Result<Vec<CharacterTableEntry>> {
    let table = CharacterTable::new();
    let parts = enumerate_partitions(n)?;
    let mut out = Vec::with_capacity(parts.len() * parts.len());
    for lambda in &parts {
        for rho in &parts {
            let rho = CycleType::new(rho.clone());
            let value = table.value(lambda, &rho)?;
            out.push(CharacterTableEntry { lambda: lambda.clone(), rho, value });
        }
    }
    Ok(out)
}

/// `χ_z|_{S(n)}(ρ) = Σ_λ P_z^(n)(λ) χ^λ_ρ / dim λ`.
pub fn chi_z<T: Scalar>(z: &ZParams<T>, rho: &CycleType, n: usize) -> Result<T> {
    ChiZ::new(z.clone(), n)?.value(rho)
}

/// Evaluator for `χ_z` on one `S(n)`, caching the z-measure, dimensions and
/// character values.
#[derive(Debug)]
pub struct ChiZ<T> {
    n: usize,
    weights: Vec<(Partition, T)>,
    table: CharacterTable,
    cache: Mutex<HashMap<CycleType, T>>,
}

impl<T: Scalar> ChiZ<T> {
    pub fn new(z: ZParams<T>, n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("χ_z is evaluated on S(n), n ≥ 1");
        }
        let weights = enumerate_partitions(n)?
            .into_iter()
            .map(|l| {
                let w = zmeasure_prob(&z, &l) / T::from_biguint(&dimension(&l));
                (l, w)
            })
            .collect();
        Ok(ChiZ { n, weights, table: CharacterTable::new(), cache: Mutex::new(HashMap::new()) })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn value(&self, rho: &CycleType) -> Result<T> {
        let key = CycleType::new(Partition::new(rho.nontrivial())?);
        if key.support_size() > self.n {
            return domain(format!("class {rho} needs n ≥ {}, got {}", key.support_size(), self.n));
        }
        if let Some(v) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(v.clone());
        }
        let mut total = T::zero();
        for (lambda, w) in &self.weights {
            if *w == T::zero() {
                continue;
            }
            total = total + w.clone() * T::from_bigint(&self.table.value(lambda, &key)?);
        }
        self.cache.lock().expect("cache lock").insert(key, total.clone());
        Ok(total)
    }

    pub fn at(&self, sigma: &Permutation) -> Result<T> {
        self.value(&CycleType::of(sigma))
    }
}

/// Smallest eigenvalue of the Gram matrix `[f(g_j^{-1} g_i)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramCheck {
    pub min_eigenvalue: f64,
    pub tolerance: f64,
}

impl GramCheck {
    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue >= -self.tolerance
    }
}

/// Positive-definiteness test of a real class function on a finite set of elements.
pub fn gram_psd_check<F>(f: F, elements: &[Permutation], tol: f64) -> Result<GramCheck>
where
    F: Fn(&Permutation) -> Result<f64>,
{
    let Some(first) = elements.first() else {
        return invalid("Gram test needs at least one element");
    };
    if elements.iter().any(|g| g.degree() != first.degree()) {
        return invalid("Gram test elements must lie in a common S(n)");
    }
    let k = elements.len();
    let inverses: Vec<Permutation> = elements.iter().map(Permutation::inverse).collect();
    let mut gram = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram[(i, j)] = f(&inverses[j].compose(&elements[i]))?;
        }
    }
    let sym = (&gram + gram.transpose()) * 0.5;
    let min_eigenvalue = SymmetricEigen::new(sym).eigenvalues.min();
    Ok(GramCheck { min_eigenvalue, tolerance: tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Rational;
    use crate::rng::from_seed;

    fn q(a: i64, b: i64) -> Rational {
        Rational::from_ratio(a, b)
    }

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn ct(parts: &[u32]) -> CycleType {
        CycleType::new(p(parts))
    }

    #[test]
    fn power_sums_at_corners() {
        let triv = ThomaPoint::<Rational>::trivial();
        let sgn = ThomaPoint::<Rational>::sign();
        for k in 2..7 {
            assert_eq!(p_k(&triv, k).unwrap(), q(1, 1));
            assert_eq!(p_k(&sgn, k).unwrap(), q(if k % 2 == 1 { 1 } else { -1 }, 1));
        }
        let half = ThomaPoint::new(vec![q(1, 2), q(1, 2)], vec![]).unwrap();
        assert_eq!(p_k(&half, 2).unwrap(), q(1, 2));
        assert!(p_k(&half, 1).is_err());
    }

    #[test]
    fn origin_gives_delta_at_identity() {
        let o = ThomaPoint::<Rational>::origin();
        let id = Permutation::identity(4).cycle_stats();
        assert_eq!(extreme_character(&o, &id), q(1, 1));
        let s: Permutation = "(1 2)(3 4)".parse().unwrap();
        assert_eq!(extreme_character(&o, &s.cycle_stats()), q(0, 1));
    }

    #[test]
    fn s3_table() {
        let l = p(&[2, 1]);
        assert_eq!(mn_character(&l, &ct(&[1, 1, 1])).unwrap(), BigInt::from(2));
        assert_eq!(mn_character(&l, &ct(&[2, 1])).unwrap(), BigInt::from(0));
        assert_eq!(mn_character(&l, &ct(&[3])).unwrap(), BigInt::from(-1));
        assert_eq!(mn_character(&p(&[1, 1, 1]), &ct(&[2])).unwrap(), BigInt::from(-1));
        assert!(mn_character(&p(&[2]), &ct(&[3])).is_err());
    }

    #[test]
    fn class_sizes_sum_to_factorial() {
        for n in 1..8 {
            let total: BigUint = classes(n).unwrap().iter().map(|c| c.class_size(n).unwrap()).sum();
            assert_eq!(total, factorial(n).magnitude().clone());
        }
        assert_eq!(ct(&[2]).class_size(4).unwrap(), BigUint::from(6u32));
    }

    #[test]
    fn chi_z_on_transposition_n2() {
        let z = ZParams::new(q(1, 2), q(0, 1));
        let v = chi_z(&z, &CycleType::transposition(), 2).unwrap();
        assert_eq!(v, q(4, 5));
        assert_eq!(chi_z(&z, &CycleType::identity(), 5).unwrap(), q(1, 1));
        assert!(chi_z(&z, &ct(&[3]), 2).is_err());
    }

    #[test]
    fn gram_of_trivial_character() {
        let mut rng = from_seed(5);
        let els: Vec<Permutation> = (0..6).map(|_| Permutation::random(5, &mut rng)).collect();
        let g = gram_psd_check(|_| Ok(1.0), &els, 1e-9).unwrap();
        assert!(g.is_psd());
        assert!(gram_psd_check(|_| Ok(1.0), &[Permutation::identity(2), Permutation::identity(3)], 1e-9).is_err());
        // the sign character flipped is not positive definite
        let els = vec![Permutation::identity(2), Permutation::transposition(2, 1, 2).unwrap()];
        let g = gram_psd_check(|s| Ok(-(s.sign() as f64)), &els, 1e-9).unwrap();
        assert!(!g.is_psd());
    }

    #[test]
    fn memo_is_shared() {
        let t = CharacterTable::new();
        t.value(&p(&[3, 2, 1]), &ct(&[2, 2])).unwrap();
        let before = t.cached();
        t.value(&p(&[3, 2, 1]), &ct(&[2, 2])).unwrap();
        assert_eq!(t.cached(), before);
        assert!(before > 0);
    }
}
