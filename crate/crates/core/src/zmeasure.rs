//! z-measures `P_z^(n)` on Young diagrams, their coherency, the sequential
//! growth sampler, negative-binomial mixing, and lattice configurations on
//! `ℤ' = ℤ + 1/2` with brute-force correlation functions.

use std::fmt;

use num_bigint::BigUint;
use rand::Rng;

use crate::arith::{rising_factorial, Scalar};
use crate::error::{domain, invalid, Error, Result};
use crate::partitions::{dimension, enumerate_partitions_capped, HalfInt, Partition};
use crate::pointproc::PointConfiguration;

/// Largest diagram size enumerated by [`LatticeCorrelations`].
pub const LATTICE_ENUMERATION_CAP: usize = 45;

/// The complex parameter `z = re + i·im`, stored as a real pair so that every
/// `|z + c|²` stays in the scalar field (Gaussian rationals in exact mode).
#[derive(Debug, Clone, PartialEq)]
pub struct ZParams<T> {
    pub re: T,
    pub im: T,
}

impl<T: Scalar> ZParams<T> {
    pub fn new(re: T, im: T) -> Self {
        ZParams { re, im }
    }

    pub fn real(re: T) -> Self {
        ZParams { re, im: T::zero() }
    }

    /// `t = |z|²`.
    pub fn t(&self) -> T {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    /// `|z + c|²` for an integer content `c`.
    pub fn box_factor(&self, content: i64) -> T {
        let shifted = self.re.clone() + T::from_i64(content);
        shifted.clone() * shifted + self.im.clone() * self.im.clone()
    }

    pub fn is_zero(&self) -> bool {
        self.re == T::zero() && self.im == T::zero()
    }

    pub fn conj(&self) -> Self {
        ZParams { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn neg(&self) -> Self {
        ZParams { re: -self.re.clone(), im: -self.im.clone() }
    }

    pub fn to_f64(&self) -> ZParams<f64> {
        ZParams { re: self.re.to_f64(), im: self.im.to_f64() }
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for ZParams<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im < T::zero() {
            write!(f, "{}-{}i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// `(dim λ)² / n!` in the scalar field.
pub fn plancherel_weight<T: Scalar>(lambda: &Partition) -> T {
    let d = dimension(lambda);
    let fact = (1..=lambda.size() as u64).fold(BigUint::from(1u32), |acc, k| acc * k);
    T::from_biguint(&(&d * &d)) / T::from_biguint(&fact)
}

/// `P_z^(n)(λ)` with `n = |λ|`; `P_z^(0)(∅) = 1`.
///
/// The factor `|z|²` of the corner box `(1,1)` cancels against the first
/// factor of `t(t+1)…(t+n-1)`, so the same expression also covers `z = 0`.
pub fn zmeasure_prob<T: Scalar>(z: &ZParams<T>, lambda: &Partition) -> T {
    let n = lambda.size();
    if n == 0 {
        return T::one();
    }
    let t = z.t();
    let numer = lambda
        .contents()
        .skip(1)
        .fold(T::one(), |acc, c| acc * z.box_factor(c));
    let denom = (1..n).fold(T::one(), |acc, k| acc * (t.clone() + T::from_i64(k as i64)));
    numer / denom * plancherel_weight::<T>(lambda)
}

/// `P_z^(n)` on every diagram of size `n`, in reverse lexicographic order.
pub fn zmeasure_table<T: Scalar>(z: &ZParams<T>, n: usize, cap: usize) -> Result<Vec<(Partition, T)>> {
    Ok(enumerate_partitions_capped(n, cap)?
        .into_iter()
        .map(|l| {
            let p = zmeasure_prob(z, &l);
            (l, p)
        })
        .collect())
}

/// Exhaustive check of `P^(n)(μ) = Σ_{λ = μ + □} (dim μ / dim λ) P^(n+1)(λ)`.
pub fn coherency_check<T: Scalar>(z: &ZParams<T>, n: usize) -> Result<bool> {
    let upper = zmeasure_table(z, n + 1, crate::partitions::DEFAULT_ENUMERATION_CAP)?;
    let lower = zmeasure_table(z, n, crate::partitions::DEFAULT_ENUMERATION_CAP)?;
    Ok(coherent(&lower, &upper))
}

/// True iff the two tables satisfy the coherency relation exactly.
pub fn coherent<T: Scalar>(lower: &[(Partition, T)], upper: &[(Partition, T)]) -> bool {
    let index: std::collections::HashMap<&Partition, &T> = upper.iter().map(|(l, p)| (l, p)).collect();
    lower.iter().all(|(mu, p)| {
        let dim_mu = T::from_biguint(&dimension(mu));
        let (addable, _) = mu.addable_removable();
        let sum = addable.iter().fold(T::zero(), |acc, &(row, _)| {
            let lambda = mu.add_box(row).expect("addable");
            let dim_lambda = T::from_biguint(&dimension(&lambda));
            let p_lambda = index.get(&lambda).map(|v| (*v).clone()).unwrap_or_else(T::zero);
            acc + dim_mu.clone() / dim_lambda * p_lambda
        });
        sum == *p
    })
}

/// Content `j - i` of the single box of `λ / μ`, if `λ` covers `μ`.
fn added_box_content(mu: &Partition, lambda: &Partition) -> Option<i64> {
    if lambda.size() != mu.size() + 1 || !lambda.contains(mu) {
        return None;
    }
    let row = (1..=lambda.len()).find(|&i| lambda.row_len(i) != mu.row_len(i))?;
    Some(lambda.row_len(row) as i64 - row as i64)
}

/// Transition probability `μ → λ` of the growth chain:
/// `|z + c|² (dim λ / dim μ) / ((t + n)(n + 1))`.
pub fn growth_transition<T: Scalar>(z: &ZParams<T>, mu: &Partition, lambda: &Partition) -> Result<T> {
    let content = added_box_content(mu, lambda)
        .ok_or_else(|| Error::Domain(format!("{lambda:?} does not cover {mu:?}")))?;
    let n = mu.size();
    if n == 0 {
        return Ok(T::one());
    }
    let dim_ratio = T::from_biguint(&dimension(lambda)) / T::from_biguint(&dimension(mu));
    let denom = (z.t() + T::from_i64(n as i64)) * T::from_i64(n as i64 + 1);
    Ok(z.box_factor(content) * dim_ratio / denom)
}

/// A Young diagram stored as runs `(row length, multiplicity)`, longest first.
/// Corners are exactly the runs, so growth steps cost `O(#corners)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunDiagram {
    runs: Vec<(u32, u32)>,
    size: usize,
}

impl RunDiagram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_partition(lambda: &Partition) -> Self {
        let mut runs: Vec<(u32, u32)> = Vec::new();
        for &p in lambda.parts() {
            match runs.last_mut() {
                Some((len, mult)) if *len == p => *mult += 1,
                _ => runs.push((p, 1)),
            }
        }
        RunDiagram { runs, size: lambda.size() }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Contents of the addable boxes (`runs + 1` of them), top to bottom.
    pub fn addable_contents(&self, out: &mut Vec<i64>) {
        out.clear();
        let mut rows_above = 0i64;
        for &(len, mult) in &self.runs {
            out.push(len as i64 - rows_above);
            rows_above += mult as i64;
        }
        out.push(-rows_above);
    }

    /// Contents of the removable boxes, top to bottom.
    pub fn removable_contents(&self, out: &mut Vec<i64>) {
        out.clear();
        let mut rows = 0i64;
        for &(len, mult) in &self.runs {
            rows += mult as i64;
            out.push(len as i64 - rows);
        }
    }

    /// Adds a box at the `k`-th addable position (0 = first row).
    pub fn add_at(&mut self, k: usize) {
        let r = self.runs.len();
        assert!(k <= r, "addable index out of range");
        self.size += 1;
        if k == r {
            match self.runs.last_mut() {
                Some((1, mult)) => *mult += 1,
                _ => self.runs.push((1, 1)),
            }
            return;
        }
        let new_len = self.runs[k].0 + 1;
        self.runs[k].1 -= 1;
        let emptied = self.runs[k].1 == 0;
        if k > 0 && self.runs[k - 1].0 == new_len {
            self.runs[k - 1].1 += 1;
            if emptied {
                self.runs.remove(k);
            }
        } else if emptied {
            self.runs[k].0 = new_len;
            self.runs[k].1 = 1;
        } else {
            self.runs.insert(k, (new_len, 1));
        }
    }

    pub fn to_partition(&self) -> Partition {
        let mut parts = Vec::with_capacity(self.runs.iter().map(|r| r.1 as usize).sum());
        for &(len, mult) in &self.runs {
            parts.extend(std::iter::repeat_n(len, mult as usize));
        }
        Partition::from_parts_unchecked(parts)
    }
}

/// Plancherel transition weights `dim λ / ((n+1) dim μ)` from the interlacing
/// minima `x` (addable contents) and maxima `y` (removable contents):
/// `Π_j (x_i − y_j) / Π_{j≠i} (x_i − x_j)`.
pub fn plancherel_transitions(addable: &[i64], removable: &[i64], out: &mut Vec<f64>) {
    out.clear();
    let k = removable.len();
    debug_assert_eq!(addable.len(), k + 1);
    for i in 0..=k {
        let xi = addable[i] as f64;
        let mut w = 1.0;
        // pair each maximum with the minimum on the same side of x_i
        for j in 0..k {
            let paired = if j < i { addable[j] } else { addable[j + 1] } as f64;
            w *= (xi - removable[j] as f64) / (xi - paired);
        }
        out.push(w);
    }
}

/// Floating-point growth chain for `P_z^(n)`.
#[derive(Debug, Clone)]
pub struct GrowthSampler {
    z: ZParams<f64>,
    t: f64,
    addable: Vec<i64>,
    removable: Vec<i64>,
    weights: Vec<f64>,
}

impl GrowthSampler {
    pub fn new(z: ZParams<f64>) -> Result<Self> {
        if z.is_zero() {
            return domain("growth sampling needs z ≠ 0");
        }
        if !(z.re.is_finite() && z.im.is_finite()) {
            return domain("z must be finite");
        }
        let t = z.t();
        Ok(GrowthSampler { z, t, addable: Vec::new(), removable: Vec::new(), weights: Vec::new() })
    }

    /// Transition probabilities out of the current diagram, in addable order.
    pub fn transition_probabilities(&mut self, diagram: &RunDiagram) -> &[f64] {
        diagram.addable_contents(&mut self.addable);
        diagram.removable_contents(&mut self.removable);
        plancherel_transitions(&self.addable, &self.removable, &mut self.weights);
        let scale = 1.0 / (self.t + diagram.size() as f64);
        for (w, &c) in self.weights.iter_mut().zip(&self.addable) {
            *w *= self.z.box_factor(c) * scale;
        }
        &self.weights
    }

    /// Adds one box at random.
    pub fn step<R: Rng + ?Sized>(&mut self, diagram: &mut RunDiagram, rng: &mut R) {
        let probs = self.transition_probabilities(diagram);
        let total: f64 = probs.iter().sum();
        let mut u = rng.random::<f64>() * total;
        let mut chosen = probs.len() - 1;
        for (k, &p) in probs.iter().enumerate() {
            if u < p {
                chosen = k;
                break;
            }
            u -= p;
        }
        // never pick a zero-probability box through rounding
        while probs[chosen] == 0.0 && chosen > 0 {
            chosen -= 1;
        }
        diagram.add_at(chosen);
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, n: usize, rng: &mut R) -> RunDiagram {
        let mut d = RunDiagram::new();
        for _ in 0..n {
            self.step(&mut d, rng);
        }
        d
    }
}

/// One draw from `P_z^(n)`.
pub fn sample_growth<R: Rng + ?Sized>(z: &ZParams<f64>, n: usize, rng: &mut R) -> Result<Partition> {
    if n == 0 {
        return domain("sample_growth needs n ≥ 1");
    }
    Ok(GrowthSampler::new(z.clone())?.sample(n, rng).to_partition())
}

/// The negative binomial law `π_{t,ξ}(n) = (1-ξ)^t (t)_n / n! ξ^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegBinomial {
    t: f64,
    xi: f64,
}

impl NegBinomial {
    pub fn new(t: f64, xi: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return domain("negative binomial needs t > 0");
        }
        if !(xi > 0.0 && xi < 1.0) {
            return domain("mixing parameter must lie in (0, 1)");
        }
        Ok(NegBinomial { t, xi })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn pmf(&self, n: usize) -> f64 {
        (0..n).fold((1.0 - self.xi).powf(self.t), |acc, k| {
            acc * self.xi * (self.t + k as f64) / (k as f64 + 1.0)
        })
    }

    /// Upper bound on `Σ_{m > n} π(m)` from the geometric ratio bound
    /// `π(m+1)/π(m) = ξ(t+m)/(m+1) ≤ max(ratio at n+1, ξ)`.
    pub fn tail_bound(&self, n: usize) -> f64 {
        let next = self.pmf(n + 1);
        let ratio = (self.xi * (self.t + (n + 1) as f64) / ((n + 2) as f64)).max(self.xi);
        if ratio >= 1.0 {
            f64::INFINITY
        } else {
            next / (1.0 - ratio)
        }
    }

    /// Smallest `N` with certified tail below `eps`.
    pub fn truncation(&self, eps: f64, cap: usize) -> Result<usize> {
        (0..=cap)
            .find(|&n| self.tail_bound(n) < eps)
            .ok_or_else(|| Error::Resource(format!(
                "tail below {eps:e} needs more than {cap} boxes; use a smaller ξ"
            )))
    }

    /// Inverse-CDF draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>();
        let mut p = (1.0 - self.xi).powf(self.t);
        let mut cdf = p;
        let mut n = 0usize;
        while u >= cdf {
            p *= self.xi * (self.t + n as f64) / (n as f64 + 1.0);
            n += 1;
            cdf += p;
            if p == 0.0 && cdf < u {
                break;
            }
        }
        n
    }
}

/// `π_{t,ξ}(n)` in floating point.
pub fn neg_binomial_weight(t: f64, xi: f64, n: usize) -> Result<f64> {
    Ok(NegBinomial::new(t, xi)?.pmf(n))
}

/// The rational part `(t)_n ξ^n / n!` of `π_{t,ξ}(n)` (the factor `(1-ξ)^t` is
/// generally irrational and is left out).
pub fn neg_binomial_rational_part<T: Scalar>(t: &T, xi: &T, n: usize) -> T {
    rising_factorial(t, n) * xi.powi(n as u32) / rising_factorial(&T::one(), n)
}

/// `P̃_{z,ξ}(λ) = π_{t,ξ}(|λ|) P_z^(|λ|)(λ)`.
pub fn mixed_prob(z: &ZParams<f64>, xi: f64, lambda: &Partition) -> Result<f64> {
    if z.is_zero() {
        return domain("mixed z-measure needs z ≠ 0");
    }
    Ok(NegBinomial::new(z.t(), xi)?.pmf(lambda.size()) * zmeasure_prob(z, lambda))
}

/// One draw from the mixed z-measure.
pub fn sample_mixed<R: Rng + ?Sized>(z: &ZParams<f64>, xi: f64, rng: &mut R) -> Result<Partition> {
    let nb = NegBinomial::new(z.t(), xi)?;
    let mut sampler = GrowthSampler::new(z.clone())?;
    let n = nb.sample(rng);
    Ok(sampler.sample(n, rng).to_partition())
}

/// A finite configuration on `ℤ'`, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LatticeConfiguration {
    points: Vec<HalfInt>,
}

impl LatticeConfiguration {
    pub fn new(mut points: Vec<HalfInt>) -> Result<Self> {
        points.sort();
        if points.windows(2).any(|w| w[0] == w[1]) {
            return invalid("lattice configuration has a repeated point");
        }
        if points.iter().any(|p| !p.is_lattice_point()) {
            return invalid("lattice points must lie in ℤ + 1/2");
        }
        Ok(LatticeConfiguration { points })
    }

    pub fn points(&self) -> &[HalfInt] {
        &self.points
    }

    pub fn contains(&self, x: HalfInt) -> bool {
        self.points.binary_search(&x).is_ok()
    }

    /// Diagrams map to configurations with as many negative as positive points.
    pub fn is_balanced(&self) -> bool {
        let neg = self.points.iter().filter(|p| p.numerator() < 0).count();
        2 * neg == self.points.len()
    }
}

impl fmt::Display for LatticeConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.points.iter().map(HalfInt::to_string).collect();
        f.write_str(&s.join(" "))
    }
}

/// `λ ↦ {−b_1, …, −b_d, a_d, …, a_1}`.
pub fn lattice_config(lambda: &Partition) -> LatticeConfiguration {
    let fr = lambda.frobenius();
    let mut points: Vec<HalfInt> = fr.b.iter().map(|&b| -b).collect();
    points.extend(fr.a.iter().rev().copied());
    LatticeConfiguration { points }
}

/// Embeds `ℤ'` into `ℝ*` by `x ↦ (1 − ξ) x`.
pub fn scaled_config(c: &LatticeConfiguration, xi: f64) -> Result<PointConfiguration> {
    if !(xi > 0.0 && xi < 1.0) {
        return domain("mixing parameter must lie in (0, 1)");
    }
    let scale = 1.0 - xi;
    PointConfiguration::new(c.points.iter().map(|p| p.to_f64() * scale).collect())
}

/// A correlation value with a certified one-sided truncation bound: the true
/// value lies in `[value, value + tail_bound]` up to rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationValue {
    pub value: f64,
    pub tail_bound: f64,
    pub truncation: usize,
}

/// Correlation functions of the lattice process of `P̃_{z,ξ}` on a finite set of
/// sites, by brute-force summation over all diagrams up to the truncation size.
#[derive(Debug, Clone)]
pub struct LatticeCorrelations {
    sites: Vec<HalfInt>,
    /// `mass[mask]` = probability that the configuration meets `sites` exactly in `mask`.
    mass: Vec<f64>,
    tail_bound: f64,
    truncation: usize,
}

impl LatticeCorrelations {
    pub fn compute(z: &ZParams<f64>, xi: f64, sites: &[HalfInt], tail_eps: f64) -> Result<Self> {
        if z.is_zero() {
            return domain("lattice correlations need z ≠ 0");
        }
        if !(tail_eps > 0.0) {
            return domain("tail tolerance must be positive");
        }
        if sites.len() > 16 {
            return Err(Error::Resource("at most 16 sites per correlation table".into()));
        }
        if let Some(bad) = sites.iter().find(|s| !s.is_lattice_point()) {
            return invalid(format!("{bad} is not in ℤ + 1/2"));
        }
        let nb = NegBinomial::new(z.t(), xi)?;
        let truncation = nb.truncation(tail_eps, LATTICE_ENUMERATION_CAP)?;
        let mut mass = vec![0.0f64; 1 << sites.len()];
        for n in 0..=truncation {
            let weight_n = nb.pmf(n);
            for lambda in enumerate_partitions_capped(n, LATTICE_ENUMERATION_CAP)? {
                let config = lattice_config(&lambda);
                let mask = sites
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| config.contains(**s))
                    .fold(0usize, |m, (k, _)| m | (1 << k));
                mass[mask] += weight_n * zmeasure_prob(z, &lambda);
            }
        }
        Ok(LatticeCorrelations {
            sites: sites.to_vec(),
            mass,
            tail_bound: nb.tail_bound(truncation),
            truncation,
        })
    }

    pub fn sites(&self) -> &[HalfInt] {
        &self.sites
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Probability that the random configuration contains all of `points`.
    pub fn correlation(&self, points: &[HalfInt]) -> Result<CorrelationValue> {
        let mut want = 0usize;
        for p in points {
            let k = self
                .sites
                .iter()
                .position(|s| s == p)
                .ok_or_else(|| Error::Domain(format!("{p} is not a tabulated site")))?;
            want |= 1 << k;
        }
        let value = self
            .mass
            .iter()
            .enumerate()
            .filter(|(mask, _)| mask & want == want)
            .map(|(_, m)| m)
            .sum();
        Ok(CorrelationValue { value, tail_bound: self.tail_bound, truncation: self.truncation })
    }
}

/// `ρ(points)` for the lattice process of `P̃_{z,ξ}`.
pub fn brute_force_correlation(
    z: &ZParams<f64>,
    xi: f64,
    points: &[HalfInt],
    tail_eps: f64,
) -> Result<CorrelationValue> {
    LatticeCorrelations::compute(z, xi, points, tail_eps)?.correlation(points)
}

/// `max_λ |P_z^(n)(λ) − (dim λ)²/n!|` over diagrams of size `n`.
pub fn plancherel_limit_check(n: usize, z: &ZParams<f64>) -> Result<f64> {
    if n == 0 {
        return domain("n must be positive");
    }
    Ok(enumerate_partitions_capped(n, crate::partitions::DEFAULT_ENUMERATION_CAP)?
        .iter()
        .map(|l| (zmeasure_prob(z, l) - plancherel_weight::<f64>(l)).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Rational;
    use crate::rng::from_seed;
    use num_traits::{One, Zero};

    fn q(a: i64, b: i64) -> Rational {
        Rational::from_ratio(a, b)
    }

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn single_box_has_mass_one() {
        assert_eq!(zmeasure_prob(&ZParams::new(q(1, 3), q(2, 5)), &p(&[1])), Rational::one());
        assert_eq!(zmeasure_prob(&ZParams::real(Rational::zero()), &p(&[1])), Rational::one());
    }

    #[test]
    fn two_box_masses() {
        let z = ZParams::new(q(1, 2), q(1, 3));
        let t = z.t();
        let row = zmeasure_prob(&z, &p(&[2]));
        let col = zmeasure_prob(&z, &p(&[1, 1]));
        assert_eq!(row, z.box_factor(1) / (q(2, 1) * (t.clone() + Rational::one())));
        assert_eq!(col, z.box_factor(-1) / (q(2, 1) * (t + Rational::one())));
        assert_eq!(row + col, Rational::one());
    }

    #[test]
    fn z_one_kills_columns() {
        let z = ZParams::real(Rational::one());
        assert!(zmeasure_prob(&z, &p(&[1, 1])).is_zero());
        for n in 1..8 {
            for (l, v) in zmeasure_table(&z, n, 60).unwrap() {
                assert_eq!(v.is_zero(), l.len() > 1, "{l:?}");
            }
        }
    }

    #[test]
    fn growth_transition_examples() {
        let z = ZParams::new(q(1, 2), q(1, 5));
        assert_eq!(growth_transition(&z, &Partition::empty(), &p(&[1])).unwrap(), Rational::one());
        let t = z.t();
        assert_eq!(
            growth_transition(&z, &p(&[1]), &p(&[2])).unwrap(),
            z.box_factor(1) / (q(2, 1) * (t.clone() + Rational::one()))
        );
        assert_eq!(
            growth_transition(&z, &p(&[1]), &p(&[1, 1])).unwrap(),
            z.box_factor(-1) / (q(2, 1) * (t + Rational::one()))
        );
        assert!(growth_transition(&z, &p(&[1]), &p(&[3])).is_err());
        assert!(growth_transition(&z, &p(&[2]), &p(&[1, 1, 1])).is_err());
    }

    #[test]
    fn run_diagram_tracks_partition() {
        let mut rng = from_seed(3);
        let mut d = RunDiagram::new();
        let mut reference = Partition::empty();
        let mut adds = Vec::new();
        for _ in 0..200 {
            d.addable_contents(&mut adds);
            let k = rng.random_range(0..adds.len());
            let (addable, _) = reference.addable_removable();
            let (row, col) = addable[k];
            assert_eq!(adds[k], col as i64 - row as i64);
            reference = reference.add_box(row).unwrap();
            d.add_at(k);
            assert_eq!(d.to_partition(), reference);
        }
        assert_eq!(RunDiagram::from_partition(&reference), d);
    }

    #[test]
    fn interlacing_matches_hook_ratio() {
        let z = ZParams::new(0.4, -0.7);
        let mut sampler = GrowthSampler::new(z.clone()).unwrap();
        for lambda in crate::partitions::enumerate_partitions(7).unwrap() {
            let d = RunDiagram::from_partition(&lambda);
            let probs = sampler.transition_probabilities(&d).to_vec();
            let (addable, _) = lambda.addable_removable();
            for (&(row, _), prob) in addable.iter().zip(&probs) {
                let next = lambda.add_box(row).unwrap();
                let exact = growth_transition(&z, &lambda, &next).unwrap();
                assert!((exact - prob).abs() < 1e-13);
            }
            assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn negative_binomial() {
        let nb = NegBinomial::new(1.0, 0.3).unwrap();
        for n in 0..10 {
            assert!((nb.pmf(n) - 0.7 * 0.3f64.powi(n as i32)).abs() < 1e-15);
        }
        let nb = NegBinomial::new(0.25, 0.3).unwrap();
        assert_eq!(nb.pmf(0), 0.7f64.powf(0.25));
        let n = nb.truncation(1e-12, 100).unwrap();
        let partial: f64 = (0..=n).map(|k| nb.pmf(k)).sum();
        assert!(1.0 - partial < 1e-12);
        assert!(n <= 30, "N = {n}");
        assert!(NegBinomial::new(0.0, 0.3).is_err());
        assert!(NegBinomial::new(1.0, 1.0).is_err());
        assert!(matches!(NegBinomial::new(1.0, 0.999).unwrap().truncation(1e-12, 20), Err(Error::Resource(_))));
    }

    #[test]
    fn lattice_configs() {
        assert!(lattice_config(&Partition::empty()).points().is_empty());
        let c = lattice_config(&p(&[1]));
        assert_eq!(c.points(), &[HalfInt::from_numerator(-1), HalfInt::from_numerator(1)]);
        let c = lattice_config(&p(&[2, 1]));
        assert_eq!(c.points(), &[HalfInt::from_numerator(-3), HalfInt::from_numerator(3)]);
        assert!(c.is_balanced());
        let s = scaled_config(&lattice_config(&p(&[1])), 0.5).unwrap();
        assert_eq!(s.positions(), &[-0.25, 0.25]);
        assert!(scaled_config(&c, 1.0).is_err());
    }

    #[test]
    fn empty_correlation_is_total_mass() {
        let z = ZParams::new(0.5, 0.0);
        let r = brute_force_correlation(&z, 0.3, &[], 1e-12).unwrap();
        assert!((r.value - 1.0).abs() <= r.tail_bound + 1e-14);
        assert!(r.value <= 1.0 + 1e-14);
    }

    #[test]
    fn plancherel_limit_small() {
        assert_eq!(plancherel_limit_check(1, &ZParams::real(3.0)).unwrap(), 0.0);
        let d2 = plancherel_limit_check(5, &ZParams::real(1e2)).unwrap();
        let d3 = plancherel_limit_check(5, &ZParams::real(1e3)).unwrap();
        assert!(d3 < d2);
    }

    #[test]
    fn growth_rejects_zero() {
        assert!(sample_growth(&ZParams::real(0.0), 3, &mut from_seed(0)).is_err());
        assert!(sample_growth(&ZParams::real(0.5), 0, &mut from_seed(0)).is_err());
    }
}
