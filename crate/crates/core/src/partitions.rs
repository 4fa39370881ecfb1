//! Young diagrams: enumeration, hook-length dimensions, contents, modified
//! Frobenius coordinates and the embedding of a diagram into the Thoma set.
//!
//! Rows and columns are 1-based in every public position (`(row, col)`),
//! matching the usual `(i, j) ∈ λ` box notation.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{Rational, Scalar};
use crate::error::{domain, invalid, Error, Result};

/// Default upper bound on `n` for [`enumerate_partitions`]; p(60) = 966467.
pub const DEFAULT_ENUMERATION_CAP: usize = 60;

/// Largest size for which [`dimension_auto`] returns an exact integer.
pub const EXACT_DIMENSION_MAX: usize = 150;

/// A Young diagram, stored as its weakly decreasing row lengths.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    parts: Vec<u32>,
    n: usize,
}

impl Partition {
    /// Builds a partition from row lengths. Trailing zeros are dropped; any
    /// other violation of weak monotonicity is rejected.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return invalid(format!("parts {parts:?} are not weakly decreasing"));
        }
        if parts.contains(&0) {
            return invalid("zero part inside a partition");
        }
        Ok(Self::from_parts_unchecked(parts))
    }

    pub(crate) fn from_parts_unchecked(parts: Vec<u32>) -> Self {
        let n = parts.iter().map(|&p| p as usize).sum();
        Partition { parts, n }
    }

    pub fn empty() -> Self {
        Partition::default()
    }

    /// The one-row diagram `(n)`.
    pub fn row(n: u32) -> Self {
        if n == 0 {
            Self::empty()
        } else {
            Self::from_parts_unchecked(vec![n])
        }
    }

    /// The one-column diagram `(1^n)`.
    pub fn column(n: u32) -> Self {
        Self::from_parts_unchecked(vec![1; n as usize])
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of boxes.
    pub fn size(&self) -> usize {
        self.n
    }

    /// Number of nonzero rows.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Length of the `i`-th row (1-based); zero beyond the last row.
    pub fn row_len(&self, i: usize) -> u32 {
        if i == 0 {
            return 0;
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    pub fn contains(&self, other: &Partition) -> bool {
        other.len() <= self.len() && other.parts.iter().zip(&self.parts).all(|(a, b)| a <= b)
    }

    /// Column lengths.
    pub fn transpose(&self) -> Partition {
        let width = self.parts.first().copied().unwrap_or(0);
        let cols = (1..=width)
            .map(|j| self.parts.iter().take_while(|&&p| p >= j).count() as u32)
            .collect();
        Self::from_parts_unchecked(cols)
    }

    /// Number of diagonal boxes (the Durfee square side).
    pub fn diagonal_len(&self) -> usize {
        self.parts.iter().enumerate().take_while(|(i, &p)| p as usize > *i).count()
    }

    /// All boxes with their content `j - i` and hook length, row-major.
    pub fn box_data(&self) -> Vec<BoxInfo> {
        let conj = self.transpose();
        let mut out = Vec::with_capacity(self.n);
        for (r, &len) in self.parts.iter().enumerate() {
            for c in 0..len as usize {
                let arm = len as usize - c - 1;
                let leg = conj.parts[c] as usize - r - 1;
                out.push(BoxInfo {
                    row: r + 1,
                    col: c + 1,
                    content: c as i64 - r as i64,
                    hook: (arm + leg + 1) as u32,
                });
            }
        }
        out
    }

    /// Iterator over the contents `j - i` of all boxes.
    pub fn contents(&self) -> impl Iterator<Item = i64> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(r, &len)| (0..len as i64).map(move |c| c - r as i64))
    }

    /// Addable and removable boxes as 1-based `(row, col)` positions.
    /// There is always exactly one more addable box than removable ones.
    pub fn addable_removable(&self) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
        let mut addable = Vec::new();
        let mut removable = Vec::new();
        let k = self.parts.len();
        for i in 0..=k {
            let cur = self.parts.get(i).copied().unwrap_or(0);
            let above = if i == 0 { u32::MAX } else { self.parts[i - 1] };
            if above > cur {
                addable.push((i + 1, cur as usize + 1));
            }
            if i < k {
                let below = self.parts.get(i + 1).copied().unwrap_or(0);
                if cur > below {
                    removable.push((i + 1, cur as usize));
                }
            }
        }
        (addable, removable)
    }

    /// The diagram with one box appended to row `row` (1-based), if that is a
    /// valid addable position.
    pub fn add_box(&self, row: usize) -> Option<Partition> {
        if row == 0 || row > self.parts.len() + 1 {
            return None;
        }
        let cur = self.row_len(row);
        if row > 1 && self.row_len(row - 1) <= cur {
            return None;
        }
        let mut parts = self.parts.clone();
        if row == parts.len() + 1 {
            parts.push(1);
        } else {
            parts[row - 1] += 1;
        }
        Some(Self::from_parts_unchecked(parts))
    }

    /// The diagram with the last box of row `row` removed, if that box is a corner.
    pub fn remove_box(&self, row: usize) -> Option<Partition> {
        if row == 0 || row > self.parts.len() {
            return None;
        }
        if self.row_len(row + 1) >= self.row_len(row) {
            return None;
        }
        let mut parts = self.parts.clone();
        parts[row - 1] -= 1;
        if parts[row - 1] == 0 {
            parts.pop();
        }
        Some(Self::from_parts_unchecked(parts))
    }

    /// Modified Frobenius coordinates `a_i = λ_i - i + 1/2`, `b_i = λ'_i - i + 1/2`.
    pub fn frobenius(&self) -> FrobeniusCoords {
        let d = self.diagonal_len();
        let conj = self.transpose();
        let half = |len: u32, i: usize| HalfInt::from_numerator(2 * (len as i64 - i as i64) + 1);
        FrobeniusCoords {
            a: (1..=d).map(|i| half(self.parts[i - 1], i)).collect(),
            b: (1..=d).map(|i| half(conj.parts[i - 1], i)).collect(),
        }
    }

    /// Product of all hook lengths.
    pub fn hook_product(&self) -> BigUint {
        self.box_data().iter().fold(BigUint::one(), |acc, b| acc * b.hook)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("-");
        }
        let joined: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        f.write_str(&joined.join(","))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "-" || s.is_empty() {
            return Ok(Partition::empty());
        }
        let parts = s
            .split(',')
            .map(|p| p.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad partition '{s}'"))))
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxInfo {
    pub row: usize,
    pub col: usize,
    pub content: i64,
    pub hook: u32,
}

/// A half-integer stored as its numerator over 2.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const fn from_numerator(num: i64) -> Self {
        HalfInt(num)
    }

    pub fn numerator(self) -> i64 {
        self.0
    }

    /// True for elements of ℤ + 1/2.
    pub fn is_lattice_point(self) -> bool {
        self.0 % 2 != 0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn to_scalar<T: Scalar>(self) -> T {
        T::from_ratio(self.0, 2)
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;

    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl fmt::Debug for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad half-integer '{s}'"));
        if let Some(num) = s.strip_suffix("/2") {
            return Ok(HalfInt(num.trim().parse().map_err(|_| bad())?));
        }
        let v: f64 = s.parse().map_err(|_| bad())?;
        let twice = v * 2.0;
        if twice.fract() != 0.0 || !twice.is_finite() {
            return Err(bad());
        }
        Ok(HalfInt(twice as i64))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusCoords {
    pub a: Vec<HalfInt>,
    pub b: Vec<HalfInt>,
}

impl FrobeniusCoords {
    pub fn d(&self) -> usize {
        self.a.len()
    }

    /// `Σ (a_i + b_i)`, which equals the number of boxes.
    pub fn total(&self) -> i64 {
        self.a.iter().chain(&self.b).map(|h| h.numerator()).sum::<i64>() / 2
    }
}

/// A point `ω = (α, β)` of the Thoma set, holding only the nonzero-tail prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct ThomaPoint<T> {
    alpha: Vec<T>,
    beta: Vec<T>,
}

impl<T: Scalar> ThomaPoint<T> {
    /// Validates monotonicity, nonnegativity and `Σα + Σβ ≤ 1`
    /// (exact for rationals, within 1e-12 for floats).
    pub fn new(alpha: Vec<T>, beta: Vec<T>) -> Result<Self> {
        for (name, seq) in [("alpha", &alpha), ("beta", &beta)] {
            if seq.iter().any(|v| *v < T::zero()) {
                return invalid(format!("{name} has a negative coordinate"));
            }
            if seq.windows(2).any(|w| w[0] < w[1]) {
                return invalid(format!("{name} is not weakly decreasing"));
            }
        }
        let p = ThomaPoint { alpha, beta };
        if p.deficiency() < -T::constraint_slack() {
            return invalid("coordinates sum to more than 1");
        }
        Ok(p)
    }

    /// `((1), ())`: the trivial character.
    pub fn trivial() -> Self {
        ThomaPoint { alpha: vec![T::one()], beta: vec![] }
    }

    /// `((), (1))`: the sign character.
    pub fn sign() -> Self {
        ThomaPoint { alpha: vec![], beta: vec![T::one()] }
    }

    /// `(0, 0)`: the delta function at the identity.
    pub fn origin() -> Self {
        ThomaPoint { alpha: vec![], beta: vec![] }
    }

    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    pub fn beta(&self) -> &[T] {
        &self.beta
    }

    /// `1 - Σα - Σβ`.
    pub fn deficiency(&self) -> T {
        self.alpha
            .iter()
            .chain(&self.beta)
            .fold(T::one(), |acc, v| acc - v.clone())
    }

    /// The point `(β, α)`.
    pub fn swapped(&self) -> Self {
        ThomaPoint { alpha: self.beta.clone(), beta: self.alpha.clone() }
    }

    pub fn to_f64(&self) -> ThomaPoint<f64> {
        ThomaPoint {
            alpha: self.alpha.iter().map(Scalar::to_f64).collect(),
            beta: self.beta.iter().map(Scalar::to_f64).collect(),
        }
    }
}

/// `λ ↦ ω_λ = (a/n, b/n)` in exact arithmetic.
pub fn thoma_embed(lambda: &Partition) -> Result<ThomaPoint<Rational>> {
    thoma_embed_in(lambda)
}

/// Floating version of [`thoma_embed`].
pub fn thoma_embed_f64(lambda: &Partition) -> Result<ThomaPoint<f64>> {
    thoma_embed_in(lambda)
}

fn thoma_embed_in<T: Scalar>(lambda: &Partition) -> Result<ThomaPoint<T>> {
    let n = lambda.size();
    if n == 0 {
        return domain("the empty diagram has no Thoma point (n = 0)");
    }
    let fr = lambda.frobenius();
    let scale = |h: &HalfInt| T::from_ratio(h.numerator(), 2 * n as i64);
    Ok(ThomaPoint {
        alpha: fr.a.iter().map(scale).collect(),
        beta: fr.b.iter().map(scale).collect(),
    })
}

/// All partitions of `n` in reverse lexicographic order, capped at
/// [`DEFAULT_ENUMERATION_CAP`].
pub fn enumerate_partitions(n: usize) -> Result<Vec<Partition>> {
    enumerate_partitions_capped(n, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_partitions_capped(n: usize, cap: usize) -> Result<Vec<Partition>> {
    if n > cap {
        return Err(Error::Resource(format!(
            "enumerating partitions of {n} exceeds the cap {cap}"
        )));
    }
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    fill_partitions(n as u32, n as u32, &mut prefix, &mut out);
    Ok(out)
}

fn fill_partitions(remaining: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition::from_parts_unchecked(prefix.clone()));
        return;
    }
    for first in (1..=remaining.min(max_part)).rev() {
        prefix.push(first);
        fill_partitions(remaining - first, first, prefix, out);
        prefix.pop();
    }
}

/// Every diagram with at most `max_n` boxes, grouped by size.
pub fn enumerate_up_to(max_n: usize, cap: usize) -> Result<Vec<Vec<Partition>>> {
    (0..=max_n).map(|n| enumerate_partitions_capped(n, cap)).collect()
}

/// p(n) from Euler's pentagonal recurrence.
pub fn partition_count(n: usize) -> BigUint {
    let mut table: Vec<num_bigint::BigInt> = vec![num_bigint::BigInt::zero(); n + 1];
    table[0] = num_bigint::BigInt::one();
    for i in 1..=n {
        let mut sum = num_bigint::BigInt::zero();
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > i {
                break;
            }
            let term = &table[i - g1]
                + if k * (3 * k + 1) / 2 <= i { table[i - k * (3 * k + 1) / 2].clone() } else { num_bigint::BigInt::zero() };
            if k % 2 == 1 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        table[i] = sum;
    }
    table[n].to_biguint().unwrap_or_default()
}

/// Number of standard Young tableaux, `n! / Π hooks`.
pub fn dimension(lambda: &Partition) -> BigUint {
    let fact = (1..=lambda.size() as u64).fold(BigUint::one(), |acc, k| acc * k);
    fact / lambda.hook_product()
}

/// Exact dimension for small diagrams, `ln dim` above [`EXACT_DIMENSION_MAX`].
#[derive(Debug, Clone, PartialEq)]
pub enum DimensionValue {
    Exact(BigUint),
    Log(f64),
}

impl DimensionValue {
    pub fn ln(&self) -> f64 {
        match self {
            DimensionValue::Exact(v) => ln_biguint(v),
            DimensionValue::Log(l) => *l,
        }
    }
}

pub fn dimension_auto(lambda: &Partition) -> DimensionValue {
    if lambda.size() <= EXACT_DIMENSION_MAX {
        DimensionValue::Exact(dimension(lambda))
    } else {
        DimensionValue::Log(log_dimension(lambda))
    }
}

/// `ln dim λ` computed in floating point from the hook-length formula.
pub fn log_dimension(lambda: &Partition) -> f64 {
    let ln_fact: f64 = (2..=lambda.size()).map(|k| (k as f64).ln()).sum();
    let ln_hooks: f64 = lambda.box_data().iter().map(|b| (b.hook as f64).ln()).sum();
    ln_fact - ln_hooks
}

fn ln_biguint(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits < 1000 {
        if let Some(f) = v.to_f64() {
            return f.ln();
        }
    }
    let shift = bits - 64;
    (v >> shift).to_f64().unwrap_or(1.0).ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_partitions(0).unwrap(), vec![Partition::empty()]);
        assert_eq!(enumerate_partitions(5).unwrap().len(), 7);
        assert_eq!(enumerate_partitions(30).unwrap().len(), 5604);
    }

    #[test]
    fn enumeration_is_reverse_lexicographic() {
        let all = enumerate_partitions(5).unwrap();
        let shown: Vec<String> = all.iter().map(|l| l.to_string()).collect();
        assert_eq!(shown, ["5", "4,1", "3,2", "3,1,1", "2,2,1", "2,1,1,1", "1,1,1,1,1"]);
        assert!(all.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn enumeration_cap() {
        assert!(matches!(enumerate_partitions(61), Err(Error::Resource(_))));
        assert!(enumerate_partitions_capped(10, 9).is_err());
    }

    #[test]
    fn dimensions() {
        assert_eq!(dimension(&Partition::row(7)), BigUint::one());
        assert_eq!(dimension(&p(&[2, 1])), BigUint::from(2u32));
        assert_eq!(dimension(&p(&[3, 2])), BigUint::from(5u32));
        assert_eq!(dimension(&Partition::empty()), BigUint::one());
        let l = p(&[5, 3, 2, 2, 1]);
        assert!((dimension_auto(&l).ln() - log_dimension(&l)).abs() < 1e-10);
        assert!(matches!(dimension_auto(&Partition::row(151)), DimensionValue::Log(v) if v.abs() < 1e-9));
    }

    #[test]
    fn transpose_examples() {
        assert_eq!(p(&[3, 1]).transpose(), p(&[2, 1, 1]));
        assert_eq!(Partition::empty().transpose(), Partition::empty());
    }

    #[test]
    fn frobenius_examples() {
        let f = p(&[3, 1]).frobenius();
        assert_eq!(f.a, vec![HalfInt::from_numerator(5)]);
        assert_eq!(f.b, vec![HalfInt::from_numerator(3)]);
        assert_eq!(f.total(), 4);
        let f = p(&[1]).frobenius();
        assert_eq!((f.a[0].numerator(), f.b[0].numerator()), (1, 1));
        let f = p(&[2, 1]).frobenius();
        assert_eq!((f.a[0].numerator(), f.b[0].numerator()), (3, 3));
        assert_eq!(Partition::empty().frobenius().d(), 0);
    }

    #[test]
    fn thoma_embed_examples() {
        let w = thoma_embed(&p(&[1])).unwrap();
        assert_eq!(w.alpha(), &[Rational::from_ratio(1, 2)]);
        assert_eq!(w.beta(), &[Rational::from_ratio(1, 2)]);
        assert!(w.deficiency().is_zero());
        let n = 9;
        let w = thoma_embed(&Partition::row(n)).unwrap();
        assert_eq!(w.alpha(), &[Rational::from_ratio(2 * n as i64 - 1, 2 * n as i64)]);
        assert_eq!(w.beta(), &[Rational::from_ratio(1, 2 * n as i64)]);
        assert!(matches!(thoma_embed(&Partition::empty()), Err(Error::Domain(_))));
    }

    #[test]
    fn box_data_examples() {
        let c: Vec<i64> = p(&[2]).box_data().iter().map(|b| b.content).collect();
        assert_eq!(c, vec![0, 1]);
        let c: Vec<i64> = p(&[1, 1]).box_data().iter().map(|b| b.content).collect();
        assert_eq!(c, vec![0, -1]);
        let mut hooks: Vec<u32> = p(&[2, 2]).box_data().iter().map(|b| b.hook).collect();
        hooks.sort();
        assert_eq!(hooks, vec![1, 2, 2, 3]);
        assert_eq!(p(&[2, 2]).hook_product(), BigUint::from(12u32));
        assert_eq!(dimension(&p(&[2, 2])), BigUint::from(2u32));
    }

    #[test]
    fn addable_removable_examples() {
        let (a, r) = Partition::empty().addable_removable();
        assert_eq!(a, vec![(1, 1)]);
        assert!(r.is_empty());
        let (a, r) = p(&[2, 1]).addable_removable();
        assert_eq!(a, vec![(1, 3), (2, 2), (3, 1)]);
        assert_eq!(r, vec![(1, 2), (2, 1)]);
    }

    #[test]
    fn add_remove_boxes() {
        let l = p(&[2, 1]);
        assert_eq!(l.add_box(1), Some(p(&[3, 1])));
        assert_eq!(l.add_box(2), Some(p(&[2, 2])));
        assert_eq!(l.add_box(3), Some(p(&[2, 1, 1])));
        assert_eq!(l.add_box(4), None);
        assert_eq!(p(&[2, 2]).add_box(2), None);
        assert_eq!(l.remove_box(2), Some(p(&[2])));
        assert_eq!(p(&[2, 2]).remove_box(1), None);
    }

    #[test]
    fn serialization() {
        assert_eq!(p(&[3, 1]).to_string(), "3,1");
        assert_eq!(Partition::empty().to_string(), "-");
        assert_eq!("3,1".parse::<Partition>().unwrap(), p(&[3, 1]));
        assert_eq!("-".parse::<Partition>().unwrap(), Partition::empty());
        assert!("1,3".parse::<Partition>().is_err());
        assert!("1,x".parse::<Partition>().is_err());
        assert_eq!("-3/2".parse::<HalfInt>().unwrap(), HalfInt::from_numerator(-3));
        assert_eq!("2.5".parse::<HalfInt>().unwrap(), HalfInt::from_numerator(5));
        assert_eq!(HalfInt::from_numerator(-3).to_string(), "-3/2");
    }

    #[test]
    fn thoma_point_validation() {
        assert!(ThomaPoint::new(vec![0.5, 0.6], vec![]).is_err());
        assert!(ThomaPoint::new(vec![0.6, 0.5], vec![]).is_err());
        assert!(ThomaPoint::new(vec![0.5], vec![-0.1]).is_err());
        assert!(ThomaPoint::new(vec![0.5], vec![0.5 + 1e-13]).is_ok());
        let r = |a, b| Rational::from_ratio(a, b);
        assert!(ThomaPoint::new(vec![r(1, 2)], vec![r(1, 2) + r(1, 1_000_000_000_000)]).is_err());
        assert_eq!(ThomaPoint::<f64>::origin().deficiency(), 1.0);
    }

    #[test]
    fn pentagonal_count() {
        assert_eq!(partition_count(30), BigUint::from(5604u32));
        assert_eq!(partition_count(60), BigUint::from(966467u32));
    }
}
