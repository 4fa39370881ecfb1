//! Finite symmetric groups, the canonical projection `S(n) → S(n-1)`,
//! virtual-permutation coordinates and the cycle-count cocycle.
//!
//! Ground sets are `{1..n}` in the API and in serialized cycle notation;
//! storage is 0-based.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use rand::Rng;

use crate::error::{domain, invalid, Error, Result};
use crate::partitions::Partition;

/// How far `cocycle` may raise the level while looking for two agreeing levels.
pub const COCYCLE_LEVEL_SLACK: usize = 16;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n as u32).collect() }
    }

    /// From 1-based images: `images[k] = σ(k+1)`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in images {
            if v == 0 || v > n || seen[v - 1] {
                return invalid(format!("{images:?} is not a permutation of 1..{n}"));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { images: images.iter().map(|&v| v as u32 - 1).collect() })
    }

    /// Builds a permutation of `{1..n}` from disjoint cycles (1-based).
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<u32> = (0..n as u32).collect();
        let mut seen = vec![false; n];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                if a == 0 || a > n || seen[a - 1] {
                    return invalid(format!("bad cycle {cycle:?} for degree {n}"));
                }
                seen[a - 1] = true;
                let b = cycle[(k + 1) % cycle.len()];
                images[a - 1] = b as u32 - 1;
            }
        }
        Ok(Permutation { images })
    }

    /// The transposition `(a b)` in `S(n)`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        if a == b {
            return invalid("transposition needs two distinct points");
        }
        Self::from_cycles(n, &[vec![a, b]])
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// `σ(i)` for 1-based `i`; points beyond the degree are fixed.
    pub fn apply(&self, i: usize) -> usize {
        match self.images.get(i.wrapping_sub(1)) {
            Some(&v) => v as usize + 1,
            None => i,
        }
    }

    /// 1-based image list.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&v| v as usize + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    /// The same permutation viewed in `S(n)`, `n ≥ degree`, by adding fixed points.
    pub fn extended(&self, n: usize) -> Permutation {
        let mut images = self.images.clone();
        images.extend(self.images.len() as u32..n.max(self.images.len()) as u32);
        Permutation { images }
    }

    /// `self ∘ other` (apply `other` first). Unequal degrees are padded with fixed points.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        let n = self.degree().max(other.degree());
        let a = self.extended(n);
        let b = other.extended(n);
        Permutation { images: b.images.iter().map(|&k| a.images[k as usize]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    /// Disjoint cycles, each starting at its smallest element, including fixed points.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                cycle.push(k + 1);
                k = self.images[k] as usize;
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_stats(&self) -> CycleStats {
        let mut counts = vec![0u32; self.degree() + 1];
        for c in self.cycles() {
            counts[c.len()] += 1;
        }
        CycleStats { counts }
    }

    /// Number of cycles `[σ]_n`, fixed points included.
    pub fn num_cycles(&self) -> usize {
        self.cycles().len()
    }

    pub fn sign(&self) -> i32 {
        if (self.degree() - self.num_cycles()) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Canonical projection `p_n`: remove `n` from the cycle containing it.
    pub fn canonical_projection(&self) -> Result<Permutation> {
        let n = self.degree();
        if n < 2 {
            return domain("canonical projection needs n ≥ 2");
        }
        let last = (n - 1) as u32;
        let mut images = self.images.clone();
        let j = images[n - 1];
        if j != last {
            let i = images.iter().position(|&v| v == last).expect("bijection");
            images[i] = j;
        }
        images.pop();
        Ok(Permutation { images })
    }

    /// Uniformly random element of `S(n)`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
        let mut images: Vec<u32> = (0..n as u32).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            images.swap(i, j);
        }
        Permutation { images }
    }
}

impl Mul for &Permutation {
    type Output = Permutation;

    fn mul(self, rhs: &Permutation) -> Permutation {
        self.compose(rhs)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.images.is_empty() {
            return f.write_str("()");
        }
        for c in self.cycles() {
            let parts: Vec<String> = c.iter().map(usize::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Parses cycle notation such as `(1 2)(3)`. The degree is the largest point.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad cycle notation '{s}'"));
        let mut cycles = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(bad)?;
            let end = body.find(')').ok_or_else(bad)?;
            let cycle = body[..end]
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = body[end + 1..].trim_start();
        }
        let n = cycles.iter().flatten().copied().max().unwrap_or(0);
        Permutation::from_cycles(n, &cycles)
    }
}

/// Cycle counts `m_k` of a permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleStats {
    counts: Vec<u32>,
}

impl CycleStats {
    /// Builds statistics from a cycle type (all cycle lengths, 1s included).
    pub fn from_cycle_type(cycle_type: &Partition) -> Self {
        let max = cycle_type.parts().first().copied().unwrap_or(0) as usize;
        let mut counts = vec![0u32; max + 1];
        for &p in cycle_type.parts() {
            counts[p as usize] += 1;
        }
        CycleStats { counts }
    }

    /// Number of `k`-cycles.
    pub fn m(&self, k: usize) -> u32 {
        self.counts.get(k).copied().unwrap_or(0)
    }

    /// Total number of cycles `Σ m_k`.
    pub fn num_cycles(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }

    /// `Σ k m_k`.
    pub fn degree(&self) -> usize {
        self.counts.iter().enumerate().map(|(k, &c)| k * c as usize).sum()
    }

    pub fn max_len(&self) -> usize {
        self.counts.iter().rposition(|&c| c > 0).unwrap_or(0)
    }

    /// Lengths of the cycles of length ≥ 2, weakly decreasing.
    pub fn nontrivial_type(&self) -> Partition {
        let mut parts = Vec::new();
        for k in (2..self.counts.len()).rev() {
            parts.extend(std::iter::repeat_n(k as u32, self.counts[k] as usize));
        }
        Partition::from_parts_unchecked(parts)
    }

    /// The full cycle type, fixed points included.
    pub fn cycle_type(&self) -> Partition {
        let mut parts = Vec::new();
        for k in (1..self.counts.len()).rev() {
            parts.extend(std::iter::repeat_n(k as u32, self.counts[k] as usize));
        }
        Partition::from_parts_unchecked(parts)
    }
}

/// A finite level `x_n` of a virtual permutation, in coordinates
/// `(i_1, …, i_n)` with `i_m ∈ {0, …, m-1}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct VirtualPermutationPrefix {
    coords: Vec<u32>,
}

impl VirtualPermutationPrefix {
    pub fn new(coords: Vec<u32>) -> Result<Self> {
        for (m, &i) in coords.iter().enumerate() {
            if i as usize > m {
                return invalid(format!("coordinate i_{} = {i} is out of range 0..{}", m + 1, m));
            }
        }
        Ok(VirtualPermutationPrefix { coords })
    }

    pub fn identity(level: usize) -> Self {
        VirtualPermutationPrefix { coords: vec![0; level] }
    }

    /// Coordinates of `σ ∈ S(n)`: `i_m = 0` if `x_m(m) = m`, else `i_m = x_m(m)`.
    pub fn from_permutation(sigma: &Permutation) -> Self {
        let n = sigma.degree();
        let mut coords = vec![0u32; n];
        let mut cur = sigma.clone();
        for m in (1..=n).rev() {
            let img = cur.apply(m);
            coords[m - 1] = if img == m { 0 } else { img as u32 };
            if m >= 2 {
                cur = cur.canonical_projection().expect("m ≥ 2");
            }
        }
        VirtualPermutationPrefix { coords }
    }

    /// Rebuilds `x_n ∈ S(n)` level by level, inserting `m` after `x_{m-1}^{-1}(i_m)`.
    pub fn to_permutation(&self) -> Permutation {
        let n = self.coords.len();
        let mut images: Vec<u32> = Vec::with_capacity(n);
        let mut inverse: Vec<u32> = Vec::with_capacity(n);
        for m in 1..=n {
            let new = (m - 1) as u32;
            let i_m = self.coords[m - 1];
            if i_m == 0 {
                images.push(new);
                inverse.push(new);
            } else {
                let j = i_m - 1;
                let pre = inverse[j as usize];
                images[pre as usize] = new;
                images.push(j);
                inverse[j as usize] = new;
                inverse.push(pre);
            }
        }
        Permutation { images }
    }

    pub fn level(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    /// Number of zero coordinates, equal to the number of cycles of `x_n`.
    pub fn num_cycles(&self) -> usize {
        self.coords.iter().filter(|&&i| i == 0).count()
    }

    /// The prefix at a lower level (the canonical projection in coordinates).
    pub fn truncated(&self, level: usize) -> Self {
        VirtualPermutationPrefix { coords: self.coords[..level.min(self.level())].to_vec() }
    }

    /// One-step canonical projection.
    pub fn projected(&self) -> Result<Self> {
        if self.level() < 2 {
            return domain("canonical projection needs level ≥ 2");
        }
        Ok(self.truncated(self.level() - 1))
    }

    /// Extends to a higher level by fixed points (zero coordinates).
    pub fn extended(&self, level: usize) -> Self {
        let mut coords = self.coords.clone();
        coords.resize(level.max(self.level()), 0);
        VirtualPermutationPrefix { coords }
    }

    /// Right action `x · g = g₂⁻¹ x g₁` at the current level.
    pub fn act(&self, g: &BisymmetricElement) -> Result<Self> {
        if self.level() < g.degree() {
            return domain(format!(
                "level {} is below the degree {} of the group element",
                self.level(),
                g.degree()
            ));
        }
        let x = self.to_permutation();
        Ok(Self::from_permutation(&g.act_on(&x)))
    }

    /// The stable value `c(x, g) = [x_n·g]_n − [x_n]_n`.
    pub fn cocycle(&self, g: &BisymmetricElement) -> Result<i64> {
        let n = self.level();
        if n < g.degree() {
            return domain(format!("level {n} is below the degree {} of g", g.degree()));
        }
        let at = |level: usize| -> i64 {
            let x = self.extended(level).to_permutation();
            g.act_on(&x).num_cycles() as i64 - x.num_cycles() as i64
        };
        let mut prev = at(n);
        for level in n + 1..=n + COCYCLE_LEVEL_SLACK {
            let cur = at(level);
            if cur == prev {
                return Ok(cur);
            }
            prev = cur;
        }
        Err(Error::Numerical(format!("cocycle did not stabilize by level {}", n + COCYCLE_LEVEL_SLACK)))
    }
}

impl fmt::Display for VirtualPermutationPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for VirtualPermutationPrefix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coords = s
            .split_whitespace()
            .map(|t| t.parse::<u32>().map_err(|_| Error::Parse(format!("bad coordinates '{s}'"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(coords)
    }
}

/// An element `g = (g₁, g₂)` of `S(m) × S(m)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BisymmetricElement {
    pub g1: Permutation,
    pub g2: Permutation,
}

impl BisymmetricElement {
    pub fn new(g1: Permutation, g2: Permutation) -> Self {
        let m = g1.degree().max(g2.degree());
        BisymmetricElement { g1: g1.extended(m), g2: g2.extended(m) }
    }

    /// The diagonal element `(k, k)` of `K`.
    pub fn diagonal(k: Permutation) -> Self {
        BisymmetricElement { g1: k.clone(), g2: k }
    }

    pub fn identity(m: usize) -> Self {
        Self::diagonal(Permutation::identity(m))
    }

    pub fn degree(&self) -> usize {
        self.g1.degree()
    }

    /// Componentwise product `gh = (g₁h₁, g₂h₂)`.
    pub fn compose(&self, h: &BisymmetricElement) -> BisymmetricElement {
        BisymmetricElement::new(self.g1.compose(&h.g1), self.g2.compose(&h.g2))
    }

    /// `g₂⁻¹ x g₁` for a permutation of degree at least `degree()`.
    pub fn act_on(&self, x: &Permutation) -> Permutation {
        let n = x.degree().max(self.degree());
        let g1 = self.g1.extended(n);
        let g2_inv = self.g2.inverse().extended(n);
        g2_inv.compose(&x.extended(n)).compose(&g1)
    }

    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        BisymmetricElement { g1: Permutation::random(m, rng), g2: Permutation::random(m, rng) }
    }
}

/// All elements of `S(n)` in lexicographic order of their image lists.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut cur: Vec<u32> = (0..n as u32).collect();
    let mut out = vec![Permutation { images: cur.clone() }];
    loop {
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
        cur.swap(i, j);
        cur[i + 1..].reverse();
        out.push(Permutation { images: cur.clone() });
    }
}

/// Uniformly random prefix at the given level.
pub fn random_prefix<R: Rng + ?Sized>(level: usize, rng: &mut R) -> VirtualPermutationPrefix {
    VirtualPermutationPrefix {
        coords: (1..=level as u32).map(|m| rng.random_range(0..m)).collect(),
    }
}
