//! Ewens measures `μ_t^(n)(x) = t^[x] / (t(t+1)…(t+n-1))` on `S(n)`, their
//! product structure in virtual-permutation coordinates, consistency under
//! the canonical projection, and the Radon-Nikodym property of the action.

use std::collections::HashMap;

use rand::Rng;

use crate::arith::{rising_factorial, Scalar};
use crate::error::{domain, Error, Result};
use crate::permutations::{all_permutations, BisymmetricElement, Permutation, VirtualPermutationPrefix};

/// Largest level for which exhaustive sums over `S(n)` are allowed.
pub const EXHAUSTIVE_MAX_LEVEL: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct EwensParams<T> {
    t: T,
}

impl<T: Scalar> EwensParams<T> {
    /// `t ≥ 0`; sampling additionally needs `t > 0`.
    pub fn new(t: T) -> Result<Self> {
        if t < T::zero() {
            return domain("Ewens parameter t must be nonnegative");
        }
        Ok(EwensParams { t })
    }

    pub fn t(&self) -> &T {
        &self.t
    }

    /// Weight of a permutation with `num_cycles` cycles in `S(n)`.
    ///
    /// At `t = 0` the measure is the limit: uniform on the `(n-1)!` long cycles.
    pub fn weight_by_cycles(&self, n: usize, num_cycles: usize) -> T {
        if n == 0 {
            return T::one();
        }
        if self.t == T::zero() {
            return if num_cycles == 1 {
                T::one() / rising_factorial(&T::one(), n - 1)
            } else {
                T::zero()
            };
        }
        self.t.powi(num_cycles as u32) / rising_factorial(&self.t, n)
    }

    pub fn weight(&self, sigma: &Permutation) -> T {
        self.weight_by_cycles(sigma.degree(), sigma.num_cycles())
    }

    /// Law `ν_t^(m)` of the coordinate `i_m` on `{0, …, m-1}`.
    pub fn coordinate_law(&self, m: usize) -> Result<Vec<T>> {
        if self.t <= T::zero() {
            return domain("coordinate law needs t > 0");
        }
        if m == 0 {
            return domain("coordinate index starts at 1");
        }
        let denom = self.t.clone() + T::from_i64(m as i64 - 1);
        let mut law = vec![T::one() / denom.clone(); m];
        law[0] = self.t.clone() / denom;
        Ok(law)
    }

    /// Exact law of the number of cycles: `P([x] = k) = c(n,k) t^k / (t)_n`
    /// with unsigned Stirling numbers of the first kind.
    pub fn num_cycles_law(&self, n: usize) -> Vec<T> {
        let mut stirling: Vec<T> = vec![T::one()];
        for m in 1..=n {
            let mut next = vec![T::zero(); m + 1];
            for (k, c) in stirling.iter().enumerate() {
                next[k + 1] = next[k + 1].clone() + c.clone();
                next[k] = next[k].clone() + c.clone() * T::from_i64(m as i64 - 1);
            }
            stirling = next;
        }
        stirling
            .into_iter()
            .enumerate()
            .map(|(k, c)| c * self.weight_by_cycles(n, k))
            .collect()
    }
}

/// `Σ_{x ∈ S(n)} t^[x]` by exhaustive summation.
pub fn cycle_power_sum<T: Scalar>(t: &T, n: usize) -> Result<T> {
    check_exhaustive(n)?;
    Ok(all_permutations(n)
        .iter()
        .fold(T::zero(), |acc, s| acc + t.powi(s.num_cycles() as u32)))
}

/// `μ_t^(n)` on every element of `S(n)`.
pub fn weight_table<T: Scalar>(params: &EwensParams<T>, n: usize) -> Result<Vec<(Permutation, T)>> {
    check_exhaustive(n)?;
    Ok(all_permutations(n)
        .into_iter()
        .map(|s| {
            let w = params.weight(&s);
            (s, w)
        })
        .collect())
}

/// True iff the pushforward of `upper` under `p_n` equals `lower` exactly.
pub fn is_consistent<T: Scalar>(upper: &[(Permutation, T)], lower: &[(Permutation, T)]) -> bool {
    let mut pushed: HashMap<Permutation, T> = HashMap::new();
    for (x, w) in upper {
        let Ok(y) = x.canonical_projection() else {
            return false;
        };
        let slot = pushed.entry(y).or_insert_with(T::zero);
        *slot = slot.clone() + w.clone();
    }
    pushed.len() == lower.len()
        && lower.iter().all(|(y, w)| pushed.get(y).is_some_and(|v| v == w))
}

/// Exhaustive check that `μ_t^(n)` projects onto `μ_t^(n-1)`.
pub fn consistency_check<T: Scalar>(params: &EwensParams<T>, n: usize) -> Result<bool> {
    if n < 2 {
        return domain("consistency compares levels n and n-1, n ≥ 2");
    }
    Ok(is_consistent(&weight_table(params, n)?, &weight_table(params, n - 1)?))
}

/// Exhaustive check that, in coordinates, `μ_t^(n)` is the product of the `ν_t^(m)`.
pub fn product_structure_check<T: Scalar>(params: &EwensParams<T>, n: usize) -> Result<bool> {
    let laws: Vec<Vec<T>> = (1..=n).map(|m| params.coordinate_law(m)).collect::<Result<_>>()?;
    for (x, w) in weight_table(params, n)? {
        let coords = VirtualPermutationPrefix::from_permutation(&x);
        let product = coords
            .coords()
            .iter()
            .zip(&laws)
            .fold(T::one(), |acc, (&i, law)| acc * law[i as usize].clone());
        if product != w {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of a Radon-Nikodym comparison at a fixed level.
#[derive(Debug, Clone, PartialEq)]
pub struct RadonNikodym<T> {
    pub level: usize,
    pub cocycle: i64,
    /// `μ_t^(n)(x_n·g) / μ_t^(n)(x_n)`.
    pub ratio: T,
    /// `t^{c(x,g)}`.
    pub expected: T,
}

impl<T: PartialEq> RadonNikodym<T> {
    pub fn holds(&self) -> bool {
        self.ratio == self.expected
    }
}

/// Compares the measure ratio under the action with `t^{c(x,g)}`.
pub fn radon_nikodym_check<T: Scalar>(
    params: &EwensParams<T>,
    x: &VirtualPermutationPrefix,
    g: &BisymmetricElement,
) -> Result<RadonNikodym<T>> {
    if *params.t() <= T::zero() {
        return domain("Radon-Nikodym derivative needs t > 0");
    }
    let cocycle = x.cocycle(g)?;
    let level = x.level();
    let moved = x.act(g)?;
    let ratio = params.weight_by_cycles(level, moved.num_cycles())
        / params.weight_by_cycles(level, x.num_cycles());
    let expected = params.t().powi_signed(cocycle);
    Ok(RadonNikodym { level, cocycle, ratio, expected })
}

/// Draws `(i_1, …, i_n)` with independent coordinates `i_m ~ ν_t^(m)`.
pub fn sample_ewens<R: Rng + ?Sized>(t: f64, n: usize, rng: &mut R) -> Result<VirtualPermutationPrefix> {
    if !(t > 0.0 && t.is_finite()) {
        return domain("sampling needs a finite t > 0");
    }
    if n == 0 {
        return domain("sampling needs n ≥ 1");
    }
    let coords = (1..=n)
        .map(|m| {
            let r = rng.random::<f64>() * (t + (m - 1) as f64);
            if r < t {
                0
            } else {
                ((r - t).floor() as u32 + 1).min(m as u32 - 1)
            }
        })
        .collect();
    VirtualPermutationPrefix::new(coords)
}

fn check_exhaustive(n: usize) -> Result<()> {
    if n > EXHAUSTIVE_MAX_LEVEL {
        return Err(Error::Resource(format!(
            "exhaustive sums over S({n}) exceed the cap S({EXHAUSTIVE_MAX_LEVEL})"
        )));
    }
    Ok(())
}
