//! End-to-end scaling-limit experiments.
//!
//! Diagrams drawn from `P_z^(n)` are mapped to Thoma points, then to
//! configurations on `ℝ*`, then lifted by an independent `Gamma(t, 1)` factor.
//! The binned one-point density of the result is compared with the diagonal of
//! the Whittaker kernel. The mixed route skips the Thoma step: a diagram drawn
//! from the mixed measure at `ξ` is read as a lattice configuration and scaled
//! by `1 − ξ`.

use rayon::prelude::*;

use crate::error::{domain, invalid, Result};
use crate::partitions::{thoma_embed_f64, Partition};
use crate::pointproc::{lift, thoma_to_config, uniform_bins, Bin, CorrelationAccumulator, PointConfiguration, Support};
use crate::rng::substream;
use crate::special::{q_of_z, SpectralParam, WhittakerKernel};
use crate::stats::Moments;
use crate::zmeasure::{lattice_config, scaled_config, sample_mixed, GrowthSampler, ZParams};

/// Samples per random substream. Fixed so results do not depend on the thread count.
pub const CHUNK: usize = 64;

/// Largest diagram size accepted by the growth route.
pub const MAX_GROWTH_N: usize = 100_000;

pub const MAX_SAMPLES: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Route {
    /// `λ ~ P_z^(n)`, Thoma embedding, Gamma lifting.
    Growth { n: usize },
    /// `λ ~ P̃_{z,ξ}`, lattice configuration scaled by `1 − ξ`.
    Mixed { xi: f64 },
}

/// Uniform bins on a negative and a positive interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinLayout {
    pub negative: (f64, f64, usize),
    pub positive: (f64, f64, usize),
}

impl Default for BinLayout {
    fn default() -> Self {
        BinLayout { negative: (-3.0, -0.05, 15), positive: (0.05, 5.0, 25) }
    }
}

impl BinLayout {
    pub fn bins(&self) -> Result<Vec<Bin>> {
        let (nl, nh, nc) = self.negative;
        let (pl, ph, pc) = self.positive;
        if !(nh <= 0.0 && pl >= 0.0) {
            return invalid("negative bins must lie left of 0 and positive bins right of it");
        }
        let mut bins = if nc > 0 { uniform_bins(nl, nh, nc)? } else { Vec::new() };
        if pc > 0 {
            bins.extend(uniform_bins(pl, ph, pc)?);
        }
        if bins.is_empty() {
            return invalid("no bins requested");
        }
        Ok(bins)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentSpec {
    pub z: SpectralParam,
    pub route: Route,
    pub samples: usize,
    pub seed: u64,
    pub bins: BinLayout,
}

/// Thresholds of the per-bin verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub sigma: f64,
    pub sigma_min_hits: u64,
    pub relative: f64,
    pub relative_min_hits: u64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { sigma: 3.0, sigma_min_hits: 500, relative: 0.05, relative_min_hits: 2000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinComparison {
    pub bin: Bin,
    pub hits: u64,
    pub density: f64,
    pub std_error: f64,
    /// Bin average of `K(x, x)`.
    pub predicted: f64,
}

impl BinComparison {
    /// Deviation in standard errors (infinite if the error estimate is 0 and
    /// the values differ).
    pub fn sigma(&self) -> f64 {
        let d = (self.density - self.predicted).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }

    pub fn relative_error(&self) -> f64 {
        (self.density - self.predicted).abs() / self.predicted.abs()
    }

    pub fn passes(&self, tol: &Tolerances) -> bool {
        let sigma_ok = self.hits < tol.sigma_min_hits || self.sigma() <= tol.sigma;
        let rel_ok = self.hits < tol.relative_min_hits || self.relative_error() <= tol.relative;
        sigma_ok && rel_ok
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub spec: ExperimentSpec,
    pub bins: Vec<BinComparison>,
    /// `p₂(ω_λ)` over the sampled diagrams (growth route only).
    pub p2: Option<Moments>,
}

impl ExperimentReport {
    pub fn failures(&self, tol: &Tolerances) -> Vec<&BinComparison> {
        self.bins.iter().filter(|b| !b.passes(tol)).collect()
    }

    pub fn passes(&self, tol: &Tolerances) -> bool {
        self.failures(tol).is_empty()
    }

    /// Largest deviation in standard errors over bins with enough hits.
    pub fn max_sigma(&self, min_hits: u64) -> f64 {
        self.bins.iter().filter(|b| b.hits >= min_hits).map(|b| b.sigma()).fold(0.0, f64::max)
    }
}

/// The limit value `(z + z̄)/(|z|² + 1)` of `E p₂(ω_λ)`.
///
/// At finite `n` the mean is exactly `(n − 1)/n` times this.
pub fn p2_limit(z: SpectralParam) -> f64 {
    2.0 * z.a / (z.t() + 1.0)
}

/// Draws one configuration of the route.
fn draw(z: &ZParams<f64>, t: f64, route: Route, sampler: &mut GrowthSampler, rng: &mut crate::rng::SimRng) -> Result<(PointConfiguration, Option<f64>)> {
    match route {
        Route::Growth { n } => {
            let lambda = sampler.sample(n, rng).to_partition();
            let omega = thoma_embed_f64(&lambda)?;
            let p2 = crate::characters::p_k(&omega, 2)?;
            Ok((lift(&thoma_to_config(&omega), t, rng)?, Some(p2)))
        }
        Route::Mixed { xi } => {
            let lambda: Partition = sample_mixed(z, xi, rng)?;
            Ok((scaled_config(&lattice_config(&lambda), xi)?, None))
        }
    }
}

pub fn validate(spec: &ExperimentSpec) -> Result<()> {
    if spec.samples == 0 || spec.samples > MAX_SAMPLES {
        return domain(format!("sample count must be in 1..={MAX_SAMPLES}"));
    }
    match spec.route {
        Route::Growth { n } if n == 0 || n > MAX_GROWTH_N => domain(format!("n must be in 1..={MAX_GROWTH_N}")),
        Route::Mixed { xi } if !(xi > 0.0 && xi < 1.0) => domain("ξ must lie in (0, 1)"),
        _ => Ok(()),
    }
}

/// Binned lifted one-point density against `K(x, x)`.
pub fn main_theorem_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    validate(spec)?;
    let bins = spec.bins.bins()?;
    let z = ZParams::new(spec.z.a, spec.z.b);
    let t = spec.z.t();
    let chunks = spec.samples.div_ceil(CHUNK);
    let support = Support::Bins(bins.clone());
    let parts: Vec<Result<(CorrelationAccumulator, Moments)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(spec.seed, c as u64);
            let mut sampler = GrowthSampler::new(z.clone())?;
            let mut acc = CorrelationAccumulator::new(1, support.clone())?;
            let mut p2 = Moments::default();
            let count = CHUNK.min(spec.samples - c * CHUNK);
            for _ in 0..count {
                let (config, v) = draw(&z, t, spec.route, &mut sampler, &mut rng)?;
                acc.push(&config);
                if let Some(v) = v {
                    p2.push(v);
                }
            }
            Ok((acc, p2))
        })
        .collect();
    let mut acc = CorrelationAccumulator::new(1, support)?;
    let mut p2 = Moments::default();
    for part in parts {
        let (a, m) = part?;
        acc.merge(&a)?;
        p2.merge(&m);
    }
    let estimate = acc.finish(Some(spec.seed))?;
    let kernel = WhittakerKernel::new(spec.z)?;
    let densities = estimate.densities();
    let mut out = Vec::with_capacity(bins.len());
    for (i, bin) in bins.iter().enumerate() {
        let mass = kernel.diagonal_integral(bin.lo, bin.hi, 4, 8)?;
        out.push(BinComparison {
            bin: *bin,
            hits: estimate.hits[i],
            density: densities[i].0,
            std_error: densities[i].1,
            predicted: mass / bin.width(),
        });
    }
    let p2 = matches!(spec.route, Route::Growth { .. }).then_some(p2);
    Ok(ExperimentReport { spec: *spec, bins: out, p2 })
}

/// Outcome of the law-of-large-numbers trend check for `α_k^{1/k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LlnReport {
    pub k: usize,
    pub median: f64,
    pub q: f64,
    pub samples: usize,
}

impl LlnReport {
    /// Whether the median lies within a factor 2 of `q(z)`.
    pub fn within_factor_two(&self) -> bool {
        self.median > 0.5 * self.q && self.median < 2.0 * self.q
    }
}

/// Median of `(α_k)^{1/k}` over diagrams from `P_z^(n)`, next to `q(z)`.
pub fn lln_check(z: SpectralParam, n: usize, samples: usize, k: usize, seed: u64) -> Result<LlnReport> {
    if k == 0 {
        return domain("k must be at least 1");
    }
    validate(&ExperimentSpec { z, route: Route::Growth { n }, samples, seed, bins: BinLayout::default() })?;
    let zp = ZParams::new(z.a, z.b);
    let chunks = samples.div_ceil(CHUNK);
    let values: Vec<Result<Vec<f64>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, c as u64);
            let mut sampler = GrowthSampler::new(zp.clone())?;
            let count = CHUNK.min(samples - c * CHUNK);
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let omega = thoma_embed_f64(&sampler.sample(n, &mut rng).to_partition())?;
                let a = omega.alpha().get(k - 1).copied().unwrap_or(0.0);
                out.push(a.powf(1.0 / k as f64));
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::with_capacity(samples);
    for v in values {
        all.extend(v?);
    }
    all.sort_by(f64::total_cmp);
    let m = all.len();
    let median = if m % 2 == 1 { all[m / 2] } else { 0.5 * (all[m / 2 - 1] + all[m / 2]) };
    Ok(LlnReport { k, median, q: q_of_z(z)?.value(), samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(route: Route, samples: usize) -> ExperimentSpec {
        ExperimentSpec { z: SpectralParam::new(0.3, 0.2).unwrap(), route, samples, seed: 11, bins: BinLayout::default() }
    }

    #[test]
    fn reports_are_reproducible() {
        let spec = small(Route::Growth { n: 50 }, 130);
        let a = main_theorem_experiment(&spec).unwrap();
        let b = main_theorem_experiment(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.bins.len(), 40);
        assert_eq!(a.p2.unwrap().count, 130);
    }

    #[test]
    fn predicted_density_integrates_sensibly() {
        let r = main_theorem_experiment(&small(Route::Mixed { xi: 0.9 }, 10)).unwrap();
        assert!(r.p2.is_none());
        assert!(r.bins.iter().all(|b| b.predicted > 0.0 && b.predicted.is_finite()));
        // K(x, x) decreases away from 0 on both sides
        let pos: Vec<f64> = r.bins.iter().filter(|b| b.bin.lo > 0.0).map(|b| b.predicted).collect();
        assert!(pos.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn bad_specs_rejected() {
        assert!(main_theorem_experiment(&small(Route::Growth { n: 0 }, 10)).is_err());
        assert!(main_theorem_experiment(&small(Route::Mixed { xi: 1.0 }, 10)).is_err());
        assert!(main_theorem_experiment(&small(Route::Growth { n: 5 }, 0)).is_err());
    }

    #[test]
    fn verdict_thresholds() {
        let b = BinComparison { bin: Bin::new(0.1, 0.2).unwrap(), hits: 600, density: 1.1, std_error: 0.01, predicted: 1.0 };
        assert!(!b.passes(&Tolerances::default()));
        let few = BinComparison { hits: 10, ..b };
        assert!(few.passes(&Tolerances::default()));
    }
}
