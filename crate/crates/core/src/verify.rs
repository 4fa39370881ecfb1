//! Verification suites shared by the command-line driver and the acceptance run.
//!
//! Each suite returns named checks with a verdict and a one-line detail.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};
use rand::Rng;

use crate::arith::{rising_factorial, Rational, Scalar};
use crate::characters::{extreme_character, gram_psd_check, sgn_twist_check, ChiZ, CycleType, DEFAULT_PSD_TOLERANCE};
use crate::error::Result;
use crate::ewens::{consistency_check, cycle_power_sum, product_structure_check, radon_nikodym_check, sample_ewens, EwensParams};
use crate::experiment::{lln_check, main_theorem_experiment, p2_limit, ExperimentReport, ExperimentSpec, Tolerances};
use crate::partitions::{enumerate_partitions, HalfInt, Partition, ThomaPoint};
use crate::permutations::{random_prefix, BisymmetricElement, Permutation};
use crate::pointproc::det_necessary_conditions;
use crate::rng::{from_seed, substream};
use crate::special::{q_of_z, resolvent_check, GridSpec, SpectralParam, WhittakerKernel};
use crate::stats::{chi_square, frequencies, total_variation};
use crate::zmeasure::{
    coherency_check, mixed_prob, sample_mixed, zmeasure_table, GrowthSampler, LatticeCorrelations, NegBinomial, ZParams,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Suite {
    pub title: String,
    pub checks: Vec<Check>,
}

impl Suite {
    fn new(title: &str) -> Self {
        Suite { title: title.to_string(), checks: Vec::new() }
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, passed, detail));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// `name: detail` of every failing check.
    pub fn failures(&self) -> Vec<String> {
        self.checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail)).collect()
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} [{}]", self.title, if self.passed() { "PASS" } else { "FAIL" })?;
        for c in &self.checks {
            writeln!(f, "  {} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

fn q(a: i64, b: i64) -> Rational {
    Rational::from_ratio(a, b)
}

/// The three exact test parameters `1/2`, `2/3`, `1 + i`.
fn exact_zs() -> Vec<(&'static str, ZParams<Rational>)> {
    vec![
        ("1/2", ZParams::real(q(1, 2))),
        ("2/3", ZParams::real(q(2, 3))),
        ("1+i", ZParams::new(q(1, 1), q(1, 1))),
    ]
}

/// Sizes for the exact suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactLimits {
    pub normalization_n: usize,
    pub coherency_n: usize,
    pub rising_n: usize,
    pub ewens_n: usize,
}

impl Default for ExactLimits {
    fn default() -> Self {
        ExactLimits { normalization_n: 30, coherency_n: 12, rising_n: 8, ewens_n: 7 }
    }
}

impl ExactLimits {
    /// One bound for everything, clipped to the exhaustive limits over `S(n)`.
    pub fn up_to(max_n: usize) -> Self {
        ExactLimits {
            normalization_n: max_n,
            coherency_n: max_n,
            rising_n: max_n.min(crate::ewens::EXHAUSTIVE_MAX_LEVEL),
            ewens_n: max_n.min(7),
        }
    }
}

/// Normalization and coherency of z-measures, `Σ t^[x]`, Ewens consistency
/// and product structure, all in exact rationals.
pub fn exact_identities(limits: ExactLimits) -> Result<Suite> {
    let mut s = Suite::new("exact identities");
    for (label, z) in exact_zs() {
        let mut bad = Vec::new();
        for n in 1..=limits.normalization_n {
            let total = zmeasure_table(&z, n, usize::MAX)?.into_iter().fold(Rational::zero(), |a, (_, p)| a + p);
            if total != Rational::one() {
                bad.push(n);
            }
        }
        s.push(format!("Σ P_z^(n) = 1, z = {label}"), bad.is_empty(), format!("n ≤ {}, failing n: {bad:?}", limits.normalization_n));
        let mut bad = Vec::new();
        for n in 1..=limits.coherency_n {
            if !coherency_check(&z, n)? {
                bad.push(n);
            }
        }
        s.push(format!("coherency, z = {label}"), bad.is_empty(), format!("n ≤ {}, failing n: {bad:?}", limits.coherency_n));
    }
    for t in [q(1, 3), q(1, 2), q(2, 1)] {
        let bad: Vec<usize> = (1..=limits.rising_n)
            .filter(|&n| cycle_power_sum(&t, n).map(|v| v != rising_factorial(&t, n)).unwrap_or(true))
            .collect();
        s.push(format!("Σ t^[x] = (t)_n, t = {t}"), bad.is_empty(), format!("n ≤ {}, failing n: {bad:?}", limits.rising_n));
    }
    for t in [q(1, 3), q(1, 1), q(5, 2)] {
        let params = EwensParams::new(t.clone())?;
        let mut bad = Vec::new();
        for n in 2..=limits.ewens_n {
            if !consistency_check(&params, n)? {
                bad.push(format!("consistency n={n}"));
            }
        }
        for n in 1..=limits.ewens_n {
            if !product_structure_check(&params, n)? {
                bad.push(format!("product n={n}"));
            }
        }
        s.push(format!("Ewens consistency and product structure, t = {t}"), bad.is_empty(), format!("n ≤ {}, failures: {bad:?}", limits.ewens_n));
    }
    Ok(s)
}

/// Cocycle additivity and the Radon-Nikodym identity on random instances.
pub fn cocycle_suite(instances: usize, level: usize, seed: u64) -> Result<Suite> {
    let mut s = Suite::new("cocycle and Radon-Nikodym");
    let mut rng = from_seed(seed);
    let params = EwensParams::new(q(2, 3))?;
    let (mut add_fail, mut rn_fail) = (0usize, 0usize);
    for _ in 0..instances {
        let x = random_prefix(level, &mut rng);
        let m = rng.random_range(1..=level.min(8));
        let g = BisymmetricElement::random(m, &mut rng);
        let h = BisymmetricElement::random(m, &mut rng);
        let lhs = x.cocycle(&g.compose(&h))?;
        let rhs = x.act(&g)?.cocycle(&h)? + x.cocycle(&g)?;
        if lhs != rhs {
            add_fail += 1;
        }
        if !radon_nikodym_check(&params, &x, &g)?.holds() {
            rn_fail += 1;
        }
    }
    s.push("c(x, gh) = c(x·g, h) + c(x, g)", add_fail == 0, format!("{add_fail} failures in {instances} at level {level}"));
    s.push("μ(x·g)/μ(x) = t^c, t = 2/3", rn_fail == 0, format!("{rn_fail} failures in {instances} at level {level}"));
    Ok(s)
}

/// Sample counts for the sampler suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerSizes {
    pub growth: usize,
    pub mixed: usize,
    pub ewens: usize,
}

impl Default for SamplerSizes {
    fn default() -> Self {
        SamplerSizes { growth: 1_000_000, mixed: 1_000_000, ewens: 200_000 }
    }
}

/// Growth and mixed samplers against exact enumeration, Ewens coordinates
/// against their laws.
pub fn sampler_suite(sizes: SamplerSizes, seed: u64) -> Result<Suite> {
    let mut s = Suite::new("sampler correctness");
    let z = ZParams::real(0.5);

    let n = 6;
    let table = zmeasure_table(&z, n, usize::MAX)?;
    let index: HashMap<Partition, usize> = table.iter().enumerate().map(|(i, (l, _))| (l.clone(), i)).collect();
    let mut counts = vec![0u64; table.len()];
    let mut rng = substream(seed, 0);
    let mut sampler = GrowthSampler::new(z.clone())?;
    for _ in 0..sizes.growth {
        counts[index[&sampler.sample(n, &mut rng).to_partition()]] += 1;
    }
    let exact: Vec<f64> = table.iter().map(|(_, p)| *p).collect();
    let tv = total_variation(&frequencies(&counts), &exact);
    s.push("growth sampler, n = 6, z = 1/2", tv < 0.005, format!("TV = {tv:.5} over {} samples", sizes.growth));

    let xi = 0.3;
    let max_n = 8;
    let mut support: Vec<Partition> = Vec::new();
    for k in 0..=max_n {
        support.extend(enumerate_partitions(k)?);
    }
    let index: HashMap<Partition, usize> = support.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
    let mut exact: Vec<f64> = support.iter().map(|l| mixed_prob(&z, xi, l)).collect::<Result<_>>()?;
    exact.push((1.0 - exact.iter().sum::<f64>()).max(0.0));
    let mut counts = vec![0u64; exact.len()];
    let mut rng = substream(seed, 1);
    for _ in 0..sizes.mixed {
        let l = sample_mixed(&z, xi, &mut rng)?;
        counts[*index.get(&l).unwrap_or(&support.len())] += 1;
    }
    let tv = total_variation(&frequencies(&counts), &exact);
    s.push("mixed sampler on diagrams of size ≤ 8, ξ = 0.3", tv < 0.01, format!("TV = {tv:.5} over {} samples", sizes.mixed));

    let nb = NegBinomial::new(z.t(), xi)?;
    let size_law: Vec<f64> = (0..=max_n).map(|k| nb.pmf(k)).chain([nb.tail_bound(max_n + 1)]).collect();
    let mut size_counts = vec![0u64; max_n + 2];
    for (l, c) in support.iter().zip(&counts) {
        size_counts[l.size()] += c;
    }
    size_counts[max_n + 1] = counts[support.len()];
    let chi = chi_square(&size_counts, &size_law, 5.0);
    s.push("mixed sampler size marginal", chi.p_value > 0.001, format!("χ² = {:.2}, dof {}, p = {:.4}", chi.statistic, chi.dof, chi.p_value));

    let (t, level) = (0.5, 6);
    let params = EwensParams::new(t)?;
    let mut coord_counts: Vec<Vec<u64>> = (1..=level).map(|m| vec![0u64; m]).collect();
    let mut rng = substream(seed, 2);
    for _ in 0..sizes.ewens {
        let x = sample_ewens(t, level, &mut rng)?;
        for (m, &i) in x.coords().iter().enumerate() {
            coord_counts[m][i as usize] += 1;
        }
    }
    for m in 2..=level {
        let chi = chi_square(&coord_counts[m - 1], &params.coordinate_law(m)?, 5.0);
        s.push(
            format!("Ewens coordinate i_{m}, t = 1/2"),
            chi.p_value > 0.001,
            format!("χ² = {:.2}, dof {}, p = {:.4}", chi.statistic, chi.dof, chi.p_value),
        );
    }
    Ok(s)
}

fn random_thoma<R: Rng + ?Sized>(rng: &mut R) -> Result<ThomaPoint<Rational>> {
    // rational masses with total at most 1, sorted within each side
    let den = 24i64;
    let mut budget = den;
    let mut draw = |k: usize| -> Vec<i64> {
        let mut v: Vec<i64> = (0..k)
            .map(|_| {
                let x = rng.random_range(0..=budget / 2);
                budget -= x;
                x
            })
            .collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    };
    let alpha = draw(3);
    let beta = draw(2);
    ThomaPoint::new(alpha.iter().map(|&a| q(a, den)).collect(), beta.iter().map(|&b| q(b, den)).collect())
}

/// `χ_z` on transpositions, `χ_z = χ_z̄`, the sgn twist and Gram positivity.
pub fn character_suite(seed: u64) -> Result<Suite> {
    let mut s = Suite::new("character identities");
    let zs = [("1/2", ZParams::real(q(1, 2))), ("1/3+2/5i", ZParams::new(q(1, 3), q(2, 5))), ("1+i", ZParams::new(q(1, 1), q(1, 1)))];
    for (label, z) in &zs {
        let expected = (z.re.clone() + z.re.clone()) / (z.t() + Rational::one());
        let bad: Vec<usize> = (2..=8)
            .filter(|&n| ChiZ::new(z.clone(), n).and_then(|c| c.value(&CycleType::transposition())).map(|v| v != expected).unwrap_or(true))
            .collect();
        s.push(format!("χ_z(transposition) = (z+z̄)/(|z|²+1), z = {label}"), bad.is_empty(), format!("n = 2..8, expected {expected}, failing n: {bad:?}"));
    }
    let z = ZParams::new(q(1, 3), q(2, 5));
    let n = 7;
    let (a, b) = (ChiZ::new(z.clone(), n)?, ChiZ::new(z.conj(), n)?);
    let classes = crate::characters::classes(n)?;
    let mismatched = classes.iter().filter(|rho| a.value(rho).ok() != b.value(rho).ok()).count();
    s.push("χ_z = χ_z̄ on every class of S(7)", mismatched == 0, format!("{mismatched} of {} classes differ", classes.len()));

    let mut rng = from_seed(seed);
    let mut omegas = vec![
        ThomaPoint::new(vec![q(1, 1)], vec![])?,
        ThomaPoint::new(vec![q(1, 2)], vec![q(1, 2)])?,
        ThomaPoint::origin(),
    ];
    for _ in 0..5 {
        omegas.push(random_thoma(&mut rng)?);
    }
    let mut bad = 0;
    for omega in &omegas {
        for n in 1..=6 {
            if !sgn_twist_check(omega, n)? {
                bad += 1;
            }
        }
    }
    s.push("χ^(α,β)·sgn = χ^(β,α)", bad == 0, format!("{} Thoma points, n ≤ 6, {bad} failures", omegas.len()));

    let elements: Vec<Permutation> = (0..20).map(|_| Permutation::random(7, &mut rng)).collect();
    let chi = ChiZ::new(ZParams::new(0.3, 0.2), 7)?;
    let g = gram_psd_check(|p| chi.at(p), &elements, DEFAULT_PSD_TOLERANCE)?;
    s.push("Gram matrix of χ_z, 20 elements of S(7)", g.is_psd(), format!("min eigenvalue {:.3e}", g.min_eigenvalue));
    let omega = random_thoma(&mut rng)?.to_f64();
    let elements: Vec<Permutation> = (0..20).map(|_| Permutation::random(6, &mut rng)).collect();
    let g = gram_psd_check(|p| Ok(extreme_character(&omega, &p.cycle_stats())), &elements, DEFAULT_PSD_TOLERANCE)?;
    s.push("Gram matrix of an extreme character, 20 elements of S(6)", g.is_psd(), format!("min eigenvalue {:.3e}", g.min_eigenvalue));
    Ok(s)
}

/// Per-bin verdicts of the two routes of the scaling-limit experiment.
pub fn main_theorem_suite(growth: &ExperimentReport, mixed: &ExperimentReport) -> Suite {
    let mut s = Suite::new("lifted one-point density vs K(x, x)");
    let tol = Tolerances::default();
    for (label, r) in [("growth route", growth), ("mixed route", mixed)] {
        let fails = r.failures(&tol);
        let checked = r.bins.iter().filter(|b| b.hits >= tol.sigma_min_hits).count();
        let detail = if fails.is_empty() {
            format!("{checked} bins with ≥ {} hits, max {:.2} SE", tol.sigma_min_hits, r.max_sigma(tol.sigma_min_hits))
        } else {
            let f = fails[0];
            format!("{} failing bins; first [{:.3}, {:.3}): {:.4} vs {:.4} ({:.2} SE)", fails.len(), f.bin.lo, f.bin.hi, f.density, f.predicted, f.sigma())
        };
        s.push(label, fails.is_empty() && checked > 0, detail);
    }
    s
}

/// `E p₂(ω_λ)` against `(z+z̄)/(|z|²+1)` within 3 standard errors.
pub fn spectral_identity_suite(growth: &ExperimentReport) -> Suite {
    let mut s = Suite::new("E p₂(ω_λ) = (z+z̄)/(|z|²+1)");
    match growth.p2 {
        Some(m) => {
            let target = p2_limit(growth.spec.z);
            let se = m.std_error();
            let dev = (m.mean - target).abs() / se;
            s.push("mean of p₂", dev <= 3.0, format!("{:.5} ± {:.5} vs {:.5} ({dev:.2} SE, {} samples)", m.mean, se, target, m.count));
        }
        None => s.push("mean of p₂", false, "no growth-route samples"),
    }
    s
}

/// The discrete resolvent against the kernel at two resolutions.
pub fn operator_suite(z: SpectralParam, coarse: usize, fine: usize) -> Result<Suite> {
    let mut s = Suite::new("K = L(1 + L)^{-1}");
    let window = (0.1, 5.0);
    let a = resolvent_check(z, &GridSpec::with_nodes(coarse), window)?;
    let b = resolvent_check(z, &GridSpec::with_nodes(fine), window)?;
    s.push(format!("{coarse}-node grid"), a.deviation < 1e-2, format!("max deviation {:.3e}, cond {:.2}", a.deviation, a.condition));
    s.push(
        format!("refinement to {fine} nodes"),
        b.deviation < a.deviation,
        format!("max deviation {:.3e} (ratio {:.1})", b.deviation, a.deviation / b.deviation),
    );
    Ok(s)
}

/// Two formulas for `q(z)` and the trend of `α_k^{1/k}`.
pub fn q_suite(seed: u64, lln_n: usize, lln_samples: usize) -> Result<Suite> {
    let mut s = Suite::new("q(z)");
    let mut rng = from_seed(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let b = rng.random_range(0.1..3.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
        let a = rng.random_range(-2.0..2.0);
        worst = worst.max(q_of_z(SpectralParam::new(a, b)?)?.discrepancy().unwrap_or(f64::INFINITY));
    }
    s.push("cotangent and lattice-sum forms agree", worst < 1e-10, format!("max discrepancy {worst:.2e} over 100 z"));
    let half = q_of_z(SpectralParam::new(0.5, 0.0)?)?.value();
    let err = (half - (-std::f64::consts::PI.powi(2)).exp()).abs();
    s.push("q(1/2) = exp(−π²)", err < 1e-12, format!("error {err:.2e}"));
    let lln = lln_check(SpectralParam::new(0.5, 0.0)?, lln_n, lln_samples, 8, seed)?;
    s.push(
        "median α_8^{1/8} within a factor 2 of q(1/2)",
        lln.within_factor_two(),
        format!("median {:.3e} vs q = {:.3e} (n = {lln_n}, {lln_samples} samples)", lln.median, lln.q),
    );
    Ok(s)
}

/// Sign conditions and the triple identity for lattice correlations.
pub fn lattice_suite() -> Result<Suite> {
    let mut s = Suite::new("lattice determinantality witness");
    let points: Vec<HalfInt> = [-5, -3, -1, 1, 3, 5].iter().map(|&k| HalfInt::from_numerator(k)).collect();
    let table = LatticeCorrelations::compute(&ZParams::real(0.5), 0.3, &points, 1e-12)?;
    let report = det_necessary_conditions(&table, &points, 1e-12)?;
    let worst = report.triples.iter().map(|c| c.value.abs()).fold(0.0, f64::max);
    s.push(
        "pairs and triples on {±1/2, ±3/2, ±5/2}",
        report.passed(),
        format!(
            "{} pairs, {} triples, {} failures, max |triple residual| {worst:.2e}, tail {:.1e}",
            report.pairs.len(),
            report.triples.len(),
            report.failures(),
            table.tail_bound()
        ),
    );
    Ok(s)
}

/// `z = 1` support, the Plancherel limit, J-symmetry of the kernel.
pub fn degeneracy_suite(seed: u64, one_row_samples: usize) -> Result<Suite> {
    let mut s = Suite::new("degeneracies");
    let mut rng = substream(seed, 0);
    let mut sampler = GrowthSampler::new(ZParams::real(1.0))?;
    let n = 20;
    let violations = (0..one_row_samples).filter(|_| sampler.sample(n, &mut rng).to_partition().len() > 1).count();
    s.push("z = 1 growth samples are one-row", violations == 0, format!("{violations} violations in {one_row_samples} samples at n = {n}"));

    let dev = crate::zmeasure::plancherel_limit_check(6, &ZParams::real(1e4))?;
    s.push("Plancherel limit at z = 10⁴, n = 6", dev < 1e-6, format!("max |P_z − Plancherel| = {dev:.3e}"));

    let z = SpectralParam::new(0.3, 0.2)?;
    let kernel = WhittakerKernel::new(z)?;
    let mut rng = substream(seed, 1);
    let pick = |rng: &mut crate::rng::SimRng| {
        let x: f64 = rng.random_range(0.05..5.0);
        if rng.random::<bool>() { x } else { -x }
    };
    let pairs: Vec<(f64, f64)> = (0..1000).map(|_| (pick(&mut rng), pick(&mut rng))).collect();
    let abs: Vec<f64> = pairs.iter().flat_map(|&(x, y)| [x.abs(), y.abs()]).collect();
    let pq = kernel.pq_many(&abs)?;
    let mut worst: f64 = 0.0;
    let mut finite = true;
    for (i, &(x, y)) in pairs.iter().enumerate() {
        let (vx, vy) = (&pq[2 * i], &pq[2 * i + 1]);
        let kxy = kernel.from_pq(x, vx, y, vy);
        let kyx = kernel.from_pq(y, vy, x, vx);
        finite &= kxy.is_finite() && kyx.is_finite();
        worst = worst.max((kxy - x.signum() * y.signum() * kyx).abs());
    }
    s.push("K(x,y) = sgn(x)sgn(y)K(y,x), real and finite", worst < 1e-10 && finite, format!("max residual {worst:.2e} over 1000 pairs"));
    Ok(s)
}

/// Growth and mixed runs of the scaling-limit experiment with the standard parameters.
pub fn standard_experiments(samples: usize, n: usize, xi: f64, seed: u64) -> Result<(ExperimentReport, ExperimentReport)> {
    let z = SpectralParam::new(0.3, 0.2)?;
    let base = ExperimentSpec { z, route: crate::experiment::Route::Growth { n }, samples, seed, bins: Default::default() };
    let growth = main_theorem_experiment(&base)?;
    let mixed = main_theorem_experiment(&ExperimentSpec { route: crate::experiment::Route::Mixed { xi }, ..base })?;
    Ok((growth, mixed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zmeasure::zmeasure_prob;

    #[test]
    fn small_exact_suite_passes() {
        let s = exact_identities(ExactLimits::up_to(5)).unwrap();
        assert!(s.passed(), "{s}");
    }

    #[test]
    fn small_cocycle_suite_passes() {
        assert!(cocycle_suite(50, 10, 1).unwrap().passed());
    }

    #[test]
    fn suite_display_marks_failures() {
        let mut s = Suite::new("demo");
        s.push("a", true, "fine");
        s.push("b", false, "broken");
        assert!(!s.passed());
        assert_eq!(s.failures(), vec!["b: broken".to_string()]);
        assert!(s.to_string().contains("FAIL b: broken"));
    }

    #[test]
    fn zmeasure_prob_is_used_consistently() {
        // the exact suite and direct evaluation agree on a single value
        let z = ZParams::real(q(1, 2));
        let lambda = Partition::new(vec![2, 1]).unwrap();
        let direct = zmeasure_prob(&z, &lambda);
        let from_table = zmeasure_table(&z, 3, usize::MAX).unwrap().into_iter().find(|(l, _)| *l == lambda).unwrap().1;
        assert_eq!(direct, from_table);
    }
}
