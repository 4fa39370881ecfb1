//! Command execution. Each command checks its schema, enforces resource caps,
//! then writes one CSV table.

use std::fmt;

use rayon::prelude::*;
use sinf::arith::{Rational, Scalar};
use sinf::characters::{character_table, classes, ChiZ};
use sinf::ewens::{sample_ewens, EwensParams};
use sinf::experiment::{main_theorem_experiment, BinLayout, ExperimentSpec, Route, Tolerances, MAX_GROWTH_N};
use sinf::partitions::{dimension, enumerate_partitions_capped, HalfInt, DEFAULT_ENUMERATION_CAP};
use sinf::pointproc::{det_necessary_conditions, estimate_correlations, PointConfiguration, Support};
use sinf::rng::from_seed;
use sinf::special::{q_of_z, resolvent_check, GridSpec, WhittakerKernel};
use sinf::verify::{self, ExactLimits, SamplerSizes, Suite};
use sinf::zmeasure::{lattice_config, sample_mixed, zmeasure_table, GrowthSampler, LatticeCorrelations, ZParams};
use sinf::Error;

use crate::config::{ConfigError, ExperimentConfig, Mode};
use crate::output::{num, Table};

const DEFAULT_MAX_SAMPLES: usize = 10_000_000;
const DEFAULT_MAX_NODES: usize = 4000;
const CHARACTER_MAX_N: usize = 14;
const LATTICE_MAX_SITES: usize = 12;
const LATTICE_TAIL: f64 = 1e-12;

#[derive(Debug)]
pub enum RunError {
    /// Bad flags, configuration or parameters outside a domain.
    Config(String),
    /// A resource cap would be exceeded.
    Resource(String),
    /// Numerical breakdown or I/O failure.
    Failure(String),
}

impl RunError {
    pub fn code(&self) -> u8 {
        match self {
            RunError::Failure(_) => 1,
            RunError::Config(_) => 2,
            RunError::Resource(_) => 3,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "configuration: {m}"),
            RunError::Resource(m) => write!(f, "resource cap: {m}"),
            RunError::Failure(m) => f.write_str(m),
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Resource(_) => RunError::Resource(e.to_string()),
            Error::Numerical(_) => RunError::Failure(e.to_string()),
            _ => RunError::Config(e.to_string()),
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e.0)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Failure(format!("i/o: {e}"))
    }
}

type Outcome = Result<bool, RunError>;

/// Values printed in the mode's own notation.
trait Show {
    fn show(&self) -> String;
}

impl Show for f64 {
    fn show(&self) -> String {
        num(*self)
    }
}

impl Show for Rational {
    fn show(&self) -> String {
        self.to_string()
    }
}

fn cap(value: usize, limit: usize, what: &str) -> Result<(), RunError> {
    if value > limit {
        return Err(RunError::Resource(format!("{what} = {value} exceeds the cap {limit}")));
    }
    Ok(())
}

fn samples(c: &ExperimentConfig, default: usize) -> Result<usize, RunError> {
    let count = c.sample_count.unwrap_or(default);
    cap(count, c.max_samples.unwrap_or(DEFAULT_MAX_SAMPLES), "sample_count")?;
    Ok(count)
}

fn half_ints(points: &[f64]) -> Result<Vec<HalfInt>, RunError> {
    points
        .iter()
        .map(|&p| {
            let twice = 2.0 * p;
            if !twice.is_finite() || twice.fract() != 0.0 || (twice as i64) % 2 == 0 {
                return Err(RunError::Config(format!("{p} is not a half-odd integer site")));
            }
            Ok(HalfInt::from_numerator(twice as i64))
        })
        .collect()
}

fn schema(command: &str) -> Option<&'static [&'static str]> {
    Some(match command {
        "verify exact" => &["max_n"],
        "verify cocycle" => &["n", "sample_count"],
        "verify samplers" => &["sample_count"],
        "verify characters" | "verify lattice" | "verify all" => &[],
        "verify experiment" => &["n", "xi", "sample_count", "max_samples"],
        "verify operator" => &["grid", "max_nodes"],
        "verify q" => &["n", "sample_count"],
        "verify degeneracies" => &["sample_count"],
        "partitions list" => &["n", "max_n"],
        "ewens sample" => &["t", "z", "n", "sample_count", "max_samples"],
        "ewens law" => &["t", "z", "n"],
        "zmeasure sample" => &["z", "t", "n", "xi", "sample_count", "max_samples"],
        "zmeasure table" => &["z", "t", "n", "max_n"],
        "characters table" => &["n", "max_n"],
        "characters chi-z" => &["z", "t", "n", "max_n"],
        "kernel table" => &["z", "t", "points"],
        "kernel q" => &["z", "t"],
        "kernel resolvent" => &["z", "t", "grid", "max_nodes"],
        "pointproc lattice" => &["z", "t", "xi", "points", "order"],
        "pointproc witness" => &["z", "t", "xi", "points"],
        "pointproc estimate" => &["z", "t", "xi", "points", "order", "sample_count", "max_samples"],
        "experiment run" => &["z", "t", "route", "n", "xi", "sample_count", "bins", "max_samples"],
        _ => return None,
    })
}

pub fn run(c: &ExperimentConfig) -> Outcome {
    let command = c.command.clone().unwrap_or_default();
    let allowed = schema(&command).ok_or_else(|| RunError::Config(format!("unknown command '{command}'")))?;
    c.check_schema(allowed)?;
    match command.as_str() {
        "partitions list" => partitions_list(c),
        "ewens sample" => ewens_sample(c),
        "ewens law" => match c.mode() {
            Mode::Exact => ewens_law(c, EwensParams::new(c.t_exact()?)?),
            Mode::Float => ewens_law(c, EwensParams::new(c.t_f64()?)?),
        },
        "zmeasure sample" => zmeasure_sample(c),
        "zmeasure table" => match c.mode() {
            Mode::Exact => zmeasure_tab(c, c.z_exact()?),
            Mode::Float => zmeasure_tab(c, c.z_f64()?),
        },
        "characters table" => characters_table(c),
        "characters chi-z" => match c.mode() {
            Mode::Exact => chi_z_table(c, c.z_exact()?),
            Mode::Float => chi_z_table(c, c.z_f64()?),
        },
        "kernel table" => kernel_table(c),
        "kernel q" => kernel_q(c),
        "kernel resolvent" => kernel_resolvent(c),
        "pointproc lattice" => pointproc_lattice(c),
        "pointproc witness" => pointproc_witness(c),
        "pointproc estimate" => pointproc_estimate(c),
        "experiment run" => experiment(c),
        verify_cmd => verify_command(c, verify_cmd.trim_start_matches("verify ")),
    }
}

fn partitions_list(c: &ExperimentConfig) -> Outcome {
    let n = c.require(&c.n, "n")?;
    cap(n, c.max_n.unwrap_or(DEFAULT_ENUMERATION_CAP), "n")?;
    let parts = enumerate_partitions_capped(n, usize::MAX)?;
    let mut out = Table::create(c, &["lambda", "dimension", "frobenius_a", "frobenius_b"])?;
    for l in &parts {
        let f = l.frobenius();
        let join = |v: &[HalfInt]| v.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(" ");
        out.row([l.to_string(), dimension(l).to_string(), join(&f.a), join(&f.b)])?;
    }
    out.finish()?;
    Ok(true)
}

fn ewens_sample(c: &ExperimentConfig) -> Outcome {
    let t = c.t_f64()?;
    let level = c.require(&c.n, "n")?;
    let count = samples(c, 1000)?;
    let mut rng = from_seed(c.seed());
    let mut out = Table::create(c, &["seed", "level", "coords", "num_cycles"])?;
    let seed = c.seed().to_string();
    for _ in 0..count {
        let x = sample_ewens(t, level, &mut rng)?;
        let coords: Vec<String> = x.coords().iter().map(u32::to_string).collect();
        out.row([seed.clone(), level.to_string(), coords.join(" "), x.num_cycles().to_string()])?;
    }
    out.finish()?;
    Ok(true)
}

fn ewens_law<T: Scalar + Show>(c: &ExperimentConfig, params: EwensParams<T>) -> Outcome {
    let level = c.require(&c.n, "n")?;
    let mut out = Table::create(c, &["law", "level", "value", "probability"])?;
    for m in 1..=level {
        for (i, p) in params.coordinate_law(m)?.iter().enumerate() {
            out.row(["coordinate".to_string(), m.to_string(), i.to_string(), p.show()])?;
        }
    }
    for (k, p) in params.num_cycles_law(level).iter().enumerate().skip(1) {
        out.row(["cycles".to_string(), level.to_string(), k.to_string(), p.show()])?;
    }
    out.finish()?;
    Ok(true)
}

fn zmeasure_sample(c: &ExperimentConfig) -> Outcome {
    let z = c.z_f64()?;
    let count = samples(c, 1000)?;
    let mut rng = from_seed(c.seed());
    let mut out = Table::create(c, &["seed", "n", "lambda", "config"])?;
    let seed = c.seed().to_string();
    let emit = |l: sinf::partitions::Partition, out: &mut Table| out.row([seed.clone(), l.size().to_string(), l.to_string(), lattice_config(&l).to_string()]);
    match (c.n, c.xi) {
        (Some(n), None) => {
            cap(n, MAX_GROWTH_N, "n")?;
            let mut sampler = GrowthSampler::new(z)?;
            for _ in 0..count {
                emit(sampler.sample(n, &mut rng).to_partition(), &mut out)?;
            }
        }
        (None, Some(xi)) => {
            for _ in 0..count {
                emit(sample_mixed(&z, xi, &mut rng)?, &mut out)?;
            }
        }
        _ => return Err(RunError::Config("zmeasure sample needs exactly one of n (growth) and xi (mixed)".into())),
    }
    out.finish()?;
    Ok(true)
}

fn zmeasure_tab<T: Scalar + Show>(c: &ExperimentConfig, z: ZParams<T>) -> Outcome {
    let n = c.require(&c.n, "n")?;
    cap(n, c.max_n.unwrap_or(DEFAULT_ENUMERATION_CAP), "n")?;
    let table = zmeasure_table(&z, n, usize::MAX)?;
    let mut out = Table::create(c, &["lambda", "probability"])?;
    for (l, p) in &table {
        out.row([l.to_string(), p.show()])?;
    }
    out.finish()?;
    Ok(true)
}

fn characters_table(c: &ExperimentConfig) -> Outcome {
    let n = c.require(&c.n, "n")?;
    cap(n, c.max_n.unwrap_or(CHARACTER_MAX_N), "n")?;
    let mut out = Table::create(c, &["lambda", "rho", "value"])?;
    for e in character_table(n)? {
        out.row([e.lambda.to_string(), e.rho.padded(n)?.to_string(), e.value.to_string()])?;
    }
    out.finish()?;
    Ok(true)
}

fn chi_z_table<T: Scalar + Show>(c: &ExperimentConfig, z: ZParams<T>) -> Outcome {
    let n = c.require(&c.n, "n")?;
    cap(n, c.max_n.unwrap_or(DEFAULT_ENUMERATION_CAP), "n")?;
    let chi = ChiZ::new(z, n)?;
    let mut out = Table::create(c, &["rho", "value"])?;
    for rho in classes(n)? {
        out.row([rho.padded(n)?.to_string(), chi.value(&rho)?.show()])?;
    }
    out.finish()?;
    Ok(true)
}

fn kernel_table(c: &ExperimentConfig) -> Outcome {
    let kernel = WhittakerKernel::new(c.spectral()?)?;
    let points = c.require(&c.points, "points")?;
    let pairs: Vec<(f64, f64)> = points.iter().flat_map(|&x| points.iter().map(move |&y| (x, y))).collect();
    let values: Vec<f64> = pairs.par_iter().map(|&(x, y)| kernel.eval(x, y)).collect::<sinf::Result<_>>()?;
    let mut out = Table::create(c, &["x", "y", "K"])?;
    for (&(x, y), k) in pairs.iter().zip(values) {
        out.row([num(x), num(y), num(k)])?;
    }
    out.finish()?;
    Ok(true)
}

fn kernel_q(c: &ExperimentConfig) -> Outcome {
    let q = q_of_z(c.spectral()?)?;
    let mut out = Table::create(c, &["q", "cotangent", "lattice_sum", "tail_bound"])?;
    out.row([num(q.value()), q.cotangent.map(num).unwrap_or_default(), num(q.lattice_sum), num(q.tail_bound)])?;
    out.finish()?;
    Ok(true)
}

fn kernel_resolvent(c: &ExperimentConfig) -> Outcome {
    let grid: GridSpec = c.grid.unwrap_or_default().into();
    cap(grid.nodes, c.max_nodes.unwrap_or(DEFAULT_MAX_NODES), "grid nodes")?;
    let r = resolvent_check(c.spectral()?, &grid, (0.1, 5.0))?;
    let mut out = Table::create(c, &["nodes", "deviation", "condition", "compared_pairs"])?;
    out.row([r.nodes.to_string(), num(r.deviation), num(r.condition), r.compared_pairs.to_string()])?;
    out.finish()?;
    Ok(true)
}

fn lattice_table(c: &ExperimentConfig) -> Result<(Vec<HalfInt>, LatticeCorrelations), RunError> {
    let z = c.z_f64()?;
    let xi = c.require(&c.xi, "xi")?;
    let sites = half_ints(&c.require(&c.points, "points")?)?;
    cap(sites.len(), LATTICE_MAX_SITES, "number of sites")?;
    let table = LatticeCorrelations::compute(&z, xi, &sites, LATTICE_TAIL)?;
    Ok((sites, table))
}

/// Subsets of `0..n` of size `k` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, acc: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            acc.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, acc);
            cur.pop();
        }
    }
    let mut acc = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut acc);
    acc
}

fn order(c: &ExperimentConfig) -> Result<usize, RunError> {
    let k = c.order.unwrap_or(1);
    if !(1..=sinf::pointproc::MAX_CORRELATION_ORDER).contains(&k) {
        return Err(RunError::Config(format!("order must be 1, 2 or 3, got {k}")));
    }
    Ok(k)
}

fn pointproc_lattice(c: &ExperimentConfig) -> Outcome {
    let (sites, table) = lattice_table(c)?;
    let k = order(c)?;
    let mut out = Table::create(c, &["points", "value", "tail_bound"])?;
    for s in subsets(sites.len(), k) {
        let pts: Vec<HalfInt> = s.iter().map(|&i| sites[i]).collect();
        let v = table.correlation(&pts)?;
        let label: Vec<String> = pts.iter().map(HalfInt::to_string).collect();
        out.row([label.join(" "), num(v.value), num(v.tail_bound)])?;
    }
    out.finish()?;
    Ok(true)
}

fn pointproc_witness(c: &ExperimentConfig) -> Outcome {
    let (sites, table) = lattice_table(c)?;
    let report = det_necessary_conditions(&table, &sites, LATTICE_TAIL)?;
    let mut out = Table::create(c, &["points", "kind", "value", "tolerance", "ok"])?;
    for (kind, checks) in [("pair", &report.pairs), ("triple", &report.triples)] {
        for t in checks {
            let label: Vec<String> = t.points.iter().map(HalfInt::to_string).collect();
            out.row([label.join(" "), kind.to_string(), num(t.value), num(t.tolerance), t.ok.to_string()])?;
        }
    }
    out.finish()?;
    Ok(report.passed())
}

fn pointproc_estimate(c: &ExperimentConfig) -> Outcome {
    let z = c.z_f64()?;
    let xi = c.require(&c.xi, "xi")?;
    let sites = half_ints(&c.require(&c.points, "points")?)?;
    let k = order(c)?;
    let count = samples(c, 100_000)?;
    let mut rng = from_seed(c.seed());
    let configs: Vec<PointConfiguration> = (0..count)
        .map(|_| sample_mixed(&z, xi, &mut rng).map(|l| PointConfiguration::from_lattice(lattice_config(&l).points())))
        .collect::<sinf::Result<_>>()?;
    let tuples: Vec<Vec<f64>> = subsets(sites.len(), k).iter().map(|s| s.iter().map(|&i| sites[i].to_f64()).collect()).collect();
    let est = estimate_correlations(&configs, k, Support::Points(tuples.clone()))?;
    let mut out = Table::create(c, &["points", "estimate", "stderr"])?;
    for (i, t) in tuples.iter().enumerate() {
        let label: Vec<String> = t.iter().map(|&x| num(x)).collect();
        out.row([label.join(" "), num(est.values[i]), num(est.std_errors[i])])?;
    }
    out.finish()?;
    Ok(true)
}

fn experiment(c: &ExperimentConfig) -> Outcome {
    let z = c.spectral()?;
    let route = match (c.route.as_deref().unwrap_or("growth"), c.n, c.xi) {
        ("growth", n, None) => Route::Growth { n: n.unwrap_or(2000) },
        ("mixed", None, xi) => Route::Mixed { xi: xi.unwrap_or(0.995) },
        (r @ ("growth" | "mixed"), _, _) => return Err(RunError::Config(format!("route '{r}' takes only {}", if r == "growth" { "n" } else { "xi" }))),
        (r, _, _) => return Err(RunError::Config(format!("unknown route '{r}'"))),
    };
    let bins = c.bins.map(|b| BinLayout { negative: b.negative, positive: b.positive }).unwrap_or_default();
    let spec = ExperimentSpec { z, route, samples: samples(c, 20_000)?, seed: c.seed(), bins };
    let report = main_theorem_experiment(&spec)?;
    let tol = Tolerances::default();
    let mut out = Table::create(c, &["bin_lo", "bin_hi", "estimate", "stderr", "count", "predicted", "sigma"])?;
    for b in &report.bins {
        out.row([num(b.bin.lo), num(b.bin.hi), num(b.density), num(b.std_error), b.hits.to_string(), num(b.predicted), num(b.sigma())])?;
    }
    out.finish()?;
    let failures = report.failures(&tol).len();
    eprintln!(
        "{} bins, {failures} failing; max {:.2} SE over bins with ≥ {} hits",
        report.bins.len(),
        report.max_sigma(tol.sigma_min_hits),
        tol.sigma_min_hits
    );
    if let Some(m) = report.p2 {
        eprintln!("E p₂ = {:.5} ± {:.5}", m.mean, m.std_error());
    }
    Ok(failures == 0)
}

fn verify_command(c: &ExperimentConfig, suite: &str) -> Outcome {
    let seed = c.seed();
    let mut suites: Vec<Suite> = Vec::new();
    let all = suite == "all";
    if all || suite == "exact" {
        suites.push(verify::exact_identities(c.max_n.map(ExactLimits::up_to).unwrap_or_default())?);
    }
    if all || suite == "cocycle" {
        suites.push(verify::cocycle_suite(c.sample_count.unwrap_or(10_000), c.n.unwrap_or(20), seed)?);
    }
    if all || suite == "samplers" {
        let sizes = match c.sample_count {
            Some(k) => SamplerSizes { growth: k, mixed: k, ewens: k.div_ceil(5) },
            None => SamplerSizes::default(),
        };
        suites.push(verify::sampler_suite(sizes, seed)?);
    }
    if all || suite == "characters" {
        suites.push(verify::character_suite(seed)?);
    }
    if all || suite == "experiment" {
        let (growth, mixed) = verify::standard_experiments(samples(c, 20_000)?, c.n.unwrap_or(2000), c.xi.unwrap_or(0.995), seed)?;
        suites.push(verify::main_theorem_suite(&growth, &mixed));
        suites.push(verify::spectral_identity_suite(&growth));
    }
    if all || suite == "operator" {
        let nodes = c.grid.map(|g| g.nodes).unwrap_or(400);
        cap(2 * nodes, c.max_nodes.unwrap_or(DEFAULT_MAX_NODES), "grid nodes")?;
        suites.push(verify::operator_suite(sinf::special::SpectralParam::new(0.3, 0.2)?, nodes, 2 * nodes)?);
    }
    if all || suite == "q" {
        suites.push(verify::q_suite(seed, c.n.unwrap_or(5000), c.sample_count.unwrap_or(200))?);
    }
    if all || suite == "lattice" {
        suites.push(verify::lattice_suite()?);
    }
    if all || suite == "degeneracies" {
        suites.push(verify::degeneracy_suite(seed, c.sample_count.unwrap_or(100_000))?);
    }
    for s in &suites {
        print!("{s}");
    }
    if c.out.is_some() {
        let mut out = Table::create(c, &["suite", "check", "passed", "detail"])?;
        for s in &suites {
            for k in &s.checks {
                out.row([s.title.as_str(), k.name.as_str(), if k.passed { "true" } else { "false" }, k.detail.as_str()])?;
            }
        }
        out.finish()?;
    }
    Ok(suites.iter().all(Suite::passed))
}
