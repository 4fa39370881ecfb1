//! Point configurations on `ℝ* = ℝ \ {0}` (or on `ℤ'`), correlation
//! estimators, determinants of correlation kernels, the Thoma-to-configuration
//! map, the gamma lifting and its ray transform, Poisson reference processes,
//! and the necessary conditions a determinantal lattice process must satisfy.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use statrs::distribution::{ContinuousCDF, Gamma as GammaLaw};
use statrs::function::gamma::ln_gamma;

use crate::arith::Scalar;
use crate::error::{domain, invalid, Error, Result};
use crate::partitions::{HalfInt, ThomaPoint};
use crate::zmeasure::LatticeCorrelations;

/// Highest correlation order handled by the estimators.
pub const MAX_CORRELATION_ORDER: usize = 3;

/// A finite configuration, stored as sorted positions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointConfiguration {
    positions: Vec<f64>,
}

impl PointConfiguration {
    pub fn new(mut positions: Vec<f64>) -> Result<Self> {
        if positions.iter().any(|x| !x.is_finite()) {
            return invalid("configuration positions must be finite");
        }
        positions.sort_by(f64::total_cmp);
        Ok(PointConfiguration { positions })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Positions of a lattice configuration.
    pub fn from_lattice(points: &[HalfInt]) -> Self {
        let mut positions: Vec<f64> = points.iter().map(|p| p.to_f64()).collect();
        positions.sort_by(f64::total_cmp);
        PointConfiguration { positions }
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn is_multiplicity_free(&self) -> bool {
        self.positions.windows(2).all(|w| w[0] != w[1])
    }

    /// True iff every position lies in `ℤ + 1/2`.
    pub fn is_lattice(&self) -> bool {
        self.positions.iter().all(|x| (x - 0.5).fract() == 0.0)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.positions.binary_search_by(|p| p.total_cmp(&x)).is_ok()
    }

    /// Every position multiplied by `s > 0`.
    pub fn scaled(&self, s: f64) -> PointConfiguration {
        PointConfiguration { positions: self.positions.iter().map(|x| x * s).collect() }
    }

    /// Number of points in `[lo, hi)`.
    pub fn count_in(&self, lo: f64, hi: f64) -> usize {
        let a = self.positions.partition_point(|&x| x < lo);
        let b = self.positions.partition_point(|&x| x < hi);
        b.saturating_sub(a)
    }
}

/// `ω ↦ {α_i ≠ 0} ∪ {−β_j ≠ 0}`.
pub fn thoma_to_config<T: Scalar>(omega: &ThomaPoint<T>) -> PointConfiguration {
    let positions = omega
        .alpha()
        .iter()
        .filter(|a| **a != T::zero())
        .map(|a| a.to_f64())
        .chain(omega.beta().iter().filter(|b| **b != T::zero()).map(|b| -b.to_f64()))
        .collect();
    PointConfiguration::new(positions).expect("Thoma coordinates are finite")
}

/// Density `s^(t-1) e^(-s) / Γ(t)` of the lifting factor.
pub fn gamma_density(t: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    ((t - 1.0) * s.ln() - s - ln_gamma(t)).exp()
}

fn gamma_law(t: f64) -> Result<Gamma<f64>> {
    if !(t > 0.0 && t.is_finite()) {
        return domain("lifting needs a finite t > 0");
    }
    Gamma::new(t, 1.0).map_err(|e| Error::Domain(e.to_string()))
}

/// Multiplies the configuration by an independent `Gamma(t, 1)` factor.
pub fn lift<R: Rng + ?Sized>(c: &PointConfiguration, t: f64, rng: &mut R) -> Result<PointConfiguration> {
    let s = gamma_law(t)?.sample(rng);
    Ok(c.scaled(s))
}

/// Undoes a lifting of a configuration of total absolute mass 1.
pub fn unlift(c: &PointConfiguration) -> PointConfiguration {
    let total: f64 = c.positions.iter().map(|x| x.abs()).sum();
    if total == 0.0 {
        return c.clone();
    }
    c.scaled(1.0 / total)
}

/// A half-open interval `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
}

impl Bin {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return invalid(format!("bad bin [{lo}, {hi})"));
        }
        Ok(Bin { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// `count` equal bins covering `[lo, hi)`.
pub fn uniform_bins(lo: f64, hi: f64, count: usize) -> Result<Vec<Bin>> {
    if count == 0 {
        return invalid("need at least one bin");
    }
    let w = (hi - lo) / count as f64;
    (0..count)
        .map(|k| {
            let b_hi = if k + 1 == count { hi } else { lo + (k + 1) as f64 * w };
            Bin::new(lo + k as f64 * w, b_hi)
        })
        .collect()
}

fn check_bins(bins: &[Bin]) -> Result<()> {
    if bins.is_empty() {
        return invalid("empty bin list");
    }
    if bins.windows(2).any(|w| w[0].hi > w[1].lo) {
        return invalid("bins must be sorted and non-overlapping");
    }
    Ok(())
}

/// Where correlations are estimated.
#[derive(Debug, Clone, PartialEq)]
pub enum Support {
    /// Cells are ordered `k`-tuples of bins.
    Bins(Vec<Bin>),
    /// Explicit point tuples, scored by containment.
    Points(Vec<Vec<f64>>),
}

impl Support {
    fn cell_count(&self, order: usize) -> usize {
        match self {
            Support::Bins(b) => b.len().pow(order as u32),
            Support::Points(p) => p.len(),
        }
    }
}

/// Correlation measures of cells: per-sample means of the number of ordered
/// tuples of distinct points per cell, with empirical standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationEstimate {
    pub order: usize,
    pub support: Support,
    pub values: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Total tuple count per cell over all samples.
    pub hits: Vec<u64>,
    pub samples: u64,
    pub seed: Option<u64>,
}

impl CorrelationEstimate {
    /// Bin indices of a cell, first coordinate fastest.
    pub fn cell_bins(&self, cell: usize) -> Vec<usize> {
        match &self.support {
            Support::Bins(b) => (0..self.order).map(|i| cell / b.len().pow(i as u32) % b.len()).collect(),
            Support::Points(_) => vec![cell],
        }
    }

    /// Values divided by the cell volume (continuous support only).
    pub fn densities(&self) -> Vec<(f64, f64)> {
        (0..self.values.len())
            .map(|cell| {
                let vol = match &self.support {
                    Support::Bins(b) => self.cell_bins(cell).iter().map(|&i| b[i].width()).product(),
                    Support::Points(_) => 1.0,
                };
                (self.values[cell] / vol, self.std_errors[cell] / vol)
            })
            .collect()
    }
}

/// Streaming accumulator behind [`estimate_correlations`]; replicas merge by addition.
#[derive(Debug, Clone)]
pub struct CorrelationAccumulator {
    order: usize,
    support: Support,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    hits: Vec<u64>,
    samples: u64,
    counts: Vec<u64>,
    touched: Vec<usize>,
}

impl CorrelationAccumulator {
    pub fn new(order: usize, support: Support) -> Result<Self> {
        if order == 0 || order > MAX_CORRELATION_ORDER {
            return domain(format!("correlation order must be 1..={MAX_CORRELATION_ORDER}"));
        }
        let bins = match &support {
            Support::Bins(b) => {
                check_bins(b)?;
                b.len()
            }
            Support::Points(tuples) => {
                if tuples.iter().any(|t| t.len() != order) {
                    return invalid(format!("every point tuple must have {order} entries"));
                }
                0
            }
        };
        let cells = support.cell_count(order);
        Ok(CorrelationAccumulator {
            order,
            support,
            sum: vec![0.0; cells],
            sum_sq: vec![0.0; cells],
            hits: vec![0; cells],
            samples: 0,
            counts: vec![0; bins],
            touched: Vec::new(),
        })
    }

    pub fn push(&mut self, c: &PointConfiguration) {
        self.samples += 1;
        match &self.support {
            Support::Points(tuples) => {
                for (cell, tuple) in tuples.iter().enumerate() {
                    if tuple.iter().all(|&x| c.contains(x)) {
                        self.sum[cell] += 1.0;
                        self.sum_sq[cell] += 1.0;
                        self.hits[cell] += 1;
                    }
                }
            }
            Support::Bins(bins) => {
                self.touched.clear();
                for &x in c.positions() {
                    let k = bins.partition_point(|b| b.lo <= x);
                    if k > 0 && x < bins[k - 1].hi {
                        if self.counts[k - 1] == 0 {
                            self.touched.push(k - 1);
                        }
                        self.counts[k - 1] += 1;
                    }
                }
                let nb = bins.len();
                let touched = self.touched.clone();
                let mut idx = vec![0usize; self.order];
                let total = touched.len().pow(self.order as u32);
                for flat in 0..total {
                    let mut rest = flat;
                    for slot in idx.iter_mut() {
                        *slot = touched[rest % touched.len()];
                        rest /= touched.len();
                    }
                    let w = ordered_tuples(&idx, &self.counts);
                    if w == 0 {
                        continue;
                    }
                    let cell = idx.iter().rev().fold(0, |acc, &b| acc * nb + b);
                    self.sum[cell] += w as f64;
                    self.sum_sq[cell] += (w * w) as f64;
                    self.hits[cell] += w;
                }
                for &b in &touched {
                    self.counts[b] = 0;
                }
            }
        }
    }

    pub fn merge(&mut self, other: &CorrelationAccumulator) -> Result<()> {
        if self.order != other.order || self.support != other.support {
            return invalid("cannot merge accumulators with different supports");
        }
        for k in 0..self.sum.len() {
            self.sum[k] += other.sum[k];
            self.sum_sq[k] += other.sum_sq[k];
            self.hits[k] += other.hits[k];
        }
        self.samples += other.samples;
        Ok(())
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn finish(self, seed: Option<u64>) -> Result<CorrelationEstimate> {
        if self.samples == 0 {
            return domain("no samples to estimate from");
        }
        let n = self.samples as f64;
        let values: Vec<f64> = self.sum.iter().map(|s| s / n).collect();
        let std_errors = self
            .sum_sq
            .iter()
            .zip(&values)
            .map(|(sq, m)| {
                if self.samples < 2 {
                    return 0.0;
                }
                let var = ((sq - n * m * m) / (n - 1.0)).max(0.0);
                (var / n).sqrt()
            })
            .collect();
        Ok(CorrelationEstimate {
            order: self.order,
            support: self.support,
            values,
            std_errors,
            hits: self.hits,
            samples: self.samples,
            seed,
        })
    }
}

/// Number of ordered tuples of distinct points with the `i`-th point in bin `idx[i]`.
fn ordered_tuples(idx: &[usize], counts: &[u64]) -> u64 {
    let mut w = 1u64;
    for (i, &b) in idx.iter().enumerate() {
        let earlier = idx[..i].iter().filter(|&&a| a == b).count() as u64;
        if counts[b] <= earlier {
            return 0;
        }
        w *= counts[b] - earlier;
    }
    w
}

/// Estimates the order-`k` correlation measure of the cells of `support`.
pub fn estimate_correlations<'a, I>(samples: I, order: usize, support: Support) -> Result<CorrelationEstimate>
where
    I: IntoIterator<Item = &'a PointConfiguration>,
{
    let mut acc = CorrelationAccumulator::new(order, support)?;
    for c in samples {
        acc.push(c);
    }
    acc.finish(None)
}

/// `det[K(x_i, x_j)]` for pairwise distinct points.
pub fn det_correlation<K: Fn(f64, f64) -> f64>(kernel: K, points: &[f64]) -> Result<f64> {
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return invalid("correlation points must be pairwise distinct");
    }
    let k = points.len();
    if k == 0 {
        return Ok(1.0);
    }
    Ok(DMatrix::from_fn(k, k, |i, j| kernel(points[i], points[j])).determinant())
}

/// Intensity of a Poisson process.
#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    Uniform(f64),
    /// Piecewise constant: `values[i]` on `[edges[i], edges[i+1])`, zero outside.
    Piecewise { edges: Vec<f64>, values: Vec<f64> },
}

impl Density {
    pub fn piecewise(edges: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if edges.len() != values.len() + 1 || edges.windows(2).any(|w| !(w[0] < w[1])) {
            return invalid("piecewise density needs increasing edges, one more than values");
        }
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return invalid("density values must be finite and nonnegative");
        }
        Ok(Density::Piecewise { edges, values })
    }

    pub fn at(&self, x: f64) -> f64 {
        match self {
            Density::Uniform(r) => *r,
            Density::Piecewise { edges, values } => {
                let k = edges.partition_point(|&e| e <= x);
                if k == 0 || k == edges.len() {
                    0.0
                } else {
                    values[k - 1]
                }
            }
        }
    }

    /// `∫_lo^hi ρ`.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        match self {
            Density::Uniform(r) => r * (hi - lo).max(0.0),
            Density::Piecewise { edges, values } => values
                .iter()
                .enumerate()
                .map(|(i, v)| v * (hi.min(edges[i + 1]) - lo.max(edges[i])).max(0.0))
                .sum(),
        }
    }

    /// A point of `[lo, hi)` with law proportional to the density there.
    fn sample_point<R: Rng + ?Sized>(&self, lo: f64, hi: f64, total: f64, rng: &mut R) -> f64 {
        match self {
            Density::Uniform(_) => lo + (hi - lo) * rng.random::<f64>(),
            Density::Piecewise { edges, values } => {
                let mut u = rng.random::<f64>() * total;
                for (i, v) in values.iter().enumerate() {
                    let a = lo.max(edges[i]);
                    let b = hi.min(edges[i + 1]);
                    let m = v * (b - a).max(0.0);
                    if m > 0.0 && u < m {
                        return a + u / v;
                    }
                    u -= m;
                }
                hi.min(*edges.last().expect("nonempty edges"))
            }
        }
    }
}

/// One realization of the Poisson process with the given density, restricted to `window`.
pub fn poisson_sample<R: Rng + ?Sized>(density: &Density, window: (f64, f64), rng: &mut R) -> Result<PointConfiguration> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return invalid("window must have lo < hi");
    }
    let mass = density.mass(lo, hi);
    if !mass.is_finite() {
        return domain("density has infinite mass on the window");
    }
    if mass == 0.0 {
        return Ok(PointConfiguration::empty());
    }
    let count = Poisson::new(mass).map_err(|e| Error::Domain(e.to_string()))?.sample(rng) as usize;
    PointConfiguration::new((0..count).map(|_| density.sample_point(lo, hi, mass, rng)).collect())
}

/// Piecewise-constant first correlation density supported in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedDensity {
    pub bins: Vec<Bin>,
    pub values: Vec<f64>,
}

impl BinnedDensity {
    pub fn new(bins: Vec<Bin>, values: Vec<f64>) -> Result<Self> {
        check_bins(&bins)?;
        if bins.len() != values.len() {
            return invalid("one value per bin");
        }
        if bins.first().expect("nonempty").lo < -1.0 || bins.last().expect("nonempty").hi > 1.0 {
            return domain("ray transform input must be supported in [-1, 1]");
        }
        Ok(BinnedDensity { bins, values })
    }
}

/// `∫_bin ρ̃₁` where `ρ̃₁(x) = ∫_0^∞ γ_t(s) ρ₁(x/s) ds/s` is the first correlation
/// function after lifting. Per input bin this is `∫ ρ₁(u) P(x/u ∈ bin-ratio) du`
/// with the gamma CDF, integrated by double-exponential quadrature.
pub fn ray_transform_mass(rho: &BinnedDensity, t: f64, target: Bin, tol: f64) -> Result<f64> {
    let law = GammaLaw::new(t, 1.0).map_err(|e| Error::Domain(e.to_string()))?;
    let cdf = |s: f64| if s <= 0.0 { 0.0 } else { law.cdf(s) };
    let mut total = 0.0;
    for (bin, &v) in rho.bins.iter().zip(&rho.values) {
        if v == 0.0 {
            continue;
        }
        // split the input bin at 0 so the integrand keeps one sign of u
        for (a, b) in [(bin.lo, bin.hi.min(0.0)), (bin.lo.max(0.0), bin.hi)] {
            if a >= b {
                continue;
            }
            let out = quadrature::double_exponential::integrate(
                |u| {
                    if u > 0.0 {
                        cdf(target.hi / u) - cdf(target.lo / u)
                    } else if u < 0.0 {
                        cdf(target.lo / u) - cdf(target.hi / u)
                    } else {
                        0.0
                    }
                },
                a,
                b,
                tol,
            );
            if !(out.error_estimate <= 10.0 * tol) {
                return Err(Error::Numerical(format!(
                    "ray transform quadrature stalled at error {:e} on [{a}, {b}]",
                    out.error_estimate
                )));
            }
            total += v * out.integral;
        }
    }
    Ok(total)
}

/// Outcome of [`ray_transform_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct RayCheck {
    pub predicted: Vec<f64>,
    pub estimate: CorrelationEstimate,
    /// Largest `|estimate − predicted| / stderr` over bins with nonzero error.
    pub max_sigma: f64,
    pub max_abs: f64,
}

/// Lifts `samples` (draws of a process whose first correlation density is
/// `rho`) and compares the binned estimate with the ray transform of `rho`.
pub fn ray_transform_check<R: Rng + ?Sized>(
    rho: &BinnedDensity,
    t: f64,
    bins: &[Bin],
    samples: &[PointConfiguration],
    rng: &mut R,
) -> Result<RayCheck> {
    let mut acc = CorrelationAccumulator::new(1, Support::Bins(bins.to_vec()))?;
    for c in samples {
        acc.push(&lift(c, t, rng)?);
    }
    let estimate = acc.finish(None)?;
    let predicted = bins
        .iter()
        .map(|&b| ray_transform_mass(rho, t, b, 1e-10))
        .collect::<Result<Vec<_>>>()?;
    let mut max_sigma: f64 = 0.0;
    let mut max_abs: f64 = 0.0;
    for ((p, v), se) in predicted.iter().zip(&estimate.values).zip(&estimate.std_errors) {
        max_abs = max_abs.max((p - v).abs());
        if *se > 0.0 {
            max_sigma = max_sigma.max((p - v).abs() / se);
        }
    }
    Ok(RayCheck { predicted, estimate, max_sigma, max_abs })
}

/// A closed interval used to carry truncation error through the identities.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    fn sub(self, o: Interval) -> Interval {
        Interval::new(self.lo - o.hi, self.hi - o.lo)
    }

    fn mul(self, o: Interval) -> Interval {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        Interval::new(c.iter().copied().fold(f64::INFINITY, f64::min), c.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    }

    fn scale(self, s: f64) -> Interval {
        if s >= 0.0 {
            Interval::new(self.lo * s, self.hi * s)
        } else {
            Interval::new(self.hi * s, self.lo * s)
        }
    }

    fn square(self) -> Interval {
        let m = self.mul(self);
        if self.lo <= 0.0 && self.hi >= 0.0 {
            Interval::new(0.0, m.hi)
        } else {
            Interval::new(m.lo.max(0.0), m.hi)
        }
    }

    fn mid(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn radius(self) -> f64 {
        0.5 * (self.hi - self.lo)
    }
}

/// One pair or triple tested by [`det_necessary_conditions`].
#[derive(Debug, Clone, PartialEq)]
pub struct TupleCheck {
    pub points: Vec<HalfInt>,
    /// Pairs: `sgn(x) sgn(y) D(x, y)`. Triples: `(ρ₃ − base)² − 4 D D D`.
    pub value: f64,
    /// Allowed slack: truncation radius plus the caller's tolerance.
    pub tolerance: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetReport {
    pub pairs: Vec<TupleCheck>,
    pub triples: Vec<TupleCheck>,
}

impl DetReport {
    pub fn passed(&self) -> bool {
        self.pairs.iter().chain(&self.triples).all(|c| c.ok)
    }

    pub fn failures(&self) -> usize {
        self.pairs.iter().chain(&self.triples).filter(|c| !c.ok).count()
    }
}

/// Checks on all pairs and triples of `points` that any determinantal process
/// with a J-symmetric kernel satisfies, with `D(x,y) = ρ₁(x)ρ₁(y) − ρ₂(x,y)`:
/// `sgn(x) sgn(y) D ≥ 0` and `(ρ₃ − base)² = 4 D(x,y) D(y,w) D(w,x)` where
/// `base = ρ₁ρ₁ρ₁ − ρ₁(x)D(y,w) − ρ₁(y)D(x,w) − ρ₁(w)D(x,y)`.
///
/// Each tabulated correlation is only known to lie in `[value, value + tail]`;
/// both identities are evaluated in interval arithmetic and pass when the
/// interval comes within `tol` of the required region.
pub fn det_necessary_conditions(table: &LatticeCorrelations, points: &[HalfInt], tol: f64) -> Result<DetReport> {
    let tail = table.tail_bound();
    let rho = |pts: &[HalfInt]| -> Result<Interval> {
        let v = table.correlation(pts)?.value;
        Ok(Interval::new(v, v + tail))
    };
    let sign = |p: HalfInt| if p.numerator() < 0 { -1.0 } else { 1.0 };
    let d = |x: HalfInt, y: HalfInt| -> Result<Interval> { Ok(rho(&[x])?.mul(rho(&[y])?).sub(rho(&[x, y])?)) };

    let mut pairs = Vec::new();
    for (i, &x) in points.iter().enumerate() {
        for &y in &points[i + 1..] {
            let sd = d(x, y)?.scale(sign(x) * sign(y));
            pairs.push(TupleCheck {
                points: vec![x, y],
                value: sd.mid(),
                tolerance: sd.radius() + tol,
                ok: sd.hi >= -tol,
            });
        }
    }
    let mut triples = Vec::new();
    for (i, &x) in points.iter().enumerate() {
        for (j, &y) in points.iter().enumerate().skip(i + 1) {
            for &w in &points[j + 1..] {
                let (r1x, r1y, r1w) = (rho(&[x])?, rho(&[y])?, rho(&[w])?);
                let (dxy, dyw, dxw) = (d(x, y)?, d(y, w)?, d(x, w)?);
                let base = r1x
                    .mul(r1y)
                    .mul(r1w)
                    .sub(r1x.mul(dyw))
                    .sub(r1y.mul(dxw))
                    .sub(r1w.mul(dxy));
                let lhs = rho(&[x, y, w])?.sub(base).square();
                let rhs = dxy.mul(dyw).mul(dxw).scale(4.0);
                let diff = lhs.sub(rhs);
                triples.push(TupleCheck {
                    points: vec![x, y, w],
                    value: diff.mid(),
                    tolerance: diff.radius() + tol,
                    ok: diff.lo <= tol && diff.hi >= -tol,
                });
            }
        }
    }
    Ok(DetReport { pairs, triples })
}
