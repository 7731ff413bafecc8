//! Seeded Monte Carlo check of the moment limits.
//!
//! Random distributions with a fixed mean are drawn on a two-sided support,
//! binned by their coefficient of variation over `(0, delta']`, and the
//! per-bin extremes of each requested standardized moment are recorded next
//! to the analytic limits. Every sample is also checked individually against
//! the limits at its own spread; a sample outside them is kept as a
//! [`Counterexample`].
//!
//! Work is split into (bin, family) units. Each unit draws from its own
//! ChaCha stream seeded from `(seed, bin, family)`, so results do not depend
//! on the number of worker threads.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bidisperse::endpoints_from_q;
use crate::bounds::{
    format_limit, limits, serialize_limit, BoundInput, BoundStatus, MomentBoundReport,
    SupportBounds,
};
use crate::error::{Error, Result};
use crate::moments::{summarize, DiscreteDistribution, MomentSummary};

/// Rejection budget of [`sample_constrained`].
pub const MAX_SAMPLING_ATTEMPTS: usize = 10_000;

/// Slack allowed when checking samples against limits, scaled by `max(1, |limit|)`.
pub const VIOLATION_TOLERANCE: f64 = 1e-9;

const MEAN_TOLERANCE: f64 = 1e-12;

pub const CSV_HEADER: [&str; 11] = [
    "delta_bin_lo",
    "delta_bin_hi",
    "order",
    "family",
    "n_samples",
    "n_discarded",
    "empirical_min",
    "empirical_max",
    "analytic_lower",
    "analytic_upper",
    "bound_status",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Bidisperse,
    Multipoint,
}

impl Family {
    pub const ALL: [Family; 2] = [Family::Bidisperse, Family::Multipoint];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Bidisperse => "bidisperse",
            Family::Multipoint => "multipoint",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub support: SupportBounds,
    pub mean: f64,
    /// Standardized-moment orders to record, each in `3..=8`.
    pub orders: Vec<usize>,
    pub bins: usize,
    pub samples_per_bin: usize,
    /// Support sizes to draw; 2 is always included.
    pub k_values: Vec<usize>,
    pub seed: u64,
}

impl SweepConfig {
    /// Defaults: orders 3 to 5, 50 bins, 2,000 samples per bin, support sizes 2 to 4.
    pub fn new(support: SupportBounds, mean: f64, seed: u64) -> Self {
        Self {
            support,
            mean,
            orders: vec![3, 4, 5],
            bins: 50,
            samples_per_bin: 2_000,
            k_values: vec![2, 3, 4],
            seed,
        }
    }

    fn validate(&self) -> Result<(f64, f64, Vec<usize>)> {
        let (Some(lo), Some(hi)) = (self.support.x_min(), self.support.x_max()) else {
            return Err(Error::InvalidConfig(
                "both support bounds are required".into(),
            ));
        };
        if !(self.mean > 0.0) {
            return Err(Error::NonPositiveMean(self.mean));
        }
        if !(lo < self.mean && self.mean < hi) {
            return Err(Error::MeanOutsideSupport { mean: self.mean });
        }
        if self.orders.is_empty() || self.orders.iter().any(|n| !(3..=8).contains(n)) {
            return Err(Error::InvalidConfig(format!(
                "orders must be a non-empty subset of 3..=8, got {:?}",
                self.orders
            )));
        }
        if self.bins < 4 {
            return Err(Error::InvalidConfig(format!(
                "need at least 4 bins, got {}",
                self.bins
            )));
        }
        if self.samples_per_bin < 100 {
            return Err(Error::InvalidConfig(format!(
                "need at least 100 samples per bin, got {}",
                self.samples_per_bin
            )));
        }
        if self.k_values.iter().any(|&k| k < 2) {
            return Err(Error::InvalidConfig(format!(
                "support sizes must be at least 2, got {:?}",
                self.k_values
            )));
        }
        let mut ks = self.k_values.clone();
        ks.push(2);
        ks.sort_unstable();
        ks.dedup();
        Ok((lo, hi, ks))
    }

    /// Largest coefficient of variation attainable on the support,
    /// `sqrt((mean - x_min) * (x_max - mean)) / mean`.
    pub fn delta_prime(&self) -> Result<f64> {
        let (lo, hi, _) = self.validate()?;
        Ok(((self.mean - lo) * (hi - self.mean)).sqrt() / self.mean)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub delta_lo: f64,
    pub delta_hi: f64,
    pub order: usize,
    pub family: Family,
    pub n_samples: usize,
    /// Samples generated for this bin and family that fell outside every bin.
    pub n_discarded: usize,
    /// `NaN` when the bin is empty.
    pub empirical_min: f64,
    pub empirical_max: f64,
    /// Coefficient of variation of the samples attaining the extremes.
    pub argmin_delta: f64,
    pub argmax_delta: f64,
    /// Most permissive limits over the bin.
    pub analytic_lower: f64,
    pub analytic_upper: f64,
    pub status: BoundStatus,
}

/// A sample outside the limits at its own spread. `order` is `None` for a
/// sample whose coefficient of variation exceeds the feasibility edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub order: Option<usize>,
    pub delta: f64,
    pub value: f64,
    #[serde(serialize_with = "serialize_limit")]
    pub lower: f64,
    #[serde(serialize_with = "serialize_limit")]
    pub upper: f64,
    pub status: BoundStatus,
    pub distribution: DiscreteDistribution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WidestSample {
    pub delta: f64,
    pub distribution: DiscreteDistribution,
    pub summary: MomentSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub delta_prime: f64,
    pub records: Vec<SweepRecord>,
    pub counterexamples: Vec<Counterexample>,
    /// The sample with the largest coefficient of variation.
    pub widest: Option<WidestSample>,
    pub discarded: usize,
}

impl SweepOutcome {
    pub fn max_delta(&self) -> f64 {
        self.widest.as_ref().map_or(0.0, |w| w.delta)
    }
}

/// Draws a distribution on `k` points inside `support` with mean exactly `mean`.
///
/// `k - 1` values are uniform on the support and the probabilities are a
/// flat draw from the simplex; the last value is solved for the mean, and
/// the draw is rejected if it falls outside the support.
pub fn sample_constrained<R: Rng + ?Sized>(
    k: usize,
    support: &SupportBounds,
    mean: f64,
    rng: &mut R,
) -> Result<DiscreteDistribution> {
    let (Some(lo), Some(hi)) = (support.x_min(), support.x_max()) else {
        return Err(Error::InvalidConfig(
            "both support bounds are required".into(),
        ));
    };
    if k < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 points, got {k}"
        )));
    }
    if !(lo < mean && mean < hi) {
        return Err(Error::MeanOutsideSupport { mean });
    }
    let mut values = vec![0.0; k];
    let mut probs = vec![0.0; k];
    for _ in 0..MAX_SAMPLING_ATTEMPTS {
        for p in probs.iter_mut() {
            *p = -(1.0 - rng.random::<f64>()).ln();
        }
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        for v in values[..k - 1].iter_mut() {
            *v = rng.random_range(lo..=hi);
        }
        let partial: f64 = values[..k - 1].iter().zip(&probs).map(|(v, p)| v * p).sum();
        let last = (mean - partial) / probs[k - 1];
        if !(lo..=hi).contains(&last) {
            continue;
        }
        values[k - 1] = last;
        let Ok(dist) = DiscreteDistribution::new(values.clone(), probs.clone()) else {
            continue;
        };
        if (dist.mean() - mean).abs() <= MEAN_TOLERANCE * mean.abs().max(1.0) {
            return Ok(dist);
        }
    }
    Err(Error::SamplingExhausted {
        attempts: MAX_SAMPLING_ATTEMPTS,
    })
}

/// Splitmix64 finalizer.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of the stream for one (bin, family) unit:
/// `splitmix64(splitmix64(seed ^ splitmix64(bin)) ^ family)`.
pub fn unit_seed(seed: u64, bin: usize, family: Family) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(bin as u64)) ^ family.index() as u64)
}

#[derive(Debug, Clone, Copy)]
struct Extremes {
    count: usize,
    min: f64,
    max: f64,
    argmin: f64,
    argmax: f64,
}

impl Default for Extremes {
    fn default() -> Self {
        Self {
            count: 0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            argmin: f64::NAN,
            argmax: f64::NAN,
        }
    }
}

impl Extremes {
    fn push(&mut self, value: f64, delta: f64) {
        self.count += 1;
        if value < self.min {
            self.min = value;
            self.argmin = delta;
        }
        if value > self.max {
            self.max = value;
            self.argmax = delta;
        }
    }

    fn merge(&mut self, other: &Extremes) {
        self.count += other.count;
        if other.min < self.min {
            self.min = other.min;
            self.argmin = other.argmin;
        }
        if other.max > self.max {
            self.max = other.max;
            self.argmax = other.argmax;
        }
    }
}

/// Results of one (bin, family) unit. Samples may land in any bin.
struct UnitResult {
    /// Indexed by `[bin][order slot]`.
    extremes: Vec<Vec<Extremes>>,
    discarded: usize,
    counterexamples: Vec<Counterexample>,
    widest: Option<WidestSample>,
}

struct Plan<'a> {
    config: &'a SweepConfig,
    x_min: f64,
    x_max: f64,
    delta_prime: f64,
    width: f64,
    max_order: usize,
    /// Sample counts per support size for each family.
    counts: [Vec<(usize, usize)>; 2],
}

impl Plan<'_> {
    fn edges(&self, bin: usize) -> (f64, f64) {
        let hi = if bin + 1 == self.config.bins {
            self.delta_prime
        } else {
            self.width * (bin + 1) as f64
        };
        (self.width * bin as f64, hi)
    }

    fn bin_of(&self, delta: f64) -> Option<usize> {
        if !(delta > 0.0) || delta > self.delta_prime * (1.0 + VIOLATION_TOLERANCE) {
            return None;
        }
        Some(((delta / self.width) as usize).min(self.config.bins - 1))
    }

    fn input(&self, delta: f64) -> Result<BoundInput> {
        BoundInput::new(
            self.config.mean,
            delta * self.config.mean,
            self.config.support,
        )
    }

    /// A two-point distribution with coefficient of variation `delta`. `q`
    /// follows the arcsine law over the range keeping both values inside
    /// the support.
    fn draw_bidisperse(&self, delta: f64, rng: &mut ChaCha8Rng) -> Result<DiscreteDistribution> {
        let mean = self.config.mean;
        let sigma = delta * mean;
        let below = sigma / (mean - self.x_min);
        let above = sigma / (self.x_max - mean);
        let q_hi = 1.0 / (1.0 + below * below);
        let q_lo = (above * above / (1.0 + above * above)).min(q_hi);
        // arcsine law: dense at both ends of the range, where the extremes are
        let u = (0.5 * std::f64::consts::PI * rng.random::<f64>()).sin();
        let q = q_lo + (q_hi - q_lo) * u * u;
        let q = q.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
        let (a, b) = endpoints_from_q(mean, delta, q)?;
        DiscreteDistribution::new(
            vec![
                a.clamp(self.x_min, self.x_max),
                b.clamp(self.x_min, self.x_max),
            ],
            vec![1.0 - q, q],
        )
    }

    /// A `k`-point distribution, stretched about the mean toward `delta`
    /// as far as the support allows. Stretching leaves every standardized
    /// moment unchanged.
    fn draw_multipoint(
        &self,
        k: usize,
        delta: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<DiscreteDistribution> {
        let mean = self.config.mean;
        let shape = sample_constrained(k, &self.config.support, mean, rng)?;
        let sigma = shape.central_moment(2).max(0.0).sqrt();
        if sigma == 0.0 {
            return Ok(shape);
        }
        let max_stretch = shape
            .values()
            .iter()
            .filter_map(|&x| {
                if x > mean {
                    Some((self.x_max - mean) / (x - mean))
                } else if x < mean {
                    Some((mean - self.x_min) / (mean - x))
                } else {
                    None
                }
            })
            .fold(f64::INFINITY, f64::min);
        let stretch = (delta * mean / sigma).min(max_stretch);
        let values = shape
            .values()
            .iter()
            .map(|&x| (mean + stretch * (x - mean)).clamp(self.x_min, self.x_max))
            .collect();
        DiscreteDistribution::new(values, shape.probabilities().to_vec())
    }

    fn run_unit(&self, bin: usize, family: Family) -> Result<UnitResult> {
        let config = self.config;
        let mut rng = ChaCha8Rng::seed_from_u64(unit_seed(config.seed, bin, family));
        let (lo, hi) = self.edges(bin);
        let mut out = UnitResult {
            extremes: vec![vec![Extremes::default(); config.orders.len()]; config.bins],
            discarded: 0,
            counterexamples: Vec::new(),
            widest: None,
        };

        for &(k, count) in &self.counts[family.index()] {
            for _ in 0..count {
                // target spread in (lo, hi]
                let target = hi - (hi - lo) * rng.random::<f64>();
                let dist = match family {
                    Family::Bidisperse => self.draw_bidisperse(target, &mut rng)?,
                    Family::Multipoint => self.draw_multipoint(k, target, &mut rng)?,
                };
                self.record(dist, &mut out)?;
            }
        }
        Ok(out)
    }

    fn record(&self, dist: DiscreteDistribution, out: &mut UnitResult) -> Result<()> {
        let config = self.config;
        let Ok(summary) = summarize(&dist, self.max_order) else {
            out.discarded += 1;
            return Ok(());
        };
        let delta = summary.std_dev / config.mean;

        if delta > self.delta_prime * (1.0 + VIOLATION_TOLERANCE) {
            out.counterexamples.push(Counterexample {
                order: None,
                delta,
                value: delta,
                lower: 0.0,
                upper: self.delta_prime,
                status: BoundStatus::Proven,
                distribution: dist.clone(),
            });
        }
        let Some(bin) = self.bin_of(delta) else {
            out.discarded += 1;
            return Ok(());
        };

        let input = self.input(delta.min(self.delta_prime))?;
        for (slot, &n) in config.orders.iter().enumerate() {
            let value = summary.standardized(n).expect("order within summary");
            out.extremes[bin][slot].push(value, delta);
            let report = limits(n, &input)?;
            if !report.admits(value, VIOLATION_TOLERANCE) {
                out.counterexamples.push(Counterexample {
                    order: Some(n),
                    delta,
                    value,
                    lower: report.lower,
                    upper: report.upper,
                    status: report.status,
                    distribution: dist.clone(),
                });
            }
        }
        if out.widest.as_ref().is_none_or(|w| delta > w.delta) {
            out.widest = Some(WidestSample {
                delta,
                distribution: dist,
                summary,
            });
        }
        Ok(())
    }

    /// The most permissive limits over a bin. The limits are monotone in the
    /// spread, so the edges and the center cover the whole bin; a zero lower
    /// edge contributes the small-spread limits (unbounded for odd orders,
    /// a floor of one for even orders).
    fn envelope(&self, order: usize, lo: f64, hi: f64) -> Result<(f64, f64, BoundStatus)> {
        let mut points = vec![0.5 * (lo + hi), hi];
        if lo > 0.0 {
            points.push(lo);
        }
        let reports: Vec<MomentBoundReport> = points
            .into_iter()
            .map(|d| self.input(d).and_then(|inp| limits(order, &inp)))
            .collect::<Result<_>>()?;
        let mut lower = reports
            .iter()
            .map(|r| r.lower)
            .fold(f64::INFINITY, f64::min);
        let mut upper = reports
            .iter()
            .map(|r| r.upper)
            .fold(f64::NEG_INFINITY, f64::max);
        if lo <= 0.0 {
            lower = if order.is_multiple_of(2) {
                lower.min(1.0)
            } else {
                f64::NEG_INFINITY
            };
            upper = f64::INFINITY;
        }
        let status = if reports.iter().any(|r| r.status == BoundStatus::Conjectured) {
            BoundStatus::Conjectured
        } else {
            BoundStatus::Proven
        };
        Ok((lower, upper, status))
    }
}

/// Runs the sweep on rayon's global pool.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    run_plan(config)
}

/// Runs the sweep on a dedicated pool of `threads` workers.
pub fn run_sweep_with_threads(config: &SweepConfig, threads: usize) -> Result<SweepOutcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_plan(config))
}

fn split_counts(total: usize, ks: &[usize]) -> [Vec<(usize, usize)>; 2] {
    let base = total / ks.len();
    let extra = total % ks.len();
    let mut counts: [Vec<(usize, usize)>; 2] = [Vec::new(), Vec::new()];
    for (i, &k) in ks.iter().enumerate() {
        let n = base + usize::from(i < extra);
        let family = if k == 2 {
            Family::Bidisperse
        } else {
            Family::Multipoint
        };
        counts[family.index()].push((k, n));
    }
    counts
}

fn run_plan(config: &SweepConfig) -> Result<SweepOutcome> {
    let (x_min, x_max, ks) = config.validate()?;
    let delta_prime = config.delta_prime()?;
    let plan = Plan {
        config,
        x_min,
        x_max,
        delta_prime,
        width: delta_prime / config.bins as f64,
        max_order: *config.orders.iter().max().expect("validated non-empty"),
        counts: split_counts(config.samples_per_bin, &ks),
    };

    let units: Vec<(usize, Family)> = (0..config.bins)
        .flat_map(|bin| Family::ALL.into_iter().map(move |f| (bin, f)))
        .collect();
    let results: Vec<UnitResult> = units
        .par_iter()
        .map(|&(bin, family)| plan.run_unit(bin, family))
        .collect::<Result<_>>()?;

    // merge in unit order
    let slots = config.orders.len();
    let mut extremes = vec![vec![vec![Extremes::default(); slots]; 2]; config.bins];
    let mut discarded = vec![[0usize; 2]; config.bins];
    let mut counterexamples = Vec::new();
    let mut widest: Option<WidestSample> = None;
    for (&(bin, family), result) in units.iter().zip(results) {
        for (target, partial) in extremes.iter_mut().zip(&result.extremes) {
            for (acc, e) in target[family.index()].iter_mut().zip(partial) {
                acc.merge(e);
            }
        }
        discarded[bin][family.index()] += result.discarded;
        counterexamples.extend(result.counterexamples);
        if let Some(w) = result.widest {
            if widest.as_ref().is_none_or(|cur| w.delta > cur.delta) {
                widest = Some(w);
            }
        }
    }

    let mut records = Vec::with_capacity(config.bins * slots * 2);
    for bin in 0..config.bins {
        let (lo, hi) = plan.edges(bin);
        for (slot, &order) in config.orders.iter().enumerate() {
            let (analytic_lower, analytic_upper, status) = plan.envelope(order, lo, hi)?;
            for family in Family::ALL {
                let e = extremes[bin][family.index()][slot];
                let empty = e.count == 0;
                records.push(SweepRecord {
                    delta_lo: lo,
                    delta_hi: hi,
                    order,
                    family,
                    n_samples: e.count,
                    n_discarded: discarded[bin][family.index()],
                    empirical_min: if empty { f64::NAN } else { e.min },
                    empirical_max: if empty { f64::NAN } else { e.max },
                    argmin_delta: e.argmin,
                    argmax_delta: e.argmax,
                    analytic_lower,
                    analytic_upper,
                    status,
                });
            }
        }
    }

    Ok(SweepOutcome {
        delta_prime,
        records,
        counterexamples,
        widest,
        discarded: discarded.iter().flatten().sum(),
    })
}

/// CSV text for `records`: one header row, floats at 17 significant digits,
/// infinities as `-inf` / `+inf` and empty bins as `nan`.
pub fn render_csv(records: &[SweepRecord]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_HEADER).expect("write to memory");
    for r in records {
        writer
            .write_record([
                format_limit(r.delta_lo),
                format_limit(r.delta_hi),
                r.order.to_string(),
                r.family.as_str().to_owned(),
                r.n_samples.to_string(),
                r.n_discarded.to_string(),
                format_limit(r.empirical_min),
                format_limit(r.empirical_max),
                format_limit(r.analytic_lower),
                format_limit(r.analytic_upper),
                r.status.as_str().to_owned(),
            ])
            .expect("write to memory");
    }
    let bytes = writer.into_inner().expect("flush to memory");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

pub fn write_report(records: &[SweepRecord], path: impl AsRef<Path>) -> Result<()> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no sweep records to write".into()));
    }
    let path = path.as_ref();
    fs::write(path, render_csv(records)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
