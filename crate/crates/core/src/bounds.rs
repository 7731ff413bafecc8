//! Limits on standardized moments of distributions with bounded support.
//!
//! Every limit is a function of the *relative spread* toward a support
//! bound: `sigma / (mean - x_min)` below, `sigma / (x_max - mean)` above.
//! Working with spreads rather than the coefficient of variation keeps the
//! formulas regular as the mean passes through zero.
//!
//! Skewness limits and the kurtosis floor are proven. The two-sided
//! kurtosis ceiling and all limits of order five and up come from the
//! two-point family and are reported as conjectured.

use serde::{Serialize, Serializer};

use crate::bidisperse::dn_of_z_unchecked;
use crate::error::{Error, Result};
use crate::moments::MAX_ORDER;

/// Relative slack on the variance before a two-sided input is rejected.
pub const FEASIBILITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SupportBounds {
    x_min: Option<f64>,
    x_max: Option<f64>,
}

impl SupportBounds {
    pub fn new(x_min: Option<f64>, x_max: Option<f64>) -> Result<Self> {
        for x in x_min.iter().chain(x_max.iter()) {
            if !x.is_finite() {
                return Err(Error::InvalidSupport(format!("bound {x} is not finite")));
            }
        }
        if let (Some(lo), Some(hi)) = (x_min, x_max) {
            if lo >= hi {
                return Err(Error::InvalidSupport(format!(
                    "x_min {lo} must be below x_max {hi}"
                )));
            }
        }
        Ok(Self { x_min, x_max })
    }

    pub fn unbounded() -> Self {
        Self::default()
    }

    pub fn below(x_min: f64) -> Result<Self> {
        Self::new(Some(x_min), None)
    }

    pub fn above(x_max: f64) -> Result<Self> {
        Self::new(None, Some(x_max))
    }

    pub fn between(x_min: f64, x_max: f64) -> Result<Self> {
        Self::new(Some(x_min), Some(x_max))
    }

    pub fn x_min(&self) -> Option<f64> {
        self.x_min
    }

    pub fn x_max(&self) -> Option<f64> {
        self.x_max
    }

    pub fn contains(&self, x: f64) -> bool {
        self.x_min.is_none_or(|lo| x >= lo) && self.x_max.is_none_or(|hi| x <= hi)
    }
}

/// Mean and standard deviation of a nontrivial distribution on `support`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInput {
    mean: f64,
    std_dev: f64,
    support: SupportBounds,
}

impl BoundInput {
    pub fn new(mean: f64, std_dev: f64, support: SupportBounds) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::InvalidArgument(format!("mean {mean} is not finite")));
        }
        if !(std_dev > 0.0 && std_dev.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "standard deviation must be positive, got {std_dev}"
            )));
        }
        let inside =
            support.x_min.is_none_or(|lo| mean > lo) && support.x_max.is_none_or(|hi| mean < hi);
        if !inside {
            return Err(Error::MeanOutsideSupport { mean });
        }
        Ok(Self {
            mean,
            std_dev,
            support,
        })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn std_dev(&self) -> f64 {
        self.std_dev
    }

    pub fn support(&self) -> SupportBounds {
        self.support
    }

    fn spread_below(&self) -> Option<f64> {
        self.support.x_min.map(|lo| self.std_dev / (self.mean - lo))
    }

    fn spread_above(&self) -> Option<f64> {
        self.support.x_max.map(|hi| self.std_dev / (hi - self.mean))
    }

    /// Rejects a spread no distribution on the support can reach: the
    /// variance is at most `(mean - x_min) * (x_max - mean)`.
    fn check_feasible(&self) -> Result<()> {
        if let (Some(lo), Some(hi)) = (self.support.x_min, self.support.x_max) {
            let variance = self.std_dev * self.std_dev;
            let max_variance = (self.mean - lo) * (hi - self.mean);
            if variance > max_variance * (1.0 + FEASIBILITY_SLACK) {
                return Err(Error::InfeasibleSpread {
                    variance,
                    max_variance,
                });
            }
        }
        Ok(())
    }
}

/// `sigma / (mean - bound)` for a lower bound, `sigma / (bound - mean)` for an upper one.
pub fn relative_spread(mean: f64, std_dev: f64, bound: f64, side: Side) -> Result<f64> {
    if !(std_dev > 0.0 && std_dev.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "standard deviation must be positive, got {std_dev}"
        )));
    }
    let gap = match side {
        Side::Lower => mean - bound,
        Side::Upper => bound - mean,
    };
    if !(gap > 0.0) {
        return Err(Error::MeanOutsideSupport { mean });
    }
    Ok(std_dev / gap)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundStatus {
    Proven,
    Conjectured,
}

impl BoundStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundStatus::Proven => "proven",
            BoundStatus::Conjectured => "conjectured",
        }
    }

    fn weaker(self, other: Self) -> Self {
        if self == BoundStatus::Conjectured || other == BoundStatus::Conjectured {
            BoundStatus::Conjectured
        } else {
            BoundStatus::Proven
        }
    }
}

/// The spread parameters a report was computed from.
///
/// `spread_lower` and `spread_upper` are the relative spreads toward
/// `x_min` and `x_max`. The remaining fields measure distances to the
/// bounds in units of the mean (`|1 - x / mean|`) and are absent when the
/// mean is zero: `delta0` for a one-sided support; `delta1 <= delta2` and
/// the largest attainable coefficient of variation
/// `delta_prime = sqrt(delta1 * delta2)` for a two-sided one.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct DeltaParams {
    pub spread_lower: Option<f64>,
    pub spread_upper: Option<f64>,
    pub delta0: Option<f64>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub delta_prime: Option<f64>,
}

impl DeltaParams {
    fn of(input: &BoundInput) -> Self {
        let mean = input.mean;
        let scaled = |x: f64| (mean != 0.0).then(|| (1.0 - x / mean).abs());
        let mut params = DeltaParams {
            spread_lower: input.spread_below(),
            spread_upper: input.spread_above(),
            ..Default::default()
        };
        match (input.support.x_min, input.support.x_max) {
            (Some(lo), Some(hi)) => {
                if let (Some(a), Some(b)) = (scaled(lo), scaled(hi)) {
                    let (d1, d2) = (a.min(b), a.max(b));
                    params.delta1 = Some(d1);
                    params.delta2 = Some(d2);
                    params.delta_prime = Some((d1 * d2).sqrt());
                }
            }
            (Some(x), None) | (None, Some(x)) => params.delta0 = scaled(x),
            (None, None) => {}
        }
        params
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentBoundReport {
    pub order: usize,
    #[serde(serialize_with = "serialize_limit")]
    pub lower: f64,
    #[serde(serialize_with = "serialize_limit")]
    pub upper: f64,
    /// The weaker of the two per-side statuses.
    pub status: BoundStatus,
    pub lower_status: BoundStatus,
    pub upper_status: BoundStatus,
    pub delta_params: DeltaParams,
}

impl MomentBoundReport {
    fn new(
        order: usize,
        (lower, lower_status): (f64, BoundStatus),
        (upper, upper_status): (f64, BoundStatus),
        delta_params: DeltaParams,
    ) -> Self {
        debug_assert!(
            lower <= upper,
            "D{order} limits out of order: {lower} > {upper}"
        );
        Self {
            order,
            lower,
            upper,
            status: lower_status.weaker(upper_status),
            lower_status,
            upper_status,
            delta_params,
        }
    }

    /// Whether `value` lies within the limits, allowing `tol * max(1, |limit|)` of slack.
    pub fn admits(&self, value: f64, tol: f64) -> bool {
        let slack = |limit: f64| tol * limit.abs().max(1.0);
        (self.lower == f64::NEG_INFINITY || value >= self.lower - slack(self.lower))
            && (self.upper == f64::INFINITY || value <= self.upper + slack(self.upper))
    }
}

/// Renders a limit for text output: `-inf` / `+inf` for infinities,
/// otherwise 17 significant digits.
pub fn format_limit(x: f64) -> String {
    if x == f64::INFINITY {
        "+inf".to_owned()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_owned()
    } else if x.is_nan() {
        "nan".to_owned()
    } else {
        format!("{x:.16e}")
    }
}

pub(crate) fn serialize_limit<S: Serializer>(
    x: &f64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&format_limit(*x))
    }
}

/// Floor on kurtosis implied by a skewness value: `D4 >= D3^2 + 1`.
pub fn pearson_floor(skew: f64) -> f64 {
    skew * skew + 1.0
}

/// Skewness limits: `s - 1/s` below for the spread `s` toward `x_min`,
/// and the mirrored `1/s - s` above for the spread toward `x_max`.
pub fn d3_limits(input: &BoundInput) -> Result<MomentBoundReport> {
    input.check_feasible()?;
    let proven = BoundStatus::Proven;
    let lower = input
        .spread_below()
        .map_or(f64::NEG_INFINITY, |s| s - 1.0 / s);
    let upper = input.spread_above().map_or(f64::INFINITY, |s| 1.0 / s - s);
    Ok(MomentBoundReport::new(
        3,
        (lower, proven),
        (upper, proven),
        DeltaParams::of(input),
    ))
}

/// Kurtosis limits.
///
/// The floor is 1 while the spread toward the nearer bound is at most 1,
/// and `(s - 1/s)^2 + 1` beyond that. A two-sided support adds a ceiling of
/// the same form in the spread toward the farther bound.
pub fn d4_limits(input: &BoundInput) -> Result<MomentBoundReport> {
    even_limits(4, input, BoundStatus::Proven)
}

/// Limits for orders five and up, built from the two-point family.
///
/// Odd orders mirror skewness: the floor comes from the spread toward
/// `x_min`, the ceiling from the reflected spread toward `x_max`. Even
/// orders follow the kurtosis pattern.
pub fn dn_conjectured_limits(n: usize, input: &BoundInput) -> Result<MomentBoundReport> {
    if !(5..=MAX_ORDER).contains(&n) {
        return Err(Error::OrderOutOfRange {
            order: n,
            min: 5,
            max: MAX_ORDER,
        });
    }
    if n.is_multiple_of(2) {
        return even_limits(n, input, BoundStatus::Conjectured);
    }
    input.check_feasible()?;
    let conj = BoundStatus::Conjectured;
    let lower = input
        .spread_below()
        .map_or(f64::NEG_INFINITY, |s| dn_of_z_unchecked(n, s));
    let upper = input
        .spread_above()
        .map_or(f64::INFINITY, |s| -dn_of_z_unchecked(n, s));
    Ok(MomentBoundReport::new(
        n,
        (lower, conj),
        (upper, conj),
        DeltaParams::of(input),
    ))
}

/// Dispatches to the limit function for order `n >= 3`.
pub fn limits(n: usize, input: &BoundInput) -> Result<MomentBoundReport> {
    match n {
        3 => d3_limits(input),
        4 => d4_limits(input),
        _ => dn_conjectured_limits(n, input),
    }
}

fn even_limits(
    n: usize,
    input: &BoundInput,
    floor_status: BoundStatus,
) -> Result<MomentBoundReport> {
    input.check_feasible()?;
    let spreads: Vec<f64> = input
        .spread_below()
        .into_iter()
        .chain(input.spread_above())
        .collect();
    let near = spreads.iter().copied().reduce(f64::max);
    let lower = match near {
        Some(s) if s > 1.0 => dn_of_z_unchecked(n, s),
        _ => 1.0,
    };
    let upper = if spreads.len() == 2 {
        (
            dn_of_z_unchecked(n, spreads[0].min(spreads[1])),
            BoundStatus::Conjectured,
        )
    } else {
        (f64::INFINITY, floor_status)
    };
    Ok(MomentBoundReport::new(
        n,
        (lower, floor_status),
        upper,
        DeltaParams::of(input),
    ))
}
