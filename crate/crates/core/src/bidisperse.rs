//! Two-point ("bidisperse") distributions: forward and inverse
//! parametrizations, the closed-form standardized moments of the family,
//! and the gap formulation used to locate its extremes.
//!
//! A two-point distribution takes the value `a_plus` with probability `q`
//! and `a_minus < a_plus` with probability `1 - q`. Its standardized
//! moments depend on `q` alone.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::{DiscreteDistribution, MAX_ORDER};
use crate::root;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BidisperseSpec {
    a_minus: f64,
    a_plus: f64,
    q: f64,
}

impl BidisperseSpec {
    /// Builds the distribution taking `a_plus` with probability `q` and
    /// `a_minus` otherwise. The mean must fall strictly between the values.
    pub fn new(a_minus: f64, a_plus: f64, q: f64) -> Result<Self> {
        if !(a_minus.is_finite() && a_plus.is_finite()) {
            return Err(Error::NonFiniteValues);
        }
        check_probability(q)?;
        let spec = Self { a_minus, a_plus, q };
        let mean = spec.mean();
        if !(a_minus < mean && mean < a_plus) {
            return Err(Error::InvalidBidisperse(format!(
                "need a_minus < mean < a_plus, got {a_minus} / {mean} / {a_plus}"
            )));
        }
        Ok(spec)
    }

    pub fn a_minus(&self) -> f64 {
        self.a_minus
    }

    pub fn a_plus(&self) -> f64 {
        self.a_plus
    }

    /// Probability of `a_plus`.
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn mean(&self) -> f64 {
        (1.0 - self.q) * self.a_minus + self.q * self.a_plus
    }

    pub fn std_dev(&self) -> f64 {
        (self.a_plus - self.a_minus) * (self.q * (1.0 - self.q)).sqrt()
    }

    /// Size ratio `a_plus / a_minus`; only meaningful for positive values.
    pub fn eta(&self) -> Option<f64> {
        (self.a_minus > 0.0).then(|| self.a_plus / self.a_minus)
    }

    pub fn delta_form(&self) -> Result<DeltaForm> {
        let mean = self.mean();
        if mean <= 0.0 {
            return Err(Error::NonPositiveMean(mean));
        }
        Ok(DeltaForm {
            delta_minus: (mean - self.a_minus) / mean,
            delta_plus: (self.a_plus - mean) / mean,
            cov: self.std_dev() / mean,
        })
    }

    pub fn to_distribution(&self) -> DiscreteDistribution {
        DiscreteDistribution::new(vec![self.a_minus, self.a_plus], vec![1.0 - self.q, self.q])
            .expect("two-point spec is a valid distribution")
    }
}

/// Gaps of a two-point distribution from its mean, in units of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaForm {
    /// `(mean - a_minus) / mean`
    pub delta_minus: f64,
    /// `(a_plus - mean) / mean`
    pub delta_plus: f64,
    pub cov: f64,
}

impl DeltaForm {
    /// Probability of `a_plus`.
    pub fn q(&self) -> f64 {
        self.delta_minus / (self.delta_minus + self.delta_plus)
    }
}

fn check_probability(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::BadProbability(q))
    }
}

fn check_order(n: usize, min: usize) -> Result<()> {
    if (min..=MAX_ORDER).contains(&n) {
        Ok(())
    } else {
        Err(Error::OrderOutOfRange {
            order: n,
            min,
            max: MAX_ORDER,
        })
    }
}

fn check_positive(mean: f64, cov: f64) -> Result<()> {
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(Error::NonPositiveMean(mean));
    }
    if !(cov > 0.0 && cov.is_finite()) {
        return Err(Error::NonPositiveCov(cov));
    }
    Ok(())
}

/// Two-point distribution with the given mean, size ratio `eta = a_plus / a_minus`
/// and probability `q` of the larger value.
pub fn make_bidisperse(mean: f64, eta: f64, q: f64) -> Result<BidisperseSpec> {
    if mean == 0.0 || !mean.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "mean must be finite and non-zero, got {mean}"
        )));
    }
    if !(eta > 1.0 && eta.is_finite()) {
        return Err(Error::BadEta(eta));
    }
    check_probability(q)?;
    let denom = 1.0 - q + eta * q;
    BidisperseSpec::new(mean / denom, eta * mean / denom, q)
}

/// Coefficient of variation and skewness of a two-point distribution.
pub fn cov_skew_of(spec: &BidisperseSpec) -> Result<(f64, f64)> {
    let mean = spec.mean();
    if mean <= 0.0 {
        return Err(Error::NonPositiveMean(mean));
    }
    let q = spec.q;
    let cov = spec.std_dev() / mean;
    let skew = (1.0 - 2.0 * q) / (q - q * q).sqrt();
    Ok((cov, skew))
}

/// The unique two-point distribution with the given mean, coefficient of
/// variation and skewness.
pub fn invert_skew(mean: f64, cov: f64, skew: f64) -> Result<BidisperseSpec> {
    check_positive(mean, cov)?;
    if !skew.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "skewness must be finite, got {skew}"
        )));
    }
    let m3 = (4.0 + skew * skew).sqrt();
    let q = (m3 - skew) / (2.0 * m3);
    let a_plus = mean * (1.0 + 0.5 * cov * (skew + m3));
    let a_minus = mean * (1.0 + 0.5 * cov * (skew - m3));
    BidisperseSpec::new(a_minus, a_plus, q)
}

/// Standardized moment `D_n` of any two-point distribution whose larger
/// value has probability `q`.
pub fn dn_of_q(n: usize, q: f64) -> Result<f64> {
    check_order(n, 3)?;
    check_probability(q)?;
    Ok(dn_of_q_unchecked(n, q))
}

fn dn_of_q_unchecked(n: usize, q: f64) -> f64 {
    let p = 1.0 - q;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let numer = p.powi(n as i32 - 1) + sign * q.powi(n as i32 - 1);
    numer / (q * p).powf(n as f64 / 2.0 - 1.0)
}

/// `D_n` as the alternating power sum `sum_{i=1}^{n-1} (-1)^(n-i+1) z^(2i-n)`,
/// where `z = cov / (1 - a / mean)` for either value `a` of the distribution.
pub fn dn_of_z(n: usize, z: f64) -> Result<f64> {
    check_order(n, 3)?;
    if z == 0.0 {
        return Err(Error::ZeroZ);
    }
    if !z.is_finite() {
        return Err(Error::InvalidArgument(format!("z must be finite, got {z}")));
    }
    Ok(dn_of_z_unchecked(n, z))
}

pub(crate) fn dn_of_z_unchecked(n: usize, z: f64) -> f64 {
    let n = n as i32;
    (1..n)
        .map(|i| {
            let sign = if (n - i + 1) % 2 == 0 { 1.0 } else { -1.0 };
            sign * z.powi(2 * i - n)
        })
        .sum()
}

/// Values `(a_minus, a_plus)` of the two-point distribution with the given
/// mean, coefficient of variation and probability `q` of the larger value.
pub fn endpoints_from_q(mean: f64, cov: f64, q: f64) -> Result<(f64, f64)> {
    check_positive(mean, cov)?;
    check_probability(q)?;
    let a_minus = mean * (1.0 - cov * (q / (1.0 - q)).sqrt());
    let a_plus = mean * (1.0 + cov * ((1.0 - q) / q).sqrt());
    Ok((a_minus, a_plus))
}

/// Number of bracketing intervals scanned by [`construct_with_moment`].
const SCAN_INTERVALS: usize = 1 << 10;
/// The scan is uniform in `ln(q / (1 - q))` over this symmetric range.
const SCAN_LOGIT_RANGE: f64 = 30.0;

/// All two-point distributions with the given mean and coefficient of
/// variation whose standardized moment of order `n` equals `target`,
/// ordered by increasing `q`.
///
/// Skewness is inverted in closed form. Higher orders are solved for `q` by
/// bisection: odd orders have one root, even orders have zero, one (at
/// `q = 1/2`) or two roots mirrored about `q = 1/2`.
pub fn construct_with_moment(
    n: usize,
    mean: f64,
    cov: f64,
    target: f64,
) -> Result<Vec<BidisperseSpec>> {
    check_order(n, 3)?;
    check_positive(mean, cov)?;
    if !target.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "target must be finite, got {target}"
        )));
    }
    if n == 3 {
        return Ok(vec![invert_skew(mean, cov, target)?]);
    }
    if n.is_multiple_of(2) && target < 1.0 {
        return Err(Error::NoSolution { order: n, target });
    }

    let roots = if n.is_multiple_of(2) && target - 1.0 <= 4.0 * f64::EPSILON {
        vec![0.5]
    } else {
        let f = |q: f64| dn_of_q_unchecked(n, q) - target;
        let grid: Vec<f64> = (0..=SCAN_INTERVALS)
            .map(|i| {
                let t = SCAN_LOGIT_RANGE * (2.0 * i as f64 / SCAN_INTERVALS as f64 - 1.0);
                1.0 / (1.0 + (-t).exp())
            })
            .collect();
        root::bracketed_roots(f, &grid, 1e-13)?
    };
    if roots.is_empty() {
        return Err(Error::ConvergenceFailure(format!(
            "D{n} = {target} lies outside the scanned range of q"
        )));
    }
    roots
        .into_iter()
        .map(|q| {
            let (a_minus, a_plus) = endpoints_from_q(mean, cov, q)?;
            BidisperseSpec::new(a_minus, a_plus, q)
        })
        .collect()
}

/// `m_n / mean^n` of the two-point distribution with coefficient of
/// variation `cov` and lower relative gap `delta_minus = (mean - a_minus) / mean`.
pub fn mn_delta(n: usize, cov: f64, delta_minus: f64) -> Result<f64> {
    check_gap_args(n, cov, delta_minus)?;
    let (d2, g2) = (cov * cov, delta_minus * delta_minus);
    let q = g2 / (g2 + d2);
    Ok(q * (d2 / delta_minus).powi(n as i32) + (1.0 - q) * (-delta_minus).powi(n as i32))
}

/// Analytic derivative of [`mn_delta`] with respect to `delta_minus` at fixed `cov`.
pub fn mn_delta_derivative(n: usize, cov: f64, delta_minus: f64) -> Result<f64> {
    check_gap_args(n, cov, delta_minus)?;
    let nf = n as f64;
    let ni = n as i32;
    let (d2, g) = (cov * cov, delta_minus);
    let g2 = g * g;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let lower = sign * d2 * g.powi(ni - 1) * ((nf - 2.0) * g2 + nf * d2);
    let upper = d2.powi(ni) * g.powi(1 - ni) * ((nf - 2.0) * d2 + nf * g2);
    Ok((lower - upper) / (g2 + d2).powi(2))
}

fn check_gap_args(n: usize, cov: f64, delta_minus: f64) -> Result<()> {
    check_order(n, 2)?;
    if !(cov > 0.0 && cov.is_finite()) {
        return Err(Error::NonPositiveCov(cov));
    }
    if !(delta_minus > 0.0 && delta_minus.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "delta_minus must be positive, got {delta_minus}"
        )));
    }
    Ok(())
}
