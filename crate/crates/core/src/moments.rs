//! Exact moment arithmetic on finite discrete distributions.
//!
//! A [`DiscreteDistribution`] is a finite list of support points with
//! probabilities. On construction the points are sorted, near-duplicates
//! are merged and the probabilities are renormalized, so every value of the
//! type is a valid distribution.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest order accepted by [`summarize`].
pub const MAX_ORDER: usize = 16;

/// Tolerance on the probability sum accepted on ingest.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;

/// Probabilities below this are dropped before renormalizing.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-15;

/// Values closer than this (scaled by `max(1, |x|)`) are merged.
pub const MERGE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution", into = "RawDistribution")]
pub struct DiscreteDistribution {
    values: Vec<f64>,
    probabilities: Vec<f64>,
    label: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct RawDistribution {
    values: Vec<f64>,
    probabilities: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

impl TryFrom<RawDistribution> for DiscreteDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        let mut dist = DiscreteDistribution::new(raw.values, raw.probabilities)?;
        dist.label = raw.label;
        Ok(dist)
    }
}

impl From<DiscreteDistribution> for RawDistribution {
    fn from(dist: DiscreteDistribution) -> Self {
        RawDistribution {
            values: dist.values,
            probabilities: dist.probabilities,
            label: dist.label,
        }
    }
}

impl DiscreteDistribution {
    pub fn new(values: Vec<f64>, probabilities: Vec<f64>) -> Result<Self> {
        if values.len() != probabilities.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} values but {} probabilities",
                values.len(),
                probabilities.len()
            )));
        }
        if values.is_empty() {
            return Err(Error::InvalidDistribution("no support points".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValues);
        }
        if let Some(p) = probabilities.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "probability {p} is negative or not finite"
            )));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }

        let mut points: Vec<(f64, f64)> = values
            .into_iter()
            .zip(probabilities)
            .filter(|&(_, p)| p >= NEGLIGIBLE_PROBABILITY)
            .collect();
        if points.is_empty() {
            return Err(Error::InvalidDistribution(
                "all probabilities are negligible".into(),
            ));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(points.len());
        for (x, p) in points {
            match merged.last_mut() {
                Some((y, q)) if (x - *y).abs() <= MERGE_TOLERANCE * y.abs().max(1.0) => {
                    // weighted average keeps the mean unchanged
                    *y = (*y * *q + x * p) / (*q + p);
                    *q += p;
                }
                _ => merged.push((x, p)),
            }
        }

        let total: f64 = merged.iter().map(|&(_, p)| p).sum();
        let (values, probabilities) = merged.into_iter().map(|(x, p)| (x, p / total)).unzip();
        Ok(Self {
            values,
            probabilities,
            label: None,
        })
    }

    /// A distribution with all mass at `value`.
    pub fn point(value: f64) -> Result<Self> {
        Self::new(vec![value], vec![1.0])
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Support points in ascending order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Number of distinct support points.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .copied()
            .zip(self.probabilities.iter().copied())
    }

    /// Mean, refined by one correction pass over the centered values.
    pub fn mean(&self) -> f64 {
        let rough: f64 = self.iter().map(|(x, p)| p * x).sum();
        rough + self.iter().map(|(x, p)| p * (x - rough)).sum::<f64>()
    }

    /// Central moment `E[(x - mean)^n]`.
    pub fn central_moment(&self, n: i32) -> f64 {
        let mean = self.mean();
        self.central_moment_about(mean, n)
    }

    fn central_moment_about(&self, mean: f64, n: i32) -> f64 {
        self.iter().map(|(x, p)| p * (x - mean).powi(n)).sum()
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSummary {
    pub mean: f64,
    pub std_dev: f64,
    /// Coefficient of variation `std_dev / mean`; absent when the mean is zero.
    pub cov: Option<f64>,
    /// Central moments `m_1 ..= m_max_order`.
    pub central_moments: Vec<f64>,
    /// Standardized moments `D_3 ..= D_max_order`.
    pub standardized_moments: Vec<f64>,
}

impl MomentSummary {
    pub fn max_order(&self) -> usize {
        self.central_moments.len()
    }

    /// Central moment of order `n`, if it was computed.
    pub fn central(&self, n: usize) -> Option<f64> {
        n.checked_sub(1)
            .and_then(|i| self.central_moments.get(i))
            .copied()
    }

    /// Standardized moment of order `n >= 3`, if it was computed.
    pub fn standardized(&self, n: usize) -> Option<f64> {
        n.checked_sub(3)
            .and_then(|i| self.standardized_moments.get(i))
            .copied()
    }

    pub fn skewness(&self) -> Option<f64> {
        self.standardized(3)
    }

    pub fn kurtosis(&self) -> Option<f64> {
        self.standardized(4)
    }
}

/// Mean, spread and central/standardized moments up to `max_order`.
///
/// Centered sums are taken about the mean directly rather than expanded
/// from raw moments.
pub fn summarize(dist: &DiscreteDistribution, max_order: usize) -> Result<MomentSummary> {
    if !(2..=MAX_ORDER).contains(&max_order) {
        return Err(Error::OrderOutOfRange {
            order: max_order,
            min: 2,
            max: MAX_ORDER,
        });
    }
    let mean = dist.mean();
    let central_moments: Vec<f64> = (1..=max_order as i32)
        .map(|n| dist.central_moment_about(mean, n))
        .collect();
    let m2 = central_moments[1].max(0.0);
    let std_dev = m2.sqrt();

    let standardized_moments = if max_order >= 3 {
        if m2 <= 0.0 {
            return Err(Error::DegenerateDistribution);
        }
        central_moments[2..]
            .iter()
            .enumerate()
            .map(|(i, m)| m / m2.powf((i + 3) as f64 / 2.0))
            .collect()
    } else {
        Vec::new()
    };

    Ok(MomentSummary {
        mean,
        std_dev,
        cov: (mean != 0.0).then(|| std_dev / mean),
        central_moments,
        standardized_moments,
    })
}

/// Pools `(distribution, weight)` pairs into one distribution.
pub fn mixture(components: &[(DiscreteDistribution, f64)]) -> Result<DiscreteDistribution> {
    if components.is_empty() {
        return Err(Error::EmptyMixture);
    }
    if let Some((_, w)) = components.iter().find(|(_, w)| !w.is_finite() || *w < 0.0) {
        return Err(Error::BadWeights(format!(
            "weight {w} is negative or not finite"
        )));
    }
    let total: f64 = components.iter().map(|(_, w)| w).sum();
    if (total - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
        return Err(Error::BadWeights(format!("weights sum to {total}, not 1")));
    }

    let (values, probabilities) = components
        .iter()
        .filter(|(_, w)| *w > 0.0)
        .flat_map(|(dist, w)| dist.iter().map(move |(x, p)| (x, w * p)))
        .unzip();
    DiscreteDistribution::new(values, probabilities)
}

/// Maps every value `x` to `scale * x + shift`.
pub fn affine_transform(
    dist: &DiscreteDistribution,
    scale: f64,
    shift: f64,
) -> Result<DiscreteDistribution> {
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::ZeroScale);
    }
    if !shift.is_finite() {
        return Err(Error::NonFiniteValues);
    }
    let values = dist.values.iter().map(|x| scale * x + shift).collect();
    let mut out = DiscreteDistribution::new(values, dist.probabilities.clone())?;
    out.label = dist.label.clone();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(values: &[f64], probs: &[f64]) -> DiscreteDistribution {
        DiscreteDistribution::new(values.to_vec(), probs.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn symmetric_two_point() {
        let s = summarize(&dist(&[0.0, 2.0], &[0.5, 0.5]), 4).unwrap();
        assert_eq!(s.mean, 1.0);
        assert_eq!(s.std_dev, 1.0);
        assert_eq!(s.cov, Some(1.0));
        assert_eq!(s.skewness(), Some(0.0));
        assert_eq!(s.kurtosis(), Some(1.0));
    }

    #[test]
    fn skewed_two_point() {
        // direct evaluation: m2 = 0.75, m3 = 0.75, m4 = 1.3125, m5 = 1.875
        let s = summarize(&dist(&[1.0, 3.0], &[0.75, 0.25]), 5).unwrap();
        assert!(close(s.mean, 1.5, 1e-15));
        assert!(close(s.cov.unwrap(), 0.75f64.sqrt() / 1.5, 1e-14));
        assert!(close(s.central(3).unwrap(), 0.75, 1e-14));
        assert!(close(
            s.skewness().unwrap(),
            0.75 / 0.75f64.powf(1.5),
            1e-14
        ));
        assert!(close(s.skewness().unwrap(), 1.1547005383792515, 1e-14));
        assert!(close(s.kurtosis().unwrap(), 1.3125 / 0.5625, 1e-14));
        assert!(close(s.standardized(5).unwrap(), 3.849001794597505, 1e-13));
    }

    #[test]
    fn single_point_is_degenerate() {
        let d = DiscreteDistribution::point(5.0).unwrap();
        let s = summarize(&d, 2).unwrap();
        assert_eq!(s.mean, 5.0);
        assert_eq!(s.std_dev, 0.0);
        assert!(matches!(
            summarize(&d, 3),
            Err(Error::DegenerateDistribution)
        ));
    }

    #[test]
    fn order_limits() {
        let d = dist(&[0.0, 1.0], &[0.5, 0.5]);
        assert!(matches!(
            summarize(&d, 1),
            Err(Error::OrderOutOfRange { .. })
        ));
        assert!(matches!(
            summarize(&d, 17),
            Err(Error::OrderOutOfRange { .. })
        ));
        assert!(summarize(&d, 16).is_ok());
    }

    #[test]
    fn zero_mean_has_no_cov() {
        let s = summarize(&dist(&[-1.0, 1.0], &[0.5, 0.5]), 3).unwrap();
        assert_eq!(s.cov, None);
    }

    #[test]
    fn ingest_merges_and_renormalizes() {
        let d = dist(
            &[2.0, 1.0, 2.0 + 1e-14, 7.0],
            &[0.25, 0.25, 0.25, 0.25 + 5e-10],
        );
        assert_eq!(d.len(), 3);
        assert_eq!(d.values()[0], 1.0);
        assert!(close(d.probabilities()[1], 0.5, 1e-9));
        let sum: f64 = d.probabilities().iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ingest_drops_negligible_mass() {
        let d = dist(&[0.0, 1.0, 2.0], &[0.5, 1e-16, 0.5]);
        assert_eq!(d.values(), &[0.0, 2.0]);
    }

    #[test]
    fn ingest_rejects_garbage() {
        let bad = |v: &[f64], p: &[f64]| DiscreteDistribution::new(v.to_vec(), p.to_vec());
        assert!(matches!(bad(&[], &[]), Err(Error::InvalidDistribution(_))));
        assert!(matches!(
            bad(&[1.0], &[0.5, 0.5]),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(matches!(
            bad(&[1.0, 2.0], &[0.5, 0.6]),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(matches!(
            bad(&[1.0, 2.0], &[1.5, -0.5]),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(matches!(
            bad(&[f64::NAN], &[1.0]),
            Err(Error::NonFiniteValues)
        ));
    }

    #[test]
    fn json_round_trip_keeps_label() {
        let text = r#"{"values":[3,1],"probabilities":[0.25,0.75],"label":"canonical"}"#;
        let d: DiscreteDistribution = serde_json::from_str(text).unwrap();
        assert_eq!(d.values(), &[1.0, 3.0]);
        assert_eq!(d.label(), Some("canonical"));
        let back = serde_json::to_string(&d).unwrap();
        assert_eq!(
            back,
            r#"{"values":[1.0,3.0],"probabilities":[0.75,0.25],"label":"canonical"}"#
        );
        let bad = r#"{"values":[1,2],"probabilities":[0.2,0.2]}"#;
        assert!(serde_json::from_str::<DiscreteDistribution>(bad).is_err());
    }

    #[test]
    fn mixture_identity_and_pooling() {
        let p = dist(&[1.0, 3.0], &[0.75, 0.25]);
        assert_eq!(mixture(&[(p.clone(), 1.0)]).unwrap(), p);

        let m = mixture(&[
            (dist(&[0.0, 2.0], &[0.5, 0.5]), 0.5),
            (DiscreteDistribution::point(1.0).unwrap(), 0.5),
        ])
        .unwrap();
        assert_eq!(m.values(), &[0.0, 1.0, 2.0]);
        assert_eq!(m.probabilities(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn mixture_errors() {
        assert!(matches!(mixture(&[]), Err(Error::EmptyMixture)));
        let p = dist(&[0.0, 1.0], &[0.5, 0.5]);
        assert!(matches!(
            mixture(&[(p.clone(), 0.7)]),
            Err(Error::BadWeights(_))
        ));
        assert!(matches!(
            mixture(&[(p.clone(), 1.5), (p, -0.5)]),
            Err(Error::BadWeights(_))
        ));
    }

    #[test]
    fn mixture_third_moment_is_additive_at_equal_means() {
        let r = dist(&[0.0, 2.0], &[0.5, 0.5]);
        let s = dist(&[0.5, 3.0], &[0.8, 0.2]);
        let alpha = 0.3;
        let t = mixture(&[(r.clone(), alpha), (s.clone(), 1.0 - alpha)]).unwrap();
        let m3 = |d: &DiscreteDistribution| summarize(d, 3).unwrap().central(3).unwrap();
        assert!(close(t.mean(), 1.0, 1e-15));
        assert!(close(
            m3(&t),
            alpha * m3(&r) + (1.0 - alpha) * m3(&s),
            1e-13
        ));
    }

    #[test]
    fn affine_maps() {
        let p = dist(&[1.0, 3.0], &[0.75, 0.25]);
        assert_eq!(affine_transform(&p, 1.0, 0.0).unwrap(), p);

        let shifted = affine_transform(&p, 2.0, 5.0).unwrap();
        assert_eq!(shifted.values(), &[7.0, 11.0]);
        assert_eq!(shifted.probabilities(), &[0.75, 0.25]);
        let d3 = summarize(&shifted, 3).unwrap().skewness().unwrap();
        assert!(close(d3, 1.1547005383792515, 1e-13));

        let reflected = summarize(&affine_transform(&p, -1.0, 0.0).unwrap(), 4).unwrap();
        assert!(close(
            reflected.skewness().unwrap(),
            -1.1547005383792515,
            1e-13
        ));
        assert!(close(reflected.kurtosis().unwrap(), 7.0 / 3.0, 1e-13));

        assert!(matches!(
            affine_transform(&p, 0.0, 1.0),
            Err(Error::ZeroScale)
        ));
    }
}
