//! Decomposition of a finite discrete distribution into a mixture of
//! two-point distributions that all share its mean.
//!
//! The reduction merges the two largest support points into their
//! conditional mean, decomposes the smaller distribution, and then expands
//! every piece that uses the merged point back into a three-point
//! distribution, which splits into two two-point pieces.

use std::cmp::Ordering;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::bidisperse::BidisperseSpec;
use crate::error::{Error, Result};
use crate::moments::{mixture, DiscreteDistribution, MERGE_TOLERANCE};

/// Largest number of support points [`decompose`] accepts.
pub const MAX_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    TwoPoint(BidisperseSpec),
    /// All mass at the mean.
    Point(f64),
}

impl Piece {
    pub fn to_distribution(&self) -> DiscreteDistribution {
        match self {
            Piece::TwoPoint(spec) => spec.to_distribution(),
            Piece::Point(x) => DiscreteDistribution::point(*x).expect("finite point"),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Piece::TwoPoint(spec) => spec.mean(),
            Piece::Point(x) => *x,
        }
    }

    fn support(&self) -> (f64, f64) {
        match self {
            Piece::TwoPoint(spec) => (spec.a_minus(), spec.a_plus()),
            Piece::Point(x) => (*x, *x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedPiece {
    pub piece: Piece,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureDecomposition {
    pub mean: f64,
    pub components: Vec<WeightedPiece>,
}

impl MixtureDecomposition {
    pub fn total_weight(&self) -> f64 {
        self.components.iter().map(|c| c.weight).sum()
    }

    pub fn to_json_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = serde_json::to_string_pretty(self).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        text.push('\n');
        fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

impl Serialize for MixtureDecomposition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Component {
            values: Vec<f64>,
            probabilities: Vec<f64>,
            weight: f64,
        }
        #[derive(Serialize)]
        struct Doc {
            mean: f64,
            components: Vec<Component>,
        }
        let components = self
            .components
            .iter()
            .map(|c| {
                let (values, probabilities) = match c.piece {
                    Piece::TwoPoint(spec) => (
                        vec![spec.a_minus(), spec.a_plus()],
                        vec![1.0 - spec.q(), spec.q()],
                    ),
                    Piece::Point(x) => (vec![x], vec![1.0]),
                };
                Component {
                    values,
                    probabilities,
                    weight: c.weight,
                }
            })
            .collect();
        Doc {
            mean: self.mean,
            components,
        }
        .serialize(s)
    }
}

fn distinct_points(dist: &DiscreteDistribution, needed: usize) -> Result<Vec<(f64, f64)>> {
    let points: Vec<(f64, f64)> = dist.iter().collect();
    if points.len() < needed {
        return Err(Error::TooFewPoints {
            needed,
            got: points.len(),
        });
    }
    Ok(points)
}

/// Replaces the two largest support points by their conditional mean,
/// carrying their combined probability. The mean is unchanged.
pub fn merge_last_two(dist: &DiscreteDistribution) -> Result<DiscreteDistribution> {
    let mut points = distinct_points(dist, 3)?;
    let (a, pa) = points.pop().expect("checked length");
    let (b, pb) = points.pop().expect("checked length");
    points.push(merged_point((b, pb), (a, pa)));
    let (values, probabilities) = points.into_iter().unzip();
    DiscreteDistribution::new(values, probabilities)
}

fn merged_point((b, pb): (f64, f64), (a, pa): (f64, f64)) -> (f64, f64) {
    let p = pb + pa;
    ((pb / p) * b + (pa / p) * a, p)
}

/// Splits a three-point distribution into two pieces with its mean.
pub fn split_three_point(dist: &DiscreteDistribution) -> Result<MixtureDecomposition> {
    let points: Vec<(f64, f64)> = dist.iter().collect();
    if points.len() != 3 {
        return Err(Error::NotThreePoints(points.len()));
    }
    let mean = dist.mean();
    let pieces = split_three(mean, [points[0], points[1], points[2]])?;
    Ok(MixtureDecomposition {
        mean,
        components: canonical(pieces),
    })
}

fn at_mean(x: f64, mean: f64) -> bool {
    (x - mean).abs() <= MERGE_TOLERANCE * mean.abs().max(1.0)
}

/// Two-point piece on `lo < mean < hi` with the given mean.
fn straddle(lo: f64, hi: f64, mean: f64) -> Result<BidisperseSpec> {
    BidisperseSpec::new(lo, hi, (mean - lo) / (hi - lo))
}

/// Splits ascending points `a1 < a2 < a3` with mean `mean`. The outer pair
/// always forms one piece; the middle point pairs with whichever outer
/// point lies across the mean, or stands alone when it sits at the mean.
fn split_three(
    mean: f64,
    [(a1, p1), (a2, p2), (a3, p3)]: [(f64, f64); 3],
) -> Result<Vec<WeightedPiece>> {
    if !(a1 < mean && mean < a3) {
        return Err(Error::MeanDegenerate);
    }
    let outer = straddle(a1, a3, mean)?;
    let (outer_weight, middle) = if at_mean(a2, mean) {
        (
            p1 / (1.0 - outer.q()),
            WeightedPiece {
                piece: Piece::Point(a2),
                weight: p2,
            },
        )
    } else if a2 < mean {
        let inner = straddle(a2, a3, mean)?;
        let weight = p2 / (1.0 - inner.q());
        (
            p1 / (1.0 - outer.q()),
            WeightedPiece {
                piece: Piece::TwoPoint(inner),
                weight,
            },
        )
    } else {
        let inner = straddle(a1, a2, mean)?;
        let weight = p2 / inner.q();
        (
            p3 / outer.q(),
            WeightedPiece {
                piece: Piece::TwoPoint(inner),
                weight,
            },
        )
    };
    let mut pieces = vec![
        WeightedPiece {
            piece: Piece::TwoPoint(outer),
            weight: outer_weight,
        },
        middle,
    ];
    // the weights add to one up to rounding
    let total: f64 = pieces.iter().map(|p| p.weight).sum();
    for p in &mut pieces {
        p.weight /= total;
    }
    Ok(pieces)
}

/// Decomposes a distribution with at least two distinct points into a
/// mixture of two-point pieces (plus a single point for any mass sitting
/// exactly at the mean).
pub fn decompose(dist: &DiscreteDistribution) -> Result<MixtureDecomposition> {
    let points = distinct_points(dist, 2)?;
    if points.len() > MAX_POINTS {
        return Err(Error::TooManyPoints {
            got: points.len(),
            max: MAX_POINTS,
        });
    }
    if points.iter().any(|(x, p)| !x.is_finite() || !p.is_finite()) {
        return Err(Error::NonFiniteValues);
    }
    let mean = dist.mean();
    let pieces = decompose_points(mean, &points)?;
    Ok(MixtureDecomposition {
        mean,
        components: canonical(pieces),
    })
}

fn decompose_points(mean: f64, points: &[(f64, f64)]) -> Result<Vec<WeightedPiece>> {
    match points.len() {
        0 | 1 => Err(Error::TooFewPoints {
            needed: 2,
            got: points.len(),
        }),
        2 => {
            let (lo, hi) = (points[0].0, points[1].0);
            if !(lo < mean && mean < hi) {
                return Err(Error::MeanDegenerate);
            }
            Ok(vec![WeightedPiece {
                piece: Piece::TwoPoint(straddle(lo, hi, mean)?),
                weight: 1.0,
            }])
        }
        3 => split_three(mean, [points[0], points[1], points[2]]),
        k => {
            let (a, pa) = points[k - 1];
            let (b, pb) = points[k - 2];
            let merged = merged_point((b, pb), (a, pa));
            let share_b = pb / (pa + pb);

            let mut reduced = points[..k - 2].to_vec();
            reduced.push(merged);
            let mut out = Vec::new();
            for wp in decompose_points(mean, &reduced)? {
                let Piece::TwoPoint(spec) = wp.piece else {
                    out.push(wp);
                    continue;
                };
                if spec.a_plus() != merged.0 {
                    out.push(wp);
                    continue;
                }
                // the merged point is always the largest, so it is a_plus
                let lo = (spec.a_minus(), 1.0 - spec.q());
                let mass = spec.q();
                let expanded = [lo, (b, mass * share_b), (a, mass * (1.0 - share_b))];
                for inner in split_three(mean, expanded)? {
                    out.push(WeightedPiece {
                        piece: inner.piece,
                        weight: inner.weight * wp.weight,
                    });
                }
            }
            Ok(merge_same_support(out))
        }
    }
}

fn support_order(a: &WeightedPiece, b: &WeightedPiece) -> Ordering {
    let (a0, a1) = a.piece.support();
    let (b0, b1) = b.piece.support();
    a0.total_cmp(&b0).then(a1.total_cmp(&b1))
}

/// Pieces on the same support with the same mean are identical, so their
/// weights can be pooled.
fn merge_same_support(mut pieces: Vec<WeightedPiece>) -> Vec<WeightedPiece> {
    pieces.sort_by(support_order);
    let mut out: Vec<WeightedPiece> = Vec::with_capacity(pieces.len());
    for wp in pieces {
        match out.last_mut() {
            Some(last) if last.piece.support() == wp.piece.support() => last.weight += wp.weight,
            _ => out.push(wp),
        }
    }
    out
}

fn canonical(pieces: Vec<WeightedPiece>) -> Vec<WeightedPiece> {
    merge_same_support(pieces)
        .into_iter()
        .filter(|wp| wp.weight > 0.0)
        .collect()
}

/// Pools the pieces of a decomposition back into one distribution.
pub fn recompose(decomposition: &MixtureDecomposition) -> Result<DiscreteDistribution> {
    let components: Vec<(DiscreteDistribution, f64)> = decomposition
        .components
        .iter()
        .map(|c| (c.piece.to_distribution(), c.weight))
        .collect();
    mixture(&components)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(values: &[f64], probs: &[f64]) -> DiscreteDistribution {
        DiscreteDistribution::new(values.to_vec(), probs.to_vec()).unwrap()
    }

    fn two_point(c: &WeightedPiece) -> BidisperseSpec {
        match c.piece {
            Piece::TwoPoint(s) => s,
            Piece::Point(_) => panic!("expected a two-point piece"),
        }
    }

    fn assert_reproduces(d: &DiscreteDistribution, dec: &MixtureDecomposition) {
        let back = recompose(dec).unwrap();
        assert_eq!(back.len(), d.len());
        for ((x, p), (y, r)) in d.iter().zip(back.iter()) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "{x} vs {y}");
            assert!((p - r).abs() <= 1e-12, "{p} vs {r}");
        }
    }

    #[test]
    fn merge_preserves_mean() {
        let d = dist(&[0.0, 1.0, 2.0], &[0.25, 0.5, 0.25]);
        let m = merge_last_two(&d).unwrap();
        assert_eq!(m.values(), &[0.0, 4.0 / 3.0]);
        assert_eq!(m.probabilities(), &[0.25, 0.75]);
        assert!((m.mean() - 1.0).abs() < 1e-15);
        assert!(matches!(
            merge_last_two(&m),
            Err(Error::TooFewPoints { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn repeated_merging_stops_at_three_points() {
        let mut d = dist(
            &[0.0, 1.0, 2.0, 3.0, 4.0, 9.0],
            &[0.1, 0.2, 0.3, 0.2, 0.1, 0.1],
        );
        let mean = d.mean();
        while d.len() > 3 {
            d = merge_last_two(&d).unwrap();
        }
        assert_eq!(d.len(), 3);
        assert!((d.mean() - mean).abs() < 1e-14);
        assert!((mean - 2.7).abs() < 1e-14);
    }

    #[test]
    fn split_with_middle_point_at_mean() {
        let dec = split_three_point(&dist(&[0.0, 1.0, 2.0], &[0.25, 0.5, 0.25])).unwrap();
        assert_eq!(dec.components.len(), 2);
        let outer = two_point(&dec.components[0]);
        assert_eq!(
            (outer.a_minus(), outer.a_plus(), outer.q()),
            (0.0, 2.0, 0.5)
        );
        assert_eq!(dec.components[0].weight, 0.5);
        assert_eq!(dec.components[1].piece, Piece::Point(1.0));
        assert_eq!(dec.components[1].weight, 0.5);
    }

    #[test]
    fn split_symmetric_around_zero() {
        let third = 1.0 / 3.0;
        let dec = split_three_point(&dist(&[-1.0, 0.0, 1.0], &[third, third, third])).unwrap();
        let outer = two_point(&dec.components[0]);
        assert_eq!((outer.a_minus(), outer.a_plus()), (-1.0, 1.0));
        assert!((outer.q() - 0.5).abs() < 1e-15);
        assert!((dec.components[0].weight - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(dec.components[1].piece, Piece::Point(0.0));
        assert!((dec.components[1].weight - third).abs() < 1e-15);
    }

    #[test]
    fn split_both_orientations() {
        // middle point below the mean (mean 1.1) and above it (mean 0.6)
        for d in [
            dist(&[0.0, 1.0, 4.0], &[0.5, 0.3, 0.2]),
            dist(&[0.0, 1.0, 1.5], &[0.5, 0.4, 0.1]),
        ] {
            let dec = split_three_point(&d).unwrap();
            assert_eq!(dec.components.len(), 2);
            for c in &dec.components {
                let s = two_point(c);
                assert!(s.a_minus() < dec.mean && dec.mean < s.a_plus());
                assert!((s.mean() - dec.mean).abs() < 1e-15);
            }
            assert_reproduces(&d, &dec);
        }
    }

    #[test]
    fn split_needs_three_points() {
        let d = dist(&[0.0, 1.0], &[0.5, 0.5]);
        assert!(matches!(
            split_three_point(&d),
            Err(Error::NotThreePoints(2))
        ));
    }

    #[test]
    fn decompose_small_inputs() {
        let d = dist(&[1.0, 3.0], &[0.75, 0.25]);
        let dec = decompose(&d).unwrap();
        assert_eq!(dec.components.len(), 1);
        assert_eq!(dec.components[0].weight, 1.0);
        assert_eq!(recompose(&dec).unwrap(), d);

        let d = dist(&[0.0, 1.0, 2.0], &[0.25, 0.5, 0.25]);
        assert_eq!(decompose(&d).unwrap(), split_three_point(&d).unwrap());

        let p = DiscreteDistribution::point(2.0).unwrap();
        assert!(matches!(
            decompose(&p),
            Err(Error::TooFewPoints { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn decompose_eight_points() {
        let d = dist(
            &[-3.0, -1.0, 0.0, 0.5, 2.0, 2.5, 4.0, 7.0],
            &[0.05, 0.2, 0.1, 0.15, 0.2, 0.1, 0.15, 0.05],
        );
        let dec = decompose(&d).unwrap();
        assert!((dec.total_weight() - 1.0).abs() < 1e-12);
        for c in &dec.components {
            assert!((c.piece.mean() - dec.mean).abs() <= 1e-12 * dec.mean.abs().max(1.0));
            assert!(c.weight > 0.0);
        }
        assert_reproduces(&d, &dec);
    }

    #[test]
    fn recompose_empty_is_an_error() {
        let empty = MixtureDecomposition {
            mean: 0.0,
            components: vec![],
        };
        assert!(matches!(recompose(&empty), Err(Error::EmptyMixture)));
    }

    #[test]
    fn too_many_points() {
        let n = MAX_POINTS + 1;
        let d =
            DiscreteDistribution::new((0..n).map(|i| i as f64).collect(), vec![1.0 / n as f64; n])
                .unwrap();
        assert!(matches!(decompose(&d), Err(Error::TooManyPoints { .. })));
    }

    #[test]
    fn json_layout() {
        let dec = decompose(&dist(&[0.0, 1.0, 2.0], &[0.25, 0.5, 0.25])).unwrap();
        let text = serde_json::to_string(&dec).unwrap();
        assert_eq!(
            text,
            r#"{"mean":1.0,"components":[{"values":[0.0,2.0],"probabilities":[0.5,0.5],"weight":0.5},{"values":[1.0],"probabilities":[1.0],"weight":0.5}]}"#
        );
    }
}
