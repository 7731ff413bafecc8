//! Standardized moments of discrete distributions and the limits bounded
//! support places on them.
//!
//! - [`moments`]: central and standardized moments, mixtures, affine maps.
//! - [`bidisperse`]: the two-point family, its closed forms and inverses.
//! - [`bounds`]: skewness and kurtosis limits from the mean, spread and
//!   support, plus the conjectured limits for orders 5 to 16.
//! - [`decompose`]: splitting a distribution into two-point pieces that
//!   share its mean.
//! - [`sweep`]: a seeded Monte Carlo check of the limits.
//! - [`cli`]: the `moment-bounds` command line.

// `!(x > 0.0)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bidisperse;
pub mod bounds;
pub mod cli;
pub mod decompose;
pub mod error;
pub mod moments;
pub mod root;
pub mod sweep;

pub use bidisperse::{
    construct_with_moment, cov_skew_of, dn_of_q, dn_of_z, endpoints_from_q, invert_skew,
    make_bidisperse, mn_delta, mn_delta_derivative, BidisperseSpec, DeltaForm,
};
pub use bounds::{
    d3_limits, d4_limits, dn_conjectured_limits, limits, pearson_floor, relative_spread,
    BoundInput, BoundStatus, DeltaParams, MomentBoundReport, Side, SupportBounds,
};
pub use decompose::{
    decompose, merge_last_two, recompose, split_three_point, MixtureDecomposition, Piece,
    WeightedPiece,
};
pub use error::{Error, Result};
pub use moments::{affine_transform, mixture, summarize, DiscreteDistribution, MomentSummary};
pub use sweep::{
    run_sweep, run_sweep_with_threads, sample_constrained, write_report, Family, SweepConfig,
    SweepOutcome, SweepRecord,
};
