use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("distribution contains non-finite values")]
    NonFiniteValues,
    #[error("distribution has zero variance; standardized moments are undefined")]
    DegenerateDistribution,
    #[error("order {order} is outside the supported range {min}..={max}")]
    OrderOutOfRange {
        order: usize,
        min: usize,
        max: usize,
    },
    #[error("mixture has no components")]
    EmptyMixture,
    #[error("bad mixture weights: {0}")]
    BadWeights(String),
    #[error("affine scale factor must be finite and non-zero")]
    ZeroScale,

    #[error("size ratio must exceed 1 (got {0}); use (1/eta, 1-q) instead")]
    BadEta(f64),
    #[error("probability must lie strictly inside (0, 1) (got {0})")]
    BadProbability(f64),
    #[error("invalid two-point distribution: {0}")]
    InvalidBidisperse(String),
    #[error("mean must be positive (got {0})")]
    NonPositiveMean(f64),
    #[error("coefficient of variation must be positive (got {0})")]
    NonPositiveCov(f64),
    #[error("argument z must be non-zero")]
    ZeroZ,
    #[error("no two-point distribution has D{order} = {target}")]
    NoSolution { order: usize, target: f64 },
    #[error("root search failed: {0}")]
    ConvergenceFailure(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid support bounds: {0}")]
    InvalidSupport(String),
    #[error("mean {mean} does not lie strictly inside the support")]
    MeanOutsideSupport { mean: f64 },
    #[error("spread is infeasible: variance {variance} exceeds the maximum {max_variance} allowed by the support")]
    InfeasibleSpread { variance: f64, max_variance: f64 },

    #[error("operation needs at least {needed} distinct points (got {got})")]
    TooFewPoints { needed: usize, got: usize },
    #[error("too many support points for decomposition ({got} > {max})")]
    TooManyPoints { got: usize, max: usize },
    #[error("expected exactly three distinct points (got {0})")]
    NotThreePoints(usize),
    #[error("all probability mass sits at the mean")]
    MeanDegenerate,

    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),
    #[error("no admissible sample after {attempts} attempts")]
    SamplingExhausted { attempts: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}
