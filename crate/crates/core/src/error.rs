use thiserror::Error;

/// Error type shared by all toolkit modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parity violation: {0}")]
    Parity(String),

    #[error("epsilon out of range: {0}")]
    EpsilonOutOfRange(String),

    #[error("matrix is not orthogonal within tolerance {tol}: deviation {deviation}")]
    NonOrthogonalMatrix { deviation: f64, tol: f64 },

    #[error("{0} is not a root of unity of the required order")]
    NotRootOfUnity(String),

    #[error("point does not lie on the requested space: {0}")]
    PointNotOnSpace(String),

    #[error("rotation angle must lie strictly between 0 and 1 (isolated fixed point): got {0}")]
    ZeroAngle(String),

    #[error("angle denominator {got} exceeds the configured bound {bound}")]
    DenominatorBound { got: i64, bound: i64 },

    #[error(
        "fixed point formula with nonvanishing index is not supported; \
         the equivariant assembly requires the positive-scalar-curvature vanishing regime \
         (set assert_psc_vanishing after checking that the index and kernel terms vanish)"
    )]
    PscVanishingRequired,

    #[error("duplicate fixed point id: {0}")]
    DuplicateFixedPointId(String),

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("value is not rational: {0}")]
    NotRational(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("chart invariant violated: {0}")]
    ChartInvariant(String),

    #[error("rank-deficient input: {0}")]
    RankDeficient(String),

    #[error("plane is degenerate (linearly dependent vectors)")]
    DependentVectors,

    #[error("chart does not supply a sectional-curvature callback")]
    MissingCurvature,

    #[error("empty chart list")]
    EmptyCharts,

    #[error("empty list of eta values")]
    EmptyEtas,

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("division by zero in exact arithmetic")]
    DivisionByZero,

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
