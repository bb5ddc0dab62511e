use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Error, Debug)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinates must be finite, found {value} at index {index}")]
    NonFiniteCoordinate { index: usize, value: f64 },

    #[error("the zero element has no maximum certificate")]
    ZeroCoefficients,

    #[error("grid resolution must be at least 3, got {0}")]
    ResolutionTooSmall(usize),

    #[error(
        "grid budget exceeded: {requested} points requested, budget is {budget}; lower the resolution"
    )]
    GridBudgetExceeded { requested: usize, budget: usize },

    #[error("point evaluation budget exceeded: {requested} > {budget}")]
    EvalBudgetExceeded { requested: usize, budget: usize },

    #[error("dimension {0} is out of range (1..={1})")]
    DimOutOfRange(usize, usize),

    #[error("point lies on the unit sphere (|y| = 1); interior strictness is undefined there")]
    PointOnUnitSphere,

    #[error(
        "basis is numerically dependent: smallest singular value {smallest_sv:e} is below {threshold:e}"
    )]
    GramRankDeficient { smallest_sv: f64, threshold: f64 },

    #[error("grid cannot separate basis; raise resolution (probe sup-norm {0:e})")]
    GridCannotSeparate(f64),

    #[error("probed element is not alternating on the grid; coefficients {0:?}")]
    NotAlternating(Vec<f64>),

    #[error("sign bounds do not straddle zero: sup_min = {sup_min}, inf_max = {inf_max}")]
    SignBoundsInvalid { sup_min: f64, inf_max: f64 },

    #[error(
        "decay envelope of basis function {index} is too slow: cannot certify tail bound {target:e} within radius budget {radius_budget:e}"
    )]
    EnvelopeTooSlow {
        index: usize,
        target: f64,
        radius_budget: f64,
    },

    #[error(
        "a posteriori tail check failed: |g| reached {observed:e} beyond radius {radius}, bound was {bound:e}"
    )]
    TailCheckFailed {
        radius: f64,
        observed: f64,
        bound: f64,
    },

    #[error("sampled nonnegative cone is not pointed (contains a line); the grid is too coarse")]
    ConeNotPointed,

    #[error("cone separation search budget exhausted after {retries} retries; {detail}")]
    SeparationBudgetExhausted { retries: usize, detail: String },

    #[error("subspace dimension {dim} is too small: {required}")]
    SubspaceTooSmall { dim: usize, required: String },

    #[error("Gram rank dropped after restriction to the ball of radius {radius}; raise the radius or the table resolution")]
    RankDropAfterRestriction { radius: f64 },

    #[error("falsification budget must be at least 10, got {0}")]
    BudgetTooSmall(usize),

    #[error("the conjecture probe requires ambient dimension >= 2, got {0}")]
    ConjectureDimTooSmall(usize),

    #[error("unknown candidate family '{0}'")]
    UnknownFamily(String),

    #[error("empty grid")]
    EmptyGrid,

    #[error("invalid subspace spec: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
