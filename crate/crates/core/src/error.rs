use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode {mode} lies outside the cutoff window [-{cutoff}, {cutoff}]")]
    CutoffViolation { mode: i64, cutoff: usize },

    #[error("grid of {points} points cannot resolve cutoff {cutoff} (need at least {needed})")]
    Aliasing {
        points: usize,
        cutoff: usize,
        needed: usize,
    },

    #[error("empty sample block")]
    EmptySamples,

    #[error("exponent {0} is outside [1, inf]")]
    InvalidExponent(f64),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: usize, right: usize },

    #[error("operator is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("projection window {window} exceeds operator cutoff {cutoff}")]
    WindowTooLarge { window: usize, cutoff: usize },

    #[error("{what}: size {size} exceeds budget {budget}")]
    BudgetExceeded {
        what: &'static str,
        size: usize,
        budget: usize,
    },

    #[error("{what} did not converge (last {last:e}, previous {previous:e})")]
    Convergence {
        what: &'static str,
        last: f64,
        previous: f64,
    },

    #[error("the zero shift (0, 0) is excluded")]
    ZeroShift,

    #[error("degenerate lattice row k = {k} for alpha = {alpha}")]
    DegenerateRow { k: i64, alpha: i64 },

    #[error("divisor count of zero is undefined")]
    ZeroDivisorArgument,

    #[error("scaling fit needs positive values, got {0}")]
    NonPositive(f64),

    #[error("scaling fit needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("unsupported dimension {0} (supported: 2, 3)")]
    UnsupportedDimension(usize),

    #[error("requested {requested} orthonormal vectors in a space of dimension {dimension}")]
    DimensionExceeded { requested: usize, dimension: usize },

    #[error("time window [{start}, {end}] is not covered by the potential horizon [0, {horizon}]")]
    WindowViolation { start: f64, end: f64, horizon: f64 },

    #[error("potential is not real-valued (max imaginary part {max_imag:e})")]
    ComplexPotential { max_imag: f64 },

    #[error("malformed potential grid: {0}")]
    MalformedGrid(String),

    #[error("Picard iteration does not contract on a window of length {window:e} (last ratio {ratio:.4})")]
    NonContraction { window: f64, ratio: f64 },

    #[error("fixed-point iteration diverged at t = {time:.6}: window {window:e}, history {history:?}")]
    Divergence {
        time: f64,
        window: f64,
        history: Vec<f64>,
    },

    #[error("{0}")]
    IllPosedRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
