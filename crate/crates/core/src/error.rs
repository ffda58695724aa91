use thiserror::Error;

/// Errors surfaced by the library. The CLI maps these onto exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TfdError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("Fock dimension {product} exceeds the configured maximum {limit} (cutoffs {cutoffs:?})")]
    DimensionOverflow {
        product: u128,
        limit: usize,
        cutoffs: Vec<usize>,
    },

    #[error("mode index {index} out of range for {modes} modes")]
    InvalidMode { index: usize, modes: usize },

    #[error("basis mismatch between operands")]
    BasisMismatch,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("input is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("singular parameterization: {0}")]
    Singular(String),

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("schedule does not cover [{start}, {end}]")]
    ScheduleCoverage { start: f64, end: f64 },

    #[error("occupation bound violated for mode {mode} at t = {t}: n = {value}")]
    OccupationBound { mode: usize, t: f64, value: f64 },

    #[error("insufficient history: {0}")]
    History(String),

    #[error("root not bracketed in [{lo}, {hi}]; scan: {scan:?}")]
    NoBracket {
        lo: f64,
        hi: f64,
        scan: Vec<(f64, f64)>,
    },

    #[error("spectral function not normalized: integral {integral}")]
    Unnormalized { integral: f64 },

    #[error("io error: {0}")]
    Io(String),
}

impl TfdError {
    /// True for failures of a numerical procedure (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            TfdError::Integration { .. }
                | TfdError::OccupationBound { .. }
                | TfdError::NoBracket { .. }
                | TfdError::Singular(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, TfdError>;
