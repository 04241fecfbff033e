use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("generator is not Metzler (min off-diagonal entry {min_offdiag:.3e})")]
    NotMetzler { min_offdiag: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("linear system is singular or numerically singular (shift {shift:.6e})")]
    SingularSystem { shift: f64 },

    #[error("matrix too large for dense operation: n = {n}, cap = {cap}")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("solver did not converge: {iterations} iterations, residual {residual:.3e}")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("degenerate normalization: [f]_0 = {value:.3e}")]
    DegenerateNormalization { value: f64 },

    #[error("zero pairing between candidate eigenvectors")]
    ZeroPairing,

    #[error("primal/dual eigenvalue mismatch: lambda1 = {primal:.12e}, dual = {dual:.12e}")]
    DualMismatch { primal: f64, dual: f64 },

    #[error("minorization failed: {0}")]
    MinorizationFailed(String),

    #[error("certificate failed: {0}")]
    CertificateFailed(String),

    #[error("contraction factor at or above one: {value:.6} (slack {slack:.3e})")]
    ContractionNotStrict { value: f64, slack: f64 },

    #[error("no sign change on search bracket [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("compatibility condition fails: a = {a:.6} <= 1")]
    CompatibilityFailed { a: f64 },

    #[error("no spectral peak above noise floor (tail amplitude {amplitude:.3e})")]
    NoSpectralPeak { amplitude: f64 },

    #[error("too few samples in window: {got}, need {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
