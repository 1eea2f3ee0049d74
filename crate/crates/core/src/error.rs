use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("wire index {wire} out of range for {wires} wires (line {line})")]
    WireOutOfRange { wire: usize, wires: usize, line: usize },

    #[error("PERM table is not a bijection on {{0..{size}}}: {msg}")]
    NonBijectivePerm { size: usize, msg: String },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("dimension {required} exceeds cap {cap}")]
    DimensionCap { required: usize, cap: usize },

    #[error("step index {t} out of range 0..={max}")]
    StepOutOfRange { t: usize, max: usize },

    #[error("matrix is not Hermitian: max deviation {deviation:.3e}")]
    NonHermitian { deviation: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("clock accept set has no support in the state")]
    ZeroClockSupport,

    #[error("distributions have mismatched outcome spaces")]
    MismatchedOutcomes,

    #[error("adaptive policy violated its contract: {0}")]
    PolicyViolation(String),

    #[error("integrator step underflow at s = {s:.6} (dt = {dt:.3e})")]
    StepUnderflow { s: f64, dt: f64 },

    #[error("base {base} is not coprime to modulus {modulus}")]
    NotCoprime { base: u64, modulus: u64 },

    #[error("retry budget of {budget} attempts exhausted without finding a factor")]
    RetryBudgetExhausted { budget: usize },

    #[error("{0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
