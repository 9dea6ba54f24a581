use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("config error ({path}:{line}): {msg}")]
    Config {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("state invariant violated: {0}")]
    InvalidState(String),

    #[error("sparse factorization failed ({0}); the generator is singular beyond the trace degeneracy")]
    Factorization(String),

    #[error(
        "steady state is not unique: {found} independent stationary states found \
         among {probes} probe solves (estimated null-space dimension >= {found})"
    )]
    NonUniqueSteadyState { found: usize, probes: usize },

    #[error("steady-state residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    ResidualTooLarge { residual: f64, tol: f64 },

    #[error("negative occupation {value:.3e} at (n={n}, m={m}) below floor -{floor:.1e}")]
    NegativeOccupation {
        n: usize,
        m: usize,
        value: f64,
        floor: f64,
    },

    #[error("integration step underflow at t = {t:.6e} (dt = {dt:.3e})")]
    StepUnderflow { t: f64, dt: f64 },

    #[error("trace drift {drift:.3e} exceeds budget {budget:.1e} during propagation")]
    TraceDrift { drift: f64, budget: f64 },

    #[error(
        "cutoff escalation did not converge after {rounds} rounds \
         (observable drift per round: {trace})"
    )]
    CutoffEscalation { rounds: usize, trace: String },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("empty table")]
    EmptyTable,

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
