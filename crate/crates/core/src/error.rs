use thiserror::Error;

/// Errors raised by the simulation engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty mode list")]
    EmptyModes,
    #[error("duplicate mode label `{0}`")]
    DuplicateMode(String),
    #[error("unknown mode `{0}`")]
    UnknownMode(String),
    #[error("mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("matrix is not symplectic (defect {0:.3e})")]
    NotSymplectic(f64),
    #[error("state is unphysical: {0}")]
    Unphysical(String),
    #[error("singular conditioning: measured variance {0:.3e}")]
    SingularConditioning(f64),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("no unique steady state: drift is not Hurwitz (max Re λ = {0:.3e})")]
    NoUniqueSteadyState(f64),
    #[error("angular momentum arguments must be non-negative half-integers: {0}")]
    NotHalfInteger(String),
    #[error("no dipole path connects `{from}` to `{to}`")]
    NoPath { from: String, to: String },
    #[error("no interior minimum in ({lo}, {hi})")]
    NoInteriorMinimum { lo: f64, hi: f64 },
    #[error("integration failed: {0}")]
    StepFailure(String),
    #[error("linear algebra failure: {0}")]
    Numerical(String),
    #[error("Fock space too large: {0} basis states")]
    FockTooLarge(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
