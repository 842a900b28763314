use thiserror::Error;

/// Failures raised by the model, solvers and derived observables.
///
/// Numerical payloads are carried as `f64` regardless of the working scalar.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("xi = omega_c / omega_p is undefined when omega_p = 0")]
    XiUndefined,

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("steady state is not unique: generator rank {rank} < 8")]
    DegenerateSteadyState { rank: usize },

    #[error("augmented steady-state system is singular")]
    SingularSystem,

    #[error("outside the validity regime of the closed form: {0}")]
    OutOfValidityRegime(String),

    #[error("step size underflow at tau = {tau}")]
    StepSizeUnderflow { tau: f64 },

    #[error("zero eigenvalue is degenerate: |a1(0)| = {a1}")]
    DegenerateZeroEigenvalue { a1: f64 },

    #[error("fano factor is indeterminate: |J| = {current} outside the resonance-limit regime")]
    IndeterminateFano { current: f64 },

    #[error("newton iteration for lambda_0 did not converge at z = {z}")]
    NewtonNonConvergence { z: f64 },

    #[error("counting field |z| = {z} exceeds 0.1")]
    CountingFieldOutOfRange { z: f64 },

    #[error("photon-number window too small: boundary mass {mass:e}")]
    TruncationTooSmall { mass: f64 },

    #[error("susceptibility outside the linear regime: |4 pi chi| = {magnitude}")]
    LinearizationViolated { magnitude: f64 },

    #[error("group velocity {v_g} m/s outside [v_min = {v_min}, c)")]
    VelocityOutOfRange { v_g: f64, v_min: f64 },

    #[error("group velocity {v_g} m/s is not in (0, c]")]
    GroupVelocityOutOfRange { v_g: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
