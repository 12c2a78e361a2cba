//! Error type shared across the crate.

use thiserror::Error;

/// Errors raised by the map kernels, solvers and constructions.
#[derive(Debug, Error)]
pub enum TanError {
    #[error("point {0} is within pole tolerance of a pole of tan and no approach side was given")]
    UnsidedPole(f64),

    #[error("point {0} is too close to a pole of tan")]
    PoleProximity(f64),

    #[error("derivative vanishes near {0}; Schwarzian undefined in the saturated region")]
    DegenerateDerivative(f64),

    #[error("Newton iteration diverged (last residual {0:.3e})")]
    NewtonDiverged(f64),

    #[error("cycle multiplier {0} is too close to 1; use a parabolic solve instead")]
    DerivativeNearOne(f64),

    #[error("multiplier never crosses the target inside the bracket ({0}, {1})")]
    NoCrossing(f64, f64),

    #[error("cycle point {0} sits on a pole; multiplier undefined")]
    PoleOnCycle(f64),

    #[error("orbit did not converge to a cycle")]
    NoConvergence,

    #[error("no pre-pole bracket found at level {level} for t = {t}")]
    NotRenormalizable { t: f64, level: u32 },

    #[error("point {0} lies outside the level-{1} interval system")]
    OutOfDomain(f64, u32),

    #[error("no sign change of the virtual-cycle residual inside ({0}, {1})")]
    NoSignChange(f64, f64),

    #[error("asymptotic-value orbit hit a pole before step {0}")]
    OrbitHitPole(usize),

    #[error("need at least {0} merging parameters for extrapolation, got {1}")]
    InsufficientData(usize, usize),

    #[error("orbit closure residual {0:.3e} exceeds tolerance at the virtual cycle parameter")]
    ClosureFailed(f64),

    #[error("partial derivative dF/dz vanishes at orbit point {0}")]
    SingularPartial(f64),

    #[error("finite-difference stencil straddles a pre-pole discontinuity (step {0:.3e})")]
    BranchJump(f64),

    #[error("orbit-constant ordering violated at level {0}; parameter too far from t_infinity")]
    OrderingViolated(u32),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error(transparent)]
    IoFailure(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, TanError>;
