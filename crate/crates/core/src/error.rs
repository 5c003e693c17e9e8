//! Error type shared by every module of the toolkit.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid radial range: r_min = {r_min:e} must satisfy 0 < r_min < r_max = {r_max:e}")]
    InvalidRange { r_min: f64, r_max: f64 },

    #[error("dimension {dimension} too small, need N >= 3")]
    DimensionTooSmall { dimension: u32 },

    #[error("node count {nodes} too small, need at least {min}")]
    TooFewNodes { nodes: usize, min: usize },

    #[error("angular order {order} too small, need at least {min}")]
    AngularOrderTooSmall { order: usize, min: usize },

    #[error("non-finite integrand at rho = {rho:e} (value {value})")]
    NonFiniteIntegrand { rho: f64, value: f64 },

    #[error("coupling out of range: {value} not in ({lo}, {hi})")]
    CouplingOutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("scale must be positive, got {0}")]
    NonpositiveScale(f64),

    #[error("evaluation at a singular profile center (|x - c| = {distance:e})")]
    SingularEvaluation { distance: f64 },

    #[error("operation undefined for the zero field")]
    ZeroField,

    #[error("Nehari scaling infeasible: quadratic form Q(u) = {0:e} is not positive")]
    NonpositiveNumerator(f64),

    #[error("Nehari scaling infeasible: nonlinear term = {0:e} is not positive")]
    NonpositiveDenominator(f64),

    #[error("ray level undefined: quadratic form Q(u) = {0:e} is not positive")]
    NonpositiveForm(f64),

    #[error("radial Poisson solve failed: {0}")]
    LinearSolveFailure(String),

    #[error("operation requires a radial problem/field: {0}")]
    NotRadial(String),

    #[error("infeasible initial field: {0}")]
    InfeasibleInit(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("trust region contact: T_{j}(u) = {t_value} reached delta = {delta}")]
    TrustRegionViolation { j: usize, t_value: f64, delta: f64 },

    #[error("invalid preset parameters: {0}")]
    InvalidParams(String),

    #[error("theta = {theta} out of range, need 2 < theta < N = {dimension}")]
    ThetaOutOfRange { theta: f64, dimension: u32 },

    #[error("preset is not differentiable: {0}")]
    NondifferentiablePreset(String),

    #[error("integral is not reducible to a planar quadrature: {0}")]
    NotReducible(String),
}
