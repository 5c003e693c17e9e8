//! Numerical variational toolkit for the critical elliptic problem
//!
//! ```text
//! -Δu = (A + h(x))/|x|² u + k(x) u^(2*-1)   on ℝ^N,  u > 0,  u ∈ D^{1,2}(ℝ^N)
//! ```
//!
//! with `N ≥ 3` and `2* = 2N/(N-2)` the critical Sobolev exponent:
//!
//! - log-radial and cross-center quadrature robust to the `|x|⁻²` Hardy
//!   singularity and power-law tails ([`quadrature`]),
//! - the closed-form ground-state and Talenti bubble families and the
//!   bubble-sum field representation ([`fields`]),
//! - preset coefficient profiles `h`, `k` with hypothesis checkers
//!   ([`coefficients`]),
//! - energy functionals, Hardy/Sobolev quotients, Nehari scaling,
//!   mountain-pass levels and Riesz gradients ([`energy`]),
//! - every explicit Palais-Smale threshold ([`thresholds`]),
//! - Pohozaev-type nonexistence audits ([`obstructions`]),
//! - Nehari-constrained radial descent and localized bubble-ansatz
//!   minimization ([`solver`]),
//! - concentration diagnostics: `T_j`, the truncated barycenter `Ξ`, tail
//!   masses and peak separation ([`localization`]).

pub mod coefficients;
pub mod energy;
pub mod error;
pub mod fields;
pub mod localization;
pub mod obstructions;
pub mod problem;
pub mod quadrature;
pub mod solver;
pub mod special;
pub mod thresholds;

pub use coefficients::{
    check_h_hypotheses, check_k_hypotheses, condition_h_integral, condition_k_integral,
    make_h_preset, make_k_preset, CoefficientProfile, HPreset, HypothesisReport, KPreset,
};
pub use energy::{
    energy, gradient_j, hardy_quotient, mountain_pass_level, nehari_scale, sobolev_quotient_qa,
    strong_residual_norm,
    EnergyBreakdown, NehariScaling,
};
pub use error::{Error, Result};
pub use fields::{evaluate, ground_state, scale_field, talenti, Bubble, Field, RadialProfile};
pub use localization::{
    concentration_verify, delta_separated_count, separation_check, t_j, tail_masses, xi_map,
    ConcentrationReport, ConcentrationTrend, PeakFrame, SeparationReport,
};
pub use obstructions::{
    estimate_i1, nonexistence_audit, pohozaev_integral, I1Estimate, ObstructionVerdict,
};
pub use problem::ProblemSpec;
pub use quadrature::{build_grid, integrate_cross, integrate_radial, RadialGrid};
pub use solver::{
    multiplicity_run, residual, solve_localized, solve_radial, MultiplicityOutcome, SolveResult,
    SolverOptions,
};
pub use thresholds::{
    best_sobolev, cstar, eps0, hat_c, lambda_n, threshold_report, tilde_c, tilde_c1, Branch,
    ThresholdReport,
};

/// Critical Sobolev exponent `2* = 2N/(N-2)`.
pub fn critical_exponent(dimension: u32) -> f64 {
    2.0 * dimension as f64 / (dimension as f64 - 2.0)
}
