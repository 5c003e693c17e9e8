//! Experiment configuration: a single TOML file with nested blocks.

use hardycrit::{HPreset, KPreset, ProblemSpec, SolverOptions};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional experiment tag; must match the subcommand when present.
    #[serde(default)]
    pub experiment: Option<String>,
    pub problem: ProblemBlock,
    #[serde(default)]
    pub grid: GridBlock,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub init: Option<InitBlock>,
    #[serde(default)]
    pub sweep: SweepBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemBlock {
    pub dimension: u32,
    /// A in the linear-perturbation setting, λ in the nonlinear one.
    pub coupling: f64,
    pub h: HPreset,
    pub k: KPreset,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridBlock {
    pub r_min: f64,
    pub r_max: f64,
    pub nodes: usize,
    pub angular_order: usize,
}

impl Default for GridBlock {
    fn default() -> Self {
        GridBlock {
            r_min: hardycrit::quadrature::DEFAULT_R_MIN,
            r_max: hardycrit::quadrature::DEFAULT_R_MAX,
            nodes: hardycrit::quadrature::DEFAULT_NODES,
            angular_order: hardycrit::quadrature::DEFAULT_ANGULAR_ORDER,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverBlock {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub armijo_initial_step: f64,
    pub armijo_backtrack: f64,
    pub armijo_decrease: f64,
    pub positivity_projection: bool,
    pub trust_region_delta: Option<f64>,
    pub keep_trace: bool,
}

impl Default for SolverBlock {
    fn default() -> Self {
        let o = SolverOptions::default();
        SolverBlock {
            max_iterations: o.max_iterations,
            tolerance: o.tolerance,
            armijo_initial_step: o.armijo_initial_step,
            armijo_backtrack: o.armijo_backtrack,
            armijo_decrease: o.armijo_decrease,
            positivity_projection: o.positivity_projection,
            trust_region_delta: o.trust_region_delta,
            keep_trace: o.keep_trace,
        }
    }
}

impl SolverBlock {
    pub fn to_options(&self) -> SolverOptions {
        SolverOptions {
            max_iterations: self.max_iterations,
            tolerance: self.tolerance,
            armijo_initial_step: self.armijo_initial_step,
            armijo_backtrack: self.armijo_backtrack,
            armijo_decrease: self.armijo_decrease,
            positivity_projection: self.positivity_projection,
            trust_region_delta: self.trust_region_delta,
            keep_trace: self.keep_trace,
        }
    }
}

/// Initial field for the radial solver.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitBlock {
    /// Ground state at the problem coupling (plus optional perturbation).
    GroundState {
        #[serde(default = "default_scale")]
        scale: f64,
        #[serde(default)]
        perturbation: f64,
    },
    Talenti {
        #[serde(default = "default_scale")]
        scale: f64,
    },
    /// Sweep the μ list for a positive mountain-pass existence integral and
    /// seed from the certifying scale.
    MountainPassSeed,
}

fn default_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepBlock {
    /// Coupling fractions of Λ_N (hardy, thresholds, concentration sweeps).
    pub coupling_fractions: Vec<f64>,
    /// Bubble scales (condition integrals, seed search).
    pub mus: Vec<f64>,
    /// Tail radii (concentration reports).
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub dir: String,
    pub write_fields: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            dir: "out".into(),
            write_fields: false,
        }
    }
}

/// Validation failure: the offending field and the reason.
#[derive(Debug, thiserror::Error)]
#[error("config field `{field}`: {reason}")]
pub struct ValidationError {
    pub field: String,
    pub reason: String,
}

impl ExperimentConfig {
    pub fn validate(&self, subcommand: &str) -> Result<(), ValidationError> {
        if let Some(tag) = &self.experiment {
            if tag != subcommand {
                return Err(ValidationError {
                    field: "experiment".into(),
                    reason: format!("tag `{tag}` does not match subcommand `{subcommand}`"),
                });
            }
        }
        if self.problem.dimension < 3 {
            return Err(ValidationError {
                field: "problem.dimension".into(),
                reason: "need N >= 3".into(),
            });
        }
        if !(self.grid.r_min > 0.0 && self.grid.r_min < self.grid.r_max) {
            return Err(ValidationError {
                field: "grid.r_min".into(),
                reason: "need 0 < r_min < r_max".into(),
            });
        }
        if self.grid.nodes < 16 {
            return Err(ValidationError {
                field: "grid.nodes".into(),
                reason: "need at least 16 nodes".into(),
            });
        }
        if self.grid.angular_order < 8 {
            return Err(ValidationError {
                field: "grid.angular_order".into(),
                reason: "need angular order >= 8".into(),
            });
        }
        let needs_sweep = matches!(subcommand, "concentration" | "hardy");
        if needs_sweep && self.sweep.coupling_fractions.is_empty() {
            return Err(ValidationError {
                field: "sweep.coupling_fractions".into(),
                reason: format!("subcommand `{subcommand}` needs a nonempty sweep"),
            });
        }
        Ok(())
    }

    /// Build the problem spec (validates presets and dimensions).
    pub fn build_spec(&self) -> hardycrit::Result<ProblemSpec> {
        let grid = Arc::new(hardycrit::build_grid(
            self.problem.dimension,
            self.grid.r_min,
            self.grid.r_max,
            self.grid.nodes,
        )?);
        let h = hardycrit::make_h_preset(&self.problem.h, self.problem.dimension)?;
        let k = hardycrit::make_k_preset(&self.problem.k, self.problem.dimension)?;
        ProblemSpec::new(
            self.problem.coupling,
            h,
            k,
            grid,
            self.grid.angular_order,
        )
    }
}
