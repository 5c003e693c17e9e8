//! Problem description: dimension, coupling, coefficients, quadrature context.

use crate::coefficients::{
    check_h_hypotheses, check_k_hypotheses, CoefficientProfile, HypothesisReport,
};
use crate::error::{Error, Result};
use crate::quadrature::{RadialGrid, DEFAULT_ANGULAR_ORDER};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// The problem -Δu = (A + h(x))/|x|² u + k(x) u^{2*-1} together with the
/// quadrature context and hypothesis-check results.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub dimension: u32,
    /// A in the linear-perturbation setting, λ in the nonlinear one.
    pub coupling: f64,
    pub h: CoefficientProfile,
    pub k: CoefficientProfile,
    pub grid: Arc<RadialGrid>,
    pub angular_order: usize,
    pub h_hypotheses: HypothesisReport,
    pub k_hypotheses: HypothesisReport,
}

impl ProblemSpec {
    pub fn new(
        coupling: f64,
        h: CoefficientProfile,
        k: CoefficientProfile,
        grid: Arc<RadialGrid>,
        angular_order: usize,
    ) -> Result<ProblemSpec> {
        let dimension = grid.dimension();
        if h.dimension != dimension || k.dimension != dimension {
            return Err(Error::InvalidParams(format!(
                "coefficient dimensions ({}, {}) do not match grid dimension {}",
                h.dimension, k.dimension, dimension
            )));
        }
        if angular_order < 8 {
            return Err(Error::AngularOrderTooSmall {
                order: angular_order,
                min: 8,
            });
        }
        let h_hypotheses = check_h_hypotheses(&h, coupling, dimension);
        let k_hypotheses = check_k_hypotheses(&k, dimension);
        Ok(ProblemSpec {
            dimension,
            coupling,
            h,
            k,
            grid,
            angular_order,
            h_hypotheses,
            k_hypotheses,
        })
    }

    /// h ≡ 0, k ≡ 1 on the default grid.
    pub fn unperturbed(dimension: u32, coupling: f64) -> Result<ProblemSpec> {
        let grid = Arc::new(RadialGrid::defaults(dimension)?);
        let h = crate::coefficients::make_h_preset(&crate::coefficients::HPreset::Zero, dimension)?;
        let k = crate::coefficients::make_k_preset(
            &crate::coefficients::KPreset::ConstantOne,
            dimension,
        )?;
        ProblemSpec::new(coupling, h, k, grid, DEFAULT_ANGULAR_ORDER)
    }

    /// Λ_N = (N-2)²/4.
    pub fn lambda_n(&self) -> f64 {
        let b = (self.dimension as f64 - 2.0) / 2.0;
        b * b
    }

    pub fn critical_exponent(&self) -> f64 {
        crate::critical_exponent(self.dimension)
    }

    /// Both coefficients radial about the origin.
    pub fn is_radial(&self) -> bool {
        self.h.is_radial() && self.k.is_radial()
    }
}
