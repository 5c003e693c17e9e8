//! Radial and cross-center quadrature for integrals over ℝ^N.
//!
//! The base rule is the trapezoid in s = log ρ on a geometric grid: bubble
//! and ground-state integrands are smooth and exponentially localized in s,
//! so the rule converges spectrally, and the Hardy weight ρ^{-2} needs no
//! special treatment since ρ^{N-3} stays integrable under the substitution
//! for N ≥ 3.

mod drivers;
mod gauss;

pub use drivers::{integrate_structured, orthonormal_span, Structure};
pub use gauss::gauss_legendre;

/// Euclidean distance between two points.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    drivers::dist(a, b)
}

use crate::error::{Error, Result};
use crate::special::sphere_measure;
use serde::{Deserialize, Serialize};

pub const DEFAULT_R_MIN: f64 = 1e-8;
pub const DEFAULT_R_MAX: f64 = 1e8;
pub const DEFAULT_NODES: usize = 2000;
pub const DEFAULT_ANGULAR_ORDER: usize = 64;

/// Log-spaced quadrature nodes and weights for ∫₀^∞ f(ρ) ρ^{N-1} dρ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialGrid {
    dimension: u32,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    r_min: f64,
    r_max: f64,
    log_step: f64,
}

impl RadialGrid {
    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights w_i for the rule ∫ f ρ^{N-1} dρ ≈ Σ w_i ρ_i^{N-1} f(ρ_i).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Uniform spacing in s = log ρ.
    pub fn log_step(&self) -> f64 {
        self.log_step
    }

    /// Surface measure ω_{N-1} of the unit sphere in ℝ^N.
    pub fn surface_measure(&self) -> f64 {
        sphere_measure(self.dimension - 1)
    }

    /// Same span and dimension with the node count scaled by `factor`.
    pub fn refined(&self, factor: usize) -> Result<RadialGrid> {
        build_grid(self.dimension, self.r_min, self.r_max, self.len() * factor)
    }

    /// Default grid: covers bubble scales μ ∈ [1e-4, 1e4] with at least
    /// 8 nodes per decade.
    pub fn defaults(dimension: u32) -> Result<RadialGrid> {
        build_grid(dimension, DEFAULT_R_MIN, DEFAULT_R_MAX, DEFAULT_NODES)
    }
}

/// Build a geometric grid of `nodes` points between `r_min` and `r_max`.
pub fn build_grid(dimension: u32, r_min: f64, r_max: f64, nodes: usize) -> Result<RadialGrid> {
    if dimension < 3 {
        return Err(Error::DimensionTooSmall { dimension });
    }
    if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
        return Err(Error::InvalidRange { r_min, r_max });
    }
    if nodes < 16 {
        return Err(Error::TooFewNodes { nodes, min: 16 });
    }
    let h = (r_max / r_min).ln() / (nodes - 1) as f64;
    let s0 = r_min.ln();
    let pts: Vec<f64> = (0..nodes).map(|i| (s0 + i as f64 * h).exp()).collect();
    let weights: Vec<f64> = pts
        .iter()
        .enumerate()
        .map(|(i, &rho)| {
            let c = if i == 0 || i == nodes - 1 { 0.5 } else { 1.0 };
            c * h * rho
        })
        .collect();
    Ok(RadialGrid {
        dimension,
        nodes: pts,
        weights,
        r_min,
        r_max,
        log_step: h,
    })
}

/// ∫_{ℝ^N} f(|x|) dx = ω_{N-1} Σ w_i f(ρ_i) ρ_i^{N-1}.
pub fn integrate_radial(grid: &RadialGrid, f: impl Fn(f64) -> f64) -> Result<f64> {
    let p = grid.dimension as i32 - 1;
    let mut total = 0.0;
    for (&rho, &w) in grid.nodes.iter().zip(&grid.weights) {
        let v = f(rho);
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand { rho, value: v });
        }
        total += w * rho.powi(p) * v;
    }
    Ok(total * grid.surface_measure())
}

/// ∫_{ℝ^N} f(|x - c₁|) g(|x - c₂|) dx by reduction to a 2-D quadrature over
/// the angle between x - c₁ and c₂ - c₁.
pub fn integrate_cross(
    grid: &RadialGrid,
    f: impl Fn(f64) -> f64,
    c1: &[f64],
    g: impl Fn(f64) -> f64,
    c2: &[f64],
    angular_order: usize,
) -> Result<f64> {
    if angular_order < 8 {
        return Err(Error::AngularOrderTooSmall {
            order: angular_order,
            min: 8,
        });
    }
    let mut st = Structure::new(grid.dimension);
    st.point(c1, true);
    st.point(c2, true);
    let integrand = |x: &[f64]| f(drivers::dist(x, c1)) * g(drivers::dist(x, c2));
    integrate_structured(grid, angular_order, &st, &integrand)
}
