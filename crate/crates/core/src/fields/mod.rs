//! Closed-form solution families of the unperturbed problem and the
//! bubble-sum field representation.
//!
//! The ground-state family solving -Δw = A w/|x|² + w^{2*-1} is
//!
//! ```text
//! w_μ(x) = μ^{-(N-2)/2} w⁽ᴬ⁾(x/μ),
//! w⁽ᴬ⁾(x) = (N(N-2)ν²)^{(N-2)/4} / (|x|^{1-ν}(1+|x|^{2ν}))^{(N-2)/2},
//! ν = (1 - A/Λ_N)^{1/2},
//! ```
//!
//! and the Talenti bubble u_r(x) = C_r/(r²+|x-c|²)^{(N-2)/2} is normalized so
//! ‖u_r‖_{2*} = 1. Profile gradients and second derivatives are analytic;
//! the residual and Dirichlet integrals need them accurate down to the
//! ρ^{ν-1} singularity at the origin.

pub mod interp;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_radial, RadialGrid};
use interp::{hermite, pchip_slopes, Stencil6};
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

fn lambda_value(dimension: u32) -> f64 {
    let b = (dimension as f64 - 2.0) / 2.0;
    b * b
}

/// ∫ (1+ρ²)^{-N} over ℝ^N, cached per dimension (normalizes Talenti bubbles).
static TALENTI_MASS: Lazy<Mutex<HashMap<u32, f64>>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn talenti_mass(dimension: u32) -> Result<f64> {
    if let Some(v) = TALENTI_MASS.lock().unwrap().get(&dimension) {
        return Ok(*v);
    }
    let grid = RadialGrid::defaults(dimension)?;
    let n = dimension as i32;
    let v = integrate_radial(&grid, |r| (1.0 + r * r).powi(-n))?;
    TALENTI_MASS.lock().unwrap().insert(dimension, v);
    Ok(v)
}

/// One radial profile shape: value, first and second derivative in the
/// distance to its center.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum RadialProfile {
    /// Ground state of the unperturbed Hardy-critical equation at coupling A.
    GroundState {
        dimension: u32,
        coupling: f64,
        scale: f64,
    },
    /// Normalized Talenti bubble, ‖u_r‖_{2*} = 1.
    Talenti {
        dimension: u32,
        scale: f64,
        norm_const: f64,
    },
    /// Nodal values on a radial grid; monotone cubic between nodes,
    /// log-log linear extrapolation outside.
    GridSampled {
        dimension: u32,
        #[serde(skip)]
        data: Option<Arc<SampledData>>,
        values: Vec<f64>,
        r_min: f64,
        r_max: f64,
    },
}

/// Interpolation state for a grid-sampled profile.
#[derive(Debug)]
pub struct SampledData {
    pub grid: Arc<RadialGrid>,
    pub values: Vec<f64>,
    /// d(value)/dρ at the nodes from the 6th-order log-grid stencil.
    pub nodal_derivatives: Vec<f64>,
    slopes_s: Vec<f64>,
    s_nodes: Vec<f64>,
}

impl RadialProfile {
    pub fn ground_state(dimension: u32, coupling: f64, scale: f64) -> Result<RadialProfile> {
        if dimension < 3 {
            return Err(Error::DimensionTooSmall { dimension });
        }
        let lam = lambda_value(dimension);
        if !(coupling >= 0.0 && coupling < lam) {
            return Err(Error::CouplingOutOfRange {
                value: coupling,
                lo: 0.0,
                hi: lam,
            });
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::NonpositiveScale(scale));
        }
        Ok(RadialProfile::GroundState {
            dimension,
            coupling,
            scale,
        })
    }

    pub fn talenti(dimension: u32, scale: f64) -> Result<RadialProfile> {
        if dimension < 3 {
            return Err(Error::DimensionTooSmall { dimension });
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::NonpositiveScale(scale));
        }
        let mass = talenti_mass(dimension)?;
        let n = dimension as f64;
        // ∫ v_r^{2*} = r^{-N} ∫ (1+|z|²)^{-N}, so C_r = (r^{-N} I_N)^{-(N-2)/2N}.
        let norm_const = (scale.powf(-n) * mass).powf(-(n - 2.0) / (2.0 * n));
        Ok(RadialProfile::Talenti {
            dimension,
            scale,
            norm_const,
        })
    }

    pub fn grid_sampled(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<RadialProfile> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParams(format!(
                "{} nodal values on a {}-node grid",
                values.len(),
                grid.len()
            )));
        }
        let stencil = Stencil6::new(grid.log_step());
        let dv_s = stencil.apply(&values);
        let nodal_derivatives: Vec<f64> = dv_s
            .iter()
            .zip(grid.nodes())
            .map(|(d, rho)| d / rho)
            .collect();
        let s_nodes: Vec<f64> = grid.nodes().iter().map(|r| r.ln()).collect();
        let slopes_s = pchip_slopes(&s_nodes, &values);
        let data = SampledData {
            grid: Arc::clone(&grid),
            values: values.clone(),
            nodal_derivatives,
            slopes_s,
            s_nodes,
        };
        Ok(RadialProfile::GridSampled {
            dimension: grid.dimension(),
            data: Some(Arc::new(data)),
            values,
            r_min: grid.r_min(),
            r_max: grid.r_max(),
        })
    }

    pub fn dimension(&self) -> u32 {
        match self {
            RadialProfile::GroundState { dimension, .. }
            | RadialProfile::Talenti { dimension, .. }
            | RadialProfile::GridSampled { dimension, .. } => *dimension,
        }
    }

    /// True when the profile value diverges at its center.
    pub fn singular_at_center(&self) -> bool {
        match self {
            RadialProfile::GroundState {
                dimension, coupling, ..
            } => {
                let nu = (1.0 - coupling / lambda_value(*dimension)).sqrt();
                nu < 1.0
            }
            RadialProfile::Talenti { .. } => false,
            RadialProfile::GridSampled { .. } => true,
        }
    }

    pub fn scale(&self) -> Option<f64> {
        match self {
            RadialProfile::GroundState { scale, .. } | RadialProfile::Talenti { scale, .. } => {
                Some(*scale)
            }
            RadialProfile::GridSampled { .. } => None,
        }
    }

    pub fn sampled_data(&self) -> Option<&Arc<SampledData>> {
        match self {
            RadialProfile::GridSampled { data, .. } => data.as_ref(),
            _ => None,
        }
    }

    /// Profile value at distance ρ ≥ 0 from its center.
    pub fn value(&self, rho: f64) -> f64 {
        match self {
            RadialProfile::GroundState {
                dimension,
                coupling,
                scale,
            } => {
                let n = *dimension as f64;
                let beta = (n - 2.0) / 2.0;
                let nu = (1.0 - coupling / lambda_value(*dimension)).sqrt();
                let amp = (n * (n - 2.0) * nu * nu).powf((n - 2.0) / 4.0);
                let z = rho / scale;
                scale.powf(-beta) * amp / (z.powf(1.0 - nu) * (1.0 + z.powf(2.0 * nu))).powf(beta)
            }
            RadialProfile::Talenti {
                dimension,
                scale,
                norm_const,
            } => {
                let beta = (*dimension as f64 - 2.0) / 2.0;
                norm_const / (scale * scale + rho * rho).powf(beta)
            }
            RadialProfile::GridSampled { data, .. } => data
                .as_ref()
                .map(|d| d.value(rho))
                .unwrap_or(f64::NAN),
        }
    }

    /// d(value)/dρ at distance ρ > 0.
    pub fn dvalue(&self, rho: f64) -> f64 {
        match self {
            RadialProfile::GroundState { .. } => {
                let (phi, _) = self.log_derivative(rho);
                self.value(rho) * phi
            }
            RadialProfile::Talenti {
                dimension, scale, ..
            } => {
                let n = *dimension as f64;
                self.value(rho) * (-(n - 2.0) * rho / (scale * scale + rho * rho))
            }
            RadialProfile::GridSampled { data, .. } => data
                .as_ref()
                .map(|d| d.dvalue(rho))
                .unwrap_or(f64::NAN),
        }
    }

    /// d²(value)/dρ² at distance ρ > 0.
    pub fn d2value(&self, rho: f64) -> f64 {
        match self {
            RadialProfile::GroundState { .. } | RadialProfile::Talenti { .. } => {
                let (phi, dphi) = self.log_derivative(rho);
                self.value(rho) * (phi * phi + dphi)
            }
            RadialProfile::GridSampled { data, .. } => data
                .as_ref()
                .map(|d| d.d2value(rho))
                .unwrap_or(f64::NAN),
        }
    }

    /// (w'/w, (w'/w)') for the closed-form families.
    fn log_derivative(&self, rho: f64) -> (f64, f64) {
        match self {
            RadialProfile::GroundState {
                dimension,
                coupling,
                scale,
            } => {
                let n = *dimension as f64;
                let beta = (n - 2.0) / 2.0;
                let nu = (1.0 - coupling / lambda_value(*dimension)).sqrt();
                let z = rho / scale;
                let y = z.powf(2.0 * nu);
                let g = (1.0 - nu) + 2.0 * nu * y / (1.0 + y);
                let dg_z = 4.0 * nu * nu * z.powf(2.0 * nu - 1.0) / ((1.0 + y) * (1.0 + y));
                let phi_z = -(beta / z) * g;
                let dphi_z = beta / (z * z) * g - (beta / z) * dg_z;
                (phi_z / scale, dphi_z / (scale * scale))
            }
            RadialProfile::Talenti {
                dimension, scale, ..
            } => {
                let n = *dimension as f64;
                let q = scale * scale + rho * rho;
                let phi = -(n - 2.0) * rho / q;
                let dphi = -(n - 2.0) * (scale * scale - rho * rho) / (q * q);
                (phi, dphi)
            }
            RadialProfile::GridSampled { .. } => unreachable!(),
        }
    }
}

impl SampledData {
    fn locate(&self, s: f64) -> usize {
        let h = self.grid.log_step();
        let idx = ((s - self.s_nodes[0]) / h).floor() as isize;
        idx.clamp(0, self.s_nodes.len() as isize - 2) as usize
    }

    pub fn value(&self, rho: f64) -> f64 {
        let n = self.values.len();
        if rho <= 0.0 {
            return f64::NAN;
        }
        let s = rho.ln();
        if s < self.s_nodes[0] {
            return extrapolate(
                self.s_nodes[0],
                self.s_nodes[1],
                self.values[0],
                self.values[1],
                s,
            );
        }
        if s > self.s_nodes[n - 1] {
            return extrapolate(
                self.s_nodes[n - 1],
                self.s_nodes[n - 2],
                self.values[n - 1],
                self.values[n - 2],
                s,
            );
        }
        let i = self.locate(s);
        let (v, _) = hermite(
            self.s_nodes[i],
            self.s_nodes[i + 1],
            self.values[i],
            self.values[i + 1],
            self.slopes_s[i],
            self.slopes_s[i + 1],
            s,
        );
        v
    }

    pub fn dvalue(&self, rho: f64) -> f64 {
        let n = self.values.len();
        if rho <= 0.0 {
            return f64::NAN;
        }
        let s = rho.ln();
        if s < self.s_nodes[0] || s > self.s_nodes[n - 1] {
            // Power-law extrapolation: v = c ρ^p, v' = p v / ρ.
            let (i, j) = if s < self.s_nodes[0] { (0, 1) } else { (n - 1, n - 2) };
            let v = self.value(rho);
            let p = power_exponent(
                self.s_nodes[i],
                self.s_nodes[j],
                self.values[i],
                self.values[j],
            );
            return p * v / rho;
        }
        let i = self.locate(s);
        let (_, dv_s) = hermite(
            self.s_nodes[i],
            self.s_nodes[i + 1],
            self.values[i],
            self.values[i + 1],
            self.slopes_s[i],
            self.slopes_s[i + 1],
            s,
        );
        dv_s / rho
    }

    pub fn d2value(&self, rho: f64) -> f64 {
        // Centered difference of the Hermite derivative; adequate for
        // diagnostics (the solver differentiates grid profiles discretely).
        let eps = rho * 1e-5;
        (self.dvalue(rho + eps) - self.dvalue(rho - eps)) / (2.0 * eps)
    }
}

/// Linear extrapolation in (log ρ, log |v|), sign carried from the edge value.
fn extrapolate(s0: f64, s1: f64, v0: f64, v1: f64, s: f64) -> f64 {
    if v0 == 0.0 {
        return 0.0;
    }
    if v0.signum() != v1.signum() || v1 == 0.0 {
        // No consistent power law; decay the edge value linearly in s.
        return v0 * (1.0 - (s - s0) / (s1 - s0)).max(0.0);
    }
    let p = (v1.abs().ln() - v0.abs().ln()) / (s1 - s0);
    v0.signum() * (v0.abs().ln() + p * (s - s0)).exp()
}

fn power_exponent(s0: f64, s1: f64, v0: f64, v1: f64) -> f64 {
    if v0 == 0.0 || v1 == 0.0 || v0.signum() != v1.signum() {
        return 0.0;
    }
    (v1.abs().ln() - v0.abs().ln()) / (s1 - s0)
}

/// One term of a bubble sum: amplitude × profile(|x - center|).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Bubble {
    pub amplitude: f64,
    pub profile: RadialProfile,
    pub center: Vec<f64>,
}

/// A finite superposition of radial profiles about centers; the universal
/// function representation of the toolkit. The empty sum is the zero field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Field {
    pub dimension: u32,
    pub bubbles: Vec<Bubble>,
}

impl Field {
    pub fn zero(dimension: u32) -> Field {
        Field {
            dimension,
            bubbles: Vec::new(),
        }
    }

    pub fn single(amplitude: f64, profile: RadialProfile, center: Vec<f64>) -> Field {
        let dimension = profile.dimension();
        assert_eq!(center.len(), dimension as usize);
        Field {
            dimension,
            bubbles: vec![Bubble {
                amplitude,
                profile,
                center,
            }],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bubbles.is_empty() || self.bubbles.iter().all(|b| b.amplitude == 0.0)
    }

    pub fn push(&mut self, amplitude: f64, profile: RadialProfile, center: Vec<f64>) {
        assert_eq!(profile.dimension(), self.dimension);
        assert_eq!(center.len(), self.dimension as usize);
        self.bubbles.push(Bubble {
            amplitude,
            profile,
            center,
        });
    }

    /// Multiply all amplitudes by t.
    pub fn scaled_amplitude(&self, t: f64) -> Field {
        let mut f = self.clone();
        for b in f.bubbles.iter_mut() {
            b.amplitude *= t;
        }
        f
    }

    /// True when every bubble is centered at the origin.
    pub fn radial_about_origin(&self) -> bool {
        self.bubbles
            .iter()
            .all(|b| b.center.iter().all(|c| *c == 0.0))
    }
}

/// Ground state w_μ at coupling A as a single-bubble field about the origin.
pub fn ground_state(dimension: u32, coupling: f64, scale: f64) -> Result<Field> {
    let profile = RadialProfile::ground_state(dimension, coupling, scale)?;
    Ok(Field::single(1.0, profile, vec![0.0; dimension as usize]))
}

/// Normalized Talenti bubble u_r about the given center.
pub fn talenti(dimension: u32, scale: f64, center: &[f64]) -> Result<Field> {
    let profile = RadialProfile::talenti(dimension, scale)?;
    Ok(Field::single(1.0, profile, center.to_vec()))
}

/// Pointwise evaluation u(x) = Σ tᵢ φᵢ(|x - cᵢ|).
pub fn evaluate(field: &Field, x: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for b in &field.bubbles {
        let d = crate::quadrature::distance(x, &b.center);
        if d == 0.0 && b.profile.singular_at_center() {
            return Err(Error::SingularEvaluation { distance: d });
        }
        total += b.amplitude * b.profile.value(d);
    }
    Ok(total)
}

/// Dilation u ↦ μ^{-(N-2)/2} u(·/μ); preserves ‖∇·‖₂ and ‖·‖_{2*}.
pub fn scale_field(field: &Field, mu: f64) -> Result<Field> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::NonpositiveScale(mu));
    }
    let beta = (field.dimension as f64 - 2.0) / 2.0;
    let mut out = Field::zero(field.dimension);
    for b in &field.bubbles {
        let center: Vec<f64> = b.center.iter().map(|c| c * mu).collect();
        match &b.profile {
            RadialProfile::GroundState {
                dimension,
                coupling,
                scale,
            } => {
                let profile = RadialProfile::ground_state(*dimension, *coupling, scale * mu)?;
                out.push(b.amplitude, profile, center);
            }
            RadialProfile::Talenti {
                dimension, scale, ..
            } => {
                let profile = RadialProfile::talenti(*dimension, scale * mu)?;
                out.push(b.amplitude, profile, center);
            }
            RadialProfile::GridSampled { data, .. } => {
                // Resample on the same grid (interpolation loss documented).
                let data = data
                    .as_ref()
                    .ok_or_else(|| Error::InvalidParams("deserialized grid profile".into()))?;
                let values: Vec<f64> = data
                    .grid
                    .nodes()
                    .iter()
                    .map(|&r| mu.powf(-beta) * data.value(r / mu))
                    .collect();
                let profile = RadialProfile::grid_sampled(Arc::clone(&data.grid), values)?;
                out.push(b.amplitude, profile, center);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ground_state_value_at_reference_point() {
        // N = 4, A = 0, μ = 1, |x| = 1: (N(N-2))^{1/2} / 2 = sqrt(8)/2.
        let w = RadialProfile::ground_state(4, 0.0, 1.0).unwrap();
        assert_relative_eq!(w.value(1.0), 8.0_f64.sqrt() / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn ground_state_rejects_critical_coupling() {
        let lam3 = 0.25;
        assert!(matches!(
            RadialProfile::ground_state(3, lam3, 1.0),
            Err(Error::CouplingOutOfRange { .. })
        ));
        assert!(matches!(
            RadialProfile::ground_state(3, -0.1, 1.0),
            Err(Error::CouplingOutOfRange { .. })
        ));
    }

    #[test]
    fn ground_state_matches_talenti_shape_at_zero_coupling() {
        // w^(0) has the Talenti shape (1+|x|²)^{-(N-2)/2} up to its constant.
        let n = 5u32;
        let w = RadialProfile::ground_state(n, 0.0, 1.0).unwrap();
        let nf = n as f64;
        let amp = (nf * (nf - 2.0)).powf((nf - 2.0) / 4.0);
        for rho in [0.01_f64, 0.3, 1.0, 7.0, 80.0] {
            let shape = amp / (1.0 + rho * rho).powf((nf - 2.0) / 2.0);
            assert_relative_eq!(w.value(rho), shape, max_relative = 1e-13);
        }
    }

    #[test]
    fn talenti_normalized_in_critical_norm() {
        for n in [3u32, 4, 5] {
            for r in [1e-2, 1.0, 1e2] {
                let u = RadialProfile::talenti(n, r).unwrap();
                let grid = RadialGrid::defaults(n).unwrap();
                let p = crate::critical_exponent(n);
                let mass = integrate_radial(&grid, |rho| u.value(rho).powf(p)).unwrap();
                assert_relative_eq!(mass, 1.0, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn talenti_rejects_nonpositive_scale() {
        assert!(matches!(
            RadialProfile::talenti(3, 0.0),
            Err(Error::NonpositiveScale(_))
        ));
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let profiles = [
            RadialProfile::ground_state(3, 0.2 * 0.25, 0.7).unwrap(),
            RadialProfile::ground_state(4, 0.9, 2.0).unwrap(),
            RadialProfile::talenti(5, 0.5).unwrap(),
        ];
        for p in &profiles {
            for rho in [0.05, 0.4, 1.3, 9.0] {
                let eps = rho * 1e-6;
                let fd1 = (p.value(rho + eps) - p.value(rho - eps)) / (2.0 * eps);
                assert_relative_eq!(p.dvalue(rho), fd1, max_relative = 1e-8);
                // Wider step for the second difference to stay above roundoff.
                let eps2 = rho * 5e-4;
                let fd2 = (p.value(rho + eps2) - 2.0 * p.value(rho) + p.value(rho - eps2))
                    / (eps2 * eps2);
                assert_relative_eq!(p.d2value(rho), fd2, max_relative = 1e-5);
            }
        }
    }

    #[test]
    fn scale_field_is_identity_at_one() {
        let u = talenti(3, 1.0, &[0.5, 0.0, 0.0]).unwrap();
        let v = scale_field(&u, 1.0).unwrap();
        for x in [[0.1, 0.2, 0.0], [1.0, -1.0, 0.5]] {
            assert_relative_eq!(
                evaluate(&u, &x).unwrap(),
                evaluate(&v, &x).unwrap(),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn scaled_talenti_is_family_member() {
        let u1 = talenti(4, 1.0, &[0.0; 4]).unwrap();
        for mu in [0.03, 0.6, 12.0] {
            let scaled = scale_field(&u1, mu).unwrap();
            let direct = talenti(4, mu, &[0.0; 4]).unwrap();
            for rho in [1e-3, 0.1, 1.0, 25.0] {
                let x = [rho, 0.0, 0.0, 0.0];
                assert_relative_eq!(
                    evaluate(&scaled, &x).unwrap(),
                    evaluate(&direct, &x).unwrap(),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn evaluate_zero_field_and_linearity() {
        let z = Field::zero(3);
        assert_eq!(evaluate(&z, &[1.0, 2.0, 3.0]).unwrap(), 0.0);

        let a = talenti(3, 1.0, &[1.0, 0.0, 0.0]).unwrap();
        let b = talenti(3, 0.5, &[-1.0, 0.0, 0.0]).unwrap();
        let mut sum = a.clone();
        sum.push(
            b.bubbles[0].amplitude,
            b.bubbles[0].profile.clone(),
            b.bubbles[0].center.clone(),
        );
        let mid = [0.0, 0.0, 0.0];
        assert_relative_eq!(
            evaluate(&sum, &mid).unwrap(),
            evaluate(&a, &mid).unwrap() + evaluate(&b, &mid).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn singular_center_evaluation_rejected() {
        let w = ground_state(3, 0.1, 1.0).unwrap();
        assert!(matches!(
            evaluate(&w, &[0.0, 0.0, 0.0]),
            Err(Error::SingularEvaluation { .. })
        ));
        // A = 0 is the regular Talenti shape; evaluation at the center is fine.
        let t = ground_state(3, 0.0, 1.0).unwrap();
        assert!(evaluate(&t, &[0.0, 0.0, 0.0]).is_ok());
    }

    #[test]
    fn grid_sampled_roundtrip_accuracy() {
        let grid = Arc::new(RadialGrid::defaults(3).unwrap());
        let t = RadialProfile::talenti(3, 1.0).unwrap();
        let values: Vec<f64> = grid.nodes().iter().map(|&r| t.value(r)).collect();
        let gs = RadialProfile::grid_sampled(Arc::clone(&grid), values).unwrap();
        for rho in [1e-4, 0.037, 1.0, 5.3, 1e3] {
            assert_relative_eq!(gs.value(rho), t.value(rho), max_relative = 1e-7);
        }
        // Nodal derivatives reach stencil accuracy; where the derivative
        // underflows relative to the value the error is bounded absolutely
        // by the differencing roundoff floor.
        let data = gs.sampled_data().unwrap();
        let vmax = data.values.iter().cloned().fold(0.0_f64, |a, b| a.max(b.abs()));
        for (i, &rho) in grid.nodes().iter().enumerate().step_by(97) {
            if rho > 1e-6 && rho < 1e6 {
                let exact = t.dvalue(rho);
                let err = (data.nodal_derivatives[i] - exact).abs();
                assert!(
                    err <= 1e-9 * exact.abs() + 1e-12 * vmax / (grid.log_step() * rho),
                    "node {i}: d6 = {}, exact = {exact}",
                    data.nodal_derivatives[i]
                );
            }
        }
    }
}
