//! Variational quantities: the functional J, quadratic forms, Hardy/Sobolev
//! quotients, Nehari scaling, mountain-pass levels and the Riesz gradient.
//!
//! ```text
//! J(u) = ½∫|∇u|² - ½∫(A+h(x))/|x|² u² - (1/2*)∫k(x)|u|^{2*}
//! ```
//!
//! Bubble-sum fields reduce to cross-center quadrature term by term; radial
//! fields about the origin use the log-grid rule directly. Grid-sampled
//! profiles are measured with the P1 Dirichlet form and lumped trapezoid
//! masses, which makes the discrete energy an exact algebraic function of the
//! nodal values; `gradient_j` assembles exactly its gradient, so directional
//! derivatives of the energy match the Riesz pairing to roundoff.

pub mod discrete;

use crate::coefficients::AtomKind;
use crate::error::{Error, Result};
use crate::fields::{Field, RadialProfile};
use crate::problem::ProblemSpec;
use crate::quadrature::{distance, integrate_structured, RadialGrid, Structure};
use discrete::RadialOperator;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// All variational terms of a field, with the Nehari defect.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// ∫|∇u|²
    pub dirichlet: f64,
    /// ∫(A+h(x)) u²/|x|²
    pub hardy: f64,
    /// ∫k(x)|u|^{2*}
    pub nonlinear: f64,
    /// J(u)
    pub j_value: f64,
    /// ⟨J'(u), u⟩ = dirichlet - hardy - nonlinear
    pub nehari_residual: f64,
}

impl EnergyBreakdown {
    fn assemble(dimension: u32, dirichlet: f64, hardy: f64, nonlinear: f64) -> EnergyBreakdown {
        let p = crate::critical_exponent(dimension);
        EnergyBreakdown {
            dirichlet,
            hardy,
            nonlinear,
            j_value: 0.5 * dirichlet - 0.5 * hardy - nonlinear / p,
            nehari_residual: dirichlet - hardy - nonlinear,
        }
    }

    /// Breakdown of t·u from the breakdown of u (exact scaling algebra).
    pub fn scaled(&self, dimension: u32, t: f64) -> EnergyBreakdown {
        let p = crate::critical_exponent(dimension);
        EnergyBreakdown::assemble(
            dimension,
            t * t * self.dirichlet,
            t * t * self.hardy,
            t.abs().powf(p) * self.nonlinear,
        )
    }
}

/// Result of projecting a ray onto the Nehari manifold.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NehariScaling {
    pub t: f64,
    pub scaled_energy: EnergyBreakdown,
}

// ---------------------------------------------------------------------------
// Nodal data for radial fields on the problem grid.

/// Nodal values and derivatives of a radial-about-origin field, split into
/// grid-sampled components (P1/discrete path) and closed-form components
/// (analytic derivatives).
pub(crate) struct RadialNodal {
    pub values: Vec<f64>,
    /// Total nodal values of the grid-sampled components only.
    pub grid_values: Vec<f64>,
    /// Analytic d/dρ of the closed-form components at the nodes.
    pub closed_derivs: Vec<f64>,
    /// -Δ of the closed-form components at the nodes (analytic).
    pub closed_neg_laplacian: Vec<f64>,
    pub has_grid_part: bool,
}

pub(crate) fn radial_nodal(u: &Field, grid: &RadialGrid) -> Result<RadialNodal> {
    if !u.radial_about_origin() {
        return Err(Error::NotRadial(
            "field must be centered at the origin".into(),
        ));
    }
    let n = grid.len();
    let nf = grid.dimension() as f64;
    let mut values = vec![0.0; n];
    let mut grid_values = vec![0.0; n];
    let mut closed_derivs = vec![0.0; n];
    let mut closed_neg_laplacian = vec![0.0; n];
    let mut has_grid_part = false;
    for b in &u.bubbles {
        match &b.profile {
            RadialProfile::GridSampled { data, .. } => {
                let data = data
                    .as_ref()
                    .ok_or_else(|| Error::InvalidParams("deserialized grid profile".into()))?;
                has_grid_part = true;
                if data.grid.len() == n && data.grid.r_min() == grid.r_min() {
                    for i in 0..n {
                        values[i] += b.amplitude * data.values[i];
                        grid_values[i] += b.amplitude * data.values[i];
                    }
                } else {
                    for (i, &rho) in grid.nodes().iter().enumerate() {
                        let v = b.amplitude * data.value(rho);
                        values[i] += v;
                        grid_values[i] += v;
                    }
                }
            }
            profile => {
                for (i, &rho) in grid.nodes().iter().enumerate() {
                    values[i] += b.amplitude * profile.value(rho);
                    closed_derivs[i] += b.amplitude * profile.dvalue(rho);
                    closed_neg_laplacian[i] -= b.amplitude
                        * (profile.d2value(rho) + (nf - 1.0) / rho * profile.dvalue(rho));
                }
            }
        }
    }
    Ok(RadialNodal {
        values,
        grid_values,
        closed_derivs,
        closed_neg_laplacian,
        has_grid_part,
    })
}

// ---------------------------------------------------------------------------
// Integral builders.

/// ∫|∇u|² for an arbitrary bubble sum.
pub(crate) fn dirichlet_integral(
    grid: &RadialGrid,
    angular_order: usize,
    u: &Field,
) -> Result<f64> {
    if u.is_zero() {
        return Ok(0.0);
    }
    if u.radial_about_origin() {
        let nodal = radial_nodal(u, grid)?;
        let op = RadialOperator::new(grid);
        let mut total = op.stiffness_form(&nodal.grid_values, &nodal.grid_values);
        // closed × closed and 2 × closed × grid cross terms by trapezoid.
        let deriv_grid: Vec<f64> = if nodal.has_grid_part {
            grid_part_derivs(u, grid)?
        } else {
            vec![0.0; grid.len()]
        };
        for (i, (&w, &rho)) in grid.weights().iter().zip(grid.nodes()).enumerate() {
            let dc = nodal.closed_derivs[i];
            total += grid.surface_measure()
                * w
                * rho.powf(grid.dimension() as f64 - 1.0)
                * (dc * dc + 2.0 * dc * deriv_grid[i]);
        }
        return Ok(total);
    }

    // General bubble sums: pairwise cross-center reduction.
    let mut total = 0.0;
    for (i, bi) in u.bubbles.iter().enumerate() {
        for (j, bj) in u.bubbles.iter().enumerate().skip(i) {
            let factor = if i == j { 1.0 } else { 2.0 };
            let term = if distance(&bi.center, &bj.center) < 1e-14 {
                integrate_about_center(grid, &bi.center, |r| {
                    bi.profile.dvalue(r) * bj.profile.dvalue(r)
                })?
            } else {
                let mut st = Structure::new(grid.dimension());
                st.point(&bi.center, true);
                st.point(&bj.center, true);
                let (pi, pj) = (bi.profile.clone(), bj.profile.clone());
                let (ci, cj) = (bi.center.clone(), bj.center.clone());
                integrate_structured(grid, angular_order, &st, &move |x: &[f64]| {
                    let ri = distance(x, &ci);
                    let rj = distance(x, &cj);
                    if ri < 1e-300 || rj < 1e-300 {
                        return 0.0;
                    }
                    let dot: f64 = x
                        .iter()
                        .zip(&ci)
                        .zip(&cj)
                        .map(|((xv, a), b)| (xv - a) * (xv - b))
                        .sum();
                    pi.dvalue(ri) * pj.dvalue(rj) * dot / (ri * rj)
                })?
            };
            total += factor * bi.amplitude * bj.amplitude * term;
        }
    }
    Ok(total)
}

/// Nodal d/dρ of the grid-sampled components.
fn grid_part_derivs(u: &Field, grid: &RadialGrid) -> Result<Vec<f64>> {
    let n = grid.len();
    let mut out = vec![0.0; n];
    for b in &u.bubbles {
        if let RadialProfile::GridSampled { data, .. } = &b.profile {
            let data = data
                .as_ref()
                .ok_or_else(|| Error::InvalidParams("deserialized grid profile".into()))?;
            if data.grid.len() == n && data.grid.r_min() == grid.r_min() {
                for i in 0..n {
                    out[i] += b.amplitude * data.nodal_derivatives[i];
                }
            } else {
                for (i, &rho) in grid.nodes().iter().enumerate() {
                    out[i] += b.amplitude * data.dvalue(rho);
                }
            }
        }
    }
    Ok(out)
}

/// 1-D integral ∫ f(ρ) ρ^{N-1} dρ · ω about an arbitrary center.
fn integrate_about_center(
    grid: &RadialGrid,
    _center: &[f64],
    f: impl Fn(f64) -> f64,
) -> Result<f64> {
    crate::quadrature::integrate_radial(grid, f)
}

/// ∫ (baseline + Σ atoms)(x) · u(x)² / |x|² dx.
pub(crate) fn weighted_hardy_mass(
    grid: &RadialGrid,
    angular_order: usize,
    u: &Field,
    baseline: f64,
    atoms: &[(Vec<f64>, AtomKind)],
) -> Result<f64> {
    if u.is_zero() {
        return Ok(0.0);
    }
    let radial_atoms = atoms.iter().all(|(c, _)| c.iter().all(|v| *v == 0.0));
    if u.radial_about_origin() && radial_atoms {
        let nodal = radial_nodal(u, grid)?;
        let mut total = 0.0;
        let nf = grid.dimension() as f64;
        for (i, (&w, &rho)) in grid.weights().iter().zip(grid.nodes()).enumerate() {
            let mut v = baseline;
            for (_, kind) in atoms {
                v += kind.value(rho);
            }
            total += w * rho.powf(nf - 1.0) * v * nodal.values[i] * nodal.values[i] / (rho * rho);
        }
        return Ok(total * grid.surface_measure());
    }

    let origin = vec![0.0; grid.dimension() as usize];
    let mut total = 0.0;
    for (i, bi) in u.bubbles.iter().enumerate() {
        for (j, bj) in u.bubbles.iter().enumerate().skip(i) {
            let factor = if i == j { 1.0 } else { 2.0 };
            // Baseline part.
            if baseline != 0.0 {
                let mut st = Structure::new(grid.dimension());
                st.point(&origin, true);
                st.point(&bi.center, true);
                st.point(&bj.center, true);
                let (pi, pj) = (bi.profile.clone(), bj.profile.clone());
                let (ci, cj) = (bi.center.clone(), bj.center.clone());
                let term = integrate_structured(grid, angular_order, &st, &move |x: &[f64]| {
                    let r2: f64 = x.iter().map(|v| v * v).sum();
                    if r2 < 1e-300 {
                        return 0.0;
                    }
                    pi.value(distance(x, &ci)) * pj.value(distance(x, &cj)) / r2
                })?;
                total += factor * baseline * bi.amplitude * bj.amplitude * term;
            }
            // Atom parts.
            for (ac, kind) in atoms {
                let mut st = Structure::new(grid.dimension());
                st.point(&origin, true);
                st.point(ac, false);
                st.point(&bi.center, true);
                st.point(&bj.center, true);
                let (pi, pj) = (bi.profile.clone(), bj.profile.clone());
                let (ci, cj) = (bi.center.clone(), bj.center.clone());
                let (ac, kind) = (ac.clone(), kind.clone());
                let term = integrate_structured(grid, angular_order, &st, &move |x: &[f64]| {
                    let r2: f64 = x.iter().map(|v| v * v).sum();
                    if r2 < 1e-300 {
                        return 0.0;
                    }
                    kind.value(distance(x, &ac))
                        * pi.value(distance(x, &ci))
                        * pj.value(distance(x, &cj))
                        / r2
                })?;
                total += factor * bi.amplitude * bj.amplitude * term;
            }
        }
    }
    Ok(total)
}

/// ∫ (baseline + Σ atoms)(x) |u(x)|^{2*} dx.
pub(crate) fn weighted_critical_mass(
    grid: &RadialGrid,
    angular_order: usize,
    u: &Field,
    baseline: f64,
    atoms: &[(Vec<f64>, AtomKind)],
) -> Result<f64> {
    if u.is_zero() {
        return Ok(0.0);
    }
    let p = crate::critical_exponent(grid.dimension());
    let radial_atoms = atoms.iter().all(|(c, _)| c.iter().all(|v| *v == 0.0));
    if u.radial_about_origin() && radial_atoms {
        let nodal = radial_nodal(u, grid)?;
        let mut total = 0.0;
        let nf = grid.dimension() as f64;
        for (i, (&w, &rho)) in grid.weights().iter().zip(grid.nodes()).enumerate() {
            let mut v = baseline;
            for (_, kind) in atoms {
                v += kind.value(rho);
            }
            total += w * rho.powf(nf - 1.0) * v * nodal.values[i].abs().powf(p);
        }
        return Ok(total * grid.surface_measure());
    }

    // |Σ bubbles|^{2*} is not pairwise-expandable: one structured integral
    // with every bubble center sharp and every atom center in the flat.
    let mut st = Structure::new(grid.dimension());
    for b in &u.bubbles {
        st.point(&b.center, true);
    }
    for (c, _) in atoms {
        st.point(c, false);
    }
    let bubbles: Vec<(f64, RadialProfile, Vec<f64>)> = u
        .bubbles
        .iter()
        .map(|b| (b.amplitude, b.profile.clone(), b.center.clone()))
        .collect();
    let atoms: Vec<(Vec<f64>, AtomKind)> = atoms.to_vec();
    integrate_structured(grid, angular_order, &st, &move |x: &[f64]| {
        let mut uval = 0.0;
        for (t, p_, c) in &bubbles {
            uval += t * p_.value(distance(x, c));
        }
        let mut kval = baseline;
        for (c, kind) in &atoms {
            kval += kind.value(distance(x, c));
        }
        kval * uval.abs().powf(p)
    })
}

// ---------------------------------------------------------------------------
// Public operations.

/// Full energy breakdown of a field under the given problem.
pub fn energy(spec: &ProblemSpec, u: &Field) -> Result<EnergyBreakdown> {
    let dirichlet = dirichlet_integral(&spec.grid, spec.angular_order, u)?;
    let hardy = weighted_hardy_mass(
        &spec.grid,
        spec.angular_order,
        u,
        spec.coupling + spec.h.baseline(),
        spec.h.atoms(),
    )?;
    let nonlinear = weighted_critical_mass(
        &spec.grid,
        spec.angular_order,
        u,
        spec.k.baseline(),
        spec.k.atoms(),
    )?;
    Ok(EnergyBreakdown::assemble(
        spec.dimension,
        dirichlet,
        hardy,
        nonlinear,
    ))
}

/// ∫|∇u|² / ∫u²/|x|²; by the Hardy inequality always ≥ Λ_N.
pub fn hardy_quotient(u: &Field, grid: &RadialGrid, angular_order: usize) -> Result<f64> {
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    let num = dirichlet_integral(grid, angular_order, u)?;
    let den = weighted_hardy_mass(grid, angular_order, u, 1.0, &[])?;
    if den.abs() < 1e-300 {
        return Err(Error::ZeroField);
    }
    Ok(num / den)
}

/// Q_A(u)/‖u‖_{2*}² with Q_A(u) = ∫|∇u|² - A∫u²/|x|².
pub fn sobolev_quotient_qa(
    coupling: f64,
    u: &Field,
    grid: &RadialGrid,
    angular_order: usize,
) -> Result<f64> {
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    let dir = dirichlet_integral(grid, angular_order, u)?;
    let hardy = weighted_hardy_mass(grid, angular_order, u, 1.0, &[])?;
    let mass = weighted_critical_mass(grid, angular_order, u, 1.0, &[])?;
    if mass.abs() < 1e-300 {
        return Err(Error::ZeroField);
    }
    let p = crate::critical_exponent(grid.dimension());
    Ok((dir - coupling * hardy) / mass.powf(2.0 / p))
}

/// ‖u‖_{2*}.
pub fn critical_norm(u: &Field, grid: &RadialGrid, angular_order: usize) -> Result<f64> {
    let mass = weighted_critical_mass(grid, angular_order, u, 1.0, &[])?;
    let p = crate::critical_exponent(grid.dimension());
    Ok(mass.powf(1.0 / p))
}

/// The unique t > 0 with t·u on the Nehari manifold:
/// t = (Q(u)/∫k|u|^{2*})^{(N-2)/4}.
pub fn nehari_scale(spec: &ProblemSpec, u: &Field) -> Result<NehariScaling> {
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    let e = energy(spec, u)?;
    nehari_scale_from(spec.dimension, &e)
}

/// Nehari scaling from an existing breakdown (shares the same integrals).
pub fn nehari_scale_from(dimension: u32, e: &EnergyBreakdown) -> Result<NehariScaling> {
    let q = e.dirichlet - e.hardy;
    if q <= 0.0 {
        return Err(Error::NonpositiveNumerator(q));
    }
    if e.nonlinear <= 0.0 {
        return Err(Error::NonpositiveDenominator(e.nonlinear));
    }
    let nf = dimension as f64;
    let t = (q / e.nonlinear).powf((nf - 2.0) / 4.0);
    Ok(NehariScaling {
        t,
        scaled_energy: e.scaled(dimension, t),
    })
}

/// max_{t>0} J(tu) = (1/N) (Q(u) / (∫k|u|^{2*})^{2/2*})^{N/2}.
pub fn mountain_pass_level(spec: &ProblemSpec, u: &Field) -> Result<f64> {
    let e = energy(spec, u)?;
    mountain_pass_level_from(spec.dimension, &e)
}

pub fn mountain_pass_level_from(dimension: u32, e: &EnergyBreakdown) -> Result<f64> {
    let q = e.dirichlet - e.hardy;
    if q <= 0.0 {
        return Err(Error::NonpositiveForm(q));
    }
    if e.nonlinear <= 0.0 {
        return Err(Error::NonpositiveDenominator(e.nonlinear));
    }
    let nf = dimension as f64;
    let p = crate::critical_exponent(dimension);
    Ok((q / e.nonlinear.powf(2.0 / p)).powf(nf / 2.0) / nf)
}

/// Weighted L² norm of the strong-form radial ODE residual
/// -u'' - (N-1)/ρ u' - (A+h)u/ρ² - k|u|^{2*-2}u, relative to the norm of
/// the nonlinear term, using analytic profile derivatives.
pub fn strong_residual_norm(spec: &ProblemSpec, u: &Field) -> Result<f64> {
    if !u.radial_about_origin() || !spec.is_radial() {
        return Err(Error::NotRadial(
            "strong residual needs a radial problem and field".into(),
        ));
    }
    let grid = &spec.grid;
    let nf = spec.dimension as f64;
    let p = spec.critical_exponent();
    let mut num = 0.0;
    let mut den = 0.0;
    for (&rho, &w) in grid.nodes().iter().zip(grid.weights()) {
        let mut val = 0.0;
        let mut lap = 0.0;
        for b in &u.bubbles {
            val += b.amplitude * b.profile.value(rho);
            lap += b.amplitude
                * (b.profile.d2value(rho) + (nf - 1.0) / rho * b.profile.dvalue(rho));
        }
        let mut v = spec.coupling + spec.h.baseline();
        for (_, kind) in spec.h.atoms() {
            v += kind.value(rho);
        }
        let mut k = spec.k.baseline();
        for (_, kind) in spec.k.atoms() {
            k += kind.value(rho);
        }
        let source = k * val.abs().powf(p - 2.0) * val;
        let res = -lap - v * val / (rho * rho) - source;
        let weight = w * rho.powf(nf - 1.0);
        num += weight * res * res;
        den += weight * source * source;
    }
    if den <= 0.0 {
        return Err(Error::ZeroField);
    }
    Ok((num / den).sqrt())
}

/// Riesz representative of J'(u) in the discrete Dirichlet inner product:
/// solves the radial Poisson problem for the strong-form residual. Returns
/// a grid-sampled radial field; the zero field iff u is a critical point.
pub fn gradient_j(spec: &ProblemSpec, u: &Field) -> Result<Field> {
    let (b, op) = gradient_loads(spec, u)?;
    let g = op.riesz_solve(&b)?;
    let profile = RadialProfile::grid_sampled(Arc::clone(&spec.grid), g)?;
    Ok(Field::single(
        1.0,
        profile,
        vec![0.0; spec.dimension as usize],
    ))
}

/// Gradient loads b = ∇(discrete J)(u) and the discrete operator.
pub(crate) fn gradient_loads(spec: &ProblemSpec, u: &Field) -> Result<(Vec<f64>, RadialOperator)> {
    if !spec.is_radial() {
        return Err(Error::NotRadial(
            "gradient_j needs radial coefficients".into(),
        ));
    }
    let grid = &spec.grid;
    let nodal = radial_nodal(u, grid)?;
    let op = RadialOperator::new(grid);
    let n = grid.len();
    let p = crate::critical_exponent(spec.dimension);
    let mut b = op.stiffness_apply(&nodal.grid_values);
    for (i, load) in b.iter_mut().enumerate() {
        let rho = grid.nodes()[i];
        let mut v = spec.coupling + spec.h.baseline();
        for (_, kind) in spec.h.atoms() {
            v += kind.value(rho);
        }
        let mut k = spec.k.baseline();
        for (_, kind) in spec.k.atoms() {
            k += kind.value(rho);
        }
        let uval = nodal.values[i];
        *load += op.mass[i]
            * (nodal.closed_neg_laplacian[i] - v * uval / (rho * rho)
                - k * uval.abs().powf(p - 2.0) * uval);
    }
    debug_assert_eq!(b.len(), n);
    Ok((b, op))
}


/// Test-only re-export of the Dirichlet integral builder.
#[doc(hidden)]
pub fn dirichlet_for_tests(
    grid: &RadialGrid,
    angular_order: usize,
    u: &Field,
) -> Result<f64> {
    dirichlet_integral(grid, angular_order, u)
}
