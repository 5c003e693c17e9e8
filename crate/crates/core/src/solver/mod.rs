//! Constructive existence: Nehari-constrained preconditioned descent for
//! radial problems, and finite-dimensional bubble-ansatz minimization for
//! the multi-peak multiplicity setting.
//!
//! The radial solver iterates positivity projection, Nehari rescaling and a
//! Dirichlet-preconditioned Armijo step, so J decreases monotonically along
//! accepted iterations and the Nehari identity J = (1/N)∫k|u|^{2*} holds
//! exactly along the way. The localized solver minimizes the ray level of
//! the three-parameter bubble ansatz (t, μ, c) with the center restricted to
//! the span of the peak set, subject to the trust region T_j ≤ δ; the
//! multiplicity gate is certified a posteriori (J < c̃ and no trust-region
//! contact), never derived from the non-constructive proof constants.

mod nelder_mead;

use crate::energy::{
    dirichlet_integral, energy, gradient_loads, mountain_pass_level_from, nehari_scale_from,
    weighted_critical_mass, weighted_hardy_mass, EnergyBreakdown,
};
use crate::error::{Error, Result};
use crate::fields::{Field, RadialProfile};
use crate::localization::{separation_check, t_j, PeakFrame, SeparationReport};
use crate::problem::ProblemSpec;
use crate::coefficients::{AtomKind, MaximaSet};
use nelder_mead::nelder_mead;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Options for both solvers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Relative residual target.
    pub tolerance: f64,
    pub armijo_initial_step: f64,
    pub armijo_backtrack: f64,
    pub armijo_decrease: f64,
    pub positivity_projection: bool,
    /// Trust-region δ for localized solves; defaults to the frame's r₀/3.
    pub trust_region_delta: Option<f64>,
    pub keep_trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 600,
            tolerance: 1e-5,
            armijo_initial_step: 1.0,
            armijo_backtrack: 0.5,
            armijo_decrease: 1e-4,
            positivity_projection: true,
            trust_region_delta: None,
            keep_trace: false,
        }
    }
}

/// One accepted iteration of a solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub j_value: f64,
    pub residual: f64,
    pub nehari_t: f64,
    pub step: f64,
    pub mu: Option<f64>,
    pub center_distance: Option<f64>,
    pub t_j: Vec<f64>,
}

/// Solution candidate with diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResult {
    pub field: Field,
    pub energy: EnergyBreakdown,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// T_j values against the peak frame when the problem has one.
    pub localization: Vec<f64>,
    /// J below the applicable Palais-Smale threshold (None when no theorem
    /// covers the configuration).
    pub below_threshold: Option<bool>,
    pub threshold: Option<f64>,
    pub trace: Vec<IterationRecord>,
}

/// The Palais-Smale threshold covered by the theory: c* (scaled by the
/// constant k) when k is constant, c̃(λ) when h ≡ 0.
fn applicable_threshold(spec: &ProblemSpec) -> Option<f64> {
    let sob = crate::thresholds::best_sobolev(spec.dimension, &spec.grid).ok()?;
    let nf = spec.dimension as f64;
    if spec.k.is_constant() {
        let kval = spec.k.baseline();
        if kval <= 0.0 {
            return None;
        }
        let (c, _) = crate::thresholds::cstar(spec.dimension, spec.coupling, &spec.h, sob).ok()?;
        return Some(c * kval.powf(-(nf - 2.0) / 2.0));
    }
    if spec.h.is_constant() && spec.h.baseline() == 0.0 {
        let (c, _) = crate::thresholds::tilde_c(spec.dimension, spec.coupling, &spec.k, sob).ok()?;
        return Some(c);
    }
    None
}

// ---------------------------------------------------------------------------
// Radial Nehari-constrained descent.

/// Nodal radial problem data replicating the discrete energy path.
struct RadialProblem {
    op: crate::energy::discrete::RadialOperator,
    v_nodes: Vec<f64>,
    k_nodes: Vec<f64>,
    rho: Vec<f64>,
    p: f64,
    dimension: u32,
}

impl RadialProblem {
    fn new(spec: &ProblemSpec) -> Result<RadialProblem> {
        if !spec.is_radial() {
            return Err(Error::NotRadial("solve_radial needs radial h and k".into()));
        }
        let grid = &spec.grid;
        let op = crate::energy::discrete::RadialOperator::new(grid);
        let v_nodes: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&rho| {
                let mut v = spec.coupling + spec.h.baseline();
                for (_, kind) in spec.h.atoms() {
                    v += kind.value(rho);
                }
                v
            })
            .collect();
        let k_nodes: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&rho| {
                let mut v = spec.k.baseline();
                for (_, kind) in spec.k.atoms() {
                    v += kind.value(rho);
                }
                v
            })
            .collect();
        Ok(RadialProblem {
            op,
            v_nodes,
            k_nodes,
            rho: grid.nodes().to_vec(),
            p: spec.critical_exponent(),
            dimension: spec.dimension,
        })
    }

    fn breakdown(&self, u: &[f64]) -> EnergyBreakdown {
        let dir = self.op.stiffness_form(u, u);
        let mut hardy = 0.0;
        let mut nl = 0.0;
        for i in 0..u.len() {
            hardy += self.op.mass[i] * self.v_nodes[i] * u[i] * u[i] / (self.rho[i] * self.rho[i]);
            nl += self.op.mass[i] * self.k_nodes[i] * u[i].abs().powf(self.p);
        }
        let j = 0.5 * dir - 0.5 * hardy - nl / self.p;
        EnergyBreakdown {
            dirichlet: dir,
            hardy,
            nonlinear: nl,
            j_value: j,
            nehari_residual: dir - hardy - nl,
        }
    }

    fn loads(&self, u: &[f64]) -> Vec<f64> {
        let mut b = self.op.stiffness_apply(u);
        for i in 0..u.len() {
            b[i] -= self.op.mass[i]
                * (self.v_nodes[i] * u[i] / (self.rho[i] * self.rho[i])
                    + self.k_nodes[i] * u[i].abs().powf(self.p - 2.0) * u[i]);
        }
        b
    }

    /// Nehari projection in place; returns t or an infeasibility error.
    fn project(&self, u: &mut [f64]) -> Result<f64> {
        let e = self.breakdown(u);
        let q = e.dirichlet - e.hardy;
        if q <= 0.0 {
            return Err(Error::NonpositiveNumerator(q));
        }
        if e.nonlinear <= 0.0 {
            return Err(Error::NonpositiveDenominator(e.nonlinear));
        }
        let nf = self.dimension as f64;
        let t = (q / e.nonlinear).powf((nf - 2.0) / 4.0);
        for v in u.iter_mut() {
            *v *= t;
        }
        Ok(t)
    }
}

/// Nehari-constrained preconditioned gradient descent for radial problems.
pub fn solve_radial(spec: &ProblemSpec, init: &Field, opts: &SolverOptions) -> Result<SolveResult> {
    let problem = RadialProblem::new(spec)?;
    if init.is_zero() {
        return Err(Error::InfeasibleInit("zero initial field".into()));
    }
    if !init.radial_about_origin() {
        return Err(Error::NotRadial("initial field must be radial".into()));
    }
    // Coercivity analogue of (h2)/(K0): the quadratic form must be positive
    // and the nonlinearity must see positive k somewhere.
    if spec.coupling + spec.h.sup_norm() >= spec.lambda_n() {
        return Err(Error::HypothesisViolated(format!(
            "A + sup|h| = {} reaches the Hardy constant {}",
            spec.coupling + spec.h.sup_norm(),
            spec.lambda_n()
        )));
    }
    if spec.k.sup_value() <= 0.0 {
        return Err(Error::HypothesisViolated("k is nonpositive".into()));
    }

    let nodal = crate::energy::radial_nodal(init, &spec.grid)?;
    let mut u = nodal.values;
    if opts.positivity_projection {
        for v in u.iter_mut() {
            *v = v.abs();
        }
    }
    problem
        .project(&mut u)
        .map_err(|e| Error::InfeasibleInit(format!("Nehari projection failed: {e}")))?;

    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut residual_rel = f64::INFINITY;
    let mut last_t = 1.0;
    let mut last_step = 0.0;

    for iter in 0..opts.max_iterations {
        iterations = iter + 1;
        let e = problem.breakdown(&u);
        let b = problem.loads(&u);
        let g = problem.op.riesz_solve(&b)?;
        let gnorm2: f64 = b.iter().zip(&g).map(|(x, y)| x * y).sum();
        let unorm2 = problem.op.stiffness_form(&u, &u);
        residual_rel = (gnorm2.max(0.0) / unorm2.max(1e-300)).sqrt();

        if opts.keep_trace {
            trace.push(IterationRecord {
                iteration: iter,
                j_value: e.j_value,
                residual: residual_rel,
                nehari_t: last_t,
                step: last_step,
                mu: None,
                center_distance: None,
                t_j: Vec::new(),
            });
        }

        if residual_rel <= opts.tolerance {
            converged = true;
            break;
        }

        // Armijo backtracking on the projected trial point.
        let mut step = opts.armijo_initial_step;
        let mut accepted = false;
        for _ in 0..60 {
            let mut trial: Vec<f64> = u.iter().zip(&g).map(|(v, gi)| v - step * gi).collect();
            if opts.positivity_projection {
                for v in trial.iter_mut() {
                    *v = v.abs();
                }
            }
            match problem.project(&mut trial) {
                Ok(t) => {
                    let et = problem.breakdown(&trial);
                    if et.j_value <= e.j_value - opts.armijo_decrease * step * gnorm2 {
                        u = trial;
                        last_t = t;
                        last_step = step;
                        accepted = true;
                        break;
                    }
                }
                Err(_) => {}
            }
            step *= opts.armijo_backtrack;
        }
        if !accepted {
            // Line-search stall: no further monotone progress available.
            converged = residual_rel <= opts.tolerance;
            break;
        }
    }

    let profile = RadialProfile::grid_sampled(Arc::clone(&spec.grid), u)?;
    let field = Field::single(1.0, profile, vec![0.0; spec.dimension as usize]);
    let e = energy(spec, &field)?;
    let threshold = applicable_threshold(spec);
    let localization = frame_t_values(spec, &field)?;
    Ok(SolveResult {
        below_threshold: threshold.map(|c| e.j_value < c),
        threshold,
        field,
        energy: e,
        residual: residual_rel,
        iterations,
        converged,
        localization,
        trace,
    })
}

fn frame_t_values(spec: &ProblemSpec, field: &Field) -> Result<Vec<f64>> {
    if let MaximaSet::Finite { points } = spec.k.maxima_set() {
        if points.len() > 1 || !spec.k.is_constant() {
            if let Ok(frame) = PeakFrame::new(points.clone(), f64::INFINITY) {
                let mut ts = Vec::with_capacity(frame.maxima.len());
                for j in 0..frame.maxima.len() {
                    ts.push(t_j(field, &frame, j, &spec.grid, spec.angular_order)?);
                }
                return Ok(ts);
            }
        }
    }
    Ok(Vec::new())
}

/// Dirichlet norm of the Riesz gradient (radial fields) or the reduced
/// ansatz-gradient norm (single-bubble fields), relative to the field size.
pub fn residual(spec: &ProblemSpec, u: &Field) -> Result<f64> {
    if u.is_zero() {
        return Ok(0.0);
    }
    if u.radial_about_origin() && spec.is_radial() {
        let (b, op) = gradient_loads(spec, u)?;
        let g = op.riesz_solve(&b)?;
        let gnorm2: f64 = b.iter().zip(&g).map(|(x, y)| x * y).sum();
        let nodal = crate::energy::radial_nodal(u, &spec.grid)?;
        let unorm2 = op.stiffness_form(&nodal.values, &nodal.values);
        return Ok((gnorm2.max(0.0) / unorm2.max(1e-300)).sqrt());
    }
    if u.bubbles.len() == 1 {
        return ansatz_residual(spec, u);
    }
    Err(Error::NotRadial(
        "residual needs a radial field or a single-bubble ansatz".into(),
    ))
}

// ---------------------------------------------------------------------------
// Localized bubble-ansatz minimization.

/// Ray level of the Talenti ansatz at (μ, c): J_λ after Nehari rescaling.
fn ansatz_level(spec: &ProblemSpec, mu: f64, center: &[f64]) -> Result<(f64, EnergyBreakdown)> {
    let u = Field::single(
        1.0,
        RadialProfile::talenti(spec.dimension, mu)?,
        center.to_vec(),
    );
    let dir = dirichlet_integral(&spec.grid, spec.angular_order, &u)?;
    let gamma = weighted_hardy_mass(&spec.grid, spec.angular_order, &u, 1.0, &[])?;
    let mass = weighted_critical_mass(
        &spec.grid,
        spec.angular_order,
        &u,
        spec.k.baseline(),
        spec.k.atoms(),
    )?;
    let e = EnergyBreakdown {
        dirichlet: dir,
        hardy: spec.coupling * gamma,
        nonlinear: mass,
        j_value: 0.0,
        nehari_residual: 0.0,
    };
    let level = mountain_pass_level_from(spec.dimension, &e)?;
    Ok((level, e))
}

fn ansatz_residual(spec: &ProblemSpec, u: &Field) -> Result<f64> {
    let b = &u.bubbles[0];
    let mu = b
        .profile
        .scale()
        .ok_or_else(|| Error::InvalidParams("ansatz residual needs a scaled profile".into()))?;
    let (level0, _) = ansatz_level(spec, mu, &b.center)?;
    let mut grad2 = 0.0;
    let h = 1e-5;
    // log μ direction.
    let lp = ansatz_level(spec, mu * (1.0 + h), &b.center)?.0;
    let lm = ansatz_level(spec, mu * (1.0 - h), &b.center)?.0;
    grad2 += ((lp - lm) / (2.0 * h)).powi(2);
    // center directions within the coordinate axes that carry geometry.
    for axis in 0..spec.dimension as usize {
        let mut cp = b.center.clone();
        let mut cm = b.center.clone();
        cp[axis] += h;
        cm[axis] -= h;
        let lp = ansatz_level(spec, mu, &cp)?.0;
        let lm = ansatz_level(spec, mu, &cm)?.0;
        grad2 += ((lp - lm) / (2.0 * h)).powi(2);
    }
    Ok(grad2.sqrt() / level0.abs().max(1e-300))
}

/// Flat-top width of the k preset's atoms (initialization scale).
fn peak_width(spec: &ProblemSpec) -> f64 {
    for (_, kind) in spec.k.atoms() {
        if let AtomKind::FlatTop { width, .. } = kind {
            return *width;
        }
    }
    1.0
}

fn build_peak_frame(spec: &ProblemSpec) -> Result<PeakFrame> {
    let points = match spec.k.maxima_set() {
        MaximaSet::Finite { points } => points.clone(),
        _ => {
            return Err(Error::HypothesisViolated(
                "localized solve needs finitely many maxima (K1)".into(),
            ))
        }
    };
    let big_r0 = spec
        .k_hypotheses
        .witness("K3", "R0")
        .unwrap_or_else(|| {
            let extent = points
                .iter()
                .map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt())
                .fold(0.0_f64, f64::max);
            2.0 * (extent + 1.0)
        });
    PeakFrame::new(points, big_r0)
}

/// Minimize J_λ over the bubble ansatz near peak j, inside the trust region
/// T_j ≤ δ. The λ-gate of the multiplicity theorem is certified a
/// posteriori: J < c̃ and no trust-region contact.
pub fn solve_localized(spec: &ProblemSpec, j: usize, opts: &SolverOptions) -> Result<SolveResult> {
    for name in ["K0", "K1", "K2"] {
        if !spec.k_hypotheses.passed(name) {
            return Err(Error::HypothesisViolated(format!(
                "({name}) fails for the k preset"
            )));
        }
    }
    let frame = build_peak_frame(spec)?;
    if j >= frame.maxima.len() {
        return Err(Error::HypothesisViolated(format!(
            "peak index {j} out of range (have {})",
            frame.maxima.len()
        )));
    }
    let delta = opts.trust_region_delta.unwrap_or(frame.delta);
    let a_j = frame.maxima[j].clone();

    // Center offsets live in the span of {maxima, origin} - a_j.
    let dim = spec.dimension as usize;
    let mut span_points: Vec<Vec<f64>> = vec![a_j.clone(), vec![0.0; dim]];
    span_points.extend(frame.maxima.iter().cloned());
    let (_, basis) = crate::quadrature::orthonormal_span(&span_points);
    let n_params = 1 + basis.len();

    let center_of = |params: &[f64]| -> Vec<f64> {
        let mut c = a_j.clone();
        for (k, e) in basis.iter().enumerate() {
            for (ci, ei) in c.iter_mut().zip(e) {
                *ci += params[1 + k] * ei;
            }
        }
        c
    };

    let objective = |params: &[f64]| -> f64 {
        let mu = params[0].exp();
        if !(1e-8..=1e3).contains(&mu) {
            return f64::INFINITY;
        }
        let c = center_of(params);
        let u = match crate::fields::talenti(spec.dimension, mu, &c) {
            Ok(u) => u,
            Err(_) => return f64::INFINITY,
        };
        let tj = match t_j(&u, &frame, j, &spec.grid, spec.angular_order) {
            Ok(t) => t,
            Err(_) => return f64::INFINITY,
        };
        if tj >= delta {
            return f64::INFINITY;
        }
        match ansatz_level(spec, mu, &c) {
            Ok((level, _)) => level,
            Err(_) => f64::INFINITY,
        }
    };

    let mu0 = 0.1 * peak_width(spec).min(frame.r0);
    let mut p0 = vec![mu0.ln()];
    p0.extend(std::iter::repeat_n(0.0, basis.len()));
    let mut steps = vec![0.5];
    steps.extend(std::iter::repeat_n(0.05 * frame.r0, basis.len()));

    let nm = nelder_mead(&objective, &p0, &steps, 400 * n_params, 1e-12);
    if !nm.best_value.is_finite() {
        return Err(Error::InfeasibleInit(
            "no feasible ansatz point found in the trust region".into(),
        ));
    }

    let mu = nm.best_point[0].exp();
    let c = center_of(&nm.best_point);
    let u = crate::fields::talenti(spec.dimension, mu, &c)?;
    let tj_final = t_j(&u, &frame, j, &spec.grid, spec.angular_order)?;
    if tj_final >= delta - 1e-9 {
        return Err(Error::TrustRegionViolation {
            j,
            t_value: tj_final,
            delta,
        });
    }

    let (_, e_ansatz) = ansatz_level(spec, mu, &c)?;
    let scaling = nehari_scale_from(spec.dimension, &e_ansatz)?;
    let field = u.scaled_amplitude(scaling.t);
    let e = energy(spec, &field)?;
    let res = ansatz_residual(spec, &field)?;

    let mut localization = Vec::with_capacity(frame.maxima.len());
    for i in 0..frame.maxima.len() {
        localization.push(t_j(&field, &frame, i, &spec.grid, spec.angular_order)?);
    }

    let sob = crate::thresholds::best_sobolev(spec.dimension, &spec.grid)?;
    let (threshold, _) =
        crate::thresholds::tilde_c(spec.dimension, spec.coupling, &spec.k, sob)?;
    let converged = nm.converged;
    let below = e.j_value < threshold;

    let trace = if opts.keep_trace {
        nm.trace
            .iter()
            .enumerate()
            .map(|(it, (params, value))| IterationRecord {
                iteration: it,
                j_value: *value,
                residual: f64::NAN,
                nehari_t: scaling.t,
                step: f64::NAN,
                mu: Some(params[0].exp()),
                center_distance: Some(crate::quadrature::distance(&center_of(params), &a_j)),
                t_j: Vec::new(),
            })
            .collect()
    } else {
        Vec::new()
    };

    Ok(SolveResult {
        field,
        energy: e,
        residual: res,
        iterations: nm.iterations,
        converged,
        localization,
        below_threshold: Some(below),
        threshold: Some(threshold),
        trace,
    })
}

/// Outcome of a multiplicity run: one localized solution candidate per peak.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiplicityOutcome {
    pub results: Vec<SolveResult>,
    /// Peak index of each result (tie-broken report order).
    pub peak_of: Vec<usize>,
    pub separation: SeparationReport,
    /// Every solve converged strictly below c̃ with pairwise-distinct
    /// localization singletons.
    pub certified: bool,
    pub threshold: f64,
}

/// One localized solve per maximum of k, with the separation check.
pub fn multiplicity_run(spec: &ProblemSpec, opts: &SolverOptions) -> Result<MultiplicityOutcome> {
    let frame = build_peak_frame(spec)?;
    let m = frame.maxima.len();
    let mut results = Vec::with_capacity(m);
    let mut peak_of = Vec::with_capacity(m);
    for j in 0..m {
        results.push(solve_localized(spec, j, opts)?);
        peak_of.push(j);
    }

    // Deterministic report order: energy ascending, ties by smaller μ first.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        let ea = results[a].energy.j_value;
        let eb = results[b].energy.j_value;
        let scale = ea.abs().max(eb.abs()).max(1e-300);
        if (ea - eb).abs() > 1e-9 * scale {
            ea.partial_cmp(&eb).unwrap()
        } else {
            let mu_a = results[a].field.bubbles[0].profile.scale().unwrap_or(0.0);
            let mu_b = results[b].field.bubbles[0].profile.scale().unwrap_or(0.0);
            mu_a.partial_cmp(&mu_b).unwrap()
        }
    });
    let results: Vec<SolveResult> = order.iter().map(|&i| results[i].clone()).collect();
    let peak_of: Vec<usize> = order.iter().map(|&i| peak_of[i]).collect();

    let fields: Vec<Field> = results.iter().map(|r| r.field.clone()).collect();
    let separation = separation_check(&fields, &frame, &spec.grid, spec.angular_order)?;

    let sob = crate::thresholds::best_sobolev(spec.dimension, &spec.grid)?;
    let (threshold, _) =
        crate::thresholds::tilde_c(spec.dimension, spec.coupling, &spec.k, sob)?;
    let certified = results
        .iter()
        .all(|r| r.converged && r.below_threshold == Some(true))
        && separation.all_singletons
        && separation.pairwise_distinct
        && separation.localized_sets.iter().all(|s| !s.is_empty());

    Ok(MultiplicityOutcome {
        results,
        peak_of,
        separation,
        certified,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{make_h_preset, make_k_preset, HPreset, KPreset};
    use crate::fields::{evaluate, ground_state};
    use approx::assert_relative_eq;

    fn two_peak_spec(lambda_frac: f64) -> ProblemSpec {
        let grid = Arc::new(crate::quadrature::RadialGrid::defaults(4).unwrap());
        let h = make_h_preset(&HPreset::Zero, 4).unwrap();
        let k = make_k_preset(
            &KPreset::TwoPeak {
                distance: 2.0,
                width: 1.0,
                height: 1.0,
                theta: 2.5,
                floor: 0.0,
            },
            4,
        )
        .unwrap();
        ProblemSpec::new(lambda_frac, h, k, grid, 48).unwrap()
    }

    #[test]
    fn zero_init_is_infeasible() {
        let spec = ProblemSpec::unperturbed(3, 0.1).unwrap();
        assert!(matches!(
            solve_radial(&spec, &Field::zero(3), &SolverOptions::default()),
            Err(Error::InfeasibleInit(_))
        ));
    }

    #[test]
    fn coupling_beyond_hardy_is_rejected() {
        let spec = ProblemSpec::unperturbed(3, 0.3).unwrap(); // Λ_3 = 0.25
        let w = crate::fields::talenti(3, 1.0, &[0.0; 3]).unwrap();
        assert!(matches!(
            solve_radial(&spec, &w, &SolverOptions::default()),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn radial_solve_recovers_ground_state_family() {
        let lam = 0.25;
        let a = 0.5 * lam;
        let spec = ProblemSpec::unperturbed(3, a).unwrap();
        let mut init = ground_state(3, a, 1.0).unwrap();
        init.push(
            0.05,
            RadialProfile::talenti(3, 2.0).unwrap(),
            vec![0.0; 3],
        );
        let opts = SolverOptions {
            keep_trace: true,
            ..SolverOptions::default()
        };
        let res = solve_radial(&spec, &init, &opts).unwrap();
        assert!(res.converged, "residual {}", res.residual);
        assert!(res.residual <= 1e-5);

        // Monotone descent along accepted iterations.
        for w in res.trace.windows(2) {
            assert!(w[1].j_value <= w[0].j_value + 1e-12 * w[0].j_value.abs());
        }

        // Converged invariants: Nehari identity, nonnegativity, ray level.
        assert!(res.energy.nehari_residual.abs() <= 1e-8 * res.energy.dirichlet);
        let data = res.field.bubbles[0].profile.sampled_data().unwrap();
        assert!(data.values.iter().all(|&v| v >= -1e-12));
        let level = crate::energy::mountain_pass_level(&spec, &res.field).unwrap();
        assert_relative_eq!(level, res.energy.j_value, max_relative = 1e-8);

        // J matches the closed-form mountain-pass level of the family.
        let s = crate::thresholds::best_sobolev(3, &spec.grid).unwrap();
        let expected = s.powf(1.5) / 3.0 * (1.0 - a / lam).powf(1.0);
        assert_relative_eq!(res.energy.j_value, expected, max_relative = 1e-3);

        // Pointwise recovery of the nearest family member (the scale is a
        // zero mode, so fit μ by minimizing the sup-relative distance over
        // the bubble-scale window).
        let nodes = spec.grid.nodes();
        let dist = |mu: f64| -> f64 {
            let w = ground_state(3, a, mu).unwrap();
            let mut worst: f64 = 0.0;
            for (i, &r) in nodes.iter().enumerate() {
                if !(1e-4..=1e4).contains(&r) {
                    continue;
                }
                let wv = evaluate(&w, &[r, 0.0, 0.0]).unwrap();
                worst = worst.max((data.values[i] - wv).abs() / wv);
            }
            worst
        };
        let mut best = (1.0_f64, dist(1.0));
        for k in 0..=120 {
            let mu = 0.25 * 16f64.powf(k as f64 / 120.0);
            let d = dist(mu);
            if d < best.1 {
                best = (mu, d);
            }
        }
        let (mut lo, mut hi) = (best.0 * 0.95, best.0 / 0.95);
        for _ in 0..60 {
            let phi = (5f64.sqrt() - 1.0) / 2.0;
            let c = hi - phi * (hi - lo);
            let d = lo + phi * (hi - lo);
            if dist(c) <= dist(d) {
                hi = d;
            } else {
                lo = c;
            }
        }
        let worst = dist(0.5 * (lo + hi)).min(best.1);
        assert!(worst <= 1e-3, "pointwise distance {worst}");
    }

    #[test]
    fn residual_detects_off_manifold_fields() {
        let lam = 0.25;
        let a = 0.5 * lam;
        let spec = ProblemSpec::unperturbed(3, a).unwrap();
        assert_eq!(residual(&spec, &Field::zero(3)).unwrap(), 0.0);
        let w = ground_state(3, a, 1.0).unwrap();
        let r_exact = residual(&spec, &w).unwrap();
        assert!(r_exact <= 1e-5, "ground-state residual {r_exact}");
        let scaled = w.scaled_amplitude(1.5);
        let r_off = residual(&spec, &scaled).unwrap();
        assert!(r_off > r_exact * 10.0, "{r_off} vs {r_exact}");
    }

    #[test]
    fn localized_peak_index_out_of_range() {
        let spec = two_peak_spec(0.1);
        assert!(matches!(
            solve_localized(&spec, 5, &SolverOptions::default()),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn localized_requires_k_hypotheses() {
        let spec = ProblemSpec::unperturbed(4, 0.1).unwrap();
        assert!(matches!(
            solve_localized(&spec, 0, &SolverOptions::default()),
            Err(Error::HypothesisViolated(_))
        ));
    }
}
