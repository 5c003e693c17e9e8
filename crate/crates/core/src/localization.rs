//! Concentration diagnostics: the localization functionals T_j, the
//! truncated Dirichlet barycenter Ξ, tail masses, peak separation, and the
//! concentration verification along λ-sweeps.
//!
//! ```text
//! T_j(u) = ∫ψ_j(x)|∇u|²dx / ∫|∇u|²dx,   ψ_j(x) = min{1, |x-a_j|},
//! Ξ(u)   = ∫ξ(x)|∇u|²dx / ∫|∇u|²dx,     ξ(x) = x·min{1, R₀/|x|}.
//! ```

use crate::energy::dirichlet_integral;
use crate::error::{Error, Result};
use crate::fields::Field;
use crate::problem::ProblemSpec;
use crate::quadrature::{distance, integrate_structured, RadialGrid, Structure};
use crate::coefficients::{CoefficientProfile, MaximaSet};
use serde::{Deserialize, Serialize};

/// Geometry of the peak set: maxima, disjointness radius r₀, the separation
/// threshold δ = r₀/3, and the barycenter truncation radius R₀.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeakFrame {
    pub maxima: Vec<Vec<f64>>,
    pub r0: f64,
    pub delta: f64,
    pub big_r0: f64,
}

impl PeakFrame {
    /// r₀ = min(1, half the minimum pairwise distance of maxima); δ = r₀/3;
    /// R₀ from the (K3) check (override allowed). Every maximum must lie in
    /// B_{R₀-1}(0).
    pub fn new(maxima: Vec<Vec<f64>>, big_r0: f64) -> Result<PeakFrame> {
        if maxima.is_empty() {
            return Err(Error::InvalidParams("no maxima".into()));
        }
        let mut min_dist = f64::INFINITY;
        for (i, a) in maxima.iter().enumerate() {
            for b in maxima.iter().skip(i + 1) {
                min_dist = min_dist.min(distance(a, b));
            }
        }
        let r0 = (0.5 * min_dist).min(1.0);
        if !(r0 > 0.0) {
            return Err(Error::InvalidParams(
                "maxima are not pairwise separated".into(),
            ));
        }
        for a in &maxima {
            let norm: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm >= big_r0 - 1.0 {
                return Err(Error::InvalidParams(format!(
                    "maximum at distance {norm} violates |a| < R0 - 1 = {}",
                    big_r0 - 1.0
                )));
            }
        }
        Ok(PeakFrame {
            maxima,
            r0,
            delta: r0 / 3.0,
            big_r0,
        })
    }

    /// Build the frame from a coefficient with finitely many maxima, taking
    /// R₀ from its (K3) check.
    pub fn from_profile(k: &CoefficientProfile, dimension: u32) -> Result<PeakFrame> {
        let points = match k.maxima_set() {
            MaximaSet::Finite { points } => points.clone(),
            _ => {
                return Err(Error::HypothesisViolated(
                    "(K1) fails: peak frame needs finitely many maxima".into(),
                ))
            }
        };
        let report = crate::coefficients::check_k_hypotheses(k, dimension);
        let big_r0 = report
            .witness("K3", "R0")
            .ok_or_else(|| Error::HypothesisViolated("(K3) fails: no tail radius".into()))?;
        PeakFrame::new(points, big_r0)
    }
}

/// Dirichlet integral weighted by a radial function about a center, with a
/// kink sphere registered there.
fn weighted_dirichlet(
    grid: &RadialGrid,
    angular_order: usize,
    u: &Field,
    weight_center: &[f64],
    kink_radius: Option<f64>,
    weight: impl Fn(&[f64]) -> f64 + Clone + 'static,
) -> Result<f64> {
    let mut total = 0.0;
    for (i, bi) in u.bubbles.iter().enumerate() {
        for (j, bj) in u.bubbles.iter().enumerate().skip(i) {
            let factor = if i == j { 1.0 } else { 2.0 };
            let mut st = Structure::new(grid.dimension());
            st.point(weight_center, false);
            if let Some(r) = kink_radius {
                st.kink_sphere(weight_center, r);
            }
            st.point(&bi.center, true);
            st.point(&bj.center, true);
            let (pi, pj) = (bi.profile.clone(), bj.profile.clone());
            let (ci, cj) = (bi.center.clone(), bj.center.clone());
            let w = weight.clone();
            let term = integrate_structured(grid, angular_order, &st, &move |x: &[f64]| {
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
                w(x) * pi.dvalue(ri) * pj.dvalue(rj) * dot / (ri * rj)
            })?;
            total += factor * bi.amplitude * bj.amplitude * term;
        }
    }
    Ok(total)
}

/// T_j(u) ∈ [0, 1]: Dirichlet-weighted average of min{1, |x - a_j|}.
pub fn t_j(
    u: &Field,
    frame: &PeakFrame,
    j: usize,
    grid: &RadialGrid,
    angular_order: usize,
) -> Result<f64> {
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    if j >= frame.maxima.len() {
        return Err(Error::HypothesisViolated(format!(
            "peak index {j} out of range (have {})",
            frame.maxima.len()
        )));
    }
    let a_j = frame.maxima[j].clone();
    let a_w = a_j.clone();
    let num = weighted_dirichlet(grid, angular_order, u, &a_j, Some(1.0), move |x: &[f64]| {
        distance(x, &a_w).min(1.0)
    })?;
    let den = dirichlet_integral(grid, angular_order, u)?;
    if den <= 0.0 {
        return Err(Error::ZeroField);
    }
    Ok((num / den).clamp(0.0, 1.0))
}

/// Per-field localization sets {j : T_j ≤ δ} and their pairwise disjointness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparationReport {
    /// T_j values per field.
    pub t_values: Vec<Vec<f64>>,
    /// {j : T_j(u_i) ≤ δ} per field.
    pub localized_sets: Vec<Vec<usize>>,
    /// Each set has cardinality ≤ 1 (the separation Corollary).
    pub all_singletons: bool,
    /// All nonempty sets are pairwise distinct.
    pub pairwise_distinct: bool,
}

/// Evaluate the separation structure of a family of fields.
pub fn separation_check(
    fields: &[Field],
    frame: &PeakFrame,
    grid: &RadialGrid,
    angular_order: usize,
) -> Result<SeparationReport> {
    let mut t_values = Vec::with_capacity(fields.len());
    let mut localized_sets = Vec::with_capacity(fields.len());
    for u in fields {
        let mut ts = Vec::with_capacity(frame.maxima.len());
        for j in 0..frame.maxima.len() {
            ts.push(t_j(u, frame, j, grid, angular_order)?);
        }
        let set: Vec<usize> = ts
            .iter()
            .enumerate()
            .filter(|(_, &t)| t <= frame.delta)
            .map(|(j, _)| j)
            .collect();
        t_values.push(ts);
        localized_sets.push(set);
    }
    let all_singletons = localized_sets.iter().all(|s| s.len() <= 1);
    let mut pairwise_distinct = true;
    for (i, a) in localized_sets.iter().enumerate() {
        for b in localized_sets.iter().skip(i + 1) {
            if !a.is_empty() && a == b {
                pairwise_distinct = false;
            }
        }
    }
    Ok(SeparationReport {
        t_values,
        localized_sets,
        all_singletons,
        pairwise_distinct,
    })
}

/// Ξ(u): truncated Dirichlet barycenter, always inside the closed ball of
/// radius R₀.
pub fn xi_map(
    u: &Field,
    frame: &PeakFrame,
    grid: &RadialGrid,
    angular_order: usize,
) -> Result<Vec<f64>> {
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    let dim = grid.dimension() as usize;
    let den = dirichlet_integral(grid, angular_order, u)?;
    if den <= 0.0 {
        return Err(Error::ZeroField);
    }
    let origin = vec![0.0; dim];
    let big_r0 = frame.big_r0;

    // The numerator components live in the span of the bubble centers; each
    // component is one weighted Dirichlet integral with the axial factor
    // (x·e) ξ-truncated at |x| = R₀.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for b in &u.bubbles {
        let mut v = b.center.clone();
        for e in &basis {
            let proj: f64 = v.iter().zip(e).map(|(a, b)| a * b).sum();
            for (vi, ei) in v.iter_mut().zip(e) {
                *vi -= proj * ei;
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            basis.push(v);
        }
    }

    let mut xi = vec![0.0; dim];
    for e in &basis {
        let e_cl = e.clone();
        let num = weighted_dirichlet(
            grid,
            angular_order,
            u,
            &origin,
            Some(big_r0),
            move |x: &[f64]| {
                let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                let scale = if r <= big_r0 { 1.0 } else { big_r0 / r };
                let axial: f64 = x.iter().zip(&e_cl).map(|(a, b)| a * b).sum();
                axial * scale
            },
        )?;
        let c = num / den;
        for (xi_i, e_i) in xi.iter_mut().zip(e) {
            *xi_i += c * e_i;
        }
    }
    Ok(xi)
}

/// Tail and ball masses of a field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConcentrationReport {
    /// (R, μ_R, ν_R, γ_R): tail Dirichlet, critical and Hardy masses.
    pub tails: Vec<(f64, f64, f64, f64)>,
    /// Per-peak Dirichlet and critical masses in B_{r₀}(a_j).
    pub peak_masses: Vec<(f64, f64)>,
    /// Dirichlet, critical and Hardy masses in B_{r₀}(0).
    pub origin_masses: (f64, f64, f64),
    /// Fitted decay exponent of ν_R against R (no limit is claimed).
    pub nu_tail_exponent: Option<f64>,
    pub dirichlet_total: f64,
    pub critical_total: f64,
    pub hardy_total: f64,
}

/// Weighted critical mass with an indicator-like weight.
fn weighted_critical(
    grid: &RadialGrid,
    angular_order: usize,
    u: &Field,
    center: &[f64],
    kink_radius: f64,
    weight: impl Fn(&[f64]) -> f64 + Clone + 'static,
) -> Result<f64> {
    let p = crate::critical_exponent(grid.dimension());
    let mut st = Structure::new(grid.dimension());
    st.point(center, false);
    st.kink_sphere(center, kink_radius);
    for b in &u.bubbles {
        st.point(&b.center, true);
    }
    let bubbles: Vec<(f64, crate::fields::RadialProfile, Vec<f64>)> = u
        .bubbles
        .iter()
        .map(|b| (b.amplitude, b.profile.clone(), b.center.clone()))
        .collect();
    integrate_structured(grid, angular_order, &st, &move |x: &[f64]| {
        let mut uval = 0.0;
        for (t, pr, c) in &bubbles {
            uval += t * pr.value(distance(x, c));
        }
        weight(x) * uval.abs().powf(p)
    })
}

/// Weighted Hardy mass u²/|x|² with an indicator-like weight about `center`.
fn weighted_hardy(
    grid: &RadialGrid,
    angular_order: usize,
    u: &Field,
    center: &[f64],
    kink_radius: f64,
    weight: impl Fn(&[f64]) -> f64 + Clone + 'static,
) -> Result<f64> {
    let dim = grid.dimension() as usize;
    let origin = vec![0.0; dim];
    let mut total = 0.0;
    for (i, bi) in u.bubbles.iter().enumerate() {
        for (j, bj) in u.bubbles.iter().enumerate().skip(i) {
            let factor = if i == j { 1.0 } else { 2.0 };
            let mut st = Structure::new(grid.dimension());
            st.point(&origin, true);
            st.point(center, false);
            st.kink_sphere(center, kink_radius);
            st.point(&bi.center, true);
            st.point(&bj.center, true);
            let (pi, pj) = (bi.profile.clone(), bj.profile.clone());
            let (ci, cj) = (bi.center.clone(), bj.center.clone());
            let w = weight.clone();
            let term = integrate_structured(grid, angular_order, &st, &move |x: &[f64]| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                if r2 < 1e-300 {
                    return 0.0;
                }
                w(x) * pi.value(distance(x, &ci)) * pj.value(distance(x, &cj)) / r2
            })?;
            total += factor * bi.amplitude * bj.amplitude * term;
        }
    }
    Ok(total)
}

/// Tail masses μ_R, ν_R, γ_R at each radius plus peak- and origin-ball
/// masses at radius r₀ (from the problem's peak structure when available).
pub fn tail_masses(u: &Field, spec: &ProblemSpec, radii: &[f64]) -> Result<ConcentrationReport> {
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    let grid = &spec.grid;
    let ang = spec.angular_order;
    let dim = spec.dimension as usize;
    let origin = vec![0.0; dim];

    let dirichlet_total = dirichlet_integral(grid, ang, u)?;
    let critical_total = weighted_critical(grid, ang, u, &origin, f64::INFINITY, |_| 1.0)?;
    let hardy_total = weighted_hardy(grid, ang, u, &origin, f64::INFINITY, |_| 1.0)?;

    let mut tails = Vec::with_capacity(radii.len());
    for &r in radii {
        let outside = move |x: &[f64]| {
            let d: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if d > r {
                1.0
            } else {
                0.0
            }
        };
        let mu = weighted_dirichlet(grid, ang, u, &origin, Some(r), outside)?;
        let nu = weighted_critical(grid, ang, u, &origin, r, outside)?;
        let ga = weighted_hardy(grid, ang, u, &origin, r, outside)?;
        tails.push((r, mu.max(0.0), nu.max(0.0), ga.max(0.0)));
    }

    // Peak balls at radius r0 where the k coefficient exposes finite maxima.
    let mut peak_masses = Vec::new();
    let mut ball_r0 = 1.0;
    if let MaximaSet::Finite { points } = spec.k.maxima_set() {
        if let Ok(frame) = PeakFrame::new(points.clone(), f64::INFINITY) {
            ball_r0 = frame.r0;
            for a in points {
                let a_cl = a.clone();
                let r0 = frame.r0;
                let inside = move |x: &[f64]| {
                    if distance(x, &a_cl) < r0 {
                        1.0
                    } else {
                        0.0
                    }
                };
                let mu = weighted_dirichlet(grid, ang, u, a, Some(frame.r0), inside.clone())?;
                let nu = weighted_critical(grid, ang, u, a, frame.r0, inside)?;
                peak_masses.push((mu.max(0.0), nu.max(0.0)));
            }
        }
    }
    let inside0 = move |x: &[f64]| {
        let d: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if d < ball_r0 {
            1.0
        } else {
            0.0
        }
    };
    let origin_masses = (
        weighted_dirichlet(grid, ang, u, &origin, Some(ball_r0), inside0.clone())?.max(0.0),
        weighted_critical(grid, ang, u, &origin, ball_r0, inside0.clone())?.max(0.0),
        weighted_hardy(grid, ang, u, &origin, ball_r0, inside0)?.max(0.0),
    );

    // Fitted tail exponent of ν_R (reported, never claimed as a limit).
    let samples: Vec<(f64, f64)> = tails
        .iter()
        .filter(|(_, _, nu, _)| *nu > 0.0)
        .map(|&(r, _, nu, _)| (r.ln(), nu.ln()))
        .collect();
    let nu_tail_exponent = if samples.len() >= 3 {
        let n = samples.len() as f64;
        let sx: f64 = samples.iter().map(|s| s.0).sum();
        let sy: f64 = samples.iter().map(|s| s.1).sum();
        let sxx: f64 = samples.iter().map(|s| s.0 * s.0).sum();
        let sxy: f64 = samples.iter().map(|s| s.0 * s.1).sum();
        Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
    } else {
        None
    };

    Ok(ConcentrationReport {
        tails,
        peak_masses,
        origin_masses,
        nu_tail_exponent,
        dirichlet_total,
        critical_total,
        hardy_total,
    })
}

/// One row of the λ-sweep concentration verification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConcentrationRow {
    pub lambda: f64,
    pub peak: usize,
    /// Fraction of the Dirichlet mass inside B_{r₀/10}(a_j).
    pub mass_fraction: f64,
    pub dirichlet_total: f64,
    pub critical_total: f64,
}

/// Verdict of the λ → 0 concentration check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConcentrationTrend {
    pub rows: Vec<ConcentrationRow>,
    /// Per peak: fractions increase along decreasing λ.
    pub fractions_increasing: bool,
    /// Per peak: final fraction exceeds 0.9.
    pub final_fraction_above: bool,
    /// Total Dirichlet mass within 5% of S^{N/2}‖k‖^{-(N-2)/2} at the
    /// smallest λ.
    pub dirichlet_limit_ok: bool,
    /// Total critical mass within 5% of S^{N/2}‖k‖^{-N/2} at the smallest λ.
    pub critical_limit_ok: bool,
    pub dirichlet_limit: f64,
    pub critical_limit: f64,
}

/// Verify the concentration behaviour of localized solutions along a
/// decreasing λ-sweep: per-peak Dirichlet mass fractions in B_{r₀/10}(a_j)
/// increase toward 1 and the totals approach the bubble limits.
pub fn concentration_verify(
    results: &[(f64, Field)],
    frame: &PeakFrame,
    spec: &ProblemSpec,
    peak_of: &[usize],
) -> Result<ConcentrationTrend> {
    let grid = &spec.grid;
    let ang = spec.angular_order;
    let nf = spec.dimension as f64;
    let sob = crate::thresholds::best_sobolev(spec.dimension, grid)?;
    let sup_k = spec.k.sup_value();
    let dirichlet_limit = sob.powf(nf / 2.0) * sup_k.powf(-(nf - 2.0) / 2.0);
    let critical_limit = sob.powf(nf / 2.0) * sup_k.powf(-nf / 2.0);

    let r_small = frame.r0 / 10.0;
    let mut rows = Vec::new();
    for ((lambda, u), &j) in results.iter().zip(peak_of) {
        let a = frame.maxima[j].clone();
        let a_cl = a.clone();
        let inside = move |x: &[f64]| {
            if distance(x, &a_cl) < r_small {
                1.0
            } else {
                0.0
            }
        };
        let num = weighted_dirichlet(grid, ang, u, &a, Some(r_small), inside)?;
        let den = dirichlet_integral(grid, ang, u)?;
        let origin = vec![0.0; spec.dimension as usize];
        let crit = weighted_critical(grid, ang, u, &origin, f64::INFINITY, |_| 1.0)?;
        rows.push(ConcentrationRow {
            lambda: *lambda,
            peak: j,
            mass_fraction: (num / den).clamp(0.0, 1.0),
            dirichlet_total: den,
            critical_total: crit,
        });
    }

    // Group rows per peak preserving the sweep order.
    let mut fractions_increasing = true;
    let mut final_fraction_above = true;
    for j in 0..frame.maxima.len() {
        let seq: Vec<&ConcentrationRow> = rows.iter().filter(|r| r.peak == j).collect();
        if seq.is_empty() {
            continue;
        }
        for w in seq.windows(2) {
            if w[1].mass_fraction < w[0].mass_fraction {
                fractions_increasing = false;
            }
        }
        if seq.last().unwrap().mass_fraction <= 0.9 {
            final_fraction_above = false;
        }
    }
    let last_lambda = rows.iter().map(|r| r.lambda).fold(f64::INFINITY, f64::min);
    let last_rows: Vec<&ConcentrationRow> =
        rows.iter().filter(|r| r.lambda == last_lambda).collect();
    let dirichlet_limit_ok = last_rows
        .iter()
        .all(|r| (r.dirichlet_total - dirichlet_limit).abs() <= 0.05 * dirichlet_limit);
    let critical_limit_ok = last_rows
        .iter()
        .all(|r| (r.critical_total - critical_limit).abs() <= 0.05 * critical_limit);

    Ok(ConcentrationTrend {
        rows,
        fractions_increasing,
        final_fraction_above,
        dirichlet_limit_ok,
        critical_limit_ok,
        dirichlet_limit,
        critical_limit,
    })
}

/// Number of connected components of the δ-neighbourhood of the oscillatory
/// example's maxima set {r_n = 1/2 + 1/(nπ)}: the spheres merge with the
/// accumulation shell once consecutive gaps fall below 2δ.
pub fn delta_separated_count(delta: f64) -> usize {
    if delta <= 0.0 {
        return usize::MAX;
    }
    let mut count = 0usize;
    let mut n = 1.0_f64;
    loop {
        // Gap between r_n and r_{n+1}: 1/(π n(n+1)).
        let gap = 1.0 / (std::f64::consts::PI * n * (n + 1.0));
        if gap > 2.0 * delta {
            count += 1;
            n += 1.0;
        } else {
            // Everything from r_n inward merges with the accumulation shell.
            return count + 1;
        }
        if n > 1e6 {
            return count;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::talenti;
    use approx::assert_relative_eq;

    fn two_peak_frame(dim: u32) -> PeakFrame {
        let mut a1 = vec![0.0; dim as usize];
        let mut a2 = vec![0.0; dim as usize];
        a1[0] = 2.0;
        a2[0] = -2.0;
        PeakFrame::new(vec![a1, a2], 4.0).unwrap()
    }

    #[test]
    fn frame_geometry() {
        let f = two_peak_frame(4);
        assert_eq!(f.r0, 1.0);
        assert_relative_eq!(f.delta, 1.0 / 3.0, epsilon = 1e-15);
        // Maxima must sit inside B_{R0-1}.
        assert!(PeakFrame::new(vec![vec![2.0, 0.0, 0.0]], 2.5).is_err());
    }

    #[test]
    fn t_j_decreases_with_bubble_scale() {
        let frame = two_peak_frame(4);
        let grid = RadialGrid::defaults(4).unwrap();
        let mut last = 1.0;
        for mu in [1e-1, 1e-2, 1e-3] {
            let u = talenti(4, mu, &frame.maxima[0]).unwrap();
            let t = t_j(&u, &frame, 0, &grid, 48).unwrap();
            assert!(t < last, "T_j not decreasing at mu = {mu}");
            assert!((0.0..=1.0).contains(&t));
            last = t;
        }
        assert!(last < 0.01, "final T_j = {last}");
    }

    #[test]
    fn t_j_far_bubble_is_large() {
        let frame = two_peak_frame(4);
        let grid = RadialGrid::defaults(4).unwrap();
        // Bubble at the other peak, |a_1 - a_2| = 4 ≥ 1.
        let u = talenti(4, 1e-3, &frame.maxima[1]).unwrap();
        let t = t_j(&u, &frame, 0, &grid, 48).unwrap();
        assert!(t >= 0.99, "T_j = {t}");
    }

    #[test]
    fn t_j_out_of_range_errors() {
        let frame = two_peak_frame(4);
        let grid = RadialGrid::defaults(4).unwrap();
        let u = talenti(4, 0.1, &frame.maxima[0]).unwrap();
        assert!(matches!(
            t_j(&u, &frame, 5, &grid, 48),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(matches!(
            t_j(&Field::zero(4), &frame, 0, &grid, 48),
            Err(Error::ZeroField)
        ));
    }

    #[test]
    fn localization_inequality() {
        // T_j(u) ≤ δ implies ∫|∇u|² ≥ 3 ∫_{ℝ^N \ B_{r0}(a_j)} |∇u|².
        let frame = two_peak_frame(4);
        let grid = RadialGrid::defaults(4).unwrap();
        let u = talenti(4, 1e-2, &frame.maxima[0]).unwrap();
        let t = t_j(&u, &frame, 0, &grid, 48).unwrap();
        assert!(t <= frame.delta);
        let total = dirichlet_integral(&grid, 48, &u).unwrap();
        let a = frame.maxima[0].clone();
        let r0 = frame.r0;
        let outside = move |x: &[f64]| {
            if distance(x, &a) > r0 {
                1.0
            } else {
                0.0
            }
        };
        let tail =
            weighted_dirichlet(&grid, 48, &u, &frame.maxima[0], Some(r0), outside).unwrap();
        assert!(total >= 3.0 * tail, "{total} vs 3×{tail}");
    }

    #[test]
    fn separation_of_two_localized_bubbles() {
        let frame = two_peak_frame(4);
        let grid = RadialGrid::defaults(4).unwrap();
        let u1 = talenti(4, 1e-3, &frame.maxima[0]).unwrap();
        let u2 = talenti(4, 1e-3, &frame.maxima[1]).unwrap();
        let rep = separation_check(&[u1, u2], &frame, &grid, 48).unwrap();
        assert!(rep.all_singletons);
        assert!(rep.pairwise_distinct);
        assert_eq!(rep.localized_sets, vec![vec![0], vec![1]]);

        // Diffuse field: no localization claimed.
        let diffuse = talenti(4, 10.0, &[0.0; 4]).unwrap();
        let rep2 = separation_check(&[diffuse], &frame, &grid, 48).unwrap();
        assert!(rep2.localized_sets[0].is_empty());
    }

    #[test]
    fn xi_map_radial_field_at_origin() {
        let frame = two_peak_frame(4);
        let grid = RadialGrid::defaults(4).unwrap();
        let u = talenti(4, 1.0, &[0.0; 4]).unwrap();
        let xi = xi_map(&u, &frame, &grid, 48).unwrap();
        let norm: f64 = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm <= 1e-10, "|Ξ| = {norm}");
    }

    #[test]
    fn xi_map_locates_concentrated_bubble() {
        let frame = PeakFrame::new(vec![vec![0.5, 0.0, 0.0]], 2.0).unwrap();
        let grid = RadialGrid::defaults(3).unwrap();
        let u = talenti(3, 1e-3, &[1.0, 0.0, 0.0]).unwrap();
        let xi = xi_map(&u, &frame, &grid, 64).unwrap();
        let err: f64 = xi
            .iter()
            .zip(&[1.0, 0.0, 0.0])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(err <= 1e-2, "|Ξ - x₀| = {err}");
    }

    #[test]
    fn xi_map_truncates_outside_ball() {
        // Bubble beyond R₀: Ξ ≈ R₀ x₀/|x₀|.
        let frame = PeakFrame::new(vec![vec![0.5, 0.0, 0.0]], 2.0).unwrap();
        let grid = RadialGrid::defaults(3).unwrap();
        let u = talenti(3, 1e-3, &[3.0, 0.0, 0.0]).unwrap();
        let xi = xi_map(&u, &frame, &grid, 64).unwrap();
        assert_relative_eq!(xi[0], 2.0, max_relative = 1e-2);
        let norm: f64 = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm <= 2.0 + 1e-9, "Ξ must stay in the closed R₀-ball");
    }

    #[test]
    fn tail_masses_decrease_for_unit_bubble() {
        let spec = ProblemSpec::unperturbed(4, 0.1).unwrap();
        let u = talenti(4, 1.0, &[0.0; 4]).unwrap();
        let rep = tail_masses(&u, &spec, &[1.0, 2.0, 4.0, 8.0, 16.0]).unwrap();
        for w in rep.tails.windows(2) {
            assert!(w[1].2 < w[0].2, "ν_R not decreasing");
        }
        assert!(rep.tails.last().unwrap().2 < 0.05 * rep.critical_total);
        // Hardy consistency along the sweep: Λ_N γ_R ≤ μ_R.
        for &(_, mu, _, ga) in &rep.tails {
            assert!(ga * 1.0 <= mu * 1.0000001);
        }
    }

    #[test]
    fn escaping_sequence_keeps_tail_mass() {
        let spec = ProblemSpec::unperturbed(4, 0.1).unwrap();
        let u = talenti(4, 1.0, &[0.0; 4]).unwrap();
        // u scaled by μ → ∞ keeps ν_R near the full mass at fixed R.
        let spread = crate::fields::scale_field(&u, 1e3).unwrap();
        let rep = tail_masses(&spread, &spec, &[1.0]).unwrap();
        assert!(rep.tails[0].2 >= 0.95 * rep.critical_total);
    }

    #[test]
    fn ground_state_tail_hardy_inequality() {
        // Λ_N γ_R ≤ μ_R for the ground state: its tail Hardy quotient is
        // β²(1+ν)² > Λ_N.
        let lam = 0.25;
        let spec = ProblemSpec::unperturbed(3, 0.5 * lam).unwrap();
        let w = crate::fields::ground_state(3, 0.5 * lam, 1.0).unwrap();
        let rep = tail_masses(&w, &spec, &[0.01, 0.1, 1.0, 10.0]).unwrap();
        for &(r, mu, _, ga) in &rep.tails {
            assert!(
                lam * ga <= mu * (1.0 + 1e-9),
                "Hardy tail inequality fails at R = {r}"
            );
        }
    }

    #[test]
    fn delta_separated_counts() {
        // Gaps 1/(π n(n+1)): at δ = 0.02 the first two gaps (0.159, 0.053)
        // exceed 2δ, the third (0.0265) does not, so r₁, r₂ stay separated
        // and everything else merges with the accumulation shell.
        assert_eq!(delta_separated_count(0.02), 3);
        // Tiny δ separates many shells.
        assert!(delta_separated_count(1e-6) > 100);
        // Large δ merges everything.
        assert_eq!(delta_separated_count(0.5), 1);
    }
}
