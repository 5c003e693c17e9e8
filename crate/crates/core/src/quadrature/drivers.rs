//! Reduction of integrals over ℝ^N to 1-D/2-D/3-D quadrature.
//!
//! Every integrand in the toolkit is built from radially symmetric factors
//! about finitely many centers (bubble profiles, coefficient atoms, the Hardy
//! weight at the origin, ball indicators). Such an integrand is invariant
//! under all rotations fixing the affine span of its centers, so the integral
//! reduces to
//!
//! - a radial integral when all centers coincide,
//! - a `(ρ, φ)` integral when the centers are collinear,
//! - a `(ρ, φ₁, φ₂)` integral when the centers are coplanar.
//!
//! Sharp structure (concentrated bubbles, the `|x|⁻²` singularity) is
//! isolated with a smooth partition of unity so every piece is integrated in
//! a frame centered on its own sharp point; C⁰ kinks across declared spheres
//! (`min{1,|x−a|}`, ball indicators) are handled by splitting the angular
//! rule at the sphere crossing and the radial rule at the sphere radius.

use super::gauss::gauss_legendre;
use super::RadialGrid;
use crate::error::{Error, Result};
use crate::special::sphere_measure;
use std::f64::consts::PI;

/// Geometric description of an integrand: its centers of radial symmetry,
/// which of them carry sharp structure, and spheres across which the
/// integrand is only continuous.
#[derive(Debug, Clone)]
pub struct Structure {
    dimension: usize,
    points: Vec<Vec<f64>>,
    sharp: Vec<bool>,
    kinks: Vec<(usize, f64)>,
}

impl Structure {
    pub fn new(dimension: u32) -> Self {
        Structure {
            dimension: dimension as usize,
            points: Vec::new(),
            sharp: Vec::new(),
            kinks: Vec::new(),
        }
    }

    /// Register a center of radial symmetry. `sharp` marks centers whose
    /// factor concentrates or is singular there. Coincident points merge.
    pub fn point(&mut self, x: &[f64], sharp: bool) -> usize {
        assert_eq!(x.len(), self.dimension, "center has wrong dimension");
        let scale = 1.0 + norm(x);
        for (i, p) in self.points.iter().enumerate() {
            if dist(p, x) < 1e-12 * scale {
                self.sharp[i] = self.sharp[i] || sharp;
                return i;
            }
        }
        self.points.push(x.to_vec());
        self.sharp.push(sharp);
        self.points.len() - 1
    }

    /// Declare that the integrand is only C⁰ across the sphere of the given
    /// radius about the given center.
    pub fn kink_sphere(&mut self, center: &[f64], radius: f64) {
        let i = self.point(center, false);
        self.kinks.push((i, radius));
    }

    fn sharp_indices(&self) -> Vec<usize> {
        (0..self.points.len()).filter(|&i| self.sharp[i]).collect()
    }

    /// Reorder points lexicographically so frames and partition pieces do not
    /// depend on registration order (makes swapped-argument integrals agree
    /// to roundoff).
    fn canonicalize(&mut self) {
        let mut order: Vec<usize> = (0..self.points.len()).collect();
        order.sort_by(|&a, &b| {
            self.points[a]
                .iter()
                .zip(&self.points[b])
                .find_map(|(x, y)| x.partial_cmp(y).filter(|o| o.is_ne()))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut inverse = vec![0usize; order.len()];
        for (new_i, &old_i) in order.iter().enumerate() {
            inverse[old_i] = new_i;
        }
        self.points = order.iter().map(|&i| self.points[i].clone()).collect();
        self.sharp = order.iter().map(|&i| self.sharp[i]).collect();
        for kink in self.kinks.iter_mut() {
            kink.0 = inverse[kink.0];
        }
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// C⁷ smoothstep: 0 at t<=0, 1 at t>=1 (15th-order polynomial).
fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let t2 = t * t;
        let t4 = t2 * t2;
        t4 * t4
            * (6435.0
                + t * (-40040.0
                    + t * (108108.0
                        + t * (-163800.0
                            + t * (150150.0 + t * (-83160.0 + t * (25740.0 - 3432.0 * t)))))))
    }
}

/// Fraction of the cutoff radius where the partition transition begins; the
/// wide log-band keeps the smoothstep resolved by both quadrature rules.
const CUTOFF_INNER: f64 = 0.25;

/// Smooth cutoff in log-distance: 1 inside `CUTOFF_INNER * r_full`, 0 outside
/// `r_full`. Partition supports stay disjoint, so sums of cutoffs about
/// distinct sharp centers never exceed 1.
fn cutoff(d: f64, r_full: f64) -> f64 {
    let r_inner = CUTOFF_INNER * r_full;
    if d <= r_inner {
        return 1.0;
    }
    if d >= r_full {
        return 0.0;
    }
    1.0 - smoothstep((d.ln() - r_inner.ln()) / (r_full.ln() - r_inner.ln()))
}

/// Orthonormal basis of span{p_i - p_0} with rank detection.
pub fn orthonormal_span(points: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let base = points[0].clone();
    let mut axes: Vec<Vec<f64>> = Vec::new();
    let scale = points
        .iter()
        .map(|p| dist(p, &base))
        .fold(1.0_f64, f64::max);
    for p in points.iter().skip(1) {
        let mut v: Vec<f64> = p.iter().zip(&base).map(|(a, b)| a - b).collect();
        for e in &axes {
            let proj: f64 = v.iter().zip(e).map(|(a, b)| a * b).sum();
            for (vi, ei) in v.iter_mut().zip(e) {
                *vi -= proj * ei;
            }
        }
        let len = norm(&v);
        if len > 1e-9 * scale {
            for vi in v.iter_mut() {
                *vi /= len;
            }
            axes.push(v);
        }
    }
    (base, axes)
}

/// Extend `axes` with vectors from the standard basis until `count` axes exist.
fn complete_basis(dimension: usize, axes: &mut Vec<Vec<f64>>, count: usize) {
    let mut k = 0;
    while axes.len() < count {
        assert!(k < dimension, "cannot complete orthonormal basis");
        let mut v = vec![0.0; dimension];
        v[k] = 1.0;
        k += 1;
        for e in axes.iter() {
            let proj: f64 = v.iter().zip(e).map(|(a, b)| a * b).sum();
            for (vi, ei) in v.iter_mut().zip(e) {
                *vi -= proj * ei;
            }
        }
        let len = norm(&v);
        if len > 1e-6 {
            for vi in v.iter_mut() {
                *vi /= len;
            }
            axes.push(v);
        }
    }
}

/// Panelized Gauss-Legendre plan in s = log ρ with panel edges aligned to
/// declared break radii, so piecewise-smooth radial profiles are integrated
/// panel-by-panel on analytic segments. Returns (ρ, ds-weight) pairs; the
/// integral of f(ρ)ρ^{N-1}dρ is Σ w ρ^N f(ρ).
const PANEL_ORDER: usize = 6;

fn radial_plan(grid: &RadialGrid, breaks: &[f64]) -> Vec<(f64, f64)> {
    let s_min = grid.r_min().ln();
    let s_max = grid.r_max().ln();
    let span = s_max - s_min;
    let panels = (grid.len() / PANEL_ORDER).max(8);
    let mut edges: Vec<f64> = (0..=panels)
        .map(|i| s_min + span * i as f64 / panels as f64)
        .collect();
    for &r in breaks {
        if r > grid.r_min() && r < grid.r_max() {
            edges.push(r.ln());
        }
    }
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * span);

    let rule = gauss_legendre(PANEL_ORDER);
    let mut plan = Vec::with_capacity(PANEL_ORDER * edges.len());
    for w in edges.windows(2) {
        let half = 0.5 * (w[1] - w[0]);
        let mid = 0.5 * (w[1] + w[0]);
        for (x, gw) in rule.nodes.iter().zip(&rule.weights) {
            plan.push(((mid + half * x).exp(), gw * half));
        }
    }
    plan
}

struct AngularRule {
    order: usize,
}

impl AngularRule {
    /// ∫₀^π f(φ) sin^pow(φ) dφ, splitting at the given interior angles.
    fn integrate(&self, pow: i32, breaks: &mut Vec<f64>, mut f: impl FnMut(f64) -> f64) -> f64 {
        breaks.retain(|&p| p > 1e-12 && p < PI - 1e-12);
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let rule = gauss_legendre(self.order);
        let mut total = 0.0;
        let mut lo = 0.0;
        let mut segments = breaks.clone();
        segments.push(PI);
        for hi in segments {
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            if half > 1e-14 {
                for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                    let phi = mid + half * x;
                    let s = phi.sin();
                    total += w * half * f(phi) * powi_sin(s, pow);
                }
            }
            lo = hi;
        }
        total
    }
}

fn powi_sin(s: f64, pow: i32) -> f64 {
    match pow {
        0 => 1.0,
        1 => s,
        2 => s * s,
        3 => s * s * s,
        p => s.powi(p),
    }
}

/// Integrate `f` over ℝ^N given the structural description of its symmetry.
///
/// `f` receives actual coordinates in ℝ^N and must be invariant under all
/// rotations fixing the affine span of the structure points.
pub fn integrate_structured(
    grid: &RadialGrid,
    angular_order: usize,
    structure: &Structure,
    f: &dyn Fn(&[f64]) -> f64,
) -> Result<f64> {
    let dim = grid.dimension() as usize;
    if structure.dimension != dim {
        return Err(Error::NotReducible(format!(
            "structure dimension {} does not match grid dimension {}",
            structure.dimension, dim
        )));
    }
    let mut st = structure.clone();
    if st.points.is_empty() {
        st.point(&vec![0.0; dim], false);
    }
    st.canonicalize();

    let (_, axes) = orthonormal_span(&st.points);
    let rank = axes.len();
    if rank > 2 {
        return Err(Error::NotReducible(format!(
            "{} structure points span a {}-flat; only collinear or coplanar configurations reduce",
            st.points.len(),
            rank
        )));
    }

    let sharp = st.sharp_indices();
    if sharp.len() <= 1 {
        let base = sharp.first().copied().unwrap_or(0);
        return integrate_piece(grid, angular_order, &st, rank, &axes, base, f, &[]);
    }

    // Partition of unity subordinate to the sharp centers.
    let mut radii = Vec::with_capacity(sharp.len());
    for &i in &sharp {
        let d = sharp
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| dist(&st.points[i], &st.points[j]))
            .fold(f64::INFINITY, f64::min);
        radii.push(0.5 * d);
    }
    let chi =
        |m: usize, x: &[f64]| -> f64 { cutoff(dist(x, &st.points[sharp[m]]), radii[m]) };

    // Register the cutoff band edges as split spheres: every piece then
    // integrates analytic segments only. The splits are exact radial breaks
    // about a piece's own base and angular breaks in foreign frames; the
    // induced tangency kinks are C⁷ and harmless.
    let mut st_split = st.clone();
    for (m, &i) in sharp.iter().enumerate() {
        st_split.kinks.push((i, CUTOFF_INNER * radii[m]));
        st_split.kinks.push((i, radii[m]));
    }

    let mut total = 0.0;
    for m in 0..sharp.len() {
        let near = |x: &[f64]| f(x) * chi(m, x);
        total += integrate_piece(
            grid,
            angular_order,
            &st_split,
            rank,
            &axes,
            sharp[m],
            &near,
            &[],
        )?;
    }
    let far = |x: &[f64]| {
        let mut c = 1.0;
        for m in 0..sharp.len() {
            c -= chi(m, x);
        }
        if c <= 0.0 {
            0.0
        } else {
            f(x) * c
        }
    };
    // Base the far piece at a kink center when one exists so its sphere
    // splits stay exact.
    let far_base = st.kinks.first().map(|&(i, _)| i).unwrap_or(sharp[0]);
    total += integrate_piece(
        grid,
        angular_order,
        &st_split,
        rank,
        &axes,
        far_base,
        &far,
        &[],
    )?;
    Ok(total)
}

/// One frame integration: base point, declared axes, kink handling.
#[allow(clippy::too_many_arguments)]
fn integrate_piece(
    grid: &RadialGrid,
    angular_order: usize,
    st: &Structure,
    rank: usize,
    axes: &[Vec<f64>],
    base_idx: usize,
    f: &dyn Fn(&[f64]) -> f64,
    extra_breaks: &[f64],
) -> Result<f64> {
    let dim = grid.dimension() as usize;
    let n_dim = grid.dimension();
    let base = &st.points[base_idx];

    // Kinks centered at the base split the radial rule; other kink spheres
    // split the angular rules at their crossing angles. The angular integral
    // also loses smoothness in ρ where a kink sphere is tangent to the
    // integration sphere, so tangency radii become radial panel edges.
    let mut radial_breaks: Vec<f64> = Vec::new();
    let mut axis_kinks: Vec<(f64, f64)> = Vec::new(); // (axial offset, radius)
    let mut plane_kinks: Vec<(f64, f64, f64)> = Vec::new(); // (alpha, beta, radius)
    let mut e_axes = axes.to_vec();
    complete_basis(dim, &mut e_axes, rank.max(1) + 1);

    for &(i, r) in &st.kinks {
        if i == base_idx {
            radial_breaks.push(r);
            continue;
        }
        let p = &st.points[i];
        let rel: Vec<f64> = p.iter().zip(base).map(|(a, b)| a - b).collect();
        let d = norm(&rel);
        let along: f64 = rel.iter().zip(&e_axes[0]).map(|(a, b)| a * b).sum();
        let off = (d * d - along * along).max(0.0).sqrt();
        radial_breaks.push((d - r).abs());
        radial_breaks.push(d + r);
        if off < 1e-9 * (1.0 + d) {
            axis_kinks.push((along, r));
        } else if rank == 2 {
            let beta: f64 = rel.iter().zip(&e_axes[1]).map(|(a, b)| a * b).sum();
            plane_kinks.push((along, beta, r));
        }
    }
    radial_breaks.extend_from_slice(extra_breaks);

    let plan = radial_plan(grid, &radial_breaks);
    let angular = AngularRule {
        order: angular_order,
    };
    let mut x = vec![0.0; dim];
    let mut total = 0.0;

    match rank {
        0 => {
            // Radial about the base.
            for &(rho, w) in &plan {
                for (xi, (bi, ei)) in x.iter_mut().zip(base.iter().zip(&e_axes[0])) {
                    *xi = bi + rho * ei;
                }
                let v = f(&x);
                if !v.is_finite() {
                    return Err(Error::NonFiniteIntegrand { rho, value: v });
                }
                total += w * rho.powi(n_dim as i32) * v;
            }
            total *= sphere_measure(n_dim - 1);
        }
        1 => {
            let e1 = e_axes[0].clone();
            let e2 = e_axes[1].clone();
            for &(rho, w) in &plan {
                let mut breaks: Vec<f64> = Vec::new();
                for &(alpha, r) in &axis_kinks {
                    if alpha.abs() > 1e-300 {
                        let c = (rho * rho + alpha * alpha - r * r) / (2.0 * rho * alpha);
                        if c.abs() < 1.0 - 1e-12 {
                            breaks.push(c.acos());
                        }
                    }
                }
                let mut bad = None;
                let ang = angular.integrate(n_dim as i32 - 2, &mut breaks, |phi| {
                    let (cp, sp) = (phi.cos(), phi.sin());
                    for i in 0..dim {
                        x[i] = base[i] + rho * (cp * e1[i] + sp * e2[i]);
                    }
                    let v = f(&x);
                    if !v.is_finite() {
                        bad = Some(v);
                    }
                    v
                });
                if let Some(v) = bad {
                    return Err(Error::NonFiniteIntegrand { rho, value: v });
                }
                total += w * rho.powi(n_dim as i32) * ang;
            }
            total *= sphere_measure(n_dim - 2);
        }
        2 => {
            let e1 = e_axes[0].clone();
            let e2 = e_axes[1].clone();
            let e3 = e_axes[2].clone();
            let inner = AngularRule {
                order: (angular_order / 2).max(16),
            };
            if n_dim < 3 {
                return Err(Error::DimensionTooSmall { dimension: n_dim });
            }
            for &(rho, w) in &plan {
                let mut breaks: Vec<f64> = Vec::new();
                for &(alpha, r) in &axis_kinks {
                    if alpha.abs() > 1e-300 {
                        let c = (rho * rho + alpha * alpha - r * r) / (2.0 * rho * alpha);
                        if c.abs() < 1.0 - 1e-12 {
                            breaks.push(c.acos());
                        }
                    }
                }
                // The inner integral picks up sqrt-type kinks in phi1 where an
                // in-plane kink sphere is tangent to the phi2 circle.
                for &(alpha, beta, r) in &plane_kinks {
                    let p = alpha * alpha + beta * beta + rho * rho - r * r;
                    let q = 2.0 * rho * alpha;
                    let s = 2.0 * rho * beta.abs();
                    let amp = (q * q + s * s).sqrt();
                    if amp > 1e-300 && (p / amp).abs() < 1.0 - 1e-12 {
                        let acos_p = (p / amp).acos();
                        let psi = s.atan2(q);
                        for cand in [psi + acos_p, psi - acos_p, -psi + acos_p, -psi - acos_p] {
                            if cand > 1e-12 && cand < PI - 1e-12 {
                                breaks.push(cand);
                            }
                        }
                    }
                }
                let mut bad = None;
                let ang = angular.integrate(n_dim as i32 - 2, &mut breaks, |phi1| {
                    let (cp1, sp1) = (phi1.cos(), phi1.sin());
                    // In-plane kink spheres cross the phi2 circle where
                    // |x - c|² = r²; split the inner rule there.
                    let mut inner_breaks: Vec<f64> = Vec::new();
                    for &(alpha, beta, r) in &plane_kinks {
                        let denom = 2.0 * rho * beta * sp1;
                        if denom.abs() > 1e-300 {
                            let d2 = alpha * alpha + beta * beta;
                            let c2 = (d2 + rho * rho - 2.0 * rho * alpha * cp1 - r * r) / denom;
                            if c2.abs() < 1.0 - 1e-12 {
                                inner_breaks.push(c2.acos());
                            }
                        }
                    }
                    inner.integrate(n_dim as i32 - 3, &mut inner_breaks, |phi2| {
                        let (cp2, sp2) = (phi2.cos(), phi2.sin());
                        for i in 0..dim {
                            x[i] = base[i]
                                + rho * (cp1 * e1[i] + sp1 * (cp2 * e2[i] + sp2 * e3[i]));
                        }
                        let v = f(&x);
                        if !v.is_finite() {
                            bad = Some(v);
                        }
                        v
                    })
                });
                if let Some(v) = bad {
                    return Err(Error::NonFiniteIntegrand { rho, value: v });
                }
                total += w * rho.powi(n_dim as i32) * ang;
            }
            total *= sphere_measure(n_dim.saturating_sub(3));
        }
        _ => unreachable!(),
    }
    Ok(total)
}
