//! Explicit constants and Palais-Smale thresholds.
//!
//! The compactness thresholds all take the form (1/N) S^{N/2} · min over
//! branches, where each branch weighs a coefficient value against the
//! coupling-dependent factor (1 - λ/Λ_N)^{(N-1)/2}. A branch whose
//! coefficient value vanishes is +∞.

use crate::coefficients::CoefficientProfile;
use crate::error::{Error, Result};
use crate::fields::RadialProfile;
use crate::problem::ProblemSpec;
use crate::quadrature::{integrate_radial, RadialGrid};
use serde::{Deserialize, Serialize};

/// Which branch attained a threshold minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    SupNorm,
    AtZero,
    AtInfinity,
}

/// Λ_N = (N-2)²/4, the optimal Hardy constant.
pub fn lambda_n(dimension: u32) -> Result<f64> {
    if dimension < 3 {
        return Err(Error::DimensionTooSmall { dimension });
    }
    let b = (dimension as f64 - 2.0) / 2.0;
    Ok(b * b)
}

/// Best Sobolev constant, computed as the Dirichlet/L^{2*} quotient of the
/// Talenti bubble by quadrature on the given grid.
pub fn best_sobolev(dimension: u32, grid: &RadialGrid) -> Result<f64> {
    let u = RadialProfile::talenti(dimension, 1.0)?;
    let dir = integrate_radial(grid, |r| {
        let d = u.dvalue(r);
        d * d
    })?;
    let p = crate::critical_exponent(dimension);
    let mass = integrate_radial(grid, |r| u.value(r).abs().powf(p))?;
    Ok(dir / mass.powf(2.0 / p))
}

/// Best Sobolev constant on the default grid for the dimension.
pub fn best_sobolev_default(dimension: u32) -> Result<f64> {
    best_sobolev(dimension, &RadialGrid::defaults(dimension)?)
}

fn branch_factor(numer: f64, dimension: u32) -> f64 {
    // value^{-(N-2)/2}, +∞ when the coefficient value vanishes.
    if numer <= 0.0 {
        f64::INFINITY
    } else {
        numer.powf(-(dimension as f64 - 2.0) / 2.0)
    }
}

/// c* of the linear-perturbation Palais-Smale condition:
/// (1/N) S^{N/2} min{(1-(A+h(0))/Λ)^{(N-1)/2}, (1-(A+h(∞))/Λ)^{(N-1)/2}}.
pub fn cstar(
    dimension: u32,
    coupling: f64,
    h: &CoefficientProfile,
    sobolev: f64,
) -> Result<(f64, Branch)> {
    let lam = lambda_n(dimension)?;
    let nf = dimension as f64;
    let at_zero = coupling + h.value_at_zero();
    let at_inf = coupling + h.limsup_at_infinity();
    if at_zero >= lam || at_inf >= lam {
        return Err(Error::CouplingOutOfRange {
            value: at_zero.max(at_inf),
            lo: f64::NEG_INFINITY,
            hi: lam,
        });
    }
    let b0 = (1.0 - at_zero / lam).powf((nf - 1.0) / 2.0);
    let binf = (1.0 - at_inf / lam).powf((nf - 1.0) / 2.0);
    let scale = sobolev.powf(nf / 2.0) / nf;
    if b0 <= binf {
        Ok((scale * b0, Branch::AtZero))
    } else {
        Ok((scale * binf, Branch::AtInfinity))
    }
}

fn check_lambda(dimension: u32, lambda: f64) -> Result<f64> {
    let lam = lambda_n(dimension)?;
    if !(lambda > 0.0 && lambda < lam) {
        return Err(Error::CouplingOutOfRange {
            value: lambda,
            lo: 0.0,
            hi: lam,
        });
    }
    Ok(lam)
}

fn min_branch(candidates: &[(f64, Branch)]) -> (f64, Branch) {
    let mut best = candidates[0];
    for &c in &candidates[1..] {
        if c.0 < best.0 {
            best = c;
        }
    }
    best
}

/// c̃(λ) = (1/N) S^{N/2} min{‖k‖^{-(N-2)/2},
///   k(0)^{-(N-2)/2}(1-λ/Λ)^{(N-1)/2}, k(∞)^{-(N-2)/2}(1-λ/Λ)^{(N-1)/2}}.
pub fn tilde_c(
    dimension: u32,
    lambda: f64,
    k: &CoefficientProfile,
    sobolev: f64,
) -> Result<(f64, Branch)> {
    let lam = check_lambda(dimension, lambda)?;
    let nf = dimension as f64;
    let decay = (1.0 - lambda / lam).powf((nf - 1.0) / 2.0);
    let scale = sobolev.powf(nf / 2.0) / nf;
    Ok(min_branch(&[
        (scale * branch_factor(k.sup_value(), dimension), Branch::SupNorm),
        (
            scale * branch_factor(k.value_at_zero(), dimension) * decay,
            Branch::AtZero,
        ),
        (
            scale * branch_factor(k.limsup_at_infinity(), dimension) * decay,
            Branch::AtInfinity,
        ),
    ]))
}

/// Improved threshold for radial k:
/// c̃₁(λ) = (1/N) S^{N/2} (1-λ/Λ)^{(N-1)/2} min{k(0), k(∞)}^{-(N-2)/2}.
pub fn tilde_c1(
    dimension: u32,
    lambda: f64,
    k: &CoefficientProfile,
    sobolev: f64,
) -> Result<(f64, Branch)> {
    if !k.is_radial() {
        return Err(Error::NotRadial(
            "tilde_c1 applies to radial k only".into(),
        ));
    }
    let lam = check_lambda(dimension, lambda)?;
    let nf = dimension as f64;
    let decay = (1.0 - lambda / lam).powf((nf - 1.0) / 2.0);
    let scale = sobolev.powf(nf / 2.0) / nf;
    Ok(min_branch(&[
        (
            scale * branch_factor(k.value_at_zero(), dimension) * decay,
            Branch::AtZero,
        ),
        (
            scale * branch_factor(k.limsup_at_infinity(), dimension) * decay,
            Branch::AtInfinity,
        ),
    ]))
}

/// Sign-changing variant: the c̃ formula evaluated on k₊ = max(k, 0).
pub fn hat_c(
    dimension: u32,
    lambda: f64,
    k: &CoefficientProfile,
    sobolev: f64,
) -> Result<(f64, Branch)> {
    let lam = check_lambda(dimension, lambda)?;
    let nf = dimension as f64;
    let decay = (1.0 - lambda / lam).powf((nf - 1.0) / 2.0);
    let scale = sobolev.powf(nf / 2.0) / nf;
    let sup_plus = k.sup_value().max(0.0);
    let zero_plus = k.value_at_zero().max(0.0);
    let inf_plus = k.limsup_at_infinity().max(0.0);
    Ok(min_branch(&[
        (scale * branch_factor(sup_plus, dimension), Branch::SupNorm),
        (
            scale * branch_factor(zero_plus, dimension) * decay,
            Branch::AtZero,
        ),
        (
            scale * branch_factor(inf_plus, dimension) * decay,
            Branch::AtInfinity,
        ),
    ]))
}

/// b(λ): the coupling-dependent part of c̃ coming from the limits of k;
/// +∞ when k(0) = k(∞) = 0.
pub fn b_branch(dimension: u32, lambda: f64, k: &CoefficientProfile) -> Result<f64> {
    let lam = check_lambda(dimension, lambda)?;
    let nf = dimension as f64;
    let decay = (1.0 - lambda / lam).powf((nf - 1.0) / 2.0);
    let f0 = branch_factor(k.value_at_zero(), dimension);
    let finf = branch_factor(k.limsup_at_infinity(), dimension);
    Ok(f0.min(finf) * decay)
}

/// Strictness margin keeping the positivity gate 2(1-λ/Λ)^{(N-1)/2} > 1
/// strict at λ = ε̄₀.
const EPS0_MARGIN: f64 = 1.0 - 1e-9;

/// The largest λ with ‖k‖^{-(N-2)/2} ≤ b(λ), capped by the positivity
/// constraint λ < Λ_N(1 - 2^{-2/(N-1)}); below it c̃(λ) is the constant
/// (1/N) S^{N/2} ‖k‖^{-(N-2)/2}.
pub fn eps0(dimension: u32, k: &CoefficientProfile) -> Result<f64> {
    let lam = lambda_n(dimension)?;
    let nf = dimension as f64;
    let tail_max = k.value_at_zero().max(k.limsup_at_infinity());
    if !(k.sup_value() > tail_max && k.sup_value() > 0.0) {
        return Err(Error::HypothesisViolated(
            "(K0) fails: sup k does not exceed max{k(0), k(+inf)}".into(),
        ));
    }
    let cap = lam * (1.0 - 2f64.powf(-2.0 / (nf - 1.0))) * EPS0_MARGIN;
    let target = k.sup_value().powf(-(nf - 2.0) / 2.0);
    // b is decreasing in λ; b(0+) > target by (K0).
    if b_branch(dimension, cap, k)? >= target {
        return Ok(cap);
    }
    let mut lo = 0.0;
    let mut hi = cap;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if b_branch(dimension, mid, k)? >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// All thresholds of a problem with branch attribution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub dimension: u32,
    pub lambda_n: f64,
    pub sobolev: f64,
    pub coupling: f64,
    pub cstar: Option<(f64, Branch)>,
    pub tilde_c: Option<(f64, Branch)>,
    pub tilde_c1: Option<(f64, Branch)>,
    pub hat_c: Option<(f64, Branch)>,
    pub b_branch: Option<f64>,
    pub eps0: Option<f64>,
}

/// Compute every threshold that applies to the problem.
pub fn threshold_report(spec: &ProblemSpec) -> Result<ThresholdReport> {
    let sob = best_sobolev(spec.dimension, &spec.grid)?;
    Ok(ThresholdReport {
        dimension: spec.dimension,
        lambda_n: spec.lambda_n(),
        sobolev: sob,
        coupling: spec.coupling,
        cstar: cstar(spec.dimension, spec.coupling, &spec.h, sob).ok(),
        tilde_c: tilde_c(spec.dimension, spec.coupling, &spec.k, sob).ok(),
        tilde_c1: tilde_c1(spec.dimension, spec.coupling, &spec.k, sob).ok(),
        hat_c: hat_c(spec.dimension, spec.coupling, &spec.k, sob).ok(),
        b_branch: b_branch(spec.dimension, spec.coupling, &spec.k).ok(),
        eps0: eps0(spec.dimension, &spec.k).ok(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{make_h_preset, make_k_preset, HPreset, KPreset};
    use crate::special::gamma;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn lambda_values() {
        assert_eq!(lambda_n(3).unwrap(), 0.25);
        assert_eq!(lambda_n(4).unwrap(), 1.0);
        assert_eq!(lambda_n(6).unwrap(), 4.0);
        assert!(lambda_n(2).is_err());
    }

    #[test]
    fn sobolev_constant_matches_gamma_formula() {
        // Independent oracle: S_N = N(N-2)π (Γ(N/2)/Γ(N))^{2/N}. The slowly
        // decaying N = 3 Dirichlet tail needs the wide domain; the default
        // domain carries a 2e-8 truncation there.
        for n in [3u32, 4, 5, 6] {
            let nf = n as f64;
            let exact = nf * (nf - 2.0) * PI * (gamma(nf / 2.0) / gamma(nf)).powf(2.0 / nf);
            let grid = crate::quadrature::build_grid(n, 1e-12, 1e12, 3000).unwrap();
            let s = best_sobolev(n, &grid).unwrap();
            assert_relative_eq!(s, exact, max_relative = 1e-8);
        }
    }

    #[test]
    fn sobolev_constant_stable_under_refinement_and_dilation() {
        let grid = RadialGrid::defaults(3).unwrap();
        let s1 = best_sobolev(3, &grid).unwrap();
        let s2 = best_sobolev(3, &grid.refined(2).unwrap()).unwrap();
        assert_relative_eq!(s1, s2, max_relative = 1e-8);
        // Dilation invariance of the quotient on a domain wide enough for
        // the dilated tails.
        let wide = crate::quadrature::build_grid(3, 1e-12, 1e12, 3000).unwrap();
        let s_wide = best_sobolev(3, &wide).unwrap();
        for r in [0.1, 10.0] {
            let u = RadialProfile::talenti(3, r).unwrap();
            let p = crate::critical_exponent(3);
            let dir = integrate_radial(&wide, |rho| u.dvalue(rho).powi(2)).unwrap();
            let mass = integrate_radial(&wide, |rho| u.value(rho).powf(p)).unwrap();
            assert_relative_eq!(dir / mass.powf(2.0 / p), s_wide, max_relative = 1e-8);
        }
    }

    #[test]
    fn cstar_branches() {
        let sob = best_sobolev_default(3).unwrap();
        let lam = 0.25;
        // h ≡ 0: both branches equal.
        let h0 = make_h_preset(&HPreset::Zero, 3).unwrap();
        let (c, _) = cstar(3, lam / 2.0, &h0, sob).unwrap();
        let expect = sob.powf(1.5) / 3.0 * (1.0 - 0.5_f64).powf(1.0);
        assert_relative_eq!(c, expect, max_relative = 1e-12);

        // h(0) > h(∞): the zero branch attains the min.
        let h = make_h_preset(
            &HPreset::GaussianBump {
                center: vec![0.0, 0.0, 0.0],
                width: 1.0,
                height: 0.05,
            },
            3,
        )
        .unwrap();
        let (_, br) = cstar(3, 0.1, &h, sob).unwrap();
        assert_eq!(br, Branch::AtZero);
    }

    #[test]
    fn tilde_c_reduces_for_constant_k() {
        let sob = best_sobolev_default(3).unwrap();
        let k = make_k_preset(&KPreset::ConstantOne, 3).unwrap();
        let lam = 0.25;
        for frac in [0.1, 0.5, 0.9] {
            let (c, br) = tilde_c(3, frac * lam, &k, sob).unwrap();
            let expect = sob.powf(1.5) / 3.0 * (1.0 - frac).powf(1.0);
            assert_relative_eq!(c, expect, max_relative = 1e-12);
            assert_ne!(br, Branch::SupNorm);
        }
    }

    #[test]
    fn tilde_c_constant_below_eps0_for_compact_k() {
        // k(0) = k(∞) = 0: the sup-norm branch is the only finite one.
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
        let sob = best_sobolev_default(4).unwrap();
        let e0 = eps0(4, &k).unwrap();
        // Positivity cap: λ < Λ(1 - 2^{-2/3}).
        let cap = 1.0 * (1.0 - 2f64.powf(-2.0 / 3.0));
        assert!(e0 <= cap && e0 > 0.9999 * cap);
        let expected = sob.powf(2.0) / 4.0;
        for frac in [0.1, 0.5, 1.0] {
            let (c, br) = tilde_c(4, frac * e0, &k, sob).unwrap();
            assert_eq!(br, Branch::SupNorm);
            assert_relative_eq!(c, expected, max_relative = 1e-14);
        }
    }

    #[test]
    fn eps0_bisection_with_positive_floor() {
        // k(0) = k(∞) = 0.5, ‖k‖ = 1.5: ε₀ solves 1.5^{-1/2} = 0.5^{-1/2}(1-λ/Λ).
        let k = make_k_preset(
            &KPreset::TwoPeak {
                distance: 2.0,
                width: 1.0,
                height: 1.0,
                theta: 2.5,
                floor: 0.5,
            },
            3,
        )
        .unwrap();
        let e0 = eps0(3, &k).unwrap();
        let lam = 0.25;
        let expect = lam * (1.0 - (0.5_f64 / 1.5).sqrt());
        assert_relative_eq!(e0, expect, max_relative = 1e-9);
        // Direct inequality check on both sides of ε₀.
        let t = 1.5_f64.powf(-0.5);
        assert!(b_branch(3, e0 - 1e-6, &k).unwrap() >= t);
        assert!(b_branch(3, e0 + 1e-6, &k).unwrap() < t);
    }

    #[test]
    fn eps0_requires_k0() {
        let k = make_k_preset(&KPreset::ConstantOne, 3).unwrap();
        assert!(matches!(eps0(3, &k), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn hat_c_ignores_negative_part_at_zero() {
        // Sign-changing k with k(0) < 0: the zero branch is +∞, leaving the
        // sup and infinity branches.
        let k = make_k_preset(
            &KPreset::SignChanging {
                distance: 3.0,
                width: 1.0,
                height: 1.0,
                theta: 2.5,
                well_depth: 0.5,
                well_width: 1.0,
                floor: 0.2,
            },
            4,
        )
        .unwrap();
        assert!(k.value_at_zero() < 0.0);
        let sob = best_sobolev_default(4).unwrap();
        let (c, br) = hat_c(4, 0.05, &k, sob).unwrap();
        assert!(c.is_finite());
        // sup branch: (1.2)^{-1}; infinity branch: (0.2)^{-1}(1-λ/Λ)^{3/2}.
        let scale = sob.powf(2.0) / 4.0;
        let sup_branch = scale * 1.2_f64.powf(-1.0);
        assert_relative_eq!(c, sup_branch, max_relative = 1e-12);
        assert_eq!(br, Branch::SupNorm);
    }

    #[test]
    fn thresholds_scale_with_k_homogeneity() {
        // k → c·k scales the sup branch by c^{-(N-2)/2}.
        let sob = best_sobolev_default(5).unwrap();
        let k1 = make_k_preset(
            &KPreset::TwoPeak {
                distance: 2.0,
                width: 1.0,
                height: 1.0,
                theta: 2.5,
                floor: 0.0,
            },
            5,
        )
        .unwrap();
        let k2 = make_k_preset(
            &KPreset::TwoPeak {
                distance: 2.0,
                width: 1.0,
                height: 3.0,
                theta: 2.5,
                floor: 0.0,
            },
            5,
        )
        .unwrap();
        let (a, _) = tilde_c(5, 0.1, &k1, sob).unwrap();
        let (b, _) = tilde_c(5, 0.1, &k2, sob).unwrap();
        assert_relative_eq!(b, a * 3f64.powf(-1.5), max_relative = 1e-12);
    }

    #[test]
    fn cstar_monotone_in_coupling() {
        let sob = best_sobolev_default(4).unwrap();
        let h = make_h_preset(&HPreset::Zero, 4).unwrap();
        let mut last = f64::INFINITY;
        for a in [0.1, 0.3, 0.6, 0.9] {
            let (c, _) = cstar(4, a, &h, sob).unwrap();
            assert!(c < last);
            last = c;
        }
    }
}
