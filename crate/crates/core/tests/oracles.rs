//! Oracle-backed checks: every expected value here is computed by an
//! independent route (adaptive quadrature, closed forms, bisection) before
//! being compared against the library path.

use approx::assert_relative_eq;
use hardycrit::special::gamma;
use hardycrit::*;
use std::sync::Arc;

/// Adaptive Simpson on [a, b] to the requested tolerance (test-local oracle,
/// independent of the library quadrature).
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, m);
        let right = simpson(f, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, m, left, tol / 2.0, depth - 1)
                + recurse(f, m, b, right, tol / 2.0, depth - 1)
        }
    }
    recurse(f, a, b, simpson(f, a, b), tol, 48)
}

#[test]
fn talenti_critical_mass_matches_beta_integral() {
    // ∫_{ℝ^N} (1+|x|²)^{-N} dx = ω_{N-1} · (1/2)B(N/2, N/2); the 1-D Beta
    // integral is evaluated by adaptive quadrature after ρ = t/(1-t).
    for n in [3u32, 4, 5] {
        let nf = n as f64;
        let one_d = adaptive_simpson(
            &|t: f64| {
                let rho = t / (1.0 - t);
                let jac = 1.0 / ((1.0 - t) * (1.0 - t));
                rho.powf(nf - 1.0) * (1.0 + rho * rho).powf(-nf) * jac
            },
            1e-12,
            1.0 - 1e-12,
            1e-14,
        );
        let beta_closed = gamma(nf / 2.0) * gamma(nf / 2.0) / (2.0 * gamma(nf));
        assert_relative_eq!(one_d, beta_closed, max_relative = 1e-11);

        let omega = hardycrit::special::sphere_measure(n - 1);
        let grid = RadialGrid::defaults(n).unwrap();
        let lib = integrate_radial(&grid, |r| (1.0 + r * r).powf(-nf)).unwrap();
        assert_relative_eq!(lib, omega * one_d, max_relative = 1e-10);
    }
}

#[test]
fn nehari_scale_matches_bisection_oracle() {
    // Independent route: bisect t on g(t) = ⟨J'(tu), tu⟩ evaluated through
    // the full energy path at each candidate t.
    let lam = 0.25;
    let spec = ProblemSpec::unperturbed(3, lam / 4.0).unwrap();
    let u = talenti(3, 1.0, &[0.0; 3]).unwrap();
    let g = |t: f64| -> f64 {
        energy(&spec, &u.scaled_amplitude(t))
            .unwrap()
            .nehari_residual
    };
    let (mut lo, mut hi) = (1e-3, 1e3);
    assert!(g(lo) > 0.0 && g(hi) < 0.0);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_oracle = (lo * hi).sqrt();
    let s = nehari_scale(&spec, &u).unwrap();
    assert_relative_eq!(s.t, t_oracle, max_relative = 1e-10);
}

#[test]
fn mountain_pass_level_closed_form() {
    // h ≡ 0, k ≡ 1: max_t J(t w_μ) = (1/N) S^{N/2} (1 - A/Λ)^{(N-1)/2}.
    for (n, frac, mu) in [(3u32, 0.5, 1.0), (4, 0.25, 0.3), (5, 0.75, 3.0)] {
        let lam = lambda_n(n).unwrap();
        let spec = ProblemSpec::unperturbed(n, frac * lam).unwrap();
        let w = ground_state(n, frac * lam, mu).unwrap();
        let level = mountain_pass_level(&spec, &w).unwrap();
        let s = best_sobolev(n, &spec.grid).unwrap();
        let nf = n as f64;
        let expected = s.powf(nf / 2.0) / nf * (1.0 - frac).powf((nf - 1.0) / 2.0);
        assert_relative_eq!(level, expected, max_relative = 1e-3);
    }
}

#[test]
fn quotient_identity_on_ground_states() {
    // Q_A(w_μ)/‖w_μ‖_{2*}² = S (1 - A/Λ_N)^{(N-1)/N}.
    for n in [3u32, 4] {
        let lam = lambda_n(n).unwrap();
        // Near-critical N = 3 profiles decay like rho^{-(N-2)nu} with
        // (N-2)nu as small as 0.32: the quotient needs a very wide domain.
        let grid = build_grid(n, 1e-16, 1e16, 3600).unwrap();
        let s = best_sobolev(n, &grid).unwrap();
        for frac in [0.1, 0.5, 0.9] {
            let w = ground_state(n, frac * lam, 1.0).unwrap();
            let q = sobolev_quotient_qa(frac * lam, &w, &grid, 32).unwrap();
            let nf = n as f64;
            let expected = s * (1.0 - frac).powf((nf - 1.0) / nf);
            assert_relative_eq!(q, expected, max_relative = 1e-4);
        }
    }
}

#[test]
fn ground_state_strong_residual_is_discretization_free() {
    for (n, frac) in [(3u32, 0.1), (3, 0.5), (3, 0.9), (4, 0.5), (5, 0.9)] {
        let lam = lambda_n(n).unwrap();
        let spec = ProblemSpec::unperturbed(n, frac * lam).unwrap();
        let w = ground_state(n, frac * lam, 1.0).unwrap();
        let r = hardycrit::energy::strong_residual_norm(&spec, &w).unwrap();
        assert!(r <= 1e-6, "N={n}, A={frac}Λ: residual {r}");
    }
}

#[test]
fn dirichlet_norm_scale_invariance_of_ground_states() {
    // ‖∇w_μ‖₂² is independent of μ (scaling invariance of the family).
    let lam3 = 0.25_f64;
    let grid = build_grid(3, 1e-14, 1e14, 3200).unwrap();
    let w1 = ground_state(3, lam3 / 2.0, 1.0).unwrap();
    let base = hardy_quotient(&w1, &grid, 16).unwrap(); // warm-up consistency
    assert!(base.is_finite());
    let dir = |mu: f64| {
        let w = ground_state(3, lam3 / 2.0, mu).unwrap();
        integrate_radial(&grid, |r| {
            let d = w.bubbles[0].profile.dvalue(r);
            d * d
        })
        .unwrap()
    };
    let d1 = dir(1.0);
    for mu in [0.1, 10.0] {
        assert_relative_eq!(dir(mu), d1, max_relative = 1e-8);
    }
}

#[test]
fn talenti_concentrates_as_scale_vanishes() {
    // Fraction of ∫u_r^{2*} inside B_{0.1}(center) → 1: ≥ 0.99 at r = 1e-3.
    let grid = RadialGrid::defaults(3).unwrap();
    let p = critical_exponent(3);
    let u = RadialProfile::talenti(3, 1e-3).unwrap();
    let total = integrate_radial(&grid, |r| u.value(r).powf(p)).unwrap();
    let inside = integrate_radial(&grid, |r| {
        if r < 0.1 {
            u.value(r).powf(p)
        } else {
            0.0
        }
    })
    .unwrap();
    assert!(inside / total >= 0.99, "fraction {}", inside / total);
    assert_relative_eq!(total, 1.0, max_relative = 1e-8);
}

#[test]
fn condition_h_integral_certifies_growth_preset() {
    // Case (1) sufficient-condition preset with a far-field dip: positive at
    // μ = 1e-3 and growing as μ decreases through {1e-1, 1e-2, 1e-3}.
    let lam3 = 0.25_f64;
    let a = 0.75 * lam3;
    let nu = (1.0 - a / lam3).sqrt(); // H = 0, so ν_{A+H} = ν_A = 0.5
    let h = make_h_preset(
        &HPreset::BumpNearZero {
            h0: 0.0,
            c1: 0.1 * lam3,
            exponent: nu * 1.0,
            dip_amplitude: 0.35 * lam3,
            dip_exponent: 1.5,
        },
        3,
    )
    .unwrap();
    let grid = build_grid(3, 1e-10, 1e10, 2500).unwrap();
    let vals: Vec<f64> = [1e-1, 1e-2, 1e-3]
        .iter()
        .map(|&mu| condition_h_integral(&h, a, 3, mu, &grid, 32).unwrap())
        .collect();
    assert!(vals[2] > 0.0, "value at 1e-3: {}", vals[2]);
    assert!(
        vals[0] < vals[1] && vals[1] < vals[2],
        "not increasing: {vals:?}"
    );

    // Constant h: the integrand vanishes identically.
    let hc = make_h_preset(&HPreset::Constant { value: 0.05 }, 3).unwrap();
    let v = condition_h_integral(&hc, a, 3, 1.0, &grid, 32).unwrap();
    assert!(v.abs() < 1e-12);

    // h strictly below H everywhere: negative at every μ.
    let hdip = make_h_preset(
        &HPreset::BumpNearZero {
            h0: 0.0,
            c1: 1e-9,
            exponent: 0.5,
            dip_amplitude: 0.02,
            dip_exponent: 1.5,
        },
        3,
    )
    .unwrap();
    for mu in [1e-2, 1.0] {
        assert!(condition_h_integral(&hdip, a, 3, mu, &grid, 32).unwrap() < 0.0);
    }
}

#[test]
fn condition_h_invariant_under_constant_shift() {
    // h → h + c shifts H by c, so the integral of (h - H) is unchanged.
    let lam3 = 0.25_f64;
    let a = 0.5 * lam3;
    let grid = build_grid(3, 1e-10, 1e10, 2000).unwrap();
    let h1 = make_h_preset(
        &HPreset::BumpNearZero {
            h0: 0.0,
            c1: 0.01,
            exponent: 0.7,
            dip_amplitude: 0.0,
            dip_exponent: 1.5,
        },
        3,
    )
    .unwrap();
    let h2 = make_h_preset(
        &HPreset::BumpNearZero {
            h0: 0.02,
            c1: 0.01,
            exponent: 0.7,
            dip_amplitude: 0.0,
            dip_exponent: 1.5,
        },
        3,
    )
    .unwrap();
    // Same A + H in both cases keeps the comparison ground state fixed.
    let v1 = condition_h_integral(&h1, a, 3, 0.01, &grid, 32).unwrap();
    let v2 = condition_h_integral(&h2, a - 0.02, 3, 0.01, &grid, 32).unwrap();
    assert_relative_eq!(v1, v2, max_relative = 1e-12);
}

#[test]
fn condition_k_integral_signs() {
    let lam3 = 0.25_f64;
    let lambda = 0.5 * lam3;
    let grid = build_grid(3, 1e-10, 1e10, 2000).unwrap();

    // k ≡ max{k(0), k(∞)}: identically zero integrand.
    let kc = make_k_preset(&KPreset::ConstantOne, 3).unwrap();
    let v = condition_k_integral(&kc, lambda, 3, 1.0, &grid, 32).unwrap();
    assert!(v.abs() < 1e-12);

    // Radial growth-case preset: k(0) + c₁|x|^{2ν_λ} capped; positive for
    // small μ.
    let nu = (1.0 - lambda / lam3).sqrt();
    let k = make_k_preset(
        &KPreset::BumpNearZero {
            k0: 0.5,
            c1: 0.3,
            exponent: 2.0 * nu,
        },
        3,
    )
    .unwrap();
    let small = condition_k_integral(&k, lambda, 3, 1e-3, &grid, 32).unwrap();
    assert!(small > 0.0, "expected positive, got {small}");

    // k below the max everywhere: negative.
    let kneg = make_k_preset(
        &KPreset::SignChanging {
            distance: 3.0,
            width: 1.0,
            height: -0.0,
            theta: 2.5,
            well_depth: 0.4,
            well_width: 1.0,
            floor: 0.5,
        },
        3,
    );
    // A pure well below the floor: max{k(0), k(∞)} = floor and k ≤ floor.
    if let Ok(kneg) = kneg {
        for mu in [0.01, 1.0] {
            let v = condition_k_integral(&kneg, lambda, 3, mu, &grid, 32).unwrap();
            assert!(v <= 0.0, "mu={mu}: {v}");
        }
    }
}

#[test]
fn k1_example_maxima_values() {
    // k₁ attains the value 1 exactly at r_n = 1/2 + 1/(nπ).
    let k = make_k_preset(&KPreset::K1Example { theta: 2.5, decay: 1.0 }, 3).unwrap();
    for n in 1..=6 {
        let r = 0.5 + 1.0 / (n as f64 * std::f64::consts::PI);
        let v = k.value_at(&[r, 0.0, 0.0]);
        assert_relative_eq!(v, 1.0, epsilon = 1e-12);
    }
    assert_eq!(k.value_at(&[0.0; 3]), 0.0);
    // Decay at infinity.
    assert!(k.value_at(&[50.0, 0.0, 0.0]) < 1e-12);
}

#[test]
fn two_peak_maxima_are_exact() {
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
    let pts = k.maxima_set().finite_points().unwrap();
    assert_eq!(pts.len(), 2);
    for a in pts {
        assert_relative_eq!(k.value_at(a), k.sup_value(), epsilon = 1e-12);
    }
    assert_eq!(k.value_at(&[0.0; 4]), 0.0);
}

#[test]
fn pohozaev_density_matches_directional_difference() {
    // ⟨∇h(x), x⟩ against the radial finite difference of h along x.
    let h = make_h_preset(
        &HPreset::GaussianBump {
            center: vec![0.5, -0.2, 0.0],
            width: 0.8,
            height: 0.3,
        },
        3,
    )
    .unwrap();
    for x in [[1.0, 0.5, 0.2], [0.3, -0.7, 1.1], [2.0, 0.0, 0.0]] {
        let d = h.pohozaev_density(&x).unwrap();
        let eps = 1e-6;
        let xp: Vec<f64> = x.iter().map(|v| v * (1.0 + eps)).collect();
        let xm: Vec<f64> = x.iter().map(|v| v * (1.0 - eps)).collect();
        let fd = (h.value_at(&xp) - h.value_at(&xm)) / (2.0 * eps);
        assert_relative_eq!(d, fd, max_relative = 1e-6, epsilon = 1e-12);
    }
}

#[test]
fn gradient_riesz_pairing_matches_energy_differences() {
    // 20 rough directions; the pairing ⟨g, v⟩_D is computed through the
    // discrete Dirichlet form of the returned gradient field.
    let lam3 = 0.25_f64;
    let spec = ProblemSpec::unperturbed(3, 0.5 * lam3).unwrap();
    let grid = &spec.grid;
    let t = RadialProfile::talenti(3, 1.0).unwrap();
    let base: Vec<f64> = grid.nodes().iter().map(|&r| t.value(r)).collect();
    let u = Field::single(
        1.0,
        RadialProfile::grid_sampled(Arc::clone(grid), base.clone()).unwrap(),
        vec![0.0; 3],
    );
    let g = gradient_j(&spec, &u).unwrap();
    let g_vals = &g.bubbles[0].profile.sampled_data().unwrap().values;
    let op = hardycrit::energy::discrete::RadialOperator::new(grid);

    let mut seed = 0x2545f4914f6cdd1du64;
    let mut next = move || {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let eps = 1e-5;
    for _ in 0..20 {
        let mut dir: Vec<f64> = base.iter().map(|&b| next() * (b + 0.1)).collect();
        // Variations live in the pinned discrete space (zero at r_max).
        *dir.last_mut().unwrap() = 0.0;
        let dir_profile = RadialProfile::grid_sampled(Arc::clone(grid), dir.clone()).unwrap();
        let mut up = u.clone();
        up.push(eps, dir_profile.clone(), vec![0.0; 3]);
        let mut um = u.clone();
        um.push(-eps, dir_profile, vec![0.0; 3]);
        let fd = (energy(&spec, &up).unwrap().j_value - energy(&spec, &um).unwrap().j_value)
            / (2.0 * eps);
        let pairing = op.stiffness_form(g_vals, &dir);
        assert_relative_eq!(fd, pairing, max_relative = 1e-5);
    }
}
