//! Numerical checkers for the coefficient hypotheses (h0)-(h2) and (K0)-(K3).

use super::{CoefficientProfile, MaximaSet};
use serde::{Deserialize, Serialize};

/// One hypothesis verdict with witness data; a failed entry carries either a
/// counterexample point or the violated bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisEntry {
    pub name: String,
    pub passed: bool,
    pub witness: Vec<(String, f64)>,
    pub counterexample: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub entries: Vec<HypothesisEntry>,
}

impl HypothesisReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn passed(&self, name: &str) -> bool {
        self.entries.iter().any(|e| e.name == name && e.passed)
    }

    pub fn entry(&self, name: &str) -> Option<&HypothesisEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn witness(&self, name: &str, key: &str) -> Option<f64> {
        self.entry(name)?
            .witness
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
    }
}

fn lambda_value(dimension: u32) -> f64 {
    let b = (dimension as f64 - 2.0) / 2.0;
    b * b
}

/// Deterministic probe set: log-spaced radii along the coordinate axes.
fn probe_points(dimension: u32) -> Vec<Vec<f64>> {
    let mut pts = Vec::new();
    for p in -6..=6 {
        let r = 10f64.powi(p);
        for axis in 0..dimension as usize {
            for sign in [-1.0, 1.0] {
                let mut x = vec![0.0; dimension as usize];
                x[axis] = sign * r;
                pts.push(x);
            }
        }
    }
    pts
}

/// (h0) A + h(0) > 0; (h1) continuity and boundedness on a probe set;
/// (h2) A + ‖h‖_∞ ≤ Λ_N - c₀ for the largest valid c₀.
pub fn check_h_hypotheses(
    h: &CoefficientProfile,
    coupling: f64,
    dimension: u32,
) -> HypothesisReport {
    let lam = lambda_value(dimension);
    let mut entries = Vec::new();

    let a_h0 = coupling + h.value_at_zero();
    entries.push(HypothesisEntry {
        name: "h0".into(),
        passed: a_h0 > 0.0,
        witness: vec![("a_plus_h_at_zero".into(), a_h0)],
        counterexample: None,
    });

    let mut bounded = true;
    let mut bad_point = None;
    let mut observed_sup = 0.0_f64;
    for x in probe_points(dimension) {
        let v = h.value_at(&x);
        observed_sup = observed_sup.max(v.abs());
        if !v.is_finite() || v.abs() > h.sup_norm() + 1e-12 {
            bounded = false;
            bad_point = Some(x);
            break;
        }
    }
    entries.push(HypothesisEntry {
        name: "h1".into(),
        passed: bounded,
        witness: vec![
            ("declared_sup_norm".into(), h.sup_norm()),
            ("observed_probe_sup".into(), observed_sup),
        ],
        counterexample: bad_point,
    });

    let c0 = lam - coupling - h.sup_norm();
    entries.push(HypothesisEntry {
        name: "h2".into(),
        passed: c0 > 0.0,
        witness: vec![("c0".into(), c0), ("lambda_n".into(), lam)],
        counterexample: None,
    });

    HypothesisReport { entries }
}

/// Least-squares slope of ln(dev) against ln(r).
fn fit_slope(samples: &[(f64, f64)]) -> Option<f64> {
    if samples.len() < 3 {
        return None;
    }
    let n = samples.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(r, dev) in samples {
        let x = r.ln();
        let y = dev.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

/// Max of k(a) - k(x) over probe directions on the shell |x - a| = r.
fn shell_deviation(k: &CoefficientProfile, a: &[f64], r: f64) -> f64 {
    let ka = k.value_at(a);
    let mut dev: f64 = 0.0;
    for axis in 0..a.len() {
        for sign in [-1.0, 1.0] {
            let mut x = a.to_vec();
            x[axis] += sign * r;
            dev = dev.max(ka - k.value_at(&x));
        }
    }
    dev
}

/// (K0) ‖k‖_∞ > max{k(0), k(∞)}; (K1) finitely many maxima; (K2) flat-top
/// order at each maximum by shell regression (slope ≥ θ - 0.05 on shells
/// 2^{-p}, p = 4..12); (K3) tail bound with witnesses (R₀, d₀).
pub fn check_k_hypotheses(k: &CoefficientProfile, dimension: u32) -> HypothesisReport {
    let mut entries = Vec::new();

    let tail_max = k.value_at_zero().max(k.limsup_at_infinity());
    entries.push(HypothesisEntry {
        name: "K0".into(),
        passed: k.sup_value() > tail_max && k.sup_value() > 0.0,
        witness: vec![
            ("sup".into(), k.sup_value()),
            ("k_at_zero".into(), k.value_at_zero()),
            ("k_at_infinity".into(), k.limsup_at_infinity()),
        ],
        counterexample: None,
    });

    let finite_maxima = k.maxima_set().finite_points().map(|p| p.to_vec());
    entries.push(HypothesisEntry {
        name: "K1".into(),
        passed: finite_maxima.as_ref().is_some_and(|p| !p.is_empty()),
        witness: vec![(
            "cardinality".into(),
            finite_maxima.as_ref().map(|p| p.len() as f64).unwrap_or(f64::INFINITY),
        )],
        counterexample: None,
    });

    let (k2_passed, k2_witness) = match (&finite_maxima, k.theta()) {
        (Some(points), Some(theta)) if !points.is_empty() => {
            let mut min_slope = f64::INFINITY;
            let mut ok = true;
            for a in points {
                let samples: Vec<(f64, f64)> = (4..=12)
                    .map(|p| {
                        let r = 2f64.powi(-p);
                        (r, shell_deviation(k, a, r))
                    })
                    .filter(|&(_, d)| d > 0.0)
                    .collect();
                match fit_slope(&samples) {
                    Some(s) => {
                        min_slope = min_slope.min(s);
                        if s < theta - 0.05 {
                            ok = false;
                        }
                    }
                    None => ok = false,
                }
            }
            (
                ok,
                vec![
                    ("theta".into(), theta),
                    ("fitted_slope".into(), min_slope),
                ],
            )
        }
        _ => (
            false,
            vec![("theta".into(), k.theta().unwrap_or(f64::NAN))],
        ),
    };
    entries.push(HypothesisEntry {
        name: "K2".into(),
        passed: k2_passed,
        witness: k2_witness,
        counterexample: None,
    });

    // (K3): smallest probe radius whose tail bound leaves a positive margin,
    // constrained so every maximum sits inside B_{R-1}(0).
    let maxima_extent = match k.maxima_set() {
        MaximaSet::Finite { points } => points
            .iter()
            .map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0_f64, f64::max),
        MaximaSet::Sphere { radius } => *radius,
        MaximaSet::InfiniteShells {
            representative_radii,
        } => representative_radii.iter().cloned().fold(0.0, f64::max),
        MaximaSet::Everywhere => f64::INFINITY,
    };
    let mut k3 = HypothesisEntry {
        name: "K3".into(),
        passed: false,
        witness: vec![],
        counterexample: None,
    };
    if maxima_extent.is_finite() {
        for exp in 0..=12 {
            let r = 2f64.powi(exp);
            if r < maxima_extent + 1.0 {
                continue;
            }
            let tail = k.tail_bound(r);
            let d0 = k.sup_norm() - tail;
            if d0 > 1e-12 {
                k3.passed = true;
                k3.witness = vec![("R0".into(), r), ("d0".into(), d0)];
                break;
            }
        }
    }
    let _ = dimension;
    entries.push(k3);

    HypothesisReport { entries }
}
