//! Gauss-Legendre nodes and weights on [-1, 1].

use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

#[derive(Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

static CACHE: Lazy<Mutex<HashMap<usize, Arc<GaussLegendre>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Legendre polynomial P_n and derivative P_n' at x via the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Nodes and weights of the n-point rule, cached per order.
pub fn gauss_legendre(n: usize) -> Arc<GaussLegendre> {
    assert!(n >= 2, "Gauss-Legendre order must be at least 2");
    let mut cache = CACHE.lock().unwrap();
    if let Some(rule) = cache.get(&n) {
        return Arc::clone(rule);
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi initial guess, then Newton.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pair(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x.abs();
        weights[i] = w;
        nodes[n - 1 - i] = x.abs();
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, dp) = legendre_pair(n, 0.0);
        weights[n / 2] = 2.0 / (dp * dp);
    }
    let rule = Arc::new(GaussLegendre { nodes, weights });
    cache.insert(n, Arc::clone(&rule));
    rule
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_polynomials_exactly() {
        let rule = gauss_legendre(8);
        // degree-15 polynomial x^14 on [-1,1] -> 2/15
        let val: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * x.powi(14))
            .sum();
        assert_relative_eq!(val, 2.0 / 15.0, max_relative = 1e-13);
    }

    #[test]
    fn weights_sum_to_two() {
        for n in [2, 5, 16, 64, 97] {
            let rule = gauss_legendre(n);
            let sum: f64 = rule.weights.iter().sum();
            assert_relative_eq!(sum, 2.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn smooth_integrand_converges_fast() {
        let rule = gauss_legendre(32);
        let val: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * x.cos())
            .sum();
        assert_relative_eq!(val, 2.0 * 1.0_f64.sin(), max_relative = 1e-14);
    }
}
