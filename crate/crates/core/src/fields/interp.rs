//! Interpolation and finite-difference stencils for grid-sampled profiles.

/// Finite-difference weights (Fornberg): weights w such that
/// f^(m)(z) ≈ Σ w_i f(x_i) for the given stencil points.
pub fn fd_weights(z: f64, x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Sixth-order first-derivative matrix on a uniform grid, stored as the
/// 7-point weight rows for each evaluation offset within the stencil window.
#[derive(Debug, Clone)]
pub struct Stencil6 {
    rows: [[f64; 7]; 7],
    step: f64,
}

impl Stencil6 {
    pub fn new(step: f64) -> Self {
        let x: Vec<f64> = (0..7).map(|i| i as f64).collect();
        let mut rows = [[0.0; 7]; 7];
        for (p, row) in rows.iter_mut().enumerate() {
            let w = fd_weights(p as f64, &x, 1);
            for (t, v) in row.iter_mut().zip(&w) {
                *t = *v;
            }
        }
        Stencil6 { rows, step }
    }

    /// First derivative of nodal data (must have at least 7 entries).
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        let n = values.len();
        assert!(n >= 7, "stencil needs at least 7 nodes");
        let mut out = vec![0.0; n];
        for (i, o) in out.iter_mut().enumerate() {
            let start = i.saturating_sub(3).min(n - 7);
            let p = i - start;
            let row = &self.rows[p];
            let mut acc = 0.0;
            for (k, w) in row.iter().enumerate() {
                acc += w * values[start + k];
            }
            *o = acc / self.step;
        }
        out
    }

    /// Transpose application: out[j] = Σ_i D[i][j] z[i] (adjoint of `apply`).
    pub fn apply_transpose(&self, z: &[f64]) -> Vec<f64> {
        let n = z.len();
        assert!(n >= 7, "stencil needs at least 7 nodes");
        let mut out = vec![0.0; n];
        for i in 0..n {
            let start = i.saturating_sub(3).min(n - 7);
            let p = i - start;
            let row = &self.rows[p];
            for (k, w) in row.iter().enumerate() {
                out[start + k] += w * z[i] / self.step;
            }
        }
        out
    }
}

/// Monotone cubic (Fritsch-Carlson) slopes for data on an increasing grid.
pub fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert!(n >= 2);
    let mut d = vec![0.0; n];
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let s: Vec<f64> = y
        .windows(2)
        .zip(&h)
        .map(|(w, hk)| (w[1] - w[0]) / hk)
        .collect();
    d[0] = s[0];
    d[n - 1] = s[n - 2];
    for i in 1..n - 1 {
        if s[i - 1] * s[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
        }
    }
    d
}

/// Cubic Hermite evaluation: value and derivative at t within [x0, x1].
pub fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, t: f64) -> (f64, f64) {
    let h = x1 - x0;
    let u = (t - x0) / h;
    let u2 = u * u;
    let h00 = 2.0 * u2 * u - 3.0 * u2 + 1.0;
    let h10 = u2 * u - 2.0 * u2 + u;
    let h01 = -2.0 * u2 * u + 3.0 * u2;
    let h11 = u2 * u - u2;
    let v = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = 6.0 * u2 - 6.0 * u;
    let dh10 = 3.0 * u2 - 4.0 * u + 1.0;
    let dh01 = -6.0 * u2 + 6.0 * u;
    let dh11 = 3.0 * u2 - 2.0 * u;
    let dv = (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1;
    (v, dv)
}
