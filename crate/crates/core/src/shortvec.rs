//! Fincke–Pohst enumeration of integer points in an ellipsoid.
//!
//! Given a positive definite real quadratic form `Q` on `R^n`, a center `y` and a radius
//! `R`, visit every integer vector `x` with `Q(x - y) ≤ R`. Interval bounds are widened by a
//! small relative slack, so callers must re-check membership exactly when it matters; no
//! point inside the ellipsoid is ever skipped.

use crate::error::{Error, Result};

/// Square-completed form `Q(x) = Σ_i q_ii (x_i + Σ_{j>i} q_ij x_j)^2`.
#[derive(Debug, Clone)]
pub struct Ellipsoid {
    n: usize,
    q: Vec<Vec<f64>>,
}

impl Ellipsoid {
    /// Square-complete a symmetric positive definite matrix; fails if it is not definite.
    pub fn new(gram: &[Vec<f64>]) -> Result<Self> {
        let n = gram.len();
        let mut q: Vec<Vec<f64>> = gram.to_vec();
        for i in 0..n {
            if !(q[i][i] > 0.0) {
                return Err(Error::Indefinite);
            }
            for j in i + 1..n {
                q[j][i] = q[i][j];
                q[i][j] /= q[i][i];
            }
            for k in i + 1..n {
                for l in k..n {
                    q[k][l] -= q[k][i] * q[i][l];
                }
            }
        }
        Ok(Self { n, q })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Smallest pivot `q_ii`; `Q(x) ≥ min_pivot · …` is used for count bounds.
    pub fn pivots(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.q[i][i]).collect()
    }

    /// Call `visit` on every integer vector `x` with `Q(x - center) ≤ radius`.
    pub fn for_each<F: FnMut(&[i64])>(&self, center: &[f64], radius: f64, mut visit: F) {
        if self.n == 0 {
            if radius >= 0.0 {
                visit(&[]);
            }
            return;
        }
        if radius < 0.0 {
            return;
        }
        let n = self.n;
        let slack = 1e-9 * (1.0 + radius);
        let mut x = vec![0i64; n];
        let mut budget = vec![0.0f64; n + 1];
        let mut hi = vec![0i64; n];
        let mut ctr = vec![0.0f64; n];
        budget[n] = radius + slack;
        let mut i = n - 1;
        // initialize level i
        let init = |i: usize, x: &[i64], budget: &[f64], ctr: &mut [f64], hi: &mut [i64]| -> i64 {
            let mut c = center[i];
            for j in i + 1..n {
                c -= self.q[i][j] * (x[j] as f64 - center[j]);
            }
            ctr[i] = c;
            let r = (budget[i + 1].max(0.0) / self.q[i][i]).sqrt();
            hi[i] = (c + r).floor() as i64;
            (c - r).ceil() as i64
        };
        x[i] = init(i, &x, &budget, &mut ctr, &mut hi);
        loop {
            if x[i] > hi[i] {
                if i == n - 1 {
                    return;
                }
                i += 1;
                x[i] += 1;
                continue;
            }
            let t = x[i] as f64 - ctr[i];
            budget[i] = budget[i + 1] - self.q[i][i] * t * t;
            if budget[i] < -slack {
                x[i] += 1;
                continue;
            }
            if i == 0 {
                visit(&x);
                x[0] += 1;
                continue;
            }
            i -= 1;
            x[i] = init(i, &x, &budget, &mut ctr, &mut hi);
        }
    }
}
