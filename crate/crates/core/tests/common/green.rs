//! Brute-force Green sums and Poisson-dual theta residuals, written directly from the
//! coordinates `f = (a, b, c')` with `c' = δc ∈ O_k`.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

use super::lattice::{Ok2, OkRing};
use super::{beta1_quadrature, embed};

pub struct BruteGreen {
    pub value: f64,
    /// Largest single term among vectors with a coordinate on the edge of the box.
    pub edge: f64,
    pub terms: usize,
}

fn delta(d: i64) -> Complex64 {
    Complex64::new(0.0, (d as f64).sqrt())
}

fn u_a_bbar(d: i64, a: &[Vec<Ok2>], u: &[Complex64], b: &[Ok2]) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..u.len() {
        for j in 0..u.len() {
            s += u[i] * embed(d, a[i][j]) * embed(d, b[j]).conj();
        }
    }
    s
}

/// `Ψ_f(h) = -conj(c')·z - δ·ā + uᵀ A b̄`.
pub fn psi(d: i64, a_block: &[Vec<Ok2>], a: Ok2, b: &[Ok2], cp: Ok2, z: Complex64, u: &[Complex64]) -> Complex64 {
    -embed(d, cp).conj() * z - delta(d) * embed(d, a).conj() + u_a_bbar(d, a_block, u, b)
}

/// `⟨f, f⟩ = -Tr(a·conj(c')) + b A b*` as an integer.
pub fn norm(d: i64, a_block: &[Vec<Ok2>], a: Ok2, b: &[Ok2], cp: Ok2) -> i64 {
    let ring = OkRing::new(d);
    let tr = |x: Ok2| 2 * x.0 + x.1;
    let mut bab2 = 0;
    for i in 0..b.len() {
        for j in 0..b.len() {
            bab2 += tr(ring.mul(ring.mul(b[i], a_block[i][j]), ring.conj(b[j])));
        }
    }
    // bAb* is a rational integer, so its trace is twice its value
    -tr(ring.mul(a, ring.conj(cp))) + bab2 / 2
}

/// `Σ β₁(4πv|Ψ_f|²/ξ)` over every `f` of norm `m` whose `a`-coordinates lie in
/// `[-bound_a, bound_a]` and whose `c'`- and `b`-coordinates lie in `[-bound, bound]`.
pub fn brute_green(
    d: i64,
    a_block: &[Vec<Ok2>],
    m: i64,
    v: f64,
    z: Complex64,
    u: &[Complex64],
    bound: i64,
    bound_a: i64,
) -> BruteGreen {
    let rank = a_block.len();
    let mut uau = 0.0;
    for i in 0..rank {
        for j in 0..rank {
            uau += (u[i] * embed(d, a_block[i][j]) * u[j].conj()).re;
        }
    }
    let xi = 2.0 * (d as f64).sqrt() * z.im - uau;
    assert!(xi > 0.0);
    let ring = OkRing::new(d);
    let tr = |x: Ok2| 2 * x.0 + x.1;
    // outer coordinates (c', b); a is solved from the linear norm condition
    let dim = 2 * rank + 2;
    let mut x = vec![-bound; dim];
    let mut out = BruteGreen { value: 0.0, edge: 0.0, terms: 0 };
    let mut vals = Vec::new();
    loop {
        let cp = (x[0], x[1]);
        let b: Vec<Ok2> = (0..rank).map(|i| (x[2 + 2 * i], x[3 + 2 * i])).collect();
        let outer_edge = x.iter().any(|c| c.abs() == bound);
        // -Tr(a·conj(c')) = -(α a0 + β a1) must equal m - bAb*
        let t = m - norm(d, a_block, (0, 0), &b, (0, 0));
        let alpha = tr(ring.conj(cp));
        let beta = tr(ring.mul((0, 1), ring.conj(cp)));
        let mut cands: Vec<Ok2> = Vec::new();
        for a0 in -bound_a..=bound_a {
            if beta != 0 {
                let rhs = -t - alpha * a0;
                if rhs % beta == 0 && (rhs / beta).abs() <= bound_a {
                    cands.push((a0, rhs / beta));
                }
            } else if alpha * a0 == -t {
                cands.extend((-bound_a..=bound_a).map(|a1| (a0, a1)));
            }
        }
        for a in cands {
            debug_assert_eq!(norm(d, a_block, a, &b, cp), m);
            let p = psi(d, a_block, a, &b, cp, z, u);
            let arg = 4.0 * PI * v * p.norm_sqr() / xi;
            if arg < 700.0 {
                let t = beta1_quadrature(arg);
                vals.push(t);
                if outer_edge || a.0.abs() == bound_a || a.1.abs() == bound_a {
                    out.edge = out.edge.max(t);
                }
            }
        }
        let mut i = 0;
        loop {
            if i == dim {
                vals.sort_by(|p, q| p.partial_cmp(q).unwrap());
                out.terms = vals.len();
                out.value = vals.iter().sum();
                return out;
            }
            if x[i] < bound {
                x[i] += 1;
                break;
            }
            x[i] = -bound;
            i += 1;
        }
    }
}

/// `Σ_{η ∈ δO_k} exp(-|Ψ+η|²/ξ) - πξ/Vol` by Poisson summation over the dual lattice
/// `(2/d)·O_k` of `δO_k` with respect to `Re(x ȳ)`.
pub fn theta_residual_dual(d: i64, psi: Complex64, xi: f64) -> f64 {
    let vol = (d as f64).powf(1.5) / 2.0;
    let mut s = 0.0;
    let lim = 40;
    for y0 in -lim..=lim {
        for y1 in -lim..=lim {
            if (y0, y1) == (0, 0) {
                continue;
            }
            let y = embed(d, (y0, y1)) * (2.0 / d as f64);
            let w = (-PI * PI * xi * y.norm_sqr()).exp();
            if w == 0.0 {
                continue;
            }
            s += w * (2.0 * PI * (psi * y.conj()).re).cos();
        }
    }
    PI * xi / vol * s
}
