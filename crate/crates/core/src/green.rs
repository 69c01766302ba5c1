//! The Green function of a Kudla–Rapoport divisor in cusp coordinates.
//!
//! A chart is fixed by a normal decomposition `L = O_k e ⊕ Λ ⊕ O_k g`, with the `k`-basis
//! `e, λ_1, …, λ_{n-2}, e' = δ_k g` in which the form is `[[0,0,δ],[0,A,0],[-δ,0,0]]`.
//! A lattice vector is `f = a e + b + c e'` with `a ∈ O_k`, `b ∈ Λ` and `c ∈ δ_k^{-1}O_k`.
//! A point `h` of the symmetric domain is the line through `(z, u, 1)`; then
//!
//! * `ξ(h) = 2 sqrt(d_k) Im z - uAu*`,
//! * `Ψ_f(h) = ⟨(z, u, 1), f⟩ = δ c̄ z - δ ā + uᵀ A b̄`,
//! * `Gr(m, v, h) = Σ_{⟨f,f⟩ = m} β₁(4πv |Ψ_f(h)|² / ξ(h))`.
//!
//! The sum is truncated to the finite set `Q_h(f) ≤ R`, where
//! `Q_h(f) = ⟨f,f⟩ + 2|Ψ_f|²/ξ` is the positive definite majorant, and `R` is chosen so that
//! a rigorous bound on the discarded terms is below the requested tolerance.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::base_field::{ImagQuadField, KElem};
use crate::error::{Error, Result};
use crate::herm_lattice::{HermLattice, NormalDecomposition};
use crate::okmat::OkMatrix;
use crate::shortvec::Ellipsoid;
use crate::special::beta1;
use crate::summation::{neumaier_sum, Neumaier};

/// Relative floor for divisor proximity: `|Ψ_f(h)| < 1e-8·sqrt(ξ)` is rejected.
pub const DIVISOR_FLOOR: f64 = 1e-8;

/// Cusp chart with the conventions `𝔞₀ = O_k`, `𝔠₀ = δ_k^{-1} O_k`, `r = d_k`.
#[derive(Debug, Clone)]
pub struct CuspChart {
    k: ImagQuadField,
    n: usize,
    lambda: HermLattice,
    a: Vec<Vec<Complex64>>,
    a_real: Option<Ellipsoid>,
    /// `2 × (real trace form of A)`, integral
    a_trace2: Vec<Vec<i64>>,
    det_a: f64,
    ok_form: Ellipsoid,
    sqrt_d: f64,
    omega: Complex64,
    delta: Complex64,
}

/// A point `(z, u)` of the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainPoint {
    pub z: Complex64,
    pub u: Vec<Complex64>,
}

/// Coordinates of `f = a e + b + c e'`; `c` is stored as the `k`-element itself, so
/// `δ_k c ∈ O_k` for lattice vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeVectorCoords {
    pub a: KElem,
    pub b: Vec<KElem>,
    pub c: KElem,
}

/// Parameters of a Green-function evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreenParams {
    pub m: i64,
    pub v: f64,
    pub tol: f64,
    pub max_radius: f64,
}

/// Value of the Green function together with its boundary/interior split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreenValue {
    /// `bnd + int`
    pub value: f64,
    pub bnd: f64,
    pub int: f64,
    /// Bound on the truncation error plus a floating-point rounding allowance.
    pub tail_bound: f64,
    /// Enumeration radius used for `Q_h(f) ≤ R`.
    pub radius: f64,
    pub terms: usize,
}

/// Integral unipotent element acting by `(z, u) ↦ (z + Tᵀu + X, u + S)` with
/// `S = δ s`, `T = A s̄`, `X = δ x`, where `x = (sAs*)·ω + j·δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnipotentElement {
    pub s: Vec<KElem>,
    pub j: i64,
}

/// Per-sample boundary diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryRow {
    pub abs_q: f64,
    pub xi: f64,
    pub e_int: f64,
    pub e_bnd: f64,
    pub tail_bound: f64,
    /// Set when the sample could not be evaluated (e.g. divisor proximity).
    pub error: Option<String>,
}

/// Boundary diagnostics along a ray `|q| → 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryReport {
    pub rows: Vec<BoundaryRow>,
    pub ind: u64,
    /// Number of linear factors in the local equation `ψ_m`.
    pub psi_factors: usize,
    /// Least-squares slope of `log|E_int|` against `log|q|`, if at least two samples qualify.
    pub decay_exponent: Option<f64>,
    /// `max - min` of `E_bnd` over samples with `|q|` in the last decade of the ray.
    pub bnd_variation_final_decade: f64,
    /// Sum of the tail bounds over the same samples.
    pub tail_sum_final_decade: f64,
    /// `max |Gr|` along the ray (meaningful when `ind = 0`).
    pub max_abs_gr: f64,
}

/// Residuals of the three Gaussian lattice sums over `η ∈ δ_k O_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaReport {
    pub xi_v: f64,
    /// `Σ e^{-|Ψ+η|²/ξ_v} - πξ_v/Vol`
    pub residual0: f64,
    /// `|Σ e^{-|Ψ+η|²/ξ_v} (Ψ+η)|`
    pub residual1: f64,
    /// `Σ e^{-|Ψ+η|²/ξ_v} |Ψ+η|² - πξ_v²/Vol`
    pub residual2: f64,
    /// Residuals multiplied by `ξ_v^k`.
    pub scaled: [f64; 3],
    /// Floating-point rounding floor of each residual; residuals below it carry no signal.
    pub floor: [f64; 3],
    pub tail_bound: f64,
}

impl ThetaReport {
    /// Whether residual `i` is resolved above its rounding floor.
    pub fn resolved(&self, i: usize) -> bool {
        let r = [self.residual0, self.residual1, self.residual2][i];
        r.abs() > 10.0 * self.floor[i]
    }
}

impl GreenParams {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidArgument("m must be nonzero".into()));
        }
        if !(self.v > 0.0) || !self.v.is_finite() {
            return Err(Error::InvalidArgument(format!("v must be positive, got {}", self.v)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.max_radius > 0.0) {
            return Err(Error::InvalidArgument("max_radius must be positive".into()));
        }
        Ok(())
    }
}

impl LatticeVectorCoords {
    /// Build from integral coordinates, with `c' = δ_k c ∈ O_k`.
    pub fn from_integral(k: &ImagQuadField, a: KElem, b: Vec<KElem>, c_prime: KElem) -> Self {
        let c = k.div(&c_prime, &k.delta()).expect("δ is nonzero");
        Self { a, b, c }
    }
}

fn to_real_coords(sqrt_d: f64, w: Complex64) -> [f64; 2] {
    let y1 = w.im / (sqrt_d / 2.0);
    [w.re - y1 / 2.0, y1]
}

/// `x·ȳ` traces for elements of `O_k` in integer coordinates.
#[derive(Clone, Copy)]
struct IntOk {
    n: i64,
}

impl IntOk {
    /// `Tr(x·ȳ)` for `x = x0 + x1ω`, `y = y0 + y1ω`.
    fn trace_x_ybar(&self, x: (i64, i64), y: (i64, i64)) -> i64 {
        // ȳ = (y0 + y1) - y1 ω
        let (p, q) = x;
        let (r, s) = (y.0 + y.1, -y.1);
        let re = p * r - self.n * q * s;
        let om = p * s + q * r + q * s;
        2 * re + om
    }
}

impl CuspChart {
    /// Chart whose `Λ`-block has Gram matrix `a_block` over `O_k` (positive definite).
    pub fn new(k: ImagQuadField, a_block: OkMatrix) -> Result<Self> {
        let lambda = HermLattice::new(k, a_block)?;
        if lambda.rank() > 0 && !lambda.is_positive_definite() {
            return Err(Error::Indefinite);
        }
        let n = lambda.rank() + 2;
        let a: Vec<Vec<Complex64>> =
            lambda.gram().iter().map(|r| r.iter().map(|x| k.embed(x)).collect()).collect();
        let tf = lambda.trace_form();
        let a_real = if lambda.rank() > 0 {
            let s: Vec<Vec<f64>> = tf.iter().map(|r| r.iter().map(|x| x.to_f64().unwrap()).collect()).collect();
            Some(Ellipsoid::new(&s)?)
        } else {
            None
        };
        let a_trace2 = tf
            .iter()
            .map(|r| r.iter().map(|x| (x * num_rational::BigRational::from_integer(2.into())).to_integer().to_i64().unwrap()).collect())
            .collect();
        let det_a = crate::okmat::det(&k, lambda.gram()).a.to_f64().unwrap_or(1.0);
        let nn = k.omega_norm() as f64;
        let ok_form = Ellipsoid::new(&[vec![1.0, 0.5], vec![0.5, nn]])?;
        Ok(Self {
            k,
            n,
            lambda,
            a,
            a_real,
            a_trace2,
            det_a,
            ok_form,
            sqrt_d: (k.d_k() as f64).sqrt(),
            omega: k.omega_complex(),
            delta: k.delta_complex(),
        })
    }

    pub fn from_decomposition(k: ImagQuadField, nd: &NormalDecomposition) -> Result<Self> {
        Self::new(k, nd.a_block.clone())
    }

    pub fn field(&self) -> &ImagQuadField {
        &self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> &HermLattice {
        &self.lambda
    }

    /// `r = d_k · N(𝔞₀) = d_k`.
    pub fn r(&self) -> f64 {
        self.k.d_k() as f64
    }

    /// `Vol(C / δ_k O_k) = d_k^{3/2} / 2`.
    pub fn vol(&self) -> f64 {
        self.sqrt_d.powi(3) / 2.0
    }

    /// `uAu*`.
    pub fn u_norm(&self, u: &[Complex64]) -> f64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (i, ui) in u.iter().enumerate() {
            for (j, uj) in u.iter().enumerate() {
                s += ui * self.a[i][j] * uj.conj();
            }
        }
        s.re
    }

    fn check_point(&self, h: &DomainPoint) -> Result<()> {
        if h.u.len() != self.n - 2 {
            return Err(Error::InvalidArgument(format!(
                "u has length {}, chart expects {}",
                h.u.len(),
                self.n - 2
            )));
        }
        Ok(())
    }

    /// `ξ(h) = 2 sqrt(d_k) Im z - uAu*`; errors outside the domain.
    pub fn xi(&self, h: &DomainPoint) -> Result<f64> {
        self.check_point(h)?;
        let xi = 2.0 * self.sqrt_d * h.z.im - self.u_norm(&h.u);
        if xi > 0.0 && xi.is_finite() {
            Ok(xi)
        } else {
            Err(Error::OutsideDomain(xi))
        }
    }

    /// `q = exp(2πi z / r)`.
    pub fn q_coordinate(&self, h: &DomainPoint) -> Complex64 {
        (Complex64::new(0.0, 2.0 * PI) * h.z / self.r()).exp()
    }

    /// `ξ` recomputed from `|q|` and `u`: `-(d_k^{3/2}/2π)·log|q|² - uAu*`.
    pub fn xi_from_q(&self, h: &DomainPoint) -> f64 {
        let q = self.q_coordinate(h);
        -(self.sqrt_d.powi(3) / (2.0 * PI)) * q.norm_sqr().ln() - self.u_norm(&h.u)
    }

    /// The point with `Re z = x`, `|q| = abs_q` and the given `u`.
    pub fn point_from_q(&self, x: f64, abs_q: f64, u: Vec<Complex64>) -> DomainPoint {
        let y = -self.r() * abs_q.ln() / (2.0 * PI);
        DomainPoint { z: Complex64::new(x, y), u }
    }

    /// Exact `⟨f, f⟩` (a rational, integral for lattice vectors).
    pub fn norm(&self, f: &LatticeVectorCoords) -> num_rational::BigRational {
        let k = &self.k;
        let d = k.delta();
        // δ(a c̄ - c ā) + b A b*
        let ac = k.mul(&f.a, &f.c.conj());
        let ca = k.mul(&f.c, &f.a.conj());
        let mut s = k.mul(&d, &(&ac - &ca));
        for (i, bi) in f.b.iter().enumerate() {
            for (j, bj) in f.b.iter().enumerate() {
                s = &s + &k.mul(&k.mul(bi, &self.lambda.gram()[i][j]), &bj.conj());
            }
        }
        debug_assert!(s.b == num_rational::BigRational::from_integer(0.into()));
        s.a
    }

    /// `Ψ_f(h) = δ c̄ z - δ ā + uᵀ A b̄`.
    pub fn psi(&self, f: &LatticeVectorCoords, h: &DomainPoint) -> Complex64 {
        let c = self.k.embed(&f.c);
        let a = self.k.embed(&f.a);
        let b: Vec<Complex64> = f.b.iter().map(|x| self.k.embed(x)).collect();
        self.delta * c.conj() * h.z - self.delta * a.conj() + self.u_a_bbar(&h.u, &b)
    }

    fn u_a_bbar(&self, u: &[Complex64], b: &[Complex64]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (i, ui) in u.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                s += ui * self.a[i][j] * bj.conj();
            }
        }
        s
    }

    /// `Q_h(f) = ⟨f,f⟩ + 2|Ψ_f(h)|²/ξ(h)`.
    pub fn q_h(&self, f: &LatticeVectorCoords, h: &DomainPoint) -> Result<f64> {
        let xi = self.xi(h)?;
        Ok(self.norm(f).to_f64().unwrap() + 2.0 * self.psi(f, h).norm_sqr() / xi)
    }

    /// The same majorant as a sum of three nonnegative terms:
    /// `|c|²ξ/2 + (b - cu)A(b - cu)* + 2|W|²/ξ` with
    /// `W = δ(a - c·Re z) + bᵀAū - c·uAu*/2`.
    pub fn q_h_expanded(&self, f: &LatticeVectorCoords, h: &DomainPoint) -> Result<f64> {
        let xi = self.xi(h)?;
        let c = self.k.embed(&f.c);
        let a = self.k.embed(&f.a);
        let b: Vec<Complex64> = f.b.iter().map(|x| self.k.embed(x)).collect();
        let s = self.u_norm(&h.u);
        let diff: Vec<Complex64> = b.iter().zip(&h.u).map(|(bi, ui)| bi - c * ui).collect();
        let t2 = self.u_norm(&diff);
        let b_a_ubar = self.u_a_bbar(&b, &h.u);
        let w = self.delta * (a - c * h.z.re) + b_a_ubar - c * s / 2.0;
        Ok(c.norm_sqr() * xi / 2.0 + t2 + 2.0 * w.norm_sqr() / xi)
    }

    /// Apply a unipotent element to a point.
    pub fn act(&self, g: &UnipotentElement, h: &DomainPoint) -> Result<DomainPoint> {
        self.check_point(h)?;
        if g.s.len() != self.n - 2 {
            return Err(Error::InvalidArgument("unipotent element has wrong size".into()));
        }
        let k = &self.k;
        let s: Vec<Complex64> = g.s.iter().map(|x| k.embed(x)).collect();
        let big_s: Vec<Complex64> = s.iter().map(|x| self.delta * x).collect();
        // T = A s̄
        let t: Vec<Complex64> = (0..s.len())
            .map(|i| (0..s.len()).map(|j| self.a[i][j] * s[j].conj()).sum())
            .collect();
        let sas = self.u_norm(&s);
        let x = self.delta * (self.omega * sas + self.delta * g.j as f64);
        let tu: Complex64 = t.iter().zip(&h.u).map(|(ti, ui)| ti * ui).sum();
        Ok(DomainPoint {
            z: h.z + tu + x,
            u: h.u.iter().zip(&big_s).map(|(ui, si)| ui + si).collect(),
        })
    }

    /// Lattice-point count bound for `{f : Q_h(f) ≤ R}` at a point with the given `ξ`.
    fn count_bound(&self, radius: f64, xi: f64) -> f64 {
        let cov = self.sqrt_d / 2.0;
        let diam = (Complex64::new(1.0, 0.0) + self.omega).norm();
        let disk = |rho: f64| PI * (rho + diam).powi(2) / cov;
        let nc = disk((2.0 * radius * self.k.d_k() as f64 / xi).sqrt());
        let na = disk((radius * xi / (2.0 * self.k.d_k() as f64)).sqrt());
        let kdim = (self.n - 2) as i32;
        let nb = if kdim == 0 {
            1.0
        } else {
            let diam_b: f64 = (0..self.n - 2).map(|i| self.a[i][i].re.sqrt() * (1.0 + self.omega.norm())).sum();
            let rho = radius.sqrt() + diam_b;
            let fact: f64 = (1..=kdim).map(|i| i as f64).product();
            PI.powi(kdim) * rho.powi(2 * kdim) / fact / (cov.powi(kdim) * self.det_a)
        };
        nc * nb * na
    }

    /// Bound on `Σ_{Q_h(f) > R} β₁(2πv(Q_h(f) - m))` over all lattice vectors.
    fn tail(&self, radius: f64, xi: f64, p: &GreenParams) -> f64 {
        let mut acc = 0.0;
        let mut r = radius;
        for _ in 0..200 {
            let arg = 2.0 * PI * p.v * (r - p.m as f64);
            let term = self.count_bound(2.0 * r, xi) * beta1(arg).unwrap_or(f64::INFINITY);
            acc += term;
            if arg > 50.0 && (term < 1e-300 || term < 1e-6 * acc) {
                break;
            }
            r *= 2.0;
        }
        acc
    }

    fn choose_radius(&self, xi: f64, p: &GreenParams) -> Result<(f64, f64)> {
        let step = 0.25 / (2.0 * PI * p.v);
        let mut r = (p.m as f64).max(0.0) + step;
        loop {
            let t = self.tail(r, xi, p);
            if t <= 0.5 * p.tol {
                return Ok((r, t));
            }
            if r > p.max_radius {
                return Err(Error::TruncationCap { needed: r, cap: p.max_radius });
            }
            r += step;
        }
    }

    /// `Gr(m, v, h)` with its boundary/interior split.
    pub fn green(&self, p: &GreenParams, h: &DomainPoint) -> Result<GreenValue> {
        p.validate()?;
        let xi = self.xi(h)?;
        let (radius, tail) = self.choose_radius(xi, p)?;
        let d = self.k.d_k() as f64;
        let ring = IntOk { n: self.k.omega_norm() };
        let floor = DIVISOR_FLOOR * xi.sqrt();

        // c' = δc ∈ O_k with |c'|² ≤ 2Rd/ξ
        let mut cs: Vec<(i64, i64)> = Vec::new();
        self.ok_form.for_each(&[0.0, 0.0], 2.0 * radius * d / xi, |x| cs.push((x[0], x[1])));

        let per_c: Vec<Result<(Vec<f64>, Vec<f64>)>> = cs
            .par_iter()
            .map(|&cp| self.terms_for_c(cp, radius, xi, p, h, ring, floor))
            .collect();
        let mut bnd = Neumaier::new();
        let mut int = Neumaier::new();
        let mut terms = 0usize;
        let mut abs_sum = 0.0;
        for (cp, r) in cs.iter().zip(per_c) {
            let (tb, ti) = r?;
            terms += tb.len() + ti.len();
            abs_sum += tb.iter().chain(&ti).map(|x| x.abs()).sum::<f64>();
            if *cp == (0, 0) {
                bnd.extend(tb);
            } else {
                int.extend(ti);
            }
        }
        let bnd = bnd.value();
        let int = int.value();
        let rounding = 8.0 * f64::EPSILON * abs_sum + 1e-13 * f64::EPSILON * terms as f64;
        Ok(GreenValue { value: bnd + int, bnd, int, tail_bound: tail + rounding, radius, terms })
    }

    #[allow(clippy::too_many_arguments)]
    fn terms_for_c(
        &self,
        cp: (i64, i64),
        radius: f64,
        xi: f64,
        p: &GreenParams,
        h: &DomainPoint,
        ring: IntOk,
        floor: f64,
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let d = self.k.d_k() as f64;
        let cprime = Complex64::new(cp.0 as f64, 0.0) + self.omega * cp.1 as f64;
        let c = cprime / self.delta;
        let r1 = radius - c.norm_sqr() * xi / 2.0;
        let mut bnd = Vec::new();
        let mut int = Vec::new();
        if r1 < 0.0 {
            return Ok((bnd, int));
        }
        let s = self.u_norm(&h.u);
        let kdim = self.n - 2;
        let mut bs: Vec<Vec<i64>> = Vec::new();
        match &self.a_real {
            None => bs.push(Vec::new()),
            Some(ell) => {
                let center: Vec<f64> =
                    h.u.iter().flat_map(|ui| to_real_coords(self.sqrt_d, c * ui)).collect();
                ell.for_each(&center, r1, |x| bs.push(x.to_vec()));
            }
        }
        for bx in bs {
            let b: Vec<Complex64> =
                bx.chunks(2).map(|w| Complex64::new(w[0] as f64, 0.0) + self.omega * w[1] as f64).collect();
            let bab2: i64 = quad_i64(&self.a_trace2, &bx);
            let bab = bab2 / 2;
            let diff: Vec<Complex64> = b.iter().zip(&h.u).map(|(bi, ui)| bi - c * ui).collect();
            let r2 = r1 - if kdim > 0 { self.u_norm(&diff) } else { 0.0 };
            if r2 < -1e-9 * (1.0 + radius) {
                continue;
            }
            let t = p.m - bab; // need -Tr(a c̄') = t
            if cp == (0, 0) && t != 0 {
                continue;
            }
            // a-disk: |a - a_c|² ≤ r2·ξ/(2d), a_c = c·Re z - (bᵀAū - c s/2)/δ
            let bau = self.u_a_bbar(&b, &h.u);
            let a_c = c * h.z.re - (bau - c * s / 2.0) / self.delta;
            let rad2 = r2.max(0.0) * xi / (2.0 * d);
            let mut local = Vec::new();
            self.ok_form.for_each(&to_real_coords(self.sqrt_d, a_c), rad2, |ax| {
                local.push((ax[0], ax[1]));
            });
            let uab = self.u_a_bbar(&h.u, &b);
            for (a0, a1) in local {
                if cp != (0, 0) && -ring.trace_x_ybar((a0, a1), cp) != t {
                    continue;
                }
                let a = Complex64::new(a0 as f64, 0.0) + self.omega * a1 as f64;
                let psi = -cprime.conj() * h.z - self.delta * a.conj() + uab;
                let psi_abs = psi.norm();
                if psi_abs < floor {
                    return Err(Error::DivisorProximity { distance: psi_abs, floor });
                }
                let x = 4.0 * PI * p.v * psi.norm_sqr() / xi;
                let val = beta1(x)?;
                if cp == (0, 0) {
                    bnd.push(val);
                } else {
                    int.push(val);
                }
            }
        }
        Ok((bnd, int))
    }

    /// Factors `Ψ_f(h)` of the local equation `ψ_m` near `h`: boundary vectors `f`
    /// (`c = 0`, `bAb* = m`) with `|Ψ_f(h)| ≤ window`.
    pub fn local_equation_factors(&self, m: i64, h: &DomainPoint, window: f64) -> Result<Vec<Complex64>> {
        self.check_point(h)?;
        let bs: Vec<Vec<KElem>> = if self.n == 2 {
            if m == 0 {
                vec![Vec::new()]
            } else {
                Vec::new()
            }
        } else {
            self.lambda.vectors_of_norm(m)?
        };
        let mut out = Vec::new();
        for b in bs {
            let bc: Vec<Complex64> = b.iter().map(|x| self.k.embed(x)).collect();
            let center = self.u_a_bbar(&h.u, &bc);
            // Ψ = center - δ ā; need |δ ā - center| ≤ window, i.e. |a - conj(center/δ)| ≤ window/√d
            let ac = (center / self.delta).conj();
            let rad2 = window * window / (self.sqrt_d * self.sqrt_d);
            self.ok_form.for_each(&to_real_coords(self.sqrt_d, ac), rad2, |ax| {
                let a = Complex64::new(ax[0] as f64, 0.0) + self.omega * ax[1] as f64;
                let psi = center - self.delta * a.conj();
                if psi.norm() <= window {
                    out.push(psi);
                }
            });
        }
        Ok(out)
    }

    /// Diagnostics `E_int = Gr^int` and `E_bnd = log|ψ_m|² - Ind·ξ/(4v·Vol) + Gr^bnd`
    /// along a ray of points sharing `u` (so the factors of `ψ_m` are fixed).
    pub fn boundary_diagnostics(&self, p: &GreenParams, ray: &[DomainPoint], window: f64) -> Result<BoundaryReport> {
        p.validate()?;
        let first = ray.first().ok_or_else(|| Error::InvalidArgument("empty ray".into()))?;
        let ind = if self.n == 2 || p.m < 0 {
            0
        } else {
            self.lambda.count_vectors(p.m)?
        };
        let factors = self.local_equation_factors(p.m, first, window)?;
        let mut rows = Vec::with_capacity(ray.len());
        for h in ray {
            let abs_q = self.q_coordinate(h).norm();
            let xi = self.xi(h)?;
            let psi_m: Vec<Complex64> = self.local_equation_factors(p.m, h, window)?;
            let log_psi = neumaier_sum(psi_m.iter().map(|x| x.norm_sqr().ln()));
            match self.green(p, h) {
                Ok(g) => rows.push(BoundaryRow {
                    abs_q,
                    xi,
                    e_int: g.int,
                    e_bnd: log_psi - ind as f64 * xi / (4.0 * p.v * self.vol()) + g.bnd,
                    tail_bound: g.tail_bound,
                    error: None,
                }),
                Err(e) => rows.push(BoundaryRow {
                    abs_q,
                    xi,
                    e_int: f64::NAN,
                    e_bnd: f64::NAN,
                    tail_bound: f64::NAN,
                    error: Some(e.to_string()),
                }),
            }
        }
        let ok: Vec<&BoundaryRow> = rows.iter().filter(|r| r.error.is_none()).collect();
        let fit: Vec<(f64, f64)> = ok
            .iter()
            .filter(|r| r.e_int.abs() > 10.0 * r.tail_bound && r.e_int != 0.0)
            .map(|r| (r.abs_q.ln(), r.e_int.abs().ln()))
            .collect();
        let decay_exponent = least_squares_slope(&fit);
        let q_min = ok.iter().map(|r| r.abs_q).fold(f64::INFINITY, f64::min);
        let last: Vec<&&BoundaryRow> = ok.iter().filter(|r| r.abs_q <= 10.0 * q_min * (1.0 + 1e-12)).collect();
        let (lo, hi) = last
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.e_bnd), hi.max(r.e_bnd)));
        let bnd_variation_final_decade = if last.is_empty() { f64::NAN } else { hi - lo };
        let tail_sum_final_decade = last.iter().map(|r| r.tail_bound).sum();
        let max_abs_gr = ok.iter().map(|r| (r.e_int + r.e_bnd).abs()).fold(0.0, f64::max);
        Ok(BoundaryReport {
            rows,
            ind,
            psi_factors: factors.len(),
            decay_exponent,
            bnd_variation_final_decade,
            tail_sum_final_decade,
            max_abs_gr,
        })
    }

    /// Gaussian sums over `η ∈ δ_k O_k` centered at `Ψ`, compared with their leading terms.
    pub fn theta_sums(&self, psi: Complex64, xi_v: f64, k_exp: i32) -> Result<ThetaReport> {
        if !(xi_v > 1.0) {
            return Err(Error::InvalidArgument(format!("ξ_v must exceed 1, got {xi_v}")));
        }
        // |Ψ + η|² ≤ L ξ_v with η = δ a; a ranges over O_k near -Ψ/δ
        const L: f64 = 60.0;
        let d = self.k.d_k() as f64;
        let center = to_real_coords(self.sqrt_d, -psi / self.delta);
        let mut pts = Vec::new();
        self.ok_form.for_each(&center, L * xi_v / d, |x| pts.push((x[0], x[1])));
        let mut s0 = Neumaier::new();
        let mut s1re = Neumaier::new();
        let mut s1im = Neumaier::new();
        let mut s2 = Neumaier::new();
        let mut abs1 = 0.0;
        for (a0, a1) in pts {
            let eta = self.delta * (Complex64::new(a0 as f64, 0.0) + self.omega * a1 as f64);
            let w = psi + eta;
            let t = (-w.norm_sqr() / xi_v).exp();
            s0.add(t);
            s1re.add(t * w.re);
            s1im.add(t * w.im);
            s2.add(t * w.norm_sqr());
            abs1 += t * w.norm();
        }
        let vol = self.vol();
        let r0 = s0.value() - PI * xi_v / vol;
        let r1 = Complex64::new(s1re.value(), s1im.value()).norm();
        let r2 = s2.value() - PI * xi_v * xi_v / vol;
        // shells beyond L ξ_v: count ≤ area of the enlarged disk / Vol, weight e^{-t}(1 + t)ξ_v
        let diam = self.sqrt_d * (Complex64::new(1.0, 0.0) + self.omega).norm();
        let mut tail = 0.0;
        let mut t = L;
        for _ in 0..40 {
            let rho = (2.0 * t * xi_v).sqrt() + diam;
            let count = PI * rho * rho / vol;
            tail += count * (-t).exp() * (1.0 + t * xi_v);
            t *= 2.0;
        }
        let sc = xi_v.powi(k_exp);
        let eps = 4.0 * f64::EPSILON;
        let floor = [
            eps * (s0.value() + PI * xi_v / vol),
            eps * abs1,
            eps * (s2.value() + PI * xi_v * xi_v / vol),
        ];
        Ok(ThetaReport {
            xi_v,
            residual0: r0,
            residual1: r1,
            residual2: r2,
            scaled: [r0 * sc, r1 * sc, r2 * sc],
            floor,
            tail_bound: tail,
        })
    }

    /// Theta estimate at `h` for a boundary vector `f` (`c = 0`), with `ξ_v = ξ(h)/(4πv)`.
    pub fn theta_check(&self, f: &LatticeVectorCoords, h: &DomainPoint, k_exp: i32, v: f64) -> Result<ThetaReport> {
        if !f.c.is_zero() {
            return Err(Error::InvalidArgument("theta check needs a boundary vector (c = 0)".into()));
        }
        let xi_v = self.xi(h)? / (4.0 * PI * v);
        self.theta_sums(self.psi(f, h), xi_v, k_exp)
    }
}

fn quad_i64(m: &[Vec<i64>], x: &[i64]) -> i64 {
    let mut acc = 0i64;
    for (i, row) in m.iter().enumerate() {
        let t: i64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
        acc += t * x[i];
    }
    acc
}

/// Least-squares slope of `y` against `x`.
pub fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}
