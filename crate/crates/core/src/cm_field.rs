//! A monogenic totally real field `F = Q(θ)`, its ideals and primes, and the CM algebra
//! `K = k ⊗ F` over an imaginary quadratic field `k`.
//!
//! The ring of integers is `Z[θ]`; this is verified at construction by Dedekind's criterion
//! at every prime whose square divides the polynomial discriminant. Elements are stored in the
//! power basis `1, θ, …, θ^{n-1}`, fractional ideals as a denominator plus an integral Hermite
//! basis. Real embeddings are handled through isolated roots, so every sign decision (total
//! positivity, the unique negative place) is exact.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::base_field::ImagQuadField;
use crate::error::{Error, Result};
use crate::finite_field::{factor, powmod, FpPoly};
use crate::linalg::{self, IntMatrix, RatMatrix};
use crate::poly::{isolate_real_roots, sign_at_root, QPoly, RealRoot, RootApprox, SturmSequence};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn big_rat(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

/// Prime factorization of a positive integer by trial division, as `(p, exponent)` pairs.
pub fn factor_integer(n: &BigInt) -> Vec<(u64, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = 2u64;
    while BigInt::from(p) * BigInt::from(p) <= n {
        let bp = BigInt::from(p);
        let mut e = 0;
        while (&n % &bp).is_zero() {
            n /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() {
        out.push((n.to_u64().expect("prime factor exceeds u64"), 1));
    }
    out
}

fn valuation(n: &BigInt, p: u64) -> u32 {
    if n.is_zero() {
        return u32::MAX;
    }
    let bp = BigInt::from(p);
    let mut n = n.clone();
    let mut e = 0;
    while (&n % &bp).is_zero() {
        n /= &bp;
        e += 1;
    }
    e
}

/// An element of `F` in the power basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FElem {
    pub coords: Vec<BigRational>,
}

impl FElem {
    pub fn from_i64(coords: &[i64]) -> Self {
        Self { coords: coords.iter().map(|&c| rat(c)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    /// Least common denominator of the coordinates.
    pub fn denominator(&self) -> BigInt {
        self.coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self { coords: self.coords.iter().map(|c| c * s).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn as_poly(&self) -> QPoly {
        QPoly::new(self.coords.clone())
    }
}

impl fmt::Display for FElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Validated monogenic totally real field.
#[derive(Debug, Clone)]
pub struct TotallyRealField {
    f: Vec<i64>,
    poly: QPoly,
    n: usize,
    disc: BigInt,
    roots: Vec<RealRoot>,
    approx: Vec<RootApprox>,
    /// coordinates of θ^k for k < 2n
    powers: Vec<Vec<BigInt>>,
    /// power sums Tr(θ^k) for k < 2n
    power_sums: Vec<BigInt>,
    trace_inv: RatMatrix,
}

impl PartialEq for TotallyRealField {
    fn eq(&self, other: &Self) -> bool {
        self.f == other.f
    }
}

impl TotallyRealField {
    /// Build `F = Q[x]/(f)` from integer coefficients, lowest degree first (monic).
    pub fn new(f: &[i64]) -> Result<Self> {
        let mut f = f.to_vec();
        while f.last() == Some(&0) {
            f.pop();
        }
        let n = f.len().checked_sub(1).filter(|&n| n >= 1).ok_or_else(|| {
            Error::InvalidPolynomial("polynomial must have degree at least 1".into())
        })?;
        if f[n] != 1 {
            return Err(Error::InvalidPolynomial("polynomial must be monic".into()));
        }
        let poly = QPoly::from_i64(&f);
        let powers = reduced_powers(&f, 2 * n);
        let power_sums = newton_power_sums(&f, 2 * n);
        let tmat: IntMatrix =
            (0..n).map(|i| (0..n).map(|j| power_sums[i + j].clone()).collect()).collect();
        let disc = linalg::det_int(&tmat);
        if disc.is_zero() {
            return Err(Error::InvalidPolynomial("polynomial has repeated roots".into()));
        }
        if SturmSequence::new(&poly).count_real() != n {
            return Err(Error::InvalidPolynomial("polynomial is not totally real".into()));
        }
        if disc.is_even() {
            return Err(Error::InvalidPolynomial(format!("discriminant {disc} is even")));
        }
        for (p, e) in factor_integer(&disc) {
            if e >= 2 && !dedekind_maximal(&f, p) {
                return Err(Error::InvalidPolynomial(format!(
                    "Z[θ] is not maximal at p = {p}; only monogenic fields with O_F = Z[θ] are supported"
                )));
            }
        }
        let roots = isolate_real_roots(&poly);
        let approx = roots.iter().map(|r| RootApprox::from_root(&poly, r)).collect();
        let trace_inv = linalg::inverse_rat(&linalg::to_rat(&tmat)).expect("nonzero discriminant");
        Ok(Self { f, poly, n, disc, roots, approx, powers, power_sums, trace_inv })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn poly_coeffs(&self) -> &[i64] {
        &self.f
    }

    pub fn poly(&self) -> &QPoly {
        &self.poly
    }

    pub fn roots(&self) -> &[RealRoot] {
        &self.roots
    }

    /// Floating-point approximations of the real roots, increasing.
    pub fn root_values(&self) -> Vec<f64> {
        self.approx.iter().map(|a| a.value).collect()
    }

    /// Trace form matrix `Tr(θ^{i+j})`.
    pub fn trace_matrix(&self) -> IntMatrix {
        (0..self.n).map(|i| (0..self.n).map(|j| self.power_sums[i + j].clone()).collect()).collect()
    }

    pub fn zero(&self) -> FElem {
        FElem { coords: vec![BigRational::zero(); self.n] }
    }

    pub fn one(&self) -> FElem {
        self.from_int(1)
    }

    pub fn from_int(&self, a: i64) -> FElem {
        let mut c = vec![BigRational::zero(); self.n];
        c[0] = rat(a);
        FElem { coords: c }
    }

    /// `θ^k` reduced into the power basis.
    pub fn theta_pow(&self, k: usize) -> FElem {
        if k < self.powers.len() {
            return FElem { coords: self.powers[k].iter().map(big_rat).collect() };
        }
        let mut acc = self.one();
        let th = self.theta_pow(1);
        for _ in 0..k {
            acc = self.mul(&acc, &th);
        }
        acc
    }

    /// Element with the given power-basis coordinates; wrong lengths are padded/truncated
    /// only when the extra entries are zero.
    pub fn elem(&self, coords: Vec<BigRational>) -> Result<FElem> {
        if coords.len() > self.n && coords[self.n..].iter().any(|c| !c.is_zero()) {
            return Err(Error::InvalidArgument(format!(
                "element has {} coordinates, field degree is {}",
                coords.len(),
                self.n
            )));
        }
        let mut c = coords;
        c.resize(self.n, BigRational::zero());
        Ok(FElem { coords: c })
    }

    pub fn mul(&self, x: &FElem, y: &FElem) -> FElem {
        let n = self.n;
        let mut conv = vec![BigRational::zero(); 2 * n - 1];
        for (i, a) in x.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.coords.iter().enumerate() {
                conv[i + j] += a * b;
            }
        }
        let mut out = vec![BigRational::zero(); n];
        for (k, c) in conv.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, p) in out.iter_mut().zip(&self.powers[k]) {
                if !p.is_zero() {
                    *o += c * big_rat(p);
                }
            }
        }
        FElem { coords: out }
    }

    pub fn trace(&self, x: &FElem) -> BigRational {
        x.coords
            .iter()
            .zip(&self.power_sums)
            .fold(BigRational::zero(), |acc, (c, s)| acc + c * big_rat(s))
    }

    fn mult_matrix(&self, x: &FElem) -> RatMatrix {
        (0..self.n).map(|i| self.mul(x, &self.theta_pow(i)).coords).collect()
    }

    pub fn norm(&self, x: &FElem) -> BigRational {
        linalg::det_rat(&self.mult_matrix(x))
    }

    pub fn inv(&self, x: &FElem) -> Result<FElem> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = linalg::inverse_rat(&self.mult_matrix(x)).ok_or(Error::DivisionByZero)?;
        // row 0 of M^{-1} gives x^{-1}·1
        Ok(FElem { coords: m[0].clone() })
    }

    /// Real embeddings (floating point), one per isolated root.
    pub fn embeddings(&self, x: &FElem) -> Vec<f64> {
        let c: Vec<f64> = x.coords.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
        self.approx.iter().map(|a| a.eval_with_bound(&c).0).collect()
    }

    /// Exact sign of `σ_i(x)`.
    pub fn sign_at(&self, x: &FElem, i: usize) -> Ordering {
        let c: Vec<f64> = x.coords.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
        let (v, e) = self.approx[i].eval_with_bound(&c);
        if v.is_finite() && e.is_finite() && v.abs() > e {
            return if v > 0.0 { Ordering::Greater } else { Ordering::Less };
        }
        sign_at_root(&self.poly, &x.as_poly(), &self.roots[i])
    }

    pub fn is_totally_positive(&self, x: &FElem) -> bool {
        (0..self.n).all(|i| self.sign_at(x, i) == Ordering::Greater)
    }

    /// `f'(θ)`, the generator of the different.
    pub fn f_prime_theta(&self) -> FElem {
        let d = self.poly.derivative();
        let mut c: Vec<BigRational> = d.coeffs().to_vec();
        c.resize(self.n, BigRational::zero());
        FElem { coords: c }
    }

    /// The different `𝔡_F = (f'(θ))`.
    pub fn different(&self) -> FracIdealF {
        FracIdealF::principal(self, &self.f_prime_theta())
    }

    /// The element with trace-dual coordinates `c_j = Tr(α θ^j)`.
    pub fn from_trace_coords(&self, c: &[BigInt]) -> FElem {
        let coords = (0..self.n)
            .map(|i| {
                c.iter()
                    .zip(&self.trace_inv[i])
                    .fold(BigRational::zero(), |acc, (cj, t)| acc + big_rat(cj) * t)
            })
            .collect();
        FElem { coords }
    }

    /// Dedekind factorization of `pO_F`, sorted by `(f_deg, g)`.
    pub fn factor_prime(&self, p: u64) -> Vec<PrimeIdealF> {
        let fp = FpPoly::from_i64(p, &self.f);
        factor(&fp, 0x5eed)
            .into_iter()
            .map(|(g, e)| {
                let mut gens = vec![self.from_int(p as i64)];
                gens.push(FElem { coords: fp_lift(&g, self.n) });
                let ideal = FracIdealF::from_generators(self, &gens);
                PrimeIdealF { p, g: g.c.clone(), e, f_deg: g.degree() as u32, ideal }
            })
            .collect()
    }

    /// Totally positive `α ∈ 𝔡_F^{-1}` with `Tr(α) = m`, in a canonical order.
    pub fn enumerate_totally_positive(&self, m: i64) -> Vec<FElem> {
        if m <= 0 {
            return Vec::new();
        }
        let mf = m as f64;
        let thetas = self.root_values();
        let mut boxes = vec![(m, m)];
        for j in 1..self.n {
            let vals: Vec<f64> = thetas.iter().map(|t| mf * t.powi(j as i32)).collect();
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            boxes.push(((lo - 1.0).floor() as i64, (hi + 1.0).ceil() as i64));
        }
        let mut out: Vec<FElem> = box_points(&boxes)
            .into_iter()
            .map(|c| self.from_trace_coords(&c))
            .filter(|a| self.is_totally_positive(a))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// `α ∈ 𝔡_F^{-1}` with `Tr(α) = m`, negative at exactly one real place `i`, and
    /// `|σ_i(α)| ≤ t`. Returned as `(α, i)`, sorted by place then element.
    pub fn enumerate_f_minus(&self, m: i64, t: f64) -> Vec<(FElem, usize)> {
        if !(t > 0.0) || self.n == 1 {
            // a single place cannot be negative while the remaining (empty) set is positive
            // unless m < 0, in which case α = m
            if self.n == 1 && m < 0 && (m as f64).abs() <= t {
                return vec![(self.from_int(m), 0)];
            }
            return Vec::new();
        }
        let mf = m as f64;
        if mf + t <= 0.0 {
            return Vec::new();
        }
        let t_exact = BigRational::from_float(t).expect("finite truncation");
        let mut out = Vec::new();
        for i0 in 0..self.n {
            let boxes = self.f_minus_box(m, t, i0);
            for c in box_points(&boxes) {
                let a = self.from_trace_coords(&c);
                let ok = (0..self.n).all(|i| {
                    let s = self.sign_at(&a, i);
                    if i == i0 {
                        s == Ordering::Less
                    } else {
                        s == Ordering::Greater
                    }
                });
                if !ok {
                    continue;
                }
                let mut shifted = a.clone();
                shifted.coords[0] += &t_exact;
                if self.sign_at(&shifted, i0) == Ordering::Less {
                    continue;
                }
                out.push((a, i0));
            }
        }
        out.sort_by(|x, y| (x.1, &x.0).cmp(&(y.1, &y.0)));
        out.dedup();
        out
    }
}

impl TotallyRealField {
    /// Trace-dual coordinate box containing every `α` with `Tr(α) = m`, `σ_{i0}(α) ∈ [-t, 0]`
    /// and the other embeddings positive.
    fn f_minus_box(&self, m: i64, t: f64, i0: usize) -> Vec<(i64, i64)> {
        let mf = m as f64;
        let thetas = self.root_values();
        let mut boxes = vec![(m, m)];
        for j in 1..self.n {
            let (mut lo, mut hi) = (0.0, 0.0);
            for (i, th) in thetas.iter().enumerate() {
                let w = th.powi(j as i32);
                let (a, b) = if i == i0 { (-t, 0.0) } else { (0.0, mf + t) };
                lo += f64::min(a * w, b * w);
                hi += f64::max(a * w, b * w);
            }
            boxes.push(((lo - 1.0).floor() as i64, (hi + 1.0).ceil() as i64));
        }
        boxes
    }

    /// Upper bound for the number of elements returned by `enumerate_f_minus(m, t)`.
    pub fn f_minus_count_bound(&self, m: i64, t: f64) -> f64 {
        if self.n == 1 {
            return 1.0;
        }
        if (m as f64) + t <= 0.0 {
            return 0.0;
        }
        (0..self.n)
            .map(|i0| {
                self.f_minus_box(m, t, i0).iter().map(|&(lo, hi)| (hi - lo + 1).max(0) as f64).product::<f64>()
            })
            .sum()
    }
}

fn fp_lift(g: &FpPoly, n: usize) -> Vec<BigRational> {
    let mut c: Vec<BigRational> = g.c.iter().map(|&x| rat(x as i64)).collect();
    c.resize(n.max(c.len()), BigRational::zero());
    // deg g ≤ n; a degree-n factor is f itself, which is 0 in F
    if c.len() > n {
        return vec![BigRational::zero(); n];
    }
    c
}

/// All integer points of a box given by inclusive ranges.
fn box_points(ranges: &[(i64, i64)]) -> Vec<Vec<BigInt>> {
    let mut pts: Vec<Vec<BigInt>> = vec![Vec::new()];
    for &(lo, hi) in ranges {
        let mut next = Vec::with_capacity(pts.len() * (hi - lo + 1).max(0) as usize);
        for p in &pts {
            for x in lo..=hi {
                let mut q = p.clone();
                q.push(BigInt::from(x));
                next.push(q);
            }
        }
        pts = next;
    }
    pts
}

/// Coordinates of `θ^k` for `k < count`, using `θ^n = -Σ a_i θ^i`.
fn reduced_powers(f: &[i64], count: usize) -> Vec<Vec<BigInt>> {
    let n = f.len() - 1;
    let mut out = Vec::with_capacity(count);
    let mut cur = vec![BigInt::zero(); n];
    cur[0] = BigInt::one();
    for _ in 0..count {
        out.push(cur.clone());
        // multiply by θ
        let top = cur[n - 1].clone();
        let mut next = vec![BigInt::zero(); n];
        for i in (1..n).rev() {
            next[i] = cur[i - 1].clone();
        }
        for i in 0..n {
            next[i] -= &top * f[i];
        }
        cur = next;
    }
    out
}

/// Power sums `Σ θ_i^k` via Newton's identities.
fn newton_power_sums(f: &[i64], count: usize) -> Vec<BigInt> {
    let n = f.len() - 1;
    // f = x^n + a_{n-1} x^{n-1} + ... + a_0; e-coefficients c_i = a_{n-i}
    let c = |i: usize| BigInt::from(f[n - i]);
    let mut s = Vec::with_capacity(count);
    s.push(BigInt::from(n as i64));
    for k in 1..count {
        let mut v = BigInt::zero();
        for i in 1..=k.min(n) {
            if i == k {
                v -= BigInt::from(k as i64) * c(i);
            } else {
                v -= c(i) * &s[k - i];
            }
        }
        s.push(v);
    }
    s
}

/// Dedekind's criterion: `Z[θ]` is maximal at `p`.
fn dedekind_maximal(f: &[i64], p: u64) -> bool {
    let fp = FpPoly::from_i64(p, f);
    let fac = factor(&fp, 0x5eed);
    let mut g = FpPoly::one(p);
    let mut h = FpPoly::one(p);
    for (q, e) in &fac {
        g = g.mul(q);
        for _ in 1..*e {
            h = h.mul(q);
        }
    }
    // F = (lift(g)·lift(h) - f)/p over Z, with lifts in [0, p)
    let lg = QPoly::from_i64(&g.c.iter().map(|&x| x as i64).collect::<Vec<_>>());
    let lh = QPoly::from_i64(&h.c.iter().map(|&x| x as i64).collect::<Vec<_>>());
    let diff = lg.mul(&lh).sub(&QPoly::from_i64(f));
    let coeffs: Vec<i64> = diff
        .coeffs()
        .iter()
        .map(|c| (c.to_integer() / BigInt::from(p)).mod_floor(&BigInt::from(p)).to_i64().unwrap())
        .collect();
    let big_f = FpPoly::from_i64(p, &coeffs);
    big_f.gcd(&g).gcd(&h).degree() == 0
}

/// A fractional ideal `(1/den)·(Z-span of rows)`, rows in Hermite normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FracIdealF {
    pub den: BigInt,
    pub hnf: IntMatrix,
}

impl FracIdealF {
    fn normalized(den: BigInt, hnf: IntMatrix) -> Self {
        let mut g = den.clone();
        for r in &hnf {
            for x in r {
                g = g.gcd(x);
            }
        }
        let g = g.abs();
        if g.is_one() {
            return Self { den, hnf };
        }
        Self {
            den: den / &g,
            hnf: hnf.into_iter().map(|r| r.into_iter().map(|x| x / &g).collect()).collect(),
        }
    }

    /// The Z-module generated by `O_F`-multiples of the given elements.
    pub fn from_generators(field: &TotallyRealField, gens: &[FElem]) -> Self {
        let n = field.degree();
        let mut vecs: Vec<FElem> = Vec::new();
        for g in gens {
            for j in 0..n {
                vecs.push(field.mul(g, &field.theta_pow(j)));
            }
        }
        Self::from_z_span(n, &vecs)
    }

    fn from_z_span(n: usize, vecs: &[FElem]) -> Self {
        let den = vecs.iter().fold(BigInt::one(), |acc, v| acc.lcm(&v.denominator()));
        let rows: IntMatrix = vecs
            .iter()
            .map(|v| v.coords.iter().map(|c| (c * big_rat(&den)).to_integer()).collect())
            .collect();
        Self::normalized(den, linalg::hnf(&rows, n))
    }

    pub fn unit(field: &TotallyRealField) -> Self {
        Self::principal(field, &field.one())
    }

    pub fn principal(field: &TotallyRealField, a: &FElem) -> Self {
        Self::from_generators(field, &[a.clone()])
    }

    /// Basis elements as field elements.
    pub fn basis(&self) -> Vec<FElem> {
        let d = big_rat(&self.den);
        self.hnf
            .iter()
            .map(|r| FElem { coords: r.iter().map(|x| big_rat(x) / &d).collect() })
            .collect()
    }

    pub fn is_full_rank(&self, n: usize) -> bool {
        self.hnf.len() == n
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn norm(&self) -> BigRational {
        let n = self.hnf.len() as u32;
        let det = linalg::det_int(&self.hnf).abs();
        BigRational::new(det, self.den.pow(n))
    }

    pub fn contains(&self, x: &FElem) -> bool {
        let scaled = x.scale(&big_rat(&self.den));
        if !scaled.is_integral() {
            return false;
        }
        let v: Vec<BigInt> = scaled.coords.iter().map(|c| c.to_integer()).collect();
        linalg::solve_in_lattice(&self.hnf, &v).is_some()
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.basis().iter().all(|b| other.contains(b))
    }

    pub fn mul(&self, field: &TotallyRealField, other: &Self) -> Self {
        let a = self.basis();
        let b = other.basis();
        let prods: Vec<FElem> = a.iter().flat_map(|x| b.iter().map(move |y| (x, y))).map(|(x, y)| field.mul(x, y)).collect();
        Self::from_z_span(field.degree(), &prods)
    }

    pub fn pow(&self, field: &TotallyRealField, k: u32) -> Self {
        let mut acc = Self::unit(field);
        for _ in 0..k {
            acc = acc.mul(field, self);
        }
        acc
    }

    pub fn scale(&self, field: &TotallyRealField, a: &FElem) -> Self {
        let prods: Vec<FElem> = self.basis().iter().map(|b| field.mul(a, b)).collect();
        Self::from_z_span(field.degree(), &prods)
    }

    /// Trace dual `{x : Tr(x·self) ⊆ Z}`.
    pub fn trace_dual(&self, field: &TotallyRealField) -> Self {
        let b: RatMatrix = self.basis().into_iter().map(|e| e.coords).collect();
        let t = linalg::to_rat(&field.trace_matrix());
        let bt = linalg::mat_mul_rat(&b, &t);
        let inv = linalg::inverse_rat(&bt).expect("full-rank ideal");
        let rows: Vec<FElem> = linalg::transpose(&inv).into_iter().map(|c| FElem { coords: c }).collect();
        Self::from_z_span(field.degree(), &rows)
    }

    /// Inverse ideal, via `I^{-1} = 𝔡_F · I^∨`.
    pub fn inverse(&self, field: &TotallyRealField) -> Self {
        self.trace_dual(field).mul(field, &field.different())
    }

    /// Valuation at `P`.
    pub fn ord(&self, field: &TotallyRealField, prime: &PrimeIdealF) -> i64 {
        let num = Self::normalized(BigInt::one(), self.hnf.clone());
        let den_ord = prime.e as i64 * valuation(&self.den, prime.p) as i64;
        let bound = valuation(&num.norm().to_integer(), prime.p) / prime.f_deg;
        let mut k = 0;
        let mut pk = prime.ideal.clone();
        while k < bound as i64 && num.is_subset_of(&pk) {
            k += 1;
            pk = pk.mul(field, &prime.ideal);
        }
        k - den_ord
    }
}

impl fmt::Display for FracIdealF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .hnf
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "(1/{})·<{}>", self.den, rows.join(", "))
    }
}

/// A prime of `F` above `p`, given by Dedekind's factor `g`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimeIdealF {
    pub p: u64,
    /// Monic factor of `f mod p`, coefficients lowest degree first.
    pub g: Vec<u64>,
    pub e: u32,
    pub f_deg: u32,
    pub ideal: FracIdealF,
}

impl PrimeIdealF {
    /// `N(P) = p^{f}`.
    pub fn norm(&self) -> u128 {
        (self.p as u128).pow(self.f_deg)
    }

    pub fn log_norm(&self) -> f64 {
        self.f_deg as f64 * (self.p as f64).ln()
    }
}

/// How a prime of `F` behaves in `K = k ⊗ F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum SplitType {
    Split,
    Inert,
    Ramified,
}

/// The pair `(k, F)` defining the CM algebra `K = k ⊗ F`.
#[derive(Debug, Clone)]
pub struct CmPair {
    pub k: ImagQuadField,
    pub f: TotallyRealField,
}

impl CmPair {
    pub fn new(k: ImagQuadField, f: TotallyRealField) -> Result<Self> {
        if !f.disc().gcd(&BigInt::from(k.d_k())).is_one() {
            return Err(Error::Incompatible(format!(
                "disc(F) = {} and d_k = {} are not coprime",
                f.disc(),
                k.d_k()
            )));
        }
        Ok(Self { k, f })
    }

    pub fn split_type(&self, prime: &PrimeIdealF) -> SplitType {
        let d = self.k.d_k();
        let p = prime.p;
        if d % p == 0 {
            return SplitType::Ramified;
        }
        if p == 2 {
            return if d % 8 == 7 || prime.f_deg % 2 == 0 { SplitType::Split } else { SplitType::Inert };
        }
        // Euler's criterion in F_{p^f} for the element -d ∈ F_p
        let a = (p - d % p) % p;
        let q = (p as u128).pow(prime.f_deg);
        let e = (((q - 1) / 2) % (p as u128 - 1)) as u64;
        if powmod(a, e, p) == 1 {
            SplitType::Split
        } else {
            SplitType::Inert
        }
    }

    /// Primes of `F` above the rational primes dividing `d_k`.
    pub fn primes_above_dk(&self) -> Vec<PrimeIdealF> {
        factor_integer(&BigInt::from(self.k.d_k()))
            .into_iter()
            .flat_map(|(p, _)| self.f.factor_prime(p))
            .collect()
    }

    /// Prime factorization of an integral ideal: `(P, ord_P)` with positive exponents.
    pub fn factor_ideal(&self, a: &FracIdealF) -> Vec<(PrimeIdealF, i64)> {
        let mut out = Vec::new();
        let norm = a.norm().to_integer();
        for (p, _) in factor_integer(&norm) {
            for prime in self.f.factor_prime(p) {
                let k = a.ord(&self.f, &prime);
                if k != 0 {
                    out.push((prime, k));
                }
            }
        }
        out
    }

    /// Local factor of `ρ` at a prime with exponent `k ≥ 0`.
    pub fn rho_local(split: SplitType, k: i64) -> u64 {
        match split {
            SplitType::Split => (k + 1) as u64,
            SplitType::Inert => u64::from(k % 2 == 0),
            SplitType::Ramified => 1,
        }
    }

    /// `ρ(𝔞) = #{𝔅 ⊆ O_K : 𝔅𝔅̄ = 𝔞O_K}`; zero when `𝔞` is not integral.
    pub fn rho(&self, a: &FracIdealF) -> u64 {
        if !a.is_integral() || !a.is_full_rank(self.f.degree()) {
            return 0;
        }
        self.factor_ideal(a)
            .iter()
            .map(|(prime, k)| Self::rho_local(self.split_type(prime), *k))
            .product()
    }

    /// Number of places of `F` ramified in `K`, archimedean ones included.
    pub fn ramified_place_count(&self) -> u32 {
        self.f.degree() as u32 + self.primes_above_dk().len() as u32
    }

    /// Norm of the relative discriminant, `d_k^n`.
    pub fn norm_rel_disc(&self) -> u128 {
        (self.k.d_k() as u128).pow(self.f.degree() as u32)
    }
}
