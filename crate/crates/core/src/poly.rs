//! Dense univariate polynomials over `Q`, Sturm sequences, and isolated real roots.
//!
//! Real roots are represented by isolating intervals with dyadic endpoints. Signs of
//! polynomial expressions at a root are decided exactly: a floating-point evaluation with a
//! rigorous error bound is tried first, and interval Horner evaluation on a refined
//! isolating interval is used when the fast path is inconclusive.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Polynomial with rational coefficients, lowest degree first. The zero polynomial has
/// an empty coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat(i as i64))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let q = &rem[i + dd] / &lead;
            if !q.is_zero() {
                for (j, c) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] -= &q * c;
                }
            }
            quot[i] = q;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let l = a.leading();
        a.scale(&(BigRational::one() / l))
    }

    /// Composition `self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(other).add(&Self::new(vec![c.clone()]));
        }
        acc
    }

    /// Sign of the polynomial at a rational point.
    pub fn sign_at(&self, x: &BigRational) -> Ordering {
        sign(&self.eval(x))
    }

    /// Cauchy bound: every complex root has absolute value below it.
    pub fn root_bound(&self) -> BigRational {
        let lead = self.leading().abs();
        let mut m = BigRational::zero();
        for c in &self.coeffs[..self.coeffs.len().saturating_sub(1)] {
            let r = c.abs() / &lead;
            if r > m {
                m = r;
            }
        }
        m + BigRational::one()
    }
}

fn sign(x: &BigRational) -> Ordering {
    x.cmp(&BigRational::zero())
}

/// Sturm sequence `f, f', -rem(...)`, used for counting distinct real roots.
#[derive(Debug, Clone)]
pub struct SturmSequence {
    seq: Vec<QPoly>,
}

impl SturmSequence {
    pub fn new(f: &QPoly) -> Self {
        let mut seq = vec![f.clone(), f.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&rat(-1)));
        }
        Self { seq }
    }

    fn variations_by<F: Fn(&QPoly) -> Ordering>(&self, sgn: F) -> usize {
        let mut count = 0;
        let mut last = Ordering::Equal;
        for p in &self.seq {
            let s = sgn(p);
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    pub fn variations_at(&self, x: &BigRational) -> usize {
        self.variations_by(|p| p.sign_at(x))
    }

    fn variations_at_infinity(&self, positive: bool) -> usize {
        self.variations_by(|p| {
            let s = sign(&p.leading());
            let odd = p.degree().unwrap_or(0) % 2 == 1;
            if positive || !odd {
                s
            } else {
                s.reverse()
            }
        })
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_in(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations_at(a) - self.variations_at(b)
    }

    /// Number of distinct real roots.
    pub fn count_real(&self) -> usize {
        self.variations_at_infinity(false) - self.variations_at_infinity(true)
    }
}

/// A real root of a squarefree polynomial given by an isolating interval `[lo, hi]`.
/// Either `lo == hi` (the root is that rational) or `f(lo)` and `f(hi)` are nonzero with
/// opposite signs and the root is the unique one in `(lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealRoot {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RealRoot {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// One bisection step, returning a new interval of half the width.
    pub fn bisect(&self, f: &QPoly) -> RealRoot {
        if self.is_exact() {
            return self.clone();
        }
        let mid = (&self.lo + &self.hi) / rat(2);
        let sm = f.sign_at(&mid);
        if sm == Ordering::Equal {
            return RealRoot { lo: mid.clone(), hi: mid };
        }
        if sm == f.sign_at(&self.lo) {
            RealRoot { lo: mid, hi: self.hi.clone() }
        } else {
            RealRoot { lo: self.lo.clone(), hi: mid }
        }
    }

    /// Refine until the width is at most `2^{-bits}`.
    pub fn refine_to(&self, f: &QPoly, bits: u32) -> RealRoot {
        let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
        let mut r = self.clone();
        while r.width() > target {
            r = r.bisect(f);
        }
        r
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / rat(2)
    }
}

/// Isolate all real roots of a squarefree polynomial, in increasing order.
pub fn isolate_real_roots(f: &QPoly) -> Vec<RealRoot> {
    let sturm = SturmSequence::new(f);
    let b = f.root_bound();
    // round the bound up to a power of two so that all endpoints are dyadic
    let mut pow = BigRational::one();
    while pow < b {
        pow *= rat(2);
    }
    let mut out = Vec::new();
    let mut stack = vec![(-pow.clone(), pow)];
    while let Some((a, c)) = stack.pop() {
        let k = sturm.count_in(&a, &c);
        if k == 0 {
            continue;
        }
        if k == 1 && f.sign_at(&a) != Ordering::Equal {
            if f.sign_at(&c) == Ordering::Equal {
                out.push(RealRoot { lo: c.clone(), hi: c });
            } else {
                out.push(RealRoot { lo: a, hi: c });
            }
            continue;
        }
        let mid = (&a + &c) / rat(2);
        stack.push((mid.clone(), c));
        stack.push((a, mid));
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    out
}

/// Interval `[lo, hi]` with rational endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    fn point(x: BigRational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    fn add_scalar(&self, c: &BigRational) -> Self {
        Self { lo: &self.lo + c, hi: &self.hi + c }
    }

    fn mul(&self, other: &Self) -> Self {
        let p = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = p.iter().min().unwrap().clone();
        let hi = p.iter().max().unwrap().clone();
        Self { lo, hi }
    }

    /// Strict sign if the interval excludes zero.
    pub fn strict_sign(&self) -> Option<Ordering> {
        if self.lo > BigRational::zero() {
            Some(Ordering::Greater)
        } else if self.hi < BigRational::zero() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }
}

/// Interval enclosure of `g` over `[root.lo, root.hi]`.
pub fn eval_interval(g: &QPoly, root: &RealRoot) -> RatInterval {
    let x = RatInterval { lo: root.lo.clone(), hi: root.hi.clone() };
    let mut acc = RatInterval::point(BigRational::zero());
    for c in g.coeffs().iter().rev() {
        acc = acc.mul(&x).add_scalar(c);
    }
    acc
}

/// Exact sign of `g(θ)` where `θ` is the root of `f` isolated by `root`.
/// Returns `Equal` only when `g(θ) = 0`, which is detected through `gcd(f, g)`.
pub fn sign_at_root(f: &QPoly, g: &QPoly, root: &RealRoot) -> Ordering {
    if root.is_exact() {
        return g.sign_at(&root.lo);
    }
    if g.is_zero() {
        return Ordering::Equal;
    }
    let mut r = root.clone();
    for _ in 0..64 {
        if let Some(s) = eval_interval(g, &r).strict_sign() {
            return s;
        }
        for _ in 0..8 {
            r = r.bisect(f);
        }
        if r.is_exact() {
            return g.sign_at(&r.lo);
        }
    }
    // g may vanish at θ: that happens iff θ is a root of gcd(f, g)
    let h = f.gcd(g);
    if h.degree().unwrap_or(0) > 0 && h.sign_at(&r.lo) != h.sign_at(&r.hi) {
        return Ordering::Equal;
    }
    loop {
        r = r.bisect(f);
        if let Some(s) = eval_interval(g, &r).strict_sign() {
            return s;
        }
    }
}

/// Floating-point view of an isolated root, with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootApprox {
    pub value: f64,
    pub error: f64,
}

impl RootApprox {
    pub fn from_root(f: &QPoly, root: &RealRoot) -> Self {
        let r = root.refine_to(f, 90);
        let value = r.midpoint().to_f64().unwrap_or(f64::NAN);
        let half = (r.width() / rat(2)).to_f64().unwrap_or(f64::INFINITY);
        Self { value, error: half + value.abs() * f64::EPSILON }
    }

    /// Evaluate `Σ c_k θ^k` in floating point and return `(value, error bound)`.
    pub fn eval_with_bound(&self, coeffs: &[f64]) -> (f64, f64) {
        let x = self.value;
        let ax = x.abs() + self.error;
        let mut acc = 0.0;
        let mut mag = 0.0;
        let mut dmag = 0.0;
        for c in coeffs.iter().rev() {
            dmag = dmag * ax + mag;
            mag = mag * ax + c.abs();
            acc = acc * x + c;
        }
        let n = coeffs.len() as f64;
        let err = dmag * self.error + 4.0 * (n + 2.0) * f64::EPSILON * mag;
        (acc, 2.0 * err + f64::MIN_POSITIVE)
    }
}
