//! The imaginary quadratic field `k = Q(sqrt(-d_k))` with `d_k` odd.
//!
//! Elements are stored exactly in the basis `1, ω` where `ω = (1 + sqrt(-d_k))/2`,
//! so `ω² = ω - (1 + d_k)/4`. The fixed complex embedding sends `ω` to the root with
//! positive imaginary part, and `δ = 2ω - 1` to `i·sqrt(d_k)`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Validated descriptor of `k = Q(sqrt(-d_k))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ImagQuadField {
    d_k: u64,
}

/// An element `a + bω` of `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KElem {
    pub a: BigRational,
    pub b: BigRational,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn is_squarefree(mut n: u64) -> bool {
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

impl ImagQuadField {
    pub fn new(d_k: i64) -> Result<Self> {
        if d_k <= 0 {
            return Err(Error::InvalidDiscriminant { d_k, reason: "d_k must be positive" });
        }
        if d_k % 2 == 0 {
            return Err(Error::InvalidDiscriminant {
                d_k,
                reason: "d_k must be odd (fields of even discriminant are excluded)",
            });
        }
        if d_k % 4 != 3 {
            return Err(Error::InvalidDiscriminant {
                d_k,
                reason: "d_k must be congruent to 3 mod 4",
            });
        }
        if !is_squarefree(d_k as u64) {
            return Err(Error::InvalidDiscriminant { d_k, reason: "d_k must be squarefree" });
        }
        Ok(Self { d_k: d_k as u64 })
    }

    pub fn d_k(&self) -> u64 {
        self.d_k
    }

    /// `Tr(ω)`, always 1.
    pub fn omega_trace(&self) -> i64 {
        1
    }

    /// `N(ω) = (1 + d_k)/4`.
    pub fn omega_norm(&self) -> i64 {
        (1 + self.d_k as i64) / 4
    }

    pub fn omega(&self) -> KElem {
        KElem::from_ints(0, 1)
    }

    /// `δ = 2ω - 1`, with `δ² = -d_k`.
    pub fn delta(&self) -> KElem {
        KElem::from_ints(-1, 2)
    }

    /// Class number, by counting reduced primitive forms `ax² + bxy + cy²` of
    /// discriminant `-d_k` (`|b| ≤ a ≤ c`, `b ≥ 0` on the boundary cases).
    pub fn class_number(&self) -> u64 {
        let d = self.d_k as i64;
        let mut h = 0;
        let mut a = 1i64;
        while 3 * a * a <= d {
            for b in -a..=a {
                let num = b * b + d;
                if num % (4 * a) != 0 {
                    continue;
                }
                let c = num / (4 * a);
                if c < a {
                    continue;
                }
                if b < 0 && (b == -a || a == c) {
                    continue;
                }
                if a.gcd(&b).gcd(&c) != 1 {
                    continue;
                }
                h += 1;
            }
            a += 1;
        }
        h
    }

    /// Number of roots of unity in `k`.
    pub fn unit_count(&self) -> u32 {
        if self.d_k == 3 {
            6
        } else {
            2
        }
    }

    /// All units of `O_k`, in a fixed order starting with 1.
    pub fn units(&self) -> Vec<KElem> {
        if self.d_k == 3 {
            // ω is a primitive 6th root of unity when d_k = 3
            vec![
                KElem::from_ints(1, 0),
                KElem::from_ints(0, 1),
                KElem::from_ints(-1, 1),
                KElem::from_ints(-1, 0),
                KElem::from_ints(0, -1),
                KElem::from_ints(1, -1),
            ]
        } else {
            vec![KElem::from_ints(1, 0), KElem::from_ints(-1, 0)]
        }
    }

    pub fn mul(&self, x: &KElem, y: &KElem) -> KElem {
        let n = rat(self.omega_norm());
        let ac = &x.a * &y.a;
        let bd = &x.b * &y.b;
        KElem {
            a: &ac - &n * &bd,
            b: &x.a * &y.b + &x.b * &y.a + bd,
        }
    }

    pub fn norm(&self, x: &KElem) -> BigRational {
        let n = rat(self.omega_norm());
        &x.a * &x.a + &x.a * &x.b + n * &x.b * &x.b
    }

    pub fn inv(&self, x: &KElem) -> Result<KElem> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let nm = self.norm(x);
        let c = x.conj();
        Ok(KElem { a: c.a / &nm, b: c.b / nm })
    }

    pub fn div(&self, x: &KElem, y: &KElem) -> Result<KElem> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    /// Exact division that must land in `O_k`.
    pub fn div_exact(&self, x: &KElem, y: &KElem) -> Result<KElem> {
        let q = self.div(x, y)?;
        if q.is_integral() {
            Ok(q)
        } else {
            Err(Error::NotIntegral)
        }
    }

    pub fn is_unit(&self, x: &KElem) -> bool {
        x.is_integral() && self.norm(x).is_one()
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.d_k, 3 | 7 | 11)
    }

    /// Euclidean division in `O_k`: returns `(q, r)` with `x = qy + r` and
    /// `N(r) < N(y)`. Only available for the norm-Euclidean fields.
    pub fn div_rem(&self, x: &KElem, y: &KElem) -> Result<(KElem, KElem)> {
        if !self.is_euclidean() {
            return Err(Error::UnsupportedEuclidean(self.d_k));
        }
        let exact = self.div(x, y)?;
        let a0 = exact.a.floor().to_integer();
        let b0 = exact.b.floor().to_integer();
        let ny = self.norm(y);
        let mut best: Option<(BigRational, KElem, KElem)> = None;
        for da in -1..=2 {
            for db in -1..=2 {
                let q = KElem {
                    a: BigRational::from_integer(&a0 + BigInt::from(da)),
                    b: BigRational::from_integer(&b0 + BigInt::from(db)),
                };
                let r = x - &self.mul(&q, y);
                let nr = self.norm(&r);
                if best.as_ref().map_or(true, |(bn, _, _)| nr < *bn) {
                    best = Some((nr, q, r));
                }
            }
        }
        let (nr, q, r) = best.expect("candidate set is nonempty");
        debug_assert!(nr < ny);
        Ok((q, r))
    }

    /// Complex image under the fixed embedding.
    pub fn embed(&self, x: &KElem) -> Complex64 {
        let w = self.omega_complex();
        let a = x.a.to_f64().unwrap_or(f64::NAN);
        let b = x.b.to_f64().unwrap_or(f64::NAN);
        Complex64::new(a, 0.0) + w * b
    }

    pub fn omega_complex(&self) -> Complex64 {
        Complex64::new(0.5, (self.d_k as f64).sqrt() / 2.0)
    }

    pub fn delta_complex(&self) -> Complex64 {
        Complex64::new(0.0, (self.d_k as f64).sqrt())
    }

    /// Covolume of `O_k` in `C`.
    pub fn covolume(&self) -> f64 {
        (self.d_k as f64).sqrt() / 2.0
    }
}

impl KElem {
    pub fn zero() -> Self {
        Self { a: BigRational::zero(), b: BigRational::zero() }
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        Self { a: rat(a), b: rat(b) }
    }

    pub fn from_rational(a: BigRational) -> Self {
        Self { a, b: BigRational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    /// `a + b(1 - ω) = (a + b) - bω`.
    pub fn conj(&self) -> KElem {
        KElem { a: &self.a + &self.b, b: -&self.b }
    }

    pub fn trace(&self) -> BigRational {
        &self.a * rat(2) + &self.b
    }

    /// True when the element is a rational number.
    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn scale(&self, s: &BigRational) -> KElem {
        KElem { a: &self.a * s, b: &self.b * s }
    }

    /// Integer coordinates, if integral and small enough.
    pub fn to_i64_pair(&self) -> Option<(i64, i64)> {
        if !self.is_integral() {
            return None;
        }
        Some((self.a.to_integer().to_i64()?, self.b.to_integer().to_i64()?))
    }

    /// Height used by bounded searches: the larger absolute coordinate.
    pub fn height(&self) -> BigRational {
        let a = self.a.abs();
        let b = self.b.abs();
        if a > b {
            a
        } else {
            b
        }
    }
}

impl Add for &KElem {
    type Output = KElem;
    fn add(self, rhs: &KElem) -> KElem {
        KElem { a: &self.a + &rhs.a, b: &self.b + &rhs.b }
    }
}

impl Sub for &KElem {
    type Output = KElem;
    fn sub(self, rhs: &KElem) -> KElem {
        KElem { a: &self.a - &rhs.a, b: &self.b - &rhs.b }
    }
}

impl Neg for &KElem {
    type Output = KElem;
    fn neg(self) -> KElem {
        KElem { a: -&self.a, b: -&self.b }
    }
}

impl Add for KElem {
    type Output = KElem;
    fn add(self, rhs: KElem) -> KElem {
        &self + &rhs
    }
}

impl Sub for KElem {
    type Output = KElem;
    fn sub(self, rhs: KElem) -> KElem {
        &self - &rhs
    }
}

impl Neg for KElem {
    type Output = KElem;
    fn neg(self) -> KElem {
        -&self
    }
}

impl fmt::Display for KElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.a.is_zero() {
            return write!(f, "{}w", self.b);
        }
        if self.b.is_negative() {
            write!(f, "{}-{}w", self.a, -&self.b)
        } else {
            write!(f, "{}+{}w", self.a, self.b)
        }
    }
}
