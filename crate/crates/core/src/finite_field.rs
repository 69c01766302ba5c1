//! Polynomials over a prime field `F_p` and their factorization.
//!
//! Factorization follows the classical pipeline: squarefree decomposition, distinct-degree
//! factorization, then Cantor–Zassenhaus equal-degree splitting (with the trace-map variant
//! in characteristic 2). Randomness comes from a seeded ChaCha generator, so results are
//! deterministic; the final list is sorted.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Polynomial over `F_p`, lowest degree first, with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpPoly {
    pub p: u64,
    pub c: Vec<u64>,
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    r
}

fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        Self { p, c }
    }

    /// Reduce an integer polynomial modulo `p`.
    pub fn from_i64(p: u64, coeffs: &[i64]) -> Self {
        Self::new(p, coeffs.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
    }

    pub fn zero(p: u64) -> Self {
        Self { p, c: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        Self::new(p, vec![1])
    }

    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn monic(&self) -> Self {
        match self.c.last() {
            None => self.clone(),
            Some(&l) => {
                let inv = invmod(l, self.p);
                Self::new(self.p, self.c.iter().map(|&x| mulmod(x, inv, self.p)).collect())
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let p = self.p;
        Self::new(
            p,
            (0..n)
                .map(|i| (self.c.get(i).copied().unwrap_or(0) + o.c.get(i).copied().unwrap_or(0)) % p)
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let p = self.p;
        Self::new(
            p,
            (0..n)
                .map(|i| (self.c.get(i).copied().unwrap_or(0) + p - o.c.get(i).copied().unwrap_or(0)) % p)
                .collect(),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p);
        }
        let p = self.p;
        let mut out = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                out[i + j] = (out[i + j] + mulmod(a, b, p)) % p;
            }
        }
        Self::new(p, out)
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let p = self.p;
        let dd = d.degree();
        let inv = invmod(*d.c.last().unwrap(), p);
        let mut rem = self.c.clone();
        if rem.len() <= dd {
            return (Self::zero(p), self.clone());
        }
        let mut q = vec![0u64; rem.len() - dd];
        for i in (0..q.len()).rev() {
            let coef = mulmod(rem[i + dd], inv, p);
            if coef != 0 {
                for (j, &c) in d.c.iter().enumerate() {
                    rem[i + j] = (rem[i + j] + p - mulmod(coef, c, p)) % p;
                }
            }
            q[i] = coef;
        }
        rem.truncate(dd);
        (Self::new(p, q), Self::new(p, rem))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        Self::new(
            p,
            self.c.iter().enumerate().skip(1).map(|(i, &c)| mulmod(c, i as u64 % p, p)).collect(),
        )
    }

    /// `self^e mod m`.
    pub fn powmod(&self, mut e: u128, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut r = Self::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        r
    }

    pub fn eval(&self, x: u64) -> u64 {
        let mut acc = 0;
        for &c in self.c.iter().rev() {
            acc = (mulmod(acc, x, self.p) + c) % self.p;
        }
        acc
    }

    /// `p`-th root of a polynomial whose derivative vanishes (so only exponents divisible by
    /// `p` occur). Over `F_p` the Frobenius is trivial on coefficients.
    fn pth_root(&self) -> Self {
        let p = self.p as usize;
        Self::new(self.p, self.c.iter().step_by(p).copied().collect())
    }
}

/// Squarefree decomposition: pairs `(g, e)` with `f = lc · Π g^e`, each `g` monic squarefree.
pub fn squarefree_decomposition(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let mut out = Vec::new();
    sqf_rec(&f.monic(), 1, &mut out);
    out
}

fn sqf_rec(f: &FpPoly, mult: u32, out: &mut Vec<(FpPoly, u32)>) {
    if f.degree() == 0 {
        return;
    }
    let p = f.p;
    let fp = f.derivative();
    if fp.is_zero() {
        sqf_rec(&f.pth_root(), mult * p as u32, out);
        return;
    }
    let mut c = f.gcd(&fp);
    let mut w = f.div_rem(&c).0;
    let mut i = 1;
    while w.degree() > 0 {
        let y = w.gcd(&c);
        let z = w.div_rem(&y).0;
        if z.degree() > 0 {
            out.push((z.monic(), i * mult));
        }
        i += 1;
        w = y;
        c = c.div_rem(&w).0;
    }
    if c.degree() > 0 {
        sqf_rec(&c.pth_root(), mult * p as u32, out);
    }
}

/// Distinct-degree factorization of a monic squarefree polynomial: pairs `(g, d)` where
/// `g` is the product of all irreducible factors of degree `d`.
pub fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.p;
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = FpPoly::x(p);
    let mut h = x.rem(&rest);
    let mut d = 0;
    while rest.degree() >= 2 * (d + 1) {
        d += 1;
        h = h.powmod(p as u128, &rest);
        let g = h.sub(&x).gcd(&rest);
        if g.degree() > 0 {
            rest = rest.div_rem(&g).0;
            h = h.rem(&rest);
            out.push((g, d));
        }
    }
    if rest.degree() > 0 {
        let deg = rest.degree();
        out.push((rest.monic(), deg));
    }
    out
}

/// Split a product of distinct irreducibles of common degree `d` into its factors.
pub fn equal_degree(f: &FpPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    if f.degree() == d {
        return vec![f.monic()];
    }
    let p = f.p;
    loop {
        let a = FpPoly::new(p, (0..f.degree()).map(|_| rng.gen_range(0..p)).collect());
        if a.degree() == 0 {
            continue;
        }
        let b = if p == 2 {
            // trace map a + a^2 + ... + a^(2^(d-1))
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                acc = acc.add(&t);
            }
            acc
        } else {
            let e = ((p as u128).pow(d as u32) - 1) / 2;
            a.powmod(e, f).sub(&FpPoly::one(p))
        };
        let g = b.gcd(f);
        if g.degree() > 0 && g.degree() < f.degree() {
            let h = f.div_rem(&g).0;
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&h.monic(), d, rng));
            return out;
        }
    }
}

/// Complete factorization into monic irreducibles with multiplicities, sorted by
/// `(degree, coefficients)`.
pub fn factor(f: &FpPoly, seed: u64) -> Vec<(FpPoly, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ f.p);
    let mut out = Vec::new();
    for (g, e) in squarefree_decomposition(f) {
        for (h, d) in distinct_degree(&g) {
            for irr in equal_degree(&h, d, &mut rng) {
                out.push((irr, e));
            }
        }
    }
    out.sort_by(|a, b| (a.0.degree(), &a.0.c).cmp(&(b.0.degree(), &b.0.c)));
    out
}
