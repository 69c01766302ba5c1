//! Independent reference implementations used by the integration tests.
//!
//! Nothing here calls into the algorithms under test except to obtain inputs (field
//! polynomials, prime ideals of `F` as generator lists).

#![allow(dead_code)]

pub mod kideal;
pub mod green;
pub mod lattice;

use num_complex::Complex64;

/// Adaptive Gauss–Kronrod (7, 15) quadrature of `f` over `[a, b]`.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel: f64) -> f64 {
    const XGK: [f64; 8] = [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ];
    const WGK: [f64; 8] = [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ];
    const WG: [f64; 4] = [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ];
    fn rule<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let fc = f(c);
        let mut k = WGK[7] * fc;
        let mut g = WG[3] * fc;
        for i in 0..7 {
            let x = h * XGK[i];
            let s = f(c - x) + f(c + x);
            k += WGK[i] * s;
            if i % 2 == 1 {
                g += WG[i / 2] * s;
            }
        }
        (k * h, (k - g).abs() * h)
    }
    let total = rule(f, a, b).0.abs();
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, e) = rule(f, a, b);
        // stop at the requested accuracy or once the estimate is at the rounding level
        if e <= tol || e <= 64.0 * f64::EPSILON * v.abs() || depth > 40 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, tol / 2.0, depth + 1) + rec(f, m, b, tol / 2.0, depth + 1)
    }
    rec(f, a, b, (rel * total).max(f64::MIN_POSITIVE), 0)
}

/// `∫_1^∞ e^{-xt} dt / t`, computed as `∫_0^S exp(-x e^s) ds` with `x e^S ≥ 800`.
pub fn beta1_quadrature(x: f64) -> f64 {
    let s_max = (800.0 / x).ln().max(1.0);
    let f = |s: f64| (-x * s.exp()).exp();
    // split at the knee s ≈ ln(1/x) where the integrand turns over
    let knee = (1.0 / x).ln().clamp(0.0, s_max);
    let mut v = 0.0;
    if knee > 0.0 {
        v += gauss_kronrod(&f, 0.0, knee, 1e-15);
    }
    v + gauss_kronrod(&f, knee, s_max, 1e-15)
}

/// Class number of `Q(sqrt(-d))` by counting reduced forms `(a, b, c)` with `b² - 4ac = -d`.
pub fn class_number_reduced_forms(d: i64) -> u64 {
    let mut h = 0;
    let mut a = 1;
    while 3 * a * a <= d {
        for b in -a + 1..=a {
            let num = b * b + d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if gcd(gcd(a, b.abs()), c) == 1 {
                h += 1;
            }
        }
        a += 1;
    }
    h
}

pub fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Number of `a + bω` with norm 1, by a box scan.
pub fn unit_count_box(d: i64) -> usize {
    let n = (1 + d) / 4;
    let mut c = 0;
    for a in -3..=3i64 {
        for b in -3..=3i64 {
            if a * a + a * b + n * b * b == 1 {
                c += 1;
            }
        }
    }
    c
}

/// `(Re, Im)`-free description of a Hermitian matrix over `O_k`: entry `(i, j)` is
/// `x + yω` with `(x, y)` integers.
pub type IntHermitian = Vec<Vec<(i64, i64)>>;

/// Integral real quadratic form `Q(v) = 2·(v A v*)` on `Z^{2r}`, with
/// `v_i = x_{2i} + x_{2i+1} ω`.
pub fn doubled_real_form(d: i64, a: &IntHermitian) -> Vec<Vec<i64>> {
    let r = a.len();
    let n = (1 + d) / 4;
    // multiplication table: (p + qω)(s + tω) with ω² = ω - n
    let mul = |x: (i64, i64), y: (i64, i64)| -> (i64, i64) {
        (x.0 * y.0 - n * x.1 * y.1, x.0 * y.1 + x.1 * y.0 + x.1 * y.1)
    };
    let conj = |x: (i64, i64)| (x.0 + x.1, -x.1);
    let tr = |x: (i64, i64)| 2 * x.0 + x.1;
    let basis = [(1, 0), (0, 1)];
    let mut q = vec![vec![0i64; 2 * r]; 2 * r];
    for i in 0..r {
        for s in 0..2 {
            for j in 0..r {
                for t in 0..2 {
                    // Re(ω^s A_ij conj(ω^t)) · 2 = Tr(...)
                    q[2 * i + s][2 * j + t] = tr(mul(mul(basis[s], a[i][j]), conj(basis[t])));
                }
            }
        }
    }
    q
}

/// Histogram of `v A v* = m` for `m ≤ m_max` by scanning a box that provably contains every
/// vector of norm at most `m_max`.
pub fn count_by_box(d: i64, a: &IntHermitian, m_max: i64) -> Vec<u64> {
    let q = doubled_real_form(d, a);
    let dim = q.len();
    let qf: Vec<Vec<f64>> = q.iter().map(|r| r.iter().map(|&x| x as f64 / 2.0).collect()).collect();
    let inv = invert(&qf);
    let bounds: Vec<i64> = (0..dim).map(|i| ((m_max as f64 * inv[i][i]).sqrt() + 1e-9).floor() as i64).collect();
    let mut hist = vec![0u64; m_max as usize + 1];
    let mut x: Vec<i64> = bounds.iter().map(|b| -b).collect();
    if dim == 0 {
        hist[0] = 1;
        return hist;
    }
    loop {
        let mut v = 0i64;
        for i in 0..dim {
            let mut row = 0;
            for j in 0..dim {
                row += q[i][j] * x[j];
            }
            v += row * x[i];
        }
        // v = 2·norm
        if v % 2 == 0 && v / 2 <= m_max {
            hist[(v / 2) as usize] += 1;
        }
        let mut i = 0;
        loop {
            if i == dim {
                return hist;
            }
            if x[i] < bounds[i] {
                x[i] += 1;
                break;
            }
            x[i] = -bounds[i];
            i += 1;
        }
    }
}

fn invert(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap()).unwrap();
        m.swap(c, p);
        let piv = m[c][c];
        for x in m[c].iter_mut() {
            *x /= piv;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                let row = m[c].clone();
                for (x, y) in m[r].iter_mut().zip(row) {
                    *x -= f * y;
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Embedding of `x + yω` into `C`.
pub fn embed(d: i64, x: (i64, i64)) -> Complex64 {
    Complex64::new(x.0 as f64 + x.1 as f64 / 2.0, x.1 as f64 * (d as f64).sqrt() / 2.0)
}

/// Small deterministic generator (SplitMix64) so oracles do not share the library's RNG.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as i64
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Random positive definite integral Hermitian matrix `M M* + I` of the given rank.
pub fn random_definite(d: i64, rank: usize, rng: &mut SplitMix) -> IntHermitian {
    let n = (1 + d) / 4;
    let mul = |x: (i64, i64), y: (i64, i64)| (x.0 * y.0 - n * x.1 * y.1, x.0 * y.1 + x.1 * y.0 + x.1 * y.1);
    let conj = |x: (i64, i64)| (x.0 + x.1, -x.1);
    let m: Vec<Vec<(i64, i64)>> =
        (0..rank).map(|_| (0..rank).map(|_| (rng.range(-1, 1), rng.range(-1, 1))).collect()).collect();
    let mut a = vec![vec![(0, 0); rank]; rank];
    for i in 0..rank {
        for j in 0..rank {
            let mut s = if i == j { (1, 0) } else { (0, 0) };
            for l in 0..rank {
                let t = mul(m[i][l], conj(m[j][l]));
                s = (s.0 + t.0, s.1 + t.1);
            }
            a[i][j] = s;
        }
    }
    a
}

/// Primes up to `n` by sieve.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    let mut sieve = vec![true; n as usize + 1];
    let mut out = Vec::new();
    for i in 2..=n as usize {
        if sieve[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n as usize {
                sieve[j] = false;
                j += i;
            }
        }
    }
    out
}

/// Outcome of comparing the library's `ρ` against the lattice brute force.
#[derive(Debug, Default)]
pub struct RhoComparison {
    pub ideals: usize,
    /// How many ideals had oracle value 0, 1, 2 and at least 3.
    pub value_histogram: [usize; 4],
    pub mismatches: Vec<String>,
}

/// Compare `ρ(𝔞)` for every integral ideal `𝔞` of `F` with `N(𝔞) ≤ bound`.
pub fn compare_rho(d: i64, f: &[i64], bound: u64) -> RhoComparison {
    use hermkr_core::{CmPair, FracIdealF, ImagQuadField, TotallyRealField};
    use num_traits::ToPrimitive;

    let field = TotallyRealField::new(f).unwrap();
    let pair = CmPair::new(ImagQuadField::new(d).unwrap(), field.clone()).unwrap();
    let ring = kideal::KRing::new(f, d);

    struct Local {
        norm: u64,
        ideal: FracIdealF,
        rho: Vec<u64>, // rho[k] for P^k, k ≥ 1 (index 0 unused)
    }
    let mut locals: Vec<Local> = Vec::new();
    for p in primes_up_to(bound) {
        for prime in field.factor_prime(p) {
            let np = prime.norm();
            if np > bound as u128 {
                continue;
            }
            let gens: Vec<Vec<i128>> = prime
                .ideal
                .basis()
                .iter()
                .map(|b| b.coords.iter().map(|c| c.to_integer().to_i128().unwrap()).collect())
                .collect();
            let fp = kideal::FPrime { p: p as i128, f: prime.f_deg, gens };
            let qs = kideal::k_primes_above(&ring, &fp);
            let mut rho = vec![1u64];
            let mut k = 1u32;
            while (np as u64).pow(k) <= bound {
                rho.push(kideal::rho_prime_power(&ring, &fp, &qs, k));
                k += 1;
            }
            locals.push(Local { norm: np as u64, ideal: prime.ideal.clone(), rho });
        }
    }

    let mut out = RhoComparison::default();
    // depth-first over exponent vectors with nondecreasing prime index
    fn dfs(
        i: usize,
        norm: u64,
        ideal: &FracIdealF,
        oracle: u64,
        bound: u64,
        locals: &[Local],
        field: &TotallyRealField,
        pair: &CmPair,
        out: &mut RhoComparison,
    ) {
        out.ideals += 1;
        out.value_histogram[oracle.min(3) as usize] += 1;
        let lib = pair.rho(ideal);
        if lib != oracle {
            out.mismatches.push(format!("N = {norm}: {ideal} library {lib} oracle {oracle}"));
        }
        for j in i..locals.len() {
            let l = &locals[j];
            if norm * l.norm > bound {
                continue;
            }
            let mut nn = norm;
            let mut id = ideal.clone();
            let mut k = 1;
            while nn * l.norm <= bound {
                nn *= l.norm;
                id = id.mul(field, &l.ideal);
                dfs(j + 1, nn, &id, oracle * l.rho[k], bound, locals, field, pair, out);
                k += 1;
            }
        }
    }
    dfs(0, 1, &FracIdealF::unit(&field), 1, bound, &locals, &field, &pair, &mut out);
    out
}
