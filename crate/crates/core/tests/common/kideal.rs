//! Ideals of `O_K = O_F[ω]` as explicit `Z`-lattices, for brute-force counts of
//! `#{B ⊆ O_K : B·B̄ = 𝔞 O_K}`.
//!
//! Elements of `O_K` are integer vectors of length `2n` in the basis
//! `θ^0, …, θ^{n-1}, θ^0 ω, …, θ^{n-1} ω`. Ideals are stored in Hermite normal form; every
//! ideal contains its index, so all reductions are done modulo a known multiple of it.

#![allow(dead_code)]

/// The order `Z[θ][ω]` with `f(θ) = 0` and `ω² = ω - n_ω`.
#[derive(Clone, Debug)]
pub struct KRing {
    /// Monic `f`, coefficients lowest degree first.
    pub f: Vec<i128>,
    pub n_omega: i128,
}

/// Upper-triangular integral basis, `rows[i][i] > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    pub rows: Vec<Vec<i128>>,
}

impl Lattice {
    pub fn index(&self) -> i128 {
        self.rows.iter().enumerate().map(|(i, r)| r[i]).product()
    }

    pub fn contains(&self, v: &[i128]) -> bool {
        let mut v = v.to_vec();
        for (i, r) in self.rows.iter().enumerate() {
            if v[i] % r[i] != 0 {
                return false;
            }
            let q = v[i] / r[i];
            for j in i..v.len() {
                v[j] -= q * r[j];
            }
        }
        v.iter().all(|&x| x == 0)
    }
}

fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = egcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Hermite normal form of the lattice spanned by `gens` together with `D·Z^dim`.
pub fn hnf_mod(gens: &[Vec<i128>], dim: usize, d: i128) -> Lattice {
    let mut rows: Vec<Vec<i128>> =
        gens.iter().map(|g| g.iter().map(|x| x.rem_euclid(d)).collect()).filter(|r: &Vec<i128>| r.iter().any(|&x| x != 0)).collect();
    let mut out: Vec<Vec<i128>> = Vec::with_capacity(dim);
    for c in 0..dim {
        // pivot row starts as D·e_c
        let mut piv = vec![0i128; dim];
        piv[c] = d;
        for r in rows.iter_mut() {
            if r[c] == 0 {
                continue;
            }
            let (g, x, y) = egcd(piv[c], r[c]);
            let (a, b) = (piv[c] / g, r[c] / g);
            let new_piv: Vec<i128> = (0..dim).map(|j| (x * piv[j] + y * r[j]).rem_euclid(d)).collect();
            let new_r: Vec<i128> = (0..dim).map(|j| (a * r[j] - b * piv[j]).rem_euclid(d)).collect();
            piv = new_piv;
            piv[c] = g;
            *r = new_r;
        }
        // D·e_c was absorbed into the pivot; (D/p)·piv - D·e_c keeps its tail in the lattice
        let p = piv[c];
        let extra: Vec<i128> = piv.iter().map(|&x| (x * (d / p)).rem_euclid(d)).collect();
        if extra.iter().any(|&x| x != 0) {
            rows.push(extra);
        }
        rows.retain(|r| r.iter().any(|&x| x != 0));
        out.push(piv);
    }
    // reduce above the diagonal, left to right, so the form is canonical
    for i in 0..dim {
        for k in 0..i {
            let q = out[k][i].div_euclid(out[i][i]);
            if q != 0 {
                let ri = out[i].clone();
                for j in i..dim {
                    out[k][j] -= q * ri[j];
                }
            }
        }
    }
    Lattice { rows: out }
}

impl KRing {
    pub fn new(f: &[i64], d_k: i64) -> Self {
        Self { f: f.iter().map(|&x| x as i128).collect(), n_omega: ((1 + d_k) / 4) as i128 }
    }

    pub fn n(&self) -> usize {
        self.f.len() - 1
    }

    pub fn dim(&self) -> usize {
        2 * self.n()
    }

    fn mul_f(&self, x: &[i128], y: &[i128]) -> Vec<i128> {
        let n = self.n();
        let mut prod = vec![0i128; 2 * n];
        for (i, a) in x.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        for k in (n..2 * n).rev() {
            let t = prod[k];
            if t != 0 {
                prod[k] = 0;
                for i in 0..n {
                    prod[k - n + i] -= t * self.f[i];
                }
            }
        }
        prod.truncate(n);
        prod
    }

    pub fn mul(&self, x: &[i128], y: &[i128]) -> Vec<i128> {
        let n = self.n();
        let (x0, x1) = x.split_at(n);
        let (y0, y1) = y.split_at(n);
        let a = self.mul_f(x0, y0);
        let b = self.mul_f(x1, y1);
        let c = self.mul_f(x0, y1);
        let e = self.mul_f(x1, y0);
        let mut out = vec![0i128; 2 * n];
        for i in 0..n {
            out[i] = a[i] - self.n_omega * b[i];
            out[n + i] = c[i] + e[i] + b[i];
        }
        out
    }

    /// `ω ↦ 1 - ω`.
    pub fn conj(&self, x: &[i128]) -> Vec<i128> {
        let n = self.n();
        let mut out = x.to_vec();
        for i in 0..n {
            out[i] = x[i] + x[n + i];
            out[n + i] = -x[n + i];
        }
        out
    }

    fn basis(&self) -> Vec<Vec<i128>> {
        (0..self.dim())
            .map(|i| {
                let mut e = vec![0i128; self.dim()];
                e[i] = 1;
                e
            })
            .collect()
    }

    /// The ideal generated by `gens`, given an integer `d` known to lie in it.
    pub fn ideal(&self, gens: &[Vec<i128>], d: i128) -> Lattice {
        let mut all = Vec::new();
        for g in gens {
            for b in self.basis() {
                all.push(self.mul(g, &b));
            }
        }
        hnf_mod(&all, self.dim(), d)
    }

    pub fn product(&self, a: &Lattice, b: &Lattice) -> Lattice {
        let mut all = Vec::new();
        for x in &a.rows {
            for y in &b.rows {
                all.push(self.mul(x, y));
            }
        }
        hnf_mod(&all, self.dim(), a.index() * b.index())
    }

    pub fn conj_ideal(&self, a: &Lattice) -> Lattice {
        let rows: Vec<Vec<i128>> = a.rows.iter().map(|r| self.conj(r)).collect();
        hnf_mod(&rows, self.dim(), a.index())
    }

    pub fn unit(&self) -> Lattice {
        hnf_mod(&self.basis(), self.dim(), 1)
    }

    pub fn power(&self, a: &Lattice, k: u32) -> Lattice {
        let mut acc = self.unit();
        for _ in 0..k {
            acc = self.product(&acc, a);
        }
        acc
    }

    /// Embed an element of `O_F` (power-basis coordinates).
    pub fn from_f(&self, x: &[i128]) -> Vec<i128> {
        let mut v = x.to_vec();
        v.resize(self.dim(), 0);
        v
    }
}

/// A prime `P` of `F` given by `O_F`-generators, with `N(P) = p^f`.
#[derive(Clone, Debug)]
pub struct FPrime {
    pub p: i128,
    pub f: u32,
    pub gens: Vec<Vec<i128>>,
}

/// Membership in the `O_F`-ideal generated by `gens` (which contains `p`).
fn f_ideal_lattice(ring: &KRing, prime: &FPrime) -> Lattice {
    let n = ring.n();
    let mut all = Vec::new();
    for g in &prime.gens {
        for i in 0..n {
            let mut e = vec![0i128; n];
            e[i] = 1;
            all.push(ring.mul_f(g, &e));
        }
    }
    hnf_mod(&all, n, prime.p)
}

/// Primes of `O_K` above `P`, found from roots of `X² - X + n_ω` in `O_F/P` by exhaustive
/// search over residues, as lattices. Returns one prime if none or a double root exists.
pub fn k_primes_above(ring: &KRing, prime: &FPrime) -> Vec<Lattice> {
    let n = ring.n();
    let p = prime.p;
    let pf = f_ideal_lattice(ring, prime);
    let q = p.pow(prime.f);
    let d = q * q;
    let base: Vec<Vec<i128>> = prime.gens.iter().map(|g| ring.from_f(g)).collect();
    let root_ok = |r: &[i128]| {
        let r2 = ring.mul_f(r, r);
        let mut v: Vec<i128> = (0..n).map(|i| r2[i] - r[i]).collect();
        v[0] += ring.n_omega;
        let v: Vec<i128> = v.iter().map(|x| x.rem_euclid(p)).collect();
        pf.contains(&v)
    };
    // residues: every element of O_F/P has a representative with coordinates in [0, p)
    let mut root: Option<Vec<i128>> = None;
    if prime.f == 1 {
        for r in 0..p {
            let mut v = vec![0i128; n];
            v[0] = r;
            if root_ok(&v) {
                root = Some(v);
                break;
            }
        }
    } else {
        let total = p.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let v: Vec<i128> = (0..n)
                .map(|_| {
                    let x = c % p;
                    c /= p;
                    x
                })
                .collect();
            if root_ok(&v) {
                root = Some(v);
                break;
            }
        }
    }
    match root {
        None => vec![ring.ideal(&base, d)],
        Some(r) => {
            let mut out = Vec::new();
            for s in [r.clone(), {
                let mut t: Vec<i128> = r.iter().map(|x| -x).collect();
                t[0] += 1;
                t
            }] {
                let mut g = base.clone();
                let mut w = vec![0i128; ring.dim()];
                w[n] = 1;
                for i in 0..n {
                    w[i] -= s[i];
                }
                g.push(w);
                let l = ring.ideal(&g, d);
                if !out.contains(&l) {
                    out.push(l);
                }
            }
            out
        }
    }
}

/// `#{B : B·B̄ = P^k O_K}` by testing every product of primes above `P` of the right index.
pub fn rho_prime_power(ring: &KRing, prime: &FPrime, qs: &[Lattice], k: u32) -> u64 {
    let base: Vec<Vec<i128>> = prime.gens.iter().map(|g| ring.from_f(g)).collect();
    let np = prime.p.pow(prime.f);
    let p_ok = ring.ideal(&base, np * np);
    let target = ring.power(&p_ok, k);
    let goal = np.pow(k);
    let norms: Vec<i128> = qs.iter().map(|q| q.index()).collect();
    let mut count = 0;
    let mut exps = vec![0u32; qs.len()];
    loop {
        let norm: i128 = norms.iter().zip(&exps).map(|(n, &e)| n.pow(e)).product();
        if norm == goal {
            let mut b = ring.unit();
            for (q, &e) in qs.iter().zip(&exps) {
                b = ring.product(&b, &ring.power(q, e));
            }
            if ring.product(&b, &ring.conj_ideal(&b)) == target {
                count += 1;
            }
        }
        let mut i = 0;
        loop {
            if i == qs.len() {
                return count;
            }
            if exps[i] < 2 * k {
                exps[i] += 1;
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}
