//! Hermitian matrices over `O_k` with integer-pair entries `x + yω`, random self-dual
//! lattices of signature `(r-1, 1)`, and exact re-checks of normal decompositions.

#![allow(dead_code)]

use hermkr_core::{HermLattice, ImagQuadField, KElem, NormalDecomposition};

use super::SplitMix;

pub type Ok2 = (i64, i64);

#[derive(Clone, Copy, Debug)]
pub struct OkRing {
    pub d: i64,
    pub n: i64,
}

impl OkRing {
    pub fn new(d: i64) -> Self {
        Self { d, n: (1 + d) / 4 }
    }

    pub fn mul(&self, x: Ok2, y: Ok2) -> Ok2 {
        (x.0 * y.0 - self.n * x.1 * y.1, x.0 * y.1 + x.1 * y.0 + x.1 * y.1)
    }

    pub fn add(&self, x: Ok2, y: Ok2) -> Ok2 {
        (x.0 + y.0, x.1 + y.1)
    }

    pub fn neg(&self, x: Ok2) -> Ok2 {
        (-x.0, -x.1)
    }

    pub fn conj(&self, x: Ok2) -> Ok2 {
        (x.0 + x.1, -x.1)
    }

    pub fn norm(&self, x: Ok2) -> i64 {
        x.0 * x.0 + x.0 * x.1 + self.n * x.1 * x.1
    }

    /// `M G M*`.
    pub fn congruence(&self, m: &[Vec<Ok2>], g: &[Vec<Ok2>]) -> Vec<Vec<Ok2>> {
        let r = m.len();
        let c = g.len();
        let mut out = vec![vec![(0, 0); r]; r];
        for i in 0..r {
            for j in 0..r {
                let mut s = (0, 0);
                for a in 0..c {
                    for b in 0..c {
                        s = self.add(s, self.mul(self.mul(m[i][a], g[a][b]), self.conj(m[j][b])));
                    }
                }
                out[i][j] = s;
            }
        }
        out
    }

    /// Determinant by cofactor expansion.
    pub fn det(&self, m: &[Vec<Ok2>]) -> Ok2 {
        let n = m.len();
        if n == 0 {
            return (1, 0);
        }
        if n == 1 {
            return m[0][0];
        }
        let mut s = (0, 0);
        for j in 0..n {
            let minor: Vec<Vec<Ok2>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| *x).collect()).collect();
            let t = self.mul(m[0][j], self.det(&minor));
            s = if j % 2 == 0 { self.add(s, t) } else { self.add(s, self.neg(t)) };
        }
        s
    }
}

pub fn to_pairs(m: &[Vec<KElem>]) -> Vec<Vec<Ok2>> {
    m.iter().map(|r| r.iter().map(|x| x.to_i64_pair().expect("integral entry")).collect()).collect()
}

pub fn from_pairs(m: &[Vec<Ok2>]) -> Vec<Vec<KElem>> {
    m.iter().map(|r| r.iter().map(|x| KElem::from_ints(x.0, x.1)).collect()).collect()
}

/// Integer determinant (Bareiss).
pub fn det_i128(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Positive definiteness of a Hermitian matrix via the leading minors of its doubled real form.
pub fn is_positive_definite(d: i64, a: &[Vec<Ok2>]) -> bool {
    let q = super::doubled_real_form(d, &a.to_vec());
    (1..=q.len()).all(|k| {
        let minor: Vec<Vec<i128>> = q[..k].iter().map(|r| r[..k].iter().map(|&x| x as i128).collect()).collect();
        det_i128(&minor) > 0
    })
}

/// A random self-dual lattice `U·G₀·U*` with `G₀ = [[0,0,-1],[0,I,0],[-1,0,0]]`, together
/// with the primitive isotropic vector corresponding to the first basis vector of `G₀`.
pub fn random_self_dual(d: i64, rank: usize, rng: &mut SplitMix) -> (Vec<Vec<Ok2>>, Vec<Ok2>) {
    let ring = OkRing::new(d);
    let mut g0 = vec![vec![(0, 0); rank]; rank];
    g0[0][rank - 1] = (-1, 0);
    g0[rank - 1][0] = (-1, 0);
    for i in 1..rank - 1 {
        g0[i][i] = (1, 0);
    }
    // U and V = U^{-1}, updated by elementary operations
    let id = |r: usize| -> Vec<Vec<Ok2>> {
        (0..r).map(|i| (0..r).map(|j| if i == j { (1, 0) } else { (0, 0) }).collect()).collect()
    };
    let mut u = id(rank);
    let mut v = id(rank);
    for _ in 0..3 * rank {
        let i = rng.range(0, rank as i64 - 1) as usize;
        let j = rng.range(0, rank as i64 - 1) as usize;
        if i == j {
            continue;
        }
        let c = (rng.range(-2, 2), rng.range(-1, 1));
        // row_i(U) += c·row_j(U); col_j(V) -= col_i(V)·c
        for t in 0..rank {
            let add = ring.mul(c, u[j][t]);
            u[i][t] = ring.add(u[i][t], add);
        }
        for t in 0..rank {
            let sub = ring.mul(v[t][i], c);
            v[t][j] = ring.add(v[t][j], ring.neg(sub));
        }
    }
    let g = ring.congruence(&u, &g0);
    // the old basis vector e₀ has new coordinates e₀·U^{-1} = row 0 of V
    let e = v[0].clone();
    (g, e)
}

/// Exact re-check of a normal decomposition; returns a description of the first failure.
pub fn check_decomposition(d: i64, gram: &[Vec<Ok2>], nd: &NormalDecomposition) -> Result<(), String> {
    let ring = OkRing::new(d);
    let m = to_pairs(&nd.basis_change);
    let r = gram.len();
    let det = ring.det(&m);
    if ring.norm(det) != 1 {
        return Err(format!("basis change determinant {det:?} is not a unit"));
    }
    let g = ring.congruence(&m, gram);
    for i in 0..r {
        for j in 0..r {
            let expected = if (i, j) == (0, r - 1) || (i, j) == (r - 1, 0) {
                Some((-1, 0))
            } else if i == 0 || j == 0 || i == r - 1 || j == r - 1 {
                Some((0, 0))
            } else {
                None
            };
            if let Some(x) = expected {
                if g[i][j] != x {
                    return Err(format!("O_k Gram entry ({i},{j}) = {:?}", g[i][j]));
                }
            }
        }
    }
    let a: Vec<Vec<Ok2>> = g[1..r - 1].iter().map(|row| row[1..r - 1].to_vec()).collect();
    if a != to_pairs(&nd.a_block) {
        return Err("reported Λ block differs from the recomputed one".into());
    }
    if !a.is_empty() {
        if !is_positive_definite(d, &a) {
            return Err("Λ is not positive definite".into());
        }
        let da = ring.det(&a);
        if da != (1, 0) {
            return Err(format!("det Λ = {da:?}, Λ is not self-dual"));
        }
    }
    // k-basis form: e' = δ g, δ = -1 + 2ω
    let delta = (-1, 2);
    let mut kb = m.clone();
    kb[r - 1] = kb[r - 1].iter().map(|&x| ring.mul(delta, x)).collect();
    let gk = ring.congruence(&kb, gram);
    if gk[0][r - 1] != delta || gk[r - 1][0] != ring.neg(delta) {
        return Err(format!("k-basis corner entries {:?}, {:?}", gk[0][r - 1], gk[r - 1][0]));
    }
    Ok(())
}

pub fn lattice(d: i64, g: &[Vec<Ok2>]) -> HermLattice {
    HermLattice::new(ImagQuadField::new(d).unwrap(), from_pairs(g)).unwrap()
}
