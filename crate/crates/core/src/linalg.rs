//! Exact dense linear algebra over `Z` and `Q`.
//!
//! Matrices are `Vec<Vec<_>>` in row-major order; integer lattices are spanned by rows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<BigRational>>;

/// Row-style Hermite normal form of the lattice spanned by `rows` (any number of generators
/// of length `n`). The result is upper triangular with positive pivots and entries above each
/// pivot reduced into `[0, pivot)`; zero rows are dropped.
pub fn hnf(rows: &[Vec<BigInt>], n: usize) -> IntMatrix {
    let mut m: IntMatrix = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut out: IntMatrix = Vec::new();
    let mut col = 0;
    while col < n && !m.is_empty() {
        // Euclid on column `col` across all remaining rows
        loop {
            let mut best: Option<usize> = None;
            for (i, r) in m.iter().enumerate() {
                if !r[col].is_zero() && best.map_or(true, |b| r[col].abs() < m[b][col].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            let pivot = m.swap_remove(b);
            let mut done = true;
            for r in m.iter_mut() {
                if r[col].is_zero() {
                    continue;
                }
                let q = r[col].div_floor(&pivot[col]);
                for j in col..n {
                    let t = &q * &pivot[j];
                    r[j] -= t;
                }
                if !r[col].is_zero() {
                    done = false;
                }
            }
            m.retain(|r| r.iter().any(|x| !x.is_zero()));
            if done {
                let mut p = pivot;
                if p[col].is_negative() {
                    for x in p.iter_mut() {
                        *x = -&*x;
                    }
                }
                out.push(p);
                break;
            }
            m.push(pivot);
        }
        col += 1;
    }
    // reduce entries above pivots
    for i in 0..out.len() {
        let pc = pivot_col(&out[i]);
        for k in 0..i {
            let q = out[k][pc].div_floor(&out[i][pc]);
            if !q.is_zero() {
                for j in pc..n {
                    let t = &q * &out[i][j];
                    out[k][j] -= t;
                }
            }
        }
    }
    out
}

fn pivot_col(r: &[BigInt]) -> usize {
    r.iter().position(|x| !x.is_zero()).expect("nonzero row")
}

/// Solve `x · H = v` for an upper-triangular full-rank `H` (as produced by [`hnf`]),
/// returning `None` if `v` is not an integer combination of the rows.
pub fn solve_in_lattice(h: &IntMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = v.len();
    let mut rem = v.to_vec();
    let mut coeffs = Vec::with_capacity(h.len());
    for row in h {
        let pc = pivot_col(row);
        if rem[..pc].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let (q, r) = rem[pc].div_rem(&row[pc]);
        if !r.is_zero() {
            return None;
        }
        for j in pc..n {
            let t = &q * &row[j];
            rem[j] -= t;
        }
        coeffs.push(q);
    }
    if rem.iter().all(|x| x.is_zero()) {
        Some(coeffs)
    } else {
        None
    }
}

/// Determinant of a square integer matrix (Bareiss fraction-free elimination).
pub fn det_int(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = t / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn to_rat(m: &IntMatrix) -> RatMatrix {
    m.iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect()
}

pub fn identity_rat(n: usize) -> RatMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect()
}

pub fn mat_mul_rat(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = BigRational::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() {
                            s += &row[k] * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Inverse of a square rational matrix, or `None` if singular.
pub fn inverse_rat(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.len();
    let mut a: RatMatrix = m.clone();
    let mut inv = identity_rat(n);
    for col in 0..n {
        let p = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(p, col);
        inv.swap(p, col);
        let piv = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &piv;
            inv[col][j] = &inv[col][j] / &piv;
        }
        for i in 0..n {
            if i == col || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            for j in 0..n {
                let t = &f * &a[col][j];
                a[i][j] -= t;
                let t = &f * &inv[col][j];
                inv[i][j] -= t;
            }
        }
    }
    Some(inv)
}

pub fn det_rat(m: &RatMatrix) -> BigRational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !a[i][col].is_zero()) else {
            return BigRational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let piv = a[col][col].clone();
        det *= &piv;
        for i in col + 1..n {
            if a[i][col].is_zero() {
                continue;
            }
            let f = &a[i][col] / &piv;
            for j in col..n {
                let t = &f * &a[col][j];
                a[i][j] -= t;
            }
        }
    }
    det
}

/// Characteristic polynomial `det(xI - M)` (lowest degree first, monic) by the
/// Faddeev–LeVerrier recursion.
pub fn charpoly(m: &RatMatrix) -> Vec<BigRational> {
    let n = m.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut mk = identity_rat(n);
    let mut c_prev = BigRational::one();
    for k in 1..=n {
        if k > 1 {
            // M_k = M·M_{k-1} + c_{n-k+1} I
            let mm = mat_mul_rat(m, &mk);
            mk = mm;
            for (i, row) in mk.iter_mut().enumerate() {
                row[i] += &c_prev;
            }
        }
        let am = mat_mul_rat(m, &mk);
        let tr: BigRational = (0..n).map(|i| am[i][i].clone()).fold(BigRational::zero(), |a, b| a + b);
        let c = -tr / BigRational::from_integer(BigInt::from(k as i64));
        coeffs[n - k] = c.clone();
        c_prev = c;
    }
    coeffs
}

/// Number of sign changes in a coefficient sequence, ignoring zeros.
pub fn sign_changes(coeffs: &[BigRational]) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for c in coeffs {
        let s = if c.is_positive() {
            1
        } else if c.is_negative() {
            -1
        } else {
            0
        };
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Inertia `(pos, neg, zero)` of a real symmetric rational matrix, exactly, via Descartes'
/// rule applied to its characteristic polynomial (all roots are real, so the rule is exact).
pub fn inertia_symmetric(m: &RatMatrix) -> (usize, usize, usize) {
    let cp = charpoly(m);
    let zero = cp.iter().position(|c| !c.is_zero()).unwrap_or(0);
    let pos = sign_changes(&cp);
    let flipped: Vec<BigRational> = cp
        .iter()
        .enumerate()
        .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
        .collect();
    let neg = sign_changes(&flipped);
    (pos, neg, zero)
}
