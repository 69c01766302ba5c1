//! Dense matrices over `k`, and Euclidean row/column reduction over `O_k`.
//!
//! Reduction over `O_k` needs a Euclidean division and is therefore only available for the
//! norm-Euclidean fields `d_k ∈ {3, 7, 11}`; general field operations (products,
//! determinants, inverses) work for every `k`.

use crate::base_field::{ImagQuadField, KElem};
use crate::error::{Error, Result};

/// Row-major matrix over `k`.
pub type OkMatrix = Vec<Vec<KElem>>;

pub fn identity(n: usize) -> OkMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { KElem::one() } else { KElem::zero() }).collect())
        .collect()
}

pub fn zeros(r: usize, c: usize) -> OkMatrix {
    vec![vec![KElem::zero(); c]; r]
}

pub fn mul(k: &ImagQuadField, a: &OkMatrix, b: &OkMatrix) -> OkMatrix {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = KElem::zero();
                    for (x, brow) in row.iter().zip(b) {
                        if !x.is_zero() && !brow[j].is_zero() {
                            s = &s + &k.mul(x, &brow[j]);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Conjugate transpose.
pub fn adjoint(a: &OkMatrix) -> OkMatrix {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols).map(|j| a.iter().map(|r| r[j].conj()).collect()).collect()
}

/// `M·G·M*`, the Gram matrix of the rows of `M` under the form with Gram `G`.
pub fn congruence(k: &ImagQuadField, m: &OkMatrix, g: &OkMatrix) -> OkMatrix {
    mul(k, &mul(k, m, g), &adjoint(m))
}

pub fn is_integral(a: &OkMatrix) -> bool {
    a.iter().all(|r| r.iter().all(|x| x.is_integral()))
}

pub fn is_hermitian(a: &OkMatrix) -> bool {
    let n = a.len();
    a.iter().all(|r| r.len() == n) && (0..n).all(|i| (0..n).all(|j| a[i][j] == a[j][i].conj()))
}

/// `x·G·ȳ` for row vectors `x`, `y`.
pub fn form(k: &ImagQuadField, g: &OkMatrix, x: &[KElem], y: &[KElem]) -> KElem {
    let mut s = KElem::zero();
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            if yj.is_zero() || g[i][j].is_zero() {
                continue;
            }
            s = &s + &k.mul(&k.mul(xi, &g[i][j]), &yj.conj());
        }
    }
    s
}

/// Row vector times matrix.
pub fn vec_mul(k: &ImagQuadField, x: &[KElem], m: &OkMatrix) -> Vec<KElem> {
    mul(k, &vec![x.to_vec()], m).pop().unwrap_or_default()
}

pub fn det(k: &ImagQuadField, a: &OkMatrix) -> KElem {
    let n = a.len();
    let mut m = a.clone();
    let mut d = KElem::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !m[i][col].is_zero()) else {
            return KElem::zero();
        };
        if p != col {
            m.swap(p, col);
            d = -&d;
        }
        let piv = m[col][col].clone();
        d = k.mul(&d, &piv);
        let inv = k.inv(&piv).expect("nonzero pivot");
        for i in col + 1..n {
            if m[i][col].is_zero() {
                continue;
            }
            let f = k.mul(&m[i][col], &inv);
            for j in col..n {
                let t = k.mul(&f, &m[col][j]);
                m[i][j] = &m[i][j] - &t;
            }
        }
    }
    d
}

pub fn inverse(k: &ImagQuadField, a: &OkMatrix) -> Result<OkMatrix> {
    let n = a.len();
    let mut m = a.clone();
    let mut inv = identity(n);
    for col in 0..n {
        let p = (col..n).find(|&i| !m[i][col].is_zero()).ok_or(Error::Degenerate)?;
        m.swap(p, col);
        inv.swap(p, col);
        let pinv = k.inv(&m[col][col])?;
        for j in 0..n {
            m[col][j] = k.mul(&m[col][j], &pinv);
            inv[col][j] = k.mul(&inv[col][j], &pinv);
        }
        for i in 0..n {
            if i == col || m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone();
            for j in 0..n {
                let t = k.mul(&f, &m[col][j]);
                m[i][j] = &m[i][j] - &t;
                let t = k.mul(&f, &inv[col][j]);
                inv[i][j] = &inv[i][j] - &t;
            }
        }
    }
    Ok(inv)
}

/// Unimodular `V` with `w·V = (g, 0, …, 0)`; `g` generates the ideal spanned by the
/// entries of `w` (zero if `w = 0`).
pub fn vector_gcd(k: &ImagQuadField, w: &[KElem]) -> Result<(OkMatrix, KElem)> {
    let r = w.len();
    let mut w = w.to_vec();
    let mut v = identity(r);
    loop {
        let best = (0..r)
            .filter(|&i| !w[i].is_zero())
            .min_by(|&i, &j| k.norm(&w[i]).cmp(&k.norm(&w[j])).then(i.cmp(&j)));
        let Some(b) = best else {
            return Ok((v, KElem::zero()));
        };
        let mut reduced_all = true;
        for j in 0..r {
            if j == b || w[j].is_zero() {
                continue;
            }
            let (q, rem) = k.div_rem(&w[j], &w[b])?;
            w[j] = rem;
            for row in v.iter_mut() {
                let t = k.mul(&q, &row[b]);
                row[j] = &row[j] - &t;
            }
            if !w[j].is_zero() {
                reduced_all = false;
            }
        }
        if reduced_all {
            w.swap(0, b);
            for row in v.iter_mut() {
                row.swap(0, b);
            }
            return Ok((v, w[0].clone()));
        }
    }
}

/// True when the entries of an integral vector generate the unit ideal.
pub fn is_primitive(k: &ImagQuadField, e: &[KElem]) -> Result<bool> {
    if !e.iter().all(|x| x.is_integral()) {
        return Ok(false);
    }
    let (_, g) = vector_gcd(k, e)?;
    Ok(!g.is_zero() && k.is_unit(&g))
}

/// A unimodular matrix over `O_k` whose first row is the primitive vector `e`.
pub fn unimodular_completion(k: &ImagQuadField, e: &[KElem]) -> Result<OkMatrix> {
    let (v, g) = vector_gcd(k, e)?;
    if g.is_zero() || !k.is_unit(&g) {
        return Err(Error::InvalidIsotropic("vector is not primitive".into()));
    }
    let mut m = inverse(k, &v)?;
    m[0] = m[0].iter().map(|x| k.mul(x, &g)).collect();
    Ok(m)
}

/// Echelon form of the `O_k`-module spanned by the rows; zero rows are dropped.
pub fn row_echelon(k: &ImagQuadField, rows: &OkMatrix) -> Result<OkMatrix> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut m: OkMatrix = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut out = Vec::new();
    for col in 0..cols {
        if m.is_empty() {
            break;
        }
        loop {
            let best = (0..m.len())
                .filter(|&i| !m[i][col].is_zero())
                .min_by(|&i, &j| k.norm(&m[i][col]).cmp(&k.norm(&m[j][col])).then(i.cmp(&j)));
            let Some(b) = best else { break };
            let pivot = m.swap_remove(b);
            let mut done = true;
            for r in m.iter_mut() {
                if r[col].is_zero() {
                    continue;
                }
                let (q, _) = k.div_rem(&r[col], &pivot[col])?;
                for j in col..cols {
                    let t = k.mul(&q, &pivot[j]);
                    r[j] = &r[j] - &t;
                }
                if !r[col].is_zero() {
                    done = false;
                }
            }
            m.retain(|r| r.iter().any(|x| !x.is_zero()));
            if done {
                out.push(pivot);
                break;
            }
            m.push(pivot);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(a: i64, b: i64) -> KElem {
        KElem::from_ints(a, b)
    }

    #[test]
    fn completion_has_unit_determinant() {
        let k = ImagQuadField::new(3).unwrap();
        let v = vec![e(2, 1), e(1, -1), e(3, 0)];
        let m = unimodular_completion(&k, &v).unwrap();
        assert_eq!(m[0], v);
        assert!(is_integral(&m));
        assert!(k.is_unit(&det(&k, &m)));
        assert!(unimodular_completion(&k, &[e(2, 0), e(0, 2)]).is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let k = ImagQuadField::new(7).unwrap();
        let a = vec![vec![e(1, 1), e(2, 0)], vec![e(0, 1), e(3, -1)]];
        let inv = inverse(&k, &a).unwrap();
        assert_eq!(mul(&k, &a, &inv), identity(2));
    }

    #[test]
    fn echelon_spans_module() {
        let k = ImagQuadField::new(11).unwrap();
        let rows = vec![vec![e(2, 0), e(1, 1)], vec![e(0, 1), e(1, 0)], vec![e(2, 1), e(2, 1)]];
        let ech = row_echelon(&k, &rows).unwrap();
        assert_eq!(ech.len(), 2);
        assert!(ech[1][0].is_zero());
    }
}
