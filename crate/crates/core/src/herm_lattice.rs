//! Free Hermitian `O_k`-lattices given by a Gram matrix.
//!
//! The form is `⟨x, y⟩ = x·G·ȳ` on row vectors. Signatures are computed exactly from the
//! `2r × 2r` real trace form; vector counts use Fincke–Pohst enumeration on that real form
//! with an exact integer re-check. The normal decomposition follows the constructive
//! argument: find `x` with `⟨x, e⟩ = 1`, correct it to an isotropic `e'' = x - ⟨x,x⟩ω·e`
//! (possible because `Tr(ω) = 1`), and take the orthogonal complement of `⟨e, e''⟩`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::base_field::{ImagQuadField, KElem};
use crate::error::{Error, Result};
use crate::linalg::{self, RatMatrix};
use crate::okmat::{self, OkMatrix};
use crate::shortvec::Ellipsoid;

/// Inertia of a nondegenerate Hermitian form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
}

/// A free Hermitian lattice `O_k^r` with Gram matrix `gram`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermLattice {
    k: ImagQuadField,
    gram: OkMatrix,
}

fn omega_pow(s: usize) -> KElem {
    if s == 0 {
        KElem::one()
    } else {
        KElem::from_ints(0, 1)
    }
}

impl HermLattice {
    pub fn new(k: ImagQuadField, gram: OkMatrix) -> Result<Self> {
        let r = gram.len();
        if gram.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidLattice("Gram matrix is not square".into()));
        }
        if !okmat::is_integral(&gram) {
            return Err(Error::InvalidLattice("Gram entries must lie in O_k".into()));
        }
        if !okmat::is_hermitian(&gram) {
            return Err(Error::InvalidLattice("Gram matrix is not Hermitian".into()));
        }
        Ok(Self { k, gram })
    }

    /// Gram matrix from row-major `(a, b)` pairs meaning `a + bω`.
    pub fn from_pairs(k: ImagQuadField, rank: usize, entries: &[(i64, i64)]) -> Result<Self> {
        if entries.len() != rank * rank {
            return Err(Error::InvalidLattice(format!(
                "expected {} Gram entries for rank {rank}, got {}",
                rank * rank,
                entries.len()
            )));
        }
        let gram = entries
            .chunks(rank.max(1))
            .take(rank)
            .map(|row| row.iter().map(|&(a, b)| KElem::from_ints(a, b)).collect())
            .collect();
        Self::new(k, gram)
    }

    pub fn identity(k: ImagQuadField, rank: usize) -> Self {
        Self { k, gram: okmat::identity(rank) }
    }

    pub fn field(&self) -> &ImagQuadField {
        &self.k
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &OkMatrix {
        &self.gram
    }

    pub fn inner(&self, x: &[KElem], y: &[KElem]) -> KElem {
        okmat::form(&self.k, &self.gram, x, y)
    }

    /// Lattice with Gram `M·G·M*` (the sublattice spanned by the rows of `M`).
    pub fn transform(&self, m: &OkMatrix) -> Result<Self> {
        Self::new(self.k, okmat::congruence(&self.k, m, &self.gram))
    }

    /// Self-dual iff the dual lattice `G^{-1}·O_k^r` equals `O_k^r`, i.e. `G^{-1}` is integral.
    pub fn is_self_dual(&self) -> bool {
        match okmat::inverse(&self.k, &self.gram) {
            Ok(inv) => okmat::is_integral(&inv),
            Err(_) => false,
        }
    }

    /// The real trace form `S` with `⟨x, x⟩ = xᵀ S x` on real coordinates
    /// `x = Σ x_{i,s} ω^s e_i`. Entries are half-integers.
    pub fn trace_form(&self) -> RatMatrix {
        let r = self.rank();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let mut s = vec![vec![BigRational::zero(); 2 * r]; 2 * r];
        for i in 0..r {
            for a in 0..2 {
                for j in 0..r {
                    for b in 0..2 {
                        let x = self.k.mul(&self.k.mul(&omega_pow(a), &self.gram[i][j]), &omega_pow(b).conj());
                        s[2 * i + a][2 * j + b] = x.trace() * &half;
                    }
                }
            }
        }
        s
    }

    /// `2S` as an integer matrix.
    fn doubled_trace_form(&self) -> Vec<Vec<i128>> {
        self.trace_form()
            .iter()
            .map(|row| row.iter().map(|x| (x * BigRational::from_integer(2.into())).to_integer().to_i128().expect("Gram entry too large")).collect())
            .collect()
    }

    pub fn signature(&self) -> Result<Signature> {
        let (pos, neg, zero) = linalg::inertia_symmetric(&self.trace_form());
        if zero > 0 {
            return Err(Error::Degenerate);
        }
        Ok(Signature { pos: pos / 2, neg: neg / 2 })
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature().is_ok_and(|s| s.neg == 0)
    }

    fn ellipsoid(&self) -> Result<Ellipsoid> {
        let s: Vec<Vec<f64>> = self.trace_form().iter().map(|r| r.iter().map(|x| x.to_f64().unwrap()).collect()).collect();
        Ellipsoid::new(&s)
    }

    fn coords_to_vec(x: &[i64]) -> Vec<KElem> {
        x.chunks(2).map(|c| KElem::from_ints(c[0], c[1])).collect()
    }

    /// All lattice vectors with `⟨x, x⟩ = m`, in enumeration order.
    pub fn vectors_of_norm(&self, m: i64) -> Result<Vec<Vec<KElem>>> {
        if !self.is_positive_definite() {
            return Err(Error::Indefinite);
        }
        let mut out = Vec::new();
        if m < 0 {
            return Ok(out);
        }
        let s2 = self.doubled_trace_form();
        let ell = self.ellipsoid()?;
        let center = vec![0.0; 2 * self.rank()];
        ell.for_each(&center, m as f64, |x| {
            if quad_i128(&s2, x) == 2 * m as i128 {
                out.push(Self::coords_to_vec(x));
            }
        });
        Ok(out)
    }

    /// `#{x ∈ L : ⟨x, x⟩ = m}` for positive definite `L`.
    pub fn count_vectors(&self, m: i64) -> Result<u64> {
        if !self.is_positive_definite() {
            return Err(Error::Indefinite);
        }
        if m < 0 {
            return Ok(0);
        }
        let s2 = self.doubled_trace_form();
        let ell = self.ellipsoid()?;
        let center = vec![0.0; 2 * self.rank()];
        let mut count = 0u64;
        ell.for_each(&center, m as f64, |x| {
            if quad_i128(&s2, x) == 2 * m as i128 {
                count += 1;
            }
        });
        Ok(count)
    }

    /// Primitive isotropic vectors with coordinates `a + bω`, `|a|, |b| ≤ bound`, one per
    /// unit class, sorted. Every returned vector spans a direct summand.
    pub fn find_isotropic(&self, bound: u32) -> Result<Vec<Vec<KElem>>> {
        if !self.k.is_euclidean() {
            return Err(Error::UnsupportedEuclidean(self.k.d_k()));
        }
        let sig = self.signature()?;
        if sig.neg == 0 || sig.pos == 0 {
            return Ok(Vec::new());
        }
        let r = self.rank();
        let s2 = self.doubled_trace_form();
        let b = bound as i64;
        let units = self.k.units();
        let mut found: Vec<Vec<(i64, i64)>> = Vec::new();
        let mut x = vec![-b; 2 * r];
        loop {
            if x.iter().any(|&c| c != 0) && quad_i128(&s2, &x) == 0 {
                let v = Self::coords_to_vec(&x);
                if okmat::is_primitive(&self.k, &v)? {
                    let canon = units
                        .iter()
                        .map(|u| {
                            v.iter()
                                .map(|c| self.k.mul(u, c).to_i64_pair().expect("small coordinates"))
                                .collect::<Vec<_>>()
                        })
                        .max()
                        .expect("nonempty unit group");
                    found.push(canon);
                }
            }
            // odometer
            let mut i = 0;
            loop {
                if i == x.len() {
                    found.sort();
                    found.dedup();
                    let out = found
                        .into_iter()
                        .map(|v| v.into_iter().map(|(a, b)| KElem::from_ints(a, b)).collect::<Vec<_>>())
                        .collect::<Vec<_>>();
                    for v in &out {
                        // summand check: a unimodular completion exists
                        okmat::unimodular_completion(&self.k, v)?;
                    }
                    return Ok(out);
                }
                if x[i] < b {
                    x[i] += 1;
                    break;
                }
                x[i] = -b;
                i += 1;
            }
        }
    }

    /// Normal decomposition with respect to a primitive isotropic vector `e`.
    pub fn normal_decomposition(&self, e: &[KElem]) -> Result<NormalDecomposition> {
        let k = &self.k;
        if !k.is_euclidean() {
            return Err(Error::UnsupportedEuclidean(k.d_k()));
        }
        let r = self.rank();
        if e.len() != r {
            return Err(Error::InvalidIsotropic(format!("vector has length {}, rank is {r}", e.len())));
        }
        if !self.is_self_dual() {
            return Err(Error::InvalidLattice("lattice is not self-dual".into()));
        }
        let sig = self.signature()?;
        if sig.neg != 1 {
            return Err(Error::InvalidLattice(format!(
                "signature ({}, {}) is not of the form (r-1, 1)",
                sig.pos, sig.neg
            )));
        }
        if !self.inner(e, e).is_zero() {
            return Err(Error::InvalidIsotropic("⟨e, e⟩ ≠ 0".into()));
        }
        if !okmat::is_primitive(k, e)? {
            return Err(Error::InvalidIsotropic("vector is not primitive".into()));
        }
        // (1) x with ⟨x, e⟩ = Σ x_i w_i = 1, where w = G·ē
        let ebar: Vec<KElem> = e.iter().map(|c| c.conj()).collect();
        let w: Vec<KElem> = (0..r)
            .map(|i| {
                let mut s = KElem::zero();
                for j in 0..r {
                    s = &s + &k.mul(&self.gram[i][j], &ebar[j]);
                }
                s
            })
            .collect();
        let (v, g) = okmat::vector_gcd(k, &w)?;
        if g.is_zero() || !k.is_unit(&g) {
            return Err(Error::InvalidIsotropic("⟨L, e⟩ ≠ O_k; e does not span a summand".into()));
        }
        let ginv = k.inv(&g)?;
        let x: Vec<KElem> = (0..r).map(|i| k.mul(&v[i][0], &ginv)).collect();
        debug_assert!(self.inner(&x, e).is_one_elem());
        // (2) e'' = x - ⟨x, x⟩ω·e is isotropic with ⟨e'', e⟩ = 1
        let t = self.inner(&x, &x);
        let c = k.mul(&t, &k.omega());
        let e2: Vec<KElem> = x.iter().zip(e).map(|(xi, ei)| xi - &k.mul(&c, ei)).collect();
        // (3) Λ = image of the projection v ↦ v - ⟨v, e''⟩e - ⟨v, e⟩e''
        let proj: OkMatrix = (0..r)
            .map(|i| {
                let mut std = vec![KElem::zero(); r];
                std[i] = KElem::one();
                let a = self.inner(&std, &e2);
                let b = self.inner(&std, e);
                (0..r).map(|j| &(&std[j] - &k.mul(&a, &e[j])) - &k.mul(&b, &e2[j])).collect()
            })
            .collect();
        let lambda = okmat::row_echelon(k, &proj)?;
        if lambda.len() != r - 2 {
            return Err(Error::InvalidLattice("orthogonal complement has unexpected rank".into()));
        }
        // (4) basis (e, Λ, g) with g = -e''
        let gvec: Vec<KElem> = e2.iter().map(|c| -c).collect();
        let mut basis_change = vec![e.to_vec()];
        basis_change.extend(lambda.iter().cloned());
        basis_change.push(gvec);
        let a_block = okmat::congruence(k, &lambda, &self.gram);
        let nd = NormalDecomposition { k: *k, basis_change, a_block, block_sizes: (1, r - 2, 1) };
        nd.verify(self)?;
        Ok(nd)
    }
}

trait IsOne {
    fn is_one_elem(&self) -> bool;
}

impl IsOne for KElem {
    fn is_one_elem(&self) -> bool {
        *self == KElem::one()
    }
}

fn quad_i128(s2: &[Vec<i128>], x: &[i64]) -> i128 {
    let mut acc = 0i128;
    for (i, row) in s2.iter().enumerate() {
        if x[i] == 0 {
            continue;
        }
        let mut t = 0i128;
        for (j, &c) in row.iter().enumerate() {
            t += c * x[j] as i128;
        }
        acc += t * x[i] as i128;
    }
    acc
}

/// Splitting `L = O_k e ⊕ Λ ⊕ O_k g` with `e`, `g` isotropic and `⟨e, g⟩ = -1`.
///
/// Rows of `basis_change` are `e, λ_1, …, λ_{r-2}, g` in the original coordinates. In the
/// `k`-basis `e, λ, e' = δ_k g` the Gram matrix is `[[0,0,δ_k],[0,A,0],[-δ_k,0,0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalDecomposition {
    k: ImagQuadField,
    pub basis_change: OkMatrix,
    pub a_block: OkMatrix,
    pub block_sizes: (usize, usize, usize),
}

impl NormalDecomposition {
    pub fn e(&self) -> &[KElem] {
        &self.basis_change[0]
    }

    pub fn lambda_basis(&self) -> &[Vec<KElem>] {
        let r = self.basis_change.len();
        &self.basis_change[1..r - 1]
    }

    /// The positive definite self-dual lattice `Λ`.
    pub fn lambda(&self) -> HermLattice {
        HermLattice { k: self.k, gram: self.a_block.clone() }
    }

    /// Gram matrix in the `O_k`-basis `(e, Λ, g)`: `[[0,0,-1],[0,A,0],[-1,0,0]]`.
    pub fn ok_gram(&self) -> OkMatrix {
        let r = self.basis_change.len();
        let mut g = okmat::zeros(r, r);
        g[0][r - 1] = KElem::from_ints(-1, 0);
        g[r - 1][0] = KElem::from_ints(-1, 0);
        for i in 0..r - 2 {
            for j in 0..r - 2 {
                g[i + 1][j + 1] = self.a_block[i][j].clone();
            }
        }
        g
    }

    /// The `k`-basis `(e, Λ, δ_k g)`.
    pub fn k_basis(&self) -> OkMatrix {
        let mut b = self.basis_change.clone();
        let last = b.len() - 1;
        b[last] = b[last].iter().map(|c| self.k.mul(&self.k.delta(), c)).collect();
        b
    }

    /// `[[0,0,δ_k],[0,A,0],[-δ_k,0,0]]`.
    pub fn block_gram(&self) -> OkMatrix {
        let r = self.basis_change.len();
        let mut g = self.ok_gram();
        g[0][r - 1] = self.k.delta();
        g[r - 1][0] = -&self.k.delta();
        g
    }

    /// Exact re-check of every postcondition against the source lattice.
    pub fn verify(&self, lattice: &HermLattice) -> Result<()> {
        let k = &self.k;
        let fail = |m: &str| Err(Error::InvalidLattice(format!("normal decomposition check failed: {m}")));
        if !okmat::is_integral(&self.basis_change) || !k.is_unit(&okmat::det(k, &self.basis_change)) {
            return fail("basis change is not unimodular");
        }
        if okmat::congruence(k, &self.basis_change, lattice.gram()) != self.ok_gram() {
            return fail("O_k-basis Gram is not of block form");
        }
        if okmat::congruence(k, &self.k_basis(), lattice.gram()) != self.block_gram() {
            return fail("k-basis Gram is not [[0,0,δ],[0,A,0],[-δ,0,0]]");
        }
        let lam = self.lambda();
        if lam.rank() > 0 && (!lam.is_positive_definite() || !lam.is_self_dual()) {
            return fail("Λ is not positive definite and self-dual");
        }
        Ok(())
    }
}

/// Boundary data: a positive definite self-dual lattice `Λ` (the ideal part is trivial
/// for free lattices).
#[derive(Debug, Clone, PartialEq)]
pub struct CuspLabel {
    pub lambda: HermLattice,
}

impl CuspLabel {
    pub fn new(lambda: HermLattice) -> Result<Self> {
        if lambda.rank() > 0 && !lambda.is_positive_definite() {
            return Err(Error::Indefinite);
        }
        if !lambda.is_self_dual() {
            return Err(Error::InvalidLattice("cusp lattice must be self-dual".into()));
        }
        Ok(Self { lambda })
    }

    pub fn from_decomposition(nd: &NormalDecomposition) -> Self {
        Self { lambda: nd.lambda() }
    }

    /// `Ind(m) = #{x ∈ Λ : ⟨x, x⟩ = m}`.
    pub fn boundary_index(&self, m: i64) -> u64 {
        if m < 0 {
            return 0;
        }
        if self.lambda.rank() == 0 {
            return u64::from(m == 0);
        }
        self.lambda.count_vectors(m).expect("cusp lattice is positive definite")
    }

    /// `Ind(m)/(4πv)`.
    pub fn boundary_multiplicity(&self, m: i64, v: f64) -> Result<f64> {
        if !(v > 0.0) {
            return Err(Error::InvalidArgument(format!("v must be positive, got {v}")));
        }
        Ok(self.boundary_index(m) as f64 / (4.0 * std::f64::consts::PI * v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(d: i64) -> ImagQuadField {
        ImagQuadField::new(d).unwrap()
    }

    fn block(d: i64) -> HermLattice {
        let kk = k(d);
        let dl = kk.delta();
        let z = KElem::zero;
        HermLattice::new(kk, vec![vec![z(), z(), dl.clone()], vec![z(), KElem::one(), z()], vec![-&dl, z(), z()]]).unwrap()
    }

    #[test]
    fn self_duality() {
        assert!(HermLattice::identity(k(3), 3).is_self_dual());
        assert!(!HermLattice::from_pairs(k(3), 1, &[(2, 0)]).unwrap().is_self_dual());
        assert!(!block(3).is_self_dual());
        let hyp = HermLattice::from_pairs(k(7), 2, &[(0, 0), (-1, 0), (-1, 0), (0, 0)]).unwrap();
        assert!(hyp.is_self_dual());
        assert!(HermLattice::from_pairs(k(3), 2, &[(0, 1), (0, 0), (0, 0), (1, 0)]).is_err());
    }

    #[test]
    fn signatures() {
        assert_eq!(HermLattice::identity(k(3), 3).signature().unwrap(), Signature { pos: 3, neg: 0 });
        let d = HermLattice::from_pairs(k(3), 3, &[(1, 0), (0, 0), (0, 0), (0, 0), (1, 0), (0, 0), (0, 0), (0, 0), (-1, 0)]).unwrap();
        assert_eq!(d.signature().unwrap(), Signature { pos: 2, neg: 1 });
        assert_eq!(block(3).signature().unwrap(), Signature { pos: 2, neg: 1 });
        let deg = HermLattice::from_pairs(k(3), 2, &[(1, 0), (1, 0), (1, 0), (1, 0)]).unwrap();
        assert_eq!(deg.signature(), Err(Error::Degenerate));
    }

    #[test]
    fn vector_counts() {
        let one = HermLattice::identity(k(3), 1);
        assert_eq!(one.count_vectors(1).unwrap(), 6);
        assert_eq!(one.count_vectors(-3).unwrap(), 0);
        // 2 = N(ω) when d_k = 7, so the four vectors ±ω, ±(1 - ω) have norm 2
        assert_eq!(HermLattice::identity(k(7), 1).count_vectors(2).unwrap(), 4);
        assert_eq!(block(3).count_vectors(1), Err(Error::Indefinite));
    }

    #[test]
    fn isotropic_search() {
        assert!(HermLattice::identity(k(3), 2).find_isotropic(2).unwrap().is_empty());
        let iso = block(3).find_isotropic(1).unwrap();
        assert!(iso.contains(&vec![KElem::one(), KElem::zero(), KElem::zero()]));
        let d = HermLattice::from_pairs(k(3), 3, &[(1, 0), (0, 0), (0, 0), (0, 0), (1, 0), (0, 0), (0, 0), (0, 0), (-1, 0)]).unwrap();
        let found = d.find_isotropic(1).unwrap();
        assert!(!found.is_empty());
        for v in &found {
            assert!(d.inner(v, v).is_zero());
        }
        assert_eq!(HermLattice::identity(k(19), 2).find_isotropic(1), Err(Error::UnsupportedEuclidean(19)));
    }

    #[test]
    fn decomposition_of_standard_forms() {
        let kk = k(3);
        // rank 2 hyperbolic plane
        let hyp = HermLattice::from_pairs(kk, 2, &[(0, 0), (1, 0), (1, 0), (0, 0)]).unwrap();
        let nd = hyp.normal_decomposition(&[KElem::one(), KElem::zero()]).unwrap();
        assert_eq!(nd.block_sizes, (1, 0, 1));
        assert_eq!(nd.block_gram()[0][1], kk.delta());
        // diag(1, 1, -1) with an isotropic vector found by search
        let d = HermLattice::from_pairs(kk, 3, &[(1, 0), (0, 0), (0, 0), (0, 0), (1, 0), (0, 0), (0, 0), (0, 0), (-1, 0)]).unwrap();
        let e = d.find_isotropic(1).unwrap().remove(0);
        let nd = d.normal_decomposition(&e).unwrap();
        assert_eq!(nd.block_sizes, (1, 1, 1));
        assert_eq!(nd.lambda().count_vectors(1).unwrap(), 6);
        assert!(d.normal_decomposition(&[KElem::one(), KElem::zero(), KElem::zero()]).is_err());
    }

    #[test]
    fn boundary_indices() {
        let lab = CuspLabel::new(HermLattice::identity(k(3), 1)).unwrap();
        assert_eq!(lab.boundary_index(1), 6);
        assert!((lab.boundary_multiplicity(1, 1.0).unwrap() - 0.477_464_829_275_686).abs() < 1e-12);
        assert_eq!(lab.boundary_index(-1), 0);
        let empty = CuspLabel::new(HermLattice::identity(k(3), 0)).unwrap();
        assert_eq!(empty.boundary_index(2), 0);
    }
}
