//! Arithmetic intersection of Kudla–Rapoport divisors with a CM cycle.
//!
//! For `K = k ⊗ F` with `F` a totally real field, the degree splits as a finite part
//!
//! `I_fin = (h/w) Σ_{α ≫ 0, Tr α = m} Σ_{P nonsplit} log N(P) · ord_P(α P 𝔡_F) · ρ(α P^{-ε_P} 𝔡_F)`
//!
//! (`ε_P = 1` for `P` unramified in `K`, `0` for `P` ramified) and an archimedean part
//!
//! `I_arch = (h/w) Σ_{α ∈ F_-, Tr α = m} β₁(4πv|α|) · ρ(α 𝔡_F)`,
//!
//! where `F_-` is the set of elements negative at exactly one real place and `|α|` is the
//! absolute value there. The predicted Eisenstein coefficient is solved from
//! `total = -(h/w) · sqrt(N(d_{K/F})) / 2^{r-1} · c_Φ(m, v)`.
//!
//! Finiteness of the prime sum: for a fixed `α`, the ideal `α𝔡_F` is integral. If `P` is
//! unramified in `K` and does not divide `α𝔡_F`, then `αP^{-1}𝔡_F` is not integral and its
//! `ρ` vanishes. Hence only primes dividing `α𝔡_F` and primes ramified in `K` (those above
//! `d_k`) can contribute.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::cm_field::{CmPair, FElem, FracIdealF, PrimeIdealF, SplitType};
use crate::error::{Error, Result};
use crate::special::{beta1, beta1_upper};
use crate::summation::Neumaier;

/// The finite part as an exact combination `Σ_p coefficient_p · log p`.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePart {
    /// `(p, coefficient)` sorted by `p`, zero coefficients omitted.
    pub coefficients: Vec<(u64, BigRational)>,
    /// Number of totally positive `α` in the trace slice.
    pub alpha_count: usize,
}

impl FinitePart {
    pub fn value(&self) -> f64 {
        let mut s = Neumaier::new();
        for (p, c) in &self.coefficients {
            s.add(c.to_f64().expect("finite coefficient") * (*p as f64).ln());
        }
        s.value()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }
}

/// The archimedean part with its truncation data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArchPart {
    pub value: f64,
    pub tail_bound: f64,
    /// Truncation `|α| ≤ truncation` at the negative place.
    pub truncation: f64,
    pub terms: usize,
}

/// One `(p, coefficient)` entry of the finite part; the coefficient is an exact rational.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimeCoefficient {
    pub prime: u64,
    #[serde(serialize_with = "ser_rational")]
    pub coefficient: BigRational,
}

fn ser_rational<S: Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_integer() {
        s.serialize_str(&x.numer().to_string())
    } else {
        s.serialize_str(&format!("{}/{}", x.numer(), x.denom()))
    }
}

/// Intersection numbers for one `(m, v)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectionReport {
    pub m: i64,
    pub v: f64,
    pub i_fin: f64,
    pub i_fin_terms: Vec<PrimeCoefficient>,
    pub i_arch: f64,
    pub i_arch_tail_bound: f64,
    pub total: f64,
    pub predicted_c_phi: f64,
    pub r: u32,
    pub norm_rel_disc: u128,
    pub h_k: u64,
    pub w_k: u32,
    /// Bound on `|total - exact|`: archimedean tail plus a rounding allowance.
    pub error_bound: f64,
}

fn h_over_w(pair: &CmPair) -> BigRational {
    BigRational::new(BigInt::from(pair.k.class_number()), BigInt::from(pair.k.unit_count()))
}

fn alpha_different(pair: &CmPair, alpha: &FElem) -> FracIdealF {
    let f = &pair.f;
    FracIdealF::principal(f, alpha).mul(f, &f.different())
}

fn finish(pair: &CmPair, per_p: BTreeMap<u64, i64>, alpha_count: usize) -> FinitePart {
    let hw = h_over_w(pair);
    let coefficients = per_p
        .into_iter()
        .filter(|(_, c)| *c != 0)
        .map(|(p, c)| (p, &hw * BigRational::from_integer(BigInt::from(c))))
        .collect();
    FinitePart { coefficients, alpha_count }
}

/// Integer contribution `Σ_P f_P · ord_P(αP𝔡_F) · ρ(αP^{-ε}𝔡_F)` per rational prime, computed
/// from the factorization of `α𝔡_F`.
fn fin_terms_for_alpha(pair: &CmPair, alpha: &FElem) -> Vec<(u64, i64)> {
    let ideal = alpha_different(pair, alpha);
    let fac = pair.factor_ideal(&ideal);
    let mut primes: Vec<(PrimeIdealF, i64)> = fac.clone();
    for p in pair.primes_above_dk() {
        if !primes.iter().any(|(q, _)| *q == p) {
            primes.push((p, 0));
        }
    }
    let local: Vec<(SplitType, i64)> = fac.iter().map(|(p, k)| (pair.split_type(p), *k)).collect();
    let mut out = Vec::new();
    for (prime, k) in &primes {
        let split = pair.split_type(prime);
        if split == SplitType::Split {
            continue;
        }
        let eps = i64::from(split == SplitType::Inert);
        if *k - eps < 0 {
            continue;
        }
        let mut rho: u64 = 1;
        for ((q, kq), (s, _)) in fac.iter().zip(&local) {
            let e = if q == prime { kq - eps } else { *kq };
            rho *= CmPair::rho_local(*s, e);
        }
        if rho != 0 {
            out.push((prime.p, prime.f_deg as i64 * (k + 1) * rho as i64));
        }
    }
    out
}

/// Finite part, summing over `α` first and using the factorization of `α𝔡_F`.
pub fn i_fin(pair: &CmPair, m: i64) -> Result<FinitePart> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be nonzero".into()));
    }
    let alphas = pair.f.enumerate_totally_positive(m);
    let per_alpha: Vec<Vec<(u64, i64)>> = alphas.par_iter().map(|a| fin_terms_for_alpha(pair, a)).collect();
    let mut per_p: BTreeMap<u64, i64> = BTreeMap::new();
    for terms in per_alpha {
        for (p, c) in terms {
            *per_p.entry(p).or_default() += c;
        }
    }
    Ok(finish(pair, per_p, alphas.len()))
}

/// Finite part, summing over primes first with generic ideal arithmetic
/// (`ord` by containment, `P^{-1}` by the trace dual).
pub fn i_fin_by_prime(pair: &CmPair, m: i64) -> Result<FinitePart> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be nonzero".into()));
    }
    let f = &pair.f;
    let alphas = f.enumerate_totally_positive(m);
    let ideals: Vec<FracIdealF> = alphas.iter().map(|a| alpha_different(pair, a)).collect();
    // candidate rational primes: divisors of N(α𝔡_F) and of d_k
    let mut rational: Vec<u64> = crate::cm_field::factor_integer(&BigInt::from(pair.k.d_k()))
        .into_iter()
        .map(|(p, _)| p)
        .collect();
    for id in &ideals {
        rational.extend(crate::cm_field::factor_integer(&id.norm().to_integer()).into_iter().map(|(p, _)| p));
    }
    rational.sort_unstable();
    rational.dedup();
    let mut per_p: BTreeMap<u64, i64> = BTreeMap::new();
    for p in rational {
        for prime in f.factor_prime(p) {
            let split = pair.split_type(&prime);
            if split == SplitType::Split {
                continue;
            }
            let inv = prime.ideal.inverse(f);
            for id in &ideals {
                let ord = id.mul(f, &prime.ideal).ord(f, &prime);
                if ord == 0 {
                    continue;
                }
                let arg = if split == SplitType::Inert { id.mul(f, &inv) } else { id.clone() };
                let rho = pair.rho(&arg) as i64;
                *per_p.entry(p).or_default() += prime.f_deg as i64 * ord * rho;
            }
        }
    }
    Ok(finish(pair, per_p, alphas.len()))
}

/// Upper bound for `ρ(α𝔡_F)` over `α ∈ F_-` with `Tr α = m` and `|α| ≤ t`:
/// `ρ(𝔞) ≤ τ(N𝔞) ≤ 2 sqrt(N𝔞)`, with `|N(α)| ≤ t·((m + t)/(n-1))^{n-1}` by AM–GM.
fn rho_bound(pair: &CmPair, m: i64, t: f64) -> f64 {
    let n = pair.f.degree();
    let disc = pair.f.disc().to_f64().unwrap_or(f64::INFINITY).abs();
    let norm = if n == 1 { t } else { t * ((m as f64 + t) / (n - 1) as f64).powi(n as i32 - 1) };
    2.0 * (disc * norm.max(1.0)).sqrt()
}

/// Bound on the archimedean terms with `|α| > t`.
fn arch_tail(pair: &CmPair, m: i64, v: f64, t: f64) -> f64 {
    let mut acc = 0.0;
    let mut lo = t;
    for _ in 0..200 {
        let hi = 2.0 * lo;
        let term = pair.f.f_minus_count_bound(m, hi) * rho_bound(pair, m, hi) * beta1_upper(4.0 * PI * v * lo);
        acc += term;
        if 4.0 * PI * v * lo > 50.0 && (term <= 1e-300 || term <= 1e-6 * acc) {
            break;
        }
        lo = hi;
    }
    acc * h_over_w(pair).to_f64().unwrap()
}

/// Archimedean part, truncated so the discarded terms are bounded by `tol`.
pub fn i_arch(pair: &CmPair, m: i64, v: f64, tol: f64) -> Result<ArchPart> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be nonzero".into()));
    }
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidArgument(format!("v must be positive, got {v}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let f = &pair.f;
    let (truncation, tail_bound) = if f.degree() == 1 {
        // F_- is {m} for m < 0 and empty otherwise
        ((m.unsigned_abs() + 1) as f64, 0.0)
    } else {
        let mut t = 1.0 / (4.0 * PI * v);
        loop {
            let tail = arch_tail(pair, m, v, t);
            if tail <= tol {
                break (t, tail);
            }
            t *= 1.25;
            if t > 1e6 {
                return Err(Error::TruncationCap { needed: t, cap: 1e6 });
            }
        }
    };
    let alphas = f.enumerate_f_minus(m, truncation);
    let hw = h_over_w(pair).to_f64().unwrap();
    let terms: Vec<Result<f64>> = alphas
        .par_iter()
        .map(|(a, place)| {
            let rho = pair.rho(&alpha_different(pair, a));
            if rho == 0 {
                return Ok(0.0);
            }
            let abs = f.embeddings(a)[*place].abs();
            Ok(beta1(4.0 * PI * v * abs)? * rho as f64)
        })
        .collect();
    let mut s = Neumaier::new();
    let mut count = 0;
    for t in terms {
        let t = t?;
        if t != 0.0 {
            count += 1;
        }
        s.add(t);
    }
    Ok(ArchPart { value: hw * s.value(), tail_bound, truncation, terms: count })
}

/// `c_Φ(m, v) = -total · w · 2^{r-1} / (h · sqrt(N(d_{K/F})))`.
pub fn predicted_c_phi(pair: &CmPair, total: f64) -> f64 {
    -total * pair.k.unit_count() as f64 * 2f64.powi(pair.ramified_place_count() as i32 - 1)
        / (pair.k.class_number() as f64 * (pair.norm_rel_disc() as f64).sqrt())
}

/// Inverse of [`predicted_c_phi`]: the degree implied by a coefficient.
pub fn total_from_c_phi(pair: &CmPair, c_phi: f64) -> f64 {
    -(pair.k.class_number() as f64) * (pair.norm_rel_disc() as f64).sqrt() * c_phi
        / (pair.k.unit_count() as f64 * 2f64.powi(pair.ramified_place_count() as i32 - 1))
}

/// Finite and archimedean parts, their sum and the implied Eisenstein coefficient.
pub fn total_and_prediction(pair: &CmPair, m: i64, v: f64, tol: f64) -> Result<IntersectionReport> {
    let fin = i_fin(pair, m)?;
    let arch = i_arch(pair, m, v, tol)?;
    let i_fin = fin.value();
    let total = i_fin + arch.value;
    let rounding = 16.0 * f64::EPSILON * (i_fin.abs() + arch.value.abs());
    Ok(IntersectionReport {
        m,
        v,
        i_fin,
        i_fin_terms: fin
            .coefficients
            .into_iter()
            .map(|(prime, coefficient)| PrimeCoefficient { prime, coefficient })
            .collect(),
        i_arch: arch.value,
        i_arch_tail_bound: arch.tail_bound,
        total,
        predicted_c_phi: predicted_c_phi(pair, total),
        r: pair.ramified_place_count(),
        norm_rel_disc: pair.norm_rel_disc(),
        h_k: pair.k.class_number(),
        w_k: pair.k.unit_count(),
        error_bound: arch.tail_bound + rounding,
    })
}
