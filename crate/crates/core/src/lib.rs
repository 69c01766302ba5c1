//! Exact and numerical machinery for unitary Shimura varieties of signature `(n-1, 1)`
//! over an imaginary quadratic field `k` of odd discriminant.
//!
//! The crate is organized bottom-up:
//!
//! * [`base_field`] — exact arithmetic in `k = Q(sqrt(-d_k))`, class number and unit count.
//! * [`cm_field`] — a monogenic totally real field `F`, its primes, different, splitting in
//!   `K = k ⊗ F`, representation numbers `ρ`, and the trace-`m` enumerations.
//! * [`herm_lattice`] — free Hermitian `O_k`-lattices: self-duality, signature, vector
//!   counts, isotropic vectors, normal decompositions and boundary indices.
//! * [`green`] — the Green function of a Kudla–Rapoport divisor in cusp coordinates,
//!   its boundary/interior split and numerical boundary diagnostics.
//! * [`intersect`] — the closed-form finite and archimedean intersection sums and the
//!   Eisenstein coefficient they predict.

pub mod base_field;
pub mod cm_field;
pub mod error;
pub mod finite_field;
pub mod green;
pub mod herm_lattice;
pub mod intersect;
pub mod linalg;
pub mod okmat;
pub mod shortvec;
pub mod poly;
pub mod special;
pub mod summation;

pub use base_field::{ImagQuadField, KElem};
pub use cm_field::{CmPair, FElem, FracIdealF, PrimeIdealF, SplitType, TotallyRealField};
pub use error::{Error, Result};
pub use green::{
    BoundaryReport, CuspChart, DomainPoint, GreenParams, GreenValue, LatticeVectorCoords,
    ThetaReport, UnipotentElement,
};
pub use herm_lattice::{CuspLabel, HermLattice, NormalDecomposition, Signature};
pub use intersect::{FinitePart, IntersectionReport};
pub use okmat::OkMatrix;
pub use special::beta1;
