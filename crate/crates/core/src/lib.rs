//! Exact computer algebra over finite fields of small characteristic.
//!
//! This crate supplies the arithmetic substrate for the singularity
//! toolkit: finite fields `F_{p^k}` with canonical moduli and explicit
//! embeddings, univariate polynomial factorization, sparse multivariate
//! polynomials under a weighted graded order, Buchberger Groebner bases
//! with reduced canonical output, local jet algebra with certified
//! colength computation, and zero-dimensional system solving.
//! No floating point is used anywhere.

pub mod field;
pub mod groebner;
pub mod jets;
pub mod linalg;
pub mod multipoly;
pub mod solve;
pub mod unipoly;

pub use field::{Fq, FqElem};
pub use groebner::GroebnerBasis;
pub use jets::{local_quotient_dim, monomials_below, LocalDim, LocalDimResult};
pub use multipoly::{MPoly, Ring};
pub use solve::{solve_zero_dim, SolveResult};
pub use unipoly::UPoly;

/// Errors produced by the arithmetic substrate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoreError {
    #[error("unsupported characteristic {0} (supported: 2, 3, 5, 7, 11, 13, 17, 19)")]
    UnsupportedCharacteristic(u64),
    #[error("extension degree {0} outside 1..=24")]
    DegreeTooLarge(usize),
    #[error("division by zero field element")]
    DivisionByZero,
    #[error("{sub} is not a subfield of {sup}")]
    NotSubfield { sub: String, sup: String },
    #[error("the zero polynomial cannot be factored")]
    ZeroPolynomial,
    #[error("generator {0} is a unit at the origin; the local quotient is the zero ring")]
    ConstantTermPresent(String),
    #[error("ideal has dimension {0} >= 2; only dimension 0 and 1 are handled")]
    NotZeroDimAndNotCurve(usize),
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("syntax error in polynomial text: {0}")]
    Parse(String),
    #[error("solving would need a field extension of degree {0}, above the cap")]
    ExtensionTooLarge(usize),
}
