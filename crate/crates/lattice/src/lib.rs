//! Exact integer-lattice layer for rational double points (RDPs).
//!
//! Everything in this crate is arithmetic over `i64`/`i128` and exact
//! rationals; there is no field or characteristic-p polynomial arithmetic
//! here.  The crate provides:
//!
//! * ADE classes and their intersection matrices under a fixed numbering of
//!   exceptional curves ([`DynkinLattice`]), with negative-definiteness and
//!   discriminant checks, and the local Picard group of the corresponding
//!   Henselian RDP.
//! * The catalogued divisorial/isolated fixed-locus data of a p-closed
//!   derivation induced on the minimal resolution of an RDP with smooth
//!   quotient ([`ResolutionFixData`]), and a verifier for the identities
//!   `(divisorial part)^2 = -2n/(p-1)` and
//!   `deg(isolated part) = n(p-2)/(p-1)`.
//! * The Euler-number balance for a p-closed rational vector field on a K3
//!   surface ([`c2_balance`]).
//! * The piecewise-bilinear coefficient function [`f_n`] governing pullbacks
//!   of line bundles to chains of rational curves.
//! * Enumeration of torsion divisor classes supported on `A_{l-1}`
//!   configurations ([`torsion_enumerate`]).
//! * The expected singularity configurations and torsion orders of quotient
//!   K3 surfaces by group schemes of prime order ([`expected_config`]).

mod balance;
mod config;
mod dynkin;
mod fixdata;
mod torsion;

pub use balance::{c2_balance, f_n};
pub use config::{expected_config, ExpectedConfig, GroupScheme, SingConfig};
pub use dynkin::{
    AdeClass, AdeFamily, Coindex, DynkinLattice, LocalPicard, RdpType,
};
pub use fixdata::{
    verify_resolution_data, IsolatedPoint, ResolutionFixData, ResolutionFixReport,
};
pub use torsion::{torsion_enumerate, torsion_search, TorsionSolution};

/// Errors produced by the lattice layer.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    /// A coefficient vector does not match the rank of the lattice.
    #[error("coefficient vector has length {got}, lattice has rank {rank}")]
    LengthMismatch { rank: usize, got: usize },
    /// The requested ADE class does not exist (e.g. `D_3` or `E_9`).
    #[error("no ADE class {0}")]
    NoSuchClass(String),
    /// `(p, class)` is not in the catalogue of resolution fixed-locus data.
    #[error("no catalogued resolution fix data for p = {p}, class {class}")]
    NotCatalogued { p: u32, class: String },
    /// Argument outside the domain of `f_n`.
    #[error("f_{n}({h}, {j}) is undefined: arguments must lie in 1..={max}", max = n - 1)]
    OutOfRange { n: u64, h: u64, j: u64 },
    /// Torsion enumeration supports only l in {2, 3, 5, 7}.
    #[error("torsion enumeration is not supported for l = {0}")]
    UnsupportedL(u32),
    /// No expected-configuration row exists for this (group, characteristic).
    #[error("no expected configuration for {group} in characteristic {p}")]
    NoSuchRow { group: String, p: u32 },
}
