//! Derivations on hypersurface germs, inseparable quotients, and the
//! classification of rational double points in small characteristic.

pub mod classify;
pub mod deriv;
pub mod quotient;

pub use classify::{
    artin_normal_form, classify_germ, resolve, tjurina, Classification, DualGraph, Resolution,
    DEFAULT_MAX_BLOWUPS,
};
pub use deriv::{hochschild_pth, Derivation, Equivariance, GroupType, PClosedness};
pub use quotient::{
    additive_rdp_multisets, char2_normal_form, classify_char2_quotient, default_jet_order,
    fixed_parts, invariant_presentation, quotient_singularity, Char2Data, Char2Quotient,
    FixedLocus, QuotientPresentation,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SingularError {
    #[error("derivation is not tangent to the hypersurface: D(F) not in (F)")]
    NotTangent,
    #[error("polynomial belongs to a different ring than the derivation")]
    RingMismatch,
    #[error("the zero derivation has no p-closedness witness")]
    ZeroDerivation,
    #[error("all partial derivatives of the relation vanish on this chart")]
    DegenerateChart,
    #[error("the origin is a fixed point: every image vanishes there")]
    FixedPoint,
    #[error("exact division by the chart variable failed: the derivation does not fix the blowup center")]
    NotDivisible,
    #[error("substitution is not an automorphism preserving the relation ideal")]
    NotAutomorphism,
    #[error("derivation is not p-closed")]
    NotPClosed,
    #[error("multiplicity {0} center found: not a rational double point")]
    NonRdp(u64),
    #[error("blowup resolution exceeded {0} charts without terminating")]
    ResolutionTooDeep(usize),
    #[error("exceptional configuration is not an ADE graph: {0}")]
    NotAde(String),
    #[error("the fixed locus is not in the expected maximal configuration: {0}")]
    NotMaximalConfiguration(String),
    #[error("the singular locus of the germ is positive-dimensional")]
    NotIsolated,
    #[error("no catalogued normal form: {0}")]
    OutsideCatalogue(String),
    #[error("operation requires characteristic {0}")]
    WrongCharacteristic(u32),
    #[error("parity split of the invariant generator is inconsistent: {0}")]
    InconsistentSplit(String),
    #[error("invariant ring needs more than three generators: {0}")]
    TooManyGenerators(String),
    #[error("no algebraic relation among the invariant generators up to weighted degree {0}")]
    RelationNotFound(u64),
    #[error("jet order {0} too small to certify the invariant presentation")]
    JetOrderTooSmall(u64),
    #[error(transparent)]
    Core(#[from] charp_core::CoreError),
}
