//! Local models of wild rational double points and their degree-`p` covers.
//!
//! The catalogued germs (`D_{4m}^r` in characteristic 2, `E_8^r` in
//! characteristics 2 and 5, `E_6^r` in characteristic 3) carry a canonical
//! degree-`p` covering described by a Čech cocycle `ε` with
//! `ε^p − λε = q₁ − q₂` across two charts.  Every claim this crate certifies
//! is reduced to a finite computation: fractions are cleared to polynomial
//! identities, coverings are presented by explicit section relations, the
//! covering endomorphism `δ` is checked exactly on those presentations, and
//! the one regime with no finite local certificate is reported as skipped
//! rather than silently asserted.

mod cech;
mod covering;
mod cyclic;
mod data;
mod delta;

pub use cech::{verify_cech_identity, verify_nonsplitting};
pub use covering::verify_covering_regularity;
pub use cyclic::mu_n_cover_local;
pub use data::{catalogued_tuples, rdp_local_data, LocalFraction, RdpLocalData};
pub use delta::{delta_checks, CheckOutcome, DeltaCheck, DeltaPresentation, DeltaReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LocalModelError {
    #[error("no local covering model is catalogued for {0}")]
    OutsideCatalogue(String),
    #[error("jet order {0} is too coarse to settle the image-filtration comparison")]
    TruncationTooCoarse(u64),
    #[error("the regime {0} has no finite local certificate; it is only described, not verified")]
    UnsupportedRegime(String),
    #[error(transparent)]
    Core(#[from] charp_core::CoreError),
}
