//! Cocycle identities for the covering sections.
//!
//! The glueing section `ε̄ = z/(x y^m)` must satisfy
//! `ε̄^p − λ ε̄ = q̄₁ − q̄₂` modulo `(F)`, and its class must not be a
//! coboundary: no `h(y) ε̄` with `h ≠ 0`, `deg h < m` decomposes as a sum of
//! sections regular on the two charts.  Both statements are verified after
//! clearing denominators into the polynomial ring — the first as an exact
//! ideal-membership check, the second as a linear-independence certificate
//! bounded by a denominator cap.

use charp_core::{linalg, GroebnerBasis, MPoly};

use crate::data::RdpLocalData;

/// The difference `(ε̄^p − λ ε̄) − (q̄₁ − q̄₂)` with all denominators cleared
/// by `(x y^m)^p`.
pub(crate) fn cleared_cech_difference(data: &RdpLocalData) -> MPoly {
    let p = data.p;
    let m = data.m;
    let x = data.x();
    let y = data.y();
    let z = data.z();
    // ε̄^p · (x y^m)^p = z^p;  λ ε̄ · (x y^m)^p = λ z (x y^m)^{p−1}.
    let lhs = z.pow(p).sub(
        &data
            .lambda
            .mul(&z)
            .mul(&x.pow(p - 1))
            .mul(&y.pow(m * (p - 1))),
    );
    assert!(p >= data.qbar1.x_den && m * p >= data.qbar1.y_den);
    assert!(p >= data.qbar2.x_den && m * p >= data.qbar2.y_den);
    let q1 = data
        .qbar1
        .numerator
        .mul(&x.pow(p - data.qbar1.x_den))
        .mul(&y.pow(m * p - data.qbar1.y_den));
    let q2 = data
        .qbar2
        .numerator
        .mul(&x.pow(p - data.qbar2.x_den))
        .mul(&y.pow(m * p - data.qbar2.y_den));
    lhs.sub(&q1.sub(&q2))
}

/// Checks the chart-difference identity `ε̄^p − λ ε̄ = q̄₁ − q̄₂` modulo `(F)`.
pub fn verify_cech_identity(data: &RdpLocalData) -> bool {
    let gb = GroebnerBasis::new(&data.ring, &[data.f.clone()]);
    gb.contains(&cleared_cech_difference(data))
}

/// Certifies that no nonzero `h(y) ε̄` with `deg h < m` is a sum of fractions
/// regular on the two charts, for denominator exponents up to `cap`.
///
/// A decomposition `h ε̄ = α/x^c + β/y^c` with `α, β` regular would, after
/// multiplication by `x^c y^c`, place `x^{c−1} y^{c−m} z · h(y)` in the ideal
/// `(x^c, y^c, F)`.  That ideal is primary to the origin, so polynomial
/// membership is equivalent to formal-local membership, and the non-existence
/// for every nonzero `h` is exactly linear independence of the normal forms of
/// the `m` monomial candidates.  This is a necessary-condition test only: it
/// rules out denominators up to `cap`, not all of them.
pub fn verify_nonsplitting(data: &RdpLocalData, cap: u32) -> bool {
    let c = cap.max(data.m).max(data.epsbar.x_den).max(data.epsbar.y_den);
    let x = data.x();
    let y = data.y();
    let gb = GroebnerBasis::new(&data.ring, &[x.pow(c), y.pow(c), data.f.clone()]);
    let targets: Vec<MPoly> = (0..data.m)
        .map(|j| {
            let cleared = data
                .epsbar
                .numerator
                .mul(&x.pow(c - data.epsbar.x_den))
                .mul(&y.pow(c - data.epsbar.y_den + j));
            gb.normal_form(&cleared)
        })
        .collect();
    // Coordinatize the normal forms on their joint monomial support.
    let mut support: Vec<Vec<u16>> = Vec::new();
    for t in &targets {
        for (e, _) in t.terms() {
            if !support.contains(e) {
                support.push(e.clone());
            }
        }
    }
    if support.is_empty() {
        return false; // all candidates reduced to zero: the class splits
    }
    let field = data.ring.field().clone();
    let mut rows: Vec<Vec<charp_core::FqElem>> = targets
        .iter()
        .map(|t| {
            let mut row = vec![field.zero(); support.len()];
            for (e, cf) in t.terms() {
                let i = support.iter().position(|s| s == e).unwrap();
                row[i] = cf.clone();
            }
            row
        })
        .collect();
    let pivots = linalg::rref(&mut rows);
    pivots.len() == data.m as usize
}
