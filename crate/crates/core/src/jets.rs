//! Exact dimension of a local (power-series) quotient ring by jet
//! truncation with a pivot certificate.
//!
//! Given generators g_1..g_m of an ideal I in k[[x_1..x_n]] with no
//! constant terms, truncate every multiple `mono * g_i` below total degree
//! N and row-reduce over the monomial basis ordered by ascending total
//! degree.  If some threshold c < N exists such that *every* monomial of
//! degree in [c, N) is a pivot column, then reduced rows for those
//! monomials have no tail (all later columns are pivots), so each such
//! monomial lies in I + m^N; hence m^c <= I + m^N <= I + m*m^c and
//! Nakayama gives m^c <= I exactly.  The quotient dimension is then the
//! number of non-pivot columns, and the computed value is exact, not a
//! truncation artifact.  Truncation orders are retried on an increasing
//! schedule; exceeding it reports `NotFinite`.
//!
//! Total degree here is always unweighted, regardless of the ring's
//! grading.

use crate::field::FqElem;
use crate::multipoly::{MPoly, Ring};
use crate::CoreError;
use std::collections::HashMap;

/// Default truncation-order schedule.
pub const DEFAULT_SCHEDULE: [u64; 9] = [8, 12, 16, 20, 24, 28, 32, 36, 40];

/// Outcome of a local dimension computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalDim {
    /// Certified exact dimension of k[[x]]/I as a k-vector space.
    Finite(usize),
    /// No certificate up to the largest truncation order tried; the
    /// quotient is (as far as the schedule can tell) not finite.
    NotFinite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalDimResult {
    pub dim: LocalDim,
    /// Truncation order at which the answer was certified (or the last
    /// one tried, for `NotFinite`).
    pub jet_order: u64,
    /// Certified power with m^c contained in the ideal (`Finite` only).
    pub vanishing_order: Option<u64>,
}

impl LocalDimResult {
    /// The dimension if finite.
    pub fn finite(&self) -> Option<usize> {
        match self.dim {
            LocalDim::Finite(d) => Some(d),
            LocalDim::NotFinite => None,
        }
    }
}

/// Enumerates all exponent vectors in `n` variables with total degree
/// below `limit`, sorted ascending by (total degree, ring order).
pub fn monomials_below(ring: &Ring, limit: u64) -> Vec<Vec<u16>> {
    let n = ring.nvars();
    let mut out: Vec<Vec<u16>> = Vec::new();
    let mut cur = vec![0u16; n];
    // Enumerate by total degree using a recursive stack.
    fn rec(out: &mut Vec<Vec<u16>>, cur: &mut Vec<u16>, pos: usize, remaining: u64) {
        if pos + 1 == cur.len() {
            cur[pos] = remaining as u16;
            out.push(cur.clone());
            return;
        }
        for e in 0..=remaining {
            cur[pos] = e as u16;
            rec(out, cur, pos + 1, remaining - e);
        }
        cur[pos] = 0;
    }
    for d in 0..limit {
        if d > u16::MAX as u64 {
            break;
        }
        rec(&mut out, &mut cur, 0, d);
    }
    // Within-degree order: ascending in the ring's monomial order.
    out.sort_by(|a, b| {
        Ring::tdeg(a)
            .cmp(&Ring::tdeg(b))
            .then_with(|| ring.cmp_mono(a, b))
    });
    out
}

/// A sparse row: (column, coefficient), sorted by column, coefficients
/// nonzero.
type Row = Vec<(u32, FqElem)>;

/// Subtracts `factor * pivot_row` from `row` (sparse merge).
fn row_axpy(row: &Row, factor: &FqElem, pivot_row: &Row) -> Row {
    let mut out = Vec::with_capacity(row.len() + pivot_row.len());
    let mut i = 0;
    let mut j = 0;
    while i < row.len() && j < pivot_row.len() {
        match row[i].0.cmp(&pivot_row[j].0) {
            std::cmp::Ordering::Less => {
                out.push(row[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                let c = pivot_row[j].1.mul(factor).neg();
                if !c.is_zero() {
                    out.push((pivot_row[j].0, c));
                }
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let c = row[i].1.sub(&pivot_row[j].1.mul(factor));
                if !c.is_zero() {
                    out.push((row[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&row[i..]);
    for (col, c) in &pivot_row[j..] {
        let c = c.mul(factor).neg();
        if !c.is_zero() {
            out.push((*col, c));
        }
    }
    out
}

/// Online echelon reduction; keeps normalized pivot rows keyed by leading
/// column.  Only the pivot set matters for the certificate.
struct Echelon {
    pivots: HashMap<u32, Row>,
}

impl Echelon {
    fn new() -> Echelon {
        Echelon { pivots: HashMap::new() }
    }

    fn insert(&mut self, mut row: Row) {
        loop {
            let Some(&(lead_col, ref lead_coeff)) = row.first() else {
                return;
            };
            match self.pivots.get(&lead_col) {
                Some(pivot_row) => {
                    let factor = lead_coeff.clone();
                    row = row_axpy(&row, &factor, pivot_row);
                }
                None => {
                    let inv = lead_coeff.inv().expect("nonzero leading coefficient");
                    let normalized: Row =
                        row.iter().map(|(c, a)| (*c, a.mul(&inv))).collect();
                    self.pivots.insert(lead_col, normalized);
                    return;
                }
            }
        }
    }
}

/// Dimension of k[[vars]]/(gens) with the default truncation schedule.
pub fn local_quotient_dim(gens: &[MPoly]) -> Result<LocalDimResult, CoreError> {
    local_quotient_dim_with(gens, &DEFAULT_SCHEDULE)
}

/// Dimension of k[[vars]]/(gens), trying each truncation order in
/// `schedule` until one certifies the answer.
pub fn local_quotient_dim_with(
    gens: &[MPoly],
    schedule: &[u64],
) -> Result<LocalDimResult, CoreError> {
    assert!(!schedule.is_empty(), "empty truncation schedule");
    let nonzero: Vec<&MPoly> = gens.iter().filter(|g| !g.is_zero()).collect();
    let Some(first) = nonzero.first() else {
        // Zero ideal: never finite-dimensional (n >= 1 variables).
        return Ok(LocalDimResult {
            dim: LocalDim::NotFinite,
            jet_order: *schedule.last().unwrap(),
            vanishing_order: None,
        });
    };
    let ring = first.ring().clone();
    for g in &nonzero {
        assert!(*g.ring() == ring, "generators from different rings");
        if !g.constant_term().is_zero() {
            return Err(CoreError::ConstantTermPresent(g.to_string()));
        }
    }

    let mut last_n = schedule[0];
    for &n_jet in schedule {
        last_n = n_jet;
        let monos = monomials_below(&ring, n_jet);
        let col_of: HashMap<&[u16], u32> = monos
            .iter()
            .enumerate()
            .map(|(i, m)| (m.as_slice(), i as u32))
            .collect();
        let mut ech = Echelon::new();
        // Multiplier monomials of degree <= n_jet - 2 suffice: generators
        // vanish at the origin, so larger multipliers truncate to zero.
        for m in &monos {
            if Ring::tdeg(m) > n_jet.saturating_sub(2) {
                continue;
            }
            for g in &nonzero {
                let mut row: Row = Vec::with_capacity(g.terms().len());
                for (e, c) in g.terms() {
                    let prod: Vec<u16> = e
                        .iter()
                        .zip(m.iter())
                        .map(|(&a, &b)| {
                            let s = a as u32 + b as u32;
                            assert!(s <= u16::MAX as u32, "exponent overflow in jet rows");
                            s as u16
                        })
                        .collect();
                    if Ring::tdeg(&prod) < n_jet {
                        row.push((col_of[prod.as_slice()], c.clone()));
                    }
                }
                if row.is_empty() {
                    continue;
                }
                row.sort_by_key(|(c, _)| *c);
                ech.insert(row);
            }
        }

        // Certificate: the largest total degree carrying a non-pivot
        // column, plus one, must leave a nonempty all-pivot window below
        // the truncation order.
        let mut max_nonpivot_deg: Option<u64> = None;
        let mut nonpivot_count = 0usize;
        for (i, m) in monos.iter().enumerate() {
            if !ech.pivots.contains_key(&(i as u32)) {
                nonpivot_count += 1;
                let d = Ring::tdeg(m);
                max_nonpivot_deg =
                    Some(max_nonpivot_deg.map_or(d, |cur: u64| cur.max(d)));
            }
        }
        let c = max_nonpivot_deg.map_or(0, |d| d + 1);
        if c < n_jet {
            return Ok(LocalDimResult {
                dim: LocalDim::Finite(nonpivot_count),
                jet_order: n_jet,
                vanishing_order: Some(c),
            });
        }
    }
    Ok(LocalDimResult {
        dim: LocalDim::NotFinite,
        jet_order: last_n,
        vanishing_order: None,
    })
}
