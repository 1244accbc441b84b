//! Catalogued fixed-locus data of p-closed derivations on RDP resolutions.
//!
//! For a local RDP `Spec B` of index `n` in characteristic `p` carrying a
//! p-closed derivation `D` with empty fixed locus and smooth quotient, the
//! derivation induced on the minimal resolution has a divisorial fixed part
//! supported on the exceptional curves and finitely many isolated fixed
//! points, and these satisfy
//!
//! ```text
//! (divisorial part)^2 = -2 n / (p - 1)
//! deg(isolated part)  =  n (p - 2) / (p - 1)
//! ```
//!
//! The coefficient lists below are catalogue data (each isolated point has
//! degree 1, so only the support is recorded); this module verifies the two
//! identities rather than re-deriving the lists, which would require global
//! vector-field transport on the resolution.

use crate::dynkin::{AdeClass, AdeFamily, DynkinLattice};
use crate::LatticeError;
use serde::{Deserialize, Serialize};

/// An isolated fixed point on the exceptional locus: either an interior
/// point of one curve, or the intersection point of two curves.
/// Indices are 0-based positions in the lattice numbering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsolatedPoint {
    OnCurve(usize),
    OnEdge(usize, usize),
}

/// Fixed-locus data of the induced derivation on the resolution of one RDP.
///
/// `divisorial` stores positive coefficients `c_i`; the divisorial part of
/// the fixed locus is `-(sum c_i e_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionFixData {
    pub p: u32,
    pub class: AdeClass,
    pub divisorial: Vec<i64>,
    pub isolated: Vec<IsolatedPoint>,
}

/// Outcome of checking one catalogue entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionFixReport {
    pub p: u32,
    pub class: AdeClass,
    /// `(sum c_i e_i)^2`, equal to the square of the divisorial part.
    pub self_intersection: i64,
    /// `-2n/(p-1)`.
    pub expected_self_intersection: i64,
    pub isolated_count: usize,
    /// `n(p-2)/(p-1)`.
    pub expected_isolated_count: usize,
    /// Every isolated-point marker refers to a real curve/edge, without
    /// duplicates.
    pub markers_valid: bool,
}

impl ResolutionFixReport {
    pub fn ok(&self) -> bool {
        self.self_intersection == self.expected_self_intersection
            && self.isolated_count == self.expected_isolated_count
            && self.markers_valid
            && (self.p != 2 || self.isolated_count == 0)
    }
}

impl ResolutionFixData {
    /// Looks up the catalogue entry for `(p, class)`.
    ///
    /// Catalogued pairs: `(p, A_{p-1})` for p in {2, 3, 5, 7};
    /// `(2, D_{2m})` for all m >= 2; `(2, E_7)`; `(2, E_8)`; `(3, E_6)`;
    /// `(3, E_8)`; `(5, E_8)`.  All carry coindex 0.
    pub fn catalogue(p: u32, class: AdeClass) -> Result<Self, LatticeError> {
        let not_found = || LatticeError::NotCatalogued {
            p,
            class: class.to_string(),
        };
        let data = match (p, class.family, class.index) {
            (2 | 3 | 5 | 7, AdeFamily::A, n) if n == p - 1 => {
                let divisorial = vec![1i64; n as usize];
                let isolated = (0..n.saturating_sub(1) as usize)
                    .map(|i| IsolatedPoint::OnEdge(i, i + 1))
                    .collect();
                ResolutionFixData { p, class, divisorial, isolated }
            }
            // Chain e_1..e_{2m-1} with e_{2m} attached to e_{2m-2}; the
            // coefficient of e_{2i-1} and e_{2i} is 2i for i < m, and m for
            // the last pair.
            (2, AdeFamily::D, n) if n % 2 == 0 => {
                let m = (n / 2) as i64;
                let mut divisorial = Vec::with_capacity(n as usize);
                for i in 1..m {
                    divisorial.push(2 * i);
                    divisorial.push(2 * i);
                }
                divisorial.push(m);
                divisorial.push(m);
                ResolutionFixData { p, class, divisorial, isolated: vec![] }
            }
            (2, AdeFamily::E, 7) => ResolutionFixData {
                p,
                class,
                divisorial: vec![3, 4, 7, 8, 6, 2, 5],
                isolated: vec![],
            },
            (2, AdeFamily::E, 8) => ResolutionFixData {
                p,
                class,
                divisorial: vec![2, 6, 8, 12, 14, 10, 4, 8],
                isolated: vec![],
            },
            // E_6 numbering: e_1, e_{2+}, e_{2-}, e_{3+}, e_{3-}, e_4.
            (3, AdeFamily::E, 6) => ResolutionFixData {
                p,
                class,
                divisorial: vec![2, 2, 2, 3, 3, 3],
                isolated: vec![
                    IsolatedPoint::OnCurve(0),
                    IsolatedPoint::OnEdge(1, 3),
                    IsolatedPoint::OnEdge(2, 4),
                ],
            },
            (3, AdeFamily::E, 8) => ResolutionFixData {
                p,
                class,
                divisorial: vec![2, 3, 6, 8, 9, 7, 4, 5],
                isolated: vec![
                    IsolatedPoint::OnCurve(0),
                    IsolatedPoint::OnEdge(2, 3),
                    IsolatedPoint::OnEdge(5, 6),
                    IsolatedPoint::OnCurve(7),
                ],
            },
            (5, AdeFamily::E, 8) => ResolutionFixData {
                p,
                class,
                divisorial: vec![2, 3, 4, 5, 5, 4, 2, 3],
                isolated: vec![
                    IsolatedPoint::OnEdge(0, 1),
                    IsolatedPoint::OnEdge(1, 2),
                    IsolatedPoint::OnEdge(2, 3),
                    IsolatedPoint::OnEdge(5, 6),
                    IsolatedPoint::OnCurve(6),
                    IsolatedPoint::OnCurve(7),
                ],
            },
            _ => return Err(not_found()),
        };
        Ok(data)
    }

    /// All catalogued `(p, class)` pairs with `D`-index bounded by `d_max`.
    pub fn catalogue_pairs(d_max: u32) -> Vec<(u32, AdeClass)> {
        let mut pairs = vec![
            (2, AdeClass::a(1)),
            (3, AdeClass::a(2)),
            (5, AdeClass::a(4)),
            (7, AdeClass::a(6)),
            (2, AdeClass::e(7)),
            (2, AdeClass::e(8)),
            (3, AdeClass::e(6)),
            (3, AdeClass::e(8)),
            (5, AdeClass::e(8)),
        ];
        let mut n = 4;
        while n <= d_max {
            pairs.push((2, AdeClass::d(n)));
            n += 2;
        }
        pairs
    }

    /// Checks the two identities and the structural validity of the
    /// isolated-point markers.
    pub fn verify(&self) -> ResolutionFixReport {
        let lattice = DynkinLattice::new(self.class);
        let n = self.class.index as i64;
        let p = self.p as i64;
        let self_intersection = lattice
            .self_intersection(&self.divisorial)
            .expect("catalogue data has the right rank");

        let edge_set: std::collections::BTreeSet<(usize, usize)> =
            lattice.edges().iter().copied().collect();
        let mut seen = std::collections::BTreeSet::new();
        let markers_valid = self.isolated.iter().all(|pt| {
            let structurally_ok = match *pt {
                IsolatedPoint::OnCurve(i) => i < lattice.rank(),
                IsolatedPoint::OnEdge(i, j) => {
                    edge_set.contains(&(i.min(j), i.max(j)))
                }
            };
            structurally_ok && seen.insert(format!("{pt:?}"))
        });

        ResolutionFixReport {
            p: self.p,
            class: self.class,
            self_intersection,
            expected_self_intersection: -2 * n / (p - 1),
            isolated_count: self.isolated.len(),
            expected_isolated_count: (n * (p - 2) / (p - 1)) as usize,
            markers_valid,
        }
    }
}

/// Convenience wrapper: look up and verify in one call.
pub fn verify_resolution_data(p: u32, class: AdeClass) -> Result<ResolutionFixReport, LatticeError> {
    Ok(ResolutionFixData::catalogue(p, class)?.verify())
}
