//! Expected singularity configurations of prime-order quotients of K3
//! surfaces, with the torsion order of the smooth-locus Picard group.

use crate::dynkin::{AdeClass, RdpType};
use crate::LatticeError;
use serde::{Deserialize, Serialize};
use std::fmt;

/// The acting group scheme of prime order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupScheme {
    /// Tame cyclic group of prime order `l` (characteristic away from `l`).
    ZmodL { l: u32 },
    /// Multiplicative group scheme of order p in characteristic p.
    MuP,
    /// Wild cyclic group of order p in characteristic p.
    ZmodPWild,
    /// Additive infinitesimal group scheme of order p in characteristic p.
    AlphaP,
}

impl fmt::Display for GroupScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupScheme::ZmodL { l } => write!(f, "Z/{l}Z"),
            GroupScheme::MuP => write!(f, "mu_p"),
            GroupScheme::ZmodPWild => write!(f, "Z/pZ"),
            GroupScheme::AlphaP => write!(f, "alpha_p"),
        }
    }
}

/// A multiset of RDP types, stored as `(count, type)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingConfig(pub Vec<(u32, RdpType)>);

impl SingConfig {
    /// Total index: sum of count * (ADE index).
    pub fn total_index(&self) -> u32 {
        self.0.iter().map(|(c, t)| c * t.class.index).sum()
    }

    /// Number of singular points.
    pub fn point_count(&self) -> u32 {
        self.0.iter().map(|(c, _)| c).sum()
    }

    /// The indices as a flat list, e.g. `2 E_8 -> [8, 8]`.
    pub fn indices(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for (count, t) in &self.0 {
            out.extend(std::iter::repeat(t.class.index).take(*count as usize));
        }
        out
    }
}

impl fmt::Display for SingConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(c, t)| format!("{c}{t}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// One row of the expected-configuration table: the possible singularity
/// configurations of the quotient surface and the order of the torsion
/// subgroup of the smooth-locus Picard group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedConfig {
    pub group: GroupScheme,
    pub p: u32,
    /// The quotient's singularity configuration is exactly one of these.
    pub alternatives: Vec<SingConfig>,
    pub torsion_order: u32,
}

fn single(count: u32, t: RdpType) -> SingConfig {
    SingConfig(vec![(count, t)])
}

/// Looks up the expected quotient configuration for `(group, p)`.
///
/// Rows: tame `Z/lZ` for primes `l <= 7`, `l != p`; `mu_p` for `p <= 7`;
/// wild `Z/pZ` for `p <= 5`; `alpha_p` for `p <= 5`.
pub fn expected_config(group: GroupScheme, p: u32) -> Result<ExpectedConfig, LatticeError> {
    let no_row = || LatticeError::NoSuchRow {
        group: group.to_string(),
        p,
    };
    let a_chain = |l: u32| single(24 / (l + 1), RdpType::plain(AdeClass::a(l - 1)));
    let row = match group {
        GroupScheme::ZmodL { l } => {
            if !matches!(l, 2 | 3 | 5 | 7) || l == p {
                return Err(no_row());
            }
            ExpectedConfig {
                group,
                p,
                alternatives: vec![a_chain(l)],
                torsion_order: l,
            }
        }
        GroupScheme::MuP => {
            if !matches!(p, 2 | 3 | 5 | 7) {
                return Err(no_row());
            }
            ExpectedConfig {
                group,
                p,
                alternatives: vec![a_chain(p)],
                torsion_order: p,
            }
        }
        GroupScheme::ZmodPWild => {
            let alternatives = match p {
                2 => vec![
                    single(2, RdpType::with_coindex(AdeClass::d(4), 1)),
                    single(1, RdpType::with_coindex(AdeClass::d(8), 2)),
                    single(1, RdpType::with_coindex(AdeClass::e(8), 2)),
                ],
                3 => vec![single(2, RdpType::with_coindex(AdeClass::e(6), 1))],
                5 => vec![single(2, RdpType::with_coindex(AdeClass::e(8), 1))],
                _ => return Err(no_row()),
            };
            ExpectedConfig { group, p, alternatives, torsion_order: 1 }
        }
        GroupScheme::AlphaP => {
            let alternatives = match p {
                2 => vec![
                    single(2, RdpType::with_coindex(AdeClass::d(4), 0)),
                    single(1, RdpType::with_coindex(AdeClass::d(8), 0)),
                    single(1, RdpType::with_coindex(AdeClass::e(8), 0)),
                ],
                3 => vec![single(2, RdpType::with_coindex(AdeClass::e(6), 0))],
                5 => vec![single(2, RdpType::with_coindex(AdeClass::e(8), 0))],
                _ => return Err(no_row()),
            };
            ExpectedConfig { group, p, alternatives, torsion_order: 1 }
        }
    };
    Ok(row)
}
