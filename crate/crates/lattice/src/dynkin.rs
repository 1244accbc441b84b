//! ADE classes, intersection matrices, and local Picard groups.

use crate::LatticeError;
use serde::{Deserialize, Serialize};
use std::fmt;

/// The three simply-laced families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AdeFamily {
    A,
    D,
    E,
}

/// An ADE class `family_index`, e.g. `A_1`, `D_4`, `E_8`.
///
/// The index is the number of exceptional curves in the minimal resolution
/// of the corresponding RDP (equivalently the rank of the lattice).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AdeClass {
    pub family: AdeFamily,
    pub index: u32,
}

impl AdeClass {
    /// Validated constructor: `A_n` (n >= 1), `D_n` (n >= 4), `E_6/7/8`.
    pub fn new(family: AdeFamily, index: u32) -> Result<Self, LatticeError> {
        let ok = match family {
            AdeFamily::A => index >= 1,
            AdeFamily::D => index >= 4,
            AdeFamily::E => (6..=8).contains(&index),
        };
        if ok {
            Ok(AdeClass { family, index })
        } else {
            Err(LatticeError::NoSuchClass(format!("{family:?}_{index}")))
        }
    }

    pub fn a(n: u32) -> Self {
        Self::new(AdeFamily::A, n).expect("valid A index")
    }

    pub fn d(n: u32) -> Self {
        Self::new(AdeFamily::D, n).expect("valid D index")
    }

    pub fn e(n: u32) -> Self {
        Self::new(AdeFamily::E, n).expect("valid E index")
    }

    /// Rank of the lattice = number of exceptional curves.
    pub fn rank(&self) -> usize {
        self.index as usize
    }
}

impl fmt::Display for AdeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = match self.family {
            AdeFamily::A => 'A',
            AdeFamily::D => 'D',
            AdeFamily::E => 'E',
        };
        write!(f, "{letter}{}", self.index)
    }
}

/// Artin coindex of an RDP in small characteristic.
///
/// `Na` means the notion does not apply (the `A` family, or good
/// characteristic, where the RDP is taut); `R(r)` is a definite coindex;
/// `Unknown` records that classification succeeded up to coindex only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Coindex {
    Na,
    R(u32),
    Unknown,
}

/// An RDP type: ADE class plus coindex, e.g. `D4^0`, `E8^2`, `A5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RdpType {
    pub class: AdeClass,
    pub coindex: Coindex,
}

impl RdpType {
    pub fn new(class: AdeClass, coindex: Coindex) -> Self {
        RdpType { class, coindex }
    }

    /// An RDP with no coindex decoration (`A` family or good characteristic).
    pub fn plain(class: AdeClass) -> Self {
        RdpType { class, coindex: Coindex::Na }
    }

    /// An RDP with a definite coindex.
    pub fn with_coindex(class: AdeClass, r: u32) -> Self {
        RdpType { class, coindex: Coindex::R(r) }
    }
}

impl fmt::Display for RdpType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.class)?;
        match self.coindex {
            Coindex::Na => Ok(()),
            Coindex::R(r) => write!(f, "^{r}"),
            Coindex::Unknown => write!(f, "^?"),
        }
    }
}

impl std::str::FromStr for RdpType {
    type Err = LatticeError;

    /// Parses `A3`, `D4^0`, `E8^2`, `E6^?`.  A missing coindex parses as `Na`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LatticeError::NoSuchClass(s.to_string());
        let mut chars = s.chars();
        let family = match chars.next() {
            Some('A') => AdeFamily::A,
            Some('D') => AdeFamily::D,
            Some('E') => AdeFamily::E,
            _ => return Err(bad()),
        };
        let rest = chars.as_str();
        let (idx_str, coindex) = match rest.split_once('^') {
            None => (rest, Coindex::Na),
            Some((i, "?")) => (i, Coindex::Unknown),
            Some((i, r)) => {
                let r: u32 = r.parse().map_err(|_| bad())?;
                (i, Coindex::R(r))
            }
        };
        let index: u32 = idx_str.parse().map_err(|_| bad())?;
        let class = AdeClass::new(family, index)?;
        Ok(RdpType { class, coindex })
    }
}

/// The local Picard group of the Henselian RDP with the given resolution
/// graph: trivial, cyclic, or the Klein four-group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocalPicard {
    Trivial,
    Cyclic(u64),
    KleinFour,
}

impl LocalPicard {
    pub fn order(&self) -> u64 {
        match self {
            LocalPicard::Trivial => 1,
            LocalPicard::Cyclic(n) => *n,
            LocalPicard::KleinFour => 4,
        }
    }
}

/// An ADE root lattice with its intersection matrix under a fixed numbering
/// of the exceptional curves.
///
/// Numbering conventions (1-based in the comments, 0-based in the code):
///
/// * `A_n`: a chain `e_1 - e_2 - ... - e_n`.
/// * `D_n`: a chain `e_1 - ... - e_{n-1}` with `e_n` attached to `e_{n-2}`.
/// * `E_6`: vertices ordered `e_1, e_{2+}, e_{2-}, e_{3+}, e_{3-}, e_4`;
///   edges `e_1 e_4`, `e_{2+} e_{3+}`, `e_{2-} e_{3-}`, `e_{3+} e_4`,
///   `e_{3-} e_4` (so `e_4` is the center, with arms of lengths 1, 2, 2).
/// * `E_7`: a chain `e_1 - ... - e_6` with `e_7` attached to `e_4`.
/// * `E_8`: a chain `e_1 - ... - e_7` with `e_8` attached to `e_5`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynkinLattice {
    class: AdeClass,
    edges: Vec<(usize, usize)>,
}

impl DynkinLattice {
    pub fn new(class: AdeClass) -> Self {
        let n = class.rank();
        let chain = |len: usize| (0..len.saturating_sub(1)).map(|i| (i, i + 1));
        let edges: Vec<(usize, usize)> = match (class.family, class.index) {
            (AdeFamily::A, _) => chain(n).collect(),
            (AdeFamily::D, _) => chain(n - 1).chain([(n - 3, n - 1)]).collect(),
            (AdeFamily::E, 6) => vec![(0, 5), (1, 3), (2, 4), (3, 5), (4, 5)],
            (AdeFamily::E, 7) => chain(6).chain([(3, 6)]).collect(),
            (AdeFamily::E, 8) => chain(7).chain([(4, 7)]).collect(),
            _ => unreachable!("AdeClass is validated on construction"),
        };
        DynkinLattice { class, edges }
    }

    pub fn class(&self) -> AdeClass {
        self.class
    }

    pub fn rank(&self) -> usize {
        self.class.rank()
    }

    /// Pairs `(i, j)`, `i < j`, with `e_i . e_j = 1`.  All other off-diagonal
    /// intersection numbers are 0; every diagonal entry is -2.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Dense intersection matrix.
    pub fn intersection_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        let mut m = vec![vec![0i64; n]; n];
        for i in 0..n {
            m[i][i] = -2;
        }
        for &(i, j) in &self.edges {
            m[i][j] = 1;
            m[j][i] = 1;
        }
        m
    }

    /// Evaluates the quadratic form: `v^T M v`.
    pub fn self_intersection(&self, coeffs: &[i64]) -> Result<i64, LatticeError> {
        if coeffs.len() != self.rank() {
            return Err(LatticeError::LengthMismatch {
                rank: self.rank(),
                got: coeffs.len(),
            });
        }
        let diag: i64 = coeffs.iter().map(|c| -2 * c * c).sum();
        let off: i64 = self.edges.iter().map(|&(i, j)| 2 * coeffs[i] * coeffs[j]).sum();
        Ok(diag + off)
    }

    /// Pairing of two coefficient vectors: `u^T M v`.
    pub fn pairing(&self, u: &[i64], v: &[i64]) -> Result<i64, LatticeError> {
        if u.len() != self.rank() || v.len() != self.rank() {
            return Err(LatticeError::LengthMismatch {
                rank: self.rank(),
                got: u.len().max(v.len()),
            });
        }
        let diag: i64 = (0..self.rank()).map(|i| -2 * u[i] * v[i]).sum();
        let off: i64 = self
            .edges
            .iter()
            .map(|&(i, j)| u[i] * v[j] + u[j] * v[i])
            .sum();
        Ok(diag + off)
    }

    /// Checks negative definiteness by the leading-principal-minor criterion:
    /// the k-th leading minor must have sign `(-1)^k`.
    pub fn is_negative_definite(&self) -> bool {
        let m = self.intersection_matrix();
        for k in 1..=self.rank() {
            let d = det_i128(&m, k);
            let sign_ok = if k % 2 == 0 { d > 0 } else { d < 0 };
            if !sign_ok {
                return false;
            }
        }
        true
    }

    /// Order of the discriminant group, `|det M|`.
    pub fn discriminant_order(&self) -> u64 {
        let m = self.intersection_matrix();
        det_i128(&m, self.rank()).unsigned_abs() as u64
    }

    /// The local Picard group of the Henselian RDP with this resolution
    /// graph: `A_n -> Z/(n+1)`, `D_even -> (Z/2)^2`, `D_odd -> Z/4`,
    /// `E_6 -> Z/3`, `E_7 -> Z/2`, `E_8 -> 0`.
    pub fn local_picard(&self) -> LocalPicard {
        match (self.class.family, self.class.index) {
            (AdeFamily::A, n) => LocalPicard::Cyclic(n as u64 + 1),
            (AdeFamily::D, n) if n % 2 == 0 => LocalPicard::KleinFour,
            (AdeFamily::D, _) => LocalPicard::Cyclic(4),
            (AdeFamily::E, 6) => LocalPicard::Cyclic(3),
            (AdeFamily::E, 7) => LocalPicard::Cyclic(2),
            (AdeFamily::E, 8) => LocalPicard::Trivial,
            _ => unreachable!(),
        }
    }
}

/// Exact determinant of the leading `k x k` submatrix via fraction-free
/// Bareiss elimination in `i128`.
fn det_i128(m: &[Vec<i64>], k: usize) -> i128 {
    let mut a: Vec<Vec<i128>> = (0..k)
        .map(|i| (0..k).map(|j| m[i][j] as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for col in 0..k {
        if a[col][col] == 0 {
            let Some(swap) = (col + 1..k).find(|&r| a[r][col] != 0) else {
                return 0;
            };
            a.swap(col, swap);
            sign = -sign;
        }
        for r in col + 1..k {
            for c in col + 1..k {
                a[r][c] = (a[r][c] * a[col][col] - a[r][col] * a[col][c]) / prev;
            }
            a[r][col] = 0;
        }
        prev = a[col][col];
    }
    sign * a[k - 1][k - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_validation() {
        assert!(AdeClass::new(AdeFamily::A, 1).is_ok());
        assert!(AdeClass::new(AdeFamily::A, 0).is_err());
        assert!(AdeClass::new(AdeFamily::D, 4).is_ok());
        assert!(AdeClass::new(AdeFamily::D, 3).is_err());
        assert!(AdeClass::new(AdeFamily::E, 6).is_ok());
        assert!(AdeClass::new(AdeFamily::E, 5).is_err());
        assert!(AdeClass::new(AdeFamily::E, 9).is_err());
    }

    #[test]
    fn display_and_parse_rdp_types() {
        for s in ["A1", "A5", "D4^0", "D8^2", "E6^1", "E8", "E7^?"] {
            let t: RdpType = s.parse().unwrap();
            assert_eq!(t.to_string(), s);
        }
        assert!("B2".parse::<RdpType>().is_err());
        assert!("D3".parse::<RdpType>().is_err());
        assert!("E8^x".parse::<RdpType>().is_err());
    }

    #[test]
    fn edge_counts_are_rank_minus_one() {
        // All ADE graphs are trees.
        for class in [
            AdeClass::a(1),
            AdeClass::a(7),
            AdeClass::d(4),
            AdeClass::d(11),
            AdeClass::e(6),
            AdeClass::e(7),
            AdeClass::e(8),
        ] {
            let l = DynkinLattice::new(class);
            assert_eq!(l.edges().len(), l.rank() - 1, "{class}");
        }
    }

    #[test]
    fn e6_center_has_degree_three() {
        let l = DynkinLattice::new(AdeClass::e(6));
        // Vertex 5 is the trivalent center; arms have lengths 1, 2, 2.
        let deg5 = l.edges().iter().filter(|&&(i, j)| i == 5 || j == 5).count();
        assert_eq!(deg5, 3);
    }

    #[test]
    fn quadratic_form_examples() {
        // (1,1) on A_2.
        let a2 = DynkinLattice::new(AdeClass::a(2));
        assert_eq!(a2.self_intersection(&[1, 1]).unwrap(), -2);

        // All-ones on A_n telescopes to -2 for every n.
        for n in 1..=10 {
            let l = DynkinLattice::new(AdeClass::a(n));
            let ones = vec![1i64; n as usize];
            assert_eq!(l.self_intersection(&ones).unwrap(), -2, "A_{n}");
        }

        // The catalogued char-5 E_8 divisorial coefficients square to -4.
        let e8 = DynkinLattice::new(AdeClass::e(8));
        assert_eq!(
            e8.self_intersection(&[2, 3, 4, 5, 5, 4, 2, 3]).unwrap(),
            -4
        );

        assert!(matches!(
            e8.self_intersection(&[1, 2, 3]),
            Err(LatticeError::LengthMismatch { rank: 8, got: 3 })
        ));
    }

    #[test]
    fn discriminants_match_local_picard_orders() {
        let cases: Vec<(AdeClass, u64)> = (1..=24)
            .map(|n| (AdeClass::a(n), n as u64 + 1))
            .chain((4..=24).map(|n| (AdeClass::d(n), 4)))
            .chain([
                (AdeClass::e(6), 3),
                (AdeClass::e(7), 2),
                (AdeClass::e(8), 1),
            ])
            .collect();
        for (class, order) in cases {
            let l = DynkinLattice::new(class);
            assert_eq!(l.discriminant_order(), order, "{class}");
            assert_eq!(l.local_picard().order(), order, "{class}");
        }
    }

    #[test]
    fn d_parity_distinguishes_local_picard_structure() {
        assert_eq!(DynkinLattice::new(AdeClass::d(8)).local_picard(), LocalPicard::KleinFour);
        assert_eq!(DynkinLattice::new(AdeClass::d(9)).local_picard(), LocalPicard::Cyclic(4));
    }

    #[test]
    fn negative_definite_everywhere() {
        for class in (1..=24)
            .map(AdeClass::a)
            .chain((4..=24).map(AdeClass::d))
            .chain((6..=8).map(AdeClass::e))
        {
            assert!(DynkinLattice::new(class).is_negative_definite(), "{class}");
        }
    }

    #[test]
    fn pairing_agrees_with_polarization() {
        let l = DynkinLattice::new(AdeClass::d(6));
        let u = [1, 2, 3, 4, 5, 6];
        let v = [2, 0, 1, 1, 3, 2];
        let qu = l.self_intersection(&u).unwrap();
        let qv = l.self_intersection(&v).unwrap();
        let sum: Vec<i64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let qsum = l.self_intersection(&sum).unwrap();
        assert_eq!(qsum, qu + qv + 2 * l.pairing(&u, &v).unwrap());
    }
}
