//! Enumeration of torsion divisor classes supported on `A_{l-1}`
//! configurations on a K3 surface.
//!
//! A nontrivial l-torsion class in the smooth-locus Picard group of an RDP
//! K3 surface with `24/(l+1)` singularities of type `A_{l-1}` lifts to a
//! divisor `Delta` on the resolution with `l Delta = sum_{i,j} (j a_i mod l)
//! e_{i,j}`, where `i` runs over the singular points and `j` along each
//! `A_{l-1}` chain.  Necessary conditions on the coefficient vector
//! `(a_i)`:
//!
//! ```text
//! Delta^2 = -(1/l) sum_i a_i (l - a_i)   must be an even integer, != -2,
//! ```
//!
//! and `(a_i)` not identically zero.  Representatives are normalized to
//! `a_i <= l/2` (replacing `a_i` by `l - a_i` fixes `a_i(l - a_i)`) and
//! reported up to permutation of the singular points.

use crate::LatticeError;
use serde::{Deserialize, Serialize};

/// One admissible coefficient vector, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionSolution {
    pub l: u32,
    pub a: Vec<u32>,
    pub delta_sq: i64,
}

/// Exhaustive search over normalized vectors of the given length.
///
/// Enumerates non-decreasing vectors `a` with entries in `0..=l/2`, skipping
/// the zero vector, and keeps those whose `Delta^2` is an even integer
/// different from -2.  Non-decreasing enumeration makes each permutation
/// class appear exactly once.
pub fn torsion_search(l: u32, len: usize) -> Vec<TorsionSolution> {
    let mut out = Vec::new();
    let max = l / 2;
    let mut a = vec![0u32; len];
    loop {
        if a.iter().any(|&x| x != 0) {
            let weighted: i64 = a.iter().map(|&x| i64::from(x) * i64::from(l - x)).sum();
            if weighted % i64::from(l) == 0 {
                let delta_sq = -weighted / i64::from(l);
                if delta_sq % 2 == 0 && delta_sq != -2 {
                    out.push(TorsionSolution { l, a: a.clone(), delta_sq });
                }
            }
        }
        // Advance to the next non-decreasing vector.
        let Some(pos) = a.iter().rposition(|&x| x < max) else {
            break;
        };
        a[pos] += 1;
        let v = a[pos];
        for x in &mut a[pos + 1..] {
            *x = v;
        }
    }
    out
}

/// Enumerates torsion classes for the K3 quotient configuration
/// `24/(l+1) A_{l-1}`, `l` in {2, 3, 5, 7}.
pub fn torsion_enumerate(l: u32) -> Result<Vec<TorsionSolution>, LatticeError> {
    if !matches!(l, 2 | 3 | 5 | 7) {
        return Err(LatticeError::UnsupportedL(l));
    }
    Ok(torsion_search(l, (24 / (l + 1)) as usize))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l2_unique_all_ones() {
        let sols = torsion_enumerate(2).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].a, vec![1; 8]);
        assert_eq!(sols[0].delta_sq, -4);
    }

    #[test]
    fn l3_unique_all_ones() {
        let sols = torsion_enumerate(3).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].a, vec![1; 6]);
        assert_eq!(sols[0].delta_sq, -4);
    }

    #[test]
    fn l5_unique_1122() {
        let sols = torsion_enumerate(5).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].a, vec![1, 1, 2, 2]);
        // -(1*4 + 1*4 + 2*3 + 2*3)/5 = -4.
        assert_eq!(sols[0].delta_sq, -4);
    }

    #[test]
    fn l7_unique_123() {
        // The class is often quoted as (1, 2, 4); with representatives
        // normalized to a <= l/2 the entry 4 becomes 7 - 4 = 3, and
        // a(l - a) is unchanged (4*3 = 3*4).
        let sols = torsion_enumerate(7).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].a, vec![1, 2, 3]);
        // -(1*6 + 2*5 + 3*4)/7 = -28/7 = -4.
        assert_eq!(sols[0].delta_sq, -4);
    }

    #[test]
    fn survivors_have_no_zero_entries() {
        for l in [2, 3, 5, 7] {
            for sol in torsion_enumerate(l).unwrap() {
                assert!(sol.a.iter().all(|&x| x != 0), "l = {l}: {:?}", sol.a);
            }
        }
    }

    #[test]
    fn l11_length_two_search_is_empty() {
        assert!(torsion_search(11, 2).is_empty());
    }

    #[test]
    fn unsupported_l_rejected() {
        assert!(matches!(torsion_enumerate(11), Err(LatticeError::UnsupportedL(11))));
        assert!(torsion_enumerate(4).is_err());
    }
}
