//! The Euler-number balance for p-closed vector fields on K3 surfaces, and
//! the chain coefficient function `f_n`.

use crate::LatticeError;
use num_rational::Ratio;

/// Checks the Euler-number balance for a purely inseparable degree-p
/// quotient between RDP K3 surfaces.
///
/// With `m_i` the RDP indices upstairs and `n_j` downstairs, the identity
///
/// ```text
/// sum_i p m_i / (p-1)  +  sum_j n_j / (p-1)  =  24
/// ```
///
/// must hold in exact rational arithmetic, and both total indices must equal
/// `24(p-1)/(p+1)`.  Returns `true` iff all three equalities hold.
pub fn c2_balance(p: u32, rdp_indices_x: &[u32], rdp_indices_y: &[u32]) -> bool {
    debug_assert!(matches!(p, 2 | 3 | 5 | 7), "characteristic must be 2, 3, 5, or 7");
    let p = i64::from(p);
    let sum_m: i64 = rdp_indices_x.iter().map(|&m| i64::from(m)).sum();
    let sum_n: i64 = rdp_indices_y.iter().map(|&n| i64::from(n)).sum();

    let lhs = Ratio::new(p * sum_m, p - 1) + Ratio::new(sum_n, p - 1);
    let balance = lhs == Ratio::from_integer(24);

    let total = Ratio::new(24 * (p - 1), p + 1);
    let totals = Ratio::from_integer(sum_m) == total && Ratio::from_integer(sum_n) == total;

    balance && totals
}

/// The coefficient function on a chain of `n-1` rational curves:
///
/// ```text
/// f_n(h, j) = h j            if j <= n - h
///           = (n - h)(n - j) if j >= n - h
/// ```
///
/// for `1 <= h, j <= n-1`.  The two branches agree at `j = n - h`, and
/// `f_n(h, j) = h j (mod n)` always.
pub fn f_n(n: u64, h: u64, j: u64) -> Result<u64, LatticeError> {
    if n < 2 || h == 0 || j == 0 || h > n - 1 || j > n - 1 {
        return Err(LatticeError::OutOfRange { n, h, j });
    }
    Ok(if j <= n - h { h * j } else { (n - h) * (n - j) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balance_over_the_known_quotient_configurations() {
        // 8 A_1 <-> 8 A_1 in characteristic 2.
        assert!(c2_balance(2, &[1; 8], &[1; 8]));
        // 6 A_2 <-> 6 A_2 in characteristic 3.
        assert!(c2_balance(3, &[2; 6], &[2; 6]));
        // 4 A_4 <-> 4 A_4 in characteristic 5.
        assert!(c2_balance(5, &[4; 4], &[4; 4]));
        // 3 A_6 <-> 3 A_6 in characteristic 7.
        assert!(c2_balance(7, &[6; 3], &[6; 3]));
        // 2 E_8 <-> 2 E_8 in characteristic 5: 5*16/4 + 16/4 = 24.
        assert!(c2_balance(5, &[8, 8], &[8, 8]));
        // Mixed additive configurations in characteristic 2 (total 8 each).
        assert!(c2_balance(2, &[4, 4], &[8]));
        assert!(c2_balance(2, &[8], &[4, 4]));
        assert!(c2_balance(2, &[4, 4], &[4, 4]));
        // 2 E_6 <-> 2 E_6 in characteristic 3.
        assert!(c2_balance(3, &[6, 6], &[6, 6]));
    }

    #[test]
    fn balance_rejects_wrong_totals() {
        assert!(!c2_balance(2, &[1; 7], &[1; 8]));
        assert!(!c2_balance(2, &[1; 8], &[1; 9]));
        assert!(!c2_balance(3, &[2; 6], &[2; 5]));
        assert!(!c2_balance(5, &[8, 8], &[8, 7]));
        // Right grand total split the wrong way across the two surfaces.
        assert!(!c2_balance(2, &[1; 12], &[1; 4]));
    }

    #[test]
    fn f_5_first_row_is_identity() {
        for j in 1..=4 {
            assert_eq!(f_n(5, 1, j).unwrap(), j);
        }
    }

    #[test]
    fn f_5_branch_values() {
        assert_eq!(f_n(5, 2, 3).unwrap(), 6);
        assert_eq!(f_n(5, 2, 4).unwrap(), 3);
    }

    #[test]
    fn branch_overlap_is_consistent() {
        // At j = n - h both branch formulas give h(n-h).
        for n in 2..=30u64 {
            for h in 1..=n - 1 {
                let j = n - h;
                if j >= 1 && j <= n - 1 {
                    assert_eq!(f_n(n, h, j).unwrap(), h * (n - h));
                }
            }
        }
    }

    #[test]
    fn congruence_exhaustive_to_30() {
        for n in 2..=30u64 {
            for h in 1..=n - 1 {
                for j in 1..=n - 1 {
                    let v = f_n(n, h, j).unwrap();
                    assert_eq!(v % n, (h * j) % n, "f_{n}({h},{j})");
                }
            }
        }
    }

    #[test]
    fn out_of_range_arguments_error() {
        assert!(f_n(5, 0, 1).is_err());
        assert!(f_n(5, 1, 5).is_err());
        assert!(f_n(5, 5, 1).is_err());
        assert!(f_n(1, 1, 1).is_err());
    }
}
