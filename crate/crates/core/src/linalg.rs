//! Exact dense linear algebra over the finite fields.
//!
//! Small helper routines used wherever a module needs to solve a linear
//! system with polynomial coefficients collected monomial-by-monomial:
//! reduced row echelon form, one canonical solution of `A x = b` (free
//! variables pinned to zero), and a kernel basis.  Everything is exact;
//! matrices are dense `Vec<Vec<FqElem>>` rows, which is ample for the
//! sizes that arise here (hundreds of columns).

use crate::field::{Fq, FqElem};

/// Reduced row echelon form in place.  Every row must have the same
/// length.  Returns the pivot columns in increasing order; after the
/// call, row `r` has its pivot at `pivots[r]` with coefficient one and
/// zeros above and below, and zero rows are moved to the bottom.
pub fn rref(rows: &mut [Vec<FqElem>]) -> Vec<usize> {
    if rows.is_empty() {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let mut pivots = Vec::new();
    let mut rank = 0usize;
    for col in 0..ncols {
        // Find a row at or below `rank` with a nonzero entry in `col`.
        let Some(src) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, src);
        let inv = rows[rank][col].inv().expect("nonzero pivot");
        for c in col..ncols {
            rows[rank][c] = rows[rank][c].mul(&inv);
        }
        for r in 0..rows.len() {
            if r == rank || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone();
            for c in col..ncols {
                let delta = rows[rank][c].mul(&factor);
                rows[r][c] = rows[r][c].sub(&delta);
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    pivots
}

/// Solves `A x = b` exactly.  Returns the canonical solution with every
/// free variable set to zero, or `None` when the system is inconsistent.
pub fn solve(field: &Fq, a: &[Vec<FqElem>], b: &[FqElem]) -> Option<Vec<FqElem>> {
    assert_eq!(a.len(), b.len());
    let ncols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut aug: Vec<Vec<FqElem>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![field.zero(); ncols];
    for (r, &col) in pivots.iter().enumerate() {
        x[col] = aug[r][ncols].clone();
    }
    Some(x)
}

/// Basis of the right kernel of `A` (which has `ncols` columns; `a` may
/// be empty, in which case the kernel is all of k^ncols).  One basis
/// vector per free column, in increasing column order, each normalized
/// with a one in its free position.
pub fn kernel(field: &Fq, a: &[Vec<FqElem>], ncols: usize) -> Vec<Vec<FqElem>> {
    let mut m: Vec<Vec<FqElem>> = a.to_vec();
    let pivots = rref(&mut m);
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![field.zero(); ncols];
        v[free] = field.one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = m[r][free].neg();
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> Fq {
        Fq::prime(7).unwrap()
    }

    fn mat(field: &Fq, rows: &[&[i64]]) -> Vec<Vec<FqElem>> {
        rows.iter()
            .map(|r| r.iter().map(|&n| field.from_int(n)).collect())
            .collect()
    }

    #[test]
    fn rref_identifies_pivots() {
        let f = f7();
        let mut m = mat(&f, &[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        let pivots = rref(&mut m);
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(m[0], vec![f.from_int(1), f.from_int(0), f.from_int(1)]);
        assert_eq!(m[1], vec![f.from_int(0), f.from_int(1), f.from_int(1)]);
        assert!(m[2].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn solve_unique_system() {
        let f = f7();
        let a = mat(&f, &[&[1, 1], &[1, -1]]);
        let b = vec![f.from_int(5), f.from_int(1)];
        let x = solve(&f, &a, &b).unwrap();
        assert_eq!(x, vec![f.from_int(3), f.from_int(2)]);
    }

    #[test]
    fn solve_underdetermined_pins_free_vars() {
        let f = f7();
        let a = mat(&f, &[&[0, 1, 2]]);
        let b = vec![f.from_int(3)];
        let x = solve(&f, &a, &b).unwrap();
        // Column 1 is the pivot; columns 0 and 2 stay zero.
        assert_eq!(x, vec![f.from_int(0), f.from_int(3), f.from_int(0)]);
    }

    #[test]
    fn solve_detects_inconsistency() {
        let f = f7();
        let a = mat(&f, &[&[1, 1], &[2, 2]]);
        let b = vec![f.from_int(1), f.from_int(3)];
        assert!(solve(&f, &a, &b).is_none());
    }

    #[test]
    fn kernel_of_rank_one_map() {
        let f = f7();
        let a = mat(&f, &[&[1, 2, 3]]);
        let basis = kernel(&f, &a, 3);
        assert_eq!(basis.len(), 2);
        for v in basis {
            let dot = v[0]
                .mul(&f.from_int(1))
                .add(&v[1].mul(&f.from_int(2)))
                .add(&v[2].mul(&f.from_int(3)));
            assert!(dot.is_zero());
        }
    }
}
