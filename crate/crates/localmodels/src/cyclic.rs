//! Tame cyclic covers of the `A_{n−1}` germ, checked by monomial bookkeeping.
//!
//! For the weight-`(1, −1)` scaling action of a cyclic group of order `n` on
//! a smooth surface germ `k[[x, y]]`, the invariant ring is generated by
//! `X = x^n`, `Y = y^n`, `Z = xy`, subject to `Z^n = XY` — the `A_{n−1}`
//! germ.  This statement is purely about the grading and holds in every
//! characteristic prime to `n`, so it can be certified by comparing two sets
//! of exponent vectors below a degree bound.

use std::collections::BTreeSet;

/// Checks that the monomials `x^n`, `y^n`, `xy` generate exactly the
/// weight-zero monomials in total degree below `jet_order`.
pub fn mu_n_cover_local(n: u32, jet_order: u64) -> bool {
    assert!((2..=12).contains(&n), "order out of the supported range");
    let cap = jet_order as i64;
    let n = n as i64;

    let invariant: BTreeSet<(i64, i64)> = (0..cap)
        .flat_map(|a| (0..cap).map(move |b| (a, b)))
        .filter(|&(a, b)| a + b < cap && (a - b).rem_euclid(n) == 0)
        .collect();

    let mut generated = BTreeSet::from([(0i64, 0i64)]);
    let mut frontier = vec![(0i64, 0i64)];
    while let Some((a, b)) = frontier.pop() {
        for (da, db) in [(n, 0), (0, n), (1, 1)] {
            let next = (a + da, b + db);
            if next.0 + next.1 < cap && generated.insert(next) {
                frontier.push(next);
            }
        }
    }

    generated == invariant
}

#[cfg(test)]
mod tests {
    use super::*;
    use charp_core::{Fq, MPoly, Ring};
    use charp_lattice::AdeClass;
    use charp_singular::{classify_germ, Classification};

    #[test]
    fn invariants_match_for_all_supported_orders() {
        for n in 2..=12 {
            assert!(mu_n_cover_local(n, 24), "order {n}");
        }
    }

    #[test]
    fn quotient_relation_is_the_a1_germ() {
        // Z² − XY with X = x², Y = y², Z = xy: the relation holds
        // identically, and the germ it defines is A₁.
        for p in [3u64, 5] {
            let field = Fq::prime(p).unwrap();
            let ring = Ring::new(&field, &["X", "Y", "Z"]);
            let rel = MPoly::var(&ring, 2)
                .pow(2)
                .sub(&MPoly::var(&ring, 0).mul(&MPoly::var(&ring, 1)));
            match classify_germ(&rel).unwrap() {
                Classification::Rdp(t) => assert_eq!(t.class, AdeClass::a(1)),
                other => panic!("expected A1, got {other:?}"),
            }
            let r2 = Ring::new(&field, &["x", "y"]);
            let x = MPoly::var(&r2, 0);
            let y = MPoly::var(&r2, 1);
            let subst = rel.subst(&[x.pow(2), y.pow(2), x.mul(&y)]);
            assert!(subst.is_zero());
        }
    }
}
