//! Buchberger's algorithm producing the unique reduced Gröbner basis for
//! the ring's weighted grevlex order, plus multivariate normal forms.
//!
//! Strategy: S-pairs are processed in ascending order of the weighted
//! degree of the pair's monomial lcm (ties by insertion index), with the
//! coprime-leading-monomial criterion to discard trivial pairs.  The final
//! basis is minimalized, interreduced, made monic, and sorted with larger
//! leading monomials first, so equal ideals always yield byte-identical
//! bases.

use crate::field::FqElem;
use crate::multipoly::{MPoly, Ring};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// A reduced Gröbner basis of an ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    ring: Ring,
    gens: Vec<MPoly>,
}

fn exp_lcm(a: &[u16], b: &[u16]) -> Vec<u16> {
    a.iter().zip(b).map(|(&x, &y)| x.max(y)).collect()
}

fn exp_divides(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x <= y)
}

fn exp_sub(a: &[u16], b: &[u16]) -> Vec<u16> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

fn exp_coprime(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x == 0 || y == 0)
}

/// Fully reduces `f` modulo `basis`: no term of the result is divisible by
/// any basis leading monomial.
fn reduce_full(f: &MPoly, basis: &[MPoly]) -> MPoly {
    let ring = f.ring().clone();
    let mut rem = MPoly::zero(&ring);
    let mut h = f.clone();
    'outer: while !h.is_zero() {
        let lm = h.lm().to_vec();
        let lc = h.lc();
        for g in basis {
            if g.is_zero() {
                continue;
            }
            if exp_divides(g.lm(), &lm) {
                let factor_exp = exp_sub(&lm, g.lm());
                let factor_coeff = lc.div(&g.lc()).expect("nonzero leading coefficient");
                h = h.sub(&g.mul_term(&factor_exp, &factor_coeff));
                continue 'outer;
            }
        }
        // Leading term irreducible: move it to the remainder.
        let lt = MPoly::monomial(&ring, &lm, lc);
        rem = rem.add(&lt);
        h = h.sub(&lt);
    }
    rem
}

fn s_poly(f: &MPoly, g: &MPoly) -> MPoly {
    let lcm = exp_lcm(f.lm(), g.lm());
    let one = f.ring().field().one();
    let a = f.mul_term(&exp_sub(&lcm, f.lm()), &one.div(&f.lc()).unwrap());
    let b = g.mul_term(&exp_sub(&lcm, g.lm()), &one.div(&g.lc()).unwrap());
    a.sub(&b)
}

impl GroebnerBasis {
    /// Computes the reduced Gröbner basis of the ideal generated by `gens`.
    pub fn new(ring: &Ring, gens: &[MPoly]) -> GroebnerBasis {
        let mut basis: Vec<MPoly> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
        for g in &basis {
            assert!(g.ring() == ring, "generator from a different ring");
        }

        // Pair queue keyed by (weighted degree of the lcm, insertion index).
        let mut queue: BinaryHeap<Reverse<(u64, u64, usize, usize)>> = BinaryHeap::new();
        let mut counter: u64 = 0;
        let push_pairs = |queue: &mut BinaryHeap<Reverse<(u64, u64, usize, usize)>>,
                              basis: &[MPoly],
                              counter: &mut u64,
                              j: usize| {
            for i in 0..j {
                let lcm = exp_lcm(basis[i].lm(), basis[j].lm());
                queue.push(Reverse((ring.wdeg(&lcm), *counter, i, j)));
                *counter += 1;
            }
        };
        for j in 0..basis.len() {
            push_pairs(&mut queue, &basis, &mut counter, j);
        }

        while let Some(Reverse((_, _, i, j))) = queue.pop() {
            if exp_coprime(basis[i].lm(), basis[j].lm()) {
                continue;
            }
            let s = s_poly(&basis[i], &basis[j]);
            let r = reduce_full(&s, &basis);
            if !r.is_zero() {
                basis.push(r);
                let j = basis.len() - 1;
                push_pairs(&mut queue, &basis, &mut counter, j);
            }
        }

        // Minimalize: drop any element whose leading monomial is divisible
        // by another's.
        let mut keep = vec![true; basis.len()];
        for i in 0..basis.len() {
            if !keep[i] {
                continue;
            }
            for j in 0..basis.len() {
                if i == j || !keep[j] {
                    continue;
                }
                if exp_divides(basis[j].lm(), basis[i].lm()) {
                    // Prefer keeping j; on equal leading monomials keep the
                    // earlier element.
                    if basis[j].lm() != basis[i].lm() || j < i {
                        keep[i] = false;
                        break;
                    }
                }
            }
        }
        let minimal: Vec<MPoly> = basis
            .into_iter()
            .zip(keep)
            .filter_map(|(g, k)| if k { Some(g) } else { None })
            .collect();

        // Interreduce: fully reduce each element against the others, and
        // normalize leading coefficients to 1.
        let mut reduced: Vec<MPoly> = Vec::with_capacity(minimal.len());
        for i in 0..minimal.len() {
            let others: Vec<MPoly> = minimal
                .iter()
                .enumerate()
                .filter_map(|(j, g)| if j != i { Some(g.clone()) } else { None })
                .collect();
            let r = reduce_full(&minimal[i], &others);
            if !r.is_zero() {
                let lc_inv = r.lc().inv().unwrap();
                reduced.push(r.scale(&lc_inv));
            }
        }
        reduced.sort_by(|a, b| ring.cmp_mono(b.lm(), a.lm()));
        reduced.dedup();

        GroebnerBasis { ring: ring.clone(), gens: reduced }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// The reduced basis elements, monic, larger leading monomials first.
    pub fn generators(&self) -> &[MPoly] {
        &self.gens
    }

    /// True for the unit ideal (basis == {1}).
    pub fn is_unit_ideal(&self) -> bool {
        self.gens.len() == 1 && self.gens[0].is_one()
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.gens.is_empty()
    }

    /// The unique normal form of `f` modulo the ideal: full reduction by
    /// the reduced basis.
    pub fn normal_form(&self, f: &MPoly) -> MPoly {
        reduce_full(f, &self.gens)
    }

    /// Ideal membership test.
    pub fn contains(&self, f: &MPoly) -> bool {
        self.normal_form(f).is_zero()
    }

    /// Leading monomials of the basis (exponent vectors).
    pub fn leading_monomials(&self) -> Vec<Vec<u16>> {
        self.gens.iter().map(|g| g.lm().to_vec()).collect()
    }

    /// Monomials not divisible by any leading monomial, listed ascending in
    /// the ring order.  Returns `None` when the quotient is
    /// infinite-dimensional as a vector space.
    pub fn quotient_basis(&self, cap: usize) -> Option<Vec<Vec<u16>>> {
        let n = self.ring.nvars();
        // Finite dimension iff every variable appears alone in some
        // leading monomial as a pure power.
        let mut bound = vec![usize::MAX; n];
        for lm in self.leading_monomials() {
            if let Some(i) = pure_power_var(&lm) {
                bound[i] = bound[i].min(lm[i] as usize);
            }
            if lm.iter().all(|&e| e == 0) {
                // Unit ideal: quotient is the zero ring.
                return Some(vec![]);
            }
        }
        if bound.iter().any(|&b| b == usize::MAX) {
            return None;
        }
        let lms = self.leading_monomials();
        let mut out = Vec::new();
        let mut cur = vec![0u16; n];
        loop {
            if !lms.iter().any(|lm| exp_divides(lm, &cur)) {
                out.push(cur.clone());
                if out.len() > cap {
                    return None;
                }
            }
            // Odometer over the box [0, bound].
            let mut i = 0;
            loop {
                if i == n {
                    out.sort_by(|a, b| self.ring.cmp_mono(a, b));
                    return Some(out);
                }
                if (cur[i] as usize) < bound[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
        }
    }
}

/// If `exps` is a pure power of one variable, returns that variable.
fn pure_power_var(exps: &[u16]) -> Option<usize> {
    let mut found = None;
    for (i, &e) in exps.iter().enumerate() {
        if e > 0 {
            if found.is_some() {
                return None;
            }
            found = Some(i);
        }
    }
    found
}

/// Divides `f` by `g` exactly in the polynomial ring; `None` if `g` does
/// not divide `f`.
pub fn div_exact(f: &MPoly, g: &MPoly) -> Option<MPoly> {
    assert!(!g.is_zero(), "division by the zero polynomial");
    let ring = f.ring().clone();
    let mut q = MPoly::zero(&ring);
    let mut h = f.clone();
    while !h.is_zero() {
        let lm = h.lm().to_vec();
        if !exp_divides(g.lm(), &lm) {
            return None;
        }
        let factor_exp = exp_sub(&lm, g.lm());
        let factor_coeff = h.lc().div(&g.lc()).unwrap();
        let t = MPoly::monomial(&ring, &factor_exp, factor_coeff);
        q = q.add(&t);
        h = h.sub(&g.mul(&t));
    }
    Some(q)
}

/// One division step helper exposed for tests: remainder of `f` on full
/// division by `gens` (not necessarily a Gröbner basis, so only a
/// containment certificate when zero).
pub fn remainder(f: &MPoly, gens: &[MPoly]) -> MPoly {
    reduce_full(f, gens)
}

/// Coefficients `c` such that `f = sum c_i * basis_mono_i` modulo the
/// ideal, with respect to `quotient_basis` monomials; `None` if the normal
/// form involves a monomial outside the given list.
pub fn coords_in_quotient(
    gb: &GroebnerBasis,
    f: &MPoly,
    basis_monos: &[Vec<u16>],
) -> Option<Vec<FqElem>> {
    let nf = gb.normal_form(f);
    let zero = gb.ring().field().zero();
    let mut coords = vec![zero; basis_monos.len()];
    for (e, c) in nf.terms() {
        let idx = basis_monos.iter().position(|m| m == e)?;
        coords[idx] = c.clone();
    }
    Some(coords)
}
