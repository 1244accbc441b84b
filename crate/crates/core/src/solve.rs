//! Solving polynomial systems over finite fields with exact coordinates.
//!
//! Zero-dimensional ideals are solved by triangular elimination: compute
//! the minimal polynomial of the last variable in the Artinian quotient,
//! factor it, pass to the splitting extension for each irreducible
//! factor, substitute each root, and recurse on the remaining variables.
//! All coordinates are finally embedded into one common field (the
//! compositum, capped at the supported extension degree) and the points
//! are sorted and deduplicated, so the output is deterministic.
//!
//! One-dimensional ideals are reported as curves by their reduced
//! Groebner generators; higher dimension is an error.

use crate::field::{Fq, FqElem};
use crate::groebner::{coords_in_quotient, GroebnerBasis};
use crate::multipoly::{MPoly, Ring};
use crate::unipoly::UPoly;
use crate::CoreError;
use num_integer::Integer;

/// Maximum supported extension degree for solution coordinates.
pub const MAX_SOLVE_DEGREE: usize = 24;

/// Outcome of solving a polynomial system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    /// Finitely many solutions; every coordinate lives in `field`.
    ZeroDim { field: Fq, points: Vec<Vec<FqElem>> },
    /// A one-dimensional solution set, described by the reduced Groebner
    /// basis of its ideal.
    Curve { generators: Vec<MPoly> },
}

impl SolveResult {
    pub fn points(&self) -> Option<&[Vec<FqElem>]> {
        match self {
            SolveResult::ZeroDim { points, .. } => Some(points),
            SolveResult::Curve { .. } => None,
        }
    }
}

/// Krull dimension of the quotient by a monomial ideal given by the
/// leading monomials: the largest set of variables meeting the support of
/// no leading monomial.
fn dimension_from_lms(lms: &[Vec<u16>], nvars: usize) -> usize {
    let supports: Vec<u64> = lms
        .iter()
        .map(|lm| {
            lm.iter()
                .enumerate()
                .fold(0u64, |acc, (i, &e)| if e > 0 { acc | (1 << i) } else { acc })
        })
        .collect();
    let mut best = 0usize;
    for subset in 0u64..(1 << nvars) {
        if supports.iter().any(|&s| s != 0 && s & !subset == 0) {
            continue;
        }
        best = best.max(subset.count_ones() as usize);
    }
    best
}

/// Minimal polynomial of variable `var` in the Artinian quotient, via the
/// first linear dependence among normal forms of its powers.
fn minimal_polynomial(
    gb: &GroebnerBasis,
    basis_monos: &[Vec<u16>],
    var: usize,
) -> UPoly {
    let ring = gb.ring().clone();
    let field = ring.field().clone();
    let dim = basis_monos.len();
    // Echelon rows augmented with the combination over T-powers.
    let mut pivots: Vec<(usize, Vec<FqElem>, Vec<FqElem>)> = Vec::new();
    let xi = MPoly::var(&ring, var);
    let mut power = MPoly::one(&ring);
    for j in 0..=dim {
        let mut row = coords_in_quotient(gb, &power, basis_monos)
            .expect("quotient basis covers every normal form");
        let mut combo = vec![field.zero(); dim + 1];
        combo[j] = field.one();
        for (pc, prow, pcombo) in &pivots {
            let factor = row[*pc].clone();
            if factor.is_zero() {
                continue;
            }
            for (r, p) in row.iter_mut().zip(prow) {
                *r = r.sub(&p.mul(&factor));
            }
            for (k, p) in pcombo.iter().enumerate() {
                combo[k] = combo[k].sub(&p.mul(&factor));
            }
        }
        match row.iter().position(|c| !c.is_zero()) {
            Some(pc) => {
                let inv = row[pc].inv().unwrap();
                let row: Vec<FqElem> = row.iter().map(|c| c.mul(&inv)).collect();
                let combo: Vec<FqElem> = combo.iter().map(|c| c.mul(&inv)).collect();
                pivots.push((pc, row, combo));
                power = power.mul(&xi);
            }
            None => {
                return UPoly::new(&field, combo);
            }
        }
    }
    unreachable!("powers of a variable in an Artinian ring must become dependent")
}

fn extension_of(field: &Fq, rel_degree: usize) -> Result<Fq, CoreError> {
    let k = field.degree() * rel_degree;
    if k > MAX_SOLVE_DEGREE {
        return Err(CoreError::ExtensionTooLarge(k));
    }
    Fq::new(field.p(), k)
}

/// Removes variable `var` (which must not occur) from every term.
fn drop_var(f: &MPoly, target: &Ring, var: usize) -> MPoly {
    let terms = f
        .terms()
        .iter()
        .map(|(e, c)| {
            assert_eq!(e[var], 0, "variable still present after substitution");
            let mut ne = e.clone();
            ne.remove(var);
            (ne, c.clone())
        })
        .collect();
    MPoly::from_terms(target, terms)
}

fn solve_rec(ring: &Ring, gens: &[MPoly]) -> Result<Vec<Vec<FqElem>>, CoreError> {
    let gb = GroebnerBasis::new(ring, gens);
    if gb.is_unit_ideal() {
        return Ok(vec![]);
    }
    if ring.nvars() == 0 {
        return Ok(vec![vec![]]);
    }
    let basis_monos = gb
        .quotient_basis(100_000)
        .expect("zero-dimensional at every recursion level");
    let var = ring.nvars() - 1;
    let minpoly = minimal_polynomial(&gb, &basis_monos, var);
    let factors = minpoly.factor()?;

    let mut points: Vec<Vec<FqElem>> = Vec::new();
    for (f, _mult) in factors {
        let d = f.degree().expect("nonconstant factor");
        let big = if d == 1 {
            ring.field().clone()
        } else {
            extension_of(ring.field(), d)?
        };
        let f_big = if d == 1 {
            f.clone()
        } else {
            UPoly::new(
                &big,
                f.coeffs()
                    .iter()
                    .map(|c| c.embed_into(&big))
                    .collect::<Result<Vec<_>, _>>()?,
            )
        };
        let roots = f_big.roots_in_field();
        debug_assert_eq!(roots.len(), d, "irreducible factor splits in its root field");

        let big_ring = ring.extend_field(&big);
        let mut small_names = ring.names();
        small_names.remove(var);
        let mut small_weights = ring.weights().to_vec();
        small_weights.remove(var);
        let small_ring = Ring::weighted(&big, &small_names, &small_weights);

        for a in roots {
            let mut sub_gens = Vec::with_capacity(gens.len());
            for g in gens {
                let g_big = g.embed_into(&big_ring)?;
                let g_sub = g_big.subst_var(var, &MPoly::constant(&big_ring, a.clone()));
                sub_gens.push(drop_var(&g_sub, &small_ring, var));
            }
            for mut point in solve_rec(&small_ring, &sub_gens)? {
                point.push(a.clone());
                points.push(point);
            }
        }
    }
    Ok(points)
}

/// Solves `gens = 0`.  Dimension 0 yields explicit points over one common
/// extension field; dimension 1 yields the curve's reduced Groebner
/// generators; anything higher is an error.
pub fn solve_zero_dim(ring: &Ring, gens: &[MPoly]) -> Result<SolveResult, CoreError> {
    let gb = GroebnerBasis::new(ring, gens);
    if gb.is_unit_ideal() {
        return Ok(SolveResult::ZeroDim { field: ring.field().clone(), points: vec![] });
    }
    let dim = dimension_from_lms(&gb.leading_monomials(), ring.nvars());
    match dim {
        0 => {
            let raw_points = solve_rec(ring, gb.generators())?;
            // Compositum of all coordinate fields.
            let p = ring.field().p();
            let mut k = ring.field().degree();
            for pt in &raw_points {
                for c in pt {
                    k = k.lcm(&c.field().degree());
                }
            }
            if k > MAX_SOLVE_DEGREE {
                return Err(CoreError::ExtensionTooLarge(k));
            }
            let field = Fq::new(p, k)?;
            let mut points: Vec<Vec<FqElem>> = raw_points
                .into_iter()
                .map(|pt| {
                    pt.into_iter()
                        .map(|c| c.embed_into(&field))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<_, _>>()?;
            points.sort_by_key(|pt| {
                pt.iter().map(|c| c.canonical_index()).collect::<Vec<_>>()
            });
            points.dedup();
            Ok(SolveResult::ZeroDim { field, points })
        }
        1 => Ok(SolveResult::Curve { generators: gb.generators().to_vec() }),
        d => Err(CoreError::NotZeroDimAndNotCurve(d)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5_ring() -> Ring {
        Ring::new(&Fq::new(5, 1).unwrap(), &["x", "y"])
    }

    #[test]
    fn linear_system_single_point() {
        let r = f5_ring();
        let gens = [
            MPoly::parse(&r, "x + 2").unwrap(),
            MPoly::parse(&r, "y - 1").unwrap(),
        ];
        let res = solve_zero_dim(&r, &gens).unwrap();
        let SolveResult::ZeroDim { field, points } = res else {
            panic!("expected points")
        };
        assert_eq!(field.degree(), 1);
        assert_eq!(points, vec![vec![field.from_int(3), field.from_int(1)]]);
    }

    #[test]
    fn rational_points_of_a_split_system() {
        // x^2 = 1, y^2 = 4 over F_5: four rational points.
        let r = f5_ring();
        let gens = [
            MPoly::parse(&r, "x^2 - 1").unwrap(),
            MPoly::parse(&r, "y^2 - 4").unwrap(),
        ];
        let res = solve_zero_dim(&r, &gens).unwrap();
        let pts = res.points().unwrap();
        assert_eq!(pts.len(), 4);
        let f5 = Fq::new(5, 1).unwrap();
        assert!(pts.contains(&vec![f5.from_int(4), f5.from_int(3)]));
    }

    #[test]
    fn solutions_requiring_an_extension() {
        // x^2 = 2 has no root in F_5; y = x: two points over F_25.
        let r = f5_ring();
        let gens = [
            MPoly::parse(&r, "x^2 - 2").unwrap(),
            MPoly::parse(&r, "y - x").unwrap(),
        ];
        let res = solve_zero_dim(&r, &gens).unwrap();
        let SolveResult::ZeroDim { field, points } = res else {
            panic!("expected points")
        };
        assert_eq!(field.degree(), 2);
        assert_eq!(points.len(), 2);
        for pt in points {
            assert_eq!(pt[0], pt[1]);
            assert_eq!(pt[0].mul(&pt[0]), field.from_int(2));
        }
    }

    #[test]
    fn mixed_extensions_unify() {
        // x^2 = 2 (degree 2) and y^3 + y + 1 = 0 (irreducible over F_5,
        // degree 3): compositum F_{5^6}.
        let r = f5_ring();
        let gens = [
            MPoly::parse(&r, "x^2 - 2").unwrap(),
            MPoly::parse(&r, "y^3 + y + 1").unwrap(),
        ];
        let res = solve_zero_dim(&r, &gens).unwrap();
        let SolveResult::ZeroDim { field, points } = res else {
            panic!("expected points")
        };
        assert_eq!(field.degree(), 6);
        assert_eq!(points.len(), 6);
    }

    #[test]
    fn empty_variety() {
        let r = f5_ring();
        let gens = [MPoly::parse(&r, "x^2 + x + 1").unwrap(), MPoly::one(&r)];
        let res = solve_zero_dim(&r, &gens).unwrap();
        assert_eq!(res.points().unwrap().len(), 0);
    }

    #[test]
    fn nilpotents_do_not_duplicate_points() {
        // (x^2, y) has the single solution (0, 0).
        let r = f5_ring();
        let gens = [
            MPoly::parse(&r, "x^2").unwrap(),
            MPoly::parse(&r, "y").unwrap(),
        ];
        let res = solve_zero_dim(&r, &gens).unwrap();
        let f5 = Fq::new(5, 1).unwrap();
        assert_eq!(res.points().unwrap(), &[vec![f5.zero(), f5.zero()]]);
    }

    #[test]
    fn curve_is_reported_by_generators() {
        let f2 = Fq::new(2, 1).unwrap();
        let r = Ring::new(&f2, &["x", "y", "z"]);
        let gens = [MPoly::parse(&r, "x*y").unwrap(), MPoly::parse(&r, "x*z").unwrap()];
        // V(xy, xz) = {x = 0} plane union the y=z=0 line: dimension 2.
        assert!(matches!(
            solve_zero_dim(&r, &gens),
            Err(CoreError::NotZeroDimAndNotCurve(2))
        ));
        let gens = [MPoly::parse(&r, "x").unwrap(), MPoly::parse(&r, "y^2 + z^3").unwrap()];
        let res = solve_zero_dim(&r, &gens).unwrap();
        let SolveResult::Curve { generators } = res else {
            panic!("expected a curve")
        };
        assert_eq!(generators.len(), 2);
    }

    #[test]
    fn frozen_count_char2_cubic() {
        // y^2 = x^3 + x over F_2: solutions in F_2 x F_2 of the affine
        // equation: (0,0), (1,0). As a system with the derivative 3x^2+1
        // = x^2 + 1: common zeros: x = 1, y^2 = 0 -> (1, 0).
        let f2 = Fq::new(2, 1).unwrap();
        let r = Ring::new(&f2, &["x", "y"]);
        let gens = [
            MPoly::parse(&r, "y^2 + x^3 + x").unwrap(),
            MPoly::parse(&r, "x^2 + 1").unwrap(),
        ];
        let res = solve_zero_dim(&r, &gens).unwrap();
        let pts = res.points().unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0], vec![f2.one(), f2.zero()]);
    }
}
