//! Regularity certificates for the canonical degree-`p` covering.
//!
//! In characteristic 2 the covering ring is generated over the germ by two
//! sections `u, v` subject to
//!
//! ```text
//!   u² + λxu   − x² f  = x   (D family; = y for E₈)
//!   v² + λy^m v − y^{2m} f = y   (D family; = x for E₈)
//!   y^m u − xv = z
//! ```
//!
//! for an arbitrary regular correction `f`.  Two finite checks certify
//! regularity: the three relations are consistent with the equation `F`
//! (substituting `z = y^m u − xv` and rewriting `u², v²` kills `F`
//! identically), and the sections generate the maximal ideal (the local
//! quotient by `(u, v)` and the relations is one-dimensional).
//!
//! For the additive boundary `r = 0` in every characteristic, the covering
//! carries a derivation `D` whose value on the distinguished coordinate is
//! `−c + F_{x_{i+2}} f_{x_{i+1}} − F_{x_{i+1}} f_{x_{i+2}}`, a unit — so the
//! fixed locus is empty and the covering is regular.  The constants are
//! `c = 1, 1, 3` and `i = 3, 1, 2` for `p = 2, 3, 5` (indices mod 3 on
//! `(x₁,x₂,x₃) = (x,y,z)`), and the premise is `F_{x_i} = 0`.

use charp_core::{local_quotient_dim, FqElem, Fq, MPoly, Ring, UPoly};
use charp_lattice::AdeFamily;

use crate::data::RdpLocalData;

/// Sample regular correction terms in the listed variables.
fn samples(ring: &Ring, names: &[&str]) -> Vec<MPoly> {
    let mut out = vec![MPoly::zero(ring), MPoly::one(ring)];
    let exprs: &[&str] = if names.contains(&"z") {
        &["x+y+z", "x*y", "z^2+y", "y^3"]
    } else {
        &["x+y", "x*y", "y^3"]
    };
    for e in exprs {
        out.push(MPoly::parse(ring, e).expect("sample parses"));
    }
    out
}

/// Right-hand sides of the two quadratic section relations: `(x, y)` for the
/// D family and `(y, x)` for E₈.
fn section_targets(data: &RdpLocalData, x: &MPoly, y: &MPoly) -> (MPoly, MPoly) {
    match data.label.class.family {
        AdeFamily::D => (x.clone(), y.clone()),
        _ => (y.clone(), x.clone()),
    }
}

/// Replaces every occurrence of `var²` by `rhs` until the exponent of `var`
/// is at most 1 in every term.  `rhs` must have `var`-degree ≤ 1.
fn reduce_square(mut g: MPoly, ring: &Ring, var: usize, rhs: &MPoly) -> MPoly {
    debug_assert!(rhs.terms().iter().all(|(e, _)| e[var] <= 1));
    loop {
        let mut found: Option<(Vec<u16>, FqElem)> = None;
        for (e, c) in g.terms() {
            if e[var] >= 2 {
                found = Some((e.clone(), c.clone()));
                break;
            }
        }
        let Some((e, c)) = found else {
            return g;
        };
        let mut rest = e.clone();
        rest[var] -= 2;
        let monom = MPoly::from_terms(ring, vec![(e, c.clone())]);
        g = g.sub(&monom).add(&rhs.mul_term(&rest, &c));
    }
}

/// Characteristic-2 consistency: substituting `z = y^m u − xv` into `F` and
/// rewriting `u², v²` by their relations yields the zero polynomial, for each
/// sample correction `f` (the correction cancels identically).
fn relations_kill_equation(data: &RdpLocalData) -> bool {
    let ring4 = Ring::new(data.ring.field(), &["x", "y", "u", "v"]);
    let x = MPoly::var(&ring4, 0);
    let y = MPoly::var(&ring4, 1);
    let u = MPoly::var(&ring4, 2);
    let v = MPoly::var(&ring4, 3);
    let zsub = y.pow(data.m).mul(&u).add(&x.mul(&v));
    let f_sub = data.f.subst(&[x.clone(), y.clone(), zsub]);
    let lambda = data.lambda.subst(&[x.clone(), y.clone(), MPoly::zero(&ring4)]);
    let (tu, tv) = section_targets(data, &x, &y);
    for f in samples(&ring4, &["x", "y"]) {
        // u² = λxu + x²f + target_u  (characteristic 2).
        let rhs_u = lambda
            .mul(&x)
            .mul(&u)
            .add(&x.pow(2).mul(&f))
            .add(&tu);
        let rhs_v = lambda
            .mul(&y.pow(data.m))
            .mul(&v)
            .add(&y.pow(2 * data.m).mul(&f))
            .add(&tv);
        let reduced = reduce_square(f_sub.clone(), &ring4, 2, &rhs_u);
        let reduced = reduce_square(reduced, &ring4, 3, &rhs_v);
        if !reduced.is_zero() {
            return false;
        }
    }
    true
}

/// Characteristic-2 span check: modulo the three relations and `F`, the ideal
/// `(u, v)` cuts out exactly the closed point, so the sections generate the
/// maximal ideal of the covering ring.
fn sections_generate_maximal_ideal(data: &RdpLocalData) -> bool {
    let ring5 = Ring::new(data.ring.field(), &["x", "y", "z", "u", "v"]);
    let x = MPoly::var(&ring5, 0);
    let y = MPoly::var(&ring5, 1);
    let z = MPoly::var(&ring5, 2);
    let u = MPoly::var(&ring5, 3);
    let v = MPoly::var(&ring5, 4);
    let into5 = |g: &MPoly| g.subst(&[x.clone(), y.clone(), z.clone()]);
    let f5 = into5(&data.f);
    let lambda = into5(&data.lambda);
    let (tu, tv) = section_targets(data, &x, &y);
    for f in samples(&ring5, &["x", "y"]) {
        let r1 = u
            .pow(2)
            .add(&lambda.mul(&x).mul(&u))
            .add(&x.pow(2).mul(&f))
            .add(&tu);
        let r2 = v
            .pow(2)
            .add(&lambda.mul(&y.pow(data.m)).mul(&v))
            .add(&y.pow(2 * data.m).mul(&f))
            .add(&tv);
        let r3 = y.pow(data.m).mul(&u).add(&x.mul(&v)).add(&z);
        let gens = vec![u.clone(), v.clone(), r1, r2, r3, f5.clone()];
        match local_quotient_dim(&gens) {
            Ok(res) if res.finite() == Some(1) => {}
            _ => return false,
        }
    }
    true
}

/// The additive-boundary unit certificate: `F_{x_i} = 0` and
/// `−c + F_{x_{i+2}} f_{x_{i+1}} − F_{x_{i+1}} f_{x_{i+2}}` is a unit at the
/// origin for every sample correction `f`.
fn unit_criterion(data: &RdpLocalData) -> bool {
    let (c, i) = match data.p {
        2 => (1i64, 3usize),
        3 => (1, 1),
        5 => (3, 2),
        _ => return false,
    };
    // 0-based coordinate indices, cyclically.
    let xi = i - 1;
    let xi1 = i % 3;
    let xi2 = (i + 1) % 3;
    if !data.f.partial(xi).is_zero() {
        return false;
    }
    let f_i1 = data.f.partial(xi1);
    let f_i2 = data.f.partial(xi2);
    for f in samples(&data.ring, &["x", "y", "z"]) {
        let expr = MPoly::from_int(&data.ring, -c)
            .add(&f_i2.mul(&f.partial(xi1)))
            .sub(&f_i1.mul(&f.partial(xi2)));
        if !expr.is_unit_at_origin() {
            return false;
        }
    }
    true
}

/// For the unit-`λ` regimes in characteristic 3 and 5 the chart coverings are
/// translated by a root `μ` of `μ^{p−1} = λ`; the certificate is that the
/// root exists in a bounded extension (then `t ↦ t + μ` preserves
/// `t^p − λt − q` exactly, since `μ^p − λμ = 0`).
fn structure_root_exists(p: u32, lambda: &FqElem) -> bool {
    find_structure_root(p, lambda).is_some()
}

/// Finds a root `μ` of `μ^{p−1} = λ` in the smallest extension of degree
/// at most 4, along with the field it lives in.
pub(crate) fn find_structure_root(p: u32, lambda: &FqElem) -> Option<(Fq, FqElem)> {
    for k in 1..=4 {
        let Ok(field) = Fq::new(u64::from(p), k) else {
            return None;
        };
        let Ok(lam) = lambda.embed_into(&field) else {
            continue;
        };
        let mut coeffs = vec![field.zero(); p as usize];
        coeffs[0] = lam.neg();
        coeffs[p as usize - 1] = field.one();
        let poly = UPoly::new(&field, coeffs);
        if let Some(root) = poly.roots_in_field().into_iter().next() {
            return Some((field, root));
        }
    }
    None
}

/// Certifies regularity of the canonical covering for a catalogued tuple.
pub fn verify_covering_regularity(data: &RdpLocalData) -> bool {
    match data.p {
        2 => {
            relations_kill_equation(data)
                && sections_generate_maximal_ideal(data)
                && (data.r != 0 || unit_criterion(data))
        }
        3 | 5 => {
            if data.r == 0 {
                unit_criterion(data)
            } else {
                match data.lambda_scalar() {
                    Some(lam) => structure_root_exists(data.p, &lam),
                    None => false,
                }
            }
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::rdp_local_data;
    use charp_lattice::AdeClass;

    #[test]
    fn unit_criterion_constant_for_char5_is_three() {
        let data = rdp_local_data(5, AdeClass::e(8), 0).unwrap();
        // Premise: the distinguished partial (here F_y) vanishes identically.
        assert!(data.f.partial(1).is_zero());
        // With f = 0 the expression is the constant −3 = 2, a unit.
        assert!(unit_criterion(&data));
        assert!(verify_covering_regularity(&data));
    }

    #[test]
    fn char2_relations_cancel_for_all_coindices() {
        for (class, r) in [
            (AdeClass::d(4), 0),
            (AdeClass::d(8), 1),
            (AdeClass::d(8), 2),
            (AdeClass::e(8), 0),
            (AdeClass::e(8), 1),
            (AdeClass::e(8), 2),
        ] {
            let data = rdp_local_data(2, class, r).unwrap();
            assert!(relations_kill_equation(&data), "{class} r={r}");
        }
    }

    #[test]
    fn sections_cut_out_the_closed_point() {
        let data = rdp_local_data(2, AdeClass::d(8), 2).unwrap();
        assert!(sections_generate_maximal_ideal(&data));
    }

    #[test]
    fn unit_lambda_roots_live_in_bounded_extensions() {
        // λ = 1 in characteristic 3: μ² = 1 has the root 1 in F₃.
        let data = rdp_local_data(3, AdeClass::e(6), 1).unwrap();
        assert!(verify_covering_regularity(&data));
        // λ = 2 in characteristic 5: μ⁴ = 2 needs F_{5⁴} (2 generates F₅*),
        // so no root exists over the prime field itself.
        let data = rdp_local_data(5, AdeClass::e(8), 1).unwrap();
        let lam = data.lambda_scalar().unwrap();
        let f1 = Fq::prime(5).unwrap();
        let mut coeffs = vec![f1.zero(); 5];
        coeffs[0] = lam.neg();
        coeffs[4] = f1.one();
        assert!(UPoly::new(&f1, coeffs).roots_in_field().is_empty());
        assert!(structure_root_exists(5, &lam));
        assert!(verify_covering_regularity(&data));
    }

    #[test]
    fn equation_mutation_breaks_consistency() {
        // Damaging F must be caught by the rewrite certificate.
        let mut data = rdp_local_data(2, AdeClass::d(4), 0).unwrap();
        data.f = data.f.add(&data.x().pow(2));
        assert!(!relations_kill_equation(&data));
    }
}
