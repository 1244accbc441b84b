//! Fixed loci and invariant subrings of p-closed derivations on a smooth
//! surface germ k[[x, y]].
//!
//! Writing `D = f * (g1 d/dx + g2 d/dy)` with `gcd(g1, g2) = 1` splits the
//! fixed locus into a divisorial part `(f = 0)` and an isolated part whose
//! degree is `dim_k k[[x, y]]/(g1, g2)`.  When the divisorial part is
//! trivial, the invariant subring is a hypersurface `k[[X, Y, Z]]/(G)`;
//! this module computes the three generators and the relation exactly.
//! In characteristic 2 the structure theory is sharper: `D = h * D'` with
//! `D'(x) = S^2 + T^2 x`, `D'(y) = R^2 + T^2 y`, and the singularity of
//! the quotient is decided by a colength tree on the triple `(R, S, T)`.

use std::collections::HashMap;

use charp_core::groebner::div_exact;
use charp_core::linalg;
use charp_core::{
    local_quotient_dim, monomials_below, Fq, FqElem, LocalDim, LocalDimResult, MPoly, Ring, UPoly,
};
use charp_lattice::{AdeClass, RdpType};

use crate::classify::{classify_germ, tjurina, Classification};
use crate::deriv::{Derivation, GroupType};
use crate::SingularError;

/// The two parts of the fixed locus of a derivation on k[[x, y]].
#[derive(Debug, Clone)]
pub struct FixedLocus {
    /// Greatest common divisor of the two images, normalized so that its
    /// leading coefficient is one: the equation of the divisorial part.
    pub divisorial: MPoly,
    /// Coprime cofactors `(g1, g2)` with `D = divisorial * (g1 dx + g2 dy)`.
    pub cofactors: [MPoly; 2],
    /// Degree of the isolated part: `dim_k k[[x, y]]/(g1, g2)`.
    pub isolated_degree: LocalDimResult,
}

/// Three invariant generators of the quotient and the relation they satisfy.
#[derive(Debug, Clone)]
pub struct QuotientPresentation {
    /// `X = x^p`, `Y = y^p`, and a third invariant `Z`, as elements of
    /// k[[x, y]].  All three are killed exactly by the derivation.
    pub generators: [MPoly; 3],
    /// `G(X, Y, Z)`: an exact algebraic relation among the generators,
    /// living in a fresh ring k[X, Y, Z] and monic in its leading monomial.
    pub relation: MPoly,
    /// Jet order to which generation of the full invariant ring by the
    /// three elements has been certified (the relation itself is exact).
    pub certified_order: u64,
}

/// Characteristic-2 structure data: `D = h * D'` with
/// `D'(x) = S^2 + T^2 x` and `D'(y) = R^2 + T^2 y`, which forces
/// `D'^2 = T^2 D'`.  The triple `(R, S, T)` has no common factor once the
/// divisorial part of the fixed locus is removed.
#[derive(Debug, Clone)]
pub struct Char2Data {
    /// Unit factor relating `D` to the normal form `D'`.
    pub h: MPoly,
    pub r: MPoly,
    pub s: MPoly,
    pub t: MPoly,
}

/// Outcome of the characteristic-2 quotient decision tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Char2Quotient {
    /// The quotient is regular.
    Smooth,
    /// A rational double point of the given type.
    Rdp(RdpType),
    /// An elliptic (minimally, not rational) double point, with the degree
    /// of its leading normal form and the family it deforms.
    EllipticDoublePoint { degree: u32, family: &'static str },
    /// Worse than any double point of degree at most 12.
    Beyond12,
}

impl std::fmt::Display for Char2Quotient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Char2Quotient::Smooth => write!(f, "smooth"),
            Char2Quotient::Rdp(t) => write!(f, "{t}"),
            Char2Quotient::EllipticDoublePoint { degree, family } => {
                write!(f, "elliptic double point of degree {degree} ({family})")
            }
            Char2Quotient::Beyond12 => write!(f, "beyond degree 12"),
        }
    }
}

// ---------------------------------------------------------------------------
// Bivariate gcd over k[x, y] via primitive pseudo-remainders in k[x][y].
// ---------------------------------------------------------------------------

/// Coefficient vector in y over k[x]: entry `j` is the coefficient of `y^j`.
fn to_ypoly(f: &MPoly) -> Vec<UPoly> {
    let field = f.ring().field().clone();
    let dy = f.terms().iter().map(|(e, _)| e[1] as usize).max().unwrap_or(0);
    let mut rows: Vec<Vec<FqElem>> = vec![Vec::new(); dy + 1];
    for (e, c) in f.terms() {
        let (i, j) = (e[0] as usize, e[1] as usize);
        if rows[j].len() <= i {
            rows[j].resize(i + 1, field.zero());
        }
        rows[j][i] = c.clone();
    }
    rows.into_iter().map(|r| UPoly::new(&field, r)).collect()
}

fn from_ypoly(ring: &Ring, coeffs: &[UPoly]) -> MPoly {
    let mut terms = Vec::new();
    for (j, u) in coeffs.iter().enumerate() {
        for (i, c) in u.coeffs().iter().enumerate() {
            if !c.is_zero() {
                terms.push((vec![i as u16, j as u16], c.clone()));
            }
        }
    }
    MPoly::from_terms(ring, terms)
}

fn ydeg(v: &[UPoly]) -> Option<usize> {
    v.iter().rposition(|u| !u.is_zero())
}

/// Monic gcd of the nonzero coefficients.
fn ypoly_content(v: &[UPoly]) -> UPoly {
    let mut acc: Option<UPoly> = None;
    for u in v {
        if u.is_zero() {
            continue;
        }
        acc = Some(match acc {
            None => u.make_monic(),
            Some(g) => g.gcd(u),
        });
    }
    acc.expect("content of the zero polynomial")
}

fn ypoly_primitive(v: &[UPoly], content: &UPoly) -> Vec<UPoly> {
    v.iter()
        .map(|u| if u.is_zero() { u.clone() } else { u.div_exact(content) })
        .collect()
}

/// Pseudo-remainder of `a` by `b` in k[x][y] (both nonzero, deg_y a >= deg_y b).
fn ypoly_prem(a: &[UPoly], b: &[UPoly], field: &Fq) -> Vec<UPoly> {
    let db = ydeg(b).expect("nonzero divisor");
    let lb = b[db].clone();
    let mut r: Vec<UPoly> = a.to_vec();
    loop {
        let Some(dr) = ydeg(&r) else { return r };
        if dr < db {
            return r;
        }
        let lr = r[dr].clone();
        let shift = dr - db;
        let mut nr = vec![UPoly::zero(field); dr + 1];
        for (j, c) in r.iter().enumerate() {
            if !c.is_zero() {
                nr[j] = c.mul(&lb);
            }
        }
        for (j, c) in b.iter().enumerate() {
            if !c.is_zero() {
                nr[j + shift] = nr[j + shift].sub(&c.mul(&lr));
            }
        }
        r = nr;
    }
}

/// Gcd of two bivariate polynomials, normalized to leading coefficient one
/// (in the ring's monomial order).  `gcd(0, g) = g` up to normalization.
pub(crate) fn bivariate_gcd(f: &MPoly, g: &MPoly) -> MPoly {
    let ring = f.ring().clone();
    assert_eq!(ring.nvars(), 2, "bivariate gcd needs a two-variable ring");
    let normalize = |q: &MPoly| {
        if q.is_zero() {
            q.clone()
        } else {
            q.scale(&q.lc().inv().expect("nonzero leading coefficient"))
        }
    };
    if f.is_zero() {
        return normalize(g);
    }
    if g.is_zero() {
        return normalize(f);
    }
    let field = ring.field().clone();
    let fy = to_ypoly(f);
    let gy = to_ypoly(g);
    let cf = ypoly_content(&fy);
    let cg = ypoly_content(&gy);
    let c = cf.gcd(&cg);
    let mut a = ypoly_primitive(&fy, &cf);
    let mut b = ypoly_primitive(&gy, &cg);
    if ydeg(&a) < ydeg(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    while ydeg(&b).is_some() {
        let r = ypoly_prem(&a, &b, &field);
        let rp = if ydeg(&r).is_none() {
            r
        } else {
            let cr = ypoly_content(&r);
            ypoly_primitive(&r, &cr)
        };
        a = b;
        b = rp;
    }
    let total: Vec<UPoly> = a.iter().map(|u| u.mul(&c)).collect();
    normalize(&from_ypoly(&ring, &total))
}

// ---------------------------------------------------------------------------
// Fixed locus.
// ---------------------------------------------------------------------------

/// Splits the fixed locus of `D` on k[[x, y]] into its divisorial part
/// (the gcd of the two images) and the degree of its isolated part
/// (the colength of the coprime cofactors).
pub fn fixed_parts(d: &Derivation) -> Result<FixedLocus, SingularError> {
    let ring = d.ring().clone();
    assert_eq!(ring.nvars(), 2, "fixed_parts expects a derivation of k[[x, y]]");
    if d.is_zero() {
        return Err(SingularError::ZeroDerivation);
    }
    let g1 = &d.images()[0];
    let g2 = &d.images()[1];
    let gcd = bivariate_gcd(g1, g2);
    let cofactor = |g: &MPoly| -> MPoly {
        if g.is_zero() {
            g.clone()
        } else {
            div_exact(g, &gcd).expect("gcd divides both images")
        }
    };
    let c1 = cofactor(g1);
    let c2 = cofactor(g2);
    let isolated = if c1.is_unit_at_origin() || c2.is_unit_at_origin() {
        LocalDimResult { dim: LocalDim::Finite(0), jet_order: 0, vanishing_order: Some(0) }
    } else {
        local_quotient_dim(&[c1.clone(), c2.clone()]).map_err(SingularError::Core)?
    };
    Ok(FixedLocus { divisorial: gcd, cofactors: [c1, c2], isolated_degree: isolated })
}

// ---------------------------------------------------------------------------
// Exact invariant kernels.
// ---------------------------------------------------------------------------

/// Exact kernel of `D` on the span of monomials of total degree <= `bound`.
/// Returns the monomial basis (ascending) and an RREF basis of the kernel,
/// so pivots identify the lowest monomial of each kernel element.
fn invariant_kernel(d: &Derivation, bound: u64) -> (Vec<Vec<u16>>, Vec<Vec<FqElem>>) {
    let ring = d.ring().clone();
    let field = ring.field().clone();
    let monos = monomials_below(&ring, bound + 1);
    let ncols = monos.len();
    let mut row_of: HashMap<Vec<u16>, usize> = HashMap::new();
    let mut images: Vec<MPoly> = Vec::with_capacity(ncols);
    for e in &monos {
        let m = MPoly::monomial(&ring, e, field.one());
        let im = d.apply(&m).expect("monomial lives in the derivation's ring");
        for (me, _) in im.terms() {
            let next = row_of.len();
            row_of.entry(me.clone()).or_insert(next);
        }
        images.push(im);
    }
    let nrows = row_of.len().max(1);
    let mut a = vec![vec![field.zero(); ncols]; nrows];
    for (j, im) in images.iter().enumerate() {
        for (e, c) in im.terms() {
            a[row_of[e]][j] = c.clone();
        }
    }
    let mut ker = linalg::kernel(&field, &a, ncols);
    linalg::rref(&mut ker);
    (monos, ker)
}

fn vector_to_poly(ring: &Ring, monos: &[Vec<u16>], v: &[FqElem]) -> MPoly {
    let terms: Vec<(Vec<u16>, FqElem)> = monos
        .iter()
        .zip(v.iter())
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect();
    MPoly::from_terms(ring, terms)
}

/// True when some exponent of some term is not divisible by p: the
/// polynomial then lies outside the subring k[x^p, y^p].
fn outside_pth_subring(f: &MPoly, p: u64) -> bool {
    f.terms().iter().any(|(e, _)| e.iter().any(|&a| a as u64 % p != 0))
}

// ---------------------------------------------------------------------------
// Characteristic-2 structure theory.
// ---------------------------------------------------------------------------

/// Jet order used when the unit factor `h` can only be certified as a
/// power series (exact polynomial division failing).
const CHAR2_H_JET: u64 = 24;

/// Puts a 2-closed derivation with trivial divisorial part into the normal
/// form `D = h * D'` with `D'(x) = S^2 + T^2 x`, `D'(y) = R^2 + T^2 y`.
///
/// The invariant subring is free of rank 2 over k[[x^2, y^2]] with basis
/// `1, f`; the lowest invariant `f` outside k[[x^2, y^2]] is found by exact
/// linear algebra, split by parity into `Q^2 + R^2 x + S^2 y + T^2 xy`,
/// and the square part `Q^2` is discarded.
pub fn char2_normal_form(d: &Derivation) -> Result<Char2Data, SingularError> {
    let ring = d.ring().clone();
    assert_eq!(ring.nvars(), 2, "normal form expects a derivation of k[[x, y]]");
    let field = ring.field().clone();
    if field.p() != 2 {
        return Err(SingularError::WrongCharacteristic(2));
    }
    if d.is_zero() {
        return Err(SingularError::ZeroDerivation);
    }
    let witness = d.p_closed_witness()?;
    if witness.group_type == GroupType::NotPClosed {
        return Err(SingularError::NotPClosed);
    }
    let fix = fixed_parts(d)?;
    if !fix.divisorial.is_unit_at_origin() {
        return Err(SingularError::NotMaximalConfiguration(format!(
            "divisorial fixed part ({}) must be removed first",
            fix.divisorial
        )));
    }

    let mut last_err = None;
    for bound in [10u64, 18, 26] {
        match char2_split_at(d, bound) {
            Ok(data) => return Ok(data),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap())
}

fn char2_split_at(d: &Derivation, bound: u64) -> Result<Char2Data, SingularError> {
    let ring = d.ring().clone();
    let field = ring.field().clone();
    let (monos, ker) = invariant_kernel(d, bound);

    // Reorder columns so that monomials outside the square subring come
    // first (ascending); an RREF pivot in that block identifies the kernel
    // element whose lowest non-square monomial is smallest possible.
    let mut order: Vec<usize> = Vec::with_capacity(monos.len());
    let mut nonsquare = 0usize;
    for (idx, e) in monos.iter().enumerate() {
        if e.iter().any(|&a| a % 2 == 1) {
            order.push(idx);
            nonsquare += 1;
        }
    }
    for (idx, e) in monos.iter().enumerate() {
        if e.iter().all(|&a| a % 2 == 0) {
            order.push(idx);
        }
    }
    let mut permuted: Vec<Vec<FqElem>> =
        ker.iter().map(|v| order.iter().map(|&i| v[i].clone()).collect()).collect();
    let pivots = linalg::rref(&mut permuted);
    let row = permuted
        .iter()
        .zip(pivots.iter())
        .find(|(_, &pc)| pc < nonsquare)
        .map(|(r, _)| r.clone());
    let Some(row) = row else {
        return Err(SingularError::JetOrderTooSmall(bound));
    };
    let mut back = vec![field.zero(); monos.len()];
    for (slot, &i) in order.iter().enumerate() {
        back[i] = row[slot].clone();
    }
    let f = vector_to_poly(&ring, &monos, &back);

    // Parity split f = Q^2 + R^2 x + S^2 y + T^2 xy, dropping Q^2.
    let mut r_terms = Vec::new();
    let mut s_terms = Vec::new();
    let mut t_terms = Vec::new();
    for (e, c) in f.terms() {
        let sq = c.pth_root();
        match (e[0] % 2, e[1] % 2) {
            (0, 0) => {}
            (1, 0) => r_terms.push((vec![e[0] / 2, e[1] / 2], sq)),
            (0, 1) => s_terms.push((vec![e[0] / 2, e[1] / 2], sq)),
            (1, 1) => t_terms.push((vec![e[0] / 2, e[1] / 2], sq)),
            _ => unreachable!("parities are 0 or 1"),
        }
    }
    let r = MPoly::from_terms(&ring, r_terms);
    let s = MPoly::from_terms(&ring, s_terms);
    let t = MPoly::from_terms(&ring, t_terms);

    let x = MPoly::var(&ring, 0);
    let y = MPoly::var(&ring, 1);
    let den_x = s.mul(&s).add(&t.mul(&t).mul(&x));
    let den_y = r.mul(&r).add(&t.mul(&t).mul(&y));
    if den_x.is_zero() && den_y.is_zero() {
        return Err(SingularError::InconsistentSplit(
            "invariant generator has no non-square part".into(),
        ));
    }
    let dx = &d.images()[0];
    let dy = &d.images()[1];

    // Unit factor h with D(x) = h*den_x and D(y) = h*den_y: exact division
    // when possible, otherwise a jet-certified series factor.
    let exact_h = [(dx, &den_x), (dy, &den_y)]
        .into_iter()
        .filter(|(_, den)| !den.is_zero())
        .filter_map(|(num, den)| div_exact(num, den))
        .find(|h| dx.sub(&h.mul(&den_x)).is_zero() && dy.sub(&h.mul(&den_y)).is_zero());
    let h = match exact_h {
        Some(h) => h,
        None => {
            let (num, den) = [(dx, &den_x), (dy, &den_y)]
                .into_iter()
                .filter(|(_, den)| !den.is_zero())
                .min_by_key(|(_, den)| den.low_tdeg().unwrap_or(u64::MAX))
                .expect("some image denominator is nonzero");
            let h = jet_factor(num, den, CHAR2_H_JET).ok_or_else(|| {
                SingularError::InconsistentSplit(
                    "no series factor h with D = h * D' to the verification order".into(),
                )
            })?;
            let ok_x = dx.sub(&h.mul(&den_x)).truncate_below(CHAR2_H_JET).is_zero();
            let ok_y = dy.sub(&h.mul(&den_y)).truncate_below(CHAR2_H_JET).is_zero();
            if !(ok_x && ok_y) {
                return Err(SingularError::InconsistentSplit(
                    "the two image factorizations disagree".into(),
                ));
            }
            h
        }
    };
    if !h.is_unit_at_origin() {
        return Err(SingularError::InconsistentSplit("factor h is not a unit".into()));
    }

    // The triple must be coprime, and the normal form D' must satisfy
    // D'^2 = T^2 D' (automatic from the shape; checked as a guard).
    let triple_gcd = bivariate_gcd(&bivariate_gcd(&r, &s), &t);
    if !triple_gcd.is_one() {
        return Err(SingularError::InconsistentSplit(format!(
            "triple (R, S, T) has common factor {triple_gcd}"
        )));
    }
    let dprime = Derivation::new(&ring, vec![den_x.clone(), den_y.clone()])?;
    let t2 = t.mul(&t);
    let sq_x = dprime.apply(&den_x).expect("same ring");
    let sq_y = dprime.apply(&den_y).expect("same ring");
    if !sq_x.sub(&t2.mul(&den_x)).is_zero() || !sq_y.sub(&t2.mul(&den_y)).is_zero() {
        return Err(SingularError::InconsistentSplit(
            "normal form does not satisfy D'^2 = T^2 D'".into(),
        ));
    }

    Ok(Char2Data { h, r, s, t })
}

/// Series factor `h` with `num = h * den` up to jet order `order`, if one
/// exists; the factor is supported on monomials of total degree <= `order`.
fn jet_factor(num: &MPoly, den: &MPoly, order: u64) -> Option<MPoly> {
    let ring = num.ring().clone();
    let field = ring.field().clone();
    let lim = order + den.low_tdeg().unwrap_or(0);
    let unknowns = monomials_below(&ring, order + 1);
    let mut row_of: HashMap<Vec<u16>, usize> = HashMap::new();
    let mut cols: Vec<Vec<(usize, FqElem)>> = Vec::with_capacity(unknowns.len());
    for e in &unknowns {
        let prod = den.mul_term(e, &field.one()).truncate_below(lim);
        let mut col = Vec::new();
        for (me, c) in prod.terms() {
            let next = row_of.len();
            let idx = *row_of.entry(me.clone()).or_insert(next);
            col.push((idx, c.clone()));
        }
        cols.push(col);
    }
    let target = num.truncate_below(lim);
    for (me, _) in target.terms() {
        let next = row_of.len();
        row_of.entry(me.clone()).or_insert(next);
    }
    let nrows = row_of.len().max(1);
    let mut a = vec![vec![field.zero(); unknowns.len()]; nrows];
    for (j, col) in cols.iter().enumerate() {
        for (i, c) in col {
            a[*i][j] = c.clone();
        }
    }
    let mut b = vec![field.zero(); nrows];
    for (me, c) in target.terms() {
        b[row_of[me]] = c.clone();
    }
    let sol = linalg::solve(&field, &a, &b)?;
    Some(vector_to_poly(&ring, &unknowns, &sol))
}

// ---------------------------------------------------------------------------
// The characteristic-2 decision tree.
// ---------------------------------------------------------------------------

/// Colength `dim_k k[[x, y]]/(a, b)`; `None` means infinite (a common
/// factor, or a zero ideal).
fn colength(a: &MPoly, b: &MPoly) -> Option<usize> {
    if a.is_unit_at_origin() || b.is_unit_at_origin() {
        return Some(0);
    }
    let gens: Vec<MPoly> = [a, b].iter().filter(|q| !q.is_zero()).map(|q| (*q).clone()).collect();
    if gens.is_empty() {
        return None;
    }
    match local_quotient_dim(&gens) {
        Ok(res) => res.finite(),
        Err(_) => None,
    }
}

fn linear_coeffs(q: &MPoly) -> (FqElem, FqElem) {
    let field = q.ring().field().clone();
    let mut a = field.zero();
    let mut b = field.zero();
    for (e, c) in q.homogeneous_part(1).terms() {
        if e[0] == 1 {
            a = c.clone();
        } else {
            b = c.clone();
        }
    }
    (a, b)
}

/// Decides the singularity of the quotient of a smooth germ by the
/// derivation with normal form triple `(R, S, T)` (divisorial part
/// removed).  The decision uses only coordinate-independent colengths
/// after normalizing `S` into the square of the maximal ideal.
pub fn classify_char2_quotient(data: &Char2Data) -> Char2Quotient {
    let ring = data.r.ring().clone();
    let field = ring.field().clone();
    let mut r = data.r.clone();
    let mut s = data.s.clone();
    let mut t = data.t.clone();

    if r.is_unit_at_origin() || s.is_unit_at_origin() {
        return Char2Quotient::Smooth;
    }
    if t.is_unit_at_origin() {
        return Char2Quotient::Rdp(RdpType::plain(AdeClass::a(1)));
    }

    let (ra, rb) = linear_coeffs(&r);
    let (sa, sb) = linear_coeffs(&s);
    let det = ra.mul(&sb).sub(&rb.mul(&sa));
    if !det.is_zero() {
        return Char2Quotient::Rdp(RdpType::with_coindex(AdeClass::d(4), 0));
    }

    // Normalize S into m^2.  A swap of x and y exchanges the roles of R
    // and S; the shear x -> x + c^2 y replaces S by S + c R and preserves
    // the normal form shape.
    let lr_zero = ra.is_zero() && rb.is_zero();
    let ls_zero = sa.is_zero() && sb.is_zero();
    if !ls_zero {
        if lr_zero {
            let x = MPoly::var(&ring, 0);
            let y = MPoly::var(&ring, 1);
            let swap = |q: &MPoly| q.subst(&[y.clone(), x.clone()]);
            let (nr, ns, nt) = (swap(&s), swap(&r), swap(&t));
            r = nr;
            s = ns;
            t = nt;
        } else {
            // lin S = c * lin R: kill it with S := S + c R, x := x + c^2 y.
            let c = if !ra.is_zero() {
                sa.div(&ra).expect("nonzero divisor")
            } else {
                sb.div(&rb).expect("nonzero divisor")
            };
            let s_new = s.add(&r.scale(&c));
            let x = MPoly::var(&ring, 0);
            let y = MPoly::var(&ring, 1);
            let shear = x.add(&y.scale(&c.mul(&c)));
            let apply = |q: &MPoly| q.subst(&[shear.clone(), y.clone()]);
            r = apply(&r);
            s = apply(&s_new);
            t = apply(&t);
        }
    }

    let (ra, rb) = linear_coeffs(&r);
    if !ra.is_zero() || !rb.is_zero() {
        if !rb.is_zero() {
            // x and R generate the maximal ideal: dihedral branch.
            let m_val = colength(&r, &s).map(|m| 4 * m as u64);
            let n_val = colength(&r, &t).map(|n| 4 * n as u64 + 2);
            let index = [m_val, n_val].into_iter().flatten().min();
            return match index {
                Some(idx) if idx >= 4 => {
                    Char2Quotient::Rdp(RdpType::with_coindex(AdeClass::d(idx as u32), 0))
                }
                _ => Char2Quotient::Beyond12,
            };
        }
        // R = a x + higher: exceptional branch.
        let n1 = colength(&r, &t);
        if n1 == Some(1) {
            return Char2Quotient::Rdp(RdpType::with_coindex(AdeClass::e(7), 0));
        }
        return match colength(&r, &s) {
            Some(2) => Char2Quotient::Rdp(RdpType::with_coindex(AdeClass::e(8), 0)),
            Some(3) => Char2Quotient::EllipticDoublePoint { degree: 12, family: "Z^2+X^3+Y^7" },
            _ => Char2Quotient::Beyond12,
        };
    }

    // R and S both in m^2.
    let (ta, tb) = linear_coeffs(&t);
    if !ta.is_zero() || !tb.is_zero() {
        if colength(&t, &s) == Some(2) {
            return Char2Quotient::EllipticDoublePoint { degree: 11, family: "Z^2+X^3*Y+Y^5" };
        }
        if colength(&t, &r) == Some(2) {
            return Char2Quotient::EllipticDoublePoint { degree: 12, family: "Z^2+X^3*Y+X*Y^4" };
        }
    }
    let _ = field;
    Char2Quotient::Beyond12
}

// ---------------------------------------------------------------------------
// Invariant presentations.
// ---------------------------------------------------------------------------

/// Default certification order by characteristic.
pub fn default_jet_order(p: u64) -> u64 {
    match p {
        2 | 3 => 16,
        5 => 24,
        _ => 30,
    }
}

/// Computes the invariant presentation `k[[X, Y, Z]]/(G)` of the quotient
/// of k[[x, y]] by a p-closed derivation with trivial divisorial part.
/// `X = x^p` and `Y = y^p` always; `Z` is a canonical third invariant and
/// `G` an exact relation.  Retries once with a 1.5x larger jet order if
/// the first pass cannot certify the answer.
pub fn invariant_presentation(
    d: &Derivation,
    jet_order: u64,
) -> Result<QuotientPresentation, SingularError> {
    match presentation_attempt(d, jet_order) {
        Err(SingularError::RelationNotFound(_)) | Err(SingularError::JetOrderTooSmall(_)) => {
            presentation_attempt(d, jet_order * 3 / 2)
        }
        other => other,
    }
}

fn presentation_attempt(
    d: &Derivation,
    jet_order: u64,
) -> Result<QuotientPresentation, SingularError> {
    let ring = d.ring().clone();
    assert_eq!(ring.nvars(), 2, "presentation expects a derivation of k[[x, y]]");
    let field = ring.field().clone();
    let p = field.p();
    if d.is_zero() {
        return Err(SingularError::ZeroDerivation);
    }
    let witness = d.p_closed_witness()?;
    if witness.group_type == GroupType::NotPClosed {
        return Err(SingularError::NotPClosed);
    }
    let fix = fixed_parts(d)?;
    if !fix.divisorial.is_unit_at_origin() {
        return Err(SingularError::NotMaximalConfiguration(format!(
            "divisorial fixed part ({}) must be removed before taking invariants",
            fix.divisorial
        )));
    }

    let x = MPoly::var(&ring, 0);
    let y = MPoly::var(&ring, 1);
    let gx = x.pow(p as u32);
    let gy = y.pow(p as u32);

    let (z, structured) = if p == 2 {
        let data = char2_normal_form(d)?;
        let Char2Data { r, s, t, .. } = &data;
        let xy = x.mul(&y);
        let z = r.mul(r).mul(&x).add(&s.mul(s).mul(&y)).add(&t.mul(t).mul(&xy));
        (z, Some(data))
    } else {
        (choose_z(d, &witness.group_type, jet_order)?, None)
    };
    assert!(
        d.apply(&z).expect("same ring").is_zero(),
        "third generator must be an exact invariant"
    );

    let (relation, rel_weight) = match &structured {
        Some(data) => {
            let g = char2_relation(data);
            let zw = z.low_tdeg().unwrap_or(1);
            let w = g
                .terms()
                .iter()
                .map(|(e, _)| 2 * (e[0] as u64 + e[1] as u64) + zw * e[2] as u64)
                .max()
                .unwrap_or(0);
            (g, w)
        }
        None => find_relation(&[&gx, &gy, &z], p, jet_order)?,
    };

    // The relation must vanish exactly under substitution.
    let composed = compose(&relation, &[&gx, &gy, &z]);
    assert!(composed.is_zero(), "relation must vanish exactly on the generators");

    generation_check(d, &[&gx, &gy, &z], jet_order.min(12))?;

    Ok(QuotientPresentation {
        generators: [gx, gy, z],
        relation,
        certified_order: jet_order.max(2 * rel_weight),
    })
}

/// The structured characteristic-2 relation
/// `Z^2 + Rt^2 X + St^2 Y + Tt^2 XY`, where `q -> qt` renames variables to
/// `(X, Y)` and squares coefficients; normalized monic.
fn char2_relation(data: &Char2Data) -> MPoly {
    let ring = data.r.ring().clone();
    let field = ring.field().clone();
    let target = Ring::new(&field, &["X", "Y", "Z"]);
    let rename = |q: &MPoly| -> MPoly {
        let terms: Vec<(Vec<u16>, FqElem)> = q
            .terms()
            .iter()
            .map(|(e, c)| (vec![e[0], e[1], 0], c.mul(c)))
            .collect();
        MPoly::from_terms(&target, terms)
    };
    let xt = MPoly::var(&target, 0);
    let yt = MPoly::var(&target, 1);
    let zt = MPoly::var(&target, 2);
    let rr = rename(&data.r);
    let ss = rename(&data.s);
    let tt = rename(&data.t);
    let g = zt
        .mul(&zt)
        .add(&rr.mul(&rr).mul(&xt))
        .add(&ss.mul(&ss).mul(&yt))
        .add(&tt.mul(&tt).mul(&xt).mul(&yt));
    g.scale(&g.lc().inv().expect("nonzero relation"))
}

/// Canonical third invariant for p >= 3.
fn choose_z(d: &Derivation, group: &GroupType, bound: u64) -> Result<MPoly, SingularError> {
    let ring = d.ring().clone();
    let p = ring.field().p();
    if *group == GroupType::Additive {
        for v in 0..2usize {
            let z = d.apply_times(&MPoly::var(&ring, v), p - 1)?;
            if !z.is_zero() && outside_pth_subring(&z, p) {
                return Ok(z);
            }
        }
        if p == 3 {
            for v in [1usize, 0] {
                let var = MPoly::var(&ring, v);
                let dv = d.apply(&var)?;
                let d2v = d.apply(&dv)?;
                let z = dv.mul(&dv).add(&var.mul(&d2v));
                if !z.is_zero() && outside_pth_subring(&z, p) {
                    return Ok(z);
                }
            }
        }
    }
    greedy_kernel_z(d, bound)
}

/// Lowest exact invariant outside k[x^p, y^p], found degree by degree.
fn greedy_kernel_z(d: &Derivation, bound: u64) -> Result<MPoly, SingularError> {
    let ring = d.ring().clone();
    let p = ring.field().p();
    let mut ladder: Vec<u64> = [8u64, 14, bound].into_iter().filter(|&b| b <= bound).collect();
    ladder.dedup();
    if ladder.is_empty() {
        ladder.push(bound);
    }
    for b in ladder {
        let (monos, ker) = invariant_kernel(d, b);
        for v in &ker {
            let f = vector_to_poly(&ring, &monos, v);
            if !f.is_zero() && outside_pth_subring(&f, p) {
                return Ok(f);
            }
        }
    }
    Err(SingularError::JetOrderTooSmall(bound))
}

/// Substitutes the generators into a polynomial in k[X, Y, Z].
fn compose(g: &MPoly, gens: &[&MPoly; 3]) -> MPoly {
    let ring = gens[0].ring().clone();
    let mut acc = MPoly::zero(&ring);
    for (e, c) in g.terms() {
        let mut term = MPoly::constant(&ring, c.clone());
        for (i, gen) in gens.iter().enumerate() {
            if e[i] > 0 {
                term = term.mul(&gen.pow(e[i] as u32));
            }
        }
        acc = acc.add(&term);
    }
    acc
}

/// Searches for an exact linear relation among the products
/// `X^a Y^b Z^c`, ramping the weighted degree bound (weights p, p,
/// low-degree of Z) until a kernel appears.  Returns the monic relation
/// and the weighted degree at which it was found.
fn find_relation(
    gens: &[&MPoly; 3],
    p: u64,
    jet_order: u64,
) -> Result<(MPoly, u64), SingularError> {
    let ring = gens[0].ring().clone();
    let field = ring.field().clone();
    let zw = gens[2].low_tdeg().expect("nonzero third generator");
    let wcap = 2 * jet_order;
    let target = Ring::new(&field, &["X", "Y", "Z"]);

    let mut pow_cache: HashMap<(usize, u16), MPoly> = HashMap::new();
    let mut power = |i: usize, e: u16, gens: &[&MPoly; 3]| -> MPoly {
        pow_cache.entry((i, e)).or_insert_with(|| gens[i].pow(e as u32)).clone()
    };

    for w in 2..=wcap {
        let mut triples: Vec<[u16; 3]> = Vec::new();
        for a in 0..=(w / p) as u16 {
            for b in 0..=((w - p * a as u64) / p) as u16 {
                for c in 0..=((w - p * (a as u64 + b as u64)) / zw) as u16 {
                    if a == 0 && b == 0 && c == 0 {
                        continue;
                    }
                    triples.push([a, b, c]);
                }
            }
        }
        triples.sort_by_key(|&[a, b, c]| {
            (p * (a as u64 + b as u64) + zw * c as u64, a, b, c)
        });
        if triples.len() < 2 || triples.len() > 4000 {
            continue;
        }
        let mut row_of: HashMap<Vec<u16>, usize> = HashMap::new();
        let mut cols: Vec<MPoly> = Vec::with_capacity(triples.len());
        for &[a, b, c] in &triples {
            let prod = power(0, a, gens).mul(&power(1, b, gens)).mul(&power(2, c, gens));
            for (e, _) in prod.terms() {
                let next = row_of.len();
                row_of.entry(e.clone()).or_insert(next);
            }
            cols.push(prod);
        }
        let nrows = row_of.len().max(1);
        let mut a_mat = vec![vec![field.zero(); triples.len()]; nrows];
        for (j, prod) in cols.iter().enumerate() {
            for (e, c) in prod.terms() {
                a_mat[row_of[e]][j] = c.clone();
            }
        }
        let mut ker = linalg::kernel(&field, &a_mat, triples.len());
        if ker.is_empty() {
            continue;
        }
        linalg::rref(&mut ker);
        let v = &ker[0];
        let terms: Vec<(Vec<u16>, FqElem)> = triples
            .iter()
            .zip(v.iter())
            .filter(|(_, c)| !c.is_zero())
            .map(|(t, c)| (vec![t[0], t[1], t[2]], c.clone()))
            .collect();
        let g = MPoly::from_terms(&target, terms);
        if !g.terms().iter().any(|(e, _)| e[2] > 0) {
            continue;
        }
        let g = g.scale(&g.lc().inv().expect("nonzero relation"));
        return Ok((g, w));
    }
    Err(SingularError::RelationNotFound(wcap))
}

/// Certifies that every invariant jet of order < `bound` is a polynomial
/// in the three generators (modulo that jet order); failure means the
/// invariant ring needs a fourth generator.
fn generation_check(
    d: &Derivation,
    gens: &[&MPoly; 3],
    bound: u64,
) -> Result<(), SingularError> {
    let ring = d.ring().clone();
    let field = ring.field().clone();
    let p = field.p();
    let zw = gens[2].low_tdeg().expect("nonzero third generator");
    let (monos, ker) = invariant_kernel(d, bound);

    // Truncated products with low order below the bound, constants included.
    let mut products: Vec<MPoly> = Vec::new();
    let max_a = (bound / p) as u16;
    for a in 0..=max_a {
        for b in 0..=max_a {
            for c in 0..=(bound / zw) as u16 {
                let wt = p * (a as u64 + b as u64) + zw * c as u64;
                if wt >= bound && (a, b, c) != (0, 0, 0) {
                    continue;
                }
                let prod = gens[0]
                    .pow(a as u32)
                    .mul(&gens[1].pow(b as u32))
                    .mul(&gens[2].pow(c as u32))
                    .truncate_below(bound);
                if !prod.is_zero() {
                    products.push(prod);
                }
            }
        }
    }
    let mut row_of: HashMap<Vec<u16>, usize> = HashMap::new();
    for prod in &products {
        for (e, _) in prod.terms() {
            let next = row_of.len();
            row_of.entry(e.clone()).or_insert(next);
        }
    }
    for e in &monos {
        let next = row_of.len();
        row_of.entry(e.clone()).or_insert(next);
    }
    let nrows = row_of.len().max(1);
    let mut a_mat = vec![vec![field.zero(); products.len()]; nrows];
    for (j, prod) in products.iter().enumerate() {
        for (e, c) in prod.terms() {
            a_mat[row_of[e]][j] = c.clone();
        }
    }
    for v in &ker {
        let f = vector_to_poly(&ring, &monos, v).truncate_below(bound);
        let mut b = vec![field.zero(); nrows];
        for (e, c) in f.terms() {
            b[row_of[e]] = c.clone();
        }
        if linalg::solve(&field, &a_mat, &b).is_none() {
            return Err(SingularError::TooManyGenerators(format!(
                "invariant {f} is not generated by X, Y, Z below jet order {bound}"
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Additive combination search.
// ---------------------------------------------------------------------------

/// Quotient types realizable at a totally isolated fixed point of an
/// additive p-closed derivation on a smooth surface germ, paired with the
/// degree `s` of the isolated fixed point producing them.
fn additive_catalogue(p: u64, s_max: u64) -> Vec<(RdpType, u64)> {
    let mut cat = Vec::new();
    match p {
        2 => {
            let mut m = 1;
            while 4 * m <= s_max {
                cat.push((RdpType::with_coindex(AdeClass::d(4 * m as u32), 0), 4 * m));
                m += 1;
            }
            if 8 <= s_max {
                cat.push((RdpType::with_coindex(AdeClass::e(8), 0), 8));
            }
        }
        3 => {
            if 3 <= s_max {
                cat.push((RdpType::with_coindex(AdeClass::e(6), 0), 3));
            }
        }
        5 => {
            if 2 <= s_max {
                cat.push((RdpType::with_coindex(AdeClass::e(8), 0), 2));
            }
        }
        _ => {}
    }
    cat
}

/// All multisets of additive plane-quotient types whose isolated-fix
/// degrees sum to the additive global budget `24 / (p + 1)`, found by
/// exhaustive combination search over the catalogue.  Each multiset is
/// sorted; the list of multisets is sorted lexicographically.
pub fn additive_rdp_multisets(p: u64) -> Vec<Vec<RdpType>> {
    if 24 % (p + 1) != 0 {
        return Vec::new();
    }
    let target = 24 / (p + 1);
    let cat = additive_catalogue(p, target);
    let mut out: Vec<Vec<RdpType>> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    fn dfs(
        cat: &[(RdpType, u64)],
        start: usize,
        remaining: u64,
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<RdpType>>,
    ) {
        if remaining == 0 {
            out.push(stack.iter().map(|&i| cat[i].0).collect());
            return;
        }
        for i in start..cat.len() {
            if cat[i].1 <= remaining {
                stack.push(i);
                dfs(cat, i, remaining - cat[i].1, stack, out);
                stack.pop();
            }
        }
    }
    dfs(&cat, 0, target, &mut stack, &mut out);
    for ms in &mut out {
        ms.sort();
    }
    out.sort();
    out.dedup();
    out
}

// ---------------------------------------------------------------------------
// Full quotient classification.
// ---------------------------------------------------------------------------

/// Jet order for the invariant-coordinate construction on double points.
fn flatten_jet_order(p: u64) -> u64 {
    match p {
        2 | 3 => 14,
        5 => 16,
        _ => 18,
    }
}

/// Classify the image of a point under the quotient by a p-closed
/// derivation.
///
/// * `germ = None`: the point is a smooth surface point and `d` acts on
///   k[[x, y]].  The divisorial part of the fixed locus is divided off
///   first (the quotient is insensitive to it near the origin, and the
///   Hochschild formula keeps the reduced derivation p-closed).  If the
///   reduced derivation no longer vanishes at the origin the image is
///   smooth; otherwise the invariant presentation is computed and its
///   relation classified.
/// * `germ = Some(F)`: the point is a double point `F(x, y, z) = 0` and
///   `d` a tangent derivation that does not fix it.  When the equation is
///   a series in the p-th power of the moving direction the image germ is
///   read off by substituting that power; otherwise invariant transverse
///   coordinates are built by flowing back along the derivation and the
///   equation is re-expressed in them by exact linear algebra.
pub fn quotient_singularity(
    germ: Option<&MPoly>,
    d: &Derivation,
) -> Result<Classification, SingularError> {
    match germ {
        None => {
            assert_eq!(
                d.ring().nvars(),
                2,
                "a smooth-point quotient takes a derivation of k[[x, y]]"
            );
            if d.is_zero() {
                return Err(SingularError::ZeroDerivation);
            }
            let witness = d.p_closed_witness()?;
            if witness.group_type == GroupType::NotPClosed {
                return Err(SingularError::NotPClosed);
            }
            let fix = fixed_parts(d)?;
            let reduced = if fix.divisorial.is_unit_at_origin() {
                d.clone()
            } else {
                Derivation::new(
                    d.ring(),
                    vec![fix.cofactors[0].clone(), fix.cofactors[1].clone()],
                )?
            };
            if reduced.images().iter().any(|g| g.is_unit_at_origin()) {
                return Ok(Classification::Smooth);
            }
            let pres = invariant_presentation(&reduced, default_jet_order(d.ring().field().p()))?;
            classify_germ(&pres.relation)
        }
        Some(f) => double_point_quotient(f, d),
    }
}

fn double_point_quotient(
    f: &MPoly,
    d: &Derivation,
) -> Result<Classification, SingularError> {
    let ring = d.ring().clone();
    assert_eq!(
        ring.nvars(),
        3,
        "a double-point quotient takes a derivation of k[[x, y, z]]"
    );
    let f = f.embed_into(&ring)?;
    assert!(!f.is_zero(), "the double-point equation is nonzero");
    assert!(
        f.constant_term().is_zero(),
        "the double point lies at the origin"
    );
    let df = d.apply(&f)?;
    if !df.is_zero() && div_exact(&df, &f).is_none() {
        return Err(SingularError::NotTangent);
    }
    let witness = d.p_closed_witness()?;
    if witness.group_type == GroupType::NotPClosed {
        return Err(SingularError::NotPClosed);
    }
    let p = ring.field().p();
    let Some(c) = (0..3).find(|&i| d.images()[i].is_unit_at_origin()) else {
        return Err(SingularError::FixedPoint);
    };
    let (a, b) = match c {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let pure = f
        .terms()
        .iter()
        .all(|(e, _)| u64::from(e[c]) % p == 0);
    if d.images()[a].is_zero() && d.images()[b].is_zero() && pure {
        // The derivation moves only x_c and the equation already lives in
        // k[[x_a, x_b, x_c^p]]: substitute the p-th power directly.
        let image = collapse_pth_power(&f, c, a, b, p);
        return classify_germ(&image);
    }
    let n = flatten_jet_order(p);
    match flatten_attempt(&f, d, c, a, b, n) {
        Err(SingularError::JetOrderTooSmall(_)) => {
            match flatten_attempt(&f, d, c, a, b, n * 3 / 2) {
                Err(SingularError::JetOrderTooSmall(_)) => {
                    Err(SingularError::NotMaximalConfiguration(
                        "the equation admits no invariant-coordinate expression within the jet budget"
                            .to_string(),
                    ))
                }
                other => other,
            }
        }
        other => other,
    }
}

/// Image of a series in k[[x_a, x_b, x_c^p]] under x_c^p -> Z.
fn collapse_pth_power(f: &MPoly, c: usize, a: usize, b: usize, p: u64) -> MPoly {
    let field = f.ring().field();
    let image_ring = Ring::new(field, &["X", "Y", "Z"]);
    let terms = f
        .terms()
        .iter()
        .map(|(e, cf)| {
            debug_assert_eq!(u64::from(e[c]) % p, 0);
            (
                vec![e[a], e[b], (u64::from(e[c]) / p) as u16],
                cf.clone(),
            )
        })
        .collect();
    MPoly::from_terms(&image_ring, terms)
}

/// General invariant-coordinate path: normalize the derivation so the
/// moving direction has image 1, build the two flow-back invariants, and
/// solve `G(X, Y, Z) = u * F` (with Z = x_c^p and u an unknown unit) by
/// linear algebra on jets.  The candidate image germ is accepted only
/// when the jet order provably determines its singularity class.
fn flatten_attempt(
    f: &MPoly,
    d: &Derivation,
    c: usize,
    a: usize,
    b: usize,
    n: u64,
) -> Result<Classification, SingularError> {
    let ring = d.ring().clone();
    let field = ring.field().clone();
    let p = field.p();
    let inv = d.images()[c]
        .invert_jet(n)
        .expect("the moving direction inverts as a jet");
    let tilde_images: Vec<MPoly> = d
        .images()
        .iter()
        .map(|g| g.mul(&inv).truncate_below(n))
        .collect();
    let tilde = Derivation::new(&ring, tilde_images)?;
    // Flow-back primitive of x_j: sum_{k<p} (-1)^k/k! x_c^k Dt^k(x_j).
    // Because Dt(x_c) = 1 forces Dt^p = 0 for a p-closed direction, the
    // sum is invariant to the working jet order.
    let zc = MPoly::var(&ring, c);
    let mut prims: Vec<MPoly> = Vec::with_capacity(2);
    for &j in &[a, b] {
        let mut power = MPoly::var(&ring, j);
        let mut acc = power.clone();
        let mut zpow = MPoly::one(&ring);
        let mut kfact = field.one();
        let mut sign = field.one();
        for k in 1..p {
            power = tilde.apply(&power)?.truncate_below(n);
            zpow = zpow.mul(&zc);
            kfact = kfact.mul_int(k as i64);
            sign = sign.neg();
            let coef = sign.mul(&kfact.inv().expect("k! is a unit below p"));
            acc = acc.add(&zpow.mul(&power).scale(&coef));
        }
        prims.push(acc.truncate_below(n));
    }
    let slack = 4;
    for pr in &prims {
        let moved = d.apply(pr)?;
        if !moved.truncate_below(n.saturating_sub(slack)).is_zero() {
            return Err(SingularError::NotMaximalConfiguration(
                "the flow-back coordinates fail to be invariant to the working jet order"
                    .to_string(),
            ));
        }
    }
    // Unknowns: coefficients of G on monomials X^al Y^be Z^ga with
    // al + be + p*ga < n, and coefficients of the unit u on ambient
    // monomials of total degree in (0, n).  One equation per ambient
    // monomial of total degree < n.
    let rows_idx = monomials_below(&ring, n);
    let row_of: std::collections::BTreeMap<Vec<u16>, usize> = rows_idx
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, e)| (e, i))
        .collect();
    let nrows = rows_idx.len();
    let mut g_monomials: Vec<[u16; 3]> = Vec::new();
    for al in 0..n as u16 {
        for be in 0..(n as u16 - al) {
            let rest = n - u64::from(al) - u64::from(be);
            let mut ga = 0u16;
            while u64::from(ga) * p < rest {
                g_monomials.push([al, be, ga]);
                ga += 1;
            }
        }
    }
    let zp = MPoly::var(&ring, c).pow(p as u32);
    let mut columns: Vec<Vec<FqElem>> = Vec::new();
    let col_poly = |poly: &MPoly| {
        let mut col = vec![field.zero(); nrows];
        for (e, cf) in poly.terms() {
            if let Some(&i) = row_of.get(e) {
                col[i] = cf.clone();
            }
        }
        col
    };
    for &[al, be, ga] in &g_monomials {
        let sub = prims[0]
            .pow(u32::from(al))
            .mul(&prims[1].pow(u32::from(be)))
            .truncate_below(n)
            .mul(&zp.pow(u32::from(ga)))
            .truncate_below(n);
        columns.push(col_poly(&sub));
    }
    let unit_monomials: Vec<Vec<u16>> = rows_idx
        .iter()
        .filter(|e| e.iter().any(|&x| x > 0))
        .cloned()
        .collect();
    for e in &unit_monomials {
        let shifted = f
            .mul_term(e, &field.one().neg())
            .truncate_below(n);
        columns.push(col_poly(&shifted));
    }
    // Transpose the column list into solver rows.
    let matrix: Vec<Vec<FqElem>> = (0..nrows)
        .map(|i| columns.iter().map(|col| col[i].clone()).collect())
        .collect();
    let rhs = col_poly(&f.truncate_below(n));
    let Some(solution) = linalg::solve(&field, &matrix, &rhs) else {
        return Err(SingularError::JetOrderTooSmall(n));
    };
    let image_ring = Ring::new(&field, &["X", "Y", "Z"]);
    let mut g_terms: Vec<(Vec<u16>, FqElem)> = Vec::new();
    for (i, &[al, be, ga]) in g_monomials.iter().enumerate() {
        if !solution[i].is_zero() {
            g_terms.push((vec![al, be, ga], solution[i].clone()));
        }
    }
    let image = MPoly::from_terms(&image_ring, g_terms);
    if image.is_zero() || !image.constant_term().is_zero() {
        return Err(SingularError::JetOrderTooSmall(n));
    }
    if !image.homogeneous_part(1).is_zero() {
        return Ok(Classification::Smooth);
    }
    // Accept only when the jet order certifies the class: an isolated
    // double point is (tau + 2)-determined.
    match tjurina(&image) {
        Ok(tau) if (tau as u64) + 3 <= n => classify_germ(&image),
        Ok(_) | Err(SingularError::NotIsolated) => Err(SingularError::JetOrderTooSmall(n)),
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// Tests.
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use charp_lattice::Coindex;

    fn plane(p: u64) -> Ring {
        Ring::new(&Fq::prime(p).unwrap(), &["x", "y"])
    }

    fn derivation(ring: &Ring, dx: &str, dy: &str) -> Derivation {
        let images = vec![
            MPoly::parse(ring, dx).unwrap(),
            MPoly::parse(ring, dy).unwrap(),
        ];
        Derivation::new(ring, images).unwrap()
    }

    #[test]
    fn gcd_of_bivariate_polynomials() {
        let ring = plane(5);
        let p = |s: &str| MPoly::parse(&ring, s).unwrap();
        // Shared factor x - y together with content.
        let f = p("x^2 + 4*y^2"); // (x-y)(x+y)
        let g = p("x^2 + 4*x*y"); // x(x-y)... x^2 - xy
        let got = bivariate_gcd(&f, &g);
        assert_eq!(got, p("x + 4*y"));
        // Monomial content on both sides.
        let got = bivariate_gcd(&p("2*x^2*y"), &p("4*x*y^2"));
        assert_eq!(got, p("x*y"));
        // Coprime pair.
        let got = bivariate_gcd(&p("x"), &p("y"));
        assert!(got.is_one());
        // Zero argument.
        let got = bivariate_gcd(&MPoly::zero(&ring), &p("3*x^2"));
        assert_eq!(got, p("x^2"));
    }

    #[test]
    fn fixed_parts_split_divisor_and_isolated_degree() {
        let ring = plane(5);
        let d = derivation(&ring, "x", "4*y");
        let fix = fixed_parts(&d).unwrap();
        assert!(fix.divisorial.is_one());
        assert_eq!(fix.isolated_degree.finite(), Some(1));

        // D = xy (y dx + x dy): divisorial part xy, isolated degree 1.
        let d = derivation(&ring, "x*y^2", "x^2*y");
        let fix = fixed_parts(&d).unwrap();
        assert_eq!(fix.divisorial, MPoly::parse(&ring, "x*y").unwrap());
        assert_eq!(fix.cofactors[0], MPoly::parse(&ring, "y").unwrap());
        assert_eq!(fix.cofactors[1], MPoly::parse(&ring, "x").unwrap());
        assert_eq!(fix.isolated_degree.finite(), Some(1));

        // Purely isolated fixed point of higher degree.
        let ring2 = plane(2);
        let d = derivation(&ring2, "x^2 + x*y^2", "y^3");
        let fix = fixed_parts(&d).unwrap();
        assert!(fix.divisorial.is_one());
        assert_eq!(fix.isolated_degree.finite(), Some(6));

        // Unit cofactor: translation has empty fixed locus.
        let d = derivation(&ring2, "1", "0");
        let fix = fixed_parts(&d).unwrap();
        assert_eq!(fix.isolated_degree.finite(), Some(0));
    }

    #[test]
    fn fixed_parts_reject_the_zero_derivation() {
        let ring = plane(3);
        let d = Derivation::new(&ring, vec![MPoly::zero(&ring), MPoly::zero(&ring)]).unwrap();
        assert!(matches!(fixed_parts(&d), Err(SingularError::ZeroDerivation)));
    }

    #[test]
    fn char2_normal_form_of_the_plane_families() {
        let ring = plane(2);
        let p = |s: &str| MPoly::parse(&ring, s).unwrap();

        // (x^2, y^{2m}): triple (y^m, x, 0) with unit factor 1.
        for (dy, rm) in [("y^2", "y"), ("y^4", "y^2"), ("y^6", "y^3")] {
            let d = derivation(&ring, "x^2", dy);
            let data = char2_normal_form(&d).unwrap();
            assert_eq!(data.r, p(rm));
            assert_eq!(data.s, p("x"));
            assert!(data.t.is_zero());
            assert!(data.h.is_one());
        }

        // (x^2 + x*y^2, y^3): triple (0, x, y).
        let d = derivation(&ring, "x^2 + x*y^2", "y^3");
        let data = char2_normal_form(&d).unwrap();
        assert!(data.r.is_zero());
        assert_eq!(data.s, p("x"));
        assert_eq!(data.t, p("y"));
        assert!(data.h.is_one());

        // (y^4, x^2): triple (x, y^2, 0).
        let d = derivation(&ring, "y^4", "x^2");
        let data = char2_normal_form(&d).unwrap();
        assert_eq!(data.r, p("x"));
        assert_eq!(data.s, p("y^2"));
        assert!(data.t.is_zero());
        assert!(data.h.is_one());

        // (x*y^2, x^2 + y^3): triple (x, 0, y).
        let d = derivation(&ring, "x*y^2", "x^2 + y^3");
        let data = char2_normal_form(&d).unwrap();
        assert_eq!(data.r, p("x"));
        assert!(data.s.is_zero());
        assert_eq!(data.t, p("y"));
        assert!(data.h.is_one());

        // Multiplicative (x, y): triple (0, 0, 1).
        let d = derivation(&ring, "x", "y");
        let data = char2_normal_form(&d).unwrap();
        assert!(data.r.is_zero());
        assert!(data.s.is_zero());
        assert!(data.t.is_one());
        assert!(data.h.is_one());

        // Unit-rescaled multiplicative ((1+x)x, (1+x)y): same triple,
        // nontrivial unit factor h = 1 + x.
        let d = derivation(&ring, "x + x^2", "y + x*y");
        let data = char2_normal_form(&d).unwrap();
        assert!(data.r.is_zero());
        assert!(data.s.is_zero());
        assert!(data.t.is_one());
        assert_eq!(data.h, p("1 + x"));
    }

    #[test]
    fn char2_normal_form_guards() {
        let ring3 = plane(3);
        let d = derivation(&ring3, "y^3", "x");
        assert!(matches!(
            char2_normal_form(&d),
            Err(SingularError::WrongCharacteristic(2))
        ));

        let ring = plane(2);
        let d = derivation(&ring, "x^2", "x*y");
        assert!(matches!(
            char2_normal_form(&d),
            Err(SingularError::NotMaximalConfiguration(_))
        ));
    }

    #[test]
    fn char2_tree_classifies_the_plane_families() {
        let ring = plane(2);
        let run = |dx: &str, dy: &str| {
            let d = derivation(&ring, dx, dy);
            classify_char2_quotient(&char2_normal_form(&d).unwrap())
        };
        assert_eq!(run("x", "y"), Char2Quotient::Rdp(RdpType::plain(AdeClass::a(1))));
        assert_eq!(
            run("x^2", "y^2"),
            Char2Quotient::Rdp(RdpType::with_coindex(AdeClass::d(4), 0))
        );
        assert_eq!(
            run("x^2", "y^4"),
            Char2Quotient::Rdp(RdpType::with_coindex(AdeClass::d(8), 0))
        );
        assert_eq!(
            run("x^2", "y^6"),
            Char2Quotient::Rdp(RdpType::with_coindex(AdeClass::d(12), 0))
        );
        assert_eq!(
            run("x^2 + x*y^2", "y^3"),
            Char2Quotient::Rdp(RdpType::with_coindex(AdeClass::d(6), 0))
        );
        assert_eq!(
            run("x^2 + x*y^4", "y^5"),
            Char2Quotient::Rdp(RdpType::with_coindex(AdeClass::d(10), 0))
        );
        assert_eq!(
            run("x*y^2", "x^2 + y^3"),
            Char2Quotient::Rdp(RdpType::with_coindex(AdeClass::e(7), 0))
        );
        assert_eq!(
            run("y^4", "x^2"),
            Char2Quotient::Rdp(RdpType::with_coindex(AdeClass::e(8), 0))
        );
    }

    #[test]
    fn char2_tree_on_hand_built_triples() {
        let ring = plane(2);
        let p = |s: &str| MPoly::parse(&ring, s).unwrap();
        let data = |r: &str, s: &str, t: &str| Char2Data {
            h: MPoly::one(&ring),
            r: if r == "0" { MPoly::zero(&ring) } else { p(r) },
            s: if s == "0" { MPoly::zero(&ring) } else { p(s) },
            t: if t == "0" { MPoly::zero(&ring) } else { p(t) },
        };
        // A unit R: the invariant map is an isomorphism near the point.
        assert_eq!(classify_char2_quotient(&data("1 + x", "y", "0")), Char2Quotient::Smooth);
        // E7 triple.
        assert_eq!(
            classify_char2_quotient(&data("x", "0", "y")),
            Char2Quotient::Rdp(RdpType::with_coindex(AdeClass::e(7), 0))
        );
        // Elliptic of degree 11.
        assert_eq!(
            classify_char2_quotient(&data("0", "y^2", "x")),
            Char2Quotient::EllipticDoublePoint { degree: 11, family: "Z^2+X^3*Y+Y^5" }
        );
        // Elliptic of degree 12, second family.
        assert_eq!(
            classify_char2_quotient(&data("y^2", "0", "x")),
            Char2Quotient::EllipticDoublePoint { degree: 12, family: "Z^2+X^3*Y+X*Y^4" }
        );
        // Elliptic of degree 12, first family.
        assert_eq!(
            classify_char2_quotient(&data("x", "y^3", "0")),
            Char2Quotient::EllipticDoublePoint { degree: 12, family: "Z^2+X^3+Y^7" }
        );
        // Everything deep in m^2: beyond the double point range.
        assert_eq!(
            classify_char2_quotient(&data("x^2", "y^2", "x*y")),
            Char2Quotient::Beyond12
        );
    }

    #[test]
    fn presentation_of_multiplicative_actions() {
        // Characteristic 2, weight (1, 1): A1.
        let ring = plane(2);
        let d = derivation(&ring, "x", "y");
        let pres = invariant_presentation(&d, default_jet_order(2)).unwrap();
        assert_eq!(pres.generators[0], MPoly::parse(&ring, "x^2").unwrap());
        assert_eq!(pres.generators[1], MPoly::parse(&ring, "y^2").unwrap());
        assert_eq!(pres.generators[2], MPoly::parse(&ring, "x*y").unwrap());
        let target = pres.relation.ring().clone();
        assert_eq!(pres.relation, MPoly::parse(&target, "Z^2 + X*Y").unwrap());

        // Characteristic 5, weight (1, -1): A4.
        let ring = plane(5);
        let d = derivation(&ring, "x", "4*y");
        let pres = invariant_presentation(&d, default_jet_order(5)).unwrap();
        assert_eq!(pres.generators[2], MPoly::parse(&ring, "x*y").unwrap());
        let target = pres.relation.ring().clone();
        assert_eq!(pres.relation, MPoly::parse(&target, "Z^5 + 4*X*Y").unwrap());
    }

    #[test]
    fn presentation_of_the_additive_plane_families() {
        // Characteristic 5, D = y dx + x^2 dy: Z = D^4(x) = 2(x^3 + y^2),
        // with the degree-five relation of an E8 point.
        let ring = plane(5);
        let d = derivation(&ring, "y", "x^2");
        let pres = invariant_presentation(&d, default_jet_order(5)).unwrap();
        assert_eq!(pres.generators[2], MPoly::parse(&ring, "2*x^3 + 2*y^2").unwrap());
        let target = pres.relation.ring().clone();
        assert_eq!(
            pres.relation,
            MPoly::parse(&target, "Z^5 + 3*X^3 + 3*Y^2").unwrap()
        );

        // Characteristic 3, D = y^3 dx + x dy: Z = x^2 + y^4, E6 relation.
        let ring = plane(3);
        let d = derivation(&ring, "y^3", "x");
        let pres = invariant_presentation(&d, default_jet_order(3)).unwrap();
        assert_eq!(pres.generators[2], MPoly::parse(&ring, "x^2 + y^4").unwrap());
        let target = pres.relation.ring().clone();
        assert_eq!(
            pres.relation,
            MPoly::parse(&target, "2*Z^3 + X^2 + Y^4").unwrap()
        );

        // Characteristic 3, D = y^4 dx + x dy (a general p-closed action):
        // Z = x^2 + 2 y^5, E8 relation.
        let d = derivation(&ring, "y^4", "x");
        let pres = invariant_presentation(&d, default_jet_order(3)).unwrap();
        assert_eq!(pres.generators[2], MPoly::parse(&ring, "x^2 + 2*y^5").unwrap());
        let target = pres.relation.ring().clone();
        assert_eq!(
            pres.relation,
            MPoly::parse(&target, "Z^3 + 2*X^2 + Y^5").unwrap()
        );
    }

    #[test]
    fn presentation_of_the_char2_families() {
        let ring = plane(2);
        // (x^2, y^4): relation Z^2 + X Y^4 + X^2 Y (dihedral of index 8).
        let d = derivation(&ring, "x^2", "y^4");
        let pres = invariant_presentation(&d, default_jet_order(2)).unwrap();
        assert_eq!(
            pres.generators[2],
            MPoly::parse(&ring, "x*y^4 + x^2*y").unwrap()
        );
        let target = pres.relation.ring().clone();
        assert_eq!(
            pres.relation,
            MPoly::parse(&target, "Z^2 + X*Y^4 + X^2*Y").unwrap()
        );

        // (y^4, x^2): relation Z^2 + X^3 + Y^5 (exceptional of index 8).
        let d = derivation(&ring, "y^4", "x^2");
        let pres = invariant_presentation(&d, default_jet_order(2)).unwrap();
        assert_eq!(pres.generators[2], MPoly::parse(&ring, "x^3 + y^5").unwrap());
        let target = pres.relation.ring().clone();
        assert_eq!(
            pres.relation,
            MPoly::parse(&target, "Z^2 + X^3 + Y^5").unwrap()
        );

        // (x*y^2, x^2 + y^3): relation Z^2 + X^3 + X Y^3.
        let d = derivation(&ring, "x*y^2", "x^2 + y^3");
        let pres = invariant_presentation(&d, default_jet_order(2)).unwrap();
        let target = pres.relation.ring().clone();
        assert_eq!(
            pres.relation,
            MPoly::parse(&target, "Z^2 + X^3 + X*Y^3").unwrap()
        );

        // (x^2 + x*y^2, y^3): relation Z^2 + X^2 Y + X Y^3.
        let d = derivation(&ring, "x^2 + x*y^2", "y^3");
        let pres = invariant_presentation(&d, default_jet_order(2)).unwrap();
        let target = pres.relation.ring().clone();
        assert_eq!(
            pres.relation,
            MPoly::parse(&target, "Z^2 + X^2*Y + X*Y^3").unwrap()
        );
    }

    #[test]
    fn structured_and_generic_relations_agree_in_characteristic_two() {
        let ring = plane(2);
        for (dx, dy) in [("x^2", "y^4"), ("y^4", "x^2"), ("x", "y")] {
            let d = derivation(&ring, dx, dy);
            let pres = invariant_presentation(&d, default_jet_order(2)).unwrap();
            let gens = [&pres.generators[0], &pres.generators[1], &pres.generators[2]];
            let (generic, _) = find_relation(&gens, 2, default_jet_order(2)).unwrap();
            assert_eq!(pres.relation, generic);
        }
    }

    #[test]
    fn presentation_postconditions_hold_across_characteristics() {
        let cases: [(u64, &str, &str); 6] = [
            (2, "x^2", "y^2"),
            (2, "x^2 + x*y^2", "y^3"),
            (3, "y^3", "x"),
            (3, "y^4", "x"),
            (5, "y", "x^2"),
            (7, "x", "6*y"),
        ];
        for (p, dx, dy) in cases {
            let ring = plane(p);
            let d = derivation(&ring, dx, dy);
            let pres = invariant_presentation(&d, default_jet_order(p)).unwrap();
            for g in &pres.generators {
                assert!(d.apply(g).unwrap().is_zero(), "generator not invariant at p={p}");
            }
            let gens = [&pres.generators[0], &pres.generators[1], &pres.generators[2]];
            assert!(compose(&pres.relation, &gens).is_zero());
            assert!(pres.relation.terms().iter().any(|(e, _)| e[2] > 0));
            assert!(pres.relation.lc().is_one());
            assert!(pres.certified_order >= default_jet_order(p));
        }
    }

    #[test]
    fn presentation_guards() {
        let ring = plane(2);
        // Divisorial fixed part must be removed first.
        let d = derivation(&ring, "x^2", "x*y");
        assert!(matches!(
            invariant_presentation(&d, 16),
            Err(SingularError::NotMaximalConfiguration(_))
        ));
        // Zero derivation.
        let d = Derivation::new(&ring, vec![MPoly::zero(&ring), MPoly::zero(&ring)]).unwrap();
        assert!(matches!(
            invariant_presentation(&d, 16),
            Err(SingularError::ZeroDerivation)
        ));
    }

    fn space(p: u64) -> Ring {
        Ring::new(&Fq::prime(p).unwrap(), &["x", "y", "z"])
    }

    fn space_derivation(ring: &Ring, dx: &str, dy: &str, dz: &str) -> Derivation {
        let images = vec![
            MPoly::parse(ring, dx).unwrap(),
            MPoly::parse(ring, dy).unwrap(),
            MPoly::parse(ring, dz).unwrap(),
        ];
        Derivation::new(ring, images).unwrap()
    }

    fn expect_rdp(c: &Classification) -> RdpType {
        match c {
            Classification::Rdp(t) => *t,
            other => panic!("expected a rational double point, got {other:?}"),
        }
    }

    #[test]
    fn double_point_quotients_along_a_translation_direction() {
        // xy + z^(mp) under d/dz maps to xy + Z^m.
        for (p, m) in [(2u64, 3u32), (3, 2), (5, 2), (7, 2)] {
            let ring = space(p);
            let f = MPoly::parse(&ring, &format!("x*y+z^{}", m * p as u32)).unwrap();
            let d = space_derivation(&ring, "0", "0", "1");
            let got = quotient_singularity(Some(&f), &d).unwrap();
            assert_eq!(
                expect_rdp(&got),
                RdpType::plain(AdeClass::a(m - 1)),
                "xy+z^(mp) with m={m}, p={p}"
            );
        }
        // m = 1: the image xy + Z is smooth.
        let ring = space(5);
        let f = MPoly::parse(&ring, "x*y+z^5").unwrap();
        let d = space_derivation(&ring, "0", "0", "1");
        assert_eq!(
            quotient_singularity(Some(&f), &d).unwrap(),
            Classification::Smooth
        );
    }

    #[test]
    fn double_point_quotients_of_the_wild_tables() {
        // characteristic 3: x^2 + y^3 + y z^3 maps to x^2 + y^3 + yZ = A1.
        let ring = space(3);
        let f = MPoly::parse(&ring, "x^2+y^3+y*z^3").unwrap();
        let d = space_derivation(&ring, "0", "0", "1");
        let got = quotient_singularity(Some(&f), &d).unwrap();
        assert_eq!(expect_rdp(&got), RdpType::plain(AdeClass::a(1)));
        // characteristic 2: x^2 + x z^2 + y^3 maps to x^2 + xZ + y^3 = A2.
        let ring = space(2);
        let f = MPoly::parse(&ring, "x^2+x*z^2+y^3").unwrap();
        let d = space_derivation(&ring, "0", "0", "1");
        let got = quotient_singularity(Some(&f), &d).unwrap();
        assert_eq!(expect_rdp(&got), RdpType::plain(AdeClass::a(2)));
    }

    #[test]
    fn double_point_quotient_through_moved_coordinates() {
        // The translation quotient of xy + z^6 in characteristic 3, after
        // the coordinate change x -> x + yz: the equation is no longer a
        // series in z^3 and the flow-back path must recover A1.
        let ring = space(3);
        let f = MPoly::parse(&ring, "x*y+y^2*z+z^6").unwrap();
        let d = space_derivation(&ring, "-y", "0", "1");
        let got = quotient_singularity(Some(&f), &d).unwrap();
        assert_eq!(expect_rdp(&got), RdpType::plain(AdeClass::a(1)));
    }

    #[test]
    fn double_point_quotient_rejects_fixed_points_and_tangency_failures() {
        let ring = space(3);
        let f = MPoly::parse(&ring, "x*y+z^3").unwrap();
        // All images vanish at the origin: the point is fixed.
        let d = space_derivation(&ring, "x", "-y", "0");
        assert!(matches!(
            quotient_singularity(Some(&f), &d),
            Err(SingularError::FixedPoint)
        ));
        // Not tangent: D(F) = x is not a multiple of F.
        let d = space_derivation(&ring, "0", "0", "1");
        let g = MPoly::parse(&ring, "x*y+x*z+z^3").unwrap();
        assert!(matches!(
            quotient_singularity(Some(&g), &d),
            Err(SingularError::NotTangent)
        ));
    }

    #[test]
    fn smooth_point_quotients_compose_presentation_and_classification() {
        // Multiplicative (x, -y): the quotient plane point is A_(p-1).
        for p in [2u64, 3, 5] {
            let ring = plane(p);
            let d = derivation(&ring, "x", "-y");
            let got = quotient_singularity(None, &d).unwrap();
            assert_eq!(
                expect_rdp(&got),
                RdpType::plain(AdeClass::a(p as u32 - 1))
            );
        }
        // Additive (y, x^2) in characteristic 5: E8 with coindex 0.
        let ring = plane(5);
        let d = derivation(&ring, "y", "x^2");
        let got = quotient_singularity(None, &d).unwrap();
        assert_eq!(
            expect_rdp(&got),
            RdpType::with_coindex(AdeClass::e(8), 0)
        );
        // A derivation not vanishing at the origin gives a smooth image.
        let d = derivation(&ring, "1", "x");
        assert_eq!(
            quotient_singularity(None, &d).unwrap(),
            Classification::Smooth
        );
        // A divisorial factor is divided off; the reduced derivation here
        // moves the origin, so the image is smooth.
        let ring2 = plane(2);
        let d = derivation(&ring2, "x^2+x", "x*y");
        assert_eq!(
            quotient_singularity(None, &d).unwrap(),
            Classification::Smooth
        );
    }

    #[test]
    fn additive_budget_combinations_match_the_catalogue() {
        let d = |n: u32| RdpType::with_coindex(AdeClass::d(n), 0);
        let e = |n: u32| RdpType::with_coindex(AdeClass::e(n), 0);
        let got2 = additive_rdp_multisets(2);
        assert_eq!(got2, vec![vec![d(4), d(4)], vec![d(8)], vec![e(8)]]);
        let got3 = additive_rdp_multisets(3);
        assert_eq!(got3, vec![vec![e(6), e(6)]]);
        let got5 = additive_rdp_multisets(5);
        assert_eq!(got5, vec![vec![e(8), e(8)]]);
        assert!(additive_rdp_multisets(7).is_empty());
        assert!(additive_rdp_multisets(13).is_empty());
        // Sanity on the coindex decoration.
        assert_eq!(got2[0][0].coindex, Coindex::R(0));
    }
}
