//! Dense univariate polynomials over `F_{p^k}` and deterministic
//! factorization.
//!
//! The factorization pipeline is squarefree decomposition (with p-th-root
//! recursion when the derivative vanishes), then distinct-degree splitting,
//! then equal-degree splitting.  Equal-degree splitting sweeps candidate
//! polynomials in a fixed canonical order instead of sampling, so repeated
//! runs produce identical output.

use crate::field::{Fq, FqElem};
use crate::CoreError;
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

/// A univariate polynomial, little-endian coefficients, no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct UPoly {
    field: Fq,
    coeffs: Vec<FqElem>,
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let c_str = c.to_string();
            let needs_parens = c_str.contains('+');
            let coeff = if c.is_one() && i > 0 {
                String::new()
            } else if needs_parens {
                format!("({c_str})")
            } else {
                c_str
            };
            let var = match i {
                0 => String::new(),
                1 => "x".to_string(),
                i => format!("x^{i}"),
            };
            let sep = if coeff.is_empty() || var.is_empty() { "" } else { "*" };
            parts.push(format!("{coeff}{sep}{var}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl UPoly {
    pub fn new(field: &Fq, coeffs: Vec<FqElem>) -> UPoly {
        let mut p = UPoly { field: field.clone(), coeffs };
        p.normalize();
        p
    }

    pub fn zero(field: &Fq) -> UPoly {
        UPoly { field: field.clone(), coeffs: vec![] }
    }

    pub fn one(field: &Fq) -> UPoly {
        UPoly { field: field.clone(), coeffs: vec![field.one()] }
    }

    pub fn constant(c: FqElem) -> UPoly {
        let field = c.field().clone();
        UPoly::new(&field, vec![c])
    }

    /// The variable `x`.
    pub fn x(field: &Fq) -> UPoly {
        UPoly { field: field.clone(), coeffs: vec![field.zero(), field.one()] }
    }

    /// Builds from integer coefficients, little-endian.
    pub fn from_ints(field: &Fq, ints: &[i64]) -> UPoly {
        UPoly::new(field, ints.iter().map(|&n| field.from_int(n)).collect())
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> &Fq {
        &self.field
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FqElem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading_coeff(&self) -> FqElem {
        self.coeffs.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn add(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect();
        UPoly::new(&self.field, coeffs)
    }

    pub fn sub(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).sub(&other.coeff(i))).collect();
        UPoly::new(&self.field, coeffs)
    }

    pub fn neg(&self) -> UPoly {
        UPoly::new(&self.field, self.coeffs.iter().map(|c| c.neg()).collect())
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero(&self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        UPoly::new(&self.field, out)
    }

    pub fn scale(&self, c: &FqElem) -> UPoly {
        UPoly::new(&self.field, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn make_monic(&self) -> UPoly {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        self.scale(&self.leading_coeff().inv().expect("nonzero leading coefficient"))
    }

    pub fn divrem(&self, divisor: &UPoly) -> (UPoly, UPoly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let db = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= db {
            return (UPoly::zero(&self.field), self.clone());
        }
        let lead_inv = divisor.leading_coeff().inv().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![self.field.zero(); rem.len() - db];
        for top in (db..rem.len()).rev() {
            if rem[top].is_zero() {
                continue;
            }
            let q = rem[top].mul(&lead_inv);
            quot[top - db] = q.clone();
            for (i, b) in divisor.coeffs.iter().enumerate() {
                rem[top - db + i] = rem[top - db + i].sub(&q.mul(b));
            }
        }
        (UPoly::new(&self.field, quot), UPoly::new(&self.field, rem))
    }

    /// Exact division; panics if the remainder is nonzero.
    pub fn div_exact(&self, divisor: &UPoly) -> UPoly {
        let (q, r) = self.divrem(divisor);
        assert!(r.is_zero(), "inexact univariate division");
        q
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        while !r1.is_zero() {
            let (_, r) = r0.divrem(&r1);
            r0 = r1;
            r1 = r;
        }
        r0.make_monic()
    }

    pub fn derivative(&self) -> UPoly {
        if self.coeffs.len() <= 1 {
            return UPoly::zero(&self.field);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul_int(i as i64))
            .collect();
        UPoly::new(&self.field, coeffs)
    }

    pub fn eval(&self, x: &FqElem) -> FqElem {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn pow_mod(&self, mut e: u128, modulus: &UPoly) -> UPoly {
        let mut acc = UPoly::one(&self.field);
        let mut base = self.divrem(modulus).1;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).divrem(modulus).1;
            }
            base = base.mul(&base).divrem(modulus).1;
            e >>= 1;
        }
        acc
    }

    /// For `f` with vanishing derivative, `f = g(x^p)`; returns the p-th
    /// root `h` with `h(x)^p = f(x)` (coefficientwise p-th roots, exponents
    /// divided by p).
    fn pth_root_poly(&self) -> UPoly {
        let p = self.field.p() as usize;
        let coeffs = self
            .coeffs
            .iter()
            .step_by(p)
            .map(|c| c.pth_root())
            .collect();
        UPoly::new(&self.field, coeffs)
    }

    /// Squarefree decomposition: returns pairwise-coprime squarefree monic
    /// `g_i` with multiplicities `m_i` such that `self = lc * prod g_i^m_i`.
    pub fn squarefree_decomposition(&self) -> Vec<(UPoly, usize)> {
        let f = self.make_monic();
        if f.degree().unwrap_or(0) == 0 {
            return vec![];
        }
        let mut out: Vec<(UPoly, usize)> = Vec::new();
        let deriv = f.derivative();
        if deriv.is_zero() {
            // f = h(x^p): recurse on the p-th root with multiplicities * p.
            let h = f.pth_root_poly();
            for (g, m) in h.squarefree_decomposition() {
                out.push((g, m * self.field.p() as usize));
            }
            return out;
        }
        let mut c = f.gcd(&deriv);
        let mut w = f.div_exact(&c);
        let mut i = 1;
        while !w.is_one() {
            let y = w.gcd(&c);
            let z = w.div_exact(&y);
            if z.degree().unwrap_or(0) > 0 {
                out.push((z, i));
            }
            i += 1;
            c = c.div_exact(&y);
            w = y;
        }
        if !c.is_one() {
            let h = c.pth_root_poly();
            for (g, m) in h.squarefree_decomposition() {
                out.push((g, m * self.field.p() as usize));
            }
        }
        out
    }

    /// Distinct-degree splitting of a squarefree monic polynomial:
    /// returns `(product of all irreducible factors of degree d, d)`.
    fn distinct_degree(&self) -> Vec<(UPoly, usize)> {
        let q = self.field.order();
        let mut f = self.clone();
        let mut out = Vec::new();
        let mut h = UPoly::x(&self.field);
        let mut d = 0;
        while f.degree().unwrap_or(0) > 0 {
            d += 1;
            if 2 * d > f.degree().unwrap() {
                out.push((f.clone(), f.degree().unwrap()));
                break;
            }
            h = h.pow_mod(q, &f);
            let g = h.sub(&UPoly::x(&self.field)).gcd(&f);
            if g.degree().unwrap_or(0) > 0 {
                out.push((g.clone(), d));
                f = f.div_exact(&g);
                h = h.divrem(&f).1;
            }
        }
        out
    }

    /// Equal-degree splitting: `self` is monic squarefree, a product of
    /// irreducibles all of degree `d`; returns the irreducible factors.
    ///
    /// Candidates are swept in canonical order (all polynomials of degree
    /// 1, then 2, ..., coefficient vectors in index order), so the result
    /// is deterministic.
    fn equal_degree(&self, d: usize) -> Vec<UPoly> {
        let n = self.degree().unwrap_or(0);
        if n == d || n == 0 {
            return vec![self.clone()];
        }
        let field = &self.field;
        let q = field.order();
        let k = field.degree();
        let p = field.p();

        for cand_deg in 1usize.. {
            let count = q.saturating_pow(cand_deg as u32);
            for idx in 0..count {
                // Candidate v: monic of degree cand_deg with lower
                // coefficients taken from the canonical enumeration.
                let mut coeffs: Vec<FqElem> = Vec::with_capacity(cand_deg + 1);
                let mut rest = idx;
                for _ in 0..cand_deg {
                    coeffs.push(field.from_index(rest % q));
                    rest /= q;
                }
                coeffs.push(field.one());
                let v = UPoly::new(field, coeffs);

                let w = if p == 2 {
                    // Trace map v + v^2 + v^4 + ... + v^(2^(kd-1)).
                    let mut acc = v.divrem(self).1;
                    let mut term = acc.clone();
                    for _ in 1..(k * d) {
                        term = term.mul(&term).divrem(self).1;
                        acc = acc.add(&term);
                    }
                    acc
                } else {
                    // v^((q^d-1)/2) - 1 via the norm to the degree-1 level:
                    // first N(v) = v^(1 + q + ... + q^(d-1)), then raise to
                    // (q-1)/2.  Avoids forming the huge exponent q^d.
                    let mut norm = v.divrem(self).1;
                    let mut vq = norm.clone();
                    for _ in 1..d {
                        vq = vq.pow_mod(q, self);
                        norm = norm.mul(&vq).divrem(self).1;
                    }
                    norm.pow_mod((q - 1) / 2, self).sub(&UPoly::one(field))
                };
                let g = w.gcd(self);
                let dg = g.degree().unwrap_or(0);
                if dg > 0 && dg < n {
                    let mut left = g.equal_degree(d);
                    let right = self.div_exact(&g).make_monic().equal_degree(d);
                    left.extend(right);
                    return left;
                }
            }
        }
        unreachable!("candidate sweep is unbounded")
    }

    /// Full factorization into monic irreducibles with multiplicities,
    /// sorted canonically.  The leading coefficient is dropped; callers
    /// needing it use [`UPoly::leading_coeff`].
    pub fn factor(&self) -> Result<Vec<(UPoly, usize)>, CoreError> {
        if self.is_zero() {
            return Err(CoreError::ZeroPolynomial);
        }
        let mut out: Vec<(UPoly, usize)> = Vec::new();
        for (g, m) in self.squarefree_decomposition() {
            for (h, d) in g.distinct_degree() {
                for irr in h.equal_degree(d) {
                    out.push((irr, m));
                }
            }
        }
        out.sort_by(|(a, _), (b, _)| {
            a.degree()
                .cmp(&b.degree())
                .then_with(|| {
                    let av: Vec<u128> = a.coeffs.iter().rev().map(|c| c.canonical_index()).collect();
                    let bv: Vec<u128> = b.coeffs.iter().rev().map(|c| c.canonical_index()).collect();
                    av.cmp(&bv)
                })
        });
        Ok(out)
    }

    /// True iff irreducible over the coefficient field.
    pub fn is_irreducible(&self) -> bool {
        match self.degree() {
            None | Some(0) => false,
            Some(1) => true,
            _ => {
                let f = self.factor().unwrap();
                f.len() == 1 && f[0].1 == 1
            }
        }
    }

    /// All roots in the coefficient field, sorted by canonical index.
    pub fn roots_in_field(&self) -> Vec<FqElem> {
        if self.is_zero() {
            panic!("roots of the zero polynomial");
        }
        if self.degree() == Some(0) {
            return vec![];
        }
        let q = self.field.order();
        // gcd with x^q - x isolates the part that splits into linears.
        let xq = UPoly::x(&self.field).pow_mod(q, self);
        let lin_part = xq.sub(&UPoly::x(&self.field)).gcd(self);
        let mut roots: Vec<FqElem> = Vec::new();
        if lin_part.degree().unwrap_or(0) == 0 {
            return roots;
        }
        for f in lin_part.equal_degree(1) {
            // monic x + a -> root -a
            debug_assert_eq!(f.degree(), Some(1));
            roots.push(f.coeff(0).neg());
        }
        roots.sort_by_key(|r| r.canonical_index());
        roots.dedup();
        roots
    }
}

#[allow(clippy::type_complexity)]
static EMBED_ROOT_CACHE: Lazy<Mutex<HashMap<((u64, usize), (u64, usize)), FqElem>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// The least root (by canonical index) of `sub`'s modulus inside `target`;
/// the anchor of the deterministic embedding `sub -> target`.
pub(crate) fn least_root_of_modulus(sub: &Fq, target: &Fq) -> Result<FqElem, CoreError> {
    let key = ((sub.p(), sub.degree()), (target.p(), target.degree()));
    if let Some(r) = EMBED_ROOT_CACHE.lock().unwrap().get(&key) {
        return Ok(r.clone());
    }
    let coeffs: Vec<FqElem> = sub
        .modulus()
        .iter()
        .map(|&c| target.from_int(c as i64))
        .collect();
    let modulus_in_target = UPoly::new(target, coeffs);
    let roots = modulus_in_target.roots_in_field();
    let root = roots.into_iter().next().ok_or_else(|| CoreError::NotSubfield {
        sub: format!("{sub:?}"),
        sup: format!("{target:?}"),
    })?;
    EMBED_ROOT_CACHE.lock().unwrap().insert(key, root.clone());
    Ok(root)
}
