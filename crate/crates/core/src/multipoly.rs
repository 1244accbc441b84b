//! Sparse multivariate polynomials over `F_{p^k}` under a weighted
//! graded-reverse-lexicographic order.
//!
//! A ring fixes the coefficient field, the variable names, and one positive
//! integer weight per variable (default 1).  The monomial order compares
//! weighted degrees first; ties are broken reverse-lexicographically: at
//! the last position where two exponent vectors differ, the *smaller*
//! exponent wins.  Terms are stored sorted descending, with no zero
//! coefficients.
//!
//! Exponents are capped at 2^16 - 1 per variable; overflowing the cap is a
//! hard error (panic), not a silent wrap.

use crate::field::{Fq, FqElem};
use crate::CoreError;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, PartialEq, Eq)]
struct RingData {
    field: Fq,
    names: Vec<String>,
    weights: Vec<u64>,
}

/// A polynomial ring descriptor; cheap to clone.
#[derive(Clone)]
pub struct Ring(Arc<RingData>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}
impl Eq for Ring {}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[{}]", self.0.field, self.0.names.join(","))
    }
}

impl Ring {
    /// All weights 1.
    pub fn new(field: &Fq, names: &[&str]) -> Ring {
        Ring::weighted(field, names, &vec![1; names.len()])
    }

    pub fn weighted(field: &Fq, names: &[&str], weights: &[u64]) -> Ring {
        assert_eq!(names.len(), weights.len());
        assert!(weights.iter().all(|&w| w >= 1), "weights must be positive");
        Ring(Arc::new(RingData {
            field: field.clone(),
            names: names.iter().map(|s| s.to_string()).collect(),
            weights: weights.to_vec(),
        }))
    }

    pub fn field(&self) -> &Fq {
        &self.0.field
    }

    pub fn nvars(&self) -> usize {
        self.0.names.len()
    }

    pub fn names(&self) -> Vec<&str> {
        self.0.names.iter().map(|s| s.as_str()).collect()
    }

    pub fn weights(&self) -> &[u64] {
        &self.0.weights
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.0.names.iter().position(|n| n == name)
    }

    /// Weighted degree of an exponent vector.
    pub fn wdeg(&self, exps: &[u16]) -> u64 {
        exps.iter()
            .zip(&self.0.weights)
            .map(|(&e, &w)| e as u64 * w)
            .sum()
    }

    /// Plain total degree of an exponent vector (weights ignored).
    pub fn tdeg(exps: &[u16]) -> u64 {
        exps.iter().map(|&e| e as u64).sum()
    }

    /// Descending comparison key: weighted grevlex.
    pub fn cmp_mono(&self, a: &[u16], b: &[u16]) -> Ordering {
        let wa = self.wdeg(a);
        let wb = self.wdeg(b);
        wa.cmp(&wb).then_with(|| {
            for i in (0..a.len()).rev() {
                if a[i] != b[i] {
                    // Smaller exponent in the last distinguishing variable
                    // means the larger monomial.
                    return b[i].cmp(&a[i]);
                }
            }
            Ordering::Equal
        })
    }

    /// The same ring over a larger coefficient field.
    pub fn extend_field(&self, target: &Fq) -> Ring {
        Ring(Arc::new(RingData {
            field: target.clone(),
            names: self.0.names.clone(),
            weights: self.0.weights.clone(),
        }))
    }

    /// A ring with extra variables appended (same field; new weights 1).
    pub fn with_vars(&self, extra: &[&str]) -> Ring {
        let mut names: Vec<String> = self.0.names.clone();
        names.extend(extra.iter().map(|s| s.to_string()));
        let mut weights = self.0.weights.clone();
        weights.extend(std::iter::repeat(1).take(extra.len()));
        Ring(Arc::new(RingData { field: self.0.field.clone(), names, weights }))
    }
}

/// Exponent cap per variable.
pub const MAX_EXP: u32 = u16::MAX as u32;

fn add_exps(a: &[u16], b: &[u16]) -> Vec<u16> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let s = x as u32 + y as u32;
            assert!(s <= MAX_EXP, "exponent overflow: {x} + {y} exceeds 2^16 - 1");
            s as u16
        })
        .collect()
}

/// A sparse multivariate polynomial.
#[derive(Clone, PartialEq, Eq)]
pub struct MPoly {
    ring: Ring,
    /// `(exponent vector, coefficient)`, sorted descending, coefficients
    /// nonzero.
    terms: Vec<(Vec<u16>, FqElem)>,
}

#[track_caller]
fn check_same_ring(a: &MPoly, b: &MPoly) {
    assert!(a.ring == b.ring, "polynomials from different rings");
}

impl MPoly {
    pub fn zero(ring: &Ring) -> MPoly {
        MPoly { ring: ring.clone(), terms: vec![] }
    }

    pub fn one(ring: &Ring) -> MPoly {
        MPoly::constant(ring, ring.field().one())
    }

    pub fn constant(ring: &Ring, c: FqElem) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(ring);
        }
        MPoly { ring: ring.clone(), terms: vec![(vec![0; ring.nvars()], c)] }
    }

    pub fn from_int(ring: &Ring, n: i64) -> MPoly {
        MPoly::constant(ring, ring.field().from_int(n))
    }

    /// The i-th variable.
    pub fn var(ring: &Ring, i: usize) -> MPoly {
        let mut exps = vec![0u16; ring.nvars()];
        exps[i] = 1;
        MPoly { ring: ring.clone(), terms: vec![(exps, ring.field().one())] }
    }

    pub fn var_named(ring: &Ring, name: &str) -> Result<MPoly, CoreError> {
        let i = ring
            .var_index(name)
            .ok_or_else(|| CoreError::UnknownVariable(name.to_string()))?;
        Ok(MPoly::var(ring, i))
    }

    pub fn monomial(ring: &Ring, exps: &[u16], c: FqElem) -> MPoly {
        assert_eq!(exps.len(), ring.nvars());
        if c.is_zero() {
            return MPoly::zero(ring);
        }
        MPoly { ring: ring.clone(), terms: vec![(exps.to_vec(), c)] }
    }

    /// Builds from unsorted `(exps, coeff)` pairs, merging duplicates.
    pub fn from_terms(ring: &Ring, terms: Vec<(Vec<u16>, FqElem)>) -> MPoly {
        let mut map: HashMap<Vec<u16>, FqElem> = HashMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), ring.nvars());
            match map.entry(e) {
                std::collections::hash_map::Entry::Occupied(mut o) => {
                    let s = o.get().add(&c);
                    if s.is_zero() {
                        o.remove();
                    } else {
                        *o.get_mut() = s;
                    }
                }
                std::collections::hash_map::Entry::Vacant(v) => {
                    if !c.is_zero() {
                        v.insert(c);
                    }
                }
            }
        }
        let mut terms: Vec<(Vec<u16>, FqElem)> = map.into_iter().collect();
        terms.sort_by(|(a, _), (b, _)| ring.cmp_mono(b, a));
        MPoly { ring: ring.clone(), terms }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> &[(Vec<u16>, FqElem)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms[0].1.is_one()
            && self.terms[0].0.iter().all(|&e| e == 0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.iter().all(|(e, _)| e.iter().all(|&x| x == 0))
    }

    /// The constant term (zero if absent).
    pub fn constant_term(&self) -> FqElem {
        self.terms
            .iter()
            .find(|(e, _)| e.iter().all(|&x| x == 0))
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| self.ring.field().zero())
    }

    /// True if invertible as a power series at the origin.
    pub fn is_unit_at_origin(&self) -> bool {
        !self.constant_term().is_zero()
    }

    /// Leading monomial exponents (order maximum).  Panics on zero.
    pub fn lm(&self) -> &[u16] {
        &self.terms.first().expect("leading monomial of zero").0
    }

    pub fn lc(&self) -> FqElem {
        self.terms.first().expect("leading coefficient of zero").1.clone()
    }

    /// Maximum weighted degree among terms; None for zero.
    pub fn wdeg(&self) -> Option<u64> {
        self.terms.iter().map(|(e, _)| self.ring.wdeg(e)).max()
    }

    /// Maximum plain total degree among terms; None for zero.
    pub fn tdeg(&self) -> Option<u64> {
        self.terms.iter().map(|(e, _)| Ring::tdeg(e)).max()
    }

    /// Minimum plain total degree among terms (the order of vanishing at
    /// the origin); None for zero.
    pub fn low_tdeg(&self) -> Option<u64> {
        self.terms.iter().map(|(e, _)| Ring::tdeg(e)).min()
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        check_same_ring(self, other);
        // Merge two descending term lists.
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut i = 0;
        let mut j = 0;
        while i < self.terms.len() && j < other.terms.len() {
            match self.ring.cmp_mono(&self.terms[i].0, &other.terms[j].0) {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(other.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = self.terms[i].1.add(&other.terms[j].1);
                    if !c.is_zero() {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        MPoly { ring: self.ring.clone(), terms: out }
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FqElem) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(&self.ring);
        }
        MPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a.mul(c))).collect(),
        }
    }

    pub fn mul_int(&self, n: i64) -> MPoly {
        self.scale(&self.ring.field().from_int(n))
    }

    /// Multiplication by one term.
    pub fn mul_term(&self, exps: &[u16], c: &FqElem) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(&self.ring);
        }
        MPoly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, a)| (add_exps(e, exps), a.mul(c)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        check_same_ring(self, other);
        if self.is_zero() || other.is_zero() {
            return MPoly::zero(&self.ring);
        }
        let mut map: HashMap<Vec<u16>, FqElem> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = add_exps(e1, e2);
                let prod = c1.mul(c2);
                match map.entry(e) {
                    std::collections::hash_map::Entry::Occupied(mut o) => {
                        let s = o.get().add(&prod);
                        if s.is_zero() {
                            o.remove();
                        } else {
                            *o.get_mut() = s;
                        }
                    }
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(prod);
                    }
                }
            }
        }
        let mut terms: Vec<(Vec<u16>, FqElem)> = map.into_iter().collect();
        terms.sort_by(|(a, _), (b, _)| self.ring.cmp_mono(b, a));
        MPoly { ring: self.ring.clone(), terms }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one(&self.ring);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> MPoly {
        let mut terms = Vec::new();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let coef = c.mul_int(e[i] as i64);
            if coef.is_zero() {
                continue;
            }
            let mut ne = e.clone();
            ne[i] -= 1;
            terms.push((ne, coef));
        }
        terms.sort_by(|(a, _), (b, _)| self.ring.cmp_mono(b, a));
        MPoly { ring: self.ring.clone(), terms }
    }

    /// Substitutes `images[i]` for variable `i`; images must share a common
    /// ring (which becomes the ring of the result).
    pub fn subst(&self, images: &[MPoly]) -> MPoly {
        assert_eq!(images.len(), self.ring.nvars());
        let target = images
            .first()
            .map(|f| f.ring.clone())
            .unwrap_or_else(|| self.ring.clone());
        // Cache powers per variable.
        let mut powers: Vec<Vec<MPoly>> = images
            .iter()
            .map(|f| vec![MPoly::one(&target), f.clone()])
            .collect();
        let mut acc = MPoly::zero(&target);
        for (e, c) in &self.terms {
            let mut term = MPoly::constant(&target, transfer_elem(c, target.field()));
            for (i, &exp) in e.iter().enumerate() {
                if exp == 0 {
                    continue;
                }
                while powers[i].len() <= exp as usize {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][exp as usize]);
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Evaluates at a point.
    pub fn eval(&self, point: &[FqElem]) -> FqElem {
        assert_eq!(point.len(), self.ring.nvars());
        let field = point
            .first()
            .map(|c| c.field().clone())
            .unwrap_or_else(|| self.ring.field().clone());
        let mut acc = field.zero();
        for (e, c) in &self.terms {
            let mut v = transfer_elem(c, &field);
            for (i, &exp) in e.iter().enumerate() {
                if exp > 0 {
                    v = v.mul(&point[i].pow(exp as u128));
                }
            }
            acc = acc.add(&v);
        }
        acc
    }

    /// Substitutes a single variable, leaving the others in place.
    pub fn subst_var(&self, i: usize, image: &MPoly) -> MPoly {
        let images: Vec<MPoly> = (0..self.ring.nvars())
            .map(|j| {
                if j == i {
                    image.clone()
                } else {
                    MPoly::var(&image.ring, j)
                }
            })
            .collect();
        self.subst(&images)
    }

    /// Moves the polynomial into the same ring over an extension field.
    pub fn embed_into(&self, target_ring: &Ring) -> Result<MPoly, CoreError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            terms.push((e.clone(), c.embed_into(target_ring.field())?));
        }
        Ok(MPoly { ring: target_ring.clone(), terms })
    }

    /// Keeps only terms of plain total degree < `n`.
    pub fn truncate_below(&self, n: u64) -> MPoly {
        MPoly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| Ring::tdeg(e) < n)
                .cloned()
                .collect(),
        }
    }

    /// The homogeneous part of plain total degree exactly `n`.
    pub fn homogeneous_part(&self, n: u64) -> MPoly {
        MPoly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| Ring::tdeg(e) == n)
                .cloned()
                .collect(),
        }
    }

    /// The weighted-homogeneous part of weighted degree exactly `n`.
    pub fn weighted_part(&self, n: u64) -> MPoly {
        MPoly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| self.ring.wdeg(e) == n)
                .cloned()
                .collect(),
        }
    }

    /// Multiplicative inverse as a power-series jet: the unique `g` with
    /// `self * g = 1` modulo terms of plain total degree >= `order`.
    /// `None` when the constant term vanishes (not a unit at the origin).
    pub fn invert_jet(&self, order: u64) -> Option<MPoly> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return None;
        }
        let cinv = c0.inv().expect("nonzero constant term");
        // self = c0 (1 - v) with ord(v) >= 1, so
        // self^{-1} = c0^{-1} (1 + v + v^2 + ...), truncated.
        let one = MPoly::one(&self.ring);
        let v = one.sub(&self.scale(&cinv)).truncate_below(order);
        let mut sum = one.clone();
        let mut pw = one;
        for _ in 1..order {
            pw = pw.mul(&v).truncate_below(order);
            if pw.is_zero() {
                break;
            }
            sum = sum.add(&pw);
        }
        Some(sum.scale(&cinv))
    }

    /// Exact division by a single term; panics if any exponent would go
    /// negative (used for strict transforms where divisibility is known).
    pub fn div_exact_term(&self, exps: &[u16], c: &FqElem) -> MPoly {
        let cinv = c.inv().expect("division by zero coefficient");
        MPoly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, a)| {
                    let ne: Vec<u16> = e
                        .iter()
                        .zip(exps)
                        .map(|(&x, &y)| {
                            assert!(x >= y, "inexact term division");
                            x - y
                        })
                        .collect();
                    (ne, a.mul(&cinv))
                })
                .collect(),
        }
    }

    /// Parses the flat text syntax: signed terms `c*x^a*y^b`, with `*` and
    /// `^` optional, plus parenthesized coefficient sums in the field
    /// generator `t`, e.g. `(t+1)*x*y^2`.
    pub fn parse(ring: &Ring, text: &str) -> Result<MPoly, CoreError> {
        parse_impl(ring, text)
    }
}

/// Moves a coefficient into `field` (identity if parents are equal;
/// embedding if the target is an extension).
fn transfer_elem(c: &FqElem, field: &Fq) -> FqElem {
    if c.field() == field {
        c.clone()
    } else {
        c.embed_into(field)
            .expect("coefficient field embeds into the target field")
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = self.ring.names();
        let mut parts = Vec::new();
        for (e, c) in &self.terms {
            let mut factors = Vec::new();
            let c_str = c.to_string();
            let is_one = c.is_one();
            let constant_mono = e.iter().all(|&x| x == 0);
            if !is_one || constant_mono {
                if c_str.contains('+') {
                    factors.push(format!("({c_str})"));
                } else {
                    factors.push(c_str);
                }
            }
            for (i, &exp) in e.iter().enumerate() {
                match exp {
                    0 => {}
                    1 => factors.push(names[i].to_string()),
                    _ => factors.push(format!("{}^{}", names[i], exp)),
                }
            }
            parts.push(factors.join("*"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

// ---- parser ----

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    ring: &'a Ring,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Plus,
    Minus,
    Star,
    Int(u64),
    /// Variable with its exponent (adjacent digits or `^digits`).
    VarPow(usize, u32),
    /// Field generator `t` with exponent.
    GenPow(u32),
    LParen,
    RParen,
}

impl<'a> Lexer<'a> {
    fn new(ring: &'a Ring, text: &str) -> Lexer<'a> {
        Lexer { chars: text.chars().collect(), pos: 0, ring }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn read_int(&mut self) -> u64 {
        let mut v: u64 = 0;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            v = v
                .saturating_mul(10)
                .saturating_add(self.chars[self.pos] as u64 - '0' as u64);
            self.pos += 1;
        }
        v
    }

    fn next(&mut self) -> Result<Option<Tok>, CoreError> {
        self.skip_ws();
        if self.pos >= self.chars.len() {
            return Ok(None);
        }
        let c = self.chars[self.pos];
        let tok = match c {
            '+' => {
                self.pos += 1;
                Tok::Plus
            }
            '-' => {
                self.pos += 1;
                Tok::Minus
            }
            '*' => {
                self.pos += 1;
                Tok::Star
            }
            '(' => {
                self.pos += 1;
                Tok::LParen
            }
            ')' => {
                self.pos += 1;
                Tok::RParen
            }
            '0'..='9' => Tok::Int(self.read_int()),
            _ if c.is_alphabetic() || c == '_' => {
                // Longest match among declared names; fall back to the
                // field generator name 't'.
                let names = self.ring.names();
                let rest: String = self.chars[self.pos..].iter().collect();
                let mut best: Option<(usize, usize)> = None; // (len, var index)
                for (i, name) in names.iter().enumerate() {
                    if rest.starts_with(name) && best.map_or(true, |(l, _)| name.len() > l) {
                        best = Some((name.len(), i));
                    }
                }
                if let Some((len, idx)) = best {
                    self.pos += len;
                    let exp = self.read_exponent()?;
                    Tok::VarPow(idx, exp)
                } else if rest.starts_with('t') && self.ring.field().degree() > 1 {
                    self.pos += 1;
                    let exp = self.read_exponent()?;
                    Tok::GenPow(exp)
                } else {
                    let word: String = self.chars[self.pos..]
                        .iter()
                        .take_while(|c| c.is_alphanumeric() || **c == '_')
                        .collect();
                    return Err(CoreError::UnknownVariable(word));
                }
            }
            other => return Err(CoreError::Parse(format!("unexpected character '{other}'"))),
        };
        Ok(Some(tok))
    }

    /// After a variable name: `^n`, adjacent digits, or nothing (exponent 1).
    fn read_exponent(&mut self) -> Result<u32, CoreError> {
        if self.pos < self.chars.len() && self.chars[self.pos] == '^' {
            self.pos += 1;
            self.skip_ws();
            if self.pos >= self.chars.len() || !self.chars[self.pos].is_ascii_digit() {
                return Err(CoreError::Parse("expected exponent after '^'".into()));
            }
            let e = self.read_int();
            if e > MAX_EXP as u64 {
                return Err(CoreError::Parse(format!("exponent {e} exceeds the cap")));
            }
            Ok(e as u32)
        } else if self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            let e = self.read_int();
            if e > MAX_EXP as u64 {
                return Err(CoreError::Parse(format!("exponent {e} exceeds the cap")));
            }
            Ok(e as u32)
        } else {
            Ok(1)
        }
    }
}

fn parse_impl(ring: &Ring, text: &str) -> Result<MPoly, CoreError> {
    let mut lexer = Lexer::new(ring, text);
    let mut tokens = Vec::new();
    while let Some(t) = lexer.next()? {
        tokens.push(t);
    }
    if tokens.is_empty() {
        return Err(CoreError::Parse("empty polynomial text".into()));
    }
    let field = ring.field().clone();
    let mut acc = MPoly::zero(ring);
    let mut i = 0;

    while i < tokens.len() {
        // Sign.
        let mut sign = 1i64;
        loop {
            match tokens.get(i) {
                Some(Tok::Plus) => {
                    i += 1;
                }
                Some(Tok::Minus) => {
                    sign = -sign;
                    i += 1;
                }
                _ => break,
            }
        }
        // Factors.
        let mut coeff = field.from_int(sign);
        let mut exps = vec![0u32; ring.nvars()];
        let mut saw_factor = false;
        loop {
            match tokens.get(i) {
                Some(Tok::Int(n)) => {
                    coeff = coeff.mul(&field.from_int(*n as i64));
                    i += 1;
                    saw_factor = true;
                }
                Some(Tok::VarPow(idx, e)) => {
                    exps[*idx] += e;
                    i += 1;
                    saw_factor = true;
                }
                Some(Tok::GenPow(e)) => {
                    coeff = coeff.mul(&field.generator().pow(*e as u128));
                    i += 1;
                    saw_factor = true;
                }
                Some(Tok::LParen) => {
                    let (value, consumed) = parse_paren_coeff(&field, &tokens[i..])?;
                    coeff = coeff.mul(&value);
                    i += consumed;
                    saw_factor = true;
                }
                Some(Tok::Star) => {
                    i += 1;
                }
                _ => break,
            }
        }
        if !saw_factor {
            return Err(CoreError::Parse("dangling sign with no term".into()));
        }
        let exps_u16: Vec<u16> = exps
            .iter()
            .map(|&e| {
                if e > MAX_EXP {
                    return Err(CoreError::Parse(format!("exponent {e} exceeds the cap")));
                }
                Ok(e as u16)
            })
            .collect::<Result<_, _>>()?;
        acc = acc.add(&MPoly::monomial(ring, &exps_u16, coeff));
    }
    Ok(acc)
}

/// Parses `( sum of integer/generator-power products )`, returning the
/// field value and the number of tokens consumed (including both parens).
fn parse_paren_coeff(field: &Fq, tokens: &[Tok]) -> Result<(FqElem, usize), CoreError> {
    debug_assert_eq!(tokens.first(), Some(&Tok::LParen));
    let mut i = 1;
    let mut acc = field.zero();
    loop {
        let mut sign = 1i64;
        loop {
            match tokens.get(i) {
                Some(Tok::Plus) => i += 1,
                Some(Tok::Minus) => {
                    sign = -sign;
                    i += 1;
                }
                _ => break,
            }
        }
        let mut value = field.from_int(sign);
        let mut saw = false;
        loop {
            match tokens.get(i) {
                Some(Tok::Int(n)) => {
                    value = value.mul(&field.from_int(*n as i64));
                    i += 1;
                    saw = true;
                }
                Some(Tok::GenPow(e)) => {
                    value = value.mul(&field.generator().pow(*e as u128));
                    i += 1;
                    saw = true;
                }
                Some(Tok::Star) => i += 1,
                _ => break,
            }
        }
        if !saw {
            return Err(CoreError::Parse("empty factor inside parentheses".into()));
        }
        acc = acc.add(&value);
        match tokens.get(i) {
            Some(Tok::RParen) => return Ok((acc, i + 1)),
            Some(Tok::Plus) | Some(Tok::Minus) => continue,
            other => {
                return Err(CoreError::Parse(format!(
                    "unexpected token inside parentheses: {other:?}"
                )))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring2() -> Ring {
        Ring::new(&Fq::new(5, 1).unwrap(), &["x", "y"])
    }

    #[test]
    fn order_is_weighted_grevlex() {
        let f5 = Fq::new(5, 1).unwrap();
        let r = Ring::new(&f5, &["x", "y", "z"]);
        // Within degree 2: x^2 > xy > y^2 > xz > yz > z^2 under grevlex.
        let seq: Vec<Vec<u16>> = vec![
            vec![2, 0, 0],
            vec![1, 1, 0],
            vec![0, 2, 0],
            vec![1, 0, 1],
            vec![0, 1, 1],
            vec![0, 0, 2],
        ];
        for w in seq.windows(2) {
            assert_eq!(r.cmp_mono(&w[0], &w[1]), Ordering::Greater, "{:?} vs {:?}", w[0], w[1]);
        }
        // Degree dominates.
        assert_eq!(r.cmp_mono(&[0, 0, 3], &[2, 0, 0]), Ordering::Greater);
    }

    #[test]
    fn weights_change_the_grading() {
        let f5 = Fq::new(5, 1).unwrap();
        let r = Ring::weighted(&f5, &["w", "x", "y", "z"], &[3, 1, 1, 1]);
        // wdeg(w) = 3 > wdeg(x^2) = 2.
        assert_eq!(r.cmp_mono(&[1, 0, 0, 0], &[0, 2, 0, 0]), Ordering::Greater);
        // w^2 and x^3*y^3 both have weighted degree 6; grevlex breaks the tie.
        assert_eq!(r.wdeg(&[2, 0, 0, 0]), 6);
        assert_eq!(r.wdeg(&[0, 3, 3, 0]), 6);
    }

    #[test]
    fn arithmetic_ring_axioms_smoke() {
        let r = ring2();
        let x = MPoly::var(&r, 0);
        let y = MPoly::var(&r, 1);
        let f = x.add(&y).pow(2);
        // (x+y)^2 = x^2 + 2xy + y^2 over F_5.
        let expect = x
            .mul(&x)
            .add(&x.mul(&y).mul_int(2))
            .add(&y.mul(&y));
        assert_eq!(f, expect);
        assert_eq!(f.sub(&f), MPoly::zero(&r));
        // Frobenius: (x+y)^5 = x^5 + y^5 in characteristic 5.
        let frob = x.add(&y).pow(5);
        assert_eq!(frob, x.pow(5).add(&y.pow(5)));
    }

    #[test]
    fn partial_derivatives() {
        let r = ring2();
        let x = MPoly::var(&r, 0);
        let y = MPoly::var(&r, 1);
        let f = x.pow(3).mul(&y).add(&y.pow(5)); // x^3 y + y^5
        assert_eq!(f.partial(0), x.pow(2).mul(&y).mul_int(3));
        // d/dy y^5 = 5y^4 = 0 in char 5.
        assert_eq!(f.partial(1), x.pow(3));
    }

    #[test]
    fn parse_basic() {
        let r = ring2();
        let f = MPoly::parse(&r, "2*x^2*y + 3x - 1").unwrap();
        let x = MPoly::var(&r, 0);
        let y = MPoly::var(&r, 1);
        let expect = x
            .pow(2)
            .mul(&y)
            .mul_int(2)
            .add(&x.mul_int(3))
            .add(&MPoly::from_int(&r, -1));
        assert_eq!(f, expect);
    }

    #[test]
    fn parse_optional_star_and_caret() {
        let r = ring2();
        assert_eq!(
            MPoly::parse(&r, "x2y3").unwrap(),
            MPoly::parse(&r, "x^2 * y^3").unwrap()
        );
        assert_eq!(
            MPoly::parse(&r, "-xy").unwrap(),
            MPoly::parse(&r, "- x * y").unwrap()
        );
    }

    #[test]
    fn parse_rejects_unknown_variables() {
        let r = ring2();
        assert!(matches!(
            MPoly::parse(&r, "x + q"),
            Err(CoreError::UnknownVariable(_))
        ));
    }

    #[test]
    fn parse_generator_coefficients() {
        let f8 = Fq::new(2, 3).unwrap();
        let r = Ring::new(&f8, &["x", "y"]);
        let f = MPoly::parse(&r, "t^2*x + (t+1)*y").unwrap();
        let t = f8.generator();
        let x = MPoly::var(&r, 0);
        let y = MPoly::var(&r, 1);
        let expect = x
            .scale(&t.mul(&t))
            .add(&y.scale(&t.add(&f8.one())));
        assert_eq!(f, expect);
    }

    #[test]
    fn display_parse_roundtrip() {
        let r = ring2();
        for text in ["x^2*y + 3*x + 4", "2*x^7 + x*y + y^2", "4"] {
            let f = MPoly::parse(&r, text).unwrap();
            let g = MPoly::parse(&r, &f.to_string()).unwrap();
            assert_eq!(f, g, "{text}");
        }
        // Extension coefficients survive via parenthesized sums.
        let f8 = Fq::new(2, 3).unwrap();
        let re = Ring::new(&f8, &["x", "y"]);
        let f = MPoly::parse(&re, "(t^2+t)*x^2 + t*y + 1").unwrap();
        let g = MPoly::parse(&re, &f.to_string()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn subst_blowup_chart() {
        // F = z^2 + xy, substitute z -> xz', y -> xy': F = x^2(z'^2 + y').
        let f2 = Fq::new(2, 1).unwrap();
        let r = Ring::new(&f2, &["x", "y", "z"]);
        let f = MPoly::parse(&r, "z^2 + x*y").unwrap();
        let x = MPoly::var(&r, 0);
        let y = MPoly::var(&r, 1);
        let z = MPoly::var(&r, 2);
        let img = f.subst(&[x.clone(), x.mul(&y), x.mul(&z)]);
        let expect = MPoly::parse(&r, "x^2*z^2 + x^2*y").unwrap();
        assert_eq!(img, expect);
    }

    #[test]
    fn eval_and_truncate() {
        let f5 = Fq::new(5, 1).unwrap();
        let r = Ring::new(&f5, &["x", "y"]);
        let f = MPoly::parse(&r, "x^3 + x*y + 2").unwrap();
        let v = f.eval(&[f5.from_int(2), f5.from_int(3)]);
        // 8 + 6 + 2 = 16 = 1 mod 5.
        assert_eq!(v, f5.from_int(1));
        assert_eq!(f.truncate_below(2), MPoly::parse(&r, "2").unwrap());
        assert_eq!(f.truncate_below(4), f);
        assert_eq!(f.homogeneous_part(2), MPoly::parse(&r, "x*y").unwrap());
    }

    #[test]
    #[should_panic(expected = "exponent overflow")]
    fn exponent_overflow_is_hard_error() {
        let r = ring2();
        let x = MPoly::var(&r, 0);
        let big = MPoly::monomial(&r, &[u16::MAX, 0], r.field().one());
        let _ = big.mul(&x);
    }
}
