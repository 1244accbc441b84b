//! Exact arithmetic in `F_p` and `F_{p^k}`.
//!
//! A field is identified by `(p, k)` together with its canonical modulus:
//! the lexicographically least monic irreducible polynomial of degree `k`
//! over `F_p`, coefficients compared from the highest degree down.  This
//! makes every run (and every independent reimplementation) agree on the
//! representation of `F_{p^k}` without a table of Conway polynomials.
//! For `k = 1` the modulus is the placeholder `t`.
//!
//! Elements carry a handle to their parent field; arithmetic between
//! elements of different parents is a hard error (`panic`), with explicit
//! [`FqElem::embed_into`] for subfield inclusions `F_{p^k} c F_{p^{km}}`.

use crate::CoreError;
use once_cell::sync::Lazy;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

/// Supported prime characteristics.
pub const SUPPORTED_PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Largest supported extension degree.
pub const MAX_DEGREE: usize = 24;

#[derive(Debug, PartialEq, Eq)]
struct FieldData {
    p: u64,
    k: usize,
    /// Monic modulus, little-endian coefficients in `F_p`, length `k + 1`.
    modulus: Vec<u64>,
}

/// A finite field `F_{p^k}`; cheap to clone (shared handle).
#[derive(Clone)]
pub struct Fq(Arc<FieldData>);

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.order_str())
    }
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}
impl Eq for Fq {}

static FIELD_CACHE: Lazy<Mutex<HashMap<(u64, usize), Fq>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

impl Fq {
    /// Constructs `F_{p^k}` with the canonical modulus.
    pub fn new(p: u64, k: usize) -> Result<Fq, CoreError> {
        if !SUPPORTED_PRIMES.contains(&p) {
            return Err(CoreError::UnsupportedCharacteristic(p));
        }
        if k == 0 || k > MAX_DEGREE {
            return Err(CoreError::DegreeTooLarge(k));
        }
        let mut cache = FIELD_CACHE.lock().unwrap();
        if let Some(f) = cache.get(&(p, k)) {
            return Ok(f.clone());
        }
        let modulus = canonical_modulus(p, k);
        let field = Fq(Arc::new(FieldData { p, k, modulus }));
        cache.insert((p, k), field.clone());
        Ok(field)
    }

    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Fq, CoreError> {
        Fq::new(p, 1)
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> usize {
        self.0.k
    }

    /// `p^k` as a `u128` (fits for all supported parameters).
    pub fn order(&self) -> u128 {
        (0..self.0.k).fold(1u128, |acc, _| acc * self.0.p as u128)
    }

    fn order_str(&self) -> String {
        if self.0.k == 1 {
            format!("{}", self.0.p)
        } else {
            format!("{}^{}", self.0.p, self.0.k)
        }
    }

    /// Monic modulus, little-endian coefficients, length `k + 1`.
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn zero(&self) -> FqElem {
        FqElem { field: self.clone(), c: vec![0; self.0.k] }
    }

    pub fn one(&self) -> FqElem {
        self.from_int(1)
    }

    /// The image of an integer under `Z -> F_{p^k}`.
    pub fn from_int(&self, n: i64) -> FqElem {
        let p = self.0.p as i64;
        let mut c = vec![0u64; self.0.k];
        c[0] = n.rem_euclid(p) as u64;
        FqElem { field: self.clone(), c }
    }

    /// The class of `t` modulo the modulus (zero when `k = 1`).
    pub fn generator(&self) -> FqElem {
        let mut c = vec![0u64; self.0.k];
        if self.0.k > 1 {
            c[1] = 1;
        }
        FqElem { field: self.clone(), c }
    }

    /// The element whose base-p digit expansion (little-endian in the
    /// modulus basis) is `n`; inverse of [`FqElem::canonical_index`].
    pub fn from_index(&self, mut n: u128) -> FqElem {
        let p = self.0.p as u128;
        let mut c = vec![0u64; self.0.k];
        for slot in c.iter_mut() {
            *slot = (n % p) as u64;
            n /= p;
        }
        FqElem { field: self.clone(), c }
    }

    /// All field elements in canonical-index order.
    pub fn elements(&self) -> impl Iterator<Item = FqElem> + '_ {
        (0..self.order()).map(move |i| self.from_index(i))
    }

    /// Builds an element from explicit coordinates in the modulus basis
    /// (little-endian); values are reduced mod p.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> FqElem {
        assert!(coeffs.len() <= self.0.k, "too many coordinates");
        let mut c = vec![0u64; self.0.k];
        for (slot, &v) in c.iter_mut().zip(coeffs) {
            *slot = v % self.0.p;
        }
        FqElem { field: self.clone(), c }
    }
}

/// An element of `F_{p^k}`: `k` coordinates in the modulus basis.
#[derive(Clone, PartialEq, Eq)]
pub struct FqElem {
    field: Fq,
    c: Vec<u64>,
}

impl Serialize for FqElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[track_caller]
fn check_same_field(a: &FqElem, b: &FqElem) {
    assert!(
        a.field == b.field,
        "elements of different fields: {:?} vs {:?}",
        a.field,
        b.field
    );
}

impl FqElem {
    pub fn field(&self) -> &Fq {
        &self.field
    }

    /// Coordinates in the modulus basis, little-endian.
    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1..].iter().all(|&x| x == 0)
    }

    /// True if the element lies in the prime field.
    pub fn is_in_prime_field(&self) -> bool {
        self.c[1..].iter().all(|&x| x == 0)
    }

    /// The base-p digit value of the coordinate vector; a total order on
    /// the field used wherever a deterministic sweep or "least element"
    /// choice is needed.
    pub fn canonical_index(&self) -> u128 {
        let p = self.field.0.p as u128;
        self.c.iter().rev().fold(0u128, |acc, &d| acc * p + d as u128)
    }

    pub fn add(&self, other: &FqElem) -> FqElem {
        check_same_field(self, other);
        let p = self.field.0.p;
        let c = self
            .c
            .iter()
            .zip(&other.c)
            .map(|(&a, &b)| (a + b) % p)
            .collect();
        FqElem { field: self.field.clone(), c }
    }

    pub fn sub(&self, other: &FqElem) -> FqElem {
        check_same_field(self, other);
        let p = self.field.0.p;
        let c = self
            .c
            .iter()
            .zip(&other.c)
            .map(|(&a, &b)| (a + p - b) % p)
            .collect();
        FqElem { field: self.field.clone(), c }
    }

    pub fn neg(&self) -> FqElem {
        let p = self.field.0.p;
        let c = self.c.iter().map(|&a| (p - a) % p).collect();
        FqElem { field: self.field.clone(), c }
    }

    pub fn mul(&self, other: &FqElem) -> FqElem {
        check_same_field(self, other);
        let p = self.field.0.p;
        let k = self.field.0.k;
        if k == 1 {
            return FqElem {
                field: self.field.clone(),
                c: vec![(self.c[0] * other.c[0]) % p],
            };
        }
        // Schoolbook product then reduction by the monic modulus.
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a * b) % p;
            }
        }
        reduce_by_modulus(&mut prod, &self.field.0.modulus, p);
        prod.truncate(k);
        FqElem { field: self.field.clone(), c: prod }
    }

    pub fn mul_int(&self, n: i64) -> FqElem {
        self.mul(&self.field.from_int(n))
    }

    pub fn pow(&self, mut e: u128) -> FqElem {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm on the
    /// coordinate polynomial and the modulus.
    pub fn inv(&self) -> Result<FqElem, CoreError> {
        if self.is_zero() {
            return Err(CoreError::DivisionByZero);
        }
        let p = self.field.0.p;
        let k = self.field.0.k;
        if k == 1 {
            let a = self.c[0];
            let inv = mod_inverse(a, p);
            return Ok(FqElem { field: self.field.clone(), c: vec![inv] });
        }
        // Extended Euclid over F_p[t] on (self, modulus).
        let mut r0: Vec<u64> = self.field.0.modulus.clone();
        let mut r1: Vec<u64> = trim(self.c.clone());
        let mut s0: Vec<u64> = vec![];
        let mut s1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            let (q, r) = poly_divrem_fp(&r0, &r1, p);
            let s = poly_sub_fp(&s0, &poly_mul_fp(&q, &s1, p), p);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        // r0 is the gcd: a nonzero constant, since the modulus is
        // irreducible and self != 0.
        debug_assert_eq!(r0.len(), 1);
        let scale = mod_inverse(r0[0], p);
        let mut c: Vec<u64> = s0.iter().map(|&x| (x * scale) % p).collect();
        c.resize(k, 0);
        Ok(FqElem { field: self.field.clone(), c })
    }

    pub fn div(&self, other: &FqElem) -> Result<FqElem, CoreError> {
        Ok(self.mul(&other.inv()?))
    }

    /// The Frobenius `a -> a^p`.
    pub fn frobenius(&self) -> FqElem {
        self.pow(self.field.0.p as u128)
    }

    /// The unique p-th root: `a^(p^(k-1))`.
    pub fn pth_root(&self) -> FqElem {
        let p = self.field.0.p as u128;
        let e = (0..self.field.0.k - 1).fold(1u128, |acc, _| acc * p);
        self.pow(e)
    }

    /// A square root, if one exists in this field (char != 2: Tonelli via
    /// exponentiation for q = 3 mod 4, deterministic search otherwise;
    /// char 2: `a^(q/2)` since squaring is bijective).
    pub fn sqrt(&self) -> Option<FqElem> {
        let q = self.field.order();
        if self.field.0.p == 2 {
            // Squaring is a bijection; invert it by q/2 more squarings.
            return Some(self.pow(q / 2));
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        if q % 4 == 3 {
            let cand = self.pow((q + 1) / 4);
            return (cand.mul(&cand) == *self).then_some(cand);
        }
        // Deterministic sweep; used only on small fields in practice.
        self.field
            .elements()
            .find(|x| x.mul(x) == *self)
    }

    /// Embeds this element into `target`, where the parent field is
    /// `F_{p^k}` and `target` is `F_{p^(km)}`.  The embedding sends the
    /// modulus root `t` to the least root (by canonical index) of the
    /// modulus inside `target`, so it is deterministic.
    pub fn embed_into(&self, target: &Fq) -> Result<FqElem, CoreError> {
        if self.field == *target {
            return Ok(FqElem { field: target.clone(), c: self.c.clone() });
        }
        if self.field.0.p != target.0.p || target.0.k % self.field.0.k != 0 {
            return Err(CoreError::NotSubfield {
                sub: format!("{:?}", self.field),
                sup: format!("{target:?}"),
            });
        }
        let root = crate::unipoly::least_root_of_modulus(&self.field, target)?;
        // Evaluate the coordinate polynomial at the root.
        let mut acc = target.zero();
        for &d in self.c.iter().rev() {
            acc = acc.mul(&root).add(&target.from_int(d as i64));
        }
        Ok(acc)
    }
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.0.k == 1 || self.is_in_prime_field() {
            return write!(f, "{}", self.c[0]);
        }
        let mut parts = Vec::new();
        for (i, &v) in self.c.iter().enumerate().rev() {
            if v == 0 {
                continue;
            }
            let part = match (i, v) {
                (0, v) => format!("{v}"),
                (1, 1) => "t".to_string(),
                (1, v) => format!("{v}t"),
                (i, 1) => format!("t^{i}"),
                (i, v) => format!("{v}t^{i}"),
            };
            parts.push(part);
        }
        write!(f, "{}", parts.join("+"))
    }
}

/// In-place reduction of a little-endian coefficient vector by a monic
/// modulus.
fn reduce_by_modulus(poly: &mut Vec<u64>, modulus: &[u64], p: u64) {
    let k = modulus.len() - 1;
    while poly.len() > k {
        let d = poly.len() - 1;
        let lead = poly[d];
        if lead != 0 {
            for (i, &m) in modulus.iter().enumerate().take(k) {
                let idx = d - k + i;
                poly[idx] = (poly[idx] + (p - (lead * m) % p)) % p;
            }
        }
        poly.pop();
    }
    poly.resize(k, 0);
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // Fermat: a^(p-2) mod p; p is a small prime.
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

// ---- dense univariate arithmetic over F_p (little-endian Vec<u64>, no
// trailing zeros), used for modulus search and element inversion ----

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn poly_mul_fp(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

fn poly_sub_fp(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *slot = (x + p - y) % p;
    }
    trim(out)
}

fn poly_divrem_fp(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut rem: Vec<u64> = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = mod_inverse(b[db], p);
    if rem.len() <= db {
        return (vec![], trim(rem));
    }
    let mut quot = vec![0u64; rem.len() - db];
    while trim(rem.clone()).len() > db {
        rem = trim(rem);
        let dr = rem.len() - 1;
        let coef = rem[dr] * lead_inv % p;
        quot[dr - db] = coef;
        for (i, &bc) in b.iter().enumerate() {
            let idx = dr - db + i;
            rem[idx] = (rem[idx] + p - (coef * bc) % p) % p;
        }
    }
    (trim(quot), trim(rem))
}

fn poly_gcd_fp(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r0 = trim(a.to_vec());
    let mut r1 = trim(b.to_vec());
    while !r1.is_empty() {
        let (_, r) = poly_divrem_fp(&r0, &r1, p);
        r0 = r1;
        r1 = r;
    }
    if let Some(&lead) = r0.last() {
        let inv = mod_inverse(lead, p);
        r0 = r0.iter().map(|&x| (x * inv) % p).collect();
    }
    r0
}

/// `x^(p^j) mod f` by iterated p-th powering.
fn frobenius_power_mod(f: &[u64], j: usize, p: u64) -> Vec<u64> {
    let mut cur = if f.len() > 2 { vec![0, 1] } else { vec![0] };
    // For degree-1 modulus, x mod f is a constant; handle generically.
    if f.len() == 2 {
        let (_, r) = poly_divrem_fp(&[0, 1], f, p);
        cur = r;
    }
    for _ in 0..j {
        cur = poly_powmod_fp(&cur, p as u128, f, p);
    }
    cur
}

fn poly_powmod_fp(base: &[u64], mut e: u128, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            let (_, r) = poly_divrem_fp(&poly_mul_fp(&acc, &b, p), f, p);
            acc = r;
        }
        let (_, r) = poly_divrem_fp(&poly_mul_fp(&b, &b, p), f, p);
        b = r;
        e >>= 1;
    }
    acc
}

/// Rabin irreducibility test for a monic polynomial of degree `k >= 1`
/// over `F_p`.
fn is_irreducible_fp(f: &[u64], p: u64) -> bool {
    let k = f.len() - 1;
    if k == 1 {
        return true;
    }
    // x^(p^k) = x (mod f)
    let xpk = frobenius_power_mod(f, k, p);
    if trim(poly_sub_fp(&xpk, &[0, 1], p)) != Vec::<u64>::new() {
        return false;
    }
    // gcd(x^(p^(k/q)) - x, f) = 1 for each prime q | k
    let mut rest = k;
    let mut primes = Vec::new();
    let mut d = 2;
    while d * d <= rest {
        if rest % d == 0 {
            primes.push(d);
            while rest % d == 0 {
                rest /= d;
            }
        }
        d += 1;
    }
    if rest > 1 {
        primes.push(rest);
    }
    for q in primes {
        let xpj = frobenius_power_mod(f, k / q, p);
        let g = poly_gcd_fp(&poly_sub_fp(&xpj, &[0, 1], p), f, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// The lexicographically least monic irreducible of degree `k` over `F_p`,
/// coefficients compared from the highest degree down.
fn canonical_modulus(p: u64, k: usize) -> Vec<u64> {
    if k == 1 {
        return vec![0, 1]; // t
    }
    let total = (0..k).fold(1u128, |acc, _| acc * p as u128);
    for m in 0..total {
        // Digits of m, most significant digit = coefficient of t^(k-1).
        let mut f = vec![0u64; k + 1];
        f[k] = 1;
        let mut rest = m;
        for i in 0..k {
            f[i] = (rest % p as u128) as u64;
            rest /= p as u128;
        }
        if is_irreducible_fp(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_basics() {
        let f2 = Fq::new(2, 1).unwrap();
        assert_eq!(f2.order(), 2);
        let one = f2.one();
        assert!(one.add(&one).is_zero());

        let f7 = Fq::new(7, 1).unwrap();
        let three = f7.from_int(3);
        assert_eq!(three.inv().unwrap(), f7.from_int(5)); // 3*5 = 15 = 1 mod 7
    }

    #[test]
    fn unsupported_parameters_error() {
        assert!(matches!(Fq::new(4, 1), Err(CoreError::UnsupportedCharacteristic(4))));
        assert!(matches!(Fq::new(23, 1), Err(CoreError::UnsupportedCharacteristic(23))));
        assert!(matches!(Fq::new(2, 25), Err(CoreError::DegreeTooLarge(25))));
        assert!(matches!(Fq::new(2, 0), Err(CoreError::DegreeTooLarge(0))));
    }

    #[test]
    fn canonical_modulus_f8_is_t3_plus_t_plus_1() {
        // Scanning monic cubics over F_2 in order t^3, t^3+1, t^3+t,
        // t^3+t+1 finds the first irreducible at t^3+t+1.
        let f8 = Fq::new(2, 3).unwrap();
        assert_eq!(f8.modulus(), &[1, 1, 0, 1]);
    }

    #[test]
    fn canonical_modulus_f9_is_t2_plus_1() {
        let f9 = Fq::new(3, 2).unwrap();
        assert_eq!(f9.modulus(), &[1, 0, 1]);
    }

    #[test]
    fn field_handles_are_cached_and_equal() {
        let a = Fq::new(5, 4).unwrap();
        let b = Fq::new(5, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn inverses_exhaustive_small_fields() {
        for (p, k) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 1), (2, 4), (3, 3)] {
            let f = Fq::new(p, k).unwrap();
            for a in f.elements().skip(1) {
                let inv = a.inv().unwrap();
                assert!(a.mul(&inv).is_one(), "a = {a} in F_{p}^{k}");
            }
        }
    }

    #[test]
    fn frobenius_is_additive_and_fixes_prime_field() {
        let f9 = Fq::new(3, 2).unwrap();
        for a in f9.elements() {
            for b in f9.elements() {
                assert_eq!(a.add(&b).frobenius(), a.frobenius().add(&b.frobenius()));
            }
            // Fixed points of x -> x^3 on F_9 are exactly F_3.
            assert_eq!(a.frobenius() == a, a.is_in_prime_field());
        }
    }

    #[test]
    fn pth_root_inverts_frobenius() {
        for (p, k) in [(2u64, 3usize), (3, 2), (5, 2)] {
            let f = Fq::new(p, k).unwrap();
            for a in f.elements() {
                assert_eq!(a.frobenius().pth_root(), a);
                assert_eq!(a.pth_root().frobenius(), a);
            }
        }
    }

    #[test]
    fn sqrt_char2_always_exists() {
        let f8 = Fq::new(2, 3).unwrap();
        for a in f8.elements() {
            let s = a.sqrt().unwrap();
            assert_eq!(s.mul(&s), a);
        }
    }

    #[test]
    fn sqrt_char5() {
        let f5 = Fq::new(5, 1).unwrap();
        // Quadratic residues mod 5 are {0, 1, 4}.
        assert!(f5.from_int(4).sqrt().is_some());
        assert!(f5.from_int(1).sqrt().is_some());
        assert!(f5.from_int(2).sqrt().is_none());
        assert!(f5.from_int(3).sqrt().is_none());
    }

    #[test]
    #[should_panic(expected = "different fields")]
    fn mixed_parent_arithmetic_panics() {
        let f4 = Fq::new(2, 2).unwrap();
        let f8 = Fq::new(2, 3).unwrap();
        let _ = f4.one().add(&f8.one());
    }

    #[test]
    fn canonical_index_roundtrip() {
        let f = Fq::new(3, 3).unwrap();
        for (i, a) in f.elements().enumerate() {
            assert_eq!(a.canonical_index(), i as u128);
            assert_eq!(f.from_index(i as u128), a);
        }
    }
}
