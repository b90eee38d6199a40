//! Exact arithmetic in small finite fields GF(p^m).
//!
//! An element is stored as a packed index `sum residue[i] * p^i`, where
//! `residue` is its coefficient vector modulo the field's defining
//! polynomial. Index 0 is zero and index 1 is one. Elements do not carry
//! their field; every operation takes the [`FieldSpec`] explicitly and
//! rejects indices that are out of range for it.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

/// An element of some GF(q), as a packed residue vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(pub(crate) u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// The packed index of this element.
    pub fn index(self) -> u32 {
        self.0
    }
}

#[derive(Debug)]
struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// A finite field GF(p^m) with an explicit monic irreducible modulus.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    m: u32,
    q: u32,
    /// Ascending coefficients, length m + 1, last entry 1.
    modulus: Vec<u32>,
    tables: Arc<Tables>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec").field("p", &self.p).field("m", &self.m).field("modulus", &self.modulus).finish()
    }
}

/// Serialized form of a field: `{"p": int, "m": int, "modulus": [ints]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldJson {
    pub p: u32,
    pub m: u32,
    pub modulus: Vec<u32>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// Dense polynomials over GF(p), ascending coefficients. Only used for
// modulus selection and table construction.

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    // p is prime, so a^(p-2) is the inverse.
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

fn dense_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    let lead_inv = inv_mod_p(b[db], p) as u64;
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = r[r.len() - 1] as u64 * lead_inv % p as u64;
        for (i, &bi) in b.iter().enumerate() {
            let sub = c * bi as u64 % p as u64;
            let slot = &mut r[shift + i];
            *slot = ((*slot as u64 + p as u64 - sub) % p as u64) as u32;
        }
        r = trim(r);
    }
    r
}

/// Monic polynomial of degree `deg` whose lower coefficients are the
/// base-p digits of `n`.
fn monic_from_index(n: u64, deg: u32, p: u32) -> Vec<u32> {
    let mut coeffs = Vec::with_capacity(deg as usize + 1);
    let mut n = n;
    for _ in 0..deg {
        coeffs.push((n % p as u64) as u32);
        n /= p as u64;
    }
    coeffs.push(1);
    coeffs
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
pub(crate) fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let poly = trim(poly.to_vec());
    let deg = poly.len() as u32 - 1;
    if deg == 0 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    if poly[0] == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d);
        for n in 0..count {
            let divisor = monic_from_index(n, d, p);
            if dense_rem(&poly, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + ai as u64 * bj as u64) % p as u64) as u32;
        }
    }
    dense_rem(&prod, modulus, p)
}

fn pack(residue: &[u32], p: u32) -> u32 {
    residue.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

fn unpack(mut index: u32, p: u32, m: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(m as usize);
    for _ in 0..m {
        out.push(index % p);
        index /= p;
    }
    out
}

impl FieldSpec {
    /// Builds GF(p^m). Without an explicit modulus the lexicographically
    /// least monic irreducible of degree `m` is used, ordering candidates
    /// by their coefficients read from `x^(m-1)` down to the constant.
    pub fn new(p: u64, m: u32, modulus: Option<&[u32]>) -> Result<FieldSpec> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::BadModulus("extension degree must be at least 1".into()));
        }
        let q = p.checked_pow(m).filter(|&q| q <= MAX_ORDER).ok_or(Error::FieldTooLarge(p.saturating_pow(m)))?;
        let p = p as u32;
        let modulus = match modulus {
            Some(given) => {
                if given.len() != m as usize + 1 || given[m as usize] != 1 {
                    return Err(Error::BadModulus(format!("expected a monic polynomial of degree {m}, got {given:?}")));
                }
                if given.iter().any(|&c| c >= p) {
                    return Err(Error::BadModulus(format!("coefficients must lie in [0, {p})")));
                }
                if !is_irreducible(given, p) {
                    return Err(Error::ReducibleModulus(p));
                }
                given.to_vec()
            }
            None => (0..(p as u64).pow(m))
                .map(|n| monic_from_index(n, m, p))
                .find(|cand| is_irreducible(cand, p))
                .expect("an irreducible polynomial of every degree exists"),
        };
        let tables = build_tables(p, m, q as u32, &modulus);
        Ok(FieldSpec { p, m, q: q as u32, modulus, tables: Arc::new(tables) })
    }

    /// GF(q) for a prime power `q`, with the default modulus.
    pub fn with_order(q: u64) -> Result<FieldSpec> {
        if !(2..=MAX_ORDER).contains(&q) {
            return Err(Error::FieldTooLarge(q));
        }
        let p = (2..=q).find(|d| q.is_multiple_of(*d)).unwrap();
        let mut rest = q;
        let mut m = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            m += 1;
        }
        if rest != 1 {
            return Err(Error::NotPrime(q));
        }
        FieldSpec::new(p, m, None)
    }

    pub fn from_json(json: &FieldJson) -> Result<FieldSpec> {
        FieldSpec::new(json.p as u64, json.m, Some(&json.modulus))
    }

    pub fn to_json(&self) -> FieldJson {
        FieldJson { p: self.p, m: self.m, modulus: self.modulus.clone() }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// The class of `x` modulo the defining polynomial (a root of it).
    pub fn generator(&self) -> FieldElement {
        if self.m == 1 {
            // x reduces to -modulus[0].
            self.from_int(-(self.modulus[0] as i64))
        } else {
            FieldElement(self.p)
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn from_residue(&self, residue: &[u32]) -> Result<FieldElement> {
        if residue.len() != self.m as usize || residue.iter().any(|&c| c >= self.p) {
            return Err(Error::FieldMismatch);
        }
        Ok(FieldElement(pack(residue, self.p)))
    }

    pub fn residue(&self, a: FieldElement) -> Vec<u32> {
        unpack(a.0, self.p, self.m)
    }

    pub fn element(&self, index: u32) -> Result<FieldElement> {
        if index < self.q {
            Ok(FieldElement(index))
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 < self.q
    }

    pub fn check(&self, a: FieldElement) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    /// All q elements: zero first, then increasing packed index.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.q).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        if self.m == 1 {
            let s = a.0 + b.0;
            return FieldElement(if s >= self.p { s - self.p } else { s });
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.m {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * place;
            place *= self.p;
            x /= self.p;
            y /= self.p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.p == 2 {
            return a;
        }
        if self.m == 1 {
            return FieldElement(if a.0 == 0 { 0 } else { self.p - a.0 });
        }
        let mut x = a.0;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.m {
            let d = (self.p - x % self.p) % self.p;
            out += d * place;
            place *= self.p;
            x /= self.p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let t = &self.tables;
        let s = t.log[a.0 as usize] + t.log[b.0 as usize];
        let order = self.q - 1;
        FieldElement(t.exp[(if s >= order { s - order } else { s }) as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let order = self.q - 1;
        let l = self.tables.log[a.0 as usize];
        Ok(FieldElement(self.tables.exp[((order - l) % order) as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` by square-and-multiply. For nonzero `a` the exponent is first
    /// reduced modulo q - 1.
    pub fn pow(&self, a: FieldElement, e: &BigUint) -> FieldElement {
        if e.is_zero() {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let reduced = (e % BigUint::from(self.q - 1)).to_u64().unwrap();
        self.pow_u64(a, reduced)
    }

    pub fn pow_u64(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut result = FieldElement::ONE;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }

    /// Formats an element: a plain integer in the prime subfield, a residue
    /// vector such as `[0,1]` otherwise.
    pub fn fmt_element(&self, a: FieldElement) -> String {
        let r = self.residue(a);
        if r[1..].iter().all(|&c| c == 0) {
            r[0].to_string()
        } else {
            let parts: Vec<String> = r.iter().map(|c| c.to_string()).collect();
            format!("[{}]", parts.join(","))
        }
    }

    /// Field operation dispatch by name: `add`, `mul`, `inv`, `pow`.
    pub fn arith(&self, op: FieldOp, a: FieldElement, b: FieldOperand) -> Result<FieldElement> {
        self.check(a)?;
        match (op, b) {
            (FieldOp::Add, FieldOperand::Element(b)) => {
                self.check(b)?;
                Ok(self.add(a, b))
            }
            (FieldOp::Mul, FieldOperand::Element(b)) => {
                self.check(b)?;
                Ok(self.mul(a, b))
            }
            (FieldOp::Inv, _) => self.inv(a),
            (FieldOp::Pow, FieldOperand::Exponent(e)) => Ok(self.pow(a, &e)),
            (op, _) => Err(Error::Parse(format!("operand kind does not match {op:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Inv,
    Pow,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldOperand {
    Element(FieldElement),
    Exponent(BigUint),
    None,
}

fn build_tables(p: u32, m: u32, q: u32, modulus: &[u32]) -> Tables {
    let order = q - 1;
    // Search for a primitive element by brute force over packed indices.
    for cand in 1..q {
        let g = unpack(cand, p, m);
        let g = trim(g);
        let mut exp = Vec::with_capacity(order as usize);
        let mut cur = vec![1u32];
        let mut primitive = true;
        for k in 0..order {
            let idx = pack(&pad(&cur, m), p);
            if k > 0 && idx == 1 {
                primitive = false;
                break;
            }
            exp.push(idx);
            cur = mul_mod(&cur, &g, modulus, p);
        }
        if !primitive || order == 0 {
            continue;
        }
        let mut log = vec![0u32; q as usize];
        for (k, &idx) in exp.iter().enumerate() {
            log[idx as usize] = k as u32;
        }
        return Tables { exp, log };
    }
    unreachable!("the multiplicative group of a finite field is cyclic")
}

fn pad(a: &[u32], m: u32) -> Vec<u32> {
    let mut v = a.to_vec();
    v.resize(m as usize, 0);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_gf2() {
        let f = FieldSpec::new(2, 1, None).unwrap();
        assert_eq!(f.q(), 2);
        assert_eq!(f.elements().collect::<Vec<_>>(), vec![FieldElement(0), FieldElement(1)]);
    }

    #[test]
    fn gf3_listing_and_inverse() {
        let f = FieldSpec::new(3, 1, None).unwrap();
        let els: Vec<u32> = f.elements().map(|e| e.index()).collect();
        assert_eq!(els, vec![0, 1, 2]);
        assert_eq!(f.inv(f.from_int(2)).unwrap(), f.from_int(2));
    }

    #[test]
    fn gf4_default_modulus_is_the_only_irreducible_quadratic() {
        let f = FieldSpec::new(2, 2, None).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        // Oracle: enumerate every monic quadratic over GF(2) and test for roots.
        let irreducible: Vec<[u32; 3]> = (0..4)
            .map(|n| [n & 1, (n >> 1) & 1, 1])
            .filter(|c| (0..2).all(|x| (c[0] + c[1] * x + c[2] * x * x) % 2 != 0))
            .collect();
        assert_eq!(irreducible, vec![[1, 1, 1]]);
    }

    #[test]
    fn not_prime_is_rejected() {
        assert_eq!(FieldSpec::new(4, 1, None).unwrap_err(), Error::NotPrime(4));
    }

    #[test]
    fn reducible_modulus_is_rejected() {
        // x^2 + 1 = (x + 1)^2 over GF(2)
        assert_eq!(FieldSpec::new(2, 2, Some(&[1, 0, 1])).unwrap_err(), Error::ReducibleModulus(2));
        assert!(matches!(FieldSpec::new(2, 2, Some(&[1, 1])), Err(Error::BadModulus(_))));
    }

    #[test]
    fn default_moduli_for_suite_fields() {
        assert_eq!(FieldSpec::with_order(8).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(FieldSpec::with_order(9).unwrap().modulus(), &[1, 0, 1]);
        assert!(FieldSpec::with_order(6).is_err());
    }

    #[test]
    fn generator_to_the_q_is_itself() {
        let f = FieldSpec::new(2, 2, None).unwrap();
        let g = f.generator();
        assert_eq!(f.residue(g), vec![0, 1]);
        assert_eq!(f.pow(g, &BigUint::from(4u32)), g);
        assert_eq!(f.pow(g, &BigUint::from(1u32)), g);
    }

    #[test]
    fn gf4_closed_under_mul_without_duplicates() {
        let f = FieldSpec::with_order(4).unwrap();
        let els: Vec<_> = f.elements().collect();
        let mut sorted = els.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), 4);
        for &a in &els {
            for &b in &els {
                assert!(els.contains(&f.mul(a, b)));
            }
        }
    }

    #[test]
    fn field_laws_exhaustive_small_fields() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32] {
            let f = FieldSpec::with_order(q).unwrap();
            let els: Vec<_> = f.elements().collect();
            for &a in &els {
                // Fermat
                let mut acc = f.one();
                for _ in 0..q {
                    acc = f.mul(acc, a);
                }
                assert_eq!(acc, a, "a^q = a in GF({q})");
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
                }
                for &b in &els {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    let pa = f.pow_u64(a, f.p() as u64);
                    let pb = f.pow_u64(b, f.p() as u64);
                    assert_eq!(f.pow_u64(f.add(a, b), f.p() as u64), f.add(pa, pb));
                    assert_eq!(f.sub(f.add(a, b), b), a);
                }
            }
        }
    }

    #[test]
    fn mul_matches_polynomial_multiplication() {
        let f = FieldSpec::with_order(9).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                let want = mul_mod(&trim(f.residue(a)), &trim(f.residue(b)), f.modulus(), f.p());
                assert_eq!(f.residue(f.mul(a, b)), pad(&want, f.m()));
            }
        }
    }

    #[test]
    fn arith_dispatch_and_errors() {
        let f = FieldSpec::with_order(5).unwrap();
        let two = f.from_int(2);
        assert_eq!(f.arith(FieldOp::Mul, two, FieldOperand::Element(two)).unwrap(), f.from_int(4));
        assert_eq!(f.arith(FieldOp::Inv, f.zero(), FieldOperand::None), Err(Error::ZeroInverse));
        assert_eq!(f.arith(FieldOp::Add, two, FieldOperand::Element(FieldElement(9))), Err(Error::FieldMismatch));
        let big = BigUint::from(10u32).pow(40);
        // 2^(10^40) with 10^40 = 0 mod 4
        assert_eq!(f.arith(FieldOp::Pow, two, FieldOperand::Exponent(big)).unwrap(), f.one());
    }

    #[test]
    fn residue_roundtrip_and_json() {
        let f = FieldSpec::with_order(8).unwrap();
        for a in f.elements() {
            assert_eq!(f.from_residue(&f.residue(a)).unwrap(), a);
        }
        let back = FieldSpec::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
        assert_eq!(f.fmt_element(f.generator()), "[0,1,0]");
    }
}
