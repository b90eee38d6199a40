//! Brute-force truncated closure over GF(2) and GF(3).
//!
//! The closure at degree `D` is the span of all exact images `g(u)` with
//! `deg u <= s`, intersected with the polynomials of degree at most `D`.
//! It only uses dense arithmetic mod p, so it shares no code with the
//! sparse engine it is meant to check.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::schema::GeneratorSchema;
use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::poly::{Ambient, Exp, SparsePoly};

pub const MAX_ORACLE_DEGREE: u64 = 13;
const MAX_COLUMNS: usize = 1 << 14;
const CHUNK: u64 = 1 << 10;

/// Dense coefficient vector over GF(p), index = exponent.
trait Vector: Clone + Send + Sync {
    fn zeros(len: usize) -> Self;
    fn get(&self, i: usize) -> u8;
    fn set(&mut self, i: usize, v: u8);
    fn top(&self) -> Option<usize>;
    /// `self += c * other`.
    fn axpy(&mut self, c: u8, other: &Self);
    fn scale(&mut self, c: u8);
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Vector for Bits {
    fn zeros(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }
    fn get(&self, i: usize) -> u8 {
        ((self.0[i / 64] >> (i % 64)) & 1) as u8
    }
    fn set(&mut self, i: usize, v: u8) {
        let mask = 1u64 << (i % 64);
        if v & 1 == 1 {
            self.0[i / 64] |= mask;
        } else {
            self.0[i / 64] &= !mask;
        }
    }
    fn top(&self) -> Option<usize> {
        let (w, word) = self.0.iter().enumerate().rev().find(|(_, w)| **w != 0)?;
        Some(w * 64 + 63 - word.leading_zeros() as usize)
    }
    fn axpy(&mut self, c: u8, other: &Self) {
        if c & 1 == 1 {
            for (a, b) in self.0.iter_mut().zip(&other.0) {
                *a ^= b;
            }
        }
    }
    fn scale(&mut self, c: u8) {
        if c & 1 == 0 {
            self.0.iter_mut().for_each(|w| *w = 0);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Trits(Vec<u8>);

impl Vector for Trits {
    fn zeros(len: usize) -> Self {
        Trits(vec![0; len])
    }
    fn get(&self, i: usize) -> u8 {
        self.0[i]
    }
    fn set(&mut self, i: usize, v: u8) {
        self.0[i] = v % 3;
    }
    fn top(&self) -> Option<usize> {
        self.0.iter().rposition(|&c| c != 0)
    }
    fn axpy(&mut self, c: u8, other: &Self) {
        if c.is_multiple_of(3) {
            return;
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a = (*a + c * b) % 3;
        }
    }
    fn scale(&mut self, c: u8) {
        for a in self.0.iter_mut() {
            *a = (*a * c) % 3;
        }
    }
}

fn inv_mod(a: u8, p: u8) -> u8 {
    (1..p).find(|b| (a as u16 * *b as u16) % p as u16 == 1).expect("unit")
}

/// Rows keyed by their highest exponent, leading coefficient one.
#[derive(Clone)]
struct MaxEchelon<V> {
    p: u8,
    rows: BTreeMap<usize, V>,
}

impl<V: Vector> MaxEchelon<V> {
    fn new(p: u8) -> Self {
        MaxEchelon { p, rows: BTreeMap::new() }
    }

    fn insert(&mut self, mut v: V) {
        while let Some(t) = v.top() {
            match self.rows.get(&t) {
                Some(row) => {
                    let c = v.get(t);
                    v.axpy(self.p - c, row);
                }
                None => {
                    v.scale(inv_mod(v.get(t), self.p));
                    self.rows.insert(t, v);
                    return;
                }
            }
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (_, v) in other.rows {
            self.insert(v);
        }
        self
    }

    /// Fully reduced basis of the rows of degree at most `d`, as
    /// coefficient vectors over `0..=d`, keyed by minimal exponent.
    fn low_part(&self, d: usize) -> BTreeMap<usize, Vec<u8>> {
        let p = self.p as u16;
        let mut out: BTreeMap<usize, Vec<u8>> = BTreeMap::new();
        for v in self.rows.range(..=d).map(|(_, v)| v) {
            let mut dense: Vec<u8> = (0..=d).map(|i| v.get(i)).collect();
            reduce_dense(&mut dense, &out, p);
            let Some(piv) = dense.iter().position(|&c| c != 0) else { continue };
            let s = inv_mod(dense[piv], self.p) as u16;
            dense.iter_mut().for_each(|c| *c = ((*c as u16 * s) % p) as u8);
            for row in out.values_mut() {
                let c = row[piv] as u16;
                if c != 0 {
                    for (a, b) in row.iter_mut().zip(&dense) {
                        *a = ((*a as u16 + (p - c) * *b as u16) % p) as u8;
                    }
                }
            }
            out.insert(piv, dense);
        }
        out
    }
}

fn reduce_dense(v: &mut [u8], basis: &BTreeMap<usize, Vec<u8>>, p: u16) {
    for (&piv, row) in basis {
        let c = v[piv] as u16;
        if c != 0 {
            for (a, b) in v.iter_mut().zip(row) {
                *a = ((*a as u16 + (p - c) * *b as u16) % p) as u8;
            }
        }
    }
}

/// A subspace of the polynomials of degree at most `degree`, stored as its
/// reduced echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedClosure {
    degree: u64,
    p: u8,
    ambient: Ambient,
    basis: BTreeMap<usize, Vec<u8>>,
}

impl TruncatedClosure {
    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Dimension of the ambient truncation.
    pub fn ambient_dim(&self) -> usize {
        match self.ambient {
            Ambient::Unitary => self.degree as usize + 1,
            Ambient::Nonunitary => self.degree as usize,
        }
    }

    pub fn basis(&self, f: &FieldSpec) -> Vec<SparsePoly> {
        self.basis.values().map(|v| self.to_poly(f, v)).collect()
    }

    fn to_poly(&self, f: &FieldSpec, v: &[u8]) -> SparsePoly {
        let terms = v.iter().enumerate().filter(|(_, c)| **c != 0).map(|(e, c)| (Exp::from(e), f.from_int(*c as i64)));
        SparsePoly::from_terms(f, terms, self.ambient).expect("in range")
    }

    fn dense(&self, f: &FieldSpec, g: &SparsePoly) -> Option<Vec<u8>> {
        let mut v = vec![0u8; self.degree as usize + 1];
        for (e, c) in g.terms() {
            let e = e.to_usize().filter(|&e| e <= self.degree as usize)?;
            v[e] = f.residue(c)[0] as u8;
        }
        Some(v)
    }

    /// Whether `g` lies in the subspace. Polynomials of higher degree
    /// never do.
    pub fn contains(&self, f: &FieldSpec, g: &SparsePoly) -> bool {
        match self.dense(f, g) {
            Some(mut v) => {
                reduce_dense(&mut v, &self.basis, self.p as u16);
                v.iter().all(|&c| c == 0)
            }
            None => false,
        }
    }
}

fn check_field(f: &FieldSpec) -> Result<u8> {
    match f.q() {
        2 | 3 => Ok(f.q() as u8),
        q => Err(Error::OracleTooLarge(format!("oracle needs q in {{2,3}}, got {q}"))),
    }
}

fn small_poly(f: &FieldSpec, g: &SparsePoly) -> Result<Vec<(usize, u8)>> {
    g.terms()
        .map(|(e, c)| {
            let e = e
                .to_usize()
                .filter(|&e| e < MAX_COLUMNS)
                .ok_or_else(|| Error::OracleTooLarge(format!("generator exponent {e} too large")))?;
            Ok((e, f.residue(c)[0] as u8))
        })
        .collect()
}

fn dense_mul(a: &[u8], b: &[u8], p: u16) -> Vec<u8> {
    let mut out = vec![0u16; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u16 * y as u16) % p;
        }
    }
    out.into_iter().map(|c| c as u8).collect()
}

fn dense_pow(u: &[u8], mut e: usize, p: u16) -> Vec<u8> {
    let mut acc = vec![1u8];
    let mut base = u.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = dense_mul(&acc, &base, p);
        }
        e >>= 1;
        if e > 0 {
            base = dense_mul(&base, &base, p);
        }
    }
    acc
}

/// `g(u)` as a dense vector of length `width`.
fn image<V: Vector>(g: &[(usize, u8)], u: &[u8], p: u16, width: usize) -> V {
    let mut v = V::zeros(width);
    for &(e, c) in g {
        let pw = dense_pow(u, e, p);
        for (i, &a) in pw.iter().enumerate() {
            if a != 0 {
                let cur = v.get(i) as u16;
                v.set(i, ((cur + c as u16 * a as u16) % p) as u8);
            }
        }
    }
    v
}

/// The substitution with index `k` in lexicographic coefficient order:
/// base-p digits of `k` give the coefficients of `x^lo, ..., x^s`.
fn substitution(k: u64, lo: usize, s: usize, p: u64) -> Vec<u8> {
    let mut u = vec![0u8; s + 1];
    let mut k = k;
    for slot in u.iter_mut().skip(lo) {
        *slot = (k % p) as u8;
        k /= p;
    }
    u
}

/// Truncated closure with substitutions of degree at most `d`.
pub fn truncated_closure(f: &FieldSpec, gens: &[SparsePoly], d: u64, ambient: Ambient) -> Result<TruncatedClosure> {
    truncated_closure_with(f, gens, d, d, ambient)
}

/// Truncated closure at degree `d` from every substitution `x -> u` with
/// `deg u <= subst_degree`. In the unitary ambient `u` may have a constant
/// term.
pub fn truncated_closure_with(
    f: &FieldSpec,
    gens: &[SparsePoly],
    d: u64,
    subst_degree: u64,
    ambient: Ambient,
) -> Result<TruncatedClosure> {
    let p = check_field(f)?;
    if d > MAX_ORACLE_DEGREE || subst_degree > MAX_ORACLE_DEGREE {
        return Err(Error::OracleTooLarge(format!("degree {} exceeds {MAX_ORACLE_DEGREE}", d.max(subst_degree))));
    }
    let gens: Vec<Vec<(usize, u8)>> = gens.iter().map(|g| small_poly(f, g)).collect::<Result<_>>()?;
    let s = subst_degree as usize;
    let max_deg = gens.iter().flatten().map(|(e, _)| *e).max().unwrap_or(0);
    let width = (max_deg * s).max(d as usize) + 1;
    if width > MAX_COLUMNS {
        return Err(Error::OracleTooLarge(format!("images of degree {} too large", width - 1)));
    }
    let lo = match ambient {
        Ambient::Unitary => 0,
        Ambient::Nonunitary => 1,
    };
    let count = (p as u64).pow((s + 1 - lo) as u32);
    let basis = if p == 2 {
        closure_rows::<Bits>(&gens, p, lo, s, count, width).low_part(d as usize)
    } else {
        closure_rows::<Trits>(&gens, p, lo, s, count, width).low_part(d as usize)
    };
    Ok(TruncatedClosure { degree: d, p, ambient, basis })
}

fn closure_rows<V: Vector>(
    gens: &[Vec<(usize, u8)>],
    p: u8,
    lo: usize,
    s: usize,
    count: u64,
    width: usize,
) -> MaxEchelon<V> {
    let chunks: Vec<u64> = (0..count.div_ceil(CHUNK)).collect();
    chunks
        .into_par_iter()
        .map(|c| {
            let mut ech = MaxEchelon::<V>::new(p);
            for k in c * CHUNK..((c + 1) * CHUNK).min(count) {
                let u = substitution(k, lo, s, p as u64);
                for g in gens {
                    ech.insert(image::<V>(g, &u, p as u16, width));
                }
            }
            ech
        })
        .reduce(|| MaxEchelon::new(p), MaxEchelon::merge)
}

/// Span of the schema instances whose exponents are all at most `bound`,
/// intersected with the polynomials of degree at most `d`.
pub fn schema_span_truncated(
    f: &FieldSpec,
    schemas: &[GeneratorSchema],
    d: u64,
    bound: u64,
) -> Result<TruncatedClosure> {
    let p = check_field(f)?;
    let width = bound.max(d) as usize + 1;
    if width > MAX_COLUMNS {
        return Err(Error::OracleTooLarge(format!("bound {bound} too large")));
    }
    let mut polys = Vec::new();
    for s in schemas {
        for params in s.instances_within(bound) {
            polys.push(small_poly(f, &s.instantiate(f, &params)?)?);
        }
    }
    let basis = if p == 2 {
        dense_span::<Bits>(&polys, p, width).low_part(d as usize)
    } else {
        dense_span::<Trits>(&polys, p, width).low_part(d as usize)
    };
    Ok(TruncatedClosure { degree: d, p, ambient: Ambient::Nonunitary, basis })
}

fn dense_span<V: Vector>(polys: &[Vec<(usize, u8)>], p: u8, width: usize) -> MaxEchelon<V> {
    let mut ech = MaxEchelon::new(p);
    for g in polys {
        let mut v = V::zeros(width);
        for &(e, c) in g {
            v.set(e, c);
        }
        ech.insert(v);
    }
    ech
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polys(f: &FieldSpec, exps: &[&[u64]]) -> Vec<SparsePoly> {
        exps.iter().map(|e| SparsePoly::from_exponents(f, e)).collect()
    }

    #[test]
    fn x_generates_everything() {
        let f = FieldSpec::with_order(2).unwrap();
        for d in 1..=8 {
            let c = truncated_closure(&f, &[SparsePoly::x()], d, Ambient::Nonunitary).unwrap();
            assert_eq!(c.dim(), d as usize);
        }
    }

    #[test]
    fn w1_codimension_one_at_six() {
        let f = FieldSpec::with_order(2).unwrap();
        let c = truncated_closure(&f, &polys(&f, &[&[1, 2], &[3]]), 6, Ambient::Nonunitary).unwrap();
        assert_eq!(c.dim(), 5);
        assert!(!c.contains(&f, &SparsePoly::x()));
        assert!(c.contains(&f, &SparsePoly::from_exponents(&f, &[4, 5])));
    }

    #[test]
    fn bit_rows() {
        let mut a = Bits::zeros(130);
        a.set(3, 1);
        a.set(129, 1);
        assert_eq!(a.top(), Some(129));
        let b = a.clone();
        a.axpy(1, &b);
        assert_eq!(a.top(), None);
    }

    #[test]
    fn v0_over_gf3() {
        let f = FieldSpec::with_order(3).unwrap();
        let c = truncated_closure(&f, &polys(&f, &[&[1, 3]]), 8, Ambient::Nonunitary).unwrap();
        for i in 1..=2u64 {
            assert!(c.contains(&f, &SparsePoly::from_exponents(&f, &[i, 3 * i])));
        }
        assert!(!c.contains(&f, &SparsePoly::x()));
    }

    #[test]
    fn rejects_large_fields_and_degrees() {
        let f = FieldSpec::with_order(5).unwrap();
        assert!(matches!(
            truncated_closure(&f, &[SparsePoly::x()], 4, Ambient::Nonunitary),
            Err(Error::OracleTooLarge(_))
        ));
        let f = FieldSpec::with_order(2).unwrap();
        assert!(matches!(
            truncated_closure(&f, &[SparsePoly::x()], 14, Ambient::Nonunitary),
            Err(Error::OracleTooLarge(_))
        ));
    }

    #[test]
    fn dimension_grows_with_degree() {
        let f = FieldSpec::with_order(2).unwrap();
        let gens = polys(&f, &[&[1, 2], &[5]]);
        let dims: Vec<usize> =
            (1..=9).map(|d| truncated_closure(&f, &gens, d, Ambient::Nonunitary).unwrap().dim()).collect();
        assert!(dims.windows(2).all(|w| w[0] <= w[1]), "{dims:?}");
    }
}
