//! Sparse univariate polynomials over GF(q) with arbitrary-precision exponents.
//!
//! A [`SparsePoly`] lives either in `k[x]` (unitary ambient) or in the
//! nonunitary algebra `k[x]_0 = x k[x]`, which never has a constant term.
//! Substitutions `x -> u` of `k[x]_0` must send `x` to a polynomial without
//! constant term; [`SparsePoly::compose`] enforces that.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldSpec};

pub type Exp = BigUint;

/// Products and compositions refuse to build more terms than this.
pub const TERM_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ambient {
    /// `k[x]`: constant terms allowed.
    Unitary,
    /// `k[x]_0`: no constant term.
    Nonunitary,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparsePoly {
    terms: BTreeMap<Exp, FieldElement>,
    ambient: Ambient,
}

/// One entry of the JSON encoding `[{"exp": "12", "coef": [1]}]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: String,
    pub coef: Vec<u32>,
}

impl SparsePoly {
    pub fn zero(ambient: Ambient) -> SparsePoly {
        SparsePoly { terms: BTreeMap::new(), ambient }
    }

    /// The nonunitary polynomial `x`.
    pub fn x() -> SparsePoly {
        SparsePoly::x_pow(1u32)
    }

    /// The nonunitary monomial `x^e` (`e >= 1`).
    pub fn x_pow(e: impl Into<Exp>) -> SparsePoly {
        let e = e.into();
        assert!(!e.is_zero(), "x^0 is not an element of k[x]_0");
        let mut terms = BTreeMap::new();
        terms.insert(e, FieldElement::ONE);
        SparsePoly { terms, ambient: Ambient::Nonunitary }
    }

    /// The unitary constant `c`.
    pub fn constant(c: FieldElement) -> SparsePoly {
        let mut p = SparsePoly::zero(Ambient::Unitary);
        if !c.is_zero() {
            p.terms.insert(Exp::zero(), c);
        }
        p
    }

    pub fn monomial(f: &FieldSpec, c: FieldElement, e: Exp, ambient: Ambient) -> Result<SparsePoly> {
        SparsePoly::from_terms(f, [(e, c)], ambient)
    }

    /// Builds a polynomial from possibly repeated exponents, merging and
    /// dropping cancelled terms.
    pub fn from_terms<I>(f: &FieldSpec, terms: I, ambient: Ambient) -> Result<SparsePoly>
    where
        I: IntoIterator<Item = (Exp, FieldElement)>,
    {
        let mut out = SparsePoly::zero(ambient);
        for (e, c) in terms {
            f.check(c)?;
            out.add_term(f, e, c);
        }
        out.check_ambient()?;
        Ok(out)
    }

    /// Sum of `x^e` over the given small exponents, all coefficients one.
    pub fn from_exponents(f: &FieldSpec, exps: &[u64]) -> SparsePoly {
        let ambient = if exps.contains(&0) { Ambient::Unitary } else { Ambient::Nonunitary };
        SparsePoly::from_terms(f, exps.iter().map(|&e| (Exp::from(e), f.one())), ambient).expect("valid exponents")
    }

    fn check_ambient(&self) -> Result<()> {
        if self.ambient == Ambient::Nonunitary && self.terms.contains_key(&Exp::zero()) {
            return Err(Error::AmbientViolation);
        }
        Ok(())
    }

    pub(crate) fn add_term(&mut self, f: &FieldSpec, e: Exp, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    /// Reinterprets the polynomial in another ambient. Moving to the
    /// nonunitary algebra fails if there is a constant term.
    pub fn with_ambient(mut self, ambient: Ambient) -> Result<SparsePoly> {
        self.ambient = ambient;
        self.check_ambient()?;
        Ok(self)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exp, FieldElement)> + '_ {
        self.terms.iter().map(|(e, c)| (e, *c))
    }

    pub fn coeff(&self, e: &Exp) -> FieldElement {
        self.terms.get(e).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn constant_term(&self) -> FieldElement {
        self.coeff(&Exp::zero())
    }

    pub fn min_exp(&self) -> Option<&Exp> {
        self.terms.keys().next()
    }

    pub fn degree(&self) -> Option<&Exp> {
        self.terms.keys().next_back()
    }

    /// Leading term at the minimal exponent.
    pub fn min_term(&self) -> Option<(&Exp, FieldElement)> {
        self.terms.iter().next().map(|(e, c)| (e, *c))
    }

    /// Drops every term of exponent above `bound`.
    pub fn truncate(&self, bound: &Exp) -> SparsePoly {
        SparsePoly {
            terms: self.terms.range(..=bound.clone()).map(|(e, c)| (e.clone(), *c)).collect(),
            ambient: self.ambient,
        }
    }

    /// Removes the constant term and moves to the nonunitary ambient.
    pub fn strip_constant(&self) -> SparsePoly {
        let mut out = self.clone();
        out.terms.remove(&Exp::zero());
        out.ambient = Ambient::Nonunitary;
        out
    }

    fn same_ambient(&self, other: &SparsePoly) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch);
        }
        Ok(())
    }

    pub fn add(&self, f: &FieldSpec, other: &SparsePoly) -> Result<SparsePoly> {
        self.same_ambient(other)?;
        let mut out = self.clone();
        out.add_scaled(f, f.one(), other);
        Ok(out)
    }

    pub fn sub(&self, f: &FieldSpec, other: &SparsePoly) -> Result<SparsePoly> {
        self.same_ambient(other)?;
        let mut out = self.clone();
        out.add_scaled(f, f.neg(f.one()), other);
        Ok(out)
    }

    pub fn neg(&self, f: &FieldSpec) -> SparsePoly {
        self.scale(f, f.neg(f.one()))
    }

    pub fn scale(&self, f: &FieldSpec, c: FieldElement) -> SparsePoly {
        if c.is_zero() {
            return SparsePoly::zero(self.ambient);
        }
        SparsePoly { terms: self.terms.iter().map(|(e, a)| (e.clone(), f.mul(*a, c))).collect(), ambient: self.ambient }
    }

    /// `self += c * other`, ignoring ambients.
    pub(crate) fn add_scaled(&mut self, f: &FieldSpec, c: FieldElement, other: &SparsePoly) {
        if c.is_zero() {
            return;
        }
        for (e, a) in &other.terms {
            self.add_term(f, e.clone(), f.mul(*a, c));
        }
    }

    pub fn mul(&self, f: &FieldSpec, other: &SparsePoly) -> Result<SparsePoly> {
        self.same_ambient(other)?;
        self.mul_unchecked(f, other)
    }

    fn mul_unchecked(&self, f: &FieldSpec, other: &SparsePoly) -> Result<SparsePoly> {
        let ambient = if self.ambient == Ambient::Unitary && other.ambient == Ambient::Unitary {
            Ambient::Unitary
        } else {
            Ambient::Nonunitary
        };
        let mut out = SparsePoly::zero(ambient);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(f, ea + eb, f.mul(*ca, *cb));
                if out.terms.len() > TERM_CAP {
                    return Err(Error::ExpansionOverflow(TERM_CAP));
                }
            }
        }
        Ok(out)
    }

    fn as_monomial(&self) -> Option<(&Exp, FieldElement)> {
        if self.terms.len() == 1 {
            self.min_term()
        } else {
            None
        }
    }

    /// `self^(p^k)`: the Frobenius map applied `k` times, which keeps the
    /// number of terms.
    pub fn frobenius(&self, f: &FieldSpec, k: u32) -> SparsePoly {
        let pk = Exp::from(f.p()).pow(k);
        SparsePoly { terms: self.terms.iter().map(|(e, c)| (e * &pk, f.pow(*c, &pk))).collect(), ambient: self.ambient }
    }

    /// `self^e`, split along the base-p digits of `e` so that only the
    /// digit powers need genuine multiplication.
    pub fn pow(&self, f: &FieldSpec, e: &Exp) -> Result<SparsePoly> {
        if e.is_zero() {
            if self.ambient == Ambient::Nonunitary {
                return Err(Error::AmbientViolation);
            }
            return Ok(SparsePoly::constant(f.one()));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        if let Some((k, c)) = self.as_monomial() {
            let mut out = SparsePoly::zero(self.ambient);
            out.terms.insert(k * e, f.pow(c, e));
            return Ok(out);
        }
        let digits = e.to_radix_le(f.p());
        let mut result: Option<SparsePoly> = None;
        for (i, &d) in digits.iter().enumerate() {
            if d == 0 {
                continue;
            }
            let base = self.frobenius(f, i as u32);
            let mut piece = base.clone();
            for _ in 1..d {
                piece = piece.mul_unchecked(f, &base)?;
            }
            result = Some(match result {
                None => piece,
                Some(acc) => acc.mul_unchecked(f, &piece)?,
            });
        }
        Ok(result.expect("e > 0 has a nonzero digit"))
    }

    /// The substitution `x -> u` applied to `self`.
    pub fn compose(&self, f: &FieldSpec, u: &SparsePoly) -> Result<SparsePoly> {
        if self.ambient == Ambient::Nonunitary && !u.constant_term().is_zero() {
            return Err(Error::AmbientViolation);
        }
        let mut out = SparsePoly::zero(self.ambient);
        if let Some((k, a)) = u.as_monomial() {
            for (e, c) in &self.terms {
                out.add_term(f, k * e, f.mul(*c, f.pow(a, e)));
            }
            return Ok(out);
        }
        // Frobenius images of u, shared across all terms of self.
        let mut frob: Vec<SparsePoly> = Vec::new();
        for (e, c) in &self.terms {
            if e.is_zero() {
                out.add_term(f, Exp::zero(), *c);
                continue;
            }
            let digits = e.to_radix_le(f.p());
            let mut power: Option<SparsePoly> = None;
            for (i, &d) in digits.iter().enumerate() {
                if d == 0 {
                    continue;
                }
                while frob.len() <= i {
                    let next = match frob.last() {
                        None => u.clone(),
                        Some(prev) => prev.frobenius(f, 1),
                    };
                    frob.push(next);
                }
                let base = &frob[i];
                let mut piece = base.clone();
                for _ in 1..d {
                    piece = piece.mul_unchecked(f, base)?;
                }
                power = Some(match power {
                    None => piece,
                    Some(acc) => acc.mul_unchecked(f, &piece)?,
                });
            }
            out.add_scaled(f, *c, &power.expect("nonzero exponent"));
            if out.terms.len() > TERM_CAP {
                return Err(Error::ExpansionOverflow(TERM_CAP));
            }
        }
        out.check_ambient()?;
        Ok(out)
    }

    /// Exact evaluation at a field element. At nonzero points exponents are
    /// folded by `a^q = a`: `e -> ((e - 1) mod (q - 1)) + 1`.
    pub fn evaluate(&self, f: &FieldSpec, a: FieldElement) -> FieldElement {
        if a.is_zero() {
            return self.constant_term();
        }
        let mut acc = f.zero();
        for (e, c) in &self.terms {
            let r = if e.is_zero() { 0 } else { fold_exponent(e, f.q()) };
            acc = f.add(acc, f.mul(*c, f.pow_u64(a, r)));
        }
        acc
    }

    /// Splits `self` by exponent class modulo q - 1. Entry `r - 1` holds
    /// the class `r` in `1..=q-1`; exponents divisible by q - 1 (including
    /// a constant term) go to the class q - 1.
    pub fn q_components(&self, f: &FieldSpec) -> Vec<SparsePoly> {
        let classes = (f.q() - 1) as usize;
        let mut out = vec![SparsePoly::zero(self.ambient); classes];
        for (e, c) in &self.terms {
            let r = if e.is_zero() { classes as u64 } else { fold_exponent(e, f.q()) };
            out[r as usize - 1].terms.insert(e.clone(), *c);
        }
        out
    }

    /// Recovers the q-homogeneous components from the scaled copies
    /// `f(alpha x)`, `alpha` in `k*`, by solving the Vandermonde system
    /// `f(alpha x) = sum_r alpha^r F_r`. Entry `r - 1` is `F_r`.
    pub fn vandermonde_extract(&self, f: &FieldSpec) -> Result<Vec<SparsePoly>> {
        let n = (f.q() - 1) as usize;
        let alphas: Vec<FieldElement> = f.nonzero_elements().collect();
        let mut scaled = Vec::with_capacity(n);
        for &alpha in &alphas {
            let u = SparsePoly::monomial(f, alpha, Exp::one(), self.ambient)?;
            scaled.push(self.compose(f, &u)?);
        }
        // A[j][r-1] = alpha_j^r
        let matrix: Vec<Vec<FieldElement>> =
            alphas.iter().map(|&a| (1..=n as u64).map(|r| f.pow_u64(a, r)).collect()).collect();
        let inverse = invert_matrix(f, matrix).expect("Vandermonde matrix over distinct nonzero points");
        let mut out = Vec::with_capacity(n);
        for row in &inverse {
            let mut comp = SparsePoly::zero(self.ambient);
            for (j, &c) in row.iter().enumerate() {
                comp.add_scaled(f, c, &scaled[j]);
            }
            out.push(comp);
        }
        Ok(out)
    }

    /// Whether all exponents lie in one class modulo q - 1.
    pub fn is_q_homogeneous(&self, f: &FieldSpec) -> bool {
        self.q_components(f).iter().filter(|c| !c.is_zero()).count() <= 1
    }

    /// Remainder modulo `x^q - x`, computed by folding exponents.
    pub fn rem_frobenius_modulus(&self, f: &FieldSpec) -> SparsePoly {
        let mut out = SparsePoly::zero(self.ambient);
        for (e, c) in &self.terms {
            let r = if e.is_zero() { 0 } else { fold_exponent(e, f.q()) };
            out.add_term(f, Exp::from(r), *c);
        }
        out
    }

    pub fn to_json(&self, f: &FieldSpec) -> Vec<TermJson> {
        self.terms.iter().map(|(e, c)| TermJson { exp: e.to_string(), coef: f.residue(*c) }).collect()
    }

    pub fn from_json(f: &FieldSpec, terms: &[TermJson], ambient: Ambient) -> Result<SparsePoly> {
        let mut parsed = Vec::with_capacity(terms.len());
        for t in terms {
            let e: Exp = t.exp.parse().map_err(|_| Error::Parse(format!("bad exponent `{}`", t.exp)))?;
            parsed.push((e, f.from_residue(&t.coef)?));
        }
        SparsePoly::from_terms(f, parsed, ambient)
    }

    /// Canonical text form, ascending exponents: `x + 2*x^3`, `[0,1]*x^2`.
    pub fn to_text(&self, f: &FieldSpec) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                s.push_str(" + ");
            }
            let coef = f.fmt_element(*c);
            if e.is_zero() {
                s.push_str(&coef);
                continue;
            }
            if *c != f.one() {
                let _ = write!(s, "{coef}*");
            }
            if e.is_one() {
                s.push('x');
            } else {
                let _ = write!(s, "x^{e}");
            }
        }
        s
    }

    /// Parses the text form. Accepts `+`/`-` separated terms, coefficients
    /// as integers (reduced into the prime field) or residue vectors, an
    /// optional `*`, and `x`, `x^e` or a bare constant.
    pub fn parse(f: &FieldSpec, text: &str, ambient: Ambient) -> Result<SparsePoly> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let bytes = cleaned.as_bytes();
        let mut terms = Vec::new();
        let mut pos = 0;
        let mut first = true;
        while pos < bytes.len() {
            let mut negative = false;
            if bytes[pos] == b'+' || bytes[pos] == b'-' {
                negative = bytes[pos] == b'-';
                pos += 1;
            } else if !first {
                return Err(Error::Parse(format!("expected `+` or `-` at offset {pos} in `{text}`")));
            }
            first = false;
            let start = pos;
            let mut depth = 0;
            while pos < bytes.len() {
                match bytes[pos] {
                    b'[' => depth += 1,
                    b']' => depth -= 1,
                    b'+' | b'-' if depth == 0 => break,
                    _ => {}
                }
                pos += 1;
            }
            let (e, mut c) = parse_term(f, &cleaned[start..pos])?;
            if negative {
                c = f.neg(c);
            }
            terms.push((e, c));
        }
        SparsePoly::from_terms(f, terms, ambient)
    }
}

fn parse_term(f: &FieldSpec, term: &str) -> Result<(Exp, FieldElement)> {
    let bad = || Error::Parse(format!("bad term `{term}`"));
    if term.is_empty() {
        return Err(bad());
    }
    let (coef_part, mono_part) = match term.find('x') {
        Some(i) => (&term[..i], Some(&term[i + 1..])),
        None => (term, None),
    };
    let coef_part = coef_part.strip_suffix('*').unwrap_or(coef_part);
    let coef = if coef_part.is_empty() {
        if mono_part.is_none() {
            return Err(bad());
        }
        f.one()
    } else if let Some(inner) = coef_part.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
        let residue: std::result::Result<Vec<u32>, _> = inner.split(',').map(|d| d.parse::<u32>()).collect();
        f.from_residue(&residue.map_err(|_| bad())?)?
    } else {
        let n: BigUint = coef_part.parse().map_err(|_| bad())?;
        f.from_int((n % BigUint::from(f.p())).to_i64().unwrap())
    };
    let e = match mono_part {
        None => Exp::zero(),
        Some("") => Exp::one(),
        Some(rest) => rest.strip_prefix('^').ok_or_else(bad)?.parse::<BigUint>().map_err(|_| bad())?,
    };
    Ok((e, coef))
}

/// `((e - 1) mod (q - 1)) + 1` for `e >= 1`.
pub fn fold_exponent(e: &Exp, q: u32) -> u64 {
    let m = Exp::from(q - 1);
    let r = (e - 1u32).mod_floor(&m);
    r.to_u64().unwrap() + 1
}

/// Gauss-Jordan inversion over GF(q); `None` if singular.
pub(crate) fn invert_matrix(f: &FieldSpec, mut a: Vec<Vec<FieldElement>>) -> Option<Vec<Vec<FieldElement>>> {
    let n = a.len();
    let mut inv: Vec<Vec<FieldElement>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { f.one() } else { f.zero() }).collect()).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let s = f.inv(a[col][col]).ok()?;
        for j in 0..n {
            a[col][j] = f.mul(a[col][j], s);
            inv[col][j] = f.mul(inv[col][j], s);
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col];
            for j in 0..n {
                let da = f.mul(factor, a[col][j]);
                let di = f.mul(factor, inv[col][j]);
                a[r][j] = f.sub(a[r][j], da);
                inv[r][j] = f.sub(inv[r][j], di);
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u64) -> FieldSpec {
        FieldSpec::with_order(q).unwrap()
    }

    fn p(f: &FieldSpec, s: &str) -> SparsePoly {
        SparsePoly::parse(f, s, Ambient::Nonunitary).unwrap()
    }

    #[test]
    fn char_two_cancellation() {
        let f = gf(2);
        assert_eq!(p(&f, "x + x^2").add(&f, &p(&f, "x^2 + x^3")).unwrap(), p(&f, "x + x^3"));
    }

    #[test]
    fn w1_proof_product() {
        // x^3 (x^3 + x^(n+2) + x^(2n+1) + x^(3n)) with n = 2
        let f = gf(2);
        let n = 2u64;
        let inner = SparsePoly::from_exponents(&f, &[3, n + 2, 2 * n + 1, 3 * n]);
        let prod = p(&f, "x^3").mul(&f, &inner).unwrap();
        assert_eq!(prod, p(&f, "x^6 + x^7 + x^8 + x^9"));
        // n = 4 keeps all four terms distinct
        let inner = SparsePoly::from_exponents(&f, &[3, 6, 9, 12]);
        assert_eq!(p(&f, "x^3").mul(&f, &inner).unwrap(), SparsePoly::from_exponents(&f, &[6, 9, 12, 15]));
    }

    #[test]
    fn scale_by_zero() {
        let f = gf(5);
        assert!(p(&f, "x + 3*x^4").scale(&f, f.zero()).is_zero());
    }

    #[test]
    fn ambient_rules() {
        let f = gf(3);
        let u = SparsePoly::parse(&f, "1 + x", Ambient::Unitary).unwrap();
        assert_eq!(p(&f, "x^2").compose(&f, &u), Err(Error::AmbientViolation));
        assert_eq!(p(&f, "x").add(&f, &u), Err(Error::AmbientMismatch));
        assert_eq!(SparsePoly::parse(&f, "1 + x", Ambient::Nonunitary), Err(Error::AmbientViolation));
        let unitary = SparsePoly::parse(&f, "x^2", Ambient::Unitary).unwrap();
        assert_eq!(unitary.compose(&f, &u).unwrap(), SparsePoly::parse(&f, "1 + 2*x + x^2", Ambient::Unitary).unwrap());
    }

    #[test]
    fn compose_examples() {
        let f = gf(2);
        assert_eq!(p(&f, "x + x^2").compose(&f, &p(&f, "x^3")).unwrap(), p(&f, "x^3 + x^6"));
        let u = p(&f, "x^2 + x^5 + x^11");
        assert_eq!(SparsePoly::x().compose(&f, &u).unwrap(), u);
        // (x^2 + x)^3 over GF(2), with the binomial expansion as oracle
        let cube = p(&f, "x^3").compose(&f, &p(&f, "x^2 + x")).unwrap();
        assert_eq!(cube, p(&f, "x^3 + x^4 + x^5 + x^6"));
        // (u+v)^(q^n+1) = u^(q^n+1) + v^(q^n+1) + u^(q^n) v + u v^(q^n), q=2, n=1
        let (a, b) = (p(&f, "x^2"), p(&f, "x"));
        let rhs = a
            .pow(&f, &3u32.into())
            .unwrap()
            .add(&f, &b.pow(&f, &3u32.into()).unwrap())
            .unwrap()
            .add(&f, &a.pow(&f, &2u32.into()).unwrap().mul(&f, &b).unwrap())
            .unwrap()
            .add(&f, &a.mul(&f, &b.pow(&f, &2u32.into()).unwrap()).unwrap())
            .unwrap();
        assert_eq!(cube, rhs);
    }

    #[test]
    fn big_exponent_composition_stays_sparse() {
        let f = gf(3);
        let q8 = Exp::from(3u32).pow(8u32);
        let gen =
            SparsePoly::from_terms(&f, [(Exp::one(), f.one()), (q8.clone(), f.one())], Ambient::Nonunitary).unwrap();
        let img = gen.compose(&f, &p(&f, "x^2 + 2*x^5")).unwrap();
        assert_eq!(img.len(), 4);
        assert_eq!(img.coeff(&(&q8 * 5u32)), f.from_int(2));
    }

    #[test]
    fn expansion_cap() {
        let f = gf(2);
        let u = SparsePoly::from_exponents(&f, &(1..=1200).collect::<Vec<_>>());
        let v = SparsePoly::from_exponents(&f, &(1..=1200).map(|e| e * 5000).collect::<Vec<_>>());
        assert_eq!(u.mul(&f, &v), Err(Error::ExpansionOverflow(TERM_CAP)));
    }

    #[test]
    fn q_component_examples() {
        let f = gf(3);
        let comps = p(&f, "x + x^2 + x^3").q_components(&f);
        assert_eq!(comps, vec![p(&f, "x + x^3"), p(&f, "x^2")]);
        let f2 = gf(2);
        let g = p(&f2, "x + x^2 + x^7");
        assert_eq!(g.q_components(&f2), vec![g.clone()]);
        let f4 = gf(4);
        let comps = p(&f4, "x + x^4").q_components(&f4);
        assert_eq!(comps[0], p(&f4, "x + x^4"));
        assert!(comps[1].is_zero() && comps[2].is_zero());
    }

    #[test]
    fn vandermonde_examples() {
        let f = gf(3);
        assert_eq!(p(&f, "x + x^2").vandermonde_extract(&f).unwrap(), vec![p(&f, "x"), p(&f, "x^2")]);
        let g = p(&f, "x^2 + 2*x^6");
        assert_eq!(g.vandermonde_extract(&f).unwrap(), vec![SparsePoly::zero(Ambient::Nonunitary), g]);
    }

    #[test]
    fn evaluate_examples() {
        let f = gf(2);
        assert!(p(&f, "x + x^19").evaluate(&f, f.one()).is_zero());
        assert!(SparsePoly::zero(Ambient::Nonunitary).evaluate(&f, f.one()).is_zero());
        let f3 = gf(3);
        assert_eq!(p(&f3, "x + x^3").evaluate(&f3, f3.from_int(2)), f3.from_int(1));
    }

    #[test]
    fn text_roundtrip() {
        let f = gf(9);
        let g = p(&f, "[0,1]*x^2 + x + 2*x^10");
        assert_eq!(g.to_text(&f), "x + [0,1]*x^2 + 2*x^10");
        assert_eq!(p(&f, &g.to_text(&f)), g);
        let f5 = gf(5);
        assert_eq!(p(&f5, "x - x^3").to_text(&f5), "x + 4*x^3");
        assert_eq!(p(&f5, "x^2 - x^2").to_text(&f5), "0");
        assert!(SparsePoly::parse(&f5, "x^", Ambient::Nonunitary).is_err());
        assert!(SparsePoly::parse(&f5, "y", Ambient::Nonunitary).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let f = gf(4);
        let g = p(&f, "x + [1,1]*x^123456789012345678901234567890");
        let back = SparsePoly::from_json(&f, &g.to_json(&f), Ambient::Nonunitary).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn remainder_by_frobenius_modulus() {
        let f = gf(4);
        let g = SparsePoly::parse(&f, "1 + x^4", Ambient::Unitary).unwrap();
        assert_eq!(g.rem_frobenius_modulus(&f), SparsePoly::parse(&f, "1 + x", Ambient::Unitary).unwrap());
    }
}
