//! Parametric generator families `sum_t c_t x^{a_t0 + sum_k a_tk p_k}`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldSpec};
use crate::poly::{Ambient, Exp, SparsePoly};

/// An affine exponent `constant + sum_k coeffs[k] * param_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExpForm {
    pub constant: BigUint,
    pub coeffs: Vec<BigUint>,
}

impl ExpForm {
    pub fn new(constant: impl Into<BigUint>, coeffs: Vec<BigUint>) -> ExpForm {
        ExpForm { constant: constant.into(), coeffs }
    }

    /// `c * param_k` in a form over `arity` parameters.
    pub fn linear(arity: usize, terms: &[(usize, BigUint)]) -> ExpForm {
        let mut coeffs = vec![BigUint::zero(); arity];
        for (k, c) in terms {
            coeffs[*k] += c;
        }
        ExpForm { constant: BigUint::zero(), coeffs }
    }

    pub fn eval(&self, params: &[u64]) -> Exp {
        let mut e = self.constant.clone();
        for (c, &v) in self.coeffs.iter().zip(params) {
            e += c * v;
        }
        e
    }

    pub fn eval_mod(&self, params: &[u64], m: u64) -> u64 {
        let mut e = (&self.constant % m).to_u64().unwrap();
        for (c, &v) in self.coeffs.iter().zip(params) {
            let c = (c % m).to_u64().unwrap();
            e = (e + (c as u128 * v as u128 % m as u128) as u64) % m;
        }
        e
    }

    fn small(&self) -> (u64, Vec<u64>) {
        let sat = |b: &BigUint| b.to_u64().unwrap_or(u64::MAX);
        (sat(&self.constant), self.coeffs.iter().map(sat).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SchemaTerm {
    pub coef: FieldElement,
    pub form: ExpForm,
}

/// A family of nonunitary polynomials indexed by parameters `>= 1`, with
/// optional strict inequalities `params[a] > params[b]`.
///
/// Every parameter must occur with a positive coefficient in every term,
/// so only finitely many instances have minimal exponent below any bound.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorSchema {
    pub id: String,
    pub params: Vec<String>,
    pub greater: Vec<(usize, usize)>,
    pub terms: Vec<SchemaTerm>,
}

impl GeneratorSchema {
    pub fn new(
        id: impl Into<String>,
        params: Vec<String>,
        greater: Vec<(usize, usize)>,
        terms: Vec<SchemaTerm>,
    ) -> Result<GeneratorSchema> {
        let id = id.into();
        let bad = |why: &str| Error::BadSchema(format!("{id}: {why}"));
        if terms.is_empty() {
            return Err(bad("no terms"));
        }
        for t in &terms {
            if t.form.coeffs.len() != params.len() {
                return Err(bad("exponent form arity differs from parameter count"));
            }
            if t.form.coeffs.iter().any(|c| c.is_zero()) {
                return Err(bad("every parameter must occur in every term"));
            }
            if params.is_empty() && t.form.constant.is_zero() {
                return Err(bad("constant term in a nonunitary schema"));
            }
        }
        for &(a, b) in &greater {
            if a >= params.len() || b >= params.len() || a == b {
                return Err(bad("inequality refers to unknown parameters"));
            }
        }
        Ok(GeneratorSchema { id, params, greater, terms })
    }

    /// Shorthand for one-parameter schemas with all coefficients one:
    /// `sum_t x^{m_t i}`.
    pub fn monomial_multiples(id: &str, f: &FieldSpec, multipliers: &[BigUint]) -> GeneratorSchema {
        let terms = multipliers
            .iter()
            .map(|m| SchemaTerm { coef: f.one(), form: ExpForm::new(0u32, vec![m.clone()]) })
            .collect();
        GeneratorSchema::new(id, vec!["i".into()], vec![], terms).expect("well-formed")
    }

    /// The images `g(c x^i)`, `i >= 1`, of an explicit generator under
    /// monomial substitutions. They lie in `{g}^S` without spanning it.
    pub fn monomial_images(id: &str, g: &SparsePoly) -> Result<GeneratorSchema> {
        let terms = g.terms().map(|(e, c)| SchemaTerm { coef: c, form: ExpForm::new(0u32, vec![e.clone()]) }).collect();
        GeneratorSchema::new(id, vec!["i".into()], vec![], terms)
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn satisfies(&self, params: &[u64]) -> bool {
        params.len() == self.arity()
            && params.iter().all(|&v| v >= 1)
            && self.greater.iter().all(|&(a, b)| params[a] > params[b])
    }

    pub fn instantiate(&self, f: &FieldSpec, params: &[u64]) -> Result<SparsePoly> {
        if !self.satisfies(params) {
            return Err(Error::ConstraintViolation(format!("{} with {:?}", self.id, params)));
        }
        SparsePoly::from_terms(f, self.terms.iter().map(|t| (t.form.eval(params), t.coef)), Ambient::Nonunitary)
    }

    pub fn instantiate_named(&self, f: &FieldSpec, named: &BTreeMap<String, u64>) -> Result<SparsePoly> {
        self.instantiate(f, &self.positional(named)?)
    }

    pub fn positional(&self, named: &BTreeMap<String, u64>) -> Result<Vec<u64>> {
        if named.len() != self.arity() {
            return Err(Error::ConstraintViolation(format!("{} expects {:?}", self.id, self.params)));
        }
        self.params
            .iter()
            .map(|p| {
                named
                    .get(p)
                    .copied()
                    .ok_or_else(|| Error::ConstraintViolation(format!("{}: missing parameter {p}", self.id)))
            })
            .collect()
    }

    pub fn named(&self, params: &[u64]) -> BTreeMap<String, u64> {
        self.params.iter().cloned().zip(params.iter().copied()).collect()
    }

    /// Smallest exponent form value at these parameters.
    pub fn form_min(&self, params: &[u64]) -> Exp {
        self.terms.iter().map(|t| t.form.eval(params)).min().expect("nonempty")
    }

    /// All admissible parameter tuples whose smallest form value is exactly
    /// `e`, in lexicographic order.
    pub fn instances_with_min(&self, e: u64) -> Vec<Vec<u64>> {
        let small: Vec<(u64, Vec<u64>)> = self.terms.iter().map(|t| t.form.small()).collect();
        let mut found = BTreeSet::new();
        for (c, a) in &small {
            if *c > e {
                continue;
            }
            let mut cur = Vec::with_capacity(a.len());
            solve_exact(a, e - c, &mut cur, &mut |p| {
                if self.satisfies(p) && small.iter().all(|(c2, a2)| eval_small(*c2, a2, p) >= e) {
                    found.insert(p.to_vec());
                }
            });
        }
        found.into_iter().collect()
    }

    /// Admissible tuples whose largest form value is at most `bound`.
    pub fn instances_within(&self, bound: u64) -> Vec<Vec<u64>> {
        let small: Vec<(u64, Vec<u64>)> = self.terms.iter().map(|t| t.form.small()).collect();
        let mut out = Vec::new();
        let (c0, a0) = &small[0];
        if *c0 > bound {
            return out;
        }
        let mut cur = Vec::new();
        solve_bounded(a0, bound - c0, &mut cur, &mut |p| {
            if self.satisfies(p) && small.iter().all(|(c, a)| eval_small(*c, a, p) <= bound) {
                out.push(p.to_vec());
            }
        });
        out
    }

    /// The same schema with its id prefixed by `space/`.
    pub fn qualified(&self, space: &str) -> GeneratorSchema {
        GeneratorSchema { id: format!("{space}/{}", self.id), ..self.clone() }
    }
}

fn eval_small(c: u64, a: &[u64], p: &[u64]) -> u64 {
    let mut e = c as u128;
    for (&k, &v) in a.iter().zip(p) {
        e += k as u128 * v as u128;
    }
    e.min(u64::MAX as u128) as u64
}

/// Enumerates `p >= 1` with `sum a_k p_k == rem`.
fn solve_exact(a: &[u64], rem: u64, cur: &mut Vec<u64>, emit: &mut dyn FnMut(&[u64])) {
    let k = cur.len();
    if k == a.len() {
        if rem == 0 {
            emit(cur);
        }
        return;
    }
    // Remaining parameters each contribute at least their coefficient.
    let rest: u128 = a[k + 1..].iter().map(|&x| x as u128).sum();
    if k + 1 == a.len() {
        if a[k] != 0 && rem.is_multiple_of(a[k]) && rem / a[k] >= 1 {
            cur.push(rem / a[k]);
            emit(cur);
            cur.pop();
        }
        return;
    }
    let mut v = 1u64;
    while (a[k] as u128) * (v as u128) + rest <= rem as u128 {
        cur.push(v);
        solve_exact(a, rem - a[k] * v, cur, emit);
        cur.pop();
        v += 1;
    }
}

/// Enumerates `p >= 1` with `sum a_k p_k <= rem`.
fn solve_bounded(a: &[u64], rem: u64, cur: &mut Vec<u64>, emit: &mut dyn FnMut(&[u64])) {
    let k = cur.len();
    if k == a.len() {
        emit(cur);
        return;
    }
    let rest: u128 = a[k + 1..].iter().map(|&x| x as u128).sum();
    let mut v = 1u64;
    while (a[k] as u128) * (v as u128) + rest <= rem as u128 {
        cur.push(v);
        solve_bounded(a, rem - a[k] * v, cur, emit);
        cur.pop();
        v += 1;
    }
}

/// JSON form of a schema, used by custom space files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaJson {
    pub id: String,
    pub params: Vec<String>,
    /// Pairs `[a, b]` meaning `a > b`.
    #[serde(default)]
    pub greater: Vec<(String, String)>,
    pub terms: Vec<SchemaTermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaTermJson {
    pub coef: Vec<u32>,
    /// Decimal constant part of the exponent.
    #[serde(default = "zero_string")]
    pub constant: String,
    /// Parameter name to decimal coefficient.
    pub coeffs: BTreeMap<String, String>,
}

fn zero_string() -> String {
    "0".into()
}

impl GeneratorSchema {
    pub fn from_json(f: &FieldSpec, json: &SchemaJson) -> Result<GeneratorSchema> {
        let index = |name: &str| {
            json.params
                .iter()
                .position(|p| p == name)
                .ok_or_else(|| Error::BadSchema(format!("{}: unknown parameter {name}", json.id)))
        };
        let big =
            |s: &str| s.parse::<BigUint>().map_err(|_| Error::BadSchema(format!("{}: bad integer `{s}`", json.id)));
        let mut greater = Vec::new();
        for (a, b) in &json.greater {
            greater.push((index(a)?, index(b)?));
        }
        let mut terms = Vec::new();
        for t in &json.terms {
            let mut coeffs = vec![BigUint::zero(); json.params.len()];
            for (name, c) in &t.coeffs {
                coeffs[index(name)?] = big(c)?;
            }
            terms.push(SchemaTerm {
                coef: f.from_residue(&t.coef)?,
                form: ExpForm { constant: big(&t.constant)?, coeffs },
            });
        }
        GeneratorSchema::new(json.id.clone(), json.params.clone(), greater, terms)
    }

    pub fn to_json(&self, f: &FieldSpec) -> SchemaJson {
        SchemaJson {
            id: self.id.clone(),
            params: self.params.clone(),
            greater: self.greater.iter().map(|&(a, b)| (self.params[a].clone(), self.params[b].clone())).collect(),
            terms: self
                .terms
                .iter()
                .map(|t| SchemaTermJson {
                    coef: f.residue(t.coef),
                    constant: t.form.constant.to_string(),
                    coeffs: self.params.iter().cloned().zip(t.form.coeffs.iter().map(|c| c.to_string())).collect(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    /// `x^{Qi+j} + x^{i+Qj}` with `i > j`.
    fn pair_family(f: &FieldSpec, qn: u64) -> GeneratorSchema {
        GeneratorSchema::new(
            "g",
            vec!["i".into(), "j".into()],
            vec![(0, 1)],
            vec![
                SchemaTerm { coef: f.one(), form: ExpForm::new(0u32, vec![b(qn), b(1)]) },
                SchemaTerm { coef: f.one(), form: ExpForm::new(0u32, vec![b(1), b(qn)]) },
            ],
        )
        .unwrap()
    }

    #[test]
    fn instantiate_examples() {
        let f = FieldSpec::with_order(2).unwrap();
        let g = pair_family(&f, 2);
        assert_eq!(g.instantiate(&f, &[2, 1]).unwrap(), SparsePoly::from_exponents(&f, &[4, 5]));
        assert!(matches!(g.instantiate(&f, &[1, 2]), Err(Error::ConstraintViolation(_))));
        let e = GeneratorSchema::monomial_multiples("e", &f, &[b(1), b(2)]);
        assert_eq!(e.instantiate(&f, &[1]).unwrap(), SparsePoly::from_exponents(&f, &[1, 2]));
        let f3 = FieldSpec::with_order(3).unwrap();
        let v = GeneratorSchema::monomial_multiples("v", &f3, &[b(1), b(3)]);
        assert_eq!(v.instantiate(&f3, &[2]).unwrap(), SparsePoly::from_exponents(&f3, &[2, 6]));
    }

    #[test]
    fn collisions_cancel() {
        let f = FieldSpec::with_order(2).unwrap();
        let s = GeneratorSchema::monomial_multiples("c", &f, &[b(2), b(2)]);
        assert!(s.instantiate(&f, &[3]).unwrap().is_zero());
    }

    #[test]
    fn rejects_unbounded_schemas() {
        let f = FieldSpec::with_order(2).unwrap();
        let t = SchemaTerm { coef: f.one(), form: ExpForm::new(1u32, vec![b(0)]) };
        assert!(matches!(GeneratorSchema::new("bad", vec!["i".into()], vec![], vec![t]), Err(Error::BadSchema(_))));
    }

    #[test]
    fn instances_with_min_matches_brute_force() {
        let f = FieldSpec::with_order(2).unwrap();
        let g = pair_family(&f, 4);
        for e in 1..60u64 {
            let mut brute = Vec::new();
            for i in 1..60 {
                for j in 1..60 {
                    if i > j && g.form_min(&[i, j]) == BigUint::from(e) {
                        brute.push(vec![i, j]);
                    }
                }
            }
            assert_eq!(g.instances_with_min(e), brute, "e = {e}");
        }
    }

    #[test]
    fn instances_within_bound() {
        let f = FieldSpec::with_order(2).unwrap();
        let g = pair_family(&f, 2);
        let got = g.instances_within(10);
        assert_eq!(got, vec![vec![2, 1], vec![3, 1], vec![3, 2], vec![4, 1], vec![4, 2]]);
    }

    #[test]
    fn json_roundtrip() {
        let f = FieldSpec::with_order(4).unwrap();
        let g = pair_family(&f, 4);
        let back = GeneratorSchema::from_json(&f, &g.to_json(&f)).unwrap();
        assert_eq!(back, g);
    }
}
