//! Periodic linear functionals `x^e -> c_{e mod M}` as non-membership
//! certificates.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng;

use super::schema::GeneratorSchema;
use crate::error::Result;
use crate::gf::{FieldElement, FieldSpec};
use crate::poly::SparsePoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicFunctional {
    pub period: u64,
    pub weights: Vec<FieldElement>,
}

impl PeriodicFunctional {
    pub fn apply(&self, f: &FieldSpec, g: &SparsePoly) -> FieldElement {
        let m = BigUint::from(self.period);
        g.terms().fold(f.zero(), |acc, (e, c)| {
            let r = (e % &m).to_usize().unwrap();
            f.add(acc, f.mul(c, self.weights[r]))
        })
    }

    /// The functional applied to one schema instance, computed from the
    /// exponent forms modulo the period.
    pub fn apply_schema(&self, f: &FieldSpec, s: &GeneratorSchema, params: &[u64]) -> FieldElement {
        s.terms.iter().fold(f.zero(), |acc, t| {
            let r = t.form.eval_mod(params, self.period) as usize;
            f.add(acc, f.mul(t.coef, self.weights[r]))
        })
    }
}

/// One linear condition per schema and residue tuple of its parameters:
/// `sum_t coef_t * c_{form_t(r) mod M} = 0`. Inequalities between
/// parameters are ignored, since every residue tuple is attained by some
/// admissible assignment; dropping them can only add conditions.
pub fn residue_equations(f: &FieldSpec, schemas: &[GeneratorSchema], period: u64) -> Vec<Vec<FieldElement>> {
    let m = period as usize;
    let mut eqs = BTreeSet::new();
    for s in schemas {
        let mut res = vec![0u64; s.arity()];
        loop {
            let mut row = vec![f.zero(); m];
            for t in &s.terms {
                let r = t.form.eval_mod(&res, period) as usize;
                row[r] = f.add(row[r], t.coef);
            }
            if row.iter().any(|c| !c.is_zero()) {
                eqs.insert(row);
            }
            // Odometer over (Z/M)^arity.
            let mut k = 0;
            while k < res.len() {
                res[k] += 1;
                if res[k] < period {
                    break;
                }
                res[k] = 0;
                k += 1;
            }
            if k == res.len() {
                break;
            }
        }
    }
    eqs.into_iter().collect()
}

/// Basis of the solution space of `rows * c = 0`, one vector per free
/// column in increasing order.
pub(crate) fn nullspace(f: &FieldSpec, rows: &[Vec<FieldElement>], width: usize) -> Vec<Vec<FieldElement>> {
    let mut a: Vec<Vec<FieldElement>> = rows.to_vec();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for col in 0..width {
        let Some(pr) = (r..a.len()).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(r, pr);
        let s = f.inv(a[r][col]).expect("nonzero");
        for v in a[r].iter_mut() {
            *v = f.mul(*v, s);
        }
        for i in 0..a.len() {
            if i != r && !a[i][col].is_zero() {
                let factor = a[i][col];
                let pivot = a[r].clone();
                for (v, &pv) in a[i].iter_mut().zip(&pivot) {
                    *v = f.sub(*v, f.mul(factor, pv));
                }
            }
        }
        pivot_cols.push(col);
        r += 1;
    }
    let mut basis = Vec::new();
    for free in (0..width).filter(|c| !pivot_cols.contains(c)) {
        let mut v = vec![f.zero(); width];
        v[free] = f.one();
        for (i, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = f.neg(a[i][free]);
        }
        basis.push(v);
    }
    basis
}

/// Looks for a period-`period` functional vanishing on every instance of
/// `schemas` but not on `target`, normalized to `lambda(target) = 1`.
pub fn solve_periodic_functional(
    f: &FieldSpec,
    schemas: &[GeneratorSchema],
    period: u64,
    target: &SparsePoly,
) -> Result<Option<PeriodicFunctional>> {
    assert!(period >= 2, "period must be at least 2");
    let eqs = residue_equations(f, schemas, period);
    let kernel = nullspace(f, &eqs, period as usize);
    for weights in kernel {
        let lam = PeriodicFunctional { period, weights };
        let v = lam.apply(f, target);
        if !v.is_zero() {
            let s = f.inv(v)?;
            let weights = lam.weights.iter().map(|&w| f.mul(w, s)).collect();
            return Ok(Some(PeriodicFunctional { period, weights }));
        }
    }
    Ok(None)
}

/// Checks that the functional kills every residue equation of `schemas`
/// and is nonzero on `target`.
pub fn verify_functional_exhaustive(
    f: &FieldSpec,
    schemas: &[GeneratorSchema],
    lam: &PeriodicFunctional,
    target: &SparsePoly,
) -> bool {
    if lam.weights.len() as u64 != lam.period || lam.period < 2 {
        return false;
    }
    let kills = residue_equations(f, schemas, lam.period)
        .iter()
        .all(|row| row.iter().zip(&lam.weights).fold(f.zero(), |acc, (a, w)| f.add(acc, f.mul(*a, *w))).is_zero());
    kills && !lam.apply(f, target).is_zero()
}

/// Draws admissible parameters uniformly from `1..=max` by rejection.
pub fn random_params<R: Rng>(s: &GeneratorSchema, max: u64, rng: &mut R) -> Vec<u64> {
    loop {
        let p: Vec<u64> = (0..s.arity()).map(|_| rng.gen_range(1..=max)).collect();
        if s.satisfies(&p) {
            return p;
        }
    }
}

/// Evaluates the functional on `samples` random instances, materialized
/// as polynomials. Returns the first instance it does not kill.
pub fn sample_instances<R: Rng>(
    f: &FieldSpec,
    schemas: &[GeneratorSchema],
    lam: &PeriodicFunctional,
    samples: usize,
    max_param: u64,
    rng: &mut R,
) -> Result<Option<(String, Vec<u64>)>> {
    for k in 0..samples {
        let s = &schemas[k % schemas.len()];
        let params = random_params(s, max_param, rng);
        let inst = s.instantiate(f, &params)?;
        if !lam.apply(f, &inst).is_zero() {
            return Ok(Some((s.id.clone(), params)));
        }
    }
    Ok(None)
}
