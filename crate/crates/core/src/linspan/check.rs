//! Certificate checking without rerunning the search.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::functional::{random_params, verify_functional_exhaustive, PeriodicFunctional};
use super::membership::{CertStep, MembershipVerdict, NonMemberWitness, Source};
use super::schema::GeneratorSchema;
use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldSpec};
use crate::poly::{Ambient, Exp, SparsePoly};

/// What a checker needs to know about a space.
#[derive(Clone, Copy, Debug)]
pub struct SpaceView<'a> {
    pub schemas: &'a [GeneratorSchema],
    pub generators: &'a BTreeMap<String, SparsePoly>,
    /// The schemas span the whole space, so non-membership witnesses built
    /// from them are meaningful.
    pub complete: bool,
}

pub const FUNCTIONAL_SAMPLES: usize = 1000;
pub const SAMPLE_PARAM_MAX: u64 = 10_000;

fn materialize(f: &FieldSpec, space: &SpaceView, src: &Source) -> Result<SparsePoly> {
    match src {
        Source::Schema { schema, params } => space
            .schemas
            .iter()
            .find(|s| &s.id == schema)
            .ok_or_else(|| Error::UnknownLabel(schema.clone()))?
            .instantiate_named(f, params),
        Source::Generator { generator, subst } => {
            let g = space.generators.get(generator).ok_or_else(|| Error::UnknownLabel(generator.clone()))?;
            g.compose(f, subst)
        }
    }
}

/// `sum scalar * source`, as a unitary polynomial so constants survive.
pub fn sum_steps(f: &FieldSpec, space: &SpaceView, steps: &[CertStep]) -> Result<SparsePoly> {
    let mut acc = SparsePoly::zero(Ambient::Unitary);
    for s in steps {
        let poly = materialize(f, space, &s.source)?.with_ambient(Ambient::Unitary)?;
        acc = acc.add(f, &poly.scale(f, s.scalar))?;
    }
    Ok(acc)
}

fn same_terms(a: &SparsePoly, b: &SparsePoly) -> bool {
    a.terms().eq(b.terms())
}

/// Checks a verdict about `target`. `Err` carries the reason for rejection.
pub fn check_verdict(
    f: &FieldSpec,
    space: &SpaceView,
    target: &SparsePoly,
    verdict: &MembershipVerdict,
    seed: u64,
) -> std::result::Result<(), String> {
    match verdict {
        MembershipVerdict::Member(cert) => {
            let sum = sum_steps(f, space, &cert.steps).map_err(|e| e.to_string())?;
            if same_terms(&sum, target) {
                Ok(())
            } else {
                Err(format!("steps sum to {}, not {}", sum.to_text(f), target.to_text(f)))
            }
        }
        MembershipVerdict::NonMember(_) if !space.complete => {
            Err("non-membership claimed for a space without a complete spanning set".into())
        }
        MembershipVerdict::NonMember(NonMemberWitness::Functional(lam)) => {
            check_functional(f, space.schemas, lam, target, seed)
        }
        MembershipVerdict::NonMember(NonMemberWitness::PivotGap { exponent, trail }) => {
            check_pivot_gap(f, space, target, exponent, trail)
        }
        MembershipVerdict::Unknown(_) => Ok(()),
    }
}

pub fn check_functional(
    f: &FieldSpec,
    schemas: &[GeneratorSchema],
    lam: &PeriodicFunctional,
    target: &SparsePoly,
    seed: u64,
) -> std::result::Result<(), String> {
    if !verify_functional_exhaustive(f, schemas, lam, target) {
        return Err(format!("period-{} functional fails the residue check", lam.period));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..FUNCTIONAL_SAMPLES {
        let s = &schemas[k % schemas.len()];
        let params = random_params(s, SAMPLE_PARAM_MAX, &mut rng);
        let inst = s.instantiate(f, &params).map_err(|e| e.to_string())?;
        if !lam.apply(f, &inst).is_zero() {
            return Err(format!("functional does not vanish on {} {:?}", s.id, params));
        }
    }
    Ok(())
}

fn check_pivot_gap(
    f: &FieldSpec,
    space: &SpaceView,
    target: &SparsePoly,
    gap: &Exp,
    trail: &[CertStep],
) -> std::result::Result<(), String> {
    let sum = sum_steps(f, space, trail).map_err(|e| e.to_string())?;
    let residual =
        target.clone().with_ambient(Ambient::Unitary).and_then(|t| t.sub(f, &sum)).map_err(|e| e.to_string())?;
    if residual.min_exp() != Some(gap) {
        return Err(format!("residual {} does not start at x^{gap}", residual.to_text(f)));
    }
    let gap = gap.to_u64().filter(|&g| g <= 4096).ok_or("gap too large to check")?;
    if gap_is_reachable(f, space.schemas, gap) {
        Err(format!("some span element has minimal exponent {gap}"))
    } else {
        Ok(())
    }
}

/// Whether `x^gap` lies in the span of all instances with minimal exponent
/// at most `gap`, projected to the exponents `1..=gap`.
fn gap_is_reachable(f: &FieldSpec, schemas: &[GeneratorSchema], gap: u64) -> bool {
    let n = gap as usize;
    let mut rows: Vec<Vec<FieldElement>> = Vec::new();
    for s in schemas {
        for e in 1..=gap {
            for params in s.instances_with_min(e) {
                let Ok(inst) = s.instantiate(f, &params) else { continue };
                let mut v = vec![f.zero(); n];
                for (x, c) in inst.terms() {
                    if let Some(x) = x.to_usize().filter(|&x| x <= n) {
                        v[x - 1] = c;
                    }
                }
                rows.push(v);
            }
        }
    }
    // Eliminate on columns 1..gap-1, then look for a row that is a pure multiple of x^gap.
    let mut r = 0;
    for col in 0..n - 1 {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, pr);
        let inv = f.inv(rows[r][col]).expect("nonzero");
        let pivot: Vec<FieldElement> = rows[r].iter().map(|&c| f.mul(c, inv)).collect();
        for row in rows.iter_mut().skip(r + 1) {
            let c = row[col];
            if !c.is_zero() {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a = f.sub(*a, f.mul(c, *b));
                }
            }
        }
        rows[r] = pivot;
        r += 1;
    }
    rows[r..].iter().any(|row| !row[n - 1].is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linspan::membership::{decide_membership, MemberCert};
    use crate::linspan::schema::{ExpForm, SchemaTerm};
    use num_bigint::BigUint;

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn piz(f: &FieldSpec) -> Vec<GeneratorSchema> {
        vec![GeneratorSchema::new(
            "s",
            vec!["i".into()],
            vec![],
            vec![SchemaTerm { coef: f.one(), form: ExpForm::new(1u32, vec![b(1)]) }],
        )
        .unwrap()]
    }

    #[test]
    fn member_certificate_checks_and_tampering_fails() {
        let f = FieldSpec::with_order(2).unwrap();
        let schemas = vec![
            GeneratorSchema::monomial_multiples("e", &f, &[b(1), b(2)]),
            GeneratorSchema::monomial_multiples("f", &f, &[b(3)]),
        ];
        let gens = BTreeMap::new();
        let view = SpaceView { schemas: &schemas, generators: &gens, complete: true };
        let g = SparsePoly::from_exponents(&f, &[3, 6, 12]);
        let v = decide_membership(&f, &g, &schemas, 32).unwrap();
        assert!(check_verdict(&f, &view, &g, &v, 1).is_ok());
        let MembershipVerdict::Member(mut cert) = v else { panic!() };
        cert.steps.pop();
        assert!(check_verdict(&f, &view, &g, &MembershipVerdict::Member(cert), 1).is_err());
    }

    #[test]
    fn generator_sources() {
        let f = FieldSpec::with_order(2).unwrap();
        let mut gens = BTreeMap::new();
        gens.insert("g".to_string(), SparsePoly::from_exponents(&f, &[1, 2]));
        let view = SpaceView { schemas: &[], generators: &gens, complete: false };
        let u = SparsePoly::from_exponents(&f, &[1, 2]);
        let cert = MemberCert {
            steps: vec![CertStep { source: Source::Generator { generator: "g".into(), subst: u }, scalar: f.one() }],
        };
        let target = SparsePoly::from_exponents(&f, &[1, 4]);
        assert!(check_verdict(&f, &view, &target, &MembershipVerdict::Member(cert), 0).is_ok());
    }

    #[test]
    fn pivot_gap_checks() {
        let f = FieldSpec::with_order(2).unwrap();
        let schemas = piz(&f);
        let gens = BTreeMap::new();
        let view = SpaceView { schemas: &schemas, generators: &gens, complete: true };
        let g = SparsePoly::from_exponents(&f, &[1, 5]);
        let v = decide_membership(&f, &g, &schemas, 8).unwrap();
        assert!(v.is_nonmember());
        assert!(check_verdict(&f, &view, &g, &v, 0).is_ok());
        let incomplete = SpaceView { complete: false, ..view };
        assert!(check_verdict(&f, &incomplete, &g, &v, 0).is_err());
        let forged = MembershipVerdict::NonMember(NonMemberWitness::PivotGap { exponent: b(2), trail: vec![] });
        let g2 = SparsePoly::from_exponents(&f, &[2]);
        assert!(check_verdict(&f, &view, &g2, &forged, 0).is_err());
    }

    #[test]
    fn bad_functional_rejected() {
        let f = FieldSpec::with_order(2).unwrap();
        let schemas = vec![GeneratorSchema::monomial_multiples("e", &f, &[b(1), b(2)])];
        let lam = PeriodicFunctional { period: 3, weights: vec![f.zero(), f.one(), f.zero()] };
        assert!(check_functional(&f, &schemas, &lam, &SparsePoly::x(), 0).is_err());
    }
}
