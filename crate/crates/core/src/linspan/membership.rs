//! Membership by minimal-exponent elimination over schema instances.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;

use super::echelon::EchelonBasis;
use super::functional::PeriodicFunctional;
use super::schema::GeneratorSchema;
use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldSpec};
use crate::poly::{Ambient, Exp, SparsePoly};

/// Default degree bound for elimination.
pub const DEFAULT_CUTOFF: u64 = 64;

/// Where a certificate term comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    /// An instance of a named schema.
    Schema { schema: String, params: BTreeMap<String, u64> },
    /// A named generator after the substitution `x -> subst`.
    Generator { generator: String, subst: SparsePoly },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertStep {
    pub source: Source,
    pub scalar: FieldElement,
}

/// `target = sum scalar * source`, exactly.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MemberCert {
    pub steps: Vec<CertStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NonMemberWitness {
    Functional(PeriodicFunctional),
    /// After subtracting `trail` from the target, the residual has minimal
    /// exponent `exponent`, and no element of the span has that minimal
    /// exponent.
    PivotGap {
        exponent: Exp,
        trail: Vec<CertStep>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MembershipVerdict {
    Member(MemberCert),
    NonMember(NonMemberWitness),
    Unknown(u64),
}

impl MembershipVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self, MembershipVerdict::Member(_))
    }

    pub fn is_nonmember(&self) -> bool {
        matches!(self, MembershipVerdict::NonMember(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            MembershipVerdict::Member(_) => "member",
            MembershipVerdict::NonMember(_) => "nonmember",
            MembershipVerdict::Unknown(_) => "unknown",
        }
    }
}

/// Instance bookkeeping shared by the greedy pass and the full elimination.
struct Instances<'a> {
    field: &'a FieldSpec,
    schemas: &'a [GeneratorSchema],
}

impl Instances<'_> {
    fn with_min(&self, e: u64) -> Result<Vec<(usize, Vec<u64>, SparsePoly)>> {
        let mut out = Vec::new();
        for (si, s) in self.schemas.iter().enumerate() {
            for params in s.instances_with_min(e) {
                let poly = s.instantiate(self.field, &params)?;
                out.push((si, params, poly));
            }
        }
        Ok(out)
    }

    fn step(&self, si: usize, params: &[u64], scalar: FieldElement) -> CertStep {
        let s = &self.schemas[si];
        CertStep { source: Source::Schema { schema: s.id.clone(), params: s.named(params) }, scalar }
    }
}

fn as_small(e: &Exp) -> u64 {
    e.to_u64().unwrap_or(u64::MAX)
}

/// Decides whether `g` lies in the span of all instances of `schemas`.
/// Member means `g` is a combination of instances with minimal exponent
/// `<= cutoff`; otherwise the answer is Unknown unless a pivot gap below
/// the cutoff shows that no combination exists.
///
/// Member and PivotGap verdicts are exact. PivotGap is a proof of
/// non-membership only when the schemas span the whole space.
pub fn decide_membership(
    field: &FieldSpec,
    g: &SparsePoly,
    schemas: &[GeneratorSchema],
    cutoff: u64,
) -> Result<MembershipVerdict> {
    let g = nonunitary(g)?;
    let inst = Instances { field, schemas };
    if let Some(cert) = greedy(&inst, &g, cutoff)? {
        return Ok(MembershipVerdict::Member(cert));
    }
    eliminate(&inst, &g, cutoff)
}

fn nonunitary(g: &SparsePoly) -> Result<SparsePoly> {
    if !g.constant_term().is_zero() {
        return Err(Error::AmbientViolation);
    }
    g.clone().with_ambient(Ambient::Nonunitary)
}

/// Cancels the minimal term with the first instance whose own minimal
/// exponent matches. Cheap, and enough for chains like `x - x^{Q^k}` whose
/// full elimination would need every instance below `Q^k`.
fn greedy(inst: &Instances, g: &SparsePoly, cutoff: u64) -> Result<Option<MemberCert>> {
    let f = inst.field;
    let mut r = g.clone();
    let mut steps = Vec::new();
    while let Some((e, c)) = r.min_term().map(|(e, c)| (as_small(e), c)) {
        if e > cutoff {
            return Ok(None);
        }
        let candidates = inst.with_min(e)?;
        let Some((si, params, poly)) = candidates.into_iter().find(|(_, _, p)| p.min_exp().map(as_small) == Some(e))
        else {
            return Ok(None);
        };
        let lead = poly.min_term().expect("nonzero").1;
        let s = f.div(c, lead)?;
        r.add_scaled(f, f.neg(s), &poly);
        steps.push(inst.step(si, &params, s));
    }
    Ok(Some(MemberCert { steps }))
}

fn eliminate(inst: &Instances, g: &SparsePoly, cutoff: u64) -> Result<MembershipVerdict> {
    let f = inst.field;
    // Only instances with minimal exponent <= cutoff are enumerated, but
    // every row is kept: back-reduction can move high terms into low rows,
    // and clearing them needs the high pivots.
    let mut basis = EchelonBasis::unbounded(f);
    let mut seen: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut upto = 0u64;
    let mut r = g.clone();
    let mut used = Vec::new();
    let certify = |basis: &EchelonBasis, used: &[_], seen: &[(usize, Vec<u64>)]| -> Vec<CertStep> {
        basis.expand(used).into_iter().map(|(k, c)| inst.step(seen[k].0, &seen[k].1, c)).collect()
    };
    loop {
        let Some((e, c)) = r.min_term().map(|(e, c)| (e.clone(), c)) else {
            return Ok(MembershipVerdict::Member(MemberCert { steps: certify(&basis, &used, &seen) }));
        };
        let small = as_small(&e);
        while upto < small.min(cutoff) {
            upto += 1;
            for (si, params, poly) in inst.with_min(upto)? {
                basis.insert(&poly);
                seen.push((si, params));
            }
        }
        match basis.pivot_row(&e) {
            Some((row, handle)) => {
                r.add_scaled(f, f.neg(c), row);
                used.push((handle, c));
            }
            None if small > cutoff => return Ok(MembershipVerdict::Unknown(cutoff)),
            None => {
                let trail = certify(&basis, &used, &seen);
                return Ok(MembershipVerdict::NonMember(NonMemberWitness::PivotGap { exponent: e, trail }));
            }
        }
    }
}

/// Evaluates a certificate's sum given a way to materialize each source.
pub fn replay_sum(
    field: &FieldSpec,
    steps: &[CertStep],
    materialize: &mut dyn FnMut(&Source) -> Result<SparsePoly>,
) -> Result<SparsePoly> {
    let mut acc = SparsePoly::zero(Ambient::Nonunitary);
    for step in steps {
        let poly = materialize(&step.source)?;
        acc.add_scaled(field, step.scalar, &poly);
    }
    Ok(acc)
}

/// Materializes schema sources from a schema list by id.
pub fn schema_source<'a>(
    field: &'a FieldSpec,
    schemas: &'a [GeneratorSchema],
) -> impl FnMut(&Source) -> Result<SparsePoly> + 'a {
    move |src| match src {
        Source::Schema { schema, params } => {
            let s = schemas.iter().find(|s| &s.id == schema).ok_or_else(|| Error::UnknownLabel(schema.clone()))?;
            s.instantiate_named(field, params)
        }
        Source::Generator { generator, .. } => Err(Error::UnknownLabel(generator.clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linspan::schema::{ExpForm, SchemaTerm};
    use num_bigint::BigUint;

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn w_schemas(f: &FieldSpec, n: u32) -> Vec<GeneratorSchema> {
        let q = f.q() as u64;
        let qn = q.pow(n);
        vec![
            GeneratorSchema::monomial_multiples("e", f, &[b(1), b(q)]),
            GeneratorSchema::monomial_multiples("f", f, &[b(qn + 1)]),
            GeneratorSchema::new(
                "g",
                vec!["i".into(), "j".into()],
                vec![(0, 1)],
                vec![
                    SchemaTerm { coef: f.one(), form: ExpForm::new(0u32, vec![b(qn), b(1)]) },
                    SchemaTerm { coef: f.one(), form: ExpForm::new(0u32, vec![b(1), b(qn)]) },
                ],
            )
            .unwrap(),
        ]
    }

    fn replays(f: &FieldSpec, schemas: &[GeneratorSchema], cert: &MemberCert, target: &SparsePoly) {
        let mut src = schema_source(f, schemas);
        assert_eq!(&replay_sum(f, &cert.steps, &mut src).unwrap(), target);
    }

    #[test]
    fn w1_examples() {
        let f = FieldSpec::with_order(2).unwrap();
        let w1 = w_schemas(&f, 1);
        for exps in [&[4u64, 5][..], &[3], &[6], &[10, 7]] {
            let g = SparsePoly::from_exponents(&f, exps);
            match decide_membership(&f, &g, &w1, 16).unwrap() {
                MembershipVerdict::Member(cert) => replays(&f, &w1, &cert, &g),
                other => panic!("{exps:?}: {other:?}"),
            }
        }
        let x = SparsePoly::x();
        assert_eq!(decide_membership(&f, &x, &w1, 16).unwrap(), MembershipVerdict::Unknown(16));
    }

    #[test]
    fn elimination_without_greedy() {
        let f = FieldSpec::with_order(2).unwrap();
        let w1 = w_schemas(&f, 1);
        let inst = Instances { field: &f, schemas: &w1 };
        let g = SparsePoly::from_exponents(&f, &[4, 5]);
        match eliminate(&inst, &g, 16).unwrap() {
            MembershipVerdict::Member(cert) => replays(&f, &w1, &cert, &g),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn v0_chase_escapes() {
        let f = FieldSpec::with_order(3).unwrap();
        let v0 = vec![GeneratorSchema::monomial_multiples("v", &f, &[b(1), b(3)])];
        let verdict = decide_membership(&f, &SparsePoly::x(), &v0, 100).unwrap();
        assert_eq!(verdict, MembershipVerdict::Unknown(100));
    }

    #[test]
    fn pivot_gap_when_nothing_starts_low() {
        let f = FieldSpec::with_order(2).unwrap();
        let piz = vec![GeneratorSchema::new(
            "s",
            vec!["i".into()],
            vec![],
            vec![SchemaTerm { coef: f.one(), form: ExpForm::new(1u32, vec![b(1)]) }],
        )
        .unwrap()];
        let g = SparsePoly::from_exponents(&f, &[1, 2]);
        match decide_membership(&f, &g, &piz, 10).unwrap() {
            MembershipVerdict::NonMember(NonMemberWitness::PivotGap { exponent, .. }) => {
                assert_eq!(exponent, Exp::from(1u32))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn x_minus_far_frobenius_power_in_v() {
        let f = FieldSpec::with_order(5).unwrap();
        let q2 = 25u64;
        let v1 = vec![GeneratorSchema::monomial_multiples("v", &f, &[b(1), b(q2)])];
        let far = b(q2).pow(4);
        let target = SparsePoly::from_terms(
            &f,
            [(Exp::from(1u32), f.one()), (far.clone(), f.neg(f.one()))],
            Ambient::Nonunitary,
        )
        .unwrap();
        match decide_membership(&f, &target, &v1, far.to_u64().unwrap()).unwrap() {
            MembershipVerdict::Member(cert) => {
                assert_eq!(cert.steps.len(), 4);
                replays(&f, &v1, &cert, &target);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_constant_terms() {
        let f = FieldSpec::with_order(2).unwrap();
        let g = SparsePoly::parse(&f, "1 + x", Ambient::Unitary).unwrap();
        assert_eq!(decide_membership(&f, &g, &w_schemas(&f, 1), 8), Err(Error::AmbientViolation));
    }
}
