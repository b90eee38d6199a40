//! Exact membership for W0 (divisibility by `x^q - x`) and for `x^2 k[x]`.

use num_traits::{One, ToPrimitive};

use crate::error::Result;
use crate::gf::FieldSpec;
use crate::linspan::{
    CertStep, GeneratorSchema, MemberCert, MembershipVerdict, NonMemberWitness, PeriodicFunctional, Source,
};
use crate::poly::{fold_exponent, Exp, SparsePoly};

/// Largest certificate [`decide_w0`] writes out.
pub const MAX_W0_STEPS: u64 = 100_000;

/// Whether `x^q - x` divides `g`.
pub fn w0_membership(f: &FieldSpec, g: &SparsePoly) -> bool {
    g.rem_frobenius_modulus(f).is_zero()
}

/// Whether the coefficient of `x` vanishes.
pub fn piz_membership(_f: &FieldSpec, g: &SparsePoly) -> bool {
    g.coeff(&Exp::one()).is_zero()
}

/// Decides W0 membership. Members get the certificate
/// `c x^e = c sum_k (x^{j_k + q - 1} - x^{j_k}) + c x^{fold(e)}` read off
/// term by term; non-members get the functional `x^e -> a^e` for a root
/// `a` with `g(a) != 0`.
pub fn decide_w0(f: &FieldSpec, schema: &GeneratorSchema, g: &SparsePoly) -> Result<MembershipVerdict> {
    let q = f.q() as u64;
    if !w0_membership(f, g) {
        let a = f
            .nonzero_elements()
            .find(|&a| !g.evaluate(f, a).is_zero())
            .expect("a nonzero remainder of degree < q has a nonzero root value");
        let period = (q - 1).max(2);
        let weights = (0..period).map(|r| f.pow_u64(a, r)).collect();
        return Ok(MembershipVerdict::NonMember(NonMemberWitness::Functional(PeriodicFunctional { period, weights })));
    }
    let mut total = 0u64;
    for (e, _) in g.terms() {
        let Some(e) = e.to_u64() else { return Ok(MembershipVerdict::Unknown(MAX_W0_STEPS)) };
        total += (e - fold_exponent(&Exp::from(e), f.q())) / (q - 1);
        if total > MAX_W0_STEPS {
            return Ok(MembershipVerdict::Unknown(MAX_W0_STEPS));
        }
    }
    let mut steps = Vec::new();
    for (e, c) in g.terms() {
        let mut top = e.to_u64().expect("checked above");
        let low = fold_exponent(e, f.q());
        while top > low {
            let j = top - (q - 1);
            steps.push(CertStep {
                source: Source::Schema { schema: schema.id.clone(), params: schema.named(&[j]) },
                scalar: c,
            });
            top = j;
        }
    }
    Ok(MembershipVerdict::Member(MemberCert { steps }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{Family, TSpaceDesc};
    use crate::linspan::check_verdict;
    use crate::poly::Ambient;

    #[test]
    fn generator_is_member() {
        let f = FieldSpec::with_order(2).unwrap();
        assert!(w0_membership(&f, &SparsePoly::from_exponents(&f, &[1, 2])));
        let f3 = FieldSpec::with_order(3).unwrap();
        assert!(!w0_membership(&f3, &SparsePoly::x_pow(2u32)));
    }

    #[test]
    fn certificates_check() {
        let f = FieldSpec::with_order(3).unwrap();
        let w0 = TSpaceDesc::build(&f, &Family::W0).unwrap();
        let member = SparsePoly::parse(&f, "x^2 + 2*x^4 + x^5 + 2*x^7", Ambient::Nonunitary).unwrap();
        let outside = SparsePoly::parse(&f, "x + x^2", Ambient::Nonunitary).unwrap();
        for g in [member, outside] {
            let v = w0.decide(&g, 10).unwrap();
            assert_eq!(v.is_member(), w0_membership(&f, &g));
            check_verdict(&f, &w0.view(), &g, &v, 1).unwrap();
        }
    }

    #[test]
    fn q2_uses_period_two() {
        let f = FieldSpec::with_order(2).unwrap();
        let w0 = TSpaceDesc::build(&f, &Family::W0).unwrap();
        let v = w0.decide(&SparsePoly::x(), 10).unwrap();
        check_verdict(&f, &w0.view(), &SparsePoly::x(), &v, 1).unwrap();
    }
}
