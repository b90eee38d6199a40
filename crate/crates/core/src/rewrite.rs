//! Canonical forms modulo `W_1` and `W_2` over GF(2).
//!
//! Every rule rewrites a single monomial `x^e` to `x^t` with `t < e` (or
//! drops it), and comes with an explicit combination of spanning-set
//! instances summing to `x^e + x^t`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::families::{Family, TSpaceDesc};
use crate::gf::FieldSpec;
use crate::linspan::{check_verdict, decide_membership, CertStep, MemberCert, MembershipVerdict, Source};
use crate::poly::{Ambient, SparsePoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    W1,
    W2,
}

impl Target {
    pub fn parse(name: &str) -> Result<Target> {
        match name.trim() {
            "W1" | "W:1" => Ok(Target::W1),
            "W2" | "W:2" => Ok(Target::W2),
            other => Err(Error::BadParams(format!("no rewrite system for `{other}` (use W1 or W2)"))),
        }
    }

    pub fn n(self) -> u32 {
        match self {
            Target::W1 => 1,
            Target::W2 => 2,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{}", self.n())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Guard {
    Even,
    Multiple(u64),
    OneOf(Vec<u64>),
    OddAtLeast(u64),
}

impl Guard {
    pub fn matches(&self, e: u64) -> bool {
        match self {
            Guard::Even => e.is_multiple_of(2),
            Guard::Multiple(k) => e.is_multiple_of(*k),
            Guard::OneOf(set) => set.contains(&e),
            Guard::OddAtLeast(lo) => e % 2 == 1 && e >= *lo,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Image {
    Half,
    Drop,
    Fixed(u64),
    Minus(u64),
    /// `i + 4j -> 4i + j` with `i = e mod 4`.
    SwapQuarter,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub guard: Guard,
    pub image: Image,
}

impl RewriteRule {
    /// `None` drops the term.
    pub fn apply(&self, e: u64) -> Option<u64> {
        match self.image {
            Image::Half => Some(e / 2),
            Image::Drop => None,
            Image::Fixed(t) => Some(t),
            Image::Minus(d) => Some(e - d),
            Image::SwapQuarter => {
                let i = e % 4;
                Some(4 * i + (e - i) / 4)
            }
        }
    }
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let guard = match &self.guard {
            Guard::Even => "e even".to_string(),
            Guard::Multiple(k) => format!("e = 0 mod {k}"),
            Guard::OneOf(set) => format!("e in {set:?}"),
            Guard::OddAtLeast(lo) => format!("e odd, e >= {lo}"),
        };
        let image = match self.image {
            Image::Half => "e/2".to_string(),
            Image::Drop => "drop".to_string(),
            Image::Fixed(t) => t.to_string(),
            Image::Minus(d) => format!("e - {d}"),
            Image::SwapQuarter => "4i + j where e = i + 4j".to_string(),
        };
        write!(f, "{guard} -> {image}")
    }
}

/// A canonical representative and a certificate that `f - canonical`
/// lies in the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub canonical: SparsePoly,
    pub cert: MemberCert,
}

#[derive(Clone, Debug)]
pub struct RewriteSystem {
    target: Target,
    field: FieldSpec,
    space: TSpaceDesc,
    rules: Vec<RewriteRule>,
    canonical: Vec<u64>,
}

fn rule(guard: Guard, image: Image) -> RewriteRule {
    RewriteRule { guard, image }
}

pub fn build_rules(f: &FieldSpec, target: Target) -> Result<RewriteSystem> {
    if f.q() != 2 {
        return Err(Error::BadCharacteristic { family: target.to_string(), need: 2, have: f.p() });
    }
    let space = TSpaceDesc::build(f, &Family::W(target.n()))?;
    let (rules, canonical) = match target {
        Target::W1 => (
            vec![
                rule(Guard::Even, Image::Half),
                rule(Guard::Multiple(3), Image::Drop),
                rule(Guard::OneOf(vec![5]), Image::Fixed(4)),
                rule(Guard::OddAtLeast(7), Image::Minus(3)),
            ],
            vec![1],
        ),
        Target::W2 => (
            vec![
                rule(Guard::Even, Image::Half),
                rule(Guard::Multiple(5), Image::Drop),
                rule(Guard::OneOf(vec![9]), Image::Fixed(3)),
                rule(Guard::OneOf(vec![11, 13]), Image::Fixed(7)),
                rule(Guard::OddAtLeast(17), Image::SwapQuarter),
            ],
            vec![1, 3, 7],
        ),
    };
    Ok(RewriteSystem { target, field: f.clone(), space, rules, canonical })
}

impl RewriteSystem {
    pub fn target(&self) -> Target {
        self.target
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn space(&self) -> &TSpaceDesc {
        &self.space
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    /// Exponents of the canonical monomials.
    pub fn canonical_exponents(&self) -> &[u64] {
        &self.canonical
    }

    /// The first rule whose guard matches `e`.
    pub fn rule_for(&self, e: u64) -> Option<&RewriteRule> {
        self.rules.iter().find(|r| r.guard.matches(e))
    }

    /// `x^e + x^{image}`, or `x^e` when the rule drops the term.
    pub fn rule_element(&self, rule: &RewriteRule, e: u64) -> SparsePoly {
        match rule.apply(e) {
            Some(t) => SparsePoly::from_exponents(&self.field, &[e, t]),
            None => SparsePoly::x_pow(e),
        }
    }

    fn step(&self, schema: &str, params: &[u64]) -> CertStep {
        let id = format!("{}/{schema}", Family::W(self.target.n()));
        let s = self.space.schemas().iter().find(|s| s.id == id).expect("W schemas are present");
        CertStep { source: Source::Schema { schema: id, params: s.named(params) }, scalar: self.field.one() }
    }

    /// The pair instance `x^{Qi+j} + x^{i+Qj}`, `i > j`, with exponents `{a, b}`.
    fn pair(&self, a: u64, b: u64) -> Option<CertStep> {
        let qq = 1u64 << self.target.n();
        let d = qq * qq - 1;
        [(a, b), (b, a)].into_iter().find_map(|(a, b)| {
            let (ni, nj) = (qq.checked_mul(a)?.checked_sub(b)?, qq.checked_mul(b)?.checked_sub(a)?);
            let (i, j) = (ni / d, nj / d);
            (ni % d == 0 && nj % d == 0 && i > j && j >= 1).then(|| self.step("g", &[i, j]))
        })
    }

    /// Explicit certificate for the rule element at `e`.
    pub fn rule_certificate(&self, rule: &RewriteRule, e: u64) -> Result<MemberCert> {
        let qn1 = if self.target == Target::W1 { 3 } else { 5 };
        let steps = match rule.apply(e) {
            None if e.is_multiple_of(qn1) => vec![self.step("f", &[e / qn1])],
            None => return Err(Error::UnsoundRule(e)),
            Some(t) if t * 2 == e => vec![self.step("e", &[t])],
            Some(t) => match self.pair(e, t) {
                Some(s) => vec![s],
                None => {
                    let s = self.pair(e, 2 * t).ok_or(Error::UnsoundRule(e))?;
                    vec![s, self.step("e", &[t])]
                }
            },
        };
        Ok(MemberCert { steps })
    }

    fn check_input(&self, f: &SparsePoly) -> Result<BTreeMap<u64, ()>> {
        if !f.constant_term().is_zero() {
            return Err(Error::AmbientViolation);
        }
        let mut pending = BTreeMap::new();
        for (e, _) in f.terms() {
            let e = e.to_u64().ok_or_else(|| Error::BadParams(format!("exponent {e} too large to rewrite")))?;
            pending.insert(e, ());
        }
        Ok(pending)
    }

    /// Rewrites the largest non-canonical exponent until none is left.
    pub fn reduce_canonical(&self, f: &SparsePoly) -> Result<Reduction> {
        let mut pending = self.check_input(f)?;
        let mut steps = Vec::new();
        let mut canonical = Vec::new();
        while let Some((e, ())) = pending.pop_last() {
            if self.canonical.contains(&e) {
                canonical.push(e);
                continue;
            }
            let rule = self.rule_for(e).ok_or(Error::UnsoundRule(e))?;
            steps.extend(self.rule_certificate(rule, e)?.steps);
            if let Some(t) = rule.apply(e) {
                toggle(&mut pending, t);
            }
        }
        Ok(Reduction { canonical: SparsePoly::from_exponents(&self.field, &canonical), cert: MemberCert { steps } })
    }

    /// Like [`reduce_canonical`](Self::reduce_canonical), but picks the
    /// exponent and the applicable rule at random at every step.
    pub fn reduce_shuffled<R: Rng>(&self, f: &SparsePoly, rng: &mut R) -> Result<Reduction> {
        let mut pending = self.check_input(f)?;
        let mut steps = Vec::new();
        let mut canonical = BTreeMap::new();
        loop {
            let keys: Vec<u64> = pending.keys().copied().collect();
            let Some(&e) = keys.choose(rng) else { break };
            pending.remove(&e);
            if self.canonical.contains(&e) {
                toggle(&mut canonical, e);
                continue;
            }
            let matching: Vec<&RewriteRule> = self.rules.iter().filter(|r| r.guard.matches(e)).collect();
            let rule = *matching.choose(rng).ok_or(Error::UnsoundRule(e))?;
            steps.extend(self.rule_certificate(rule, e)?.steps);
            if let Some(t) = rule.apply(e) {
                toggle(&mut pending, t);
            }
        }
        let exps: Vec<u64> = canonical.into_keys().collect();
        Ok(Reduction { canonical: SparsePoly::from_exponents(&self.field, &exps), cert: MemberCert { steps } })
    }

    /// `f - canonical(f)`, the element certified by a reduction.
    pub fn difference(&self, f: &SparsePoly, red: &Reduction) -> Result<SparsePoly> {
        f.clone().with_ambient(Ambient::Nonunitary)?.sub(&self.field, &red.canonical)
    }

    /// Whether `f` lies in the target: it does iff its canonical form is zero.
    pub fn is_member(&self, f: &SparsePoly) -> Result<bool> {
        Ok(self.reduce_canonical(f)?.canonical.is_zero())
    }

    /// For each `e <= bound` some rule matches, rederives membership of the
    /// rule element by elimination and checks the result.
    pub fn certify_rules(&self, bound: u64) -> Result<Vec<MemberCert>> {
        let view = self.space.view();
        (1..=bound)
            .into_par_iter()
            .filter_map(|e| self.rule_for(e).map(|r| (e, r)))
            .map(|(e, rule)| {
                let elem = self.rule_element(rule, e);
                let verdict = decide_membership(&self.field, &elem, self.space.schemas(), 2 * e)?;
                if check_verdict(&self.field, &view, &elem, &verdict, e).is_err() {
                    return Err(Error::UnsoundRule(e));
                }
                match verdict {
                    MembershipVerdict::Member(cert) => Ok(cert),
                    _ => Err(Error::UnsoundRule(e)),
                }
            })
            .collect()
    }
}

fn toggle(set: &mut BTreeMap<u64, ()>, e: u64) {
    if set.remove(&e).is_none() {
        set.insert(e, ());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linspan::truncated_closure;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf2() -> FieldSpec {
        FieldSpec::with_order(2).unwrap()
    }

    fn chain(sys: &RewriteSystem, mut e: u64) -> Vec<Option<u64>> {
        let mut out = vec![Some(e)];
        while !sys.canonical_exponents().contains(&e) {
            match sys.rule_for(e).unwrap().apply(e) {
                Some(t) => {
                    out.push(Some(t));
                    e = t;
                }
                None => {
                    out.push(None);
                    break;
                }
            }
        }
        out
    }

    #[test]
    fn needs_gf2() {
        let f = FieldSpec::with_order(4).unwrap();
        assert!(matches!(build_rules(&f, Target::W1), Err(Error::BadCharacteristic { .. })));
    }

    #[test]
    fn documented_chains() {
        let f = gf2();
        let w1 = build_rules(&f, Target::W1).unwrap();
        let w2 = build_rules(&f, Target::W2).unwrap();
        assert_eq!(chain(&w1, 6), vec![Some(6), Some(3), None]);
        assert_eq!(chain(&w1, 5), vec![Some(5), Some(4), Some(2), Some(1)]);
        assert_eq!(chain(&w2, 13), vec![Some(13), Some(7)]);
        assert_eq!(chain(&w2, 9), vec![Some(9), Some(3)]);
        assert_eq!(chain(&w2, 21), vec![Some(21), Some(9), Some(3)]);
    }

    #[test]
    fn reductions() {
        let f = gf2();
        let w1 = build_rules(&f, Target::W1).unwrap();
        let w2 = build_rules(&f, Target::W2).unwrap();
        assert!(w1.reduce_canonical(&SparsePoly::from_exponents(&f, &[4, 5])).unwrap().canonical.is_zero());
        assert_eq!(w1.reduce_canonical(&SparsePoly::x()).unwrap().canonical, SparsePoly::x());
        let g = SparsePoly::from_exponents(&f, &[1, 9, 21]);
        assert_eq!(w2.reduce_canonical(&g).unwrap().canonical, SparsePoly::x());
    }

    #[test]
    fn every_monomial_certificate_checks() {
        let f = gf2();
        for target in [Target::W1, Target::W2] {
            let sys = build_rules(&f, target).unwrap();
            let view = sys.space().view();
            (1..=2048u64).into_par_iter().for_each(|e| {
                let g = SparsePoly::x_pow(e);
                let red = sys.reduce_canonical(&g).unwrap();
                let diff = sys.difference(&g, &red).unwrap();
                check_verdict(&f, &view, &diff, &MembershipVerdict::Member(red.cert), 0)
                    .unwrap_or_else(|err| panic!("{target} x^{e}: {err}"));
            });
        }
    }

    #[test]
    fn every_rule_certificate_checks() {
        let f = gf2();
        for target in [Target::W1, Target::W2] {
            let sys = build_rules(&f, target).unwrap();
            let view = sys.space().view();
            for e in 1..=300u64 {
                for rule in sys.rules().iter().filter(|r| r.guard.matches(e)) {
                    let cert = sys.rule_certificate(rule, e).unwrap();
                    let elem = sys.rule_element(rule, e);
                    check_verdict(&f, &view, &elem, &MembershipVerdict::Member(cert), 0)
                        .unwrap_or_else(|err| panic!("{target} {rule} at {e}: {err}"));
                }
            }
        }
    }

    #[test]
    fn certify_small_bounds() {
        let f = gf2();
        let w1 = build_rules(&f, Target::W1).unwrap();
        assert_eq!(w1.certify_rules(32).unwrap().len(), 31);
        let w2 = build_rules(&f, Target::W2).unwrap();
        assert_eq!(w2.certify_rules(32).unwrap().len(), 29);
    }

    #[test]
    fn shuffled_orders_agree() {
        let f = gf2();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for target in [Target::W1, Target::W2] {
            let sys = build_rules(&f, target).unwrap();
            for _ in 0..1000 {
                let exps: Vec<u64> = (1..=64).filter(|_| rng.gen_bool(0.3)).collect();
                let g = SparsePoly::from_exponents(&f, &exps);
                let a = sys.reduce_canonical(&g).unwrap();
                let b = sys.reduce_shuffled(&g, &mut rng).unwrap();
                assert_eq!(a.canonical, b.canonical, "{target} {exps:?}");
            }
        }
    }

    #[test]
    fn w1_quotient_matches_oracle() {
        let f = gf2();
        let sys = build_rules(&f, Target::W1).unwrap();
        let gens = [SparsePoly::from_exponents(&f, &[1, 2]), SparsePoly::x_pow(3u32)];
        let closure = truncated_closure(&f, &gens, 11, Ambient::Nonunitary).unwrap();
        assert_eq!(closure.dim(), 10);
        for mask in 0u32..1 << 11 {
            let exps: Vec<u64> = (0..11).filter(|k| mask >> k & 1 == 1).map(|k| k as u64 + 1).collect();
            let g = SparsePoly::from_exponents(&f, &exps);
            let c = sys.reduce_canonical(&g).unwrap().canonical;
            assert!(c.is_zero() || c == SparsePoly::x());
            assert_eq!(c.is_zero(), closure.contains(&f, &g), "{exps:?}");
        }
    }
}
