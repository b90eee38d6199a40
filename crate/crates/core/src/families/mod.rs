//! The named T-spaces and their sums.

mod escalation;
mod special;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::linspan::schema::SchemaJson;
use crate::linspan::{
    decide_membership, solve_periodic_functional, ExpForm, GeneratorSchema, MembershipVerdict, NonMemberWitness,
    SchemaTerm, SpaceView,
};
use crate::poly::{Ambient, SparsePoly};

pub use escalation::{power_escalation, verify_escalation, EscalationStep, StepKind};
pub use special::{decide_w0, piz_membership, w0_membership};

/// Periods always tried when looking for a separating functional.
const SMALL_PERIODS: std::ops::RangeInclusive<u64> = 2..=12;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `{x + x^{q^{2^n}}}^S`.
    V(u32),
    /// `{x + x^q, x^{q^n + 1}}^S`, characteristic 2, `n >= 1`.
    W(u32),
    /// The T-ideal generated by `x - x^q`.
    W0,
    /// `x^2 k[x]`.
    PiZ,
    /// `{x + x^2, x^7}^S` over GF(2).
    P,
    /// Loaded from a file.
    Custom(String),
}

impl Family {
    /// Parses `V:n`, `W:n`, `W0`, `PiZ`, `P`.
    pub fn parse(name: &str) -> Result<Family> {
        let bad = || Error::BadParams(format!("unknown family `{name}`"));
        let index = |s: &str| s.parse::<u32>().map_err(|_| bad());
        match name {
            "W0" => Ok(Family::W0),
            "PiZ" => Ok(Family::PiZ),
            "P" => Ok(Family::P),
            _ => {
                if let Some(n) = name.strip_prefix("V:") {
                    Ok(Family::V(index(n)?))
                } else if let Some(n) = name.strip_prefix("W:") {
                    Ok(Family::W(index(n)?))
                } else if let Some(path) = name.strip_prefix("custom:") {
                    Ok(Family::Custom(path.to_string()))
                } else {
                    Err(bad())
                }
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::V(n) => write!(f, "V:{n}"),
            Family::W(n) => write!(f, "W:{n}"),
            Family::W0 => write!(f, "W0"),
            Family::PiZ => write!(f, "PiZ"),
            Family::P => write!(f, "P"),
            Family::Custom(name) => write!(f, "custom:{name}"),
        }
    }
}

/// One summand of a space: a named family with its spanning schemas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpacePart {
    pub family: Family,
    /// Schema ids are qualified as `family/id`.
    pub schemas: Vec<GeneratorSchema>,
    /// Defining generators, keyed `family/name`.
    pub generators: BTreeMap<String, SparsePoly>,
    /// Whether the schemas span the whole part.
    pub complete: bool,
}

/// File format for custom spaces.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct CustomSpaceJson {
    #[serde(default)]
    pub schemas: Vec<SchemaJson>,
    /// Generators in text form; their T-space is approximated by monomial
    /// substitutions, so spaces with generators are never complete.
    #[serde(default)]
    pub generators: Vec<String>,
}

/// A T-space of `k[x]_0` given as a sum of parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TSpaceDesc {
    field: FieldSpec,
    parts: Vec<SpacePart>,
    schemas: Vec<GeneratorSchema>,
    generators: BTreeMap<String, SparsePoly>,
}

fn b(n: u64) -> BigUint {
    BigUint::from(n)
}

fn pair_term(f: &FieldSpec, a: BigUint, c: BigUint) -> SchemaTerm {
    SchemaTerm { coef: f.one(), form: ExpForm::new(0u32, vec![a, c]) }
}

fn need_char2(f: &FieldSpec, family: &str) -> Result<()> {
    if f.p() != 2 {
        return Err(Error::BadCharacteristic { family: family.into(), need: 2, have: f.p() });
    }
    Ok(())
}

fn poly(f: &FieldSpec, text: &str) -> SparsePoly {
    SparsePoly::parse(f, text, Ambient::Nonunitary).expect("well-formed generator")
}

/// `q^{2^n}`.
pub fn v_exponent(f: &FieldSpec, n: u32) -> BigUint {
    b(f.q() as u64).pow(1u32 << n)
}

/// The spanning schemas of `W_n`: `x^i + x^{qi}`, `x^{(q^n+1)i}` and
/// `x^{q^n i + j} + x^{i + q^n j}` for `i > j`.
pub fn w_schemas(f: &FieldSpec, n: u32) -> Vec<GeneratorSchema> {
    let q = b(f.q() as u64);
    let qn = q.pow(n);
    vec![
        GeneratorSchema::monomial_multiples("e", f, &[b(1), q]),
        GeneratorSchema::monomial_multiples("f", f, &[&qn + 1u32]),
        GeneratorSchema::new(
            "g",
            vec!["i".into(), "j".into()],
            vec![(0, 1)],
            vec![pair_term(f, qn.clone(), b(1)), pair_term(f, b(1), qn)],
        )
        .expect("well-formed"),
    ]
}

/// Spanning schemas of `{x + x^2, x^7}^S` over GF(2). Since `7 = 1 + 2 + 4`,
/// `(x^a + x^b + x^c)^7 = sum x^{alpha + 2 beta + 4 gamma}` over letters
/// from `{a, b, c}`; grouping by the letters used gives `x^{7i}`, the
/// six-term pair sums and the six-term triple sums.
pub fn p_schemas(f: &FieldSpec) -> Vec<GeneratorSchema> {
    let pair = (1..=6u64).map(|k| pair_term(f, b(k), b(7 - k))).collect();
    let perms = [[1, 2, 4], [1, 4, 2], [2, 1, 4], [2, 4, 1], [4, 1, 2], [4, 2, 1]];
    let triple = perms
        .iter()
        .map(|w| SchemaTerm { coef: f.one(), form: ExpForm::new(0u32, w.iter().map(|&k| b(k)).collect()) })
        .collect();
    vec![
        GeneratorSchema::monomial_multiples("e", f, &[b(1), b(2)]),
        GeneratorSchema::monomial_multiples("h", f, &[b(7)]),
        GeneratorSchema::new("pair", vec!["i".into(), "j".into()], vec![(0, 1)], pair).expect("well-formed"),
        GeneratorSchema::new("triple", vec!["a".into(), "b".into(), "c".into()], vec![(0, 1), (1, 2)], triple)
            .expect("well-formed"),
    ]
}

impl SpacePart {
    fn new(family: Family, schemas: Vec<GeneratorSchema>, gens: Vec<SparsePoly>, complete: bool) -> SpacePart {
        let name = family.to_string();
        let schemas = schemas.iter().map(|s| s.qualified(&name)).collect();
        let generators = gens.into_iter().enumerate().map(|(k, g)| (format!("{name}/gen{}", k + 1), g)).collect();
        SpacePart { family, schemas, generators, complete }
    }

    pub fn build(f: &FieldSpec, family: &Family) -> Result<SpacePart> {
        let q = f.q() as u64;
        match family {
            Family::V(n) => {
                if *n > 6 {
                    return Err(Error::BadParams(format!("V:{n} exponent too large")));
                }
                let big = v_exponent(f, *n);
                let gen = SparsePoly::from_terms(f, [(b(1), f.one()), (big.clone(), f.one())], Ambient::Nonunitary)?;
                let s = GeneratorSchema::monomial_multiples("v", f, &[b(1), big]);
                Ok(SpacePart::new(family.clone(), vec![s], vec![gen], true))
            }
            Family::W(n) => {
                need_char2(f, "W")?;
                if *n == 0 || *n > 16 {
                    return Err(Error::BadParams(format!("W:{n} needs 1 <= n <= 16")));
                }
                let qn1 = b(q).pow(*n) + 1u32;
                let gens = vec![
                    SparsePoly::from_exponents(f, &[1, q]),
                    SparsePoly::from_terms(f, [(qn1, f.one())], Ambient::Nonunitary)?,
                ];
                Ok(SpacePart::new(family.clone(), w_schemas(f, *n), gens, true))
            }
            Family::W0 => {
                let s = GeneratorSchema::new(
                    "s",
                    vec!["j".into()],
                    vec![],
                    vec![
                        SchemaTerm { coef: f.one(), form: ExpForm::new(q - 1, vec![b(1)]) },
                        SchemaTerm { coef: f.neg(f.one()), form: ExpForm::new(0u32, vec![b(1)]) },
                    ],
                )?;
                let gen = SparsePoly::from_terms(f, [(b(1), f.one()), (b(q), f.neg(f.one()))], Ambient::Nonunitary)?;
                Ok(SpacePart::new(Family::W0, vec![s], vec![gen], true))
            }
            Family::PiZ => {
                let s = GeneratorSchema::new(
                    "s",
                    vec!["i".into()],
                    vec![],
                    vec![SchemaTerm { coef: f.one(), form: ExpForm::new(1u32, vec![b(1)]) }],
                )?;
                Ok(SpacePart::new(Family::PiZ, vec![s], vec![poly(f, "x^2")], true))
            }
            Family::P => {
                if q != 2 {
                    return Err(Error::BadParams("P is defined over GF(2) only".into()));
                }
                let gens = vec![poly(f, "x + x^2"), poly(f, "x^7")];
                Ok(SpacePart::new(Family::P, p_schemas(f), gens, true))
            }
            Family::Custom(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
                let json: CustomSpaceJson =
                    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
                SpacePart::custom(f, path, &json)
            }
        }
    }

    pub fn custom(f: &FieldSpec, name: &str, json: &CustomSpaceJson) -> Result<SpacePart> {
        let mut schemas = json.schemas.iter().map(|s| GeneratorSchema::from_json(f, s)).collect::<Result<Vec<_>>>()?;
        let mut gens = Vec::new();
        for (k, text) in json.generators.iter().enumerate() {
            let g = SparsePoly::parse(f, text, Ambient::Nonunitary)?;
            schemas.push(GeneratorSchema::monomial_images(&format!("gen{}", k + 1), &g)?);
            gens.push(g);
        }
        if schemas.is_empty() {
            return Err(Error::BadParams(format!("custom space `{name}` is empty")));
        }
        let complete = gens.is_empty();
        Ok(SpacePart::new(Family::Custom(name.to_string()), schemas, gens, complete))
    }

    /// Periods tried for separating functionals, most specific first.
    fn periods(&self, f: &FieldSpec) -> Vec<u64> {
        let q = f.q() as u64;
        match &self.family {
            Family::V(n) => v_exponent(f, *n).to_string().parse::<u64>().ok().map(|e| e + 1).into_iter().collect(),
            Family::W(n) => q.checked_pow(*n).map(|e| e + 1).into_iter().collect(),
            Family::W0 => vec![(q - 1).max(2)],
            _ => Vec::new(),
        }
    }
}

impl TSpaceDesc {
    pub fn from_parts(f: &FieldSpec, parts: Vec<SpacePart>) -> TSpaceDesc {
        let mut dedup: Vec<SpacePart> = Vec::new();
        for p in parts {
            if !dedup.iter().any(|d| d.family == p.family) {
                dedup.push(p);
            }
        }
        let schemas = dedup.iter().flat_map(|p| p.schemas.iter().cloned()).collect();
        let generators = dedup.iter().flat_map(|p| p.generators.clone()).collect();
        TSpaceDesc { field: f.clone(), parts: dedup, schemas, generators }
    }

    pub fn build(f: &FieldSpec, family: &Family) -> Result<TSpaceDesc> {
        Ok(TSpaceDesc::from_parts(f, vec![SpacePart::build(f, family)?]))
    }

    /// Parses `V:0,V:1` or `V:0+V:1` into the sum of the named families.
    pub fn parse(f: &FieldSpec, names: &str) -> Result<TSpaceDesc> {
        let parts = names
            .split([',', '+'])
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| SpacePart::build(f, &Family::parse(s)?))
            .collect::<Result<Vec<_>>>()?;
        if parts.is_empty() {
            return Err(Error::BadParams("no space given".into()));
        }
        Ok(TSpaceDesc::from_parts(f, parts))
    }

    pub fn sum(&self, other: &TSpaceDesc) -> Result<TSpaceDesc> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let parts = self.parts.iter().chain(&other.parts).cloned().collect();
        Ok(TSpaceDesc::from_parts(&self.field, parts))
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn name(&self) -> String {
        self.parts.iter().map(|p| p.family.to_string()).collect::<Vec<_>>().join("+")
    }

    pub fn parts(&self) -> &[SpacePart] {
        &self.parts
    }

    pub fn schemas(&self) -> &[GeneratorSchema] {
        &self.schemas
    }

    pub fn generators(&self) -> &BTreeMap<String, SparsePoly> {
        &self.generators
    }

    pub fn is_complete(&self) -> bool {
        self.parts.iter().all(|p| p.complete)
    }

    pub fn view(&self) -> SpaceView<'_> {
        SpaceView { schemas: &self.schemas, generators: &self.generators, complete: self.is_complete() }
    }

    fn periods(&self) -> Vec<u64> {
        let mut out: Vec<u64> = Vec::new();
        for p in self.parts.iter().flat_map(|p| p.periods(&self.field)).chain(SMALL_PERIODS) {
            if (2..=1 << 12).contains(&p) && !out.contains(&p) {
                out.push(p);
            }
        }
        out
    }

    /// Looks for a separating periodic functional. Only meaningful for
    /// complete spaces.
    pub fn find_functional(&self, g: &SparsePoly) -> Result<Option<MembershipVerdict>> {
        if !self.is_complete() {
            return Ok(None);
        }
        for m in self.periods() {
            if let Some(lam) = solve_periodic_functional(&self.field, &self.schemas, m, g)? {
                return Ok(Some(MembershipVerdict::NonMember(NonMemberWitness::Functional(lam))));
            }
        }
        Ok(None)
    }

    /// Membership of `g`: the W0 divisibility oracle for W0 alone,
    /// otherwise elimination followed by a search for a functional.
    pub fn decide(&self, g: &SparsePoly, cutoff: u64) -> Result<MembershipVerdict> {
        let f = &self.field;
        if let [part] = &self.parts[..] {
            if part.family == Family::W0 {
                return decide_w0(f, &part.schemas[0], g);
            }
        }
        match decide_membership(f, g, &self.schemas, cutoff)? {
            MembershipVerdict::Member(c) => return Ok(MembershipVerdict::Member(c)),
            v @ MembershipVerdict::NonMember(_) if self.is_complete() => return Ok(v),
            _ => {}
        }
        Ok(self.find_functional(g)?.unwrap_or(MembershipVerdict::Unknown(cutoff)))
    }

    /// The verdict for `x`; Member means the space is all of `k[x]_0`.
    pub fn covers_all(&self, cutoff: u64) -> Result<MembershipVerdict> {
        self.decide(&SparsePoly::x(), cutoff)
    }

    /// Exact answers for W0 and PiZ; `None` for other spaces.
    pub fn special_membership(&self, g: &SparsePoly) -> Option<bool> {
        match &self.parts[..] {
            [part] if part.family == Family::W0 => Some(w0_membership(&self.field, g)),
            [part] if part.family == Family::PiZ => Some(piz_membership(&self.field, g)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linspan::check_verdict;

    fn gf(q: u64) -> FieldSpec {
        FieldSpec::with_order(q).unwrap()
    }

    #[test]
    fn family_names_roundtrip() {
        for name in ["V:0", "W:3", "W0", "PiZ", "P", "custom:a.json"] {
            assert_eq!(Family::parse(name).unwrap().to_string(), name);
        }
        assert!(Family::parse("X:1").is_err());
    }

    #[test]
    fn v0_schema_at_q3() {
        let f = gf(3);
        let v = TSpaceDesc::build(&f, &Family::V(0)).unwrap();
        let inst = v.schemas()[0].instantiate(&f, &[2]).unwrap();
        assert_eq!(inst, SparsePoly::from_exponents(&f, &[2, 6]));
        assert_eq!(v.schemas()[0].id, "V:0/v");
    }

    #[test]
    fn w_needs_char_two() {
        assert!(matches!(
            TSpaceDesc::build(&gf(3), &Family::W(1)),
            Err(Error::BadCharacteristic { need: 2, have: 3, .. })
        ));
        assert!(TSpaceDesc::build(&gf(4), &Family::W(1)).is_ok());
    }

    #[test]
    fn sums_are_idempotent() {
        let f = gf(3);
        let v0 = TSpaceDesc::build(&f, &Family::V(0)).unwrap();
        assert_eq!(v0.sum(&v0).unwrap(), v0);
        let s = TSpaceDesc::parse(&f, "V:0,V:1").unwrap();
        assert_eq!(s.name(), "V:0+V:1");
        assert_eq!(s.schemas().len(), 2);
    }

    #[test]
    fn v_sum_covers_with_half_scalars() {
        let f = gf(3);
        let s = TSpaceDesc::parse(&f, "V:0,V:1").unwrap();
        let v = s.covers_all(9).unwrap();
        assert!(v.is_member(), "{v:?}");
        check_verdict(&f, &s.view(), &SparsePoly::x(), &v, 0).unwrap();
    }

    #[test]
    fn x_not_in_v0_by_functional() {
        let f = gf(3);
        let v0 = TSpaceDesc::build(&f, &Family::V(0)).unwrap();
        let v = v0.covers_all(50).unwrap();
        match &v {
            MembershipVerdict::NonMember(NonMemberWitness::Functional(lam)) => assert_eq!(lam.period, 4),
            other => panic!("{other:?}"),
        }
        check_verdict(&f, &v0.view(), &SparsePoly::x(), &v, 3).unwrap();
    }

    #[test]
    fn w1_plus_w2_covers() {
        let f = gf(2);
        let s = TSpaceDesc::parse(&f, "W:1+W:2").unwrap();
        let v = s.covers_all(64).unwrap();
        assert!(v.is_member(), "{v:?}");
        check_verdict(&f, &s.view(), &SparsePoly::x(), &v, 0).unwrap();
    }

    #[test]
    fn piz_gap() {
        let f = gf(2);
        let s = TSpaceDesc::build(&f, &Family::PiZ).unwrap();
        let g = SparsePoly::from_exponents(&f, &[1, 2]);
        let v = s.decide(&g, 16).unwrap();
        assert!(v.is_nonmember());
        check_verdict(&f, &s.view(), &g, &v, 0).unwrap();
        assert_eq!(s.special_membership(&g), Some(false));
        assert_eq!(s.special_membership(&SparsePoly::from_exponents(&f, &[2, 7])), Some(true));
    }

    #[test]
    fn custom_generators_are_incomplete() {
        let f = gf(2);
        let json = CustomSpaceJson { schemas: vec![], generators: vec!["x^3".into()] };
        let part = SpacePart::custom(&f, "cubes", &json).unwrap();
        assert!(!part.complete);
        let s = TSpaceDesc::from_parts(&f, vec![part]);
        // x is outside {x^3}^S, but the monomial images alone cannot prove it.
        assert_eq!(s.decide(&SparsePoly::x(), 16).unwrap(), MembershipVerdict::Unknown(16));
        assert!(s.decide(&SparsePoly::x_pow(6u32), 16).unwrap().is_member());
    }
}
