//! Replaying derivation scripts by exact arithmetic.
//!
//! A script binds named spaces and then builds polynomials step by step.
//! Every labelled value remembers which bound spaces it is known to lie
//! in; membership propagates through substitutions, linear combinations
//! and q-homogeneous components, and from a space to every binding whose
//! components include it.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::TSpaceDesc;
use crate::gf::{FieldElement, FieldSpec};
use crate::linspan::{check_verdict, truncated_closure, MembershipVerdict, DEFAULT_CUTOFF};
use crate::poly::{Ambient, Exp, SparsePoly};
use crate::rewrite::{build_rules, RewriteSystem, Target};
use crate::unitary::{unitary_membership, wmax_membership, UnitaryDesc, UnitarySpace};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptJson {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub description: Option<String>,
    pub field: ScriptFieldJson,
    #[serde(default)]
    pub unitary: bool,
    #[serde(default)]
    pub spaces: BTreeMap<String, BindingJson>,
    #[serde(default)]
    pub steps: Vec<StepJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptFieldJson {
    pub q: u64,
    #[serde(default)]
    pub modulus: Option<Vec<u32>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BindingJson {
    /// Family names joined by `+`, e.g. `W:2` or `V:0+V:1`.
    pub space: String,
    /// Extra generators: the binding is `space + {generators}^S`.
    #[serde(default)]
    pub generators: Vec<String>,
    /// How membership in `space` itself is discharged.
    pub method: String,
    #[serde(default)]
    pub cutoff: Option<u64>,
    #[serde(default)]
    pub degree: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Int(i64),
    Residue(Vec<u32>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepJson {
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub note: Option<String>,
    #[serde(flatten)]
    pub op: OpJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum OpJson {
    Generator {
        space: String,
        #[serde(default)]
        schema: Option<String>,
        #[serde(default)]
        params: Option<BTreeMap<String, u64>>,
        #[serde(default)]
        poly: Option<String>,
        #[serde(default)]
        subst: Option<String>,
    },
    Literal {
        poly: String,
    },
    Substitute {
        of: String,
        u: String,
    },
    Combine {
        terms: Vec<(ScalarJson, String)>,
    },
    Component {
        of: String,
        class: u64,
    },
    AssertEquals {
        of: String,
        poly: String,
    },
    AssertIn {
        of: String,
        space: String,
    },
    AssertCongruent {
        of: String,
        #[serde(default)]
        to: Option<String>,
        #[serde(default)]
        poly: Option<String>,
        space: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Rewrite,
    Special,
    Mde,
    Oracle,
}

#[derive(Clone, Debug)]
enum Base {
    Plain(TSpaceDesc),
    Lifted(UnitaryDesc),
    Wmax,
}

#[derive(Clone, Debug)]
pub struct Binding {
    pub name: String,
    pub space: String,
    base: Base,
    extras: Vec<SparsePoly>,
    components: BTreeSet<String>,
    pub method: Method,
    cutoff: u64,
    degree: Option<u64>,
    rewrite: Option<RewriteSystem>,
}

#[derive(Clone, Debug)]
pub enum GenSource {
    Schema { id: String, params: BTreeMap<String, u64> },
    Poly(SparsePoly),
}

#[derive(Clone, Debug)]
pub enum Congruent {
    Label(String),
    Poly(SparsePoly),
}

#[derive(Clone, Debug)]
pub enum Op {
    Generator { space: String, source: GenSource, subst: Option<SparsePoly> },
    Literal(SparsePoly),
    Substitute { of: String, u: SparsePoly },
    Combine(Vec<(FieldElement, String)>),
    Component { of: String, class: u64 },
    AssertEquals { of: String, poly: SparsePoly },
    AssertIn { of: String, space: String },
    AssertCongruent { of: String, to: Congruent, space: String },
}

impl Op {
    pub fn name(&self) -> &'static str {
        match self {
            Op::Generator { .. } => "generator",
            Op::Literal(_) => "literal",
            Op::Substitute { .. } => "substitute",
            Op::Combine(_) => "combine",
            Op::Component { .. } => "component",
            Op::AssertEquals { .. } => "assert_equals",
            Op::AssertIn { .. } => "assert_in",
            Op::AssertCongruent { .. } => "assert_congruent",
        }
    }

    fn produces_value(&self) -> bool {
        !matches!(self, Op::AssertEquals { .. } | Op::AssertIn { .. })
    }

    fn referenced(&self) -> Vec<&str> {
        match self {
            Op::Substitute { of, .. }
            | Op::Component { of, .. }
            | Op::AssertEquals { of, .. }
            | Op::AssertIn { of, .. } => vec![of],
            Op::AssertCongruent { of, to: Congruent::Label(to), .. } => vec![of, to],
            Op::AssertCongruent { of, .. } => vec![of],
            Op::Combine(terms) => terms.iter().map(|(_, l)| l.as_str()).collect(),
            Op::Generator { .. } | Op::Literal(_) => vec![],
        }
    }

    fn space(&self) -> Option<&str> {
        match self {
            Op::Generator { space, .. } | Op::AssertIn { space, .. } | Op::AssertCongruent { space, .. } => Some(space),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Step {
    pub label: Option<String>,
    pub note: Option<String>,
    pub op: Op,
}

#[derive(Clone, Debug)]
pub struct DerivationScript {
    pub name: String,
    pub field: FieldSpec,
    pub ambient: Ambient,
    pub bindings: BTreeMap<String, Binding>,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepOutcome {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub op: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplayReport {
    pub script: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_step: Option<usize>,
    pub steps: Vec<StepOutcome>,
}

impl ReplayReport {
    pub fn failure(&self) -> Option<&StepOutcome> {
        self.steps.iter().find(|s| !s.passed)
    }
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field_of(json: &ScriptFieldJson) -> Result<FieldSpec> {
    let f = FieldSpec::with_order(json.q)?;
    match &json.modulus {
        Some(m) => FieldSpec::new(f.p() as u64, f.m(), Some(m)),
        None => Ok(f),
    }
}

fn method_of(name: &str) -> Result<Method> {
    match name {
        "rewrite" => Ok(Method::Rewrite),
        "special" => Ok(Method::Special),
        "mde" => Ok(Method::Mde),
        "oracle" => Ok(Method::Oracle),
        other => Err(parse_err(format!("unknown discharge method `{other}`"))),
    }
}

fn build_binding(f: &FieldSpec, ambient: Ambient, name: &str, json: &BindingJson) -> Result<Binding> {
    let method = method_of(&json.method)?;
    let base = match ambient {
        Ambient::Nonunitary => Base::Plain(TSpaceDesc::parse(f, &json.space)?),
        Ambient::Unitary => match UnitarySpace::parse(f, &json.space)? {
            UnitarySpace::Lifted(d) => Base::Lifted(d),
            UnitarySpace::Wmax(_) => Base::Wmax,
        },
    };
    let extras = json.generators.iter().map(|g| SparsePoly::parse(f, g, ambient)).collect::<Result<Vec<_>>>()?;
    let mut components: BTreeSet<String> = json.space.split([',', '+']).map(|s| s.trim().to_string()).collect();
    components.extend(extras.iter().map(|g| format!("gen:{}", g.to_text(f))));
    let plain = match &base {
        Base::Plain(d) => Some(d),
        Base::Lifted(d) => Some(d.base()),
        Base::Wmax => None,
    };
    let single = plain.and_then(|d| match d.parts() {
        [p] => Some(p.family.to_string()),
        _ => None,
    });
    let mismatch = || parse_err(format!("space `{name}`: method {} does not apply to {}", json.method, json.space));
    let mut rewrite = None;
    match method {
        Method::Rewrite => {
            let target = Target::parse(single.as_deref().ok_or_else(mismatch)?).map_err(|_| mismatch())?;
            rewrite = Some(build_rules(f, target)?);
        }
        Method::Special => {
            let ok = matches!(base, Base::Wmax)
                || (matches!(base, Base::Plain(_)) && matches!(single.as_deref(), Some("W0") | Some("PiZ")));
            if !ok {
                return Err(mismatch());
            }
        }
        Method::Mde => {
            if matches!(base, Base::Wmax) {
                return Err(mismatch());
            }
        }
        Method::Oracle => {
            if json.degree.is_none() {
                return Err(parse_err(format!("space `{name}`: the oracle method needs a degree")));
            }
        }
    }
    Ok(Binding {
        name: name.to_string(),
        space: json.space.clone(),
        base,
        extras,
        components,
        method,
        cutoff: json.cutoff.unwrap_or(DEFAULT_CUTOFF),
        degree: json.degree,
        rewrite,
    })
}

fn scalar_of(f: &FieldSpec, s: &ScalarJson) -> Result<FieldElement> {
    match s {
        ScalarJson::Int(n) => Ok(f.from_int(*n)),
        ScalarJson::Residue(r) => f.from_residue(r),
    }
}

fn op_of(f: &FieldSpec, ambient: Ambient, op: &OpJson) -> Result<Op> {
    let poly = |s: &str| SparsePoly::parse(f, s, ambient);
    Ok(match op {
        OpJson::Generator { space, schema, params, poly: text, subst } => {
            let source = match (schema, text) {
                (Some(id), None) => GenSource::Schema { id: id.clone(), params: params.clone().unwrap_or_default() },
                (None, Some(t)) if params.is_none() => GenSource::Poly(poly(t)?),
                _ => return Err(parse_err("generator needs exactly one of `schema` (with `params`) or `poly`")),
            };
            let subst = subst.as_deref().map(poly).transpose()?;
            Op::Generator { space: space.clone(), source, subst }
        }
        OpJson::Literal { poly: t } => Op::Literal(poly(t)?),
        OpJson::Substitute { of, u } => Op::Substitute { of: of.clone(), u: poly(u)? },
        OpJson::Combine { terms } => {
            Op::Combine(terms.iter().map(|(s, l)| Ok((scalar_of(f, s)?, l.clone()))).collect::<Result<Vec<_>>>()?)
        }
        OpJson::Component { of, class } => {
            if *class == 0 || *class > (f.q() - 1) as u64 {
                return Err(parse_err(format!("component class {class} outside 1..={}", f.q() - 1)));
            }
            Op::Component { of: of.clone(), class: *class }
        }
        OpJson::AssertEquals { of, poly: t } => Op::AssertEquals { of: of.clone(), poly: poly(t)? },
        OpJson::AssertIn { of, space } => Op::AssertIn { of: of.clone(), space: space.clone() },
        OpJson::AssertCongruent { of, to, poly: t, space } => {
            let to = match (to, t) {
                (Some(l), None) => Congruent::Label(l.clone()),
                (None, Some(t)) => Congruent::Poly(poly(t)?),
                _ => return Err(parse_err("assert_congruent needs exactly one of `to` or `poly`")),
            };
            Op::AssertCongruent { of: of.clone(), to, space: space.clone() }
        }
    })
}

pub fn parse_script(text: &str) -> Result<DerivationScript> {
    let json: ScriptJson = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    from_json(&json)
}

pub fn load_script(path: &Path) -> Result<DerivationScript> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_script(&text)
}

pub fn from_json(json: &ScriptJson) -> Result<DerivationScript> {
    let field = field_of(&json.field)?;
    let ambient = if json.unitary { Ambient::Unitary } else { Ambient::Nonunitary };
    let bindings = json
        .spaces
        .iter()
        .map(|(name, b)| Ok((name.clone(), build_binding(&field, ambient, name, b)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let mut defined: BTreeSet<String> = BTreeSet::new();
    let mut steps = Vec::with_capacity(json.steps.len());
    for (index, s) in json.steps.iter().enumerate() {
        let op = op_of(&field, ambient, &s.op).map_err(|e| parse_err(format!("step {index}: {e}")))?;
        if let Some(space) = op.space() {
            if !bindings.contains_key(space) {
                return Err(Error::UnknownLabel(space.to_string()));
            }
        }
        for l in op.referenced() {
            if !defined.contains(l) {
                return Err(Error::ForwardReference { step: index, label: l.to_string() });
            }
        }
        if op.produces_value() && s.label.is_none() && !matches!(op, Op::AssertCongruent { .. }) {
            return Err(parse_err(format!("step {index}: {} needs a label", op.name())));
        }
        if let Some(l) = &s.label {
            if !defined.insert(l.clone()) {
                return Err(parse_err(format!("step {index}: label `{l}` defined twice")));
            }
        }
        steps.push(Step { label: s.label.clone(), note: s.note.clone(), op });
    }
    Ok(DerivationScript { name: json.name.clone().unwrap_or_default(), field, ambient, bindings, steps })
}

#[derive(Clone, Debug)]
struct Value {
    poly: SparsePoly,
    spaces: BTreeSet<String>,
}

type StepResult = std::result::Result<(String, Option<Value>), (String, Option<SparsePoly>)>;

struct Runner<'a> {
    script: &'a DerivationScript,
    values: BTreeMap<String, Value>,
}

impl Runner<'_> {
    fn f(&self) -> &FieldSpec {
        &self.script.field
    }

    fn binding(&self, name: &str) -> &Binding {
        &self.script.bindings[name]
    }

    /// Every binding containing one of `spaces`.
    fn closure(&self, spaces: impl IntoIterator<Item = String>) -> BTreeSet<String> {
        let seeds: Vec<String> = spaces.into_iter().collect();
        self.script
            .bindings
            .values()
            .filter(|t| seeds.iter().any(|s| self.binding(s).components.is_subset(&t.components)))
            .map(|t| t.name.clone())
            .collect()
    }

    fn text(&self, g: &SparsePoly) -> String {
        g.to_text(self.f())
    }

    fn generator(&self, space: &str, source: &GenSource, subst: &Option<SparsePoly>) -> StepResult {
        let f = self.f();
        let b = self.binding(space);
        let plain = match &b.base {
            Base::Plain(d) => Some(d),
            Base::Lifted(d) => Some(d.base()),
            Base::Wmax => None,
        };
        let g = match source {
            GenSource::Schema { id, params } => {
                let d = plain.ok_or(("U:Wmax has no schemas".to_string(), None))?;
                let matches: Vec<_> = d
                    .schemas()
                    .iter()
                    .filter(|s| &s.id == id || s.id.rsplit('/').next() == Some(id.as_str()))
                    .collect();
                let [s] = matches[..] else {
                    return Err((format!("schema `{id}` is missing or ambiguous in {}", b.space), None));
                };
                s.instantiate_named(f, params).map_err(|e| (e.to_string(), None))?
            }
            GenSource::Poly(p) => {
                let mut known: Vec<SparsePoly> = b.extras.clone();
                if let Some(d) = plain {
                    known.extend(d.generators().values().cloned());
                }
                if matches!(b.base, Base::Wmax) {
                    let q = f.q() as u64;
                    known.push(
                        SparsePoly::from_terms(
                            f,
                            [(Exp::from(1u32), f.one()), (Exp::from(q), f.neg(f.one()))],
                            Ambient::Nonunitary,
                        )
                        .expect("valid"),
                    );
                    known.push(SparsePoly::constant(f.one()));
                }
                let same = |k: &SparsePoly| k.terms().eq(p.terms());
                if !known.iter().any(same) {
                    return Err((format!("{} is not a generator of {}", self.text(p), b.name), None));
                }
                p.clone()
            }
        };
        let g = g.with_ambient(self.script.ambient).map_err(|e| (e.to_string(), None))?;
        let g = match subst {
            Some(u) => g.compose(f, u).map_err(|e| (e.to_string(), None))?,
            None => g,
        };
        Ok((
            format!("{} in {space}", self.text(&g)),
            Some(Value { poly: g, spaces: self.closure([space.to_string()]) }),
        ))
    }

    /// Membership of `g` in the binding's base space by its method.
    fn discharge(&self, b: &Binding, g: &SparsePoly) -> std::result::Result<String, String> {
        let f = self.f();
        let (constant, rest) = crate::unitary::split_constant(g);
        let method = match b.method {
            Method::Rewrite => "rewrite",
            Method::Special => "special",
            Method::Mde => "mde",
            Method::Oracle => "oracle",
        };
        let plain = match &b.base {
            Base::Plain(d) => Some(d),
            Base::Lifted(d) => Some(d.base()),
            Base::Wmax => None,
        };
        if !constant.is_zero() && matches!(b.base, Base::Plain(_)) {
            return Err("nonzero constant term".into());
        }
        let ok = match (b.method, &b.base) {
            (Method::Special, Base::Wmax) => wmax_membership(f, g),
            (Method::Special, _) => plain.and_then(|d| d.special_membership(&rest)).unwrap_or(false),
            (Method::Rewrite, _) => {
                let sys = b.rewrite.as_ref().expect("checked at parse time");
                let red = sys.reduce_canonical(&rest).map_err(|e| e.to_string())?;
                if !red.canonical.is_zero() {
                    return Err(format!("canonical form is {} under {method}", self.text(&red.canonical)));
                }
                check_verdict(f, &sys.space().view(), &rest, &MembershipVerdict::Member(red.cert), 0)?;
                true
            }
            (Method::Mde, _) => {
                let d = plain.expect("checked at parse time");
                let verdict = match &b.base {
                    Base::Lifted(u) => unitary_membership(u, g, b.cutoff),
                    _ => d.decide(&rest, b.cutoff),
                }
                .map_err(|e| e.to_string())?;
                if !verdict.is_member() {
                    return Err(format!("{method} verdict is {}", verdict.label()));
                }
                check_verdict(f, &d.view(), &rest, &verdict, 0)?;
                true
            }
            (Method::Oracle, _) => {
                let degree = b.degree.expect("checked at parse time");
                let gens: Vec<SparsePoly> = match &b.base {
                    Base::Wmax => return Err("the oracle does not model U:Wmax".into()),
                    _ => plain.expect("not Wmax").generators().values().cloned().collect(),
                };
                let closure = truncated_closure(f, &gens, degree, Ambient::Nonunitary).map_err(|e| e.to_string())?;
                if rest.degree().is_some_and(|d| d > &Exp::from(degree)) {
                    return Err(format!("degree exceeds the oracle bound {degree}"));
                }
                closure.contains(f, &rest)
            }
        };
        if ok {
            Ok(format!("by {method}"))
        } else {
            Err(format!("not in {} by {method}", b.space))
        }
    }

    fn exec(&self, step: &Step) -> StepResult {
        let f = self.f();
        let get = |l: &String| &self.values[l];
        match &step.op {
            Op::Generator { space, source, subst } => self.generator(space, source, subst),
            Op::Literal(p) => Ok((self.text(p), Some(Value { poly: p.clone(), spaces: BTreeSet::new() }))),
            Op::Substitute { of, u } => {
                let v = get(of);
                if v.spaces.is_empty() {
                    return Err((format!("`{of}` is not known to lie in any T-space"), None));
                }
                let g = v.poly.compose(f, u).map_err(|e| (e.to_string(), None))?;
                Ok((self.text(&g), Some(Value { poly: g, spaces: v.spaces.clone() })))
            }
            Op::Combine(terms) => {
                let mut acc = SparsePoly::zero(self.script.ambient);
                let mut spaces: Option<BTreeSet<String>> = None;
                for (c, l) in terms {
                    let v = get(l);
                    acc = acc.add(f, &v.poly.scale(f, *c)).map_err(|e| (e.to_string(), None))?;
                    spaces = Some(match spaces {
                        None => v.spaces.clone(),
                        Some(s) => s.intersection(&v.spaces).cloned().collect(),
                    });
                }
                Ok((self.text(&acc), Some(Value { poly: acc, spaces: spaces.unwrap_or_default() })))
            }
            Op::Component { of, class } => {
                let v = get(of);
                let comps = v.poly.vandermonde_extract(f).map_err(|e| (e.to_string(), None))?;
                let g = comps[*class as usize - 1].clone();
                Ok((self.text(&g), Some(Value { poly: g, spaces: v.spaces.clone() })))
            }
            Op::AssertEquals { of, poly } => {
                let v = get(of);
                let diff = v.poly.sub(f, poly).map_err(|e| (e.to_string(), None))?;
                if diff.is_zero() {
                    Ok((format!("{of} = {}", self.text(poly)), None))
                } else {
                    Err((format!("{of} differs from {}", self.text(poly)), Some(diff)))
                }
            }
            Op::AssertIn { of, space } => {
                let v = get(of);
                if v.spaces.contains(space) {
                    return Ok((format!("{of} in {space} by derivation"), None));
                }
                let b = self.binding(space);
                let how = self.discharge(b, &v.poly).map_err(|e| (e, Some(v.poly.clone())))?;
                Ok((format!("{of} in {space} {how}"), None))
            }
            Op::AssertCongruent { of, to, space } => {
                let v = get(of);
                let target = match to {
                    Congruent::Label(l) => get(l).poly.clone(),
                    Congruent::Poly(p) => p.clone(),
                };
                let diff = v.poly.sub(f, &target).map_err(|e| (e.to_string(), None))?;
                let b = self.binding(space);
                let how = self.discharge(b, &diff).map_err(|e| (e, Some(diff.clone())))?;
                let spaces = v.spaces.iter().filter(|t| b.components.is_subset(&self.binding(t).components)).cloned();
                let spaces = self.closure(spaces);
                Ok((format!("{of} = {} mod {space} {how}", self.text(&target)), Some(Value { poly: target, spaces })))
            }
        }
    }
}

/// Replays every step, stopping at the first failure.
pub fn run_script(script: &DerivationScript) -> ReplayReport {
    let mut runner = Runner { script, values: BTreeMap::new() };
    let mut steps = Vec::new();
    let mut failed_step = None;
    for (index, step) in script.steps.iter().enumerate() {
        let (passed, detail, residual) = match runner.exec(step) {
            Ok((detail, value)) => {
                if let (Some(l), Some(v)) = (&step.label, value) {
                    runner.values.insert(l.clone(), v);
                }
                (true, detail, None)
            }
            Err((detail, residual)) => (false, detail, residual.map(|r| r.to_text(&script.field))),
        };
        steps.push(StepOutcome { index, label: step.label.clone(), op: step.op.name(), passed, detail, residual });
        if !passed {
            failed_step = Some(index);
            break;
        }
    }
    ReplayReport { script: script.name.clone(), passed: failed_step.is_none(), failed_step, steps }
}

impl DerivationScript {
    /// Spaces the value bound to `label` is known to lie in after a
    /// successful replay.
    pub fn derived_spaces(&self, label: &str) -> Option<BTreeSet<String>> {
        let mut runner = Runner { script: self, values: BTreeMap::new() };
        for step in &self.steps {
            let (_, value) = runner.exec(step).ok()?;
            if let (Some(l), Some(v)) = (&step.label, value) {
                runner.values.insert(l.clone(), v);
            }
        }
        runner.values.get(label).map(|v| v.spaces.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = r#"{
        "name": "tiny",
        "field": {"q": 2},
        "spaces": {"E": {"space": "W0", "method": "special"},
                   "W1": {"space": "W0", "generators": ["x^3"], "method": "special"}},
        "steps": [
            {"label": "a", "op": "generator", "space": "W1", "poly": "x^3", "subst": "x + x^2"},
            {"label": "b", "op": "generator", "space": "W1", "poly": "x^3"},
            {"label": "c", "op": "generator", "space": "W1", "poly": "x^3", "subst": "x^2"},
            {"label": "d", "op": "combine", "terms": [[1, "a"], [1, "b"], [1, "c"]]},
            {"op": "assert_equals", "of": "d", "poly": "x^4 + x^5"},
            {"label": "e", "op": "assert_congruent", "of": "d", "poly": "x + x^5", "space": "E"},
            {"op": "assert_in", "of": "e", "space": "W1"}
        ]
    }"#;

    #[test]
    fn tiny_script_passes() {
        let s = parse_script(TINY).unwrap();
        let r = run_script(&s);
        assert!(r.passed, "{r:?}");
        assert_eq!(r.steps.len(), 7);
    }

    #[test]
    fn empty_script_is_valid() {
        let s = parse_script(r#"{"field": {"q": 3}, "steps": []}"#).unwrap();
        assert!(run_script(&s).passed);
    }

    #[test]
    fn forward_reference() {
        let text = r#"{"field": {"q": 2}, "steps": [{"label": "a", "op": "substitute", "of": "b", "u": "x^2"}]}"#;
        assert!(matches!(parse_script(text), Err(Error::ForwardReference { step: 0, .. })));
    }

    #[test]
    fn unknown_space() {
        let text = r#"{"field": {"q": 2}, "steps": [{"label": "a", "op": "generator", "space": "Z", "poly": "x"}]}"#;
        assert!(matches!(parse_script(text), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn bad_method_rejected() {
        let text = r#"{"field": {"q": 2}, "spaces": {"A": {"space": "P", "method": "rewrite"}}}"#;
        assert!(matches!(parse_script(text), Err(Error::Parse(_))));
    }

    #[test]
    fn failure_reports_residual() {
        let text = TINY.replace("x^4 + x^5\"", "x^4 + x^6\"");
        let r = run_script(&parse_script(&text).unwrap());
        assert!(!r.passed);
        assert_eq!(r.failed_step, Some(4));
        assert_eq!(r.failure().unwrap().residual.as_deref(), Some("x^5 + x^6"));
    }

    #[test]
    fn substitution_needs_membership() {
        let text = r#"{"field": {"q": 2}, "steps": [
            {"label": "a", "op": "literal", "poly": "x"},
            {"label": "b", "op": "substitute", "of": "a", "u": "x^2"}]}"#;
        let r = run_script(&parse_script(text).unwrap());
        assert_eq!(r.failed_step, Some(1));
    }

    #[test]
    fn replay_is_deterministic() {
        let s = parse_script(TINY).unwrap();
        assert_eq!(run_script(&s), run_script(&s));
    }
}
