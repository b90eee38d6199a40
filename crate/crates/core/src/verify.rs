//! The verification suite: every structural claim the library relies on,
//! checked by exact arithmetic with a certificate or an exhaustive oracle.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::families::{power_escalation, v_exponent, verify_escalation, TSpaceDesc};
use crate::gf::FieldSpec;
use crate::linspan::check::{check_functional, sum_steps};
use crate::linspan::membership::Source;
use crate::linspan::{
    check_verdict, schema_span_truncated, solve_periodic_functional, truncated_closure, CertificateJson,
    MembershipVerdict, TruncatedClosure, DEFAULT_CUTOFF,
};
use crate::poly::{Ambient, SparsePoly};
use crate::replay::{parse_script, run_script, ReplayReport};
use crate::rewrite::{build_rules, Target};
use crate::unitary::{unitary_covers, wmax_membership, UnitarySpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Quick,
    Full,
}

impl Profile {
    fn orders(self, quick: &[u64], full: &[u64]) -> Vec<u64> {
        match self {
            Profile::Quick => quick.to_vec(),
            Profile::Full => full.to_vec(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Params {
    pub q: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(rename = "D", skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
}

impl Params {
    fn q(q: u64) -> Params {
        Params { q, ..Params::default() }
    }

    fn tag(&self) -> String {
        let mut s = format!("q{}", self.q);
        for (k, v) in [("n", self.n.map(u64::from)), ("m", self.m.map(u64::from)), ("D", self.d)] {
            if let Some(v) = v {
                s += &format!("-{k}{v}");
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub id: String,
    pub claim: String,
    pub params: Params,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
    pub wall_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub version: String,
    pub profile: Profile,
    pub passed: bool,
    /// SHA-256 of the checks with wall times zeroed.
    pub digest: String,
    pub checks: Vec<CheckReport>,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckReport> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub profile: Profile,
    /// Directory of replay scripts replacing the built-in ones.
    pub fixtures: Option<PathBuf>,
    /// Directory receiving one certificate file per certified check.
    pub certs: Option<PathBuf>,
}

impl SuiteOptions {
    pub fn new(profile: Profile) -> SuiteOptions {
        SuiteOptions { profile, fixtures: None, certs: None }
    }
}

const BUILTIN: [(&str, &str); 6] = [
    ("p_chain", include_str!("../fixtures/p_chain.json")),
    ("w1_max", include_str!("../fixtures/w1_max.json")),
    ("w2_cases", include_str!("../fixtures/w2_cases.json")),
    ("vsum_q3", include_str!("../fixtures/vsum_q3.json")),
    ("wsum_q2", include_str!("../fixtures/wsum_q2.json")),
    ("unitary_w", include_str!("../fixtures/unitary_w.json")),
];

const P_CHAIN_MUTANT: &str = include_str!("../fixtures/mutated/p_chain.json");

/// Text of a built-in script, or of `<dir>/<name>.json` when overridden.
fn fixture_text(dir: Option<&Path>, name: &str) -> Result<String, String> {
    match dir {
        Some(d) => {
            let path = d.join(format!("{name}.json"));
            std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))
        }
        None => Ok(BUILTIN.iter().find(|(n, _)| *n == name).expect("built-in fixture").1.to_string()),
    }
}

type Outcome = Result<(String, Option<CertificateJson>), String>;

struct Job {
    id: &'static str,
    claim: String,
    params: Params,
    certificate: Option<String>,
    run: Box<dyn Fn() -> Outcome + Send + Sync>,
}

fn job(
    id: &'static str,
    claim: impl Into<String>,
    params: Params,
    run: impl Fn() -> Outcome + Send + Sync + 'static,
) -> Job {
    Job { id, claim: claim.into(), params, certificate: None, run: Box::new(run) }
}

fn gf(q: u64) -> Result<FieldSpec, String> {
    FieldSpec::with_order(q).map_err(|e| e.to_string())
}

fn err<E: ToString>(e: E) -> String {
    e.to_string()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn field_laws(q: u64) -> Outcome {
    let f = gf(q)?;
    let p = f.p() as u64;
    let frob = |a| f.pow_u64(a, p);
    for a in f.elements() {
        ensure(f.pow_u64(a, q) == a, || format!("a^q != a for {}", f.fmt_element(a)))?;
        if !a.is_zero() {
            ensure(f.mul(a, f.inv(a).map_err(err)?) == f.one(), || "inverse law".into())?;
        }
        for b in f.elements() {
            ensure(frob(f.add(a, b)) == f.add(frob(a), frob(b)), || "Frobenius is not additive".into())?;
        }
    }
    Ok((format!("{} elements", q), None))
}

fn cutoff_for(f: &FieldSpec, n: u32) -> u64 {
    v_exponent(f, n).to_u64().unwrap_or(u64::MAX).max(DEFAULT_CUTOFF)
}

fn certified(
    f: &FieldSpec,
    space: &TSpaceDesc,
    g: &SparsePoly,
    v: &MembershipVerdict,
) -> Result<CertificateJson, String> {
    check_verdict(f, &space.view(), g, v, 0)?;
    Ok(CertificateJson::new(f, Some(&space.name()), g, v))
}

fn v_difference(q: u64, n: u32, m: u32) -> Outcome {
    let f = gf(q)?;
    let space = TSpaceDesc::parse(&f, &format!("V:{n}")).map_err(err)?;
    let g = SparsePoly::x().sub(&f, &SparsePoly::x_pow(v_exponent(&f, n + m))).map_err(err)?;
    let v = space.decide(&g, cutoff_for(&f, n + m)).map_err(err)?;
    ensure(v.is_member(), || format!("verdict {}", v.label()))?;
    let cert = certified(&f, &space, &g, &v)?;
    Ok((format!("{} certified", g.to_text(&f)), Some(cert)))
}

fn v_sum(q: u64, n: u32, m: u32) -> Outcome {
    let f = gf(q)?;
    let space = TSpaceDesc::parse(&f, &format!("V:{n}+V:{m}")).map_err(err)?;
    let v = space.covers_all(cutoff_for(&f, m)).map_err(err)?;
    let MembershipVerdict::Member(c) = &v else {
        return Err(format!("verdict {}", v.label()));
    };
    let cert = certified(&f, &space, &SparsePoly::x(), &v)?;
    let prefix = format!("V:{n}/");
    let (lo, hi): (Vec<_>, Vec<_>) = c
        .steps
        .iter()
        .cloned()
        .partition(|s| matches!(&s.source, Source::Schema { schema, .. } if schema.starts_with(&prefix)));
    let lo = sum_steps(&f, &space.view(), &lo).map_err(err)?;
    let hi = sum_steps(&f, &space.view(), &hi).map_err(err)?;
    let qm = SparsePoly::x_pow(v_exponent(&f, m));
    let half = f.inv(f.from_int(2)).map_err(err)?;
    let x = SparsePoly::x().with_ambient(Ambient::Unitary).map_err(err)?;
    let qm = qm.with_ambient(Ambient::Unitary).map_err(err)?;
    let want_lo = x.sub(&f, &qm).map_err(err)?.scale(&f, half);
    let want_hi = x.add(&f, &qm).map_err(err)?.scale(&f, half);
    ensure(lo == want_lo && hi == want_hi, || {
        format!("split is {} + {}, not (x - x^Q)/2 + (x + x^Q)/2", lo.to_text(&f), hi.to_text(&f))
    })?;
    Ok(("x = (x - x^Q)/2 + (x + x^Q)/2".into(), Some(cert)))
}

fn proper(q: u64, family: String, period: u64) -> Outcome {
    let f = gf(q)?;
    let space = TSpaceDesc::parse(&f, &family).map_err(err)?;
    let x = SparsePoly::x();
    let lam = solve_periodic_functional(&f, space.schemas(), period, &x)
        .map_err(err)?
        .ok_or_else(|| format!("no period-{period} functional separates x"))?;
    check_functional(&f, space.schemas(), &lam, &x, 0)?;
    let v = MembershipVerdict::NonMember(crate::linspan::NonMemberWitness::Functional(lam));
    Ok((format!("period-{period} functional"), Some(CertificateJson::new(&f, Some(&family), &x, &v))))
}

fn same_subspace(f: &FieldSpec, a: &TruncatedClosure, b: &TruncatedClosure) -> bool {
    a.dim() == b.dim() && a.basis(f).iter().all(|g| b.contains(f, g))
}

fn w_spanning(n: u32, d: u64) -> Outcome {
    let f = gf(2)?;
    let space = TSpaceDesc::parse(&f, &format!("W:{n}")).map_err(err)?;
    let gens = [SparsePoly::from_exponents(&f, &[1, 2]), SparsePoly::x_pow((1u64 << n) + 1)];
    let closure = truncated_closure(&f, &gens, d, Ambient::Nonunitary).map_err(err)?;
    let span = schema_span_truncated(&f, space.schemas(), d, 4 * d).map_err(err)?;
    ensure(same_subspace(&f, &closure, &span), || {
        format!("schema span has dim {}, closure {}", span.dim(), closure.dim())
    })?;
    Ok((format!("dim {}", closure.dim()), None))
}

fn replay(dir: Option<&Path>, name: &str) -> Result<ReplayReport, String> {
    let script = parse_script(&fixture_text(dir, name)?).map_err(err)?;
    Ok(run_script(&script))
}

fn replay_passes(dir: Option<&Path>, name: &str) -> Outcome {
    let r = replay(dir, name)?;
    if let Some(bad) = r.failure() {
        let at = bad.label.as_deref().map(|l| format!(" ({l})")).unwrap_or_default();
        return Err(format!("step {}{at} {}: {}", bad.index, bad.op, bad.detail));
    }
    let derived = r.steps.iter().filter(|s| s.op == "assert_in" && s.detail.ends_with("by derivation")).count();
    ensure(derived > 0, || "no membership derived from generators".into())?;
    Ok((format!("{} steps, {derived} derived memberships", r.steps.len()), None))
}

fn nonunitary_polys(f: &FieldSpec, d: u64) -> impl Iterator<Item = SparsePoly> + '_ {
    (1u64..1 << d).map(move |mask| {
        let exps: Vec<u64> = (1..=d).filter(|e| mask >> (e - 1) & 1 == 1).collect();
        SparsePoly::from_exponents(f, &exps)
    })
}

fn maximal(target: Target, d: u64) -> Outcome {
    let f = gf(2)?;
    let sys = build_rules(&f, target).map_err(err)?;
    let n = target.n();
    let gens = [SparsePoly::from_exponents(&f, &[1, 2]), SparsePoly::x_pow((1u64 << n) + 1)];
    let closure = truncated_closure(&f, &gens, d, Ambient::Nonunitary).map_err(err)?;
    let allowed = sys.canonical_exponents();
    let mut forms = std::collections::BTreeSet::new();
    for g in nonunitary_polys(&f, d) {
        let red = sys.reduce_canonical(&g).map_err(err)?;
        ensure(red.canonical.terms().all(|(e, _)| e.to_u64().is_some_and(|e| allowed.contains(&e))), || {
            format!("{} reduces to {}", g.to_text(&f), red.canonical.to_text(&f))
        })?;
        ensure(red.canonical.is_zero() == closure.contains(&f, &g), || {
            format!("rewriting and the oracle disagree on {}", g.to_text(&f))
        })?;
        forms.insert(red.canonical.to_text(&f));
    }
    let quotient = closure.ambient_dim() - closure.dim();
    ensure(quotient == allowed.len(), || format!("oracle quotient {quotient}, {} canonical monomials", allowed.len()))?;
    Ok((format!("{} canonical forms, quotient dim {quotient}", forms.len()), None))
}

fn x7_not_in_w2() -> Outcome {
    let f = gf(2)?;
    let space = TSpaceDesc::parse(&f, "W:2").map_err(err)?;
    let g = SparsePoly::x_pow(7u32);
    let lam = solve_periodic_functional(&f, space.schemas(), 5, &g)
        .map_err(err)?
        .ok_or("no period-5 functional separates x^7")?;
    check_functional(&f, space.schemas(), &lam, &g, 0)?;
    let v = MembershipVerdict::NonMember(crate::linspan::NonMemberWitness::Functional(lam));
    Ok(("period-5 functional".into(), Some(CertificateJson::new(&f, Some("W:2"), &g, &v))))
}

fn p_closure() -> Outcome {
    let f = gf(2)?;
    let gens = [SparsePoly::from_exponents(&f, &[1, 2]), SparsePoly::x_pow(7u32)];
    let c = truncated_closure(&f, &gens, 13, Ambient::Nonunitary).map_err(err)?;
    ensure(c.dim() == 13, || format!("dim {}", c.dim()))?;
    Ok(("dim 13 of 13".into(), None))
}

fn p_chain_negative() -> Outcome {
    let r = run_script(&parse_script(P_CHAIN_MUTANT).map_err(err)?);
    let bad = r.failure().ok_or("mutated chain replays")?;
    ensure(bad.detail.starts_with("e11 "), || format!("failed elsewhere: {}", bad.detail))?;
    Ok((format!("fails at step {}: {}", bad.index, bad.detail), None))
}

fn unitary_oracle(n: u32, d: u64) -> Outcome {
    let f = gf(2)?;
    let gens = [SparsePoly::from_exponents(&f, &[1, 2]), SparsePoly::x_pow((1u64 << n) + 1)];
    let nu = truncated_closure(&f, &gens, d, Ambient::Nonunitary).map_err(err)?;
    let ugens: Vec<SparsePoly> =
        gens.iter().map(|g| g.clone().with_ambient(Ambient::Unitary)).collect::<crate::Result<_>>().map_err(err)?;
    let u = truncated_closure(&f, &ugens, d, Ambient::Unitary).map_err(err)?;
    ensure(u.dim() == nu.dim() + 1, || format!("unitary dim {}, nonunitary {}", u.dim(), nu.dim()))?;
    let one = SparsePoly::constant(f.one());
    ensure(u.contains(&f, &one), || "1 is not in the unitary closure".into())?;
    Ok((format!("dim {} = 1 + {}", u.dim(), nu.dim()), None))
}

fn unitary_sum() -> Outcome {
    let f = gf(2)?;
    let lift = |s: &str| match UnitarySpace::parse(&f, s) {
        Ok(UnitarySpace::Lifted(d)) => Ok(d),
        other => Err(format!("{s}: {other:?}")),
    };
    let cover = unitary_covers(&lift("U:W:1")?, &lift("U:W:2")?, DEFAULT_CUTOFF).map_err(err)?;
    ensure(cover.covers(), || format!("x: {}, constants: {}", cover.x.label(), cover.constants))?;
    Ok(("covers x and 1".into(), None))
}

fn wmax_exhaustive(q: u64) -> Outcome {
    let f = gf(q)?;
    let deg = q + 2;
    let total = q.pow(deg as u32 + 1);
    let mut members = 0u64;
    for k in 0..total {
        let mut k = k;
        let mut terms = Vec::new();
        for e in 0..=deg {
            terms.push((e.into(), f.element((k % q) as u32).map_err(err)?));
            k /= q;
        }
        let g = SparsePoly::from_terms(&f, terms, Ambient::Unitary).map_err(err)?;
        let c = g.evaluate(&f, f.zero());
        let constant = f.elements().all(|a| g.evaluate(&f, a) == c);
        ensure(wmax_membership(&f, &g) == constant, || format!("disagreement on {}", g.to_text(&f)))?;
        members += constant as u64;
    }
    Ok((format!("{total} polynomials, {members} members"), None))
}

fn random_poly<R: Rng>(f: &FieldSpec, rng: &mut R, deg: u64) -> SparsePoly {
    let q = f.q();
    let terms = (1..=deg).map(|e| (e.into(), f.element(rng.gen_range(0..q)).expect("in range")));
    SparsePoly::from_terms(f, terms, Ambient::Nonunitary).expect("in range")
}

fn vandermonde(q: u64) -> Outcome {
    let f = gf(q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(q);
    for _ in 0..100 {
        let g = random_poly(&f, &mut rng, 40);
        let ext = g.vandermonde_extract(&f).map_err(err)?;
        ensure(ext == g.q_components(&f), || format!("extraction differs on {}", g.to_text(&f)))?;
    }
    Ok(("100 random polynomials".into(), None))
}

fn component_closure(d: u64) -> Outcome {
    let f = gf(3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(d);
    let mut checked = 0;
    for _ in 0..4 {
        let gens: Vec<SparsePoly> = (0..2).map(|_| random_poly(&f, &mut rng, 4)).collect();
        let c = truncated_closure(&f, &gens, d, Ambient::Nonunitary).map_err(err)?;
        for g in c.basis(&f) {
            for comp in g.vandermonde_extract(&f).map_err(err)? {
                ensure(c.contains(&f, &comp), || {
                    format!("component {} of {} escapes", comp.to_text(&f), g.to_text(&f))
                })?;
                checked += 1;
            }
        }
    }
    Ok((format!("{checked} components"), None))
}

fn escalation(q: u64) -> Outcome {
    let f = gf(q)?;
    for t in 1..=50 {
        verify_escalation(&f, t, &power_escalation(&f, t)).map_err(|e| format!("t = {t}: {e}"))?;
    }
    Ok(("t <= 50".into(), None))
}

fn jobs(opts: &SuiteOptions) -> Vec<Job> {
    let pr = opts.profile;
    let dir = opts.fixtures.clone();
    let fixture = move |id: &'static str, claim: &str, name: &'static str, q: u64| {
        let dir = dir.clone();
        let mut j = job(id, claim, Params::q(q), move || replay_passes(dir.as_deref(), name));
        j.certificate = Some(format!("fixtures/{name}.json"));
        j
    };
    let mut out = Vec::new();
    for q in pr.orders(&[2, 3], &[2, 3, 4, 5, 8, 9]) {
        out.push(job("field-laws", "a^q = a, (a + b)^p = a^p + b^p, a a^-1 = 1", Params::q(q), move || field_laws(q)));
    }
    let v_orders = pr.orders(&[3], &[3, 5]);
    for &q in &v_orders {
        for n in 0..=1 {
            for m in 1..=2 {
                if (q as f64).powi(1 << (n + m)) > 1e6 {
                    continue;
                }
                let params = Params { q, n: Some(n), m: Some(m), d: None };
                out.push(job("v-difference", "x - x^(q^(2^(n+m))) lies in V_n", params, move || v_difference(q, n, m)));
            }
        }
        for (n, m) in [(0, 1), (0, 2), (1, 2)] {
            let params = Params { q, n: Some(n), m: Some(m), d: None };
            out.push(job("v-sum", "V_n + V_m is all of k[x]_0", params, move || v_sum(q, n, m)));
        }
        for n in 0..=1u32 {
            let period = q.pow(1 << n) + 1;
            let params = Params { q, n: Some(n), ..Params::default() };
            out.push(job("v-proper", "x is not in V_n", params, move || proper(q, format!("V:{n}"), period)));
        }
    }
    let mut w_proper: Vec<(u64, u32)> = vec![(2, 1), (2, 2), (2, 3)];
    if pr == Profile::Full {
        w_proper.push((4, 1));
    }
    for (q, n) in w_proper {
        let params = Params { q, n: Some(n), ..Params::default() };
        out.push(job("w-proper", "x is not in W_n", params, move || proper(q, format!("W:{n}"), q.pow(n) + 1)));
    }
    for n in 1..=2 {
        for d in [10, 12] {
            let params = Params { q: 2, n: Some(n), m: None, d: Some(d) };
            out.push(job("w-spanning-set", "the W_n schemas span {x + x^q, x^(q^n+1)}^S", params, move || {
                w_spanning(n, d)
            }));
        }
    }
    out.push(fixture("w-sum", "W_(q^n) + W_(q^m) is all of k[x]_0", "wsum_q2", 2));
    out.push(fixture("v-sum-chain", "V_n + V_m is all of k[x]_0, by replay", "vsum_q3", 3));
    out.push(job(
        "w1-maximal",
        "W_1 is maximal in GF(2)[x]_0",
        Params { q: 2, n: Some(1), m: None, d: Some(11) },
        || maximal(Target::W1, 11),
    ));
    out.push(fixture("w1-maximal-chain", "W_1 + {f}^S contains x for f not in W_1", "w1_max", 2));
    out.push(job(
        "w2-maximal",
        "GF(2)[x]_0 / W_2 is spanned by x, x^3, x^7",
        Params { q: 2, n: Some(2), m: None, d: Some(11) },
        || maximal(Target::W2, 11),
    ));
    out.push(fixture("w2-cases", "W_2 + {f}^S contains x in every case", "w2_cases", 2));
    out.push(job("w2-proper-x7", "x^7 is not in W_2", Params { q: 2, n: Some(2), ..Params::default() }, x7_not_in_w2));
    out.push(fixture("p-chain", "{x + x^2, x^7}^S contains x", "p_chain", 2));
    out.push(job(
        "p-closure",
        "{x + x^2, x^7}^S is everything up to degree 13",
        Params { q: 2, n: None, m: None, d: Some(13) },
        p_closure,
    ));
    out.push(job("p-chain-negative", "a corrupted chain fails at the corrupted step", Params::q(2), p_chain_negative));
    for n in 1..=2 {
        let params = Params { q: 2, n: Some(n), m: None, d: Some(10) };
        out.push(job("unitary-lift", "W_n^S = k + W_n^(S_0)", params, move || unitary_oracle(n, 10)));
    }
    out.push(job("unitary-sum", "k + W_1 + W_2 is all of k[x]", Params::q(2), unitary_sum));
    for q in pr.orders(&[2], &[2, 4]) {
        out.push(job(
            "wmax",
            "g lies in W iff g is constant on k",
            Params { q, n: None, m: None, d: Some(q + 2) },
            move || wmax_exhaustive(q),
        ));
    }
    out.push(fixture("wmax-maximal", "W + {f}^S contains x for f not in W", "unitary_w", 4));
    for q in pr.orders(&[3], &[3, 4, 5]) {
        out.push(job("vandermonde", "Vandermonde extraction gives the q-components", Params::q(q), move || {
            vandermonde(q)
        }));
    }
    out.push(job(
        "components",
        "q-components of members are members",
        Params { q: 3, n: None, m: None, d: Some(8) },
        || component_closure(8),
    ));
    for q in pr.orders(&[2, 3], &[2, 3, 4, 5]) {
        out.push(job("escalation", "x^t leads to x modulo W0", Params::q(q), move || escalation(q)));
    }
    out
}

fn digest(checks: &[CheckReport]) -> String {
    let stable: Vec<CheckReport> = checks.iter().cloned().map(|c| CheckReport { wall_ms: 0, ..c }).collect();
    let bytes = serde_json::to_vec(&stable).expect("serializable");
    hex::encode(Sha256::digest(bytes))
}

/// Runs every check. Failures are report entries, never errors.
pub fn verify_with(opts: &SuiteOptions) -> VerificationReport {
    let jobs = jobs(opts);
    let results: Vec<(u64, Outcome)> = jobs
        .par_iter()
        .map(|j| {
            let t = Instant::now();
            let out = (j.run)();
            (t.elapsed().as_millis() as u64, out)
        })
        .collect();
    let mut checks = Vec::new();
    for (j, (ms, out)) in jobs.into_iter().zip(results) {
        let mut certificate = j.certificate;
        let (passed, detail) = match out {
            Ok((detail, cert)) => {
                if let (Some(dir), Some(cert)) = (&opts.certs, cert) {
                    let path = dir.join(format!("{}-{}.json", j.id, j.params.tag()));
                    let body = serde_json::to_string_pretty(&cert).expect("serializable");
                    match std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, body)) {
                        Ok(()) => certificate = Some(path.display().to_string()),
                        Err(e) => return failed_io(opts, checks, j.id, j.claim, j.params, e),
                    }
                }
                (true, detail)
            }
            Err(e) => (false, e),
        };
        checks.push(CheckReport {
            id: j.id.into(),
            claim: j.claim,
            params: j.params,
            passed,
            detail,
            certificate,
            wall_ms: ms,
        });
    }
    finish(opts, checks)
}

fn failed_io(
    opts: &SuiteOptions,
    mut checks: Vec<CheckReport>,
    id: &str,
    claim: String,
    params: Params,
    e: std::io::Error,
) -> VerificationReport {
    let detail = format!("writing certificate: {e}");
    checks.push(CheckReport { id: id.into(), claim, params, passed: false, detail, certificate: None, wall_ms: 0 });
    finish(opts, checks)
}

fn finish(opts: &SuiteOptions, checks: Vec<CheckReport>) -> VerificationReport {
    VerificationReport {
        version: env!("CARGO_PKG_VERSION").into(),
        profile: opts.profile,
        passed: checks.iter().all(|c| c.passed),
        digest: digest(&checks),
        checks,
    }
}

/// Validates a certificate on its own: member steps are summed, functionals
/// are re-checked against the residue equations and random instances, pivot
/// gaps are re-derived densely. No membership search is run.
pub fn check_certificate(cert: &CertificateJson) -> Result<(), String> {
    let f = cert.field_spec().map_err(err)?;
    let target = cert.target_poly(&f).map_err(err)?;
    let space = cert.space.as_deref().ok_or("certificate names no space")?;
    if space.starts_with("U:") {
        let c = cert.constant_term(&f).map_err(err)?;
        ensure(c == target.constant_term(), || "constant does not match the target".into())?;
        return match UnitarySpace::parse(&f, space).map_err(err)? {
            UnitarySpace::Wmax(_) => {
                let member = wmax_membership(&f, &target);
                ensure(member == (cert.verdict == "member"), || format!("remainder says member = {member}"))
            }
            UnitarySpace::Lifted(d) => {
                let v = cert.verdict(&f).map_err(err)?;
                check_verdict(&f, &d.base().view(), &target.strip_constant(), &v, 0)
            }
        };
    }
    let desc = TSpaceDesc::parse(&f, space).map_err(err)?;
    let v = cert.verdict(&f).map_err(err)?;
    check_verdict(&f, &desc.view(), &target, &v, 0)
}

pub fn verify_suite(profile: Profile) -> VerificationReport {
    verify_with(&SuiteOptions::new(profile))
}

/// Check ids grouped for display.
pub fn summary(report: &VerificationReport) -> BTreeMap<String, (usize, usize)> {
    let mut out: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for c in &report.checks {
        let e = out.entry(c.id.clone()).or_default();
        e.0 += c.passed as usize;
        e.1 += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let r = verify_suite(Profile::Quick);
        let bad: Vec<_> = r.failures().map(|c| format!("{} {:?}: {}", c.id, c.params, c.detail)).collect();
        assert!(r.passed, "{bad:#?}");
    }

    #[test]
    fn digest_is_stable() {
        let a = verify_suite(Profile::Quick);
        let b = verify_suite(Profile::Quick);
        assert_eq!(a.digest, b.digest);
    }

    #[test]
    fn corrupted_fixtures_fail_by_name() {
        let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/mutated");
        let opts = SuiteOptions { profile: Profile::Quick, fixtures: Some(dir), certs: None };
        let r = verify_with(&opts);
        assert!(!r.passed);
        let failed: Vec<&str> = r.failures().map(|c| c.id.as_str()).collect();
        assert_eq!(failed, ["w-sum", "v-sum-chain", "w1-maximal-chain", "w2-cases", "p-chain", "wmax-maximal"]);
        let p = r.checks.iter().find(|c| c.id == "p-chain").unwrap();
        assert!(p.detail.contains("e11 differs"), "{}", p.detail);
    }

    #[test]
    fn certificates_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let opts = SuiteOptions { profile: Profile::Quick, fixtures: None, certs: Some(dir.path().into()) };
        let r = verify_with(&opts);
        assert!(r.passed);
        let c = r.checks.iter().find(|c| c.id == "v-sum").unwrap();
        let text = std::fs::read_to_string(c.certificate.as_ref().unwrap()).unwrap();
        let cert: CertificateJson = serde_json::from_str(&text).unwrap();
        assert_eq!(cert.verdict, "member");
        check_certificate(&cert).unwrap();
        let mut bad = cert.clone();
        bad.steps.pop();
        assert!(check_certificate(&bad).is_err());
    }
}
