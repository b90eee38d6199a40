use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tspaces::families::TSpaceDesc;
use tspaces::linspan::{
    solve_periodic_functional, truncated_closure, CertificateJson, MemberCert, MembershipVerdict, NonMemberWitness,
    DEFAULT_CUTOFF,
};
use tspaces::replay::{load_script, run_script};
use tspaces::rewrite::{build_rules, Target};
use tspaces::unitary::{split_constant, unitary_covers, unitary_membership, wmax_membership, UnitarySpace};
use tspaces::verify::{check_certificate, verify_with, Profile, SuiteOptions};
use tspaces::{Ambient, FieldSpec, SparsePoly};

#[derive(Parser)]
#[command(name = "tspaces", version, about = "Exact T-space computations over finite fields")]
struct Cli {
    /// Also write the JSON result to this file.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct FieldArgs {
    /// Field order.
    #[arg(long)]
    q: u64,
    /// Modulus coefficients, constant term first, e.g. `1,1,1` for x^2 + x + 1.
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u32>>,
    /// Work in k[x] instead of k[x]_0; spaces are then `U:` names.
    #[arg(long)]
    unitary: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide membership of a polynomial in a space.
    Member {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        space: String,
        /// Polynomial text, or @path to read it from a file.
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = DEFAULT_CUTOFF)]
        cutoff: u64,
    },
    /// Decide whether a sum of spaces is the whole algebra.
    Covers {
        #[command(flatten)]
        field: FieldArgs,
        /// Comma-separated space names.
        #[arg(long)]
        spaces: String,
        #[arg(long, default_value_t = DEFAULT_CUTOFF)]
        cutoff: u64,
    },
    /// Search for a periodic functional separating a polynomial from a space.
    Functional {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        space: String,
        #[arg(long)]
        poly: String,
        #[arg(long)]
        period: u64,
    },
    /// Canonical form modulo W1 or W2 over GF(2).
    Reduce {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        space: String,
        #[arg(long)]
        poly: String,
    },
    /// Replay a derivation script.
    Replay { script: PathBuf },
    /// Dimension of the truncated closure of some generators.
    Dim {
        #[command(flatten)]
        field: FieldArgs,
        /// Generators, separated by `;`.
        #[arg(long)]
        gens: String,
        #[arg(long, value_name = "D")]
        truncate: u64,
    },
    /// Run the verification suite.
    Verify {
        #[arg(long, value_enum, default_value_t = ProfileArg::Quick)]
        profile: ProfileArg,
        /// Replace the built-in replay scripts with `<dir>/<name>.json`.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Write certificates into this directory.
        #[arg(long)]
        certs: Option<PathBuf>,
    },
    /// Validate a certificate file without searching.
    Check { certificate: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Quick,
    Full,
}

/// Input problems exit 2, like clap's own usage errors.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Usage {
        Usage(e.to_string())
    }
}

type Out = Result<(Value, u8), Usage>;

fn field(a: &FieldArgs) -> Result<FieldSpec, Usage> {
    let f = FieldSpec::with_order(a.q)?;
    match &a.modulus {
        Some(m) => Ok(FieldSpec::new(f.p() as u64, f.m(), Some(m))?),
        None => Ok(f),
    }
}

fn poly_text(arg: &str) -> Result<String, Usage> {
    match arg.strip_prefix('@') {
        Some(path) => Ok(std::fs::read_to_string(path).map_err(|e| Usage(format!("{path}: {e}")))?.trim().to_string()),
        None => Ok(arg.to_string()),
    }
}

fn ambient(a: &FieldArgs) -> Ambient {
    if a.unitary {
        Ambient::Unitary
    } else {
        Ambient::Nonunitary
    }
}

fn poly(f: &FieldSpec, a: &FieldArgs, arg: &str) -> Result<SparsePoly, Usage> {
    Ok(SparsePoly::parse(f, &poly_text(arg)?, ambient(a))?)
}

fn verdict_json(f: &FieldSpec, space: &str, g: &SparsePoly, v: &MembershipVerdict) -> Value {
    let cert = CertificateJson::new(f, Some(space), g, v);
    json!({ "verdict": v.label(), "space": space, "poly": g.to_text(f), "certificate": cert })
}

fn unitary_json(f: &FieldSpec, space: &UnitarySpace, g: &SparsePoly, cutoff: u64) -> Out {
    let name = space.to_string();
    let (c, _) = split_constant(g);
    let mut out = match space {
        UnitarySpace::Wmax(_) => {
            let label = if wmax_membership(f, g) { "member" } else { "nonmember" };
            let mut cert = CertificateJson::new(f, Some(&name), g, &MembershipVerdict::Member(MemberCert::default()));
            cert.verdict = label.into();
            let r = g.rem_frobenius_modulus(f).to_text(f);
            json!({ "verdict": label, "space": name, "poly": g.to_text(f), "remainder": r, "certificate": cert })
        }
        UnitarySpace::Lifted(d) => verdict_json(f, &name, g, &unitary_membership(d, g, cutoff)?),
    };
    out["certificate"]["constant"] = json!(f.residue(c));
    Ok((out, 0))
}

fn member(fa: &FieldArgs, space: &str, p: &str, cutoff: u64) -> Out {
    let f = field(fa)?;
    let g = poly(&f, fa, p)?;
    if fa.unitary {
        return unitary_json(&f, &UnitarySpace::parse(&f, space)?, &g, cutoff);
    }
    let desc = TSpaceDesc::parse(&f, space)?;
    let v = desc.decide(&g, cutoff)?;
    Ok((verdict_json(&f, &desc.name(), &g, &v), 0))
}

fn covers(fa: &FieldArgs, spaces: &str, cutoff: u64) -> Out {
    let f = field(fa)?;
    if fa.unitary {
        let parts: Vec<&str> = spaces.split([',', '+']).map(str::trim).collect();
        let [a, b] = parts[..] else {
            return Err(Usage("--unitary covers takes exactly two spaces".into()));
        };
        let (UnitarySpace::Lifted(a), UnitarySpace::Lifted(b)) =
            (UnitarySpace::parse(&f, a)?, UnitarySpace::parse(&f, b)?)
        else {
            return Err(Usage("U:Wmax has no sum".into()));
        };
        let cover = unitary_covers(&a, &b, cutoff)?;
        let sum = a.sum(&b)?;
        let x = verdict_json(&f, &sum.name(), &SparsePoly::x(), &cover.x);
        let verdict = if cover.covers() { "member" } else { cover.x.label() };
        return Ok((json!({ "verdict": verdict, "constants": cover.constants, "x": x }), 0));
    }
    let desc = TSpaceDesc::parse(&f, spaces)?;
    let v = desc.covers_all(cutoff)?;
    Ok((verdict_json(&f, &desc.name(), &SparsePoly::x(), &v), 0))
}

fn functional(fa: &FieldArgs, space: &str, p: &str, period: u64) -> Out {
    if period < 2 {
        return Err(Usage("--period must be at least 2".into()));
    }
    let f = field(fa)?;
    let g = poly(&f, fa, p)?;
    let desc = TSpaceDesc::parse(&f, space)?;
    match solve_periodic_functional(&f, desc.schemas(), period, &g)? {
        Some(lam) => {
            let v = MembershipVerdict::NonMember(NonMemberWitness::Functional(lam));
            Ok((verdict_json(&f, &desc.name(), &g, &v), 0))
        }
        None => Ok((json!({ "verdict": "unknown", "space": desc.name(), "poly": g.to_text(&f), "period": period }), 0)),
    }
}

fn reduce(fa: &FieldArgs, space: &str, p: &str) -> Out {
    let f = field(fa)?;
    let sys = build_rules(&f, Target::parse(space)?)?;
    let g = poly(&f, fa, p)?;
    let red = sys.reduce_canonical(&g)?;
    let diff = sys.difference(&g, &red)?;
    let v = MembershipVerdict::Member(red.cert);
    let name = sys.space().name();
    Ok((
        json!({
            "space": name,
            "poly": g.to_text(&f),
            "canonical": red.canonical.to_text(&f),
            "member": red.canonical.is_zero(),
            "certificate": CertificateJson::new(&f, Some(&name), &diff, &v),
        }),
        0,
    ))
}

fn replay(path: &Path) -> Out {
    let script = load_script(path)?;
    let report = run_script(&script);
    let code = if report.passed { 0 } else { 1 };
    Ok((serde_json::to_value(report)?, code))
}

fn dim(fa: &FieldArgs, gens: &str, d: u64) -> Out {
    let f = field(fa)?;
    let gens: Vec<SparsePoly> =
        gens.split(';').filter(|s| !s.trim().is_empty()).map(|s| poly(&f, fa, s.trim())).collect::<Result<_, _>>()?;
    let c = truncated_closure(&f, &gens, d, ambient(fa))?;
    let basis: Vec<String> = c.basis(&f).iter().map(|g| g.to_text(&f)).collect();
    Ok((json!({ "truncate": d, "dim": c.dim(), "ambient_dim": c.ambient_dim(), "basis": basis }), 0))
}

fn verify(profile: ProfileArg, fixtures: Option<PathBuf>, certs: Option<PathBuf>) -> Out {
    let profile = match profile {
        ProfileArg::Quick => Profile::Quick,
        ProfileArg::Full => Profile::Full,
    };
    let report = verify_with(&SuiteOptions { profile, fixtures, certs });
    let code = if report.passed { 0 } else { 1 };
    Ok((serde_json::to_value(report)?, code))
}

fn check(path: &PathBuf) -> Out {
    let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    let mut value: Value = serde_json::from_str(&text)?;
    if let Some(inner) = value.get("certificate") {
        value = inner.clone();
    }
    let cert: CertificateJson = serde_json::from_value(value)?;
    Ok(match check_certificate(&cert) {
        Ok(()) => (json!({ "valid": true, "verdict": cert.verdict }), 0),
        Err(why) => (json!({ "valid": false, "verdict": cert.verdict, "reason": why }), 1),
    })
}

fn run(cli: &Cli) -> Out {
    match &cli.cmd {
        Cmd::Member { field, space, poly, cutoff } => member(field, space, poly, *cutoff),
        Cmd::Covers { field, spaces, cutoff } => covers(field, spaces, *cutoff),
        Cmd::Functional { field, space, poly, period } => functional(field, space, poly, *period),
        Cmd::Reduce { field, space, poly } => reduce(field, space, poly),
        Cmd::Replay { script } => replay(script),
        Cmd::Dim { field, gens, truncate } => dim(field, gens, *truncate),
        Cmd::Verify { profile, fixtures, certs } => verify(*profile, fixtures.clone(), certs.clone()),
        Cmd::Check { certificate } => check(certificate),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (value, code) = match run(&cli) {
        Ok(out) => out,
        Err(Usage(msg)) => (json!({ "error": msg }), 2),
    };
    let text = serde_json::to_string_pretty(&value).expect("serializable");
    if let Some(path) = &cli.json {
        if let Err(e) = std::fs::write(path, format!("{text}\n")) {
            eprintln!("{}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    ExitCode::from(code)
}
