//! JSON encoding of membership verdicts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::functional::PeriodicFunctional;
use super::membership::{CertStep, MemberCert, MembershipVerdict, NonMemberWitness, Source};
use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldJson, FieldSpec};
use crate::poly::{Ambient, Exp, SparsePoly, TermJson};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SourceJson {
    Schema { schema: String, params: BTreeMap<String, u64> },
    Generator { generator: String, subst: Vec<TermJson> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepJson {
    pub source: SourceJson,
    pub scalar: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalJson {
    pub period: u64,
    pub weights: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub verdict: String,
    pub field: FieldJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
    pub target: Vec<TermJson>,
    /// Constant term split off before deciding membership in a unitary space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<Vec<u32>>,
    #[serde(default)]
    pub steps: Vec<StepJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<FunctionalJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
}

fn ambient_of(terms: &[TermJson]) -> Ambient {
    if terms.iter().any(|t| t.exp == "0") {
        Ambient::Unitary
    } else {
        Ambient::Nonunitary
    }
}

pub fn poly_from_json(f: &FieldSpec, terms: &[TermJson]) -> Result<SparsePoly> {
    SparsePoly::from_json(f, terms, ambient_of(terms))
}

pub fn steps_to_json(f: &FieldSpec, steps: &[CertStep]) -> Vec<StepJson> {
    steps
        .iter()
        .map(|s| StepJson {
            source: match &s.source {
                Source::Schema { schema, params } => {
                    SourceJson::Schema { schema: schema.clone(), params: params.clone() }
                }
                Source::Generator { generator, subst } => {
                    SourceJson::Generator { generator: generator.clone(), subst: subst.to_json(f) }
                }
            },
            scalar: f.residue(s.scalar),
        })
        .collect()
}

pub fn steps_from_json(f: &FieldSpec, steps: &[StepJson]) -> Result<Vec<CertStep>> {
    steps
        .iter()
        .map(|s| {
            let source = match &s.source {
                SourceJson::Schema { schema, params } => {
                    Source::Schema { schema: schema.clone(), params: params.clone() }
                }
                SourceJson::Generator { generator, subst } => {
                    Source::Generator { generator: generator.clone(), subst: poly_from_json(f, subst)? }
                }
            };
            Ok(CertStep { source, scalar: f.from_residue(&s.scalar)? })
        })
        .collect()
}

impl CertificateJson {
    pub fn new(f: &FieldSpec, space: Option<&str>, target: &SparsePoly, verdict: &MembershipVerdict) -> Self {
        let mut out = CertificateJson {
            verdict: verdict.label().to_string(),
            field: f.to_json(),
            space: space.map(str::to_string),
            target: target.to_json(f),
            constant: None,
            steps: Vec::new(),
            functional: None,
            gap: None,
            bound: None,
        };
        match verdict {
            MembershipVerdict::Member(cert) => out.steps = steps_to_json(f, &cert.steps),
            MembershipVerdict::NonMember(NonMemberWitness::Functional(lam)) => {
                out.functional = Some(FunctionalJson {
                    period: lam.period,
                    weights: lam.weights.iter().map(|&w| f.residue(w)).collect(),
                })
            }
            MembershipVerdict::NonMember(NonMemberWitness::PivotGap { exponent, trail }) => {
                out.gap = Some(exponent.to_string());
                out.steps = steps_to_json(f, trail);
            }
            MembershipVerdict::Unknown(bound) => out.bound = Some(*bound),
        }
        out
    }

    pub fn field_spec(&self) -> Result<FieldSpec> {
        FieldSpec::from_json(&self.field)
    }

    pub fn target_poly(&self, f: &FieldSpec) -> Result<SparsePoly> {
        poly_from_json(f, &self.target)
    }

    pub fn constant_term(&self, f: &FieldSpec) -> Result<FieldElement> {
        match &self.constant {
            Some(c) => f.from_residue(c),
            None => Ok(f.zero()),
        }
    }

    /// Rebuilds the verdict the certificate encodes.
    pub fn verdict(&self, f: &FieldSpec) -> Result<MembershipVerdict> {
        let steps = steps_from_json(f, &self.steps)?;
        match self.verdict.as_str() {
            "member" => Ok(MembershipVerdict::Member(MemberCert { steps })),
            "nonmember" => match (&self.functional, &self.gap) {
                (Some(lam), None) => {
                    let weights = lam.weights.iter().map(|w| f.from_residue(w)).collect::<Result<_>>()?;
                    Ok(MembershipVerdict::NonMember(NonMemberWitness::Functional(PeriodicFunctional {
                        period: lam.period,
                        weights,
                    })))
                }
                (None, Some(gap)) => {
                    let exponent: Exp = gap.parse().map_err(|_| Error::Parse(format!("bad gap `{gap}`")))?;
                    Ok(MembershipVerdict::NonMember(NonMemberWitness::PivotGap { exponent, trail: steps }))
                }
                _ => Err(Error::Parse("nonmember certificate needs exactly one of functional, gap".into())),
            },
            "unknown" => Ok(MembershipVerdict::Unknown(self.bound.unwrap_or(0))),
            other => Err(Error::Parse(format!("unknown verdict `{other}`"))),
        }
    }
}
