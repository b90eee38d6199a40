//! Deriving `x` from `x^t` in any T-space that contains W0 and `x^t`.

use crate::gf::FieldSpec;
use crate::poly::{fold_exponent, Exp, SparsePoly};

use super::special::w0_membership;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// `x^from - x^to` is divisible by `x^q - x`.
    Fold,
    /// `x^to` is the image of `x^from` under `x -> subst`.
    Frobenius { subst: u64 },
    /// `x^to` is `from^{-1}` times the class of `to` in `(x + x^2)^from`.
    Climb,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EscalationStep {
    pub kind: StepKind,
    pub from: u64,
    pub to: u64,
}

/// The chain `x^t -> ... -> x`: fold exponents below `q`, remove factors
/// of `p` by a Frobenius substitution, otherwise climb to `t + 1`.
pub fn power_escalation(f: &FieldSpec, t: u64) -> Vec<EscalationStep> {
    assert!(t >= 1, "exponent must be positive");
    let (p, m, q) = (f.p() as u64, f.m(), f.q() as u64);
    let mut chain = Vec::new();
    let mut t = t;
    while t != 1 {
        let step = if t >= q {
            EscalationStep { kind: StepKind::Fold, from: t, to: fold_exponent(&Exp::from(t), f.q()) }
        } else if t.is_multiple_of(p) {
            let mut s = 0;
            while t.is_multiple_of(p.pow(s + 1)) {
                s += 1;
            }
            let subst = p.pow(m - s);
            EscalationStep { kind: StepKind::Frobenius { subst }, from: t, to: t * subst }
        } else {
            EscalationStep { kind: StepKind::Climb, from: t, to: t + 1 }
        };
        t = step.to;
        chain.push(step);
    }
    chain
}

/// Checks every step by exact arithmetic. `Err` names the first bad step.
pub fn verify_escalation(f: &FieldSpec, t: u64, chain: &[EscalationStep]) -> Result<(), String> {
    let mut cur = t;
    for (k, step) in chain.iter().enumerate() {
        let fail = |why: &str| Err(format!("step {k} ({} -> {}): {why}", step.from, step.to));
        if step.from != cur {
            return fail("does not continue the chain");
        }
        let from = SparsePoly::x_pow(step.from);
        let to = SparsePoly::x_pow(step.to);
        match step.kind {
            StepKind::Fold => {
                let diff = from.sub(f, &to).map_err(|e| e.to_string())?;
                if !w0_membership(f, &diff) {
                    return fail("difference not divisible by x^q - x");
                }
            }
            StepKind::Frobenius { subst } => {
                let image = from.compose(f, &SparsePoly::x_pow(subst)).map_err(|e| e.to_string())?;
                if image != to {
                    return fail("substitution image differs");
                }
            }
            StepKind::Climb => {
                if f.q() < 3 {
                    return fail("no homogeneous split over GF(2)");
                }
                let u = SparsePoly::from_exponents(f, &[1, 2]);
                let image = from.compose(f, &u).map_err(|e| e.to_string())?;
                let comps = image.vandermonde_extract(f).map_err(|e| e.to_string())?;
                let class = fold_exponent(&Exp::from(step.to), f.q()) as usize;
                let coef = f.from_int((step.from % f.p() as u64) as i64);
                if coef.is_zero() || comps[class - 1] != to.scale(f, coef) {
                    return fail("component is not a nonzero multiple of x^to");
                }
            }
        }
        cur = step.to;
    }
    if cur != 1 {
        return Err(format!("chain ends at x^{cur}"));
    }
    Ok(())
}
