//! T-spaces of the unitary algebra `k[x]`: `k + V` for the families where
//! that law holds, and the maximal space of polynomials constant on `k`.

use std::fmt;

use crate::error::{Error, Result};
use crate::families::{Family, TSpaceDesc};
use crate::gf::{FieldElement, FieldSpec};
use crate::linspan::{MembershipVerdict, DEFAULT_CUTOFF};
use crate::poly::SparsePoly;

/// `k + base` inside `k[x]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitaryDesc {
    base: TSpaceDesc,
    include_constants: bool,
}

/// A unitary space named on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnitarySpace {
    Lifted(UnitaryDesc),
    /// Polynomials whose remainder modulo `x^q - x` is constant.
    Wmax(FieldSpec),
}

impl UnitaryDesc {
    /// Lifts a sum of `W:n` and `V:n` parts.
    pub fn lift(base: TSpaceDesc) -> Result<UnitaryDesc> {
        for part in base.parts() {
            if !matches!(part.family, Family::W(_) | Family::V(_)) {
                return Err(Error::BadParams(format!("no unitary lift for {}", part.family)));
            }
        }
        Ok(UnitaryDesc { base, include_constants: true })
    }

    pub fn base(&self) -> &TSpaceDesc {
        &self.base
    }

    pub fn include_constants(&self) -> bool {
        self.include_constants
    }

    pub fn field(&self) -> &FieldSpec {
        self.base.field()
    }

    pub fn name(&self) -> String {
        self.base.parts().iter().map(|p| format!("U:{}", p.family)).collect::<Vec<_>>().join("+")
    }

    pub fn sum(&self, other: &UnitaryDesc) -> Result<UnitaryDesc> {
        Ok(UnitaryDesc {
            base: self.base.sum(&other.base)?,
            include_constants: self.include_constants || other.include_constants,
        })
    }
}

impl fmt::Display for UnitarySpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitarySpace::Lifted(d) => f.write_str(&d.name()),
            UnitarySpace::Wmax(_) => f.write_str("U:Wmax"),
        }
    }
}

impl UnitarySpace {
    /// Parses `U:W:1`, `U:V:0+U:V:1` or `U:Wmax`.
    pub fn parse(f: &FieldSpec, names: &str) -> Result<UnitarySpace> {
        let names: Vec<&str> = names.split([',', '+']).map(str::trim).collect();
        if names == ["U:Wmax"] {
            return Ok(UnitarySpace::Wmax(f.clone()));
        }
        let mut base = Vec::new();
        for n in names {
            let inner = n.strip_prefix("U:").ok_or_else(|| Error::Parse(format!("`{n}` is not a unitary family")))?;
            if inner == "Wmax" {
                return Err(Error::BadParams("U:Wmax cannot be summed with other spaces".into()));
            }
            base.push(inner);
        }
        UnitaryDesc::lift(TSpaceDesc::parse(f, &base.join(","))?).map(UnitarySpace::Lifted)
    }

    pub fn field(&self) -> &FieldSpec {
        match self {
            UnitarySpace::Lifted(d) => d.field(),
            UnitarySpace::Wmax(f) => f,
        }
    }
}

/// Splits `g` into its constant term and the rest.
pub fn split_constant(g: &SparsePoly) -> (FieldElement, SparsePoly) {
    (g.constant_term(), g.strip_constant())
}

/// Membership in `k + base`: the constant is free, the rest is decided in
/// the base space. Certificates and witnesses refer to `g - g(0)`.
pub fn unitary_membership(d: &UnitaryDesc, g: &SparsePoly, cutoff: u64) -> Result<MembershipVerdict> {
    let (c, rest) = split_constant(g);
    if !c.is_zero() && !d.include_constants {
        return Err(Error::AmbientViolation);
    }
    d.base.decide(&rest, cutoff)
}

/// Whether `g` mod `x^q - x` is a constant, i.e. `g` is constant on `k`.
pub fn wmax_membership(f: &FieldSpec, g: &SparsePoly) -> bool {
    g.rem_frobenius_modulus(f).terms().all(|(e, _)| e.bits() == 0)
}

/// The answer to "is `a + b` all of `k[x]`".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitaryCover {
    /// Membership of `x` in the nonunitary part of the sum.
    pub x: MembershipVerdict,
    pub constants: bool,
}

impl UnitaryCover {
    pub fn covers(&self) -> bool {
        self.x.is_member() && self.constants
    }
}

pub fn unitary_covers(a: &UnitaryDesc, b: &UnitaryDesc, cutoff: u64) -> Result<UnitaryCover> {
    let sum = a.sum(b)?;
    Ok(UnitaryCover { x: sum.base.covers_all(cutoff)?, constants: sum.include_constants })
}

/// [`unitary_membership`] at the default cutoff.
pub fn unitary_member(d: &UnitaryDesc, g: &SparsePoly) -> Result<MembershipVerdict> {
    unitary_membership(d, g, DEFAULT_CUTOFF)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linspan::check_verdict;
    use crate::poly::Ambient;

    fn gf(q: u64) -> FieldSpec {
        FieldSpec::with_order(q).unwrap()
    }

    fn lifted(f: &FieldSpec, name: &str) -> UnitaryDesc {
        match UnitarySpace::parse(f, name).unwrap() {
            UnitarySpace::Lifted(d) => d,
            UnitarySpace::Wmax(_) => panic!(),
        }
    }

    fn upoly(f: &FieldSpec, s: &str) -> SparsePoly {
        SparsePoly::parse(f, s, Ambient::Unitary).unwrap()
    }

    #[test]
    fn constant_plus_member() {
        let f = gf(2);
        let d = lifted(&f, "U:W:1");
        assert!(unitary_member(&d, &upoly(&f, "1 + x^3")).unwrap().is_member());
        assert!(unitary_member(&d, &upoly(&f, "1")).unwrap().is_member());
        let v = unitary_member(&d, &upoly(&f, "x")).unwrap();
        assert!(v.is_nonmember());
        check_verdict(&f, &d.base().view(), &SparsePoly::x(), &v, 3).unwrap();
    }

    #[test]
    fn wmax_examples() {
        let f2 = gf(2);
        assert!(wmax_membership(&f2, &upoly(&f2, "x + x^2")));
        assert!(!wmax_membership(&f2, &upoly(&f2, "x")));
        let f4 = gf(4);
        assert!(!wmax_membership(&f4, &upoly(&f4, "1 + x^4")));
        assert!(wmax_membership(&f4, &upoly(&f4, "1 + x + x^4")));
    }

    #[test]
    fn covers() {
        let f = gf(2);
        assert!(unitary_covers(&lifted(&f, "U:W:1"), &lifted(&f, "U:W:2"), 64).unwrap().covers());
        let same = unitary_covers(&lifted(&f, "U:W:1"), &lifted(&f, "U:W:1"), 64).unwrap();
        assert!(same.x.is_nonmember());
        let f3 = gf(3);
        assert!(unitary_covers(&lifted(&f3, "U:V:0"), &lifted(&f3, "U:V:1"), 64).unwrap().covers());
    }

    #[test]
    fn names() {
        let f = gf(2);
        assert_eq!(UnitarySpace::parse(&f, "U:W:1+U:W:2").unwrap().to_string(), "U:W:1+U:W:2");
        assert_eq!(UnitarySpace::parse(&f, "U:Wmax").unwrap().to_string(), "U:Wmax");
        assert!(UnitarySpace::parse(&f, "U:W0").is_err());
        assert!(UnitarySpace::parse(&f, "W:1").is_err());
    }
}
