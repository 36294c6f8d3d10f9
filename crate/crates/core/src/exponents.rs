//! Lebesgue exponent tuples, the `b(p)` transform and classification against
//! a Newton polytope.

use std::fmt;
use std::str::FromStr;

use num::{BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::polytope::NewtonPolytope;
use crate::symalg::parse_rational;

/// A single exponent `p_j`, a positive rational or `∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exponent {
    Finite(BigRational),
    Infinite,
}

impl Exponent {
    pub fn reciprocal(&self) -> BigRational {
        match self {
            Exponent::Finite(p) => BigRational::one() / p,
            Exponent::Infinite => BigRational::zero(),
        }
    }

    pub fn at_least_one(&self) -> bool {
        match self {
            Exponent::Finite(p) => p >= &BigRational::one(),
            Exponent::Infinite => true,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

/// `(p_1, …, p_k)`; entries are positive, and below one only when probing
/// the `p_j < 1` failure mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentTuple(Vec<Exponent>);

impl ExponentTuple {
    pub fn new(entries: Vec<Exponent>) -> Result<Self> {
        for e in &entries {
            if let Exponent::Finite(p) = e {
                if !p.is_positive() {
                    return Err(Error::Inadmissible(format!("exponent {p} is not positive")));
                }
            }
        }
        Ok(ExponentTuple(entries))
    }

    pub fn finite(values: Vec<BigRational>) -> Result<Self> {
        ExponentTuple::new(values.into_iter().map(Exponent::Finite).collect())
    }

    pub fn entries(&self) -> &[Exponent] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromStr for ExponentTuple {
    type Err = Error;

    /// `2,2,2` or `3/2,inf`.
    fn from_str(s: &str) -> Result<Self> {
        let entries = s
            .split(',')
            .map(|tok| {
                let t = tok.trim();
                match t {
                    "inf" | "∞" | "infinity" => Ok(Exponent::Infinite),
                    _ => parse_rational(t).map(Exponent::Finite),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if entries.is_empty() {
            return Err(Error::parse("empty exponent list"));
        }
        ExponentTuple::new(entries)
    }
}

impl fmt::Display for ExponentTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// `σ(p) = Σ_j 1/p_j` with `1/∞ = 0`.
pub fn sigma(p: &ExponentTuple) -> BigRational {
    p.0.iter().fold(BigRational::zero(), |acc, e| acc + e.reciprocal())
}

/// `b_i = p_i^{-1} / (σ − 1)`, defined when `σ > 1` and every `p_j ≥ 1`.
pub fn b_of_p(p: &ExponentTuple) -> Result<Vec<BigRational>> {
    if let Some(bad) = p.0.iter().find(|e| !e.at_least_one()) {
        return Err(Error::Inadmissible(format!("exponent {bad} is below 1")));
    }
    let s = sigma(p);
    if s <= BigRational::one() {
        return Err(Error::Inadmissible(format!("sum of reciprocals {s} is not above 1")));
    }
    let denom = s - BigRational::one();
    Ok(p.0.iter().map(|e| e.reciprocal() / &denom).collect())
}

/// Inverse of [`b_of_p`]: `p_i = (Σb − 1)/b_i`, with `b_i = 0 ↦ ∞`.
pub fn p_of_b(b: &[BigRational]) -> Result<ExponentTuple> {
    if b.iter().any(|x| x.is_negative()) {
        return Err(Error::Inadmissible("negative entry in b".into()));
    }
    let total = b.iter().fold(BigRational::zero(), |acc, x| acc + x);
    if total <= BigRational::one() {
        return Err(Error::Inadmissible(format!("sum of b is {total}, must exceed 1")));
    }
    let num = total - BigRational::one();
    let entries = b
        .iter()
        .map(|bi| {
            if bi.is_zero() {
                Ok(Exponent::Infinite)
            } else if bi > &num {
                Err(Error::Inadmissible(format!("b entry {bi} exceeds Σb − 1 = {num}")))
            } else {
                Ok(Exponent::Finite(&num / bi))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    ExponentTuple::new(entries)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    HolderTrivial,
    FailsPBelowOne,
    StrongType,
    NotRestrictedWeakType,
    EndpointUnknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::HolderTrivial => "HOLDER_TRIVIAL",
            Verdict::FailsPBelowOne => "FAILS_P_BELOW_ONE",
            Verdict::StrongType => "STRONG_TYPE",
            Verdict::NotRestrictedWeakType => "NOT_RESTRICTED_WEAK_TYPE",
            Verdict::EndpointUnknown => "ENDPOINT_UNKNOWN",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub verdict: Verdict,
    pub b: Option<Vec<BigRational>>,
    /// Interior margin `t*` when the polytope is nonempty and `b` is defined.
    pub margin: Option<BigRational>,
    pub certificate: Option<String>,
}

/// Classifies `p` against `P` (which may be empty).
pub fn classify(p: &ExponentTuple, polytope: &NewtonPolytope) -> Result<Classification> {
    if p.len() != polytope.arity() {
        return Err(Error::ArityMismatch { expected: polytope.arity(), found: p.len() });
    }
    if p.0.iter().any(|e| !e.at_least_one()) {
        return Ok(Classification {
            verdict: Verdict::FailsPBelowOne,
            b: None,
            margin: None,
            certificate: Some("some p_j < 1: small-ball test functions violate the bound".into()),
        });
    }
    if sigma(p) <= BigRational::one() {
        return Ok(Classification {
            verdict: Verdict::HolderTrivial,
            b: None,
            margin: None,
            certificate: Some("sum of reciprocals <= 1: bounded by Holder".into()),
        });
    }
    let b = b_of_p(p)?;
    if polytope.is_empty() {
        return Ok(Classification {
            verdict: Verdict::NotRestrictedWeakType,
            b: Some(b),
            margin: None,
            certificate: Some("Hormander fails".into()),
        });
    }
    let margin = polytope.interior_margin(&b)?.expect("nonempty polytope has a margin");
    let verdict = if margin.is_positive() {
        Verdict::StrongType
    } else if margin.is_zero() {
        Verdict::EndpointUnknown
    } else {
        Verdict::NotRestrictedWeakType
    };
    // the margin LP and the membership LP must agree on the boundary
    debug_assert_eq!(!margin.is_negative(), polytope.contains(&b)?);
    Ok(Classification { verdict, b: Some(b), margin: Some(margin), certificate: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symalg::rat;

    fn pt(s: &str) -> ExponentTuple {
        s.parse().unwrap()
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(&pt("2,2,2")), rat(3, 2));
        assert_eq!(sigma(&pt("inf,inf")), rat(0, 1));
        assert_eq!(sigma(&pt("3/2,3/2")), rat(4, 3));
    }

    #[test]
    fn b_of_p_examples() {
        assert_eq!(b_of_p(&pt("2,2,2")).unwrap(), vec![rat(1, 1); 3]);
        assert_eq!(b_of_p(&pt("3/2,3/2")).unwrap(), vec![rat(2, 1); 2]);
        assert_eq!(b_of_p(&pt("1,2")).unwrap(), vec![rat(2, 1), rat(1, 1)]);
        assert_eq!(b_of_p(&pt("1,inf")).unwrap_err(), Error::Inadmissible("sum of reciprocals 1 is not above 1".into()));
        assert!(matches!(b_of_p(&pt("1/2,2")), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn p_of_b_examples() {
        assert_eq!(p_of_b(&vec![rat(1, 1); 3]).unwrap(), pt("2,2,2"));
        assert_eq!(p_of_b(&vec![rat(2, 1); 2]).unwrap(), pt("3/2,3/2"));
        assert_eq!(p_of_b(&[rat(2, 1), rat(1, 1)]).unwrap(), pt("1,2"));
        assert_eq!(p_of_b(&[rat(3, 2), rat(3, 2), rat(0, 1)]).unwrap(), pt("4/3,4/3,inf"));
        assert!(p_of_b(&[rat(1, 2), rat(1, 2)]).is_err());
        assert!(p_of_b(&[rat(3, 1), rat(1, 2)]).is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!(pt("3/2, inf").entries()[1], Exponent::Infinite);
        assert!("0,2".parse::<ExponentTuple>().is_err());
        assert!("-1,2".parse::<ExponentTuple>().is_err());
        assert!("a,2".parse::<ExponentTuple>().is_err());
    }

    #[test]
    fn classification_examples() {
        let lw = NewtonPolytope::from_generators(2, vec![vec![1, 1]]).unwrap();
        assert_eq!(classify(&pt("3,3"), &lw).unwrap().verdict, Verdict::HolderTrivial);
        let c = classify(&pt("3/2,3/2"), &lw).unwrap();
        assert_eq!(c.verdict, Verdict::StrongType);
        assert_eq!(c.b.unwrap(), vec![rat(2, 1); 2]);
        assert_eq!(c.margin.unwrap(), rat(1, 1));
        let c = classify(&pt("1,1"), &lw).unwrap();
        assert_eq!(c.verdict, Verdict::EndpointUnknown);
        assert_eq!(c.margin.unwrap(), rat(0, 1));
        assert_eq!(classify(&pt("1/2,3"), &lw).unwrap().verdict, Verdict::FailsPBelowOne);

        let tw = NewtonPolytope::from_generators(2, vec![vec![2, 1], vec![1, 2]]).unwrap();
        assert_eq!(classify(&pt("7/6,7/6"), &tw).unwrap().verdict, Verdict::NotRestrictedWeakType);

        let empty = NewtonPolytope::empty(2);
        let c = classify(&pt("3/2,3/2"), &empty).unwrap();
        assert_eq!(c.verdict, Verdict::NotRestrictedWeakType);
        assert_eq!(c.certificate.as_deref(), Some("Hormander fails"));
        assert!(classify(&pt("2,2,2"), &lw).is_err());
    }
}
