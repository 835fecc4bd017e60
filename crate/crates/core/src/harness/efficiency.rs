use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::protocol::{RunReport, Variant};
use crate::{Error, Result};

pub type Rational = Ratio<u64>;

/// `η₁ = c/q`.
pub fn eta1(c: u64, q: u64) -> Result<Rational> {
    if q == 0 {
        return Err(Error::ZeroQubits);
    }
    Ok(Ratio::new(c, q))
}

/// `η₂ = c/(q + b)`.
pub fn eta2(c: u64, q: u64, b: u64) -> Result<Rational> {
    if q + b == 0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(Ratio::new(c, q + b))
}

/// Values a completed run of `variant` must reach: 1/2 and 1/3 with order
/// disclosure, 1/2 and 1/2 without.
pub fn analytic_efficiency(variant: Variant) -> (Rational, Rational) {
    if variant.is_multi_round() {
        (Ratio::new(1, 2), Ratio::new(1, 2))
    } else {
        (Ratio::new(1, 2), Ratio::new(1, 3))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EfficiencyReport {
    #[serde(serialize_with = "as_fraction")]
    pub eta1: Rational,
    #[serde(serialize_with = "as_fraction")]
    pub eta2: Rational,
    pub c: u64,
    pub q: u64,
    pub b: u64,
}

impl EfficiencyReport {
    pub fn new(c: u64, q: u64, b: u64) -> Result<Self> {
        Ok(Self {
            eta1: eta1(c, q)?,
            eta2: eta2(c, q, b)?,
            c,
            q,
            b,
        })
    }

    pub fn from_report(report: &RunReport) -> Result<Self> {
        Self::new(report.c, report.q, report.b)
    }
}

/// Always `num/den`, so `1` prints as `"1/1"`.
fn as_fraction<S: Serializer>(r: &Rational, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    serializer.collect_str(&format_args!("{}/{}", r.numer(), r.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_values() {
        for n in 1..6 {
            assert_eq!(eta1(n, 2 * n).unwrap(), Ratio::new(1, 2));
            assert_eq!(eta2(n, 2 * n, n).unwrap(), Ratio::new(1, 3));
            assert_eq!(eta2(n, 2 * n, 0).unwrap(), eta1(n, 2 * n).unwrap());
        }
        assert_eq!(eta1(0, 5).unwrap(), Ratio::from_integer(0));
        assert_eq!(eta2(0, 5, 1).unwrap(), Ratio::from_integer(0));
        let half = eta1(4, 8).unwrap();
        assert_eq!((*half.numer(), *half.denom()), (1, 2));
    }

    #[test]
    fn zero_denominators() {
        assert!(matches!(eta1(1, 0), Err(Error::ZeroQubits)));
        assert!(matches!(eta2(0, 0, 0), Err(Error::ZeroDenominator)));
    }

    #[test]
    fn serializes_as_fraction_strings() {
        let r = EfficiencyReport::new(6, 12, 6).unwrap();
        let v = serde_json::to_value(r).unwrap();
        assert_eq!(v["eta1"], "1/2");
        assert_eq!(v["eta2"], "1/3");
    }
}
