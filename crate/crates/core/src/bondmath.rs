//! One-year zero-coupon bonds and the premium for idiosyncratic quantum risk.
//!
//! Rates are decimal fractions throughout (`0.05` is five percent). A bond
//! exposed to quantum failure pays its face value with probability `rho` and
//! nothing otherwise; risk-neutral arbitrage against a risk-free bond in the
//! same currency then fixes its yield.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Annual yield to maturity as a decimal fraction. Always greater than -1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Yield(f64);

impl Yield {
    pub fn new(rate: f64) -> Result<Self> {
        if !rate.is_finite() || rate <= -1.0 {
            return Err(Error::invalid("ytm", rate, "yield must be finite and > -1"));
        }
        Ok(Yield(rate))
    }

    pub fn rate(self) -> f64 {
        self.0
    }

    /// Gross return `1 + rate`.
    pub fn gross(self) -> f64 {
        1.0 + self.0
    }
}

impl TryFrom<f64> for Yield {
    type Error = Error;

    fn try_from(rate: f64) -> Result<Self> {
        Yield::new(rate)
    }
}

impl From<Yield> for f64 {
    fn from(y: Yield) -> f64 {
        y.0
    }
}

/// Probability that no quantum failure happens before the bond matures.
///
/// Valid on `(0, 1]`. `rho = 1` is the risk-free limit. Zero is rejected: no
/// positive price supports a bond that is certain to pay nothing. The failure
/// probability is always derived as `1 - rho`, never stored.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SurvivalProbability(f64);

impl SurvivalProbability {
    pub const CERTAIN: SurvivalProbability = SurvivalProbability(1.0);

    pub fn new(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::invalid(
                "rho",
                rho,
                "survival probability must lie in (0, 1]",
            ));
        }
        Ok(SurvivalProbability(rho))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn failure(self) -> f64 {
        1.0 - self.0
    }
}

impl TryFrom<f64> for SurvivalProbability {
    type Error = Error;

    fn try_from(rho: f64) -> Result<Self> {
        SurvivalProbability::new(rho)
    }
}

impl From<SurvivalProbability> for f64 {
    fn from(p: SurvivalProbability) -> f64 {
        p.0
    }
}

/// Zero-coupon bond maturing in exactly one year.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroCouponBond {
    face_value: f64,
    currency: String,
}

impl ZeroCouponBond {
    /// Maturity in years. Fixed.
    pub const MATURITY_YEARS: f64 = 1.0;

    pub fn new(face_value: f64, currency: impl Into<String>) -> Result<Self> {
        if !(face_value.is_finite() && face_value > 0.0) {
            return Err(Error::invalid(
                "face_value",
                face_value,
                "face value must be positive",
            ));
        }
        Ok(ZeroCouponBond {
            face_value,
            currency: currency.into(),
        })
    }

    pub fn face_value(&self) -> f64 {
        self.face_value
    }

    pub fn currency(&self) -> &str {
        &self.currency
    }
}

/// Price of a bond with no quantum risk: `A / (1 + i)`.
pub fn price_riskfree(bond: &ZeroCouponBond, ytm: Yield) -> f64 {
    bond.face_value / ytm.gross()
}

/// Yield on the at-risk bond that makes it as attractive as the risk-free one:
/// `(1 + i) / rho - 1`.
pub fn risky_yield(riskfree_ytm: Yield, rho: SurvivalProbability) -> Yield {
    // (1+i)/rho > 0, so the result is always > -1.
    Yield(riskfree_ytm.gross() / rho.value() - 1.0)
}

/// Price of the at-risk bond. Equal to `rho` times the risk-free price.
pub fn price_risky(bond: &ZeroCouponBond, riskfree_ytm: Yield, rho: SurvivalProbability) -> f64 {
    rho.value() * bond.face_value / riskfree_ytm.gross()
}

/// Premium of the at-risk yield over the risk-free one:
/// `(1 + i)(1 - rho) / rho`.
pub fn risk_premium_idiosyncratic(riskfree_ytm: Yield, rho: SurvivalProbability) -> Yield {
    Yield(riskfree_ytm.gross() * rho.failure() / rho.value())
}
