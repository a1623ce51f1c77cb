//! Pricing against a risk-free bond held in another currency.
//!
//! Exchange rates are quoted as units of the at-risk currency X per one unit of
//! the risk-free currency X*. A rising rate means X* appreciates.

use serde::{Deserialize, Serialize};

use crate::bondmath::{SurvivalProbability, Yield};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FxRegime {
    /// X is a stablecoin pegged to X*; the expected rate equals the spot rate.
    FixedPeg,
    Flexible,
}

/// Expected proportional change of the exchange rate, `(S^e - S) / S`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SpotChange(f64);

impl SpotChange {
    pub const NONE: SpotChange = SpotChange(0.0);

    pub fn new(rate: f64) -> Result<Self> {
        if !rate.is_finite() || rate <= -1.0 {
            return Err(Error::invalid(
                "spot_change",
                rate,
                "expected spot change must be finite and > -1",
            ));
        }
        Ok(SpotChange(rate))
    }

    pub fn rate(self) -> f64 {
        self.0
    }

    pub(crate) fn from_gross(gross: f64) -> Result<Self> {
        SpotChange::new(gross - 1.0)
    }
}

impl TryFrom<f64> for SpotChange {
    type Error = Error;

    fn try_from(rate: f64) -> Result<Self> {
        SpotChange::new(rate)
    }
}

impl From<SpotChange> for f64 {
    fn from(s: SpotChange) -> f64 {
        s.0
    }
}

/// Current and expected exchange rate (X per unit of X*).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FxQuote {
    spot: f64,
    expected_spot: f64,
    regime: FxRegime,
}

impl FxQuote {
    pub fn new(spot: f64, expected_spot: f64, regime: FxRegime) -> Result<Self> {
        if !(spot.is_finite() && spot > 0.0) {
            return Err(Error::invalid("spot", spot, "spot rate must be positive"));
        }
        if !(expected_spot.is_finite() && expected_spot > 0.0) {
            return Err(Error::invalid(
                "expected_spot",
                expected_spot,
                "expected spot rate must be positive",
            ));
        }
        if regime == FxRegime::FixedPeg && expected_spot != spot {
            return Err(Error::invalid(
                "expected_spot",
                expected_spot,
                "a fixed peg requires expected_spot == spot",
            ));
        }
        Ok(FxQuote {
            spot,
            expected_spot,
            regime,
        })
    }

    pub fn pegged(spot: f64) -> Result<Self> {
        FxQuote::new(spot, spot, FxRegime::FixedPeg)
    }

    pub fn flexible(spot: f64, expected_spot: f64) -> Result<Self> {
        FxQuote::new(spot, expected_spot, FxRegime::Flexible)
    }

    pub fn spot(&self) -> f64 {
        self.spot
    }

    pub fn expected_spot(&self) -> f64 {
        self.expected_spot
    }

    pub fn regime(&self) -> FxRegime {
        self.regime
    }

    pub fn spot_change(&self) -> SpotChange {
        // expected_spot / spot > 0
        SpotChange((self.expected_spot - self.spot) / self.spot)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        FxQuote::new(self.spot, self.expected_spot, self.regime).map(|_| ())
    }
}

/// Yield on a hypothetical risk-free bond in X under uncovered interest
/// parity: `S^e (1 + i*) / S - 1`.
pub fn uip_domestic_yield(fx: &FxQuote, foreign_ytm: Yield) -> Yield {
    Yield::new(fx.expected_spot * foreign_ytm.gross() / fx.spot - 1.0)
        .expect("positive rates and gross yield give a yield > -1")
}

/// Equilibrium yield on the at-risk bond in X: `S^e (1 + i*) / (rho S) - 1`.
pub fn risky_yield_fx(fx: &FxQuote, foreign_ytm: Yield, rho: SurvivalProbability) -> Yield {
    Yield::new(fx.expected_spot * foreign_ytm.gross() / (rho.value() * fx.spot) - 1.0)
        .expect("positive rates and gross yield give a yield > -1")
}

/// Expected exchange-rate change consistent with both bonds being held:
/// `rho (1 + i_hat) / (1 + i*) - 1`.
pub fn equilibrium_spot_change(
    risky_ytm: Yield,
    foreign_ytm: Yield,
    rho: SurvivalProbability,
) -> SpotChange {
    SpotChange(rho.value() * risky_ytm.gross() / foreign_ytm.gross() - 1.0)
}

/// Premium of the at-risk yield over the foreign risk-free yield:
/// `(1 + i*)(1 + Sdot - rho) / rho`.
pub fn risk_premium_fx(
    foreign_ytm: Yield,
    spot_change: SpotChange,
    rho: SurvivalProbability,
) -> f64 {
    foreign_ytm.gross() * (1.0 + spot_change.rate() - rho.value()) / rho.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bondmath::risk_premium_idiosyncratic;
    use proptest::prelude::*;

    fn y(r: f64) -> Yield {
        Yield::new(r).unwrap()
    }

    fn p(r: f64) -> SurvivalProbability {
        SurvivalProbability::new(r).unwrap()
    }

    #[test]
    fn uip_examples() {
        let peg = FxQuote::pegged(1.0).unwrap();
        assert!((uip_domestic_yield(&peg, y(0.02)).rate() - 0.02).abs() < 1e-15);
        let fx = FxQuote::flexible(1.0, 1.03).unwrap();
        assert!((uip_domestic_yield(&fx, y(0.02)).rate() - 0.0506).abs() < 1e-12);
        let fx = FxQuote::flexible(2.0, 1.0).unwrap();
        assert!((uip_domestic_yield(&fx, y(0.0)).rate() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn risky_yield_examples() {
        let peg = FxQuote::pegged(1.0).unwrap();
        assert!((risky_yield_fx(&peg, y(0.02), p(1.0)).rate() - 0.02).abs() < 1e-15);
        let fx = FxQuote::flexible(1.0, 1.03).unwrap();
        assert!((risky_yield_fx(&fx, y(0.02), p(0.95)).rate() - 0.1058947368).abs() < 1e-9);
        assert!((risky_yield_fx(&peg, y(0.0), p(0.5)).rate() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spot_change_examples() {
        assert!(
            equilibrium_spot_change(y(0.02), y(0.02), p(1.0))
                .rate()
                .abs()
                < 1e-15
        );
        let s = equilibrium_spot_change(y(0.1058947368), y(0.02), p(0.95)).rate();
        assert!((s - 0.03).abs() < 1e-9);
        assert!(equilibrium_spot_change(y(1.0), y(0.0), p(0.5)).rate().abs() < 1e-15);
    }

    #[test]
    fn premium_examples() {
        assert!(risk_premium_fx(y(0.02), SpotChange::NONE, p(1.0)).abs() < 1e-15);
        let s = SpotChange::new(0.03).unwrap();
        assert!((risk_premium_fx(y(0.02), s, p(0.95)) - 0.0858947368).abs() < 1e-9);
        assert!((risk_premium_fx(y(0.02), SpotChange::NONE, p(0.95)) - 0.0536842105).abs() < 1e-9);
    }

    #[test]
    fn peg_requires_equal_rates() {
        assert!(FxQuote::new(1.0, 1.01, FxRegime::FixedPeg).is_err());
        assert!(FxQuote::flexible(0.0, 1.0).is_err());
        assert!(FxQuote::flexible(1.0, -1.0).is_err());
        assert_eq!(
            FxQuote::pegged(3.0).unwrap().spot_change(),
            SpotChange::NONE
        );
    }

    proptest! {
        #[test]
        fn premium_is_yield_spread(ihat in -0.2f64..1.0, istar in -0.05f64..0.2, rho in 0.05f64..=1.0) {
            let (ihat, istar, rho) = (y(ihat), y(istar), p(rho));
            let sdot = equilibrium_spot_change(ihat, istar, rho);
            let r = risk_premium_fx(istar, sdot, rho);
            prop_assert!((r - (ihat.rate() - istar.rate())).abs() <= 1e-12);
        }

        #[test]
        fn peg_reduces_to_same_currency_premium(istar in -0.05f64..0.2, rho in 0.05f64..=1.0) {
            let a = risk_premium_fx(y(istar), SpotChange::NONE, p(rho));
            let b = risk_premium_idiosyncratic(y(istar), p(rho)).rate();
            prop_assert!((a - b).abs() <= 1e-12);
        }

        #[test]
        fn spot_change_round_trip(s in 0.1f64..10.0, sdot in -0.5f64..0.5, istar in -0.05f64..0.2, rho in 0.05f64..=1.0) {
            let fx = FxQuote::flexible(s, s * (1.0 + sdot)).unwrap();
            let ihat = risky_yield_fx(&fx, y(istar), p(rho));
            let back = equilibrium_spot_change(ihat, y(istar), p(rho)).rate();
            let want = fx.spot_change().rate();
            prop_assert!((back - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
    }
}
