//! Exchange-rate forecasts from the quantity equation.
//!
//! Prices on the chain are fiat prices converted at the spot rate
//! (`C = C* S`), and the chain obeys `C T = M V`. Together these give the spot
//! rate `S = M V / (C* T)`, so the expected change of `S` over one period is
//! driven by token issuance, fiat inflation and transaction growth.
//!
//! A period is one year, matching the bond maturity. A quantum miner can push
//! issuance from the scheduled rate `mu` up to `mu_grover`; with survival
//! probability `rho` the forecast mixes both outcomes.

use serde::{Deserialize, Serialize};

use crate::bondmath::SurvivalProbability;
use crate::error::{Error, Result};
use crate::fxparity::SpotChange;

fn positive(field: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::invalid(field, v, "must be positive"))
    }
}

/// Quantity-equation state of the chain for one period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerAggregates {
    pub money_supply: f64,
    pub velocity: f64,
    pub transaction_volume: f64,
    pub fiat_price_level: f64,
    #[serde(default)]
    pub period: i64,
}

impl LedgerAggregates {
    pub fn new(
        money_supply: f64,
        velocity: f64,
        transaction_volume: f64,
        fiat_price_level: f64,
        period: i64,
    ) -> Result<Self> {
        let agg = LedgerAggregates {
            money_supply,
            velocity,
            transaction_volume,
            fiat_price_level,
            period,
        };
        agg.validate()?;
        Ok(agg)
    }

    pub fn validate(&self) -> Result<()> {
        positive("money_supply", self.money_supply)?;
        positive("velocity", self.velocity)?;
        positive("transaction_volume", self.transaction_volume)?;
        positive("fiat_price_level", self.fiat_price_level)?;
        Ok(())
    }

    /// Price level on the chain implied by parity with fiat prices.
    pub fn crypto_price_level(&self) -> f64 {
        ppp_price_level(self.fiat_price_level, quantity_spot_rate(self))
    }
}

/// Expected issuance and macro growth rates over the coming period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IssuancePath {
    /// Scheduled issuance rate `mu`.
    #[serde(alias = "mu")]
    pub baseline_growth: f64,
    /// Issuance rate if a quantum miner exploits Grover's speedup.
    #[serde(alias = "mu_grover")]
    pub grover_growth: f64,
    #[serde(alias = "inflation")]
    pub expected_fiat_inflation: f64,
    #[serde(default, alias = "volume_growth")]
    pub expected_volume_growth: f64,
}

impl IssuancePath {
    pub fn new(
        baseline_growth: f64,
        grover_growth: f64,
        expected_fiat_inflation: f64,
        expected_volume_growth: f64,
    ) -> Result<Self> {
        let path = IssuancePath {
            baseline_growth,
            grover_growth,
            expected_fiat_inflation,
            expected_volume_growth,
        };
        path.validate()?;
        Ok(path)
    }

    /// Path without a Grover attack and with stable transaction volume.
    pub fn scheduled(mu: f64, inflation: f64) -> Result<Self> {
        IssuancePath::new(mu, mu, inflation, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let mu = self.baseline_growth;
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::invalid(
                "baseline_growth",
                mu,
                "issuance rate must be >= 0",
            ));
        }
        if !(self.grover_growth.is_finite() && self.grover_growth >= mu) {
            return Err(Error::invalid(
                "grover_growth",
                self.grover_growth,
                "grover issuance rate must be >= baseline_growth",
            ));
        }
        if !(self.expected_fiat_inflation.is_finite() && self.expected_fiat_inflation > -1.0) {
            return Err(Error::invalid(
                "expected_fiat_inflation",
                self.expected_fiat_inflation,
                "must be finite and > -1",
            ));
        }
        if !(self.expected_volume_growth.is_finite() && self.expected_volume_growth > -1.0) {
            return Err(Error::invalid(
                "expected_volume_growth",
                self.expected_volume_growth,
                "must be finite and > -1",
            ));
        }
        Ok(())
    }

    /// Expected gross issuance `1 + rho mu + (1 - rho) mu_grover`.
    pub fn mixed_gross_issuance(&self, rho: SurvivalProbability) -> f64 {
        1.0 + rho.value() * self.baseline_growth + rho.failure() * self.grover_growth
    }

    fn gross_deflator(&self) -> f64 {
        (1.0 + self.expected_fiat_inflation) * (1.0 + self.expected_volume_growth)
    }
}

/// Period-`t` expectations formed at the end of period `t - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodExpectations {
    pub velocity: f64,
    pub transaction_volume: f64,
    pub fiat_price_level: f64,
}

impl PeriodExpectations {
    /// Expectations implied by a growth path: stable velocity, volume and
    /// fiat prices grown at their expected rates.
    pub fn from_path(prior: &LedgerAggregates, path: &IssuancePath) -> Self {
        PeriodExpectations {
            velocity: prior.velocity,
            transaction_volume: prior.transaction_volume * (1.0 + path.expected_volume_growth),
            fiat_price_level: prior.fiat_price_level * (1.0 + path.expected_fiat_inflation),
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("velocity", self.velocity)?;
        positive("transaction_volume", self.transaction_volume)?;
        positive("fiat_price_level", self.fiat_price_level)?;
        Ok(())
    }
}

/// Forecast under possible Grover-expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroverForecast {
    /// Unconditional expected spot rate for period `t`.
    pub expected_spot: f64,
    /// Exact expected change relative to the period `t - 1` spot rate.
    pub spot_change: SpotChange,
    /// First-order approximation `rho mu + (1 - rho) mu_grover - pi`.
    pub approx_spot_change: f64,
}

/// Chain price level from the fiat price level: `C = C* S`.
pub fn ppp_price_level(fiat_level: f64, spot: f64) -> f64 {
    fiat_level * spot
}

/// Spot rate implied by the quantity equation: `S = M V / (C* T)`.
pub fn quantity_spot_rate(agg: &LedgerAggregates) -> f64 {
    agg.money_supply * agg.velocity / (agg.fiat_price_level * agg.transaction_volume)
}

/// Exact expected spot change with constant velocity and scheduled issuance:
/// `(1 + mu) / ((1 + pi)(1 + Tdot)) - 1`.
pub fn expected_spot_change_full(path: &IssuancePath) -> SpotChange {
    SpotChange::from_gross((1.0 + path.baseline_growth) / path.gross_deflator())
        .expect("positive gross rates")
}

/// First-order approximation `mu - pi`, valid for small rates with stable
/// transaction volume. Rejects paths with nonzero volume growth.
pub fn expected_spot_change_approx(path: &IssuancePath) -> Result<f64> {
    if path.expected_volume_growth != 0.0 {
        return Err(Error::invalid(
            "expected_volume_growth",
            path.expected_volume_growth,
            "the approximation assumes stable transaction volume",
        ));
    }
    Ok(path.baseline_growth - path.expected_fiat_inflation)
}

/// Exact expected spot change with Grover-expansion in play:
/// `(1 + rho mu + (1 - rho) mu_grover) / ((1 + pi)(1 + Tdot)) - 1`.
pub fn grover_spot_change(path: &IssuancePath, rho: SurvivalProbability) -> SpotChange {
    SpotChange::from_gross(path.mixed_gross_issuance(rho) / path.gross_deflator())
        .expect("positive gross rates")
}

/// Expected spot rate for period `t`, mixing the scheduled money supply
/// (probability `rho`) with the Grover-expanded one.
///
/// `expectations` defaults to [`PeriodExpectations::from_path`]. The spot
/// change is measured against the quantity-equation spot of `prior`.
pub fn expected_spot_with_grover(
    path: &IssuancePath,
    rho: SurvivalProbability,
    prior: &LedgerAggregates,
    expectations: Option<&PeriodExpectations>,
) -> Result<GroverForecast> {
    path.validate()?;
    prior.validate()?;
    let exp = expectations
        .copied()
        .unwrap_or_else(|| PeriodExpectations::from_path(prior, path));
    exp.validate()?;

    let scheduled_supply = prior.money_supply * (1.0 + path.baseline_growth);
    let grover_supply = prior.money_supply * (1.0 + path.grover_growth);
    let expected_supply = rho.value() * scheduled_supply + rho.failure() * grover_supply;
    let expected_spot =
        exp.velocity / (exp.fiat_price_level * exp.transaction_volume) * expected_supply;

    let spot_change = SpotChange::from_gross(expected_spot / quantity_spot_rate(prior))?;
    let approx_spot_change = rho.value() * path.baseline_growth
        + rho.failure() * path.grover_growth
        - path.expected_fiat_inflation
        - path.expected_volume_growth;
    Ok(GroverForecast {
        expected_spot,
        spot_change,
        approx_spot_change,
    })
}

/// Release of dormant coins into circulation.
///
/// `dormant_fraction` is the share of the total supply that was dormant and
/// excluded from the circulating `M`. Releasing it scales circulating supply by
/// `1 / (1 - dormant_fraction)`.
pub fn apply_supply_shock(
    agg: &LedgerAggregates,
    dormant_fraction: f64,
) -> Result<LedgerAggregates> {
    if !(0.0..1.0).contains(&dormant_fraction) {
        return Err(Error::invalid(
            "dormant_fraction",
            dormant_fraction,
            "must lie in [0, 1)",
        ));
    }
    Ok(LedgerAggregates {
        money_supply: agg.money_supply / (1.0 - dormant_fraction),
        ..agg.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn agg(m: f64, v: f64, cstar: f64, t: f64) -> LedgerAggregates {
        LedgerAggregates::new(m, v, t, cstar, 0).unwrap()
    }

    fn p(r: f64) -> SurvivalProbability {
        SurvivalProbability::new(r).unwrap()
    }

    fn eq16(mu: f64, pi: f64) -> f64 {
        (1.0 + mu) / (1.0 + pi) - 1.0
    }

    #[test]
    fn ppp_examples() {
        assert_eq!(ppp_price_level(1.0, 1.0), 1.0);
        assert_eq!(ppp_price_level(2.0, 25.0), 50.0);
        assert!((ppp_price_level(1.02, 0.5) - 0.51).abs() < 1e-15);
    }

    #[test]
    fn quantity_spot_examples() {
        assert_eq!(quantity_spot_rate(&agg(1.0, 1.0, 1.0, 1.0)), 1.0);
        assert_eq!(quantity_spot_rate(&agg(1000.0, 5.0, 2.0, 100.0)), 25.0);
        assert_eq!(quantity_spot_rate(&agg(2000.0, 5.0, 2.0, 100.0)), 50.0);
    }

    #[test]
    fn full_spot_change_examples() {
        let f = |mu, pi, t| {
            expected_spot_change_full(&IssuancePath::new(mu, mu, pi, t).unwrap()).rate()
        };
        assert_eq!(f(0.0, 0.0, 0.0), 0.0);
        assert!((f(0.05, 0.02, 0.0) - 0.0294117647).abs() < 1e-9);
        assert!(f(0.05, 0.0, 0.05).abs() < 1e-15);
    }

    #[test]
    fn approx_spot_change_examples() {
        let f = |mu, pi| {
            expected_spot_change_approx(&IssuancePath::scheduled(mu, pi).unwrap()).unwrap()
        };
        assert!((f(0.05, 0.02) - 0.03).abs() < 1e-15);
        assert_eq!(f(0.0, 0.0), 0.0);
        assert_eq!(f(0.10, 0.10), 0.0);
        let moving = IssuancePath::new(0.05, 0.05, 0.02, 0.01).unwrap();
        assert!(expected_spot_change_approx(&moving).is_err());
    }

    #[test]
    fn grover_examples() {
        let prior = agg(1000.0, 5.0, 2.0, 100.0);
        let path = IssuancePath::new(0.05, 3.0, 0.02, 0.0).unwrap();
        let f = expected_spot_with_grover(&path, p(1.0), &prior, None).unwrap();
        assert!((f.spot_change.rate() - 0.0294117647).abs() < 1e-9);

        let path = IssuancePath::new(0.05, 0.5, 0.02, 0.0).unwrap();
        let f = expected_spot_with_grover(&path, p(0.9), &prior, None).unwrap();
        assert!((f.spot_change.rate() - 0.0735294118).abs() < 1e-9);
        assert!((f.approx_spot_change - 0.075).abs() < 1e-12);
        // level: 25 * 1.095 / 1.02
        assert!((f.expected_spot - 25.0 * 1.095 / 1.02).abs() < 1e-12);

        let path = IssuancePath::new(0.05, 0.05, 0.02, 0.0).unwrap();
        for rho in [0.1, 0.5, 0.99] {
            let f = expected_spot_with_grover(&path, p(rho), &prior, None).unwrap();
            assert!((f.spot_change.rate() - 0.0294117647).abs() < 1e-9);
        }
    }

    #[test]
    fn explicit_expectations_override_path() {
        let prior = agg(1000.0, 5.0, 2.0, 100.0);
        let path = IssuancePath::new(0.05, 0.05, 0.02, 0.0).unwrap();
        let exp = PeriodExpectations {
            velocity: 10.0,
            transaction_volume: 100.0,
            fiat_price_level: 2.0,
        };
        let f = expected_spot_with_grover(&path, p(1.0), &prior, Some(&exp)).unwrap();
        // doubling velocity doubles the spot rate
        assert!((f.expected_spot - 52.5).abs() < 1e-12);
    }

    #[test]
    fn supply_shock_examples() {
        let base = agg(1000.0, 5.0, 2.0, 100.0);
        assert_eq!(apply_supply_shock(&base, 0.0).unwrap(), base);
        let shocked = apply_supply_shock(&base, 0.33).unwrap();
        assert!((shocked.money_supply - 1492.537313).abs() < 1e-6);
        let s0 = quantity_spot_rate(&base);
        let s1 = quantity_spot_rate(&shocked);
        assert!((s1 / s0 - 1.0 / 0.67).abs() < 1e-12);
        assert_eq!(
            apply_supply_shock(&agg(100.0, 1.0, 1.0, 1.0), 0.5)
                .unwrap()
                .money_supply,
            200.0
        );
        assert!(apply_supply_shock(&base, 1.0).is_err());
        assert!(apply_supply_shock(&base, -0.1).is_err());
    }

    #[test]
    fn path_invariants() {
        assert!(IssuancePath::new(-0.01, 0.0, 0.0, 0.0).is_err());
        assert!(IssuancePath::new(0.05, 0.04, 0.0, 0.0).is_err());
        assert!(IssuancePath::new(0.05, 0.05, -1.0, 0.0).is_err());
        assert!(IssuancePath::new(0.05, 0.05, 0.0, -1.0).is_err());
        assert!(LedgerAggregates::new(0.0, 1.0, 1.0, 1.0, 0).is_err());
    }

    proptest! {
        #[test]
        fn approx_gap_is_second_order(mu in 0.0f64..0.2, pi in -0.2f64..0.2) {
            let path = IssuancePath::scheduled(mu, pi).unwrap();
            let exact = expected_spot_change_full(&path).rate();
            let approx = expected_spot_change_approx(&path).unwrap();
            prop_assert!((exact - approx).abs() <= (exact * pi).abs() + 1e-12);
        }

        #[test]
        fn mixture_limits(mu in 0.0f64..0.2, dg in 0.0f64..1.0, pi in -0.05f64..0.2) {
            let path = IssuancePath::new(mu, mu + dg, pi, 0.0).unwrap();
            let at_one = grover_spot_change(&path, p(1.0)).rate();
            prop_assert!((at_one - eq16(mu, pi)).abs() <= 1e-12);
            let near_zero = grover_spot_change(&path, p(1e-13)).rate();
            prop_assert!((near_zero - eq16(mu + dg, pi)).abs() <= 1e-12);
        }

        #[test]
        fn increasing_in_grover_rate(mu in 0.0f64..0.2, g in 0.0f64..1.0, d in 1e-6f64..0.5,
                                     pi in -0.5f64..0.5, rho in 0.01f64..0.999) {
            let lo = IssuancePath::new(mu, mu + g, pi, 0.0).unwrap();
            let hi = IssuancePath::new(mu, mu + g + d, pi, 0.0).unwrap();
            prop_assert!(grover_spot_change(&hi, p(rho)) > grover_spot_change(&lo, p(rho)));
        }

        #[test]
        fn level_and_rate_forms_agree(m in 1.0f64..1e9, v in 0.1f64..50.0, t in 1.0f64..1e9, c in 0.1f64..10.0,
                                      mu in 0.0f64..0.2, g in 0.0f64..1.0, pi in -0.05f64..0.2, tdot in -0.2f64..0.2,
                                      rho in 0.01f64..=1.0) {
            let prior = agg(m, v, c, t);
            let path = IssuancePath::new(mu, mu + g, pi, tdot).unwrap();
            let f = expected_spot_with_grover(&path, p(rho), &prior, None).unwrap();
            let rate = grover_spot_change(&path, p(rho)).rate();
            prop_assert!((f.spot_change.rate() - rate).abs() <= 1e-12 * (1.0 + rate.abs()));
        }

        #[test]
        fn ppp_and_quantity_equation_agree(m in 1.0f64..1e9, v in 0.1f64..50.0, t in 1.0f64..1e9, c in 0.1f64..10.0) {
            let a = agg(m, v, c, t);
            let want = m * v / t;
            prop_assert!((a.crypto_price_level() - want).abs() <= 1e-12 * want);
        }
    }
}
