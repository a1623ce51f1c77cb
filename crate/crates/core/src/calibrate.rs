//! Market-implied survival probabilities and sensitivities of the combined
//! premium.
//!
//! The combined premium of an at-risk crypto-bond over a foreign risk-free
//! bond, when the chain may suffer both accelerated issuance and key theft, is
//!
//! ```text
//! R = (1 + i*) / rho * [ (1 + rho mu + (1 - rho) mu_g) / ((1 + pi)(1 + Tdot)) - rho ]
//! ```
//!
//! With stable transaction volume (`Tdot = 0`) this is the textbook form.
//! `R` is strictly decreasing in `rho`, which makes the inversion a bracketed
//! one-dimensional root search.

use serde::{Deserialize, Serialize};

use crate::bondmath::{SurvivalProbability, Yield};
use crate::error::{Error, Result};
use crate::monetary::IssuancePath;

/// Lower end of the survival-probability bracket searched by the inverter.
pub const RHO_FLOOR: f64 = 1e-9;
/// Absolute tolerance on `rho` for the bisection.
pub const RHO_TOLERANCE: f64 = 1e-12;
/// Central finite-difference step for [`comparative_statics`].
pub const FD_STEP: f64 = 1e-6;

/// Everything [`risk_premium_full`] needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumRiskParams {
    pub rho: SurvivalProbability,
    pub path: IssuancePath,
    pub foreign_ytm: Yield,
}

impl QuantumRiskParams {
    pub fn new(rho: SurvivalProbability, path: IssuancePath, foreign_ytm: Yield) -> Result<Self> {
        path.validate()?;
        Ok(QuantumRiskParams {
            rho,
            path,
            foreign_ytm,
        })
    }
}

/// One analytic sensitivity with its numerical cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sensitivity {
    pub analytic: f64,
    pub finite_difference: f64,
    /// `|analytic - finite_difference| / max(|analytic|, 1e-8)`; zero when both
    /// are exactly zero.
    pub relative_gap: f64,
}

impl Sensitivity {
    fn new(analytic: f64, finite_difference: f64) -> Self {
        let diff = (analytic - finite_difference).abs();
        let relative_gap = if diff == 0.0 {
            0.0
        } else {
            diff / analytic.abs().max(1e-8)
        };
        Sensitivity {
            analytic,
            finite_difference,
            relative_gap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StaticsReport {
    pub d_premium_d_mu: Sensitivity,
    pub d_premium_d_mu_g: Sensitivity,
    pub d_premium_d_inflation: Sensitivity,
    pub d_premium_d_rho: Sensitivity,
}

impl StaticsReport {
    pub fn entries(&self) -> [(&'static str, &Sensitivity); 4] {
        [
            ("d_premium_d_mu", &self.d_premium_d_mu),
            ("d_premium_d_mu_g", &self.d_premium_d_mu_g),
            ("d_premium_d_inflation", &self.d_premium_d_inflation),
            ("d_premium_d_rho", &self.d_premium_d_rho),
        ]
    }

    pub fn max_relative_gap(&self) -> f64 {
        self.entries()
            .iter()
            .map(|(_, s)| s.relative_gap)
            .fold(0.0, f64::max)
    }
}

/// Raw premium formula on unconstrained reals. Shared by the public API and
/// the finite-difference probes, which may step slightly outside the valid
/// domain (e.g. `rho = 1 + h`).
fn premium(rho: f64, mu: f64, mu_g: f64, pi: f64, tdot: f64, istar: f64) -> f64 {
    let mixed = 1.0 + rho * mu + (1.0 - rho) * mu_g;
    (1.0 + istar) / rho * (mixed / ((1.0 + pi) * (1.0 + tdot)) - rho)
}

fn premium_at(rho: f64, path: &IssuancePath, foreign_ytm: Yield) -> f64 {
    premium(
        rho,
        path.baseline_growth,
        path.grover_growth,
        path.expected_fiat_inflation,
        path.expected_volume_growth,
        foreign_ytm.rate(),
    )
}

/// Premium of the at-risk crypto-bond over the foreign risk-free bond.
pub fn risk_premium_full(params: &QuantumRiskParams) -> f64 {
    premium_at(params.rho.value(), &params.path, params.foreign_ytm)
}

/// Survival probability implied by two same-currency yields:
/// `rho = (1 + i) / (1 + i_hat)`.
pub fn implied_survival_idiosyncratic(
    risky_ytm: Yield,
    riskfree_ytm: Yield,
) -> Result<SurvivalProbability> {
    if risky_ytm.rate() < riskfree_ytm.rate() {
        return Err(Error::NoSolution(format!(
            "risky yield {} is below the risk-free yield {}; quotes are arbitrage-inconsistent",
            risky_ytm.rate(),
            riskfree_ytm.rate()
        )));
    }
    SurvivalProbability::new(riskfree_ytm.gross() / risky_ytm.gross())
}

/// Survival probability implied by an observed combined premium.
///
/// Bisects the strictly decreasing map `rho -> R(rho)` on
/// `[RHO_FLOOR, 1]` to an absolute tolerance of `RHO_TOLERANCE`. Premia the
/// bracket cannot reach produce [`Error::NoSolution`]; nothing is clamped.
pub fn implied_survival_full(
    observed_premium: f64,
    path: &IssuancePath,
    foreign_ytm: Yield,
) -> Result<SurvivalProbability> {
    path.validate()?;
    if !observed_premium.is_finite() {
        return Err(Error::invalid(
            "premium",
            observed_premium,
            "must be finite",
        ));
    }
    let f = |rho: f64| premium_at(rho, path, foreign_ytm) - observed_premium;

    let at_one = f(1.0);
    // Floating-point slack around the rho = 1 end of the bracket.
    let slack = 4.0 * f64::EPSILON * (1.0 + observed_premium.abs());
    if at_one > slack {
        return Err(Error::NoSolution(format!(
            "premium {observed_premium} is below the no-risk premium {}",
            at_one + observed_premium
        )));
    }
    if at_one >= -slack {
        return Ok(SurvivalProbability::CERTAIN);
    }
    if f(RHO_FLOOR) < 0.0 {
        return Err(Error::NoSolution(format!(
            "premium {observed_premium} exceeds the premium at rho = {RHO_FLOOR}"
        )));
    }

    // f(lo) >= 0 > f(hi)
    let (mut lo, mut hi) = (RHO_FLOOR, 1.0);
    while hi - lo > RHO_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    SurvivalProbability::new(0.5 * (lo + hi))
}

/// Closed-form inverse of the premium, obtained by clearing `rho`:
///
/// ```text
/// rho = (1 + mu_g) / (D (1 + R / (1 + i*)) + mu_g - mu),   D = (1 + pi)(1 + Tdot)
/// ```
///
/// Kept as a cross-check on [`implied_survival_full`].
pub fn implied_survival_closed_form(
    observed_premium: f64,
    path: &IssuancePath,
    foreign_ytm: Yield,
) -> Result<SurvivalProbability> {
    let deflator = (1.0 + path.expected_fiat_inflation) * (1.0 + path.expected_volume_growth);
    let denom = deflator * (1.0 + observed_premium / foreign_ytm.gross()) + path.grover_growth
        - path.baseline_growth;
    let rho = (1.0 + path.grover_growth) / denom;
    // round-off at the certain-survival end
    if rho > 1.0 && rho - 1.0 <= 1e-12 {
        return Ok(SurvivalProbability::CERTAIN);
    }
    SurvivalProbability::new(rho)
        .map_err(|_| Error::NoSolution(format!("closed form gives rho = {rho}")))
}

/// Analytic sensitivities of the combined premium with finite-difference
/// checks (central differences, step [`FD_STEP`]).
pub fn comparative_statics(params: &QuantumRiskParams) -> Result<StaticsReport> {
    let rho = params.rho.value();
    let p = &params.path;
    let (mu, mu_g, pi, tdot) = (
        p.baseline_growth,
        p.grover_growth,
        p.expected_fiat_inflation,
        p.expected_volume_growth,
    );
    let istar = params.foreign_ytm.rate();
    if 1.0 + pi == 0.0 {
        return Err(Error::invalid(
            "expected_fiat_inflation",
            pi,
            "must differ from -1",
        ));
    }
    let a = 1.0 + istar;
    let d = (1.0 + pi) * (1.0 + tdot);
    let mixed = 1.0 + rho * mu + (1.0 - rho) * mu_g;

    let h = FD_STEP;
    let central = |fwd: f64, back: f64| (fwd - back) / (2.0 * h);
    let r = |rho, mu, mu_g, pi| premium(rho, mu, mu_g, pi, tdot, istar);

    Ok(StaticsReport {
        d_premium_d_mu: Sensitivity::new(
            a / d,
            central(r(rho, mu + h, mu_g, pi), r(rho, mu - h, mu_g, pi)),
        ),
        d_premium_d_mu_g: Sensitivity::new(
            (1.0 - rho) * a / (rho * d),
            central(r(rho, mu, mu_g + h, pi), r(rho, mu, mu_g - h, pi)),
        ),
        d_premium_d_inflation: Sensitivity::new(
            -a * mixed / (rho * (1.0 + pi) * d),
            central(r(rho, mu, mu_g, pi + h), r(rho, mu, mu_g, pi - h)),
        ),
        d_premium_d_rho: Sensitivity::new(
            -a * (1.0 + mu_g) / (rho * rho * d),
            central(r(rho + h, mu, mu_g, pi), r(rho - h, mu, mu_g, pi)),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fxparity::risk_premium_fx;
    use crate::monetary::expected_spot_change_full;
    use proptest::prelude::*;

    fn y(r: f64) -> Yield {
        Yield::new(r).unwrap()
    }

    fn p(r: f64) -> SurvivalProbability {
        SurvivalProbability::new(r).unwrap()
    }

    fn params(rho: f64, mu: f64, mu_g: f64, pi: f64, istar: f64) -> QuantumRiskParams {
        QuantumRiskParams::new(
            p(rho),
            IssuancePath::new(mu, mu_g, pi, 0.0).unwrap(),
            y(istar),
        )
        .unwrap()
    }

    #[test]
    fn premium_examples() {
        assert!(risk_premium_full(&params(1.0, 0.0, 0.0, 0.0, 0.02)).abs() < 1e-15);
        let r = risk_premium_full(&params(0.9, 0.05, 0.5, 0.02, 0.02));
        assert!((r - 0.1966666667).abs() < 1e-9);
    }

    #[test]
    fn premium_without_expansion_matches_fx_premium() {
        let prm = params(0.9, 0.05, 0.05, 0.02, 0.02);
        let sdot = expected_spot_change_full(&prm.path);
        let via_fx = risk_premium_fx(y(0.02), sdot, p(0.9));
        assert!((risk_premium_full(&prm) - via_fx).abs() < 1e-12);
    }

    #[test]
    fn idiosyncratic_inversion_examples() {
        assert_eq!(
            implied_survival_idiosyncratic(y(0.05), y(0.05))
                .unwrap()
                .value(),
            1.0
        );
        let rho = implied_survival_idiosyncratic(y(0.1052631579), y(0.05)).unwrap();
        assert!((rho.value() - 0.95).abs() < 1e-9);
        let rho = implied_survival_idiosyncratic(y(1.0), y(0.0)).unwrap();
        assert_eq!(rho.value(), 0.5);
        assert!(matches!(
            implied_survival_idiosyncratic(y(0.04), y(0.05)),
            Err(Error::NoSolution(_))
        ));
    }

    #[test]
    fn full_inversion_examples() {
        let flat = IssuancePath::new(0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(
            implied_survival_full(0.0, &flat, y(0.02)).unwrap().value(),
            1.0
        );

        let path = IssuancePath::new(0.05, 0.5, 0.02, 0.0).unwrap();
        let rho = implied_survival_full(0.1966666667, &path, y(0.02)).unwrap();
        assert!((rho.value() - 0.9).abs() < 1e-9);
    }

    #[test]
    fn full_inversion_rejects_unreachable_premia() {
        let path = IssuancePath::new(0.05, 0.5, 0.02, 0.0).unwrap();
        // premium at rho = 1 is 1.02 * (1.05/1.02 - 1) = 0.03
        assert!(matches!(
            implied_survival_full(0.02, &path, y(0.02)),
            Err(Error::NoSolution(_))
        ));
        assert!(matches!(
            implied_survival_full(1e12, &path, y(0.02)),
            Err(Error::NoSolution(_))
        ));
        assert!(implied_survival_full(f64::NAN, &path, y(0.02)).is_err());
    }

    #[test]
    fn statics_examples() {
        let s = comparative_statics(&params(0.9, 0.05, 0.5, 0.02, 0.02)).unwrap();
        assert!((s.d_premium_d_mu.analytic - 1.0).abs() < 1e-12);
        assert!((s.d_premium_d_mu_g.analytic - 0.1111111111).abs() < 1e-9);
        assert!((s.d_premium_d_rho.analytic + 1.8518518519).abs() < 1e-9);
        assert!((s.d_premium_d_inflation.analytic + 1.1928104575).abs() < 1e-9);
        assert!(s.max_relative_gap() < 1e-4);
    }

    #[test]
    fn statics_at_certain_survival() {
        let s = comparative_statics(&params(1.0, 0.05, 0.5, 0.02, 0.02)).unwrap();
        assert_eq!(s.d_premium_d_mu_g.analytic, 0.0);
        assert!(s.max_relative_gap() < 1e-4);
    }

    proptest! {
        #[test]
        fn inversion_round_trip(rho in 0.1f64..=1.0, mu in 0.0f64..0.2, g in 0.0f64..1.0,
                                pi in -0.05f64..0.2, istar in 0.0f64..0.1, tdot in -0.1f64..0.1) {
            let path = IssuancePath::new(mu, (mu + g).min(1.0).max(mu), pi, tdot).unwrap();
            let prm = QuantumRiskParams::new(p(rho), path, y(istar)).unwrap();
            let r = risk_premium_full(&prm);
            let bisected = implied_survival_full(r, &path, y(istar)).unwrap().value();
            let closed = implied_survival_closed_form(r, &path, y(istar)).unwrap().value();
            prop_assert!((bisected - rho).abs() <= 1e-9);
            prop_assert!((bisected - closed).abs() <= 1e-10);
        }

        #[test]
        fn gradients_match_with_volume_growth(rho in 0.1f64..=1.0, mu in 0.0f64..0.2, g in 0.0f64..0.8,
                                              pi in -0.05f64..0.2, istar in 0.0f64..0.1, tdot in -0.1f64..0.1) {
            let path = IssuancePath::new(mu, mu + g, pi, tdot).unwrap();
            let s = comparative_statics(&QuantumRiskParams::new(p(rho), path, y(istar)).unwrap()).unwrap();
            prop_assert!(s.max_relative_gap() < 1e-4);
        }
    }
}
