//! Attacker targeting across several chains and a minimax rule for holders.
//!
//! An attacker values a successful attack on chain `i` at `sigma_i * v_i`
//! (success probability times subjective value). The market's survival
//! beliefs `rho_i` are separate inputs; they need not follow from `sigma_i`.
//!
//! The diversification game here is the smallest zero-sum version: the
//! attacker destroys the fraction `L_i` of whatever is held on the one chain
//! it picks, and the holder chooses portfolio weights to minimise the worst
//! case. It is an illustrative model, not a full equilibrium analysis.

use serde::{Deserialize, Serialize};

use crate::bondmath::{SurvivalProbability, Yield};
use crate::calibrate::{risk_premium_full, QuantumRiskParams};
use crate::error::{Error, Result};
use crate::monetary::IssuancePath;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainProfile {
    pub id: String,
    pub attack_success_prob: f64,
    pub attacker_value: f64,
    pub survival_prob: SurvivalProbability,
    pub capitalization: f64,
    pub loss_fraction: f64,
}

impl ChainProfile {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.attack_success_prob) {
            return Err(Error::invalid(
                "attack_success_prob",
                self.attack_success_prob,
                "must lie in [0, 1]",
            ));
        }
        if !(self.attacker_value.is_finite() && self.attacker_value > 0.0) {
            return Err(Error::invalid(
                "attacker_value",
                self.attacker_value,
                "must be positive",
            ));
        }
        if !(self.capitalization.is_finite() && self.capitalization > 0.0) {
            return Err(Error::invalid(
                "capitalization",
                self.capitalization,
                "must be positive",
            ));
        }
        if !(self.loss_fraction > 0.0 && self.loss_fraction <= 1.0) {
            return Err(Error::invalid(
                "loss_fraction",
                self.loss_fraction,
                "must lie in (0, 1]",
            ));
        }
        Ok(())
    }
}

/// Weights on the simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Portfolio(Vec<f64>);

impl Portfolio {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("weights", "[]", "portfolio is empty"));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::invalid("weights", w, "weights must be nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("weights", total, "weights must sum to 1"));
        }
        Ok(Portfolio(weights))
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    /// Largest loss `w_i L_i` the attacker can inflict.
    pub fn worst_case_loss(&self, loss_fractions: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(loss_fractions)
            .map(|(w, l)| w * l)
            .fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<f64>> for Portfolio {
    type Error = Error;

    fn try_from(w: Vec<f64>) -> Result<Self> {
        Portfolio::new(w)
    }
}

impl From<Portfolio> for Vec<f64> {
    fn from(p: Portfolio) -> Vec<f64> {
        p.0
    }
}

fn nonempty(chains: &[ChainProfile]) -> Result<()> {
    if chains.is_empty() {
        return Err(Error::invalid(
            "chains",
            "[]",
            "at least one chain is required",
        ));
    }
    for (i, c) in chains.iter().enumerate() {
        c.validate()
            .map_err(|e| e.within(&format!("chains[{i}]")))?;
    }
    Ok(())
}

/// `sigma_i * v_i` for each chain.
pub fn attacker_expected_benefits(chains: &[ChainProfile]) -> Result<Vec<f64>> {
    nonempty(chains)?;
    Ok(chains
        .iter()
        .map(|c| c.attack_success_prob * c.attacker_value)
        .collect())
}

/// Index of the chain with the largest expected benefit. Ties go to the lowest
/// index.
pub fn attacker_best_target(chains: &[ChainProfile]) -> Result<usize> {
    let benefits = attacker_expected_benefits(chains)?;
    let mut best = 0;
    for (i, b) in benefits.iter().enumerate().skip(1) {
        if *b > benefits[best] {
            best = i;
        }
    }
    Ok(best)
}

/// Combined premium of each chain's crypto-bond under shared macro inputs.
pub fn market_premia(
    chains: &[ChainProfile],
    shared: &IssuancePath,
    foreign_ytm: Yield,
) -> Result<Vec<f64>> {
    nonempty(chains)?;
    chains
        .iter()
        .map(|c| {
            QuantumRiskParams::new(c.survival_prob, *shared, foreign_ytm)
                .map(|p| risk_premium_full(&p))
        })
        .collect()
}

/// Minimax portfolio `w_i = (1/L_i) / sum_j (1/L_j)` and its game value
/// `1 / sum_j (1/L_j)`. Equalises `w_i L_i` across chains.
pub fn minimax_diversification(chains: &[ChainProfile]) -> Result<(Portfolio, f64)> {
    nonempty(chains)?;
    let losses: Vec<f64> = chains.iter().map(|c| c.loss_fraction).collect();
    minimax_weights(&losses)
}

/// [`minimax_diversification`] on bare loss fractions.
pub fn minimax_weights(loss_fractions: &[f64]) -> Result<(Portfolio, f64)> {
    if loss_fractions.is_empty() {
        return Err(Error::invalid(
            "loss_fraction",
            "[]",
            "at least one chain is required",
        ));
    }
    if let Some(l) = loss_fractions.iter().find(|l| !(**l > 0.0 && **l <= 1.0)) {
        return Err(Error::invalid("loss_fraction", l, "must lie in (0, 1]"));
    }
    let inv_total: f64 = loss_fractions.iter().map(|l| 1.0 / l).sum();
    let mut weights: Vec<f64> = loss_fractions
        .iter()
        .map(|l| 1.0 / (l * inv_total))
        .collect();
    // absorb rounding so the weights sum to one
    let drift: f64 = weights.iter().sum::<f64>() - 1.0;
    let largest = weights
        .iter()
        .enumerate()
        .fold(0, |b, (i, w)| if *w > weights[b] { i } else { b });
    weights[largest] -= drift;
    Ok((Portfolio::new(weights)?, 1.0 / inv_total))
}
