//! JSON scenario files.
//!
//! Every section is optional; commands complain only about what they need.
//! Unknown fields are rejected. A minimal file:
//!
//! ```json
//! { "risk": { "rho": 0.95, "mu": 0.05, "foreign_ytm": 0.02 } }
//! ```
//!
//! Defaults filled in at load time: `grover_growth = baseline_growth`, zero
//! fiat inflation and volume growth, the Bitcoin-like [`ChainParams`] defaults
//! (2016-block window, 6.25 reward, 21e6 cap, clamp 4), Grover constant `pi/4`,
//! and a single honest classical miner paced exactly at the target interval
//! when no miners are listed.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::attackgame::ChainProfile;
use crate::bondmath::{SurvivalProbability, Yield, ZeroCouponBond};
use crate::calibrate::QuantumRiskParams;
use crate::chainsim::{ChainParams, MinerSpec};
use crate::error::{Error, Result};
use crate::fxparity::FxQuote;
use crate::monetary::{IssuancePath, LedgerAggregates};

fn default_name() -> String {
    "unnamed".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub risk: Option<RiskSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bond: Option<BondSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fx: Option<FxQuote>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ledger: Option<LedgerAggregates>,
    /// Share of supply that is dormant and released by key theft. Absent
    /// means no supply shock.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dormant_fraction: Option<f64>,
    #[serde(default)]
    pub chain: ChainParams,
    #[serde(default)]
    pub miners: Vec<MinerSpec>,
    #[serde(default)]
    pub simulation: SimulationSection,
    #[serde(default)]
    pub double_spend: DoubleSpendSection,
    #[serde(default)]
    pub chains: Vec<ChainProfile>,
    /// Default destination for command output; `--out` overrides it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Quantum-risk beliefs and macro expectations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiskSection {
    pub rho: SurvivalProbability,
    #[serde(alias = "mu")]
    pub baseline_growth: f64,
    #[serde(default, alias = "mu_grover")]
    pub grover_growth: Option<f64>,
    #[serde(default, alias = "inflation")]
    pub expected_fiat_inflation: f64,
    #[serde(default, alias = "volume_growth")]
    pub expected_volume_growth: f64,
    pub foreign_ytm: Yield,
}

impl RiskSection {
    pub fn path(&self) -> Result<IssuancePath> {
        IssuancePath::new(
            self.baseline_growth,
            self.grover_growth.unwrap_or(self.baseline_growth),
            self.expected_fiat_inflation,
            self.expected_volume_growth,
        )
    }

    pub fn params(&self) -> Result<QuantumRiskParams> {
        QuantumRiskParams::new(self.rho, self.path()?, self.foreign_ytm)
    }
}

/// Same-currency bond pair for the idiosyncratic model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BondSection {
    pub face_value: f64,
    #[serde(default = "default_currency")]
    pub currency: String,
    pub riskfree_ytm: Yield,
}

fn default_currency() -> String {
    "BTC".to_string()
}

impl BondSection {
    pub fn bond(&self) -> Result<ZeroCouponBond> {
        ZeroCouponBond::new(self.face_value, self.currency.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    /// Simulated seconds.
    pub horizon: f64,
}

impl Default for SimulationSection {
    fn default() -> Self {
        // one 2016-block window at ten minutes per block
        SimulationSection {
            horizon: 2016.0 * 600.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DoubleSpendSection {
    pub attacker_share: f64,
    pub confirmations: u32,
    pub trials: u64,
}

impl Default for DoubleSpendSection {
    fn default() -> Self {
        DoubleSpendSection {
            attacker_share: 0.1,
            confirmations: 6,
            trials: 100_000,
        }
    }
}

impl Scenario {
    /// Parse and validate a scenario from JSON text. `origin` labels errors.
    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let mut scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            Error::Parse {
                path: origin.to_string(),
                message: if path == "." {
                    inner.to_string()
                } else {
                    format!("{path}: {inner}")
                },
            }
        })?;
        scenario.apply_defaults();
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    fn apply_defaults(&mut self) {
        if let Some(risk) = &mut self.risk {
            risk.grover_growth.get_or_insert(risk.baseline_growth);
        }
        if self.miners.is_empty() {
            self.miners.push(MinerSpec::classical(
                "honest",
                self.chain.initial_difficulty / self.chain.target_interval,
            ));
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(risk) = &self.risk {
            risk.path().map_err(|e| e.within("risk"))?;
        }
        if let Some(bond) = &self.bond {
            bond.bond().map_err(|e| e.within("bond"))?;
        }
        if let Some(fx) = &self.fx {
            fx.validate().map_err(|e| e.within("fx"))?;
        }
        if let Some(ledger) = &self.ledger {
            ledger.validate().map_err(|e| e.within("ledger"))?;
        }
        if let Some(f) = self.dormant_fraction {
            if !(0.0..1.0).contains(&f) {
                return Err(Error::invalid("dormant_fraction", f, "must lie in [0, 1)"));
            }
        }
        self.chain.validate().map_err(|e| e.within("chain"))?;
        for (i, m) in self.miners.iter().enumerate() {
            m.validate()
                .map_err(|e| e.within(&format!("miners[{i}]")))?;
        }
        let h = self.simulation.horizon;
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::invalid("simulation.horizon", h, "must be positive"));
        }
        let ds = &self.double_spend;
        if !(0.0..1.0).contains(&ds.attacker_share) {
            return Err(Error::invalid(
                "double_spend.attacker_share",
                ds.attacker_share,
                "must lie in [0, 1)",
            ));
        }
        if ds.confirmations == 0 {
            return Err(Error::invalid(
                "double_spend.confirmations",
                0,
                "must be >= 1",
            ));
        }
        if ds.trials == 0 {
            return Err(Error::invalid("double_spend.trials", 0, "must be >= 1"));
        }
        for (i, c) in self.chains.iter().enumerate() {
            c.validate()
                .map_err(|e| e.within(&format!("chains[{i}]")))?;
        }
        Ok(())
    }
}

impl Default for Scenario {
    fn default() -> Self {
        let mut s = Scenario {
            name: default_name(),
            seed: 0,
            risk: None,
            bond: None,
            fx: None,
            ledger: None,
            dormant_fraction: None,
            chain: ChainParams::default(),
            miners: Vec::new(),
            simulation: SimulationSection::default(),
            double_spend: DoubleSpendSection::default(),
            chains: Vec::new(),
            output: None,
        };
        s.apply_defaults();
        s
    }
}

/// Read, parse and validate a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Scenario::from_json(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_defaults() {
        let s = Scenario::from_json(
            r#"{"risk": {"rho": 0.95, "mu": 0.05, "foreign_ytm": 0.02}}"#,
            "t",
        )
        .unwrap();
        let risk = s.risk.as_ref().unwrap();
        assert_eq!(risk.grover_growth, Some(0.05));
        assert_eq!(risk.expected_fiat_inflation, 0.0);
        assert_eq!(s.chain.retarget_window, 2016);
        assert_eq!(s.chain.initial_reward, 6.25);
        assert_eq!(s.chain.supply_cap, 21e6);
        assert_eq!(s.chain.retarget_clamp, 4.0);
        assert_eq!(s.miners.len(), 1);
        assert_eq!(s.miners[0].grover_constant, std::f64::consts::FRAC_PI_4);
        assert_eq!(s.name, "unnamed");
    }

    #[test]
    fn range_violation_names_the_field() {
        let err = Scenario::from_json(
            r#"{"risk": {"rho": 1.5, "mu": 0.05, "foreign_ytm": 0.02}}"#,
            "t",
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("risk.rho"), "{err}");
        let err = Scenario::from_json(
            r#"{"risk": {"rho": 0.9, "mu": 0.05, "mu_grover": 0.01, "foreign_ytm": 0.02}}"#,
            "t",
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("risk.grover_growth"), "{err}");
        let err = Scenario::from_json(
            r#"{"miners": [{"id": "a", "kind": "classical", "rate": -1}]}"#,
            "t",
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("miners[0].rate"), "{err}");
    }

    #[test]
    fn unknown_fields_rejected() {
        let err = Scenario::from_json(r#"{"chain": {"window": 5}}"#, "t")
            .unwrap_err()
            .to_string();
        assert!(err.contains("chain"), "{err}");
        assert!(Scenario::from_json(r#"{"bogus": 1}"#, "t").is_err());
        assert!(Scenario::from_json("{", "t").is_err());
    }

    #[test]
    fn serialize_round_trip() {
        let s = Scenario::from_json(
            r#"{"name": "x", "risk": {"rho": 0.9, "mu": 0.05, "mu_grover": 0.5, "inflation": 0.02, "foreign_ytm": 0.02},
                "fx": {"spot": 1.0, "expected_spot": 1.03, "regime": "flexible"},
                "dormant_fraction": 0.33}"#,
            "t",
        )
        .unwrap();
        let again = Scenario::from_json(&s.to_json(), "t").unwrap();
        assert_eq!(s, again);
    }
}
