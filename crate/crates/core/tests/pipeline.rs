mod common;

use common::{race_oracle, scenario};
use qrisk::bondmath::risky_yield;
use qrisk::calibrate::{
    implied_survival_full, implied_survival_idiosyncratic, risk_premium_full, QuantumRiskParams,
};
use qrisk::chainsim::{realized_grover_expansion, simulate_chain, MinerKind};
use qrisk::monetary::IssuancePath;
use qrisk::shell::{ingest_quotes, load_scenario, Scenario};
use qrisk::{SurvivalProbability, Yield};

#[test]
fn two_bond_quotes_imply_rho() {
    let quotes = ingest_quotes(&scenario("two_bonds.csv")).unwrap();
    let rf = quotes.lowest_yield().unwrap();
    let risky = quotes.highest_yield().unwrap();
    assert_eq!(rf.currency, risky.currency);
    let rho = implied_survival_idiosyncratic(risky.ytm, rf.ytm).unwrap();
    assert!((rho.value() - 0.95).abs() < 1e-9);
    // and back again
    let again = risky_yield(rf.ytm, rho).rate();
    assert!((again - risky.ytm.rate()).abs() < 1e-12);
}

#[test]
fn shipped_scenarios_round_trip() {
    for name in ["baseline.json", "quantum_miner.json"] {
        let s = load_scenario(&scenario(name)).unwrap();
        let again = Scenario::from_json(&s.to_json(), name).unwrap();
        assert_eq!(s, again, "{name}");
    }
}

#[test]
fn simulated_expansion_feeds_the_premium() {
    let s = load_scenario(&scenario("quantum_miner.json")).unwrap();
    let horizon = s.simulation.horizon;
    let attacked = simulate_chain(&s.chain, &s.miners, horizon, s.seed).unwrap();
    let classical: Vec<_> = s
        .miners
        .iter()
        .filter(|m| m.kind == MinerKind::Classical)
        .cloned()
        .collect();
    let baseline = simulate_chain(&s.chain, &classical, horizon, s.seed).unwrap();
    let mu = baseline.minted_until(horizon) / baseline.initial_supply;
    let mu_g = realized_grover_expansion(&baseline, &attacked, horizon).unwrap();
    assert!(
        mu_g > mu,
        "quantum miner should speed up issuance: {mu_g} vs {mu}"
    );

    let istar = Yield::new(0.02).unwrap();
    let rho = SurvivalProbability::new(0.9).unwrap();
    let calm =
        QuantumRiskParams::new(rho, IssuancePath::new(mu, mu, 0.02, 0.0).unwrap(), istar).unwrap();
    let hot = QuantumRiskParams::new(rho, IssuancePath::new(mu, mu_g, 0.02, 0.0).unwrap(), istar)
        .unwrap();
    let (r_calm, r_hot) = (risk_premium_full(&calm), risk_premium_full(&hot));
    assert!(r_hot > r_calm);
    let back = implied_survival_full(r_hot, &hot.path, istar).unwrap();
    assert!((back.value() - 0.9).abs() < 1e-9);
}

#[test]
fn race_oracle_sanity() {
    assert_eq!(race_oracle(0.0, 6), 0.0);
    assert_eq!(race_oracle(0.5, 6), 1.0);
    // one confirmation: attacker wins outright with 2+ blocks before the
    // honest one, or from a deficit of d ends one ahead with (q/p)^(d+1)
    let (q, p) = (0.3f64, 0.7f64);
    let r = q / p;
    let direct = q * q + p * r * r + p * q * r;
    assert!((race_oracle(0.3, 1) - direct).abs() < 1e-15);
    for z in 1..10 {
        assert!(race_oracle(0.2, z + 1) < race_oracle(0.2, z));
    }
}
