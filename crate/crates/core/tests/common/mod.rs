#![allow(dead_code)]

use std::path::PathBuf;

use qrisk::calibrate::QuantumRiskParams;
use qrisk::monetary::IssuancePath;
use qrisk::{SurvivalProbability, Yield};
use rand::Rng;

/// Closed-form double-spend probability for an attacker with share `q` once
/// the payment has `z` confirmations. During those confirmations the attacker
/// finds `k` blocks with negative-binomial probability; from a deficit of
/// `z - k` it must then get one block ahead, which a gambler's-ruin walk does
/// with probability `(q/p)^(z-k+1)`.
pub fn race_oracle(q: f64, z: u32) -> f64 {
    if q <= 0.0 {
        return 0.0;
    }
    let p = 1.0 - q;
    if q >= p {
        return 1.0;
    }
    let ratio = q / p;
    let z = z as i32;
    let mut lost = 0.0;
    // C(k+z-1, k) p^z q^k, built up term by term
    let mut nb = p.powi(z);
    for k in 0..=z {
        if k > 0 {
            nb *= f64::from(k + z - 1) / f64::from(k) * q;
        }
        lost += nb * (1.0 - ratio.powi(z - k + 1));
    }
    1.0 - lost
}

pub fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn qrisk(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qrisk").chain(args.iter().copied());
    let code = qrisk::shell::run(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

/// `field -> value` pairs from a `field,value` report.
pub fn fields(csv_text: &str) -> Vec<(String, String)> {
    csv_text
        .lines()
        .skip(1)
        .map(|l| {
            let (k, v) = l.split_once(',').expect("two columns");
            (k.to_string(), v.to_string())
        })
        .collect()
}

pub fn field(csv_text: &str, name: &str) -> f64 {
    fields(csv_text)
        .into_iter()
        .find(|(k, _)| k == name)
        .unwrap_or_else(|| panic!("no field {name} in\n{csv_text}"))
        .1
        .parse()
        .unwrap()
}

/// One draw from the calibration grid:
/// rho in [0.1, 1], mu in [0, 0.2], mu_g in [mu, 1], pi in [-0.05, 0.2], i* in [0, 0.1].
pub fn draw_params<R: Rng>(rng: &mut R) -> QuantumRiskParams {
    let rho = rng.random_range(0.1..=1.0);
    let mu = rng.random_range(0.0..=0.2);
    let mu_g = rng.random_range(mu..=1.0);
    let pi = rng.random_range(-0.05..=0.2);
    let istar = rng.random_range(0.0..=0.1);
    QuantumRiskParams::new(
        SurvivalProbability::new(rho).unwrap(),
        IssuancePath::new(mu, mu_g, pi, 0.0).unwrap(),
        Yield::new(istar).unwrap(),
    )
    .unwrap()
}
