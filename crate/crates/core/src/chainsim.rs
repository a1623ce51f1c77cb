//! Seeded proof-of-work simulation with classical and Grover-advantaged miners.
//!
//! Hash functions are never evaluated. Difficulty `D` is the expected number
//! of classical hash attempts per block, so a classical miner querying at
//! `rate` hashes per second finds a block after an exponentially distributed
//! time with mean `D / rate`. A quantum miner runs one Grover search of
//! `k * sqrt(D)` oracle queries (`k = pi/4` by default) and always succeeds
//! when the search completes; if another miner finds the block first the
//! search is restarted on the new block. Error-correction overhead is modelled
//! by lowering the quantum miner's `rate`.
//!
//! Difficulty is retargeted every `retarget_window` blocks from the observed
//! duration of the window, so a fast miner mints a full window of rewards
//! before the chain reacts. Transaction fees are not modelled.

use std::f64::consts::FRAC_PI_4;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numfmt::sig10;

pub const SECONDS_PER_YEAR: f64 = 365.25 * 86_400.0;

/// Header of the exported block log.
pub const BLOCK_LOG_HEADER: &str = "height,timestamp,miner,reward,difficulty";

/// Runaway guard on the number of blocks in one run.
pub const MAX_BLOCKS: usize = 20_000_000;

/// Proof-of-work environment. Defaults follow Bitcoin in its 6.25-coin era.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainParams {
    /// Expected classical hash attempts per block at the start of the run.
    pub initial_difficulty: f64,
    /// Seconds per block the retarget rule aims for.
    pub target_interval: f64,
    pub retarget_window: u64,
    /// Reward of the first simulated block.
    pub initial_reward: f64,
    /// Blocks between reward halvings, counted from the first simulated block.
    pub halving_interval: u64,
    pub supply_cap: f64,
    /// Tokens outstanding before the first simulated block.
    pub initial_supply: f64,
    /// Difficulty may change by at most this factor per retarget.
    pub retarget_clamp: f64,
}

impl Default for ChainParams {
    fn default() -> Self {
        ChainParams {
            initial_difficulty: 1e12,
            target_interval: 600.0,
            retarget_window: 2016,
            initial_reward: 6.25,
            halving_interval: 210_000,
            supply_cap: 21e6,
            initial_supply: 18_375_000.0,
            retarget_clamp: 4.0,
        }
    }
}

impl ChainParams {
    pub fn validate(&self) -> Result<()> {
        let pos = |field: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(field, v, "must be positive"))
            }
        };
        pos("initial_difficulty", self.initial_difficulty)?;
        pos("target_interval", self.target_interval)?;
        pos("initial_reward", self.initial_reward)?;
        pos("supply_cap", self.supply_cap)?;
        pos("initial_supply", self.initial_supply)?;
        if self.retarget_window == 0 {
            return Err(Error::invalid("retarget_window", 0, "must be positive"));
        }
        if self.halving_interval == 0 {
            return Err(Error::invalid("halving_interval", 0, "must be positive"));
        }
        if !(self.retarget_clamp.is_finite() && self.retarget_clamp >= 1.0) {
            return Err(Error::invalid(
                "retarget_clamp",
                self.retarget_clamp,
                "must be >= 1",
            ));
        }
        if self.initial_supply > self.supply_cap {
            return Err(Error::invalid(
                "initial_supply",
                self.initial_supply,
                "exceeds supply_cap",
            ));
        }
        Ok(())
    }

    /// Reward before the supply cap is applied.
    pub fn scheduled_reward(&self, height: u64) -> f64 {
        let halvings = height / self.halving_interval;
        if halvings >= 64 {
            0.0
        } else {
            self.initial_reward / (1u64 << halvings) as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MinerKind {
    Classical,
    Quantum,
}

fn default_grover_constant() -> f64 {
    FRAC_PI_4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinerSpec {
    pub id: String,
    pub kind: MinerKind,
    /// Hash evaluations (classical) or oracle queries (quantum) per second.
    pub rate: f64,
    /// Grover query-count constant `k`; ignored for classical miners.
    #[serde(default = "default_grover_constant")]
    pub grover_constant: f64,
}

impl MinerSpec {
    pub fn classical(id: impl Into<String>, rate: f64) -> Self {
        MinerSpec {
            id: id.into(),
            kind: MinerKind::Classical,
            rate,
            grover_constant: FRAC_PI_4,
        }
    }

    pub fn quantum(id: impl Into<String>, rate: f64) -> Self {
        MinerSpec {
            id: id.into(),
            kind: MinerKind::Quantum,
            rate,
            grover_constant: FRAC_PI_4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rate.is_finite() && self.rate > 0.0) {
            return Err(Error::invalid("rate", self.rate, "must be positive"));
        }
        if !(self.grover_constant.is_finite() && self.grover_constant > 0.0) {
            return Err(Error::invalid(
                "grover_constant",
                self.grover_constant,
                "must be positive",
            ));
        }
        Ok(())
    }

    /// Expected seconds to find a block at `difficulty`.
    pub fn expected_solve_time(&self, difficulty: f64) -> f64 {
        match self.kind {
            MinerKind::Classical => difficulty / self.rate,
            MinerKind::Quantum => self.grover_constant * difficulty.sqrt() / self.rate,
        }
    }
}

/// Ratio of classical to Grover query counts at equal query rates:
/// `D / (k sqrt(D)) = sqrt(D) / k`.
pub fn grover_speedup(difficulty: f64, grover_constant: f64) -> f64 {
    difficulty.sqrt() / grover_constant
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub height: u64,
    pub timestamp: f64,
    pub miner: String,
    pub reward: f64,
    pub difficulty: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinerWins {
    pub id: String,
    pub blocks: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub blocks: Vec<BlockRecord>,
    pub horizon: f64,
    pub initial_supply: f64,
    pub minted: f64,
    /// Minted tokens per year relative to the initial supply.
    pub realized_issuance_rate: f64,
    /// Mean block interval of each completed retarget window.
    pub window_mean_intervals: Vec<f64>,
    /// Win counts in miner order.
    pub wins: Vec<MinerWins>,
    pub final_difficulty: f64,
}

impl SimOutcome {
    /// Tokens minted in blocks with `timestamp <= t`.
    pub fn minted_until(&self, t: f64) -> f64 {
        self.blocks
            .iter()
            .take_while(|b| b.timestamp <= t)
            .map(|b| b.reward)
            .sum()
    }

    pub fn wins_of(&self, id: &str) -> u64 {
        self.wins
            .iter()
            .find(|w| w.id == id)
            .map_or(0, |w| w.blocks)
    }

    /// Write the block log as CSV with [`BLOCK_LOG_HEADER`].
    pub fn write_block_log<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let header: Vec<&str> = BLOCK_LOG_HEADER.split(',').collect();
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(&header).map_err(csv_err)?;
        for b in &self.blocks {
            w.write_record([
                b.height.to_string(),
                sig10(b.timestamp),
                b.miner.clone(),
                sig10(b.reward),
                sig10(b.difficulty),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Seconds until `miner` solves a block at `difficulty`.
///
/// Classical miners draw from an exponential distribution with mean
/// `difficulty / rate`. Quantum miners take exactly
/// `grover_constant * sqrt(difficulty) / rate` and draw nothing from `rng`.
pub fn block_time_sample<R: Rng + ?Sized>(miner: &MinerSpec, difficulty: f64, rng: &mut R) -> f64 {
    match miner.kind {
        MinerKind::Classical => Exp::new(miner.rate / difficulty)
            .expect("positive rate and difficulty")
            .sample(rng),
        MinerKind::Quantum => miner.expected_solve_time(difficulty),
    }
}

/// Run one chain for `horizon` simulated seconds.
///
/// At every height each miner draws a solve time; the earliest wins, ties
/// going to the miner listed first. Blocks after `horizon` are discarded.
/// Difficulty never drops below 1.
pub fn simulate_chain(
    params: &ChainParams,
    miners: &[MinerSpec],
    horizon: f64,
    seed: u64,
) -> Result<SimOutcome> {
    params.validate()?;
    if miners.is_empty() {
        return Err(Error::invalid(
            "miners",
            "[]",
            "at least one miner is required",
        ));
    }
    for (i, m) in miners.iter().enumerate() {
        m.validate()
            .map_err(|e| e.within(&format!("miners[{i}]")))?;
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::invalid("horizon", horizon, "must be positive"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut difficulty = params.initial_difficulty.max(1.0);
    let mut now = 0.0;
    let mut window_start = 0.0;
    let mut minted = 0.0;
    let headroom = params.supply_cap - params.initial_supply;
    let mut blocks = Vec::new();
    let mut window_mean_intervals = Vec::new();
    let mut wins = vec![0u64; miners.len()];

    loop {
        let height = blocks.len() as u64;
        let (winner, dt) = miners
            .iter()
            .enumerate()
            .map(|(i, m)| (i, block_time_sample(m, difficulty, &mut rng)))
            .fold(
                (0, f64::INFINITY),
                |best, cur| if cur.1 < best.1 { cur } else { best },
            );
        let t = now + dt;
        if t > horizon {
            break;
        }
        if blocks.len() >= MAX_BLOCKS {
            return Err(Error::invalid(
                "horizon",
                horizon,
                format!("run exceeds {MAX_BLOCKS} blocks"),
            ));
        }
        now = t;

        let reward = params
            .scheduled_reward(height)
            .min(headroom - minted)
            .max(0.0);
        minted += reward;
        wins[winner] += 1;
        blocks.push(BlockRecord {
            height,
            timestamp: now,
            miner: miners[winner].id.clone(),
            reward,
            difficulty,
        });

        if (height + 1).is_multiple_of(params.retarget_window) {
            let actual = now - window_start;
            window_mean_intervals.push(actual / params.retarget_window as f64);
            let expected = params.target_interval * params.retarget_window as f64;
            let clamp = params.retarget_clamp;
            let factor = if actual > 0.0 {
                (expected / actual).clamp(1.0 / clamp, clamp)
            } else {
                clamp
            };
            difficulty = (difficulty * factor).max(1.0);
            window_start = now;
        }
    }

    Ok(SimOutcome {
        realized_issuance_rate: minted / params.initial_supply * (SECONDS_PER_YEAR / horizon),
        blocks,
        horizon,
        initial_supply: params.initial_supply,
        minted,
        window_mean_intervals,
        wins: miners
            .iter()
            .zip(wins)
            .map(|(m, blocks)| MinerWins {
                id: m.id.clone(),
                blocks,
            })
            .collect(),
        final_difficulty: difficulty,
    })
}

/// Issuance rate over `period` seconds under attack, scaled from the baseline.
///
/// The baseline run fixes the scheduled rate `mu` (tokens minted in the first
/// `period` over its initial supply); the attacked run's minted tokens over the
/// same span scale it: `mu_g = mu * attacked / baseline`.
pub fn realized_grover_expansion(
    baseline: &SimOutcome,
    attacked: &SimOutcome,
    period: f64,
) -> Result<f64> {
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::invalid("period", period, "must be positive"));
    }
    if baseline.horizon < period || attacked.horizon < period {
        return Err(Error::invalid(
            "period",
            period,
            "both runs must cover at least one period",
        ));
    }
    let base = baseline.minted_until(period);
    if base <= 0.0 {
        return Err(Error::invalid(
            "baseline",
            base,
            "baseline run minted nothing in the period",
        ));
    }
    let mu = base / baseline.initial_supply;
    Ok(mu * attacked.minted_until(period) / base)
}

/// Monte-Carlo double-spend estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoubleSpendEstimate {
    pub probability: f64,
    pub std_error: f64,
    pub trials: u64,
}

/// Probability that an attacker with hash share `q` ever builds a strictly
/// longer private chain, starting when the payment has `confirmations` honest
/// blocks on top of it.
///
/// Each trial first draws blocks until the honest chain has found
/// `confirmations` blocks, counting the attacker's blocks found meanwhile,
/// then runs the catch-up race block by block. A race is abandoned as lost once
/// the attacker trails by so much that catching up has probability below
/// 1e-12. `q >= 0.5` returns 1 and `q = 0` returns 0 without simulating.
pub fn double_spend_success(
    q: f64,
    confirmations: u32,
    trials: u64,
    seed: u64,
) -> Result<DoubleSpendEstimate> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::invalid("q", q, "attacker share must lie in [0, 1)"));
    }
    if confirmations == 0 {
        return Err(Error::invalid("confirmations", 0, "must be >= 1"));
    }
    if trials == 0 {
        return Err(Error::invalid("trials", 0, "must be >= 1"));
    }
    let exact = |probability| DoubleSpendEstimate {
        probability,
        std_error: 0.0,
        trials,
    };
    if q >= 0.5 {
        return Ok(exact(1.0));
    }
    if q == 0.0 {
        return Ok(exact(0.0));
    }

    let give_up = abandon_deficit(q);
    let z = i64::from(confirmations);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut wins = 0u64;
    for _ in 0..trials {
        let mut honest = 0;
        let mut deficit = z;
        while honest < z {
            if rng.random::<f64>() < q {
                deficit -= 1;
            } else {
                honest += 1;
            }
        }
        while (0..give_up).contains(&deficit) {
            if rng.random::<f64>() < q {
                deficit -= 1;
            } else {
                deficit += 1;
            }
        }
        if deficit < 0 {
            wins += 1;
        }
    }
    let n = trials as f64;
    let probability = wins as f64 / n;
    Ok(DoubleSpendEstimate {
        probability,
        std_error: (probability * (1.0 - probability) / n).sqrt(),
        trials,
    })
}

/// Smallest deficit from which overtaking has probability below 1e-12.
fn abandon_deficit(q: f64) -> i64 {
    let ratio = q / (1.0 - q);
    let d = ((1e-12f64).ln() / ratio.ln()).ceil();
    d.clamp(1.0, 1e6) as i64
}
