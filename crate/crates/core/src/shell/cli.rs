//! The `qrisk` command line.
//!
//! Parameters come from flags first, then from the `--config` scenario.
//! Rates accept decimal fractions (`0.05`) or an explicit percentage (`5%`).
//! Numbers are printed with ten significant digits. Exit status is 0 on
//! success, 1 on usage or validation errors and 2 when a calibration has no
//! solution.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::attackgame::{
    attacker_best_target, attacker_expected_benefits, market_premia, minimax_diversification,
};
use crate::bondmath::{
    price_riskfree, price_risky, risk_premium_idiosyncratic, risky_yield, SurvivalProbability,
    Yield, ZeroCouponBond,
};
use crate::calibrate::{
    comparative_statics, implied_survival_closed_form, implied_survival_full,
    implied_survival_idiosyncratic, risk_premium_full, QuantumRiskParams,
};
use crate::chainsim::{realized_grover_expansion, simulate_chain, MinerKind, SimOutcome};
use crate::error::{Error, Result};
use crate::fxparity::{
    equilibrium_spot_change, risk_premium_fx, risky_yield_fx, uip_domestic_yield, FxQuote,
};
use crate::monetary::{
    apply_supply_shock, expected_spot_change_approx, expected_spot_change_full,
    expected_spot_with_grover, grover_spot_change, quantity_spot_rate, IssuancePath,
};
use crate::numfmt::sig10;
use crate::shell::quotes::{ingest_quotes, parse_rate, MarketQuotes, Quote};
use crate::shell::scenario::{load_scenario, Scenario};

/// Header of every field/value report.
pub const FIELDS_HEADER: &str = "field,value";
pub const STATICS_HEADER: &str = "derivative,analytic,finite_difference,relative_gap";
pub const GAME_HEADER: &str = "id,attack_success_prob,attacker_value,survival_prob,expected_benefit,premium,minimax_weight,worst_case_loss,best_target";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "qrisk",
    version,
    about = "Crypto-bond pricing and proof-of-work attack simulation under quantum risk"
)]
pub struct Cli {
    /// Scenario JSON file
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Bond quotes CSV (instrument,currency,ytm,date)
    #[arg(long, global = true, value_name = "PATH")]
    pub quotes: Option<PathBuf>,
    /// Random seed; overrides the scenario seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the primary output here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct RiskArgs {
    /// Survival probability rho in (0, 1]
    #[arg(long, value_parser = parse_rate)]
    pub rho: Option<f64>,
    /// Scheduled issuance rate
    #[arg(long, value_parser = parse_rate)]
    pub mu: Option<f64>,
    /// Issuance rate under Grover-expansion (defaults to --mu)
    #[arg(long, value_parser = parse_rate)]
    pub mu_grover: Option<f64>,
    /// Expected fiat inflation
    #[arg(long, value_parser = parse_rate)]
    pub inflation: Option<f64>,
    /// Expected growth of on-chain transaction volume
    #[arg(long, value_parser = parse_rate)]
    pub volume_growth: Option<f64>,
    /// Yield on the risk-free bond in the other currency
    #[arg(long, value_parser = parse_rate)]
    pub foreign_ytm: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Same-currency bond prices and premium
    #[command(allow_negative_numbers = true)]
    Price {
        #[command(flatten)]
        risk: RiskArgs,
        /// Face value
        #[arg(long)]
        face: Option<f64>,
        /// Risk-free yield in the bond's currency
        #[arg(long, value_parser = parse_rate)]
        ytm: Option<f64>,
    },
    /// Cross-currency yields and premium under interest parity
    #[command(allow_negative_numbers = true)]
    Fx {
        #[command(flatten)]
        risk: RiskArgs,
        /// Spot rate, units of the at-risk currency per unit of the risk-free one
        #[arg(long)]
        spot: Option<f64>,
        #[arg(long)]
        expected_spot: Option<f64>,
        /// Treat the at-risk currency as pegged (expected spot = spot)
        #[arg(long)]
        peg: bool,
    },
    /// Exchange-rate forecast from issuance and inflation
    #[command(allow_negative_numbers = true)]
    Forecast {
        #[command(flatten)]
        risk: RiskArgs,
    },
    /// Combined premium under Grover-expansion and key theft
    #[command(allow_negative_numbers = true)]
    Premium {
        #[command(flatten)]
        risk: RiskArgs,
    },
    /// Market-implied survival probability
    #[command(allow_negative_numbers = true)]
    Imply {
        #[command(flatten)]
        risk: RiskArgs,
        /// Observed combined premium (instead of --quotes)
        #[arg(long, value_parser = parse_rate)]
        premium: Option<f64>,
        /// Instrument id of the risk-free bond (default: lowest yield)
        #[arg(long)]
        riskfree: Option<String>,
        /// Instrument id of the at-risk bond (default: highest yield)
        #[arg(long)]
        risky: Option<String>,
    },
    /// Sensitivities of the combined premium
    #[command(allow_negative_numbers = true)]
    Statics {
        #[command(flatten)]
        risk: RiskArgs,
    },
    /// Proof-of-work simulation; prints the block log
    #[command(allow_negative_numbers = true)]
    Simulate {
        /// Simulated seconds
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// Monte-Carlo double-spend success probability
    #[command(allow_negative_numbers = true)]
    Doublespend {
        /// Attacker share of hash power
        #[arg(long, value_parser = parse_rate)]
        q: Option<f64>,
        #[arg(long)]
        confirmations: Option<u32>,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Attacker targeting and minimax diversification across chains
    #[command(allow_negative_numbers = true)]
    Game {
        #[command(flatten)]
        risk: RiskArgs,
    },
}

/// Run the tool on `args` (including the program name). Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    match execute(&cli, stderr) {
        Ok(output) => match emit(&cli, &output, stdout) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                e.exit_code()
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

struct Output {
    text: String,
    destination: Option<PathBuf>,
}

fn emit(cli: &Cli, output: &Output, stdout: &mut dyn Write) -> Result<()> {
    match cli.out.as_ref().or(output.destination.as_ref()) {
        Some(path) => std::fs::write(path, &output.text)?,
        None => stdout.write_all(output.text.as_bytes())?,
    }
    Ok(())
}

fn execute(cli: &Cli, stderr: &mut dyn Write) -> Result<Output> {
    let scenario = match &cli.config {
        Some(path) => {
            let s = load_scenario(path)?;
            let echo = serde_json::to_string(&s).expect("scenario serializes");
            let _ = writeln!(stderr, "scenario: {echo}");
            s
        }
        None => Scenario::default(),
    };
    let ctx = Context {
        scenario: &scenario,
        format: cli.format,
        seed: cli.seed.unwrap_or(scenario.seed),
    };
    let text = match &cli.command {
        Command::Price { risk, face, ytm } => ctx.price(risk, *face, *ytm)?,
        Command::Fx {
            risk,
            spot,
            expected_spot,
            peg,
        } => ctx.fx(risk, *spot, *expected_spot, *peg)?,
        Command::Forecast { risk } => ctx.forecast(risk)?,
        Command::Premium { risk } => ctx.premium(risk)?,
        Command::Imply {
            risk,
            premium,
            riskfree,
            risky,
        } => ctx.imply(
            risk,
            *premium,
            cli.quotes.as_deref(),
            riskfree.as_deref(),
            risky.as_deref(),
        )?,
        Command::Statics { risk } => ctx.statics(risk)?,
        Command::Simulate { horizon } => ctx.simulate(*horizon, stderr)?,
        Command::Doublespend {
            q,
            confirmations,
            trials,
        } => ctx.doublespend(*q, *confirmations, *trials)?,
        Command::Game { risk } => ctx.game(risk)?,
    };
    Ok(Output {
        text,
        destination: scenario.output.clone(),
    })
}

/// A report cell.
#[derive(Debug, Clone)]
enum Val {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Null,
}

impl Val {
    fn csv(&self) -> String {
        match self {
            Val::Num(x) => sig10(*x),
            Val::Int(n) => n.to_string(),
            Val::Text(s) => s.clone(),
            Val::Bool(b) => b.to_string(),
            Val::Null => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Val::Num(x) => num(*x),
            Val::Int(n) => json!(n),
            Val::Text(s) => json!(s),
            Val::Bool(b) => json!(b),
            Val::Null => Value::Null,
        }
    }
}

fn num(x: f64) -> Value {
    sig10(x)
        .parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map_or(Value::Null, Value::Number)
}

fn opt(x: Option<f64>) -> Val {
    x.map_or(Val::Null, Val::Num)
}

fn csv_line(cells: &[String]) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(cells).expect("write to memory");
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 cells")
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn fields_object(fields: &[(&str, Val)]) -> Map<String, Value> {
    fields
        .iter()
        .map(|(k, v)| (k.to_string(), v.json()))
        .collect()
}

fn render_fields(fields: &[(&str, Val)], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = format!("{FIELDS_HEADER}\n");
            for (k, v) in fields {
                out.push_str(&csv_line(&[k.to_string(), v.csv()]));
            }
            out
        }
        Format::Json => json_text(&Value::Object(fields_object(fields))),
    }
}

fn missing(field: &str, flag: &str) -> Error {
    Error::invalid(
        field,
        "missing",
        format!("pass {flag} or set it in the --config scenario"),
    )
}

struct Context<'a> {
    scenario: &'a Scenario,
    format: Format,
    seed: u64,
}

impl Context<'_> {
    fn rho(&self, args: &RiskArgs) -> Result<SurvivalProbability> {
        match args.rho {
            Some(r) => SurvivalProbability::new(r),
            None => self
                .scenario
                .risk
                .as_ref()
                .map(|r| r.rho)
                .ok_or_else(|| missing("rho", "--rho")),
        }
    }

    fn rho_opt(&self, args: &RiskArgs) -> Result<Option<SurvivalProbability>> {
        if args.rho.is_none() && self.scenario.risk.is_none() {
            return Ok(None);
        }
        self.rho(args).map(Some)
    }

    fn foreign_ytm(&self, args: &RiskArgs) -> Result<Yield> {
        match args.foreign_ytm {
            Some(r) => Yield::new(r).map_err(|e| rename(e, "foreign_ytm")),
            None => self
                .scenario
                .risk
                .as_ref()
                .map(|r| r.foreign_ytm)
                .ok_or_else(|| missing("foreign_ytm", "--foreign-ytm")),
        }
    }

    fn path(&self, args: &RiskArgs) -> Result<IssuancePath> {
        let risk = self.scenario.risk.as_ref();
        let mu = args
            .mu
            .or(risk.map(|r| r.baseline_growth))
            .ok_or_else(|| missing("baseline_growth", "--mu"))?;
        // an explicit --mu without --mu-grover means no expansion
        let mu_g = args
            .mu_grover
            .or(if args.mu.is_some() {
                None
            } else {
                risk.and_then(|r| r.grover_growth)
            })
            .unwrap_or(mu);
        let pi = args
            .inflation
            .or(risk.map(|r| r.expected_fiat_inflation))
            .unwrap_or(0.0);
        let tdot = args
            .volume_growth
            .or(risk.map(|r| r.expected_volume_growth))
            .unwrap_or(0.0);
        IssuancePath::new(mu, mu_g, pi, tdot)
    }

    fn params(&self, args: &RiskArgs) -> Result<QuantumRiskParams> {
        QuantumRiskParams::new(self.rho(args)?, self.path(args)?, self.foreign_ytm(args)?)
    }

    fn price(&self, args: &RiskArgs, face: Option<f64>, ytm: Option<f64>) -> Result<String> {
        let section = self.scenario.bond.as_ref();
        let face = face.or(section.map(|b| b.face_value)).unwrap_or(100.0);
        let currency = section.map_or("BTC".to_string(), |b| b.currency.clone());
        let bond = ZeroCouponBond::new(face, currency)?;
        let ytm = match ytm {
            Some(r) => Yield::new(r)?,
            None => section
                .map(|b| b.riskfree_ytm)
                .ok_or_else(|| missing("riskfree_ytm", "--ytm"))?,
        };
        let rho = self.rho(args)?;
        let fields = [
            ("face_value", Val::Num(bond.face_value())),
            ("currency", Val::Text(bond.currency().to_string())),
            ("riskfree_ytm", Val::Num(ytm.rate())),
            ("rho", Val::Num(rho.value())),
            ("riskfree_price", Val::Num(price_riskfree(&bond, ytm))),
            ("risky_ytm", Val::Num(risky_yield(ytm, rho).rate())),
            ("risky_price", Val::Num(price_risky(&bond, ytm, rho))),
            (
                "risk_premium",
                Val::Num(risk_premium_idiosyncratic(ytm, rho).rate()),
            ),
        ];
        Ok(render_fields(&fields, self.format))
    }

    fn fx(
        &self,
        args: &RiskArgs,
        spot: Option<f64>,
        expected_spot: Option<f64>,
        peg: bool,
    ) -> Result<String> {
        let section = self.scenario.fx.as_ref();
        let spot = spot
            .or(section.map(|f| f.spot()))
            .ok_or_else(|| missing("spot", "--spot"))?;
        let quote = if peg {
            FxQuote::pegged(spot)?
        } else {
            let expected = expected_spot
                .or(section.map(|f| f.expected_spot()))
                .ok_or_else(|| missing("expected_spot", "--expected-spot"))?;
            match section {
                Some(f) if expected_spot.is_none() && f.spot() == spot => *f,
                _ => FxQuote::flexible(spot, expected)?,
            }
        };
        let istar = self.foreign_ytm(args)?;
        let rho = self.rho(args)?;
        let ihat = risky_yield_fx(&quote, istar, rho);
        let sdot = equilibrium_spot_change(ihat, istar, rho);
        let fields = [
            ("spot", Val::Num(quote.spot())),
            ("expected_spot", Val::Num(quote.expected_spot())),
            ("spot_change", Val::Num(quote.spot_change().rate())),
            ("foreign_ytm", Val::Num(istar.rate())),
            ("rho", Val::Num(rho.value())),
            (
                "domestic_riskfree_ytm",
                Val::Num(uip_domestic_yield(&quote, istar).rate()),
            ),
            ("risky_ytm", Val::Num(ihat.rate())),
            ("equilibrium_spot_change", Val::Num(sdot.rate())),
            ("risk_premium", Val::Num(risk_premium_fx(istar, sdot, rho))),
        ];
        Ok(render_fields(&fields, self.format))
    }

    fn forecast(&self, args: &RiskArgs) -> Result<String> {
        let path = self.path(args)?;
        let rho = self.rho_opt(args)?;
        let approx = expected_spot_change_approx(&path).ok();
        let grover = rho.map(|r| grover_spot_change(&path, r).rate());
        let grover_approx = rho.map(|r| {
            r.value() * path.baseline_growth + r.failure() * path.grover_growth
                - path.expected_fiat_inflation
                - path.expected_volume_growth
        });

        let (mut prior_spot, mut expected_spot, mut shocked_spot) = (None, None, None);
        if let Some(ledger) = &self.scenario.ledger {
            prior_spot = Some(quantity_spot_rate(ledger));
            let r = rho.unwrap_or(SurvivalProbability::CERTAIN);
            expected_spot = Some(expected_spot_with_grover(&path, r, ledger, None)?.expected_spot);
            if let Some(f) = self.scenario.dormant_fraction {
                shocked_spot = Some(quantity_spot_rate(&apply_supply_shock(ledger, f)?));
            }
        }

        let fields = [
            ("baseline_growth", Val::Num(path.baseline_growth)),
            ("grover_growth", Val::Num(path.grover_growth)),
            (
                "expected_fiat_inflation",
                Val::Num(path.expected_fiat_inflation),
            ),
            (
                "expected_volume_growth",
                Val::Num(path.expected_volume_growth),
            ),
            ("rho", opt(rho.map(|r| r.value()))),
            (
                "spot_change_exact",
                Val::Num(expected_spot_change_full(&path).rate()),
            ),
            ("spot_change_approx", opt(approx)),
            ("grover_spot_change_exact", opt(grover)),
            ("grover_spot_change_approx", opt(grover_approx)),
            ("prior_spot", opt(prior_spot)),
            ("expected_spot", opt(expected_spot)),
            ("shocked_spot", opt(shocked_spot)),
        ];
        Ok(render_fields(&fields, self.format))
    }

    fn premium(&self, args: &RiskArgs) -> Result<String> {
        let params = self.params(args)?;
        let r = risk_premium_full(&params);
        let p = &params.path;
        let fields = [
            ("rho", Val::Num(params.rho.value())),
            ("baseline_growth", Val::Num(p.baseline_growth)),
            ("grover_growth", Val::Num(p.grover_growth)),
            (
                "expected_fiat_inflation",
                Val::Num(p.expected_fiat_inflation),
            ),
            ("expected_volume_growth", Val::Num(p.expected_volume_growth)),
            ("foreign_ytm", Val::Num(params.foreign_ytm.rate())),
            (
                "expected_spot_change",
                Val::Num(grover_spot_change(p, params.rho).rate()),
            ),
            ("risky_ytm", Val::Num(params.foreign_ytm.rate() + r)),
            ("risk_premium", Val::Num(r)),
        ];
        Ok(render_fields(&fields, self.format))
    }

    fn imply(
        &self,
        args: &RiskArgs,
        premium: Option<f64>,
        quotes_path: Option<&Path>,
        riskfree_id: Option<&str>,
        risky_id: Option<&str>,
    ) -> Result<String> {
        let (method, riskfree, risky, rho, closed, observed);
        match (premium, quotes_path) {
            (Some(r), _) => {
                let path = self.path(args)?;
                let istar = self.foreign_ytm(args)?;
                method = "full";
                riskfree = (Val::Null, Val::Num(istar.rate()));
                risky = (Val::Null, Val::Num(istar.rate() + r));
                observed = r;
                rho = implied_survival_full(r, &path, istar)?;
                closed = implied_survival_closed_form(r, &path, istar).ok();
            }
            (None, Some(qp)) => {
                let mut quotes: MarketQuotes = ingest_quotes(qp)?;
                quotes.fiat_inflation = args.inflation;
                let base = pick(&quotes, riskfree_id, quotes.lowest_yield(), qp)?;
                let hat = pick(&quotes, risky_id, quotes.highest_yield(), qp)?;
                if base.instrument == hat.instrument {
                    return Err(Error::invalid(
                        "quotes",
                        qp.display(),
                        "need distinct risk-free and risky instruments",
                    ));
                }
                riskfree = (
                    Val::Text(base.instrument.clone()),
                    Val::Num(base.ytm.rate()),
                );
                risky = (Val::Text(hat.instrument.clone()), Val::Num(hat.ytm.rate()));
                observed = hat.ytm.rate() - base.ytm.rate();
                if base.currency == hat.currency {
                    method = "same-currency";
                    rho = implied_survival_idiosyncratic(hat.ytm, base.ytm)?;
                    closed = Some(rho);
                } else {
                    method = "full";
                    let mut risk_args = RiskArgs {
                        inflation: quotes.fiat_inflation,
                        ..RiskArgs::default()
                    };
                    risk_args.mu = args.mu;
                    risk_args.mu_grover = args.mu_grover;
                    risk_args.volume_growth = args.volume_growth;
                    let path = self.path(&risk_args)?;
                    rho = implied_survival_full(observed, &path, base.ytm)?;
                    closed = implied_survival_closed_form(observed, &path, base.ytm).ok();
                }
            }
            (None, None) => {
                return Err(Error::invalid(
                    "imply",
                    "missing",
                    "pass --premium or --quotes",
                ))
            }
        }
        let fields = [
            ("method", Val::Text(method.to_string())),
            ("riskfree_instrument", riskfree.0),
            ("riskfree_ytm", riskfree.1),
            ("risky_instrument", risky.0),
            ("risky_ytm", risky.1),
            ("premium", Val::Num(observed)),
            ("rho", Val::Num(rho.value())),
            ("failure_probability", Val::Num(rho.failure())),
            ("closed_form_rho", opt(closed.map(|c| c.value()))),
        ];
        Ok(render_fields(&fields, self.format))
    }

    fn statics(&self, args: &RiskArgs) -> Result<String> {
        let report = comparative_statics(&self.params(args)?)?;
        Ok(match self.format {
            Format::Csv => {
                let mut out = format!("{STATICS_HEADER}\n");
                for (name, s) in report.entries() {
                    out.push_str(&csv_line(&[
                        name.to_string(),
                        sig10(s.analytic),
                        sig10(s.finite_difference),
                        sig10(s.relative_gap),
                    ]));
                }
                out
            }
            Format::Json => {
                let obj: Map<String, Value> = report
                    .entries()
                    .iter()
                    .map(|(name, s)| {
                        (
                            name.to_string(),
                            json!({
                                "analytic": num(s.analytic),
                                "finite_difference": num(s.finite_difference),
                                "relative_gap": num(s.relative_gap),
                            }),
                        )
                    })
                    .collect();
                json_text(&Value::Object(obj))
            }
        })
    }

    fn simulate(&self, horizon: Option<f64>, stderr: &mut dyn Write) -> Result<String> {
        let s = self.scenario;
        let horizon = horizon.unwrap_or(s.simulation.horizon);
        let outcome = simulate_chain(&s.chain, &s.miners, horizon, self.seed)?;

        let has_quantum = s.miners.iter().any(|m| m.kind == MinerKind::Quantum);
        let classical: Vec<_> = s
            .miners
            .iter()
            .filter(|m| m.kind == MinerKind::Classical)
            .cloned()
            .collect();
        let (mut mu, mut mu_g) = (None, None);
        if has_quantum && !classical.is_empty() {
            let baseline = simulate_chain(&s.chain, &classical, horizon, self.seed)?;
            if baseline.minted > 0.0 {
                mu = Some(baseline.minted_until(horizon) / baseline.initial_supply);
                mu_g = Some(realized_grover_expansion(&baseline, &outcome, horizon)?);
            }
        }

        let mut summary: Vec<(&str, Val)> = vec![
            ("seed", Val::Int(self.seed)),
            ("horizon", Val::Num(horizon)),
            ("block_count", Val::Int(outcome.blocks.len() as u64)),
            ("minted", Val::Num(outcome.minted)),
            (
                "realized_issuance_rate",
                Val::Num(outcome.realized_issuance_rate),
            ),
            ("final_difficulty", Val::Num(outcome.final_difficulty)),
            ("period_baseline_growth", opt(mu)),
            ("period_grover_growth", opt(mu_g)),
        ];
        let wins: Vec<(String, u64)> = outcome
            .wins
            .iter()
            .map(|w| (format!("wins.{}", w.id), w.blocks))
            .collect();
        let line: Vec<String> = summary
            .iter()
            .map(|(k, v)| format!("{k}={}", v.csv()))
            .chain(wins.iter().map(|(k, n)| format!("{k}={n}")))
            .collect();
        let _ = writeln!(stderr, "summary: {}", line.join(" "));

        match self.format {
            Format::Csv => {
                let mut buf = Vec::new();
                outcome.write_block_log(&mut buf)?;
                Ok(String::from_utf8(buf).expect("utf-8 block log"))
            }
            Format::Json => {
                summary.push((
                    "window_count",
                    Val::Int(outcome.window_mean_intervals.len() as u64),
                ));
                let mut obj = fields_object(&summary);
                obj.insert(
                    "wins".into(),
                    Value::Object(
                        outcome
                            .wins
                            .iter()
                            .map(|w| (w.id.clone(), json!(w.blocks)))
                            .collect(),
                    ),
                );
                obj.insert(
                    "window_mean_intervals".into(),
                    Value::Array(
                        outcome
                            .window_mean_intervals
                            .iter()
                            .map(|x| num(*x))
                            .collect(),
                    ),
                );
                obj.insert("blocks".into(), blocks_json(&outcome));
                Ok(json_text(&Value::Object(obj)))
            }
        }
    }

    fn doublespend(
        &self,
        q: Option<f64>,
        confirmations: Option<u32>,
        trials: Option<u64>,
    ) -> Result<String> {
        let ds = &self.scenario.double_spend;
        let q = q.unwrap_or(ds.attacker_share);
        let z = confirmations.unwrap_or(ds.confirmations);
        let n = trials.unwrap_or(ds.trials);
        let est = crate::chainsim::double_spend_success(q, z, n, self.seed)?;
        let fields = [
            ("attacker_share", Val::Num(q)),
            ("confirmations", Val::Int(u64::from(z))),
            ("trials", Val::Int(n)),
            ("seed", Val::Int(self.seed)),
            ("probability", Val::Num(est.probability)),
            ("std_error", Val::Num(est.std_error)),
        ];
        Ok(render_fields(&fields, self.format))
    }

    fn game(&self, args: &RiskArgs) -> Result<String> {
        let chains = &self.scenario.chains;
        if chains.is_empty() {
            return Err(Error::invalid(
                "chains",
                "[]",
                "the game needs a `chains` list in the --config scenario",
            ));
        }
        let benefits = attacker_expected_benefits(chains)?;
        let best = attacker_best_target(chains)?;
        let (portfolio, value) = minimax_diversification(chains)?;
        let premia = match (self.path(args), self.foreign_ytm(args)) {
            (Ok(path), Ok(istar)) => Some(market_premia(chains, &path, istar)?),
            _ => None,
        };
        let rows: Vec<Vec<(&str, Val)>> = chains
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let w = portfolio.weights()[i];
                vec![
                    ("id", Val::Text(c.id.clone())),
                    ("attack_success_prob", Val::Num(c.attack_success_prob)),
                    ("attacker_value", Val::Num(c.attacker_value)),
                    ("survival_prob", Val::Num(c.survival_prob.value())),
                    ("expected_benefit", Val::Num(benefits[i])),
                    ("premium", opt(premia.as_ref().map(|p| p[i]))),
                    ("minimax_weight", Val::Num(w)),
                    ("worst_case_loss", Val::Num(w * c.loss_fraction)),
                    ("best_target", Val::Bool(i == best)),
                ]
            })
            .collect();
        Ok(match self.format {
            Format::Csv => {
                let mut out = format!("{GAME_HEADER}\n");
                for row in &rows {
                    let cells: Vec<String> = row.iter().map(|(_, v)| v.csv()).collect();
                    out.push_str(&csv_line(&cells));
                }
                out
            }
            Format::Json => json_text(&json!({
                "best_target": chains[best].id,
                "game_value": num(value),
                "chains": rows.iter().map(|r| Value::Object(fields_object(r))).collect::<Vec<_>>(),
            })),
        })
    }
}

fn pick<'q>(
    quotes: &'q MarketQuotes,
    id: Option<&str>,
    fallback: Option<&'q Quote>,
    origin: &Path,
) -> Result<&'q Quote> {
    match id {
        Some(id) => quotes
            .get(id)
            .ok_or_else(|| Error::invalid("instrument", id, "not present in the quotes file")),
        None => fallback
            .ok_or_else(|| Error::invalid("quotes", origin.display(), "need at least two quotes")),
    }
}

fn rename(e: Error, field: &str) -> Error {
    match e {
        Error::InvalidParameter { value, reason, .. } => Error::InvalidParameter {
            field: field.to_string(),
            value,
            reason,
        },
        other => other,
    }
}

fn blocks_json(outcome: &SimOutcome) -> Value {
    Value::Array(
        outcome
            .blocks
            .iter()
            .map(|b| {
                json!({
                    "height": b.height,
                    "timestamp": num(b.timestamp),
                    "miner": b.miner,
                    "reward": num(b.reward),
                    "difficulty": num(b.difficulty),
                })
            })
            .collect(),
    )
}
