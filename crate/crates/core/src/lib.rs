//! Crypto-bond pricing under quantum-failure risk.
//!
//! The crate covers five connected pieces:
//!
//! - [`bondmath`]: one-year zero-coupon bonds and the risk premium demanded when
//!   a bond may pay nothing because its chain is broken.
//! - [`fxparity`]: the same premium when the only risk-free asset lives in a
//!   different currency, linked through uncovered interest parity.
//! - [`monetary`]: purchasing-power parity and the quantity equation, used to
//!   forecast exchange-rate moves from token issuance (including issuance
//!   accelerated by a quantum miner).
//! - [`calibrate`]: inverting observed premia into market-implied survival
//!   probabilities, plus comparative statics of the combined premium.
//! - [`chainsim`]: a seeded proof-of-work simulator with classical and
//!   Grover-advantaged miners, and a double-spend race estimator.
//! - [`attackgame`]: attacker targeting across several chains and a minimax
//!   diversification rule for holders.
//!
//! [`shell`] wires everything into scenario files, quote ingestion and the
//! `qrisk` command line tool.

pub mod attackgame;
pub mod bondmath;
pub mod calibrate;
pub mod chainsim;
pub mod error;
pub mod fxparity;
pub mod monetary;
pub mod numfmt;
pub mod shell;

pub use bondmath::{SurvivalProbability, Yield, ZeroCouponBond};
pub use error::{Error, Result};
pub use fxparity::{FxQuote, FxRegime, SpotChange};
pub use monetary::{IssuancePath, LedgerAggregates};
