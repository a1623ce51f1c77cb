//! File formats and the command line front end.

pub mod cli;
pub mod quotes;
pub mod scenario;

pub use cli::{run, Format};
pub use quotes::{ingest_quotes, parse_rate, MarketQuotes, Quote};
pub use scenario::{load_scenario, Scenario};
