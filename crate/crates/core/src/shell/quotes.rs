//! Observed bond yields from CSV.
//!
//! Header `instrument,currency,ytm,date`. Yields are decimal fractions or
//! carry an explicit `%` suffix; dates are ISO-8601 (`2024-01-31`, optionally
//! with a time part). Loading is all-or-nothing. Fetching quotes from a data
//! vendor is left to the caller.

use std::collections::HashSet;
use std::path::Path;

use chrono::{DateTime, NaiveDate};
use serde::Serialize;

use crate::bondmath::Yield;
use crate::error::{Error, Result};

pub const QUOTES_HEADER: [&str; 4] = ["instrument", "currency", "ytm", "date"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quote {
    pub instrument: String,
    pub currency: String,
    pub ytm: Yield,
    pub date: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct MarketQuotes {
    pub quotes: Vec<Quote>,
    /// Fiat inflation forecast attached by the caller, if any.
    pub fiat_inflation: Option<f64>,
}

impl MarketQuotes {
    pub fn get(&self, instrument: &str) -> Option<&Quote> {
        self.quotes.iter().find(|q| q.instrument == instrument)
    }

    pub fn is_empty(&self) -> bool {
        self.quotes.is_empty()
    }

    /// Lowest-yielding quote; first in file order on ties.
    pub fn lowest_yield(&self) -> Option<&Quote> {
        self.quotes
            .iter()
            .fold(None, |best: Option<&Quote>, q| match best {
                Some(b) if b.ytm.rate() <= q.ytm.rate() => Some(b),
                _ => Some(q),
            })
    }

    /// Highest-yielding quote; first in file order on ties.
    pub fn highest_yield(&self) -> Option<&Quote> {
        self.quotes
            .iter()
            .fold(None, |best: Option<&Quote>, q| match best {
                Some(b) if b.ytm.rate() >= q.ytm.rate() => Some(b),
                _ => Some(q),
            })
    }
}

/// Parse a rate given either as a decimal fraction (`0.05`) or a percentage
/// with an explicit suffix (`5%`).
pub fn parse_rate(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim();
    let (number, percent) = match t.strip_suffix('%') {
        Some(n) => (n.trim(), true),
        None => (t, false),
    };
    let v: f64 = number
        .parse()
        .map_err(|_| format!("not a number: {text:?}"))?;
    if !v.is_finite() {
        return Err(format!("not finite: {text:?}"));
    }
    Ok(if percent { v / 100.0 } else { v })
}

fn parse_date(text: &str) -> std::result::Result<NaiveDate, String> {
    let t = text.trim();
    NaiveDate::parse_from_str(t, "%Y-%m-%d")
        .or_else(|_| DateTime::parse_from_rfc3339(t).map(|d| d.date_naive()))
        .map_err(|_| format!("not an ISO-8601 date: {text:?}"))
}

/// Read quotes from `path`.
pub fn ingest_quotes(path: &Path) -> Result<MarketQuotes> {
    let origin = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|e| Error::Parse {
        path: origin.clone(),
        message: e.to_string(),
    })?;
    read_quotes(file, &origin)
}

/// Read quotes from any reader; `origin` labels errors.
pub fn read_quotes<R: std::io::Read>(input: R, origin: &str) -> Result<MarketQuotes> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let row_err = |line: u64, message: String| Error::Row {
        path: origin.to_string(),
        line,
        message,
    };

    let header = reader
        .headers()
        .map_err(|e| row_err(1, e.to_string()))?
        .clone();
    if header.iter().collect::<Vec<_>>() != QUOTES_HEADER {
        return Err(row_err(
            1,
            format!(
                "expected header {:?}, found {:?}",
                QUOTES_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }

    let mut quotes = Vec::new();
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            row_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let instrument = record[0].to_string();
        if instrument.is_empty() {
            return Err(row_err(line, "empty instrument id".into()));
        }
        let rate = parse_rate(&record[2]).map_err(|m| row_err(line, m))?;
        let ytm = Yield::new(rate).map_err(|e| row_err(line, e.to_string()))?;
        let date = parse_date(&record[3]).map_err(|m| row_err(line, m))?;
        if !seen.insert(instrument.clone()) {
            return Err(row_err(
                line,
                format!("duplicate instrument {instrument:?}"),
            ));
        }
        quotes.push(Quote {
            instrument,
            currency: record[1].to_string(),
            ytm,
            date,
        });
    }
    Ok(MarketQuotes {
        quotes,
        fiat_inflation: None,
    })
}
