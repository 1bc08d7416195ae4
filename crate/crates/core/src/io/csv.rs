//! Benchmark metrics as CSV.
//!
//! Comma separated, `\n` line endings, no quoting. Counters are written as
//! integers. Floating-point columns use the shortest decimal form that
//! parses back to the identical `f64`; a derived column is empty when its
//! formula is undefined (zero time, inferences or edges). Rows are sorted
//! by `(edges, strategy)`.

use std::io::{self, Write};
use std::str::FromStr;

use thiserror::Error;

use crate::engine::{MatchStats, Strategy};
use crate::metrics;

pub const CSV_HEADER: &str =
    "edges,strategy,elapsed_s,atom_matches,rule_firings,inferences,lips,cycles_per_inference,cycles_per_edge,seed";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub edges: u64,
    pub strategy: Strategy,
    pub elapsed_s: f64,
    pub atom_matches: u64,
    pub rule_firings: u64,
    /// `atom_matches + rule_firings`.
    pub inferences: u64,
    pub lips: Option<f64>,
    pub cycles_per_inference: Option<f64>,
    pub cycles_per_edge: Option<f64>,
    pub seed: u64,
}

impl BenchRow {
    /// Derives the rate columns from `stats`, timed at `stats.elapsed_seconds`.
    pub fn new(edges: u64, strategy: Strategy, stats: &MatchStats, clock_hz: f64, cores: u32, seed: u64) -> Self {
        BenchRow {
            edges,
            strategy,
            elapsed_s: stats.elapsed_seconds,
            atom_matches: stats.atom_matches,
            rule_firings: stats.rule_firings,
            inferences: stats.inferences(),
            lips: metrics::lips(stats).ok(),
            cycles_per_inference: metrics::cycles_per_inference(stats, clock_hz).ok(),
            cycles_per_edge: metrics::cycles_per_edge(stats.elapsed_seconds, cores, clock_hz, edges).ok(),
            seed,
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv_row<W: Write + ?Sized>(w: &mut W, r: &BenchRow) -> io::Result<()> {
    writeln!(
        w,
        "{},{},{},{},{},{},{},{},{},{}",
        r.edges,
        r.strategy,
        r.elapsed_s,
        r.atom_matches,
        r.rule_firings,
        r.inferences,
        opt(r.lips),
        opt(r.cycles_per_inference),
        opt(r.cycles_per_edge),
        r.seed
    )
}

/// Header plus `rows` sorted by `(edges, strategy)`.
pub fn write_metrics_csv(rows: &[BenchRow], mut w: impl Write) -> io::Result<()> {
    let mut sorted: Vec<&BenchRow> = rows.iter().collect();
    sorted.sort_by_key(|r| (r.edges, r.strategy));
    writeln!(w, "{CSV_HEADER}")?;
    for r in sorted {
        write_csv_row(&mut w, r)?;
    }
    w.flush()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("csv line {line}: {msg}")]
pub struct CsvError {
    pub line: usize,
    pub msg: String,
}

/// Parses a file written by [`write_metrics_csv`]; `#` lines are skipped.
pub fn read_metrics_csv(text: &str) -> Result<Vec<BenchRow>, CsvError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.is_empty());
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        _ => {
            return Err(CsvError {
                line: 1,
                msg: "missing header".into(),
            })
        }
    }
    lines
        .map(|(i, l)| {
            let err = |msg: String| CsvError { line: i + 1, msg };
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 10 {
                return Err(err(format!("expected 10 fields, got {}", f.len())));
            }
            fn num<T: FromStr>(s: &str, err: &dyn Fn(String) -> CsvError) -> Result<T, CsvError> {
                s.parse().map_err(|_| err(format!("malformed field `{s}`")))
            }
            let optf = |s: &str| -> Result<Option<f64>, CsvError> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    num(s, &err).map(Some)
                }
            };
            Ok(BenchRow {
                edges: num(f[0], &err)?,
                strategy: f[1].parse().map_err(err)?,
                elapsed_s: num(f[2], &err)?,
                atom_matches: num(f[3], &err)?,
                rule_firings: num(f[4], &err)?,
                inferences: num(f[5], &err)?,
                lips: optf(f[6])?,
                cycles_per_inference: optf(f[7])?,
                cycles_per_edge: optf(f[8])?,
                seed: num(f[9], &err)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(am: u64, rf: u64, t: f64) -> MatchStats {
        MatchStats {
            atom_matches: am,
            rule_firings: rf,
            backtracks: 0,
            elapsed_seconds: t,
        }
    }

    #[test]
    fn empty_is_header_only() {
        let mut out = Vec::new();
        write_metrics_csv(&[], &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn worked_example() {
        let r = BenchRow::new(1_000_000, Strategy::Unified, &stats(9_999_990, 10, 1.0), 2.0e9, 1, 5);
        assert_eq!(r.inferences, 10_000_000);
        assert_eq!(r.lips, Some(1.0e7));
        assert_eq!(r.cycles_per_inference, Some(200.0));
        assert_eq!(r.cycles_per_edge, Some(2000.0));
        let mut out = Vec::new();
        write_metrics_csv(std::slice::from_ref(&r), &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap().lines().nth(1),
            Some("1000000,unified,1,9999990,10,10000000,10000000,200,2000,5")
        );
    }

    #[test]
    fn rows_sorted_and_round_trip() {
        let mut rows = Vec::new();
        for edges in [300u64, 100, 200] {
            for s in [Strategy::Subpattern, Strategy::Unified] {
                rows.push(BenchRow::new(
                    edges,
                    s,
                    &stats(edges * 7, 3, 0.1 + edges as f64 / 1e3),
                    2.5e9,
                    2,
                    1,
                ));
            }
        }
        rows.push(BenchRow::new(50, Strategy::Unified, &stats(0, 0, 0.0), 2.5e9, 2, 1));
        let mut out = Vec::new();
        write_metrics_csv(&rows, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let back = read_metrics_csv(&text).unwrap();
        assert_eq!(back.len(), 7);
        let keys: Vec<(u64, Strategy)> = back.iter().map(|r| (r.edges, r.strategy)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(back[0].lips, None);
        for r in &back {
            assert!(rows.contains(r));
        }
    }
}
