//! Benchmark sweeps over graph sizes and strategies.
//!
//! Each size is generated once and matched by every strategy. Only the
//! match call is timed. With `repeats > 1` the reported elapsed time is the
//! median and the counters come from the first run.

use crate::engine::{MatchError, MatchStats, Matcher, Strategy};
use crate::generator::{generate, GenConfig, GenError};
use crate::io::BenchRow;
use crate::pattern::Pattern;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub strategies: Vec<Strategy>,
    pub seed: u64,
    pub clock_hz: f64,
    pub cores: u32,
    pub repeats: usize,
    /// Generator settings other than seed and size.
    pub gen: GenConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![100_000],
            strategies: vec![Strategy::Unified, Strategy::Subpattern],
            seed: 0,
            clock_hz: 2.0e9,
            cores: 1,
            repeats: 3,
            gen: GenConfig::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("{edges} edges: {source}")]
    Generate { edges: usize, source: GenError },
    #[error("{edges} edges, {strategy}: {source}")]
    Match {
        edges: usize,
        strategy: Strategy,
        source: MatchError,
    },
    #[error("repeats must be at least 1")]
    NoRepeats,
}

/// Rows completed before the failure, and the failure.
#[derive(Debug)]
pub struct PartialBench {
    pub rows: Vec<BenchRow>,
    pub error: BenchError,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Runs `strategy` `repeats` times; counters of the first run, median time.
pub fn timed_match(
    matcher: &Matcher,
    strategy: Strategy,
    g: &crate::graph::GraphStore,
    p: &Pattern,
    repeats: usize,
) -> Result<MatchStats, MatchError> {
    let first = matcher.run(strategy, g, p)?.stats;
    let mut times = vec![first.elapsed_seconds];
    for _ in 1..repeats {
        times.push(matcher.run(strategy, g, p)?.stats.elapsed_seconds);
    }
    Ok(MatchStats {
        elapsed_seconds: median(times),
        ..first
    })
}

/// Runs the sweep, calling `on_row` as each row completes.
pub fn run_bench(
    cfg: &BenchConfig,
    matcher: &Matcher,
    pattern: &Pattern,
    mut on_row: impl FnMut(&BenchRow),
) -> Result<Vec<BenchRow>, PartialBench> {
    let mut rows = Vec::new();
    if cfg.repeats == 0 {
        return Err(PartialBench {
            rows,
            error: BenchError::NoRepeats,
        });
    }
    for &edges in &cfg.sizes {
        let gen_cfg = GenConfig {
            seed: cfg.seed,
            target_edges: edges,
            ..cfg.gen.clone()
        };
        let g = match generate(&gen_cfg) {
            Ok((g, _)) => g,
            Err(source) => {
                return Err(PartialBench {
                    rows,
                    error: BenchError::Generate { edges, source },
                })
            }
        };
        for &strategy in &cfg.strategies {
            let stats = match timed_match(matcher, strategy, &g, pattern, cfg.repeats) {
                Ok(s) => s,
                Err(source) => {
                    return Err(PartialBench {
                        rows,
                        error: BenchError::Match {
                            edges,
                            strategy,
                            source,
                        },
                    })
                }
            };
            let row = BenchRow::new(
                g.edge_count() as u64,
                strategy,
                &stats,
                cfg.clock_hz,
                cfg.cores,
                cfg.seed,
            );
            log::info!(
                "{edges} {strategy}: {:.6} s, {} inferences",
                stats.elapsed_seconds,
                stats.inferences()
            );
            on_row(&row);
            rows.push(row);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::builtin_agile_lite;

    fn cfg(sizes: Vec<usize>) -> BenchConfig {
        BenchConfig {
            sizes,
            repeats: 1,
            ..BenchConfig::default()
        }
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn one_size_one_strategy_is_one_row() {
        let c = BenchConfig {
            strategies: vec![Strategy::Unified],
            ..cfg(vec![1000])
        };
        let rows = run_bench(&c, &Matcher::new(), &builtin_agile_lite(), |_| {}).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].inferences, rows[0].atom_matches + rows[0].rule_firings);
    }

    #[test]
    fn counters_repeat_and_grow_with_size() {
        let c = cfg(vec![1000, 2000, 4000]);
        let p = builtin_agile_lite();
        let a = run_bench(&c, &Matcher::new(), &p, |_| {}).unwrap();
        let b = run_bench(&c, &Matcher::new(), &p, |_| {}).unwrap();
        assert_eq!(a.len(), 6);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!((x.atom_matches, x.rule_firings), (y.atom_matches, y.rule_firings));
        }
        for s in [Strategy::Unified, Strategy::Subpattern] {
            let ms: Vec<u64> = a.iter().filter(|r| r.strategy == s).map(|r| r.atom_matches).collect();
            assert!(ms.windows(2).all(|w| w[0] <= w[1]), "{s}: {ms:?}");
        }
    }

    #[test]
    fn failure_keeps_completed_rows() {
        let mut seen = 0;
        let err = run_bench(&cfg(vec![1000, 3]), &Matcher::new(), &builtin_agile_lite(), |_| {
            seen += 1
        })
        .unwrap_err();
        assert_eq!(err.rows.len(), 2);
        assert_eq!(seen, 2);
        assert!(matches!(err.error, BenchError::Generate { edges: 3, .. }));
    }
}
