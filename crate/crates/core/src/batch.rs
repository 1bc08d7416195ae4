//! Seed sweeps: generate one graph per seed and match it.
//!
//! Seeds are independent, so a sweep is spread across threads with
//! [`Exec::Parallel`]; each individual match stays single-threaded.

use crate::engine::{MatchError, MatchResult, Matcher, Strategy};
use crate::generator::{generate, GenConfig, GenError};
use crate::graph::ObjectId;
use crate::par::{self, Exec};
use crate::pattern::Pattern;

/// One seed's graph and the result of every requested strategy on it.
#[derive(Debug, Clone)]
pub struct SeedOutcome {
    pub seed: u64,
    pub planted_root: ObjectId,
    pub edge_count: usize,
    pub digest: u64,
    /// Parallel to the `strategies` argument of [`sweep_seeds`].
    pub results: Vec<MatchResult>,
}

impl SeedOutcome {
    /// All strategies returned the same root set.
    pub fn agree(&self) -> bool {
        self.results.windows(2).all(|w| w[0].roots == w[1].roots)
    }

    /// Every strategy returned exactly the planted root.
    pub fn unique_planted(&self) -> bool {
        self.results.iter().all(|r| r.roots == [self.planted_root])
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BatchError {
    #[error("seed {seed}: {source}")]
    Generate { seed: u64, source: GenError },
    #[error("seed {seed}, {strategy}: {source}")]
    Match {
        seed: u64,
        strategy: Strategy,
        source: MatchError,
    },
}

/// Runs `strategies` on `generate(base with seed)` for every seed.
/// Outcomes are in seed order; the first failing seed in that order wins.
pub fn sweep_seeds(
    exec: Exec,
    seeds: &[u64],
    base: &GenConfig,
    matcher: &Matcher,
    pattern: &Pattern,
    strategies: &[Strategy],
) -> Result<Vec<SeedOutcome>, BatchError> {
    par::map(exec, seeds, |&seed| {
        let cfg = GenConfig { seed, ..base.clone() };
        let (g, report) = generate(&cfg).map_err(|source| BatchError::Generate { seed, source })?;
        let results = strategies
            .iter()
            .map(|&strategy| {
                matcher
                    .run(strategy, &g, pattern)
                    .map_err(|source| BatchError::Match { seed, strategy, source })
            })
            .collect::<Result<_, _>>()?;
        Ok(SeedOutcome {
            seed,
            planted_root: report.planted_root,
            edge_count: report.edge_count,
            digest: report.digest,
            results,
        })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::builtin_agile_lite;

    #[test]
    fn parallel_equals_sequential() {
        let base = GenConfig::new(0, 600);
        let p = builtin_agile_lite();
        let m = Matcher::new();
        let seeds = [3, 1, 4, 1, 5];
        let s = [Strategy::Unified, Strategy::Subpattern];
        let a = sweep_seeds(Exec::Parallel, &seeds, &base, &m, &p, &s).unwrap();
        let b = sweep_seeds(Exec::Sequential, &seeds, &base, &m, &p, &s).unwrap();
        assert_eq!(a.len(), 5);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!((x.seed, x.digest, x.planted_root), (y.seed, y.digest, y.planted_root));
            assert!(x.agree() && x.unique_planted());
            assert_eq!(x.results[0].stats.atom_matches, y.results[0].stats.atom_matches);
        }
    }

    #[test]
    fn too_small_reports_seed() {
        let err = sweep_seeds(
            Exec::Sequential,
            &[9],
            &GenConfig::new(0, 3),
            &Matcher::new(),
            &builtin_agile_lite(),
            &[Strategy::Unified],
        )
        .unwrap_err();
        assert!(matches!(err, BatchError::Generate { seed: 9, .. }));
    }
}
