use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ExperimentRecord, GameError};
use crate::rng::derive_seed;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "QS2LAB_THREADS";

/// Worker threads for trial batches: a positive `QS2LAB_THREADS`, else all cores.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdvantageEstimate {
    pub trials: u64,
    pub wins: u64,
    pub win_rate: f64,
    /// `|win_rate − ½|`.
    pub advantage: f64,
    /// `√(win_rate (1 − win_rate) / trials)`.
    pub stderr: f64,
}

impl AdvantageEstimate {
    pub fn from_counts(trials: u64, wins: u64) -> Self {
        assert!(trials > 0 && wins <= trials);
        let p = wins as f64 / trials as f64;
        Self {
            trials,
            wins,
            win_rate: p,
            advantage: (p - 0.5).abs(),
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
        }
    }

    pub fn from_records(records: &[ExperimentRecord]) -> Self {
        Self::from_counts(
            records.len() as u64,
            records.iter().filter(|r| r.win).count() as u64,
        )
    }

    /// Whether the win rate lies within `k` binomial standard deviations of
    /// `expected`, with σ taken at `expected`. Exact claims (rate 0 or 1)
    /// therefore get zero slack.
    pub fn within(&self, expected: f64, k: f64) -> bool {
        let sigma = (expected * (1.0 - expected) / self.trials as f64).sqrt();
        (self.win_rate - expected).abs() <= k * sigma + 1e-12
    }
}

/// Runs `trials` independent trials in parallel and merges them in trial order.
///
/// Trial `i` receives `derive_seed(game_seed, i)`; `run` must be a pure
/// function of `(i, seed)` for the batch to replay.
pub fn estimate_advantage<F>(
    trials: u64,
    game_seed: u64,
    run: F,
) -> Result<(Vec<ExperimentRecord>, AdvantageEstimate), GameError>
where
    F: Fn(u64, u64) -> Result<ExperimentRecord, GameError> + Sync,
{
    if trials == 0 {
        return Err(GameError::InvalidConfig(
            "trial count must be positive".into(),
        ));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(|e| GameError::InvalidConfig(format!("thread pool: {e}")))?;
    let records = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|i| run(i, derive_seed(game_seed, i)))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let estimate = AdvantageEstimate::from_records(&records);
    Ok((records, estimate))
}
