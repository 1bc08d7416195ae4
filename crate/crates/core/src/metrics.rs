//! Throughput figures derived from a run's counters and wall-clock time.

use thiserror::Error;

use crate::engine::MatchStats;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum MetricsError {
    #[error("elapsed time is zero")]
    ZeroDuration,
    #[error("no inferences were performed")]
    ZeroInferences,
    #[error("graph has no edges")]
    ZeroEdges,
}

/// Logical inferences per second.
pub fn lips(stats: &MatchStats) -> Result<f64, MetricsError> {
    lips_raw(stats.inferences(), stats.elapsed_seconds)
}

pub fn lips_raw(inferences: u64, elapsed_seconds: f64) -> Result<f64, MetricsError> {
    if elapsed_seconds <= 0.0 {
        return Err(MetricsError::ZeroDuration);
    }
    Ok(inferences as f64 / elapsed_seconds)
}

/// Clock cycles spent per inference.
pub fn cycles_per_inference(stats: &MatchStats, clock_hz: f64) -> Result<f64, MetricsError> {
    cycles_per_inference_raw(stats.inferences(), stats.elapsed_seconds, clock_hz)
}

pub fn cycles_per_inference_raw(inferences: u64, elapsed_seconds: f64, clock_hz: f64) -> Result<f64, MetricsError> {
    if inferences == 0 {
        return Err(MetricsError::ZeroInferences);
    }
    Ok(clock_hz * elapsed_seconds / inferences as f64)
}

/// Clock cycles per graph edge, summed over `cores`.
pub fn cycles_per_edge(elapsed_seconds: f64, cores: u32, clock_hz: f64, edge_count: u64) -> Result<f64, MetricsError> {
    if edge_count == 0 {
        return Err(MetricsError::ZeroEdges);
    }
    Ok(f64::from(cores) * clock_hz * elapsed_seconds / edge_count as f64)
}
