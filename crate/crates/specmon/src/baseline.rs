//! Flow-level statistics clustering baseline: 17 aggregate statistics per
//! flow (max, min, variance, mean, range of each per-packet feature, plus
//! duration and byte count) fed to the same clustering detector.

use serde::{Deserialize, Serialize};

use crate::ingest::{IngestError, PacketRecord, FEATURE_COUNT};
use crate::spectral::FeatureMatrix;

pub const STAT_COUNT: usize = 5 * FEATURE_COUNT + 2;

/// The 17-dimensional statistics vector of one flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowStatVector(pub Vec<f64>);

/// Per-feature max/min/variance/mean/range over the rows of `s`, then flow
/// duration (µs) and byte count. Variance is the population variance.
pub fn flow_stats(
    s: &FeatureMatrix,
    duration_us: f64,
    byte_count: f64,
) -> Result<FlowStatVector, IngestError> {
    let n = s.n_rows();
    if n == 0 {
        return Err(IngestError::EmptyFlow);
    }
    let mut out = Vec::with_capacity(STAT_COUNT);
    for k in 0..s.n_cols() {
        let col = s.column(k);
        let max = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = col.iter().cloned().fold(f64::INFINITY, f64::min);
        let mean = col.iter().sum::<f64>() / n as f64;
        let variance = col.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        out.extend_from_slice(&[max, min, variance, mean, max - min]);
    }
    out.push(duration_us);
    out.push(byte_count);
    Ok(FlowStatVector(out))
}

/// Compute flow statistics straight from a packet sequence.
pub fn flow_stats_from_records(flow: &[PacketRecord]) -> Result<FlowStatVector, IngestError> {
    let s = crate::ingest::to_feature_rows(flow)?;
    let duration = (flow.last().unwrap().timestamp_us - flow[0].timestamp_us) as f64;
    let bytes: f64 = flow.iter().map(|r| r.length_bytes as f64).sum();
    flow_stats(&s, duration, bytes)
}

/// Min-max scaler fitted on training statistics; detection-time values
/// clamp to [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatScaler {
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

impl StatScaler {
    pub fn fit(vectors: &[FlowStatVector]) -> Option<Self> {
        let dim = vectors.first()?.0.len();
        let mut mins = vec![f64::INFINITY; dim];
        let mut maxs = vec![f64::NEG_INFINITY; dim];
        for v in vectors {
            for (k, &x) in v.0.iter().enumerate() {
                mins[k] = mins[k].min(x);
                maxs[k] = maxs[k].max(x);
            }
        }
        Some(StatScaler { mins, maxs })
    }

    pub fn transform(&self, v: &FlowStatVector) -> Vec<f64> {
        v.0.iter()
            .enumerate()
            .map(|(k, &x)| {
                let span = self.maxs[k] - self.mins[k];
                if span > 0.0 {
                    ((x - self.mins[k]) / span).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect()
    }
}

/// Fit the scaler and normalize the training set in one pass.
pub fn normalize_stats(vectors: &[FlowStatVector]) -> Option<(Vec<Vec<f64>>, StatScaler)> {
    let scaler = StatScaler::fit(vectors)?;
    let normalized = vectors.iter().map(|v| scaler.transform(v)).collect();
    Some((normalized, scaler))
}
