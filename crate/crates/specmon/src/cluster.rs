//! Statistical clustering: seeded K-Means on benign frequency-domain
//! samples, the train-loss statistic, and the threshold detection rule.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::HyperParams;
use crate::ingest::FlowKey;
use crate::spectral::{EncodingVector, FrequencyFeatureMatrix};

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("insufficient samples: {count} < {k_c} clusters")]
    InsufficientSamples { count: usize, k_c: usize },
    #[error("dimension mismatch: sample has {sample}, centers have {center}")]
    DimensionMismatch { sample: usize, center: usize },
}

pub const MODEL_FORMAT_VERSION: u32 = 1;
const KMEANS_MAX_ITERS: usize = 300;
const KMEANS_TOL: f64 = 1e-6;
/// Threshold floor when training data is degenerate (train_loss ~ 0).
const ZERO_LOSS_EPS: f64 = 1e-9;

/// The trained detector: benign cluster centers plus the training loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub format_version: u32,
    pub centers: Vec<Vec<f64>>,
    pub train_loss: f64,
    pub hyperparams: HyperParams,
    pub encoding_vector: EncodingVector,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Benign,
    Malicious,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectionResult {
    pub flow_key: String,
    pub scores: Vec<f64>,
    pub verdict: Verdict,
    pub threshold_used: f64,
    /// Set when the flow produced no full frame and was passed as benign
    /// without spectral evidence.
    pub no_spectral_evidence: bool,
}

impl DetectionResult {
    pub fn max_score(&self) -> f64 {
        self.scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Average ⌊N_f/W_win⌋ windows of consecutive spectrum columns into
/// clustering samples. When the matrix is shorter than one window, fall
/// back to a single sample averaging all available columns.
pub fn window_samples(r: &FrequencyFeatureMatrix, w_win: usize) -> Vec<Vec<f64>> {
    let n_f = r.n_f();
    let k_f = r.k_f();
    if n_f == 0 {
        return Vec::new();
    }
    let mean_of = |range: std::ops::Range<usize>| -> Vec<f64> {
        let len = range.len() as f64;
        let mut acc = vec![0.0; k_f];
        for i in range {
            for (a, &x) in acc.iter_mut().zip(r.column(i)) {
                *a += x;
            }
        }
        acc.iter().map(|a| a / len).collect()
    };
    let n_t = n_f / w_win;
    if n_t == 0 {
        return vec![mean_of(0..n_f)];
    }
    (0..n_t).map(|i| mean_of(i * w_win..(i + 1) * w_win)).collect()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// K-Means with k-means++ initialization, fixed seed, 300 iteration cap,
/// convergence on center movement below 1e-6.
pub fn kmeans(samples: &[Vec<f64>], k: usize, seed: u64) -> Result<Vec<Vec<f64>>, ClusterError> {
    if samples.len() < k {
        return Err(ClusterError::InsufficientSamples {
            count: samples.len(),
            k_c: k,
        });
    }
    let dim = samples[0].len();
    let mut rng = StdRng::seed_from_u64(seed);

    // k-means++ seeding
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    centers.push(samples[rng.gen_range(0..samples.len())].clone());
    while centers.len() < k {
        let dists: Vec<f64> = samples
            .iter()
            .map(|s| {
                centers
                    .iter()
                    .map(|c| sq_dist(s, c))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = dists.iter().sum();
        let next = if total <= 0.0 {
            rng.gen_range(0..samples.len())
        } else {
            let mut target = rng.gen_range(0.0..total);
            let mut pick = samples.len() - 1;
            for (i, &d) in dists.iter().enumerate() {
                if target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            pick
        };
        centers.push(samples[next].clone());
    }

    let mut assignment = vec![0usize; samples.len()];
    for _ in 0..KMEANS_MAX_ITERS {
        for (i, s) in samples.iter().enumerate() {
            assignment[i] = centers
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    sq_dist(s, a).partial_cmp(&sq_dist(s, b)).unwrap()
                })
                .map(|(j, _)| j)
                .unwrap();
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, s) in samples.iter().enumerate() {
            counts[assignment[i]] += 1;
            for (a, &x) in sums[assignment[i]].iter_mut().zip(s) {
                *a += x;
            }
        }
        let mut movement: f64 = 0.0;
        for j in 0..k {
            if counts[j] == 0 {
                // keep the empty center where it is
                continue;
            }
            let new: Vec<f64> = sums[j].iter().map(|x| x / counts[j] as f64).collect();
            movement = movement.max(sq_dist(&new, &centers[j]).sqrt());
            centers[j] = new;
        }
        if movement < KMEANS_TOL {
            break;
        }
    }
    Ok(centers)
}

/// Train the detector on benign window samples.
pub fn train(
    samples: &[Vec<f64>],
    hp: &HyperParams,
    encoding: EncodingVector,
    seed: u64,
) -> Result<ClusterModel, ClusterError> {
    let centers = kmeans(samples, hp.k_c, seed)?;
    let train_loss = samples
        .iter()
        .map(|s| nearest_distance(&centers, s))
        .sum::<f64>()
        / samples.len() as f64;
    Ok(ClusterModel {
        format_version: MODEL_FORMAT_VERSION,
        centers,
        train_loss,
        hyperparams: hp.clone(),
        encoding_vector: encoding,
        seed,
    })
}

fn nearest_distance(centers: &[Vec<f64>], sample: &[f64]) -> f64 {
    centers
        .iter()
        .map(|c| sq_dist(c, sample).sqrt())
        .fold(f64::INFINITY, f64::min)
}

/// Minimum L2 distance from the sample to any center.
pub fn score(model: &ClusterModel, sample: &[f64]) -> Result<f64, ClusterError> {
    let dim = model.centers[0].len();
    if sample.len() != dim {
        return Err(ClusterError::DimensionMismatch {
            sample: sample.len(),
            center: dim,
        });
    }
    Ok(nearest_distance(&model.centers, sample))
}

/// Effective detection threshold: `phi * train_loss`, floored when the
/// training loss is degenerate.
pub fn threshold(model: &ClusterModel, phi: f64) -> f64 {
    if model.train_loss < 1e-12 {
        phi * ZERO_LOSS_EPS
    } else {
        phi * model.train_loss
    }
}

/// Score every window sample of `r`; the flow is malicious iff any score
/// reaches `phi * train_loss`.
pub fn detect(
    model: &ClusterModel,
    flow_key: &FlowKey,
    r: &FrequencyFeatureMatrix,
    phi: f64,
) -> Result<DetectionResult, ClusterError> {
    let threshold_used = threshold(model, phi);
    let samples = window_samples(r, model.hyperparams.w_win);
    if samples.is_empty() {
        return Ok(DetectionResult {
            flow_key: flow_key.to_string(),
            scores: Vec::new(),
            verdict: Verdict::Benign,
            threshold_used,
            no_spectral_evidence: true,
        });
    }
    let mut scores = Vec::with_capacity(samples.len());
    for s in &samples {
        scores.push(score(model, s)?);
    }
    let malicious = scores.iter().any(|&l| l >= threshold_used);
    Ok(DetectionResult {
        flow_key: flow_key.to_string(),
        scores,
        verdict: if malicious {
            Verdict::Malicious
        } else {
            Verdict::Benign
        },
        threshold_used,
        no_spectral_evidence: false,
    })
}
