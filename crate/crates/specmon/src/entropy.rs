//! Differential-entropy calculators for per-packet feature models and
//! Monte-Carlo verification of the information-loss bounds.
//!
//! All entropies are in nats. The feature model is an independent Gaussian
//! process with per-index standard deviations `sigma(i)` subject to the
//! non-negative entropy assumption `sigma(i) >= 1/K`, `K = sqrt(2*pi*e)`.

use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// `K = sqrt(2*pi*e)`; `ln(K*sigma)` is the entropy of a Gaussian.
pub const GAUSS_K: f64 = 4.132731354122493; // sqrt(2 * pi * e)

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error("sigma must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("spec violates hypothesis: {0}")]
    HypothesisViolation(String),
    #[error("spec must be stationary for this estimate")]
    NonStationary,
}

/// Independent Gaussian process over `n` indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianProcessSpec {
    pub mean: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl GaussianProcessSpec {
    /// Stationary zero-mean spec with constant sigma.
    pub fn stationary(n: usize, sigma: f64) -> Self {
        GaussianProcessSpec {
            mean: vec![0.0; n],
            sigma: vec![sigma; n],
        }
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn is_stationary(&self) -> bool {
        let first_s = self.sigma.first().copied().unwrap_or(1.0);
        let first_m = self.mean.first().copied().unwrap_or(0.0);
        self.sigma.iter().all(|&s| (s - first_s).abs() < 1e-12)
            && self.mean.iter().all(|&m| (m - first_m).abs() < 1e-12)
    }

    /// Check the non-negative differential entropy assumption.
    pub fn validate(&self) -> Result<(), EntropyError> {
        for &s in &self.sigma {
            if s <= 0.0 {
                return Err(EntropyError::NonPositiveSigma(s));
            }
            if s < 1.0 / GAUSS_K - 1e-12 {
                return Err(EntropyError::HypothesisViolation(format!(
                    "sigma {s} below 1/K = {}",
                    1.0 / GAUSS_K
                )));
            }
        }
        Ok(())
    }

    fn mean_sigma(&self) -> f64 {
        self.sigma.iter().sum::<f64>() / self.len() as f64
    }

    /// Quadratic mean of sigma.
    fn q_sigma(&self) -> f64 {
        (self.sigma.iter().map(|s| s * s).sum::<f64>() / self.len() as f64).sqrt()
    }
}

/// `ln(K * sigma)`.
pub fn entropy_gaussian(sigma: f64) -> Result<f64, EntropyError> {
    if sigma <= 0.0 {
        return Err(EntropyError::NonPositiveSigma(sigma));
    }
    Ok((GAUSS_K * sigma).ln())
}

/// Overall entropy of the packet-level feature sequence: `sum ln(K*sigma(i))`.
pub fn packet_entropy(spec: &GaussianProcessSpec) -> f64 {
    spec.sigma.iter().map(|&s| (GAUSS_K * s).ln()).sum()
}

/// Lower bound on the expected loss of min-max features:
/// `(N-1) * ln(K * mean(sigma))`.
pub fn loss_minmax_lower_bound(spec: &GaussianProcessSpec) -> f64 {
    let n = spec.len();
    if n <= 1 {
        return 0.0;
    }
    (n - 1) as f64 * (GAUSS_K * spec.mean_sigma()).ln()
}

/// Lower bound on the expected loss of the average feature:
/// `ln sqrt(N) * (K * mean(sigma))^(N-1)`.
pub fn loss_avg_expected_lower_bound(spec: &GaussianProcessSpec) -> f64 {
    let n = spec.len() as f64;
    0.5 * n.ln() + (n - 1.0) * (GAUSS_K * spec.mean_sigma()).ln()
}

/// (lower, upper) bounds on the average-feature loss:
/// `ln N <= loss <= ln sqrt(N) * (K * Q(sigma))^(N-1)`.
pub fn loss_avg_bounds(spec: &GaussianProcessSpec) -> (f64, f64) {
    let n = spec.len() as f64;
    let lower = n.ln();
    let upper = 0.5 * n.ln() + (n - 1.0) * (GAUSS_K * spec.q_sigma()).ln();
    (lower, upper)
}

/// Exact average-feature loss:
/// `ln N + (N-1) ln K + sum ln sigma(i) - 0.5 ln sum sigma^2(i)`.
pub fn loss_avg_exact(spec: &GaussianProcessSpec) -> f64 {
    let n = spec.len() as f64;
    let sum_ln: f64 = spec.sigma.iter().map(|s| s.ln()).sum();
    let sum_sq: f64 = spec.sigma.iter().map(|s| s * s).sum();
    n.ln() + (n - 1.0) * GAUSS_K.ln() + sum_ln - 0.5 * sum_sq.ln()
}

/// Variance-feature loss estimate for a stationary zero-mean process:
/// `N ln(K sigma) - ln(sqrt(4 pi N^3) / sigma^2)`.
pub fn loss_variance(spec: &GaussianProcessSpec) -> Result<f64, EntropyError> {
    if !spec.is_stationary() {
        return Err(EntropyError::NonStationary);
    }
    let n = spec.len() as f64;
    let sigma = spec.sigma[0];
    Ok(n * (GAUSS_K * sigma).ln() - ((4.0 * std::f64::consts::PI * n.powi(3)).sqrt() / (sigma * sigma)).ln())
}

/// Spectral-feature loss estimate for a stationary zero-mean process:
/// `N ln((sigma / w^2) * sqrt(pi / 2e)) - N ln N`.
pub fn loss_whisper(spec: &GaussianProcessSpec, w: f64) -> Result<f64, EntropyError> {
    if !spec.is_stationary() {
        return Err(EntropyError::NonStationary);
    }
    let n = spec.len() as f64;
    let sigma = spec.sigma[0];
    let half = (std::f64::consts::PI / (2.0 * std::f64::consts::E)).sqrt();
    Ok(n * (sigma / (w * w) * half).ln() - n * n.ln())
}

/// Loss reduction of the spectral features over the average feature:
/// `N ln(2e w^2 N) + ln(sqrt(N) / (K sigma))`.
pub fn loss_whisper_reduction_avg(spec: &GaussianProcessSpec, w: f64) -> Result<f64, EntropyError> {
    if !spec.is_stationary() {
        return Err(EntropyError::NonStationary);
    }
    let n = spec.len() as f64;
    let sigma = spec.sigma[0];
    Ok(n * (2.0 * std::f64::consts::E * w * w * n).ln() + (n.sqrt() / (GAUSS_K * sigma)).ln())
}

fn digamma(x: f64) -> f64 {
    let mut x = x;
    let mut acc = 0.0;
    while x < 6.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    acc + x.ln() - 0.5 * inv - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0))
}

/// Kozachenko-Leonenko first-nearest-neighbor entropy estimate on scalar
/// samples: `psi(n) - psi(1) + ln 2 + mean(ln eps_i)`.
pub fn kl_entropy_1d(samples: &[f64]) -> f64 {
    let n = samples.len();
    assert!(n >= 2, "need at least two samples");
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut sum_ln = 0.0;
    for i in 0..n {
        let left = if i > 0 {
            sorted[i] - sorted[i - 1]
        } else {
            f64::INFINITY
        };
        let right = if i + 1 < n {
            sorted[i + 1] - sorted[i]
        } else {
            f64::INFINITY
        };
        let eps = left.min(right).max(1e-300);
        sum_ln += eps.ln();
    }
    digamma(n as f64) - digamma(1.0) + 2.0f64.ln() + sum_ln / n as f64
}

/// Monte-Carlo entropy estimate with a standard error from disjoint-block
/// subestimates.
pub fn estimate_entropy_mc(
    mut generator: impl FnMut(&mut StdRng) -> f64,
    n_samples: usize,
    seed: u64,
) -> (f64, f64) {
    assert!(n_samples >= 1000);
    let mut rng = StdRng::seed_from_u64(seed);
    let samples: Vec<f64> = (0..n_samples).map(|_| generator(&mut rng)).collect();
    let estimate = kl_entropy_1d(&samples);
    const BLOCKS: usize = 25;
    let block = n_samples / BLOCKS;
    let block_estimates: Vec<f64> = (0..BLOCKS)
        .map(|b| kl_entropy_1d(&samples[b * block..(b + 1) * block]))
        .collect();
    let mean = block_estimates.iter().sum::<f64>() / BLOCKS as f64;
    let var = block_estimates
        .iter()
        .map(|e| (e - mean) * (e - mean))
        .sum::<f64>()
        / (BLOCKS - 1) as f64;
    // the full-sample estimate averages BLOCKS independent blocks
    let stderr = (var / BLOCKS as f64).sqrt().max(1e-12);
    (estimate, stderr)
}

/// Which theorem a loss report covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LossMethod {
    MinMax,
    AverageExpectedBound,
    AverageBounds,
    Variance,
    Whisper,
    WhisperReduction,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LossReport {
    pub theorem: u8,
    pub method: LossMethod,
    pub closed_form: f64,
    pub monte_carlo: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub bound_satisfied: bool,
    pub detail: String,
}

fn draw_sequence(spec: &GaussianProcessSpec, rng: &mut StdRng) -> Vec<f64> {
    spec.sigma
        .iter()
        .zip(&spec.mean)
        .map(|(&s, &m)| Normal::new(m, s).unwrap().sample(rng))
        .collect()
}

/// Verify one theorem's bound: closed form, plus a Monte-Carlo estimate of
/// the transformed-feature entropy for theorems 1-3. Bound checks allow
/// three standard errors of slack.
pub fn verify_theorem(
    theorem: u8,
    spec: &GaussianProcessSpec,
    mc_samples: usize,
    w: f64,
    seed: u64,
) -> Result<LossReport, EntropyError> {
    spec.validate()?;
    let h_packet = packet_entropy(spec);
    match theorem {
        1 => {
            let bound = loss_minmax_lower_bound(spec);
            let spec_c = spec.clone();
            let (h_min, stderr) = estimate_entropy_mc(
                move |rng| {
                    draw_sequence(&spec_c, rng)
                        .into_iter()
                        .fold(f64::INFINITY, f64::min)
                },
                mc_samples,
                seed,
            );
            let loss_mc = h_packet - h_min;
            Ok(LossReport {
                theorem: 1,
                method: LossMethod::MinMax,
                closed_form: bound,
                monte_carlo: Some(loss_mc),
                mc_stderr: Some(stderr),
                bound_satisfied: loss_mc >= bound - 3.0 * stderr,
                detail: format!("min-feature loss {loss_mc:.4} vs lower bound {bound:.4}"),
            })
        }
        2 => {
            let bound = loss_avg_expected_lower_bound(spec);
            let exact = loss_avg_exact(spec);
            Ok(LossReport {
                theorem: 2,
                method: LossMethod::AverageExpectedBound,
                closed_form: bound,
                monte_carlo: None,
                mc_stderr: None,
                bound_satisfied: bound <= exact + 1e-9,
                detail: format!("expected lower bound {bound:.4} vs exact loss {exact:.4}"),
            })
        }
        3 => {
            let (lower, upper) = loss_avg_bounds(spec);
            let n = spec.len() as f64;
            let spec_c = spec.clone();
            let (h_avg, stderr) = estimate_entropy_mc(
                move |rng| {
                    let seq = draw_sequence(&spec_c, rng);
                    seq.iter().sum::<f64>() / n
                },
                mc_samples,
                seed,
            );
            let loss_mc = h_packet - h_avg;
            Ok(LossReport {
                theorem: 3,
                method: LossMethod::AverageBounds,
                closed_form: lower,
                monte_carlo: Some(loss_mc),
                mc_stderr: Some(stderr),
                bound_satisfied: loss_mc >= lower - 3.0 * stderr,
                detail: format!(
                    "avg-feature loss {loss_mc:.4}, bounds [{lower:.4}, {upper:.4}]"
                ),
            })
        }
        4 => {
            let loss = loss_variance(spec)?;
            Ok(LossReport {
                theorem: 4,
                method: LossMethod::Variance,
                closed_form: loss,
                monte_carlo: None,
                mc_stderr: None,
                bound_satisfied: true,
                detail: format!("variance-feature loss estimate {loss:.4}"),
            })
        }
        5 => {
            // Spot-check the chi-square(2) identity behind the estimate:
            // the squared modulus of one DFT component of white noise is a
            // scaled chi-square(2) variable with entropy 1 + ln 2.
            let loss = loss_whisper(spec, w)?;
            let (h_chi, stderr) = estimate_entropy_mc(
                move |rng| {
                    let a: f64 = Normal::new(0.0, 1.0).unwrap().sample(rng);
                    let b: f64 = Normal::new(0.0, 1.0).unwrap().sample(rng);
                    a * a + b * b
                },
                mc_samples,
                seed,
            );
            let expected = 1.0 + 2.0f64.ln();
            Ok(LossReport {
                theorem: 5,
                method: LossMethod::Whisper,
                closed_form: loss,
                monte_carlo: Some(h_chi),
                mc_stderr: Some(stderr),
                bound_satisfied: (h_chi - expected).abs() <= 3.0 * stderr,
                detail: format!(
                    "spectral loss estimate {loss:.4}; chi2(2) entropy {h_chi:.4} vs {expected:.4}"
                ),
            })
        }
        6 => {
            let lhs = loss_avg_exact(spec) - loss_whisper(spec, w)?;
            let rhs = loss_whisper_reduction_avg(spec, w)?;
            Ok(LossReport {
                theorem: 6,
                method: LossMethod::WhisperReduction,
                closed_form: rhs,
                monte_carlo: None,
                mc_stderr: None,
                bound_satisfied: (lhs - rhs).abs() <= 1e-6 * rhs.abs().max(1.0),
                detail: format!("identity lhs {lhs:.6} vs rhs {rhs:.6}"),
            })
        }
        other => Err(EntropyError::HypothesisViolation(format!(
            "unknown theorem {other}"
        ))),
    }
}
