//! Hyperparameter configuration shared across the pipeline.

use serde::{Deserialize, Serialize};

/// Tunable parameters for feature extraction, encoding selection, and
/// clustering. `Default` yields the recommended configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    /// Framing length: packets per DFT frame.
    pub w_seg: usize,
    /// Sampling window length: frames averaged into one clustering sample.
    pub w_win: usize,
    /// Log-scale constant applied to the squared modulus.
    pub c: f64,
    /// Number of clustering centers.
    pub k_c: usize,
    /// Lower bound of the encoding vector.
    pub w_min: f64,
    /// Upper bound of the encoding vector.
    pub w_max: f64,
    /// Upper bound of the encoded features.
    pub b: f64,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            w_seg: 50,
            w_win: 100,
            c: 10.0,
            k_c: 10,
            w_min: 10.0,
            w_max: 1e3,
            b: 1e5,
        }
    }
}

impl HyperParams {
    /// Spectral components retained per frame.
    pub fn k_f(&self) -> usize {
        self.w_seg / 2 + 1
    }

    /// Frame count for a flow of `n` packets.
    pub fn n_f(&self, n: usize) -> usize {
        n / self.w_seg
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.w_seg == 0 || self.w_win == 0 || self.k_c == 0 {
            return Err("w_seg, w_win, and k_c must be positive".into());
        }
        if self.c <= 0.0 || self.b <= 0.0 {
            return Err("c and b must be positive".into());
        }
        if !(self.w_min > 0.0 && self.w_min < self.w_max) {
            return Err("require 0 < w_min < w_max".into());
        }
        Ok(())
    }
}
