//! Frequency-domain feature extraction: encoding, framing, DFT, squared
//! modulus, and the logarithmic transform, plus spectrogram export.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::HyperParams;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("dimension mismatch: matrix has {cols} columns, vector has {len}")]
    DimensionMismatch { cols: usize, len: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// The N×M per-packet feature matrix of one flow segment.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl FeatureMatrix {
    pub fn from_rows<R: AsRef<[f64]>>(rows: Vec<R>) -> Result<Self, crate::ingest::IngestError> {
        if rows.is_empty() {
            return Err(crate::ingest::IngestError::EmptyFlow);
        }
        let cols = rows[0].as_ref().len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in &rows {
            debug_assert_eq!(r.as_ref().len(), cols);
            data.extend_from_slice(r.as_ref());
        }
        Ok(FeatureMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Build from a row-major flat buffer; avoids the per-row copy.
    pub fn from_flat(data: Vec<f64>, cols: usize) -> Result<Self, crate::ingest::IngestError> {
        if data.is_empty() || cols == 0 || data.len() % cols != 0 {
            return Err(crate::ingest::IngestError::EmptyFlow);
        }
        Ok(FeatureMatrix {
            rows: data.len() / cols,
            cols,
            data,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Column `k` as an owned vector.
    pub fn column(&self, k: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i)[k]).collect()
    }
}

/// The M-element weight vector combining per-packet features into one real.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingVector(pub Vec<f64>);

impl EncodingVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The K_f×N_f matrix of log-scaled squared-modulus spectra, one column
/// per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyFeatureMatrix {
    /// Column-major: `columns[i]` is the spectrum of frame `i`.
    columns: Vec<Vec<f64>>,
    k_f: usize,
    pub w_seg: usize,
    pub c: f64,
}

impl FrequencyFeatureMatrix {
    pub fn k_f(&self) -> usize {
        self.k_f
    }

    pub fn n_f(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }
}

/// Encode each packet's features as one real number: `v_i = Σ_k s_ik w_k`.
pub fn encode(s: &FeatureMatrix, w: &EncodingVector) -> Result<Vec<f64>, SpectralError> {
    if s.n_cols() != w.len() {
        return Err(SpectralError::DimensionMismatch {
            cols: s.n_cols(),
            len: w.len(),
        });
    }
    Ok((0..s.n_rows())
        .map(|i| s.row(i).iter().zip(&w.0).map(|(x, wk)| x * wk).sum())
        .collect())
}

/// Split the encoded sequence into ⌊N/W_seg⌋ frames of length `w_seg`,
/// dropping any trailing remainder.
pub fn frame(v: &[f64], w_seg: usize) -> Vec<&[f64]> {
    v.chunks_exact(w_seg).collect()
}

/// DFT of one frame. Uses an FFT for any length; tests pin it against the
/// naive direct summation.
pub fn dft_frame(f: &[f64]) -> Vec<Complex<f64>> {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(f.len());
    dft_frame_with(f, &fft)
}

fn dft_frame_with(f: &[f64], fft: &Arc<dyn Fft<f64>>) -> Vec<Complex<f64>> {
    let mut buf: Vec<Complex<f64>> = f.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fft.process(&mut buf);
    buf
}

/// Squared modulus of the first K_f = ⌊W_seg/2⌋+1 components.
pub fn modulus_half(f: &[Complex<f64>]) -> Vec<f64> {
    let k_f = f.len() / 2 + 1;
    f[..k_f].iter().map(|c| c.norm_sqr()).collect()
}

/// `R_k = ln(P_k + 1) / C`.
pub fn log_transform(p: &[f64], c: f64) -> Vec<f64> {
    p.iter().map(|&x| (x + 1.0).ln() / c).collect()
}

/// Full extraction: encode → frame → DFT → modulus → log.
pub fn extract(
    s: &FeatureMatrix,
    w: &EncodingVector,
    hp: &HyperParams,
) -> Result<FrequencyFeatureMatrix, SpectralError> {
    let v = encode(s, w)?;
    extract_encoded(&v, hp)
}

/// Extraction starting from an already-encoded sequence.
pub fn extract_encoded(v: &[f64], hp: &HyperParams) -> Result<FrequencyFeatureMatrix, SpectralError> {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(hp.w_seg);
    let columns: Vec<Vec<f64>> = frame(v, hp.w_seg)
        .into_iter()
        .map(|fr| log_transform(&modulus_half(&dft_frame_with(fr, &fft)), hp.c))
        .collect();
    Ok(FrequencyFeatureMatrix {
        columns,
        k_f: hp.k_f(),
        w_seg: hp.w_seg,
        c: hp.c,
    })
}

/// Feature compression ratio `K_f·N_f / (M·N)`.
pub fn compression_ratio(hp: &HyperParams, n: usize, m: usize) -> f64 {
    (hp.k_f() * hp.n_f(n)) as f64 / (m * n) as f64
}

/// 256-entry colormap: black → blue → magenta → yellow → white, with
/// monotonically increasing luminance. Anchors are linearly interpolated.
pub fn colormap() -> [[u8; 3]; 256] {
    const ANCHORS: [[f64; 3]; 5] = [
        [0.0, 0.0, 0.0],
        [32.0, 12.0, 160.0],
        [190.0, 60.0, 150.0],
        [240.0, 200.0, 60.0],
        [255.0, 255.0, 255.0],
    ];
    let mut table = [[0u8; 3]; 256];
    for (i, entry) in table.iter_mut().enumerate() {
        let t = i as f64 / 255.0 * (ANCHORS.len() - 1) as f64;
        let lo = (t.floor() as usize).min(ANCHORS.len() - 2);
        let frac = t - lo as f64;
        for ch in 0..3 {
            let v = ANCHORS[lo][ch] * (1.0 - frac) + ANCHORS[lo + 1][ch] * frac;
            entry[ch] = v.round() as u8;
        }
    }
    table
}

/// Write the matrix as a binary PPM (P6) image, one pixel per entry,
/// min-max normalized over all entries. A constant matrix maps to the
/// colormap's lowest entry. Top row is the lowest frequency index.
pub fn spectrogram_export(r: &FrequencyFeatureMatrix, path: &Path) -> Result<(), SpectralError> {
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    write_spectrogram(r, &mut out)
}

pub fn write_spectrogram(
    r: &FrequencyFeatureMatrix,
    out: &mut impl Write,
) -> Result<(), SpectralError> {
    let width = r.n_f();
    let height = r.k_f();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for col in r.columns() {
        for &x in col {
            lo = lo.min(x);
            hi = hi.max(x);
        }
    }
    let span = hi - lo;
    let table = colormap();
    write!(out, "P6\n{width} {height}\n255\n")?;
    for k in 0..height {
        for i in 0..width {
            let x = r.column(i)[k];
            let idx = if span > 0.0 {
                (((x - lo) / span) * 255.0).round() as usize
            } else {
                0
            };
            out.write_all(&table[idx.min(255)])?;
        }
    }
    Ok(())
}
