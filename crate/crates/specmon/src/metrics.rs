//! Detection metrics from labeled scores: confusion rates, ROC curves,
//! AUC (Mann-Whitney convention), and EER.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("scores and labels have different lengths")]
    LengthMismatch,
    #[error("no positive samples")]
    NoPositives,
    #[error("no negative samples")]
    NoNegatives,
    #[error("only one class present")]
    SingleClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Benign,
    Malicious,
}

/// Parallel score/label sequences.
#[derive(Debug, Clone)]
pub struct LabeledScores {
    pub scores: Vec<f64>,
    pub labels: Vec<Label>,
}

impl LabeledScores {
    pub fn new(scores: Vec<f64>, labels: Vec<Label>) -> Result<Self, MetricsError> {
        if scores.len() != labels.len() {
            return Err(MetricsError::LengthMismatch);
        }
        Ok(LabeledScores { scores, labels })
    }

    fn split(&self) -> (Vec<f64>, Vec<f64>) {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (&s, &l) in self.scores.iter().zip(&self.labels) {
            match l {
                Label::Malicious => pos.push(s),
                Label::Benign => neg.push(s),
            }
        }
        (pos, neg)
    }

    fn require_both(&self) -> Result<(Vec<f64>, Vec<f64>), MetricsError> {
        let (pos, neg) = self.split();
        if pos.is_empty() || neg.is_empty() {
            return Err(MetricsError::SingleClass);
        }
        Ok((pos, neg))
    }
}

/// (TPR, FPR) at a threshold; a sample is flagged positive when
/// `score >= threshold`.
pub fn confusion_at(ls: &LabeledScores, threshold: f64) -> Result<(f64, f64), MetricsError> {
    let (pos, neg) = ls.split();
    if pos.is_empty() {
        return Err(MetricsError::NoPositives);
    }
    if neg.is_empty() {
        return Err(MetricsError::NoNegatives);
    }
    let tp = pos.iter().filter(|&&s| s >= threshold).count() as f64;
    let fp = neg.iter().filter(|&&s| s >= threshold).count() as f64;
    Ok((tp / pos.len() as f64, fp / neg.len() as f64))
}

/// AUC as the Mann-Whitney statistic: P(pos > neg) + 0.5·P(pos = neg).
pub fn auc(ls: &LabeledScores) -> Result<f64, MetricsError> {
    let (mut pos, mut neg) = ls.require_both()?;
    pos.sort_by(|a, b| a.partial_cmp(b).unwrap());
    neg.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // For each positive, count negatives strictly below plus half of ties
    // via two binary-search cursors over the sorted negatives.
    let mut total = 0.0;
    for &p in &pos {
        let below = neg.partition_point(|&x| x < p);
        let not_above = neg.partition_point(|&x| x <= p);
        total += below as f64 + 0.5 * (not_above - below) as f64;
    }
    Ok(total / (pos.len() * neg.len()) as f64)
}

/// One operating point of the ROC.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

/// ROC points at every distinct score threshold, from (0,0) (threshold
/// above every score) to (1,1), sorted by ascending FPR/TPR.
pub fn roc_curve(ls: &LabeledScores) -> Result<Vec<RocPoint>, MetricsError> {
    ls.require_both()?;
    let mut thresholds: Vec<f64> = ls.scores.clone();
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();
    let mut points = vec![RocPoint { fpr: 0.0, tpr: 0.0 }];
    for &t in &thresholds {
        let (tpr, fpr) = confusion_at(ls, t)?;
        points.push(RocPoint { fpr, tpr });
    }
    let last = *points.last().unwrap();
    if last.fpr < 1.0 || last.tpr < 1.0 {
        points.push(RocPoint { fpr: 1.0, tpr: 1.0 });
    }
    Ok(points)
}

/// Trapezoidal area under the ROC curve.
pub fn auc_trapezoid(points: &[RocPoint]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
        .sum()
}

/// Equal error rate: where FPR = FNR along the ROC, linearly interpolated
/// between bracketing operating points.
pub fn eer(ls: &LabeledScores) -> Result<f64, MetricsError> {
    let points = roc_curve(ls)?;
    // walk the curve; FNR = 1 - TPR decreases, FPR increases
    let mut prev = points[0];
    for &p in &points[1..] {
        let prev_diff = (1.0 - prev.tpr) - prev.fpr;
        let diff = (1.0 - p.tpr) - p.fpr;
        if diff <= 0.0 {
            if (diff - prev_diff).abs() < 1e-15 {
                return Ok(p.fpr);
            }
            // interpolate along the segment to diff = 0
            let t = prev_diff / (prev_diff - diff);
            let fpr = prev.fpr + t * (p.fpr - prev.fpr);
            let fnr = (1.0 - prev.tpr) + t * ((1.0 - p.tpr) - (1.0 - prev.tpr));
            return Ok((fpr + fnr) / 2.0);
        }
        prev = p;
    }
    Ok(prev.fpr)
}

/// Export the ROC curve as `fpr,tpr` CSV rows.
pub fn write_roc_csv(points: &[RocPoint], out: &mut impl std::io::Write) -> std::io::Result<()> {
    writeln!(out, "fpr,tpr")?;
    for p in points {
        writeln!(out, "{},{}", p.fpr, p.tpr)?;
    }
    Ok(())
}
