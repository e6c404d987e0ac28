//! Compute TPR/FPR at a threshold, the ROC curve, AUC, and EER for a set
//! of labeled per-flow scores.
//!
//! Run with: `cargo run --example detection_metrics`

use specmon::metrics::{self, Label, LabeledScores};

fn main() {
    // Per-flow anomaly scores: higher means more suspicious.
    let scores = vec![0.1, 0.2, 0.25, 0.3, 0.35, 0.4, 0.8, 0.9, 1.2, 1.5];
    let labels = vec![
        Label::Benign,
        Label::Benign,
        Label::Benign,
        Label::Malicious, // one attack hiding in the benign score range
        Label::Benign,
        Label::Benign,
        Label::Malicious,
        Label::Malicious,
        Label::Malicious,
        Label::Malicious,
    ];
    let ls = LabeledScores::new(scores, labels).expect("both classes present");

    for threshold in [0.3, 0.5, 1.0] {
        let (tpr, fpr) = metrics::confusion_at(&ls, threshold).expect("confusion");
        println!("threshold {threshold:4}: TPR = {tpr:.2}, FPR = {fpr:.2}");
    }

    let auc = metrics::auc(&ls).expect("auc");
    let curve = metrics::roc_curve(&ls).expect("roc");
    let auc_trap = metrics::auc_trapezoid(&curve);
    let eer = metrics::eer(&ls).expect("eer");
    println!("AUC (rank statistic)   = {auc:.4}");
    println!("AUC (ROC trapezoids)   = {auc_trap:.4}");
    println!("equal error rate       = {eer:.4}");
    assert!((auc - auc_trap).abs() < 1e-12);

    let mut csv = Vec::new();
    metrics::write_roc_csv(&curve, &mut csv).expect("csv");
    println!("ROC curve ({} points):", curve.len());
    print!("{}", String::from_utf8(csv).unwrap());
}
