//! Walk a single flow through the frequency-feature pipeline: per-packet
//! features, linear encoding, framing, DFT, modulus, and log transform.
//!
//! Run with: `cargo run --example spectral_features`

use specmon::ingest;
use specmon::spectral::{self, EncodingVector};
use specmon::synth::{self, TrafficProfile};
use specmon::HyperParams;

fn main() {
    // 1500 packets with 30-packet frames: 50 frames of 16 retained
    // components each.
    let hp = HyperParams {
        w_seg: 30,
        ..HyperParams::default()
    };
    let mut profile = TrafficProfile::benign("demo");
    profile.rate_pps = 1500.0;
    profile.duration_s = 1.0;
    let records: Vec<_> = synth::generate(&profile, 3)
        .expect("generate")
        .into_iter()
        .map(|lp| lp.record)
        .collect();

    let s = ingest::to_feature_rows(&records).expect("non-empty flow");
    println!(
        "feature matrix: {} rows x {} cols (proto, inter-arrival, length)",
        s.n_rows(),
        s.n_cols()
    );
    println!("first row: {:?}", s.row(0));

    let w = EncodingVector(vec![10.0, 10.0, 10.0]);
    let r = spectral::extract(&s, &w, &hp).expect("extract");
    println!(
        "frequency features: {} frames x {} components (expected {} x {})",
        r.n_f(),
        r.k_f(),
        hp.n_f(records.len()),
        hp.k_f()
    );
    println!(
        "compression ratio vs raw features: {:.4}",
        spectral::compression_ratio(&hp, s.n_rows(), s.n_cols())
    );

    // The streaming path produces the identical encoded sequence without
    // materializing the feature matrix.
    let streamed = ingest::encode_records(&records, &w).expect("encode");
    let via_matrix = spectral::encode(&s, &w).expect("encode matrix");
    assert_eq!(streamed, via_matrix);
    println!("streaming encode matches the matrix path for {} packets", streamed.len());

    let first = r.column(0);
    println!("frame 0 log-spectrum head: {:?}", &first[..4.min(first.len())]);
}
