//! Measure extraction throughput on the streaming path: packet records are
//! encoded directly into the frequency pipeline without materializing the
//! intermediate feature matrix.
//!
//! Run with: `cargo run --example streaming_throughput --release`

use std::time::Instant;

use specmon::ingest::{self, PacketRecord};
use specmon::spectral::{self, EncodingVector};
use specmon::synth::{self, TrafficProfile};
use specmon::HyperParams;

fn make(n: usize) -> Vec<PacketRecord> {
    let mut p = TrafficProfile::benign("perf");
    p.rate_pps = 10_000.0;
    p.duration_s = n as f64 / p.rate_pps;
    synth::generate(&p, 10)
        .expect("generate")
        .into_iter()
        .map(|lp| lp.record)
        .collect()
}

fn main() {
    let hp = HyperParams::default();
    let w = EncodingVector(vec![10.0, 10.0, 10.0]);

    for n in [500_000usize, 1_000_000, 2_000_000] {
        let records = make(n);
        // warm once, then take the best of five runs to damp allocator noise
        let mut best = f64::INFINITY;
        for _ in 0..6 {
            let start = Instant::now();
            let v = ingest::encode_records(&records, &w).expect("encode");
            let r = spectral::extract_encoded(&v, &hp).expect("extract");
            assert!(r.n_f() > 0);
            best = best.min(start.elapsed().as_secs_f64());
        }
        println!(
            "{:>9} packets: {:.4}s best-of-5  ({:.1}M packets/s)",
            n,
            best,
            n as f64 / best / 1e6
        );
    }
}
