//! Generate synthetic traffic for each built-in profile and write a mixed
//! labeled trace to CSV.
//!
//! Run with: `cargo run --example generate_traffic`

use specmon::synth::{self, MixSpec, TrafficProfile};

fn main() {
    let profiles = vec![
        TrafficProfile::benign("benign-00"),
        TrafficProfile::syn_flood("flood-00"),
        TrafficProfile::low_rate_burst("burst-00", 0.5, 50),
        TrafficProfile::constant_scan("scan-00"),
    ];

    for p in &profiles {
        let packets = synth::generate(p, 42).expect("valid profile");
        let lens: Vec<u32> = packets.iter().map(|lp| lp.record.length_bytes).collect();
        let mean_len = lens.iter().sum::<u32>() as f64 / lens.len() as f64;
        let span_s = (packets.last().unwrap().record.timestamp_us
            - packets[0].record.timestamp_us) as f64
            / 1e6;
        println!(
            "{:10}  packets={:6}  span={:6.2}s  mean_len={:7.1}  malicious={}",
            p.flow_id,
            packets.len(),
            span_s,
            mean_len,
            p.is_malicious()
        );
    }

    // Evasion-style mixing: benign-profile cover packets are injected into
    // the malicious flow at a 1:2 malicious-to-benign packet ratio.
    let spec = MixSpec {
        malicious: TrafficProfile::syn_flood("mixed-flood"),
        benign: TrafficProfile::benign("cover"),
        ratio_malicious: 1,
        ratio_benign: 2,
    };
    let mixed = synth::mix(&spec, 7).expect("valid mix");
    let malicious = mixed
        .iter()
        .filter(|lp| lp.label == specmon::metrics::Label::Malicious)
        .count();
    println!(
        "mixed flow: {} packets total, {} malicious, {} benign cover",
        mixed.len(),
        malicious,
        mixed.len() - malicious
    );

    let out = std::env::temp_dir().join("specmon_mixed_trace.csv");
    let file = std::fs::File::create(&out).expect("create csv");
    synth::write_labeled_csv(file, &mixed).expect("write csv");
    println!("wrote labeled trace to {}", out.display());
}
