//! Write a synthetic trace as a classic pcap file, parse it back, and group
//! the packets into flows.
//!
//! Run with: `cargo run --example pcap_roundtrip`

use specmon::ingest::{self, FlowKeyMode};
use specmon::synth::{self, TrafficProfile};

fn main() {
    let mut benign = TrafficProfile::benign("client-a");
    benign.rate_pps = 500.0;
    benign.duration_s = 2.0;
    let mut packets = synth::generate_flows(&benign, 3, 1).expect("benign flows");
    packets = synth::merge_by_timestamp(
        packets,
        synth::generate(&TrafficProfile::syn_flood("attacker"), 2).expect("flood"),
    );

    let path = std::env::temp_dir().join("specmon_roundtrip.pcap");
    synth::write_pcap(&path, &packets).expect("write pcap");
    println!("wrote {} packets to {}", packets.len(), path.display());

    let bytes = std::fs::read(&path).expect("read pcap");
    let parsed = ingest::parse_pcap(&bytes[..]).expect("parse pcap");
    println!("parsed {} records", parsed.records.len());
    if let Some(diag) = &parsed.diagnostic {
        println!("trailing diagnostic: {diag}");
    }

    let table = ingest::group_flows(parsed.records, FlowKeyMode::SourceIp);
    for (key, seq) in table.iter_sorted() {
        let first = seq[0].timestamp_us;
        let last = seq.last().unwrap().timestamp_us;
        println!(
            "flow {key}: {} packets over {:.2}s, proto {}",
            seq.len(),
            (last - first) as f64 / 1e6,
            seq[0].proto_code
        );
    }
}
