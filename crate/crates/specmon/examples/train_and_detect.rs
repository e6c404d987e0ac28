//! Train the clustering detector on benign traffic, then classify held-out
//! benign and attack flows at a fixed threshold multiplier.
//!
//! Run with: `cargo run --example train_and_detect`

use specmon::cluster::{self, Verdict};
use specmon::commands;
use specmon::ingest::{self, FlowKey, FlowKeyMode};
use specmon::spectral::{self, EncodingVector};
use specmon::synth::{self, TrafficProfile};
use specmon::{HyperParams, PacketRecord};

fn benign_flows(rate_pps: f64, n_flows: usize, seed: u64) -> Vec<(String, Vec<PacketRecord>)> {
    let mut p = TrafficProfile::benign("ben");
    p.rate_pps = rate_pps;
    p.duration_s = 10.0;
    let records: Vec<PacketRecord> = synth::generate_flows(&p, n_flows, seed)
        .expect("benign flows")
        .into_iter()
        .map(|lp| lp.record)
        .collect();
    commands::sorted_flows(records, FlowKeyMode::SourceIp)
}

fn main() {
    let hp = HyperParams::default();
    let w = EncodingVector(vec![10.0, 10.0, 10.0]);

    // Training corpus: window samples pooled from benign flows at several
    // rates, so the clusters cover the benign operating range.
    let mut train_flows = Vec::new();
    for (i, rate) in [1500.0, 2000.0, 2500.0, 3000.0].iter().enumerate() {
        train_flows.extend(benign_flows(*rate, 3, i as u64));
    }
    let samples = commands::collect_samples(&train_flows, &w, &hp).expect("samples");
    println!(
        "training on {} window samples from {} benign flows",
        samples.len(),
        train_flows.len()
    );

    let model = cluster::train(&samples, &hp, w, 1).expect("train");
    println!("train_loss = {:.6}, {} centers", model.train_loss, model.centers.len());

    let phi = 5.0;
    println!("threshold at phi={phi}: {:.6}", cluster::threshold(&model, phi));

    let mut test = benign_flows(1800.0, 2, 99);
    let flood: Vec<PacketRecord> = synth::generate(&TrafficProfile::syn_flood("flood"), 7)
        .expect("flood")
        .into_iter()
        .map(|lp| lp.record)
        .collect();
    test.push(("flood".into(), flood));

    for (key, flow) in &test {
        let s = ingest::to_feature_rows(flow).expect("non-empty");
        let r = spectral::extract(&s, &model.encoding_vector, &model.hyperparams).expect("extract");
        let d = cluster::detect(&model, &FlowKey::Opaque(key.clone()), &r, phi).expect("detect");
        println!("{key:10} max score {:.4} -> {:?}", d.max_score(), d.verdict);
        assert_eq!(d.verdict == Verdict::Malicious, key == "flood");
    }
}
