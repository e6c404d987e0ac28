//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use specmon::cluster;
use specmon::commands::{self, RunConfig};
use specmon::config::HyperParams;
use specmon::encoding;
use specmon::entropy::{self, GaussianProcessSpec, GAUSS_K};
use specmon::ingest::{self, PacketRecord};
use specmon::metrics::{self, Label, LabeledScores};
use specmon::spectral::{self, EncodingVector, FeatureMatrix};
use specmon::synth::{self, LabeledPacket, MixSpec, TrafficProfile};

fn report(criterion: u32, name: &str, result: Result<(), String>) {
    match &result {
        Ok(()) => println!("criterion {criterion} PASS: {name}"),
        Err(e) => println!("criterion {criterion} FAIL: {name}: {e}"),
    }
    if let Err(e) = result {
        panic!("criterion {criterion} failed: {e}");
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- criterion 1

fn naive_dft(f: &[f64]) -> Vec<(f64, f64)> {
    let n = f.len();
    (0..n)
        .map(|k| {
            let mut re = 0.0;
            let mut im = 0.0;
            for (idx, &x) in f.iter().enumerate() {
                let angle = -2.0 * std::f64::consts::PI * (idx as f64) * (k as f64) / n as f64;
                re += x * angle.cos();
                im += x * angle.sin();
            }
            (re, im)
        })
        .collect()
}

#[test]
fn criterion_01_dft_oracle_equivalence() {
    let run = || -> Result<(), String> {
        let start = Instant::now();
        let mut rng = StdRng::seed_from_u64(1);
        let mut max_err = 0.0f64;
        for _ in 0..1000 {
            let n = rng.gen_range(2..=64);
            let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-100.0..100.0)).collect();
            let fast = spectral::dft_frame(&f);
            let slow = naive_dft(&f);
            for (a, (re, im)) in fast.iter().zip(&slow) {
                max_err = max_err.max((a.re - re).abs()).max((a.im - im).abs());
            }
        }
        check(max_err <= 1e-9, || format!("max element error {max_err}"))?;
        let elapsed = start.elapsed().as_secs_f64();
        check(elapsed < 10.0, || format!("took {elapsed:.1}s"))
    };
    report(1, "DFT matches naive summation on 1000 random frames", run());
}

// ---------------------------------------------------------------- criterion 2

#[test]
fn criterion_02_shape_and_compression_laws() {
    let run = || -> Result<(), String> {
        let start = Instant::now();
        let mut rng = StdRng::seed_from_u64(2);
        let m = 3;
        let w_segs = [2usize, 4, 8, 10, 20, 30, 50, 64, 100, 128];
        let multiples = [10usize, 20, 50, 100, 200];
        let mut points = 0;
        for &w_seg in &w_segs {
            for &mult in &multiples {
                let n = w_seg * mult;
                let hp = HyperParams {
                    w_seg,
                    ..Default::default()
                };
                let v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..100.0)).collect();
                let r = spectral::extract_encoded(&v, &hp).map_err(|e| e.to_string())?;
                check(r.k_f() == w_seg / 2 + 1, || {
                    format!("k_f {} != {}", r.k_f(), w_seg / 2 + 1)
                })?;
                check(r.n_f() == n / w_seg, || {
                    format!("n_f {} != {}", r.n_f(), n / w_seg)
                })?;
                let ratio = spectral::compression_ratio(&hp, n, m);
                check(ratio >= 1.0 / (2.0 * m as f64), || {
                    format!("compression ratio {ratio} below 1/(2M) at w_seg {w_seg}, n {n}")
                })?;
                points += 1;
            }
        }
        check(points == 50, || format!("{points} grid points"))?;
        let elapsed = start.elapsed().as_secs_f64();
        check(elapsed < 5.0, || format!("took {elapsed:.1}s"))
    };
    report(2, "output shape and compression bound over a 50-point grid", run());
}

// ---------------------------------------------------------------- criterion 3

#[test]
fn criterion_03_worked_example() {
    let run = || -> Result<(), String> {
        let hp = HyperParams {
            w_seg: 30,
            ..Default::default()
        };
        check(hp.k_f() == 16, || format!("k_f {}", hp.k_f()))?;
        check(hp.n_f(1500) == 50, || format!("n_f {}", hp.n_f(1500)))?;
        let rows: Vec<[f64; 3]> = (0..1500)
            .map(|i| [6.0, (i % 37) as f64, 40.0 + (i % 100) as f64])
            .collect();
        let s = FeatureMatrix::from_rows(rows).map_err(|e| e.to_string())?;
        let w = EncodingVector(vec![10.0, 10.0, 10.0]);
        let r = spectral::extract(&s, &w, &hp).map_err(|e| e.to_string())?;
        check(r.k_f() == 16 && r.n_f() == 50, || {
            format!("extract shape {}x{}", r.k_f(), r.n_f())
        })
    };
    report(3, "worked example: N=1500, W_seg=30 gives N_f=50, K_f=16", run());
}

// ---------------------------------------------------------------- criterion 4

fn auc_pairwise(ls: &LabeledScores) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (&s, &l) in ls.scores.iter().zip(&ls.labels) {
        if l != Label::Malicious {
            continue;
        }
        for (&s2, &l2) in ls.scores.iter().zip(&ls.labels) {
            if l2 != Label::Benign {
                continue;
            }
            pairs += 1.0;
            if s > s2 {
                wins += 1.0;
            } else if s == s2 {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

fn eer_dense_sweep(ls: &LabeledScores) -> f64 {
    let lo = ls.scores.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
    let hi = ls.scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1.0;
    let steps = 200_000;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=steps {
        let t = hi - (hi - lo) * i as f64 / steps as f64;
        let (tpr, fpr) = metrics::confusion_at(ls, t).unwrap();
        let fnr = 1.0 - tpr;
        if fpr >= fnr {
            if let Some((pfpr, pfnr)) = prev {
                let pd = pfnr - pfpr;
                let d = fnr - fpr;
                if (pd - d).abs() < 1e-15 {
                    return fpr;
                }
                let frac = pd / (pd - d);
                return ((pfpr + frac * (fpr - pfpr)) + (pfnr + frac * (fnr - pfnr))) / 2.0;
            }
            return fpr;
        }
        prev = Some((fpr, fnr));
    }
    1.0
}

fn random_scores(rng: &mut StdRng) -> LabeledScores {
    let nb = rng.gen_range(1..=25);
    let nm = rng.gen_range(1..=25);
    let mut scores = Vec::new();
    let mut labels = Vec::new();
    for _ in 0..nb {
        // quantized to force ties
        scores.push((rng.gen_range(0..40) as f64) / 10.0);
        labels.push(Label::Benign);
    }
    for _ in 0..nm {
        scores.push((rng.gen_range(5..45) as f64) / 10.0);
        labels.push(Label::Malicious);
    }
    LabeledScores::new(scores, labels).unwrap()
}

#[test]
fn criterion_04_metric_oracles() {
    let run = || -> Result<(), String> {
        let mut rng = StdRng::seed_from_u64(4);
        for i in 0..200 {
            let ls = random_scores(&mut rng);
            let fast = metrics::auc(&ls).map_err(|e| e.to_string())?;
            let brute = auc_pairwise(&ls);
            check((fast - brute).abs() <= 1e-9, || {
                format!("set {i}: auc {fast} vs pairwise {brute}")
            })?;
            let curve = metrics::roc_curve(&ls).map_err(|e| e.to_string())?;
            let area = metrics::auc_trapezoid(&curve);
            check((area - brute).abs() <= 1e-9, || {
                format!("set {i}: trapezoid {area} vs pairwise {brute}")
            })?;
        }
        for i in 0..20 {
            let ls = random_scores(&mut rng);
            let fast = metrics::eer(&ls).map_err(|e| e.to_string())?;
            let sweep = eer_dense_sweep(&ls);
            check((fast - sweep).abs() <= 1e-6, || {
                format!("set {i}: eer {fast} vs sweep {sweep}")
            })?;
        }
        Ok(())
    };
    report(4, "AUC/trapezoid/EER match independent oracles", run());
}

// ---------------------------------------------------------------- criterion 5

#[test]
fn criterion_05_kmeans_determinism_and_optimality() {
    let run = || -> Result<(), String> {
        let samples: Vec<Vec<f64>> = (0..60)
            .map(|i| vec![(i % 13) as f64, (i % 7) as f64, (i % 3) as f64])
            .collect();
        let hp = HyperParams {
            k_c: 5,
            ..Default::default()
        };
        let a = cluster::train(&samples, &hp, EncodingVector(vec![1.0]), 42)
            .map_err(|e| e.to_string())?;
        let b = cluster::train(&samples, &hp, EncodingVector(vec![1.0]), 42)
            .map_err(|e| e.to_string())?;
        let ja = serde_json::to_vec(&a).unwrap();
        let jb = serde_json::to_vec(&b).unwrap();
        check(ja == jb, || "retraining not bit-identical".into())?;

        let four = vec![
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![10.0, 10.0],
            vec![10.0, 11.0],
        ];
        let hp2 = HyperParams {
            k_c: 2,
            ..Default::default()
        };
        let model = cluster::train(&four, &hp2, EncodingVector(vec![1.0]), 1)
            .map_err(|e| e.to_string())?;
        let mut centers = model.centers.clone();
        centers.sort_by(|x, y| x[0].partial_cmp(&y[0]).unwrap());
        check(
            (centers[0][0] - 0.0).abs() < 1e-9
                && (centers[0][1] - 0.5).abs() < 1e-9
                && (centers[1][0] - 10.0).abs() < 1e-9
                && (centers[1][1] - 10.5).abs() < 1e-9,
            || format!("centers {centers:?}"),
        )?;
        check((model.train_loss - 0.5).abs() < 1e-9, || {
            format!("train_loss {}", model.train_loss)
        })
    };
    report(5, "seeded K-Means is deterministic and optimal on the 4-point example", run());
}

// --------------------------------------------------------- criteria 6 and 7

/// A heterogeneous benign population: per-flow rate, length distribution,
/// and duration drawn from seeded ranges.
fn benign_flows(n: usize, seed: u64) -> Vec<LabeledPacket> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut merged = Vec::new();
    for i in 0..n {
        let mut p = TrafficProfile::benign(format!("ben-{i:04}"));
        p.rate_pps = rng.gen_range(1500.0..3000.0);
        p.length_mean = rng.gen_range(500.0..900.0);
        p.length_std = rng.gen_range(150.0..250.0);
        p.duration_s = rng.gen_range(5.0..9.0);
        merged.extend(synth::generate(&p, seed.wrapping_add(1 + i as u64)).unwrap());
    }
    merged
}

fn train_setup(seed: u64) -> (cluster::ClusterModel, Vec<(String, Vec<PacketRecord>)>) {
    let flows = plain_flows(benign_flows(60, seed));
    let hp = HyperParams::default();
    let w = EncodingVector(vec![hp.w_min; 3]);
    let samples = commands::collect_samples(&flows, &w, &hp).unwrap();
    (cluster::train(&samples, &hp, w, seed).unwrap(), flows)
}

fn plain_flows(packets: Vec<LabeledPacket>) -> Vec<(String, Vec<PacketRecord>)> {
    commands::labeled_flows(packets)
        .into_iter()
        .map(|(k, seq, _)| (k, seq))
        .collect()
}

fn auc_of(
    model: &cluster::ClusterModel,
    benign: &[(String, Vec<PacketRecord>)],
    attack: &[(String, Vec<PacketRecord>)],
) -> f64 {
    let mut scores = Vec::new();
    let mut labels = Vec::new();
    for (_, s) in commands::per_flow_spectral_scores(model, benign).unwrap() {
        scores.push(s);
        labels.push(Label::Benign);
    }
    for (_, s) in commands::per_flow_spectral_scores(model, attack).unwrap() {
        scores.push(s);
        labels.push(Label::Malicious);
    }
    metrics::auc(&LabeledScores::new(scores, labels).unwrap()).unwrap()
}

#[test]
fn criterion_06_synthetic_detection_power() {
    let run = || -> Result<(), String> {
        let start = Instant::now();
        let (model, _) = train_setup(1);
        let benign_test = plain_flows(benign_flows(50, 99));
        check(benign_test.len() >= 50, || "need >= 50 benign flows".into())?;

        let mut flood = TrafficProfile::syn_flood("flood");
        flood.duration_s = 2.0;
        let flood_flows = plain_flows(synth::generate_flows(&flood, 10, 700).unwrap());
        let mut burst = TrafficProfile::low_rate_burst("burst", 0.5, 50);
        burst.duration_s = 5.0;
        let burst_flows = plain_flows(synth::generate_flows(&burst, 10, 800).unwrap());
        check(flood_flows.len() >= 10 && burst_flows.len() >= 10, || {
            "need >= 10 malicious flows".into()
        })?;

        let auc_flood = auc_of(&model, &benign_test, &flood_flows);
        let auc_burst = auc_of(&model, &benign_test, &burst_flows);
        check(auc_flood >= 0.95, || format!("flood auc {auc_flood}"))?;
        check(auc_burst >= 0.95, || format!("burst auc {auc_burst}"))?;
        let elapsed = start.elapsed().as_secs_f64();
        check(elapsed < 60.0, || format!("took {elapsed:.1}s"))
    };
    report(6, "AUC >= 0.95 against flood and low-rate-burst test sets", run());
}

#[test]
fn criterion_07_evasion_direction() {
    let run = || -> Result<(), String> {
        let start = Instant::now();
        let (model, train_flows) = train_setup(1);
        let fsc_model = commands::fsc_train(&train_flows, 10, 1).unwrap();
        let benign_test = plain_flows(benign_flows(50, 99));

        let fsc_auc_of = |attack: &[(String, Vec<PacketRecord>)]| -> f64 {
            let mut scores = Vec::new();
            let mut labels = Vec::new();
            for (_, seq) in &benign_test {
                scores.push(commands::fsc_score(&fsc_model, seq).unwrap());
                labels.push(Label::Benign);
            }
            for (_, seq) in attack {
                scores.push(commands::fsc_score(&fsc_model, seq).unwrap());
                labels.push(Label::Malicious);
            }
            metrics::auc(&LabeledScores::new(scores, labels).unwrap()).unwrap()
        };

        let attack_flows = |ratio: Option<(u32, u32)>, seed: u64| {
            let mut flood = TrafficProfile::syn_flood("flood");
            flood.duration_s = 2.0;
            let mut merged: Vec<LabeledPacket> = Vec::new();
            for i in 0..10u64 {
                let mut p = flood.clone();
                p.flow_id = format!("flood-{i:02}");
                let trace = match ratio {
                    None => synth::generate(&p, seed + i).unwrap(),
                    Some((m, b)) => synth::mix(
                        &MixSpec {
                            malicious: p,
                            benign: TrafficProfile::benign("noise"),
                            ratio_malicious: m,
                            ratio_benign: b,
                        },
                        seed + i,
                    )
                    .unwrap(),
                };
                merged.extend(trace);
            }
            plain_flows(merged)
        };

        let base = attack_flows(None, 7000);
        let spec_base = auc_of(&model, &benign_test, &base);
        let fsc_base = fsc_auc_of(&base);
        for (ratio, seed) in [((1, 1), 7100u64), ((1, 2), 7200), ((1, 4), 7300), ((1, 8), 7400)] {
            let mixed = attack_flows(Some(ratio), seed);
            let spec_auc = auc_of(&model, &benign_test, &mixed);
            let fsc_auc = fsc_auc_of(&mixed);
            let spec_drop = spec_base - spec_auc;
            let fsc_drop = fsc_base - fsc_auc;
            check(spec_drop <= 0.15, || {
                format!(
                    "ratio 1:{}: spectral drop {spec_drop:.3} (auc {spec_base:.3} -> {spec_auc:.3})",
                    ratio.1
                )
            })?;
            check(fsc_drop > spec_drop, || {
                format!(
                    "ratio 1:{}: fsc drop {fsc_drop:.3} not greater than spectral drop {spec_drop:.3}",
                    ratio.1
                )
            })?;
        }
        let elapsed = start.elapsed().as_secs_f64();
        check(elapsed < 120.0, || format!("took {elapsed:.1}s"))
    };
    report(7, "spectral AUC stays within 15pp under evasion mixes while FSC degrades more", run());
}

// ---------------------------------------------------------------- criterion 8

#[test]
fn criterion_08_entropy_closed_forms() {
    let run = || -> Result<(), String> {
        let h1 = entropy::entropy_gaussian(1.0).map_err(|e| e.to_string())?;
        check((h1 - 1.418939).abs() <= 1e-5, || format!("entropy_gaussian(1) {h1}"))?;

        let mut rng = StdRng::seed_from_u64(8);
        for i in 0..1000 {
            let n = rng.gen_range(2..100);
            let sigma: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..3.0)).collect();
            let spec = GaussianProcessSpec {
                mean: vec![0.0; n],
                sigma,
            };
            let exact = entropy::loss_avg_exact(&spec);
            let (lower, upper) = entropy::loss_avg_bounds(&spec);
            check(exact >= lower - 1e-9 && exact <= upper + 1e-9, || {
                format!("spec {i}: exact {exact} outside [{lower}, {upper}]")
            })?;
        }

        for i in 0..200 {
            let n = rng.gen_range(2..200);
            let sigma = rng.gen_range(0.3..5.0);
            let w = rng.gen_range(1.0..100.0);
            let spec = GaussianProcessSpec::stationary(n, sigma);
            let lhs = entropy::loss_avg_exact(&spec)
                - entropy::loss_whisper(&spec, w).map_err(|e| e.to_string())?;
            let rhs =
                entropy::loss_whisper_reduction_avg(&spec, w).map_err(|e| e.to_string())?;
            check((lhs - rhs).abs() <= 1e-6 * rhs.abs().max(1.0), || {
                format!("spec {i}: identity {lhs} vs {rhs}")
            })?;
        }
        Ok(())
    };
    report(8, "entropy closed forms: value, sandwich bounds, and the reduction identity", run());
}

// ---------------------------------------------------------------- criterion 9

#[test]
fn criterion_09_monte_carlo_entropy() {
    let run = || -> Result<(), String> {
        let start = Instant::now();
        let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
        let (est, _) = entropy::estimate_entropy_mc(
            move |rng| rand_distr::Distribution::sample(&normal, rng),
            100_000,
            9,
        );
        check((est - GAUSS_K.ln()).abs() <= 0.05, || {
            format!("KL estimate {est} vs {}", GAUSS_K.ln())
        })?;
        for n in [10usize, 50] {
            for theorem in [1u8, 3] {
                let spec = GaussianProcessSpec::stationary(n, 1.0);
                let r = entropy::verify_theorem(theorem, &spec, 50_000, 10.0, 90 + n as u64)
                    .map_err(|e| e.to_string())?;
                check(r.bound_satisfied, || {
                    format!("theorem {theorem} at N={n}: {}", r.detail)
                })?;
            }
        }
        let elapsed = start.elapsed().as_secs_f64();
        check(elapsed < 60.0, || format!("took {elapsed:.1}s"))
    };
    report(9, "Monte-Carlo entropy estimates and 3-sigma bound checks", run());
}

// --------------------------------------------------------------- criterion 10

#[test]
fn criterion_10_throughput_surrogate() {
    let run = || -> Result<(), String> {
        let hp = HyperParams::default();
        let w = EncodingVector(vec![10.0, 10.0, 10.0]);
        let make = |n: usize| -> Vec<PacketRecord> {
            let mut p = TrafficProfile::benign("perf");
            p.rate_pps = 10_000.0;
            p.duration_s = n as f64 / p.rate_pps;
            synth::generate(&p, 10)
                .unwrap()
                .into_iter()
                .map(|lp| lp.record)
                .collect()
        };
        let time_extract = |records: &[PacketRecord]| -> f64 {
            let start = Instant::now();
            let v = ingest::encode_records(records, &w).unwrap();
            let r = spectral::extract_encoded(&v, &hp).unwrap();
            assert!(r.n_f() > 0);
            start.elapsed().as_secs_f64()
        };
        let records_1m = make(1_000_000);
        let records_2m = make(2_000_000);
        // warm both sizes, then interleave five timed runs each and take
        // the minimum to damp allocator and page-fault noise
        let _ = time_extract(&records_1m);
        let _ = time_extract(&records_2m);
        let mut t1 = f64::INFINITY;
        let mut t2 = f64::INFINITY;
        for _ in 0..5 {
            t1 = t1.min(time_extract(&records_1m));
            t2 = t2.min(time_extract(&records_2m));
        }
        let pps = 1_000_000.0 / t1;
        check(pps >= 2e5, || format!("throughput {pps:.0} packets/s"))?;
        let scale = t2 / t1;
        check(scale < 2.5, || format!("2x input took {scale:.2}x time"))
    };
    report(10, "extraction throughput >= 2e5 packets/s and scales sub-2.5x at 2x input", run());
}

// --------------------------------------------------------------- criterion 11

fn build_pcap(little_endian: bool, frames: &[(u32, u32, Vec<u8>, u32)]) -> Vec<u8> {
    let w32 = |out: &mut Vec<u8>, v: u32| {
        if little_endian {
            out.extend_from_slice(&v.to_le_bytes());
        } else {
            out.extend_from_slice(&v.to_be_bytes());
        }
    };
    let w16 = |out: &mut Vec<u8>, v: u16| {
        if little_endian {
            out.extend_from_slice(&v.to_le_bytes());
        } else {
            out.extend_from_slice(&v.to_be_bytes());
        }
    };
    let mut out = Vec::new();
    w32(&mut out, 0xa1b2_c3d4);
    w16(&mut out, 2);
    w16(&mut out, 4);
    w32(&mut out, 0);
    w32(&mut out, 0);
    w32(&mut out, 65_535);
    w32(&mut out, 1);
    for (sec, usec, frame, orig) in frames {
        w32(&mut out, *sec);
        w32(&mut out, *usec);
        w32(&mut out, frame.len() as u32);
        w32(&mut out, *orig);
        out.extend_from_slice(frame);
    }
    out
}

fn eth_ipv4(proto: u8, src: [u8; 4], dst: [u8; 4]) -> Vec<u8> {
    let mut frame = vec![0u8; 14];
    frame[12] = 0x08;
    frame[13] = 0x00;
    let mut ip = vec![0u8; 20];
    ip[0] = 0x45;
    ip[9] = proto;
    ip[12..16].copy_from_slice(&src);
    ip[16..20].copy_from_slice(&dst);
    frame.extend_from_slice(&ip);
    frame
}

#[test]
fn criterion_11_pcap_conformance() {
    let run = || -> Result<(), String> {
        let frames = vec![
            (1u32, 500_000u32, eth_ipv4(6, [10, 0, 0, 1], [10, 0, 0, 2]), 60u32),
            (2, 250_000, eth_ipv4(17, [10, 0, 0, 3], [10, 0, 0, 2]), 1500),
        ];
        for &le in &[true, false] {
            let data = build_pcap(le, &frames);
            let parsed = ingest::parse_pcap(&data[..]).map_err(|e| e.to_string())?;
            check(parsed.diagnostic.is_none(), || "unexpected diagnostic".into())?;
            check(parsed.records.len() == 2, || {
                format!("{} records", parsed.records.len())
            })?;
            let r0 = &parsed.records[0];
            check(
                r0.timestamp_us == 1_500_000
                    && r0.length_bytes == 60
                    && r0.proto_code == 6
                    && r0.flow_key.to_string() == "10.0.0.1",
                || format!("first record {r0:?}"),
            )?;
            let r1 = &parsed.records[1];
            check(
                r1.timestamp_us == 2_250_000
                    && r1.length_bytes == 1500
                    && r1.proto_code == 17
                    && r1.flow_key.to_string() == "10.0.0.3",
                || format!("second record {r1:?}"),
            )?;
        }
        // truncation mid-record: first record survives, diagnostic reported
        let mut data = build_pcap(true, &frames);
        data.truncate(data.len() - 7);
        let parsed = ingest::parse_pcap(&data[..]).map_err(|e| e.to_string())?;
        check(parsed.records.len() == 1, || {
            format!("prefix had {} records", parsed.records.len())
        })?;
        check(
            matches!(
                parsed.diagnostic,
                Some(ingest::IngestError::TruncatedRecord { .. })
            ),
            || "missing TruncatedRecord diagnostic".into(),
        )
    };
    report(11, "hand-assembled pcap parses exactly in both byte orders; truncation yields prefix", run());
}

// keep RunConfig in the acceptance surface: defaults must match the
// recommended configuration
#[test]
fn acceptance_defaults_sanity() {
    let cfg = RunConfig::default();
    assert_eq!(cfg.hyperparams, HyperParams::default());
    assert_eq!(cfg.phi_sweep, (0.1, 100.0, 64));
    let _ = encoding::log_grid(0.1, 100.0, 64);
}
