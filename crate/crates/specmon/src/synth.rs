//! Seeded synthetic traffic generation: benign Gaussian-process flows,
//! flood/burst/scan attack patterns, and evasion mixtures that interleave
//! benign-looking packets into a malicious flow.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, WriteBytesExt};
use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{FlowKey, IngestError, PacketRecord};
use crate::metrics::Label;

pub const MIN_PACKET_LEN: u32 = 40;
pub const MAX_PACKET_LEN: u32 = 1514;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ProfileKind {
    /// Lengths and inter-arrivals drawn from independent clamped Gaussians.
    BenignGp,
    /// Fixed-length packets at a constant rate.
    SynFlood,
    /// Bursts of `burst_len` packets every `interval_s`, idle otherwise.
    LowRateBurst { interval_s: f64, burst_len: usize },
    /// Constant-rate minimum-length probes.
    ConstantScan,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrafficProfile {
    pub kind: ProfileKind,
    pub rate_pps: f64,
    pub length_mean: f64,
    pub length_std: f64,
    pub proto_code: u8,
    pub duration_s: f64,
    pub flow_id: String,
}

impl TrafficProfile {
    pub fn benign(flow_id: impl Into<String>) -> Self {
        TrafficProfile {
            kind: ProfileKind::BenignGp,
            rate_pps: 1000.0,
            length_mean: 700.0,
            length_std: 200.0,
            proto_code: 6,
            duration_s: 1.0,
            flow_id: flow_id.into(),
        }
    }

    pub fn syn_flood(flow_id: impl Into<String>) -> Self {
        TrafficProfile {
            kind: ProfileKind::SynFlood,
            rate_pps: 5000.0,
            length_mean: 60.0,
            length_std: 0.0,
            proto_code: 6,
            duration_s: 1.0,
            flow_id: flow_id.into(),
        }
    }

    pub fn low_rate_burst(flow_id: impl Into<String>, interval_s: f64, burst_len: usize) -> Self {
        TrafficProfile {
            kind: ProfileKind::LowRateBurst { interval_s, burst_len },
            rate_pps: 10_000.0, // within-burst rate
            length_mean: 1200.0,
            length_std: 0.0,
            proto_code: 17,
            duration_s: 2.0,
            flow_id: flow_id.into(),
        }
    }

    pub fn constant_scan(flow_id: impl Into<String>) -> Self {
        TrafficProfile {
            kind: ProfileKind::ConstantScan,
            rate_pps: 2000.0,
            length_mean: MIN_PACKET_LEN as f64,
            length_std: 0.0,
            proto_code: 6,
            duration_s: 1.0,
            flow_id: flow_id.into(),
        }
    }

    pub fn is_malicious(&self) -> bool {
        !matches!(self.kind, ProfileKind::BenignGp)
    }

    fn validate(&self) -> Result<(), SynthError> {
        if self.rate_pps <= 0.0 || self.duration_s <= 0.0 {
            return Err(SynthError::InvalidProfile(
                "rate_pps and duration_s must be positive".into(),
            ));
        }
        if let ProfileKind::LowRateBurst { interval_s, burst_len } = self.kind {
            if interval_s <= 0.0 || burst_len == 0 {
                return Err(SynthError::InvalidProfile(
                    "burst interval and length must be positive".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixSpec {
    pub malicious: TrafficProfile,
    pub benign: TrafficProfile,
    /// malicious : benign packet-count ratio.
    pub ratio_malicious: u32,
    pub ratio_benign: u32,
}

/// A packet with its ground-truth label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPacket {
    pub record: PacketRecord,
    pub label: Label,
}

fn clamp_len(x: f64) -> u32 {
    (x.round() as i64).clamp(MIN_PACKET_LEN as i64, MAX_PACKET_LEN as i64) as u32
}

/// Generate one flow's packet sequence. Deterministic given the seed.
pub fn generate(profile: &TrafficProfile, seed: u64) -> Result<Vec<LabeledPacket>, SynthError> {
    profile.validate()?;
    let mut rng = StdRng::seed_from_u64(seed);
    let key = FlowKey::Opaque(profile.flow_id.clone());
    let label = if profile.is_malicious() {
        Label::Malicious
    } else {
        Label::Benign
    };
    let spacing_us = 1e6 / profile.rate_pps;
    let mut out = Vec::new();
    let push = |ts_us: f64, len: u32, out: &mut Vec<LabeledPacket>| {
        out.push(LabeledPacket {
            record: PacketRecord {
                timestamp_us: ts_us.max(0.0).round() as u64,
                length_bytes: len,
                proto_code: profile.proto_code,
                flow_key: key.clone(),
            },
            label,
        });
    };
    match profile.kind {
        ProfileKind::BenignGp => {
            let count = (profile.rate_pps * profile.duration_s).round() as usize;
            let len_dist = Normal::new(profile.length_mean, profile.length_std.max(1e-9)).unwrap();
            let gap_dist = Normal::new(spacing_us, 0.3 * spacing_us).unwrap();
            let mut t = 0.0;
            for _ in 0..count {
                push(t, clamp_len(len_dist.sample(&mut rng)), &mut out);
                t += gap_dist.sample(&mut rng).max(1.0);
            }
        }
        ProfileKind::SynFlood | ProfileKind::ConstantScan => {
            let count = (profile.rate_pps * profile.duration_s).round() as usize;
            let len = clamp_len(profile.length_mean);
            for i in 0..count {
                push(i as f64 * spacing_us, len, &mut out);
            }
        }
        ProfileKind::LowRateBurst { interval_s, burst_len } => {
            let bursts = (profile.duration_s / interval_s).floor() as usize;
            let len = clamp_len(profile.length_mean);
            for b in 0..bursts {
                let start = b as f64 * interval_s * 1e6;
                for i in 0..burst_len {
                    push(start + i as f64 * spacing_us, len, &mut out);
                }
            }
        }
    }
    Ok(out)
}

/// Interleave benign-looking packets into the malicious flow at the given
/// packet-count ratio, stable-merged by timestamp. Noise packets carry the
/// malicious flow's key but a benign label.
pub fn mix(spec: &MixSpec, seed: u64) -> Result<Vec<LabeledPacket>, SynthError> {
    if spec.ratio_malicious == 0 || spec.ratio_benign == 0 {
        return Err(SynthError::InvalidProfile(
            "mix ratio components must be positive".into(),
        ));
    }
    let malicious = generate(&spec.malicious, seed)?;
    if malicious.is_empty() {
        return Err(SynthError::InvalidProfile("empty malicious trace".into()));
    }
    let noise_count =
        malicious.len() as u64 * spec.ratio_benign as u64 / spec.ratio_malicious as u64;
    let span_us = malicious
        .last()
        .unwrap()
        .record
        .timestamp_us
        .max(1)
        .max((spec.malicious.duration_s * 1e6) as u64);
    // noise shares the attack flow's key and mimics the benign profile's
    // length distribution, spread evenly over the attack's time span
    let mut rng = StdRng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let len_dist = Normal::new(
        spec.benign.length_mean,
        spec.benign.length_std.max(1e-9),
    )
    .unwrap();
    let key = FlowKey::Opaque(spec.malicious.flow_id.clone());
    let noise: Vec<LabeledPacket> = (0..noise_count)
        .map(|i| LabeledPacket {
            record: PacketRecord {
                timestamp_us: (i * span_us) / noise_count.max(1),
                length_bytes: clamp_len(len_dist.sample(&mut rng)),
                proto_code: spec.benign.proto_code,
                flow_key: key.clone(),
            },
            label: Label::Benign,
        })
        .collect();
    Ok(merge_by_timestamp(malicious, noise))
}

/// Generate `n_flows` flows from the template, ids suffixed `-0000`,
/// `-0001`, ..., each with its own derived seed, merged by timestamp.
pub fn generate_flows(
    template: &TrafficProfile,
    n_flows: usize,
    seed: u64,
) -> Result<Vec<LabeledPacket>, SynthError> {
    let mut merged: Vec<LabeledPacket> = Vec::new();
    for i in 0..n_flows {
        let mut p = template.clone();
        p.flow_id = format!("{}-{i:04}", template.flow_id);
        let trace = generate(&p, seed.wrapping_add(i as u64))?;
        merged = merge_by_timestamp(merged, trace);
    }
    Ok(merged)
}

/// Stable two-way merge preserving each input's internal order.
pub fn merge_by_timestamp(a: Vec<LabeledPacket>, b: Vec<LabeledPacket>) -> Vec<LabeledPacket> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut ia, mut ib) = (a.into_iter().peekable(), b.into_iter().peekable());
    loop {
        match (ia.peek(), ib.peek()) {
            (Some(x), Some(y)) => {
                if x.record.timestamp_us <= y.record.timestamp_us {
                    out.push(ia.next().unwrap());
                } else {
                    out.push(ib.next().unwrap());
                }
            }
            (Some(_), None) => out.push(ia.next().unwrap()),
            (None, Some(_)) => out.push(ib.next().unwrap()),
            (None, None) => break,
        }
    }
    out
}

/// Labeled CSV trace: the ingest format plus a trailing `label` column.
pub fn write_labeled_csv<W: Write>(mut w: W, packets: &[LabeledPacket]) -> std::io::Result<()> {
    writeln!(w, "flow_id,timestamp_us,length,proto_code,label")?;
    for p in packets {
        writeln!(
            w,
            "{},{},{},{},{}",
            p.record.flow_key,
            p.record.timestamp_us,
            p.record.length_bytes,
            p.record.proto_code,
            match p.label {
                Label::Benign => "benign",
                Label::Malicious => "malicious",
            }
        )?;
    }
    Ok(())
}

pub fn parse_labeled_csv<R: Read>(r: R) -> Result<Vec<LabeledPacket>, IngestError> {
    let reader = BufReader::new(r);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(IngestError::Io)?;
        let line = line.trim();
        if idx == 0 && line.starts_with("flow_id") {
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 5 {
            return Err(IngestError::RowParseError {
                line: idx + 1,
                reason: format!("expected 5 fields, got {}", parts.len()),
            });
        }
        let parse = |what: &str, s: &str| -> Result<u64, IngestError> {
            s.parse().map_err(|_| IngestError::RowParseError {
                line: idx + 1,
                reason: format!("bad {what}: {s}"),
            })
        };
        let label = match parts[4] {
            "benign" => Label::Benign,
            "malicious" => Label::Malicious,
            other => {
                return Err(IngestError::RowParseError {
                    line: idx + 1,
                    reason: format!("bad label: {other}"),
                })
            }
        };
        out.push(LabeledPacket {
            record: PacketRecord {
                flow_key: FlowKey::Opaque(parts[0].to_string()),
                timestamp_us: parse("timestamp", parts[1])?,
                length_bytes: parse("length", parts[2])? as u32,
                proto_code: parse("proto_code", parts[3])? as u8,
            },
            label,
        });
    }
    Ok(out)
}

/// Write packets as a little-endian classic pcap with minimal
/// Ethernet/IPv4 frames. Each distinct flow id gets its own source IP.
pub fn write_pcap(path: &Path, packets: &[LabeledPacket]) -> Result<(), SynthError> {
    let mut flow_ips: Vec<String> = Vec::new();
    let mut buf = Vec::new();
    buf.write_u32::<LittleEndian>(0xa1b2_c3d4)?;
    buf.write_u16::<LittleEndian>(2)?;
    buf.write_u16::<LittleEndian>(4)?;
    buf.write_u32::<LittleEndian>(0)?; // thiszone
    buf.write_u32::<LittleEndian>(0)?; // sigfigs
    buf.write_u32::<LittleEndian>(65_535)?; // snaplen
    buf.write_u32::<LittleEndian>(1)?; // ethernet
    for p in packets {
        let id = p.record.flow_key.to_string();
        let idx = match flow_ips.iter().position(|f| *f == id) {
            Some(i) => i,
            None => {
                flow_ips.push(id);
                flow_ips.len() - 1
            }
        };
        let frame = eth_ipv4_frame(
            [10, 0, (idx >> 8) as u8, (idx & 0xff) as u8],
            [192, 168, 0, 1],
            p.record.proto_code,
            p.record.length_bytes,
        );
        buf.write_u32::<LittleEndian>((p.record.timestamp_us / 1_000_000) as u32)?;
        buf.write_u32::<LittleEndian>((p.record.timestamp_us % 1_000_000) as u32)?;
        buf.write_u32::<LittleEndian>(frame.len() as u32)?;
        buf.write_u32::<LittleEndian>(p.record.length_bytes.max(frame.len() as u32))?;
        buf.extend_from_slice(&frame);
    }
    std::fs::write(path, buf)?;
    Ok(())
}

fn eth_ipv4_frame(src: [u8; 4], dst: [u8; 4], proto: u8, total_len: u32) -> Vec<u8> {
    // captured bytes are truncated to the headers; orig_len keeps the true size
    let mut f = vec![0u8; 14 + 20];
    f[12] = 0x08; // ethertype IPv4
    f[13] = 0x00;
    f[14] = 0x45; // version 4, IHL 5
    let ip_len = (total_len.saturating_sub(14)).clamp(20, 65_535) as u16;
    f[16] = (ip_len >> 8) as u8;
    f[17] = (ip_len & 0xff) as u8;
    f[22] = 64; // TTL
    f[23] = proto;
    f[26..30].copy_from_slice(&src);
    f[30..34].copy_from_slice(&dst);
    f
}
