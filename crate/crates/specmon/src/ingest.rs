//! Trace ingestion: classic libpcap and CSV parsing, flow grouping, and
//! conversion to per-packet feature matrices.

use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::net::{IpAddr, Ipv4Addr};

use byteorder::{BigEndian, ByteOrder, LittleEndian};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::FeatureMatrix;

/// Number of per-packet features: protocol code, inter-arrival, length.
pub const FEATURE_COUNT: usize = 3;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed pcap header: {0}")]
    MalformedHeader(String),
    #[error("truncated pcap record at offset {offset}")]
    TruncatedRecord { offset: usize },
    #[error("row parse error at line {line}: {reason}")]
    RowParseError { line: usize, reason: String },
    #[error("empty flow")]
    EmptyFlow,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Flow aggregation granularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlowKeyMode {
    /// Aggregate all packets from one origin address.
    SourceIp,
    /// Classic 5-tuple flows.
    FiveTuple,
}

/// Identifies which flow a packet belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FlowKey {
    SourceIp(IpAddr),
    FiveTuple {
        src: IpAddr,
        dst: IpAddr,
        src_port: u16,
        dst_port: u16,
        proto: u8,
    },
    /// Opaque identifier from CSV traces or synthetic generators.
    Opaque(String),
}

impl fmt::Display for FlowKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowKey::SourceIp(ip) => write!(f, "{ip}"),
            FlowKey::FiveTuple {
                src,
                dst,
                src_port,
                dst_port,
                proto,
            } => write!(f, "{src}:{src_port}->{dst}:{dst_port}/{proto}"),
            FlowKey::Opaque(s) => write!(f, "{s}"),
        }
    }
}

/// One parsed packet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PacketRecord {
    /// Microseconds since the capture epoch.
    pub timestamp_us: u64,
    /// Original wire length in bytes.
    pub length_bytes: u32,
    /// IP protocol number; 0 for non-IP frames.
    pub proto_code: u8,
    pub flow_key: FlowKey,
}

/// Outcome of pcap parsing: the records decoded so far plus an optional
/// diagnostic if parsing stopped early on a truncated record.
#[derive(Debug)]
pub struct PcapParse {
    pub records: Vec<PacketRecord>,
    pub diagnostic: Option<IngestError>,
}

const PCAP_MAGIC_NATIVE: u32 = 0xa1b2_c3d4;
const PCAP_MAGIC_SWAPPED: u32 = 0xd4c3_b2a1;
const GLOBAL_HEADER_LEN: usize = 24;
const RECORD_HEADER_LEN: usize = 16;

/// Parse a classic libpcap capture (Ethernet link type) into packet records.
///
/// A truncated record stops parsing; the records decoded so far are returned
/// together with the diagnostic. A bad magic or truncated global header is a
/// hard error.
pub fn parse_pcap(mut input: impl Read) -> Result<PcapParse, IngestError> {
    let mut buf = Vec::new();
    input.read_to_end(&mut buf)?;
    if buf.len() < GLOBAL_HEADER_LEN {
        return Err(IngestError::MalformedHeader(
            "truncated global header".into(),
        ));
    }
    let magic_be = BigEndian::read_u32(&buf[0..4]);
    let magic_le = LittleEndian::read_u32(&buf[0..4]);
    // Figure out which byte order the writer used.
    let little_endian = if magic_le == PCAP_MAGIC_NATIVE {
        true
    } else if magic_be == PCAP_MAGIC_NATIVE {
        false
    } else {
        return Err(IngestError::MalformedHeader(format!(
            "bad magic 0x{magic_be:08x}"
        )));
    };
    let read_u32 = |b: &[u8]| -> u32 {
        if little_endian {
            LittleEndian::read_u32(b)
        } else {
            BigEndian::read_u32(b)
        }
    };
    let _ = PCAP_MAGIC_SWAPPED; // documented alternative magic

    let mut records = Vec::new();
    let mut off = GLOBAL_HEADER_LEN;
    while off < buf.len() {
        if off + RECORD_HEADER_LEN > buf.len() {
            return Ok(PcapParse {
                records,
                diagnostic: Some(IngestError::TruncatedRecord { offset: off }),
            });
        }
        let ts_sec = read_u32(&buf[off..off + 4]) as u64;
        let ts_usec = read_u32(&buf[off + 4..off + 8]) as u64;
        let incl_len = read_u32(&buf[off + 8..off + 12]) as usize;
        let orig_len = read_u32(&buf[off + 12..off + 16]);
        let data_off = off + RECORD_HEADER_LEN;
        if data_off + incl_len > buf.len() {
            return Ok(PcapParse {
                records,
                diagnostic: Some(IngestError::TruncatedRecord { offset: off }),
            });
        }
        let frame = &buf[data_off..data_off + incl_len];
        let (proto_code, src, dst) = decode_ethernet(frame);
        let flow_key = match (src, dst) {
            (Some(s), _) => FlowKey::SourceIp(IpAddr::V4(s)),
            _ => {
                let _ = dst;
                FlowKey::Opaque("non-ip".into())
            }
        };
        records.push(PacketRecord {
            timestamp_us: ts_sec * 1_000_000 + ts_usec,
            length_bytes: orig_len,
            proto_code,
            flow_key,
        });
        off = data_off + incl_len;
    }
    Ok(PcapParse {
        records,
        diagnostic: None,
    })
}

/// Decode an Ethernet frame far enough to pull out the IP protocol number
/// and IPv4 addresses. Non-IP frames map to protocol 0.
fn decode_ethernet(frame: &[u8]) -> (u8, Option<Ipv4Addr>, Option<Ipv4Addr>) {
    if frame.len() < 14 {
        return (0, None, None);
    }
    let ethertype = BigEndian::read_u16(&frame[12..14]);
    if ethertype != 0x0800 {
        return (0, None, None);
    }
    let ip = &frame[14..];
    if ip.len() < 20 {
        return (0, None, None);
    }
    let proto = ip[9];
    let src = Ipv4Addr::new(ip[12], ip[13], ip[14], ip[15]);
    let dst = Ipv4Addr::new(ip[16], ip[17], ip[18], ip[19]);
    (proto, Some(src), Some(dst))
}

/// Extract the 5-tuple flow key from a raw Ethernet/IPv4 frame. Used by the
/// pcap path when 5-tuple grouping is requested.
pub fn five_tuple_key(frame: &[u8]) -> Option<FlowKey> {
    if frame.len() < 14 + 20 + 4 {
        return None;
    }
    if BigEndian::read_u16(&frame[12..14]) != 0x0800 {
        return None;
    }
    let ip = &frame[14..];
    let ihl = ((ip[0] & 0x0f) as usize) * 4;
    if ip.len() < ihl + 4 {
        return None;
    }
    let proto = ip[9];
    let src = IpAddr::V4(Ipv4Addr::new(ip[12], ip[13], ip[14], ip[15]));
    let dst = IpAddr::V4(Ipv4Addr::new(ip[16], ip[17], ip[18], ip[19]));
    let l4 = &ip[ihl..];
    let (src_port, dst_port) = match proto {
        6 | 17 => (BigEndian::read_u16(&l4[0..2]), BigEndian::read_u16(&l4[2..4])),
        _ => (0, 0),
    };
    Some(FlowKey::FiveTuple {
        src,
        dst,
        src_port,
        dst_port,
        proto,
    })
}

pub const CSV_HEADER: &str = "flow_id,timestamp_us,length,proto_code";

/// Parse the CSV trace format: `flow_id,timestamp_us,length,proto_code`.
pub fn parse_csv(input: impl Read) -> Result<Vec<PacketRecord>, IngestError> {
    let mut text = String::new();
    let mut rdr = input;
    rdr.read_to_string(&mut text)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        Some((_, h)) => {
            return Err(IngestError::RowParseError {
                line: 1,
                reason: format!("unexpected header {h:?}"),
            })
        }
        None => return Ok(Vec::new()),
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(IngestError::RowParseError {
                line: lineno,
                reason: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        let parse_num = |s: &str, what: &str| -> Result<u64, IngestError> {
            s.trim().parse::<u64>().map_err(|_| IngestError::RowParseError {
                line: lineno,
                reason: format!("non-numeric {what}: {s:?}"),
            })
        };
        let timestamp_us = parse_num(fields[1], "timestamp_us")?;
        let length_bytes = parse_num(fields[2], "length")? as u32;
        let proto_code = parse_num(fields[3], "proto_code")?;
        if proto_code > 255 {
            return Err(IngestError::RowParseError {
                line: lineno,
                reason: format!("proto_code out of range: {proto_code}"),
            });
        }
        records.push(PacketRecord {
            timestamp_us,
            length_bytes,
            proto_code: proto_code as u8,
            flow_key: FlowKey::Opaque(fields[0].trim().to_string()),
        });
    }
    Ok(records)
}

/// Serialize records back to the CSV trace format.
pub fn write_csv(records: &[PacketRecord], out: &mut impl std::io::Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{}",
            r.flow_key, r.timestamp_us, r.length_bytes, r.proto_code
        )?;
    }
    Ok(())
}

/// Per-flow packet sequences, ordered by timestamp, with an eviction
/// watermark bounding total buffered packets.
#[derive(Debug)]
pub struct FlowTable {
    flows: HashMap<FlowKey, Vec<PacketRecord>>,
    total_packets: usize,
    watermark: usize,
}

impl FlowTable {
    pub fn new(watermark: usize) -> Self {
        FlowTable {
            flows: HashMap::new(),
            total_packets: 0,
            watermark,
        }
    }

    pub fn insert(&mut self, record: PacketRecord) {
        let seq = self.flows.entry(record.flow_key.clone()).or_default();
        // Maintain non-decreasing timestamps within the flow.
        let pos = seq
            .iter()
            .rposition(|r| r.timestamp_us <= record.timestamp_us)
            .map(|p| p + 1)
            .unwrap_or(0);
        seq.insert(pos, record);
        self.total_packets += 1;
        while self.total_packets > self.watermark {
            self.evict_oldest_flow();
        }
    }

    /// Drop the flow whose oldest packet is oldest overall.
    fn evict_oldest_flow(&mut self) {
        let oldest = self
            .flows
            .iter()
            .filter(|(_, seq)| !seq.is_empty())
            .min_by_key(|(_, seq)| seq[0].timestamp_us)
            .map(|(k, _)| k.clone());
        if let Some(key) = oldest {
            if let Some(seq) = self.flows.remove(&key) {
                self.total_packets -= seq.len();
            }
        } else {
            self.total_packets = 0;
            self.flows.clear();
        }
    }

    pub fn len(&self) -> usize {
        self.flows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flows.is_empty()
    }

    pub fn total_packets(&self) -> usize {
        self.total_packets
    }

    pub fn get(&self, key: &FlowKey) -> Option<&[PacketRecord]> {
        self.flows.get(key).map(|v| v.as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FlowKey, &[PacketRecord])> {
        self.flows.iter().map(|(k, v)| (k, v.as_slice()))
    }

    /// Flows in deterministic key order.
    pub fn iter_sorted(&self) -> Vec<(&FlowKey, &[PacketRecord])> {
        let mut entries: Vec<_> = self.iter().collect();
        entries.sort_by_key(|(k, _)| k.to_string());
        entries
    }
}

/// Group records into flows under the given key mode.
///
/// In `SourceIp` mode, 5-tuple keys collapse to their source address and
/// opaque keys are kept as-is.
pub fn group_flows(records: impl IntoIterator<Item = PacketRecord>, mode: FlowKeyMode) -> FlowTable {
    let mut table = FlowTable::new(usize::MAX);
    for mut record in records {
        record.flow_key = match (mode, record.flow_key) {
            (FlowKeyMode::SourceIp, FlowKey::FiveTuple { src, .. }) => FlowKey::SourceIp(src),
            (_, k) => k,
        };
        table.insert(record);
    }
    table
}

/// Build the N×3 per-packet feature matrix of one flow:
/// `[proto_code, inter_arrival_us, length_bytes]`, first inter-arrival 0.
pub fn to_feature_rows(flow: &[PacketRecord]) -> Result<FeatureMatrix, IngestError> {
    if flow.is_empty() {
        return Err(IngestError::EmptyFlow);
    }
    let mut data = Vec::with_capacity(flow.len() * FEATURE_COUNT);
    let mut prev_ts = flow[0].timestamp_us;
    for r in flow {
        let inter_arrival = r.timestamp_us.saturating_sub(prev_ts);
        prev_ts = r.timestamp_us;
        data.push(r.proto_code as f64);
        data.push(inter_arrival as f64);
        data.push(r.length_bytes as f64);
    }
    FeatureMatrix::from_flat(data, FEATURE_COUNT)
}

/// Streaming encode: the per-packet feature dot product without
/// materializing the intermediate feature matrix.
pub fn encode_records(
    flow: &[PacketRecord],
    w: &crate::spectral::EncodingVector,
) -> Result<Vec<f64>, IngestError> {
    if flow.is_empty() {
        return Err(IngestError::EmptyFlow);
    }
    assert_eq!(w.len(), FEATURE_COUNT, "encoding vector must have 3 weights");
    let (w0, w1, w2) = (w.0[0], w.0[1], w.0[2]);
    let mut out = Vec::with_capacity(flow.len());
    let mut prev_ts = flow[0].timestamp_us;
    for r in flow {
        let inter_arrival = r.timestamp_us.saturating_sub(prev_ts);
        prev_ts = r.timestamp_us;
        out.push(
            w0 * r.proto_code as f64
                + w1 * inter_arrival as f64
                + w2 * r.length_bytes as f64,
        );
    }
    Ok(out)
}
