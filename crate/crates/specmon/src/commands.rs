//! The operations behind the CLI subcommands: parameter selection,
//! training, detection, evaluation, synthesis, spectrogram export, and
//! entropy verification. Each returns an exit code; input failures map to
//! exit 1 through `CommandError`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::baseline::{self, StatScaler};
use crate::cluster::{self, ClusterModel, Verdict};
use crate::config::HyperParams;
use crate::encoding::{self, ConstraintMode, SelectionProblem, SelectionResult};
use crate::entropy::{self, EntropyError, GaussianProcessSpec, LossReport};
use crate::ingest::{self, FlowKeyMode, PacketRecord};
use crate::metrics::{self, Label, LabeledScores};
use crate::spectral::{self, EncodingVector, FeatureMatrix};
use crate::synth::{self, LabeledPacket, MixSpec, TrafficProfile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE_FALLBACK: i32 = 2;
pub const EXIT_PROPERTY_VIOLATION: i32 = 3;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<ingest::IngestError> for CommandError {
    fn from(e: ingest::IngestError) -> Self {
        CommandError::Input(e.to_string())
    }
}

impl From<cluster::ClusterError> for CommandError {
    fn from(e: cluster::ClusterError) -> Self {
        CommandError::Input(e.to_string())
    }
}

impl From<spectral::SpectralError> for CommandError {
    fn from(e: spectral::SpectralError) -> Self {
        CommandError::Input(e.to_string())
    }
}

impl From<synth::SynthError> for CommandError {
    fn from(e: synth::SynthError) -> Self {
        CommandError::Input(e.to_string())
    }
}

impl From<EntropyError> for CommandError {
    fn from(e: EntropyError) -> Self {
        CommandError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CommandError {
    fn from(e: serde_json::Error) -> Self {
        CommandError::Input(e.to_string())
    }
}

fn default_flow_mode() -> FlowKeyMode {
    FlowKeyMode::SourceIp
}

fn default_search_budget() -> usize {
    4000
}

fn default_mc_samples() -> usize {
    50_000
}

fn default_entropy_n() -> usize {
    50
}

fn default_entropy_sigma() -> f64 {
    1.0
}

fn default_entropy_w() -> f64 {
    10.0
}

fn default_phi_sweep() -> (f64, f64, usize) {
    (0.1, 100.0, 64)
}

/// Runtime configuration: hyperparameters plus command-level knobs.
/// Loaded from a JSON file; command-line flags override file values.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub hyperparams: HyperParams,
    pub flow_mode: FlowKeyMode,
    pub seed: u64,
    /// Detection threshold factor; required at runtime for detect.
    pub phi: Option<f64>,
    /// (lo, hi, points) for the eval threshold sweep, log-spaced.
    pub phi_sweep: (f64, f64, usize),
    pub search_budget: usize,
    /// When set, constraints may fail on up to `1 - q` of rows.
    pub constraint_quantile: Option<f64>,
    pub mc_samples: usize,
    pub entropy_n: usize,
    pub entropy_sigma: f64,
    pub entropy_w: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            hyperparams: HyperParams::default(),
            flow_mode: default_flow_mode(),
            seed: 0,
            phi: None,
            phi_sweep: default_phi_sweep(),
            search_budget: default_search_budget(),
            constraint_quantile: None,
            mc_samples: default_mc_samples(),
            entropy_n: default_entropy_n(),
            entropy_sigma: default_entropy_sigma(),
            entropy_w: default_entropy_w(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CommandError> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.hyperparams.validate().map_err(CommandError::Input)?;
        Ok(cfg)
    }
}

/// Read a trace by extension: `.pcap` or CSV (labels ignored if present).
pub fn load_records(path: &Path) -> Result<Vec<PacketRecord>, CommandError> {
    let bytes = std::fs::read(path)?;
    if path.extension().map_or(false, |e| e == "pcap") {
        let parsed = ingest::parse_pcap(&bytes[..])?;
        if let Some(diag) = parsed.diagnostic {
            eprintln!("warning: {diag}");
        }
        Ok(parsed.records)
    } else if looks_labeled(&bytes) {
        Ok(synth::parse_labeled_csv(&bytes[..])?
            .into_iter()
            .map(|p| p.record)
            .collect())
    } else {
        Ok(ingest::parse_csv(&bytes[..])?)
    }
}

fn looks_labeled(bytes: &[u8]) -> bool {
    bytes
        .split(|&b| b == b'\n')
        .next()
        .map_or(false, |h| h.ends_with(b",label"))
}

/// Per-flow packet sequences in deterministic key order.
pub fn sorted_flows(
    records: Vec<PacketRecord>,
    mode: FlowKeyMode,
) -> Vec<(String, Vec<PacketRecord>)> {
    let table = ingest::group_flows(records, mode);
    table
        .iter_sorted()
        .into_iter()
        .map(|(k, seq)| (k.to_string(), seq.to_vec()))
        .collect()
}

/// Window samples of every flow, concatenated in flow order.
pub fn collect_samples(
    flows: &[(String, Vec<PacketRecord>)],
    w: &EncodingVector,
    hp: &HyperParams,
) -> Result<Vec<Vec<f64>>, CommandError> {
    let mut samples = Vec::new();
    for (_, seq) in flows {
        let s = ingest::to_feature_rows(seq)?;
        let r = spectral::extract(&s, w, hp)?;
        samples.extend(cluster::window_samples(&r, hp.w_win));
    }
    Ok(samples)
}

/// Select the encoding vector from the first 20% of the trace's packets.
/// Exit 0 when feasible, 2 when only a fallback (least-violating) vector
/// was found.
pub fn cmd_select_params(
    cfg: &RunConfig,
    input: &Path,
    output: &Path,
) -> Result<i32, CommandError> {
    let records = load_records(input)?;
    if records.is_empty() {
        return Err(CommandError::Input("empty training trace".into()));
    }
    let head = &records[..(records.len() / 5).max(1)];
    let flows = sorted_flows(head.to_vec(), cfg.flow_mode);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (_, seq) in &flows {
        let s = ingest::to_feature_rows(seq)?;
        for i in 0..s.n_rows() {
            rows.push(s.row(i).to_vec());
        }
    }
    let features = FeatureMatrix::from_rows(rows)?;
    let problem = SelectionProblem {
        normalized: encoding::normalize_features(&features),
        w_min: cfg.hyperparams.w_min,
        w_max: cfg.hyperparams.w_max,
        budget: cfg.hyperparams.b,
        mode: match cfg.constraint_quantile {
            Some(q) => ConstraintMode::Quantile(q),
            None => ConstraintMode::Hard,
        },
    };
    let result = encoding::select_encoding(&problem, cfg.search_budget, cfg.seed);
    std::fs::write(output, serde_json::to_vec_pretty(&result)?)?;
    Ok(if result.feasible {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE_FALLBACK
    })
}

fn encoding_from(
    selection: Option<&Path>,
    hp: &HyperParams,
) -> Result<EncodingVector, CommandError> {
    match selection {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let sel: SelectionResult = serde_json::from_str(&text)?;
            Ok(sel.w)
        }
        None => Ok(EncodingVector(vec![hp.w_min; ingest::FEATURE_COUNT])),
    }
}

/// Train the clustering model on a benign trace and write it as JSON.
pub fn cmd_train(
    cfg: &RunConfig,
    input: &Path,
    selection: Option<&Path>,
    output: &Path,
) -> Result<i32, CommandError> {
    let w = encoding_from(selection, &cfg.hyperparams)?;
    let records = load_records(input)?;
    let flows = sorted_flows(records, cfg.flow_mode);
    let samples = collect_samples(&flows, &w, &cfg.hyperparams)?;
    let model = cluster::train(&samples, &cfg.hyperparams, w, cfg.seed)?;
    std::fs::write(output, serde_json::to_vec_pretty(&model)?)?;
    println!("train_loss {}", model.train_loss);
    Ok(EXIT_OK)
}

pub fn load_model(path: &Path) -> Result<ClusterModel, CommandError> {
    let text = std::fs::read_to_string(path)?;
    let model: ClusterModel = serde_json::from_str(&text)?;
    if model.format_version != cluster::MODEL_FORMAT_VERSION {
        return Err(CommandError::Input(format!(
            "unsupported model format version {}",
            model.format_version
        )));
    }
    Ok(model)
}

/// One JSON line per flow: `{flow, max_loss, threshold, verdict}`.
pub fn cmd_detect(
    cfg: &RunConfig,
    model_path: &Path,
    input: &Path,
    out: &mut impl Write,
) -> Result<i32, CommandError> {
    let phi = cfg
        .phi
        .ok_or_else(|| CommandError::Input("phi is required for detection".into()))?;
    let model = load_model(model_path)?;
    let records = load_records(input)?;
    let flows = sorted_flows(records, cfg.flow_mode);
    for (key, seq) in &flows {
        let s = ingest::to_feature_rows(seq)?;
        let r = spectral::extract(&s, &model.encoding_vector, &model.hyperparams)?;
        let result = cluster::detect(
            &model,
            &ingest::FlowKey::Opaque(key.clone()),
            &r,
            phi,
        )?;
        let max_loss = if result.scores.is_empty() {
            serde_json::Value::Null
        } else {
            json!(result.max_score())
        };
        let line = json!({
            "flow": key,
            "max_loss": max_loss,
            "threshold": result.threshold_used,
            "verdict": match result.verdict {
                Verdict::Benign => "benign",
                Verdict::Malicious => "malicious",
            },
        });
        writeln!(out, "{line}")?;
    }
    Ok(EXIT_OK)
}

/// Statistics-clustering baseline model: a scaler plus K-Means centers over
/// the 17 per-flow statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FscModel {
    pub scaler: StatScaler,
    pub centers: Vec<Vec<f64>>,
    pub train_loss: f64,
}

pub fn fsc_train(
    flows: &[(String, Vec<PacketRecord>)],
    k_c: usize,
    seed: u64,
) -> Result<FscModel, CommandError> {
    let stats: Vec<_> = flows
        .iter()
        .map(|(_, seq)| baseline::flow_stats_from_records(seq))
        .collect::<Result<_, _>>()?;
    let (normalized, scaler) = baseline::normalize_stats(&stats)
        .ok_or_else(|| CommandError::Input("no training flows".into()))?;
    // one statistics vector per flow: clamp k to the flow count
    let centers = cluster::kmeans(&normalized, k_c.min(normalized.len()), seed)?;
    let train_loss = normalized
        .iter()
        .map(|s| nearest(&centers, s))
        .sum::<f64>()
        / normalized.len() as f64;
    Ok(FscModel {
        scaler,
        centers,
        train_loss,
    })
}

fn nearest(centers: &[Vec<f64>], s: &[f64]) -> f64 {
    centers
        .iter()
        .map(|c| {
            c.iter()
                .zip(s)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn fsc_score(model: &FscModel, flow: &[PacketRecord]) -> Result<f64, CommandError> {
    let stats = baseline::flow_stats_from_records(flow)?;
    Ok(nearest(&model.centers, &model.scaler.transform(&stats)))
}

/// Per-flow maximum window loss under the spectral model. Flows with no
/// full frame score 0 (no spectral evidence).
pub fn per_flow_spectral_scores(
    model: &ClusterModel,
    flows: &[(String, Vec<PacketRecord>)],
) -> Result<Vec<(String, f64)>, CommandError> {
    let mut out = Vec::with_capacity(flows.len());
    for (key, seq) in flows {
        let s = ingest::to_feature_rows(seq)?;
        let r = spectral::extract(&s, &model.encoding_vector, &model.hyperparams)?;
        let samples = cluster::window_samples(&r, model.hyperparams.w_win);
        let mut max = 0.0f64;
        for sample in &samples {
            max = max.max(cluster::score(model, sample)?);
        }
        out.push((key.clone(), max));
    }
    Ok(out)
}

/// Group a labeled trace into flows; a flow is malicious when any of its
/// packets is.
pub fn labeled_flows(
    packets: Vec<LabeledPacket>,
) -> Vec<(String, Vec<PacketRecord>, Label)> {
    let mut map: BTreeMap<String, (Vec<PacketRecord>, Label)> = BTreeMap::new();
    for p in packets {
        let key = p.record.flow_key.to_string();
        let entry = map.entry(key).or_insert_with(|| (Vec::new(), Label::Benign));
        entry.0.push(p.record);
        if p.label == Label::Malicious {
            entry.1 = Label::Malicious;
        }
    }
    map.into_iter()
        .map(|(k, (mut seq, label))| {
            seq.sort_by_key(|r| r.timestamp_us);
            (k, seq, label)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub detector: String,
    pub phi: f64,
    pub threshold: f64,
    pub tpr: f64,
    pub fpr: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectorSummary {
    pub auc: f64,
    pub eer: f64,
    pub flows_benign: usize,
    pub flows_malicious: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub whisper: DetectorSummary,
    pub fsc: Option<DetectorSummary>,
    pub sweep: Vec<SweepRow>,
}

pub fn log_spaced(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    encoding::log_grid(lo, hi, points)
}

fn summarize(scores: &[f64], labels: &[Label]) -> Result<DetectorSummary, CommandError> {
    let ls = LabeledScores::new(scores.to_vec(), labels.to_vec())
        .map_err(|e| CommandError::Input(e.to_string()))?;
    let auc = metrics::auc(&ls).map_err(|e| CommandError::Input(e.to_string()))?;
    let eer = metrics::eer(&ls).map_err(|e| CommandError::Input(e.to_string()))?;
    Ok(DetectorSummary {
        auc,
        eer,
        flows_benign: labels.iter().filter(|&&l| l == Label::Benign).count(),
        flows_malicious: labels.iter().filter(|&&l| l == Label::Malicious).count(),
    })
}

fn sweep_rows(
    detector: &str,
    cfg: &RunConfig,
    train_loss: f64,
    scores: &[f64],
    labels: &[Label],
) -> Result<Vec<SweepRow>, CommandError> {
    let ls = LabeledScores::new(scores.to_vec(), labels.to_vec())
        .map_err(|e| CommandError::Input(e.to_string()))?;
    let (lo, hi, points) = cfg.phi_sweep;
    let mut rows = Vec::with_capacity(points);
    let floor = if train_loss < 1e-12 { 1e-9 } else { train_loss };
    for phi in log_spaced(lo, hi, points) {
        let threshold = phi * floor;
        let (tpr, fpr) =
            metrics::confusion_at(&ls, threshold).map_err(|e| CommandError::Input(e.to_string()))?;
        rows.push(SweepRow {
            detector: detector.to_string(),
            phi,
            threshold,
            tpr,
            fpr,
        });
    }
    Ok(rows)
}

/// Evaluate the spectral detector (and optionally the statistics baseline)
/// on a labeled trace: per-flow max-loss scores, a phi sweep, AUC, and EER.
pub fn evaluate(
    cfg: &RunConfig,
    model: &ClusterModel,
    labeled: Vec<LabeledPacket>,
    fsc_train_flows: Option<&[(String, Vec<PacketRecord>)]>,
) -> Result<EvalReport, CommandError> {
    let flows = labeled_flows(labeled);
    if flows.is_empty() {
        return Err(CommandError::Input("empty labeled trace".into()));
    }
    let labels: Vec<Label> = flows.iter().map(|(_, _, l)| *l).collect();
    let plain: Vec<(String, Vec<PacketRecord>)> = flows
        .iter()
        .map(|(k, seq, _)| (k.clone(), seq.clone()))
        .collect();
    let spectral_scores: Vec<f64> = per_flow_spectral_scores(model, &plain)?
        .into_iter()
        .map(|(_, s)| s)
        .collect();
    let whisper = summarize(&spectral_scores, &labels)?;
    let mut sweep = sweep_rows("whisper", cfg, model.train_loss, &spectral_scores, &labels)?;

    let fsc = match fsc_train_flows {
        Some(train_flows) => {
            let fsc_model = fsc_train(train_flows, cfg.hyperparams.k_c, cfg.seed)?;
            let mut scores = Vec::with_capacity(plain.len());
            for (_, seq) in &plain {
                scores.push(fsc_score(&fsc_model, seq)?);
            }
            sweep.extend(sweep_rows("fsc", cfg, fsc_model.train_loss, &scores, &labels)?);
            Some(summarize(&scores, &labels)?)
        }
        None => None,
    };
    Ok(EvalReport { whisper, fsc, sweep })
}

/// Run an evaluation from files: labeled test CSV plus optional benign
/// training trace for the baseline. Writes the sweep CSV and summary JSON.
pub fn cmd_eval(
    cfg: &RunConfig,
    model_path: &Path,
    labeled_input: &Path,
    fsc_train_input: Option<&Path>,
    csv_out: &Path,
    json_out: &Path,
) -> Result<i32, CommandError> {
    let model = load_model(model_path)?;
    let bytes = std::fs::read(labeled_input)?;
    let labeled = synth::parse_labeled_csv(&bytes[..])?;
    let fsc_flows = match fsc_train_input {
        Some(path) => Some(sorted_flows(load_records(path)?, cfg.flow_mode)),
        None => None,
    };
    let report = evaluate(cfg, &model, labeled, fsc_flows.as_deref())?;

    let mut csv = Vec::new();
    writeln!(csv, "detector,phi,threshold,tpr,fpr")?;
    for row in &report.sweep {
        writeln!(
            csv,
            "{},{},{},{},{}",
            row.detector, row.phi, row.threshold, row.tpr, row.fpr
        )?;
    }
    std::fs::write(csv_out, csv)?;
    std::fs::write(json_out, serde_json::to_vec_pretty(&report)?)?;
    println!(
        "whisper auc {} eer {}",
        report.whisper.auc, report.whisper.eer
    );
    if let Some(fsc) = &report.fsc {
        println!("fsc auc {} eer {}", fsc.auc, fsc.eer);
    }
    Ok(EXIT_OK)
}

/// Generate a labeled synthetic dataset: `n_flows` flows of the profile,
/// optionally mixed with benign noise at `mix_ratio` (malicious:benign).
pub fn cmd_synth(
    cfg: &RunConfig,
    profile: &TrafficProfile,
    n_flows: usize,
    mix_ratio: Option<(u32, u32)>,
    output: &Path,
    pcap_output: Option<&Path>,
) -> Result<i32, CommandError> {
    let packets = match mix_ratio {
        Some((m, b)) => {
            let mut merged = Vec::new();
            for i in 0..n_flows {
                let mut p = profile.clone();
                p.flow_id = format!("{}-{i:04}", profile.flow_id);
                let spec = MixSpec {
                    malicious: p,
                    benign: TrafficProfile::benign("noise"),
                    ratio_malicious: m,
                    ratio_benign: b,
                };
                merged = synth::merge_by_timestamp(
                    merged,
                    synth::mix(&spec, cfg.seed.wrapping_add(i as u64))?,
                );
            }
            merged
        }
        None => synth::generate_flows(profile, n_flows, cfg.seed)?,
    };
    let mut csv = Vec::new();
    synth::write_labeled_csv(&mut csv, &packets)?;
    std::fs::write(output, csv)?;
    if let Some(path) = pcap_output {
        synth::write_pcap(path, &packets)?;
    }
    println!("wrote {} packets", packets.len());
    Ok(EXIT_OK)
}

/// Export the spectrogram of one flow (the named one, or the largest) as a
/// PPM image.
pub fn cmd_spectrogram(
    cfg: &RunConfig,
    input: &Path,
    model_path: Option<&Path>,
    flow: Option<&str>,
    output: &Path,
) -> Result<i32, CommandError> {
    let (w, hp) = match model_path {
        Some(path) => {
            let model = load_model(path)?;
            (model.encoding_vector, model.hyperparams)
        }
        None => (
            EncodingVector(vec![cfg.hyperparams.w_min; ingest::FEATURE_COUNT]),
            cfg.hyperparams.clone(),
        ),
    };
    let flows = sorted_flows(load_records(input)?, cfg.flow_mode);
    let chosen = match flow {
        Some(name) => flows
            .iter()
            .find(|(k, _)| k == name)
            .ok_or_else(|| CommandError::Input(format!("flow {name} not found")))?,
        None => flows
            .iter()
            .max_by_key(|(_, seq)| seq.len())
            .ok_or_else(|| CommandError::Input("empty trace".into()))?,
    };
    let s = ingest::to_feature_rows(&chosen.1)?;
    let r = spectral::extract(&s, &w, &hp)?;
    if r.n_f() == 0 {
        return Err(CommandError::Input(
            "flow too short for a single frame".into(),
        ));
    }
    spectral::spectrogram_export(&r, output)?;
    println!("wrote {}x{} spectrogram for flow {}", r.n_f(), r.k_f(), chosen.0);
    Ok(EXIT_OK)
}

/// Verify all six entropy-loss theorems; exit 3 when any bound check fails
/// beyond three standard errors.
pub fn cmd_entropy_check(
    cfg: &RunConfig,
    json_out: Option<&Path>,
) -> Result<i32, CommandError> {
    let spec = GaussianProcessSpec::stationary(cfg.entropy_n, cfg.entropy_sigma);
    let mut reports: Vec<LossReport> = Vec::with_capacity(6);
    for theorem in 1..=6u8 {
        reports.push(entropy::verify_theorem(
            theorem,
            &spec,
            cfg.mc_samples,
            cfg.entropy_w,
            cfg.seed.wrapping_add(theorem as u64),
        )?);
    }
    let text = serde_json::to_string_pretty(&reports)?;
    match json_out {
        Some(path) => std::fs::write(path, &text)?,
        None => println!("{text}"),
    }
    for r in &reports {
        let status = if r.bound_satisfied { "ok" } else { "VIOLATED" };
        eprintln!("theorem {} {}: {}", r.theorem, status, r.detail);
    }
    Ok(if reports.iter().all(|r| r.bound_satisfied) {
        EXIT_OK
    } else {
        EXIT_PROPERTY_VIOLATION
    })
}
