//! Frequency-domain malicious traffic detection.
//!
//! The pipeline turns per-packet feature sequences (protocol, inter-arrival
//! time, length) into frequency-domain feature matrices via linear encoding,
//! framing, DFT, squared modulus, and a logarithmic transform. A K-Means
//! model trained on benign traffic flags flows whose spectral features sit
//! far from the learned centers.
//!
//! Modules:
//! - [`ingest`]: pcap/CSV parsing and flow grouping
//! - [`spectral`]: encoding, framing, DFT, and spectrogram export
//! - [`encoding`]: constrained search for the encoding vector
//! - [`cluster`]: K-Means training, scoring, and the detection rule
//! - [`baseline`]: flow-level statistics baseline fed to the same clusterer
//! - [`metrics`]: ROC, AUC, and EER from labeled scores
//! - [`entropy`]: differential-entropy calculators and Monte-Carlo checks
//! - [`synth`]: synthetic labeled trace generation
//! - [`commands`]: the operations behind the CLI subcommands

pub mod baseline;
pub mod cluster;
pub mod commands;
pub mod config;
pub mod encoding;
pub mod entropy;
pub mod ingest;
pub mod metrics;
pub mod spectral;
pub mod synth;

pub use config::HyperParams;
pub use ingest::{FlowKey, FlowKeyMode, FlowTable, PacketRecord};
pub use spectral::{EncodingVector, FeatureMatrix, FrequencyFeatureMatrix};
