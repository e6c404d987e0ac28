//! Thin command-line front end over the library's command operations.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use specmon::commands::{self, CommandError, RunConfig};
use specmon::synth::TrafficProfile;

#[derive(Parser)]
#[command(name = "specmon", version, about = "Frequency-domain malicious traffic detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Framing length (packets per frame).
    #[arg(long)]
    w_seg: Option<usize>,
    /// Sampling window length (frames per clustering sample).
    #[arg(long)]
    w_win: Option<usize>,
    /// Number of clustering centers.
    #[arg(long)]
    k_c: Option<usize>,
}

impl Common {
    fn build(&self) -> Result<RunConfig, CommandError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(w_seg) = self.w_seg {
            cfg.hyperparams.w_seg = w_seg;
        }
        if let Some(w_win) = self.w_win {
            cfg.hyperparams.w_win = w_win;
        }
        if let Some(k_c) = self.k_c {
            cfg.hyperparams.k_c = k_c;
        }
        cfg.hyperparams.validate().map_err(CommandError::Input)?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Select the encoding vector from a training trace.
    SelectParams {
        #[command(flatten)]
        common: Common,
        /// Training trace (.pcap or .csv).
        input: PathBuf,
        /// Output JSON selection result.
        #[arg(short, long, default_value = "selection.json")]
        output: PathBuf,
        /// Number of candidate vectors to evaluate.
        #[arg(long)]
        search_budget: Option<usize>,
        /// Allow constraints to fail on up to 1-q of rows.
        #[arg(long)]
        quantile: Option<f64>,
    },
    /// Train the clustering model on a benign trace.
    Train {
        #[command(flatten)]
        common: Common,
        /// Benign training trace.
        input: PathBuf,
        /// Encoding selection JSON from select-params.
        #[arg(long)]
        encoding: Option<PathBuf>,
        /// Output model JSON.
        #[arg(short, long, default_value = "model.json")]
        output: PathBuf,
    },
    /// Detect malicious flows; one JSON line per flow on stdout.
    Detect {
        #[command(flatten)]
        common: Common,
        /// Trained model JSON.
        #[arg(long)]
        model: PathBuf,
        /// Input trace.
        input: PathBuf,
        /// Detection threshold factor.
        #[arg(long)]
        phi: Option<f64>,
    },
    /// Evaluate against a labeled trace: threshold sweep, AUC, EER.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Trained model JSON.
        #[arg(long)]
        model: PathBuf,
        /// Labeled test trace (CSV with a label column).
        input: PathBuf,
        /// Benign training trace for the statistics baseline.
        #[arg(long)]
        fsc_train: Option<PathBuf>,
        /// Output CSV of the threshold sweep.
        #[arg(long, default_value = "eval.csv")]
        csv_out: PathBuf,
        /// Output JSON summary.
        #[arg(long, default_value = "eval.json")]
        json_out: PathBuf,
    },
    /// Generate a labeled synthetic trace.
    Synth {
        #[command(flatten)]
        common: Common,
        /// Traffic profile: benign, syn-flood, low-rate-burst, constant-scan.
        #[arg(long, default_value = "benign")]
        profile: String,
        /// Number of flows.
        #[arg(long, default_value_t = 1)]
        flows: usize,
        /// Packets per second per flow.
        #[arg(long)]
        rate: Option<f64>,
        /// Flow duration in seconds.
        #[arg(long)]
        duration: Option<f64>,
        /// Burst interval in seconds (low-rate-burst).
        #[arg(long, default_value_t = 0.5)]
        burst_interval: f64,
        /// Packets per burst (low-rate-burst).
        #[arg(long, default_value_t = 50)]
        burst_len: usize,
        /// Mix ratio malicious:benign, e.g. 1:4.
        #[arg(long)]
        mix: Option<String>,
        /// Output labeled CSV.
        #[arg(short, long, default_value = "trace.csv")]
        output: PathBuf,
        /// Optional pcap output.
        #[arg(long)]
        pcap: Option<PathBuf>,
    },
    /// Export one flow's spectrogram as a PPM image.
    Spectrogram {
        #[command(flatten)]
        common: Common,
        /// Input trace.
        input: PathBuf,
        /// Model JSON providing encoding and hyperparameters.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Flow id to render; defaults to the largest flow.
        #[arg(long)]
        flow: Option<String>,
        /// Output PPM path.
        #[arg(short, long, default_value = "spectrogram.ppm")]
        output: PathBuf,
    },
    /// Verify the entropy-loss theorems numerically.
    EntropyCheck {
        #[command(flatten)]
        common: Common,
        /// Sequence length N.
        #[arg(long)]
        n: Option<usize>,
        /// Process standard deviation.
        #[arg(long)]
        sigma: Option<f64>,
        /// Encoding weight w.
        #[arg(long)]
        w: Option<f64>,
        /// Monte-Carlo sample count.
        #[arg(long)]
        mc_samples: Option<usize>,
        /// Output JSON report path (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn run() -> Result<i32, CommandError> {
    match Cli::parse().command {
        Command::SelectParams {
            common,
            input,
            output,
            search_budget,
            quantile,
        } => {
            let mut cfg = common.build()?;
            if let Some(b) = search_budget {
                cfg.search_budget = b;
            }
            if quantile.is_some() {
                cfg.constraint_quantile = quantile;
            }
            commands::cmd_select_params(&cfg, &input, &output)
        }
        Command::Train {
            common,
            input,
            encoding,
            output,
        } => {
            let cfg = common.build()?;
            commands::cmd_train(&cfg, &input, encoding.as_deref(), &output)
        }
        Command::Detect {
            common,
            model,
            input,
            phi,
        } => {
            let mut cfg = common.build()?;
            if phi.is_some() {
                cfg.phi = phi;
            }
            commands::cmd_detect(&cfg, &model, &input, &mut std::io::stdout())
        }
        Command::Eval {
            common,
            model,
            input,
            fsc_train,
            csv_out,
            json_out,
        } => {
            let cfg = common.build()?;
            commands::cmd_eval(
                &cfg,
                &model,
                &input,
                fsc_train.as_deref(),
                &csv_out,
                &json_out,
            )
        }
        Command::Synth {
            common,
            profile,
            flows,
            rate,
            duration,
            burst_interval,
            burst_len,
            mix,
            output,
            pcap,
        } => {
            let cfg = common.build()?;
            let mut p = match profile.as_str() {
                "benign" => TrafficProfile::benign("benign"),
                "syn-flood" => TrafficProfile::syn_flood("flood"),
                "low-rate-burst" => {
                    TrafficProfile::low_rate_burst("burst", burst_interval, burst_len)
                }
                "constant-scan" => TrafficProfile::constant_scan("scan"),
                other => {
                    return Err(CommandError::Input(format!("unknown profile {other}")))
                }
            };
            if let Some(rate) = rate {
                p.rate_pps = rate;
            }
            if let Some(duration) = duration {
                p.duration_s = duration;
            }
            let mix_ratio = match mix {
                Some(text) => Some(parse_ratio(&text)?),
                None => None,
            };
            commands::cmd_synth(&cfg, &p, flows, mix_ratio, &output, pcap.as_deref())
        }
        Command::Spectrogram {
            common,
            input,
            model,
            flow,
            output,
        } => {
            let cfg = common.build()?;
            commands::cmd_spectrogram(&cfg, &input, model.as_deref(), flow.as_deref(), &output)
        }
        Command::EntropyCheck {
            common,
            n,
            sigma,
            w,
            mc_samples,
            output,
        } => {
            let mut cfg = common.build()?;
            if let Some(n) = n {
                cfg.entropy_n = n;
            }
            if let Some(sigma) = sigma {
                cfg.entropy_sigma = sigma;
            }
            if let Some(w) = w {
                cfg.entropy_w = w;
            }
            if let Some(s) = mc_samples {
                cfg.mc_samples = s;
            }
            commands::cmd_entropy_check(&cfg, output.as_deref())
        }
    }
}

fn parse_ratio(text: &str) -> Result<(u32, u32), CommandError> {
    let bad = || CommandError::Input(format!("bad mix ratio {text:?}, expected M:B"));
    let (m, b) = text.split_once(':').ok_or_else(bad)?;
    Ok((m.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::EXIT_INPUT_ERROR as u8)
        }
    }
}
