// SPDX-License-Identifier: Apache-2.0

//! `sirf-trng`: generation and certification driver.
//!
//! Exit codes: 0 success, 2 configuration error, 3 degenerate entropy
//! source, 4 I/O error (including a consumer closing the output pipe).

use clap::{Args, Parser, Subcommand};
use sirf_trng::error::Error as CoreError;

mod commands;
mod config;

#[derive(Parser)]
#[command(
    name = "sirf-trng",
    version,
    about = "SiRF PUF-TRNG model and certification suite"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every generation-style subcommand. Values given on the
/// command line override the config file.
#[derive(Args, Clone, Debug, Default)]
pub struct CommonOpts {
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,
    #[arg(long)]
    device_seed: Option<u64>,
    #[arg(long)]
    noise_seed: Option<u64>,
    /// Measurement-noise standard deviation in TDC counts.
    #[arg(long)]
    sigma: Option<f64>,
    /// Additive delay shift in TDC counts.
    #[arg(long)]
    temp_offset: Option<f64>,
    /// Multiplicative factor on nominal delays.
    #[arg(long)]
    supply_scale: Option<f64>,
    /// Disable spread-factor chaining (ablation runs).
    #[arg(long)]
    no_chaining: bool,
    /// Range constant: "rand" or a fixed value in 128..=191.
    #[arg(long)]
    rc: Option<String>,
    /// Trim code constant: "rand" or a fixed even value in 8..=22.
    #[arg(long)]
    tcc: Option<String>,
    /// Bit budget (whole cycles of 2^22 bits are emitted).
    #[arg(long)]
    bits: Option<u64>,
    /// Permutation count for the IID suite.
    #[arg(long)]
    perms: Option<u32>,
    /// Sampled pair count for correlation scans (0 = all pairs).
    #[arg(long)]
    pcc_pairs: Option<usize>,
    /// Where to write the JSON report.
    #[arg(long)]
    report: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random bits through the full pipeline.
    Run {
        #[command(flatten)]
        common: CommonOpts,
        /// Output path, or "-" for stdout.
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Run the embedded certification suite over a raw packed-bit file.
    Analyze {
        #[command(flatten)]
        common: CommonOpts,
        /// Raw bit file (MSB-first packed bytes).
        input: std::path::PathBuf,
        /// Cap the number of bits read.
        #[arg(long)]
        max_bits: Option<usize>,
        /// Also run the IID permutation suite (slow) on this many bits.
        #[arg(long)]
        iid_bits: Option<usize>,
    },
    /// Correlation ablation: residue-set correlation scan with chaining on
    /// and off over the same cycle data.
    Pcc {
        #[command(flatten)]
        common: CommonOpts,
        /// Write the chained run's residue sets as a binary trace file.
        #[arg(long)]
        trace_out: Option<std::path::PathBuf>,
        /// Histogram CSV output path.
        #[arg(long)]
        histogram: Option<std::path::PathBuf>,
    },
    /// Parameter-randomization ablation across simulated devices.
    Rctcc {
        #[command(flatten)]
        common: CommonOpts,
        /// Device seeds, comma separated.
        #[arg(long, default_value = "1,2,3,4,5", value_delimiter = ',')]
        boards: Vec<u64>,
        /// Box-plot CSV output path.
        #[arg(long)]
        csv: Option<std::path::PathBuf>,
    },
    /// Environment sweep: output divergence vs the identity environment.
    Envsweep {
        #[command(flatten)]
        common: CommonOpts,
        /// Additive offsets to sweep, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "-50,-20,-10,10,20,50")]
        offsets: Vec<f64>,
        /// Supply scales to sweep, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.95,1.05")]
        scales: Vec<f64>,
    },
    /// Emit distilled nonce bits from repeated boot-straps as hex.
    ExportNonce {
        #[command(flatten)]
        common: CommonOpts,
        /// Number of nonce bits.
        #[arg(long, default_value_t = 100_000)]
        nonce_bits: usize,
    },
    /// Time one full cycle and report throughput.
    Bench {
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("sirf-trng: {e}");
            exit_code(&e)
        }
    };
    std::process::exit(code);
}

fn exit_code(e: &CliError) -> i32 {
    match e {
        CliError::Config(_) => 2,
        CliError::Core(CoreError::DegenerateRange { .. }) => 3,
        CliError::Core(CoreError::InvalidConfig(_)) => 2,
        CliError::Core(CoreError::InvalidGeometry(_)) => 2,
        CliError::Core(_) => 4,
        CliError::Io(_) => 4,
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(CoreError),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Io(io) => CliError::Io(io),
            other => CliError::Core(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { common, out } => commands::run(&common, &out),
        Command::Analyze {
            common,
            input,
            max_bits,
            iid_bits,
        } => commands::analyze(&common, &input, max_bits, iid_bits),
        Command::Pcc {
            common,
            trace_out,
            histogram,
        } => commands::pcc(&common, trace_out.as_deref(), histogram.as_deref()),
        Command::Rctcc {
            common,
            boards,
            csv,
        } => commands::rctcc(&common, &boards, csv.as_deref()),
        Command::Envsweep {
            common,
            offsets,
            scales,
        } => commands::envsweep(&common, &offsets, &scales),
        Command::ExportNonce { common, nonce_bits } => commands::export_nonce(&common, nonce_bits),
        Command::Bench { common } => commands::bench(&common),
    }
}
