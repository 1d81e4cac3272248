// SPDX-License-Identifier: Apache-2.0

use crate::{config, CliError, CommonOpts};
use serde::Serialize;
use sirf_trng::bits::BitBuf;
use sirf_trng::pipeline::{
    experiment_env_attack, experiment_pcc, experiment_rc_tcc, export_nonce_bits, run_trng_with,
    RunConfig, RunReport,
};
use sirf_trng::sponge::trace_io::TraceWriter;
use sirf_trng::stats::{ais31_suite, estimate_all, iid_permutation_suite, PccReport};
use std::io::Write;
use std::path::Path;

fn write_report<T: Serialize>(path: Option<&Path>, report: &T) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(report).expect("report serialization");
    match path {
        Some(p) => std::fs::write(p, json)?,
        None => println!("{json}"),
    }
    Ok(())
}

fn write_histogram_csv(path: &Path, lo: f64, hi: f64, counts: &[u64]) -> Result<(), CliError> {
    let mut out = String::from("bin_left,bin_right,count\n");
    let width = (hi - lo) / counts.len() as f64;
    for (i, &c) in counts.iter().enumerate() {
        let left = lo + i as f64 * width;
        out.push_str(&format!("{},{},{}\n", left, left + width, c));
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn run(opts: &CommonOpts, out: &str) -> Result<(), CliError> {
    let cfg = config::resolve(opts)?;
    let report = if out == "-" {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        let report = run_trng_with(&cfg, |chunk| {
            lock.write_all(chunk.as_bytes())?;
            lock.flush()?;
            Ok(())
        })?;
        report
    } else {
        let mut file = std::fs::File::create(out)?;
        run_trng_with(&cfg, |chunk| {
            file.write_all(chunk.as_bytes())?;
            Ok(())
        })?
    };
    if let Some(path) = &opts.report {
        write_report(Some(path), &report)?;
    } else {
        eprintln!(
            "{} bits in {} cycles ({:.2} Mbit/s)",
            report.counters.bits_emitted,
            report.counters.cycles,
            report.timings.throughput_bits_per_sec / 1e6
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct AnalyzeReport {
    input_bits: usize,
    ais31: Vec<sirf_trng::stats::TestVerdict>,
    estimators: sirf_trng::stats::EstimatorSet,
    suite_minimum: f64,
    iid: Option<sirf_trng::stats::IidReport>,
}

pub fn analyze(
    opts: &CommonOpts,
    input: &Path,
    max_bits: Option<usize>,
    iid_bits: Option<usize>,
) -> Result<(), CliError> {
    let cfg = config::resolve(opts)?;
    let bits = BitBuf::read_from_file(input, max_bits)?;
    if bits.is_empty() {
        return Err(CliError::Config(format!(
            "{}: empty input file",
            input.display()
        )));
    }
    let unpacked = bits.to_bit_bytes();
    let iid = iid_bits.map(|n| {
        let n = n.min(unpacked.len());
        iid_permutation_suite(&unpacked[..n], cfg.permutations, cfg.pcc_seed)
    });
    let estimators = estimate_all(&unpacked);
    let report = AnalyzeReport {
        input_bits: bits.len(),
        ais31: ais31_suite(&bits),
        estimators,
        suite_minimum: estimators.minimum(),
        iid,
    };
    write_report(opts.report.as_deref(), &report)
}

#[derive(Serialize)]
struct PccCliReport {
    chained: PccReport,
    unchained: PccReport,
    pairs_requested: usize,
}

pub fn pcc(
    opts: &CommonOpts,
    trace_out: Option<&Path>,
    histogram: Option<&Path>,
) -> Result<(), CliError> {
    let cfg = config::resolve(opts)?;
    if let Some(path) = trace_out {
        let file = std::fs::File::create(path)?;
        let mut writer = TraceWriter::new(std::io::BufWriter::new(file));
        sirf_trng::pipeline::traced_cycle(&cfg, &mut writer)?;
    }
    let rep = experiment_pcc(&cfg)?;
    if let Some(path) = histogram {
        write_histogram_csv(path, -1.0, 1.0, &rep.chained.histogram)?;
    }
    let report = PccCliReport {
        chained: rep.chained,
        unchained: rep.unchained,
        pairs_requested: rep.pairs_requested,
    };
    write_report(opts.report.as_deref(), &report)
}

pub fn rctcc(opts: &CommonOpts, boards: &[u64], csv: Option<&Path>) -> Result<(), CliError> {
    if boards.len() < 2 {
        return Err(CliError::Config("rctcc needs at least two boards".into()));
    }
    let cfg = config::resolve(opts)?;
    let report = experiment_rc_tcc(&cfg, boards)?;
    if let Some(path) = csv {
        let mut out = String::from(
            "device_seed,rc_randomized,tcc_randomized,mcv,collision,markov,compression,suite_minimum\n",
        );
        for c in &report.cells {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                c.device_seed,
                c.rc_randomized as u8,
                c.tcc_randomized as u8,
                c.estimates.mcv,
                c.estimates.collision,
                c.estimates.markov,
                c.estimates.compression,
                c.suite_minimum
            ));
        }
        std::fs::write(path, out)?;
    }
    write_report(opts.report.as_deref(), &report)
}

pub fn envsweep(opts: &CommonOpts, offsets: &[f64], scales: &[f64]) -> Result<(), CliError> {
    let cfg = config::resolve(opts)?;
    let mut sweep = Vec::new();
    for &off in offsets {
        sweep.push(sirf_trng::entropy::EnvCondition {
            temp_offset: off,
            supply_scale: 1.0,
        });
    }
    for &s in scales {
        sweep.push(sirf_trng::entropy::EnvCondition {
            temp_offset: 0.0,
            supply_scale: s,
        });
    }
    let report = experiment_env_attack(&cfg, &sweep)?;
    write_report(opts.report.as_deref(), &report)
}

#[derive(Serialize)]
struct NonceReport {
    bits: usize,
    hex: String,
    monobit_statistic: f64,
    monobit_pass: bool,
    poker_statistic: f64,
    poker_pass: bool,
}

pub fn export_nonce(opts: &CommonOpts, nonce_bits: usize) -> Result<(), CliError> {
    let cfg = config::resolve(opts)?;
    if nonce_bits < 320 {
        return Err(CliError::Config(
            "export-nonce needs at least 320 bits for the embedded tests".into(),
        ));
    }
    let bits = export_nonce_bits(&cfg, nonce_bits)?;
    let unpacked = bits.to_bit_bytes();
    let (mono, mono_pass) = sirf_trng::stats::monobit_passes(&unpacked);
    let (poker, poker_pass) = sirf_trng::stats::poker_passes(&unpacked);
    let hex: String = bits.as_bytes().iter().map(|b| format!("{b:02x}")).collect();
    let report = NonceReport {
        bits: bits.len(),
        hex,
        monobit_statistic: mono,
        monobit_pass: mono_pass,
        poker_statistic: poker,
        poker_pass,
    };
    write_report(opts.report.as_deref(), &report)
}

#[derive(Serialize)]
struct BenchReport {
    report: RunReport,
}

pub fn bench(opts: &CommonOpts) -> Result<(), CliError> {
    let mut cfg: RunConfig = config::resolve(opts)?;
    cfg.bit_budget = sirf_trng::sponge::BITS_PER_RUN as u64;
    let mut sink_len = 0usize;
    let report = run_trng_with(&cfg, |chunk| {
        sink_len += chunk.len();
        Ok(())
    })?;
    write_report(opts.report.as_deref(), &BenchReport { report })
}
