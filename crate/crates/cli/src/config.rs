// SPDX-License-Identifier: Apache-2.0

//! Flat `key = value` configuration files, overridden by CLI flags. Every
//! key mirrors a run-configuration field, so experiment matrices diff
//! cleanly.

use crate::{CliError, CommonOpts};
use sirf_trng::pipeline::RunConfig;
use std::path::Path;

pub fn parse_file(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut cfg = RunConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "{}:{}: expected key = value",
                path.display(),
                lineno + 1
            )));
        };
        apply(&mut cfg, key.trim(), value.trim())
            .map_err(|m| CliError::Config(format!("{}:{}: {m}", path.display(), lineno + 1)))?;
    }
    Ok(cfg)
}

fn apply(cfg: &mut RunConfig, key: &str, value: &str) -> Result<(), String> {
    fn num<T: std::str::FromStr>(v: &str) -> Result<T, String> {
        v.parse().map_err(|_| format!("bad value '{v}'"))
    }
    fn parse_mask(v: &str) -> Result<u64, String> {
        let parsed = match v.strip_prefix("0x") {
            Some(hex) => u64::from_str_radix(hex, 16),
            None => v.parse(),
        };
        parsed.map_err(|_| format!("bad mask '{v}'"))
    }
    match key {
        "device_seed" => cfg.device_seed = num(value)?,
        "noise_seed" => cfg.noise_seed = num(value)?,
        "noise_sigma" => cfg.noise_sigma = num(value)?,
        "temp_offset" => cfg.temp_offset = num(value)?,
        "supply_scale" => cfg.supply_scale = num(value)?,
        "rows" => cfg.geometry.rows = num(value)?,
        "cols" => cfg.geometry.cols = num(value)?,
        "segments_per_stage" => cfg.geometry.segments_per_stage = num(value)?,
        "chaining_enabled" => cfg.chaining_enabled = num(value)?,
        "rc" => set_param(value, &mut cfg.rc_randomized, &mut cfg.fixed_rc)?,
        "tcc" => set_param(value, &mut cfg.tcc_randomized, &mut cfg.fixed_tcc)?,
        "literal_gpev_bounds" => cfg.literal_gpev_bounds = num(value)?,
        "lfsr64_taps" => cfg.lfsr64_taps = parse_mask(value)?,
        "selector_taps" => cfg.selector.taps = parse_mask(value)? as u16,
        "selector_debruijn" => cfg.selector.de_bruijn = num(value)?,
        "bit_budget" => cfg.bit_budget = num(value)?,
        "permutations" => cfg.permutations = num(value)?,
        "pcc_pairs" => cfg.pcc_pairs = num(value)?,
        "pcc_seed" => cfg.pcc_seed = num(value)?,
        other => return Err(format!("unknown key '{other}'")),
    }
    Ok(())
}

pub fn set_param(value: &str, randomized: &mut bool, fixed: &mut u32) -> Result<(), String> {
    if value.eq_ignore_ascii_case("rand") {
        *randomized = true;
    } else {
        *randomized = false;
        *fixed = value.parse().map_err(|_| format!("bad value '{value}'"))?;
    }
    Ok(())
}

/// Resolves the effective configuration: defaults, then config file, then
/// command-line flags.
pub fn resolve(opts: &CommonOpts) -> Result<RunConfig, CliError> {
    let mut cfg = match &opts.config {
        Some(path) => parse_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = opts.device_seed {
        cfg.device_seed = v;
    }
    if let Some(v) = opts.noise_seed {
        cfg.noise_seed = v;
    }
    if let Some(v) = opts.sigma {
        cfg.noise_sigma = v;
    }
    if let Some(v) = opts.temp_offset {
        cfg.temp_offset = v;
    }
    if let Some(v) = opts.supply_scale {
        cfg.supply_scale = v;
    }
    if opts.no_chaining {
        cfg.chaining_enabled = false;
    }
    if let Some(v) = &opts.rc {
        set_param(v, &mut cfg.rc_randomized, &mut cfg.fixed_rc).map_err(CliError::Config)?;
    }
    if let Some(v) = &opts.tcc {
        set_param(v, &mut cfg.tcc_randomized, &mut cfg.fixed_tcc).map_err(CliError::Config)?;
    }
    if let Some(v) = opts.bits {
        cfg.bit_budget = v;
    }
    if let Some(v) = opts.perms {
        cfg.permutations = v;
    }
    if let Some(v) = opts.pcc_pairs {
        cfg.pcc_pairs = v;
    }
    cfg.validate().map_err(CliError::from)?;
    Ok(cfg)
}
