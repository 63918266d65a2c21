//! Scenario loading, run manifests and CSV output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::selection::Policy;
use crate::simulation::{ResultTable, ScenarioConfig};

pub const CSV_HEADER: &str = "policy,snr_db,mean_secrecy_rate_bps_hz,std_err,trials,episode_slots";
pub const CSV_FILE: &str = "results.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

pub fn preset(name: &str) -> Option<ScenarioConfig> {
    ScenarioConfig::by_name(name)
}

/// Parses and validates a JSON scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    let config: ScenarioConfig =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

/// A preset name (`fig2`, `fig3`) or a path to a JSON scenario.
pub fn load_scenario(arg: &str) -> Result<ScenarioConfig> {
    if let Some(config) = preset(arg) {
        return Ok(config);
    }
    let text = fs::read_to_string(arg)?;
    parse_scenario(&text)
}

/// `min:max:step` in dB, or a single value.
pub fn parse_snr_grid(range: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidParameter(format!("snr range `{range}` is not min:max:step"));
    let parts: Vec<f64> = range
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    if parts.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    match parts[..] {
        [single] => Ok(vec![single]),
        [min, max, step] if step > 0.0 && max >= min => {
            let count = ((max - min) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|k| min + k as f64 * step).collect())
        }
        _ => Err(bad()),
    }
}

pub fn parse_policies(list: &str) -> Result<Vec<Policy>> {
    let policies: Vec<Policy> = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    if policies.is_empty() {
        return Err(Error::InvalidParameter("empty policy list".into()));
    }
    Ok(policies)
}

/// Fully resolved description of a run, written next to its results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub timestamp_unix: u64,
    pub scenario: ScenarioConfig,
    pub policies: Vec<Policy>,
    pub output: PathBuf,
    pub version: String,
}

impl RunManifest {
    pub fn new(scenario: ScenarioConfig, policies: Vec<Policy>, output_dir: &Path) -> Result<Self> {
        let run_id = run_id(&scenario, &policies)?;
        let timestamp_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        Ok(Self {
            run_id,
            timestamp_unix,
            scenario,
            policies,
            output: output_dir.join(CSV_FILE),
            version: env!("CARGO_PKG_VERSION").to_string(),
        })
    }
}

/// Short content hash of the resolved scenario and policy list.
pub fn run_id(scenario: &ScenarioConfig, policies: &[Policy]) -> Result<String> {
    let bytes = serde_json::to_vec(&(scenario, policies))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().take(6).fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    }))
}

/// Six significant digits, trailing zeros removed.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: &str| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..6).contains(&exp) {
        format!("{}e{exp}", trim(mantissa))
    } else {
        trim(&format!("{:.*}", (5 - exp).max(0) as usize, x))
    }
}

pub fn format_csv(table: &ResultTable) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in table.sorted() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            row.policy,
            format_sig6(row.snr_db),
            format_sig6(row.mean_secrecy_rate),
            format_sig6(row.std_err),
            row.trials,
            row.episode_slots
        );
    }
    out
}

/// Paths written by [`emit_results`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmittedFiles {
    pub csv: PathBuf,
    pub manifest: PathBuf,
}

/// Writes the CSV and the manifest into `dir`, creating it if needed.
pub fn emit_results(
    table: &ResultTable,
    manifest: &RunManifest,
    dir: &Path,
) -> Result<EmittedFiles> {
    if table.rows.is_empty() {
        return Err(Error::InvalidParameter(
            "refusing to write an empty result table".into(),
        ));
    }
    fs::create_dir_all(dir)?;
    let csv = dir.join(CSV_FILE);
    let manifest_path = dir.join(MANIFEST_FILE);
    fs::write(&csv, format_csv(table))?;
    fs::write(
        &manifest_path,
        serde_json::to_string_pretty(manifest)? + "\n",
    )?;
    Ok(EmittedFiles {
        csv,
        manifest: manifest_path,
    })
}
