use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use relay_secrecy::cli::{
    emit_results, load_scenario, parse_policies, parse_snr_grid, RunManifest,
};
use relay_secrecy::{sweep_with, Execution, Policy, Result};

/// Secrecy-rate sweeps for buffer-aided relay selection.
#[derive(Debug, Parser)]
#[command(name = "relay-secrecy", version)]
struct Args {
    /// Preset name (fig2, fig3) or path to a JSON scenario.
    #[arg(long, default_value = "fig2")]
    scenario: String,
    /// Comma-separated policies: direct, max-ratio, max-link, ml-rs, ml-srs.
    #[arg(long, default_value = "direct,max-ratio,max-link,ml-rs,ml-srs")]
    policies: String,
    /// SNR grid as min:max:step in dB.
    #[arg(long)]
    snr: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Measured slots per episode.
    #[arg(long)]
    slots: Option<usize>,
    /// Discarded slots before measurement.
    #[arg(long)]
    warmup: Option<usize>,
    /// Largest relay set for ml-srs.
    #[arg(long)]
    max_set_size: Option<usize>,
    /// Relay count, overriding the scenario.
    #[arg(long)]
    relays: Option<usize>,
    /// Output directory for results.csv and manifest.json.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Run trials on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

fn run(args: Args) -> Result<()> {
    let mut scenario = load_scenario(&args.scenario)?;
    if let Some(snr) = &args.snr {
        scenario.snr_db_grid = parse_snr_grid(snr)?;
    }
    if let Some(v) = args.trials {
        scenario.trials = v;
    }
    if let Some(v) = args.seed {
        scenario.master_seed = v;
    }
    if let Some(v) = args.slots {
        scenario.episode_slots = v;
    }
    if let Some(v) = args.warmup {
        scenario.warmup_slots = v;
    }
    if let Some(v) = args.relays {
        scenario.relays = v;
    }
    if let Some(v) = args.max_set_size {
        scenario.max_set_size = Some(v);
    }
    scenario.max_set_size = Some(scenario.effective_max_set_size());
    scenario.validate()?;
    let policies: Vec<Policy> = parse_policies(&args.policies)?;

    let manifest = RunManifest::new(scenario, policies, &args.out)?;
    let execution = if args.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let table = sweep_with(&manifest.scenario, &manifest.policies, execution)?;
    let files = emit_results(&table, &manifest, &args.out)?;
    log::info!(
        "wrote {} and {}",
        files.csv.display(),
        files.manifest.display()
    );
    println!("{}", files.csv.display());
    Ok(())
}

fn fail(kind: &str, message: String) -> ExitCode {
    eprintln!(
        "{}",
        serde_json::json!({ "error": kind, "message": message })
    );
    ExitCode::from(2)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.render().to_string()),
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), e.to_string()),
    }
}
