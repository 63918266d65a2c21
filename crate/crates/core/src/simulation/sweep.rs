use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::selection::Policy;

use super::{run_episode, ScenarioConfig};

/// How trials of a sweep are scheduled. Results do not depend on the choice.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    /// Trials spread over the current rayon pool.
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

/// Aggregated episodes of one (policy, SNR) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub policy: Policy,
    pub snr_db: f64,
    pub mean_secrecy_rate: f64,
    pub std_err: f64,
    pub trials: usize,
    pub episode_slots: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn row(&self, policy: Policy, snr_db: f64) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.policy == policy && r.snr_db == snr_db)
    }

    /// Rows ordered by policy name, then SNR.
    pub fn sorted(&self) -> Vec<&ResultRow> {
        let mut rows: Vec<&ResultRow> = self.rows.iter().collect();
        rows.sort_by(|a, b| {
            a.policy
                .name()
                .cmp(b.policy.name())
                .then(a.snr_db.total_cmp(&b.snr_db))
        });
        rows
    }
}

/// Random stream owned by one trial.
pub fn trial_rng(master_seed: u64, policy: Policy, snr_index: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((policy.id() as u64) << 56) | ((snr_index as u64) << 40) | trial as u64);
    rng
}

/// Sample mean and standard error of the mean.
pub fn mean_and_std_err(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Per-trial episode means for one (policy, SNR) pair, in trial order.
pub fn trial_rates(
    config: &ScenarioConfig,
    policy: Policy,
    snr_index: usize,
    execution: Execution,
) -> Result<Vec<f64>> {
    let snr_db = config.snr_db_grid[snr_index];
    let one = |t: usize| -> Result<f64> {
        let mut rng = trial_rng(config.master_seed, policy, snr_index, t);
        Ok(run_episode(config, policy, snr_db, &mut rng)?.mean_secrecy_rate)
    };
    match execution {
        Execution::Sequential => (0..config.trials).map(one).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..config.trials).into_par_iter().map(one).collect(),
    }
}

pub fn sweep(config: &ScenarioConfig, policies: &[Policy]) -> Result<ResultTable> {
    sweep_with(config, policies, Execution::default())
}

/// Runs `trials` episodes for every policy and grid point. Repeated policies
/// are evaluated once.
pub fn sweep_with(
    config: &ScenarioConfig,
    policies: &[Policy],
    execution: Execution,
) -> Result<ResultTable> {
    config.validate()?;
    let mut unique: Vec<Policy> = Vec::new();
    for &p in policies {
        if !unique.contains(&p) {
            unique.push(p);
        }
    }
    log::info!(
        "sweep: {} policies x {} snr points x {} trials ({execution:?})",
        unique.len(),
        config.snr_db_grid.len(),
        config.trials
    );
    let mut rows = Vec::with_capacity(unique.len() * config.snr_db_grid.len());
    for &policy in &unique {
        for (snr_index, &snr_db) in config.snr_db_grid.iter().enumerate() {
            let rates = trial_rates(config, policy, snr_index, execution)?;
            let (mean, std_err) = mean_and_std_err(&rates);
            log::debug!("{policy} @ {snr_db} dB: {mean:.4} +/- {std_err:.4}");
            rows.push(ResultRow {
                policy,
                snr_db,
                mean_secrecy_rate: mean,
                std_err,
                trials: config.trials,
                episode_slots: config.episode_slots,
            });
        }
    }
    Ok(ResultTable { rows })
}
