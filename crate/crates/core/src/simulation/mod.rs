//! Slot engine and Monte Carlo sweeps.
//!
//! Channels are redrawn every slot. Trials are independent and each owns a
//! ChaCha8 substream keyed by `(master_seed, policy, snr index, trial)`, so
//! results do not depend on how trials are scheduled.

mod config;
mod episode;
mod sweep;

pub use config::{RelayWeights, ScenarioConfig, MAX_SNR_POINTS, MAX_TRIALS};
pub use episode::{
    run_episode, run_episode_traced, run_episode_with, run_slot, EpisodeState, EpisodeSummary,
    SlotOutcome, MAX_REDRAWS,
};
pub use sweep::{
    mean_and_std_err, sweep, sweep_with, trial_rates, trial_rng, Execution, ResultRow, ResultTable,
};
