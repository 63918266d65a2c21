use serde::{Deserialize, Serialize};

use crate::channel::Geometry;
use crate::error::{Error, Result};

/// Per-relay forwarding weights. Only the identity is supported.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelayWeights {
    #[default]
    Identity,
}

/// Largest SNR grid a sweep accepts; grid indices feed the substream id.
pub const MAX_SNR_POINTS: usize = 1 << 16;
/// Largest trial count per (policy, SNR) pair.
pub const MAX_TRIALS: usize = 1 << 40;

/// Every dimensional and physical parameter of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Source antennas `N_t`.
    pub tx_antennas: usize,
    /// Antennas per relay `N_m`.
    pub relay_antennas: usize,
    /// Antennas per user `N_r`.
    pub user_antennas: usize,
    /// Antennas per eavesdropper `N_e`.
    pub eve_antennas: usize,
    /// Relay count `M`.
    pub relays: usize,
    /// User count `N_D`.
    pub users: usize,
    /// Eavesdropper count `N_E`.
    pub eavesdroppers: usize,
    /// Buffer size `T` in symbols.
    pub buffer_capacity: usize,
    #[serde(default)]
    pub geometry: Geometry,
    #[serde(default = "default_snr_grid")]
    pub snr_db_grid: Vec<f64>,
    #[serde(default = "default_episode_slots")]
    pub episode_slots: usize,
    #[serde(default = "default_warmup_slots")]
    pub warmup_slots: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub relay_weights: RelayWeights,
    /// Largest relay set considered by ML-SRS; `None` means all relays.
    #[serde(default)]
    pub max_set_size: Option<usize>,
}

fn default_snr_grid() -> Vec<f64> {
    vec![0.0, 5.0, 10.0, 15.0, 20.0]
}

fn default_episode_slots() -> usize {
    200
}

fn default_warmup_slots() -> usize {
    50
}

fn default_trials() -> usize {
    100
}

impl ScenarioConfig {
    fn preset(tx: usize, per_node: usize, buffer_capacity: usize) -> Self {
        Self {
            tx_antennas: tx,
            relay_antennas: per_node,
            user_antennas: per_node,
            eve_antennas: per_node,
            relays: 3,
            users: 3,
            eavesdroppers: 3,
            buffer_capacity,
            geometry: Geometry::default(),
            snr_db_grid: default_snr_grid(),
            episode_slots: default_episode_slots(),
            warmup_slots: default_warmup_slots(),
            trials: default_trials(),
            master_seed: 0,
            relay_weights: RelayWeights::Identity,
            max_set_size: None,
        }
    }

    /// Single-antenna relays and users, three of each node class, `T = 3`.
    pub fn fig2() -> Self {
        Self::preset(3, 1, 3)
    }

    /// Two antennas per relay, user and eavesdropper, `N_t = 6`, `T = 6`.
    pub fn fig3() -> Self {
        Self::preset(6, 2, 6)
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "fig2" => Some(Self::fig2()),
            "fig3" => Some(Self::fig3()),
            _ => None,
        }
    }

    pub fn effective_max_set_size(&self) -> usize {
        self.max_set_size.unwrap_or(self.relays)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Validation(msg));
        let counts = [
            ("tx_antennas", self.tx_antennas),
            ("relay_antennas", self.relay_antennas),
            ("user_antennas", self.user_antennas),
            ("eve_antennas", self.eve_antennas),
            ("relays", self.relays),
            ("users", self.users),
            ("eavesdroppers", self.eavesdroppers),
        ];
        for (name, v) in counts {
            if v == 0 {
                return fail(format!("{name} must be >= 1"));
            }
        }
        if self.buffer_capacity < self.relay_antennas {
            return fail(format!(
                "T >= N_m violated: buffer_capacity {} < relay_antennas {}",
                self.buffer_capacity, self.relay_antennas
            ));
        }
        if self.tx_antennas < self.relay_antennas {
            return fail(format!(
                "N_t >= N_m violated: tx_antennas {} < relay_antennas {}",
                self.tx_antennas, self.relay_antennas
            ));
        }
        if self.user_antennas != self.relay_antennas {
            return fail(format!(
                "N_r = N_m required for forwarding: user_antennas {} != relay_antennas {}",
                self.user_antennas, self.relay_antennas
            ));
        }
        if self.users * self.user_antennas > self.tx_antennas {
            return fail(format!(
                "N_D * N_r <= N_t required for direct zero forcing: {} * {} > {}",
                self.users, self.user_antennas, self.tx_antennas
            ));
        }
        if self.episode_slots == 0 {
            return fail("episode_slots must be >= 1".into());
        }
        if self.trials == 0 || self.trials >= MAX_TRIALS {
            return fail(format!("trials must be in [1, {MAX_TRIALS})"));
        }
        if self.snr_db_grid.is_empty() || self.snr_db_grid.len() >= MAX_SNR_POINTS {
            return fail(format!(
                "snr_db_grid must hold between 1 and {} points",
                MAX_SNR_POINTS - 1
            ));
        }
        if let Some(bad) = self.snr_db_grid.iter().find(|s| !s.is_finite()) {
            return fail(format!("snr_db_grid entries must be finite, got {bad}"));
        }
        if self.max_set_size == Some(0) {
            return fail("max_set_size must be >= 1".into());
        }
        self.geometry.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let f2 = ScenarioConfig::fig2();
        assert_eq!(
            (
                f2.tx_antennas,
                f2.relay_antennas,
                f2.user_antennas,
                f2.eve_antennas
            ),
            (3, 1, 1, 1)
        );
        assert_eq!(
            (f2.relays, f2.users, f2.eavesdroppers, f2.buffer_capacity),
            (3, 3, 3, 3)
        );
        let f3 = ScenarioConfig::fig3();
        assert_eq!(
            (
                f3.tx_antennas,
                f3.relay_antennas,
                f3.user_antennas,
                f3.eve_antennas
            ),
            (6, 2, 2, 2)
        );
        assert_eq!(
            (f3.relays, f3.users, f3.eavesdroppers, f3.buffer_capacity),
            (3, 3, 3, 6)
        );
        f2.validate().unwrap();
        f3.validate().unwrap();
    }

    #[test]
    fn rejects_zero_buffer() {
        let mut c = ScenarioConfig::fig2();
        c.buffer_capacity = 0;
        let err = c.validate().unwrap_err().to_string();
        assert!(err.contains("T >= N_m"), "{err}");
    }

    #[test]
    fn rejects_empty_episode() {
        let mut c = ScenarioConfig::fig2();
        c.episode_slots = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut c = ScenarioConfig::fig3();
        c.max_set_size = Some(2);
        c.snr_db_grid = vec![-3.5, 0.1, 12.25];
        let text = serde_json::to_string(&c).unwrap();
        let back: ScenarioConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }
}
