//! Link gains and small-scale fading draws.
//!
//! Every link carries a scalar amplitude gain `alpha * beta` (distance path
//! loss times log-normal shadowing) and a matrix of i.i.d. CN(0, 1) Rayleigh
//! coefficients. Noise vectors for every receiver are drawn together with the
//! channels so one slot is a single immutable value.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm_sq, CMatrix, CVector};
use crate::simulation::ScenarioConfig;
use num_complex::Complex64;

/// Transmit energy per channel use. SNR is `SYMBOL_ENERGY / noise_variance`.
pub const SYMBOL_ENERGY: f64 = 1.0;

/// Large-scale description of one link class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkGeometry {
    /// Normalized distance.
    pub distance: f64,
    /// Known path loss `L` at the reference distance (linear power gain).
    pub reference_loss: f64,
    pub path_loss_exponent: f64,
    /// Log-normal shadowing spread in dB.
    pub shadowing_db: f64,
}

impl LinkGeometry {
    pub fn new(distance: f64) -> Self {
        Self {
            distance,
            reference_loss: 1.0,
            path_loss_exponent: 3.0,
            shadowing_db: 3.0,
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if !(self.distance > 0.0 && self.distance.is_finite()) {
            return Err(Error::Validation(format!("{name}: distance must be > 0")));
        }
        if !(self.reference_loss > 0.0 && self.reference_loss.is_finite()) {
            return Err(Error::Validation(format!(
                "{name}: reference_loss must be > 0"
            )));
        }
        if !(self.path_loss_exponent > 0.0 && self.path_loss_exponent.is_finite()) {
            return Err(Error::Validation(format!(
                "{name}: path_loss_exponent must be > 0"
            )));
        }
        if !(self.shadowing_db >= 0.0 && self.shadowing_db.is_finite()) {
            return Err(Error::Validation(format!(
                "{name}: shadowing_db must be >= 0"
            )));
        }
        if !(2.0..=5.0).contains(&self.path_loss_exponent) {
            log::warn!(
                "{name}: path loss exponent {} outside the usual [2, 5] range",
                self.path_loss_exponent
            );
        }
        if self.shadowing_db > 9.0 {
            log::warn!(
                "{name}: shadowing spread {} dB outside the usual [0, 9] dB range",
                self.shadowing_db
            );
        }
        Ok(())
    }
}

/// Per-class link geometry. Relay-side links are shared by all relays of the
/// cluster; user and eavesdropper links are per node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub source_relay: LinkGeometry,
    pub relay_user: LinkGeometry,
    pub source_eve: LinkGeometry,
    pub relay_eve: LinkGeometry,
    pub source_user: LinkGeometry,
}

impl Default for Geometry {
    /// Source at the origin, relay cluster at (0.5, 0), users at (1, 0) and
    /// eavesdroppers at (0, 1).
    fn default() -> Self {
        Self {
            source_relay: LinkGeometry::new(0.5),
            relay_user: LinkGeometry::new(0.5),
            source_eve: LinkGeometry::new(1.0),
            relay_eve: LinkGeometry::new(1.25f64.sqrt()),
            source_user: LinkGeometry::new(1.0),
        }
    }
}

impl Geometry {
    pub fn validate(&self) -> Result<()> {
        self.source_relay.validate("source_relay")?;
        self.relay_user.validate("relay_user")?;
        self.source_eve.validate("source_eve")?;
        self.relay_eve.validate("relay_eve")?;
        self.source_user.validate("source_user")
    }
}

/// Amplitude path-loss gain `sqrt(L) / sqrt(d^rho)`.
pub fn path_loss_gain(geom: &LinkGeometry) -> f64 {
    geom.reference_loss.sqrt() / geom.distance.powf(geom.path_loss_exponent).sqrt()
}

/// Shadowing gain for a given standard normal draw `g`: `10^(sigma_s * g / 10)`.
pub fn shadowing_from_draw(shadowing_db: f64, g: f64) -> f64 {
    10f64.powf(shadowing_db * g / 10.0)
}

/// Draws one log-normal shadowing gain.
pub fn shadowing_gain<R: Rng + ?Sized>(shadowing_db: f64, rng: &mut R) -> Result<f64> {
    if shadowing_db.is_nan() || shadowing_db < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "shadowing spread must be >= 0 dB, got {shadowing_db}"
        )));
    }
    let g: f64 = rng.sample(StandardNormal);
    Ok(shadowing_from_draw(shadowing_db, g))
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. CN(0, 1) entries, filled column by column.
pub fn complex_gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Vector of i.i.d. CN(0, variance) entries.
pub fn complex_gaussian_vector<R: Rng + ?Sized>(len: usize, variance: f64, rng: &mut R) -> CVector {
    let scale = variance.sqrt();
    CVector::from_fn(len, |_, _| complex_gaussian(rng) * scale)
}

/// One link in one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkRealization {
    pub alpha: f64,
    pub beta: f64,
    /// Small-scale fading, receive antennas x transmit antennas.
    pub h: CMatrix,
}

impl LinkRealization {
    pub fn draw<R: Rng + ?Sized>(
        geom: &LinkGeometry,
        rows: usize,
        cols: usize,
        rng: &mut R,
    ) -> Self {
        let alpha = path_loss_gain(geom);
        let beta = shadowing_from_draw(geom.shadowing_db, rng.sample(StandardNormal));
        let h = complex_gaussian_matrix(rows, cols, rng);
        Self { alpha, beta, h }
    }

    /// Amplitude gain `alpha * beta`.
    pub fn gain(&self) -> f64 {
        self.alpha * self.beta
    }

    /// `alpha * beta * H`.
    pub fn composite(&self) -> CMatrix {
        &self.h * Complex64::from(self.gain())
    }
}

/// Noise realizations of one slot, drawn with variance `noise_variance`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRealization {
    /// Phase I noise at each relay (`N_m` entries).
    pub relay: Vec<CVector>,
    /// Phase II noise at the receiver of each relay's forwarding link (`N_r`).
    pub forward: Vec<CVector>,
    /// Eavesdropper noise while the source transmits (`N_e`).
    pub eve_source: Vec<CVector>,
    /// Eavesdropper noise while the relays transmit (`N_e`).
    pub eve_relay: Vec<CVector>,
    /// User noise under direct transmission (`N_r`).
    pub user_direct: Vec<CVector>,
}

/// All channels and noise of a single slot.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    /// Source to relay `m`, `N_m x N_t` each.
    pub sr: Vec<LinkRealization>,
    /// Relay cluster to user `r`, `N_r x (M N_m)` with column blocks in relay order.
    pub rd: Vec<LinkRealization>,
    /// Source to eavesdropper `e`, `N_e x N_t`.
    pub se: Vec<LinkRealization>,
    /// Relay cluster to eavesdropper `e`, `N_e x (M N_m)`.
    pub re: Vec<LinkRealization>,
    /// Source to user `r` without relays, `N_r x N_t`.
    pub sd: Vec<LinkRealization>,
    pub noise_variance: f64,
    pub noise: NoiseRealization,
}

impl NetworkRealization {
    /// Realized noise energy of `v` relative to its expectation. Equals 1 on
    /// average; exactly 1 when the slot is noise free.
    pub fn noise_ratio(&self, v: &CVector) -> f64 {
        if self.noise_variance == 0.0 || v.is_empty() {
            return 1.0;
        }
        norm_sq(v) / (v.len() as f64 * self.noise_variance)
    }

    pub fn snr(&self) -> f64 {
        SYMBOL_ENERGY / self.noise_variance
    }
}

/// `sigma_n^2 = E_s / 10^(snr/10)`; `+inf` dB maps to a noise-free slot.
pub fn noise_variance_for_snr(snr_db: f64) -> f64 {
    SYMBOL_ENERGY * 10f64.powf(-snr_db / 10.0)
}

/// Draws every channel and noise vector of one slot.
pub fn draw_network<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    snr_db: f64,
    rng: &mut R,
) -> Result<NetworkRealization> {
    let dims = [
        config.tx_antennas,
        config.relay_antennas,
        config.user_antennas,
        config.eve_antennas,
        config.relays,
        config.users,
        config.eavesdroppers,
    ];
    if dims.contains(&0) {
        return Err(Error::InvalidParameter(
            "every antenna and node count must be >= 1".into(),
        ));
    }
    let noise_variance = noise_variance_for_snr(snr_db);
    if noise_variance.is_nan() {
        return Err(Error::InvalidParameter(format!("snr {snr_db} dB")));
    }
    let g = &config.geometry;
    let relay_cols = config.relays * config.relay_antennas;

    let sr = (0..config.relays)
        .map(|_| {
            LinkRealization::draw(
                &g.source_relay,
                config.relay_antennas,
                config.tx_antennas,
                rng,
            )
        })
        .collect();
    let rd = (0..config.users)
        .map(|_| LinkRealization::draw(&g.relay_user, config.user_antennas, relay_cols, rng))
        .collect();
    let se = (0..config.eavesdroppers)
        .map(|_| LinkRealization::draw(&g.source_eve, config.eve_antennas, config.tx_antennas, rng))
        .collect();
    let re = (0..config.eavesdroppers)
        .map(|_| LinkRealization::draw(&g.relay_eve, config.eve_antennas, relay_cols, rng))
        .collect();
    let sd = (0..config.users)
        .map(|_| {
            LinkRealization::draw(
                &g.source_user,
                config.user_antennas,
                config.tx_antennas,
                rng,
            )
        })
        .collect();

    let mut vectors = |count: usize, len: usize| -> Vec<CVector> {
        (0..count)
            .map(|_| complex_gaussian_vector(len, noise_variance, rng))
            .collect()
    };
    let noise = NoiseRealization {
        relay: vectors(config.relays, config.relay_antennas),
        forward: vectors(config.relays, config.user_antennas),
        eve_source: vectors(config.eavesdroppers, config.eve_antennas),
        eve_relay: vectors(config.eavesdroppers, config.eve_antennas),
        user_direct: vectors(config.users, config.user_antennas),
    };

    Ok(NetworkRealization {
        sr,
        rd,
        se,
        re,
        sd,
        noise_variance,
        noise,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulation::ScenarioConfig;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn path_loss_examples() {
        let mut g = LinkGeometry::new(1.0);
        assert_eq!(path_loss_gain(&g), 1.0);
        g.reference_loss = 4.0;
        g.path_loss_exponent = 2.0;
        assert_eq!(path_loss_gain(&g), 2.0);
        g.reference_loss = 1.0;
        g.distance = 4.0;
        assert_eq!(path_loss_gain(&g), 0.25);
    }

    #[test]
    fn shadowing_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(shadowing_gain(0.0, &mut rng).unwrap(), 1.0);
        assert!((shadowing_from_draw(10.0, 1.0) - 10.0).abs() < 1e-12);
        assert!(matches!(
            shadowing_gain(-1.0, &mut rng),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn shadowing_log_mean_is_zero_db() {
        let sigma = 6.0;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let mean_db: f64 = (0..n)
            .map(|_| 10.0 * shadowing_gain(sigma, &mut rng).unwrap().log10())
            .sum::<f64>()
            / n as f64;
        assert!(mean_db.abs() <= 0.02 * sigma, "mean {mean_db} dB");
    }

    #[test]
    fn fig2_and_fig3_dimensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fig2 = ScenarioConfig::fig2();
        let net = draw_network(&fig2, 10.0, &mut rng).unwrap();
        assert_eq!(net.sr.len(), 3);
        for l in &net.sr {
            assert_eq!(l.h.shape(), (1, 3));
        }
        assert_eq!(net.rd[0].h.shape(), (1, 3));
        assert_eq!(net.re[0].h.shape(), (1, 3));

        let fig3 = ScenarioConfig::fig3();
        let net = draw_network(&fig3, 10.0, &mut rng).unwrap();
        for l in &net.rd {
            assert_eq!(l.h.shape(), (2, 6));
        }
        assert_eq!(net.se[0].h.shape(), (2, 6));
        assert_eq!(net.noise.relay[0].len(), 2);
    }

    #[test]
    fn same_seed_same_network() {
        let cfg = ScenarioConfig::fig3();
        let a = draw_network(&cfg, 5.0, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        let b = draw_network(&cfg, 5.0, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_dimension_rejected() {
        let mut cfg = ScenarioConfig::fig2();
        cfg.eve_antennas = 0;
        let err = draw_network(&cfg, 0.0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn fading_second_moment_is_unity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 200_000;
        let m: f64 = (0..n)
            .map(|_| complex_gaussian(&mut rng).norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((m - 1.0).abs() < 0.01, "second moment {m}");
    }

    #[test]
    fn infinite_snr_is_noise_free() {
        let cfg = ScenarioConfig::fig2();
        let net = draw_network(&cfg, f64::INFINITY, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(net.noise_variance, 0.0);
        assert!(net.noise.relay.iter().all(|v| norm_sq(v) == 0.0));
    }

    proptest! {
        #[test]
        fn path_loss_decreases_with_distance(
            d in 0.01f64..10.0,
            extra in 0.001f64..10.0,
            loss in 0.01f64..100.0,
            rho in 2.0f64..5.0,
        ) {
            let near = LinkGeometry { distance: d, reference_loss: loss, path_loss_exponent: rho, shadowing_db: 0.0 };
            let far = LinkGeometry { distance: d + extra, ..near };
            prop_assert!(path_loss_gain(&far) < path_loss_gain(&near));
        }
    }
}
