use num_complex::Complex64;
use rand::Rng;

use crate::buffer::{BufferEntry, BufferState};
use crate::channel::{draw_network, NetworkRealization, SYMBOL_ENERGY};
use crate::error::{Error, Result};
use crate::linalg::{gather_column_blocks, vstack, CMatrix, CVector};
use crate::precoding::{signal_covariance, zf_precoder, LinkTarget};
use crate::rates::{destination_rate, eavesdropper_rate, RateSample};
use crate::selection::{
    direct_transmission, max_link_select, max_ratio_select, ml_rs_select, ml_srs_select,
    served_users, Phase, Pilots, Policy, SelectionDecision,
};

use super::ScenarioConfig;

/// Fresh channel draws allowed per slot before a singular channel is fatal.
pub const MAX_REDRAWS: usize = 64;

/// What happened in one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotOutcome {
    /// Relay decision; `None` under direct transmission.
    pub decision: Option<SelectionDecision>,
    /// Present when the slot delivered data to users.
    pub rate: Option<RateSample>,
    /// Occupancy of every relay buffer after the slot.
    pub buffer_occupancies: Vec<usize>,
}

/// Buffers and counters of one running episode.
#[derive(Debug, Clone)]
pub struct EpisodeState<'a> {
    config: &'a ScenarioConfig,
    snr_db: f64,
    buffers: Vec<BufferState>,
    slot: u64,
    pushed_symbols: usize,
    popped_symbols: usize,
}

impl<'a> EpisodeState<'a> {
    pub fn new(config: &'a ScenarioConfig, snr_db: f64) -> Self {
        Self {
            config,
            snr_db,
            buffers: vec![BufferState::new(config.buffer_capacity); config.relays],
            slot: 0,
            pushed_symbols: 0,
            popped_symbols: 0,
        }
    }

    pub fn config(&self) -> &ScenarioConfig {
        self.config
    }

    pub fn buffers(&self) -> &[BufferState] {
        &self.buffers
    }

    pub fn slot(&self) -> u64 {
        self.slot
    }

    pub fn pushed_symbols(&self) -> usize {
        self.pushed_symbols
    }

    pub fn popped_symbols(&self) -> usize {
        self.popped_symbols
    }

    pub fn total_occupancy(&self) -> usize {
        self.buffers.iter().map(BufferState::occupancy).sum()
    }

    fn occupancies(&self) -> Vec<usize> {
        self.buffers.iter().map(BufferState::occupancy).collect()
    }

    fn decide(
        &self,
        policy: Policy,
        net: &NetworkRealization,
        pilots: &Pilots,
    ) -> Result<SelectionDecision> {
        match policy {
            Policy::MaxRatio => max_ratio_select(net, &self.buffers),
            Policy::MaxLink => max_link_select(net, &self.buffers),
            Policy::MlRs => ml_rs_select(net, pilots, &self.buffers),
            Policy::MlSrs => ml_srs_select(
                net,
                pilots,
                &self.buffers,
                self.config.effective_max_set_size(),
            ),
            Policy::Direct => Err(Error::InvalidParameter(
                "direct transmission has no relay decision".into(),
            )),
        }
    }
}

fn scale(m: CMatrix, factor: f64) -> CMatrix {
    m * Complex64::from(factor)
}

/// Phase I: zero-forced source transmission to every relay of `set`.
/// Returns the entries to push, one per relay, without touching buffers.
fn receive_entries<R: Rng + ?Sized>(
    net: &NetworkRealization,
    set: &[usize],
    slot: u64,
    rng: &mut R,
) -> Result<Vec<BufferEntry>> {
    let width = net.sr[set[0]].h.nrows();
    let stacked = vstack(set.iter().map(|&j| &net.sr[j].h));
    let precoder = zf_precoder(&stacked, LinkTarget::SourceToRelays(set.to_vec()))?;
    let streams = stacked.nrows();
    let q = signal_covariance(streams, SYMBOL_ENERGY)?;
    let per_stream = q.matrix[(0, 0)].re;
    let symbols = CVector::from_fn(streams, |_, _| {
        Complex64::from_polar(
            per_stream.sqrt(),
            rng.random_range(0.0..std::f64::consts::TAU),
        )
    });
    let x = &precoder.matrix * &symbols;
    let amplitude = (per_stream * net.snr()).sqrt();

    let eve_ratios: Vec<f64> = net
        .noise
        .eve_source
        .iter()
        .map(|n| net.noise_ratio(n))
        .collect();
    Ok(set
        .iter()
        .enumerate()
        .map(|(k, &j)| {
            let link = &net.sr[j];
            let p = precoder.stream_block(k, width);
            let relay_noise_ratio = net.noise_ratio(&net.noise.relay[j]);
            let eve_exposure = net
                .se
                .iter()
                .zip(&eve_ratios)
                .map(|(e, nu)| scale(&e.h * &p, e.gain() * amplitude / nu.sqrt()))
                .collect();
            BufferEntry {
                y: link.composite() * &x + &net.noise.relay[j],
                h_sr_snapshot: link.clone(),
                slot_index: slot,
                effective_sr: scale(&link.h * &p, link.gain() * amplitude),
                relay_noise_ratio,
                eve_exposure,
            }
        })
        .collect())
}

/// Phase II: the relays of `set` forward their oldest blocks, zero-forced
/// towards the served users. Rates are in noise-normalized units with the
/// transmit powers folded into the effective channels.
fn transmit_rate(
    net: &NetworkRealization,
    set: &[usize],
    blocks: &[&BufferEntry],
) -> Result<RateSample> {
    let width = net.sr[set[0]].h.nrows();
    let users = served_users(net, set);
    let user_channels: Vec<CMatrix> = users
        .iter()
        .map(|&u| gather_column_blocks(&net.rd[u].h, set, width))
        .collect();
    let precoder = zf_precoder(
        &vstack(&user_channels),
        LinkTarget::RelaysToUsers {
            relays: set.to_vec(),
            users: users.clone(),
        },
    )?;
    let eve_channels: Vec<CMatrix> = net
        .re
        .iter()
        .map(|e| gather_column_blocks(&e.h, set, width))
        .collect();
    let eve_ratios: Vec<f64> = net
        .noise
        .eve_relay
        .iter()
        .map(|n| net.noise_ratio(n))
        .collect();
    let unit = signal_covariance(width, width as f64)?;
    let pass = CMatrix::identity(width, width);

    let mut total = RateSample::default();
    for (k, (&u, block)) in users.iter().zip(blocks).enumerate() {
        let p = precoder.stream_block(k, width);
        let nu_r = block.relay_noise_ratio;
        let nu_d = net.noise_ratio(&net.noise.forward[set[k]]);
        let h_sr = scale(block.effective_sr.clone(), 1.0 / nu_r.sqrt());
        let h_rd = scale(
            &user_channels[k] * &p,
            net.rd[u].gain() * (nu_r / nu_d).sqrt(),
        );
        let r_d = destination_rate(&h_rd, &pass, &h_sr, &unit)?;

        let mut r_e: f64 = 0.0;
        for (e, eve) in net.re.iter().enumerate() {
            let h_re = scale(
                &eve_channels[e] * &p,
                eve.gain() * (nu_r / eve_ratios[e]).sqrt(),
            );
            r_e = r_e.max(eavesdropper_rate(
                &h_re,
                &pass,
                &h_sr,
                &block.eve_exposure[e],
                &unit,
            )?);
        }
        total = total.combine(RateSample::new(r_d, r_e));
    }
    Ok(total)
}

enum Attempt {
    Done(SlotOutcome),
    Redraw,
}

fn attempt<R: Rng + ?Sized>(
    state: &mut EpisodeState<'_>,
    policy: Policy,
    rng: &mut R,
) -> Result<Attempt> {
    let config = state.config;
    let net = draw_network(config, state.snr_db, rng)?;
    let outcome = if policy == Policy::Direct {
        let rate = match direct_transmission(&net) {
            Err(Error::SingularChannel { .. }) => return Ok(Attempt::Redraw),
            other => other?,
        };
        SlotOutcome {
            decision: None,
            rate: Some(rate),
            buffer_occupancies: state.occupancies(),
        }
    } else {
        let pilots = Pilots::draw(
            config.tx_antennas,
            config.relay_antennas,
            config.relays,
            rng,
        );
        let decision = state.decide(policy, &net, &pilots)?;
        let set = &decision.relay_set;
        let rate = match decision.phase {
            Phase::Receive => {
                let entries = match receive_entries(&net, set, state.slot, rng) {
                    Err(Error::SingularChannel { .. }) => return Ok(Attempt::Redraw),
                    other => other?,
                };
                for (&j, entry) in set.iter().zip(entries) {
                    state.pushed_symbols += entry.symbols();
                    state.buffers[j].push(entry)?;
                }
                None
            }
            Phase::Transmit => {
                let blocks = set
                    .iter()
                    .map(|&j| {
                        state.buffers[j].front().ok_or(Error::BufferUnderflow {
                            occupancy: state.buffers[j].occupancy(),
                            needed: config.relay_antennas,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let rate = match transmit_rate(&net, set, &blocks) {
                    Err(Error::SingularChannel { .. }) => return Ok(Attempt::Redraw),
                    other => other?,
                };
                for &j in set {
                    state.popped_symbols += state.buffers[j].pop()?.symbols();
                }
                Some(rate)
            }
        };
        SlotOutcome {
            decision: Some(decision),
            rate,
            buffer_occupancies: state.occupancies(),
        }
    };
    Ok(Attempt::Done(outcome))
}

/// Draws a slot, applies `policy` and updates the buffers.
pub fn run_slot<R: Rng + ?Sized>(
    state: &mut EpisodeState<'_>,
    policy: Policy,
    rng: &mut R,
) -> Result<SlotOutcome> {
    for _ in 0..MAX_REDRAWS {
        if let Attempt::Done(outcome) = attempt(state, policy, rng)? {
            state.slot += 1;
            return Ok(outcome);
        }
        log::debug!("slot {}: singular channel, redrawing", state.slot);
    }
    Err(Error::SingularChannel {
        condition: f64::INFINITY,
    })
}

/// Aggregate of one episode's measured slots.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeSummary {
    /// Sum of clipped slot secrecy rates over measured slots.
    pub mean_secrecy_rate: f64,
    /// Same average without clipping.
    pub mean_raw_secrecy_rate: f64,
    pub measured_slots: usize,
    /// Measured slots that delivered data.
    pub delivering_slots: usize,
    pub pushed_symbols: usize,
    pub popped_symbols: usize,
    pub final_occupancy: usize,
}

/// Runs warmup and measured slots, handing each measured outcome to `observe`.
pub fn run_episode_with<R, F>(
    config: &ScenarioConfig,
    policy: Policy,
    snr_db: f64,
    rng: &mut R,
    mut observe: F,
) -> Result<EpisodeSummary>
where
    R: Rng + ?Sized,
    F: FnMut(&SlotOutcome),
{
    config.validate()?;
    let mut state = EpisodeState::new(config, snr_db);
    for _ in 0..config.warmup_slots {
        run_slot(&mut state, policy, rng)?;
    }
    let (mut clipped, mut raw, mut delivering) = (0.0, 0.0, 0);
    for _ in 0..config.episode_slots {
        let outcome = run_slot(&mut state, policy, rng)?;
        if let Some(r) = &outcome.rate {
            clipped += r.r_secrecy_clipped;
            raw += r.r_secrecy;
            delivering += 1;
        }
        observe(&outcome);
    }
    let n = config.episode_slots as f64;
    Ok(EpisodeSummary {
        mean_secrecy_rate: clipped / n,
        mean_raw_secrecy_rate: raw / n,
        measured_slots: config.episode_slots,
        delivering_slots: delivering,
        pushed_symbols: state.pushed_symbols,
        popped_symbols: state.popped_symbols,
        final_occupancy: state.total_occupancy(),
    })
}

pub fn run_episode<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    policy: Policy,
    snr_db: f64,
    rng: &mut R,
) -> Result<EpisodeSummary> {
    run_episode_with(config, policy, snr_db, rng, |_| {})
}

/// Like [`run_episode`] but also returns every measured outcome.
pub fn run_episode_traced<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    policy: Policy,
    snr_db: f64,
    rng: &mut R,
) -> Result<(EpisodeSummary, Vec<SlotOutcome>)> {
    let mut trace = Vec::with_capacity(config.episode_slots);
    let summary = run_episode_with(config, policy, snr_db, rng, |o| trace.push(o.clone()))?;
    Ok((summary, trace))
}
