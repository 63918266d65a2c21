//! Link selection policies.
//!
//! Every buffer-aware policy compares candidates of both phases in a single
//! slot and returns one [`SelectionDecision`]. The ML rules score a candidate
//! by the residual `||y - alpha beta H x||^2` of a known unit-modulus pilot
//! observed through the slot's true channel and noise.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::buffer::BufferState;
use crate::channel::{LinkRealization, NetworkRealization, SYMBOL_ENERGY};
use crate::error::{Error, Result};
use crate::linalg::{frobenius_sq, gather_column_blocks, norm_sq, vstack, CMatrix, CVector};
use crate::precoding::{signal_covariance, zf_precoder, LinkTarget};
use crate::rates::{direct_secrecy_rate, logdet_capacity, RateSample};

/// Floor applied to the eavesdropper norm in the max-ratio rule.
pub const RATIO_FLOOR: f64 = 1e-12;

/// Half-duplex phase. `Receive` orders before `Transmit` in tie-breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    /// Source to relays.
    Receive,
    /// Relays to users.
    Transmit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    Direct,
    MaxRatio,
    MaxLink,
    MlRs,
    MlSrs,
}

impl Policy {
    pub const ALL: [Policy; 5] = [
        Policy::Direct,
        Policy::MaxRatio,
        Policy::MaxLink,
        Policy::MlRs,
        Policy::MlSrs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Direct => "direct",
            Policy::MaxRatio => "max-ratio",
            Policy::MaxLink => "max-link",
            Policy::MlRs => "ml-rs",
            Policy::MlSrs => "ml-srs",
        }
    }

    /// Stable identifier used to derive random substreams.
    pub fn id(self) -> u8 {
        match self {
            Policy::Direct => 0,
            Policy::MaxRatio => 1,
            Policy::MaxLink => 2,
            Policy::MlRs => 3,
            Policy::MlSrs => 4,
        }
    }

    pub fn uses_relays(self) -> bool {
        self != Policy::Direct
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == s.trim())
            .ok_or_else(|| Error::UnknownPolicy(s.to_string()))
    }
}

/// A feasible relay set in one phase together with its score.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateLink {
    pub phase: Phase,
    pub relay_set: Vec<usize>,
    pub metric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionDecision {
    pub phase: Phase,
    pub relay_set: Vec<usize>,
    pub winning_metric: f64,
}

/// Known pilot vectors of one slot: one for the source and one per relay.
#[derive(Debug, Clone, PartialEq)]
pub struct Pilots {
    pub source: CVector,
    pub relays: Vec<CVector>,
}

impl Pilots {
    pub fn draw<R: Rng + ?Sized>(
        tx_antennas: usize,
        relay_antennas: usize,
        relays: usize,
        rng: &mut R,
    ) -> Self {
        let mut unit = |len: usize| {
            CVector::from_fn(len, |_, _| {
                Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
            })
        };
        let source = unit(tx_antennas);
        let relays = (0..relays).map(|_| unit(relay_antennas)).collect();
        Self { source, relays }
    }
}

/// `||y - alpha beta H x||^2`.
pub fn ml_metric(y: &CVector, h: &CMatrix, x: &CVector, alpha: f64, beta: f64) -> Result<f64> {
    if h.ncols() != x.len() || h.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            context: "ml_metric",
            expected: format!("{}x{} channel", y.len(), x.len()),
            found: format!("{}x{}", h.nrows(), h.ncols()),
        });
    }
    let predicted = (h * x) * Complex64::from(alpha * beta);
    Ok(norm_sq(&(y - predicted)))
}

/// Index of the candidate channel with the smallest metric; ties go to the
/// lowest index.
pub fn ml_channel_estimate(
    y: &CVector,
    candidates: &[LinkRealization],
    x: &CVector,
) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in candidates.iter().enumerate() {
        let m = ml_metric(y, &c.h, x, c.alpha, c.beta)?;
        if best.is_none_or(|(_, b)| m < b) {
            best = Some((i, m));
        }
    }
    best.map(|(i, _)| i)
        .ok_or_else(|| Error::InvalidParameter("no candidate channels".into()))
}

/// Pilot `x` observed through `link` with additive `noise`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkObservation {
    pub link: LinkRealization,
    pub x: CVector,
    pub y: CVector,
}

impl LinkObservation {
    pub fn new(link: LinkRealization, x: &CVector, noise: &CVector) -> Self {
        let y = (&link.h * x) * Complex64::from(link.alpha * link.beta) + noise;
        Self {
            link,
            x: x.clone(),
            y,
        }
    }

    pub fn metric(&self) -> Result<f64> {
        ml_metric(
            &self.y,
            &self.link.h,
            &self.x,
            self.link.alpha,
            self.link.beta,
        )
    }
}

/// Source pilot seen by relay `j`.
pub fn receive_observation(net: &NetworkRealization, pilots: &Pilots, j: usize) -> LinkObservation {
    LinkObservation::new(net.sr[j].clone(), &pilots.source, &net.noise.relay[j])
}

/// Pilot of relay `j` seen by `user` through that relay's antenna block.
pub fn transmit_observation(
    net: &NetworkRealization,
    pilots: &Pilots,
    j: usize,
    user: usize,
) -> LinkObservation {
    let rd = &net.rd[user];
    let width = relay_width(net);
    let link = LinkRealization {
        alpha: rd.alpha,
        beta: rd.beta,
        h: gather_column_blocks(&rd.h, &[j], width),
    };
    LinkObservation::new(link, &pilots.relays[j], &net.noise.forward[j])
}

/// Metric of a set: the block-stacked residual of its member observations.
pub fn set_metric(observations: &[LinkObservation]) -> Result<f64> {
    match observations {
        [] => Err(Error::InvalidParameter("empty relay set".into())),
        [single] => single.metric(),
        many => {
            let rows: usize = many.iter().map(|o| o.y.len()).sum();
            let cols: usize = many.iter().map(|o| o.x.len()).sum();
            let mut h = CMatrix::zeros(rows, cols);
            let mut y = CVector::zeros(rows);
            let mut x = CVector::zeros(cols);
            let (mut r, mut c) = (0, 0);
            for o in many {
                let (nr, nc) = (o.y.len(), o.x.len());
                h.view_mut((r, c), (nr, nc)).copy_from(&o.link.composite());
                y.rows_mut(r, nr).copy_from(&o.y);
                x.rows_mut(c, nc).copy_from(&o.x);
                r += nr;
                c += nc;
            }
            ml_metric(&y, &h, &x, 1.0, 1.0)
        }
    }
}

fn relay_width(net: &NetworkRealization) -> usize {
    net.sr.first().map_or(0, |l| l.h.nrows())
}

/// Users served by a transmit set: the `|S|` users whose channels from the
/// set's antennas are strongest, returned in ascending index order. Block
/// `k` of the set is delivered to entry `k`.
pub fn served_users(net: &NetworkRealization, relay_set: &[usize]) -> Vec<usize> {
    let width = relay_width(net);
    let user_rows = net.rd.first().map_or(1, |l| l.h.nrows()).max(1);
    let wanted = (relay_set.len() * width)
        .div_ceil(user_rows)
        .min(net.rd.len());
    let mut scored: Vec<(usize, f64)> = net
        .rd
        .iter()
        .enumerate()
        .map(|(r, l)| {
            (
                r,
                frobenius_sq(&gather_column_blocks(&l.h, relay_set, width)),
            )
        })
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut users: Vec<usize> = scored.into_iter().take(wanted).map(|(r, _)| r).collect();
    users.sort_unstable();
    users
}

/// Largest set a phase can serve with zero forcing.
pub fn max_zf_set(net: &NetworkRealization, phase: Phase) -> usize {
    let width = relay_width(net).max(1);
    match phase {
        Phase::Receive => net.sr.first().map_or(0, |l| l.h.ncols()) / width,
        Phase::Transmit => net.rd.iter().map(|l| l.h.nrows()).sum::<usize>() / width,
    }
}

/// All nonempty subsets of the relays feasible in `phase` with at most
/// `max_set_size` members, in lexicographic order of their sorted indices.
/// Metrics are left at zero.
pub fn enumerate_feasible_sets(
    buffers: &[BufferState],
    phase: Phase,
    n_m: usize,
    max_set_size: usize,
) -> Vec<CandidateLink> {
    let feasible: Vec<usize> = buffers
        .iter()
        .enumerate()
        .filter(|(_, b)| match phase {
            Phase::Receive => b.can_receive(n_m),
            Phase::Transmit => b.can_transmit(n_m),
        })
        .map(|(i, _)| i)
        .collect();

    fn extend(
        feasible: &[usize],
        start: usize,
        current: &mut Vec<usize>,
        limit: usize,
        phase: Phase,
        out: &mut Vec<CandidateLink>,
    ) {
        for i in start..feasible.len() {
            current.push(feasible[i]);
            out.push(CandidateLink {
                phase,
                relay_set: current.clone(),
                metric: 0.0,
            });
            if current.len() < limit {
                extend(feasible, i + 1, current, limit, phase, out);
            }
            current.pop();
        }
    }

    let mut out = Vec::new();
    if max_set_size > 0 {
        extend(&feasible, 0, &mut Vec::new(), max_set_size, phase, &mut out);
    }
    out
}

/// Tie-break order after the metric: phase, relay indices, cardinality.
fn tie_break(a: &CandidateLink, b: &CandidateLink) -> Ordering {
    a.phase
        .cmp(&b.phase)
        .then_with(|| a.relay_set.cmp(&b.relay_set))
        .then_with(|| a.relay_set.len().cmp(&b.relay_set.len()))
}

fn pick(candidates: Vec<CandidateLink>, maximize: bool) -> Result<SelectionDecision> {
    candidates
        .into_iter()
        .min_by(|a, b| {
            let by_metric = if maximize {
                b.metric.total_cmp(&a.metric)
            } else {
                a.metric.total_cmp(&b.metric)
            };
            by_metric.then_with(|| tie_break(a, b))
        })
        .map(|c| SelectionDecision {
            phase: c.phase,
            relay_set: c.relay_set,
            winning_metric: c.metric,
        })
        .ok_or(Error::Deadlock)
}

fn score_ml(
    net: &NetworkRealization,
    pilots: &Pilots,
    mut candidate: CandidateLink,
) -> Result<CandidateLink> {
    let observations: Vec<LinkObservation> = match candidate.phase {
        Phase::Receive => candidate
            .relay_set
            .iter()
            .map(|&j| receive_observation(net, pilots, j))
            .collect(),
        Phase::Transmit => {
            let users = served_users(net, &candidate.relay_set);
            candidate
                .relay_set
                .iter()
                .zip(users)
                .map(|(&j, u)| transmit_observation(net, pilots, j, u))
                .collect()
        }
    };
    candidate.metric = set_metric(&observations)?;
    Ok(candidate)
}

fn ml_select(
    net: &NetworkRealization,
    pilots: &Pilots,
    buffers: &[BufferState],
    max_set_size: usize,
) -> Result<SelectionDecision> {
    let n_m = relay_width(net);
    let mut scored = Vec::new();
    for phase in [Phase::Receive, Phase::Transmit] {
        let limit = max_set_size.min(max_zf_set(net, phase));
        for c in enumerate_feasible_sets(buffers, phase, n_m, limit) {
            scored.push(score_ml(net, pilots, c)?);
        }
    }
    pick(scored, false)
}

/// Best single link of either phase under the ML metric.
pub fn ml_rs_select(
    net: &NetworkRealization,
    pilots: &Pilots,
    buffers: &[BufferState],
) -> Result<SelectionDecision> {
    ml_select(net, pilots, buffers, 1)
}

/// Best relay set of either phase under the ML metric. Set sizes are also
/// capped by what zero forcing can separate in each phase.
pub fn ml_srs_select(
    net: &NetworkRealization,
    pilots: &Pilots,
    buffers: &[BufferState],
    max_set_size: usize,
) -> Result<SelectionDecision> {
    ml_select(net, pilots, buffers, max_set_size)
}

/// Small-scale energies of the singleton links: `(legitimate, worst eavesdropper)`.
fn link_energies(net: &NetworkRealization, phase: Phase, j: usize) -> (f64, f64) {
    let width = relay_width(net);
    match phase {
        Phase::Receive => {
            let legit = frobenius_sq(&net.sr[j].h);
            let eve = net
                .se
                .iter()
                .map(|l| frobenius_sq(&l.h))
                .fold(0.0, f64::max);
            (legit, eve)
        }
        Phase::Transmit => {
            let block =
                |l: &LinkRealization| frobenius_sq(&gather_column_blocks(&l.h, &[j], width));
            let legit = net.rd.iter().map(block).sum();
            let eve = net.re.iter().map(block).fold(0.0, f64::max);
            (legit, eve)
        }
    }
}

fn singleton_baseline(
    net: &NetworkRealization,
    buffers: &[BufferState],
    score: impl Fn(f64, f64) -> f64,
) -> Result<SelectionDecision> {
    let n_m = relay_width(net);
    let mut candidates = Vec::new();
    for phase in [Phase::Receive, Phase::Transmit] {
        for mut c in enumerate_feasible_sets(buffers, phase, n_m, 1) {
            let (legit, eve) = link_energies(net, phase, c.relay_set[0]);
            c.metric = score(legit, eve);
            candidates.push(c);
        }
    }
    pick(candidates, true)
}

/// Feasible link with the largest legitimate-to-eavesdropper energy ratio.
pub fn max_ratio_select(
    net: &NetworkRealization,
    buffers: &[BufferState],
) -> Result<SelectionDecision> {
    singleton_baseline(net, buffers, |legit, eve| legit / eve.max(RATIO_FLOOR))
}

/// Feasible link with the largest legitimate channel energy.
pub fn max_link_select(
    net: &NetworkRealization,
    buffers: &[BufferState],
) -> Result<SelectionDecision> {
    singleton_baseline(net, buffers, |legit, _| legit)
}

/// Source-to-users zero forcing without relays, summed over users against
/// each user's worst eavesdropper. No half-duplex factor applies.
pub fn direct_transmission(net: &NetworkRealization) -> Result<RateSample> {
    if !(net.noise_variance > 0.0 && net.noise_variance.is_finite()) {
        return Err(Error::InvalidParameter(
            "direct transmission needs a finite positive noise variance".into(),
        ));
    }
    let user_rows = net.sd.first().map_or(0, |l| l.h.nrows());
    let stacked = vstack(net.sd.iter().map(|l| &l.h));
    let precoder = zf_precoder(&stacked, LinkTarget::SourceToUsers)?;
    let streams = stacked.nrows();
    let per_stream = SYMBOL_ENERGY / streams as f64;
    let q = signal_covariance(user_rows, per_stream * user_rows as f64 * net.snr())?;

    let mut total = RateSample::default();
    for (r, user) in net.sd.iter().enumerate() {
        let p = precoder.stream_block(r, user_rows);
        let nu = net.noise_ratio(&net.noise.user_direct[r]);
        let h_ba = (&user.h * &p) * Complex64::from(user.gain() / nu.sqrt());
        let r_d = logdet_capacity(&h_ba, &q)?;
        let mut secrecy = f64::INFINITY;
        for (e, eve) in net.se.iter().enumerate() {
            let nu_e = net.noise_ratio(&net.noise.eve_source[e]);
            let h_ea = (&eve.h * &p) * Complex64::from(eve.gain() / nu_e.sqrt());
            secrecy = secrecy.min(direct_secrecy_rate(&h_ba, &h_ea, &q)?);
        }
        total = total.combine(RateSample::new(r_d, r_d - secrecy));
    }
    Ok(total)
}
