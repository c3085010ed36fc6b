//! Monte Carlo oracles for the closed forms in [`crate::analytics`].
//!
//! Three engines live here:
//! - a static SIR sampler with independently thinned interferers,
//! - a single-queue Geo/Geo/1 delay oracle,
//! - a fully coupled slotted network where BS activity comes from the
//!   actual queue states.
//!
//! Plus a spatial estimator for the summed arrival rate in a typical cell.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::analytics::{DelayResult, Moments, NetworkParameters, SirModel};
use crate::error::{require_positive, require_probability, Error, Result};
use crate::geometry::{
    associate, sample_pcp_with, sample_ppp_points, AssociationMap, AssociationMode,
    NearestIndex, Point, PointPattern, Window,
};
use crate::rng::{derive_seed, rng_from_seed, SimRng};
use crate::traffic::{user_stream_seed, ArrivalRateDistribution, ArrivalStream};

/// Expected number of BSs in simulation windows unless configured otherwise.
pub const DEFAULT_MEAN_BS_COUNT: f64 = 200.0;

/// Queue-length slope (packets/slot) above which a queue counts as unstable.
pub const DEFAULT_INSTABILITY_SLOPE: f64 = 1e-3;

/// Shortest post-warmup trace the drift test accepts.
pub const MIN_TRACE_SLOTS: u64 = 100_000;

/// Rayleigh power fading: unit-mean exponential, fresh per link and slot.
#[derive(Debug, Clone, Copy, Default)]
pub struct FadingModel;

impl FadingModel {
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        Exp1.sample(rng)
    }
}

/// Per-user FIFO buffer. A failed head packet stays at the head.
#[derive(Debug, Clone, Default)]
pub struct QueueState {
    buffer: VecDeque<u64>,
    head_retry: bool,
}

impl QueueState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, arrival_slot: u64) {
        self.buffer.push_back(arrival_slot);
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    /// Whether the head packet has already failed at least once.
    pub fn head_retry(&self) -> bool {
        self.head_retry
    }

    pub fn head(&self) -> Option<u64> {
        self.buffer.front().copied()
    }

    /// Outcome of a transmission of the head packet in `slot`. Returns the
    /// packet's delay (departure − arrival + 1) on success.
    pub fn transmit(&mut self, slot: u64, success: bool) -> Option<u64> {
        if success {
            let arrival = self.buffer.pop_front()?;
            self.head_retry = false;
            Some(slot - arrival + 1)
        } else {
            self.head_retry = !self.buffer.is_empty();
            None
        }
    }
}

/// Online least-squares slope of a queue-length trace.
#[derive(Debug, Clone, Copy, Default)]
pub struct DriftAccumulator {
    n: f64,
    sum_t: f64,
    sum_tt: f64,
    sum_l: f64,
    sum_tl: f64,
}

impl DriftAccumulator {
    #[inline]
    pub fn push(&mut self, t: f64, len: f64) {
        self.n += 1.0;
        self.sum_t += t;
        self.sum_tt += t * t;
        self.sum_l += len;
        self.sum_tl += t * len;
    }

    pub fn samples(&self) -> u64 {
        self.n as u64
    }

    pub fn slope(&self) -> f64 {
        let den = self.n * self.sum_tt - self.sum_t * self.sum_t;
        if den <= 0.0 {
            return 0.0;
        }
        (self.n * self.sum_tl - self.sum_t * self.sum_l) / den
    }
}

/// Fraction of queues whose length grows linearly: least-squares slope over
/// the last half of each trace above `epsilon`.
pub fn classify_queue_stability(traces: &[Vec<u32>], epsilon: f64) -> Result<f64> {
    require_positive("epsilon", epsilon)?;
    if traces.is_empty() {
        return Ok(0.0);
    }
    let mut unstable = 0usize;
    for (i, trace) in traces.iter().enumerate() {
        if (trace.len() as u64) < MIN_TRACE_SLOTS {
            return Err(Error::param(
                "horizon",
                format!(
                    "trace {i} has {} slots, the drift test needs {MIN_TRACE_SLOTS}",
                    trace.len()
                ),
            ));
        }
        let mut acc = DriftAccumulator::default();
        let start = trace.len() / 2;
        for (t, &len) in trace.iter().enumerate().skip(start) {
            acc.push((t - start) as f64, len as f64);
        }
        if acc.slope() > epsilon {
            unstable += 1;
        }
    }
    Ok(unstable as f64 / traces.len() as f64)
}

/// Where the interferers of the static SIR sampler come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterfererField {
    /// All BSs of the sampled pattern other than the serving one, so every
    /// interferer is farther away than the serving BS.
    OtherBaseStations,
    /// An independent PPP of the same intensity over the whole window,
    /// unconditioned on the serving distance. This is the field behind the
    /// `sinc/(sinc + qθ^δ)` success probability.
    IndependentPpp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirEstimate {
    pub success: f64,
    pub std_error: f64,
    pub samples: u64,
}

const SIR_CHUNK: u64 = 4_096;

/// Static success-probability sampler for a typical user at the window
/// center with independently active interferers.
pub fn run_sir_static(
    params: &NetworkParameters,
    q: f64,
    samples: u64,
    seed: u64,
    field: InterfererField,
) -> Result<SirEstimate> {
    params.validate()?;
    require_probability("q", q)?;
    if samples < 100_000 {
        return Err(Error::param("samples", format!("need at least 10^5, got {samples}")));
    }
    let window = Window::for_mean_count(params.lambda_b, DEFAULT_MEAN_BS_COUNT)?;
    let sir = params.sir();
    let chunks = samples.div_ceil(SIR_CHUNK);
    let successes: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng_from_seed(derive_seed(seed, c));
            let n = SIR_CHUNK.min(samples - c * SIR_CHUNK);
            (0..n)
                .filter(|_| static_sir_trial(&mut rng, &window, params.lambda_b, q, &sir, field))
                .count() as u64
        })
        .sum();
    let p = successes as f64 / samples as f64;
    Ok(SirEstimate {
        success: p,
        std_error: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
    })
}

fn static_sir_trial(
    rng: &mut SimRng,
    window: &Window,
    lambda_b: f64,
    q: f64,
    sir: &SirModel,
    field: InterfererField,
) -> bool {
    let center = window.center();
    let half_alpha = 0.5 * sir.alpha();
    let bss = sample_ppp_points(rng, lambda_b, window);
    let d2: Vec<f64> = bss.iter().map(|&b| window.distance_squared(center, b)).collect();
    let Some((serving, &l0_sq)) = d2
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
    else {
        return false;
    };
    let fading = FadingModel;
    let signal = fading.sample(rng) * l0_sq.powf(-half_alpha);

    let mut interference = 0.0;
    let mut add = |rng: &mut SimRng, dist_sq: f64| {
        if rng.random::<f64>() < q {
            interference += fading.sample(rng) * dist_sq.powf(-half_alpha);
        }
    };
    match field {
        InterfererField::OtherBaseStations => {
            for (i, &dsq) in d2.iter().enumerate() {
                if i != serving {
                    add(rng, dsq);
                }
            }
        }
        InterfererField::IndependentPpp => {
            for p in sample_ppp_points(rng, lambda_b, window) {
                add(rng, window.distance_squared(center, p));
            }
        }
    }
    signal > sir.theta() * interference
}

/// Output of [`run_delay_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayEstimate {
    pub delay: DelayResult,
    pub departures: u64,
    /// Batch-means standard error of the mean delay.
    pub std_error: f64,
    /// Largest queue-length slope over the last half of the horizon.
    pub max_drift: f64,
}

const DELAY_BATCHES: usize = 32;

/// Geo/Geo/1 oracle: `n` independent copies of the typical queue, each with
/// Bernoulli(`xi0`) arrivals and per-slot success probability `mu`, head of
/// line retry. In every slot the arrival (if any) joins before the service
/// attempt, and a departure in slot `t` of a packet that arrived in slot `a`
/// counts `t − a + 1` slots. Returns the pooled mean sojourn time.
pub fn run_delay_oracle(n: u32, xi0: f64, mu: f64, horizon: u64, seed: u64) -> Result<DelayEstimate> {
    if n == 0 {
        return Err(Error::param("n", "need at least one queue"));
    }
    require_probability("xi0", xi0)?;
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::param("mu", format!("must lie in (0, 1], got {mu}")));
    }
    if horizon < 1_000_000 {
        return Err(Error::param("horizon", format!("need at least 10^6 slots, got {horizon}")));
    }
    let runs: Vec<QueueRun> = (0..n)
        .into_par_iter()
        .map(|i| {
            let stream = ArrivalStream::new(xi0, user_stream_seed(seed, i as u64))
                .expect("validated rate");
            simulate_single_queue(stream, mu, horizon, derive_seed(seed, 0x5E_u64 << 32 | i as u64))
        })
        .collect();

    let max_drift = runs.iter().map(|r| r.drift).fold(f64::NEG_INFINITY, f64::max);
    let departures: u64 = runs.iter().map(|r| r.departures).sum();
    let total: f64 = runs.iter().map(|r| r.delay_sum).sum();
    let diverging = xi0 >= mu || max_drift > DEFAULT_INSTABILITY_SLOPE;
    let delay = if diverging || departures == 0 {
        DelayResult::Unstable
    } else {
        DelayResult::Finite(total / departures as f64)
    };
    let std_error = batch_means_error(runs.iter().flat_map(|r| r.batches.iter().copied()));
    Ok(DelayEstimate {
        delay,
        departures,
        std_error,
        max_drift,
    })
}

/// One simulated Geo/Geo/1 queue.
#[derive(Debug, Clone, PartialEq)]
pub struct QueueRun {
    pub departures: u64,
    pub delay_sum: f64,
    /// Queue-length slope over the last half of the horizon.
    pub drift: f64,
    /// (sum, count) of delays per time batch.
    batches: Vec<(f64, u64)>,
}

impl QueueRun {
    pub fn mean_delay(&self) -> Option<f64> {
        (self.departures > 0).then(|| self.delay_sum / self.departures as f64)
    }
}

/// A single queue fed by `stream` and served with probability `mu` per
/// occupied slot, service draws seeded by `service_seed`.
pub fn simulate_queue(stream: ArrivalStream, mu: f64, horizon: u64, service_seed: u64) -> Result<QueueRun> {
    require_probability("mu", mu)?;
    Ok(simulate_single_queue(stream, mu, horizon, service_seed))
}

fn simulate_single_queue(stream: ArrivalStream, mu: f64, horizon: u64, seed: u64) -> QueueRun {
    let mut rng = rng_from_seed(seed);
    let mut queue = QueueState::new();
    let mut drift = DriftAccumulator::default();
    let half = horizon / 2;
    let batch_len = horizon.div_ceil(DELAY_BATCHES as u64);
    let mut batches = vec![(0.0, 0u64); DELAY_BATCHES];
    let mut departures = 0;
    let mut delay_sum = 0.0;
    for t in 0..horizon {
        if stream.next_arrival(t) {
            queue.push(t);
        }
        if !queue.is_empty() {
            let success = rng.random::<f64>() < mu;
            if let Some(d) = queue.transmit(t, success) {
                departures += 1;
                delay_sum += d as f64;
                let b = &mut batches[(t / batch_len) as usize];
                b.0 += d as f64;
                b.1 += 1;
            }
        }
        if t >= half {
            drift.push((t - half) as f64, queue.len() as f64);
        }
    }
    QueueRun {
        departures,
        delay_sum,
        drift: drift.slope(),
        batches,
    }
}

fn batch_means_error(batches: impl Iterator<Item = (f64, u64)>) -> f64 {
    let means: Vec<f64> = batches
        .filter(|b| b.1 > 0)
        .map(|(s, c)| s / c as f64)
        .collect();
    let k = means.len() as f64;
    if k < 2.0 {
        return f64::NAN;
    }
    let m = means.iter().sum::<f64>() / k;
    let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (k - 1.0);
    (var / k).sqrt()
}

/// Which users a BS chooses from in each slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheduling {
    /// Uniform over all associated users; idles when the pick has nothing to
    /// send.
    #[default]
    AllUsers,
    /// Uniform over associated users with a non-empty queue.
    ActiveOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledConfig {
    pub horizon: u64,
    pub warmup: u64,
    pub seed: u64,
    /// Expected BS count of the sampled window.
    pub mean_bs_count: f64,
    pub scheduling: Scheduling,
    /// With interference off every transmission succeeds.
    pub interference: bool,
    pub association: AssociationMode,
    pub instability_slope: f64,
    /// Keep per-slot post-warmup queue lengths.
    pub record_traces: bool,
}

impl CoupledConfig {
    /// Defaults with a warmup of 20% of the horizon.
    pub fn new(horizon: u64, seed: u64) -> Self {
        Self {
            horizon,
            warmup: horizon / 5,
            seed,
            mean_bs_count: DEFAULT_MEAN_BS_COUNT,
            scheduling: Scheduling::AllUsers,
            interference: true,
            association: AssociationMode::PerUser,
            instability_slope: DEFAULT_INSTABILITY_SLOPE,
            record_traces: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon <= self.warmup {
            return Err(Error::param(
                "horizon",
                format!("must exceed warmup ({} <= {})", self.horizon, self.warmup),
            ));
        }
        require_positive("mean_bs_count", self.mean_bs_count)?;
        require_positive("instability_slope", self.instability_slope)?;
        Ok(())
    }
}

/// A frozen network realization: BSs, users, association and per-user rates.
#[derive(Debug, Clone)]
pub struct Network {
    pub window: Window,
    pub bss: PointPattern,
    pub users: PointPattern,
    pub association: AssociationMap,
    pub rates: Vec<f64>,
    pub clamped: usize,
}

impl Network {
    /// Samples BSs, users (PCP when `params.pcp` is set, PPP otherwise) and
    /// per-user rates.
    pub fn sample(
        params: &NetworkParameters,
        dist: &ArrivalRateDistribution,
        config: &CoupledConfig,
    ) -> Result<Self> {
        params.validate()?;
        dist.validate()?;
        config.validate()?;
        let window = Window::for_mean_count(params.lambda_b, config.mean_bs_count)?;
        if let Some(pcp) = &params.pcp {
            if 2.0 * pcp.r_c >= window.width() {
                return Err(Error::param("r_c", "cluster diameter exceeds the simulation window"));
            }
        }
        let mut rng = rng_from_seed(derive_seed(config.seed, 0x6E0));
        let bss = PointPattern::unclustered(sample_ppp_points(&mut rng, params.lambda_b, &window));
        let users = match &params.pcp {
            Some(pcp) => sample_pcp_with(&mut rng, pcp, &window),
            None => PointPattern::unclustered(sample_ppp_points(&mut rng, params.lambda_u, &window)),
        };
        let mut clamped = 0;
        let rates = (0..users.len())
            .map(|_| {
                let draw = dist.sample_clamped(&mut rng);
                clamped += usize::from(draw.clamped);
                draw.rate
            })
            .collect();
        Self::assemble(window, bss, users, rates, clamped, config.association)
    }

    /// Builds a network from explicit patterns and per-user rates in `[0, 1]`.
    pub fn from_parts(
        window: Window,
        bss: PointPattern,
        users: PointPattern,
        rates: Vec<f64>,
        association: AssociationMode,
    ) -> Result<Self> {
        if rates.len() != users.len() {
            return Err(Error::param("rates", "need exactly one rate per user"));
        }
        for &r in &rates {
            require_probability("rate", r)?;
        }
        Self::assemble(window, bss, users, rates, 0, association)
    }

    fn assemble(
        window: Window,
        bss: PointPattern,
        users: PointPattern,
        rates: Vec<f64>,
        clamped: usize,
        mode: AssociationMode,
    ) -> Result<Self> {
        if users.is_empty() {
            return Err(Error::EmptyPattern("coupled simulation needs users"));
        }
        let association = associate(&users, &bss, &window, mode)?;
        Ok(Self {
            window,
            bss,
            users,
            association,
            rates,
            clamped,
        })
    }
}

/// Aggregate empirical metrics of one coupled run (post-warmup).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    /// Fraction of (BS, slot) pairs with a transmission.
    pub empirical_busy_prob: f64,
    /// Successful over attempted transmissions; `None` if nothing was sent.
    pub empirical_success_prob: Option<f64>,
    /// Mean over users of each user's mean delay; `None` without departures.
    pub per_user_mean_delay: Option<f64>,
    pub delay_samples: u64,
    /// Queues with positive drift; `None` when the post-warmup window is
    /// shorter than the drift test needs.
    pub unstable_fraction: Option<f64>,
    pub clamped_rate_fraction: f64,
    pub seed: u64,
    pub horizon: u64,
    pub warmup: u64,
}

impl MetricsReport {
    pub const CSV_HEADER: &'static str = "empirical_busy_prob,empirical_success_prob,per_user_mean_delay,delay_samples,unstable_fraction,clamped_rate_fraction,seed,horizon,warmup";

    fn fields(&self) -> [(&'static str, String); 9] {
        let opt = |v: Option<f64>| v.map_or_else(|| "na".to_string(), |x| format!("{x:.17e}"));
        [
            ("empirical_busy_prob", format!("{:.17e}", self.empirical_busy_prob)),
            ("empirical_success_prob", opt(self.empirical_success_prob)),
            ("per_user_mean_delay", opt(self.per_user_mean_delay)),
            ("delay_samples", self.delay_samples.to_string()),
            ("unstable_fraction", opt(self.unstable_fraction)),
            ("clamped_rate_fraction", format!("{:.17e}", self.clamped_rate_fraction)),
            ("seed", self.seed.to_string()),
            ("horizon", self.horizon.to_string()),
            ("warmup", self.warmup.to_string()),
        ]
    }

    /// `key=value` lines.
    pub fn to_record(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.fields() {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    /// One row matching [`MetricsReport::CSV_HEADER`].
    pub fn to_csv_row(&self) -> String {
        self.fields()
            .into_iter()
            .map(|(_, v)| v)
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_record())
    }
}

/// Per-queue bookkeeping of a coupled run. Counts cover the whole horizon;
/// delays cover post-warmup departures only.
#[derive(Debug, Clone, PartialEq)]
pub struct QueueSummary {
    pub user: usize,
    pub serving_bs: usize,
    pub rate: f64,
    pub arrivals: u64,
    pub departures: u64,
    pub final_len: u64,
    pub delay_sum: f64,
    pub delay_count: u64,
    pub drift: f64,
    /// Arrival slots in departure order.
    pub departure_order_ok: bool,
}

impl QueueSummary {
    pub fn mean_delay(&self) -> Option<f64> {
        (self.delay_count > 0).then(|| self.delay_sum / self.delay_count as f64)
    }
}

#[derive(Debug, Clone)]
pub struct CoupledRun {
    pub report: MetricsReport,
    pub queues: Vec<QueueSummary>,
    /// Post-warmup queue lengths per user when requested.
    pub traces: Option<Vec<Vec<u32>>>,
}

/// Path gains `d^-α` from every BS to every user, or computed on demand when
/// the table would be too large.
struct Gains<'a> {
    table: Option<Vec<f64>>,
    network: &'a Network,
    half_alpha: f64,
}

const MAX_GAIN_TABLE: usize = 40_000_000;

impl<'a> Gains<'a> {
    fn new(network: &'a Network, alpha: f64) -> Self {
        let half_alpha = 0.5 * alpha;
        let (nu, nb) = (network.users.len(), network.bss.len());
        let table = (nu * nb <= MAX_GAIN_TABLE).then(|| {
            let mut t = Vec::with_capacity(nu * nb);
            for &u in &network.users.points {
                for &b in &network.bss.points {
                    t.push(network.window.distance_squared(u, b).powf(-half_alpha));
                }
            }
            t
        });
        Self {
            table,
            network,
            half_alpha,
        }
    }

    #[inline]
    fn get(&self, user: usize, bs: usize) -> f64 {
        match &self.table {
            Some(t) => t[user * self.network.bss.len() + bs],
            None => {
                let u: Point = self.network.users.points[user];
                let b: Point = self.network.bss.points[bs];
                self.network.window.distance_squared(u, b).powf(-self.half_alpha)
            }
        }
    }
}

/// Runs the slotted network. Each slot proceeds in lockstep phases:
/// arrivals, scheduling, simultaneous SIR evaluation, departures.
pub fn simulate_network(network: &Network, sir: &SirModel, config: &CoupledConfig) -> Result<CoupledRun> {
    config.validate()?;
    let nu = network.users.len();
    let nb = network.bss.len();
    let streams: Vec<ArrivalStream> = network
        .rates
        .iter()
        .enumerate()
        .map(|(u, &r)| ArrivalStream::new(r, user_stream_seed(config.seed, u as u64)))
        .collect::<Result<_>>()?;
    let gains = Gains::new(network, sir.alpha());
    let fading = FadingModel;
    let mut rng = rng_from_seed(derive_seed(config.seed, 0x5C4ED));

    let mut queues = vec![QueueState::new(); nu];
    let mut arrivals = vec![0u64; nu];
    let mut departures = vec![0u64; nu];
    let mut last_departed = vec![0u64; nu];
    let mut order_ok = vec![true; nu];
    let mut delay_sum = vec![0.0f64; nu];
    let mut delay_count = vec![0u64; nu];
    let mut drift = vec![DriftAccumulator::default(); nu];
    let post_len = config.horizon - config.warmup;
    let drift_start = config.warmup + post_len / 2;
    let mut traces = config
        .record_traces
        .then(|| vec![Vec::with_capacity(post_len as usize); nu]);

    let mut busy_slots = 0u64;
    let mut attempts = 0u64;
    let mut successes = 0u64;
    // (bs, user) pairs transmitting this slot
    let mut active: Vec<(usize, usize)> = Vec::with_capacity(nb);
    let mut outcome: Vec<bool> = Vec::with_capacity(nb);
    let mut ready: Vec<usize> = Vec::new();

    for t in 0..config.horizon {
        for (u, s) in streams.iter().enumerate() {
            if s.next_arrival(t) {
                queues[u].push(t);
                arrivals[u] += 1;
            }
        }

        active.clear();
        for (b, members) in network.association.cell_members.iter().enumerate() {
            if members.is_empty() {
                continue;
            }
            let pick = match config.scheduling {
                Scheduling::AllUsers => members[rng.random_range(0..members.len())],
                Scheduling::ActiveOnly => {
                    ready.clear();
                    ready.extend(members.iter().copied().filter(|&u| !queues[u].is_empty()));
                    if ready.is_empty() {
                        continue;
                    }
                    ready[rng.random_range(0..ready.len())]
                }
            };
            if !queues[pick].is_empty() {
                active.push((b, pick));
            }
        }

        outcome.clear();
        for &(b, u) in &active {
            let success = if config.interference {
                let signal = fading.sample(&mut rng) * gains.get(u, b);
                let interference: f64 = active
                    .iter()
                    .filter(|&&(b2, _)| b2 != b)
                    .map(|&(b2, _)| fading.sample(&mut rng) * gains.get(u, b2))
                    .sum();
                signal > sir.theta() * interference
            } else {
                true
            };
            outcome.push(success);
        }

        let counting = t >= config.warmup;
        for (&(_, u), &success) in active.iter().zip(&outcome) {
            let head = queues[u].head();
            if let Some(d) = queues[u].transmit(t, success) {
                departures[u] += 1;
                let arrived = head.expect("non-empty queue");
                if arrived < last_departed[u] {
                    order_ok[u] = false;
                }
                last_departed[u] = arrived;
                if counting {
                    delay_sum[u] += d as f64;
                    delay_count[u] += 1;
                }
            }
        }
        if counting {
            busy_slots += active.len() as u64;
            attempts += active.len() as u64;
            successes += outcome.iter().filter(|&&s| s).count() as u64;
            if t >= drift_start {
                let x = (t - drift_start) as f64;
                for (acc, q) in drift.iter_mut().zip(&queues) {
                    acc.push(x, q.len() as f64);
                }
            }
            if let Some(tr) = traces.as_mut() {
                for (trace, q) in tr.iter_mut().zip(&queues) {
                    trace.push(q.len() as u32);
                }
            }
        }
    }

    let summaries: Vec<QueueSummary> = (0..nu)
        .map(|u| QueueSummary {
            user: u,
            serving_bs: network.association.serving_bs[u],
            rate: network.rates[u],
            arrivals: arrivals[u],
            departures: departures[u],
            final_len: queues[u].len() as u64,
            delay_sum: delay_sum[u],
            delay_count: delay_count[u],
            drift: drift[u].slope(),
            departure_order_ok: order_ok[u],
        })
        .collect();

    let user_means: Vec<f64> = summaries.iter().filter_map(QueueSummary::mean_delay).collect();
    let unstable_fraction = (post_len >= MIN_TRACE_SLOTS).then(|| {
        summaries
            .iter()
            .filter(|s| s.drift > config.instability_slope)
            .count() as f64
            / nu as f64
    });
    let report = MetricsReport {
        empirical_busy_prob: if nb == 0 {
            0.0
        } else {
            busy_slots as f64 / (nb as f64 * post_len as f64)
        },
        empirical_success_prob: (attempts > 0).then(|| successes as f64 / attempts as f64),
        per_user_mean_delay: (!user_means.is_empty())
            .then(|| user_means.iter().sum::<f64>() / user_means.len() as f64),
        delay_samples: delay_count.iter().sum(),
        unstable_fraction,
        clamped_rate_fraction: network.clamped as f64 / nu as f64,
        seed: config.seed,
        horizon: config.horizon,
        warmup: config.warmup,
    };
    Ok(CoupledRun {
        report,
        queues: summaries,
        traces,
    })
}

/// Samples a network and runs it with default options (20% warmup unless
/// given, all-user random scheduling, nearest-BS association).
pub fn run_coupled(
    params: &NetworkParameters,
    dist: &ArrivalRateDistribution,
    horizon: u64,
    warmup: u64,
    seed: u64,
) -> Result<MetricsReport> {
    let config = CoupledConfig {
        warmup,
        ..CoupledConfig::new(horizon, seed)
    };
    let network = Network::sample(params, dist, &config)?;
    Ok(simulate_network(&network, &params.sir(), &config)?.report)
}

/// Spatial estimator of the summed arrival rate in a typical cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrivalVarianceStudy {
    pub replications: u64,
    pub seed: u64,
    pub association: AssociationMode,
    pub mean_bs_count: f64,
}

impl ArrivalVarianceStudy {
    /// PCP users attach cluster-wise; PPP users per user.
    pub fn new(params: &NetworkParameters, replications: u64, seed: u64) -> Self {
        Self {
            replications,
            seed,
            association: if params.pcp.is_some() {
                AssociationMode::PerCluster
            } else {
                AssociationMode::PerUser
            },
            mean_bs_count: 100.0,
        }
    }

    pub fn run(&self, params: &NetworkParameters, dist: &ArrivalRateDistribution) -> Result<Moments> {
        params.validate()?;
        dist.validate()?;
        if self.replications < 1_000 {
            return Err(Error::param(
                "replications",
                format!("need at least 10^3, got {}", self.replications),
            ));
        }
        if self.association == AssociationMode::PerCluster && params.pcp.is_none() {
            return Err(Error::param("association", "per-cluster mode needs PCP users"));
        }
        let window = Window::for_mean_count(params.lambda_b, self.mean_bs_count)?;
        if let Some(pcp) = &params.pcp {
            if 2.0 * pcp.r_c >= window.width() {
                return Err(Error::param("r_c", "cluster diameter exceeds the simulation window"));
            }
        }
        let totals: Vec<f64> = (0..self.replications)
            .into_par_iter()
            .map(|r| {
                let mut rng = rng_from_seed(derive_seed(self.seed, r));
                typical_cell_total(&mut rng, params, dist, &window, self.association)
            })
            .collect();
        let n = totals.len() as f64;
        let mean = totals.iter().sum::<f64>() / n;
        let variance = totals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Ok(Moments { mean, variance })
    }
}

/// Summed raw rates of the users served by a uniformly chosen BS.
///
/// BS points are i.i.d. uniform, so index 0 is a uniformly chosen BS.
fn typical_cell_total(
    rng: &mut SimRng,
    params: &NetworkParameters,
    dist: &ArrivalRateDistribution,
    window: &Window,
    mode: AssociationMode,
) -> f64 {
    let bss = loop {
        let pts = sample_ppp_points(rng, params.lambda_b, window);
        if !pts.is_empty() {
            break pts;
        }
    };
    let index = NearestIndex::new(&bss, window).expect("non-empty");
    let in_cell = |p: Point| index.nearest(p).0 == 0;
    let mut total = 0.0;
    match (&params.pcp, mode) {
        (Some(pcp), AssociationMode::PerCluster) => {
            let users = sample_pcp_with(rng, pcp, window);
            let parents = users.parents.as_deref().unwrap_or_default();
            let served: Vec<bool> = parents.iter().map(|&p| in_cell(p)).collect();
            for &c in users.cluster_of.as_deref().unwrap_or_default() {
                let r = dist.sample_raw(rng);
                if served[c] {
                    total += r;
                }
            }
        }
        (Some(pcp), AssociationMode::PerUser) => {
            let users = sample_pcp_with(rng, pcp, window);
            for &u in &users.points {
                let r = dist.sample_raw(rng);
                if in_cell(u) {
                    total += r;
                }
            }
        }
        (None, _) => {
            for u in sample_ppp_points(rng, params.lambda_u, window) {
                let r = dist.sample_raw(rng);
                if in_cell(u) {
                    total += r;
                }
            }
        }
    }
    total
}

/// Mean and variance of the summed arrival rate of a typical cell over
/// `replications` independent network draws.
pub fn estimate_total_arrival_variance(
    params: &NetworkParameters,
    dist: &ArrivalRateDistribution,
    replications: u64,
    seed: u64,
) -> Result<Moments> {
    ArrivalVarianceStudy::new(params, replications, seed).run(params, dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Metric;

    #[test]
    fn queue_fifo_with_head_retry() {
        let mut q = QueueState::new();
        q.push(3);
        q.push(5);
        assert_eq!(q.transmit(6, false), None);
        assert!(q.head_retry());
        assert_eq!(q.head(), Some(3));
        assert_eq!(q.transmit(7, true), Some(5));
        assert!(!q.head_retry());
        assert_eq!(q.transmit(7, true), Some(3));
        assert!(q.is_empty());
        assert_eq!(q.transmit(8, true), None);
    }

    #[test]
    fn drift_slope_of_a_line() {
        let mut acc = DriftAccumulator::default();
        for t in 0..100 {
            acc.push(t as f64, 2.0 + 0.5 * t as f64);
        }
        assert!((acc.slope() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn stability_classifier() {
        let flat = vec![0u32; 100_000];
        let growing: Vec<u32> = (0..100_000u32).map(|t| t / 50).collect();
        assert_eq!(classify_queue_stability(&[flat.clone(), flat.clone()], 1e-3).unwrap(), 0.0);
        assert_eq!(classify_queue_stability(&[flat.clone(), growing], 1e-3).unwrap(), 0.5);
        assert!(classify_queue_stability(&[vec![0; 10]], 1e-3).is_err());
    }

    #[test]
    fn static_sir_without_interferers_always_succeeds() {
        let p = NetworkParameters::new(1e-4, 1e-3, 10.0, 4.0).unwrap();
        for field in [InterfererField::OtherBaseStations, InterfererField::IndependentPpp] {
            let est = run_sir_static(&p, 0.0, 100_000, 1, field).unwrap();
            assert_eq!(est.success, 1.0);
        }
        assert!(run_sir_static(&p, 1.5, 100_000, 1, InterfererField::IndependentPpp).is_err());
        assert!(run_sir_static(&p, 0.5, 10, 1, InterfererField::IndependentPpp).is_err());
    }

    #[test]
    fn delay_oracle_rejects_bad_inputs() {
        assert!(run_delay_oracle(1, 0.1, 0.0, 1_000_000, 0).is_err());
        assert!(run_delay_oracle(1, 0.1, 0.5, 10, 0).is_err());
        assert!(run_delay_oracle(0, 0.1, 0.5, 1_000_000, 0).is_err());
    }

    #[test]
    fn delay_oracle_matches_geometric_queue() {
        let est = run_delay_oracle(1, 0.01, 0.5, 1_000_000, 3).unwrap();
        let d = est.delay.value().unwrap();
        let exact = 0.99 / 0.49;
        assert!((d - exact).abs() < 0.03 * exact, "{d}");
    }

    #[test]
    fn delay_oracle_flags_overload() {
        let est = run_delay_oracle(1, 0.3, 0.2, 1_000_000, 3).unwrap();
        assert_eq!(est.delay, DelayResult::Unstable);
        assert!(est.max_drift > DEFAULT_INSTABILITY_SLOPE);
    }

    #[test]
    fn coupled_config_checks_horizon() {
        let mut c = CoupledConfig::new(100, 0);
        c.warmup = 100;
        assert!(c.validate().is_err());
    }

    fn tiny_network(rates: Vec<f64>) -> Network {
        let w = Window::new(100.0, 100.0, Metric::Toroidal).unwrap();
        let bss = PointPattern::unclustered(vec![Point::new(50.0, 50.0)]);
        let users = PointPattern::unclustered(
            (0..rates.len()).map(|i| Point::new(40.0 + i as f64, 45.0)).collect(),
        );
        Network::from_parts(w, bss, users, rates, AssociationMode::PerUser).unwrap()
    }

    #[test]
    fn zero_rates_never_transmit() {
        let net = tiny_network(vec![0.0; 4]);
        let sir = SirModel::new(10.0, 4.0).unwrap();
        let run = simulate_network(&net, &sir, &CoupledConfig::new(5_000, 1)).unwrap();
        assert_eq!(run.report.empirical_busy_prob, 0.0);
        assert_eq!(run.report.delay_samples, 0);
        assert_eq!(run.report.per_user_mean_delay, None);
        assert_eq!(run.report.unstable_fraction, None);
    }

    #[test]
    fn conservation_and_order() {
        let net = tiny_network(vec![0.05, 0.1, 0.2, 0.3]);
        let sir = SirModel::new(10.0, 4.0).unwrap();
        let run = simulate_network(&net, &sir, &CoupledConfig::new(20_000, 9)).unwrap();
        for q in &run.queues {
            assert_eq!(q.arrivals, q.departures + q.final_len);
            assert!(q.departure_order_ok);
        }
    }

    #[test]
    fn isolated_user_has_unit_delay_at_low_load() {
        let net = tiny_network(vec![0.001]);
        let sir = SirModel::new(10.0, 4.0).unwrap();
        let run = simulate_network(&net, &sir, &CoupledConfig::new(200_000, 2)).unwrap();
        let d = run.report.per_user_mean_delay.unwrap();
        assert!((d - 1.0).abs() < 0.01, "{d}");
    }

    #[test]
    fn coupled_is_deterministic() {
        let p = NetworkParameters::new(1e-4, 3e-4, 10.0, 4.0).unwrap();
        let d = ArrivalRateDistribution::exponential_mean(0.01).unwrap();
        let a = run_coupled(&p, &d, 3_000, 500, 42).unwrap();
        let b = run_coupled(&p, &d, 3_000, 500, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv_row(), b.to_csv_row());
    }

    #[test]
    fn report_serialization_shapes() {
        let net = tiny_network(vec![0.1, 0.1]);
        let sir = SirModel::new(10.0, 4.0).unwrap();
        let r = simulate_network(&net, &sir, &CoupledConfig::new(2_000, 1)).unwrap().report;
        let record = r.to_record();
        assert_eq!(record.lines().count(), 9);
        assert!(record.contains("unstable_fraction=na"));
        assert_eq!(
            r.to_csv_row().split(',').count(),
            MetricsReport::CSV_HEADER.split(',').count()
        );
    }

    #[test]
    fn traces_are_recorded_on_request() {
        let net = tiny_network(vec![0.1, 0.2]);
        let sir = SirModel::new(10.0, 4.0).unwrap();
        let mut cfg = CoupledConfig::new(1_000, 1);
        cfg.record_traces = true;
        let run = simulate_network(&net, &sir, &cfg).unwrap();
        let traces = run.traces.unwrap();
        assert_eq!(traces.len(), 2);
        assert_eq!(traces[0].len(), 800);
    }

    #[test]
    fn arrival_variance_of_zero_rates() {
        let p = NetworkParameters::new(1e-5, 1e-4, 10.0, 4.0).unwrap();
        let d = ArrivalRateDistribution::Deterministic(0.0);
        let m = estimate_total_arrival_variance(&p, &d, 1_000, 4).unwrap();
        assert_eq!(m.variance, 0.0);
        assert_eq!(m.mean, 0.0);
        assert!(estimate_total_arrival_variance(&p, &d, 10, 4).is_err());
    }
}
