//! Deterministic tick engine.
//!
//! A [`Scenario`] fixes every input of a run: the channel, the band plan and
//! pool, the controller policy, the PHY numerology and a schedule of forced
//! events. [`run`] advances one tick at a time:
//!
//! 1. scheduled events for the tick,
//! 2. one step of the environment term,
//! 3. random bits, 16-QAM, OFDM,
//! 4. the channel (gain chain, obstructions, AWGN),
//! 5. demodulation, gain control and metrics,
//! 6. controller evaluation and application, when enabled.
//!
//! Bits, noise and the environment draw from separate ChaCha8 streams derived
//! from the scenario seed, so identical scenarios give identical logs.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{
    active_obstruction_loss, apply_channel, link_budget, ChannelState, EnvironmentProcess, LinkModel, ObstructionEvent,
    DEFAULT_BETA_CLIP_DB, DEFAULT_BETA_SIGMA_DB, DEFAULT_NOISE_FLOOR_DB, DEFAULT_RX_GAIN_DB, MAX_TX_GAIN_DB,
};
use crate::dsa::{
    apply_action, evaluate, Action, ActionKind, BandPlan, ControllerState, DsaPolicy, LinkStatus, SpectrumPool,
};
use crate::phy::{
    compute_ber, compute_bler, fill_bits, normalize_tone_power, qam16_demodulate, qam16_modulate, tone_power_db,
    IqFrame, LinkMetrics, OfdmConfig, OfdmModem,
};
use crate::{Error, Frequency, Result};

pub const DEFAULT_SYMBOLS_PER_TICK: usize = 100;

const BITS_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;
const BETA_STREAM: u64 = 3;

/// Channel section of a scenario. Carrier frequency and transmit gain come
/// from the controller state.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub model: LinkModel,
    pub noise_floor_db: f64,
    pub rx_gain_db: f64,
    pub beta_sigma_db: f64,
    pub beta_clip_db: f64,
}

impl ChannelConfig {
    pub fn new(model: LinkModel) -> Self {
        Self {
            model,
            noise_floor_db: DEFAULT_NOISE_FLOOR_DB,
            rx_gain_db: DEFAULT_RX_GAIN_DB,
            beta_sigma_db: DEFAULT_BETA_SIGMA_DB,
            beta_clip_db: DEFAULT_BETA_CLIP_DB,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    ObstructionStart {
        extra_loss_db: f64,
    },
    /// Clears every obstruction in place.
    ObstructionEnd,
    SetGain {
        tx_gain_db: f64,
    },
    SetFrequency {
        freq: Frequency,
    },
    SetPoolCapacity {
        band: usize,
        units: u32,
    },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::ObstructionStart { .. } => "obstruction-start",
            EventKind::ObstructionEnd => "obstruction-end",
            EventKind::SetGain { .. } => "set-gain",
            EventKind::SetFrequency { .. } => "set-frequency",
            EventKind::SetPoolCapacity { .. } => "set-pool-capacity",
        }
    }

    fn is_forced_retune(&self) -> bool {
        matches!(self, EventKind::SetGain { .. } | EventKind::SetFrequency { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedEvent {
    pub tick: usize,
    pub kind: EventKind,
}

impl TimedEvent {
    pub fn new(tick: usize, kind: EventKind) -> Self {
        Self { tick, kind }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub duration_ticks: usize,
    pub symbols_per_tick: usize,
    pub channel: ChannelConfig,
    pub plan: BandPlan,
    /// Capacities and third-party occupancy. The simulated link reserves its
    /// own unit at `start_band` when the run begins.
    pub pool: SpectrumPool,
    pub start_band: usize,
    pub initial_tx_gain_db: f64,
    pub policy: DsaPolicy,
    pub controller_enabled: bool,
    pub ofdm: OfdmConfig,
    /// Block length for BLER; zero means one OFDM symbol worth of bits.
    pub block_bits: usize,
    pub schedule: Vec<TimedEvent>,
}

impl Scenario {
    /// Default plan, one unit per band, starting at the highest band with
    /// 0 dB transmit gain.
    pub fn new(name: &str, channel: ChannelConfig, duration_ticks: usize) -> Self {
        let plan = BandPlan::default();
        let pool = SpectrumPool::with_capacities(&alloc::vec![1; plan.len()]);
        Self {
            name: String::from(name),
            seed: 0,
            duration_ticks,
            symbols_per_tick: DEFAULT_SYMBOLS_PER_TICK,
            channel,
            start_band: plan.len() - 1,
            plan,
            pool,
            initial_tx_gain_db: 0.0,
            policy: DsaPolicy::default(),
            controller_enabled: true,
            ofdm: OfdmConfig::default(),
            block_bits: 0,
            schedule: Vec::new(),
        }
    }

    pub fn tick_duration_s(&self) -> f64 {
        self.symbols_per_tick as f64 * self.ofdm.symbol_duration_s()
    }

    pub fn effective_block_bits(&self) -> usize {
        if self.block_bits == 0 {
            self.ofdm.bits_per_ofdm_symbol()
        } else {
            self.block_bits
        }
    }

    fn channel_state(&self) -> Result<ChannelState> {
        let mut state = ChannelState::new(self.plan.get(self.start_band)?, self.channel.model.clone());
        state.noise_floor_db = self.channel.noise_floor_db;
        state.rx_gain_db = self.channel.rx_gain_db;
        state.tx_gain_db = self.initial_tx_gain_db;
        Ok(state)
    }

    pub fn validate(&self) -> Result<()> {
        if self.duration_ticks == 0 {
            return Err(Error::InvalidScenario("duration_ticks must be positive"));
        }
        if self.symbols_per_tick == 0 {
            return Err(Error::InvalidScenario("symbols_per_tick must be positive"));
        }
        self.ofdm.validate()?;
        self.policy.validate()?;
        if self.plan.len() != self.pool.len() {
            return Err(Error::InvalidScenario("pool must list every band of the plan"));
        }
        if self.start_band >= self.plan.len() {
            return Err(Error::UnknownBand(self.start_band));
        }
        self.pool.reserve(self.start_band)?;
        if !(0.0..=MAX_TX_GAIN_DB).contains(&self.initial_tx_gain_db) {
            return Err(Error::InvalidScenario("initial tx gain must lie in [0, 40] dB"));
        }
        EnvironmentProcess::new(self.channel.beta_sigma_db, self.channel.beta_clip_db, 0)?;
        // every band must be reachable by the channel model
        let mut state = self.channel_state()?;
        for &f in self.plan.bands() {
            state.freq = f;
            link_budget(&state, 0.0)?;
        }
        for ev in &self.schedule {
            if ev.tick >= self.duration_ticks {
                return Err(Error::InvalidScenario("scheduled event after the last tick"));
            }
            match ev.kind {
                EventKind::ObstructionStart { extra_loss_db } => {
                    ObstructionEvent::new(0.0, None, extra_loss_db)?;
                }
                EventKind::ObstructionEnd => {}
                EventKind::SetGain { tx_gain_db } => {
                    if !(0.0..=MAX_TX_GAIN_DB).contains(&tx_gain_db) {
                        return Err(Error::InvalidScenario("forced gain must lie in [0, 40] dB"));
                    }
                }
                EventKind::SetFrequency { freq } => {
                    if self.plan.index_of(freq).is_none() {
                        return Err(Error::InvalidScenario("forced frequency is not in the band plan"));
                    }
                }
                EventKind::SetPoolCapacity { band, .. } => {
                    if band >= self.plan.len() {
                        return Err(Error::UnknownBand(band));
                    }
                }
            }
        }
        Ok(())
    }
}

/// What a metrics row records in its `action` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowAction {
    Hold,
    Downshift,
    Upshift,
    IncreaseGain,
    DecreaseGain,
    DeclareFailure,
    /// A scheduled gain or frequency change with no controller action.
    Forced,
}

impl RowAction {
    pub const ALL: [RowAction; 7] = [
        RowAction::Hold,
        RowAction::Downshift,
        RowAction::Upshift,
        RowAction::IncreaseGain,
        RowAction::DecreaseGain,
        RowAction::DeclareFailure,
        RowAction::Forced,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RowAction::Hold => "hold",
            RowAction::Downshift => "downshift",
            RowAction::Upshift => "upshift",
            RowAction::IncreaseGain => "increase-gain",
            RowAction::DecreaseGain => "decrease-gain",
            RowAction::DeclareFailure => "declare-failure",
            RowAction::Forced => "forced",
        }
    }

    fn is_controller_change(&self) -> bool {
        !matches!(self, RowAction::Hold | RowAction::Forced)
    }
}

impl From<&ActionKind> for RowAction {
    fn from(kind: &ActionKind) -> Self {
        match kind {
            ActionKind::Hold => RowAction::Hold,
            ActionKind::Downshift { .. } => RowAction::Downshift,
            ActionKind::Upshift { .. } => RowAction::Upshift,
            ActionKind::IncreaseGain { .. } => RowAction::IncreaseGain,
            ActionKind::DecreaseGain { .. } => RowAction::DecreaseGain,
            ActionKind::DeclareFailure => RowAction::DeclareFailure,
        }
    }
}

impl fmt::Display for RowAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RowAction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RowAction::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or(Error::InvalidScenario("unknown action name"))
    }
}

pub fn status_name(status: LinkStatus) -> &'static str {
    match status {
        LinkStatus::Active => "active",
        LinkStatus::Failed => "failed",
    }
}

pub fn parse_status(s: &str) -> Result<LinkStatus> {
    match s {
        "active" => Ok(LinkStatus::Active),
        "failed" => Ok(LinkStatus::Failed),
        _ => Err(Error::InvalidScenario("unknown link status")),
    }
}

/// One tick. `band_hz` and `tx_gain_db` are the settings after the tick's
/// action; the measurements were taken with the settings in effect during it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow {
    pub tick: usize,
    pub time_s: f64,
    pub band_hz: f64,
    pub tx_gain_db: f64,
    pub rss_db: f64,
    pub ber: f64,
    pub bler: f64,
    pub beta_db: f64,
    pub obstruction_db: f64,
    pub action: RowAction,
    pub status: LinkStatus,
}

/// A non-Hold action or scheduled event, for the events log.
#[derive(Debug, Clone, PartialEq)]
pub struct LogEvent {
    pub tick: usize,
    pub action: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsLog {
    pub rows: Vec<MetricsRow>,
    pub events: Vec<LogEvent>,
}

/// The received frame of one tick, handed to observers.
#[derive(Debug)]
pub struct TickFrame<'a> {
    pub tick: usize,
    pub time_s: f64,
    pub freq: Frequency,
    pub received: &'a IqFrame,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn run(scenario: &Scenario) -> Result<MetricsLog> {
    run_observed(scenario, |_| {})
}

/// Like [`run`], calling `observe` with every received frame.
pub fn run_observed<F>(s: &Scenario, mut observe: F) -> Result<MetricsLog>
where
    F: FnMut(&TickFrame<'_>),
{
    s.validate()?;
    let modem = OfdmModem::new(s.ofdm)?;
    let tick_s = s.tick_duration_s();
    let bits_per_tick = s.symbols_per_tick * s.ofdm.bits_per_ofdm_symbol();
    let block_bits = s.effective_block_bits();
    let floor = s.channel.noise_floor_db;

    let mut bit_rng = stream_rng(s.seed, BITS_STREAM);
    let mut noise_rng = stream_rng(s.seed, NOISE_STREAM);
    let beta_seed = stream_rng(s.seed, BETA_STREAM).next_u64();
    let mut env = EnvironmentProcess::new(s.channel.beta_sigma_db, s.channel.beta_clip_db, beta_seed)?;

    let mut pool = s.pool.reserve(s.start_band)?;
    let mut cs = ControllerState::new(s.start_band, s.initial_tx_gain_db, &s.policy);
    let mut chan = s.channel_state()?;
    let mut log = MetricsLog {
        rows: Vec::with_capacity(s.duration_ticks),
        events: Vec::new(),
    };

    for tick in 0..s.duration_ticks {
        let t = tick as f64 * tick_s;
        let mut forced = false;
        for ev in s.schedule.iter().filter(|e| e.tick == tick) {
            let reason = apply_event(&ev.kind, t, s, &mut cs, &mut pool, &mut chan)?;
            forced |= ev.kind.is_forced_retune();
            log.events.push(LogEvent {
                tick,
                action: String::from(ev.kind.name()),
                reason,
            });
        }

        chan.beta_db = env.step(tick_s);
        chan.freq = s.plan.get(cs.band_index)?;
        chan.tx_gain_db = cs.tx_gain_db;

        let tx_bits = fill_bits(&mut bit_rng, bits_per_tick);
        let tx_frame = modem.modulate(&qam16_modulate(&tx_bits)?)?;
        let rx_frame = apply_channel(&tx_frame, &chan, t, &mut noise_rng)?;
        observe(&TickFrame {
            tick,
            time_s: t,
            freq: chan.freq,
            received: &rx_frame,
        });
        let mut tones = modem.demodulate(&rx_frame)?;
        let rss_db = tone_power_db(&tones)?;
        normalize_tone_power(&mut tones);
        let rx_bits = qam16_demodulate(&tones);
        let metrics = LinkMetrics {
            rss_db,
            ber: compute_ber(&tx_bits, &rx_bits)?,
            bler: compute_bler(&tx_bits, &rx_bits, block_bits)?,
            snr_db: rss_db - floor,
        };

        let mut action = if forced { RowAction::Forced } else { RowAction::Hold };
        if s.controller_enabled {
            let decided = evaluate(&metrics, &s.policy, &s.plan, &pool, &cs, floor);
            let applied = match apply_action(&cs, &decided, &s.plan, &pool) {
                Ok(next) => Some((decided, next)),
                Err(_) => {
                    let hold = Action::hold("rejected");
                    apply_action(&cs, &hold, &s.plan, &pool).ok().map(|next| (hold, next))
                }
            };
            if let Some((decided, (next_cs, next_pool))) = applied {
                if !decided.kind.is_hold() {
                    action = RowAction::from(&decided.kind);
                    log.events.push(LogEvent {
                        tick,
                        action: String::from(decided.kind.name()),
                        reason: decided.reason,
                    });
                }
                cs = next_cs;
                pool = next_pool;
            }
        } else {
            cs.ticks_since_change = cs.ticks_since_change.saturating_add(1);
        }

        log.rows.push(MetricsRow {
            tick,
            time_s: t,
            band_hz: s.plan.get(cs.band_index)?.hz(),
            tx_gain_db: cs.tx_gain_db,
            rss_db,
            ber: metrics.ber,
            bler: metrics.bler,
            beta_db: chan.beta_db,
            obstruction_db: active_obstruction_loss(&chan, t),
            action,
            status: cs.status,
        });
    }
    Ok(log)
}

fn apply_event(
    kind: &EventKind,
    t: f64,
    s: &Scenario,
    cs: &mut ControllerState,
    pool: &mut SpectrumPool,
    chan: &mut ChannelState,
) -> Result<String> {
    Ok(match *kind {
        EventKind::ObstructionStart { extra_loss_db } => {
            chan.obstructions.push(ObstructionEvent::new(t, None, extra_loss_db)?);
            format!("obstruction adds {extra_loss_db} dB")
        }
        EventKind::ObstructionEnd => {
            for o in chan.obstructions.iter_mut().filter(|o| o.end_s.is_none()) {
                o.end_s = Some(t);
            }
            String::from("obstructions cleared")
        }
        EventKind::SetGain { tx_gain_db } => {
            cs.tx_gain_db = tx_gain_db;
            cs.ticks_since_change = 0;
            format!("tx gain forced to {tx_gain_db} dB")
        }
        EventKind::SetFrequency { freq } => {
            let to = s
                .plan
                .index_of(freq)
                .ok_or(Error::InvalidScenario("forced frequency is not in the band plan"))?;
            if to != cs.band_index && cs.status == LinkStatus::Active {
                *pool = pool.transfer(cs.band_index, to)?;
            }
            cs.band_index = to;
            cs.ticks_since_change = 0;
            format!("carrier forced to {} Hz", freq.hz())
        }
        EventKind::SetPoolCapacity { band, units } => {
            *pool = pool.set_capacity(band, units)?;
            format!("band {band} capacity set to {units}")
        }
    })
}

/// Maximal run of ticks sharing the same band, gain and obstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    pub start_tick: usize,
    /// Exclusive.
    pub end_tick: usize,
    pub band_hz: f64,
    pub tx_gain_db: f64,
    pub obstruction_db: f64,
    /// Mean of the per-tick dB values.
    pub mean_rss_db: f64,
}

impl Phase {
    pub fn ticks(&self) -> usize {
        self.end_tick - self.start_tick
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub ticks: usize,
    /// Ticks spent on each band (band in effect after the tick's action).
    pub dwell_ticks: Vec<(f64, usize)>,
    pub action_counts: Vec<(RowAction, usize)>,
    pub phases: Vec<Phase>,
    pub failed: bool,
    pub band_transitions: usize,
    pub final_band_hz: f64,
    pub final_tx_gain_db: f64,
}

impl Summary {
    pub fn count(&self, action: RowAction) -> usize {
        self.action_counts
            .iter()
            .find(|(a, _)| *a == action)
            .map_or(0, |&(_, n)| n)
    }
}

pub fn summarize(log: &MetricsLog) -> Result<Summary> {
    let rows = &log.rows;
    let last = rows.last().ok_or(Error::EmptyLog)?;

    let mut dwell: Vec<(f64, usize)> = Vec::new();
    for r in rows {
        match dwell.iter_mut().find(|(b, _)| *b == r.band_hz) {
            Some(entry) => entry.1 += 1,
            None => dwell.push((r.band_hz, 1)),
        }
    }
    dwell.sort_by(|a, b| a.0.total_cmp(&b.0));

    let action_counts = RowAction::ALL
        .into_iter()
        .map(|a| (a, rows.iter().filter(|r| r.action == a).count()))
        .collect();

    // A controller action lands on the row after the measurement, so that
    // row's RSS belongs to the settings of the previous row.
    let mut phases: Vec<Phase> = Vec::new();
    let mut sums: Vec<f64> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let (band, gain) = if r.action.is_controller_change() && i > 0 {
            (rows[i - 1].band_hz, rows[i - 1].tx_gain_db)
        } else {
            (r.band_hz, r.tx_gain_db)
        };
        let same = phases
            .last()
            .is_some_and(|p| p.band_hz == band && p.tx_gain_db == gain && p.obstruction_db == r.obstruction_db);
        if same {
            let p = phases.last_mut().unwrap();
            p.end_tick = i + 1;
            *sums.last_mut().unwrap() += r.rss_db;
        } else {
            phases.push(Phase {
                start_tick: i,
                end_tick: i + 1,
                band_hz: band,
                tx_gain_db: gain,
                obstruction_db: r.obstruction_db,
                mean_rss_db: 0.0,
            });
            sums.push(r.rss_db);
        }
    }
    for (p, sum) in phases.iter_mut().zip(sums) {
        p.mean_rss_db = sum / p.ticks() as f64;
    }

    Ok(Summary {
        ticks: rows.len(),
        dwell_ticks: dwell,
        action_counts,
        phases,
        failed: rows.iter().any(|r| r.status == LinkStatus::Failed),
        band_transitions: rows.windows(2).filter(|w| w[0].band_hz != w[1].band_hz).count(),
        final_band_hz: last.band_hz,
        final_tx_gain_db: last.tx_gain_db,
    })
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ticks: {}", self.ticks)?;
        writeln!(f, "failed: {}", self.failed)?;
        writeln!(f, "band transitions: {}", self.band_transitions)?;
        writeln!(f, "final band: {} Hz", self.final_band_hz)?;
        writeln!(f, "final tx gain: {} dB", self.final_tx_gain_db)?;
        writeln!(f, "dwell ticks per band:")?;
        for (band, n) in &self.dwell_ticks {
            writeln!(f, "  {band} Hz: {n}")?;
        }
        writeln!(f, "action counts:")?;
        for (a, n) in &self.action_counts {
            writeln!(f, "  {a}: {n}")?;
        }
        writeln!(f, "phases:")?;
        for p in &self.phases {
            writeln!(
                f,
                "  ticks {}..{}: band {} Hz, tx gain {} dB, obstruction {} dB, mean rss {:.3} dB",
                p.start_tick, p.end_tick, p.band_hz, p.tx_gain_db, p.obstruction_db, p.mean_rss_db
            )?;
        }
        Ok(())
    }
}
