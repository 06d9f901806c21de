//! Dynamic spectrum access controller.
//!
//! Each tick the controller looks at the measured link metrics and decides to
//! hold, move the carrier to a lower (or back to a higher) band, step the
//! transmit gain, or declare the link failed. Band moves need free capacity in
//! the [`SpectrumPool`]; uplink and downlink share the band (full duplex), so
//! a move is a single reservation transfer.
//!
//! Oscillation is prevented by a dwell time after every change and by a
//! hysteresis margin on the way back up. The upshift test also charges the
//! predictable `20 log10(f_up / f_cur)` penalty of the higher carrier.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::channel::MAX_TX_GAIN_DB;
use crate::phy::LinkMetrics;
use crate::{Error, Frequency, Result};

// gain comparisons tolerate float noise from repeated additions
const GAIN_EPS: f64 = 1e-9;

/// Candidate carriers in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct BandPlan {
    bands: Vec<Frequency>,
}

impl BandPlan {
    pub fn new(bands: Vec<Frequency>) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::InvalidPolicy("band plan is empty"));
        }
        if bands.windows(2).any(|w| !(w[1].hz() > w[0].hz())) {
            return Err(Error::InvalidPolicy("band plan must be strictly ascending"));
        }
        Ok(Self { bands })
    }

    pub fn bands(&self) -> &[Frequency] {
        &self.bands
    }

    pub fn len(&self) -> usize {
        self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }

    pub fn get(&self, index: usize) -> Result<Frequency> {
        self.bands.get(index).copied().ok_or(Error::UnknownBand(index))
    }

    /// Index of the band within one part in 1e9 of `freq`.
    pub fn index_of(&self, freq: Frequency) -> Option<usize> {
        self.bands
            .iter()
            .position(|b| (b.hz() - freq.hz()).abs() <= 1e-9 * b.hz())
    }
}

impl Default for BandPlan {
    /// 830 MHz, 1.2 GHz, 1.6 GHz, 1.9 GHz.
    fn default() -> Self {
        let bands = [830e6, 1.2e9, 1.6e9, 1.9e9]
            .iter()
            .map(|&hz| Frequency::from_hz(hz).expect("positive"))
            .collect();
        Self { bands }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandSlot {
    pub capacity: u32,
    pub occupied: u32,
}

/// Per-band resource units, indexed like the [`BandPlan`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumPool {
    slots: Vec<BandSlot>,
}

impl SpectrumPool {
    pub fn with_capacities(capacities: &[u32]) -> Self {
        Self {
            slots: capacities
                .iter()
                .map(|&capacity| BandSlot { capacity, occupied: 0 })
                .collect(),
        }
    }

    pub fn from_slots(slots: Vec<BandSlot>) -> Result<Self> {
        for (band, s) in slots.iter().enumerate() {
            if s.occupied > s.capacity {
                return Err(Error::CapacityBelowOccupancy {
                    band,
                    capacity: s.capacity,
                    occupied: s.occupied,
                });
            }
        }
        Ok(Self { slots })
    }

    pub fn slots(&self) -> &[BandSlot] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slot(&self, band: usize) -> Result<BandSlot> {
        self.slots.get(band).copied().ok_or(Error::UnknownBand(band))
    }

    pub fn has_free(&self, band: usize) -> bool {
        self.slots.get(band).is_some_and(|s| s.occupied < s.capacity)
    }

    pub fn total_occupied(&self) -> u64 {
        self.slots.iter().map(|s| u64::from(s.occupied)).sum()
    }

    pub fn reserve(&self, band: usize) -> Result<Self> {
        let slot = self.slot(band)?;
        if slot.occupied >= slot.capacity {
            return Err(Error::BandFull(band));
        }
        let mut next = self.clone();
        next.slots[band].occupied += 1;
        Ok(next)
    }

    pub fn release(&self, band: usize) -> Result<Self> {
        let slot = self.slot(band)?;
        if slot.occupied == 0 {
            return Err(Error::BandEmpty(band));
        }
        let mut next = self.clone();
        next.slots[band].occupied -= 1;
        Ok(next)
    }

    /// Moves one unit from `from` to `to`, or fails leaving nothing changed.
    pub fn transfer(&self, from: usize, to: usize) -> Result<Self> {
        self.release(from)?.reserve(to)
    }

    pub fn set_capacity(&self, band: usize, capacity: u32) -> Result<Self> {
        let slot = self.slot(band)?;
        if capacity < slot.occupied {
            return Err(Error::CapacityBelowOccupancy {
                band,
                capacity,
                occupied: slot.occupied,
            });
        }
        let mut next = self.clone();
        next.slots[band].capacity = capacity;
        Ok(next)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preference {
    #[default]
    DownshiftFirst,
    GainFirst,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DsaPolicy {
    /// Degraded when `rss < floor + rss_margin_db`.
    pub rss_margin_db: f64,
    /// Degraded when `bler > bler_max`.
    pub bler_max: f64,
    /// Extra headroom required before moving back up or lowering gain.
    /// `f64::INFINITY` disables both.
    pub hysteresis_db: f64,
    pub dwell_ticks: u32,
    pub gain_step_db: f64,
    pub gain_max_db: f64,
    pub prefer: Preference,
}

impl Default for DsaPolicy {
    fn default() -> Self {
        Self {
            rss_margin_db: 3.0,
            bler_max: 0.1,
            hysteresis_db: 3.0,
            dwell_ticks: 5,
            gain_step_db: 13.0,
            gain_max_db: MAX_TX_GAIN_DB,
            prefer: Preference::DownshiftFirst,
        }
    }
}

impl DsaPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.rss_margin_db.is_finite() && self.rss_margin_db >= 0.0) {
            return Err(Error::InvalidPolicy("rss_margin_db must be a non-negative number"));
        }
        if !(self.bler_max >= 0.0) {
            return Err(Error::InvalidPolicy("bler_max must be non-negative"));
        }
        if !(self.hysteresis_db >= 0.0) {
            return Err(Error::InvalidPolicy("hysteresis_db must be non-negative"));
        }
        if self.dwell_ticks == 0 {
            return Err(Error::InvalidPolicy("dwell_ticks must be positive"));
        }
        if !(self.gain_step_db.is_finite() && self.gain_step_db > 0.0) {
            return Err(Error::InvalidPolicy("gain_step_db must be positive"));
        }
        if !(0.0..=MAX_TX_GAIN_DB).contains(&self.gain_max_db) {
            return Err(Error::InvalidPolicy("gain_max_db must lie in [0, 40]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkStatus {
    Active,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerState {
    pub band_index: usize,
    pub tx_gain_db: f64,
    pub ticks_since_change: u32,
    pub status: LinkStatus,
}

impl ControllerState {
    /// Active at `band_index`, free to act on the first tick.
    pub fn new(band_index: usize, tx_gain_db: f64, policy: &DsaPolicy) -> Self {
        Self {
            band_index,
            tx_gain_db,
            ticks_since_change: policy.dwell_ticks,
            status: LinkStatus::Active,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ActionKind {
    Hold,
    Downshift { to: usize },
    Upshift { to: usize },
    IncreaseGain { to_db: f64 },
    DecreaseGain { to_db: f64 },
    DeclareFailure,
}

impl ActionKind {
    pub fn name(&self) -> &'static str {
        match self {
            ActionKind::Hold => "hold",
            ActionKind::Downshift { .. } => "downshift",
            ActionKind::Upshift { .. } => "upshift",
            ActionKind::IncreaseGain { .. } => "increase-gain",
            ActionKind::DecreaseGain { .. } => "decrease-gain",
            ActionKind::DeclareFailure => "declare-failure",
        }
    }

    pub fn is_hold(&self) -> bool {
        matches!(self, ActionKind::Hold)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    pub kind: ActionKind,
    pub reason: String,
}

impl Action {
    fn new(kind: ActionKind, reason: String) -> Self {
        Self { kind, reason }
    }

    pub fn hold(reason: &str) -> Self {
        Self::new(ActionKind::Hold, String::from(reason))
    }
}

fn nearest_free_below(pool: &SpectrumPool, current: usize) -> Option<usize> {
    (0..current).rev().find(|&b| pool.has_free(b))
}

fn nearest_free_above(pool: &SpectrumPool, plan: &BandPlan, current: usize) -> Option<usize> {
    (current + 1..plan.len()).find(|&b| pool.has_free(b))
}

/// Pure decision function over one tick's metrics.
pub fn evaluate(
    metrics: &LinkMetrics,
    policy: &DsaPolicy,
    plan: &BandPlan,
    pool: &SpectrumPool,
    cs: &ControllerState,
    noise_floor_db: f64,
) -> Action {
    if cs.status == LinkStatus::Failed {
        return Action::hold("link failed");
    }
    if cs.ticks_since_change < policy.dwell_ticks {
        return Action::hold("dwell");
    }
    let Ok(cur_freq) = plan.get(cs.band_index) else {
        return Action::hold("band outside plan");
    };
    let threshold = noise_floor_db + policy.rss_margin_db;
    let rss_low = metrics.rss_db < threshold;
    let bler_high = metrics.bler > policy.bler_max;

    if rss_low || bler_high {
        let why = if rss_low {
            format!("rss {:.2} dB below {:.2} dB", metrics.rss_db, threshold)
        } else {
            format!("bler {:.4} above {:.4}", metrics.bler, policy.bler_max)
        };
        let down = nearest_free_below(pool, cs.band_index).map(|to| {
            let f = plan.get(to).map(|f| f.hz()).unwrap_or(f64::NAN);
            Action::new(ActionKind::Downshift { to }, format!("{why}; downshift to {f} Hz"))
        });
        let gain_to = cs.tx_gain_db + policy.gain_step_db;
        let gain = (gain_to <= policy.gain_max_db + GAIN_EPS).then(|| {
            Action::new(
                ActionKind::IncreaseGain { to_db: gain_to },
                format!("{why}; tx gain to {gain_to} dB"),
            )
        });
        let choice = match policy.prefer {
            Preference::DownshiftFirst => down.or(gain),
            Preference::GainFirst => gain.or(down),
        };
        return choice.unwrap_or_else(|| {
            Action::new(
                ActionKind::DeclareFailure,
                format!("{why}; no free lower band and gain exhausted"),
            )
        });
    }

    let headroom = threshold + policy.hysteresis_db;
    let upshift = nearest_free_above(pool, plan, cs.band_index).and_then(|to| {
        let f_up = plan.get(to).ok()?;
        let penalty = 20.0 * libm::log10(f_up.hz() / cur_freq.hz());
        (metrics.rss_db > headroom + penalty).then(|| {
            Action::new(
                ActionKind::Upshift { to },
                format!(
                    "rss {:.2} dB clears {:.2} dB; upshift to {} Hz",
                    metrics.rss_db,
                    headroom + penalty,
                    f_up.hz()
                ),
            )
        })
    });
    let decrease = (cs.tx_gain_db > GAIN_EPS).then_some(()).and_then(|_| {
        let step = policy.gain_step_db.min(cs.tx_gain_db);
        let to_db = (cs.tx_gain_db - step).max(0.0);
        (metrics.rss_db - step > headroom).then(|| {
            Action::new(
                ActionKind::DecreaseGain { to_db },
                format!(
                    "rss {:.2} dB has {:.2} dB spare; tx gain to {to_db} dB",
                    metrics.rss_db,
                    metrics.rss_db - headroom
                ),
            )
        })
    });
    // recover in the reverse of the preferred rescue order
    let choice = match policy.prefer {
        Preference::DownshiftFirst => upshift.or(decrease),
        Preference::GainFirst => decrease.or(upshift),
    };
    choice.unwrap_or_else(|| Action::hold("healthy"))
}

/// Applies `action`, returning the new controller state and pool. Infeasible
/// actions are rejected and leave both untouched.
pub fn apply_action(
    cs: &ControllerState,
    action: &Action,
    plan: &BandPlan,
    pool: &SpectrumPool,
) -> Result<(ControllerState, SpectrumPool)> {
    if plan.len() != pool.len() {
        return Err(Error::InvalidPolicy("band plan and pool sizes differ"));
    }
    if cs.status == LinkStatus::Failed && !action.kind.is_hold() {
        return Err(Error::ActionRejected("link has failed"));
    }
    let mut next = *cs;
    let next_pool = match action.kind {
        ActionKind::Hold => {
            next.ticks_since_change = cs.ticks_since_change.saturating_add(1);
            return Ok((next, pool.clone()));
        }
        ActionKind::Downshift { to } => {
            if to >= cs.band_index {
                return Err(Error::ActionRejected("downshift target is not below the current band"));
            }
            next.band_index = to;
            pool.transfer(cs.band_index, to)?
        }
        ActionKind::Upshift { to } => {
            if to <= cs.band_index || to >= plan.len() {
                return Err(Error::ActionRejected("upshift target is not above the current band"));
            }
            next.band_index = to;
            pool.transfer(cs.band_index, to)?
        }
        ActionKind::IncreaseGain { to_db } => {
            if !(to_db > cs.tx_gain_db) || to_db > MAX_TX_GAIN_DB + GAIN_EPS {
                return Err(Error::ActionRejected("gain increase outside [current, 40 dB]"));
            }
            next.tx_gain_db = to_db.min(MAX_TX_GAIN_DB);
            pool.clone()
        }
        ActionKind::DecreaseGain { to_db } => {
            if !(to_db < cs.tx_gain_db) || to_db < 0.0 {
                return Err(Error::ActionRejected("gain decrease outside [0 dB, current]"));
            }
            next.tx_gain_db = to_db;
            pool.clone()
        }
        ActionKind::DeclareFailure => {
            next.status = LinkStatus::Failed;
            pool.release(cs.band_index)?
        }
    };
    next.ticks_since_change = 0;
    Ok((next, next_pool))
}
