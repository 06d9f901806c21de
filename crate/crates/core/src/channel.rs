//! Link budget and sample-level channel.
//!
//! The expected per-tone received power at time `t` is
//!
//! ```text
//! base(f) + tx_gain + rx_gain + beta(t) - sum(active obstruction losses)
//! ```
//!
//! where `base(f)` comes from one of three models: the fitted
//! `alpha - 20 log10 f`, the ITU indoor formula with an explicit transmit
//! power, or interpolation of a measured RSS curve. The channel is flat across
//! the occupied band and perfectly synchronized.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::phy::{add_awgn, IqFrame};
use crate::propagation::{self, AlphaEstimate, MeasurementSet, PathLossParams};
use crate::{db_to_power, Error, Frequency, Result};

pub const DEFAULT_RX_GAIN_DB: f64 = 10.0;
pub const DEFAULT_NOISE_FLOOR_DB: f64 = -90.0;
pub const MAX_TX_GAIN_DB: f64 = 40.0;
pub const DEFAULT_BETA_SIGMA_DB: f64 = 0.2;
pub const DEFAULT_BETA_CLIP_DB: f64 = 2.0;

/// Source of the frequency-dependent part of the budget.
#[derive(Debug, Clone, PartialEq)]
pub enum LinkModel {
    AnalyticAlpha(AlphaEstimate),
    ItuModel { params: PathLossParams, p_t_dbm: f64 },
    Empirical(MeasurementSet),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstructionEvent {
    pub start_s: f64,
    /// `None` while the obstruction is still in place.
    pub end_s: Option<f64>,
    pub extra_loss_db: f64,
}

impl ObstructionEvent {
    pub fn new(start_s: f64, end_s: Option<f64>, extra_loss_db: f64) -> Result<Self> {
        if !(extra_loss_db.is_finite() && extra_loss_db >= 0.0) {
            return Err(Error::InvalidChannel("obstruction loss must be non-negative"));
        }
        if let Some(end) = end_s {
            if !(end > start_s) {
                return Err(Error::InvalidChannel("obstruction must end after it starts"));
            }
        }
        Ok(Self {
            start_s,
            end_s,
            extra_loss_db,
        })
    }

    pub fn is_active(&self, t: f64) -> bool {
        self.start_s <= t && self.end_s.is_none_or(|end| t < end)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState {
    pub freq: Frequency,
    pub tx_gain_db: f64,
    pub rx_gain_db: f64,
    pub model: LinkModel,
    pub noise_floor_db: f64,
    pub beta_db: f64,
    pub obstructions: Vec<ObstructionEvent>,
}

impl ChannelState {
    pub fn new(freq: Frequency, model: LinkModel) -> Self {
        Self {
            freq,
            tx_gain_db: 0.0,
            rx_gain_db: DEFAULT_RX_GAIN_DB,
            model,
            noise_floor_db: DEFAULT_NOISE_FLOOR_DB,
            beta_db: 0.0,
            obstructions: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=MAX_TX_GAIN_DB).contains(&self.tx_gain_db) {
            return Err(Error::InvalidChannel("tx gain must lie in [0, 40] dB"));
        }
        if !(self.noise_floor_db.is_finite() && self.noise_floor_db < 0.0) {
            return Err(Error::InvalidChannel("noise floor must be negative"));
        }
        if !self.rx_gain_db.is_finite() || !self.beta_db.is_finite() {
            return Err(Error::InvalidChannel("gains must be finite"));
        }
        if let LinkModel::ItuModel { params, .. } = &self.model {
            params.validate()?;
        }
        Ok(())
    }
}

/// One itemized term of a link budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetTerm {
    Alpha,
    /// `-20 log10 f` in the alpha's unit convention.
    FrequencyTerm,
    TransmitPower,
    /// Negated ITU path loss.
    PathLoss,
    /// Interpolated measured RSS.
    Measured,
    TxGain,
    RxGain,
    Beta,
    /// Negated sum of active obstruction losses.
    Obstruction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    pub expected_rss_db: f64,
    pub noise_db: f64,
    pub snr_db: f64,
    pub components: Vec<(BudgetTerm, f64)>,
}

impl LinkBudget {
    pub fn term(&self, term: BudgetTerm) -> Option<f64> {
        self.components.iter().find(|(t, _)| *t == term).map(|&(_, v)| v)
    }
}

/// Sum of losses of obstructions active at `t` (`start <= t < end`).
pub fn active_obstruction_loss(state: &ChannelState, t: f64) -> f64 {
    state
        .obstructions
        .iter()
        .filter(|o| o.is_active(t))
        .fold(0.0, |acc, o| acc + o.extra_loss_db)
}

pub fn link_budget(state: &ChannelState, t: f64) -> Result<LinkBudget> {
    state.validate()?;
    let mut components = Vec::with_capacity(6);
    match &state.model {
        LinkModel::AnalyticAlpha(alpha) => {
            let rss = propagation::rss_from_alpha(alpha, state.freq);
            components.push((BudgetTerm::Alpha, alpha.alpha_db));
            components.push((BudgetTerm::FrequencyTerm, rss - alpha.alpha_db));
        }
        LinkModel::ItuModel { params, p_t_dbm } => {
            components.push((BudgetTerm::TransmitPower, *p_t_dbm));
            components.push((
                BudgetTerm::PathLoss,
                -propagation::itu_indoor_path_loss(state.freq, params)?,
            ));
        }
        LinkModel::Empirical(set) => {
            components.push((BudgetTerm::Measured, propagation::interpolate_rss(set, state.freq)?));
        }
    }
    components.push((BudgetTerm::TxGain, state.tx_gain_db));
    components.push((BudgetTerm::RxGain, state.rx_gain_db));
    components.push((BudgetTerm::Beta, state.beta_db));
    components.push((BudgetTerm::Obstruction, -active_obstruction_loss(state, t)));

    let expected_rss_db = components.iter().map(|&(_, v)| v).sum::<f64>();
    Ok(LinkBudget {
        expected_rss_db,
        noise_db: state.noise_floor_db,
        snr_db: expected_rss_db - state.noise_floor_db,
        components,
    })
}

/// Scales a 0 dB-referenced frame to the expected RSS and adds white noise
/// whose per-tone power equals the noise floor.
pub fn apply_channel<R: Rng + ?Sized>(frame: &IqFrame, state: &ChannelState, t: f64, rng: &mut R) -> Result<IqFrame> {
    if frame.is_empty() {
        return Err(Error::EmptyFrame);
    }
    let budget = link_budget(state, t)?;
    let mut out = frame.scaled(libm::pow(10.0, budget.expected_rss_db / 20.0));
    // unitary OFDM: per-sample variance equals per-tone power
    add_awgn(&mut out, db_to_power(state.noise_floor_db), rng);
    Ok(out)
}

/// Clipped Gaussian random walk driving the environment term `beta(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentProcess {
    /// Standard deviation per square-root second, dB.
    pub sigma_db: f64,
    pub clip_db: f64,
    pub seed: u64,
    pub current: f64,
    rng: ChaCha8Rng,
}

impl EnvironmentProcess {
    pub fn new(sigma_db: f64, clip_db: f64, seed: u64) -> Result<Self> {
        Self::with_initial(sigma_db, clip_db, seed, 0.0)
    }

    pub fn with_initial(sigma_db: f64, clip_db: f64, seed: u64, initial_db: f64) -> Result<Self> {
        if !(sigma_db.is_finite() && sigma_db >= 0.0) || !(clip_db.is_finite() && clip_db >= 0.0) {
            return Err(Error::InvalidChannel("environment sigma and clip must be non-negative"));
        }
        Ok(Self {
            sigma_db,
            clip_db,
            seed,
            current: initial_db.clamp(-clip_db, clip_db),
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// Advances by `dt` seconds. Non-positive `dt` leaves the process unchanged.
    pub fn step(&mut self, dt: f64) -> f64 {
        if dt > 0.0 && self.sigma_db > 0.0 {
            let z: f64 = self.rng.sample(StandardNormal);
            self.current = (self.current + z * self.sigma_db * libm::sqrt(dt)).clamp(-self.clip_db, self.clip_db);
        }
        self.current
    }

    pub fn stepped(&self, dt: f64) -> Self {
        let mut next = self.clone();
        next.step(dt);
        next
    }
}

impl Default for EnvironmentProcess {
    fn default() -> Self {
        Self::new(DEFAULT_BETA_SIGMA_DB, DEFAULT_BETA_CLIP_DB, 0).expect("defaults are valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::Complex64;
    use crate::phy::{generate_bits, measure_rss, ofdm_modulate, qam16_modulate, OfdmConfig};
    use crate::power_to_db;
    use crate::propagation::{reference, FrequencyUnit};
    use alloc::vec;
    use proptest::prelude::*;

    fn ghz(x: f64) -> Frequency {
        Frequency::from_ghz(x).unwrap()
    }

    fn analytic(alpha: f64, f: Frequency) -> ChannelState {
        let mut s = ChannelState::new(
            f,
            LinkModel::AnalyticAlpha(AlphaEstimate::fixed(alpha, FrequencyUnit::Hz)),
        );
        s.rx_gain_db = 0.0;
        s
    }

    #[test]
    fn analytic_budget_example() {
        let state = analytic(127.25, ghz(1.2));
        let b = link_budget(&state, 0.0).unwrap();
        assert!((b.expected_rss_db + 54.3336249209525).abs() < 1e-9);
        assert_eq!(b.snr_db, b.expected_rss_db + 90.0);

        let mut boosted = state.clone();
        boosted.tx_gain_db = 13.0;
        let up = link_budget(&boosted, 0.0).unwrap();
        assert_eq!(up.expected_rss_db - b.expected_rss_db, 13.0);
    }

    #[test]
    fn empirical_budget_anchor() {
        let mut state = ChannelState::new(
            Frequency::from_mhz(830.0).unwrap(),
            LinkModel::Empirical(reference::set(0)),
        );
        state.rx_gain_db = 0.0;
        assert_eq!(link_budget(&state, 0.0).unwrap().expected_rss_db, -43.09);
        state.freq = ghz(2.4);
        assert!(matches!(link_budget(&state, 0.0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn itu_budget_matches_received_power_model() {
        let params = PathLossParams::same_floor(30.0, 2.0).unwrap();
        let mut state = ChannelState::new(
            Frequency::from_mhz(830.0).unwrap(),
            LinkModel::ItuModel { params, p_t_dbm: 10.0 },
        );
        state.rx_gain_db = 0.0;
        let b = link_budget(&state, 0.0).unwrap();
        assert!((b.expected_rss_db + 29.412461717440905).abs() < 1e-9);
    }

    #[test]
    fn components_sum_to_expected() {
        let mut state = analytic(126.0, ghz(1.6));
        state.tx_gain_db = 26.0;
        state.beta_db = -0.7;
        state.obstructions.push(ObstructionEvent::new(0.0, None, 12.5).unwrap());
        let b = link_budget(&state, 1.0).unwrap();
        let sum: f64 = b.components.iter().map(|c| c.1).sum();
        assert!((sum - b.expected_rss_db).abs() < 1e-9);
        assert_eq!(b.term(BudgetTerm::Obstruction), Some(-12.5));
        assert_eq!(b.term(BudgetTerm::Beta), Some(-0.7));
    }

    #[test]
    fn state_validation() {
        let mut state = analytic(126.0, ghz(1.6));
        state.tx_gain_db = 41.0;
        assert!(link_budget(&state, 0.0).is_err());
        state.tx_gain_db = 0.0;
        state.noise_floor_db = 3.0;
        assert!(link_budget(&state, 0.0).is_err());
        assert!(ObstructionEvent::new(5.0, Some(5.0), 1.0).is_err());
        assert!(ObstructionEvent::new(5.0, None, -1.0).is_err());
    }

    #[test]
    fn obstruction_loss_examples() {
        let mut state = analytic(126.0, ghz(1.9));
        assert_eq!(active_obstruction_loss(&state, 1.0), 0.0);
        state
            .obstructions
            .push(ObstructionEvent::new(0.5, Some(2.0), 25.0).unwrap());
        assert_eq!(active_obstruction_loss(&state, 0.4), 0.0);
        assert_eq!(active_obstruction_loss(&state, 0.5), 25.0);
        assert_eq!(active_obstruction_loss(&state, 2.0), 0.0);
        state.obstructions[0] = ObstructionEvent::new(0.0, None, 10.0).unwrap();
        state.obstructions.push(ObstructionEvent::new(0.0, None, 15.0).unwrap());
        assert_eq!(active_obstruction_loss(&state, 1.0), 25.0);
    }

    fn unit_frame(symbols: usize) -> IqFrame {
        let cfg = OfdmConfig::default();
        ofdm_modulate(&qam16_modulate(&generate_bits(symbols * 800, 1)).unwrap(), &cfg).unwrap()
    }

    #[test]
    fn apply_channel_scales_to_budget() {
        let mut state = ChannelState::new(
            Frequency::from_mhz(830.0).unwrap(),
            LinkModel::Empirical(reference::set(0)),
        );
        state.rx_gain_db = 0.0;
        let out = apply_channel(&unit_frame(100), &state, 0.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let rss = measure_rss(&out, &OfdmConfig::default()).unwrap();
        assert!((rss + 43.09).abs() < 0.5, "{rss}");
    }

    #[test]
    fn apply_channel_below_floor_reads_noise() {
        let mut state = analytic(0.0, ghz(1.0));
        // expected rss 30 dB under the floor
        state.model = LinkModel::AnalyticAlpha(AlphaEstimate::fixed(-120.0 + 20.0 * 9.0, FrequencyUnit::Hz));
        let b = link_budget(&state, 0.0).unwrap();
        assert!((b.expected_rss_db + 120.0).abs() < 1e-9);
        let out = apply_channel(&unit_frame(1000), &state, 0.0, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let rss = measure_rss(&out, &OfdmConfig::default()).unwrap();
        let oracle = power_to_db(db_to_power(-120.0) + db_to_power(-90.0));
        assert!((rss - oracle).abs() < 0.5, "{rss} vs {oracle}");
        assert!((rss + 90.0).abs() < 0.5);
    }

    #[test]
    fn noise_only_calibration() {
        let state = analytic(100.0, ghz(1.9));
        let cfg = OfdmConfig::default();
        let zeros = IqFrame {
            samples: vec![Complex64::new(0.0, 0.0); 1000 * cfg.symbol_len()],
            sample_rate_hz: cfg.sample_rate_hz,
            symbols_contained: 1000,
        };
        let out = apply_channel(&zeros, &state, 0.0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert!((measure_rss(&out, &cfg).unwrap() + 90.0).abs() < 0.5);
    }

    #[test]
    fn apply_channel_is_deterministic() {
        let state = analytic(127.0, ghz(1.2));
        let frame = unit_frame(3);
        let a = apply_channel(&frame, &state, 0.0, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let b = apply_channel(&frame, &state, 0.0, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
        let empty = IqFrame {
            samples: vec![],
            sample_rate_hz: 1.0,
            symbols_contained: 0,
        };
        assert_eq!(
            apply_channel(&empty, &state, 0.0, &mut ChaCha8Rng::seed_from_u64(4)),
            Err(Error::EmptyFrame)
        );
    }

    #[test]
    fn environment_degenerate_cases() {
        let mut still = EnvironmentProcess::with_initial(0.0, 2.0, 1, 0.5).unwrap();
        for _ in 0..100 {
            assert_eq!(still.step(1.0), 0.5);
        }
        let mut clipped = EnvironmentProcess::new(5.0, 0.0, 1).unwrap();
        for _ in 0..100 {
            assert_eq!(clipped.step(1.0), 0.0);
        }
        let p = EnvironmentProcess::new(1.0, 2.0, 3).unwrap();
        assert_eq!(p.stepped(0.0).current, p.current);
        assert_eq!(p.stepped(0.5), p.stepped(0.5));
    }

    #[test]
    fn environment_respects_clip() {
        let mut env = EnvironmentProcess::new(0.5, 3.0, 42).unwrap();
        let mut values = vec![];
        for _ in 0..10_000 {
            let v = env.step(1.0);
            assert!(v.abs() <= 3.0);
            values.push(v);
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
        assert!(libm::sqrt(var) <= 3.0);
        // the walk actually moves
        assert!(values.iter().any(|v| v.abs() > 1.0));
    }

    proptest! {
        #[test]
        fn gain_additivity(g in 0.0f64..20.0, delta in 0.0f64..20.0, alpha in 100.0f64..140.0) {
            let mut a = analytic(alpha, ghz(1.9));
            a.tx_gain_db = g;
            let mut b = a.clone();
            b.tx_gain_db = g + delta;
            let d = link_budget(&b, 0.0).unwrap().expected_rss_db - link_budget(&a, 0.0).unwrap().expected_rss_db;
            prop_assert!((d - delta).abs() < 1e-9);
        }

        #[test]
        fn frequency_shift_law(f1 in 5e8f64..3e9, f2 in 5e8f64..3e9, n in 10.0f64..40.0) {
            let ratio = 20.0 * libm::log10(f1 / f2);
            let mut a = analytic(127.0, Frequency::from_hz(f1).unwrap());
            let mut b = a.clone();
            b.freq = Frequency::from_hz(f2).unwrap();
            let d = link_budget(&b, 0.0).unwrap().expected_rss_db - link_budget(&a, 0.0).unwrap().expected_rss_db;
            prop_assert!((d - ratio).abs() < 1e-9);

            let params = PathLossParams::same_floor(n, 2.0).unwrap();
            a.model = LinkModel::ItuModel { params, p_t_dbm: 0.0 };
            b.model = a.model.clone();
            let d = link_budget(&b, 0.0).unwrap().expected_rss_db - link_budget(&a, 0.0).unwrap().expected_rss_db;
            prop_assert!((d - ratio).abs() < 1e-9);
        }

        #[test]
        fn obstructions_never_help(losses in proptest::collection::vec((0.0f64..40.0, 0.0f64..10.0), 0..6), t in 0.0f64..10.0) {
            let mut state = analytic(127.0, ghz(1.6));
            let mut prev = link_budget(&state, t).unwrap().expected_rss_db;
            for (loss, start) in losses {
                state.obstructions.push(ObstructionEvent::new(start, None, loss).unwrap());
                let now = link_budget(&state, t).unwrap().expected_rss_db;
                prop_assert!(now <= prev);
                prev = now;
            }
        }
    }
}
