//! ITU indoor path loss, alpha estimation and RSS-vs-frequency curves.
//!
//! The indoor model is `PL = 20 log10(f_MHz) + N log10(d) + P_f(n) - 28`.
//! With transmit power and distance held fixed, received power collapses to
//! `P_r = alpha - 20 log10(f)`, where `alpha` absorbs every
//! frequency-independent term. Measured sessions are turned into an alpha
//! estimate by averaging the per-point alpha, and into a continuous curve by
//! interpolating linearly in `(log10 f, dB)`.

use alloc::vec::Vec;

use crate::{Error, Frequency, Result};

/// Parameters of the ITU indoor path-loss model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossParams {
    /// Distance power loss coefficient `N`.
    pub n_coeff: f64,
    pub distance_m: f64,
    pub floors: u32,
    /// Floor penetration loss `P_f(n)` in dB.
    pub floor_penetration_db: f64,
}

impl PathLossParams {
    /// Same-floor link: no penetration term.
    pub fn same_floor(n_coeff: f64, distance_m: f64) -> Result<Self> {
        Self::new(n_coeff, distance_m, 0, 0.0)
    }

    pub fn new(n_coeff: f64, distance_m: f64, floors: u32, floor_penetration_db: f64) -> Result<Self> {
        let params = Self {
            n_coeff,
            distance_m,
            floors,
            floor_penetration_db,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.distance_m.is_finite() && self.distance_m > 0.0) {
            return Err(Error::InvalidPathLoss("distance must be positive"));
        }
        if !(self.n_coeff.is_finite() && self.n_coeff > 0.0) {
            return Err(Error::InvalidPathLoss(
                "distance power loss coefficient must be positive",
            ));
        }
        if !(self.floor_penetration_db.is_finite() && self.floor_penetration_db >= 0.0) {
            return Err(Error::InvalidPathLoss("floor penetration loss must be non-negative"));
        }
        if self.floors == 0 && self.floor_penetration_db != 0.0 {
            return Err(Error::InvalidPathLoss(
                "floor penetration loss requires at least one floor",
            ));
        }
        Ok(())
    }
}

/// Unit in which `f` enters `alpha - 20 log10(f)`.
///
/// The two conventions differ by a constant 120 dB in alpha and predict the
/// same received power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrequencyUnit {
    #[default]
    Hz,
    MHz,
}

impl FrequencyUnit {
    fn value(self, f: Frequency) -> f64 {
        match self {
            FrequencyUnit::Hz => f.hz(),
            FrequencyUnit::MHz => f.mhz(),
        }
    }
}

/// One received-power sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RssPoint {
    pub freq: Frequency,
    pub rss_dbm: f64,
}

/// RSS-vs-frequency samples from one measurement session.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    label: alloc::string::String,
    points: Vec<RssPoint>,
}

impl MeasurementSet {
    pub fn new(label: impl Into<alloc::string::String>, points: Vec<RssPoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooFewPoints(points.len()));
        }
        for (index, pair) in points.windows(2).enumerate() {
            if !(pair[1].freq.hz() > pair[0].freq.hz()) {
                return Err(Error::FrequenciesNotIncreasing { index: index + 1 });
            }
        }
        Ok(Self {
            label: label.into(),
            points,
        })
    }

    /// Convenience constructor from `(hz, dBm)` pairs.
    pub fn from_pairs(label: &str, pairs: &[(f64, f64)]) -> Result<Self> {
        let points = pairs
            .iter()
            .map(|&(hz, rss_dbm)| {
                Ok(RssPoint {
                    freq: Frequency::from_hz(hz)?,
                    rss_dbm,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(label, points)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn points(&self) -> &[RssPoint] {
        &self.points
    }

    pub fn min_freq(&self) -> Frequency {
        self.points[0].freq
    }

    pub fn max_freq(&self) -> Frequency {
        self.points[self.points.len() - 1].freq
    }
}

/// Result of fitting `P_r = alpha - 20 log10(f)` to a measurement set.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaEstimate {
    pub alpha_db: f64,
    /// `measured - model` at each point, same order as the set.
    pub residuals_db: Vec<f64>,
    pub unit: FrequencyUnit,
}

impl AlphaEstimate {
    /// An estimate with no associated fit, for driving the analytic model directly.
    pub fn fixed(alpha_db: f64, unit: FrequencyUnit) -> Self {
        Self {
            alpha_db,
            residuals_db: Vec::new(),
            unit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveMode {
    AnalyticAlpha,
    PiecewiseLogLinear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RssCurve {
    pub samples: Vec<RssPoint>,
    pub mode: CurveMode,
}

/// ITU indoor path loss in dB.
pub fn itu_indoor_path_loss(f: Frequency, p: &PathLossParams) -> Result<f64> {
    p.validate()?;
    Ok(20.0 * libm::log10(f.mhz()) + p.n_coeff * libm::log10(p.distance_m) + p.floor_penetration_db - 28.0)
}

/// Received power `P_t - 20 log10(f_MHz) - N log10(d) + 28` (the same-floor form).
pub fn received_power_model(p_t_dbm: f64, f: Frequency, p: &PathLossParams) -> Result<f64> {
    p.validate()?;
    Ok(p_t_dbm - 20.0 * libm::log10(f.mhz()) - p.n_coeff * libm::log10(p.distance_m) + 28.0)
}

pub fn rss_from_alpha(alpha: &AlphaEstimate, f: Frequency) -> f64 {
    alpha.alpha_db - 20.0 * libm::log10(alpha.unit.value(f))
}

/// Mean-of-alpha fit; equal to least squares for a model with fixed unit slope.
pub fn fit_alpha(set: &MeasurementSet, unit: FrequencyUnit) -> Result<AlphaEstimate> {
    let points = set.points();
    if points.len() < 2 {
        return Err(Error::TooFewPoints(points.len()));
    }
    let per_point: Vec<f64> = points
        .iter()
        .map(|p| p.rss_dbm + 20.0 * libm::log10(unit.value(p.freq)))
        .collect();
    let alpha_db = per_point.iter().sum::<f64>() / per_point.len() as f64;
    let mut estimate = AlphaEstimate::fixed(alpha_db, unit);
    estimate.residuals_db = points
        .iter()
        .map(|p| p.rss_dbm - rss_from_alpha(&estimate, p.freq))
        .collect();
    Ok(estimate)
}

/// Piecewise-linear interpolation in `(log10 f, dB)`; exact at the anchors.
pub fn interpolate_rss(set: &MeasurementSet, f: Frequency) -> Result<f64> {
    let points = set.points();
    let (lo, hi) = (set.min_freq(), set.max_freq());
    if f.hz() < lo.hz() || f.hz() > hi.hz() {
        return Err(Error::OutOfRange {
            freq_hz: f.hz(),
            lo_hz: lo.hz(),
            hi_hz: hi.hz(),
        });
    }
    // first anchor with freq >= f
    let upper = points.partition_point(|p| p.freq.hz() < f.hz());
    let right = points[upper];
    if right.freq.hz() == f.hz() {
        return Ok(right.rss_dbm);
    }
    let left = points[upper - 1];
    let x0 = libm::log10(left.freq.hz());
    let x1 = libm::log10(right.freq.hz());
    let t = (libm::log10(f.hz()) - x0) / (x1 - x0);
    Ok(left.rss_dbm + t * (right.rss_dbm - left.rss_dbm))
}

/// `steps` log-spaced frequencies from `lo` to `hi`, endpoints exact.
pub fn log_spaced(lo: Frequency, hi: Frequency, steps: usize) -> Result<Vec<Frequency>> {
    if steps < 2 {
        return Err(Error::TooFewSteps(steps));
    }
    if !(lo.hz() < hi.hz()) {
        return Err(Error::EmptyRange {
            lo_hz: lo.hz(),
            hi_hz: hi.hz(),
        });
    }
    let ratio = hi.hz() / lo.hz();
    let last = steps - 1;
    (0..steps)
        .map(|i| match i {
            0 => Ok(lo),
            i if i == last => Ok(hi),
            i => Frequency::from_hz(lo.hz() * libm::pow(ratio, i as f64 / last as f64)),
        })
        .collect()
}

pub fn rss_curve(
    set: &MeasurementSet,
    f_lo: Frequency,
    f_hi: Frequency,
    steps: usize,
    mode: CurveMode,
) -> Result<RssCurve> {
    let freqs = log_spaced(f_lo, f_hi, steps)?;
    let samples = match mode {
        CurveMode::AnalyticAlpha => {
            let alpha = fit_alpha(set, FrequencyUnit::Hz)?;
            freqs
                .into_iter()
                .map(|freq| RssPoint {
                    freq,
                    rss_dbm: rss_from_alpha(&alpha, freq),
                })
                .collect()
        }
        CurveMode::PiecewiseLogLinear => freqs
            .into_iter()
            .map(|freq| {
                Ok(RssPoint {
                    freq,
                    rss_dbm: interpolate_rss(set, freq)?,
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(RssCurve { samples, mode })
}

/// The four sessions of the reference indoor measurement campaign
/// (830 MHz, 1.2 GHz, 1.6 GHz, 1.9 GHz), with the published alpha averages.
pub mod reference {
    use super::MeasurementSet;

    pub const FREQUENCIES_HZ: [f64; 4] = [830e6, 1.2e9, 1.6e9, 1.9e9];

    pub const SETS: [(&str, [f64; 4], f64); 4] = [
        ("Set1", [-43.09, -53.53, -60.85, -63.15], 126.59),
        ("Set2", [-43.09, -55.92, -61.84, -62.50], 126.20),
        ("Set3", [-41.44, -56.57, -62.14, -62.82], 126.03),
        ("Set4", [-42.70, -56.57, -61.84, -62.10], 126.23),
    ];

    pub fn set(index: usize) -> MeasurementSet {
        let (label, rss, _) = SETS[index];
        let pairs: [(f64, f64); 4] = core::array::from_fn(|i| (FREQUENCIES_HZ[i], rss[i]));
        MeasurementSet::from_pairs(label, &pairs).expect("reference set is valid")
    }

    pub fn published_alpha(index: usize) -> f64 {
        SETS[index].2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ghz(x: f64) -> Frequency {
        Frequency::from_ghz(x).unwrap()
    }

    fn mhz(x: f64) -> Frequency {
        Frequency::from_mhz(x).unwrap()
    }

    #[test]
    fn path_loss_examples() {
        let unit = PathLossParams::same_floor(30.0, 1.0).unwrap();
        assert!((itu_indoor_path_loss(mhz(1.0), &unit).unwrap() + 28.0).abs() < 1e-12);
        let two_m = PathLossParams::same_floor(30.0, 2.0).unwrap();
        // 20 log10(830) + 30 log10(2) - 28, evaluated independently
        assert!((itu_indoor_path_loss(mhz(830.0), &two_m).unwrap() - 39.412461717440905).abs() < 1e-9);
        assert!((itu_indoor_path_loss(mhz(1900.0), &two_m).unwrap() - 46.605971888976015).abs() < 1e-9);
    }

    #[test]
    fn received_power_examples() {
        let unit = PathLossParams::same_floor(30.0, 1.0).unwrap();
        assert!((received_power_model(0.0, mhz(1.0), &unit).unwrap() - 28.0).abs() < 1e-12);
        let two_m = PathLossParams::same_floor(30.0, 2.0).unwrap();
        assert!((received_power_model(10.0, mhz(830.0), &two_m).unwrap() + 29.412461717440905).abs() < 1e-9);
        assert!((received_power_model(10.0, mhz(1900.0), &two_m).unwrap() + 36.605971888976015).abs() < 1e-9);
    }

    #[test]
    fn invalid_path_loss_params() {
        assert!(PathLossParams::same_floor(30.0, 0.0).is_err());
        assert!(PathLossParams::same_floor(0.0, 2.0).is_err());
        assert!(PathLossParams::new(30.0, 2.0, 0, 5.0).is_err());
        assert!(PathLossParams::new(30.0, 2.0, 1, -1.0).is_err());
        assert!(PathLossParams::new(30.0, 2.0, 2, 15.0).is_ok());
    }

    #[test]
    fn rss_from_alpha_examples() {
        let a = AlphaEstimate::fixed(127.25, FrequencyUnit::Hz);
        assert!((rss_from_alpha(&a, ghz(1.2)) + 54.3336249209525).abs() < 1e-9);
        let zero = AlphaEstimate::fixed(0.0, FrequencyUnit::Hz);
        assert_eq!(rss_from_alpha(&zero, Frequency::from_hz(1.0).unwrap()), 0.0);
        let set1 = AlphaEstimate::fixed(126.59, FrequencyUnit::Hz);
        assert!((rss_from_alpha(&set1, mhz(830.0)) + 51.79156184752148).abs() < 1e-9);
    }

    #[test]
    fn unit_conventions_differ_by_120_db() {
        let set = reference::set(0);
        let hz = fit_alpha(&set, FrequencyUnit::Hz).unwrap();
        let mega = fit_alpha(&set, FrequencyUnit::MHz).unwrap();
        assert!((hz.alpha_db - mega.alpha_db - 120.0).abs() < 1e-9);
        for (a, b) in hz.residuals_db.iter().zip(&mega.residuals_db) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    // Frozen from an independent evaluation of mean(rss + 20 log10 f_Hz).
    const ORACLE_ALPHA: [f64; 4] = [
        127.25066461016226,
        126.56816461016227,
        126.66316461016227,
        126.60316461016228,
    ];

    #[test]
    fn fit_alpha_reference_sets() {
        for (i, expected) in ORACLE_ALPHA.iter().enumerate() {
            let fit = fit_alpha(&reference::set(i), FrequencyUnit::Hz).unwrap();
            assert!((fit.alpha_db - expected).abs() < 1e-9, "set {i}: {}", fit.alpha_db);
            assert!((fit.alpha_db - reference::published_alpha(i)).abs() <= 1.0);
        }
        let set1 = fit_alpha(&reference::set(0), FrequencyUnit::Hz).unwrap();
        let expected = [
            8.040897237359218,
            0.8029603107902403,
            -4.018264957043755,
            -4.825592591105703,
        ];
        for (r, e) in set1.residuals_db.iter().zip(expected) {
            assert!((r - e).abs() < 1e-9);
        }
    }

    #[test]
    fn fit_alpha_exact_two_points() {
        let set = MeasurementSet::from_pairs(
            "exact",
            &[
                (1e8, 100.0 - 20.0 * libm::log10(1e8)),
                (1e9, 100.0 - 20.0 * libm::log10(1e9)),
            ],
        )
        .unwrap();
        let fit = fit_alpha(&set, FrequencyUnit::Hz).unwrap();
        assert!((fit.alpha_db - 100.0).abs() < 1e-12);
        assert!(fit.residuals_db.iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn measurement_set_validation() {
        assert_eq!(
            MeasurementSet::from_pairs("x", &[(1e9, -50.0)]),
            Err(Error::TooFewPoints(1))
        );
        assert_eq!(
            MeasurementSet::from_pairs("x", &[(1e9, -50.0), (1e9, -51.0)]),
            Err(Error::FrequenciesNotIncreasing { index: 1 })
        );
        assert!(MeasurementSet::from_pairs("x", &[(2e9, -50.0), (1e9, -51.0)]).is_err());
    }

    #[test]
    fn interpolation_anchors_and_midpoint() {
        let set = reference::set(0);
        assert_eq!(interpolate_rss(&set, mhz(830.0)).unwrap(), -43.09);
        assert_eq!(interpolate_rss(&set, ghz(1.9)).unwrap(), -63.15);
        for p in set.points() {
            assert_eq!(interpolate_rss(&set, p.freq).unwrap(), p.rss_dbm);
        }
        let two = MeasurementSet::from_pairs("two", &[(1e8, -40.0), (1e9, -60.0)]).unwrap();
        let mid = Frequency::from_hz(libm::sqrt(1e8 * 1e9)).unwrap();
        assert!((interpolate_rss(&two, mid).unwrap() + 50.0).abs() < 1e-9);
    }

    #[test]
    fn interpolation_refuses_extrapolation() {
        let set = reference::set(0);
        assert!(matches!(
            interpolate_rss(&set, mhz(800.0)),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(interpolate_rss(&set, ghz(2.0)), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn curve_examples() {
        let set = reference::set(0);
        let curve = rss_curve(&set, mhz(830.0), ghz(1.9), 4, CurveMode::PiecewiseLogLinear).unwrap();
        assert_eq!(curve.samples.len(), 4);
        assert_eq!(curve.samples[0].rss_dbm, -43.09);
        assert_eq!(curve.samples[3].rss_dbm, -63.15);

        let analytic = rss_curve(&set, mhz(100.0), ghz(28.0), 50, CurveMode::AnalyticAlpha).unwrap();
        assert!(analytic.samples.windows(2).all(|w| w[1].rss_dbm < w[0].rss_dbm));

        assert_eq!(
            rss_curve(&set, mhz(830.0), ghz(1.9), 1, CurveMode::AnalyticAlpha),
            Err(Error::TooFewSteps(1))
        );
        assert!(rss_curve(&set, mhz(800.0), ghz(1.9), 10, CurveMode::PiecewiseLogLinear).is_err());
        assert!(rss_curve(&set, ghz(1.9), mhz(830.0), 10, CurveMode::AnalyticAlpha).is_err());
    }

    #[test]
    fn exact_model_modes_coincide() {
        let alpha = 110.0;
        let set = MeasurementSet::from_pairs(
            "exact",
            &[
                (5e8, alpha - 20.0 * libm::log10(5e8)),
                (3e9, alpha - 20.0 * libm::log10(3e9)),
            ],
        )
        .unwrap();
        let a = rss_curve(&set, set.min_freq(), set.max_freq(), 25, CurveMode::AnalyticAlpha).unwrap();
        let b = rss_curve(&set, set.min_freq(), set.max_freq(), 25, CurveMode::PiecewiseLogLinear).unwrap();
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert_eq!(x.freq, y.freq);
            assert!((x.rss_dbm - y.rss_dbm).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn exact_fit_recovery(alpha in -50.0f64..200.0, freqs in proptest::collection::btree_set(1_000u64..100_000_000_000, 2..8)) {
            let pairs: alloc::vec::Vec<(f64, f64)> = freqs
                .iter()
                .map(|&f| (f as f64, alpha - 20.0 * libm::log10(f as f64)))
                .collect();
            let set = MeasurementSet::from_pairs("p", &pairs).unwrap();
            let fit = fit_alpha(&set, FrequencyUnit::Hz).unwrap();
            prop_assert!((fit.alpha_db - alpha).abs() < 1e-9);
            prop_assert!(fit.residuals_db.iter().all(|r| r.abs() < 1e-9));
        }

        #[test]
        fn residuals_have_zero_mean(rss in proptest::collection::vec(-120.0f64..0.0, 4)) {
            let pairs: alloc::vec::Vec<(f64, f64)> = reference::FREQUENCIES_HZ.iter().copied().zip(rss).collect();
            let fit = fit_alpha(&MeasurementSet::from_pairs("p", &pairs).unwrap(), FrequencyUnit::Hz).unwrap();
            let mean = fit.residuals_db.iter().sum::<f64>() / 4.0;
            prop_assert!(mean.abs() < 1e-9);
        }

        #[test]
        fn frequency_ratio_law(alpha in -200.0f64..200.0, f1 in 1e6f64..1e11, f2 in 1e6f64..1e11) {
            let a = AlphaEstimate::fixed(alpha, FrequencyUnit::Hz);
            let d = rss_from_alpha(&a, Frequency::from_hz(f1).unwrap()) - rss_from_alpha(&a, Frequency::from_hz(f2).unwrap());
            prop_assert!((d - 20.0 * libm::log10(f2 / f1)).abs() < 1e-9);
        }

        #[test]
        fn model_forms_agree(p_t in -30.0f64..40.0, f in 1e6f64..1e11, n in 1.0f64..40.0, d in 0.1f64..1000.0) {
            let params = PathLossParams::same_floor(n, d).unwrap();
            let freq = Frequency::from_hz(f).unwrap();
            let lhs = received_power_model(p_t, freq, &params).unwrap();
            let rhs = p_t - itu_indoor_path_loss(freq, &params).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn frequency_shift_example() {
        let a = AlphaEstimate::fixed(127.25, FrequencyUnit::Hz);
        let gain = rss_from_alpha(&a, mhz(830.0)) - rss_from_alpha(&a, ghz(1.9));
        assert!((gain - 7.1935101715351015).abs() < 1e-9);
    }
}
