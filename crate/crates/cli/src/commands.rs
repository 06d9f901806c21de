//! The subcommands, callable without going through argument parsing.
//!
//! Each command validates its inputs and computes every output in memory
//! before touching the filesystem, so a validation failure leaves no files.

use std::fs;
use std::path::{Path, PathBuf};

use dsalink_core::phy::{ber_monte_carlo, qam16_ber_approx, spectrum, IqFrame, OfdmConfig};
use dsalink_core::propagation::{fit_alpha, rss_curve, CurveMode, FrequencyUnit};
use dsalink_core::sim::{run, run_observed, summarize, Scenario};
use dsalink_core::Frequency;

use crate::error::{CliError, CliResult};
use crate::formats::{
    ber_csv, curve_csv, events_text, fit_report_csv, fit_report_rows, metrics_csv, psd_csv, read_measurements,
    unit_name, BerRow,
};
use crate::scenario::load_scenario;

pub const MIN_BER_BITS: usize = 10_000;
pub const DEFAULT_PSD_NFFT: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub outputs: Vec<PathBuf>,
    /// Text for stdout on success, or the diagnostic on failure.
    pub message: String,
}

impl CommandResult {
    fn from_result(r: CliResult<(Vec<PathBuf>, String)>) -> Self {
        match r {
            Ok((outputs, message)) => Self {
                exit_code: 0,
                outputs,
                message,
            },
            Err(e) => Self {
                exit_code: e.exit_code(),
                outputs: Vec::new(),
                message: e.to_string(),
            },
        }
    }

    pub fn is_success(&self) -> bool {
        self.exit_code == 0
    }
}

fn write_all(files: Vec<(PathBuf, Vec<u8>)>) -> CliResult<Vec<PathBuf>> {
    let mut written = Vec::with_capacity(files.len());
    for (path, bytes) in files {
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn scenario_with_seed(source: &str, seed: Option<u64>) -> CliResult<Scenario> {
    let mut s = load_scenario(source)?;
    if let Some(seed) = seed {
        s.seed = seed;
    }
    Ok(s)
}

pub fn cmd_fit_alpha(input: &Path, unit: FrequencyUnit, report: Option<&Path>) -> CommandResult {
    CommandResult::from_result((|| {
        let bytes = read_file(input)?;
        let label = input
            .file_stem()
            .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
        let set = read_measurements(bytes.as_slice(), &label)?;
        let alpha = fit_alpha(&set, unit)?;
        let mut msg = format!("alpha_db = {:.6} (frequency in {})\n", alpha.alpha_db, unit_name(unit));
        msg.push_str("freq_hz,rss_dbm,residual_db\n");
        for (p, r) in set.points().iter().zip(&alpha.residuals_db) {
            msg.push_str(&format!("{},{},{:+.4}\n", p.freq.hz(), p.rss_dbm, r));
        }
        let outputs = match report {
            Some(path) => write_all(vec![(
                path.to_path_buf(),
                fit_report_csv(&fit_report_rows(&set, &alpha)),
            )])?,
            None => Vec::new(),
        };
        Ok((outputs, msg))
    })())
}

pub fn cmd_curve(
    input: &Path,
    f_lo: Frequency,
    f_hi: Frequency,
    steps: usize,
    mode: CurveMode,
    out: &Path,
) -> CommandResult {
    CommandResult::from_result((|| {
        let bytes = read_file(input)?;
        let set = read_measurements(bytes.as_slice(), "input")?;
        let curve = rss_curve(&set, f_lo, f_hi, steps, mode)?;
        let outputs = write_all(vec![(out.to_path_buf(), curve_csv(&curve))])?;
        Ok((outputs, format!("{} rows\n", curve.samples.len())))
    })())
}

pub fn cmd_simulate(scenario: &str, out_prefix: &Path, seed: Option<u64>) -> CommandResult {
    CommandResult::from_result((|| {
        let s = scenario_with_seed(scenario, seed)?;
        let log = run(&s).map_err(|e| CliError::Runtime(e.to_string()))?;
        let summary = summarize(&log).map_err(|e| CliError::Runtime(e.to_string()))?;
        let summary_text = format!("scenario: {}\nseed: {}\n{summary}", s.name, s.seed);
        let outputs = write_all(vec![
            (with_suffix(out_prefix, "_metrics.csv"), metrics_csv(&log)),
            (with_suffix(out_prefix, "_events.log"), events_text(&log).into_bytes()),
            (
                with_suffix(out_prefix, "_summary.txt"),
                summary_text.clone().into_bytes(),
            ),
        ])?;
        Ok((outputs, summary_text))
    })())
}

/// Received frames at the requested ticks, from one deterministic run.
fn capture_frames(s: &Scenario, ticks: &[usize]) -> CliResult<Vec<(usize, Frequency, IqFrame)>> {
    let mut frames = Vec::with_capacity(ticks.len());
    run_observed(s, |tf| {
        if ticks.contains(&tf.tick) {
            frames.push((tf.tick, tf.freq, tf.received.clone()));
        }
    })
    .map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(frames)
}

pub fn cmd_spectrum(scenario: &str, tick: usize, out: &Path, seed: Option<u64>, nfft: usize) -> CommandResult {
    CommandResult::from_result((|| {
        let s = scenario_with_seed(scenario, seed)?;
        if tick >= s.duration_ticks {
            return Err(CliError::validation(format!(
                "tick {tick} is outside the scenario (0..{})",
                s.duration_ticks
            )));
        }
        check_nfft(&s, nfft)?;
        let frames = capture_frames(&s, &[tick])?;
        let (_, freq, frame) = frames
            .first()
            .ok_or_else(|| CliError::Runtime("tick was not reached".into()))?;
        let bins = spectrum(frame, nfft, *freq).map_err(|e| CliError::Runtime(e.to_string()))?;
        let outputs = write_all(vec![(out.to_path_buf(), psd_csv(&bins))])?;
        Ok((outputs, format!("tick {tick} at {freq}: {} bins\n", bins.len())))
    })())
}

fn check_nfft(s: &Scenario, nfft: usize) -> CliResult<()> {
    let frame_len = s.symbols_per_tick * s.ofdm.symbol_len();
    if nfft < 2 || nfft > frame_len {
        return Err(CliError::validation(format!(
            "nfft must lie in 2..={frame_len} for this scenario, got {nfft}"
        )));
    }
    Ok(())
}

/// One PSD per constant band/gain/obstruction phase, taken at the phase's
/// middle tick. Files are `<prefix>_phase<k>.csv`.
pub fn cmd_sweep(scenario: &str, out_prefix: &Path, seed: Option<u64>, nfft: usize) -> CommandResult {
    CommandResult::from_result((|| {
        let s = scenario_with_seed(scenario, seed)?;
        check_nfft(&s, nfft)?;
        let log = run(&s).map_err(|e| CliError::Runtime(e.to_string()))?;
        let summary = summarize(&log).map_err(|e| CliError::Runtime(e.to_string()))?;
        let mids: Vec<usize> = summary.phases.iter().map(|p| p.start_tick + p.ticks() / 2).collect();
        let frames = capture_frames(&s, &mids)?;
        let mut files = Vec::new();
        let mut msg = String::new();
        for (k, (p, (tick, freq, frame))) in summary.phases.iter().zip(&frames).enumerate() {
            let bins = spectrum(frame, nfft, *freq).map_err(|e| CliError::Runtime(e.to_string()))?;
            files.push((with_suffix(out_prefix, &format!("_phase{k}.csv")), psd_csv(&bins)));
            msg.push_str(&format!(
                "phase {k}: ticks {}..{}, {freq}, tx gain {} dB, psd at tick {tick}\n",
                p.start_tick, p.end_tick, p.tx_gain_db
            ));
        }
        Ok((write_all(files)?, msg))
    })())
}

pub fn cmd_ber_curve(esn0_db: &[f64], bits_per_point: usize, seed: u64, out: &Path) -> CommandResult {
    CommandResult::from_result((|| {
        if esn0_db.is_empty() {
            return Err(CliError::validation("Es/N0 list is empty"));
        }
        if let Some(bad) = esn0_db.iter().find(|v| !v.is_finite()) {
            return Err(CliError::validation(format!("Es/N0 value {bad} is not finite")));
        }
        if bits_per_point < MIN_BER_BITS {
            return Err(CliError::validation(format!(
                "bits per point must be at least {MIN_BER_BITS}, got {bits_per_point}"
            )));
        }
        let cfg = OfdmConfig::default();
        let mut rows = Vec::with_capacity(esn0_db.len());
        for (i, &e) in esn0_db.iter().enumerate() {
            let point = ber_monte_carlo(&cfg, e, bits_per_point, seed.wrapping_add(i as u64))
                .map_err(|err| CliError::Runtime(err.to_string()))?;
            rows.push(BerRow {
                esn0_db: e,
                ber: point.ber(),
                theory_ber: qam16_ber_approx(e),
            });
        }
        let outputs = write_all(vec![(out.to_path_buf(), ber_csv(&rows))])?;
        let msg = rows
            .iter()
            .map(|r| {
                format!(
                    "Es/N0 {} dB: ber {:.6e} (closed form {:.6e})\n",
                    r.esn0_db, r.ber, r.theory_ber
                )
            })
            .collect();
        Ok((outputs, msg))
    })())
}

/// Parses a comma-separated list such as `6,10,14`.
pub fn parse_esn0_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::validation(format!("`{}` is not a number in the Es/N0 list", t.trim())))
        })
        .collect()
}
