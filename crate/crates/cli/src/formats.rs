//! CSV schemas read and written by the commands.
//!
//! Every file has a header row. Numbers are written with Rust's shortest
//! round-trip formatting, so reading a file back yields identical values.

use std::io::{Read, Write};

use csv::{ReaderBuilder, StringRecord, Terminator, WriterBuilder};
use dsalink_core::phy::PsdBin;
use dsalink_core::propagation::{AlphaEstimate, CurveMode, FrequencyUnit, MeasurementSet, RssCurve, RssPoint};
use dsalink_core::sim::{parse_status, status_name, MetricsLog, MetricsRow};
use dsalink_core::Frequency;

use crate::error::{CliError, CliResult};

pub const MEASUREMENT_HEADER: &[&str] = &["freq_hz", "rss_dbm"];
pub const CURVE_HEADER: &[&str] = &["freq_hz", "rss_dbm", "mode"];
pub const PSD_HEADER: &[&str] = &["freq_hz", "psd_db"];
pub const BER_HEADER: &[&str] = &["esn0_db", "ber", "theory_ber"];
pub const FIT_REPORT_HEADER: &[&str] = &["freq_hz", "rss_dbm", "point_alpha_db", "residual_db", "unit"];
pub const METRICS_HEADER: &[&str] = &[
    "tick",
    "time_s",
    "band_hz",
    "tx_gain_db",
    "rss_db",
    "ber",
    "bler",
    "beta_db",
    "obstruction_db",
    "action",
    "status",
];

struct Row {
    line: u64,
    record: StringRecord,
}

impl Row {
    fn text(&self, i: usize) -> &str {
        self.record.get(i).unwrap_or("").trim()
    }

    fn f64(&self, i: usize, name: &str) -> CliResult<f64> {
        let s = self.text(i);
        s.parse()
            .map_err(|_| CliError::validation(format!("line {}: {name} `{s}` is not a number", self.line)))
    }

    fn usize(&self, i: usize, name: &str) -> CliResult<usize> {
        let s = self.text(i);
        s.parse().map_err(|_| {
            CliError::validation(format!(
                "line {}: {name} `{s}` is not a non-negative integer",
                self.line
            ))
        })
    }

    fn freq(&self, i: usize) -> CliResult<Frequency> {
        let hz = self.f64(i, "freq_hz")?;
        Frequency::from_hz(hz)
            .map_err(|_| CliError::validation(format!("line {}: frequency must be positive", self.line)))
    }
}

/// Reads all data rows. With `header_optional`, a first row whose first
/// field is not a number is taken as the header and must match `header`.
fn read_table<R: Read>(input: R, header: &[&str], header_optional: bool) -> CliResult<Vec<Row>> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut rows = Vec::new();
    let mut seen_header = false;
    for result in reader.records() {
        let record = result.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::validation(format!("line {line}: {e}"))
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        if !seen_header {
            seen_header = true;
            let looks_numeric = record.get(0).is_some_and(|f| f.trim().parse::<f64>().is_ok());
            if !(header_optional && looks_numeric) {
                let got: Vec<&str> = record.iter().map(str::trim).collect();
                if got != header {
                    return Err(CliError::validation(format!(
                        "line {line}: expected header `{}`, found `{}`",
                        header.join(","),
                        got.join(",")
                    )));
                }
                continue;
            }
        }
        if record.len() != header.len() {
            return Err(CliError::validation(format!(
                "line {line}: expected {} fields, found {}",
                header.len(),
                record.len()
            )));
        }
        rows.push(Row { line, record });
    }
    if !seen_header {
        return Err(CliError::validation(format!(
            "line 1: empty file, expected `{}` rows",
            header.join(",")
        )));
    }
    Ok(rows)
}

fn write_table<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> csv::Result<()> {
    let mut w = WriterBuilder::new().terminator(Terminator::Any(b'\n')).from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

fn to_bytes(f: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory cannot fail");
    buf
}

fn mode_name(mode: CurveMode) -> &'static str {
    match mode {
        CurveMode::AnalyticAlpha => "analytic",
        CurveMode::PiecewiseLogLinear => "interpolated",
    }
}

pub fn parse_curve_mode(s: &str) -> Option<CurveMode> {
    match s {
        "analytic" => Some(CurveMode::AnalyticAlpha),
        "interpolated" | "interpolation" => Some(CurveMode::PiecewiseLogLinear),
        _ => None,
    }
}

pub fn unit_name(unit: FrequencyUnit) -> &'static str {
    match unit {
        FrequencyUnit::Hz => "hz",
        FrequencyUnit::MHz => "mhz",
    }
}

pub fn parse_unit(s: &str) -> Option<FrequencyUnit> {
    match s.to_ascii_lowercase().as_str() {
        "hz" => Some(FrequencyUnit::Hz),
        "mhz" => Some(FrequencyUnit::MHz),
        _ => None,
    }
}

/// `freq_hz,rss_dbm`; the header row may be omitted.
pub fn read_measurements<R: Read>(input: R, label: &str) -> CliResult<MeasurementSet> {
    let rows = read_table(input, MEASUREMENT_HEADER, true)?;
    let mut points = Vec::with_capacity(rows.len());
    for row in &rows {
        let freq = row.freq(0)?;
        let rss_dbm = row.f64(1, "rss_dbm")?;
        if let Some(prev) = points.last().map(|p: &RssPoint| p.freq) {
            if !(freq.hz() > prev.hz()) {
                return Err(CliError::validation(format!(
                    "line {}: frequencies must be strictly increasing",
                    row.line
                )));
            }
        }
        points.push(RssPoint { freq, rss_dbm });
    }
    if points.len() < 2 {
        let line = rows.last().map_or(1, |r| r.line);
        return Err(CliError::validation(format!(
            "line {line}: need at least 2 measurement points, found {}",
            points.len()
        )));
    }
    Ok(MeasurementSet::new(label, points)?)
}

pub fn measurements_csv(set: &MeasurementSet) -> Vec<u8> {
    to_bytes(|buf| {
        write_table(
            buf,
            MEASUREMENT_HEADER,
            set.points()
                .iter()
                .map(|p| vec![p.freq.hz().to_string(), p.rss_dbm.to_string()]),
        )
    })
}

pub fn curve_csv(curve: &RssCurve) -> Vec<u8> {
    let mode = mode_name(curve.mode);
    to_bytes(|buf| {
        write_table(
            buf,
            CURVE_HEADER,
            curve
                .samples
                .iter()
                .map(|p| vec![p.freq.hz().to_string(), p.rss_dbm.to_string(), mode.to_string()]),
        )
    })
}

pub fn read_curve<R: Read>(input: R) -> CliResult<RssCurve> {
    let rows = read_table(input, CURVE_HEADER, false)?;
    let mut mode = None;
    let mut samples = Vec::with_capacity(rows.len());
    for row in &rows {
        let m = parse_curve_mode(row.text(2))
            .ok_or_else(|| CliError::validation(format!("line {}: unknown mode `{}`", row.line, row.text(2))))?;
        if mode.is_some_and(|prev| prev != m) {
            return Err(CliError::validation(format!("line {}: mixed curve modes", row.line)));
        }
        mode = Some(m);
        samples.push(RssPoint {
            freq: row.freq(0)?,
            rss_dbm: row.f64(1, "rss_dbm")?,
        });
    }
    let mode = mode.ok_or_else(|| CliError::validation("curve has no rows"))?;
    Ok(RssCurve { samples, mode })
}

pub fn psd_csv(bins: &[PsdBin]) -> Vec<u8> {
    to_bytes(|buf| {
        write_table(
            buf,
            PSD_HEADER,
            bins.iter().map(|b| vec![b.freq_hz.to_string(), b.psd_db.to_string()]),
        )
    })
}

pub fn read_psd<R: Read>(input: R) -> CliResult<Vec<PsdBin>> {
    read_table(input, PSD_HEADER, false)?
        .iter()
        .map(|row| {
            Ok(PsdBin {
                freq_hz: row.f64(0, "freq_hz")?,
                psd_db: row.f64(1, "psd_db")?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerRow {
    pub esn0_db: f64,
    pub ber: f64,
    pub theory_ber: f64,
}

pub fn ber_csv(rows: &[BerRow]) -> Vec<u8> {
    to_bytes(|buf| {
        write_table(
            buf,
            BER_HEADER,
            rows.iter()
                .map(|r| vec![r.esn0_db.to_string(), r.ber.to_string(), r.theory_ber.to_string()]),
        )
    })
}

pub fn read_ber<R: Read>(input: R) -> CliResult<Vec<BerRow>> {
    read_table(input, BER_HEADER, false)?
        .iter()
        .map(|row| {
            Ok(BerRow {
                esn0_db: row.f64(0, "esn0_db")?,
                ber: row.f64(1, "ber")?,
                theory_ber: row.f64(2, "theory_ber")?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReportRow {
    pub freq_hz: f64,
    pub rss_dbm: f64,
    /// `rss + 20 log10(f)` at this point alone.
    pub point_alpha_db: f64,
    pub residual_db: f64,
    pub unit: FrequencyUnit,
}

pub fn fit_report_rows(set: &MeasurementSet, alpha: &AlphaEstimate) -> Vec<FitReportRow> {
    set.points()
        .iter()
        .zip(&alpha.residuals_db)
        .map(|(p, &r)| FitReportRow {
            freq_hz: p.freq.hz(),
            rss_dbm: p.rss_dbm,
            point_alpha_db: alpha.alpha_db + r,
            residual_db: r,
            unit: alpha.unit,
        })
        .collect()
}

pub fn fit_report_csv(rows: &[FitReportRow]) -> Vec<u8> {
    to_bytes(|buf| {
        write_table(
            buf,
            FIT_REPORT_HEADER,
            rows.iter().map(|r| {
                vec![
                    r.freq_hz.to_string(),
                    r.rss_dbm.to_string(),
                    r.point_alpha_db.to_string(),
                    r.residual_db.to_string(),
                    unit_name(r.unit).to_string(),
                ]
            }),
        )
    })
}

pub fn read_fit_report<R: Read>(input: R) -> CliResult<Vec<FitReportRow>> {
    read_table(input, FIT_REPORT_HEADER, false)?
        .iter()
        .map(|row| {
            Ok(FitReportRow {
                freq_hz: row.f64(0, "freq_hz")?,
                rss_dbm: row.f64(1, "rss_dbm")?,
                point_alpha_db: row.f64(2, "point_alpha_db")?,
                residual_db: row.f64(3, "residual_db")?,
                unit: parse_unit(row.text(4))
                    .ok_or_else(|| CliError::validation(format!("line {}: unknown unit", row.line)))?,
            })
        })
        .collect()
}

pub fn metrics_csv(log: &MetricsLog) -> Vec<u8> {
    to_bytes(|buf| {
        write_table(
            buf,
            METRICS_HEADER,
            log.rows.iter().map(|r| {
                vec![
                    r.tick.to_string(),
                    r.time_s.to_string(),
                    r.band_hz.to_string(),
                    r.tx_gain_db.to_string(),
                    r.rss_db.to_string(),
                    r.ber.to_string(),
                    r.bler.to_string(),
                    r.beta_db.to_string(),
                    r.obstruction_db.to_string(),
                    r.action.name().to_string(),
                    status_name(r.status).to_string(),
                ]
            }),
        )
    })
}

pub fn read_metrics<R: Read>(input: R) -> CliResult<Vec<MetricsRow>> {
    read_table(input, METRICS_HEADER, false)?
        .iter()
        .map(|row| {
            let bad = |what: &str| CliError::validation(format!("line {}: unknown {what}", row.line));
            Ok(MetricsRow {
                tick: row.usize(0, "tick")?,
                time_s: row.f64(1, "time_s")?,
                band_hz: row.f64(2, "band_hz")?,
                tx_gain_db: row.f64(3, "tx_gain_db")?,
                rss_db: row.f64(4, "rss_db")?,
                ber: row.f64(5, "ber")?,
                bler: row.f64(6, "bler")?,
                beta_db: row.f64(7, "beta_db")?,
                obstruction_db: row.f64(8, "obstruction_db")?,
                action: row.text(9).parse().map_err(|_| bad("action"))?,
                status: parse_status(row.text(10)).map_err(|_| bad("status"))?,
            })
        })
        .collect()
}

/// One line per logged event: `tick <n>: <action>: <reason>`.
pub fn events_text(log: &MetricsLog) -> String {
    log.events
        .iter()
        .map(|e| format!("tick {}: {}: {}\n", e.tick, e.action, e.reason))
        .collect()
}
