//! Line-oriented scenario files.
//!
//! ```text
//! # comment
//! name = obstruction_rescue
//! seed = 7
//! duration_ticks = 80
//! controller = on
//!
//! [channel]
//! mode = empirical            # empirical | analytic | itu
//! reference_set = 1
//!
//! [bands]
//! plan = 830MHz, 1.2GHz, 1.6GHz, 1.9GHz
//! start = 1.9GHz
//!
//! [pool]
//! 1.2GHz = 2 1                # capacity, then units held by other links
//!
//! [policy]
//! hysteresis_db = 8
//!
//! [phy]
//! symbols_per_tick = 100
//!
//! [schedule]
//! 10 obstruction-start 32
//! ```
//!
//! Keys before the first section header are top-level. Unknown sections,
//! unknown keys and repeated keys are errors that name the line.

use std::collections::BTreeMap;
use std::path::Path;

use dsalink_core::channel::LinkModel;
use dsalink_core::dsa::{BandPlan, BandSlot, DsaPolicy, Preference, SpectrumPool};
use dsalink_core::phy::OfdmConfig;
use dsalink_core::propagation::{fit_alpha, reference, AlphaEstimate, MeasurementSet, PathLossParams, RssPoint};
use dsalink_core::sim::{ChannelConfig, EventKind, Scenario, TimedEvent};
use dsalink_core::Frequency;

use crate::error::{CliError, CliResult};
use crate::formats::parse_unit;

pub const BUNDLED: &[(&str, &str)] = &[
    ("table1_sweep", include_str!("../scenarios/table1_sweep.scn")),
    ("gain_sweep", include_str!("../scenarios/gain_sweep.scn")),
    (
        "obstruction_rescue",
        include_str!("../scenarios/obstruction_rescue.scn"),
    ),
];

const BUILTIN_PREFIX: &str = "builtin:";

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// Loads `builtin:<name>` from the bundled set, anything else from disk.
pub fn load_scenario(source: &str) -> CliResult<Scenario> {
    if let Some(name) = source.strip_prefix(BUILTIN_PREFIX) {
        let text = bundled(name).ok_or_else(|| {
            let names: Vec<&str> = BUNDLED.iter().map(|(n, _)| *n).collect();
            CliError::validation(format!("no bundled scenario `{name}` (have {})", names.join(", ")))
        })?;
        return parse_scenario(text);
    }
    let path = Path::new(source);
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_scenario(&text)
}

const TOP_KEYS: &[&str] = &["name", "seed", "duration_ticks", "controller"];
const CHANNEL_KEYS: &[&str] = &[
    "mode",
    "reference_set",
    "points",
    "alpha_db",
    "alpha_unit",
    "path_loss_n",
    "distance_m",
    "floors",
    "floor_penetration_db",
    "tx_power_dbm",
    "noise_floor_db",
    "rx_gain_db",
    "tx_gain_db",
    "beta_sigma_db",
    "beta_clip_db",
];
const BANDS_KEYS: &[&str] = &["plan", "start"];
const POLICY_KEYS: &[&str] = &[
    "rss_margin_db",
    "bler_max",
    "hysteresis_db",
    "dwell_ticks",
    "gain_step_db",
    "gain_max_db",
    "prefer",
];
const PHY_KEYS: &[&str] = &[
    "symbols_per_tick",
    "fft_size",
    "occupied_tones",
    "cp_len",
    "sample_rate_hz",
    "block_bits",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Top,
    Channel,
    Bands,
    Pool,
    Policy,
    Phy,
    Schedule,
}

impl Section {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "channel" => Section::Channel,
            "bands" => Section::Bands,
            "pool" => Section::Pool,
            "policy" => Section::Policy,
            "phy" => Section::Phy,
            "schedule" => Section::Schedule,
            _ => return None,
        })
    }

    fn label(self) -> &'static str {
        match self {
            Section::Top => "top level",
            Section::Channel => "[channel]",
            Section::Bands => "[bands]",
            Section::Pool => "[pool]",
            Section::Policy => "[policy]",
            Section::Phy => "[phy]",
            Section::Schedule => "[schedule]",
        }
    }

    fn keys(self) -> Option<&'static [&'static str]> {
        match self {
            Section::Top => Some(TOP_KEYS),
            Section::Channel => Some(CHANNEL_KEYS),
            Section::Bands => Some(BANDS_KEYS),
            Section::Policy => Some(POLICY_KEYS),
            Section::Phy => Some(PHY_KEYS),
            Section::Pool | Section::Schedule => None,
        }
    }
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

impl Entry {
    fn err(&self, key: &str, what: &str) -> CliError {
        CliError::validation(format!("line {}: `{key}`: {what} (got `{}`)", self.line, self.value))
    }

    fn f64(&self, key: &str) -> CliResult<f64> {
        parse_number(&self.value).ok_or_else(|| self.err(key, "expected a number"))
    }

    fn finite(&self, key: &str) -> CliResult<f64> {
        self.f64(key).and_then(|v| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(self.err(key, "expected a finite number"))
            }
        })
    }

    fn usize(&self, key: &str) -> CliResult<usize> {
        self.value
            .parse()
            .map_err(|_| self.err(key, "expected a non-negative integer"))
    }

    fn u64(&self, key: &str) -> CliResult<u64> {
        self.value
            .parse()
            .map_err(|_| self.err(key, "expected a non-negative integer"))
    }
}

fn parse_number(s: &str) -> Option<f64> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => Some(f64::INFINITY),
        t => t.parse().ok().filter(|v: &f64| !v.is_nan()),
    }
}

#[derive(Debug, Default)]
struct Document {
    keys: BTreeMap<(Section, String), Entry>,
    pool: Vec<(String, Entry)>,
    schedule: Vec<Entry>,
}

impl Document {
    fn get(&self, section: Section, key: &str) -> Option<&Entry> {
        self.keys.get(&(section, key.to_string()))
    }
}

fn tokenize(text: &str) -> CliResult<Document> {
    let mut doc = Document::default();
    let mut section = Section::Top;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| CliError::validation(format!("line {line}: unterminated section header")))?
                .trim();
            section = Section::parse(name)
                .ok_or_else(|| CliError::validation(format!("line {line}: unknown section `[{name}]`")))?;
            continue;
        }
        if section == Section::Schedule {
            doc.schedule.push(Entry {
                value: content.to_string(),
                line,
            });
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| CliError::validation(format!("line {line}: expected `key = value`")))?;
        let key = key.trim();
        let entry = Entry {
            value: value.trim().to_string(),
            line,
        };
        if key.is_empty() {
            return Err(CliError::validation(format!("line {line}: missing key before `=`")));
        }
        if section == Section::Pool {
            doc.pool.push((key.to_string(), entry));
            continue;
        }
        if let Some(allowed) = section.keys() {
            if !allowed.contains(&key) {
                return Err(CliError::validation(format!(
                    "line {line}: unknown key `{key}` in {}",
                    section.label()
                )));
            }
        }
        if let Some(prev) = doc.keys.get(&(section, key.to_string())) {
            return Err(CliError::validation(format!(
                "line {line}: `{key}` already set on line {}",
                prev.line
            )));
        }
        doc.keys.insert((section, key.to_string()), entry);
    }
    Ok(doc)
}

fn parse_points(entry: &Entry) -> CliResult<MeasurementSet> {
    let mut points = Vec::new();
    for item in entry.value.split(',') {
        let (f, r) = item
            .split_once(':')
            .ok_or_else(|| entry.err("points", "expected `freq:rss` pairs separated by commas"))?;
        let freq: Frequency = f.trim().parse().map_err(|_| entry.err("points", "bad frequency"))?;
        let rss_dbm = parse_number(r)
            .filter(|v| v.is_finite())
            .ok_or_else(|| entry.err("points", "bad rss value"))?;
        points.push(RssPoint { freq, rss_dbm });
    }
    MeasurementSet::new("points", points).map_err(|e| entry.err("points", &e.to_string()))
}

fn measurement_source(doc: &Document) -> CliResult<Option<MeasurementSet>> {
    match (
        doc.get(Section::Channel, "reference_set"),
        doc.get(Section::Channel, "points"),
    ) {
        (Some(a), Some(_)) => Err(CliError::validation(format!(
            "line {}: give either `reference_set` or `points`, not both",
            a.line
        ))),
        (Some(e), None) => {
            let i = e.usize("reference_set")?;
            if !(1..=reference::SETS.len()).contains(&i) {
                return Err(e.err("reference_set", "expected 1 to 4"));
            }
            Ok(Some(reference::set(i - 1)))
        }
        (None, Some(e)) => parse_points(e).map(Some),
        (None, None) => Ok(None),
    }
}

fn reject_keys(doc: &Document, keys: &[&str], mode: &str) -> CliResult<()> {
    for key in keys {
        if let Some(e) = doc.get(Section::Channel, key) {
            return Err(CliError::validation(format!(
                "line {}: `{key}` does not apply to channel mode `{mode}`",
                e.line
            )));
        }
    }
    Ok(())
}

const ITU_KEYS: &[&str] = &[
    "path_loss_n",
    "distance_m",
    "floors",
    "floor_penetration_db",
    "tx_power_dbm",
];

fn build_model(doc: &Document) -> CliResult<LinkModel> {
    let mode = doc
        .get(Section::Channel, "mode")
        .ok_or_else(|| CliError::validation("[channel]: missing `mode` (empirical, analytic or itu)"))?;
    let measured = measurement_source(doc)?;
    match mode.value.as_str() {
        "empirical" => {
            reject_keys(doc, ITU_KEYS, "empirical")?;
            reject_keys(doc, &["alpha_db", "alpha_unit"], "empirical")?;
            measured.map(LinkModel::Empirical).ok_or_else(|| {
                CliError::validation(format!(
                    "line {}: empirical mode needs `reference_set` or `points`",
                    mode.line
                ))
            })
        }
        "analytic" => {
            reject_keys(doc, ITU_KEYS, "analytic")?;
            let unit = match doc.get(Section::Channel, "alpha_unit") {
                Some(e) => parse_unit(&e.value).ok_or_else(|| e.err("alpha_unit", "expected hz or mhz"))?,
                None => Default::default(),
            };
            let alpha = match (doc.get(Section::Channel, "alpha_db"), measured) {
                (Some(e), None) => AlphaEstimate::fixed(e.finite("alpha_db")?, unit),
                (None, Some(set)) => fit_alpha(&set, unit)?,
                (Some(e), Some(_)) => {
                    return Err(CliError::validation(format!(
                        "line {}: give `alpha_db` or a measurement source, not both",
                        e.line
                    )))
                }
                (None, None) => {
                    return Err(CliError::validation(format!(
                        "line {}: analytic mode needs `alpha_db`, `reference_set` or `points`",
                        mode.line
                    )))
                }
            };
            Ok(LinkModel::AnalyticAlpha(alpha))
        }
        "itu" => {
            reject_keys(doc, &["alpha_db", "alpha_unit", "reference_set", "points"], "itu")?;
            let need = |key: &str| {
                doc.get(Section::Channel, key)
                    .ok_or_else(|| CliError::validation(format!("[channel]: itu mode needs `{key}`")))
                    .and_then(|e| e.finite(key))
            };
            let opt = |key: &str| doc.get(Section::Channel, key).map_or(Ok(0.0), |e| e.finite(key));
            let floors = doc
                .get(Section::Channel, "floors")
                .map_or(Ok(0), |e| e.usize("floors"))?;
            let params = PathLossParams::new(
                need("path_loss_n")?,
                need("distance_m")?,
                u32::try_from(floors).map_err(|_| CliError::validation("[channel]: too many floors"))?,
                opt("floor_penetration_db")?,
            )?;
            Ok(LinkModel::ItuModel {
                params,
                p_t_dbm: opt("tx_power_dbm")?,
            })
        }
        other => Err(mode.err(
            "mode",
            &format!("unknown mode `{other}`, expected empirical, analytic or itu"),
        )),
    }
}

fn band_index(key: &str, plan: &BandPlan, line: usize) -> CliResult<usize> {
    let key = key.trim();
    if !key.is_empty() && key.bytes().all(|b| b.is_ascii_digit()) {
        let i: usize = key
            .parse()
            .map_err(|_| CliError::validation(format!("line {line}: bad band index `{key}`")))?;
        if i >= plan.len() {
            return Err(CliError::validation(format!(
                "line {line}: band index {i} outside the plan"
            )));
        }
        return Ok(i);
    }
    let f: Frequency = key
        .parse()
        .map_err(|_| CliError::validation(format!("line {line}: `{key}` is neither a band index nor a frequency")))?;
    plan.index_of(f)
        .ok_or_else(|| CliError::validation(format!("line {line}: {f} is not in the band plan")))
}

fn parse_event(entry: &Entry, plan: &BandPlan) -> CliResult<TimedEvent> {
    let line = entry.line;
    let parts: Vec<&str> = entry.value.split_whitespace().collect();
    let bad = |msg: &str| CliError::validation(format!("line {line}: {msg} in `{}`", entry.value));
    let tick: usize = parts
        .first()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("expected `tick kind args`"))?;
    let kind = parts.get(1).copied().unwrap_or("");
    let args = &parts[2.min(parts.len())..];
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(bad(&format!("`{kind}` takes {n} argument(s)")))
        }
    };
    let number = |s: &str| {
        parse_number(s)
            .filter(|v| v.is_finite())
            .ok_or_else(|| bad("bad number"))
    };
    let kind = match kind {
        "obstruction-start" => {
            arity(1)?;
            EventKind::ObstructionStart {
                extra_loss_db: number(args[0])?,
            }
        }
        "obstruction-end" => {
            arity(0)?;
            EventKind::ObstructionEnd
        }
        "set-gain" => {
            arity(1)?;
            EventKind::SetGain {
                tx_gain_db: number(args[0])?,
            }
        }
        "set-frequency" => {
            arity(1)?;
            let freq: Frequency = args[0].parse().map_err(|_| bad("bad frequency"))?;
            if plan.index_of(freq).is_none() {
                return Err(bad("frequency is not in the band plan"));
            }
            EventKind::SetFrequency { freq }
        }
        "set-pool-capacity" => {
            arity(2)?;
            EventKind::SetPoolCapacity {
                band: band_index(args[0], plan, line)?,
                units: args[1].parse().map_err(|_| bad("bad unit count"))?,
            }
        }
        other => return Err(bad(&format!("unknown event `{other}`"))),
    };
    Ok(TimedEvent::new(tick, kind))
}

fn parse_switch(e: &Entry, key: &str) -> CliResult<bool> {
    match e.value.to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" => Ok(true),
        "off" | "false" | "no" => Ok(false),
        _ => Err(e.err(key, "expected on or off")),
    }
}

pub fn parse_scenario(text: &str) -> CliResult<Scenario> {
    let doc = tokenize(text)?;
    let top = |k: &str| doc.get(Section::Top, k);

    let duration = top("duration_ticks")
        .ok_or_else(|| CliError::validation("missing top-level `duration_ticks`"))?
        .usize("duration_ticks")?;
    let mut channel = ChannelConfig::new(build_model(&doc)?);
    let ch = |k: &str| doc.get(Section::Channel, k);
    if let Some(e) = ch("noise_floor_db") {
        channel.noise_floor_db = e.finite("noise_floor_db")?;
    }
    if let Some(e) = ch("rx_gain_db") {
        channel.rx_gain_db = e.finite("rx_gain_db")?;
    }
    if let Some(e) = ch("beta_sigma_db") {
        channel.beta_sigma_db = e.finite("beta_sigma_db")?;
    }
    if let Some(e) = ch("beta_clip_db") {
        channel.beta_clip_db = e.finite("beta_clip_db")?;
    }

    let name = top("name").map_or("scenario", |e| e.value.as_str());
    let mut s = Scenario::new(name, channel, duration);
    if let Some(e) = top("seed") {
        s.seed = e.u64("seed")?;
    }
    if let Some(e) = top("controller") {
        s.controller_enabled = parse_switch(e, "controller")?;
    }
    if let Some(e) = ch("tx_gain_db") {
        s.initial_tx_gain_db = e.finite("tx_gain_db")?;
    }

    if let Some(e) = doc.get(Section::Bands, "plan") {
        let bands = e
            .value
            .split(',')
            .map(|f| f.trim().parse::<Frequency>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| e.err("plan", "expected comma-separated frequencies"))?;
        s.plan = BandPlan::new(bands).map_err(|err| e.err("plan", &err.to_string()))?;
    }
    s.start_band = match doc.get(Section::Bands, "start") {
        Some(e) => band_index(&e.value, &s.plan, e.line)?,
        None => s.plan.len() - 1,
    };

    let mut slots = vec![
        BandSlot {
            capacity: 1,
            occupied: 0
        };
        s.plan.len()
    ];
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    for (key, e) in &doc.pool {
        let band = band_index(key, &s.plan, e.line)?;
        if let Some(prev) = seen.insert(band, e.line) {
            return Err(CliError::validation(format!(
                "line {}: band `{key}` already set on line {prev}",
                e.line
            )));
        }
        let nums: Vec<&str> = e.value.split_whitespace().collect();
        let parse = |s: &str| {
            s.parse::<u32>()
                .map_err(|_| e.err(key, "expected `<capacity> [<occupied>]`"))
        };
        let (capacity, occupied) = match nums.as_slice() {
            [c] => (parse(c)?, 0),
            [c, o] => (parse(c)?, parse(o)?),
            _ => return Err(e.err(key, "expected `<capacity> [<occupied>]`")),
        };
        slots[band] = BandSlot { capacity, occupied };
    }
    s.pool = SpectrumPool::from_slots(slots)?;

    let pol = |k: &str| doc.get(Section::Policy, k);
    let mut policy = DsaPolicy::default();
    if let Some(e) = pol("rss_margin_db") {
        policy.rss_margin_db = e.finite("rss_margin_db")?;
    }
    if let Some(e) = pol("bler_max") {
        policy.bler_max = e.finite("bler_max")?;
    }
    if let Some(e) = pol("hysteresis_db") {
        policy.hysteresis_db = e.f64("hysteresis_db")?;
    }
    if let Some(e) = pol("dwell_ticks") {
        policy.dwell_ticks = u32::try_from(e.usize("dwell_ticks")?).map_err(|_| e.err("dwell_ticks", "too large"))?;
    }
    if let Some(e) = pol("gain_step_db") {
        policy.gain_step_db = e.finite("gain_step_db")?;
    }
    if let Some(e) = pol("gain_max_db") {
        policy.gain_max_db = e.finite("gain_max_db")?;
    }
    if let Some(e) = pol("prefer") {
        policy.prefer = match e.value.as_str() {
            "downshift-first" => Preference::DownshiftFirst,
            "gain-first" => Preference::GainFirst,
            _ => return Err(e.err("prefer", "expected downshift-first or gain-first")),
        };
    }
    s.policy = policy;

    let phy = |k: &str| doc.get(Section::Phy, k);
    let mut ofdm = OfdmConfig::default();
    if let Some(e) = phy("symbols_per_tick") {
        s.symbols_per_tick = e.usize("symbols_per_tick")?;
    }
    if let Some(e) = phy("fft_size") {
        ofdm.fft_size = e.usize("fft_size")?;
    }
    if let Some(e) = phy("occupied_tones") {
        ofdm.occupied_tones = e.usize("occupied_tones")?;
    }
    if let Some(e) = phy("cp_len") {
        ofdm.cp_len = e.usize("cp_len")?;
    }
    if let Some(e) = phy("sample_rate_hz") {
        ofdm.sample_rate_hz = e.finite("sample_rate_hz")?;
    }
    if let Some(e) = phy("block_bits") {
        s.block_bits = e.usize("block_bits")?;
    }
    s.ofdm = ofdm;

    for e in &doc.schedule {
        let ev = parse_event(e, &s.plan)?;
        if ev.tick >= s.duration_ticks {
            return Err(CliError::validation(format!(
                "line {}: tick {} is past the last tick {}",
                e.line,
                ev.tick,
                s.duration_ticks.saturating_sub(1)
            )));
        }
        s.schedule.push(ev);
    }

    s.validate()
        .map_err(|e| CliError::validation(format!("invalid scenario: {e}")))?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "duration_ticks = 3\n[channel]\nmode = empirical\nreference_set = 1\n";

    #[test]
    fn bundled_scenarios_parse() {
        for (name, text) in BUNDLED {
            let s = parse_scenario(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(s.name, *name);
        }
    }

    #[test]
    fn minimal_scenario_uses_defaults() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.plan, BandPlan::default());
        assert_eq!(s.start_band, 3);
        assert_eq!(s.symbols_per_tick, 100);
        assert_eq!(s.policy, DsaPolicy::default());
        assert!(s.controller_enabled);
        assert!(matches!(s.channel.model, LinkModel::Empirical(_)));
    }

    #[test]
    fn unknown_key_names_key_and_line() {
        let text = format!("{MINIMAL}\n[policy]\nmargin = 3\n");
        let err = parse_scenario(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("`margin`") && msg.contains("line 7"), "{msg}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn pool_schedule_and_policy() {
        let text = format!(
            "{MINIMAL}[pool]\n1.2GHz = 3 2\n0 = 0\n[policy]\nhysteresis_db = inf\nprefer = gain-first\n\
             [schedule]\n1 set-frequency 1.6GHz # move\n2 set-pool-capacity 1.2GHz 5\n2 obstruction-start 10\n"
        );
        let s = parse_scenario(&text).unwrap();
        assert_eq!(
            s.pool.slot(1).unwrap(),
            BandSlot {
                capacity: 3,
                occupied: 2
            }
        );
        assert_eq!(s.pool.slot(0).unwrap().capacity, 0);
        assert!(s.policy.hysteresis_db.is_infinite());
        assert_eq!(s.policy.prefer, Preference::GainFirst);
        assert_eq!(s.schedule.len(), 3);
        assert_eq!(s.schedule[1].kind, EventKind::SetPoolCapacity { band: 1, units: 5 });
    }

    #[test]
    fn rejects_bad_input_with_line_numbers() {
        let cases = [
            (format!("{MINIMAL}[schedule]\n9 obstruction-end\n"), "line 6"),
            (format!("{MINIMAL}[schedule]\n1 teleport\n"), "line 6"),
            (format!("{MINIMAL}[bands]\nstart = 2.4GHz\n"), "line 6"),
            (format!("{MINIMAL}[weather]\n"), "line 5"),
            (format!("{MINIMAL}seed = 1\n"), "line 5"),
            (format!("{MINIMAL}alpha_db = 120\n"), "line 5"),
            (String::from("duration_ticks = 3\nduration_ticks = 4\n"), "line 2"),
        ];
        for (text, line) in cases {
            let msg = parse_scenario(&text).unwrap_err().to_string();
            assert!(msg.contains(line), "{msg}");
        }
    }

    #[test]
    fn model_variants() {
        let analytic = "duration_ticks = 1\n[channel]\nmode = analytic\nalpha_db = 127.25\n";
        assert!(
            matches!(parse_scenario(analytic).unwrap().channel.model, LinkModel::AnalyticAlpha(a) if a.alpha_db == 127.25)
        );
        let fitted = "duration_ticks = 1\n[channel]\nmode = analytic\nreference_set = 2\nalpha_unit = mhz\n";
        let LinkModel::AnalyticAlpha(a) = parse_scenario(fitted).unwrap().channel.model else {
            panic!()
        };
        assert!((a.alpha_db - (126.56816461016227 - 120.0)).abs() < 1e-9);
        let itu = "duration_ticks = 1\n[channel]\nmode = itu\npath_loss_n = 30\ndistance_m = 10\n";
        assert!(matches!(
            parse_scenario(itu).unwrap().channel.model,
            LinkModel::ItuModel { .. }
        ));
        let points = "duration_ticks = 1\n[channel]\nmode = empirical\npoints = 800MHz:-40, 2GHz:-60\n";
        assert!(parse_scenario(points).is_ok());
    }

    #[test]
    fn builtin_prefix_resolves() {
        assert!(load_scenario("builtin:table1_sweep").is_ok());
        assert_eq!(load_scenario("builtin:nope").unwrap_err().exit_code(), 1);
        assert_eq!(load_scenario("/nonexistent/x.scn").unwrap_err().exit_code(), 2);
    }
}
