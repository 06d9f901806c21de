use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dsalink::commands::{
    cmd_ber_curve, cmd_curve, cmd_fit_alpha, cmd_simulate, cmd_spectrum, cmd_sweep, parse_esn0_list, DEFAULT_PSD_NFFT,
};
use dsalink::CommandResult;
use dsalink_core::propagation::{CurveMode, FrequencyUnit};
use dsalink_core::Frequency;

/// Path-loss analysis and dynamic spectrum access link simulation.
#[derive(Debug, Parser)]
#[command(name = "dsalink", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Unit {
    Hz,
    Mhz,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Analytic,
    Interpolated,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit alpha in P_r = alpha - 20 log10(f) to a `freq_hz,rss_dbm` CSV.
    FitAlpha {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "hz")]
        unit: Unit,
        /// Optional per-point report CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// RSS-vs-frequency curve over a log-spaced grid.
    Curve {
        #[arg(long)]
        input: PathBuf,
        /// Lower frequency, e.g. 830MHz.
        #[arg(long)]
        from: Frequency,
        #[arg(long)]
        to: Frequency,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, value_enum, default_value = "interpolated")]
        mode: Mode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a scenario and write `<out>_metrics.csv`, `<out>_events.log`
    /// and `<out>_summary.txt`.
    Simulate {
        /// Scenario file, or `builtin:<name>` for a bundled one.
        #[arg(long)]
        input: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// PSD of the received frame at one tick of a scenario.
    Spectrum {
        #[arg(long)]
        input: String,
        #[arg(long)]
        tick: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_PSD_NFFT)]
        nfft: usize,
    },
    /// Monte-Carlo 16-QAM BER through the OFDM chain.
    BerCurve {
        /// Comma-separated Es/N0 values in dB.
        #[arg(long, default_value = "0,2,4,6,8,10,12,14,16")]
        esn0: String,
        #[arg(long, default_value_t = 100_000)]
        bits: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// One received PSD per constant-setting phase of a scenario.
    Sweep {
        #[arg(long)]
        input: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_PSD_NFFT)]
        nfft: usize,
    },
}

fn dispatch(command: Command) -> CommandResult {
    match command {
        Command::FitAlpha { input, unit, out } => {
            let unit = match unit {
                Unit::Hz => FrequencyUnit::Hz,
                Unit::Mhz => FrequencyUnit::MHz,
            };
            cmd_fit_alpha(&input, unit, out.as_deref())
        }
        Command::Curve {
            input,
            from,
            to,
            steps,
            mode,
            out,
        } => {
            let mode = match mode {
                Mode::Analytic => CurveMode::AnalyticAlpha,
                Mode::Interpolated => CurveMode::PiecewiseLogLinear,
            };
            cmd_curve(&input, from, to, steps, mode, &out)
        }
        Command::Simulate { input, out, seed } => cmd_simulate(&input, &out, seed),
        Command::Spectrum {
            input,
            tick,
            out,
            seed,
            nfft,
        } => cmd_spectrum(&input, tick, &out, seed, nfft),
        Command::BerCurve { esn0, bits, seed, out } => match parse_esn0_list(&esn0) {
            Ok(list) => cmd_ber_curve(&list, bits, seed, &out),
            Err(e) => CommandResult {
                exit_code: e.exit_code(),
                outputs: Vec::new(),
                message: e.to_string(),
            },
        },
        Command::Sweep { input, out, seed, nfft } => cmd_sweep(&input, &out, seed, nfft),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = dispatch(cli.command);
    if result.is_success() {
        print!("{}", result.message);
        for path in &result.outputs {
            eprintln!("wrote {}", path.display());
        }
    } else {
        eprintln!("error: {}", result.message);
    }
    ExitCode::from(u8::try_from(result.exit_code).unwrap_or(1))
}
