use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the core operations.
#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("frequency must be positive and finite, got {0} Hz")]
    InvalidFrequency(f64),
    #[error("invalid path-loss parameters: {0}")]
    InvalidPathLoss(&'static str),
    #[error("measurement set needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("measurement frequencies must be strictly increasing (point {index})")]
    FrequenciesNotIncreasing { index: usize },
    #[error("frequency {freq_hz} Hz outside measured range [{lo_hz}, {hi_hz}] Hz")]
    OutOfRange { freq_hz: f64, lo_hz: f64, hi_hz: f64 },
    #[error("curve needs at least 2 steps, got {0}")]
    TooFewSteps(usize),
    #[error("curve range is empty: lower bound {lo_hz} Hz is not below upper bound {hi_hz} Hz")]
    EmptyRange { lo_hz: f64, hi_hz: f64 },
    #[error("invalid OFDM configuration: {0}")]
    InvalidOfdmConfig(&'static str),
    #[error("length {len} is not a multiple of {multiple}")]
    NotMultiple { len: usize, multiple: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("frame contains no samples")]
    EmptyFrame,
    #[error("frame has {len} samples, fewer than the {nfft}-point segment")]
    FrameTooShort { len: usize, nfft: usize },
    #[error("invalid channel state: {0}")]
    InvalidChannel(&'static str),
    #[error("band index {0} is not in the band plan")]
    UnknownBand(usize),
    #[error("band {0} has no free capacity")]
    BandFull(usize),
    #[error("band {0} has nothing to release")]
    BandEmpty(usize),
    #[error("capacity {capacity} is below current occupancy {occupied} on band {band}")]
    CapacityBelowOccupancy { band: usize, capacity: u32, occupied: u32 },
    #[error("action rejected: {0}")]
    ActionRejected(&'static str),
    #[error("invalid policy: {0}")]
    InvalidPolicy(&'static str),
    #[error("invalid scenario: {0}")]
    InvalidScenario(&'static str),
    #[error("empty metrics log")]
    EmptyLog,
}
