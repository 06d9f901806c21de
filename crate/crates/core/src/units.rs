use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

/// A carrier frequency, stored in hertz.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Frequency(f64);

impl Frequency {
    pub fn from_hz(hz: f64) -> Result<Self> {
        if hz.is_finite() && hz > 0.0 {
            Ok(Self(hz))
        } else {
            Err(Error::InvalidFrequency(hz))
        }
    }

    pub fn from_mhz(mhz: f64) -> Result<Self> {
        Self::from_hz(mhz * 1e6)
    }

    pub fn from_ghz(ghz: f64) -> Result<Self> {
        Self::from_hz(ghz * 1e9)
    }

    pub fn hz(self) -> f64 {
        self.0
    }

    pub fn mhz(self) -> f64 {
        self.0 / 1e6
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 >= 1e9 {
            write!(f, "{}GHz", self.0 / 1e9)
        } else if self.0 >= 1e6 {
            write!(f, "{}MHz", self.0 / 1e6)
        } else {
            write!(f, "{}Hz", self.0)
        }
    }
}

/// Parses plain hertz (`830000000`) or a value with a `Hz`, `kHz`, `MHz` or
/// `GHz` suffix (case-insensitive, optional space).
impl FromStr for Frequency {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let lower = s.to_ascii_lowercase();
        let (number, scale) = if let Some(n) = lower.strip_suffix("ghz") {
            (n, 1e9)
        } else if let Some(n) = lower.strip_suffix("mhz") {
            (n, 1e6)
        } else if let Some(n) = lower.strip_suffix("khz") {
            (n, 1e3)
        } else if let Some(n) = lower.strip_suffix("hz") {
            (n, 1.0)
        } else {
            (lower.as_str(), 1.0)
        };
        let value: f64 = number.trim().parse().map_err(|_| Error::InvalidFrequency(f64::NAN))?;
        Self::from_hz(value * scale)
    }
}

pub fn db_to_power(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

pub fn power_to_db(power: f64) -> f64 {
    10.0 * libm::log10(power)
}
