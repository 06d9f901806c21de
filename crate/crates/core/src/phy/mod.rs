//! Baseband PHY chain: random bits, 16-QAM, CP-OFDM and link metrics.
//!
//! Power is expressed on a simulator scale where 0 dB is the average power
//! of the unit-energy constellation on one occupied tone. The OFDM transforms
//! are unitary, so complex white noise of per-sample variance `s` shows up
//! with power `s` on every tone.

mod bits;
pub mod fft;
mod metrics;
mod ofdm;
mod qam;
mod spectrum;

pub(crate) use bits::fill_bits;
pub use bits::{generate_bits, BitBlock};
pub use metrics::{
    add_awgn, ber_monte_carlo, compute_ber, compute_bler, measure_rss, normalize_tone_power, tone_power_db, BerPoint,
    LinkMetrics,
};
pub use ofdm::{ofdm_demodulate, ofdm_modulate, IqFrame, OfdmConfig, OfdmModem, DEFAULT_SAMPLE_RATE_HZ};
pub use qam::{qam16_ber_approx, qam16_demodulate, qam16_modulate, qam16_point, BITS_PER_SYMBOL};
pub use spectrum::{spectrum, PsdBin};

pub use num_complex::Complex64;
