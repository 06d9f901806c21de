use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::bits::fill_bits;
use super::{qam16_demodulate, qam16_modulate, BitBlock, IqFrame, OfdmConfig, OfdmModem};
use crate::{power_to_db, Error, Result};

/// Per-tick link quality as seen by the controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkMetrics {
    pub rss_db: f64,
    pub ber: f64,
    pub bler: f64,
    pub snr_db: f64,
}

/// Adds circularly-symmetric complex Gaussian noise of the given per-sample
/// variance (split evenly between I and Q).
pub fn add_awgn<R: Rng + ?Sized>(frame: &mut IqFrame, variance: f64, rng: &mut R) {
    if variance <= 0.0 {
        return;
    }
    let sigma = libm::sqrt(variance / 2.0);
    for s in frame.samples.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *s += Complex64::new(re * sigma, im * sigma);
    }
}

/// Automatic gain control: rescales tones to unit mean power so the 16-QAM
/// slicer sees its nominal decision levels. Noise is included in the
/// measured power, which biases the scale slightly at low SNR.
pub fn normalize_tone_power(tones: &mut [Complex64]) {
    if tones.is_empty() {
        return;
    }
    let mean = tones.iter().map(|t| t.norm_sqr()).sum::<f64>() / tones.len() as f64;
    if mean > 0.0 && mean.is_finite() {
        let k = 1.0 / libm::sqrt(mean);
        for t in tones.iter_mut() {
            *t *= k;
        }
    }
}

/// Mean power of demodulated tone values, in dB.
pub fn tone_power_db(tones: &[Complex64]) -> Result<f64> {
    if tones.is_empty() {
        return Err(Error::EmptyFrame);
    }
    let mean = tones.iter().map(|t| t.norm_sqr()).sum::<f64>() / tones.len() as f64;
    Ok(power_to_db(mean))
}

/// Mean per-occupied-tone power across every OFDM symbol of the frame, in dB.
pub fn measure_rss(frame: &IqFrame, cfg: &OfdmConfig) -> Result<f64> {
    if frame.is_empty() {
        return Err(Error::EmptyFrame);
    }
    let tones = OfdmModem::new(*cfg)?.demodulate(frame)?;
    tone_power_db(&tones)
}

pub fn compute_ber(tx: &BitBlock, rx: &BitBlock) -> Result<f64> {
    if tx.len() != rx.len() {
        return Err(Error::LengthMismatch {
            left: tx.len(),
            right: rx.len(),
        });
    }
    if tx.is_empty() {
        return Ok(0.0);
    }
    let errors = tx.bits.iter().zip(&rx.bits).filter(|(a, b)| a != b).count();
    Ok(errors as f64 / tx.len() as f64)
}

/// Fraction of `block_bits`-sized blocks holding at least one bit error.
pub fn compute_bler(tx: &BitBlock, rx: &BitBlock, block_bits: usize) -> Result<f64> {
    if tx.len() != rx.len() {
        return Err(Error::LengthMismatch {
            left: tx.len(),
            right: rx.len(),
        });
    }
    if block_bits == 0 || !tx.len().is_multiple_of(block_bits) {
        return Err(Error::NotMultiple {
            len: tx.len(),
            multiple: block_bits,
        });
    }
    let blocks = tx.len() / block_bits;
    if blocks == 0 {
        return Ok(0.0);
    }
    let failed = tx
        .bits
        .chunks_exact(block_bits)
        .zip(rx.bits.chunks_exact(block_bits))
        .filter(|(a, b)| a != b)
        .count();
    Ok(failed as f64 / blocks as f64)
}

/// Outcome of one Monte-Carlo BER point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub esn0_db: f64,
    pub bits: usize,
    pub errors: usize,
}

impl BerPoint {
    pub fn ber(&self) -> f64 {
        self.errors as f64 / self.bits as f64
    }
}

/// Runs at least `min_bits` random bits (rounded up to whole OFDM symbols)
/// through 16-QAM, OFDM, AWGN at `esn0_db` per tone, and back.
pub fn ber_monte_carlo(cfg: &OfdmConfig, esn0_db: f64, min_bits: usize, seed: u64) -> Result<BerPoint> {
    const CHUNK_SYMBOLS: usize = 100;
    let modem = OfdmModem::new(*cfg)?;
    let per_symbol = cfg.bits_per_ofdm_symbol();
    let total_symbols = min_bits.div_ceil(per_symbol).max(1);
    let variance = crate::db_to_power(-esn0_db);

    let mut bit_rng = ChaCha8Rng::seed_from_u64(seed);
    bit_rng.set_stream(1);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(seed);
    noise_rng.set_stream(2);

    let mut errors = 0;
    let mut done = 0;
    while done < total_symbols {
        let n = CHUNK_SYMBOLS.min(total_symbols - done);
        let tx = fill_bits(&mut bit_rng, n * per_symbol);
        let mut frame = modem.modulate(&qam16_modulate(&tx)?)?;
        add_awgn(&mut frame, variance, &mut noise_rng);
        let rx = qam16_demodulate(&modem.demodulate(&frame)?);
        errors += tx.bits.iter().zip(&rx.bits).filter(|(a, b)| a != b).count();
        done += n;
    }
    Ok(BerPoint {
        esn0_db,
        bits: total_symbols * per_symbol,
        errors,
    })
}
