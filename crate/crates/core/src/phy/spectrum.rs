//! Welch power spectral density with a Hann window and 50% overlap.
//!
//! Bins are normalized by the window energy, `E|X_w[k]|^2 / sum(w^2)`, so
//! white noise of per-sample variance `s` reads `s` in every bin and the mean
//! of the linear bins equals the time-domain power.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::fft::{Direction, Fft};
use super::IqFrame;
use crate::{power_to_db, Error, Frequency, Result};

// floor for log conversion of empty bins
const MIN_POWER: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdBin {
    /// Absolute frequency: carrier plus baseband offset.
    pub freq_hz: f64,
    pub psd_db: f64,
}

fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 * (1.0 - libm::cos(2.0 * PI * i as f64 / n as f64)))
        .collect()
}

/// Welch PSD of `frame`, ordered from the most negative to the most positive
/// offset around `center_freq`.
pub fn spectrum(frame: &IqFrame, nfft: usize, center_freq: Frequency) -> Result<Vec<PsdBin>> {
    if nfft == 0 || frame.len() < nfft {
        return Err(Error::FrameTooShort { len: frame.len(), nfft });
    }
    let window = hann(nfft);
    let window_energy: f64 = window.iter().map(|w| w * w).sum();
    let hop = (nfft / 2).max(1);
    let fft = Fft::new(nfft);

    let mut acc = vec![0.0f64; nfft];
    let mut buf = vec![Complex64::new(0.0, 0.0); nfft];
    let mut segments = 0usize;
    let mut start = 0;
    while start + nfft <= frame.len() {
        for ((b, s), w) in buf.iter_mut().zip(&frame.samples[start..start + nfft]).zip(&window) {
            *b = s * *w;
        }
        fft.process(&mut buf, Direction::Forward);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
        segments += 1;
        start += hop;
    }

    let norm = 1.0 / (segments as f64 * window_energy);
    let bin_width = frame.sample_rate_hz / nfft as f64;
    let half = (nfft / 2) as isize;
    Ok((0..nfft as isize)
        .map(|j| {
            let offset = j - half;
            let k = offset.rem_euclid(nfft as isize) as usize;
            PsdBin {
                freq_hz: center_freq.hz() + offset as f64 * bin_width,
                psd_db: power_to_db((acc[k] * norm).max(MIN_POWER)),
            }
        })
        .collect())
}
