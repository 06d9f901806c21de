use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::fft::{Direction, Fft};
use crate::{Error, Result};

/// Nominal baseband sample rate used to stamp frames and convert ticks to time.
pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 10e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfdmConfig {
    pub fft_size: usize,
    /// Data tones, split evenly either side of an unused DC bin.
    pub occupied_tones: usize,
    pub cp_len: usize,
    pub sample_rate_hz: f64,
}

impl Default for OfdmConfig {
    fn default() -> Self {
        Self {
            fft_size: 512,
            occupied_tones: 200,
            cp_len: 128,
            sample_rate_hz: DEFAULT_SAMPLE_RATE_HZ,
        }
    }
}

impl OfdmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.fft_size == 0 {
            return Err(Error::InvalidOfdmConfig("fft_size must be positive"));
        }
        if self.occupied_tones == 0 || !self.occupied_tones.is_multiple_of(2) {
            return Err(Error::InvalidOfdmConfig("occupied_tones must be positive and even"));
        }
        if self.occupied_tones >= self.fft_size {
            return Err(Error::InvalidOfdmConfig("occupied_tones must be below fft_size"));
        }
        if self.cp_len >= self.fft_size {
            return Err(Error::InvalidOfdmConfig("cp_len must be below fft_size"));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::InvalidOfdmConfig("sample rate must be positive"));
        }
        Ok(())
    }

    /// Samples per OFDM symbol including the cyclic prefix.
    pub fn symbol_len(&self) -> usize {
        self.fft_size + self.cp_len
    }

    pub fn symbol_duration_s(&self) -> f64 {
        self.symbol_len() as f64 / self.sample_rate_hz
    }

    pub fn bits_per_ofdm_symbol(&self) -> usize {
        self.occupied_tones * super::BITS_PER_SYMBOL
    }

    /// FFT bin of the `i`-th data tone: subcarriers `-occ/2..=-1` then `1..=occ/2`.
    pub fn tone_bin(&self, i: usize) -> usize {
        let half = self.occupied_tones / 2;
        if i < half {
            self.fft_size - (half - i)
        } else {
            i - half + 1
        }
    }

    /// Signed subcarrier offset of the `i`-th data tone.
    pub fn tone_offset(&self, i: usize) -> isize {
        let half = (self.occupied_tones / 2) as isize;
        let i = i as isize;
        if i < half {
            i - half
        } else {
            i - half + 1
        }
    }
}

/// A block of complex baseband samples.
#[derive(Debug, Clone, PartialEq)]
pub struct IqFrame {
    pub samples: Vec<Complex64>,
    pub sample_rate_hz: f64,
    pub symbols_contained: usize,
}

impl IqFrame {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn scaled(&self, gain: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|s| s * gain).collect(),
            ..self.clone()
        }
    }

    /// Mean `|x|^2` over all samples.
    pub fn mean_power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }
}

/// CP-OFDM modulator/demodulator holding a planned FFT.
#[derive(Debug, Clone)]
pub struct OfdmModem {
    cfg: OfdmConfig,
    fft: Fft,
    scale: f64,
}

impl OfdmModem {
    pub fn new(cfg: OfdmConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            fft: Fft::new(cfg.fft_size),
            scale: 1.0 / libm::sqrt(cfg.fft_size as f64),
        })
    }

    pub fn config(&self) -> &OfdmConfig {
        &self.cfg
    }

    pub fn modulate(&self, symbols: &[Complex64]) -> Result<IqFrame> {
        let cfg = &self.cfg;
        if !symbols.len().is_multiple_of(cfg.occupied_tones) {
            return Err(Error::NotMultiple {
                len: symbols.len(),
                multiple: cfg.occupied_tones,
            });
        }
        let n_symbols = symbols.len() / cfg.occupied_tones;
        let mut samples = Vec::with_capacity(n_symbols * cfg.symbol_len());
        let mut bins = vec![Complex64::new(0.0, 0.0); cfg.fft_size];
        for chunk in symbols.chunks_exact(cfg.occupied_tones) {
            bins.fill(Complex64::new(0.0, 0.0));
            for (i, &s) in chunk.iter().enumerate() {
                bins[cfg.tone_bin(i)] = s;
            }
            self.fft.process(&mut bins, Direction::Inverse);
            for b in bins.iter_mut() {
                *b *= self.scale;
            }
            samples.extend_from_slice(&bins[cfg.fft_size - cfg.cp_len..]);
            samples.extend_from_slice(&bins);
        }
        Ok(IqFrame {
            samples,
            sample_rate_hz: cfg.sample_rate_hz,
            symbols_contained: n_symbols,
        })
    }

    /// Per-symbol occupied-tone values, concatenated in modulation order.
    pub fn demodulate(&self, frame: &IqFrame) -> Result<Vec<Complex64>> {
        let cfg = &self.cfg;
        let len = cfg.symbol_len();
        if !frame.samples.len().is_multiple_of(len) {
            return Err(Error::NotMultiple {
                len: frame.samples.len(),
                multiple: len,
            });
        }
        let mut out = Vec::with_capacity(frame.samples.len() / len * cfg.occupied_tones);
        let mut bins = vec![Complex64::new(0.0, 0.0); cfg.fft_size];
        for symbol in frame.samples.chunks_exact(len) {
            bins.copy_from_slice(&symbol[cfg.cp_len..]);
            self.fft.process(&mut bins, Direction::Forward);
            out.extend((0..cfg.occupied_tones).map(|i| bins[cfg.tone_bin(i)] * self.scale));
        }
        Ok(out)
    }
}

pub fn ofdm_modulate(symbols: &[Complex64], cfg: &OfdmConfig) -> Result<IqFrame> {
    OfdmModem::new(*cfg)?.modulate(symbols)
}

pub fn ofdm_demodulate(frame: &IqFrame, cfg: &OfdmConfig) -> Result<Vec<Complex64>> {
    OfdmModem::new(*cfg)?.demodulate(frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::{generate_bits, qam16_modulate};

    fn rms_error(a: &[Complex64], b: &[Complex64]) -> f64 {
        libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>() / a.len() as f64)
    }

    #[test]
    fn config_validation() {
        assert!(OfdmConfig::default().validate().is_ok());
        let bad = [
            OfdmConfig {
                occupied_tones: 201,
                ..Default::default()
            },
            OfdmConfig {
                occupied_tones: 512,
                ..Default::default()
            },
            OfdmConfig {
                cp_len: 512,
                ..Default::default()
            },
            OfdmConfig {
                fft_size: 0,
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn tone_map_is_symmetric_and_skips_dc() {
        let cfg = OfdmConfig::default();
        let bins: Vec<usize> = (0..200).map(|i| cfg.tone_bin(i)).collect();
        assert!(!bins.contains(&0));
        assert_eq!(bins[0], 412);
        assert_eq!(bins[99], 511);
        assert_eq!(bins[100], 1);
        assert_eq!(bins[199], 100);
        assert_eq!(cfg.tone_offset(0), -100);
        assert_eq!(cfg.tone_offset(199), 100);
    }

    #[test]
    fn frame_length_for_one_symbol() {
        let bits = generate_bits(800, 1);
        let frame = ofdm_modulate(&qam16_modulate(&bits).unwrap(), &OfdmConfig::default()).unwrap();
        assert_eq!(frame.len(), 640);
        assert_eq!(frame.symbols_contained, 1);
    }

    #[test]
    fn cyclic_prefix_copies_tail() {
        let cfg = OfdmConfig::default();
        let bits = generate_bits(1600, 2);
        let frame = ofdm_modulate(&qam16_modulate(&bits).unwrap(), &cfg).unwrap();
        for sym in frame.samples.chunks_exact(640) {
            assert_eq!(&sym[..128], &sym[512..]);
        }
    }

    #[test]
    fn zeros_map_to_zeros() {
        let frame = ofdm_modulate(&[Complex64::new(0.0, 0.0); 400], &OfdmConfig::default()).unwrap();
        assert!(frame.samples.iter().all(|s| s.norm() == 0.0));
    }

    #[test]
    fn round_trip_and_linearity() {
        let cfg = OfdmConfig::default();
        let symbols = qam16_modulate(&generate_bits(8000, 5)).unwrap();
        let frame = ofdm_modulate(&symbols, &cfg).unwrap();
        let back = ofdm_demodulate(&frame, &cfg).unwrap();
        assert!(rms_error(&symbols, &back) < 1e-9);

        let g = 3.7;
        let scaled = ofdm_demodulate(&frame.scaled(g), &cfg).unwrap();
        let expected: Vec<Complex64> = symbols.iter().map(|s| s * g).collect();
        assert!(rms_error(&expected, &scaled) < 1e-9);
    }

    #[test]
    fn length_errors() {
        let cfg = OfdmConfig::default();
        assert!(matches!(
            ofdm_modulate(&[Complex64::new(1.0, 0.0); 150], &cfg),
            Err(Error::NotMultiple {
                len: 150,
                multiple: 200
            })
        ));
        let frame = IqFrame {
            samples: vec![Complex64::new(0.0, 0.0); 700],
            sample_rate_hz: 1.0,
            symbols_contained: 1,
        };
        assert!(ofdm_demodulate(&frame, &cfg).is_err());
    }

    #[test]
    fn non_power_of_two_fft() {
        let cfg = OfdmConfig {
            fft_size: 96,
            occupied_tones: 40,
            cp_len: 16,
            ..Default::default()
        };
        let symbols = qam16_modulate(&generate_bits(320, 9)).unwrap();
        let back = ofdm_demodulate(&ofdm_modulate(&symbols, &cfg).unwrap(), &cfg).unwrap();
        assert!(rms_error(&symbols, &back) < 1e-9);
    }
}
