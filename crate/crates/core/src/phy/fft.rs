//! In-place complex FFT.
//!
//! Power-of-two lengths use an iterative radix-2 transform; anything else
//! falls back to a direct DFT. Both are unnormalized.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Precomputed twiddles and bit-reversal table for one transform length.
#[derive(Debug, Clone)]
pub struct Fft {
    len: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Fft {
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "FFT length must be positive");
        let twiddles = (0..len)
            .map(|k| {
                let angle = -2.0 * PI * k as f64 / len as f64;
                Complex64::new(libm::cos(angle), libm::sin(angle))
            })
            .collect();
        let bitrev = if len.is_power_of_two() {
            let bits = len.trailing_zeros();
            (0..len)
                .map(|i| {
                    if bits == 0 {
                        0
                    } else {
                        i.reverse_bits() >> (usize::BITS - bits)
                    }
                })
                .collect()
        } else {
            Vec::new()
        };
        Self { len, twiddles, bitrev }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    // e^{sign * 2 pi i k / n} from the forward table
    fn twiddle(&self, k: usize, dir: Direction) -> Complex64 {
        let w = self.twiddles[k % self.len];
        match dir {
            Direction::Forward => w,
            Direction::Inverse => w.conj(),
        }
    }

    pub fn process(&self, data: &mut [Complex64], dir: Direction) {
        assert_eq!(data.len(), self.len, "buffer length does not match FFT length");
        if self.len.is_power_of_two() {
            self.radix2(data, dir);
        } else {
            self.direct(data, dir);
        }
    }

    fn radix2(&self, data: &mut [Complex64], dir: Direction) {
        let n = self.len;
        for i in 0..n {
            let j = self.bitrev[i];
            if j > i {
                data.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let stride = n / size;
            for start in (0..n).step_by(size) {
                for k in 0..half {
                    let w = self.twiddle(k * stride, dir);
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            size *= 2;
        }
    }

    fn direct(&self, data: &mut [Complex64], dir: Direction) {
        let n = self.len;
        let input: Vec<Complex64> = data.to_vec();
        for (k, out) in data.iter_mut().enumerate() {
            *out = input
                .iter()
                .enumerate()
                .map(|(j, x)| x * self.twiddle((j * k) % n, dir))
                .sum();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn naive_dft(x: &[Complex64], sign: f64) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, v)| {
                        let a = sign * 2.0 * PI * (j * k) as f64 / n as f64;
                        v * Complex64::new(libm::cos(a), libm::sin(a))
                    })
                    .sum()
            })
            .collect()
    }

    fn signal(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|i| Complex64::new(libm::sin(0.37 * i as f64) + 0.1 * i as f64, libm::cos(1.3 * i as f64)))
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        for n in [1usize, 2, 4, 8, 64, 512, 3, 12, 100] {
            let x = signal(n);
            for (dir, sign) in [(Direction::Forward, -1.0), (Direction::Inverse, 1.0)] {
                let mut y = x.clone();
                Fft::new(n).process(&mut y, dir);
                let expected = naive_dft(&x, sign);
                for (a, b) in y.iter().zip(&expected) {
                    assert!((a - b).norm() < 1e-8 * n as f64, "n={n}");
                }
            }
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        let fft = Fft::new(256);
        let x = signal(256);
        let mut y = x.clone();
        fft.process(&mut y, Direction::Forward);
        fft.process(&mut y, Direction::Inverse);
        for (a, b) in y.iter().zip(&x) {
            assert!((a / 256.0 - b).norm() < 1e-12);
        }
    }

    #[test]
    fn impulse_is_flat() {
        let mut x = vec![Complex64::new(0.0, 0.0); 16];
        x[0] = Complex64::new(1.0, 0.0);
        Fft::new(16).process(&mut x, Direction::Forward);
        assert!(x.iter().all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-15));
    }
}
