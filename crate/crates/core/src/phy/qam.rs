//! Gray-coded square 16-QAM with unit average symbol energy.
//!
//! Bit order within a symbol is `b0 b1 b2 b3`: `b0`/`b2` pick the in-phase
//! sign/magnitude and `b1`/`b3` the quadrature sign/magnitude, so each axis
//! carries the Gray sequence `10 11 01 00` from -3 to +3 (pairs written as
//! sign, magnitude).

use alloc::vec::Vec;

use num_complex::Complex64;

use super::BitBlock;
use crate::{Error, Result};

pub const BITS_PER_SYMBOL: usize = 4;

const SQRT_10: f64 = 3.1622776601683795;

// (sign bit, magnitude bit) -> level, in lexicographic order of the pair
const AXIS: [((bool, bool), f64); 4] = [
    ((false, false), 1.0),
    ((false, true), 3.0),
    ((true, false), -1.0),
    ((true, true), -3.0),
];

fn level(sign: bool, magnitude: bool) -> f64 {
    let s = if sign { -1.0 } else { 1.0 };
    let m = if magnitude { 3.0 } else { 1.0 };
    s * m
}

/// Constellation point for one 4-bit group.
pub fn qam16_point(b: [bool; 4]) -> Complex64 {
    Complex64::new(level(b[0], b[2]), level(b[1], b[3])) / SQRT_10
}

pub fn qam16_modulate(bits: &BitBlock) -> Result<Vec<Complex64>> {
    if !bits.len().is_multiple_of(BITS_PER_SYMBOL) {
        return Err(Error::NotMultiple {
            len: bits.len(),
            multiple: BITS_PER_SYMBOL,
        });
    }
    Ok(bits
        .bits
        .chunks_exact(BITS_PER_SYMBOL)
        .map(|c| qam16_point([c[0], c[1], c[2], c[3]]))
        .collect())
}

// Distances closer than this count as equal.
const TIE_EPS: f64 = 1e-12;

// Nearest level on one axis; ties go to the lexicographically smaller pair.
fn decide_axis(x: f64) -> (bool, bool) {
    let scaled = x * SQRT_10;
    let mut best = AXIS[0];
    let mut best_dist = (scaled - best.1).abs();
    for &candidate in &AXIS[1..] {
        let dist = (scaled - candidate.1).abs();
        if dist < best_dist - TIE_EPS {
            best = candidate;
            best_dist = dist;
        }
    }
    best.0
}

/// Minimum-distance hard decision.
///
/// The axes are independent, so per-axis tie-breaking toward the smaller
/// (sign, magnitude) pair yields the lexicographically smallest pattern among
/// all equidistant constellation points.
pub fn qam16_demodulate(symbols: &[Complex64]) -> BitBlock {
    let mut bits = Vec::with_capacity(symbols.len() * BITS_PER_SYMBOL);
    for s in symbols {
        let (i_sign, i_mag) = decide_axis(s.re);
        let (q_sign, q_mag) = decide_axis(s.im);
        bits.extend([i_sign, q_sign, i_mag, q_mag]);
    }
    BitBlock::new(bits)
}

/// Nearest-neighbour approximation of Gray-coded 16-QAM bit error rate,
/// `3/4 * Q(sqrt(Es / (5 N0)))`.
pub fn qam16_ber_approx(esn0_db: f64) -> f64 {
    let esn0 = crate::db_to_power(esn0_db);
    let arg = libm::sqrt(esn0 / 5.0);
    0.75 * 0.5 * libm::erfc(arg / core::f64::consts::SQRT_2)
}
