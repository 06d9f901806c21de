//! Link-level simulation of path-loss mitigation by dynamic spectrum access.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure
//! computation:
//!
//! * [`propagation`]: the ITU indoor path-loss model, alpha fitting and
//!   RSS-vs-frequency curves built from measurement sets.
//! * [`phy`]: random bits, Gray-coded 16-QAM, CP-OFDM framing, RSS/BER/BLER
//!   metrics and a Welch PSD estimator.
//! * [`channel`]: the per-tick link budget (path loss, gain chain, a
//!   time-varying environment term, obstructions) and AWGN at the noise floor.
//! * [`dsa`]: the controller that downshifts the carrier, raises transmit
//!   gain, or declares the link failed, gated by a spectrum pool.
//! * [`sim`]: a deterministic tick engine wiring the above into metrics logs.
//!
//! File formats and the command-line tool live in the `dsalink` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod dsa;
mod error;
pub mod phy;
pub mod propagation;
pub mod sim;
mod units;

pub use error::{Error, Result};
pub use units::{db_to_power, power_to_db, Frequency};
