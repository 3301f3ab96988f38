//! Capacity limits and photon-efficient modulation for the discrete-slot
//! optical channel.
//!
//! The crate is organised bottom-up:
//!
//! * [`channel`]: per-slot complex amplitudes, constellations, the lossy
//!   (or amplifying) AWGN transformation and physical-unit conversions.
//! * [`detection`]: outcome laws of direct detection and single/dual
//!   quadrature homodyne detection, with Monte Carlo samplers.
//! * [`infotheory`]: mutual information engine and the closed-form
//!   Shannon, Holevo and Fock capacities and photon information efficiency.
//! * [`fock`]: truncated photon-number-basis numerics and the Holevo
//!   quantity of finite coherent-state ensembles.
//! * [`ppm`]: pulse position modulation over the erasure channel.
//! * [`hadamard`]: BPSK Hadamard words, the interferometric cascade and the
//!   superadditive `(M+1)`-word scheme.
//!
//! All information quantities are in bits.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod detection;
mod error;
pub mod fock;
pub mod hadamard;
pub mod infotheory;
pub mod ppm;
pub mod quad;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// `log2(e)`, the number of bits in one nat.
pub const LOG2_E: f64 = std::f64::consts::LOG2_E;
