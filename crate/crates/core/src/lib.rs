//! Multi-channel frequency coding for laser links at the single-photon level.
//!
//! Symbols are sent as sets of intensity-modulation frequencies on a weak
//! coherent beam and recovered from the spectrum of photon arrival times.
//!
//! * [`photon_channel`]: modulated Poisson sources, loss, background and
//!   detector models, and the `PTS1` timestamp file format.
//! * [`spectral`]: point-process spectrum of a detection sequence, line and
//!   noise-floor statistics.
//! * [`codec`]: frequency plans and symbol / image / text coding.
//! * [`analysis`]: error-rate and capacity models, photon statistics.
//! * [`harness`]: Monte Carlo sweeps reproducing the link studies.

pub mod analysis;
pub mod codec;
pub mod error;
pub mod harness;
pub mod photon_channel;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
