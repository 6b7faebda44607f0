//! Error-rate and capacity models, and photon-statistics diagnostics.

mod capacity;
mod error_model;
mod photon_stats;
pub mod quadrature;

pub use capacity::{binary_entropy, capacity, literal_entropy, log2_big, CapacityParams, CapacityReport};
pub use error_model::{
    channel_error_rate, misdecode_prob, misdecode_prob_quadrature, normal_cdf, normal_sf, ErrorModelInput,
};
pub use photon_stats::{count_windows, g2, g2_pooled, mandel_q, mandel_q_windows, modulator_transfer, G2Curve};
