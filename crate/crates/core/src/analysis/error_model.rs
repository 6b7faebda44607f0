use std::f64::consts::{PI, SQRT_2};

use super::quadrature::integrate;
use crate::error::{invalid, Result};
use crate::spectral::LineStats;

/// Standard normal CDF Φ(x).
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Standard normal upper tail Q(x) = 1 − Φ(x), accurate far into the tail.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

fn normal_pdf(x: f64, mean: f64, std: f64) -> f64 {
    let z = (x - mean) / std;
    (-0.5 * z * z).exp() / ((2.0 * PI).sqrt() * std)
}

/// Gaussian moments of the line and floor amplitudes, plus the number of
/// channels a decision is made over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorModelInput {
    pub line_mean: f64,
    pub line_std: f64,
    pub floor_mean: f64,
    pub floor_std: f64,
    pub channels: u64,
}

impl ErrorModelInput {
    pub fn new(line_mean: f64, line_std: f64, floor_mean: f64, floor_std: f64, channels: u64) -> Result<Self> {
        let input = Self { line_mean, line_std, floor_mean, floor_std, channels };
        input.validate()?;
        Ok(input)
    }

    pub fn from_stats(stats: &LineStats, channels: u64) -> Result<Self> {
        Self::new(stats.line_mean, stats.line_std, stats.floor_mean, stats.floor_std, channels)
    }

    fn validate(&self) -> Result<()> {
        if !(self.line_std > 0.0 && self.floor_std > 0.0) {
            return Err(invalid(format!(
                "standard deviations must be positive, got σ_S = {}, σ_B = {}",
                self.line_std, self.floor_std
            )));
        }
        if !(self.line_mean.is_finite() && self.floor_mean.is_finite() && self.line_std.is_finite() && self.floor_std.is_finite()) {
            return Err(invalid("moments must be finite"));
        }
        if self.channels == 0 {
            return Err(invalid("at least one channel is required"));
        }
        Ok(())
    }
}

/// Probability that a floor amplitude exceeds the line amplitude.
///
/// With both amplitudes Gaussian, `A_B − A_S` is Gaussian and the double
/// integral reduces to `Φ(−(E[A_S] − E[A_B]) / √(σ_S² + σ_B²))`.
pub fn misdecode_prob(input: &ErrorModelInput) -> Result<f64> {
    input.validate()?;
    let spread = input.line_std.hypot(input.floor_std);
    Ok(normal_sf((input.line_mean - input.floor_mean) / spread))
}

/// The same probability by direct quadrature of
/// `∫ N(A_S; E[A_S], σ_S) · Q((A_S − E[A_B]) / σ_B) dA_S`.
///
/// The outer integral runs over the whole real line (±40 σ_S around the line
/// mean), so this is the same quantity as [`misdecode_prob`].
pub fn misdecode_prob_quadrature(input: &ErrorModelInput) -> Result<f64> {
    input.validate()?;
    let (mu, sigma) = (input.line_mean, input.line_std);
    let integrand = |a: f64| normal_pdf(a, mu, sigma) * normal_sf((a - input.floor_mean) / input.floor_std);
    // split at the line mean and the floor mean so both features sit on panel edges
    let lo = mu - 40.0 * sigma;
    let hi = mu + 40.0 * sigma;
    let mut cuts = vec![lo, mu, hi];
    if input.floor_mean > lo && input.floor_mean < hi {
        cuts.push(input.floor_mean);
    }
    cuts.sort_by(f64::total_cmp);
    Ok(cuts.windows(2).map(|w| integrate(integrand, w[0], w[1], 1e-15)).sum())
}

/// Symbol error over `channels` independent comparisons, `1 − (1 − p)^M`,
/// evaluated as `−expm1(M · ln1p(−p))`.
pub fn channel_error_rate(p: f64, channels: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("probability must lie in [0, 1], got {p}")));
    }
    if channels == 0 {
        return Err(invalid("at least one channel is required"));
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    Ok(-(channels as f64 * (-p).ln_1p()).exp_m1())
}
