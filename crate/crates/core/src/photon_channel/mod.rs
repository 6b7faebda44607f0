//! Photon sources and the loss / noise / detector channel.
//!
//! Timestamps are held as integer picoseconds since the start of the
//! integration window; the public API speaks seconds.

mod channel;
pub mod pts;
mod source;

pub use channel::{apply_detector, apply_loss, merge_noise, transmit, transmit_split, FWHM_TO_SIGMA};
pub use source::{sample_homogeneous, sample_modulated};

use std::f64::consts::TAU;

use crate::error::{invalid, Result};

pub const PS_PER_SECOND: f64 = 1e12;

/// Converts seconds to whole picoseconds (rounded to nearest).
pub fn seconds_to_ps(seconds: f64) -> u64 {
    (seconds * PS_PER_SECOND).round() as u64
}

pub fn ps_to_seconds(ps: u64) -> f64 {
    ps as f64 / PS_PER_SECOND
}

/// One intensity-modulation frequency component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tone {
    frequency: f64,
    phase: f64,
    depth: f64,
}

impl Tone {
    /// Full-depth tone with zero phase.
    pub fn new(frequency: f64) -> Result<Self> {
        Self::with_params(frequency, 0.0, 1.0)
    }

    pub fn with_params(frequency: f64, phase: f64, depth: f64) -> Result<Self> {
        if !(frequency.is_finite() && frequency > 0.0) {
            return Err(invalid(format!("tone frequency must be positive, got {frequency}")));
        }
        if !(0.0..=1.0).contains(&depth) {
            return Err(invalid(format!("modulation depth must lie in [0, 1], got {depth}")));
        }
        if !phase.is_finite() {
            return Err(invalid("tone phase must be finite"));
        }
        Ok(Self { frequency, phase: phase.rem_euclid(TAU), depth })
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    /// Phase in `[0, 2π)`.
    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }
}

/// A modulated weak-coherent source observed over one integration window.
///
/// With `k` tones the instantaneous rate is
/// `λ(t) = (λ₀/k) Σᵢ [1 + mᵢ sin(2π fᵢ t + φᵢ)]`, so the expected count over
/// the window is `λ₀ T` whatever `k` is. No tones means a homogeneous source.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceConfig {
    mean_rate: f64,
    tones: Vec<Tone>,
    duration: f64,
}

impl SourceConfig {
    pub fn new(mean_rate: f64, tones: Vec<Tone>, duration: f64) -> Result<Self> {
        if !(mean_rate.is_finite() && mean_rate >= 0.0) {
            return Err(invalid(format!("mean rate must be nonnegative, got {mean_rate}")));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(invalid(format!("duration must be positive, got {duration}")));
        }
        if seconds_to_ps(duration) == 0 {
            return Err(invalid("duration is shorter than one picosecond"));
        }
        Ok(Self { mean_rate, tones, duration })
    }

    pub fn homogeneous(mean_rate: f64, duration: f64) -> Result<Self> {
        Self::new(mean_rate, Vec::new(), duration)
    }

    pub fn mean_rate(&self) -> f64 {
        self.mean_rate
    }

    pub fn tones(&self) -> &[Tone] {
        &self.tones
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// Number of frequency components `k`.
    pub fn components(&self) -> usize {
        self.tones.len()
    }

    pub fn expected_count(&self) -> f64 {
        self.mean_rate * self.duration
    }

    /// Coefficient `A` of the arrival-time density `P(t) = λ(t) / (λ₀ T)`
    /// written as `A · Σ(1 + m sin(...))`, i.e. `1 / (k T)`.
    pub fn normalization(&self) -> f64 {
        1.0 / (self.tones.len().max(1) as f64 * self.duration)
    }

    /// Instantaneous rate λ(t) in counts per second.
    pub fn rate_at(&self, t: f64) -> f64 {
        if self.tones.is_empty() {
            return self.mean_rate;
        }
        let per_tone = self.mean_rate / self.tones.len() as f64;
        let sum: f64 = self
            .tones
            .iter()
            .map(|tone| 1.0 + tone.depth * (TAU * tone.frequency * t + tone.phase).sin())
            .sum();
        per_tone * sum
    }

    /// Upper bound of λ(t) used as the thinning envelope.
    pub fn rate_ceiling(&self) -> f64 {
        if self.tones.is_empty() {
            return self.mean_rate;
        }
        let per_tone = self.mean_rate / self.tones.len() as f64;
        per_tone * self.tones.iter().map(|t| 1.0 + t.depth).sum::<f64>()
    }

    pub fn with_mean_rate(&self, mean_rate: f64) -> Result<Self> {
        Self::new(mean_rate, self.tones.clone(), self.duration)
    }
}

/// Detection events within one window, ordered in time.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhotonSequence {
    timestamps: Vec<u64>,
    window: u64,
}

impl PhotonSequence {
    /// Builds a sequence from picosecond timestamps, checking order and bounds.
    pub fn from_picoseconds(window_ps: u64, timestamps: Vec<u64>) -> Result<Self> {
        if window_ps == 0 {
            return Err(invalid("window must be at least one picosecond"));
        }
        if let Some(i) = timestamps.windows(2).position(|w| w[1] < w[0]) {
            return Err(invalid(format!("timestamps decrease at index {}", i + 1)));
        }
        if let Some(&last) = timestamps.last() {
            if last >= window_ps {
                return Err(invalid(format!("timestamp {last} ps lies outside window of {window_ps} ps")));
            }
        }
        Ok(Self { timestamps, window: window_ps })
    }

    /// Builds a sequence from times in seconds; the input need not be sorted.
    pub fn from_seconds(window: f64, times: &[f64]) -> Result<Self> {
        let window_ps = seconds_to_ps(window);
        let mut ts = Vec::with_capacity(times.len());
        for &t in times {
            if !(t.is_finite() && t >= 0.0 && t < window) {
                return Err(invalid(format!("time {t} s lies outside [0, {window})")));
            }
            ts.push(((t * PS_PER_SECOND) as u64).min(window_ps.saturating_sub(1)));
        }
        ts.sort_unstable();
        Self::from_picoseconds(window_ps, ts)
    }

    pub fn empty(window: f64) -> Result<Self> {
        Self::from_seconds(window, &[])
    }

    pub(crate) fn from_sorted_unchecked(window_ps: u64, timestamps: Vec<u64>) -> Self {
        debug_assert!(timestamps.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(timestamps.last().is_none_or(|&t| t < window_ps));
        Self { timestamps, window: window_ps }
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn window(&self) -> f64 {
        ps_to_seconds(self.window)
    }

    pub fn window_ps(&self) -> u64 {
        self.window
    }

    pub fn timestamps_ps(&self) -> &[u64] {
        &self.timestamps
    }

    /// Event times in seconds.
    pub fn times(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.timestamps.iter().map(|&t| ps_to_seconds(t))
    }

    /// Time-ordered union of two sequences sharing a window.
    pub fn merge(&self, other: &PhotonSequence) -> Result<PhotonSequence> {
        if self.window != other.window {
            return Err(invalid("cannot merge sequences with different windows"));
        }
        Ok(Self::from_sorted_unchecked(self.window, merge_sorted(&self.timestamps, &other.timestamps)))
    }

    /// Shifts every event later by `delta_ps`; fails if an event would leave the window.
    pub fn shifted(&self, delta_ps: u64) -> Result<PhotonSequence> {
        let ts: Vec<u64> = self.timestamps.iter().map(|&t| t + delta_ps).collect();
        Self::from_picoseconds(self.window, ts)
    }

    /// Splits a long stream into consecutive windows of `window_ps`, each
    /// re-referenced to its own start. A trailing partial window is dropped.
    pub fn split_windows(&self, window_ps: u64) -> Result<Vec<PhotonSequence>> {
        if window_ps == 0 {
            return Err(invalid("window must be at least one picosecond"));
        }
        let n = (self.window / window_ps) as usize;
        let mut out: Vec<Vec<u64>> = vec![Vec::new(); n];
        for &t in &self.timestamps {
            let idx = (t / window_ps) as usize;
            if idx < n {
                out[idx].push(t - idx as u64 * window_ps);
            }
        }
        Ok(out.into_iter().map(|ts| Self::from_sorted_unchecked(window_ps, ts)).collect())
    }

    /// Concatenates windows back to back into one stream.
    pub fn concatenate(parts: &[PhotonSequence]) -> Result<PhotonSequence> {
        let mut ts = Vec::with_capacity(parts.iter().map(|p| p.len()).sum());
        let mut offset = 0u64;
        for part in parts {
            ts.extend(part.timestamps.iter().map(|&t| t + offset));
            offset = offset
                .checked_add(part.window)
                .ok_or_else(|| invalid("concatenated window overflows"))?;
        }
        Self::from_picoseconds(offset.max(1), ts)
    }
}

pub(crate) fn merge_sorted(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Loss, background and detector parameters of a link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// Fraction of signal photons surviving the channel.
    pub transmittance: f64,
    /// Background photon rate, counts/s.
    pub noise_rate: f64,
    /// Detector dark count rate, counts/s.
    pub dark_rate: f64,
    /// Gaussian timing jitter standard deviation, seconds.
    pub jitter_sigma: f64,
    /// Non-paralyzable dead time after each registered event, seconds.
    pub dead_time: f64,
    /// Detection gating period, seconds. `None` disables gating.
    pub rep_period: Option<f64>,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self {
            transmittance: 1.0,
            noise_rate: 0.0,
            dark_rate: 0.0,
            jitter_sigma: 0.0,
            dead_time: 0.0,
            rep_period: None,
        }
    }
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        let nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be finite and nonnegative, got {v}")))
            }
        };
        nonneg("transmittance", self.transmittance)?;
        if self.transmittance > 1.0 {
            return Err(invalid(format!("transmittance must not exceed 1, got {}", self.transmittance)));
        }
        nonneg("noise_rate", self.noise_rate)?;
        nonneg("dark_rate", self.dark_rate)?;
        nonneg("jitter_sigma", self.jitter_sigma)?;
        nonneg("dead_time", self.dead_time)?;
        if let Some(p) = self.rep_period {
            if !(p.is_finite() && p > 0.0) || seconds_to_ps(p) == 0 {
                return Err(invalid(format!("rep_period must be at least one picosecond, got {p}")));
            }
        }
        Ok(())
    }

    /// Total rate of photons unrelated to the signal.
    pub fn background_rate(&self) -> f64 {
        self.noise_rate + self.dark_rate
    }

    /// Jitter from a full width at half maximum.
    pub fn with_jitter_fwhm(mut self, fwhm: f64) -> Self {
        self.jitter_sigma = fwhm * FWHM_TO_SIGMA;
        self
    }
}
