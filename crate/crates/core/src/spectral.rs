//! Single-photon modulation spectrum.
//!
//! The spectrum of a detection sequence is the unnormalized nonuniform DFT
//! `X(f) = Σᵢ exp(−j 2π f τᵢ)` over event times, with every detector pulse
//! weighted 1. Amplitudes throughout are raw `|X|`.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::photon_channel::{transmit_split, LinkBudget, PhotonSequence, SourceConfig, PS_PER_SECOND};
use crate::rng::substream;

/// Largest frequency grid a periodogram will evaluate.
pub const MAX_GRID_POINTS: usize = 1 << 20;

/// Frequency interval `[low, high]` in hertz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    low: f64,
    high: f64,
}

impl Band {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(low.is_finite() && high.is_finite() && 0.0 < low && low < high) {
            return Err(invalid(format!("band requires 0 < low < high, got [{low}, {high}]")));
        }
        Ok(Self { low, high })
    }

    pub fn low(&self) -> f64 {
        self.low
    }

    pub fn high(&self) -> f64 {
        self.high
    }

    pub fn contains(&self, f: f64) -> bool {
        self.low <= f && f <= self.high
    }
}

/// Complex amplitudes on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
    pub window: f64,
    pub count: usize,
}

impl Spectrum {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm()).collect()
    }

    /// Indices of the `n` largest magnitudes, largest first.
    pub fn top_peaks(&self, n: usize) -> Vec<usize> {
        let mags = self.magnitudes();
        let mut idx: Vec<usize> = (0..mags.len()).collect();
        idx.sort_by(|&a, &b| mags[b].total_cmp(&mags[a]).then(a.cmp(&b)));
        idx.truncate(n);
        idx
    }

    /// CSV with header `frequency_hz,re,im,abs`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("frequency_hz,re,im,abs\n");
        for (f, a) in self.frequencies.iter().zip(&self.amplitudes) {
            let _ = writeln!(out, "{},{},{},{}", f, a.re, a.im, a.norm());
        }
        out
    }
}

#[inline]
fn phasor(frequency: f64, t_ps: u64) -> Complex64 {
    let cycles = frequency * (t_ps as f64 / PS_PER_SECOND);
    let (s, c) = (TAU * cycles.fract()).sin_cos();
    Complex64::new(c, -s)
}

/// `X(f)` summed directly over every event.
pub fn point_dft(seq: &PhotonSequence, frequency: f64) -> Complex64 {
    seq.timestamps_ps().iter().map(|&t| phasor(frequency, t)).sum()
}

/// `X(f)` at arbitrary frequencies.
pub fn dft_at(seq: &PhotonSequence, frequencies: &[f64]) -> Vec<Complex64> {
    if let Some((start, step)) = uniform_grid(frequencies) {
        return dft_grid(seq, start, step, frequencies.len());
    }
    frequencies.iter().map(|&f| point_dft(seq, f)).collect()
}

fn uniform_grid(frequencies: &[f64]) -> Option<(f64, f64)> {
    if frequencies.len() < 3 {
        return None;
    }
    let step = frequencies[1] - frequencies[0];
    if step <= 0.0 {
        return None;
    }
    let uniform = frequencies
        .iter()
        .enumerate()
        .all(|(i, &f)| (f - (frequencies[0] + i as f64 * step)).abs() <= 1e-9 * f.abs().max(1.0));
    uniform.then_some((frequencies[0], step))
}

/// `X(f)` on `start + i·step` for `i < count`, using a per-event phasor
/// recurrence. Agrees with [`point_dft`] to ~1e-12 relative.
pub fn dft_grid(seq: &PhotonSequence, start: f64, step: f64, count: usize) -> Vec<Complex64> {
    let mut acc = vec![Complex64::new(0.0, 0.0); count];
    const RESYNC: usize = 256;
    for &t in seq.timestamps_ps() {
        let rot = phasor(step, t);
        let mut i = 0;
        while i < count {
            let mut z = phasor(start + i as f64 * step, t);
            let end = (i + RESYNC).min(count);
            for slot in &mut acc[i..end] {
                *slot += z;
                z *= rot;
            }
            i = end;
        }
    }
    acc
}

/// Spectrum on `low, low + resolution, …, high`.
pub fn periodogram(seq: &PhotonSequence, band: Band, resolution: f64) -> Result<Spectrum> {
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(invalid(format!("resolution must be positive, got {resolution}")));
    }
    let span = (band.high - band.low) / resolution;
    let points = (span + 1e-9).floor() + 1.0;
    if points > MAX_GRID_POINTS as f64 {
        return Err(Error::GridTooLarge { requested: points.min(usize::MAX as f64) as usize, cap: MAX_GRID_POINTS });
    }
    let points = points as usize;
    let frequencies: Vec<f64> = (0..points).map(|i| band.low + i as f64 * resolution).collect();
    let amplitudes = dft_grid(seq, band.low, resolution, points);
    Ok(Spectrum { frequencies, amplitudes, window: seq.window(), count: seq.len() })
}

/// Channel with the largest `|X|`, and that magnitude. Ties go to the
/// lowest frequency.
pub fn band_peak(seq: &PhotonSequence, band: Band, channel_freqs: &[f64]) -> Result<(f64, f64)> {
    if channel_freqs.is_empty() {
        return Err(invalid("band_peak needs at least one channel frequency"));
    }
    if let Some(f) = channel_freqs.iter().find(|&&f| !band.contains(f)) {
        return Err(invalid(format!("channel {f} Hz lies outside band [{}, {}]", band.low, band.high)));
    }
    let mut sorted = channel_freqs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let amps = dft_at(seq, &sorted);
    let mut best = (sorted[0], amps[0].norm());
    for (&f, a) in sorted.iter().zip(&amps).skip(1) {
        let m = a.norm();
        if m > best.1 {
            best = (f, m);
        }
    }
    Ok(best)
}

/// The two parts of the expected spectrum of a single-tone source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedLine {
    /// Contribution of the constant part of the rate.
    pub dc: Complex64,
    /// Contribution of the sinusoidal part of the rate.
    pub ac: Complex64,
}

impl ExpectedLine {
    pub fn total(&self) -> Complex64 {
        self.dc + self.ac
    }
}

/// `∫₀ᵀ exp(j a t) dt`, with the removable singularity at `a = 0`.
fn oscillatory_integral(a: f64, duration: f64) -> Complex64 {
    let x = a * duration;
    if x.abs() < 1e-6 {
        // series of (e^{jx} − 1)/(jx) · T
        let x2 = x * x;
        return Complex64::new(1.0 - x2 / 6.0, x / 2.0 - x * x2 / 24.0) * duration;
    }
    let (s, c) = x.sin_cos();
    Complex64::new(s, 1.0 - c) / a
}

/// Closed-form expectation of `X(f)` for a single-tone source, scaled to the
/// expected count `λ₀ T`.
///
/// `E[X(ω)] = (λ₀/1) ∫₀ᵀ e^{−jωt} [1 + m sin(Ωt + φ)] dt` split into the
/// constant (DC) and modulated (AC) terms. At `ω = Ω` the denominator of the
/// AC term vanishes; the limit is taken analytically.
pub fn expected_line_terms(config: &SourceConfig, frequency: f64) -> Result<ExpectedLine> {
    if config.components() != 1 {
        return Err(invalid(format!("expected_line needs a single-tone source, got {} tones", config.components())));
    }
    if !(frequency.is_finite() && frequency > 0.0) {
        return Err(invalid(format!("frequency must be positive, got {frequency}")));
    }
    let tone = config.tones()[0];
    let rate = config.mean_rate();
    let duration = config.duration();
    let omega = TAU * frequency;
    let big_omega = TAU * tone.frequency();

    let dc = oscillatory_integral(-omega, duration) * rate;
    // sin(Ωt+φ) = (e^{j(Ωt+φ)} − e^{−j(Ωt+φ)}) / 2j
    let up = Complex64::from_polar(1.0, tone.phase()) * oscillatory_integral(big_omega - omega, duration);
    let down = Complex64::from_polar(1.0, -tone.phase()) * oscillatory_integral(-big_omega - omega, duration);
    let ac = (up - down) / Complex64::new(0.0, 2.0) * (rate * tone.depth());
    Ok(ExpectedLine { dc, ac })
}

pub fn expected_line(config: &SourceConfig, frequency: f64) -> Result<Complex64> {
    expected_line_terms(config, frequency).map(|e| e.total())
}

/// Moments of the line and noise-floor magnitude distributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineStats {
    pub line_mean: f64,
    pub line_std: f64,
    pub floor_mean: f64,
    pub floor_std: f64,
    pub trials: usize,
}

impl LineStats {
    pub const CSV_HEADER: &'static str = "line_mean,line_std,floor_mean,floor_std,trials";

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{}", self.line_mean, self.line_std, self.floor_mean, self.floor_std, self.trials)
    }
}

/// Which photons the line amplitude is measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LineReference {
    /// Line measured on the detected signal photons alone; the floor on the
    /// full detected stream. Background then raises the floor but leaves the
    /// line distribution unchanged.
    #[default]
    Signal,
    /// Line and floor both measured on the full detected stream.
    EndToEnd,
}

/// Running mean / variance (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * self.n as f64 * other.n as f64 / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample standard deviation.
    pub fn std(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).sqrt()
        }
    }
}

/// Channel-aligned floor frequencies: every channel of the set except the
/// line and its two nearest neighbours.
pub fn floor_frequencies(channels: &[f64], line_freq: f64) -> Vec<f64> {
    let mut sorted = channels.to_vec();
    sorted.sort_by(f64::total_cmp);
    let Some(pos) = sorted.iter().position(|&f| (f - line_freq).abs() < 1e-6 * line_freq.max(1.0)) else {
        return sorted;
    };
    sorted
        .into_iter()
        .enumerate()
        .filter(|&(i, _)| i.abs_diff(pos) > 1)
        .map(|(_, f)| f)
        .collect()
}

/// Monte Carlo line and floor moments over `trials` simulated windows.
pub fn line_stats(
    config: &SourceConfig,
    budget: &LinkBudget,
    line_freq: f64,
    floor_freqs: &[f64],
    trials: usize,
    seed: u64,
    reference: LineReference,
) -> Result<LineStats> {
    line_stats_at(config, budget, line_freq, floor_freqs, trials, seed, &[], reference)
}

/// [`line_stats`] with substreams rooted at `seed / path / trial`.
#[allow(clippy::too_many_arguments)]
pub fn line_stats_at(
    config: &SourceConfig,
    budget: &LinkBudget,
    line_freq: f64,
    floor_freqs: &[f64],
    trials: usize,
    seed: u64,
    path: &[u64],
    reference: LineReference,
) -> Result<LineStats> {
    if trials < 100 {
        return Err(invalid(format!("line_stats needs at least 100 trials, got {trials}")));
    }
    if floor_freqs.is_empty() {
        return Err(invalid("line_stats needs at least one floor frequency"));
    }
    budget.validate()?;
    let samples: Vec<Result<(f64, Moments)>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut p = path.to_vec();
            p.push(trial as u64);
            let mut rng = substream(seed, &p);
            let (signal, detected) = transmit_split(config, budget, &mut rng)?;
            let line_seq = match reference {
                LineReference::Signal => &signal,
                LineReference::EndToEnd => &detected,
            };
            let line = point_dft(line_seq, line_freq).norm();
            let mut floor = Moments::default();
            for a in dft_at(&detected, floor_freqs) {
                floor.push(a.norm());
            }
            Ok((line, floor))
        })
        .collect();
    let mut line = Moments::default();
    let mut floor = Moments::default();
    for s in samples {
        let (l, f) = s?;
        line.push(l);
        floor.merge(&f);
    }
    Ok(LineStats {
        line_mean: line.mean(),
        line_std: line.std(),
        floor_mean: floor.mean(),
        floor_std: floor.std(),
        trials,
    })
}
