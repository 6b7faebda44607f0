use super::engine::{centred_channels, run_point, DecisionGroup, TrialWindow};
use super::spec::{Experiment, SweepSpec};
use super::SweepResult;
use crate::error::{invalid, Result};
use crate::photon_channel::{LinkBudget, SourceConfig, Tone};

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepResult>> {
    match spec.experiment {
        Experiment::ErrorVsNoise => run_error_vs_noise(spec),
        Experiment::ErrorVsIntegrationTime => run_error_vs_integration_time(spec),
        Experiment::ErrorVsSpacing => run_error_vs_spacing(spec),
        Experiment::ErrorVsComponents => run_error_vs_components(spec),
        Experiment::AmplitudeNonlinearity => run_amplitude_nonlinearity(spec),
    }
}

fn check(spec: &SweepSpec, expected: Experiment) -> Result<(Vec<f64>, LinkBudget)> {
    if spec.experiment != expected {
        return Err(invalid(format!("spec describes {:?}, not {:?}", spec.experiment, expected)));
    }
    spec.validate()?;
    Ok((spec.grid.values()?, spec.budget.to_budget()?))
}

/// `k` tones, `band_step` apart from `tone_frequency`, each judged among
/// `channels_per_band` channels spaced by `1 / window`.
fn multi_tone_window(spec: &SweepSpec, rate: f64, k: usize) -> Result<TrialWindow> {
    let spacing = 1.0 / spec.window;
    let mut tones = Vec::with_capacity(k);
    let mut groups = Vec::with_capacity(k);
    for i in 0..k {
        let f = spec.tone_frequency + spec.band_step * i as f64;
        tones.push(Tone::new(f)?);
        let (channels, target) = centred_channels(f, spacing, spec.channels_per_band);
        if channels[0] <= 0.0 {
            return Err(invalid(format!("band around {f} Hz reaches below zero")));
        }
        groups.push(DecisionGroup::excluding_neighbours(channels, target));
    }
    Ok(TrialWindow { source: SourceConfig::new(rate, tones, spec.window)?, groups })
}

/// Background-rate sweep for each signal rate in `signal_rates`.
pub fn run_error_vs_noise(spec: &SweepSpec) -> Result<Vec<SweepResult>> {
    let (grid, base) = check(spec, Experiment::ErrorVsNoise)?;
    let mut out = Vec::with_capacity(grid.len() * spec.signal_rates.len());
    for (fi, &signal) in spec.signal_rates.iter().enumerate() {
        let window = multi_tone_window(spec, signal, 1)?;
        for (pi, &noise) in grid.iter().enumerate() {
            let budget = LinkBudget { noise_rate: noise, ..base };
            let o = run_point(&budget, spec.trials, spec.seed, &[fi as u64, pi as u64], spec.line_reference, |_| {
                Ok(window.clone())
            })?;
            out.push(SweepResult::from_outcome(signal, noise, &o, spec.analytic_channels));
        }
    }
    Ok(out)
}

/// Integration-time sweep at a fixed mean count per window. The channels
/// sit at `f_M + j / T`, so the sent tone is always on a channel while the
/// window holds a varying fraction of a modulation period.
pub fn run_error_vs_integration_time(spec: &SweepSpec) -> Result<Vec<SweepResult>> {
    let (grid, budget) = check(spec, Experiment::ErrorVsIntegrationTime)?;
    let f_m = spec.tone_frequency;
    let mut out = Vec::with_capacity(grid.len());
    for (pi, &t) in grid.iter().enumerate() {
        if !(t > 0.0) {
            return Err(invalid(format!("integration time must be positive, got {t}")));
        }
        let (channels, target) = centred_channels(f_m, 1.0 / t, spec.channels_per_band);
        if channels[0] <= 0.0 {
            return Err(invalid(format!("channel grid at T = {t} s reaches below zero")));
        }
        let window = TrialWindow {
            source: SourceConfig::new(spec.counts_per_window / t, vec![Tone::new(f_m)?], t)?,
            groups: vec![DecisionGroup::excluding_neighbours(channels, target)],
        };
        let o = run_point(&budget, spec.trials, spec.seed, &[0, pi as u64], spec.line_reference, |_| {
            Ok(window.clone())
        })?;
        out.push(SweepResult::from_outcome(0.0, t, &o, spec.analytic_channels));
    }
    Ok(out)
}

/// Two-channel spacing sweep: the tone sits on the whole-period bin nearest
/// `tone_frequency`, its one competitor `f_s` above it, and the floor is that
/// competitor.
pub fn run_error_vs_spacing(spec: &SweepSpec) -> Result<Vec<SweepResult>> {
    let (grid, budget) = check(spec, Experiment::ErrorVsSpacing)?;
    let t = spec.window;
    let f0 = (spec.tone_frequency * t).round().max(1.0) / t;
    let source = SourceConfig::new(spec.counts_per_window / t, vec![Tone::new(f0)?], t)?;
    let mut out = Vec::with_capacity(grid.len());
    for (pi, &fs) in grid.iter().enumerate() {
        if !(fs > 0.0) {
            return Err(invalid(format!("spacing must be positive, got {fs}")));
        }
        let window =
            TrialWindow { source: source.clone(), groups: vec![DecisionGroup::all_others(vec![f0, f0 + fs], 0)] };
        let o = run_point(&budget, spec.trials, spec.seed, &[0, pi as u64], spec.line_reference, |_| {
            Ok(window.clone())
        })?;
        out.push(SweepResult::from_outcome(0.0, fs, &o, spec.analytic_channels));
    }
    Ok(out)
}

/// Signal-rate sweep for each tone count in `components`; the rate is the
/// total shared by all tones.
pub fn run_error_vs_components(spec: &SweepSpec) -> Result<Vec<SweepResult>> {
    let (grid, budget) = check(spec, Experiment::ErrorVsComponents)?;
    rate_by_components(spec, &grid, &budget)
}

/// Line and floor moments against signal rate for each tone count. The
/// rows carry error rates too; the moments are the product here.
pub fn run_amplitude_nonlinearity(spec: &SweepSpec) -> Result<Vec<SweepResult>> {
    let (grid, budget) = check(spec, Experiment::AmplitudeNonlinearity)?;
    rate_by_components(spec, &grid, &budget)
}

fn rate_by_components(spec: &SweepSpec, grid: &[f64], budget: &LinkBudget) -> Result<Vec<SweepResult>> {
    let mut out = Vec::with_capacity(grid.len() * spec.components.len());
    for &k in &spec.components {
        for (pi, &rate) in grid.iter().enumerate() {
            let window = multi_tone_window(spec, rate, k)?;
            let o = run_point(budget, spec.trials, spec.seed, &[k as u64, pi as u64], spec.line_reference, |_| {
                Ok(window.clone())
            })?;
            out.push(SweepResult::from_outcome(k as f64, rate, &o, spec.analytic_channels));
        }
    }
    Ok(out)
}
