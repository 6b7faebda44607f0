use rayon::prelude::*;

use crate::error::Result;
use crate::photon_channel::{transmit_split, LinkBudget, SourceConfig};
use crate::rng::{substream, PhotonRng};
use crate::spectral::{dft_at, point_dft, LineReference, Moments};

/// One argmax decision: which of `channels` carries the tone.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct DecisionGroup {
    pub channels: Vec<f64>,
    /// Index of the transmitted channel.
    pub target: usize,
    /// Indices of the channels that sample the noise floor.
    pub floor: Vec<usize>,
}

impl DecisionGroup {
    /// Floor on every channel except the target and its two neighbours.
    pub fn excluding_neighbours(channels: Vec<f64>, target: usize) -> Self {
        let floor = (0..channels.len()).filter(|i| i.abs_diff(target) > 1).collect();
        Self { channels, target, floor }
    }

    /// Floor on every channel except the target.
    pub fn all_others(channels: Vec<f64>, target: usize) -> Self {
        let floor = (0..channels.len()).filter(|&i| i != target).collect();
        Self { channels, target, floor }
    }
}

/// What one simulated window sends and how it is judged.
#[derive(Debug, Clone)]
pub(crate) struct TrialWindow {
    pub source: SourceConfig,
    pub groups: Vec<DecisionGroup>,
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct PointOutcome {
    pub trials: usize,
    pub symbols: u64,
    pub symbol_errors: u64,
    pub window_errors: u64,
    pub line: Moments,
    pub floor: Moments,
}

struct TrialOutcome {
    errors: u32,
    lines: Vec<f64>,
    floor: Moments,
}

/// Runs `trials` windows on substreams `seed / path / trial`. Trials run in
/// parallel and are reduced in trial order, so the result is independent of
/// scheduling.
pub(crate) fn run_point<F>(
    budget: &LinkBudget,
    trials: usize,
    seed: u64,
    path: &[u64],
    reference: LineReference,
    window_of: F,
) -> Result<PointOutcome>
where
    F: Fn(&mut PhotonRng) -> Result<TrialWindow> + Sync,
{
    budget.validate()?;
    let outcomes: Vec<Result<TrialOutcome>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut p = path.to_vec();
            p.push(trial as u64);
            let mut rng = substream(seed, &p);
            let window = window_of(&mut rng)?;
            let (signal, detected) = transmit_split(&window.source, budget, &mut rng)?;
            let mut errors = 0;
            let mut lines = Vec::with_capacity(window.groups.len());
            let mut floor = Moments::default();
            for g in &window.groups {
                let amps: Vec<f64> = dft_at(&detected, &g.channels).iter().map(|a| a.norm()).collect();
                let mut best = 0;
                for (i, &a) in amps.iter().enumerate().skip(1) {
                    if a > amps[best] {
                        best = i;
                    }
                }
                // an empty window cannot be decoded
                if detected.is_empty() || best != g.target {
                    errors += 1;
                }
                lines.push(match reference {
                    LineReference::Signal => point_dft(&signal, g.channels[g.target]).norm(),
                    LineReference::EndToEnd => amps[g.target],
                });
                for &i in &g.floor {
                    floor.push(amps[i]);
                }
            }
            Ok(TrialOutcome { errors, lines, floor })
        })
        .collect();

    let mut out = PointOutcome { trials, ..Default::default() };
    for o in outcomes {
        let o = o?;
        out.symbols += o.lines.len() as u64;
        out.symbol_errors += o.errors as u64;
        out.window_errors += (o.errors > 0) as u64;
        for l in o.lines {
            out.line.push(l);
        }
        out.floor.merge(&o.floor);
    }
    Ok(out)
}

/// `count` channels spaced by `spacing` with `centre` in the middle slot.
pub(crate) fn centred_channels(centre: f64, spacing: f64, count: usize) -> (Vec<f64>, usize) {
    let mid = count / 2;
    let channels = (0..count).map(|i| centre + (i as f64 - mid as f64) * spacing).collect();
    (channels, mid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photon_channel::Tone;

    fn single_tone(rate: f64) -> impl Fn(&mut PhotonRng) -> Result<TrialWindow> + Sync {
        move |_| {
            let source = SourceConfig::new(rate, vec![Tone::new(50e3)?], 1e-3)?;
            let (channels, target) = centred_channels(50e3, 1e3, 11);
            Ok(TrialWindow { source, groups: vec![DecisionGroup::excluding_neighbours(channels, target)] })
        }
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let b = LinkBudget::default();
        let a = run_point(&b, 300, 5, &[1], LineReference::Signal, single_tone(10e3)).unwrap();
        let again = run_point(&b, 300, 5, &[1], LineReference::Signal, single_tone(10e3)).unwrap();
        let other = run_point(&b, 300, 6, &[1], LineReference::Signal, single_tone(10e3)).unwrap();
        assert_eq!(a.symbol_errors, again.symbol_errors);
        assert_eq!(a.line.mean(), again.line.mean());
        assert_ne!(a.line.mean(), other.line.mean());
        assert_eq!(a.symbols, 300);
    }

    #[test]
    fn strong_signal_decodes_and_moments_scale() {
        let b = LinkBudget::default();
        let out = run_point(&b, 500, 1, &[], LineReference::Signal, single_tone(400e3)).unwrap();
        assert_eq!(out.symbol_errors, 0);
        // line ≈ N/2, floor ≈ (√π / 2) √N
        assert!((out.line.mean() / 200.0 - 1.0).abs() < 0.05, "{}", out.line.mean());
        let floor = 0.5 * std::f64::consts::PI.sqrt() * 400f64.sqrt();
        assert!((out.floor.mean() / floor - 1.0).abs() < 0.05, "{}", out.floor.mean());
        assert_eq!(out.floor.count(), 500 * 8);
    }

    #[test]
    fn centred_layout() {
        let (c, t) = centred_channels(50e3, 1e3, 11);
        assert_eq!(t, 5);
        assert_eq!(c[0], 45e3);
        assert_eq!(c[10], 55e3);
        let g = DecisionGroup::excluding_neighbours(c.clone(), t);
        assert_eq!(g.floor, vec![0, 1, 2, 3, 7, 8, 9, 10]);
        assert_eq!(DecisionGroup::all_others(vec![1.0, 2.0], 0).floor, vec![1]);
    }
}
