use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{merge_sorted, sample_homogeneous, sample_modulated, seconds_to_ps, LinkBudget, PhotonSequence, SourceConfig};
use crate::error::{invalid, Result};

/// Gaussian σ per unit FWHM, `1 / (2 √(2 ln 2))`.
pub const FWHM_TO_SIGMA: f64 = 1.0 / 2.354_820_045_030_949;

/// Keeps each photon independently with probability `transmittance`.
pub fn apply_loss<R: Rng + ?Sized>(seq: &PhotonSequence, transmittance: f64, rng: &mut R) -> Result<PhotonSequence> {
    if !(0.0..=1.0).contains(&transmittance) {
        return Err(invalid(format!("transmittance must lie in [0, 1], got {transmittance}")));
    }
    if transmittance == 1.0 {
        return Ok(seq.clone());
    }
    let kept = seq.timestamps_ps().iter().copied().filter(|_| rng.gen::<f64>() < transmittance).collect();
    Ok(PhotonSequence::from_sorted_unchecked(seq.window_ps(), kept))
}

/// Adds background and dark counts as one independent homogeneous stream.
pub fn merge_noise<R: Rng + ?Sized>(seq: &PhotonSequence, budget: &LinkBudget, rng: &mut R) -> Result<PhotonSequence> {
    budget.validate()?;
    let rate = budget.background_rate();
    if rate == 0.0 {
        return Ok(seq.clone());
    }
    let noise = sample_homogeneous(rate, seq.window(), rng)?;
    // the noise window is rebuilt from seconds; pin it to the signal window
    let ts: Vec<u64> = noise.timestamps_ps().iter().copied().filter(|&t| t < seq.window_ps()).collect();
    Ok(PhotonSequence::from_sorted_unchecked(seq.window_ps(), merge_sorted(seq.timestamps_ps(), &ts)))
}

/// Detector response: Gaussian jitter (clamped to the window), then
/// non-paralyzable dead time, then optional gating.
///
/// Gating snaps each event down to the start of its gate; several photons in
/// one gate register as a single click.
pub fn apply_detector<R: Rng + ?Sized>(seq: &PhotonSequence, budget: &LinkBudget, rng: &mut R) -> Result<PhotonSequence> {
    budget.validate()?;
    let window = seq.window_ps();
    let mut ts: Vec<u64> = seq.timestamps_ps().to_vec();

    if budget.jitter_sigma > 0.0 {
        let normal = Normal::new(0.0, budget.jitter_sigma * super::PS_PER_SECOND).expect("finite sigma");
        let last = window as f64 - 1.0;
        for t in ts.iter_mut() {
            let moved = (*t as f64 + normal.sample(rng)).round().clamp(0.0, last);
            *t = moved as u64;
        }
        ts.sort_unstable();
    }

    let dead = seconds_to_ps(budget.dead_time);
    if dead > 0 {
        let mut accepted: Vec<u64> = Vec::with_capacity(ts.len());
        for t in ts {
            match accepted.last() {
                Some(&prev) if t < prev + dead => {}
                _ => accepted.push(t),
            }
        }
        ts = accepted;
    }

    if let Some(period) = budget.rep_period {
        let gate = seconds_to_ps(period);
        for t in ts.iter_mut() {
            *t -= *t % gate;
        }
        ts.dedup();
    }

    Ok(PhotonSequence::from_sorted_unchecked(window, ts))
}

/// Source through loss, background and detector: what the receiver records.
pub fn transmit<R: Rng + ?Sized>(config: &SourceConfig, budget: &LinkBudget, rng: &mut R) -> Result<PhotonSequence> {
    let signal = sample_modulated(config, rng)?;
    let received = apply_loss(&signal, budget.transmittance, rng)?;
    let merged = merge_noise(&received, budget, rng)?;
    apply_detector(&merged, budget, rng)
}

/// Like [`transmit`], but also returns the detected signal photons on their
/// own (same loss realization, no background).
pub fn transmit_split<R: Rng + ?Sized>(
    config: &SourceConfig,
    budget: &LinkBudget,
    rng: &mut R,
) -> Result<(PhotonSequence, PhotonSequence)> {
    let signal = sample_modulated(config, rng)?;
    let received = apply_loss(&signal, budget.transmittance, rng)?;
    let signal_only = apply_detector(&received, budget, rng)?;
    let merged = merge_noise(&received, budget, rng)?;
    let detected = apply_detector(&merged, budget, rng)?;
    Ok((signal_only, detected))
}
