use rand::Rng;
use rand_distr::{Distribution, Exp};

use super::{seconds_to_ps, PhotonSequence, SourceConfig, PS_PER_SECOND};
use crate::error::{invalid, Error, Result};

/// Homogeneous Poisson arrivals at `rate` counts/s over `[0, duration)`.
///
/// Inter-arrival gaps are exponential with mean `1/rate`; a zero rate gives
/// an empty sequence.
pub fn sample_homogeneous<R: Rng + ?Sized>(rate: f64, duration: f64, rng: &mut R) -> Result<PhotonSequence> {
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(invalid(format!("rate must be nonnegative, got {rate}")));
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(invalid(format!("duration must be positive, got {duration}")));
    }
    let window_ps = seconds_to_ps(duration);
    if window_ps == 0 {
        return Err(invalid("duration is shorter than one picosecond"));
    }
    Ok(PhotonSequence::from_sorted_unchecked(window_ps, arrivals(rate, duration, window_ps, rng)))
}

fn arrivals<R: Rng + ?Sized>(rate: f64, duration: f64, window_ps: u64, rng: &mut R) -> Vec<u64> {
    if rate == 0.0 {
        return Vec::new();
    }
    let gap = Exp::new(rate).expect("positive rate");
    let mut out = Vec::with_capacity((rate * duration * 1.2) as usize + 8);
    let mut t = 0.0;
    loop {
        t += gap.sample(rng);
        if t >= duration {
            break;
        }
        let ps = (t * PS_PER_SECOND) as u64;
        if ps >= window_ps {
            break;
        }
        out.push(ps);
    }
    out
}

/// Inhomogeneous Poisson arrivals following the source's rate function,
/// generated by thinning a homogeneous process at the rate ceiling.
pub fn sample_modulated<R: Rng + ?Sized>(config: &SourceConfig, rng: &mut R) -> Result<PhotonSequence> {
    if config.tones().is_empty() {
        return sample_homogeneous(config.mean_rate(), config.duration(), rng);
    }
    let ceiling = config.rate_ceiling();
    let window_ps = seconds_to_ps(config.duration());
    let candidates = arrivals(ceiling, config.duration(), window_ps, rng);
    let mut kept = Vec::with_capacity(candidates.len());
    for ps in candidates {
        let t = ps as f64 / PS_PER_SECOND;
        let rate = config.rate_at(t);
        if rate < 0.0 {
            return Err(Error::NegativeRate { time: t, rate });
        }
        if rng.gen::<f64>() * ceiling < rate {
            kept.push(ps);
        }
    }
    Ok(PhotonSequence::from_sorted_unchecked(window_ps, kept))
}
