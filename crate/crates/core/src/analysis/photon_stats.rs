use crate::error::{invalid, Error, Result};
use crate::photon_channel::{seconds_to_ps, PhotonSequence};

/// Normalised coincidence histogram. `lags[i]` is the centre of bin `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct G2Curve {
    pub lags: Vec<f64>,
    pub values: Vec<f64>,
    pub coincidences: Vec<u64>,
    pub bin: f64,
}

impl G2Curve {
    pub const CSV_HEADER: &'static str = "lag_s,g2,coincidences";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for ((l, v), c) in self.lags.iter().zip(&self.values).zip(&self.coincidences) {
            out.push_str(&format!("{l},{v},{c}\n"));
        }
        out
    }
}

pub fn g2(seq: &PhotonSequence, max_lag: f64, bin: f64) -> Result<G2Curve> {
    g2_pooled(std::slice::from_ref(seq), max_lag, bin)
}

/// g²(τ) from pair counting within each window, pooled over windows.
///
/// Each lag bin is divided by the coincidences expected for uniformly
/// scattered photons, `Σ N(N−1) · bin · (T − τ) / T²` with `τ` the bin centre.
pub fn g2_pooled(windows: &[PhotonSequence], max_lag: f64, bin: f64) -> Result<G2Curve> {
    if !(bin.is_finite() && bin > 0.0) {
        return Err(invalid(format!("bin width must be positive, got {bin}")));
    }
    if !(max_lag.is_finite() && max_lag >= bin) {
        return Err(invalid(format!("max lag {max_lag} must be at least one bin ({bin})")));
    }
    let bins = (max_lag / bin * (1.0 + 1e-12)).floor() as usize;
    let bin_ps = bin * 1e12;
    let max_ps = seconds_to_ps(bins as f64 * bin);
    let mut counts = vec![0u64; bins];
    let mut expected = vec![0.0f64; bins];
    for w in windows {
        let t = w.timestamps_ps();
        for (i, &a) in t.iter().enumerate() {
            for &b in &t[i + 1..] {
                let d = b - a;
                if d >= max_ps {
                    break;
                }
                let idx = (d as f64 / bin_ps) as usize;
                if idx < bins {
                    counts[idx] += 1;
                }
            }
        }
        let n = t.len() as f64;
        let window = w.window();
        for (j, e) in expected.iter_mut().enumerate() {
            let centre = (j as f64 + 0.5) * bin;
            if centre < window {
                *e += n * (n - 1.0) * bin * (window - centre) / (window * window);
            }
        }
    }
    if counts.iter().all(|&c| c == 0) {
        return Err(Error::InsufficientData("no photon pairs within the lag range".into()));
    }
    let values = counts.iter().zip(&expected).map(|(&c, &e)| if e > 0.0 { c as f64 / e } else { f64::NAN }).collect();
    let lags = (0..bins).map(|j| (j as f64 + 0.5) * bin).collect();
    Ok(G2Curve { lags, values, coincidences: counts, bin })
}

/// Photon counts in consecutive windows of `window` seconds; a trailing
/// partial window is dropped.
pub fn count_windows(seq: &PhotonSequence, window: f64) -> Result<Vec<u64>> {
    if !(window.is_finite() && window > 0.0) {
        return Err(invalid(format!("window must be positive, got {window}")));
    }
    let w = seconds_to_ps(window).max(1);
    let n = (seq.window_ps() / w) as usize;
    let mut counts = vec![0u64; n];
    for &t in seq.timestamps_ps() {
        let i = (t / w) as usize;
        if i < n {
            counts[i] += 1;
        }
    }
    Ok(counts)
}

/// Mandel Q = (Var N − E N) / E N, with the unbiased sample variance.
pub fn mandel_q(counts: &[u64]) -> Result<f64> {
    if counts.len() < 100 {
        return Err(Error::InsufficientData(format!("Mandel Q needs at least 100 windows, got {}", counts.len())));
    }
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<u64>() as f64 / n;
    if mean == 0.0 {
        return Err(Error::InsufficientData("no photons in any window".into()));
    }
    let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((var - mean) / mean)
}

pub fn mandel_q_windows(seq: &PhotonSequence, window: f64) -> Result<f64> {
    mandel_q(&count_windows(seq, window)?)
}

/// Mean photon numbers at the two Mach–Zehnder output ports for relative
/// phase `theta`.
pub fn modulator_transfer(theta: f64, mean_photons: f64) -> Result<(f64, f64)> {
    if !(mean_photons >= 0.0 && mean_photons.is_finite()) {
        return Err(invalid(format!("mean photon number must be non-negative, got {mean_photons}")));
    }
    let c = theta.cos();
    let out1 = mean_photons * (1.0 + c) / 2.0;
    Ok((out1, mean_photons - out1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photon_channel::{sample_homogeneous, sample_modulated, SourceConfig, Tone};
    use crate::rng::{from_seed, substream};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn windows(config: &SourceConfig, n: usize, seed: u64) -> Vec<PhotonSequence> {
        (0..n).map(|i| sample_modulated(config, &mut substream(seed, &[i as u64])).unwrap()).collect()
    }

    #[test]
    fn brute_force_pair_counts() {
        let s = PhotonSequence::from_seconds(1e-3, &[0.0, 1.5e-6, 2.2e-6, 4.9e-6, 9.0e-6]).unwrap();
        let curve = g2(&s, 5e-6, 1e-6).unwrap();
        let mut brute = [0u64; 5];
        let t: Vec<f64> = s.times().collect();
        for i in 0..t.len() {
            for j in i + 1..t.len() {
                let d = t[j] - t[i];
                if d < 5e-6 {
                    brute[(d / 1e-6) as usize] += 1;
                }
            }
        }
        assert_eq!(curve.coincidences, brute.to_vec());
        // expected count per bin = 5 · 4 · 1e-6 · (1e-3 − τ) / 1e-6
        let e0 = 20.0 * 1e-6 * (1e-3 - 0.5e-6) / 1e-6;
        assert!((curve.values[0] - brute[0] as f64 / e0).abs() < 1e-12);
    }

    #[test]
    fn flat_for_homogeneous() {
        let config = SourceConfig::homogeneous(80e3, 1e-3).unwrap();
        let w = windows(&config, 2000, 3);
        let curve = g2_pooled(&w, 40e-6, 2e-6).unwrap();
        for v in &curve.values {
            assert!((v - 1.0).abs() < 0.05, "{v}");
        }
    }

    #[test]
    fn cosine_for_full_depth_tone() {
        let config = SourceConfig::new(80e3, vec![Tone::new(50e3).unwrap()], 1e-3).unwrap();
        let w = windows(&config, 3000, 4);
        let curve = g2_pooled(&w, 40e-6, 1e-6).unwrap();
        for (tau, v) in curve.lags.iter().zip(&curve.values) {
            let model = 1.0 + 0.5 * (2.0 * PI * 50e3 * tau).cos();
            // bin averaging shrinks the cosine by sinc(f·bin) ≈ 0.996
            assert!((v - model).abs() < 0.06, "τ = {tau}: {v} vs {model}");
        }
    }

    #[test]
    fn g2_errors() {
        let s = PhotonSequence::from_seconds(1e-3, &[0.0]).unwrap();
        assert!(matches!(g2(&s, 1e-5, 1e-6), Err(Error::InsufficientData(_))));
        assert!(g2(&s, 1e-7, 1e-6).is_err());
        assert!(g2(&s, 1e-5, 0.0).is_err());
    }

    #[test]
    fn mandel_q_poisson_and_modulated() {
        let mut rng = from_seed(9);
        let long = sample_homogeneous(80e3, 1.0, &mut rng).unwrap();
        let q = mandel_q_windows(&long, 100e-6).unwrap();
        assert!(q.abs() < 0.05, "Q = {q}");

        // consecutive windows sample the tone at varying phase:
        // Q = λ m² sin²(π f w) / (2 π² f² w)
        // f·w is irrational-ish so the window phases cover the cycle
        let (rate, f, w) = (80e3, 3.7e3, 100e-6);
        let config = SourceConfig::new(rate, vec![Tone::new(f).unwrap()], 1.0).unwrap();
        let seq = sample_modulated(&config, &mut rng).unwrap();
        let q = mandel_q_windows(&seq, w).unwrap();
        let oracle = rate * (PI * f * w).sin().powi(2) / (2.0 * PI * PI * f * f * w);
        assert!((q / oracle - 1.0).abs() < 0.15, "Q = {q}, oracle = {oracle}");
    }

    #[test]
    fn mandel_q_guards() {
        assert!(mandel_q(&[3; 99]).is_err());
        assert!(mandel_q(&[0; 200]).is_err());
        assert_eq!(mandel_q(&[4; 200]).unwrap(), -1.0);
        let s = PhotonSequence::from_seconds(1e-3, &[1e-4, 3.5e-4, 9.99e-4]).unwrap();
        assert_eq!(count_windows(&s, 3e-4).unwrap(), vec![1, 1, 0]);
    }

    #[test]
    fn modulator_ports() {
        let close = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12;
        assert!(close(modulator_transfer(0.0, 5.0).unwrap(), (5.0, 0.0)));
        assert!(close(modulator_transfer(PI / 2.0, 5.0).unwrap(), (2.5, 2.5)));
        assert!(close(modulator_transfer(PI, 5.0).unwrap(), (0.0, 5.0)));
        assert!(modulator_transfer(0.0, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn modulator_conserves(theta in -20.0f64..20.0, mu in 0.0f64..1e6) {
            let (a, b) = modulator_transfer(theta, mu).unwrap();
            prop_assert!((a + b - mu).abs() <= f64::EPSILON * mu);
            prop_assert!(a >= 0.0 && b >= -1e-9 * mu);
        }
    }
}
