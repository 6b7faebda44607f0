use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::photon_channel::{LinkBudget, FWHM_TO_SIGMA};
use crate::spectral::LineReference;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// Grid: background rate. Families: signal rates.
    ErrorVsNoise,
    /// Grid: integration time, at `counts_per_window` mean photons.
    ErrorVsIntegrationTime,
    /// Grid: spacing between the sent channel and its one competitor.
    ErrorVsSpacing,
    /// Grid: total signal rate. Families: number of tones.
    ErrorVsComponents,
    /// Same layout as `ErrorVsComponents`; the moments are the output.
    AmplitudeNonlinearity,
}

/// Swept values, listed or generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values { values: Vec<f64> },
    Range {
        start: f64,
        stop: f64,
        points: usize,
        #[serde(default)]
        log: bool,
    },
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match self {
            Grid::Values { values } => values.clone(),
            Grid::Range { start, stop, points, log } => {
                let (start, stop, points) = (*start, *stop, *points);
                if points == 0 {
                    Vec::new()
                } else if points == 1 {
                    vec![start]
                } else if *log {
                    if !(start > 0.0 && stop > 0.0) {
                        return Err(invalid("logarithmic grids need positive end points"));
                    }
                    let r = (stop / start).ln() / (points - 1) as f64;
                    (0..points).map(|i| start * (r * i as f64).exp()).collect()
                } else {
                    let step = (stop - start) / (points - 1) as f64;
                    (0..points).map(|i| start + step * i as f64).collect()
                }
            }
        };
        if v.is_empty() {
            return Err(invalid("sweep grid is empty"));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(invalid("sweep grid holds a non-finite value"));
        }
        Ok(v)
    }
}

/// Link budget as written in a sweep file. Jitter is given as a FWHM and
/// gating as a period (absent means ungated).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetSpec {
    pub transmittance: f64,
    pub noise_rate: f64,
    pub dark_rate: f64,
    pub jitter_fwhm: f64,
    pub dead_time: f64,
    pub gate_period: Option<f64>,
}

impl Default for BudgetSpec {
    fn default() -> Self {
        Self { transmittance: 1.0, noise_rate: 0.0, dark_rate: 0.0, jitter_fwhm: 0.0, dead_time: 0.0, gate_period: None }
    }
}

impl BudgetSpec {
    pub fn to_budget(&self) -> Result<LinkBudget> {
        let b = LinkBudget {
            transmittance: self.transmittance,
            noise_rate: self.noise_rate,
            dark_rate: self.dark_rate,
            jitter_sigma: self.jitter_fwhm * FWHM_TO_SIGMA,
            dead_time: self.dead_time,
            rep_period: self.gate_period,
        };
        b.validate()?;
        Ok(b)
    }
}

fn default_trials() -> usize {
    10_000
}
fn default_window() -> f64 {
    1e-3
}
fn default_tone() -> f64 {
    50e3
}
fn default_channels() -> usize {
    11
}
fn default_band_step() -> f64 {
    20e3
}
fn default_counts() -> f64 {
    80.0
}
fn default_signal_rates() -> Vec<f64> {
    vec![80e3]
}
fn default_components() -> Vec<usize> {
    vec![1]
}
fn default_analytic_channels() -> u64 {
    1
}

/// One sweep, as read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub experiment: Experiment,
    pub grid: Grid,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Integration time, seconds (ignored by the integration-time sweep).
    #[serde(default = "default_window")]
    pub window: f64,
    /// First tone frequency, Hz.
    #[serde(default = "default_tone")]
    pub tone_frequency: f64,
    /// Channels per decision band, centred on the tone.
    #[serde(default = "default_channels")]
    pub channels_per_band: usize,
    /// Offset between successive tones when several are sent, Hz.
    #[serde(default = "default_band_step")]
    pub band_step: f64,
    /// Mean signal photons per window for the time and spacing sweeps.
    #[serde(default = "default_counts")]
    pub counts_per_window: f64,
    #[serde(default = "default_signal_rates")]
    pub signal_rates: Vec<f64>,
    #[serde(default = "default_components")]
    pub components: Vec<usize>,
    /// Channel count `M` in `e = 1 − (1 − p)^M`.
    #[serde(default = "default_analytic_channels")]
    pub analytic_channels: u64,
    #[serde(default)]
    pub line_reference: LineReference,
    #[serde(default)]
    pub budget: BudgetSpec,
    /// CSV destination; the manifest goes next to it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl SweepSpec {
    /// Spec with every optional field at its default.
    pub fn new(experiment: Experiment, grid: Grid) -> Self {
        Self {
            experiment,
            grid,
            seed: 0,
            trials: default_trials(),
            window: default_window(),
            tone_frequency: default_tone(),
            channels_per_band: default_channels(),
            band_step: default_band_step(),
            counts_per_window: default_counts(),
            signal_rates: default_signal_rates(),
            components: default_components(),
            analytic_channels: default_analytic_channels(),
            line_reference: LineReference::default(),
            budget: BudgetSpec::default(),
            output: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("sweep specs serialize")
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.values()?;
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if !(self.window.is_finite() && self.window > 0.0) {
            return Err(invalid(format!("window must be positive, got {}", self.window)));
        }
        if !(self.tone_frequency.is_finite() && self.tone_frequency > 0.0) {
            return Err(invalid("tone frequency must be positive"));
        }
        if self.channels_per_band < 2 {
            return Err(invalid("a decision band needs at least two channels"));
        }
        if !(self.counts_per_window.is_finite() && self.counts_per_window >= 0.0) {
            return Err(invalid("counts per window must be nonnegative"));
        }
        if self.signal_rates.is_empty() || self.signal_rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(invalid("signal rates must be a nonempty list of nonnegative values"));
        }
        if self.components.is_empty() || self.components.contains(&0) {
            return Err(invalid("components must be a nonempty list of positive counts"));
        }
        if self.analytic_channels == 0 {
            return Err(invalid("analytic channel count must be at least 1"));
        }
        self.budget.to_budget()?;
        Ok(())
    }

    /// SHA-256 of the canonical TOML form, hex encoded.
    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Provenance written next to each sweep's CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: Experiment,
    pub seed: u64,
    pub trials: usize,
    pub points: usize,
    pub version: String,
    pub config_hash: String,
}

impl Manifest {
    pub fn for_spec(spec: &SweepSpec, points: usize) -> Self {
        Self {
            experiment: spec.experiment,
            seed: spec.seed,
            trials: spec.trials,
            points,
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: spec.config_hash(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifests serialize")
    }
}
