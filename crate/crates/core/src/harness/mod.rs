//! Monte Carlo experiment runner.
//!
//! Each grid point simulates `trials` windows and reports the empirical
//! symbol error rate together with the analytic rate built from the line and
//! floor moments of the same windows. Grid points and trials draw from
//! substreams keyed by `(seed, family, point, trial)`, so a sweep is
//! reproducible bit for bit from its spec.

mod engine;
pub mod landmarks;
mod spec;
mod sweeps;
mod transmission;

use serde::Serialize;

pub use spec::{BudgetSpec, Experiment, Grid, Manifest, SweepSpec};
pub use sweeps::{
    run_amplitude_nonlinearity, run_error_vs_components, run_error_vs_integration_time, run_error_vs_noise,
    run_error_vs_spacing, run_sweep,
};
pub use transmission::{
    run_codeword_trials, run_image_transmission, run_text_transmission, ImageReport, TextReport, TrialSettings,
};

use crate::analysis::{channel_error_rate, misdecode_prob, ErrorModelInput};
use crate::spectral::LineStats;
use engine::PointOutcome;

/// Fewest error events for an empirical rate to be reported.
pub const MIN_ERROR_EVENTS: u64 = 30;
/// Smallest empirical rate that is reported over the analytic one.
pub const MIN_EMPIRICAL_RATE: f64 = 1e-3;

/// Wilson score interval for `successes` out of `n` at 95 % confidence.
pub fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    const Z: f64 = 1.959_963_984_540_054;
    let n_f = n as f64;
    let p = successes as f64 / n_f;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = Z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    // clamp so the interval always contains p despite rounding
    ((centre - half).clamp(0.0, p), (centre + half).clamp(p, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateSource {
    Empirical,
    Analytic,
}

impl RateSource {
    pub fn name(&self) -> &'static str {
        match self {
            RateSource::Empirical => "empirical",
            RateSource::Analytic => "analytic",
        }
    }
}

/// One grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Family the point belongs to (signal rate or tone count; 0 if unused).
    pub family: f64,
    /// Swept parameter value.
    pub value: f64,
    pub trials: usize,
    pub symbols: u64,
    pub symbol_errors: u64,
    pub window_errors: u64,
    pub empirical_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `1 − (1 − p)^M` with `p` from the Gaussian moments; NaN if the
    /// moments are degenerate.
    pub analytic_rate: f64,
    pub stats: LineStats,
    pub reported_rate: f64,
    pub source: RateSource,
}

impl SweepResult {
    pub const CSV_HEADER: &'static str = "family,value,trials,symbols,symbol_errors,window_errors,empirical_rate,\
ci_low,ci_high,analytic_rate,reported_rate,source,line_mean,line_std,floor_mean,floor_std";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.family,
            self.value,
            self.trials,
            self.symbols,
            self.symbol_errors,
            self.window_errors,
            self.empirical_rate,
            self.ci_low,
            self.ci_high,
            self.analytic_rate,
            self.reported_rate,
            self.source.name(),
            self.stats.line_mean,
            self.stats.line_std,
            self.stats.floor_mean,
            self.stats.floor_std
        )
    }

    fn from_outcome(family: f64, value: f64, o: &PointOutcome, analytic_channels: u64) -> Self {
        let stats = LineStats {
            line_mean: o.line.mean(),
            line_std: o.line.std(),
            floor_mean: o.floor.mean(),
            floor_std: o.floor.std(),
            trials: o.trials,
        };
        let analytic_rate = ErrorModelInput::from_stats(&stats, analytic_channels)
            .and_then(|input| misdecode_prob(&input))
            .and_then(|p| channel_error_rate(p, analytic_channels))
            .unwrap_or(f64::NAN);
        let empirical_rate = if o.symbols == 0 { 0.0 } else { o.symbol_errors as f64 / o.symbols as f64 };
        let (ci_low, ci_high) = wilson_interval(o.symbol_errors, o.symbols);
        let trusted = o.symbol_errors >= MIN_ERROR_EVENTS && empirical_rate >= MIN_EMPIRICAL_RATE;
        let (reported_rate, source) = if trusted || analytic_rate.is_nan() {
            (empirical_rate, RateSource::Empirical)
        } else {
            (analytic_rate, RateSource::Analytic)
        };
        Self {
            family,
            value,
            trials: o.trials,
            symbols: o.symbols,
            symbol_errors: o.symbol_errors,
            window_errors: o.window_errors,
            empirical_rate,
            ci_low,
            ci_high,
            analytic_rate,
            stats,
            reported_rate,
            source,
        }
    }
}

/// Results as CSV, one row per grid point.
pub fn results_csv(results: &[SweepResult]) -> String {
    let mut out = String::from(SweepResult::CSV_HEADER);
    out.push('\n');
    for r in results {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn wilson_edges() {
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.036_995).abs() < 1e-4, "{hi}");
        let (lo, hi) = wilson_interval(100, 100);
        assert_eq!(hi, 1.0);
        assert!(lo < 1.0);
        assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
        // textbook value: 10 of 100 → [0.0552, 0.1744]
        let (lo, hi) = wilson_interval(10, 100);
        assert!((lo - 0.0552).abs() < 1e-3 && (hi - 0.1744).abs() < 1e-3);
    }

    #[test]
    fn wilson_coverage_on_bernoulli_draws() {
        let mut rng = crate::rng::from_seed(17);
        for &(p, n) in &[(0.01, 500u64), (0.1, 100), (0.5, 40)] {
            let reps = 4000;
            let mut covered = 0;
            for _ in 0..reps {
                let k = (0..n).filter(|_| rng.gen::<f64>() < p).count() as u64;
                let (lo, hi) = wilson_interval(k, n);
                covered += (lo <= p && p <= hi) as u32;
            }
            let coverage = covered as f64 / reps as f64;
            assert!((0.92..=0.98).contains(&coverage), "p = {p}, n = {n}: coverage {coverage}");
        }
    }

    #[test]
    fn rate_source_selection() {
        let mut o = PointOutcome { trials: 1000, symbols: 1000, ..Default::default() };
        for i in 0..1000 {
            o.line.push(40.0 + (i % 7) as f64);
            o.floor.push(8.0 + (i % 5) as f64);
        }
        o.symbol_errors = 2;
        let r = SweepResult::from_outcome(0.0, 1.0, &o, 1);
        assert_eq!(r.source, RateSource::Analytic);
        assert_eq!(r.reported_rate, r.analytic_rate);
        assert!(r.ci_low <= r.empirical_rate && r.empirical_rate <= r.ci_high);
        o.symbol_errors = 40;
        let r = SweepResult::from_outcome(0.0, 1.0, &o, 1);
        assert_eq!(r.source, RateSource::Empirical);
        assert_eq!(r.reported_rate, 0.04);
        assert_eq!(results_csv(&[r]).lines().count(), 2);
    }
}
