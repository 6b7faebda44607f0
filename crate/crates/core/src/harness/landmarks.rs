//! Curve features used to compare sweeps with reference figures.

use std::f64::consts::TAU;

/// Least-squares line `y = slope · x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Some(LinearFit { slope, intercept, r_squared })
}

/// `ys` minus its least-squares line.
pub fn detrend(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    match linear_fit(xs, ys) {
        Some(f) => xs.iter().zip(ys).map(|(x, y)| y - f.slope * x - f.intercept).collect(),
        None => ys.to_vec(),
    }
}

/// Root mean square.
pub fn rms(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt()
}

/// Candidate period whose least-squares sinusoid explains most of the
/// detrended curve.
pub fn dominant_period(xs: &[f64], ys: &[f64], candidates: &[f64]) -> Option<f64> {
    let resid = detrend(xs, ys);
    let mut best: Option<(f64, f64)> = None;
    for &period in candidates {
        let w = TAU / period;
        // normal equations for a·cos + b·sin
        let (mut cc, mut ss, mut cs, mut yc, mut ys_) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (x, y) in xs.iter().zip(&resid) {
            let (s, c) = (w * x).sin_cos();
            cc += c * c;
            ss += s * s;
            cs += c * s;
            yc += y * c;
            ys_ += y * s;
        }
        let det = cc * ss - cs * cs;
        if det.abs() < 1e-12 * (cc * ss).max(1e-300) {
            continue;
        }
        let a = (yc * ss - ys_ * cs) / det;
        let b = (ys_ * cc - yc * cs) / det;
        let explained = a * yc + b * ys_;
        if best.is_none_or(|(_, e)| explained > e) {
            best = Some((period, explained));
        }
    }
    best.map(|(p, _)| p)
}

/// Three-point moving average; the end points keep two-point averages.
pub fn smooth3(ys: &[f64]) -> Vec<f64> {
    let n = ys.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(n - 1);
            ys[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

/// `x` of the first interior local minimum of the smoothed curve.
pub fn first_trough(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let s = smooth3(ys);
    (1..s.len().saturating_sub(1)).find(|&i| s[i] < s[i - 1] && s[i] <= s[i + 1]).map(|i| xs[i])
}

/// First `x` at which a decreasing curve falls through `level`, interpolated
/// linearly in `(ln x, ln y)`. Points with `y ≤ 0` or NaN are skipped.
pub fn falling_crossing(xs: &[f64], ys: &[f64], level: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0 && y.is_finite()).map(|(&x, &y)| (x, y)).collect();
    pts.windows(2).find(|w| w[0].1 >= level && w[1].1 < level).map(|w| {
        let (x0, y0) = (w[0].0.ln(), w[0].1.ln());
        let (x1, y1) = (w[1].0.ln(), w[1].1.ln());
        let t = (level.ln() - y0) / (y1 - y0);
        (x0 + t * (x1 - x0)).exp()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        let f = linear_fit(&xs, &ys).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-12 && (f.intercept + 1.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 1.0]).is_none());
        assert!(rms(&detrend(&xs, &ys)) < 1e-12);
    }

    #[test]
    fn period_of_noisy_cosine_on_a_ramp() {
        let xs: Vec<f64> = (0..121).map(|i| 60.0 + 2.0 * i as f64).collect();
        let ys: Vec<f64> =
            xs.iter().enumerate().map(|(i, x)| 0.01 * x + (TAU * x / 10.0).cos() + 0.3 * ((i * 7919 % 13) as f64 / 13.0 - 0.5)).collect();
        let cands: Vec<f64> = (0..=300).map(|i| 4.0 + 0.1 * i as f64).collect();
        let p = dominant_period(&xs, &ys, &cands).unwrap();
        assert!((p - 10.0).abs() < 0.3, "{p}");
    }

    #[test]
    fn trough_and_crossing() {
        let xs: Vec<f64> = (0..40).map(|i| 0.1 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (x - 1.0f64).powi(2) + 0.1 * (x * 5.0).sin().abs() * (x - 1.0).abs()).collect();
        let t = first_trough(&xs, &ys).unwrap();
        assert!((t - 1.0).abs() <= 0.1, "{t}");
        assert_eq!(first_trough(&[0.0, 1.0], &[1.0, 0.0]), None);

        let xs = [1.0, 10.0, 100.0];
        let ys = [1e-1, 1e-3, 1e-5];
        let x = falling_crossing(&xs, &ys, 1e-4).unwrap();
        assert!((x / 10f64.powf(1.5) - 1.0).abs() < 1e-12);
        assert!(falling_crossing(&xs, &ys, 1e-6).is_none());
    }
}
