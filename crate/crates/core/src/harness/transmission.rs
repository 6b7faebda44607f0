use rand::Rng;
use rayon::prelude::*;

use super::engine::{run_point, DecisionGroup, TrialWindow};
use super::SweepResult;
use crate::codec::image::{dequantize, encode_image, pixel_symbols, quantize, symbols_pixel, RgbImage, FAILURE_COLOR};
use crate::codec::{decode, encode, text_symbols, FrequencyPlan, Mapping, Symbol, ToneSet};
use crate::error::{Error, Result};
use crate::photon_channel::{transmit, LinkBudget};
use crate::rng::substream;
use crate::spectral::LineReference;

/// Operating point for plan-level transmissions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSettings {
    /// Mean detected signal rate, counts/s.
    pub rate: f64,
    /// Integration time per window, seconds.
    pub window: f64,
    pub budget: LinkBudget,
    pub seed: u64,
    /// Windows simulated by [`run_codeword_trials`].
    pub trials: usize,
    pub line_reference: LineReference,
    pub analytic_channels: u64,
}

impl TrialSettings {
    pub fn new(rate: f64, window: f64) -> Self {
        Self {
            rate,
            window,
            budget: LinkBudget::default(),
            seed: 0,
            trials: 10_000,
            line_reference: LineReference::Signal,
            analytic_channels: 1,
        }
    }
}

/// Symbol error statistics for a per-band plan.
///
/// Each window sends one symbol per band: `codeword` if given, otherwise
/// uniform random symbols drawn per trial. Decoding is the per-band argmax
/// used by [`decode`].
pub fn run_codeword_trials(plan: &FrequencyPlan, codeword: Option<&[Symbol]>, s: &TrialSettings) -> Result<SweepResult> {
    if plan.mapping() != Mapping::PerBand {
        return Err(Error::InvalidPlan("codeword trials need a per-band plan".into()));
    }
    let fixed = match codeword {
        Some(word) => Some(encode(word, plan)?),
        None => None,
    };
    if let Some(f) = &fixed {
        if f.len() != 1 {
            return Err(Error::InvalidPlan(format!("codeword must fill exactly one window, got {}", f.len())));
        }
    }
    let o = run_point(&s.budget, s.trials, s.seed, &[], s.line_reference, |rng| {
        let tones = match &fixed {
            Some(f) => f[0].clone(),
            None => ToneSet {
                frequencies: plan
                    .bands()
                    .iter()
                    .map(|b| b.channels()[rng.gen_range(0..b.channels().len())])
                    .collect(),
            },
        };
        let groups = plan
            .bands()
            .iter()
            .zip(&tones.frequencies)
            .map(|(b, &f)| {
                let target = b.channels().iter().position(|&c| c == f).expect("encoded frequency is a channel");
                DecisionGroup::excluding_neighbours(b.channels().to_vec(), target)
            })
            .collect();
        Ok(TrialWindow { source: tones.to_source(s.rate, s.window)?, groups })
    })?;
    Ok(SweepResult::from_outcome(0.0, s.rate, &o, s.analytic_channels))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageReport {
    pub received: RgbImage,
    /// Pixels that differ from the quantized original.
    pub pixel_errors: usize,
    /// Wrong red, green and blue symbols.
    pub symbol_errors: [u64; 3],
    /// Windows that could not be decoded at all (drawn in [`FAILURE_COLOR`]).
    pub failures: usize,
}

impl ImageReport {
    pub fn pixel_error_rate(&self) -> f64 {
        self.pixel_errors as f64 / self.received.pixels.len().max(1) as f64
    }
}

/// Sends every pixel in its own window through the link and decodes it.
/// Pixel `i` uses substream `seed / i`.
pub fn run_image_transmission(image: &RgbImage, plan: &FrequencyPlan, s: &TrialSettings) -> Result<ImageReport> {
    s.budget.validate()?;
    let tones = encode_image(image, plan)?;
    let decoded: Vec<Result<Option<Vec<Symbol>>>> = tones
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let mut rng = substream(s.seed, &[i as u64]);
            let seq = transmit(&t.to_source(s.rate, s.window)?, &s.budget, &mut rng)?;
            Ok(decode(&seq, plan).ok())
        })
        .collect();
    let mut pixels = Vec::with_capacity(image.pixels.len());
    let mut report_errors = [0u64; 3];
    let (mut pixel_errors, mut failures) = (0, 0);
    for (d, &original) in decoded.into_iter().zip(&image.pixels) {
        let sent = pixel_symbols(original);
        let got = match d? {
            Some(symbols) => {
                for (slot, (a, b)) in report_errors.iter_mut().zip(sent.iter().zip(&symbols)) {
                    *slot += (a != b) as u64;
                }
                symbols_pixel(&symbols).unwrap_or(FAILURE_COLOR)
            }
            None => {
                failures += 1;
                report_errors.iter_mut().for_each(|e| *e += 1);
                FAILURE_COLOR
            }
        };
        pixel_errors += (got != original.map(|v| dequantize(quantize(v)))) as usize;
        pixels.push(got);
    }
    Ok(ImageReport {
        received: RgbImage::new(image.width, image.height, pixels)?,
        pixel_errors,
        symbol_errors: report_errors,
        failures,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TextReport {
    /// Decoded text; undecodable windows become U+FFFD.
    pub decoded: String,
    pub symbol_errors: usize,
}

/// Sends text through a character plan, one window per plan codeword.
pub fn run_text_transmission(text: &str, plan: &FrequencyPlan, s: &TrialSettings) -> Result<TextReport> {
    s.budget.validate()?;
    let sent = text_symbols(text);
    let tones = encode(&sent, plan)?;
    let mut received = Vec::with_capacity(sent.len());
    for (i, t) in tones.iter().enumerate() {
        let mut rng = substream(s.seed, &[i as u64]);
        let seq = transmit(&t.to_source(s.rate, s.window)?, &s.budget, &mut rng)?;
        match decode(&seq, plan) {
            Ok(symbols) => received.extend(symbols),
            Err(_) => received.extend(std::iter::repeat_n(Symbol::Char('\u{FFFD}'), plan.components())),
        }
    }
    let symbol_errors = sent.iter().zip(&received).filter(|(a, b)| a != b).count();
    let decoded = received.iter().map(|s| if let Symbol::Char(c) = s { *c } else { '\u{FFFD}' }).collect();
    Ok(TextReport { decoded, symbol_errors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gradient(n: usize) -> RgbImage {
        let pixels = (0..n * n).map(|i| [(i * 37 % 256) as u8, (i * 11 % 256) as u8, (255 - i % 256) as u8]).collect();
        RgbImage::new(n, n, pixels).unwrap()
    }

    #[test]
    fn bright_link_reproduces_image() {
        let img = gradient(6);
        let s = TrialSettings { seed: 2, ..TrialSettings::new(2e6, 1e-3) };
        let r = run_image_transmission(&img, &FrequencyPlan::table1(), &s).unwrap();
        assert_eq!(r.pixel_errors, 0);
        assert_eq!(r.symbol_errors, [0, 0, 0]);
        assert_eq!(r, run_image_transmission(&img, &FrequencyPlan::table1(), &s).unwrap());
    }

    #[test]
    fn dark_link_fails_every_pixel() {
        let img = gradient(3);
        let r = run_image_transmission(&img, &FrequencyPlan::table1(), &TrialSettings::new(0.0, 1e-3)).unwrap();
        assert_eq!(r.failures, 9);
        assert!(r.received.pixels.iter().all(|&p| p == FAILURE_COLOR));
        assert_eq!(r.pixel_error_rate(), 1.0);
    }

    #[test]
    fn text_round_trip() {
        let s = TrialSettings { seed: 1, ..TrialSettings::new(400e3, 1e-3) };
        let r = run_text_transmission("HELLO", &FrequencyPlan::table_s1(), &s).unwrap();
        assert_eq!(r.decoded, "HELLO");
        assert!(run_text_transmission("hello", &FrequencyPlan::table_s1(), &s).is_err());
    }

    #[test]
    fn codeword_trials() {
        let plan = FrequencyPlan::table1();
        let word: Vec<Symbol> = ["red:4", "green:5", "blue:10"].iter().map(|s| s.parse().unwrap()).collect();
        let s = TrialSettings { trials: 200, ..TrialSettings::new(1e6, 1e-3) };
        let r = run_codeword_trials(&plan, Some(&word), &s).unwrap();
        assert_eq!(r.symbols, 600);
        assert_eq!(r.symbol_errors, 0);
        let r = run_codeword_trials(&plan.single_band("green").unwrap(), None, &TrialSettings::new(5e3, 1e-3)).unwrap();
        assert!(r.empirical_rate > 0.3, "{}", r.empirical_rate);
        assert!(run_codeword_trials(&plan, Some(&word[..2]), &s).is_err());
    }
}
