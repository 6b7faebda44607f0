//! Frequency plans and symbol coding.
//!
//! A plan assigns symbols to modulation frequencies. Two mapping styles are
//! supported:
//!
//! * per-band: each band carries its own alphabet with one symbol per
//!   channel, and a window carries one symbol from every band (the gray-level
//!   image and character tables work this way);
//! * combinatorial: a window carries one `Index` symbol naming a k-subset of
//!   all plan channels.

pub mod image;
mod plan;
pub mod plan_file;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;

pub use plan::{FrequencyPlan, Mapping, PlanBand};

use crate::error::{invalid, Error, Result};
use crate::photon_channel::{PhotonSequence, SourceConfig, Tone};
use crate::spectral::{band_peak, dft_at};

/// Number of elementary channels that fit a bandwidth: `⌊B / f_s⌋ + 1`.
pub fn optimal_channels(bandwidth: f64, spacing: f64) -> Result<u64> {
    if !(bandwidth.is_finite() && bandwidth > 0.0 && spacing.is_finite() && spacing > 0.0) {
        return Err(invalid(format!("bandwidth and spacing must be positive, got {bandwidth} and {spacing}")));
    }
    let ratio = bandwidth / spacing;
    // absorb representation error such as 0.3 / 0.1 = 2.9999999999999996
    let whole = (ratio * (1.0 + 1e-12)).floor();
    if whole >= u64::MAX as f64 {
        return Err(invalid("channel count overflows"));
    }
    Ok(whole as u64 + 1)
}

/// Number of k-tone symbols available from `m_opt` channels, `C(m_opt, k)`.
pub fn effective_channels(m_opt: u64, k: u64) -> Result<BigUint> {
    if k == 0 || k > m_opt {
        return Err(invalid(format!("need 1 ≤ k ≤ m_opt, got k = {k}, m_opt = {m_opt}")));
    }
    Ok(binomial(m_opt, k))
}

pub(crate) fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Red,
    Green,
    Blue,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::Red, Color::Green, Color::Blue];

    pub fn name(&self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Green => "green",
            Color::Blue => "blue",
        }
    }
}

/// One unit of the plan alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Gray { color: Color, level: u8 },
    Char(char),
    Index(u64),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Gray { color, level } => write!(f, "{}:{}", color.name(), level),
            Symbol::Char(c) => write!(f, "char:{c}"),
            Symbol::Index(i) => write!(f, "index:{i}"),
        }
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, value) = s.split_once(':').ok_or_else(|| invalid(format!("symbol `{s}` lacks a kind prefix")))?;
        let bad = || invalid(format!("cannot parse symbol `{s}`"));
        match kind {
            "red" | "green" | "blue" => {
                let color = match kind {
                    "red" => Color::Red,
                    "green" => Color::Green,
                    _ => Color::Blue,
                };
                Ok(Symbol::Gray { color, level: value.parse().map_err(|_| bad())? })
            }
            "char" => {
                let mut chars = value.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Ok(Symbol::Char(c)),
                    _ => Err(bad()),
                }
            }
            "index" => Ok(Symbol::Index(value.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

/// The modulation frequencies sent in one integration window.
#[derive(Debug, Clone, PartialEq)]
pub struct ToneSet {
    pub frequencies: Vec<f64>,
}

impl ToneSet {
    pub fn sorted(&self) -> Vec<f64> {
        let mut f = self.frequencies.clone();
        f.sort_by(f64::total_cmp);
        f
    }

    /// Full-depth, zero-phase source carrying these tones.
    pub fn to_source(&self, mean_rate: f64, duration: f64) -> Result<SourceConfig> {
        let tones = self.frequencies.iter().map(|&f| Tone::new(f)).collect::<Result<Vec<_>>>()?;
        SourceConfig::new(mean_rate, tones, duration)
    }
}

/// Recovered frequencies that do not form a codeword, or a window with no
/// photons to decode.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeFailure {
    pub frequencies: Vec<f64>,
}

impl fmt::Display for DecodeFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.frequencies.is_empty() {
            write!(f, "no photons to decode")
        } else {
            write!(f, "recovered frequencies {:?} Hz do not form a codeword", self.frequencies)
        }
    }
}

/// Maps symbols to one tone set per window.
///
/// Per-band plans consume `k` symbols per window, the i-th drawn from the
/// i-th band's alphabet; combinatorial plans consume one `Index` per window.
pub fn encode(symbols: &[Symbol], plan: &FrequencyPlan) -> Result<Vec<ToneSet>> {
    match plan.mapping() {
        Mapping::PerBand => {
            let k = plan.bands().len();
            if !symbols.len().is_multiple_of(k) {
                return Err(invalid(format!(
                    "{} symbols do not fill whole windows of {k} (one per band)",
                    symbols.len()
                )));
            }
            symbols
                .chunks(k)
                .map(|word| {
                    let frequencies = word
                        .iter()
                        .zip(plan.bands())
                        .map(|(s, band)| band.frequency_of(s).ok_or_else(|| Error::UnknownSymbol(s.to_string())))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(ToneSet { frequencies })
                })
                .collect()
        }
        Mapping::Combinatorial => symbols
            .iter()
            .map(|s| match s {
                Symbol::Index(i) => plan.unrank(*i).map(|frequencies| ToneSet { frequencies }),
                other => Err(Error::UnknownSymbol(other.to_string())),
            })
            .collect(),
    }
}

/// Inverse of [`encode`] for a noiseless channel: tone set back to symbols.
pub fn symbols_of(tones: &ToneSet, plan: &FrequencyPlan) -> std::result::Result<Vec<Symbol>, DecodeFailure> {
    let fail = || DecodeFailure { frequencies: tones.sorted() };
    match plan.mapping() {
        Mapping::PerBand => {
            if tones.frequencies.len() != plan.bands().len() {
                return Err(fail());
            }
            plan.bands()
                .iter()
                .map(|band| {
                    let hits: Vec<&f64> = tones.frequencies.iter().filter(|&&f| band.band().contains(f)).collect();
                    match hits.as_slice() {
                        [f] => band.symbol_at(**f).ok_or_else(fail),
                        _ => Err(fail()),
                    }
                })
                .collect()
        }
        Mapping::Combinatorial => plan.rank(&tones.sorted()).map(|i| vec![Symbol::Index(i)]).ok_or_else(fail),
    }
}

/// Frequencies recovered from one window: the per-band argmax channels, or
/// the `k` strongest channels overall for combinatorial plans (ascending).
pub fn recover_frequencies(seq: &PhotonSequence, plan: &FrequencyPlan) -> Vec<f64> {
    match plan.mapping() {
        Mapping::PerBand => plan
            .bands()
            .iter()
            .map(|b| band_peak(seq, b.band(), b.channels()).expect("plan bands hold channels").0)
            .collect(),
        Mapping::Combinatorial => {
            let channels = plan.channels();
            let amps: Vec<f64> = dft_at(seq, &channels).iter().map(|a| a.norm()).collect();
            let mut idx: Vec<usize> = (0..channels.len()).collect();
            idx.sort_by(|&a, &b| amps[b].total_cmp(&amps[a]).then(a.cmp(&b)));
            let mut picked: Vec<f64> = idx[..plan.components()].iter().map(|&i| channels[i]).collect();
            picked.sort_by(f64::total_cmp);
            picked
        }
    }
}

/// Decodes one window back to its codeword.
pub fn decode(seq: &PhotonSequence, plan: &FrequencyPlan) -> std::result::Result<Vec<Symbol>, DecodeFailure> {
    if seq.is_empty() {
        return Err(DecodeFailure { frequencies: Vec::new() });
    }
    let frequencies = recover_frequencies(seq, plan);
    symbols_of(&ToneSet { frequencies }, plan)
}

/// Characters as symbols.
pub fn text_symbols(text: &str) -> Vec<Symbol> {
    text.chars().map(Symbol::Char).collect()
}

/// Concatenates decoded characters; non-character symbols are rejected.
pub fn symbols_to_text(symbols: &[Symbol]) -> Result<String> {
    symbols
        .iter()
        .map(|s| match s {
            Symbol::Char(c) => Ok(*c),
            other => Err(invalid(format!("symbol {other} is not a character"))),
        })
        .collect()
}
