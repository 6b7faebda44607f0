use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use super::{binomial, optimal_channels, Color, Symbol};
use crate::error::{Error, Result};
use crate::spectral::Band;

fn plan_err(msg: impl Into<String>) -> Error {
    Error::InvalidPlan(msg.into())
}

fn same_frequency(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// A named sub-band and its channel frequencies (ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct PlanBand {
    name: String,
    band: Band,
    channels: Vec<f64>,
    symbols: Vec<Symbol>,
}

impl PlanBand {
    /// Band with an explicit symbol per channel. Entries may come in any order.
    pub fn with_symbols(name: impl Into<String>, band: Band, mut table: Vec<(Symbol, f64)>) -> Self {
        table.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (symbols, channels) = table.into_iter().unzip();
        Self { name: name.into(), band, channels, symbols }
    }

    /// Band of bare channels (combinatorial plans).
    pub fn with_channels(name: impl Into<String>, band: Band, mut channels: Vec<f64>) -> Self {
        channels.sort_by(f64::total_cmp);
        Self { name: name.into(), band, channels, symbols: Vec::new() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn band(&self) -> Band {
        self.band
    }

    pub fn channels(&self) -> &[f64] {
        &self.channels
    }

    /// Alphabet in channel order; empty for combinatorial bands.
    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn frequency_of(&self, symbol: &Symbol) -> Option<f64> {
        self.symbols.iter().position(|s| s == symbol).map(|i| self.channels[i])
    }

    pub fn symbol_at(&self, frequency: f64) -> Option<Symbol> {
        self.channels.iter().position(|&c| same_frequency(c, frequency)).and_then(|i| self.symbols.get(i).copied())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mapping {
    PerBand,
    Combinatorial,
}

/// Channel layout and symbol mapping shared by transmitter and receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyPlan {
    name: String,
    bandwidth: f64,
    spacing: f64,
    components: usize,
    bands: Vec<PlanBand>,
    mapping: Mapping,
}

impl FrequencyPlan {
    pub fn new(
        name: impl Into<String>,
        bandwidth: f64,
        spacing: f64,
        components: usize,
        bands: Vec<PlanBand>,
        mapping: Mapping,
    ) -> Result<Self> {
        let plan = Self { name: name.into(), bandwidth, spacing, components, bands, mapping };
        plan.validate()?;
        Ok(plan)
    }

    fn validate(&self) -> Result<()> {
        let m_opt = optimal_channels(self.bandwidth, self.spacing).map_err(|e| plan_err(e.to_string()))?;
        if self.bands.is_empty() {
            return Err(plan_err("plan has no bands"));
        }
        for band in &self.bands {
            if band.channels.is_empty() {
                return Err(plan_err(format!("band `{}` has no channels", band.name)));
            }
            if let Some(f) = band.channels.iter().find(|&&f| !band.band.contains(f)) {
                return Err(plan_err(format!("channel {f} Hz lies outside band `{}`", band.name)));
            }
            for pair in band.channels.windows(2) {
                if !same_frequency(pair[1] - pair[0], self.spacing) {
                    return Err(plan_err(format!(
                        "channels {} and {} Hz in band `{}` are not one spacing ({} Hz) apart",
                        pair[0], pair[1], band.name, self.spacing
                    )));
                }
            }
        }
        let total: usize = self.bands.iter().map(|b| b.channels.len()).sum();
        if total as u64 > m_opt {
            return Err(plan_err(format!("{total} channels exceed the {m_opt} that fit the bandwidth")));
        }
        for (i, a) in self.bands.iter().enumerate() {
            for b in &self.bands[i + 1..] {
                if a.band.low() < b.band.high() && b.band.low() < a.band.high() {
                    return Err(plan_err(format!("bands `{}` and `{}` overlap", a.name, b.name)));
                }
            }
        }
        let all = self.channels();
        if all.windows(2).any(|w| same_frequency(w[0], w[1])) {
            return Err(plan_err("channel frequencies are not distinct"));
        }
        match self.mapping {
            Mapping::PerBand => {
                if self.components != self.bands.len() {
                    return Err(plan_err(format!(
                        "per-band plan needs one component per band ({}), got {}",
                        self.bands.len(),
                        self.components
                    )));
                }
                let mut seen = std::collections::HashSet::new();
                for band in &self.bands {
                    if band.symbols.len() != band.channels.len() {
                        return Err(plan_err(format!("band `{}` needs exactly one symbol per channel", band.name)));
                    }
                    for s in &band.symbols {
                        if !seen.insert(*s) {
                            return Err(plan_err(format!("symbol {s} appears twice")));
                        }
                    }
                }
            }
            Mapping::Combinatorial => {
                if self.bands.iter().any(|b| !b.symbols.is_empty()) {
                    return Err(plan_err("combinatorial plans carry no symbol tables"));
                }
                if self.components == 0 || self.components > total {
                    return Err(plan_err(format!("need 1 ≤ k ≤ {total}, got {}", self.components)));
                }
                if binomial(total as u64, self.components as u64).to_u64().is_none() {
                    return Err(plan_err("alphabet does not fit 64-bit symbol indices"));
                }
            }
        }
        Ok(())
    }

    /// Gray-level image plan: red 75→65 kHz, green 55→45 kHz and blue
    /// 35→25 kHz for levels 0→10, in 60–80 / 40–60 / 20–40 kHz sub-bands.
    pub fn table1() -> Self {
        let band = |name: &str, color: Color, low: f64, top: f64| {
            let table = (0..=10u8).map(|level| (Symbol::Gray { color, level }, top - 1e3 * level as f64)).collect();
            PlanBand::with_symbols(name, Band::new(low, low + 20e3).expect("static band"), table)
        };
        Self::new(
            "table1",
            60e3,
            1e3,
            3,
            vec![
                band("red", Color::Red, 60e3, 75e3),
                band("green", Color::Green, 40e3, 55e3),
                band("blue", Color::Blue, 20e3, 35e3),
            ],
            Mapping::PerBand,
        )
        .expect("built-in plan is valid")
    }

    /// Character plan: `A`→50 kHz … `Z`→75 kHz.
    pub fn table_s1() -> Self {
        let table = (0..26u8).map(|i| (Symbol::Char((b'A' + i) as char), 50e3 + 1e3 * i as f64)).collect();
        let band = PlanBand::with_symbols("characters", Band::new(50e3, 75e3).expect("static band"), table);
        Self::new("tableS1", 25e3, 1e3, 1, vec![band], Mapping::PerBand).expect("built-in plan is valid")
    }

    /// k-of-M plan over every `spacing` step of `band` (edges included).
    pub fn combinatorial(band: Band, spacing: f64, k: usize) -> Result<Self> {
        let count = optimal_channels(band.high() - band.low(), spacing)?;
        let channels = (0..count).map(|i| band.low() + spacing * i as f64).collect();
        Self::new(
            "combinatorial",
            band.high() - band.low(),
            spacing,
            k,
            vec![PlanBand::with_channels("all", band, channels)],
            Mapping::Combinatorial,
        )
    }

    /// The one-band, one-component plan for the named band.
    pub fn single_band(&self, name: &str) -> Result<Self> {
        let band = self
            .bands
            .iter()
            .find(|b| b.name == name)
            .ok_or_else(|| plan_err(format!("no band named `{name}`")))?;
        if self.mapping != Mapping::PerBand {
            return Err(plan_err("single-band views exist only for per-band plans"));
        }
        Self::new(format!("{}/{}", self.name, name), self.bandwidth, self.spacing, 1, vec![band.clone()], Mapping::PerBand)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Tones per window, `k`.
    pub fn components(&self) -> usize {
        self.components
    }

    pub fn bands(&self) -> &[PlanBand] {
        &self.bands
    }

    pub fn mapping(&self) -> Mapping {
        self.mapping
    }

    /// Every channel of the plan, ascending.
    pub fn channels(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.bands.iter().flat_map(|b| b.channels.iter().copied()).collect();
        all.sort_by(f64::total_cmp);
        all
    }

    /// Number of distinct codewords.
    pub fn alphabet_size(&self) -> BigUint {
        match self.mapping {
            Mapping::PerBand => self.bands.iter().fold(BigUint::one(), |acc, b| acc * b.symbols.len()),
            Mapping::Combinatorial => binomial(self.channels().len() as u64, self.components as u64),
        }
    }

    /// Channels whose frequency is not a whole multiple of `1 / window`.
    pub fn off_bin_channels(&self, window: f64) -> Vec<f64> {
        self.channels()
            .into_iter()
            .filter(|&f| {
                let cycles = f * window;
                (cycles - cycles.round()).abs() > 1e-6
            })
            .collect()
    }

    /// Lexicographic index of a k-subset (ascending frequencies).
    pub(crate) fn rank(&self, frequencies: &[f64]) -> Option<u64> {
        let channels = self.channels();
        let m = channels.len() as u64;
        let k = self.components as u64;
        if frequencies.len() as u64 != k {
            return None;
        }
        let mut positions = Vec::with_capacity(frequencies.len());
        for &f in frequencies {
            positions.push(channels.iter().position(|&c| same_frequency(c, f))? as u64);
        }
        if positions.windows(2).any(|w| w[1] <= w[0]) {
            return None;
        }
        let mut rank = BigUint::default();
        let mut start = 0u64;
        for (i, &p) in positions.iter().enumerate() {
            for j in start..p {
                rank += binomial(m - 1 - j, k - 1 - i as u64);
            }
            start = p + 1;
        }
        rank.to_u64()
    }

    pub(crate) fn unrank(&self, index: u64) -> Result<Vec<f64>> {
        let channels = self.channels();
        let m = channels.len() as u64;
        let k = self.components as u64;
        if BigUint::from(index) >= binomial(m, k) {
            return Err(Error::UnknownSymbol(Symbol::Index(index).to_string()));
        }
        let mut rest = BigUint::from(index);
        let mut out = Vec::with_capacity(k as usize);
        let mut j = 0u64;
        for i in 0..k {
            loop {
                let block = binomial(m - 1 - j, k - 1 - i);
                if rest < block {
                    break;
                }
                rest -= block;
                j += 1;
            }
            out.push(channels[j as usize]);
            j += 1;
        }
        Ok(out)
    }
}
