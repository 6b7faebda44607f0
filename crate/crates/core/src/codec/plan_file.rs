//! Plan files: TOML with the plan parameters, its bands and, for per-band
//! plans, an explicit symbol → frequency table.
//!
//! ```toml
//! name = "tableS1"
//! bandwidth_hz = 25000.0
//! spacing_hz = 1000.0
//! components = 1
//! mapping = "per_band"
//!
//! [[bands]]
//! name = "characters"
//! low_hz = 50000.0
//! high_hz = 75000.0
//!
//! [[bands.symbols]]
//! symbol = "char:A"
//! frequency_hz = 50000.0
//! ```
//!
//! Combinatorial bands list `channels_hz` instead of `symbols`.

use serde::{Deserialize, Serialize};

use super::{FrequencyPlan, Mapping, PlanBand, Symbol};
use crate::error::{Error, Result};
use crate::spectral::Band;

#[derive(Debug, Serialize, Deserialize)]
struct PlanDoc {
    name: String,
    bandwidth_hz: f64,
    spacing_hz: f64,
    components: usize,
    mapping: Mapping,
    bands: Vec<BandDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct BandDoc {
    name: String,
    low_hz: f64,
    high_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    channels_hz: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    symbols: Option<Vec<SymbolDoc>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SymbolDoc {
    symbol: String,
    frequency_hz: f64,
}

pub fn to_toml(plan: &FrequencyPlan) -> String {
    let bands = plan
        .bands()
        .iter()
        .map(|b| {
            let (channels_hz, symbols) = match plan.mapping() {
                Mapping::Combinatorial => (Some(b.channels().to_vec()), None),
                Mapping::PerBand => (
                    None,
                    Some(
                        b.symbols()
                            .iter()
                            .zip(b.channels())
                            .map(|(s, &f)| SymbolDoc { symbol: s.to_string(), frequency_hz: f })
                            .collect(),
                    ),
                ),
            };
            BandDoc { name: b.name().to_string(), low_hz: b.band().low(), high_hz: b.band().high(), channels_hz, symbols }
        })
        .collect();
    let doc = PlanDoc {
        name: plan.name().to_string(),
        bandwidth_hz: plan.bandwidth(),
        spacing_hz: plan.spacing(),
        components: plan.components(),
        mapping: plan.mapping(),
        bands,
    };
    toml::to_string(&doc).expect("plan documents always serialize")
}

pub fn from_toml(text: &str) -> Result<FrequencyPlan> {
    let doc: PlanDoc = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let mut bands = Vec::with_capacity(doc.bands.len());
    for b in doc.bands {
        let band = Band::new(b.low_hz, b.high_hz)?;
        let plan_band = match (doc.mapping, b.channels_hz, b.symbols) {
            (Mapping::Combinatorial, Some(channels), None) => PlanBand::with_channels(b.name, band, channels),
            (Mapping::PerBand, None, Some(symbols)) => {
                let table = symbols
                    .into_iter()
                    .map(|s| Ok((s.symbol.parse::<Symbol>()?, s.frequency_hz)))
                    .collect::<Result<Vec<_>>>()?;
                PlanBand::with_symbols(b.name, band, table)
            }
            _ => {
                return Err(Error::Config(format!(
                    "band `{}`: per_band plans need `symbols`, combinatorial plans need `channels_hz`",
                    b.name
                )))
            }
        };
        bands.push(plan_band);
    }
    FrequencyPlan::new(doc.name, doc.bandwidth_hz, doc.spacing_hz, doc.components, bands, doc.mapping)
}
