use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use mcfc_core::analysis::{
    capacity, g2, mandel_q_windows, modulator_transfer, CapacityParams, CapacityReport,
};
use mcfc_core::codec::image::RgbImage;
use mcfc_core::codec::{decode, encode, plan_file, symbols_to_text, text_symbols, FrequencyPlan, Symbol};
use mcfc_core::harness::{results_csv, run_image_transmission, run_sweep, run_text_transmission, Manifest, SweepSpec, TrialSettings};
use mcfc_core::photon_channel::{pts, seconds_to_ps, transmit, PhotonSequence, SourceConfig, Tone};
use mcfc_core::rng::{from_seed, substream};
use mcfc_core::spectral::{periodogram, Band};

use crate::output::{check_writable, write_atomic};
use crate::{input_path, BudgetArgs, Command, Failure, SeedArgs};

pub fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Generate(a) => generate(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Encode(a) => encode_cmd(a),
        Command::Decode(a) => decode_cmd(a),
        Command::TransmitImage(a) => transmit_image(a),
        Command::TransmitText(a) => transmit_text(a),
        Command::Sweep(a) => sweep(a),
        Command::Capacity(a) => capacity_cmd(a),
        Command::Stats(a) => stats(a),
    }
}

fn load_plan(name: &str) -> Result<FrequencyPlan, Failure> {
    match name {
        "table1" => Ok(FrequencyPlan::table1()),
        "tableS1" | "tables1" => Ok(FrequencyPlan::table_s1()),
        path => {
            let path = Path::new(path);
            if !path.is_file() {
                return Err(Failure::Usage(format!(
                    "unknown plan `{name}` (use table1, tableS1 or a plan TOML file)"
                )));
            }
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
            Ok(plan_file::from_toml(&text)?)
        }
    }
}

fn read_stream(path: &Path) -> Result<PhotonSequence, Failure> {
    input_path(path)?;
    let bytes = std::fs::read(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    pts::decode(&bytes).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Mean detected signal rate, counts/s.
    #[arg(long)]
    rate: f64,
    /// Modulation frequency in Hz; repeat for several tones.
    #[arg(long = "tone")]
    tones: Vec<f64>,
    /// Modulation depth of every tone.
    #[arg(long, default_value_t = 1.0)]
    depth: f64,
    /// Initial phase of every tone, radians.
    #[arg(long, default_value_t = 0.0)]
    phase: f64,
    /// Window length, seconds.
    #[arg(long, default_value_t = 1e-3)]
    duration: f64,
    #[command(flatten)]
    budget: BudgetArgs,
    #[command(flatten)]
    seed: SeedArgs,
    /// Output PTS1 file.
    #[arg(long, short, default_value = "photons.pts")]
    out: PathBuf,
}

fn generate(a: GenerateArgs) -> Result<(), Failure> {
    check_writable(&a.out)?;
    let tones = a.tones.iter().map(|&f| Tone::with_params(f, a.phase, a.depth)).collect::<Result<Vec<_>, _>>()?;
    let config = SourceConfig::new(a.rate, tones, a.duration)?;
    let seq = transmit(&config, &a.budget.budget()?, &mut from_seed(a.seed.seed))?;
    write_atomic(&a.out, &pts::encode(&seq))?;
    println!("{} events written to {}", seq.len(), a.out.display());
    Ok(())
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    /// Input PTS1 file.
    #[arg(long, short)]
    input: PathBuf,
    /// Lowest frequency, Hz; defaults to one grid step.
    #[arg(long)]
    low: Option<f64>,
    /// Highest frequency, Hz.
    #[arg(long, default_value_t = 100e3)]
    high: f64,
    /// Grid step, Hz; defaults to one over the stream window.
    #[arg(long)]
    resolution: Option<f64>,
    /// Peaks to report alongside the CSV.
    #[arg(long, default_value_t = 3)]
    peaks: usize,
    /// Output CSV; standard output if absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn spectrum(a: SpectrumArgs) -> Result<(), Failure> {
    if let Some(out) = &a.out {
        check_writable(out)?;
    }
    let seq = read_stream(&a.input)?;
    let resolution = a.resolution.unwrap_or(1.0 / seq.window());
    let spec = periodogram(&seq, Band::new(a.low.unwrap_or(resolution), a.high)?, resolution)?;
    match &a.out {
        Some(out) => {
            write_atomic(out, spec.to_csv().as_bytes())?;
            for i in spec.top_peaks(a.peaks) {
                println!("peak {} Hz |X| = {:.3}", spec.frequencies[i], spec.amplitudes[i].norm());
            }
        }
        None => print!("{}", spec.to_csv()),
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    /// Frequency plan: table1, tableS1 or a plan TOML file.
    #[arg(long, default_value = "table1")]
    plan: String,
    /// Symbols such as red:4, char:A or index:17 (comma separated or repeated).
    #[arg(long = "symbol", value_delimiter = ',', conflicts_with = "text")]
    symbols: Vec<String>,
    /// Text to send through a character plan.
    #[arg(long)]
    text: Option<String>,
    /// Mean detected signal rate, counts/s.
    #[arg(long, default_value_t = 80e3)]
    rate: f64,
    /// Integration time per codeword, seconds.
    #[arg(long, default_value_t = 1e-3)]
    window: f64,
    #[command(flatten)]
    budget: BudgetArgs,
    #[command(flatten)]
    seed: SeedArgs,
    /// Output PTS1 file.
    #[arg(long, short, default_value = "encoded.pts")]
    out: PathBuf,
}

fn encode_cmd(a: EncodeArgs) -> Result<(), Failure> {
    check_writable(&a.out)?;
    let plan = load_plan(&a.plan)?;
    let symbols: Vec<Symbol> = match &a.text {
        Some(t) => text_symbols(t),
        None => a.symbols.iter().map(|s| s.trim().parse()).collect::<Result<_, _>>()?,
    };
    if symbols.is_empty() {
        return Err(Failure::Usage("nothing to encode: give --symbol or --text".into()));
    }
    let budget = a.budget.budget()?;
    let mut parts = Vec::new();
    for (i, tones) in encode(&symbols, &plan)?.iter().enumerate() {
        let source = tones.to_source(a.rate, a.window)?;
        parts.push(transmit(&source, &budget, &mut substream(a.seed.seed, &[i as u64]))?);
    }
    let stream = PhotonSequence::concatenate(&parts)?;
    write_atomic(&a.out, &pts::encode(&stream))?;
    println!("{} windows, {} events written to {}", parts.len(), stream.len(), a.out.display());
    Ok(())
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    /// Input PTS1 file.
    #[arg(long, short)]
    input: PathBuf,
    /// Frequency plan: table1, tableS1 or a plan TOML file.
    #[arg(long, default_value = "table1")]
    plan: String,
    /// Integration time per codeword, seconds.
    #[arg(long, default_value_t = 1e-3)]
    window: f64,
    /// Print decoded characters as one line of text.
    #[arg(long)]
    text: bool,
}

fn decode_cmd(a: DecodeArgs) -> Result<(), Failure> {
    let plan = load_plan(&a.plan)?;
    let seq = read_stream(&a.input)?;
    if !(a.window > 0.0) {
        return Err(Failure::Usage(format!("window must be positive, got {}", a.window)));
    }
    let windows = seq.split_windows(seconds_to_ps(a.window))?;
    let mut text = String::new();
    for (i, w) in windows.iter().enumerate() {
        match decode(w, &plan) {
            Ok(symbols) => {
                if a.text {
                    text.push_str(&symbols_to_text(&symbols).unwrap_or_else(|_| "\u{FFFD}".into()));
                } else {
                    let words: Vec<String> = symbols.iter().map(|s| s.to_string()).collect();
                    println!("{i}\t{}", words.join(" "));
                }
            }
            Err(e) => {
                if a.text {
                    text.push('\u{FFFD}');
                } else {
                    println!("{i}\tfailed: {e}");
                }
            }
        }
    }
    if a.text {
        println!("{text}");
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct TransmitImageArgs {
    /// Binary PPM (P6) input image.
    #[arg(long, short)]
    input: PathBuf,
    /// Received image, binary PPM.
    #[arg(long, short)]
    out: PathBuf,
    /// Frequency plan with red, green and blue gray-level bands.
    #[arg(long, default_value = "table1")]
    plan: String,
    #[arg(long, default_value_t = 80e3)]
    rate: f64,
    #[arg(long, default_value_t = 1e-3)]
    window: f64,
    #[command(flatten)]
    budget: BudgetArgs,
    #[command(flatten)]
    seed: SeedArgs,
}

fn transmit_image(a: TransmitImageArgs) -> Result<(), Failure> {
    input_path(&a.input)?;
    check_writable(&a.out)?;
    let plan = load_plan(&a.plan)?;
    let bytes = std::fs::read(&a.input).map_err(|e| Failure::Data(format!("{}: {e}", a.input.display())))?;
    let image = RgbImage::from_p6(&bytes)?;
    let settings = TrialSettings { budget: a.budget.budget()?, seed: a.seed.seed, ..TrialSettings::new(a.rate, a.window) };
    let report = run_image_transmission(&image, &plan, &settings)?;
    write_atomic(&a.out, &report.received.to_p6())?;
    let [r, g, b] = report.symbol_errors;
    println!(
        "{} pixels, {} pixel errors ({:.4}), symbol errors red {r} green {g} blue {b}, {} undecodable",
        report.received.pixels.len(),
        report.pixel_errors,
        report.pixel_error_rate(),
        report.failures
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct TransmitTextArgs {
    /// Text to send.
    text: String,
    #[arg(long, default_value = "tableS1")]
    plan: String,
    #[arg(long, default_value_t = 80e3)]
    rate: f64,
    #[arg(long, default_value_t = 1e-3)]
    window: f64,
    #[command(flatten)]
    budget: BudgetArgs,
    #[command(flatten)]
    seed: SeedArgs,
}

fn transmit_text(a: TransmitTextArgs) -> Result<(), Failure> {
    let plan = load_plan(&a.plan)?;
    let settings = TrialSettings { budget: a.budget.budget()?, seed: a.seed.seed, ..TrialSettings::new(a.rate, a.window) };
    let report = run_text_transmission(&a.text, &plan, &settings)?;
    println!("{}", report.decoded);
    eprintln!("{} symbol errors", report.symbol_errors);
    Ok(())
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Sweep description (TOML).
    config: PathBuf,
    /// Output CSV, overriding the file's `output`.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Override the file's seed.
    #[arg(long, env = "MCFC_SEED")]
    seed: Option<u64>,
}

fn manifest_path(csv: &Path) -> PathBuf {
    let mut name = csv.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.toml");
    csv.with_file_name(name)
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    input_path(&a.config)?;
    let text = std::fs::read_to_string(&a.config).map_err(|e| Failure::Data(format!("{}: {e}", a.config.display())))?;
    let mut spec = SweepSpec::from_toml(&text)?;
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    let out = a
        .out
        .or_else(|| spec.output.clone())
        .ok_or_else(|| Failure::Usage("no output path: set `output` in the config or pass --out".into()))?;
    check_writable(&out)?;
    let results = run_sweep(&spec)?;
    write_atomic(&out, results_csv(&results).as_bytes())?;
    let manifest = manifest_path(&out);
    write_atomic(&manifest, Manifest::for_spec(&spec, results.len()).to_toml().as_bytes())?;
    println!("{} grid points written to {} (manifest {})", results.len(), out.display(), manifest.display());
    Ok(())
}

#[derive(Args, Debug)]
pub struct CapacityArgs {
    /// Modulation bandwidth, Hz.
    #[arg(long)]
    bandwidth: f64,
    /// Channel spacing, Hz.
    #[arg(long)]
    spacing: f64,
    /// Integration time, seconds.
    #[arg(long)]
    window: f64,
    /// Tones per symbol.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    /// Symbol error rate.
    #[arg(long, default_value_t = 0.0)]
    error: f64,
    /// Print a CSV header and row instead of the summary.
    #[arg(long)]
    csv: bool,
}

fn capacity_cmd(a: CapacityArgs) -> Result<(), Failure> {
    let report: CapacityReport = capacity(&CapacityParams {
        bandwidth: a.bandwidth,
        spacing: a.spacing,
        window: a.window,
        components: a.k,
        error_rate: a.error,
    })?;
    if a.csv {
        println!("{}\n{}", CapacityReport::CSV_HEADER, report.csv_row());
    } else {
        println!("m_opt          {}", report.m_opt);
        println!("m_max          {}", report.m_max);
        println!("raw            {:.2} kbps", report.raw_bps / 1e3);
        println!("effective      {:.2} kbps", report.effective_bps / 1e3);
        println!("p_e            {:e}", report.p_e);
        println!("entropy        {:e}", report.entropy_term);
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[command(subcommand)]
    kind: StatsKind,
}

#[derive(Subcommand, Debug)]
enum StatsKind {
    /// Second-order correlation of a stream.
    G2 {
        #[arg(long, short)]
        input: PathBuf,
        /// Largest lag, seconds.
        #[arg(long, default_value_t = 50e-6)]
        max_lag: f64,
        /// Lag bin width, seconds.
        #[arg(long, default_value_t = 1e-6)]
        bin: f64,
        /// Output CSV; standard output if absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Mandel Q over consecutive windows of a stream.
    Mandel {
        #[arg(long, short)]
        input: PathBuf,
        /// Counting window, seconds.
        #[arg(long)]
        window: f64,
    },
    /// Mean photon numbers at the two modulator output ports.
    Modulator {
        /// Relative phase, radians.
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
        /// Mean input photon number.
        #[arg(long)]
        mean_photons: f64,
    },
}

fn stats(a: StatsArgs) -> Result<(), Failure> {
    match a.kind {
        StatsKind::G2 { input, max_lag, bin, out } => {
            if let Some(out) = &out {
                check_writable(out)?;
            }
            let seq = read_stream(&input)?;
            let curve = g2(&seq, max_lag, bin)?;
            match out {
                Some(out) => write_atomic(&out, curve.to_csv().as_bytes())?,
                None => print!("{}", curve.to_csv()),
            }
        }
        StatsKind::Mandel { input, window } => {
            let seq = read_stream(&input)?;
            println!("{}", mandel_q_windows(&seq, window)?);
        }
        StatsKind::Modulator { theta, mean_photons } => {
            let (o1, o2) = modulator_transfer(theta, mean_photons)?;
            println!("{o1} {o2}");
        }
    }
    Ok(())
}
