//! Command implementations behind the `harmderate` binary.
//!
//! Each command writes its human-readable output to the supplied writer and
//! returns the structured result, so the commands can be driven from tests
//! or other programs without spawning a process.
//!
//! Settings resolve in the order: command-line flags, then the `--config`
//! file, then built-in defaults.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::csvio;
use crate::error::{Error, Result};
use crate::loadsim::{simulate_rectifier, RectifierParams, SolverDiagnostics};
use crate::report::{
    harmonic_rows, thd_eddy_csv, InputDigest, Metrics, ReportDocument, ScenarioMetrics, SpectrumBars,
    ThdEddyBar, WaveformAnalysis,
};
use crate::scenario::{render_table, sig6, summarize};
use crate::signal::{synthesize, HarmonicSpectrum, SpectrumDoc};
use crate::spectral::{analyze, prepare, SpectralConfig};
use crate::xfmr::{self, DeratingReport};

/// Flags shared by every command.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub h_max: Option<u32>,
    pub pec_r: Option<f64>,
    /// Embed the generation time in reports.
    pub timestamp: bool,
}

struct Loaded {
    config: Config,
    digest: InputDigest,
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

fn out_err(e: std::io::Error) -> Error {
    Error::io("writing output", e)
}

fn load(opts: &Options) -> Result<Loaded> {
    let mut digest = InputDigest::new();
    let mut config = match &opts.config {
        Some(path) => {
            let bytes = read_file(path)?;
            digest.add("config", &bytes);
            let text = std::str::from_utf8(&bytes)
                .map_err(|_| Error::Config(format!("{} is not UTF-8", path.display())))?;
            Config::from_json(text)?
        }
        None => {
            let c = Config::default();
            digest.add("config", c.to_json().as_bytes());
            c
        }
    };
    if let Some(h_max) = opts.h_max {
        config.spectral.h_max = h_max;
        config.spectral.validate()?;
    }
    if let Some(p) = opts.pec_r {
        config.transformer = config.transformer.with_pec_r(p)?;
    }
    digest.add(
        "overrides",
        format!("h_max={:?};pec_r={:?}", opts.h_max, opts.pec_r).as_bytes(),
    );
    Ok(Loaded { config, digest })
}

fn new_report(digest: InputDigest, opts: &Options) -> ReportDocument {
    let mut doc = ReportDocument::new(digest.finish());
    if opts.timestamp {
        doc.generated_at_unix_s = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
    }
    doc
}

fn print_metrics(out: &mut dyn Write, r: &DeratingReport) -> std::io::Result<()> {
    writeln!(out, "THD            {} %", sig6(100.0 * r.thd))?;
    writeln!(out, "F_HL           {}", sig6(r.f_hl))?;
    writeln!(out, "eddy loss      {} W ({} % per unit)", sig6(r.eddy_loss.watts), sig6(100.0 * r.eddy_loss.per_unit))?;
    writeln!(out, "total loss     {} W", sig6(r.total_loss_w))?;
    writeln!(out, "steady rise    {} K", sig6(r.theta_final_k))?;
    writeln!(out, "loading        {} pu", sig6(r.loading_pu))?;
    writeln!(out, "derating       {} %", sig6(100.0 * r.derating))
}

/// Analyzes a waveform CSV and reports harmonics and transformer metrics.
pub fn cmd_analyze(csv_path: &Path, fundamental: f64, opts: &Options, out: &mut dyn Write) -> Result<ReportDocument> {
    let Loaded { config, mut digest } = load(opts)?;
    let bytes = read_file(csv_path)?;
    digest.add("waveform", &bytes);
    digest.add("fundamental", &fundamental.to_le_bytes());
    let waveform = csvio::read_waveform(bytes.as_slice(), fundamental)?;

    let spectrum = analyze(&waveform, &config.spectral)?;
    let frame = prepare(&waveform)?;
    let report = DeratingReport::compute(&spectrum, &config.transformer)?;

    writeln!(
        out,
        "{}: {} samples at {} Hz, {} Hz fundamental, frame {} samples ({:?})",
        csv_path.display(),
        waveform.len(),
        sig6(waveform.sample_rate()),
        sig6(fundamental),
        frame.len,
        frame.kind
    )
    .map_err(out_err)?;
    writeln!(out, "{:>3} {:>14} {:>14}", "h", "current_A_rms", "pct_of_I1").map_err(out_err)?;
    let rows = harmonic_rows(&spectrum);
    for r in &rows {
        writeln!(out, "{:>3} {:>14} {:>14}", r.order, sig6(r.magnitude_a), sig6(r.pct_of_fundamental))
            .map_err(out_err)?;
    }
    print_metrics(out, &report).map_err(out_err)?;

    let mut doc = new_report(digest, opts);
    let source = csv_path
        .file_stem()
        .map_or_else(|| "waveform".to_string(), |s| s.to_string_lossy().into_owned());
    doc.plot_data.spectra.push(SpectrumBars::from_spectrum(&source, &spectrum));
    doc.plot_data.thd_eddy.push(ThdEddyBar {
        id: source.clone(),
        thd_pct: 100.0 * report.thd,
        tr_ec_pct: 100.0 * report.eddy_loss.per_unit,
    });
    doc.analysis = Some(WaveformAnalysis {
        source,
        samples: waveform.len(),
        sample_rate_hz: waveform.sample_rate(),
        fundamental_hz: fundamental,
        frame,
        harmonics: rows,
        metrics: Metrics::from(&report),
    });
    if let Some(path) = &opts.out {
        write_file(path, doc.to_json().as_bytes())?;
    }
    Ok(doc)
}

fn ensure_writable_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    let probe = dir.join(".harmderate-write-probe");
    write_file(&probe, b"")?;
    fs::remove_file(&probe).map_err(|e| Error::io(format!("cleaning {}", probe.display()), e))
}

/// Runs every configured scenario and prints the comparison table.
///
/// With `--out <dir>` it also writes `report.json`, `thd_eddy.csv` and one
/// `spectrum_<id>.csv` per scenario.
pub fn cmd_scenarios(opts: &Options, out: &mut dyn Write) -> Result<ReportDocument> {
    if let Some(dir) = &opts.out {
        ensure_writable_dir(dir)?;
    }
    let Loaded { config, digest } = load(opts)?;
    if config.scenarios.is_empty() {
        log::warn!("configuration defines no scenarios");
    }
    let summary = summarize(&config.scenarios, &config.transformer, &config.spectral)?;
    write!(out, "{}", render_table(&summary.table)).map_err(out_err)?;

    let mut doc = new_report(digest, opts);
    doc.scenarios = summary.results.iter().map(ScenarioMetrics::from).collect();
    doc.plot_data.spectra = summary
        .results
        .iter()
        .map(|r| SpectrumBars::from_spectrum(&r.id, &r.spectrum))
        .collect();
    doc.plot_data.thd_eddy = summary.table.iter().map(ThdEddyBar::from).collect();

    if let Some(dir) = &opts.out {
        write_file(&dir.join("report.json"), doc.to_json().as_bytes())?;
        write_file(&dir.join("thd_eddy.csv"), thd_eddy_csv(&doc.plot_data.thd_eddy).as_bytes())?;
        for bars in &doc.plot_data.spectra {
            let name = format!("spectrum_{}.csv", sanitize(&bars.id));
            write_file(&dir.join(name), bars.to_csv().as_bytes())?;
        }
    }
    Ok(doc)
}

fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Input of `synth`: a spectrum plus capture settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthDoc {
    #[serde(flatten)]
    pub spectrum: SpectrumDoc,
    #[serde(default = "default_synth_duration")]
    pub duration_s: f64,
    #[serde(default = "default_synth_rate")]
    pub sample_rate_hz: f64,
}

fn default_synth_duration() -> f64 {
    1.0
}

fn default_synth_rate() -> f64 {
    20_000.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSummary {
    pub samples: usize,
    pub sample_rate_hz: f64,
    pub rms_a: f64,
}

/// Writes the waveform of a spectrum JSON document as CSV. `duration`
/// overrides the document's `duration_s`.
pub fn cmd_synth(
    spec_path: &Path,
    out_csv: &Path,
    duration: Option<f64>,
    out: &mut dyn Write,
) -> Result<SynthSummary> {
    let bytes = read_file(spec_path)?;
    let doc: SynthDoc = serde_json::from_slice(&bytes).map_err(|e| Error::json(spec_path.display().to_string(), e))?;
    let duration = duration.unwrap_or(doc.duration_s);
    if !(duration > 0.0) {
        return Err(Error::InvalidArgument(format!("duration must be positive, got {duration}")));
    }
    let spectrum = HarmonicSpectrum::try_from(doc.spectrum)?;
    let waveform = synthesize(&spectrum, duration, doc.sample_rate_hz)?;
    let file = fs::File::create(out_csv).map_err(|e| Error::io(format!("creating {}", out_csv.display()), e))?;
    csvio::write_waveform(&waveform, file)?;
    let summary = SynthSummary {
        samples: waveform.len(),
        sample_rate_hz: waveform.sample_rate(),
        rms_a: waveform.rms(),
    };
    writeln!(
        out,
        "wrote {} samples at {} Hz ({} A rms) to {}",
        summary.samples,
        sig6(summary.sample_rate_hz),
        sig6(summary.rms_a),
        out_csv.display()
    )
    .map_err(out_err)?;
    Ok(summary)
}

/// Sidecar written next to a rectifier CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectifierSidecar {
    pub params: RectifierParams,
    pub diagnostics: SolverDiagnostics,
    pub thd: f64,
    pub harmonics: Vec<crate::report::HarmonicRow>,
}

pub fn sidecar_path(out_csv: &Path) -> PathBuf {
    let mut name = out_csv.as_os_str().to_owned();
    name.push(".diagnostics.json");
    PathBuf::from(name)
}

/// Simulates the rectifier described by a params JSON file and writes the
/// line current as CSV plus a `<csv>.diagnostics.json` sidecar.
pub fn cmd_rectifier(params_path: &Path, out_csv: &Path, opts: &Options, out: &mut dyn Write) -> Result<RectifierSidecar> {
    let bytes = read_file(params_path)?;
    let params: RectifierParams =
        serde_json::from_slice(&bytes).map_err(|e| Error::json(params_path.display().to_string(), e))?;
    let result = simulate_rectifier(&params)?;
    let file = fs::File::create(out_csv).map_err(|e| Error::io(format!("creating {}", out_csv.display()), e))?;
    csvio::write_waveform(&result.waveform, file)?;

    let spectral = SpectralConfig {
        h_max: opts.h_max.unwrap_or(SpectralConfig::default().h_max),
        ..Default::default()
    };
    let spectrum = analyze(&result.waveform, &spectral)?;
    let sidecar = RectifierSidecar {
        params,
        diagnostics: result.diagnostics,
        thd: xfmr::thd(&spectrum)?,
        harmonics: harmonic_rows(&spectrum),
    };
    let side = sidecar_path(out_csv);
    write_file(&side, serde_json::to_string_pretty(&sidecar).expect("serializes").as_bytes())?;
    writeln!(
        out,
        "wrote {} samples to {} (THD {} %, {} steps, {} bridge transitions, {} samples discarded); diagnostics in {}",
        result.waveform.len(),
        out_csv.display(),
        sig6(100.0 * sidecar.thd),
        sidecar.diagnostics.steps,
        sidecar.diagnostics.bridge_transitions,
        sidecar.diagnostics.discarded_samples,
        side.display()
    )
    .map_err(out_err)?;
    Ok(sidecar)
}

/// Writes the effective configuration (built-ins merged with any `--config`
/// file and flags) to `--out`, or to `out` when no path is given.
pub fn cmd_export_defaults(opts: &Options, out: &mut dyn Write) -> Result<String> {
    let Loaded { config, .. } = load(opts)?;
    let json = config.to_json();
    match &opts.out {
        Some(path) => write_file(path, json.as_bytes())?,
        None => writeln!(out, "{json}").map_err(out_err)?,
    }
    Ok(json)
}

/// Example input documents, one per file format.
pub fn example_documents() -> Vec<(&'static str, String)> {
    let spectrum = SynthDoc {
        spectrum: HarmonicSpectrum::from_magnitudes(60.0, &[(1, 1.0), (3, 0.3), (5, 0.4)])
            .expect("valid")
            .into(),
        duration_s: 1.0,
        sample_rate_hz: 20_000.0,
    };
    vec![
        ("config.json", Config::default().to_json()),
        ("spectrum.json", serde_json::to_string_pretty(&spectrum).expect("serializes")),
        (
            "rectifier.json",
            serde_json::to_string_pretty(&RectifierParams::default()).expect("serializes"),
        ),
    ]
}

/// Writes [`example_documents`] into `dir`.
pub fn seed_docs(dir: &Path, out: &mut dyn Write) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    let mut written = Vec::new();
    for (name, body) in example_documents() {
        let path = dir.join(name);
        write_file(&path, body.as_bytes())?;
        writeln!(out, "wrote {}", path.display()).map_err(out_err)?;
        written.push(path);
    }
    Ok(written)
}
