//! Serialized analysis reports and plot data.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::scenario::{ComparisonRow, PeakTime, ReferenceRow, ScenarioResult};
use crate::signal::HarmonicSpectrum;
use crate::spectral::AnalysisFrame;
use crate::xfmr::DeratingReport;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool_version: String,
    /// SHA-256 over every input that influenced the report.
    pub input_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at_unix_s: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis: Option<WaveformAnalysis>,
    #[serde(default)]
    pub scenarios: Vec<ScenarioMetrics>,
    pub plot_data: PlotData,
}

impl ReportDocument {
    pub fn new(input_digest: String) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            input_digest,
            generated_at_unix_s: None,
            analysis: None,
            scenarios: Vec::new(),
            plot_data: PlotData::default(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub thd: f64,
    pub f_hl: f64,
    pub eddy_loss_w: f64,
    pub eddy_loss_pu: f64,
    pub total_loss_w: f64,
    pub theta_final_k: f64,
    pub derating: f64,
    pub loading_pu: f64,
}

impl From<&DeratingReport> for Metrics {
    fn from(r: &DeratingReport) -> Self {
        Metrics {
            thd: r.thd,
            f_hl: r.f_hl,
            eddy_loss_w: r.eddy_loss.watts,
            eddy_loss_pu: r.eddy_loss.per_unit,
            total_loss_w: r.total_loss_w,
            theta_final_k: r.theta_final_k,
            derating: r.derating,
            loading_pu: r.loading_pu,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicRow {
    pub order: u32,
    pub magnitude_a: f64,
    pub pct_of_fundamental: f64,
    pub phase_rad: f64,
}

pub fn harmonic_rows(s: &HarmonicSpectrum) -> Vec<HarmonicRow> {
    let i1 = s.magnitude(1);
    s.iter()
        .map(|(order, c)| HarmonicRow {
            order,
            magnitude_a: c.magnitude,
            pct_of_fundamental: if i1 > 0.0 { 100.0 * c.magnitude / i1 } else { 0.0 },
            phase_rad: c.phase,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveformAnalysis {
    pub source: String,
    pub samples: usize,
    pub sample_rate_hz: f64,
    pub fundamental_hz: f64,
    pub frame: AnalysisFrame,
    pub harmonics: Vec<HarmonicRow>,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioMetrics {
    pub id: String,
    pub pv_units: u32,
    pub peak_time: PeakTime,
    pub net_load_kw: f64,
    pub expected_net_load_kw: f64,
    pub metrics: Metrics,
    pub harmonics: Vec<HarmonicRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceRow>,
}

impl From<&ScenarioResult> for ScenarioMetrics {
    fn from(r: &ScenarioResult) -> Self {
        ScenarioMetrics {
            id: r.id.clone(),
            pv_units: r.pv_units,
            peak_time: r.peak_time,
            net_load_kw: r.net_load_kw,
            expected_net_load_kw: r.expected_net_load_kw,
            metrics: Metrics::from(&r.report),
            harmonics: harmonic_rows(&r.spectrum),
            reference: r.reference,
        }
    }
}

/// Bar-chart data: one spectrum per scenario plus THD / eddy-loss pairs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PlotData {
    pub spectra: Vec<SpectrumBars>,
    pub thd_eddy: Vec<ThdEddyBar>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumBars {
    pub id: String,
    pub orders: Vec<u32>,
    pub magnitudes_a: Vec<f64>,
    /// Magnitudes over the fundamental.
    pub normalized: Vec<f64>,
}

impl SpectrumBars {
    pub fn from_spectrum(id: &str, s: &HarmonicSpectrum) -> Self {
        let i1 = s.magnitude(1);
        let (orders, magnitudes_a): (Vec<u32>, Vec<f64>) = s.iter().map(|(h, c)| (h, c.magnitude)).unzip();
        let normalized = magnitudes_a
            .iter()
            .map(|m| if i1 > 0.0 { m / i1 } else { 0.0 })
            .collect();
        Self {
            id: id.to_string(),
            orders,
            magnitudes_a,
            normalized,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("order,magnitude_a,normalized\n");
        for ((h, m), n) in self.orders.iter().zip(&self.magnitudes_a).zip(&self.normalized) {
            out.push_str(&format!("{h},{m},{n}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThdEddyBar {
    pub id: String,
    pub thd_pct: f64,
    pub tr_ec_pct: f64,
}

impl From<&ComparisonRow> for ThdEddyBar {
    fn from(r: &ComparisonRow) -> Self {
        ThdEddyBar {
            id: r.id.clone(),
            thd_pct: r.thd_pct,
            tr_ec_pct: r.tr_ec_pct,
        }
    }
}

pub fn thd_eddy_csv(bars: &[ThdEddyBar]) -> String {
    let mut out = String::from("id,thd_pct,tr_ec_pct\n");
    for b in bars {
        out.push_str(&format!("{},{},{}\n", b.id, b.thd_pct, b.tr_ec_pct));
    }
    out
}

/// Accumulates named inputs into a SHA-256 digest. Each part is framed by
/// its label and length so that moving bytes between parts changes the hash.
#[derive(Default)]
pub struct InputDigest(Sha256);

impl InputDigest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, label: &str, bytes: &[u8]) -> &mut Self {
        self.0.update((label.len() as u64).to_le_bytes());
        self.0.update(label.as_bytes());
        self.0.update((bytes.len() as u64).to_le_bytes());
        self.0.update(bytes);
        self
    }

    pub fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}
