//! PV-penetration scenarios on one service transformer.
//!
//! Each scenario aggregates the household spectra, synthesizes the secondary
//! current at 20 kHz, re-extracts the harmonics from the samples and computes
//! the transformer degradation metrics from that measured spectrum.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loadsim::{self, builtin_signature, House, LoadSignature};
use crate::signal::{synthesize, HarmonicSpectrum};
use crate::spectral::{analyze, SpectralConfig};
use crate::xfmr::{DeratingReport, TransformerSpec};

pub const SAMPLE_RATE: f64 = 20_000.0;
/// 30 periods of 60 Hz, 10 000 samples.
pub const CAPTURE_SECONDS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeakTime {
    Evening,
    Day,
}

impl PeakTime {
    /// Output of one PV unit at this peak, kW.
    pub fn pv_kw_per_unit(self) -> f64 {
        match self {
            PeakTime::Evening => 1.5,
            PeakTime::Day => 3.5,
        }
    }
}

/// Reference figures for a scenario, carried along for side-by-side display.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub thd_pct: f64,
    pub tr_ec_pct: f64,
    pub derating_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDef {
    pub id: String,
    pub pv_units: u32,
    pub peak_time: PeakTime,
    pub pv_kw_per_unit: f64,
    pub houses: Vec<House>,
    pub pv_signature: LoadSignature,
    pub expected_net_load_kw: f64,
    pub reference: Option<ReferenceRow>,
}

impl ScenarioDef {
    /// Builds a scenario, deriving PV output and net load from the houses.
    pub fn new(
        id: impl Into<String>,
        peak_time: PeakTime,
        houses: Vec<House>,
        pv_signature: LoadSignature,
    ) -> Self {
        let pv_units = houses.iter().map(|h| h.pv_units).sum();
        let pv_kw_per_unit = peak_time.pv_kw_per_unit();
        let load = houses.iter().map(House::load_kw).fold(0.0, |a, b| a + b);
        Self {
            id: id.into(),
            pv_units,
            peak_time,
            pv_kw_per_unit,
            houses,
            pv_signature,
            expected_net_load_kw: load - f64::from(pv_units) * pv_kw_per_unit,
            reference: None,
        }
    }

    pub fn with_reference(mut self, r: ReferenceRow) -> Self {
        self.reference = Some(r);
        self
    }

    pub fn total_load_kw(&self) -> f64 {
        self.houses.iter().map(House::load_kw).fold(0.0, |a, b| a + b)
    }

    pub fn total_pv_kw(&self) -> f64 {
        f64::from(self.pv_units) * self.pv_kw_per_unit
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Error::Config(format!("scenario '{}': {msg}", self.id));
        let units: u32 = self.houses.iter().map(|h| h.pv_units).sum();
        if units != self.pv_units {
            return Err(bad(format!(
                "{} PV units declared but houses hold {units}",
                self.pv_units
            )));
        }
        if (self.pv_kw_per_unit - self.peak_time.pv_kw_per_unit()).abs() > 1e-12 {
            return Err(bad(format!(
                "PV output {} kW/unit does not match a {:?} peak",
                self.pv_kw_per_unit, self.peak_time
            )));
        }
        let net = self.total_load_kw() - self.total_pv_kw();
        if (net - self.expected_net_load_kw).abs() > 1e-9 * (1.0 + net.abs()) {
            return Err(bad(format!(
                "expected net load {} kW but the houses give {net} kW",
                self.expected_net_load_kw
            )));
        }
        Ok(())
    }

    pub fn aggregate(&self) -> Result<HarmonicSpectrum> {
        loadsim::aggregate(&self.houses, &self.pv_signature, self.pv_kw_per_unit)
    }
}

fn house(items: &[(&LoadSignature, u32)], pv_units: u32) -> House {
    House::new(items.iter().map(|&(s, n)| (s.clone(), n)).collect(), pv_units)
}

/// Five scenarios of rising PV penetration: three evening peaks sharing a
/// 9.5 kW appliance mix, and two daytime peaks with 2.5 kW of load.
///
/// Per-house appliance counts are approximate; only the totals are fixed.
pub fn builtin_scenarios() -> Vec<ScenarioDef> {
    let vfd = builtin_signature("vfd").expect("builtin");
    let desktop = builtin_signature("desktop").expect("builtin");
    let laptop = builtin_signature("laptop").expect("builtin");
    let pv = builtin_signature("pv").expect("builtin");

    let evening = |pv_in: [u32; 5]| {
        vec![
            house(&[(&vfd, 2), (&desktop, 1), (&laptop, 1)], pv_in[0]),
            house(&[(&vfd, 1), (&desktop, 1), (&laptop, 1)], pv_in[1]),
            house(&[(&vfd, 1), (&desktop, 1), (&laptop, 2)], pv_in[2]),
            house(&[(&vfd, 1), (&desktop, 1)], pv_in[3]),
            house(&[(&vfd, 1)], pv_in[4]),
        ]
    };
    let day = |pv_in: [u32; 5]| {
        vec![
            house(&[(&vfd, 1)], pv_in[0]),
            house(&[], pv_in[1]),
            house(&[(&vfd, 1)], pv_in[2]),
            house(&[], pv_in[3]),
            house(&[], pv_in[4]),
        ]
    };
    let reference = |thd_pct, tr_ec_pct, derating_pct| ReferenceRow {
        thd_pct,
        tr_ec_pct,
        derating_pct,
    };

    vec![
        ScenarioDef::new("1", PeakTime::Evening, evening([0, 0, 0, 0, 0]), pv.clone())
            .with_reference(reference(18.30, 6.89, 85.59)),
        ScenarioDef::new("2", PeakTime::Evening, evening([1, 0, 0, 0, 0]), pv.clone())
            .with_reference(reference(26.51, 8.66, 78.59)),
        ScenarioDef::new("3", PeakTime::Evening, evening([1, 1, 0, 0, 0]), pv.clone())
            .with_reference(reference(29.05, 9.41, 75.88)),
        ScenarioDef::new("4", PeakTime::Day, day([1, 1, 1, 0, 0]), pv.clone())
            .with_reference(reference(5.55, 5.22, 98.01)),
        ScenarioDef::new("5", PeakTime::Day, day([1, 1, 1, 1, 0]), pv)
            .with_reference(reference(3.52, 5.11, 98.95)),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub id: String,
    /// Spectrum re-extracted from the synthesized secondary current.
    pub spectrum: HarmonicSpectrum,
    /// Phasor sum of the household templates, before synthesis.
    pub aggregate: HarmonicSpectrum,
    pub report: DeratingReport,
    /// Signed real power from the measured fundamental.
    pub net_load_kw: f64,
    pub expected_net_load_kw: f64,
    pub pv_units: u32,
    pub peak_time: PeakTime,
    pub reference: Option<ReferenceRow>,
}

impl ScenarioResult {
    /// Magnitude of order `h` relative to the fundamental.
    pub fn normalized(&self, h: u32) -> f64 {
        self.spectrum.magnitude(h) / self.spectrum.magnitude(1)
    }
}

/// Runs one scenario through aggregate, synthesize, analyze and derate.
pub fn run(s: &ScenarioDef, t: &TransformerSpec, cfg: &SpectralConfig) -> Result<ScenarioResult> {
    s.validate()?;
    let aggregate = s.aggregate()?;
    let waveform = synthesize(&aggregate, CAPTURE_SECONDS, SAMPLE_RATE)?;
    let spectrum = analyze(&waveform, cfg)?;
    let report = DeratingReport::compute(&spectrum, t)?;
    Ok(ScenarioResult {
        id: s.id.clone(),
        net_load_kw: loadsim::net_load_kw(&spectrum),
        spectrum,
        aggregate,
        report,
        expected_net_load_kw: s.expected_net_load_kw,
        pv_units: s.pv_units,
        peak_time: s.peak_time,
        reference: s.reference,
    })
}

/// Runs scenarios concurrently; results keep the input order.
pub fn run_scenarios(
    scenarios: &[ScenarioDef],
    t: &TransformerSpec,
    cfg: &SpectralConfig,
) -> Result<Vec<ScenarioResult>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|s| scope.spawn(move || run(s, t, cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario worker panicked"))
            .collect()
    })
}

/// One line of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub id: String,
    pub pv_units: u32,
    pub peak_time: PeakTime,
    pub net_load_kw: f64,
    pub thd_pct: f64,
    pub tr_ec_pct: f64,
    pub derating_pct: f64,
    pub f_hl: f64,
    pub h1_a: f64,
    pub h3_a: f64,
    pub h5_a: f64,
    pub h3_pct: f64,
    pub h5_pct: f64,
    pub reference: Option<ReferenceRow>,
}

impl From<&ScenarioResult> for ComparisonRow {
    fn from(r: &ScenarioResult) -> Self {
        ComparisonRow {
            id: r.id.clone(),
            pv_units: r.pv_units,
            peak_time: r.peak_time,
            net_load_kw: r.net_load_kw,
            thd_pct: 100.0 * r.report.thd,
            tr_ec_pct: 100.0 * r.report.eddy_loss.per_unit,
            derating_pct: 100.0 * r.report.derating,
            f_hl: r.report.f_hl,
            h1_a: r.spectrum.magnitude(1),
            h3_a: r.spectrum.magnitude(3),
            h5_a: r.spectrum.magnitude(5),
            h3_pct: 100.0 * r.normalized(3),
            h5_pct: 100.0 * r.normalized(5),
            reference: r.reference,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub results: Vec<ScenarioResult>,
    pub table: Vec<ComparisonRow>,
}

/// Runs the five built-in scenarios.
pub fn run_all(t: &TransformerSpec, cfg: &SpectralConfig) -> Result<RunSummary> {
    summarize(&builtin_scenarios(), t, cfg)
}

pub fn summarize(scenarios: &[ScenarioDef], t: &TransformerSpec, cfg: &SpectralConfig) -> Result<RunSummary> {
    let results = run_scenarios(scenarios, t, cfg)?;
    let table = results.iter().map(ComparisonRow::from).collect();
    Ok(RunSummary { results, table })
}

/// Formats `x` with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..=6).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Plain-text comparison table, with reference figures where available.
pub fn render_table(rows: &[ComparisonRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<8} {:>3} {:>8} {:>10} {:>10} {:>10} {:>12} {:>10} {:>10} {:>10}   reference THD/TrEC/derating %",
        "scenario", "pv", "peak", "net_kW", "THD_%", "TrEC_%", "derating_%", "F_HL", "h3_%", "h5_%"
    );
    for r in rows {
        let reference = r.reference.map_or_else(
            || "-".to_string(),
            |p| format!("{} / {} / {}", p.thd_pct, p.tr_ec_pct, p.derating_pct),
        );
        let _ = writeln!(
            out,
            "{:<8} {:>3} {:>8} {:>10} {:>10} {:>10} {:>12} {:>10} {:>10} {:>10}   {}",
            r.id,
            r.pv_units,
            format!("{:?}", r.peak_time).to_lowercase(),
            sig6(r.net_load_kw),
            sig6(r.thd_pct),
            sig6(r.tr_ec_pct),
            sig6(r.derating_pct),
            sig6(r.f_hl),
            sig6(r.h3_pct),
            sig6(r.h5_pct),
            reference
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn builtin_table() {
        let s = builtin_scenarios();
        assert_eq!(s.len(), 5);
        let nets: Vec<f64> = s.iter().map(|d| d.expected_net_load_kw).collect();
        for (got, want) in nets.iter().zip([9.5, 8.0, 6.5, -8.0, -11.5]) {
            assert_relative_eq!(*got, want, epsilon = 1e-12);
        }
        let units: Vec<u32> = s.iter().map(|d| d.pv_units).collect();
        assert_eq!(units, [0, 1, 2, 3, 4]);
        assert_relative_eq!(s[3].total_pv_kw(), 10.5);
        assert_relative_eq!(s[3].total_load_kw(), 2.5);
        for d in &s {
            d.validate().unwrap();
        }
    }

    #[test]
    fn inconsistent_definition_is_rejected() {
        let mut s = builtin_scenarios().remove(1);
        s.pv_units = 3;
        assert!(matches!(s.validate(), Err(Error::Config(_))));
        let mut s = builtin_scenarios().remove(1);
        s.pv_kw_per_unit = 3.5;
        assert!(s.validate().is_err());
    }

    #[test]
    fn linear_scenario_has_no_distortion() {
        let lin = LoadSignature::new("heater", loadsim::LoadKind::Linear, 4.0, loadsim::AMPS_PER_KW, &[]).unwrap();
        let s = ScenarioDef::new(
            "lin",
            PeakTime::Evening,
            vec![House::new(vec![(lin, 2)], 0)],
            builtin_signature("pv").unwrap(),
        );
        let r = run(&s, &TransformerSpec::default(), &SpectralConfig::default()).unwrap();
        assert!(r.report.thd < 1e-9);
        assert!((r.report.f_hl - 1.0).abs() < 1e-12);
        assert!((r.report.derating - 1.0).abs() < 1e-12);
    }

    #[test]
    fn net_load_sign_follows_definition() {
        let summary = run_all(&TransformerSpec::default(), &SpectralConfig::default()).unwrap();
        for r in &summary.results {
            assert_relative_eq!(r.net_load_kw, r.expected_net_load_kw, max_relative = 1e-9);
        }
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(sig6(18.2975), "18.2975");
        assert_eq!(sig6(0.000123456789), "0.000123457");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(-8.0), "-8.00000");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1.024236e-16), "1.02424e-16");
    }

    #[test]
    fn table_has_one_line_per_row() {
        let summary = run_all(&TransformerSpec::default(), &SpectralConfig::default()).unwrap();
        let text = render_table(&summary.table);
        assert_eq!(text.lines().count(), 6);
    }
}
