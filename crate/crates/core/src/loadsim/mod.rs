//! Household load mixes and their current at the service transformer.
//!
//! Appliances are described by harmonic templates normalised to 1 kW at
//! 240 V. Loads draw their fundamental in phase with the supply; PV
//! inverters inject it in antiphase, so adding PV cancels load fundamental
//! while leaving any harmonic order the inverter does not emit untouched.

mod rectifier;

pub use rectifier::{simulate_rectifier, RectifierOutput, RectifierParams, SolverDiagnostics};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::HarmonicSpectrum;
use crate::xfmr;

/// Secondary voltage the templates are normalised to.
pub const NOMINAL_VOLTAGE: f64 = 240.0;
/// Fundamental RMS amperes drawn per kW at [`NOMINAL_VOLTAGE`].
pub const AMPS_PER_KW: f64 = 1000.0 / NOMINAL_VOLTAGE;
pub const LINE_FREQUENCY: f64 = 60.0;
/// Inverter current distortion limit.
pub const PV_THD_LIMIT: f64 = 0.05;

/// Converter topology behind a signature; selects the checks run on load.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadKind {
    /// Diode rectifier with buck stage (desktops, entertainment).
    Rectifier,
    /// Diode rectifier with flyback stage (laptop chargers).
    Flyback,
    /// Variable-frequency drive and induction motor.
    Vfd,
    /// Boost converter and grid-tie inverter, a generator.
    Pv,
    /// Sinusoidal load.
    Linear,
}

impl LoadKind {
    pub fn is_generator(self) -> bool {
        matches!(self, LoadKind::Pv)
    }
}

/// Harmonic template of one appliance type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SignatureDoc", into = "SignatureDoc")]
pub struct LoadSignature {
    pub name: String,
    pub kind: LoadKind,
    pub rated_power_kw: f64,
    spectrum_per_kw: HarmonicSpectrum,
}

/// On-disk form of a signature. `fraction` is relative to the fundamental;
/// phases are absolute, sine-referenced, in radians.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignatureDoc {
    pub name: String,
    pub kind: LoadKind,
    pub rated_power_kw: f64,
    #[serde(default = "default_amps_per_kw")]
    pub fundamental_a_per_kw: f64,
    #[serde(default)]
    pub harmonics: Vec<FractionDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FractionDoc {
    pub order: u32,
    pub fraction: f64,
    #[serde(default)]
    pub phase_rad: f64,
}

fn default_amps_per_kw() -> f64 {
    AMPS_PER_KW
}

impl LoadSignature {
    /// Builds a template from `(order, fraction of fundamental, phase)` triples
    /// for orders 2 and up, then checks it.
    pub fn new(
        name: impl Into<String>,
        kind: LoadKind,
        rated_power_kw: f64,
        fundamental_a_per_kw: f64,
        harmonics: &[(u32, f64, f64)],
    ) -> Result<Self> {
        let name = name.into();
        let bad = |msg: String| Error::Config(format!("signature '{name}': {msg}"));
        if !(rated_power_kw.is_finite() && rated_power_kw >= 0.0) {
            return Err(bad(format!("rated power must be non-negative, got {rated_power_kw}")));
        }
        if !(fundamental_a_per_kw.is_finite() && fundamental_a_per_kw > 0.0) {
            return Err(bad(format!(
                "fundamental current per kW must be positive, got {fundamental_a_per_kw}"
            )));
        }
        let mut spectrum = HarmonicSpectrum::new(LINE_FREQUENCY)?;
        let fundamental_phase = if kind.is_generator() { PI } else { 0.0 };
        spectrum.insert(1, fundamental_a_per_kw, fundamental_phase)?;
        for &(order, fraction, phase) in harmonics {
            if order < 2 {
                return Err(bad(format!("harmonic order {order} must be at least 2")));
            }
            if spectrum.get(order).is_some() {
                return Err(bad(format!("harmonic order {order} listed twice")));
            }
            if !(fraction.is_finite() && fraction >= 0.0) {
                return Err(bad(format!("order {order}: fraction must be finite and non-negative")));
            }
            spectrum
                .insert(order, fraction * fundamental_a_per_kw, phase)
                .map_err(|e| bad(e.to_string()))?;
        }
        let sig = Self {
            name,
            kind,
            rated_power_kw,
            spectrum_per_kw: spectrum,
        };
        sig.check_kind()?;
        Ok(sig)
    }

    fn check_kind(&self) -> Result<()> {
        let s = &self.spectrum_per_kw;
        match self.kind {
            LoadKind::Vfd => {
                let (h3, h5, h7) = (s.magnitude(3), s.magnitude(5), s.magnitude(7));
                if !(h3 > h5 && h5 > h7) {
                    return Err(Error::Config(format!(
                        "signature '{}': a VFD template needs h3 > h5 > h7, got {h3} / {h5} / {h7}",
                        self.name
                    )));
                }
            }
            LoadKind::Pv => {
                let thd = self.thd();
                if thd >= PV_THD_LIMIT {
                    return Err(Error::Config(format!(
                        "signature '{}': PV current THD {:.4} exceeds the {PV_THD_LIMIT} limit",
                        self.name, thd
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Current spectrum for 1 kW of this appliance.
    pub fn spectrum_per_kw(&self) -> &HarmonicSpectrum {
        &self.spectrum_per_kw
    }

    /// Current spectrum at `kw` of real power.
    pub fn at_power(&self, kw: f64) -> HarmonicSpectrum {
        self.spectrum_per_kw.scaled(kw)
    }

    /// Current spectrum at the rated power.
    pub fn rated_spectrum(&self) -> HarmonicSpectrum {
        self.at_power(self.rated_power_kw)
    }

    pub fn thd(&self) -> f64 {
        xfmr::thd(&self.spectrum_per_kw).expect("signatures carry a positive fundamental")
    }
}

impl TryFrom<SignatureDoc> for LoadSignature {
    type Error = Error;

    fn try_from(d: SignatureDoc) -> Result<Self> {
        let harmonics: Vec<_> = d
            .harmonics
            .iter()
            .map(|h| (h.order, h.fraction, h.phase_rad))
            .collect();
        LoadSignature::new(d.name, d.kind, d.rated_power_kw, d.fundamental_a_per_kw, &harmonics)
    }
}

impl From<LoadSignature> for SignatureDoc {
    fn from(s: LoadSignature) -> Self {
        let fundamental = s.spectrum_per_kw.magnitude(1);
        SignatureDoc {
            harmonics: s
                .spectrum_per_kw
                .iter()
                .filter(|&(h, _)| h >= 2)
                .map(|(order, c)| FractionDoc {
                    order,
                    fraction: c.magnitude / fundamental,
                    phase_rad: c.phase,
                })
                .collect(),
            name: s.name,
            kind: s.kind,
            rated_power_kw: s.rated_power_kw,
            fundamental_a_per_kw: fundamental,
        }
    }
}

// Capacitor-input rectifiers draw a peaked current: odd harmonics alternate
// between antiphase (3, 7, 11) and in-phase (5, 9, 13) with the fundamental.
const ODD_PEAKED: [f64; 7] = [0.0, PI, 0.0, PI, 0.0, PI, 0.0];

fn peaked(fractions: &[(u32, f64)]) -> Vec<(u32, f64, f64)> {
    fractions
        .iter()
        .map(|&(h, f)| (h, f, ODD_PEAKED[(h as usize / 2) % ODD_PEAKED.len()]))
        .collect()
}

/// Default appliance templates.
///
/// The fractions are representative placeholders, not measurements: they
/// satisfy the qualitative constraints (VFD third harmonic dominant, PV below
/// 5% THD) and can be replaced through a signature file.
pub fn builtin_signatures() -> Vec<LoadSignature> {
    vec![
        LoadSignature::new(
            "desktop",
            LoadKind::Rectifier,
            0.4,
            AMPS_PER_KW,
            &peaked(&[(3, 0.42), (5, 0.22), (7, 0.09), (9, 0.045), (11, 0.03), (13, 0.02)]),
        )
        .expect("valid builtin"),
        LoadSignature::new(
            "laptop",
            LoadKind::Flyback,
            0.1,
            AMPS_PER_KW,
            &peaked(&[(3, 0.48), (5, 0.26), (7, 0.11), (9, 0.06), (11, 0.035), (13, 0.02)]),
        )
        .expect("valid builtin"),
        LoadSignature::new(
            "vfd",
            LoadKind::Vfd,
            1.25,
            AMPS_PER_KW,
            &peaked(&[(3, 0.11), (5, 0.045), (7, 0.025), (9, 0.012)]),
        )
        .expect("valid builtin"),
        LoadSignature::new(
            "pv",
            LoadKind::Pv,
            3.5,
            AMPS_PER_KW,
            &[(5, 0.012, 0.4), (7, 0.009, 1.1), (11, 0.006, 2.0), (13, 0.004, 2.7)],
        )
        .expect("valid builtin"),
    ]
}

/// Looks a built-in signature up by name.
pub fn builtin_signature(name: &str) -> Option<LoadSignature> {
    builtin_signatures().into_iter().find(|s| s.name == name)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Appliance {
    pub signature: LoadSignature,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct House {
    pub appliances: Vec<Appliance>,
    pub pv_units: u32,
}

impl House {
    pub fn new(appliances: Vec<(LoadSignature, u32)>, pv_units: u32) -> Self {
        Self {
            appliances: appliances
                .into_iter()
                .map(|(signature, count)| Appliance { signature, count })
                .collect(),
            pv_units,
        }
    }

    /// Rated consumption of all appliances, kW.
    pub fn load_kw(&self) -> f64 {
        self.appliances
            .iter()
            .fold(0.0, |kw, a| kw + a.signature.rated_power_kw * f64::from(a.count))
    }
}

/// Phasor sum of every appliance and PV unit across `houses`.
///
/// Houses are visited in order, appliances within a house in order, then the
/// house's PV units; the result is bit-reproducible for a fixed ordering.
/// Each PV unit contributes `pv.at_power(pv_output_per_unit)`.
pub fn aggregate(houses: &[House], pv: &LoadSignature, pv_output_per_unit: f64) -> Result<HarmonicSpectrum> {
    if !(pv_output_per_unit.is_finite() && pv_output_per_unit >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "PV output per unit must be non-negative, got {pv_output_per_unit}"
        )));
    }
    let mut total = HarmonicSpectrum::new(pv.spectrum_per_kw.fundamental())?;
    for house in houses {
        for a in &house.appliances {
            let kw = a.signature.rated_power_kw * f64::from(a.count);
            for (h, c) in a.signature.spectrum_per_kw.iter() {
                total.add_phasor(h, c.phasor() * kw);
            }
        }
        if house.pv_units > 0 {
            let kw = pv_output_per_unit * f64::from(house.pv_units);
            for (h, c) in pv.spectrum_per_kw.iter() {
                total.add_phasor(h, c.phasor() * kw);
            }
        }
    }
    Ok(total)
}

/// Signed real power implied by the fundamental phasor of a current spectrum,
/// in kW at [`NOMINAL_VOLTAGE`]. Negative values mean reverse power flow.
pub fn net_load_kw(s: &HarmonicSpectrum) -> f64 {
    s.phasor(1).re / AMPS_PER_KW
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sig(name: &str) -> LoadSignature {
        builtin_signature(name).unwrap()
    }

    #[test]
    fn builtin_constraints_hold() {
        let pv = sig("pv");
        assert!(pv.thd() < PV_THD_LIMIT);
        assert_relative_eq!(pv.at_power(3.5).magnitude(1), 3.5 * AMPS_PER_KW, max_relative = 1e-15);
        let vfd = sig("vfd");
        let s = vfd.spectrum_per_kw();
        assert!(s.magnitude(3) > s.magnitude(5));
        assert!(s.magnitude(5) > s.magnitude(7));
    }

    #[test]
    fn pv_fundamental_is_reversed() {
        assert_relative_eq!(net_load_kw(&sig("pv").at_power(3.5)), -3.5, max_relative = 1e-12);
    }

    #[test]
    fn zero_power_gives_zero_spectrum() {
        for s in builtin_signatures() {
            let z = s.at_power(0.0);
            assert!(z.iter().all(|(_, c)| c.magnitude == 0.0), "{}", s.name);
        }
    }

    #[test]
    fn no_houses_gives_zero_spectrum() {
        let s = aggregate(&[], &sig("pv"), 3.5).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn evening_mix_matches_net_load() {
        let house = House::new(vec![(sig("vfd"), 6), (sig("desktop"), 4), (sig("laptop"), 4)], 0);
        assert_relative_eq!(house.load_kw(), 9.5, max_relative = 1e-12);
        let s = aggregate(&[house], &sig("pv"), 1.5).unwrap();
        assert_relative_eq!(s.magnitude(1), 9.5 * AMPS_PER_KW, max_relative = 1e-12);
        assert_relative_eq!(net_load_kw(&s), 9.5, max_relative = 1e-12);
    }

    #[test]
    fn vfd_template_rejects_wrong_ordering() {
        let err = LoadSignature::new("bad", LoadKind::Vfd, 1.0, AMPS_PER_KW, &[(3, 0.05), (5, 0.1)].map(|(h, f)| (h, f, 0.0)));
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn pv_template_rejects_high_thd() {
        let err = LoadSignature::new("bad", LoadKind::Pv, 3.5, AMPS_PER_KW, &[(3, 0.06, 0.0)]);
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn signature_json_round_trip() {
        for s in builtin_signatures() {
            let json = serde_json::to_string(&s).unwrap();
            let back: LoadSignature = serde_json::from_str(&json).unwrap();
            assert_eq!(back.name, s.name);
            for (h, c) in s.spectrum_per_kw().iter() {
                assert_relative_eq!(back.spectrum_per_kw().magnitude(h), c.magnitude, max_relative = 1e-14);
                assert_relative_eq!(back.spectrum_per_kw().phase(h), c.phase, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn signature_json_validation() {
        let json = r#"{"name":"x","kind":"pv","rated_power_kw":3,"harmonics":[{"order":3,"fraction":0.2}]}"#;
        assert!(serde_json::from_str::<LoadSignature>(json).is_err());
        let json = r#"{"name":"x","kind":"rectifier","rated_power_kw":3,"harmonics":[{"order":1,"fraction":0.2}]}"#;
        assert!(serde_json::from_str::<LoadSignature>(json).is_err());
        let json = r#"{"name":"x","kind":"rectifier","rated_power_kw":-3}"#;
        assert!(serde_json::from_str::<LoadSignature>(json).is_err());
    }
}
