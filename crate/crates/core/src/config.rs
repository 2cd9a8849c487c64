//! The JSON configuration document.
//!
//! One file can carry load signatures, the transformer, spectral settings and
//! scenario definitions. Every section is optional and falls back to the
//! built-in values; a present but empty `scenarios` list means no scenarios.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "signatures": [
//!     { "name": "vfd", "kind": "vfd", "rated_power_kw": 1.25,
//!       "harmonics": [ { "order": 3, "fraction": 0.11, "phase_rad": 3.14159 } ] }
//!   ],
//!   "transformer": {
//!     "rated_current_a": 104.17, "r_dc_ohm": 0.0276, "p_ec_r": 0.05,
//!     "no_load_loss_w": 80, "stray_loss_w": 15,
//!     "thermal": { "mass_kg": 180, "specific_heat_j_per_kg_k": 1000,
//!                  "emissivity_area_w_per_k": 6.5 }
//!   },
//!   "spectral": { "h_max": 15, "scan_halfwidth": 2, "window": "none" },
//!   "scenarios": [
//!     { "id": "1", "peak_time": "evening", "pv_signature": "pv",
//!       "houses": [ { "appliances": [ { "signature": "vfd", "count": 2 } ], "pv_units": 0 } ] }
//!   ]
//! }
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loadsim::{builtin_signatures, Appliance, House, LoadSignature};
use crate::scenario::{builtin_scenarios, PeakTime, ReferenceRow, ScenarioDef};
use crate::spectral::SpectralConfig;
use crate::xfmr::TransformerSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub signatures: Vec<LoadSignature>,
    pub transformer: TransformerSpec,
    pub spectral: SpectralConfig,
    pub scenarios: Vec<ScenarioDef>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            signatures: builtin_signatures(),
            transformer: TransformerSpec::default(),
            spectral: SpectralConfig::default(),
            scenarios: builtin_scenarios(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signatures: Option<Vec<LoadSignature>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transformer: Option<TransformerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenarios: Option<Vec<ScenarioDoc>>,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub id: String,
    pub peak_time: PeakTime,
    #[serde(default = "default_pv_name")]
    pub pv_signature: String,
    pub houses: Vec<HouseDoc>,
    /// Checked against the houses when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_net_load_kw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceRow>,
}

fn default_pv_name() -> String {
    "pv".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HouseDoc {
    #[serde(default)]
    pub appliances: Vec<ApplianceDoc>,
    #[serde(default)]
    pub pv_units: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApplianceDoc {
    pub signature: String,
    pub count: u32,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ConfigDoc = serde_json::from_str(text).map_err(|e| Error::json("configuration", e))?;
        Self::from_doc(doc)
    }

    pub fn from_doc(doc: ConfigDoc) -> Result<Self> {
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                doc.schema_version
            )));
        }
        let defaults = Config::default();
        let signatures = doc.signatures.unwrap_or(defaults.signatures);
        for (i, s) in signatures.iter().enumerate() {
            if signatures[..i].iter().any(|o| o.name == s.name) {
                return Err(Error::Config(format!("signature '{}' defined twice", s.name)));
            }
        }
        let scenarios = match doc.scenarios {
            None => defaults.scenarios,
            Some(list) => list
                .into_iter()
                .map(|d| scenario_from_doc(d, &signatures))
                .collect::<Result<_>>()?,
        };
        let spectral = doc.spectral.unwrap_or(defaults.spectral);
        spectral.validate()?;
        Ok(Self {
            signatures,
            transformer: doc.transformer.unwrap_or(defaults.transformer),
            spectral,
            scenarios,
        })
    }

    pub fn to_doc(&self) -> ConfigDoc {
        ConfigDoc {
            schema_version: SCHEMA_VERSION,
            signatures: Some(self.signatures.clone()),
            transformer: Some(self.transformer),
            spectral: Some(self.spectral),
            scenarios: Some(self.scenarios.iter().map(scenario_to_doc).collect()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("configuration serializes")
    }

    pub fn signature(&self, name: &str) -> Option<&LoadSignature> {
        self.signatures.iter().find(|s| s.name == name)
    }
}

fn scenario_from_doc(d: ScenarioDoc, signatures: &[LoadSignature]) -> Result<ScenarioDef> {
    let lookup = |name: &str| {
        signatures
            .iter()
            .find(|s| s.name == name)
            .cloned()
            .ok_or_else(|| Error::Config(format!("scenario '{}': unknown signature '{name}'", d.id)))
    };
    let pv = lookup(&d.pv_signature)?;
    let houses = d
        .houses
        .iter()
        .map(|h| {
            Ok(House {
                appliances: h
                    .appliances
                    .iter()
                    .map(|a| {
                        Ok(Appliance {
                            signature: lookup(&a.signature)?,
                            count: a.count,
                        })
                    })
                    .collect::<Result<_>>()?,
                pv_units: h.pv_units,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut s = ScenarioDef::new(d.id.clone(), d.peak_time, houses, pv);
    s.reference = d.reference;
    if let Some(expected) = d.expected_net_load_kw {
        s.expected_net_load_kw = expected;
    }
    s.validate()?;
    Ok(s)
}

fn scenario_to_doc(s: &ScenarioDef) -> ScenarioDoc {
    ScenarioDoc {
        id: s.id.clone(),
        peak_time: s.peak_time,
        pv_signature: s.pv_signature.name.clone(),
        houses: s
            .houses
            .iter()
            .map(|h| HouseDoc {
                appliances: h
                    .appliances
                    .iter()
                    .map(|a| ApplianceDoc {
                        signature: a.signature.name.clone(),
                        count: a.count,
                    })
                    .collect(),
                pv_units: h.pv_units,
            })
            .collect(),
        expected_net_load_kw: Some(s.expected_net_load_kw),
        reference: s.reference,
    }
}
