//! Transformer loss, heating and derating under harmonic load current.
//!
//! The winding resistance seen by harmonic `h` is modelled as
//! `R_h = R_dc (1 + h^2 P_ec_r)`, giving the eddy-current loss
//!
//! ```text
//! Tr_EC = I_1^2 R_dc + sum_h I_h^2 h^2 P_ec_r R_dc
//! ```
//!
//! The harmonic loss factor is `F_HL = sum I_h^2 h^2 / sum I_h^2` and the
//! derated capacity is the per-unit RMS current that holds winding loss at
//! its rated sinusoidal value, `sqrt((1 + P_ec_r) / (1 + F_HL P_ec_r))`.
//! Temperature rise follows a single-time-constant Newton cooling model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::HarmonicSpectrum;

/// Upper bound accepted for the rated eddy-loss factor.
pub const MAX_PEC_R: f64 = 0.15;
pub const DEFAULT_PEC_R: f64 = 0.05;

/// Lumped thermal parameters of the winding/core assembly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ThermalDoc", into = "ThermalDoc")]
pub struct ThermalSpec {
    mass: f64,
    specific_heat: f64,
    emissivity_area: f64,
    time_constant: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ThermalDoc {
    pub mass_kg: f64,
    pub specific_heat_j_per_kg_k: f64,
    /// Product of emissivity factor and surface area, W/K.
    pub emissivity_area_w_per_k: f64,
    /// Measured time constant; derived from the other fields when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_constant_s: Option<f64>,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")))
    }
}

impl ThermalSpec {
    /// Time constant derived as `m c / (alpha A)`.
    pub fn new(mass: f64, specific_heat: f64, emissivity_area: f64) -> Result<Self> {
        positive("mass", mass)?;
        positive("specific heat", specific_heat)?;
        positive("emissivity-area product", emissivity_area)?;
        Ok(Self {
            mass,
            specific_heat,
            emissivity_area,
            time_constant: mass * specific_heat / emissivity_area,
        })
    }

    /// Overrides the derived time constant with a measured one. A mismatch of
    /// more than 1% against `m c / (alpha A)` is logged, not rejected.
    pub fn with_time_constant(mut self, tau: f64) -> Result<Self> {
        positive("time constant", tau)?;
        let derived = self.mass * self.specific_heat / self.emissivity_area;
        if ((tau - derived) / derived).abs() > 0.01 {
            log::warn!(
                "thermal time constant {tau} s differs from m*c/(alpha*A) = {derived} s by more than 1%"
            );
        }
        self.time_constant = tau;
        Ok(self)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn specific_heat(&self) -> f64 {
        self.specific_heat
    }

    pub fn emissivity_area(&self) -> f64 {
        self.emissivity_area
    }

    pub fn time_constant(&self) -> f64 {
        self.time_constant
    }

    /// Steady-state rise `P / (alpha A)`.
    pub fn theta_final(&self, power: f64) -> f64 {
        power / self.emissivity_area
    }
}

impl TryFrom<ThermalDoc> for ThermalSpec {
    type Error = Error;

    fn try_from(d: ThermalDoc) -> Result<Self> {
        let t = ThermalSpec::new(d.mass_kg, d.specific_heat_j_per_kg_k, d.emissivity_area_w_per_k)?;
        match d.time_constant_s {
            Some(tau) => t.with_time_constant(tau),
            None => Ok(t),
        }
    }
}

impl From<ThermalSpec> for ThermalDoc {
    fn from(t: ThermalSpec) -> Self {
        ThermalDoc {
            mass_kg: t.mass,
            specific_heat_j_per_kg_k: t.specific_heat,
            emissivity_area_w_per_k: t.emissivity_area,
            time_constant_s: Some(t.time_constant),
        }
    }
}

/// Ratings and loss parameters of a service transformer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TransformerDoc", into = "TransformerDoc")]
pub struct TransformerSpec {
    pub rated_current: f64,
    pub r_dc: f64,
    pub p_ec_r: f64,
    pub no_load_loss: f64,
    pub stray_loss: f64,
    pub thermal: ThermalSpec,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TransformerDoc {
    pub rated_current_a: f64,
    pub r_dc_ohm: f64,
    #[serde(default = "default_pec_r")]
    pub p_ec_r: f64,
    pub no_load_loss_w: f64,
    #[serde(default)]
    pub stray_loss_w: f64,
    pub thermal: ThermalSpec,
}

fn default_pec_r() -> f64 {
    DEFAULT_PEC_R
}

impl TransformerSpec {
    pub fn validate(&self) -> Result<()> {
        positive("rated current", self.rated_current)?;
        let nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} must be non-negative, got {v}")))
            }
        };
        nonneg("R_dc", self.r_dc)?;
        nonneg("no-load loss", self.no_load_loss)?;
        nonneg("stray loss", self.stray_loss)?;
        if !(0.0..=MAX_PEC_R).contains(&self.p_ec_r) {
            return Err(Error::InvalidArgument(format!(
                "P_EC-R must lie in [0, {MAX_PEC_R}], got {}",
                self.p_ec_r
            )));
        }
        Ok(())
    }

    pub fn with_pec_r(mut self, p_ec_r: f64) -> Result<Self> {
        self.p_ec_r = p_ec_r;
        self.validate()?;
        Ok(self)
    }
}

impl Default for TransformerSpec {
    /// A 25 kVA, 7.2 kV / 240 V pole-mounted service transformer.
    fn default() -> Self {
        Self {
            rated_current: 25_000.0 / 240.0,
            r_dc: 0.0276,
            p_ec_r: DEFAULT_PEC_R,
            no_load_loss: 80.0,
            stray_loss: 15.0,
            thermal: ThermalSpec::new(180.0, 1_000.0, 6.5).expect("valid defaults"),
        }
    }
}

impl TryFrom<TransformerDoc> for TransformerSpec {
    type Error = Error;

    fn try_from(d: TransformerDoc) -> Result<Self> {
        let t = TransformerSpec {
            rated_current: d.rated_current_a,
            r_dc: d.r_dc_ohm,
            p_ec_r: d.p_ec_r,
            no_load_loss: d.no_load_loss_w,
            stray_loss: d.stray_loss_w,
            thermal: d.thermal,
        };
        t.validate()?;
        Ok(t)
    }
}

impl From<TransformerSpec> for TransformerDoc {
    fn from(t: TransformerSpec) -> Self {
        TransformerDoc {
            rated_current_a: t.rated_current,
            r_dc_ohm: t.r_dc,
            p_ec_r: t.p_ec_r,
            no_load_loss_w: t.no_load_loss,
            stray_loss_w: t.stray_loss,
            thermal: t.thermal,
        }
    }
}

/// Total harmonic distortion of current, as a fraction of the fundamental.
pub fn thd(s: &HarmonicSpectrum) -> Result<f64> {
    let i1 = s.magnitude(1);
    if i1 <= 0.0 {
        return Err(Error::Undefined(
            "THD needs a non-zero fundamental".into(),
        ));
    }
    let distortion: f64 = s
        .iter()
        .filter(|&(h, _)| h >= 2)
        .fold(0.0, |acc, (_, c)| acc + c.magnitude * c.magnitude);
    Ok(distortion.sqrt() / i1)
}

/// Harmonic loss factor `sum I_h^2 h^2 / sum I_h^2`.
pub fn f_hl(s: &HarmonicSpectrum) -> Result<f64> {
    let (weighted, total) = weighted_sums(s);
    if total == 0.0 {
        return Err(Error::Undefined(
            "harmonic loss factor of an all-zero spectrum".into(),
        ));
    }
    Ok(weighted / total)
}

fn weighted_sums(s: &HarmonicSpectrum) -> (f64, f64) {
    s.iter().fold((0.0, 0.0), |(w, t), (h, c)| {
        let sq = c.magnitude * c.magnitude;
        let h = f64::from(h);
        (w + sq * h * h, t + sq)
    })
}

/// Eddy-current loss in watts and per unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EddyLoss {
    pub watts: f64,
    /// `P_ec_r * F_HL`: equals `P_ec_r` for a pure fundamental, zero for an
    /// empty spectrum.
    pub per_unit: f64,
}

pub fn eddy_loss(s: &HarmonicSpectrum, t: &TransformerSpec) -> EddyLoss {
    let i1 = s.magnitude(1);
    let (weighted, total) = weighted_sums(s);
    let watts = i1 * i1 * t.r_dc + weighted * t.p_ec_r * t.r_dc;
    let per_unit = if total == 0.0 { 0.0 } else { t.p_ec_r * (weighted / total) };
    EddyLoss { watts, per_unit }
}

/// Maximum per-unit RMS loading for a given harmonic loss factor.
pub fn derating(f_hl: f64, t: &TransformerSpec) -> Result<f64> {
    if !(f_hl >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "harmonic loss factor must be at least 1, got {f_hl}"
        )));
    }
    if t.p_ec_r < 0.0 {
        return Err(Error::InvalidArgument("P_EC-R must be non-negative".into()));
    }
    Ok(((1.0 + t.p_ec_r) / (1.0 + f_hl * t.p_ec_r)).sqrt())
}

/// No-load loss plus eddy-current loss plus structural stray loss, in watts.
pub fn total_loss(s: &HarmonicSpectrum, t: &TransformerSpec) -> f64 {
    t.no_load_loss + eddy_loss(s, t).watts + t.stray_loss
}

/// Temperature rise `theta_final (1 - exp(-t / tau))` after `t` seconds of
/// constant dissipation. Pass `f64::INFINITY` for the steady state.
pub fn theta_rise(power: f64, th: &ThermalSpec, t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidArgument(format!("time must be non-negative, got {t}")));
    }
    if power.is_nan() || power < 0.0 {
        return Err(Error::InvalidArgument(format!("power must be non-negative, got {power}")));
    }
    let final_rise = th.theta_final(power);
    if t.is_infinite() {
        return Ok(final_rise);
    }
    Ok(final_rise * -(-t / th.time_constant()).exp_m1())
}

/// Degradation metrics of one transformer under one load spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeratingReport {
    pub thd: f64,
    pub eddy_loss: EddyLoss,
    pub f_hl: f64,
    pub total_loss_w: f64,
    pub theta_final_k: f64,
    /// Permissible fraction of rated capacity, in (0, 1].
    pub derating: f64,
    /// RMS current over rated current.
    pub loading_pu: f64,
}

impl DeratingReport {
    pub fn compute(s: &HarmonicSpectrum, t: &TransformerSpec) -> Result<Self> {
        t.validate()?;
        let thd = thd(s)?;
        let f_hl = f_hl(s)?;
        let total_loss_w = total_loss(s, t);
        Ok(Self {
            thd,
            eddy_loss: eddy_loss(s, t),
            f_hl,
            total_loss_w,
            theta_final_k: theta_rise(total_loss_w, &t.thermal, f64::INFINITY)?,
            derating: derating(f_hl, t)?,
            loading_pu: s.total_rms() / t.rated_current,
        })
    }
}
