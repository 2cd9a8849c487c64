//! Sampled current waveforms and harmonic spectra.
//!
//! Harmonic magnitudes are always stored as RMS amperes. A harmonic of order
//! `h` with magnitude `I` and phase `phi` contributes
//! `sqrt(2) * I * sin(2 pi h f1 t + phi)` to a waveform. Phases default to
//! zero; THD, harmonic loss factor and eddy losses do not depend on them.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniformly sampled, real-valued current signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    sample_rate: f64,
    fundamental: f64,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate: f64, fundamental: f64) -> Result<Self> {
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sample rate must be positive, got {sample_rate}"
            )));
        }
        if !(fundamental.is_finite() && fundamental > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "fundamental must be positive, got {fundamental}"
            )));
        }
        if samples.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a waveform needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument(format!("sample {i} is not finite")));
        }
        Ok(Self {
            samples,
            sample_rate,
            fundamental,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn fundamental(&self) -> f64 {
        self.fundamental
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Capture length in seconds, `len / sample_rate`.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    /// Time stamp of sample `index`; the grid starts at zero.
    pub fn time(&self, index: usize) -> f64 {
        index as f64 / self.sample_rate
    }

    /// Number of samples in one fundamental period (not necessarily integral).
    pub fn samples_per_period(&self) -> f64 {
        self.sample_rate / self.fundamental
    }

    pub fn rms(&self) -> f64 {
        rms_of(&self.samples)
    }

    /// A copy holding only samples `start..`, with the time origin moved to `start`.
    pub fn skip(&self, start: usize) -> Result<Self> {
        Self::new(
            self.samples.get(start..).unwrap_or_default().to_vec(),
            self.sample_rate,
            self.fundamental,
        )
    }
}

fn rms_of(samples: &[f64]) -> f64 {
    let sum_sq: f64 = samples.iter().map(|s| s * s).sum();
    (sum_sq / samples.len() as f64).sqrt()
}

/// Root-mean-square value of a sequence of samples.
pub fn rms(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("RMS of an empty waveform".into()));
    }
    Ok(rms_of(samples))
}

/// One harmonic component: RMS magnitude and sine-referenced phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub magnitude: f64,
    pub phase: f64,
}

impl Harmonic {
    pub fn phasor(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.phase)
    }

    pub fn from_phasor(p: Complex64) -> Self {
        let magnitude = p.norm();
        let phase = if magnitude == 0.0 { 0.0 } else { wrap_phase(p.arg()) };
        Self { magnitude, phase }
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_phase(phase: f64) -> f64 {
    let mut p = phase % (2.0 * PI);
    if p <= -PI {
        p += 2.0 * PI;
    } else if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// RMS current magnitudes (and phases) at integer orders of a fundamental.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumDoc", into = "SpectrumDoc")]
pub struct HarmonicSpectrum {
    fundamental: f64,
    entries: BTreeMap<u32, Harmonic>,
}

impl HarmonicSpectrum {
    /// An empty spectrum (every order reads as zero).
    pub fn new(fundamental: f64) -> Result<Self> {
        if !(fundamental.is_finite() && fundamental > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "fundamental must be positive, got {fundamental}"
            )));
        }
        Ok(Self {
            fundamental,
            entries: BTreeMap::new(),
        })
    }

    /// Builds a spectrum from `(order, rms magnitude)` pairs with zero phases.
    pub fn from_magnitudes(fundamental: f64, magnitudes: &[(u32, f64)]) -> Result<Self> {
        let mut s = Self::new(fundamental)?;
        for &(order, magnitude) in magnitudes {
            s.insert(order, magnitude, 0.0)?;
        }
        Ok(s)
    }

    /// Sets the component at `order`, replacing any previous value.
    pub fn insert(&mut self, order: u32, magnitude: f64, phase: f64) -> Result<()> {
        if order == 0 {
            return Err(Error::InvalidArgument(
                "harmonic orders start at 1".into(),
            ));
        }
        if !(magnitude.is_finite() && magnitude >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "harmonic {order}: magnitude must be finite and non-negative, got {magnitude}"
            )));
        }
        if !phase.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "harmonic {order}: phase must be finite"
            )));
        }
        self.entries.insert(
            order,
            Harmonic {
                magnitude,
                phase: wrap_phase(phase),
            },
        );
        Ok(())
    }

    /// Phasor-adds `p` (RMS amperes) onto the component at `order`.
    pub fn add_phasor(&mut self, order: u32, p: Complex64) {
        debug_assert!(order >= 1);
        let current = self.phasor(order);
        self.entries.insert(order, Harmonic::from_phasor(current + p));
    }

    pub fn fundamental(&self) -> f64 {
        self.fundamental
    }

    pub fn get(&self, order: u32) -> Option<Harmonic> {
        self.entries.get(&order).copied()
    }

    /// RMS magnitude at `order`, zero when absent.
    pub fn magnitude(&self, order: u32) -> f64 {
        self.entries.get(&order).map_or(0.0, |h| h.magnitude)
    }

    pub fn phase(&self, order: u32) -> f64 {
        self.entries.get(&order).map_or(0.0, |h| h.phase)
    }

    pub fn phasor(&self, order: u32) -> Complex64 {
        self.entries
            .get(&order)
            .map_or(Complex64::new(0.0, 0.0), Harmonic::phasor)
    }

    /// Components in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, Harmonic)> + '_ {
        self.entries.iter().map(|(&h, &c)| (h, c))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest order present, or 0 for an empty spectrum.
    pub fn h_max(&self) -> u32 {
        self.entries.keys().next_back().copied().unwrap_or(0)
    }

    /// Square root of the summed squared magnitudes.
    pub fn total_rms(&self) -> f64 {
        self.entries
            .values()
            .map(|h| h.magnitude * h.magnitude)
            .sum::<f64>()
            .sqrt()
    }

    /// Every phasor multiplied by the real factor `k`. A negative factor
    /// reverses the phase of each component.
    pub fn scaled(&self, k: f64) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(&h, c)| (h, Harmonic::from_phasor(c.phasor() * k)))
            .collect();
        Self {
            fundamental: self.fundamental,
            entries,
        }
    }

    /// Per-order phasor sum of two spectra sharing a fundamental.
    pub fn phasor_sum(&self, other: &Self) -> Result<Self> {
        if self.fundamental != other.fundamental {
            return Err(Error::InvalidArgument(format!(
                "cannot add spectra with fundamentals {} Hz and {} Hz",
                self.fundamental, other.fundamental
            )));
        }
        let mut out = self.clone();
        for (h, c) in other.iter() {
            out.add_phasor(h, c.phasor());
        }
        Ok(out)
    }

    /// Only orders `1..=h_max`.
    pub fn truncated(&self, h_max: u32) -> Self {
        Self {
            fundamental: self.fundamental,
            entries: self.entries.range(..=h_max).map(|(&h, &c)| (h, c)).collect(),
        }
    }
}

/// Serialized form of a spectrum; orders are listed explicitly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumDoc {
    pub fundamental_hz: f64,
    pub harmonics: Vec<HarmonicDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarmonicDoc {
    pub order: u32,
    pub magnitude_a: f64,
    #[serde(default)]
    pub phase_rad: f64,
}

impl TryFrom<SpectrumDoc> for HarmonicSpectrum {
    type Error = Error;

    fn try_from(doc: SpectrumDoc) -> Result<Self> {
        let mut s = HarmonicSpectrum::new(doc.fundamental_hz)?;
        for h in doc.harmonics {
            if s.entries.contains_key(&h.order) {
                return Err(Error::InvalidArgument(format!(
                    "harmonic order {} listed twice",
                    h.order
                )));
            }
            s.insert(h.order, h.magnitude_a, h.phase_rad)?;
        }
        Ok(s)
    }
}

impl From<HarmonicSpectrum> for SpectrumDoc {
    fn from(s: HarmonicSpectrum) -> Self {
        SpectrumDoc {
            fundamental_hz: s.fundamental,
            harmonics: s
                .iter()
                .map(|(order, c)| HarmonicDoc {
                    order,
                    magnitude_a: c.magnitude,
                    phase_rad: c.phase,
                })
                .collect(),
        }
    }
}

/// Samples `sum_h sqrt(2) I_h sin(2 pi h f1 t + phi_h)` on `t = n / sample_rate`.
///
/// The sample count is `round(duration * sample_rate)`.
pub fn synthesize(spectrum: &HarmonicSpectrum, duration: f64, sample_rate: f64) -> Result<Waveform> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "duration must be positive, got {duration}"
        )));
    }
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sample rate must be positive, got {sample_rate}"
        )));
    }
    let n = (duration * sample_rate).round();
    if n < 2.0 {
        return Err(Error::InvalidArgument(format!(
            "duration {duration} s at {sample_rate} Hz yields fewer than 2 samples"
        )));
    }
    let nyquist = sample_rate / 2.0;
    let f1 = spectrum.fundamental();
    for (order, _) in spectrum.iter() {
        let f = f64::from(order) * f1;
        if f >= nyquist {
            return Err(Error::Aliasing {
                order,
                frequency_hz: f,
                nyquist_hz: nyquist,
            });
        }
    }

    let n = n as usize;
    let mut samples = vec![0.0; n];
    for (order, c) in spectrum.iter() {
        if c.magnitude == 0.0 {
            continue;
        }
        let peak = SQRT_2 * c.magnitude;
        // cycles per sample
        let step = f64::from(order) * f1 / sample_rate;
        for (i, s) in samples.iter_mut().enumerate() {
            let cycles = (i as f64 * step).fract();
            *s += peak * (2.0 * PI * cycles + c.phase).sin();
        }
    }
    Waveform::new(samples, sample_rate, f1)
}
