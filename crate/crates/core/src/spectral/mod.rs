//! Harmonic extraction from sampled current.
//!
//! For each order `h` the analyzer looks at the DFT bin nearest `h * f1`
//! and scans a few neighbouring bins on either side, reporting the largest
//! magnitude found. The scan recovers most of a tone's energy when the
//! capture does not hold a whole number of cycles and the peak has drifted
//! off the nominal bin.

mod fft;

pub use fft::{dft, dft_direct, fft, Radix2Plan};

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{wrap_phase, HarmonicSpectrum, Waveform};

/// Tolerance, in samples, for deciding that a span holds whole periods.
const PERIOD_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    None,
    Hann,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectralConfig {
    /// Highest harmonic order reported.
    pub h_max: u32,
    /// Bins searched on each side of the nominal harmonic bin.
    pub scan_halfwidth: usize,
    pub window: Window,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            h_max: 15,
            scan_halfwidth: 2,
            window: Window::None,
        }
    }
}

impl SpectralConfig {
    pub fn validate(&self) -> Result<()> {
        if self.h_max == 0 {
            return Err(Error::InvalidArgument("h_max must be at least 1".into()));
        }
        Ok(())
    }
}

/// How the analysis frame was cut from the capture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    /// Largest power-of-two prefix spanning whole fundamental periods.
    PowerOfTwo,
    /// Largest prefix spanning whole fundamental periods.
    IntegerPeriods,
    /// No whole-period prefix exists; the full record is used.
    FullRecord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisFrame {
    pub len: usize,
    pub kind: FrameKind,
}

fn spans_whole_periods(len: usize, samples_per_period: f64) -> bool {
    let periods = len as f64 / samples_per_period;
    let whole = periods.round();
    whole >= 1.0 && (whole * samples_per_period - len as f64).abs() <= PERIOD_TOLERANCE
}

/// Chooses the analysis frame for a capture.
///
/// A power-of-two prefix covering whole periods wins when one exists. Failing
/// that, the longest whole-period prefix is used, and failing that the full
/// record. Frames are never zero-padded.
pub fn prepare(w: &Waveform) -> Result<AnalysisFrame> {
    let n = w.len();
    let spp = w.samples_per_period();
    if (n as f64) < spp - PERIOD_TOLERANCE {
        return Err(Error::InsufficientResolution(format!(
            "{n} samples cover less than one {} Hz period ({spp:.3} samples)",
            w.fundamental()
        )));
    }

    let mut pow2 = if n.is_power_of_two() { n } else { n.next_power_of_two() / 2 };
    while pow2 >= 2 {
        if spans_whole_periods(pow2, spp) {
            return Ok(AnalysisFrame {
                len: pow2,
                kind: FrameKind::PowerOfTwo,
            });
        }
        pow2 /= 2;
    }

    let max_periods = ((n as f64 + PERIOD_TOLERANCE) / spp).floor() as usize;
    for m in (1..=max_periods).rev() {
        let len = (m as f64 * spp).round();
        if len <= n as f64 && spans_whole_periods(len as usize, spp) {
            return Ok(AnalysisFrame {
                len: len as usize,
                kind: FrameKind::IntegerPeriods,
            });
        }
    }

    Ok(AnalysisFrame {
        len: n,
        kind: FrameKind::FullRecord,
    })
}

fn hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / len as f64).cos()))
        .collect()
}

/// Extracts RMS magnitudes and sine-referenced phases for orders `1..=h_max`.
pub fn analyze(w: &Waveform, cfg: &SpectralConfig) -> Result<HarmonicSpectrum> {
    cfg.validate()?;
    let f1 = w.fundamental();
    let nyquist = w.sample_rate() / 2.0;
    let top = f64::from(cfg.h_max) * f1;
    if top >= nyquist {
        return Err(Error::Aliasing {
            order: cfg.h_max,
            frequency_hz: top,
            nyquist_hz: nyquist,
        });
    }

    let frame = prepare(w)?;
    let n = frame.len;
    let mut buf = w.samples()[..n].to_vec();
    let gain = match cfg.window {
        Window::None => 1.0,
        Window::Hann => {
            let win = hann(n);
            buf.iter_mut().zip(&win).for_each(|(x, c)| *x *= c);
            win.iter().sum::<f64>() / n as f64
        }
    };
    let bins = dft(&buf)?;

    let bins_per_order = f1 * n as f64 / w.sample_rate();
    // never let the scan reach the neighbouring harmonic's half of the spectrum
    let reach = ((bins_per_order - 1.0) / 2.0).floor().max(0.0) as usize;
    let halfwidth = cfg.scan_halfwidth.min(reach);
    let last_bin = n / 2;

    let mut out = HarmonicSpectrum::new(f1)?;
    for h in 1..=cfg.h_max {
        let target = ((f64::from(h) * bins_per_order).round() as usize).clamp(1, last_bin);
        let lo = target.saturating_sub(halfwidth).max(1);
        let hi = (target + halfwidth).min(last_bin);
        let mut best = target;
        for k in lo..=hi {
            if bins[k].norm() > bins[best].norm() {
                best = k;
            }
        }
        let (magnitude, phase) = bin_to_rms(bins[best], best, n, gain);
        out.insert(h, magnitude, phase)?;
    }
    Ok(out)
}

fn bin_to_rms(x: Complex64, k: usize, n: usize, gain: f64) -> (f64, f64) {
    let magnitude = if 2 * k == n {
        x.norm() / n as f64 / gain
    } else {
        x.norm() * SQRT_2 / n as f64 / gain
    };
    // X[k] of sqrt(2) I sin(wt + phi) is proportional to exp(j (phi - pi/2))
    (magnitude, wrap_phase(x.arg() + FRAC_PI_2))
}
