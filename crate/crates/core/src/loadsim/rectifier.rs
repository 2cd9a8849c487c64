//! Time-domain model of a capacitor-input full-wave rectifier.
//!
//! A stiff sinusoidal source feeds a series R-L branch into an ideal diode
//! bridge, which charges a DC-link capacitor shunted by a load resistor.
//! Inductor and capacitor are replaced by their trapezoidal companion models
//! and the bridge state (off, forward, reverse) is found by fixed-point
//! iteration each step.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Waveform;

const MAX_DIODE_ITERATIONS: usize = 20;
const DIVERGENCE_LIMIT_A: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RectifierParams {
    pub source_rms_voltage: f64,
    pub frequency_hz: f64,
    pub source_resistance: f64,
    pub source_inductance: f64,
    /// Zero models a purely resistive DC side.
    pub dc_capacitance: f64,
    pub dc_load_resistance: f64,
    pub timestep: f64,
    pub duration: f64,
    /// Fundamental periods dropped from the start of the record.
    pub discard_periods: u32,
}

impl Default for RectifierParams {
    fn default() -> Self {
        Self {
            source_rms_voltage: 240.0,
            frequency_hz: 60.0,
            source_resistance: 0.2,
            source_inductance: 0.5e-3,
            dc_capacitance: 470e-6,
            dc_load_resistance: 60.0,
            timestep: 50e-6,
            duration: 1.0,
            discard_periods: 5,
        }
    }
}

impl RectifierParams {
    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, v: f64, allow_zero: bool| {
            let ok = v.is_finite() && (v > 0.0 || (allow_zero && v == 0.0));
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{name} must be {}, got {v}",
                    if allow_zero { "non-negative" } else { "positive" }
                )))
            }
        };
        check("source_rms_voltage", self.source_rms_voltage, false)?;
        check("frequency_hz", self.frequency_hz, false)?;
        check("source_resistance", self.source_resistance, true)?;
        check("source_inductance", self.source_inductance, false)?;
        check("dc_capacitance", self.dc_capacitance, true)?;
        check("dc_load_resistance", self.dc_load_resistance, false)?;
        check("timestep", self.timestep, false)?;
        check("duration", self.duration, false)?;
        let max_step = 1.0 / (20.0 * self.frequency_hz);
        if self.timestep > max_step {
            return Err(Error::InvalidArgument(format!(
                "timestep {} s exceeds 1/(20 f) = {max_step} s",
                self.timestep
            )));
        }
        let kept = self.duration - f64::from(self.discard_periods) / self.frequency_hz;
        if kept * self.frequency_hz < 1.0 - 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "duration {} s leaves less than one period after discarding {} periods",
                self.duration, self.discard_periods
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bridge {
    Off,
    Forward,
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    pub steps: usize,
    pub total_iterations: usize,
    pub max_iterations_per_step: usize,
    pub bridge_transitions: usize,
    pub discarded_periods: u32,
    pub discarded_samples: usize,
    /// Most negative DC-side current seen; ideal diodes keep this at zero.
    pub min_dc_current: f64,
    pub peak_dc_voltage: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RectifierOutput {
    /// Line current after the start-up discard, sampled every timestep.
    pub waveform: Waveform,
    /// DC-side current over the same samples.
    pub dc_current: Vec<f64>,
    pub diagnostics: SolverDiagnostics,
}

struct Companion {
    g_l: f64,
    g_c: f64,
    g_load: f64,
    r_s: f64,
}

struct State {
    i_l: f64,
    v_l: f64,
    v_c: f64,
    i_c: f64,
}

struct Solution {
    i_l: f64,
    v_l: f64,
    v_c: f64,
}

impl Companion {
    fn solve(&self, mode: Bridge, v_s: f64, prev: &State) -> Solution {
        // inductor: i = g_l v_l + ih; capacitor: i_c = g_c v_c - jc
        let ih = prev.i_l + self.g_l * prev.v_l;
        let jc = self.g_c * prev.v_c + prev.i_c;
        let g = self.g_c + self.g_load;
        let s = match mode {
            Bridge::Off => {
                let v_c = if g > 0.0 { jc / g } else { 0.0 };
                return Solution { i_l: 0.0, v_l: 0.0, v_c };
            }
            Bridge::Forward => 1.0,
            Bridge::Reverse => -1.0,
        };
        let a = 1.0 + self.g_l * self.r_s;
        let v_c = (s * (self.g_l * v_s + ih) / a + jc) / (g + self.g_l / a);
        let i_l = (self.g_l * (v_s - s * v_c) + ih) / a;
        let v_l = v_s - self.r_s * i_l - s * v_c;
        Solution { i_l, v_l, v_c }
    }
}

/// Integrates the rectifier and returns its steady-state line current.
pub fn simulate_rectifier(p: &RectifierParams) -> Result<RectifierOutput> {
    p.validate()?;
    let dt = p.timestep;
    let steps = (p.duration / dt).round() as usize;
    let discard = ((f64::from(p.discard_periods) / p.frequency_hz) / dt).round() as usize;
    let omega = 2.0 * PI * p.frequency_hz;
    let v_peak = SQRT_2 * p.source_rms_voltage;
    let v_tol = 1e-12 * v_peak;

    let net = Companion {
        g_l: dt / (2.0 * p.source_inductance),
        g_c: 2.0 * p.dc_capacitance / dt,
        g_load: 1.0 / p.dc_load_resistance,
        r_s: p.source_resistance,
    };
    let mut state = State { i_l: 0.0, v_l: 0.0, v_c: 0.0, i_c: 0.0 };
    let mut mode = Bridge::Off;

    let mut line = Vec::with_capacity(steps.saturating_sub(discard));
    let mut dc = Vec::with_capacity(steps.saturating_sub(discard));
    let mut diag = SolverDiagnostics {
        steps,
        total_iterations: 0,
        max_iterations_per_step: 0,
        bridge_transitions: 0,
        discarded_periods: p.discard_periods,
        discarded_samples: discard,
        min_dc_current: 0.0,
        peak_dc_voltage: 0.0,
    };

    for n in 1..=steps {
        let t = n as f64 * dt;
        // reduce the phase before taking the sine
        let v_s = v_peak * (omega * t % (2.0 * PI)).sin();
        let start_mode = mode;
        let mut iterations = 0;
        let sol = loop {
            iterations += 1;
            if iterations > MAX_DIODE_ITERATIONS {
                return Err(Error::NonConvergent {
                    time_s: t,
                    timestep_s: dt,
                    iterations: MAX_DIODE_ITERATIONS,
                });
            }
            let sol = net.solve(mode, v_s, &state);
            let next = match mode {
                Bridge::Forward if sol.i_l < 0.0 => Bridge::Off,
                Bridge::Reverse if sol.i_l > 0.0 => Bridge::Off,
                Bridge::Off if v_s - sol.v_c > v_tol => Bridge::Forward,
                Bridge::Off if -v_s - sol.v_c > v_tol => Bridge::Reverse,
                m => m,
            };
            if next == mode {
                break sol;
            }
            mode = next;
        };
        diag.total_iterations += iterations;
        diag.max_iterations_per_step = diag.max_iterations_per_step.max(iterations);
        if mode != start_mode {
            diag.bridge_transitions += 1;
        }
        if !sol.i_l.is_finite() || sol.i_l.abs() > DIVERGENCE_LIMIT_A {
            return Err(Error::Diverged { time_s: t, current_a: sol.i_l });
        }

        let i_c = net.g_c * (sol.v_c - state.v_c) - state.i_c;
        state = State { i_l: sol.i_l, v_l: sol.v_l, v_c: sol.v_c, i_c };

        let i_dc = match mode {
            Bridge::Forward => sol.i_l,
            Bridge::Reverse => -sol.i_l,
            Bridge::Off => 0.0,
        };
        diag.min_dc_current = diag.min_dc_current.min(i_dc);
        diag.peak_dc_voltage = diag.peak_dc_voltage.max(sol.v_c);
        if n > discard {
            line.push(sol.i_l);
            dc.push(i_dc);
        }
    }

    Ok(RectifierOutput {
        waveform: Waveform::new(line, 1.0 / dt, p.frequency_hz)?,
        dc_current: dc,
        diagnostics: diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{analyze, SpectralConfig};
    use crate::xfmr::thd;

    #[test]
    fn resistive_limit_is_sinusoidal() {
        let p = RectifierParams { dc_capacitance: 0.0, ..Default::default() };
        let out = simulate_rectifier(&p).unwrap();
        let s = analyze(&out.waveform, &SpectralConfig::default()).unwrap();
        assert!(thd(&s).unwrap() < 0.01, "THD {}", thd(&s).unwrap());
        let expected = 240.0 / (p.source_resistance + p.dc_load_resistance);
        assert!((s.magnitude(1) - expected).abs() < 1e-3 * expected);
    }

    #[test]
    fn open_circuit_current_dies_out() {
        let p = RectifierParams {
            dc_capacitance: 4.7e-3,
            dc_load_resistance: 1e7,
            duration: 1.0,
            discard_periods: 30,
            ..Default::default()
        };
        let out = simulate_rectifier(&p).unwrap();
        let peak = out.waveform.samples().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(peak < 1e-3, "residual peak {peak} A");
        assert!(out.diagnostics.peak_dc_voltage > 0.99 * SQRT_2 * 240.0);
    }

    #[test]
    fn capacitor_load_is_distorted_with_dominant_third() {
        let out = simulate_rectifier(&RectifierParams::default()).unwrap();
        let s = analyze(&out.waveform, &SpectralConfig::default()).unwrap();
        assert!(thd(&s).unwrap() > 0.2);
        let h3 = s.magnitude(3);
        assert!((2..=15).filter(|&h| h != 3).all(|h| s.magnitude(h) < h3));
        assert!(out.diagnostics.min_dc_current >= -1e-9);
    }

    #[test]
    fn rejects_invalid_params() {
        for p in [
            RectifierParams { timestep: 0.0, ..Default::default() },
            RectifierParams { timestep: 1e-3, ..Default::default() },
            RectifierParams { source_inductance: 0.0, ..Default::default() },
            RectifierParams { dc_capacitance: -1.0, ..Default::default() },
            RectifierParams { duration: 0.05, ..Default::default() },
        ] {
            assert!(matches!(simulate_rectifier(&p), Err(Error::InvalidArgument(_))), "{p:?}");
        }
    }
}
