//! Simulates a capacitor-input bridge rectifier and analyzes its line
//! current, then repeats with half the timestep.
//!
//! `cargo run --release --example rectifier`

use harmonic_derating::loadsim::{simulate_rectifier, RectifierParams};
use harmonic_derating::spectral::{analyze, SpectralConfig};
use harmonic_derating::xfmr;

fn main() -> harmonic_derating::Result<()> {
    let base = RectifierParams::default();
    for p in [base, RectifierParams { timestep: base.timestep / 2.0, ..base }] {
        let out = simulate_rectifier(&p)?;
        let s = analyze(&out.waveform, &SpectralConfig::default())?;
        let d = &out.diagnostics;
        println!(
            "dt = {:.0} us: {} steps, {} bridge transitions, peak Vdc {:.1} V, THD {:.2}%",
            p.timestep * 1e6,
            d.steps,
            d.bridge_transitions,
            d.peak_dc_voltage,
            100.0 * xfmr::thd(&s)?
        );
        let i1 = s.magnitude(1);
        let row: Vec<String> = (1..=11).map(|h| format!("h{h} {:.3}", s.magnitude(h) / i1)).collect();
        println!("  {}", row.join("  "));
    }

    let resistive = RectifierParams { dc_capacitance: 0.0, ..base };
    let s = analyze(&simulate_rectifier(&resistive)?.waveform, &SpectralConfig::default())?;
    println!("no capacitor: I1 {:.3} A, THD {:.4}%", s.magnitude(1), 100.0 * xfmr::thd(&s)?);
    Ok(())
}
