//! THD, harmonic loss factor, eddy loss, derating and temperature rise for
//! a few load spectra on the default 25 kVA transformer.
//!
//! `cargo run --example transformer_derating`

use harmonic_derating::signal::HarmonicSpectrum;
use harmonic_derating::xfmr::{self, DeratingReport, TransformerSpec};

fn main() -> harmonic_derating::Result<()> {
    let t = TransformerSpec::default();
    let cases = [
        ("sinusoid", vec![(1, 80.0)]),
        ("mild", vec![(1, 80.0), (3, 8.0), (5, 4.0)]),
        ("fixture", vec![(1, 80.0), (3, 24.0), (5, 32.0)]),
        ("rectifier-like", vec![(1, 60.0), (3, 48.0), (5, 30.0), (7, 14.0), (9, 6.0)]),
    ];

    println!("{:15} {:>7} {:>7} {:>9} {:>9} {:>8}", "load", "THD_%", "F_HL", "eddy_W", "derating", "rise_K");
    for (name, mags) in cases {
        let s = HarmonicSpectrum::from_magnitudes(60.0, &mags)?;
        let r = DeratingReport::compute(&s, &t)?;
        println!(
            "{name:15} {:7.2} {:7.3} {:9.1} {:9.4} {:8.1}",
            100.0 * r.thd,
            r.f_hl,
            r.eddy_loss.watts,
            r.derating,
            r.theta_final_k
        );
    }

    let th = t.thermal;
    let p = 300.0;
    println!("\nrise at {p} W, tau = {:.0} s:", th.time_constant());
    for k in [0.5, 1.0, 2.0, 5.0] {
        let secs = k * th.time_constant();
        println!("  t = {k} tau: {:.2} K", xfmr::theta_rise(p, &th, secs)?);
    }
    println!("  steady state: {:.2} K", xfmr::theta_rise(p, &th, f64::INFINITY)?);
    Ok(())
}
