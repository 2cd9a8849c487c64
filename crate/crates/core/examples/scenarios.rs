//! Runs the five built-in PV-penetration scenarios and prints the
//! comparison table alongside the normalized spectra.
//!
//! `cargo run --example scenarios`

use harmonic_derating::scenario::{render_table, run_all};
use harmonic_derating::spectral::SpectralConfig;
use harmonic_derating::xfmr::TransformerSpec;

fn main() -> harmonic_derating::Result<()> {
    let summary = run_all(&TransformerSpec::default(), &SpectralConfig::default())?;
    print!("{}", render_table(&summary.table));

    println!("\nmagnitude / fundamental:");
    for r in &summary.results {
        let bars: Vec<String> = [3, 5, 7, 9, 11, 13].iter().map(|&h| format!("{:.4}", r.normalized(h))).collect();
        println!("  scenario {}: h3..h13 = [{}]", r.id, bars.join(", "));
    }
    Ok(())
}
