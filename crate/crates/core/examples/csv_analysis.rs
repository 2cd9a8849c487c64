//! Writes a waveform to CSV, reads it back and prints the harmonic table,
//! the same path the `analyze` command takes.
//!
//! `cargo run --example csv_analysis`

use harmonic_derating::csvio::{read_waveform, write_waveform};
use harmonic_derating::report::harmonic_rows;
use harmonic_derating::signal::{synthesize, HarmonicSpectrum};
use harmonic_derating::spectral::{analyze, SpectralConfig};
use harmonic_derating::xfmr::{DeratingReport, TransformerSpec};

fn main() -> harmonic_derating::Result<()> {
    let source = HarmonicSpectrum::from_magnitudes(60.0, &[(1, 40.0), (3, 12.0), (5, 6.0), (9, 2.0)])?;
    let mut buf = Vec::new();
    write_waveform(&synthesize(&source, 0.25, 20_000.0)?, &mut buf)?;
    println!("CSV: {} bytes, first row {:?}", buf.len(), String::from_utf8_lossy(&buf).lines().nth(1));

    let w = read_waveform(buf.as_slice(), 60.0)?;
    let s = analyze(&w, &SpectralConfig::default())?;
    for row in harmonic_rows(&s).iter().filter(|r| r.magnitude_a > 1e-9) {
        println!("h{:<2} {:8.4} A {:6.2}%", row.order, row.magnitude_a, row.pct_of_fundamental);
    }
    let r = DeratingReport::compute(&s, &TransformerSpec::default())?;
    println!("THD {:.2}%, F_HL {:.3}, derating {:.4}", 100.0 * r.thd, r.f_hl, r.derating);
    Ok(())
}
