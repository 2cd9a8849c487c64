//! Compares the radix-2 FFT against the direct DFT and times both.
//!
//! `cargo run --release --example fft_oracle`

use std::time::Instant;

use harmonic_derating::spectral::{dft, dft_direct, fft};

fn main() -> harmonic_derating::Result<()> {
    for len in [64usize, 256, 1024, 4096] {
        let x: Vec<f64> = (0..len)
            .map(|n| (0.37 * n as f64).sin() + 0.25 * (1.9 * n as f64).cos())
            .collect();

        let t = Instant::now();
        let fast = fft(&x)?;
        let t_fast = t.elapsed();
        let t = Instant::now();
        let slow = dft_direct(&x)?;
        let t_slow = t.elapsed();

        let worst = fast.iter().zip(&slow).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        println!("N = {len:5}: max |fft - dft| = {worst:.2e}, fft {t_fast:?}, direct {t_slow:?}");
    }

    // Lengths that are not powers of two go through the chirp-z path.
    let x: Vec<f64> = (0..1000).map(|n| (n as f64 * 0.01).sin()).collect();
    let worst = dft(&x)?
        .iter()
        .zip(&dft_direct(&x)?)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    println!("N =  1000 (chirp-z): max error {worst:.2e}");
    Ok(())
}
