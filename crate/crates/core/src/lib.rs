//! Harmonic-rich residential load currents and their effect on a
//! distribution service transformer.
//!
//! The crate covers the whole chain from household appliance mixes to
//! transformer derating:
//!
//! - [`signal`]: sampled waveforms, harmonic spectra, synthesis.
//! - [`spectral`]: DFT/FFT and harmonic extraction with a leakage scan.
//! - [`loadsim`]: appliance templates, household aggregation with PV, and a
//!   time-domain rectifier model.
//! - [`xfmr`]: THD, eddy-current loss, harmonic loss factor, heating, derating.
//! - [`scenario`]: PV-penetration scenarios run end to end.
//! - [`cli`], [`config`], [`csvio`], [`report`]: file formats and the
//!   commands behind the `harmderate` binary.
//!
//! ```
//! use harmonic_derating::signal::HarmonicSpectrum;
//! use harmonic_derating::xfmr;
//!
//! let s = HarmonicSpectrum::from_magnitudes(60.0, &[(1, 1.0), (3, 0.3), (5, 0.4)]).unwrap();
//! assert!((xfmr::thd(&s).unwrap() - 0.5).abs() < 1e-12);
//! assert!((xfmr::f_hl(&s).unwrap() - 4.648).abs() < 1e-12);
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod csvio;
pub mod error;
pub mod loadsim;
pub mod report;
pub mod scenario;
pub mod signal;
pub mod spectral;
pub mod xfmr;

pub use error::{Error, Result};
