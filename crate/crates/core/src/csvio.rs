//! Waveform CSV files: a `time_s,current_a` header, then one row per sample
//! on a uniform time grid.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::signal::Waveform;

pub const TIME_COLUMN: &str = "time_s";
pub const CURRENT_COLUMN: &str = "current_a";
/// Allowed relative deviation of any sample interval from the mean interval.
pub const UNIFORMITY_TOLERANCE: f64 = 1e-6;

/// Reads a waveform, inferring the sample rate from the time column.
pub fn read_waveform<R: Read>(reader: R, fundamental: f64) -> Result<Waveform> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Csv { line: 1, message: e.to_string() })?
        .clone();
    let column = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Csv {
            line: 1,
            message: format!("missing column '{name}' (header is '{}')", headers.iter().collect::<Vec<_>>().join(",")),
        })
    };
    let t_col = column(TIME_COLUMN)?;
    let i_col = column(CURRENT_COLUMN)?;

    let mut times = Vec::new();
    let mut samples = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Csv {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |col: usize, name: &str| -> Result<f64> {
            let raw = record.get(col).ok_or_else(|| Error::Csv {
                line,
                message: format!("missing value for '{name}'"),
            })?;
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Csv {
                    line,
                    message: format!("'{raw}' is not a finite number in column '{name}'"),
                })
        };
        times.push((field(t_col, TIME_COLUMN)?, line));
        samples.push(field(i_col, CURRENT_COLUMN)?);
    }
    if samples.len() < 2 {
        return Err(Error::Csv {
            line: 1,
            message: format!("need at least 2 samples, found {}", samples.len()),
        });
    }

    let span = times[times.len() - 1].0 - times[0].0;
    let dt = span / (times.len() - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::Csv {
            line: times[1].1,
            message: "time column must be strictly increasing".into(),
        });
    }
    for pair in times.windows(2) {
        let step = pair[1].0 - pair[0].0;
        if ((step - dt) / dt).abs() > UNIFORMITY_TOLERANCE {
            return Err(Error::Csv {
                line: pair[1].1,
                message: format!("non-uniform sample interval {step} s (mean {dt} s)"),
            });
        }
    }
    Waveform::new(samples, 1.0 / dt, fundamental)
}

pub fn write_waveform<W: Write>(w: &Waveform, writer: W) -> Result<()> {
    let mut out = std::io::BufWriter::new(writer);
    let io = |e| Error::io("writing waveform CSV", e);
    writeln!(out, "{TIME_COLUMN},{CURRENT_COLUMN}").map_err(io)?;
    for (i, s) in w.samples().iter().enumerate() {
        writeln!(out, "{},{}", w.time(i), s).map_err(io)?;
    }
    out.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str) -> Result<Waveform> {
        read_waveform(text.as_bytes(), 60.0)
    }

    #[test]
    fn round_trip_preserves_samples() {
        let w = Waveform::new((0..500).map(|i| (i as f64 * 0.37).sin()).collect(), 20_000.0, 60.0).unwrap();
        let mut buf = Vec::new();
        write_waveform(&w, &mut buf).unwrap();
        let back = read(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.samples(), w.samples());
        assert!((back.sample_rate() - 20_000.0).abs() < 1e-6);
    }

    #[test]
    fn missing_column_is_named() {
        let err = read("time_s\n0\n0.1\n").unwrap_err();
        assert!(err.to_string().contains("current_a"), "{err}");
        assert_eq!(err.code(), "E_CSV");
    }

    #[test]
    fn bad_row_reports_line() {
        let err = read("time_s,current_a\n0,1\n0.5,abc\n1,2\n").unwrap_err();
        match err {
            Error::Csv { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn short_row_reports_line() {
        let err = read("time_s,current_a\n0,1\n0.5\n1,2\n").unwrap_err();
        match err {
            Error::Csv { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_uniform_time_rejected() {
        let err = read("time_s,current_a\n0,1\n0.5,1\n1.2,1\n1.5,0\n").unwrap_err();
        assert!(matches!(err, Error::Csv { line: 4, .. }), "{err:?}");
    }

    #[test]
    fn decreasing_time_rejected() {
        assert!(read("time_s,current_a\n1,1\n0,1\n").is_err());
    }
}
