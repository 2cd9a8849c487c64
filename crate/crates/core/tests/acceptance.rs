//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Run with `cargo test --test acceptance`.

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use harmonic_derating::loadsim::{simulate_rectifier, RectifierParams};
use harmonic_derating::scenario::{builtin_scenarios, run_all};
use harmonic_derating::signal::{synthesize, HarmonicSpectrum};
use harmonic_derating::spectral::{analyze, dft_direct, fft, SpectralConfig};
use harmonic_derating::xfmr::{self, ThermalSpec, TransformerSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_f0ac;

const FFT_TRIALS_PER_LENGTH: usize = 200;
const FFT_MAX_LEN: usize = 1024;
const FFT_REL_TOL: f64 = 1e-9;
const PARSEVAL_REL_TOL: f64 = 1e-9;
const FFT_TIME_LIMIT: Duration = Duration::from_secs(10);

const ROUND_TRIP_TRIALS: usize = 100;
const ROUND_TRIP_REL_TOL: f64 = 1e-6;

const IDENTITY_EXACT_TOL: f64 = 1e-12;
const FIXTURE_TOL: f64 = 1e-9;

const DERATING_GRID: usize = 1000;
const DERATING_AT_5: f64 = 0.916515;
const DERATING_AT_5_TOL: f64 = 1e-6;

const H3_CONSTANT_TOL: f64 = 1e-9;
const DAY_THD_LIMIT: f64 = 0.06;

const PV_SWEEP_STEPS: usize = 90;
const PV_SWEEP_SPECTRA: usize = 50;

const RESISTIVE_THD_LIMIT: f64 = 0.01;
const TIMESTEP_HALVING_REL_LIMIT: f64 = 0.01;
const EVEN_HARMONIC_LIMIT: f64 = 0.01;
const RECTIFIER_TIME_LIMIT: Duration = Duration::from_secs(5);

const THERMAL_TRIALS: usize = 100;
const THERMAL_TAU_TOL: f64 = 1e-12;

const CLI_TIME_LIMIT: Duration = Duration::from_secs(30);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn random_spectrum(rng: &mut ChaCha8Rng, h_max: u32) -> HarmonicSpectrum {
    let mut s = HarmonicSpectrum::new(60.0).unwrap();
    s.insert(1, rng.gen_range(1.0..50.0), rng.gen_range(-3.1..3.1)).unwrap();
    for h in 2..=h_max {
        if rng.gen_bool(0.6) {
            s.insert(h, rng.gen_range(0.01..20.0), rng.gen_range(-3.1..3.1)).unwrap();
        }
    }
    s
}

fn fft_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let start = Instant::now();
    let mut worst_bin = 0.0_f64;
    let mut worst_parseval = 0.0_f64;
    let mut len = 1;
    while len <= FFT_MAX_LEN {
        for _ in 0..FFT_TRIALS_PER_LENGTH {
            let x: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let fast = fft(&x).map_err(|e| e.to_string())?;
            let slow = dft_direct(&x).map_err(|e| e.to_string())?;
            // Bins far below the typical bin size carry only rounding noise in
            // the O(N^2) oracle, so each bin's scale is floored at the RMS bin.
            let energy: f64 = slow.iter().map(Complex64::norm_sqr).sum();
            let rms_bin = (energy / len as f64).sqrt();
            for (a, b) in fast.iter().zip(&slow) {
                let e = (a - b).norm() / b.norm().max(rms_bin);
                worst_bin = worst_bin.max(e);
            }
            let time_energy: f64 = x.iter().map(|v| v * v).sum();
            let freq_energy: f64 = fast.iter().map(Complex64::norm_sqr).sum::<f64>() / len as f64;
            worst_parseval = worst_parseval.max(rel(freq_energy, time_energy));
        }
        len *= 2;
    }
    let elapsed = start.elapsed();
    ensure(worst_bin <= FFT_REL_TOL, || format!("bin error {worst_bin:e}"))?;
    ensure(worst_parseval <= PARSEVAL_REL_TOL, || format!("Parseval error {worst_parseval:e}"))?;
    ensure(elapsed < FFT_TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "lengths 1..={FFT_MAX_LEN}, worst bin {worst_bin:.1e}, Parseval {worst_parseval:.1e}, {:.2} s",
        elapsed.as_secs_f64()
    ))
}

fn round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let cfg = SpectralConfig::default();
    let mut worst = 0.0_f64;
    for _ in 0..ROUND_TRIP_TRIALS {
        let s = random_spectrum(&mut rng, 15);
        // Three periods of 60 Hz hold exactly 1000 samples at 20 kHz.
        let periods = 3 * rng.gen_range(1..=10);
        let w = synthesize(&s, periods as f64 / 60.0, 20_000.0).map_err(|e| e.to_string())?;
        let back = analyze(&w, &cfg).map_err(|e| e.to_string())?;
        for (h, c) in s.iter() {
            worst = worst.max(rel(back.magnitude(h), c.magnitude));
        }
    }
    ensure(worst <= ROUND_TRIP_REL_TOL, || format!("worst magnitude error {worst:e}"))?;
    Ok(format!("{ROUND_TRIP_TRIALS} spectra, worst magnitude error {worst:.1e}"))
}

fn formula_identities() -> Outcome {
    let t = TransformerSpec::default();
    let pure = HarmonicSpectrum::from_magnitudes(60.0, &[(1, 7.3)]).unwrap();
    let thd = xfmr::thd(&pure).map_err(|e| e.to_string())?;
    let f = xfmr::f_hl(&pure).map_err(|e| e.to_string())?;
    let eddy = xfmr::eddy_loss(&pure, &t).per_unit;
    ensure(thd == 0.0, || format!("pure fundamental THD {thd}"))?;
    ensure(f == 1.0, || format!("pure fundamental F_HL {f}"))?;
    ensure(eddy == t.p_ec_r, || format!("pure fundamental eddy {eddy} != {}", t.p_ec_r))?;
    for h in 1..=50u32 {
        let s = HarmonicSpectrum::from_magnitudes(60.0, &[(h, 2.5)]).unwrap();
        let f = xfmr::f_hl(&s).map_err(|e| e.to_string())?;
        let want = f64::from(h * h);
        ensure(rel(f, want) <= IDENTITY_EXACT_TOL, || format!("h{h}: F_HL {f}"))?;
    }
    let fixture = HarmonicSpectrum::from_magnitudes(60.0, &[(1, 1.0), (3, 0.3), (5, 0.4)]).unwrap();
    let thd = xfmr::thd(&fixture).map_err(|e| e.to_string())?;
    let f = xfmr::f_hl(&fixture).map_err(|e| e.to_string())?;
    ensure((thd - 0.5).abs() <= FIXTURE_TOL, || format!("fixture THD {thd}"))?;
    ensure((f - 4.648).abs() <= FIXTURE_TOL, || format!("fixture F_HL {f}"))?;
    Ok(format!("pure tones h1..=50, fixture THD {thd}, F_HL {f}"))
}

fn derating_properties() -> Outcome {
    let t = TransformerSpec::default();
    let d = |f: f64| xfmr::derating(f, &t).map_err(|e| e.to_string());
    let at_one = d(1.0)?;
    ensure(at_one == 1.0, || format!("derating(1) = {at_one}"))?;
    let mut prev = at_one;
    for i in 1..=DERATING_GRID {
        let f = 1.0 + 49.0 * i as f64 / DERATING_GRID as f64;
        let v = d(f)?;
        ensure(v < prev, || format!("not decreasing at F_HL {f}"))?;
        prev = v;
    }
    let at_five = d(5.0)?;
    ensure((at_five - DERATING_AT_5).abs() <= DERATING_AT_5_TOL, || {
        format!("derating(5) = {at_five}")
    })?;
    Ok(format!("derating(5) = {at_five:.7}, monotone over {DERATING_GRID} points"))
}

fn scenario_trends() -> Outcome {
    let summary = run_all(&TransformerSpec::default(), &SpectralConfig::default()).map_err(|e| e.to_string())?;
    let r = &summary.results;
    ensure(r.len() == 5, || format!("{} scenarios", r.len()))?;
    let thd: Vec<f64> = r.iter().map(|s| s.report.thd).collect();
    let der: Vec<f64> = r.iter().map(|s| s.report.derating).collect();
    let thd_order = [2, 1, 0, 3, 4];
    let der_order = [4, 3, 0, 1, 2];
    ensure(thd_order.windows(2).all(|w| thd[w[0]] > thd[w[1]]), || {
        format!("THD ordering broken: {thd:?}")
    })?;
    ensure(der_order.windows(2).all(|w| der[w[0]] > der[w[1]]), || {
        format!("derating ordering broken: {der:?}")
    })?;
    let h3: Vec<f64> = r[..3].iter().map(|s| s.spectrum.magnitude(3)).collect();
    let spread = h3.iter().map(|m| rel(*m, h3[0])).fold(0.0, f64::max);
    ensure(spread <= H3_CONSTANT_TOL, || format!("h3 spread {spread:e}: {h3:?}"))?;
    ensure(thd[3] < DAY_THD_LIMIT && thd[4] < DAY_THD_LIMIT, || {
        format!("daytime THD {:.4} / {:.4}", thd[3], thd[4])
    })?;
    let pct: Vec<String> = thd.iter().map(|v| format!("{:.2}", 100.0 * v)).collect();
    Ok(format!("THD % [{}], h3 spread {spread:.1e}", pct.join(", ")))
}

fn check_pv_sweep(load: &HarmonicSpectrum, t: &TransformerSpec) -> Result<(), String> {
    let i1 = load.phasor(1);
    let mut prev: Option<(f64, f64)> = None;
    for step in 0..=PV_SWEEP_STEPS {
        let share = 0.9 * step as f64 / PV_SWEEP_STEPS as f64;
        let mut s = load.clone();
        s.add_phasor(1, -share * i1);
        let thd = xfmr::thd(&s).map_err(|e| e.to_string())?;
        let d = xfmr::derating(xfmr::f_hl(&s).map_err(|e| e.to_string())?, t).map_err(|e| e.to_string())?;
        if let Some((pt, pd)) = prev {
            ensure(thd > pt, || format!("THD not increasing at {share:.3}"))?;
            ensure(d < pd, || format!("derating not decreasing at {share:.3}"))?;
        }
        prev = Some((thd, d));
    }
    Ok(())
}

fn pv_compensation() -> Outcome {
    let t = TransformerSpec::default();
    let evening = builtin_scenarios().into_iter().next().expect("builtin scenarios");
    check_pv_sweep(&evening.aggregate().map_err(|e| e.to_string())?, &t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    for _ in 0..PV_SWEEP_SPECTRA {
        let mut s = random_spectrum(&mut rng, 15);
        s.insert(3, rng.gen_range(0.05..10.0), rng.gen_range(-3.1..3.1)).unwrap();
        check_pv_sweep(&s, &t)?;
    }
    Ok(format!(
        "default evening mix plus {PV_SWEEP_SPECTRA} random spectra, {} steps to 90%",
        PV_SWEEP_STEPS
    ))
}

fn timed_thd(p: &RectifierParams) -> Result<(f64, HarmonicSpectrum), String> {
    let start = Instant::now();
    let out = simulate_rectifier(p).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(elapsed < RECTIFIER_TIME_LIMIT, || format!("simulation took {elapsed:?}"))?;
    let cfg = SpectralConfig { h_max: 15, ..SpectralConfig::default() };
    let s = analyze(&out.waveform, &cfg).map_err(|e| e.to_string())?;
    Ok((xfmr::thd(&s).map_err(|e| e.to_string())?, s))
}

fn rectifier() -> Outcome {
    let resistive = RectifierParams { dc_capacitance: 0.0, ..RectifierParams::default() };
    let (thd_r, _) = timed_thd(&resistive)?;
    ensure(thd_r < RESISTIVE_THD_LIMIT, || format!("resistive THD {thd_r}"))?;

    let base = RectifierParams::default();
    let halved = RectifierParams { timestep: base.timestep / 2.0, ..base };
    let (thd_a, s) = timed_thd(&base)?;
    let (thd_b, _) = timed_thd(&halved)?;
    let change = rel(thd_b, thd_a);
    ensure(change < TIMESTEP_HALVING_REL_LIMIT, || format!("THD {thd_a} -> {thd_b}"))?;

    let i1 = s.magnitude(1);
    let worst_even = (2..=14).step_by(2).map(|h| s.magnitude(h) / i1).fold(0.0, f64::max);
    ensure(worst_even < EVEN_HARMONIC_LIMIT, || format!("even harmonic ratio {worst_even}"))?;
    Ok(format!(
        "resistive THD {:.3}%, capacitor THD {:.2}% (dt/2 change {change:.1e}), worst even {worst_even:.1e}",
        100.0 * thd_r,
        100.0 * thd_a
    ))
}

fn thermal() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let knee = 1.0 - (-1.0_f64).exp();
    let mut worst = 0.0_f64;
    for _ in 0..THERMAL_TRIALS {
        let mass = rng.gen_range(10.0..2000.0);
        let heat = rng.gen_range(300.0..2000.0);
        let alpha_a = rng.gen_range(0.5..50.0);
        let power = rng.gen_range(1.0..5000.0);
        let th = ThermalSpec::new(mass, heat, alpha_a).map_err(|e| e.to_string())?;
        let theta = |p: f64, t: f64| xfmr::theta_rise(p, &th, t).map_err(|e| e.to_string());
        let final_rise = theta(power, f64::INFINITY)?;
        ensure(final_rise == power / alpha_a, || format!("theta(inf) {final_rise}"))?;
        let e = rel(theta(power, th.time_constant())? / final_rise, knee);
        worst = worst.max(e);
        ensure(e <= THERMAL_TAU_TOL, || format!("theta(tau) ratio error {e:e}"))?;
        let tau = th.time_constant();
        let mut prev = 0.0;
        for k in 1..=40 {
            let v = theta(power, tau * k as f64 / 8.0)?;
            ensure(v > prev, || format!("not increasing in t at step {k}"))?;
            ensure(v < theta(power * 1.01, tau * k as f64 / 8.0)?, || "not increasing in P".into())?;
            prev = v;
        }
    }
    Ok(format!("{THERMAL_TRIALS} parameter sets, worst theta(tau) error {worst:.1e}"))
}

fn harmderate(dir: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_harmderate"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn harmderate")
}

fn cli_end_to_end() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let run = harmderate(dir.path(), &["scenarios", "--out", "out"]);
    let elapsed = start.elapsed();
    ensure(run.status.code() == Some(0), || format!("scenarios exited {:?}", run.status))?;
    ensure(elapsed < CLI_TIME_LIMIT, || format!("scenarios took {elapsed:?}"))?;
    let stdout = String::from_utf8_lossy(&run.stdout);
    let rows = stdout
        .lines()
        .filter(|l| l.split_whitespace().next().is_some_and(|w| w.parse::<u32>().is_ok()))
        .count();
    ensure(rows == 5, || format!("{rows} table rows"))?;
    let report = std::fs::read_to_string(dir.path().join("out/report.json")).map_err(|e| e.to_string())?;
    let json: serde_json::Value = serde_json::from_str(&report).map_err(|e| e.to_string())?;
    ensure(json["schema_version"] == 1, || "schema_version is not 1".into())?;
    ensure(json["scenarios"].as_array().map(Vec::len) == Some(5), || "report lacks 5 scenarios".into())?;

    std::fs::write(dir.path().join("bad.csv"), "time_s,current_a\n0,1\n0.001,oops\n").map_err(|e| e.to_string())?;
    let bad = harmderate(dir.path(), &["analyze", "bad.csv"]);
    let stderr = String::from_utf8_lossy(&bad.stderr);
    ensure(bad.status.code() == Some(3) && stderr.starts_with("E_CSV"), || {
        format!("malformed CSV: {:?} {stderr}", bad.status.code())
    })?;

    let spectrum = r#"{"fundamental_hz": 60, "harmonics": [{"order": 1, "magnitude_a": 1, "phase_rad": 0},
        {"order": 200, "magnitude_a": 0.1, "phase_rad": 0}]}"#;
    std::fs::write(dir.path().join("alias.json"), spectrum).map_err(|e| e.to_string())?;
    let alias = harmderate(dir.path(), &["synth", "alias.json", "alias.csv"]);
    let stderr = String::from_utf8_lossy(&alias.stderr);
    ensure(alias.status.code() == Some(4) && stderr.starts_with("E_NYQUIST"), || {
        format!("Nyquist violation: {:?} {stderr}", alias.status.code())
    })?;
    Ok(format!(
        "scenarios in {:.2} s, 5 rows, schema v1; E_CSV -> 3, E_NYQUIST -> 4",
        elapsed.as_secs_f64()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("AC1 FFT matches direct DFT", fft_oracle),
        ("AC2 synthesize/analyze round trip", round_trip),
        ("AC3 THD, F_HL and eddy-loss identities", formula_identities),
        ("AC4 derating properties", derating_properties),
        ("AC5 scenario orderings and trends", scenario_trends),
        ("AC6 PV fundamental compensation", pv_compensation),
        ("AC7 rectifier simulator", rectifier),
        ("AC8 thermal model", thermal),
        ("AC9 CLI end to end", cli_end_to_end),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>())));
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
