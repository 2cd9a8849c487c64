//! Aggregates appliance templates for a street of houses and shows how
//! rooftop PV cancels fundamental current but leaves the harmonics behind.
//!
//! `cargo run --example household_pv`

use harmonic_derating::loadsim::{aggregate, builtin_signature, builtin_signatures, net_load_kw, House};
use harmonic_derating::xfmr::{self, TransformerSpec};

fn main() -> harmonic_derating::Result<()> {
    for s in builtin_signatures() {
        println!("{:8} {:5.2} kW  template THD {:6.2}%", s.name, s.rated_power_kw, 100.0 * s.thd());
    }

    let sig = |n: &str| builtin_signature(n).expect("builtin signature");
    let houses = |pv: u32| {
        vec![
            House::new(vec![(sig("vfd"), 2), (sig("desktop"), 1), (sig("laptop"), 1)], pv),
            House::new(vec![(sig("vfd"), 1), (sig("desktop"), 1)], 0),
        ]
    };

    let t = TransformerSpec::default();
    println!("\npv_units  net_kW   I1_A    I3_A   THD_%  derating");
    for pv in 0..=3 {
        let s = aggregate(&houses(pv), &sig("pv"), 1.5)?;
        let d = xfmr::derating(xfmr::f_hl(&s)?, &t)?;
        println!(
            "{pv:8} {:7.2} {:6.2} {:7.3} {:7.2} {:9.4}",
            net_load_kw(&s),
            s.magnitude(1),
            s.magnitude(3),
            100.0 * xfmr::thd(&s)?,
            d
        );
    }
    Ok(())
}
