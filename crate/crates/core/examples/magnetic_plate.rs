//! Rectangular magneto-active plates with through-thickness remanence in an
//! in-plane field, for two particle fractions.
//!
//!     cargo run --release --example magnetic_plate

use cosserat_shell::constitutive::magnetic_modulus;
use cosserat_shell::scenario::{load_benchmark, Overrides};

fn main() -> cosserat_shell::Result<()> {
    for (name, phi) in [("magnetic_plate_a", 0.06), ("magnetic_plate_b", 0.12)] {
        let mut scenario = load_benchmark(name)?.build()?;
        let out = scenario.run(&Overrides::default(), None, false)?;
        let u = out.rows.last().expect("rows").tip_displacement * 1e3;
        println!(
            "{name}: E/E0 from the fill law {:.3}, tip ({:+.3}, {:+.3}, {:+.3}) mm",
            magnetic_modulus(1.0, phi)?,
            u.x,
            u.y,
            u.z
        );
    }
    Ok(())
}
