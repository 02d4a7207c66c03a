//! Cantilever plate under a dead transverse tip force: load-deflection
//! curve from small deflection (beam theory) to large rotation.
//!
//!     cargo run --release --example end_shear

use cosserat_shell::scenario::{load_benchmark, Overrides};

fn main() -> cosserat_shell::Result<()> {
    let cfg = load_benchmark("end_shear")?;
    let m = cfg.material()?;
    let l = cfg.geometry.length.unwrap_or(1.0);
    let ei = m.e * cfg.geometry.width * m.h.powi(3) / 12.0;
    let mut scenario = cfg.build()?;
    let out = scenario.run(&Overrides::default(), None, false)?;
    println!(
        "{:>8} {:>10} {:>10} {:>12}",
        "PL^2/EI", "-u/L", "w/L", "linear w/L"
    );
    for row in &out.rows {
        let k = row.load_magnitude * l * l / ei;
        let u = row.tip_displacement;
        println!(
            "{:>8.3} {:>10.5} {:>10.5} {:>12.5}",
            k,
            -u.x / l,
            u.z / l,
            k / 3.0
        );
    }
    Ok(())
}
