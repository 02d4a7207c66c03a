//! Strip twisted about its axis by a follower torque up to several half
//! turns; prints the tip rotation against the torque.
//!
//!     cargo run --release --example torsion [torsion_pi|torsion_2pi|torsion_3pi]

use std::f64::consts::PI;

use cosserat_shell::scenario::{load_benchmark, Overrides};

fn main() -> cosserat_shell::Result<()> {
    let name = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "torsion_2pi".into());
    let mut scenario = load_benchmark(&name)?.build()?;
    let out = scenario.run(&Overrides::default(), None, false)?;
    for row in out.rows.iter().step_by(4) {
        println!(
            "T = {:>9.3}  twist = {:.4} pi  axial shortening = {:.3e}",
            row.load_magnitude,
            row.tip_rotation.norm() / PI,
            -row.tip_displacement.x
        );
    }
    Ok(())
}
