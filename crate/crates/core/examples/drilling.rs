//! In-plane bending through the drilling rotation: an end moment about the
//! shell normal bends the strip into a circle within its own plane.
//!
//!     cargo run --release --example drilling [drilling_2pi|drilling_4pi]

use std::f64::consts::PI;

use cosserat_shell::scenario::{load_benchmark, Overrides};

fn main() -> cosserat_shell::Result<()> {
    let name = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "drilling_2pi".into());
    let mut scenario = load_benchmark(&name)?.build()?;
    let out = scenario.run(&Overrides::default(), None, false)?;
    let last = out.rows.last().expect("at least the unloaded row");
    let u = last.tip_displacement;
    println!(
        "tip rotation {:.5} pi about d3 component {:+.5}",
        last.tip_rotation.norm() / PI,
        last.tip_rotation.z
    );
    println!(
        "tip displacement ({:+.4e}, {:+.4e}, {:+.4e})",
        u.x, u.y, u.z
    );
    Ok(())
}
