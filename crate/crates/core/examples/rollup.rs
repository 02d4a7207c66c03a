//! Clamped strip rolled into a full circle by a follower end moment,
//! compared with the closed-form elastica at every load step.
//!
//!     cargo run --release --example rollup [rollup_2pi|rollup_4pi|rollup_6pi]

use std::f64::consts::PI;

use cosserat_shell::scenario::{load_benchmark, Overrides};

fn main() -> cosserat_shell::Result<()> {
    let name = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "rollup_2pi".into());
    let mut scenario = load_benchmark(&name)?.build()?;
    let l = scenario.config.geometry.length.unwrap_or(10.0);
    let m = scenario.config.material()?;
    let ei = m.e * scenario.config.geometry.width * m.h.powi(3) / 12.0;
    let out = scenario.run(&Overrides::default(), None, false)?;

    println!(
        "{:>5} {:>9} {:>10} {:>10} {:>10} {:>10} {:>6}",
        "step", "theta", "x", "x_exact", "z", "z_exact", "iters"
    );
    for row in &out.rows[1..] {
        let theta = row.load_magnitude * l / ei;
        let (x, z) = (l + row.tip_displacement.x, row.tip_displacement.z);
        println!(
            "{:>5} {:>9.4} {:>10.5} {:>10.5} {:>10.5} {:>10.5} {:>6}",
            row.step,
            theta,
            x,
            l * theta.sin() / theta,
            z,
            l * (1.0 - theta.cos()) / theta,
            row.iterations
        );
    }
    let turns = scenario.accumulated_rotation(&scenario.state)?.norm() / (2.0 * PI);
    println!(
        "winding number {turns:.6}, {:.1} s",
        out.report.wall_time.as_secs_f64()
    );
    Ok(())
}
