//! Snap of a magnetic cantilever placed in a field opposite to its
//! remanence: the straight state is an unstable equilibrium.
//!
//!     cargo run --release --example antiparallel

use cosserat_shell::scenario::{load_benchmark, Overrides};

fn main() -> cosserat_shell::Result<()> {
    let mut scenario = load_benchmark("antiparallel")?.build()?;
    let straight = scenario.state.clone();
    let out = scenario.run(&Overrides::default(), None, false)?;
    for row in out.rows.iter().step_by(10) {
        let u = row.tip_displacement * 1e3;
        println!(
            "field {:>5.2}  tip ({:+7.2}, {:+7.2}) mm  rotation {:.3} rad",
            row.load_factor,
            u.x,
            u.z,
            row.tip_rotation.norm()
        );
    }
    println!(
        "potential: straight {:.4e} J, final {:.4e} J",
        scenario.energy(&straight),
        scenario.energy(&scenario.state)
    );
    Ok(())
}
