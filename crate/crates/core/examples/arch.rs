//! Half-circle arch clamped at one end, loaded at the other by a follower
//! force, either tangential or transverse to the arch.
//!
//!     cargo run --release --example arch [arch_tangent|arch_transverse|arch_rollup]

use cosserat_shell::scenario::{load_benchmark, Overrides};

fn main() -> cosserat_shell::Result<()> {
    let names: Vec<String> = match std::env::args().nth(1) {
        Some(n) => vec![n],
        None => vec!["arch_tangent".into(), "arch_transverse".into()],
    };
    for name in names {
        let mut scenario = load_benchmark(&name)?.build()?;
        let out = scenario.run(&Overrides::default(), None, false)?;
        println!("{name}: {}", scenario.config.description);
        for row in out.rows.iter().step_by(5) {
            let u = row.tip_displacement;
            println!(
                "  P = {:>8.1}  u = ({:+.4}, {:+.4}, {:+.4})",
                row.load_magnitude, u.x, u.y, u.z
            );
        }
    }
    Ok(())
}
