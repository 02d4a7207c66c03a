//! Hard-magnetic cantilevers with axial remanence in a transverse field,
//! for the four slenderness ratios, against a planar rod model.
//!
//!     cargo run --release --example magnetic_cantilever

use cosserat_shell::magnetics::MU0;
use cosserat_shell::scenario::{load_benchmark, Overrides};

fn main() -> cosserat_shell::Result<()> {
    for name in [
        "magnetic_cantilever_10",
        "magnetic_cantilever_17_5",
        "magnetic_cantilever_20_5",
        "magnetic_cantilever_41",
    ] {
        let cfg = load_benchmark(name)?;
        let m = cfg.material()?;
        let (l, w) = (cfg.geometry.length.unwrap_or(0.0), cfg.geometry.width);
        let mag = cfg.magnetic.clone().expect("magnetic section");
        // Load parameter q L^2 / EI of the distributed couple.
        let q = w * m.h * mag.remanent[0] * mag.applied[2] / MU0;
        let load = q * l * l / (m.e * w * m.h.powi(3) / 12.0);
        let mut scenario = cfg.build()?;
        let out = scenario.run(&Overrides::default(), None, false)?;
        let u = out.rows.last().expect("rows").tip_displacement;
        println!(
            "L/h = {:>5.1}  qL^2/EI = {:>6.1}  delta/L = {:.4}  tip rotation {:.3} rad",
            l / m.h,
            load,
            u.z / l,
            scenario.accumulated_rotation(&scenario.state)?.norm()
        );
    }
    Ok(())
}
