//! Writes a scenario file, runs it with outputs, and reads back the CSV
//! and the last mesh dump.
//!
//!     cargo run --release --example custom_scenario [OUT_DIR]

use std::io::BufReader;
use std::path::PathBuf;

use cosserat_shell::fem::read_mesh_dump;
use cosserat_shell::scenario::{parse_scenario, Overrides};

const SOURCE: &str = r#"
name = "quarter_turn"
description = "plate under a follower end moment sized for a quarter turn of the beam"

[geometry]
kind = "flat"
length = 2.0
width = 0.5

[material]
youngs_modulus = 2.1e11
poisson_ratio = 0.3
thickness = 0.01

[mesh]
nx = 16
ny = 2

# pi/2 EI / L with EI = E w h^3 / (12 (1 - nu^2))
[[load]]
kind = "end_moment"
magnitude = 7552.0

[solver]
load_steps = 5
"#;

fn main() -> cosserat_shell::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("cosserat_custom"));
    std::fs::create_dir_all(&out)?;
    let file = out.join("quarter_turn.cfg");
    std::fs::write(&file, SOURCE)?;

    let mut scenario = parse_scenario(&file)?.build()?;
    let outputs = scenario.run(&Overrides::default(), Some(&out), false)?;
    println!(
        "{}",
        std::fs::read_to_string(outputs.csv.as_ref().expect("csv path"))?
    );

    let last = outputs
        .mesh_dumps
        .last()
        .expect("mesh dumps are on by default");
    let dump = read_mesh_dump(BufReader::new(std::fs::File::open(last)?))?;
    let highest = dump
        .poses
        .iter()
        .map(|p| p.translation.z)
        .fold(f64::MIN, f64::max);
    println!(
        "{}: {} nodes, {} triangles, highest point z = {highest:.4}",
        last.display(),
        dump.poses.len(),
        dump.triangles.len()
    );
    Ok(())
}
