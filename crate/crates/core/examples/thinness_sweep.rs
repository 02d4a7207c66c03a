//! Pure bending of a 100-element strip at decreasing thickness, with the
//! centroid sampling and with every strain row at the Gauss points.
//!
//!     cargo run --release --example thinness_sweep

use cosserat_shell::constitutive::Material;
use cosserat_shell::fem::{Edge, ElementOptions, LoadFrame, ShearTreatment, ShellMesh, ShellModel};
use cosserat_shell::kinematics::build_flat_plate;
use cosserat_shell::liegroup::{Vec3, Wrench};
use cosserat_shell::solver::{solve, SolverSettings};

fn tip_rotation(h: f64, shear: ShearTreatment) -> cosserat_shell::Result<f64> {
    let (e, l, w) = (1e6, 1.0, 0.1);
    let ei = e * w * h * h * h / 12.0;
    let plate = build_flat_plate(l, w)?;
    let mut mesh = ShellMesh::structured(&plate, l, w, 100, 1)?;
    mesh.clamp_edge(Edge::Root);
    // Sized for a tip rotation of exactly 1 rad.
    mesh.add_edge_load(
        Edge::Tip,
        Wrench::new(Vec3::zeros(), Vec3::new(0.0, -ei / l, 0.0)),
        LoadFrame::Follower,
    );
    let options = ElementOptions {
        shear,
        reduced_inplane: false,
    };
    let (model, mut state) = ShellModel::new(
        mesh,
        &plate,
        Material::new(e, 0.0, h)?,
        options,
        None,
        |_| Vec3::zeros(),
    )?;
    let settings = SolverSettings {
        load_steps: 4,
        max_iters: 100,
        ..SolverSettings::default()
    };
    solve(&model, &mut state, &settings, |_, _| {})?;
    let r = state.nodes[model.mesh.edge_nodes(Edge::Tip)[0]]
        .rotation
        .matrix();
    Ok(r[(2, 0)].atan2(r[(0, 0)]))
}

fn main() -> cosserat_shell::Result<()> {
    println!("{:>6} {:>12} {:>12}", "h/L", "centroid", "gauss");
    for h in [1e-1, 1e-2, 1e-3] {
        let c = tip_rotation(h, ShearTreatment::CentroidTwist)?;
        let g = tip_rotation(h, ShearTreatment::GaussPoint)
            .map_or("failed".into(), |t| format!("{t:.6}"));
        println!("{h:>6.0e} {c:>12.6} {g:>12}");
    }
    Ok(())
}
