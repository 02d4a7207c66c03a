//! Compares the assembled tangent with central differences of the residual
//! at a randomly deformed state of a small plate.
//!
//!     cargo run --release --example tangent_check

use cosserat_shell::constitutive::Material;
use cosserat_shell::fem::{assemble, ElementOptions, ShellMesh, ShellModel};
use cosserat_shell::kinematics::build_flat_plate;
use cosserat_shell::liegroup::Vec3;
use cosserat_shell::magnetics::MagneticEnvironment;
use nalgebra::{DMatrix, DVector};

fn main() -> cosserat_shell::Result<()> {
    let plate = build_flat_plate(2.0, 1.0)?;
    let mesh = ShellMesh::structured(&plate, 2.0, 1.0, 4, 2)?;
    let env = MagneticEnvironment::new(Vec3::new(0.0, 0.01, 0.03));
    let (model, mut state) = ShellModel::new(
        mesh,
        &plate,
        Material::new(1e5, 0.3, 0.02)?,
        ElementOptions::default(),
        Some(env),
        |_| Vec3::new(1e-3, 0.0, 0.0),
    )?;
    let n = model.num_dofs();
    // A deterministic but irregular deformation.
    let eta = DVector::from_fn(n, |i, _| 0.1 * ((i * 7919 % 113) as f64 / 56.5 - 1.0));
    state.apply_increment(&model, &eta);

    let asm = assemble(&model, &state, 1.0, true);
    let h = 1e-6;
    let mut fd = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = DVector::zeros(n);
        e[j] = h;
        let (mut plus, mut minus) = (state.clone(), state.clone());
        plus.apply_increment(&model, &e);
        minus.apply_increment(&model, &-e);
        let (rp, rm) = (
            assemble(&model, &plus, 1.0, false),
            assemble(&model, &minus, 1.0, false),
        );
        fd.set_column(j, &(-(rp.residual() - rm.residual()) / (2.0 * h)));
    }
    let k = asm.tangent().to_dense();
    println!("{n} DOFs, |K| = {:.3e}", k.abs().max());
    println!(
        "max |K - K_fd| / |K| = {:.2e}",
        (&k - &fd).abs().max() / k.abs().max()
    );
    println!(
        "skew ratio off equilibrium = {:.2e}",
        asm.mechanical_tangent().skew_ratio()
    );
    Ok(())
}
