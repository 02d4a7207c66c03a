#![allow(dead_code)]

use cosserat_shell::constitutive::Material;
use cosserat_shell::fem::{ElementOptions, ShellMesh, ShellModel, ShellState};
use cosserat_shell::kinematics::{build_flat_plate, ReferenceSurface};
use cosserat_shell::liegroup::Vec3;
use cosserat_shell::magnetics::MagneticEnvironment;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Flat `lx x ly` strip on an `nx x ny` mesh; `configure` adds constraints
/// and loads before the model is frozen.
pub fn strip(
    lx: f64,
    ly: f64,
    nx: usize,
    ny: usize,
    material: Material,
    options: ElementOptions,
    configure: impl FnOnce(&mut ShellMesh),
) -> (ShellModel, ShellState) {
    let plate = build_flat_plate(lx, ly).unwrap();
    model_on(
        &plate,
        lx,
        ly,
        nx,
        ny,
        material,
        options,
        None,
        Vec3::zeros(),
        configure,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn model_on(
    surface: &dyn ReferenceSurface,
    lx: f64,
    ly: f64,
    nx: usize,
    ny: usize,
    material: Material,
    options: ElementOptions,
    magnetic: Option<MagneticEnvironment>,
    remanent: Vec3,
    configure: impl FnOnce(&mut ShellMesh),
) -> (ShellModel, ShellState) {
    let mut mesh = ShellMesh::structured(surface, lx, ly, nx, ny).unwrap();
    configure(&mut mesh);
    ShellModel::new(mesh, surface, material, options, magnetic, |_| remanent).unwrap()
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-scale..scale))
}

/// A deformed, non-equilibrium state reached by a few random increments.
pub fn random_state(
    model: &ShellModel,
    state: &ShellState,
    rng: &mut ChaCha8Rng,
    scale: f64,
) -> ShellState {
    let mut s = state.clone();
    for _ in 0..3 {
        let eta = random_vector(rng, model.num_dofs(), scale);
        s.apply_increment(model, &eta);
    }
    s
}

pub fn stepped(model: &ShellModel, state: &ShellState, eta: &DVector<f64>) -> ShellState {
    let mut s = state.clone();
    s.apply_increment(model, eta);
    s
}
