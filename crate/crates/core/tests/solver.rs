//! Linear solves, load stepping and Newton iteration on small cantilevers.

mod common;

use common::{random_vector, rng, strip};
use cosserat_shell::constitutive::Material;
use cosserat_shell::fem::{
    assemble, total_potential, Edge, ElementOptions, LoadFrame, ShellModel, ShellState,
    SparseMatrix,
};
use cosserat_shell::kinematics::{build_flat_plate, Transformed};
use cosserat_shell::liegroup::{exp_se3, Pose, Twist, Vec3, Wrench};
use cosserat_shell::solver::{solve, solve_linear, SolverSettings};
use cosserat_shell::ShellError;
use nalgebra::{DMatrix, DVector};

const E: f64 = 1.0e6;
const W: f64 = 0.1;
const H: f64 = 0.01;

fn ei() -> f64 {
    E * W * H.powi(3) / 12.0
}

fn material() -> Material {
    Material::new(E, 0.0, H).unwrap()
}

/// Root-clamped unit-length strip with a tip load.
fn cantilever(nx: usize, tip: Wrench, frame: LoadFrame) -> (ShellModel, ShellState) {
    strip(
        1.0,
        W,
        nx,
        1,
        material(),
        ElementOptions::default(),
        |mesh| {
            mesh.clamp_edge(Edge::Root);
            mesh.add_edge_load(Edge::Tip, tip, frame);
        },
    )
}

fn settings(steps: usize) -> SolverSettings {
    SolverSettings {
        load_steps: steps,
        ..SolverSettings::default()
    }
}

fn tip_displacement(model: &ShellModel, state: &ShellState) -> Vec3 {
    let tip = model.mesh.edge_nodes(Edge::Tip);
    tip.iter()
        .map(|&n| state.nodes[n].translation - model.mesh.nodes[n].pose0.translation)
        .sum::<Vec3>()
        / tip.len() as f64
}

fn random_spd(n: usize, seed: u64) -> SparseMatrix {
    let mut r = rng(seed);
    // Banded, diagonally shifted B^T B keeps the pattern sparse.
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in i.saturating_sub(3)..(i + 4).min(n) {
            triplets.push((i, j, random_vector(&mut r, 1, 1.0)[0]));
        }
    }
    let b = SparseMatrix::from_triplets(n, n, triplets).to_dense();
    let a: DMatrix<f64> = b.transpose() * &b + DMatrix::identity(n, n) * 0.1;
    let t = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| a[(i, j)] != 0.0)
        .map(|(i, j)| (i, j, a[(i, j)]))
        .collect();
    SparseMatrix::from_triplets(n, n, t)
}

#[test]
fn random_spd_systems_meet_the_residual_bound() {
    for (n, seed) in [(12, 1), (120, 2), (600, 3)] {
        let a = random_spd(n, seed);
        let b = random_vector(&mut rng(seed + 10), n, 1.0);
        let x = solve_linear(&a, &b).unwrap();
        let rel = (a.matvec(&x) - &b).norm() / b.norm();
        assert!(rel < 1e-10, "n = {n}: relative residual {rel:e}");
    }
}

#[test]
fn singular_system_is_reported() {
    let a = SparseMatrix::from_triplets(3, 3, vec![(0, 0, 1.0), (1, 1, 1.0)]);
    let err = solve_linear(&a, &DVector::from_element(3, 1.0)).unwrap_err();
    assert!(matches!(err, ShellError::Singular { .. }));
}

#[test]
fn unloaded_problem_converges_at_once() {
    let (model, mut state) = cantilever(4, Wrench::zero(), LoadFrame::Dead);
    let reference = state.clone();
    let report = solve(&model, &mut state, &settings(3), |_, _| {}).unwrap();
    assert!(report.converged);
    assert!(report.steps.iter().all(|s| s.iterations == 1));
    assert_eq!(state, reference);
}

#[test]
fn uniform_translation_leaves_the_strains() {
    let (model, state) = cantilever(4, Wrench::zero(), LoadFrame::Dead);
    let t = Vec3::new(0.3, -0.2, 0.7);
    let mut eta = DVector::zeros(model.num_dofs());
    for n in 0..model.mesh.num_nodes() {
        eta.fixed_rows_mut::<3>(6 * n).copy_from(&t);
    }
    let mut moved = state.clone();
    moved.apply_increment(&model, &eta);
    for (a, b) in moved.nodes.iter().zip(&state.nodes) {
        assert!((a.translation - b.translation - t).norm() < 1e-15);
        assert_eq!(a.rotation, b.rotation);
    }
    for pts in &moved.points {
        for p in pts {
            assert!(p.strain().abs().max() < 1e-15);
        }
    }
    assert!(assemble(&model, &moved, 1.0, false).f_int.amax() < 1e-12);
}

#[test]
fn small_end_shear_matches_beam_theory() {
    // Load small enough that the response is linear.
    let p = 1e-4 * ei();
    let (model, mut state) = cantilever(
        20,
        Wrench::new(Vec3::new(0.0, 0.0, p), Vec3::zeros()),
        LoadFrame::Dead,
    );
    solve(&model, &mut state, &settings(1), |_, _| {}).unwrap();
    let w = tip_displacement(&model, &state).z;
    let euler = p / (3.0 * ei());
    assert!(
        (w / euler - 1.0).abs() < 1e-2,
        "tip {w:e} against {euler:e}"
    );
}

#[test]
fn newton_converges_quadratically() {
    let p = 2.0 * ei();
    let (model, mut state) = cantilever(
        10,
        Wrench::new(Vec3::new(0.0, 0.0, p), Vec3::zeros()),
        LoadFrame::Dead,
    );
    let report = solve(&model, &mut state, &settings(2), |_, _| {}).unwrap();
    for step in &report.steps {
        let r = &step.residuals;
        let r0 = r[0];
        // Pairs well inside the basin and above round-off.
        let pairs: Vec<(f64, f64)> = r
            .windows(2)
            .map(|w| (w[0] / r0, w[1] / r0))
            .filter(|&(a, b)| a < 1e-2 && b > 1e-12)
            .collect();
        assert!(
            !pairs.is_empty(),
            "no iterates in the asymptotic range: {r:?}"
        );
        for (a, b) in pairs {
            assert!(b < 10.0 * a * a, "residuals {r:?}");
        }
    }
}

#[test]
fn equilibrium_is_a_stationary_point_of_the_potential() {
    let p = 3.0 * ei();
    let (model, mut state) = cantilever(
        10,
        Wrench::new(Vec3::new(0.0, 0.0, p), Vec3::zeros()),
        LoadFrame::Dead,
    );
    solve(&model, &mut state, &settings(4), |_, _| {}).unwrap();
    let free = model.mesh.free_dofs();
    let mut r = rng(17);
    let energy = total_potential(&model, &state, 1.0);
    let step = 1e-6;
    for _ in 0..5 {
        let mut eta = DVector::zeros(model.num_dofs());
        for &i in &free {
            eta[i] = random_vector(&mut r, 1, 1.0)[0];
        }
        let at = |s: f64| {
            let mut moved = state.clone();
            moved.apply_increment(&model, &(&eta * s));
            total_potential(&model, &moved, 1.0).total()
        };
        let slope = (at(step) - at(-step)) / (2.0 * step);
        // Compare with the slope of the elastic energy alone along eta.
        let asm = assemble(&model, &state, 1.0, false);
        let scale = asm.f_int.dot(&eta).abs().max(energy.elastic);
        assert!(
            slope.abs() < 1e-6 * scale,
            "slope {slope:e} against {scale:e}"
        );
    }
}

#[test]
fn rigidly_moved_reference_gives_the_moved_solution() {
    let m = 0.8 * ei();
    let tip = Wrench::new(Vec3::new(0.0, 0.0, 0.3 * ei()), Vec3::new(0.0, -m, 0.0));
    let (model, mut state) = cantilever(8, tip, LoadFrame::Follower);
    solve(&model, &mut state, &settings(4), |_, _| {}).unwrap();

    let h = exp_se3(&Twist::new(
        Vec3::new(1.0, 2.0, -3.0),
        Vec3::new(0.5, -1.2, 0.8),
    ));
    let plate = build_flat_plate(1.0, W).unwrap();
    let moved = Transformed { h, inner: plate };
    let mut mesh = cosserat_shell::fem::ShellMesh::structured(&moved, 1.0, W, 8, 1).unwrap();
    mesh.clamp_edge(Edge::Root);
    mesh.add_edge_load(Edge::Tip, tip, LoadFrame::Follower);
    let (moved_model, mut moved_state) = ShellModel::new(
        mesh,
        &moved,
        material(),
        ElementOptions::default(),
        None,
        |_| Vec3::zeros(),
    )
    .unwrap();
    solve(&moved_model, &mut moved_state, &settings(4), |_, _| {}).unwrap();

    for (a, b) in state.nodes.iter().zip(&moved_state.nodes) {
        assert!(h.compose(a).distance_max(b) < 1e-8);
    }
}

#[test]
fn mesh_refinement_converges_monotonically() {
    let p = ei();
    let tip_at = |nx: usize| {
        let (model, mut state) = cantilever(
            nx,
            Wrench::new(Vec3::new(0.0, 0.0, p), Vec3::zeros()),
            LoadFrame::Dead,
        );
        solve(&model, &mut state, &settings(2), |_, _| {}).unwrap();
        tip_displacement(&model, &state)
    };
    let reference = tip_at(80);
    let errors: Vec<f64> = [10, 20, 40]
        .iter()
        .map(|&n| (tip_at(n) - reference).norm())
        .collect();
    assert!(
        errors[1] < errors[0] && errors[2] < errors[1],
        "errors {errors:?}"
    );
}

#[test]
fn iteration_cap_reports_non_convergence() {
    let p = 5.0 * ei();
    let (model, mut state) = cantilever(
        6,
        Wrench::new(Vec3::new(0.0, 0.0, p), Vec3::zeros()),
        LoadFrame::Dead,
    );
    let tight = SolverSettings {
        load_steps: 1,
        max_iters: 2,
        max_halvings: 1,
        ..SolverSettings::default()
    };
    match solve(&model, &mut state, &tight, |_, _| {}) {
        Err(ShellError::NonConvergence { step, history, .. }) => {
            assert_eq!(step, 1);
            assert!(!history.is_empty());
        }
        other => panic!("expected non-convergence, got {other:?}"),
    }
}

#[test]
fn observer_sees_every_step() {
    let (model, mut state) = cantilever(
        4,
        Wrench::new(Vec3::new(0.0, 0.0, ei()), Vec3::zeros()),
        LoadFrame::Dead,
    );
    let mut seen = Vec::new();
    solve(&model, &mut state, &settings(5), |info, _| {
        seen.push(info.report.load_factor)
    })
    .unwrap();
    assert_eq!(seen.len(), 5);
    assert!((seen[4] - 1.0).abs() < 1e-15);
}

#[test]
fn solves_are_deterministic() {
    let run = || {
        let (model, mut state) = cantilever(
            6,
            Wrench::new(Vec3::new(0.0, 0.0, 2.0 * ei()), Vec3::zeros()),
            LoadFrame::Dead,
        );
        solve(&model, &mut state, &settings(3), |_, _| {}).unwrap();
        state
    };
    assert_eq!(run(), run());
}

#[test]
fn identity_pose_is_the_reference_of_a_flat_strip() {
    let (model, state) = cantilever(2, Wrench::zero(), LoadFrame::Dead);
    assert_eq!(state.nodes[0], Pose::identity());
    assert_eq!(model.mesh.nodes.len(), 6);
}
