//! Discrete model, configuration state and global assembly.

use nalgebra::DVector;

use crate::constitutive::Material;
use crate::error::{Result, ShellError};
use crate::fem::element::{
    element_energy, element_geometry, element_kernels, update_points, ElementGeometry,
    ElementKernelOutput, ElementOptions, NUM_POINTS,
};
use crate::fem::mesh::{LoadFrame, ShellMesh};
use crate::fem::sparse::SparseMatrix;
use crate::kinematics::{renormalize, DeformationState, ReferenceSurface};
use crate::liegroup::{exp_se3, skew, Pose, Twist, Vec3, Wrench};
use crate::magnetics::MagneticEnvironment;

/// Everything that stays fixed during a solve.
#[derive(Clone, Debug)]
pub struct ShellModel {
    pub mesh: ShellMesh,
    pub material: Material,
    pub options: ElementOptions,
    pub geometry: Vec<ElementGeometry>,
    /// Applied field at full load; `None` for purely mechanical problems.
    pub magnetic: Option<MagneticEnvironment>,
}

/// Current configuration: nodal poses plus the evaluation-point states of
/// every element.
#[derive(Clone, Debug, PartialEq)]
pub struct ShellState {
    pub nodes: Vec<Pose>,
    pub points: Vec<[DeformationState; NUM_POINTS]>,
}

impl ShellModel {
    /// Builds the model and its stress-free state. `remanent(e)` gives the
    /// remanent field of element `e` (inertial frame, per unit area).
    pub fn new(
        mesh: ShellMesh,
        surface: &dyn ReferenceSurface,
        material: Material,
        options: ElementOptions,
        magnetic: Option<MagneticEnvironment>,
        remanent: impl Fn(usize) -> Vec3,
    ) -> Result<(Self, ShellState)> {
        mesh.validate()?;
        let mut geometry = Vec::with_capacity(mesh.elements.len());
        let mut points = Vec::with_capacity(mesh.elements.len());
        for e in 0..mesh.elements.len() {
            let (g, p) = element_geometry(&mesh, e, surface, &material, remanent(e))?;
            geometry.push(g);
            points.push(p);
        }
        let state = ShellState {
            nodes: mesh.nodes.iter().map(|n| n.pose0).collect(),
            points,
        };
        Ok((
            ShellModel {
                mesh,
                material,
                options,
                geometry,
                magnetic,
            },
            state,
        ))
    }

    pub fn num_dofs(&self) -> usize {
        self.mesh.num_dofs()
    }
}

impl ShellState {
    /// Right-multiplies every nodal pose by `exp(eta_i)` and advances the
    /// evaluation points with the interpolated increment field.
    pub fn apply_increment(&mut self, model: &ShellModel, eta: &DVector<f64>) {
        let twist = |n: usize| Twist::from_vector(&eta.fixed_rows::<6>(6 * n).into_owned());
        for (n, pose) in self.nodes.iter_mut().enumerate() {
            *pose = pose.compose(&exp_se3(&twist(n)));
            renormalize(pose);
        }
        for (geom, pts) in model.geometry.iter().zip(self.points.iter_mut()) {
            let local = geom.nodes.map(twist);
            update_points(geom, pts, &local);
        }
    }

    /// The state rigidly moved by `h`; deformation twists are unchanged.
    pub fn transformed(&self, h: &Pose) -> ShellState {
        let mut out = self.clone();
        for g in out.nodes.iter_mut() {
            *g = h.compose(g);
        }
        for pts in out.points.iter_mut() {
            for p in pts.iter_mut() {
                p.pose = h.compose(&p.pose);
            }
        }
        out
    }

    /// Largest rotation angle among the nodal increments in `eta`.
    pub fn max_increment_angle(eta: &DVector<f64>) -> f64 {
        (0..eta.len() / 6)
            .map(|n| eta.fixed_rows::<3>(6 * n + 3).norm())
            .fold(0.0, f64::max)
    }
}

/// Global force vectors and tangent parts at one configuration.
#[derive(Clone, Debug)]
pub struct Assembly {
    pub f_int: DVector<f64>,
    pub f_ext: DVector<f64>,
    pub f_mag: DVector<f64>,
    pub k_mat: SparseMatrix,
    pub k_geo: SparseMatrix,
    pub k_mag: SparseMatrix,
    /// Derivative of the dead-load vector with respect to the increments.
    pub k_load: SparseMatrix,
}

impl Assembly {
    /// Unbalanced force `f_ext + f_mag - f_int`.
    pub fn residual(&self) -> DVector<f64> {
        &self.f_ext + &self.f_mag - &self.f_int
    }

    /// Mechanical tangent `K_mat + K_geo`.
    pub fn mechanical_tangent(&self) -> SparseMatrix {
        self.k_mat.combine(1.0, &self.k_geo, 1.0)
    }

    /// Full tangent `K_mat + K_geo - K_load - K_mag`, the negative derivative
    /// of [`Assembly::residual`].
    pub fn tangent(&self) -> SparseMatrix {
        let a = self.mechanical_tangent().combine(1.0, &self.k_load, -1.0);
        a.combine(1.0, &self.k_mag, -1.0)
    }
}

fn scatter(
    triplets: &mut Vec<(usize, usize, f64)>,
    nodes: &[usize; 4],
    k: &crate::fem::element::Mat24,
) {
    for (a, &na) in nodes.iter().enumerate() {
        for (b, &nb) in nodes.iter().enumerate() {
            for i in 0..6 {
                for j in 0..6 {
                    let v = k[(6 * a + i, 6 * b + j)];
                    if v != 0.0 {
                        triplets.push((6 * na + i, 6 * nb + j, v));
                    }
                }
            }
        }
    }
}

/// Kernels of every element at the current state.
pub fn element_outputs(
    model: &ShellModel,
    state: &ShellState,
    load_factor: f64,
    with_tangent: bool,
) -> Vec<ElementKernelOutput> {
    let env = model.magnetic.map(|m| m.scaled(load_factor));
    model
        .geometry
        .iter()
        .zip(&state.points)
        .map(|(g, p)| element_kernels(g, p, &model.options, env.as_ref(), with_tangent))
        .collect()
}

/// Local-frame wrench of one nodal load at the current rotation.
pub fn local_load(load: &crate::fem::mesh::NodalLoad, pose: &Pose) -> Wrench {
    match load.frame {
        LoadFrame::Follower => load.wrench,
        LoadFrame::Dead => {
            let rt = pose.rotation.matrix().transpose();
            Wrench::new(rt * load.wrench.n, rt * load.wrench.m)
        }
    }
}

pub fn assemble(
    model: &ShellModel,
    state: &ShellState,
    load_factor: f64,
    with_tangent: bool,
) -> Assembly {
    let n = model.num_dofs();
    let mut f_int = DVector::zeros(n);
    let mut f_mag = DVector::zeros(n);
    let mut f_ext = DVector::zeros(n);
    let (mut tm, mut tg, mut tk) = (Vec::new(), Vec::new(), Vec::new());
    for (geom, out) in
        model
            .geometry
            .iter()
            .zip(element_outputs(model, state, load_factor, with_tangent))
    {
        for (a, &na) in geom.nodes.iter().enumerate() {
            for i in 0..6 {
                f_int[6 * na + i] += out.f_int[6 * a + i];
                f_mag[6 * na + i] += out.f_mag[6 * a + i];
            }
        }
        if with_tangent {
            scatter(&mut tm, &geom.nodes, &out.kmat);
            scatter(&mut tg, &geom.nodes, &out.kgeo);
            scatter(&mut tk, &geom.nodes, &out.kmag);
        }
    }
    let mut tl = Vec::new();
    for load in &model.mesh.neumann {
        let pose = &state.nodes[load.node];
        let w = local_load(load, pose) * load_factor;
        let base = 6 * load.node;
        for i in 0..6 {
            f_ext[base + i] += w.to_vector()[i];
        }
        if with_tangent && load.frame == LoadFrame::Dead {
            let (fn_, fm) = (skew(&w.n), skew(&w.m));
            for i in 0..3 {
                for j in 0..3 {
                    tl.push((base + i, base + 3 + j, fn_[(i, j)]));
                    tl.push((base + 3 + i, base + 3 + j, fm[(i, j)]));
                }
            }
        }
    }
    Assembly {
        f_int,
        f_ext,
        f_mag,
        k_mat: SparseMatrix::from_triplets(n, n, tm),
        k_geo: SparseMatrix::from_triplets(n, n, tg),
        k_mag: SparseMatrix::from_triplets(n, n, tk),
        k_load: SparseMatrix::from_triplets(n, n, tl),
    }
}

/// Reduced system `A eta = b` on the free DOFs.
#[derive(Clone, Debug)]
pub struct GlobalSystem {
    pub a: SparseMatrix,
    pub b: DVector<f64>,
    pub free: Vec<usize>,
}

impl GlobalSystem {
    /// Scatters a reduced solution back to all DOFs (constrained ones zero).
    pub fn expand(&self, x: &DVector<f64>, n: usize) -> DVector<f64> {
        let mut full = DVector::zeros(n);
        for (k, &i) in self.free.iter().enumerate() {
            full[i] = x[k];
        }
        full
    }
}

pub fn apply_boundary_conditions(asm: &Assembly, mesh: &ShellMesh) -> Result<GlobalSystem> {
    let free = mesh.free_dofs();
    if free.is_empty() {
        return Err(ShellError::config("boundary", "every DOF is constrained"));
    }
    let r = asm.residual();
    Ok(GlobalSystem {
        a: asm.tangent().restrict(&free),
        b: DVector::from_iterator(free.len(), free.iter().map(|&i| r[i])),
        free,
    })
}

/// Energy split of a configuration.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Energy {
    pub elastic: f64,
    pub magnetic: f64,
    /// Potential of dead forces, `-F . (x - x0)`. Moments are not included.
    pub load: f64,
}

impl Energy {
    pub fn total(&self) -> f64 {
        self.elastic + self.magnetic + self.load
    }
}

pub fn total_potential(model: &ShellModel, state: &ShellState, load_factor: f64) -> Energy {
    let env = model.magnetic.map(|m| m.scaled(load_factor));
    let mut energy = Energy::default();
    for (g, p) in model.geometry.iter().zip(&state.points) {
        let (el, mag) = element_energy(g, p, &model.options, env.as_ref());
        energy.elastic += el;
        energy.magnetic += mag;
    }
    for load in &model.mesh.neumann {
        if load.frame == LoadFrame::Dead {
            let u =
                state.nodes[load.node].translation - model.mesh.nodes[load.node].pose0.translation;
            energy.load -= load_factor * load.wrench.n.dot(&u);
        }
    }
    energy
}
