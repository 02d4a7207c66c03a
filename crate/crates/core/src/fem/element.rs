//! Four-node element: evaluation points, residual and tangent kernels.
//!
//! Every element carries five evaluation points: the four 2x2 Gauss points
//! followed by the centroid. Each point stores its own pose and deformation
//! twists, advanced by the multiplicative update rule; nothing is
//! interpolated between group elements.
//!
//! Transverse shear and the normal stretches are sampled at the centroid:
//! those rows of the strain vector (and of its linearization) at every Gauss
//! point are replaced by their centroid values. Sampling the stretches too
//! removes the parasitic membrane strain a bent bilinear element picks up at
//! off-centre points. The in-plane shear rows can be treated the same way for
//! in-plane bending problems.

use nalgebra::{SMatrix, SVector};

use crate::constitutive::{split_stress, stack_strain, stiffness_blocks, Mat12, Material, Vec12};
use crate::error::{Result, ShellError};
use crate::fem::mesh::ShellMesh;
use crate::fem::shape::{gauss_2x2, shape_functions, ShapeEval};
use crate::kinematics::{reference_metric, DeformationState, ReferenceSurface};
use crate::liegroup::{ad, ad_tilde, Mat6, Twist, Vec3, Vec6, Wrench};
use crate::magnetics::{
    local_couple, local_couple_stiffness, material_remanent, potential_density, MagneticEnvironment,
};

pub type Vec24 = SVector<f64, 24>;
pub type Mat24 = SMatrix<f64, 24, 24>;
type Mat12x6 = SMatrix<f64, 12, 6>;

pub const NUM_POINTS: usize = 5;
pub const CENTROID: usize = 4;

/// Stretch and transverse shear rows of the stacked strain
/// `(C_1; Gamma_1; C_2; Gamma_2)`.
pub const CENTROID_ROWS: [usize; 4] = [0, 2, 7, 8];
pub const INPLANE_SHEAR_ROWS: [usize; 2] = [1, 6];

/// Where the shear strains entering the stress integral are sampled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ShearTreatment {
    /// Stretch and transverse shear taken from the centroid twist.
    #[default]
    CentroidTwist,
    /// Everything evaluated at the Gauss points; locks for thin shells.
    GaussPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct ElementOptions {
    pub shear: ShearTreatment,
    /// Also sample the in-plane shear at the centroid (in-plane bending).
    pub reduced_inplane: bool,
}

impl ElementOptions {
    /// Strain rows replaced by their centroid values.
    pub fn centroid_rows(&self) -> [bool; 12] {
        let mut rows = [false; 12];
        if self.shear == ShearTreatment::CentroidTwist {
            for r in CENTROID_ROWS {
                rows[r] = true;
            }
        }
        if self.reduced_inplane {
            for r in INPLANE_SHEAR_ROWS {
                rows[r] = true;
            }
        }
        rows
    }
}

/// Fixed data of one evaluation point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointGeometry {
    pub shape: ShapeEval,
    /// Quadrature weight including the chart and surface jacobians; zero at
    /// the centroid.
    pub weight: f64,
    pub stiffness: Mat12,
    /// Remanent field in the reference local frame, `R0^T B_r0`.
    pub remanent: Vec3,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElementGeometry {
    pub nodes: [usize; 4],
    pub points: [PointGeometry; NUM_POINTS],
}

/// Builds the evaluation points of element `e` and their reference states.
/// `remanent` is the element's remanent field per unit reference area,
/// expressed in the inertial frame of the reference configuration.
pub fn element_geometry(
    mesh: &ShellMesh,
    e: usize,
    surface: &dyn ReferenceSurface,
    material: &Material,
    remanent: Vec3,
) -> Result<(ElementGeometry, [DeformationState; NUM_POINTS])> {
    let corners = mesh.element_corners(e);
    let mut natural = [(0.0, 0.0, 0.0); NUM_POINTS];
    natural[..4].copy_from_slice(&gauss_2x2());
    let mut points = Vec::with_capacity(NUM_POINTS);
    let mut states = Vec::with_capacity(NUM_POINTS);
    for (q, &(x, y, w)) in natural.iter().enumerate() {
        let shape = shape_functions(&corners, x, y)
            .map_err(|err| ShellError::Mesh(format!("element {e}: {err}")))?;
        let zeta0 = surface.twists_at(shape.point);
        let (metric, jac0) = reference_metric(&zeta0)
            .map_err(|err| ShellError::DegenerateReference(format!("element {e}: {err}")))?;
        let ainv = metric.try_inverse().ok_or_else(|| {
            ShellError::DegenerateReference(format!("element {e}: singular metric"))
        })?;
        let pose0 = surface.pose_at(shape.point);
        let weight = if q == CENTROID {
            0.0
        } else {
            w * shape.det * jac0
        };
        points.push(PointGeometry {
            shape,
            weight,
            stiffness: stiffness_blocks(material, &ainv).operator(),
            remanent: material_remanent(&pose0.rotation, &remanent),
        });
        states.push(DeformationState::reference(pose0, zeta0)?);
    }
    Ok((
        ElementGeometry {
            nodes: mesh.elements[e],
            points: points.try_into().unwrap(),
        },
        states.try_into().unwrap(),
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElementKernelOutput {
    pub f_int: Vec24,
    pub f_mag: Vec24,
    pub kmat: Mat24,
    pub kgeo: Mat24,
    pub kmag: Mat24,
}

/// `K^j_a = dN^j/dxi_a I + N^j ad(zeta_a)`, the linearized strain operator of
/// node `j` at one point.
pub fn k_operator(n: f64, dn: [f64; 2], zeta: &[Twist; 2], alpha: usize) -> Mat6 {
    Mat6::identity() * dn[alpha] + ad(&zeta[alpha]) * n
}

fn strain_operator(shape: &ShapeEval, j: usize, ads: &[Mat6; 2]) -> Mat12x6 {
    let mut b = Mat12x6::zeros();
    for a in 0..2 {
        let k = Mat6::identity() * shape.dn[j][a] + ads[a] * shape.n[j];
        b.fixed_view_mut::<6, 6>(6 * a, 0).copy_from(&k);
    }
    b
}

fn blend_rows<const C: usize>(
    at_point: &SMatrix<f64, 12, C>,
    at_centroid: &SMatrix<f64, 12, C>,
    rows: &[bool; 12],
) -> SMatrix<f64, 12, C> {
    let mut out = *at_point;
    for r in 0..12 {
        if rows[r] {
            out.row_mut(r).copy_from(&at_centroid.row(r));
        }
    }
    out
}

/// Residual contributions and tangents of one element. Tangent matrices are
/// left at zero when `with_tangent` is false.
pub fn element_kernels(
    geom: &ElementGeometry,
    states: &[DeformationState; NUM_POINTS],
    options: &ElementOptions,
    env: Option<&MagneticEnvironment>,
    with_tangent: bool,
) -> ElementKernelOutput {
    let rows = options.centroid_rows();
    let centroid = &states[CENTROID];
    let c_shape = &geom.points[CENTROID].shape;
    let c_ads = [ad(&centroid.zeta_t[0]), ad(&centroid.zeta_t[1])];
    let c_strain = stack_strain(&centroid.strain());
    let c_ops: [Mat12x6; 4] = std::array::from_fn(|j| strain_operator(c_shape, j, &c_ads));

    let mut out = ElementKernelOutput {
        f_int: Vec24::zeros(),
        f_mag: Vec24::zeros(),
        kmat: Mat24::zeros(),
        kgeo: Mat24::zeros(),
        kmag: Mat24::zeros(),
    };
    for q in 0..4 {
        let pg = &geom.points[q];
        let st = &states[q];
        let w = pg.weight;
        let ads = [ad(&st.zeta_t[0]), ad(&st.zeta_t[1])];
        let g_ops: [Mat12x6; 4] = std::array::from_fn(|j| strain_operator(&pg.shape, j, &ads));
        let b: [Mat12x6; 4] = std::array::from_fn(|j| blend_rows(&g_ops[j], &c_ops[j], &rows));

        let strain = blend_rows(&stack_strain(&st.strain()), &c_strain, &rows);
        let s = pg.stiffness * strain;
        for j in 0..4 {
            let f = b[j].transpose() * s * w;
            {
                let mut view = out.f_int.fixed_rows_mut::<6>(6 * j);
                view += f;
            }
        }

        if with_tangent {
            let mut s_point = s;
            let mut s_centroid = Vec12::zeros();
            for r in 0..12 {
                if rows[r] {
                    s_centroid[r] = s[r];
                    s_point[r] = 0.0;
                }
            }
            let sp = split_stress(&s_point);
            let sc = split_stress(&s_centroid);
            let tilde_p = [ad_tilde(&sp[0]), ad_tilde(&sp[1])];
            let tilde_c = [ad_tilde(&sc[0]), ad_tilde(&sc[1])];
            let db: [SMatrix<f64, 12, 6>; 4] = std::array::from_fn(|k| pg.stiffness * b[k]);
            for j in 0..4 {
                for k in 0..4 {
                    let km = b[j].transpose() * db[k] * w;
                    {
                        let mut view = out.kmat.fixed_view_mut::<6, 6>(6 * j, 6 * k);
                        view += km;
                    }
                    let mut kg = Mat6::zeros();
                    for a in 0..2 {
                        let gk = g_ops[k].fixed_view::<6, 6>(6 * a, 0);
                        let ck = c_ops[k].fixed_view::<6, 6>(6 * a, 0);
                        kg += tilde_p[a] * gk * pg.shape.n[j];
                        kg += tilde_c[a] * ck * c_shape.n[j];
                    }
                    {
                        let mut view = out.kgeo.fixed_view_mut::<6, 6>(6 * j, 6 * k);
                        view += kg * w;
                    }
                }
            }
        }

        if let Some(env) = env {
            let rt = &st.pose.rotation;
            let couple = local_couple(&pg.remanent, rt, env);
            for j in 0..4 {
                let f = couple * (w * pg.shape.n[j]);
                {
                    let mut view = out.f_mag.fixed_rows_mut::<3>(6 * j + 3);
                    view += f;
                }
            }
            if with_tangent {
                let km = local_couple_stiffness(&pg.remanent, rt, env);
                for j in 0..4 {
                    for k in 0..4 {
                        let blk = km * (w * pg.shape.n[j] * pg.shape.n[k]);
                        {
                            let mut view = out.kmag.fixed_view_mut::<3, 3>(6 * j + 3, 6 * k + 3);
                            view += blk;
                        }
                    }
                }
            }
        }
    }
    out
}

/// Stored elastic energy `1/2 sum w E.D.E` (positive) and magnetic potential
/// energy of one element.
pub fn element_energy(
    geom: &ElementGeometry,
    states: &[DeformationState; NUM_POINTS],
    options: &ElementOptions,
    env: Option<&MagneticEnvironment>,
) -> (f64, f64) {
    let rows = options.centroid_rows();
    let c_strain = stack_strain(&states[CENTROID].strain());
    let mut elastic = 0.0;
    let mut magnetic = 0.0;
    for q in 0..4 {
        let pg = &geom.points[q];
        let strain = blend_rows(&stack_strain(&states[q].strain()), &c_strain, &rows);
        elastic += 0.5 * pg.weight * strain.dot(&(pg.stiffness * strain));
        if let Some(env) = env {
            magnetic += pg.weight * potential_density(&pg.remanent, &states[q].pose.rotation, env);
        }
    }
    (elastic, magnetic)
}

/// Stress resultants at a Gauss point after centroid sampling.
pub fn point_stress(
    geom: &ElementGeometry,
    states: &[DeformationState; NUM_POINTS],
    options: &ElementOptions,
    q: usize,
) -> [Wrench; 2] {
    let rows = options.centroid_rows();
    let c_strain = stack_strain(&states[CENTROID].strain());
    let strain = blend_rows(&stack_strain(&states[q].strain()), &c_strain, &rows);
    split_stress(&(geom.points[q].stiffness * strain))
}

/// Applies nodal increments (stacked per element node) to all evaluation
/// points of the element.
pub fn update_points(
    geom: &ElementGeometry,
    states: &mut [DeformationState; NUM_POINTS],
    eta: &[Twist; 4],
) {
    for (pg, st) in geom.points.iter().zip(states.iter_mut()) {
        let mut e = Vec6::zeros();
        let mut d = [Vec6::zeros(); 2];
        for j in 0..4 {
            let v = eta[j].to_vector();
            e += v * pg.shape.n[j];
            d[0] += v * pg.shape.dn[j][0];
            d[1] += v * pg.shape.dn[j][1];
        }
        st.apply_increment(
            &Twist::from_vector(&e),
            &[Twist::from_vector(&d[0]), Twist::from_vector(&d[1])],
        );
    }
}
