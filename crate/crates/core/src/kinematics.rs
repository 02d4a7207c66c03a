//! Shell configuration fields on the parameter chart, deformation twists and
//! strain measures.
//!
//! A configuration is a pose field `g(xi1, xi2)`. Its deformation twists are
//! `zeta_a = (g^-1 dg/dxi_a)^v`; the linear part `C_a` measures stretch and
//! shear, the angular part `Gamma_a` is the wryness (curvature). Strain is the
//! difference between current and reference twists.

use nalgebra::{Matrix2, Matrix6x2};

use crate::error::{Result, ShellError};
use crate::liegroup::{dexp_se3, exp_se3, unskew, Mat3, Mat6, Pose, Rotation, Twist, Vec3};

/// Columns are the strain twists `E_a = zeta_ta - zeta_0a`.
pub type StrainMatrix = Matrix6x2<f64>;

/// Surfaces whose tangents are closer than this to parallel are rejected.
pub const DEGENERATE_JACOBIAN: f64 = 1e-12;

/// Coordinates on the parameter chart.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ParamPoint {
    pub xi1: f64,
    pub xi2: f64,
}

impl ParamPoint {
    pub fn new(xi1: f64, xi2: f64) -> Self {
        ParamPoint { xi1, xi2 }
    }
}

/// Stress-free configuration of the shell, given analytically.
pub trait ReferenceSurface: Send + Sync {
    fn pose_at(&self, p: ParamPoint) -> Pose;

    fn twists_at(&self, p: ParamPoint) -> [Twist; 2];

    /// Area element `|A_1 x A_2|` of the reference surface.
    fn jac_at(&self, p: ParamPoint) -> f64 {
        let [z1, z2] = self.twists_at(p);
        z1.v.cross(&z2.v).norm()
    }
}

/// Rectangle `[0, lx] x [0, ly]` in the plane `z = 0` with the identity frame.
#[derive(Clone, Copy, Debug)]
pub struct FlatPlate {
    pub lx: f64,
    pub ly: f64,
}

pub fn build_flat_plate(lx: f64, ly: f64) -> Result<FlatPlate> {
    if !(lx > 0.0 && ly > 0.0) {
        return Err(ShellError::Domain(format!(
            "plate dimensions must be positive, got {lx} x {ly}"
        )));
    }
    Ok(FlatPlate { lx, ly })
}

impl ReferenceSurface for FlatPlate {
    fn pose_at(&self, p: ParamPoint) -> Pose {
        Pose::from_translation(Vec3::new(p.xi1, p.xi2, 0.0))
    }

    fn twists_at(&self, _p: ParamPoint) -> [Twist; 2] {
        [
            Twist::new(Vec3::x(), Vec3::zeros()),
            Twist::new(Vec3::y(), Vec3::zeros()),
        ]
    }
}

/// Circular arch of radius `radius` swept about the global y axis.
///
/// `xi1` is arclength along the arc starting at the origin with tangent `+x`,
/// `xi2` runs along the width (global `y`). The arc rises towards `+z`:
/// `phi = (R sin t, xi2, R (1 - cos t))` with `t = xi1 / R`. Director 1 is the
/// arc tangent, director 2 is `+y` and director 3 completes the right-handed
/// triad, pointing towards the axis of the cylinder. With this frame the
/// reference wryness is `Gamma_1 = (0, -1/R, 0)`.
#[derive(Clone, Copy, Debug)]
pub struct CylindricalArch {
    pub radius: f64,
    pub angle_span: f64,
    pub width: f64,
}

pub fn build_cylindrical_arch(radius: f64, angle_span: f64, width: f64) -> Result<CylindricalArch> {
    if !(radius > 0.0)
        || !(angle_span > 0.0 && angle_span <= 2.0 * std::f64::consts::PI + 1e-12)
        || !(width > 0.0)
    {
        return Err(ShellError::Domain(format!(
            "invalid arch: radius {radius}, span {angle_span}, width {width}"
        )));
    }
    Ok(CylindricalArch {
        radius,
        angle_span,
        width,
    })
}

impl CylindricalArch {
    pub fn arc_length(&self) -> f64 {
        self.radius * self.angle_span
    }
}

impl ReferenceSurface for CylindricalArch {
    fn pose_at(&self, p: ParamPoint) -> Pose {
        let t = p.xi1 / self.radius;
        let r = Rotation::from_axis_angle(&Vec3::y(), -t);
        let phi = Vec3::new(self.radius * t.sin(), p.xi2, self.radius * (1.0 - t.cos()));
        Pose::new(r, phi)
    }

    fn twists_at(&self, _p: ParamPoint) -> [Twist; 2] {
        [
            Twist::new(Vec3::x(), Vec3::new(0.0, -1.0 / self.radius, 0.0)),
            Twist::new(Vec3::y(), Vec3::zeros()),
        ]
    }
}

/// A reference surface rigidly moved by `h`. Deformation twists are left
/// invariant, so only the poses change.
#[derive(Clone, Copy, Debug)]
pub struct Transformed<S> {
    pub h: Pose,
    pub inner: S,
}

impl<S: ReferenceSurface> ReferenceSurface for Transformed<S> {
    fn pose_at(&self, p: ParamPoint) -> Pose {
        self.h.compose(&self.inner.pose_at(p))
    }

    fn twists_at(&self, p: ParamPoint) -> [Twist; 2] {
        self.inner.twists_at(p)
    }

    fn jac_at(&self, p: ParamPoint) -> f64 {
        self.inner.jac_at(p)
    }
}

/// Deformation twists of an arbitrary pose field by central differences of
/// step `step` in each chart direction.
pub fn deformation_twists<F>(g_field: F, p: ParamPoint, step: f64) -> [Twist; 2]
where
    F: Fn(ParamPoint) -> Pose,
{
    let g_inv = g_field(p).inverse().to_homogeneous();
    let along = |d1: f64, d2: f64| {
        let plus = g_field(ParamPoint::new(p.xi1 + d1, p.xi2 + d2)).to_homogeneous();
        let minus = g_field(ParamPoint::new(p.xi1 - d1, p.xi2 - d2)).to_homogeneous();
        let m = g_inv * (plus - minus) / (2.0 * step);
        let block: Mat3 = m.fixed_view::<3, 3>(0, 0).into_owned();
        Twist::new(
            m.fixed_view::<3, 1>(0, 3).into_owned(),
            unskew(&(0.5 * (block - block.transpose()))),
        )
    };
    [along(step, 0.0), along(0.0, step)]
}

pub fn twist_matrix(z: &[Twist; 2]) -> Matrix6x2<f64> {
    Matrix6x2::from_columns(&[z[0].to_vector(), z[1].to_vector()])
}

/// `F_e = X_t X_0^+` where `X` stacks the two twists as columns and `X_0^+`
/// is the Moore-Penrose pseudo-inverse.
pub fn local_deformation_gradient(zeta_t: &[Twist; 2], zeta_0: &[Twist; 2]) -> Result<Mat6> {
    let x0 = twist_matrix(zeta_0);
    let xt = twist_matrix(zeta_t);
    let gram = x0.transpose() * x0;
    let scale = gram.abs().max();
    if gram.determinant().abs() <= 1e-14 * scale * scale {
        return Err(ShellError::DegenerateReference(
            "reference twists are linearly dependent".into(),
        ));
    }
    let inv = gram.try_inverse().ok_or_else(|| {
        ShellError::DegenerateReference("reference twist Gram matrix is singular".into())
    })?;
    Ok(xt * inv * x0.transpose())
}

pub fn strain(zeta_t: &[Twist; 2], zeta_0: &[Twist; 2]) -> StrainMatrix {
    twist_matrix(zeta_t) - twist_matrix(zeta_0)
}

/// Covariant metric `A_ab = C0_a . C0_b` and area element of the reference.
pub fn reference_metric(zeta_0: &[Twist; 2]) -> Result<(Matrix2<f64>, f64)> {
    let (a1, a2) = (zeta_0[0].v, zeta_0[1].v);
    let jac = a1.cross(&a2).norm();
    if !(jac >= DEGENERATE_JACOBIAN) {
        return Err(ShellError::DegenerateReference(format!(
            "surface element |A1 x A2| = {jac:.3e}"
        )));
    }
    let a = Matrix2::new(a1.dot(&a1), a1.dot(&a2), a2.dot(&a1), a2.dot(&a2));
    Ok((a, jac))
}

/// Twists carried by one evaluation point of the shell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeformationState {
    pub pose: Pose,
    pub zeta_t: [Twist; 2],
    pub zeta_0: [Twist; 2],
    pub jac0: f64,
}

impl DeformationState {
    pub fn reference(pose: Pose, zeta_0: [Twist; 2]) -> Result<Self> {
        let (_, jac0) = reference_metric(&zeta_0)?;
        Ok(DeformationState {
            pose,
            zeta_t: zeta_0,
            zeta_0,
            jac0,
        })
    }

    pub fn strain(&self) -> StrainMatrix {
        strain(&self.zeta_t, &self.zeta_0)
    }

    /// Applies the increment field `eta` with chart derivatives `d_eta`
    /// sampled at this point: `g <- g exp(eta)` and
    /// `zeta_a <- Ad(exp(-eta)) zeta_a + dexp(eta) d_eta_a`.
    pub fn apply_increment(&mut self, eta: &Twist, d_eta: &[Twist; 2]) {
        let step = exp_se3(eta);
        self.pose = self.pose.compose(&step);
        renormalize(&mut self.pose);
        self.zeta_t = update_twists(&self.zeta_t, eta, d_eta);
    }
}

pub fn update_twists(zeta: &[Twist; 2], eta: &Twist, d_eta: &[Twist; 2]) -> [Twist; 2] {
    let back = exp_se3(eta).inverse().adjoint();
    let dexp = dexp_se3(eta);
    let one =
        |z: &Twist, d: &Twist| Twist::from_vector(&(back * z.to_vector() + dexp * d.to_vector()));
    [one(&zeta[0], &d_eta[0]), one(&zeta[1], &d_eta[1])]
}

/// Re-projects the rotation onto SO(3) once accumulated round-off exceeds 1e-12.
pub(crate) fn renormalize(pose: &mut Pose) {
    if pose.rotation.orthonormality_drift() > 1e-12 {
        pose.rotation = pose.rotation.orthonormalized();
    }
}

/// Rank of a matrix by singular values above `tol * max`.
pub fn numerical_rank(m: &Mat6, tol: f64) -> usize {
    let sv = m.singular_values();
    let max = sv.max();
    sv.iter().filter(|&&s| s > tol * max).count()
}
