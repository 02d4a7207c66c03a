//! Closed-form kinematic algebra of SE(3).
//!
//! Twists are ordered `(v; w)`: linear part first, angular part second, and
//! every 6x6 operator in this module follows that block layout. Wrenches are
//! ordered `(n; m)` (force; moment) and pair with twists as `n.v + m.w`.
//!
//! The exponential map and its left-trivialized differential switch to Taylor
//! series below [`SERIES_THRESHOLD`], where the closed forms lose digits to
//! cancellation.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, Matrix4, Matrix6, Vector3, Vector6};

use crate::error::{Result, ShellError};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;
pub type Vec6 = Vector6<f64>;
pub type Mat6 = Matrix6<f64>;

/// Below this rotation angle the trigonometric coefficient functions are
/// evaluated from their Taylor expansions.
pub const SERIES_THRESHOLD: f64 = 1e-2;

/// Largest rotation angle accepted by [`log_se3`].
pub const LOG_ANGLE_LIMIT: f64 = std::f64::consts::PI - 1e-6;

/// `skew(v) * y == v.cross(&y)`.
pub fn skew(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Inverse of [`skew`]; reads the strictly lower triangle.
pub fn unskew(m: &Mat3) -> Vec3 {
    Vec3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
}

/// A proper rotation matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation(Mat3);

impl Rotation {
    pub const ORTHONORMAL_TOL: f64 = 1e-10;

    pub fn identity() -> Self {
        Rotation(Mat3::identity())
    }

    /// Wraps a matrix after checking `R^T R = I` and `det R = 1` within
    /// [`Rotation::ORTHONORMAL_TOL`].
    pub fn from_matrix(m: Mat3) -> Result<Self> {
        let drift = (m.transpose() * m - Mat3::identity()).abs().max();
        let det = m.determinant();
        if !drift.is_finite()
            || drift > Self::ORTHONORMAL_TOL
            || (det - 1.0).abs() > Self::ORTHONORMAL_TOL
        {
            return Err(ShellError::Domain(format!(
                "not a rotation matrix (orthonormality drift {drift:.3e}, det {det})"
            )));
        }
        Ok(Rotation(m))
    }

    /// Rotation by `angle` about the unit vector `axis`.
    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Self {
        exp_so3(&(axis.normalize() * angle))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Rotation(self.0.transpose())
    }

    pub fn inverse(&self) -> Self {
        self.transpose()
    }

    pub fn rotate(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    /// Rotation angle in `[0, pi]`.
    pub fn angle(&self) -> f64 {
        ((self.0.trace() - 1.0) * 0.5).clamp(-1.0, 1.0).acos()
    }

    /// Largest entry of `R^T R - I`.
    pub fn orthonormality_drift(&self) -> f64 {
        (self.0.transpose() * self.0 - Mat3::identity()).abs().max()
    }

    /// Nearest rotation in the Frobenius sense (polar factor).
    pub fn orthonormalized(&self) -> Self {
        let svd = self.0.svd(true, true);
        let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
        let mut r = u * v_t;
        if r.determinant() < 0.0 {
            let mut u = u;
            u.column_mut(2).neg_mut();
            r = u * v_t;
        }
        Rotation(r)
    }
}

impl Mul for Rotation {
    type Output = Rotation;
    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

/// Rigid transformation `g = (R, P)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub rotation: Rotation,
    pub translation: Vec3,
}

impl Pose {
    pub fn identity() -> Self {
        Pose {
            rotation: Rotation::identity(),
            translation: Vec3::zeros(),
        }
    }

    pub fn new(rotation: Rotation, translation: Vec3) -> Self {
        Pose {
            rotation,
            translation,
        }
    }

    pub fn from_translation(p: Vec3) -> Self {
        Pose::new(Rotation::identity(), p)
    }

    pub fn from_rotation(r: Rotation) -> Self {
        Pose::new(r, Vec3::zeros())
    }

    pub fn inverse(&self) -> Pose {
        let rt = self.rotation.transpose();
        Pose::new(rt, -(rt.matrix() * self.translation))
    }

    pub fn compose(&self, other: &Pose) -> Pose {
        Pose::new(
            self.rotation * other.rotation,
            self.rotation.matrix() * other.translation + self.translation,
        )
    }

    /// Maps a point from the local frame into the ambient frame.
    pub fn transform_point(&self, x: &Vec3) -> Vec3 {
        self.rotation.matrix() * x + self.translation
    }

    /// Homogeneous 4x4 representation.
    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(self.rotation.matrix());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    /// Adjoint matrix `[[R, P^ R], [0, R]]` mapping twists between frames.
    pub fn adjoint(&self) -> Mat6 {
        let r = self.rotation.matrix();
        let mut ad = Mat6::zeros();
        ad.fixed_view_mut::<3, 3>(0, 0).copy_from(r);
        ad.fixed_view_mut::<3, 3>(0, 3)
            .copy_from(&(skew(&self.translation) * r));
        ad.fixed_view_mut::<3, 3>(3, 3).copy_from(r);
        ad
    }

    /// Largest absolute difference of rotation and translation entries.
    pub fn distance_max(&self, other: &Pose) -> f64 {
        let dr = (self.rotation.matrix() - other.rotation.matrix())
            .abs()
            .max();
        let dp = (self.translation - other.translation).abs().max();
        dr.max(dp)
    }
}

impl Mul for Pose {
    type Output = Pose;
    fn mul(self, rhs: Pose) -> Pose {
        self.compose(&rhs)
    }
}

/// Element of se(3): linear velocity `v` and angular velocity `w`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Twist {
    pub v: Vec3,
    pub w: Vec3,
}

impl Twist {
    pub fn new(v: Vec3, w: Vec3) -> Self {
        Twist { v, w }
    }

    pub fn zero() -> Self {
        Twist::default()
    }

    pub fn from_vector(x: &Vec6) -> Self {
        Twist {
            v: x.fixed_rows::<3>(0).into(),
            w: x.fixed_rows::<3>(3).into(),
        }
    }

    pub fn to_vector(&self) -> Vec6 {
        Vec6::new(self.v.x, self.v.y, self.v.z, self.w.x, self.w.y, self.w.z)
    }

    pub fn norm(&self) -> f64 {
        self.to_vector().norm()
    }
}

impl Add for Twist {
    type Output = Twist;
    fn add(self, rhs: Twist) -> Twist {
        Twist::new(self.v + rhs.v, self.w + rhs.w)
    }
}

impl Sub for Twist {
    type Output = Twist;
    fn sub(self, rhs: Twist) -> Twist {
        Twist::new(self.v - rhs.v, self.w - rhs.w)
    }
}

impl Neg for Twist {
    type Output = Twist;
    fn neg(self) -> Twist {
        Twist::new(-self.v, -self.w)
    }
}

impl Mul<f64> for Twist {
    type Output = Twist;
    fn mul(self, s: f64) -> Twist {
        Twist::new(self.v * s, self.w * s)
    }
}

/// Element of se(3)*: force `n` and moment `m`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Wrench {
    pub n: Vec3,
    pub m: Vec3,
}

impl Wrench {
    pub fn new(n: Vec3, m: Vec3) -> Self {
        Wrench { n, m }
    }

    pub fn zero() -> Self {
        Wrench::default()
    }

    pub fn from_vector(x: &Vec6) -> Self {
        Wrench {
            n: x.fixed_rows::<3>(0).into(),
            m: x.fixed_rows::<3>(3).into(),
        }
    }

    pub fn to_vector(&self) -> Vec6 {
        Vec6::new(self.n.x, self.n.y, self.n.z, self.m.x, self.m.y, self.m.z)
    }

    /// Natural pairing `<wrench, twist> = n.v + m.w`.
    pub fn pair(&self, t: &Twist) -> f64 {
        self.n.dot(&t.v) + self.m.dot(&t.w)
    }
}

impl Add for Wrench {
    type Output = Wrench;
    fn add(self, rhs: Wrench) -> Wrench {
        Wrench::new(self.n + rhs.n, self.m + rhs.m)
    }
}

impl Mul<f64> for Wrench {
    type Output = Wrench;
    fn mul(self, s: f64) -> Wrench {
        Wrench::new(self.n * s, self.m * s)
    }
}

pub fn hat_se3(t: &Twist) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&skew(&t.w));
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(&t.v);
    m
}

/// Inverse of [`hat_se3`]. Rejects matrices whose rotational block is not
/// skew-symmetric or whose last row is not zero.
pub fn vee_se3(m: &Matrix4<f64>) -> Result<Twist> {
    let scale = m.abs().max().max(1.0);
    let tol = 1e-12 * scale;
    let block = m.fixed_view::<3, 3>(0, 0).into_owned();
    let asym = (block + block.transpose()).abs().max();
    if asym > tol {
        return Err(ShellError::NotInAlgebra(format!(
            "rotational block is not skew-symmetric (|A + A^T| = {asym:.3e})"
        )));
    }
    let last_row = m.row(3).abs().max();
    if last_row > tol {
        return Err(ShellError::NotInAlgebra(format!(
            "last row is not zero (max entry {last_row:.3e})"
        )));
    }
    Ok(Twist::new(
        m.fixed_view::<3, 1>(0, 3).into_owned(),
        unskew(&block),
    ))
}

/// `(sin t / t, (1 - cos t) / t^2, (t - sin t) / t^3)`.
fn rodrigues_coefficients(theta: f64) -> (f64, f64, f64) {
    if theta < SERIES_THRESHOLD {
        let t2 = theta * theta;
        let t4 = t2 * t2;
        (
            1.0 - t2 / 6.0 + t4 / 120.0 - t4 * t2 / 5040.0,
            0.5 - t2 / 24.0 + t4 / 720.0 - t4 * t2 / 40320.0,
            1.0 / 6.0 - t2 / 120.0 + t4 / 5040.0 - t4 * t2 / 362880.0,
        )
    } else {
        let s = theta.sin();
        let half = (0.5 * theta).sin();
        let t2 = theta * theta;
        (
            s / theta,
            2.0 * half * half / t2,
            (theta - s) / (t2 * theta),
        )
    }
}

pub fn exp_so3(w: &Vec3) -> Rotation {
    let theta = w.norm();
    let (a, b, _) = rodrigues_coefficients(theta);
    let k = skew(w);
    Rotation(Mat3::identity() + k * a + k * k * b)
}

/// `T(w)`, the matrix multiplying the linear part in the exponential map.
/// It coincides with the left Jacobian of SO(3).
pub fn exp_translation_matrix(w: &Vec3) -> Mat3 {
    let theta = w.norm();
    let (_, b, c) = rodrigues_coefficients(theta);
    let k = skew(w);
    Mat3::identity() + k * b + k * k * c
}

/// Group exponential `exp(t^) = (exp(w^), T(w) v)`.
pub fn exp_se3(t: &Twist) -> Pose {
    Pose::new(exp_so3(&t.w), exp_translation_matrix(&t.w) * t.v)
}

/// Rotation vector of `r`; requires the angle to stay below
/// [`LOG_ANGLE_LIMIT`].
pub fn log_so3(r: &Rotation) -> Result<Vec3> {
    let theta = r.angle();
    if theta >= LOG_ANGLE_LIMIT {
        return Err(ShellError::LogDomain { angle: theta });
    }
    let m = r.matrix();
    let axial = unskew(&(m - m.transpose()));
    let coef = if theta < SERIES_THRESHOLD {
        let t2 = theta * theta;
        0.5 + t2 / 12.0 + 7.0 * t2 * t2 / 720.0
    } else {
        theta / (2.0 * theta.sin())
    };
    Ok(axial * coef)
}

/// Inverse of [`exp_se3`] on the principal branch.
pub fn log_se3(g: &Pose) -> Result<Twist> {
    let w = log_so3(&g.rotation)?;
    let theta = w.norm();
    let k = skew(&w);
    let c = if theta < SERIES_THRESHOLD {
        let t2 = theta * theta;
        1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0
    } else {
        let half = 0.5 * theta;
        (1.0 - half / half.tan()) / (theta * theta)
    };
    let t_inv = Mat3::identity() - k * 0.5 + k * k * c;
    Ok(Twist::new(t_inv * g.translation, w))
}

/// `ad_t = [[w^, v^], [0, w^]]`, so that `ad_t s = [t^, s^]^v`.
pub fn ad(t: &Twist) -> Mat6 {
    let w = skew(&t.w);
    let mut m = Mat6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&w);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(&skew(&t.v));
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&w);
    m
}

/// Co-adjoint operator, the transpose of [`ad`].
pub fn ad_dual(t: &Twist) -> Mat6 {
    ad(t).transpose()
}

/// `ad~_s = [[0, n^], [n^, m^]]`, defined by `ad~_s t = ad*_t s`.
pub fn ad_tilde(s: &Wrench) -> Mat6 {
    let n = skew(&s.n);
    let mut m = Mat6::zeros();
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(&n);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(&n);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&skew(&s.m));
    m
}

/// Left-trivialized differential of the exponential:
/// `(exp(-t^) D exp(t^)[u^])^v = dexp_se3(t) u`.
///
/// This is `sum_k (-ad_t)^k / (k+1)!`, evaluated in closed form as the left
/// Jacobian at `-t`.
pub fn dexp_se3(t: &Twist) -> Mat6 {
    left_jacobian(&-*t)
}

fn left_jacobian(t: &Twist) -> Mat6 {
    let (rho, phi) = (&t.v, &t.w);
    let theta = phi.norm();
    let jl = exp_translation_matrix(phi);

    let p = skew(phi);
    let r = skew(rho);
    let pr = p * r;
    let rp = r * p;
    let prp = pr * p;
    let (c1, c2, c3) = if theta < 0.1 {
        let t2 = theta * theta;
        let t4 = t2 * t2;
        (
            1.0 / 6.0 - t2 / 120.0 + t4 / 5040.0 - t4 * t2 / 362880.0,
            1.0 / 24.0 - t2 / 720.0 + t4 / 40320.0 - t4 * t2 / 3628800.0,
            1.0 / 120.0 - t2 / 2520.0 + t4 / 120960.0 - t4 * t2 / 9979200.0,
        )
    } else {
        let (s, c) = theta.sin_cos();
        let t2 = theta * theta;
        (
            (theta - s) / (t2 * theta),
            (t2 + 2.0 * c - 2.0) / (2.0 * t2 * t2),
            (2.0 * theta - 3.0 * s + theta * c) / (2.0 * t2 * t2 * theta),
        )
    };
    let q = r * 0.5
        + (pr + rp + prp) * c1
        + (p * pr + rp * p - prp * 3.0) * c2
        + (prp * p + p * prp) * c3;

    let mut m = Mat6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&jl);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(&q);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&jl);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn hat_of_zero_is_zero() {
        assert_eq!(hat_se3(&Twist::zero()), Matrix4::zeros());
    }

    #[test]
    fn vee_inverts_hat() {
        let t = Twist::new(Vec3::new(1.0, 2.0, 3.0), Vec3::new(4.0, 5.0, 6.0));
        assert_eq!(vee_se3(&hat_se3(&t)).unwrap(), t);
    }

    #[test]
    fn hat_of_unit_z_rotation() {
        let m = hat_se3(&Twist::new(Vec3::zeros(), Vec3::z()));
        let expected = Mat3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(m.fixed_view::<3, 3>(0, 0).into_owned(), expected);
    }

    #[test]
    fn vee_rejects_non_algebra_matrices() {
        let mut m = hat_se3(&Twist::new(Vec3::x(), Vec3::y()));
        m[(0, 1)] += 0.5;
        assert!(matches!(vee_se3(&m), Err(ShellError::NotInAlgebra(_))));
        let mut m = hat_se3(&Twist::zero());
        m[(3, 3)] = 1.0;
        assert!(matches!(vee_se3(&m), Err(ShellError::NotInAlgebra(_))));
    }

    #[test]
    fn exp_of_pure_translation() {
        let v = Vec3::new(0.3, -1.0, 2.0);
        let g = exp_se3(&Twist::new(v, Vec3::zeros()));
        assert_eq!(*g.rotation.matrix(), Mat3::identity());
        assert_eq!(g.translation, v);
        assert_eq!(exp_se3(&Twist::zero()), Pose::identity());
    }

    #[test]
    fn exp_quarter_turn_about_z() {
        let g = exp_se3(&Twist::new(Vec3::x(), Vec3::new(0.0, 0.0, PI / 2.0)));
        let rz = Mat3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        assert_relative_eq!(*g.rotation.matrix(), rz, epsilon = 1e-15);
        // Integrating a unit forward speed along a quarter circle of radius 2/pi.
        assert_relative_eq!(
            g.translation,
            Vec3::new(2.0 / PI, 2.0 / PI, 0.0),
            epsilon = 1e-15
        );
    }

    #[test]
    fn series_branch_is_continuous() {
        for &theta in &[
            0.5 * SERIES_THRESHOLD,
            SERIES_THRESHOLD,
            1.5 * SERIES_THRESHOLD,
        ] {
            let w = Vec3::new(0.6, -0.8, 0.0) * theta;
            let (a, b, c) = rodrigues_coefficients(theta);
            let (s, co) = theta.sin_cos();
            assert_relative_eq!(a, s / theta, max_relative = 1e-12);
            assert_relative_eq!(b, (1.0 - co) / (theta * theta), max_relative = 1e-8);
            assert_relative_eq!(c, 1.0 / 6.0, max_relative = 1e-3);
            assert!(exp_so3(&w).orthonormality_drift() < 1e-15);
        }
    }

    #[test]
    fn log_of_identity_and_translation() {
        assert_eq!(log_se3(&Pose::identity()).unwrap(), Twist::zero());
        let p = Vec3::new(1.0, 2.0, -3.0);
        let t = log_se3(&Pose::from_translation(p)).unwrap();
        assert_eq!(t, Twist::new(p, Vec3::zeros()));
    }

    #[test]
    fn log_rejects_half_turn() {
        let g = Pose::from_rotation(Rotation::from_axis_angle(&Vec3::x(), PI));
        assert!(matches!(log_se3(&g), Err(ShellError::LogDomain { .. })));
    }

    #[test]
    fn adjoint_of_identity_and_translation() {
        assert_eq!(Pose::identity().adjoint(), Mat6::identity());
        let ad = Pose::from_translation(Vec3::x()).adjoint();
        let expected = Mat3::new(0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0);
        assert_eq!(ad.fixed_view::<3, 3>(0, 3).into_owned(), expected);
    }

    #[test]
    fn small_ad_matches_matrix_commutator() {
        let xi = Twist::new(Vec3::x(), Vec3::y());
        for k in 0..6 {
            let mut e = Vec6::zeros();
            e[k] = 1.0;
            let eta = Twist::from_vector(&e);
            let (a, b) = (hat_se3(&xi), hat_se3(&eta));
            let bracket = vee_se3(&(a * b - b * a)).unwrap().to_vector();
            assert_relative_eq!(ad(&xi) * e, bracket, epsilon = 1e-15);
        }
        let mut expected = Mat6::zeros();
        expected
            .fixed_view_mut::<3, 3>(0, 0)
            .copy_from(&skew(&Vec3::y()));
        expected
            .fixed_view_mut::<3, 3>(0, 3)
            .copy_from(&skew(&Vec3::x()));
        expected
            .fixed_view_mut::<3, 3>(3, 3)
            .copy_from(&skew(&Vec3::y()));
        assert_eq!(ad(&xi), expected);
    }

    #[test]
    fn ad_annihilates_its_argument() {
        let t = Twist::new(Vec3::new(0.1, -2.0, 0.3), Vec3::new(1.0, 0.5, -0.7));
        assert!((ad(&t) * t.to_vector()).norm() < 1e-15);
    }

    #[test]
    fn dexp_at_zero_is_identity() {
        assert_eq!(dexp_se3(&Twist::zero()), Mat6::identity());
    }
}
