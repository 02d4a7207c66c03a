//! Hard-magnetic body couples.
//!
//! The remanent field is frozen into the material and rotates with the local
//! frame; a spatially constant applied field exerts no net force, only the
//! couple `(1/mu0) B_r x B_a` per unit reference area. In the local frame this
//! reads `(1/mu0) c x b` with `c = R0^T B_r0` (fixed) and `b = Rt^T B_a`.

use crate::liegroup::{skew, Mat3, Rotation, Vec3};

/// Vacuum permeability in T m / A.
pub const MU0: f64 = 4.0e-7 * std::f64::consts::PI;

/// Spatially constant applied field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MagneticEnvironment {
    pub b_applied: Vec3,
    pub mu0: f64,
}

impl MagneticEnvironment {
    pub fn new(b_applied: Vec3) -> Self {
        MagneticEnvironment {
            b_applied,
            mu0: MU0,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        MagneticEnvironment {
            b_applied: self.b_applied * factor,
            mu0: self.mu0,
        }
    }
}

impl Default for MagneticEnvironment {
    fn default() -> Self {
        MagneticEnvironment::new(Vec3::zeros())
    }
}

/// `B_rt = Rt R0^T B_r0`.
pub fn rotated_remanent(rt: &Rotation, r0: &Rotation, b_r0: &Vec3) -> Vec3 {
    rt.matrix() * (r0.matrix().transpose() * b_r0)
}

/// Couple per unit reference area in the inertial frame.
pub fn magnetic_couple(b_rt: &Vec3, env: &MagneticEnvironment) -> Vec3 {
    b_rt.cross(&env.b_applied) / env.mu0
}

/// Remanent field pulled back to the reference frame of a point.
pub fn material_remanent(r0: &Rotation, b_r0: &Vec3) -> Vec3 {
    r0.matrix().transpose() * b_r0
}

/// Local-frame couple density `(1/mu0) c x (Rt^T B_a)`.
pub fn local_couple(c: &Vec3, rt: &Rotation, env: &MagneticEnvironment) -> Vec3 {
    let b = rt.matrix().transpose() * env.b_applied;
    c.cross(&b) / env.mu0
}

/// Derivative of [`local_couple`] with respect to a right rotation increment:
/// `(1/mu0) c^ b^`.
pub fn local_couple_stiffness(c: &Vec3, rt: &Rotation, env: &MagneticEnvironment) -> Mat3 {
    let b = rt.matrix().transpose() * env.b_applied;
    skew(c) * skew(&b) / env.mu0
}

/// Magnetic potential energy per unit reference area, `-(1/mu0) B_rt . B_a`.
pub fn potential_density(c: &Vec3, rt: &Rotation, env: &MagneticEnvironment) -> f64 {
    -(rt.matrix() * c).dot(&env.b_applied) / env.mu0
}
