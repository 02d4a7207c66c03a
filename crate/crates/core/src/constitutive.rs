//! Linear isotropic stress law for Cosserat shells.
//!
//! The stiffness couples the strain twists `E_1, E_2` through four 6x6 blocks
//! `D^ab = E h / (1 - nu^2) * blockdiag(D1^ab, h^2/12 * D2^ab)`, whose 2x2
//! in-surface entries are `H^{a i b j}` with
//! `H^{abcd} = nu A^ab A^cd + (1 - nu) A^ac A^bd`.
//!
//! The tabulated bending blocks act on the curvature tensor `kappa_a`, whose
//! first component is the rotation about director 2 and whose second is minus
//! the rotation about director 1. [`StiffnessBlocks::operator`] converts them
//! to the twist (wryness) basis used everywhere else.

use nalgebra::{Matrix2, SMatrix};

use crate::error::{Result, ShellError};
use crate::kinematics::StrainMatrix;
use crate::liegroup::{Mat3, Mat6, Wrench};

pub type Mat12 = SMatrix<f64, 12, 12>;
pub type Vec12 = SMatrix<f64, 12, 1>;

/// Elastic constants and thickness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Material {
    pub e: f64,
    pub nu: f64,
    pub h: f64,
}

impl Material {
    pub fn new(e: f64, nu: f64, h: f64) -> Result<Self> {
        if !(e > 0.0) || !(nu > -1.0 && nu < 0.5) || !(h > 0.0) {
            return Err(ShellError::Domain(format!(
                "material requires E > 0, -1 < nu < 0.5, h > 0 (got E={e}, nu={nu}, h={h})"
            )));
        }
        Ok(Material { e, nu, h })
    }

    /// Material from Lame constants `mu` (shear modulus) and `lambda`.
    pub fn from_lame(mu: f64, lambda: f64, h: f64) -> Result<Self> {
        let (e, nu) = lame_to_young(mu, lambda);
        Material::new(e, nu, h)
    }

    /// Membrane stiffness `E h / (1 - nu^2)`.
    pub fn membrane_modulus(&self) -> f64 {
        self.e * self.h / (1.0 - self.nu * self.nu)
    }

    /// Plate bending stiffness `E h^3 / (12 (1 - nu^2))`.
    pub fn bending_modulus(&self) -> f64 {
        self.membrane_modulus() * self.h * self.h / 12.0
    }
}

/// `(E, nu)` from Lame constants.
pub fn lame_to_young(mu: f64, lambda: f64) -> (f64, f64) {
    (
        mu * (3.0 * lambda + 2.0 * mu) / (lambda + mu),
        lambda / (2.0 * (lambda + mu)),
    )
}

/// `H^{abcd}` indexed `[a][b][c][d]` with zero-based indices.
pub type HTensor = [[[[f64; 2]; 2]; 2]; 2];

pub fn h_tensor(ainv: &Matrix2<f64>, nu: f64) -> HTensor {
    let mut h = [[[[0.0; 2]; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    h[a][b][c][d] =
                        nu * ainv[(a, b)] * ainv[(c, d)] + (1.0 - nu) * ainv[(a, c)] * ainv[(b, d)];
                }
            }
        }
    }
    h
}

/// The four blocks `D^ab` in the tabulated (curvature-tensor) form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StiffnessBlocks {
    pub d: [[Mat6; 2]; 2],
}

/// Maps a wryness vector to curvature-tensor components.
fn curvature_map() -> Mat3 {
    Mat3::new(0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0)
}

pub fn stiffness_blocks(mat: &Material, ainv: &Matrix2<f64>) -> StiffnessBlocks {
    let h = h_tensor(ainv, mat.nu);
    let scale = mat.membrane_modulus();
    let bend = mat.h * mat.h / 12.0;
    let mut d = [[Mat6::zeros(); 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut block = Mat6::zeros();
            for i in 0..2 {
                for j in 0..2 {
                    block[(i, j)] = h[a][i][b][j];
                    block[(3 + i, 3 + j)] = bend * h[a][i][b][j];
                }
            }
            block[(2, 2)] = 0.5 * (1.0 - mat.nu) * ainv[(a, b)];
            block[(5, 5)] = bend * (1.0 - mat.nu) * ainv[(a, b)];
            d[a][b] = block * scale;
        }
    }
    StiffnessBlocks { d }
}

impl StiffnessBlocks {
    /// Block `D^ab` acting on strain twists `(C_b; Gamma_b)`.
    pub fn twist_block(&self, a: usize, b: usize) -> Mat6 {
        let q = curvature_map();
        let mut m = self.d[a][b];
        let bending: Mat3 = m.fixed_view::<3, 3>(3, 3).into_owned();
        m.fixed_view_mut::<3, 3>(3, 3)
            .copy_from(&(q.transpose() * bending * q));
        m
    }

    /// 12x12 operator acting on the stacked strain `(E_1; E_2)`.
    pub fn operator(&self) -> Mat12 {
        let mut m = Mat12::zeros();
        for a in 0..2 {
            for b in 0..2 {
                m.fixed_view_mut::<6, 6>(6 * a, 6 * b)
                    .copy_from(&self.twist_block(a, b));
            }
        }
        m
    }
}

pub fn stack_strain(e: &StrainMatrix) -> Vec12 {
    let mut v = Vec12::zeros();
    v.fixed_rows_mut::<6>(0).copy_from(&e.column(0));
    v.fixed_rows_mut::<6>(6).copy_from(&e.column(1));
    v
}

pub fn split_stress(s: &Vec12) -> [Wrench; 2] {
    [
        Wrench::from_vector(&s.fixed_rows::<6>(0).into_owned()),
        Wrench::from_vector(&s.fixed_rows::<6>(6).into_owned()),
    ]
}

/// `S^a = sum_b D^ab E_b`.
pub fn stress(blocks: &StiffnessBlocks, e: &StrainMatrix) -> [Wrench; 2] {
    split_stress(&(blocks.operator() * stack_strain(e)))
}

/// `l0 = -1/2 sum_a <S^a, E_a>`; non-positive for admissible materials.
pub fn internal_energy_density(s: &[Wrench; 2], e: &StrainMatrix) -> f64 {
    let pair = |w: &Wrench, col: usize| w.to_vector().dot(&e.column(col));
    -0.5 * (pair(&s[0], 0) + pair(&s[1], 1))
}

/// Modulus of a particle-filled elastomer, `E0 exp(2.5 phi / (1 - 1.35 phi))`.
pub fn magnetic_modulus(e0: f64, phi: f64) -> Result<f64> {
    if !(0.0..1.0 / 1.35).contains(&phi) {
        return Err(ShellError::Domain(format!(
            "volume fraction {phi} outside [0, 1/1.35)"
        )));
    }
    Ok(e0 * (2.5 * phi / (1.0 - 1.35 * phi)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit() -> Matrix2<f64> {
        Matrix2::identity()
    }

    #[test]
    fn h_tensor_identity_metric() {
        let h = h_tensor(&unit(), 0.3);
        assert_relative_eq!(h[0][0][0][0], 1.0);
        assert_relative_eq!(h[0][0][1][1], 0.3);
        assert_relative_eq!(h[0][1][0][1], 0.7);
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        assert_eq!(h[a][b][c][d], h[c][d][a][b]);
                    }
                }
            }
        }
    }

    #[test]
    fn tabulated_blocks_identity_metric() {
        let nu = 0.3;
        let mat = Material::new(1.0 - nu * nu, nu, 1.0).unwrap();
        let d = stiffness_blocks(&mat, &unit()).d;
        let m11 = d[0][0].fixed_view::<3, 3>(0, 0).into_owned();
        assert_relative_eq!(
            m11,
            Mat3::from_diagonal(&[1.0, 0.7, 0.35].into()),
            epsilon = 1e-15
        );
        assert_relative_eq!(d[0][1][(0, 1)], nu, epsilon = 1e-15);
        assert_relative_eq!(d[1][0][(1, 0)], nu, epsilon = 1e-15);
        let m22 = d[1][1].fixed_view::<3, 3>(0, 0).into_owned();
        assert_relative_eq!(
            m22,
            Mat3::from_diagonal(&[0.7, 1.0, 0.35].into()),
            epsilon = 1e-15
        );
        assert_relative_eq!(d[0][0][(5, 5)], 0.7 / 12.0, epsilon = 1e-15);
        assert_eq!(d[0][1][(2, 2)], 0.0);
    }

    #[test]
    fn drilling_entry_scales_with_bending_modulus() {
        let mat = Material::new(200e9, 0.3, 0.01).unwrap();
        let d = stiffness_blocks(&mat, &unit()).d;
        let expected = 200e9 * 1e-6 / (12.0 * (1.0 - 0.09)) * 0.7;
        assert_relative_eq!(d[0][0][(5, 5)], expected, max_relative = 1e-14);
    }

    #[test]
    fn no_poisson_coupling_at_zero_nu() {
        let mat = Material::new(1.0, 0.0, 1.0).unwrap();
        let d = stiffness_blocks(&mat, &unit()).d;
        for i in 0..6 {
            for j in 0..6 {
                if i != j {
                    assert_eq!(d[0][0][(i, j)], 0.0);
                }
            }
        }
        assert_eq!(d[0][1].abs().max(), 0.0);
    }

    #[test]
    fn pure_bending_moment() {
        let (e, nu, h, kappa) = (7.0e6, 0.3, 0.05, 0.4);
        let mat = Material::new(e, nu, h).unwrap();
        let blocks = stiffness_blocks(&mat, &unit());
        let mut strain = StrainMatrix::zeros();
        strain[(4, 0)] = kappa;
        let s = stress(&blocks, &strain);
        let expected = e * h.powi(3) * kappa / (12.0 * (1.0 - nu * nu));
        assert_relative_eq!(s[0].m.y, expected, max_relative = 1e-14);
        assert_relative_eq!(s[0].m.x, 0.0);
        assert_relative_eq!(s[1].m.x, -nu * expected, max_relative = 1e-14);
        assert_relative_eq!(
            internal_energy_density(&s, &strain),
            -0.5 * kappa * expected,
            max_relative = 1e-14
        );
    }

    #[test]
    fn pure_stretch_plane_stress() {
        let mat = Material::new(1.0, 0.25, 1.0).unwrap();
        let blocks = stiffness_blocks(&mat, &unit());
        let mut strain = StrainMatrix::zeros();
        strain[(0, 0)] = 0.01;
        let s = stress(&blocks, &strain);
        let c = 1.0 / (1.0 - 0.0625);
        assert_relative_eq!(s[0].n.x, c * 0.01, max_relative = 1e-14);
        assert_relative_eq!(s[1].n.y, c * 0.25 * 0.01, max_relative = 1e-14);
    }

    #[test]
    fn zero_strain_gives_zero_stress() {
        let mat = Material::new(3.0, 0.2, 0.1).unwrap();
        let s = stress(&stiffness_blocks(&mat, &unit()), &StrainMatrix::zeros());
        assert_eq!(s, [Wrench::zero(); 2]);
    }

    #[test]
    fn lame_conversion() {
        let (e, nu) = lame_to_young(303e3, 7300e3);
        assert_relative_eq!(nu, 7300.0 / (2.0 * 7603.0), max_relative = 1e-14);
        assert_relative_eq!(e, 2.0 * 303e3 * (1.0 + nu), max_relative = 1e-12);
    }

    #[test]
    fn filled_modulus() {
        assert_eq!(magnetic_modulus(1.0, 0.0).unwrap(), 1.0);
        assert_relative_eq!(magnetic_modulus(1.0, 0.06).unwrap(), 1.177, epsilon = 1e-3);
        assert_relative_eq!(magnetic_modulus(1.0, 0.12).unwrap(), 1.430, epsilon = 2e-3);
        assert!(magnetic_modulus(1.0, 0.8).is_err());
        assert!(magnetic_modulus(1.0, -0.1).is_err());
    }

    #[test]
    fn invalid_material_rejected() {
        assert!(Material::new(-1.0, 0.3, 0.1).is_err());
        assert!(Material::new(1.0, 0.5, 0.1).is_err());
        assert!(Material::new(1.0, 0.3, 0.0).is_err());
    }
}
