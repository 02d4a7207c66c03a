//! Bilinear shape functions on the reference square and the chart map.

use crate::error::{Result, ShellError};
use crate::kinematics::ParamPoint;

/// Natural coordinates of the four corners, counter-clockwise.
pub const CORNERS: [(f64, f64); 4] = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];

/// 2x2 Gauss rule: `(x, y, weight)`, one point per corner quadrant.
pub fn gauss_2x2() -> [(f64, f64, f64); 4] {
    let g = 1.0 / 3f64.sqrt();
    [(-g, -g, 1.0), (g, -g, 1.0), (g, g, 1.0), (-g, g, 1.0)]
}

/// `N^i = (1 + x x_i)(1 + y y_i) / 4`.
pub fn shape_values(x: f64, y: f64) -> [f64; 4] {
    CORNERS.map(|(xi, yi)| 0.25 * (1.0 + x * xi) * (1.0 + y * yi))
}

/// `(dN^i/dx, dN^i/dy)` in natural coordinates.
pub fn shape_gradients_natural(x: f64, y: f64) -> [[f64; 2]; 4] {
    CORNERS.map(|(xi, yi)| [0.25 * xi * (1.0 + y * yi), 0.25 * yi * (1.0 + x * xi)])
}

/// Shape functions evaluated at one point, with derivatives taken with
/// respect to the chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapeEval {
    pub n: [f64; 4],
    pub dn: [[f64; 2]; 4],
    /// Determinant of the natural-to-chart jacobian.
    pub det: f64,
    pub point: ParamPoint,
}

/// Evaluates the isoparametric map of a quadrilateral with chart corners
/// `corners` (counter-clockwise) at natural coordinates `(x, y)`.
pub fn shape_functions(corners: &[ParamPoint; 4], x: f64, y: f64) -> Result<ShapeEval> {
    let n = shape_values(x, y);
    let dnat = shape_gradients_natural(x, y);
    let mut jac = [[0.0; 2]; 2];
    let mut point = ParamPoint::default();
    for i in 0..4 {
        let c = corners[i];
        point.xi1 += n[i] * c.xi1;
        point.xi2 += n[i] * c.xi2;
        for k in 0..2 {
            jac[0][k] += dnat[i][k] * c.xi1;
            jac[1][k] += dnat[i][k] * c.xi2;
        }
    }
    let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    if !(det > 1e-14) {
        return Err(ShellError::Mesh(format!(
            "chart jacobian determinant {det:.3e} is not positive (element corners must be counter-clockwise)"
        )));
    }
    // d/dxi = J^-T d/dnatural with J[a][k] = dxi_a / dnat_k.
    let inv = [
        [jac[1][1] / det, -jac[0][1] / det],
        [-jac[1][0] / det, jac[0][0] / det],
    ];
    let dn = dnat.map(|g| {
        [
            inv[0][0] * g[0] + inv[1][0] * g[1],
            inv[0][1] * g[0] + inv[1][1] * g[1],
        ]
    });
    Ok(ShapeEval { n, dn, det, point })
}
