//! Lagrange shape functions on the reference triangle and the affine map
//! to physical cells.
//!
//! P2 local nodes are ordered `v0, v1, v2, m01, m12, m20`, so node `3 + k`
//! sits on local edge `k`.

use crate::mesh::Mesh;

/// Affine map `x = x0 + J ξ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellGeometry {
    pub origin: [f64; 2],
    pub jac: [[f64; 2]; 2],
    pub det: f64,
    /// `J⁻ᵀ`, maps reference gradients to physical gradients.
    pub inv_t: [[f64; 2]; 2],
}

impl CellGeometry {
    pub fn new(v: [[f64; 2]; 3]) -> Self {
        let jac = [
            [v[1][0] - v[0][0], v[2][0] - v[0][0]],
            [v[1][1] - v[0][1], v[2][1] - v[0][1]],
        ];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv_t = [
            [jac[1][1] / det, -jac[1][0] / det],
            [-jac[0][1] / det, jac[0][0] / det],
        ];
        CellGeometry {
            origin: v[0],
            jac,
            det,
            inv_t,
        }
    }

    pub fn of_cell(mesh: &Mesh, cell: usize) -> Self {
        let t = mesh.triangles[cell];
        Self::new([mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]])
    }

    pub fn map(&self, xi: [f64; 2]) -> [f64; 2] {
        [
            self.origin[0] + self.jac[0][0] * xi[0] + self.jac[0][1] * xi[1],
            self.origin[1] + self.jac[1][0] * xi[0] + self.jac[1][1] * xi[1],
        ]
    }

    pub fn inverse_map(&self, x: [f64; 2]) -> [f64; 2] {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        // J⁻¹ = (J⁻ᵀ)ᵀ
        [
            self.inv_t[0][0] * d[0] + self.inv_t[1][0] * d[1],
            self.inv_t[0][1] * d[0] + self.inv_t[1][1] * d[1],
        ]
    }

    pub fn grad(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv_t[0][0] * g[0] + self.inv_t[0][1] * g[1],
            self.inv_t[1][0] * g[0] + self.inv_t[1][1] * g[1],
        ]
    }
}

fn barycentric(xi: [f64; 2]) -> [f64; 3] {
    [1.0 - xi[0] - xi[1], xi[0], xi[1]]
}

const BARY_GRAD: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];

pub fn p1_values(xi: [f64; 2]) -> [f64; 3] {
    barycentric(xi)
}

pub fn p1_ref_grads() -> [[f64; 2]; 3] {
    BARY_GRAD
}

pub fn p2_values(xi: [f64; 2]) -> [f64; 6] {
    let l = barycentric(xi);
    [
        l[0] * (2.0 * l[0] - 1.0),
        l[1] * (2.0 * l[1] - 1.0),
        l[2] * (2.0 * l[2] - 1.0),
        4.0 * l[0] * l[1],
        4.0 * l[1] * l[2],
        4.0 * l[2] * l[0],
    ]
}

pub fn p2_ref_grads(xi: [f64; 2]) -> [[f64; 2]; 6] {
    let l = barycentric(xi);
    let g = BARY_GRAD;
    let mut out = [[0.0; 2]; 6];
    for i in 0..3 {
        for d in 0..2 {
            out[i][d] = (4.0 * l[i] - 1.0) * g[i][d];
        }
    }
    for k in 0..3 {
        let (a, b) = (k, (k + 1) % 3);
        for d in 0..2 {
            out[3 + k][d] = 4.0 * (g[a][d] * l[b] + l[a] * g[b][d]);
        }
    }
    out
}
