//! Reference-element shape functions.
//!
//! Velocity uses the quadratic Lagrange basis enriched with a cubic interior
//! bubble (seven scalar functions per triangle); pressure uses the linear
//! basis, discontinuous across elements. The bubble vanishes on all three
//! edges, so inter-element traces are plain quadratics and the continuous
//! scalar unknowns live on vertices and edge midpoints only.

/// Number of continuous scalar velocity functions per element (3 vertex +
/// 3 edge midpoint); the bubble is the 7th, local to the element.
pub const N_SCALAR: usize = 6;
pub const N_VEL: usize = 7;
pub const N_PRES: usize = 3;

/// Values of the 7 velocity shape functions at a reference point.
/// Order: vertex 0, 1, 2; edge (0,1), (1,2), (2,0); bubble.
pub fn shape_values(xi: f64, eta: f64) -> [f64; N_VEL] {
    let l = [1.0 - xi - eta, xi, eta];
    [
        l[0] * (2.0 * l[0] - 1.0),
        l[1] * (2.0 * l[1] - 1.0),
        l[2] * (2.0 * l[2] - 1.0),
        4.0 * l[0] * l[1],
        4.0 * l[1] * l[2],
        4.0 * l[2] * l[0],
        27.0 * l[0] * l[1] * l[2],
    ]
}

/// Reference gradients of the 7 velocity shape functions.
pub fn shape_grads(xi: f64, eta: f64) -> [[f64; 2]; N_VEL] {
    let l = [1.0 - xi - eta, xi, eta];
    let dl = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
    let mut g = [[0.0; 2]; N_VEL];
    for k in 0..3 {
        let c = 4.0 * l[k] - 1.0;
        g[k] = [c * dl[k][0], c * dl[k][1]];
    }
    let edge = [(0usize, 1usize), (1, 2), (2, 0)];
    for (m, &(a, b)) in edge.iter().enumerate() {
        g[3 + m] = [
            4.0 * (l[a] * dl[b][0] + l[b] * dl[a][0]),
            4.0 * (l[a] * dl[b][1] + l[b] * dl[a][1]),
        ];
    }
    g[6] = [
        27.0 * (l[1] * l[2] * dl[0][0] + l[0] * l[2] * dl[1][0] + l[0] * l[1] * dl[2][0]),
        27.0 * (l[1] * l[2] * dl[0][1] + l[0] * l[2] * dl[1][1] + l[0] * l[1] * dl[2][1]),
    ];
    g
}

/// Values of the 3 pressure shape functions (barycentric coordinates).
pub fn pressure_values(xi: f64, eta: f64) -> [f64; N_PRES] {
    [1.0 - xi - eta, xi, eta]
}

/// Affine geometry of one triangle: Jacobian inverse-transpose rows and the
/// absolute Jacobian determinant.
#[derive(Debug, Clone, Copy)]
pub struct TriGeom {
    /// Rows of J⁻ᵀ: physical gradient = jinv_t · reference gradient.
    pub jinv_t: [[f64; 2]; 2],
    pub det: f64,
    pub origin: [f64; 2],
    pub jac: [[f64; 2]; 2],
}

impl TriGeom {
    pub fn new(c: &[[f64; 2]; 3]) -> Self {
        let jac = [
            [c[1][0] - c[0][0], c[2][0] - c[0][0]],
            [c[1][1] - c[0][1], c[2][1] - c[0][1]],
        ];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv = [
            [jac[1][1] / det, -jac[0][1] / det],
            [-jac[1][0] / det, jac[0][0] / det],
        ];
        // J⁻ᵀ rows: (J⁻¹)ᵀ
        TriGeom {
            jinv_t: [[inv[0][0], inv[1][0]], [inv[0][1], inv[1][1]]],
            det: det.abs(),
            origin: c[0],
            jac,
        }
    }

    /// Map a reference point to physical coordinates.
    pub fn to_physical(&self, xi: f64, eta: f64) -> [f64; 2] {
        [
            self.origin[0] + self.jac[0][0] * xi + self.jac[0][1] * eta,
            self.origin[1] + self.jac[1][0] * xi + self.jac[1][1] * eta,
        ]
    }

    /// Map a reference gradient to a physical gradient.
    pub fn phys_grad(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.jinv_t[0][0] * g[0] + self.jinv_t[0][1] * g[1],
            self.jinv_t[1][0] * g[0] + self.jinv_t[1][1] * g[1],
        ]
    }

    /// Map a physical point to reference coordinates (ξ, η).
    pub fn to_reference(&self, p: [f64; 2]) -> (f64, f64) {
        let d = [p[0] - self.origin[0], p[1] - self.origin[1]];
        (
            self.jinv_t[0][0] * d[0] + self.jinv_t[1][0] * d[1],
            self.jinv_t[0][1] * d[0] + self.jinv_t[1][1] * d[1],
        )
    }
}
