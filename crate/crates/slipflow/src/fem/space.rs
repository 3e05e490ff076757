//! Global degree-of-freedom numbering over a column-structured mesh.
//!
//! Continuous scalar unknowns sit on vertices and edge midpoints; lateral
//! boundary unknowns are identified with their periodic partners before
//! numbering, so periodicity is built into the space rather than imposed via
//! constraints. Bubbles (one per element and component) and pressures (three
//! per element) are local and never identified or constrained.

use crate::geometry::mesh::TriMesh;

/// Scalar dof numbering plus element connectivity for one mesh.
#[derive(Debug, Clone)]
pub struct Space {
    /// Number of distinct continuous scalar unknowns after the periodic merge.
    pub n_scalar: usize,
    /// Per element: global scalar ids of [v0, v1, v2, e01, e12, e20].
    pub elem_scalars: Vec<[usize; 6]>,
    /// Per global scalar id: strongly constrained to zero (no-slip walls)?
    pub dirichlet: Vec<bool>,
    /// Number of elements (= number of bubbles per component).
    pub n_elem: usize,
    /// Global scalar ids on the matching line level, left to right:
    /// alternating vertex, midpoint, vertex, midpoint, ..., vertex.
    pub sigma0_chain: Vec<usize>,
    /// Rows (levels) used to build the space, for bookkeeping.
    pub nrows: usize,
    pub ncols: usize,
}

/// Which horizontal boundaries carry a strong no-slip condition.
#[derive(Debug, Clone, Copy)]
pub struct WallFlags {
    pub bottom: bool,
    pub top: bool,
}

impl Space {
    /// Build the scalar numbering for `mesh`. `sigma0_level` is the node
    /// level of the matching line (used to expose its dof chain).
    pub fn build(mesh: &TriMesh, walls: WallFlags, sigma0_level: usize) -> Space {
        let (nc, nr) = (mesh.ncols, mesh.nrows);
        let nv_raw = (nc + 1) * (nr + 1);
        // Raw edge ids: horizontal, then vertical, then diagonal.
        let h_edges = nc * (nr + 1);
        let v_edges = (nc + 1) * nr;
        let d_edges = nc * nr;
        let raw_count = nv_raw + h_edges + v_edges + d_edges;

        let vert = |i: usize, j: usize| i * (nr + 1) + j;
        let hedge = |i: usize, j: usize| nv_raw + i * (nr + 1) + j;
        let vedge = |i: usize, j: usize| nv_raw + h_edges + i * nr + j;
        let dedge = |i: usize, j: usize| nv_raw + h_edges + v_edges + i * nr + j;

        // Periodic representative of each raw id.
        let rep = |raw: usize| -> usize {
            if raw < nv_raw {
                let (i, j) = (raw / (nr + 1), raw % (nr + 1));
                if i == nc {
                    vert(0, j)
                } else {
                    raw
                }
            } else if raw >= nv_raw + h_edges && raw < nv_raw + h_edges + v_edges {
                let k = raw - nv_raw - h_edges;
                let (i, j) = (k / nr, k % nr);
                if i == nc {
                    vedge(0, j)
                } else {
                    raw
                }
            } else {
                raw
            }
        };

        // Dense numbering in raw order of the representatives.
        let mut id_of_raw = vec![usize::MAX; raw_count];
        let mut n_scalar = 0usize;
        for raw in 0..raw_count {
            if rep(raw) == raw {
                id_of_raw[raw] = n_scalar;
                n_scalar += 1;
            }
        }
        for raw in 0..raw_count {
            if id_of_raw[raw] == usize::MAX {
                id_of_raw[raw] = id_of_raw[rep(raw)];
            }
        }

        // Element connectivity. Quad (i, j): lower tri (n00, n10, n11) with
        // edges [h(i,j), v(i+1,j), d(i,j)]; upper tri (n00, n11, n01) with
        // edges [d(i,j), h(i,j+1), v(i,j)].
        let mut elem_scalars = Vec::with_capacity(2 * nc * nr);
        for i in 0..nc {
            for j in 0..nr {
                elem_scalars.push([
                    id_of_raw[vert(i, j)],
                    id_of_raw[vert(i + 1, j)],
                    id_of_raw[vert(i + 1, j + 1)],
                    id_of_raw[hedge(i, j)],
                    id_of_raw[vedge(i + 1, j)],
                    id_of_raw[dedge(i, j)],
                ]);
                elem_scalars.push([
                    id_of_raw[vert(i, j)],
                    id_of_raw[vert(i + 1, j + 1)],
                    id_of_raw[vert(i, j + 1)],
                    id_of_raw[dedge(i, j)],
                    id_of_raw[hedge(i, j + 1)],
                    id_of_raw[vedge(i, j)],
                ]);
            }
        }

        let mut dirichlet = vec![false; n_scalar];
        if walls.bottom {
            for i in 0..=nc {
                dirichlet[id_of_raw[vert(i, 0)]] = true;
            }
            for i in 0..nc {
                dirichlet[id_of_raw[hedge(i, 0)]] = true;
            }
        }
        if walls.top {
            for i in 0..=nc {
                dirichlet[id_of_raw[vert(i, nr)]] = true;
            }
            for i in 0..nc {
                dirichlet[id_of_raw[hedge(i, nr)]] = true;
            }
        }

        let mut sigma0_chain = Vec::with_capacity(2 * nc + 1);
        for i in 0..nc {
            sigma0_chain.push(id_of_raw[vert(i, sigma0_level)]);
            sigma0_chain.push(id_of_raw[hedge(i, sigma0_level)]);
        }
        sigma0_chain.push(id_of_raw[vert(nc, sigma0_level)]);

        Space {
            n_scalar,
            elem_scalars,
            dirichlet,
            n_elem: 2 * nc * nr,
            sigma0_chain,
            nrows: nr,
            ncols: nc,
        }
    }

    /// Total unknowns: two velocity components on scalars and bubbles,
    /// then pressures.
    pub fn n_total(&self) -> usize {
        2 * self.n_scalar + 2 * self.n_elem + 3 * self.n_elem
    }

    /// Velocity dof id of continuous scalar `s`, component `c`.
    pub fn vdof(&self, s: usize, c: usize) -> usize {
        c * self.n_scalar + s
    }

    /// Velocity dof id of the bubble on element `t`, component `c`.
    pub fn bdof(&self, t: usize, c: usize) -> usize {
        2 * self.n_scalar + c * self.n_elem + t
    }

    /// Pressure dof id of local pressure node `k` on element `t`.
    pub fn pdof(&self, t: usize, k: usize) -> usize {
        2 * self.n_scalar + 2 * self.n_elem + 3 * t + k
    }

    /// Evaluate the velocity (both components) of solution vector `z` at a
    /// reference point of element `t`.
    pub fn velocity_in(&self, z: &[f64], t: usize, xi: f64, eta: f64) -> [f64; 2] {
        let v = super::element::shape_values(xi, eta);
        let sc = &self.elem_scalars[t];
        let mut out = [0.0, 0.0];
        for c in 0..2 {
            let mut acc = 0.0;
            for k in 0..6 {
                acc += z[self.vdof(sc[k], c)] * v[k];
            }
            acc += z[self.bdof(t, c)] * v[6];
            out[c] = acc;
        }
        out
    }

    /// Velocity gradient (rows: component; columns: x, y derivative) at a
    /// reference point of element `t` with geometry `geom`.
    pub fn velocity_grad_in(
        &self,
        z: &[f64],
        t: usize,
        geom: &super::element::TriGeom,
        xi: f64,
        eta: f64,
    ) -> [[f64; 2]; 2] {
        let g = super::element::shape_grads(xi, eta);
        let sc = &self.elem_scalars[t];
        let mut out = [[0.0; 2]; 2];
        for k in 0..7 {
            let pg = geom.phys_grad(g[k]);
            for c in 0..2 {
                let dof = if k < 6 {
                    z[self.vdof(sc[k], c)]
                } else {
                    z[self.bdof(t, c)]
                };
                out[c][0] += dof * pg[0];
                out[c][1] += dof * pg[1];
            }
        }
        out
    }

    /// Pressure of solution vector `z` at a reference point of element `t`.
    pub fn pressure_in(&self, z: &[f64], t: usize, xi: f64, eta: f64) -> f64 {
        let v = super::element::pressure_values(xi, eta);
        (0..3).map(|k| z[self.pdof(t, k)] * v[k]).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::mesh::build_halfstrip_mesh;
    use crate::geometry::Side;
    use crate::roughness::{sample_boundary, RoughnessKind, RoughnessSpec};

    fn test_mesh() -> crate::geometry::mesh::HalfStripMesh {
        let spec = RoughnessSpec {
            kind: RoughnessKind::ShiftedPeriodic,
            mode_count: 2,
            amplitude: 0.2,
            clamp_margin: 0.05,
            lipschitz_cap: 2.0,
            period_hint: Some(1.0),
        };
        let pair = sample_boundary(&spec, 5).unwrap();
        build_halfstrip_mesh(&pair, Side::Lower, 1.0, 3.0, 0.25).unwrap()
    }

    #[test]
    fn periodic_merge_reduces_scalar_count() {
        let hs = test_mesh();
        let m = &hs.mesh;
        let space = Space::build(m, WallFlags { bottom: true, top: false }, hs.sigma0_row);
        let nv = (m.ncols + 1) * (m.nrows + 1);
        let ne = m.ncols * (m.nrows + 1) + (m.ncols + 1) * m.nrows + m.ncols * m.nrows;
        // One column line of vertices and vertical edges merges away.
        assert_eq!(space.n_scalar, nv + ne - (m.nrows + 1) - m.nrows);
        // Every element references valid ids.
        for es in &space.elem_scalars {
            for &s in es {
                assert!(s < space.n_scalar);
            }
        }
    }

    #[test]
    fn shared_edges_share_dofs() {
        let hs = test_mesh();
        let m = &hs.mesh;
        let space = Space::build(m, WallFlags { bottom: true, top: false }, hs.sigma0_row);
        // Lower and upper triangle of the same quad share the diagonal
        // midpoint: local slot 5 (e20) of lower equals slot 3 (e01) of upper.
        for q in 0..(m.ncols * m.nrows) {
            let lo = &space.elem_scalars[2 * q];
            let up = &space.elem_scalars[2 * q + 1];
            assert_eq!(lo[5], up[3]);
            assert_eq!(lo[0], up[0]);
            assert_eq!(lo[2], up[1]);
        }
        // Elements in the last column share vertices with the first column
        // through the periodic merge.
        let (nc, nr) = (m.ncols, m.nrows);
        let last_lower = &space.elem_scalars[2 * ((nc - 1) * nr)];
        let first_lower = &space.elem_scalars[0];
        // v1 of the last column's lower tri is the wrapped v0 of column 0.
        assert_eq!(last_lower[1], first_lower[0]);
    }

    #[test]
    fn wall_dofs_are_flagged() {
        let hs = test_mesh();
        let m = &hs.mesh;
        let space = Space::build(m, WallFlags { bottom: true, top: false }, hs.sigma0_row);
        let flagged = space.dirichlet.iter().filter(|&&d| d).count();
        // nc merged vertices + nc wall edge midpoints on the bottom row.
        assert_eq!(flagged, 2 * m.ncols);
        // The matching-line chain has 2nc + 1 entries, none constrained.
        assert_eq!(space.sigma0_chain.len(), 2 * m.ncols + 1);
        for &s in &space.sigma0_chain {
            assert!(!space.dirichlet[s]);
        }
    }

    #[test]
    fn interpolation_reproduces_quadratics() {
        let hs = test_mesh();
        let m = &hs.mesh;
        let space = Space::build(m, WallFlags { bottom: false, top: false }, hs.sigma0_row);
        // Fill a velocity vector with f(x,y) = x² + 2y on component 0 and
        // g = y² - x on component 1 via nodal interpolation: quadratics are
        // reproduced exactly by the quadratic part (zero bubbles).
        // Nodal positions: vertices and edge midpoints per element.
        let mut z = vec![0.0; space.n_total()];
        let f = |p: [f64; 2]| p[0] * p[0] + 2.0 * p[1];
        let g = |p: [f64; 2]| p[1] * p[1] - p[0];
        for t in 0..space.n_elem {
            let c = m.tri_coords(t);
            // Elements on the periodic seam would write right-boundary values
            // into the merged left-boundary dofs; skip them (their dofs get
            // their values from the first column instead).
            if c.iter().any(|q| q[0] > m.xcols[m.ncols] - 1e-12) {
                continue;
            }
            let pts = [
                c[0],
                c[1],
                c[2],
                [(c[0][0] + c[1][0]) / 2.0, (c[0][1] + c[1][1]) / 2.0],
                [(c[1][0] + c[2][0]) / 2.0, (c[1][1] + c[2][1]) / 2.0],
                [(c[2][0] + c[0][0]) / 2.0, (c[2][1] + c[0][1]) / 2.0],
            ];
            for k in 0..6 {
                let s = space.elem_scalars[t][k];
                z[space.vdof(s, 0)] = f(pts[k]);
                z[space.vdof(s, 1)] = g(pts[k]);
            }
        }
        // Interior periodic-partner nodes on the right boundary evaluate
        // through wrapped elements; check interior points only.
        for t in (0..space.n_elem).step_by(7) {
            let c = m.tri_coords(t);
            let (xi, eta) = (0.21, 0.37);
            let p = [
                c[0][0] + xi * (c[1][0] - c[0][0]) + eta * (c[2][0] - c[0][0]),
                c[0][1] + xi * (c[1][1] - c[0][1]) + eta * (c[2][1] - c[0][1]),
            ];
            // Skip elements that straddle the periodic seam: their wrapped
            // dofs hold values from the other side of the window.
            if c.iter().any(|q| q[0] > m.xcols[m.ncols] - 1e-12) {
                continue;
            }
            let v = space.velocity_in(&z, t, xi, eta);
            assert!((v[0] - f(p)).abs() < 1e-11, "f at {p:?}: {}", v[0]);
            assert!((v[1] - g(p)).abs() < 1e-11, "g at {p:?}: {}", v[1]);
        }
    }
}
