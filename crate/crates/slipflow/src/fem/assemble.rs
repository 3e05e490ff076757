//! Assembly of the mixed saddle-point systems.
//!
//! Unknown layout (see `Space`): velocity scalars (component-major), velocity
//! bubbles, then discontinuous linear pressures. The momentum rows carry the
//! viscous block, the optional skew-symmetrized advection block, and the
//! pressure coupling; the continuity rows are the transpose coupling. No
//! scalar multiplier unknowns are used: a prescribed total flux is imposed by
//! the callers through superposition against the comp-0 mass vector returned
//! in `flux_vector`, and the pressure constant (when the problem has one) is
//! removed by replacing a single continuity row with an identity equation.
//! That keeps every matrix row local, which matters for the fill-in of the
//! sparse factorization; a dense constraint row can blow the factor up by
//! orders of magnitude.
//!
//! Replacing one continuity row is consistent: on a velocity space that is
//! laterally periodic with no-slip on both walls, `∫ div u = 0` holds for
//! every discrete field, so the dropped row is the negative sum of all the
//! others and is satisfied automatically by the solution.

use super::element::{pressure_values, shape_grads, shape_values, TriGeom};
use super::space::Space;
use crate::fem::quadrature::triangle_rule;
use crate::geometry::mesh::TriMesh;

/// Line functional on a flat mesh level: adds `coefficient * ∫ v₁ ds` over
/// the level to the right-hand side.
#[derive(Debug, Clone, Copy)]
pub struct SigmaJump {
    pub level: usize,
    pub coefficient: f64,
}

/// One saddle-point problem over a mesh and space.
pub struct SaddleProblem<'a> {
    pub mesh: &'a TriMesh,
    pub space: &'a Space,
    pub viscosity: f64,
    /// Replace the continuity row of this pressure dof by `p = 0`. Needed
    /// when the boundary conditions leave the pressure constant free (both
    /// walls no-slip); leave `None` when a natural boundary fixes it.
    pub fix_pressure_dof: Option<usize>,
    /// Optional line forcing (the shear-jump data of the cell problems).
    pub sigma0_jump: Option<SigmaJump>,
    /// Lagged advecting velocity (a solution vector over the same space);
    /// `None` assembles the linear viscous problem.
    pub advect_with: Option<&'a [f64]>,
}

/// Assembled linear system, with Dirichlet rows already replaced.
pub struct AssembledSystem {
    pub n: usize,
    pub triplets: Vec<(usize, usize, f64)>,
    pub rhs: Vec<f64>,
    /// `∫ φ_a` on every comp-0 velocity dof (zeroed on constrained rows):
    /// the discrete functional `u ↦ ∫ u₁`. Used both to impose a flux target
    /// by superposition and to evaluate the flux of a solution.
    pub flux_vector: Vec<f64>,
}

pub fn assemble(p: &SaddleProblem) -> AssembledSystem {
    let mesh = p.mesh;
    let space = p.space;
    let nu = p.viscosity;
    let n = space.n_total();

    let quad = triangle_rule();
    // Reference shape data at quadrature points is element-independent.
    let shp: Vec<([f64; 7], [[f64; 2]; 7], [f64; 3])> = quad
        .iter()
        .map(|q| (shape_values(q.xi, q.eta), shape_grads(q.xi, q.eta), pressure_values(q.xi, q.eta)))
        .collect();

    let mut trip: Vec<(usize, usize, f64)> = Vec::new();
    let mut rhs = vec![0.0; n];
    let mut flux_vector = vec![0.0; n];

    for t in 0..space.n_elem {
        let coords = mesh.tri_coords(t);
        let geom = TriGeom::new(&coords);
        let det = geom.det;
        let sc = &space.elem_scalars[t];
        // Global velocity dof of local function k (0..6 scalars, 6 bubble).
        let vd = |k: usize, c: usize| {
            if k < 6 {
                space.vdof(sc[k], c)
            } else {
                space.bdof(t, c)
            }
        };

        let mut a_loc = [[0.0_f64; 7]; 7];
        let mut adv = [[0.0_f64; 7]; 7]; // (w·∇φ_b, φ_a)
        let mut b_loc = [[[0.0_f64; 2]; 7]; 3]; // (ψ_k, ∂_c φ_b)
        let mut r_loc = [0.0_f64; 7]; // ∫ φ_b

        for (iq, q) in quad.iter().enumerate() {
            let (vals, grads, pvals) = &shp[iq];
            let w = q.w * det;
            let pg: [[f64; 2]; 7] = std::array::from_fn(|k| geom.phys_grad(grads[k]));
            for a in 0..7 {
                for b in 0..7 {
                    a_loc[a][b] += w * nu * (pg[a][0] * pg[b][0] + pg[a][1] * pg[b][1]);
                }
                r_loc[a] += w * vals[a];
            }
            for k in 0..3 {
                for b in 0..7 {
                    b_loc[k][b][0] += w * pvals[k] * pg[b][0];
                    b_loc[k][b][1] += w * pvals[k] * pg[b][1];
                }
            }
            if let Some(wvec) = p.advect_with {
                // Advecting velocity at this quadrature point from its local
                // dofs (cheap: shape values already computed).
                let mut wq = [0.0, 0.0];
                for c in 0..2 {
                    for k in 0..7 {
                        wq[c] += wvec[vd(k, c)] * vals[k];
                    }
                }
                for a in 0..7 {
                    for b in 0..7 {
                        adv[a][b] += w * vals[a] * (wq[0] * pg[b][0] + wq[1] * pg[b][1]);
                    }
                }
            }
        }

        for c in 0..2 {
            for a in 0..7 {
                let ra = vd(a, c);
                for b in 0..7 {
                    let mut v = a_loc[a][b];
                    if p.advect_with.is_some() {
                        // Skew-symmetrized advection: ½[(w·∇u, v) − (w·∇v, u)].
                        v += 0.5 * (adv[a][b] - adv[b][a]);
                    }
                    trip.push((ra, vd(b, c), v));
                }
                for k in 0..3 {
                    // Momentum: −(p, div v); continuity: −(q, div u).
                    trip.push((ra, space.pdof(t, k), -b_loc[k][a][c]));
                    trip.push((space.pdof(t, k), ra, -b_loc[k][a][c]));
                }
            }
        }
        for a in 0..7 {
            flux_vector[vd(a, 0)] += r_loc[a];
        }
    }

    if let Some(jump) = p.sigma0_jump {
        // The level is flat and its traces are quadratic, so the three-point
        // Simpson weights are exact on each edge.
        let nc = space.ncols;
        debug_assert_eq!(space.sigma0_chain.len(), 2 * nc + 1);
        for i in 0..nc {
            let len = mesh.xcols[i + 1] - mesh.xcols[i];
            let (sa, sm, sb) = (
                space.sigma0_chain[2 * i],
                space.sigma0_chain[2 * i + 1],
                space.sigma0_chain[2 * i + 2],
            );
            rhs[space.vdof(sa, 0)] += jump.coefficient * len / 6.0;
            rhs[space.vdof(sm, 0)] += jump.coefficient * 2.0 * len / 3.0;
            rhs[space.vdof(sb, 0)] += jump.coefficient * len / 6.0;
        }
        let _ = jump.level;
    }

    // Strong no-slip: replace both component rows of flagged scalars. The
    // pinned pressure dof gets the same treatment: its continuity row becomes
    // the identity equation `p = 0`.
    let mut constrained = vec![false; n];
    for (s, &d) in space.dirichlet.iter().enumerate() {
        if d {
            constrained[space.vdof(s, 0)] = true;
            constrained[space.vdof(s, 1)] = true;
        }
    }
    if let Some(pd) = p.fix_pressure_dof {
        constrained[pd] = true;
    }
    trip.retain(|&(r, _, _)| !constrained[r]);
    for (d, &c) in constrained.iter().enumerate() {
        if c {
            trip.push((d, d, 1.0));
            rhs[d] = 0.0;
            flux_vector[d] = 0.0;
        }
    }

    AssembledSystem {
        n,
        triplets: trip,
        rhs,
        flux_vector,
    }
}

/// Residual `b − A x` of a triplet system (duplicates accumulate, matching
/// the summing semantics of the sparse constructor).
pub fn residual(n: usize, triplets: &[(usize, usize, f64)], rhs: &[f64], x: &[f64]) -> Vec<f64> {
    let mut r = rhs.to_vec();
    assert_eq!(r.len(), n);
    for &(i, j, v) in triplets {
        r[i] -= v * x[j];
    }
    r
}

/// ∞-norms of the residual split into (momentum rows, continuity rows).
pub fn split_residual_inf(
    space: &Space,
    n: usize,
    triplets: &[(usize, usize, f64)],
    rhs: &[f64],
    z: &[f64],
) -> (f64, f64) {
    let res = residual(n, triplets, rhs, z);
    let vel_end = 2 * space.n_scalar + 2 * space.n_elem;
    let mut blocks = (0.0_f64, 0.0_f64);
    for (i, r) in res.iter().enumerate() {
        let a = r.abs();
        if i < vel_end {
            blocks.0 = blocks.0.max(a);
        } else {
            blocks.1 = blocks.1.max(a);
        }
    }
    blocks
}
