//! Stationary channel flow at prescribed flux.
//!
//! The channel problem is posed on the rough periodic window with no-slip
//! walls. The axial pressure gradient is not prescribed: the flow is forced
//! by a uniform axial body force and scaled (superposition on the linear
//! system) so that `∫ u₁ dx` hits the target `2R·φ` exactly; the scale is
//! minus the mean axial pressure gradient. The pressure constant is removed
//! by pinning one pressure dof to zero and shifting the result to zero mean
//! afterwards. Both devices keep all matrix rows local, which the sparse
//! factorization needs — a dense constraint row can inflate its fill-in
//! catastrophically. The advective variant solves the stationary momentum
//! balance by Picard iteration on the advecting field, with the advection
//! term in skew-symmetrized form so that the discrete energy identity holds
//! exactly.

use crate::error::{Error, Result};
use crate::fem::assemble::{assemble, AssembledSystem, SaddleProblem};
use crate::fem::element::TriGeom;
use crate::fem::quadrature::triangle_rule;
use crate::fem::solve::solve_sparse;
use crate::fem::space::{Space, WallFlags};
use crate::geometry::mesh::ChannelMesh;
use crate::geometry::norms::column_line_integral;

/// Fluid and forcing parameters shared by the solvers.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct PhysicalParams {
    /// Kinematic viscosity ν > 0.
    pub viscosity: f64,
    /// Prescribed mean flux φ per unit channel width.
    pub flux: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.viscosity > 0.0) || !self.viscosity.is_finite() {
            return Err(Error::config("viscosity must be positive and finite"));
        }
        if !self.flux.is_finite() {
            return Err(Error::config("flux must be finite"));
        }
        Ok(())
    }
}

/// Options for the Picard iteration of the advective solver.
#[derive(Debug, Clone, Copy)]
pub struct PicardOptions {
    /// Relative update tolerance on the velocity unknowns.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions {
            tol: 1e-10,
            max_iters: 50,
        }
    }
}

/// Solver diagnostics attached to every flow solution.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ResidualReport {
    /// ∞-norm of the momentum-row residual of the final system.
    pub momentum_inf: f64,
    /// ∞-norm of the continuity-row residual (the discrete divergence).
    pub continuity_inf: f64,
    /// Defect of the flux constraint `|∫u₁ − 2Rφ|`.
    pub constraint_inf: f64,
    /// Relative defect of the energy identity.
    pub energy_rel: f64,
    /// Picard iterations actually performed (0 for the linear solve).
    pub picard_iters: usize,
    /// Final relative Picard update.
    pub picard_update: f64,
}

/// A discrete channel flow: solution vector plus everything needed to
/// evaluate and audit it.
pub struct ChannelFlow {
    pub mesh: ChannelMesh,
    pub space: Space,
    /// Full solution vector (velocities, then pressures).
    pub z: Vec<f64>,
    /// The mean axial pressure gradient (negative for positive flux).
    pub lambda: f64,
    pub params: PhysicalParams,
    pub report: ResidualReport,
    geoms: Vec<TriGeom>,
}

impl ChannelFlow {
    /// Velocity at a physical point (laterally periodic; `None` outside).
    pub fn velocity_at(&self, x: f64, y: f64) -> Option<[f64; 2]> {
        let (t, b) = self.mesh.mesh.locate(x, y)?;
        Some(self.space.velocity_in(&self.z, t, b[1], b[2]))
    }

    /// Velocity at a point known to lie in triangle `t`.
    pub fn velocity_in_tri(&self, t: usize, p: [f64; 2]) -> [f64; 2] {
        let (xi, eta) = self.geoms[t].to_reference(p);
        self.space.velocity_in(&self.z, t, xi, eta)
    }

    /// Velocity gradient (rows: component) at a point in triangle `t`.
    pub fn velocity_grad_in_tri(&self, t: usize, p: [f64; 2]) -> [[f64; 2]; 2] {
        let (xi, eta) = self.geoms[t].to_reference(p);
        self.space
            .velocity_grad_in(&self.z, t, &self.geoms[t], xi, eta)
    }

    /// Pressure at a physical point.
    pub fn pressure_at(&self, x: f64, y: f64) -> Option<f64> {
        let (t, b) = self.mesh.mesh.locate(x, y)?;
        Some(self.space.pressure_in(&self.z, t, b[1], b[2]))
    }

    /// Flux through the vertical section nearest to `x`. Sections are mesh
    /// column lines (straight vertical polylines through the mesh), so the
    /// reported station may differ from `x` by up to half a column width.
    pub fn flux_of(&self, x: f64) -> (f64, f64) {
        let m = &self.mesh.mesh;
        let x0 = m.xcols[0];
        let w = m.xcols[m.ncols] - x0;
        let xr = (x - x0).rem_euclid(w) + x0;
        let i = ((xr - x0) / w * m.ncols as f64).round() as usize;
        let i = i.min(m.ncols);
        let f = |t: usize, p: [f64; 2]| self.velocity_in_tri(t, p)[0];
        (m.xcols[i], column_line_integral(m, i, &f))
    }

    /// ν ∫ |∇u|² over the whole rough channel.
    pub fn dissipation(&self) -> f64 {
        dissipation_of(&self.space, &self.geoms, &self.z, self.params.viscosity)
    }
}

fn dissipation_of(space: &Space, geoms: &[TriGeom], z: &[f64], nu: f64) -> f64 {
    let quad = triangle_rule();
    let mut total = 0.0;
    for t in 0..space.n_elem {
        let geom = &geoms[t];
        let mut acc = 0.0;
        for q in quad {
            let g = space.velocity_grad_in(z, t, geom, q.xi, q.eta);
            acc += q.w
                * (g[0][0] * g[0][0] + g[0][1] * g[0][1] + g[1][0] * g[1][0] + g[1][1] * g[1][1]);
        }
        total += acc * geom.det;
    }
    nu * total
}

/// Solve the viscous (linear) channel problem.
pub fn solve_stokes_channel(mesh: ChannelMesh, params: &PhysicalParams) -> Result<ChannelFlow> {
    solve_channel(mesh, params, None)
}

/// Solve the stationary advective channel problem by Picard iteration,
/// starting from the viscous solution.
pub fn solve_navier_stokes_channel(
    mesh: ChannelMesh,
    params: &PhysicalParams,
    picard: PicardOptions,
) -> Result<ChannelFlow> {
    solve_channel(mesh, params, Some(picard))
}

fn solve_channel(
    mesh: ChannelMesh,
    params: &PhysicalParams,
    picard: Option<PicardOptions>,
) -> Result<ChannelFlow> {
    params.validate()?;
    let space = Space::build(
        &mesh.mesh,
        WallFlags {
            bottom: true,
            top: true,
        },
        mesh.sigma0_row,
    );
    let flux_target = 2.0 * mesh.halfwidth * params.flux;
    let pin = space.pdof(0, 0);

    fn problem<'a>(
        mesh: &'a ChannelMesh,
        space: &'a Space,
        viscosity: f64,
        pin: usize,
        advect: Option<&'a [f64]>,
    ) -> SaddleProblem<'a> {
        SaddleProblem {
            mesh: &mesh.mesh,
            space,
            viscosity,
            fix_pressure_dof: Some(pin),
            sigma0_jump: None,
            advect_with: advect,
        }
    }

    // One forced solve imposes the flux by superposition: solve A x = r with
    // r the comp-0 mass vector, then scale so that ∫ u₁ hits the target. The
    // response ∫ x₁ = xᵀA x equals the dissipation of x and is positive, so
    // the scale is well defined whenever the solve succeeds.
    let solve_scaled = |sys: &AssembledSystem| -> Result<(Vec<f64>, f64)> {
        let lin = solve_sparse(sys.n, &sys.triplets, &sys.flux_vector)?;
        let mut x = lin.solution;
        let response: f64 = sys.flux_vector.iter().zip(&x).map(|(a, b)| a * b).sum();
        if !(response.abs() > 1e-300) {
            return Err(Error::solver(
                "flux response vanished; the channel system is degenerate",
            ));
        }
        let s = flux_target / response;
        for v in &mut x {
            *v *= s;
        }
        Ok((x, s))
    };

    // Linear solve (also the Picard starting point).
    let sys = assemble(&problem(&mesh, &space, params.viscosity, pin, None));
    let n = sys.n;
    let (mut z, mut scale) = solve_scaled(&sys)?;
    let mut cur = sys;
    let mut iters = 0usize;
    let mut update = 0.0f64;

    if let Some(opts) = picard {
        let vel_end = 2 * space.n_scalar + 2 * space.n_elem;
        let mut prev_update = f64::INFINITY;
        let mut growth_streak = 0usize;
        loop {
            let sysk = assemble(&problem(&mesh, &space, params.viscosity, pin, Some(&z)));
            let (xk, sk) = solve_scaled(&sysk)?;
            let norm = xk[..vel_end]
                .iter()
                .fold(0.0_f64, |m, &v| m.max(v.abs()))
                .max(1e-300);
            update = z[..vel_end]
                .iter()
                .zip(&xk[..vel_end])
                .fold(0.0_f64, |m, (&a, &b)| m.max((a - b).abs()))
                / norm;
            z = xk;
            scale = sk;
            cur = sysk;
            iters += 1;
            if update <= opts.tol {
                break;
            }
            if iters >= opts.max_iters {
                return Err(Error::NonConvergence(format!(
                    "Picard iteration did not reach {} after {} iterations \
                     (last relative update {update:.3e})",
                    opts.tol, opts.max_iters
                )));
            }
            if update > prev_update {
                growth_streak += 1;
                if growth_streak >= 3 {
                    return Err(Error::NonConvergence(format!(
                        "Picard iteration diverging: update grew three times in a row \
                         (now {update:.3e}); lower the flux or refine the mesh"
                    )));
                }
            } else {
                growth_streak = 0;
            }
            prev_update = update;
        }
    }

    let geoms: Vec<TriGeom> = (0..space.n_elem)
        .map(|t| TriGeom::new(&mesh.mesh.tri_coords(t)))
        .collect();

    // Audit the final fields. For the advective problem rebuild the system
    // with the advecting field equal to the solution itself, so the reported
    // numbers are the true nonlinear residual. The physical right-hand side
    // is the body force `scale · r`.
    let audit = if picard.is_some() {
        assemble(&problem(&mesh, &space, params.viscosity, pin, Some(&z)))
    } else {
        cur
    };
    let rhs_phys: Vec<f64> = audit.flux_vector.iter().map(|&v| v * scale).collect();
    let (momentum_inf, continuity_inf) =
        crate::fem::assemble::split_residual_inf(&space, n, &audit.triplets, &rhs_phys, &z);
    let flux_val: f64 = audit.flux_vector.iter().zip(&z).map(|(a, b)| a * b).sum();
    let constraint_inf = (flux_val - flux_target).abs();

    // The body force −λ e₁ plays the role of the mean pressure gradient.
    let lambda = -scale;

    // Energy identity: ν‖∇u‖² = −λ · 2Rφ (the skew advection form drops out
    // and the pressure terms vanish through the continuity rows).
    let diss = dissipation_of(&space, &geoms, &z, params.viscosity);
    let work = -lambda * flux_target;
    let energy_rel = (diss - work).abs() / diss.abs().max(1e-300);

    // Shift the pressure to zero mean (the pinned dof made it unique, not
    // zero-mean). A constant is orthogonal to every discrete divergence here,
    // so the momentum residual reported above is unaffected.
    let (mut p_int, mut area) = (0.0_f64, 0.0_f64);
    for t in 0..space.n_elem {
        let det = geoms[t].det;
        area += det / 2.0;
        let sum: f64 = (0..3).map(|k| z[space.pdof(t, k)]).sum();
        p_int += det / 6.0 * sum;
    }
    let shift = p_int / area;
    for t in 0..space.n_elem {
        for k in 0..3 {
            z[space.pdof(t, k)] -= shift;
        }
    }

    let report = ResidualReport {
        momentum_inf,
        continuity_inf,
        constraint_inf,
        energy_rel,
        picard_iters: iters,
        picard_update: update,
    };

    Ok(ChannelFlow {
        mesh,
        space,
        z,
        lambda,
        params: *params,
        report,
        geoms,
    })
}
