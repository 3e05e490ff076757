//! Near-wall cell problems and slip coefficients.
//!
//! A cell problem lives on a laterally periodic half strip: the rough wall
//! below (no-slip), the matching line `y₂ = 0` above the roughness, and a
//! stress-free cap at `y₂ = L` truncating the unbounded direction. The flow
//! is driven by a shear jump of strength `6νφ` across the matching line —
//! the wall shear that the parabolic channel profile exerts there. Away from
//! the wall the velocity tends to a constant `(U∞, 0)`, and the slip
//! coefficient of the wall is `α = U∞ / (6φ)`. It depends only on the wall
//! geometry: both ν and φ scale out of the linear problem, which the tests
//! pin down.
//!
//! The lateral average `Ā₁(y₂)` is constant above the roughness in the
//! continuous problem, even on the truncated strip: the pressure is
//! laterally periodic, so the zero lateral mode of the momentum balance
//! reduces to `Ā₁'' = 0`, and the stress-free cap forces the slope to
//! vanish. `U∞` is therefore extracted as the mean of lateral averages over
//! a ladder of heights, and their spread — the plateau residual — directly
//! measures the discretization level, not the truncation.
//!
//! The upper-wall cell problem is the mirror image of a lower-wall one. It
//! is solved in reflected coordinates (the upper profile read as a lower
//! wall, same shear strength); evaluating the field flips `y₂` and the sign
//! of the second velocity component back, and the far-field constant and
//! slip coefficient carry over unchanged.

use crate::error::{Error, Result};
use crate::fem::assemble::{assemble, split_residual_inf, SaddleProblem, SigmaJump};
use crate::fem::element::TriGeom;
use crate::fem::solve::solve_sparse;
use crate::fem::space::{Space, WallFlags};
use crate::geometry::mesh::{build_halfstrip_mesh, HalfStripMesh, TriMesh};
use crate::geometry::norms::{horizontal_line_integral, lateral_average};
use crate::geometry::Side;
use crate::roughness::{sample_boundary, BoundaryPair, RoughnessSpec};

/// Discretization and physics of one cell solve.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct CellOptions {
    /// Lateral half width of the periodic window.
    pub halfwidth: f64,
    /// Cap height `L` of the truncated strip.
    pub cap: f64,
    /// Target mesh spacing.
    pub target_h: f64,
    /// Kinematic viscosity ν (scales out of the slip coefficient).
    pub viscosity: f64,
    /// Channel flux φ setting the shear-jump strength 6νφ (scales out too).
    pub flux: f64,
    /// Relative agreement demanded of the lateral-average ladder.
    pub plateau_tol: f64,
}

impl CellOptions {
    pub fn new(halfwidth: f64, cap: f64, target_h: f64) -> Self {
        CellOptions {
            halfwidth,
            cap,
            target_h,
            viscosity: 1.0,
            flux: 1.0,
            plateau_tol: 1e-3,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.viscosity > 0.0) || !self.viscosity.is_finite() {
            return Err(Error::config("viscosity must be positive and finite"));
        }
        if !self.flux.is_finite() {
            return Err(Error::config("flux must be finite"));
        }
        if !(self.plateau_tol > 0.0) {
            return Err(Error::config("plateau_tol must be positive"));
        }
        Ok(())
    }
}

/// Diagnostics of one cell solve.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CellReport {
    /// ∞-norm of the momentum-row residual.
    pub momentum_inf: f64,
    /// ∞-norm of the continuity-row residual.
    pub continuity_inf: f64,
    /// Far-field constant in solver (lower-type) coordinates.
    pub u_infinity_raw: [f64; 2],
    /// Heights of the lateral-average ladder.
    pub plateau_heights: Vec<f64>,
    /// Largest spread of the ladder averages over both components.
    pub plateau_residual: f64,
    /// Net flow through the cap (zero for an exact solution).
    pub cap_flux: f64,
    /// ν ∫ |∇U|² over the strip, computed by element quadrature.
    pub dissipation: f64,
    /// Work done by the shear jump, `6νφ ∫_{Σ₀} U₁`, by line quadrature.
    pub jump_work: f64,
    /// Relative defect of the energy identity `dissipation = jump_work`.
    pub energy_rel: f64,
}

/// A solved cell problem for one wall.
pub struct CellFlow {
    pub mesh: HalfStripMesh,
    pub space: Space,
    /// Solution vector in lower-type coordinates (velocities, pressures).
    pub z: Vec<f64>,
    pub side: Side,
    pub options: CellOptions,
    pub report: CellReport,
    geoms: Vec<TriGeom>,
}

fn velocity_sampler<'a>(
    space: &'a Space,
    geoms: &'a [TriGeom],
    z: &'a [f64],
    comp: usize,
) -> impl Fn(usize, [f64; 2]) -> f64 + 'a {
    move |t: usize, p: [f64; 2]| {
        let (xi, eta) = geoms[t].to_reference(p);
        space.velocity_in(z, t, xi, eta)[comp]
    }
}

impl CellFlow {
    /// Velocity in the wall's own boundary coordinates. For the lower wall
    /// these are the solver coordinates; for the upper wall the strip is
    /// mirrored (`y₂ ↦ −y₂`, second component negated), so the fluid side
    /// lies at `y₂ < 0` and the wall at `y₂ = +h(y₁)`.
    pub fn velocity_bl(&self, y1: f64, y2: f64) -> Option<[f64; 2]> {
        match self.side {
            Side::Lower => self.velocity_raw(y1, y2),
            Side::Upper => {
                let v = self.velocity_raw(y1, -y2)?;
                Some([v[0], -v[1]])
            }
        }
    }

    /// Velocity in solver (lower-type) coordinates.
    pub fn velocity_raw(&self, y1: f64, y2: f64) -> Option<[f64; 2]> {
        let (t, b) = self.mesh.mesh.locate(y1, y2)?;
        Some(self.space.velocity_in(&self.z, t, b[1], b[2]))
    }

    /// Velocity gradient (rows: component, columns: ∂/∂y₁, ∂/∂y₂) in the
    /// wall's own boundary coordinates (see [`CellFlow::velocity_bl`]).
    pub fn velocity_grad_bl(&self, y1: f64, y2: f64) -> Option<[[f64; 2]; 2]> {
        match self.side {
            Side::Lower => self.velocity_grad_raw(y1, y2),
            Side::Upper => {
                // U(y₁,y₂) = (Ũ₁(y₁,−y₂), −Ũ₂(y₁,−y₂)): the mixed partials
                // change sign under the mirror, the diagonal ones survive.
                let g = self.velocity_grad_raw(y1, -y2)?;
                Some([[g[0][0], -g[0][1]], [-g[1][0], g[1][1]]])
            }
        }
    }

    /// Velocity gradient in solver (lower-type) coordinates.
    pub fn velocity_grad_raw(&self, y1: f64, y2: f64) -> Option<[[f64; 2]; 2]> {
        let (t, b) = self.mesh.mesh.locate(y1, y2)?;
        Some(self.space.velocity_grad_in(&self.z, t, &self.geoms[t], b[1], b[2]))
    }

    /// Lateral average of both velocity components at height `y2` (solver
    /// coordinates).
    pub fn lateral_average_raw(&self, y2: f64) -> [f64; 2] {
        let m = &self.mesh.mesh;
        let f0 = velocity_sampler(&self.space, &self.geoms, &self.z, 0);
        let f1 = velocity_sampler(&self.space, &self.geoms, &self.z, 1);
        [lateral_average(m, y2, &f0), lateral_average(m, y2, &f1)]
    }

    /// Far-field constant in the wall's own boundary coordinates.
    pub fn u_infinity(&self) -> [f64; 2] {
        let raw = self.report.u_infinity_raw;
        match self.side {
            Side::Lower => raw,
            Side::Upper => [raw[0], -raw[1]],
        }
    }

    /// Navier slip coefficient α = U∞ / (6φ) of this wall.
    pub fn slip_coefficient(&self) -> Result<f64> {
        if self.options.flux == 0.0 {
            return Err(Error::Undefined(
                "slip coefficient at zero flux: the cell problem has no drive".into(),
            ));
        }
        Ok(self.report.u_infinity_raw[0] / (6.0 * self.options.flux))
    }

    /// Largest deviation from the far-field constant along `n` lateral lines
    /// between the matching line and the cap, sampled at column midpoints.
    /// Returns (height, deviation) pairs with heights increasing.
    pub fn decay_profile(&self, n: usize) -> Vec<(f64, f64)> {
        let m = &self.mesh.mesh;
        let raw = self.report.u_infinity_raw;
        (1..=n)
            .map(|k| {
                let y = 0.8 * self.mesh.cap * k as f64 / n as f64;
                let mut dev = 0.0_f64;
                for i in 0..m.ncols {
                    let x = 0.5 * (m.xcols[i] + m.xcols[i + 1]);
                    if let Some(v) = self.velocity_raw(x, y) {
                        dev = dev.max((v[0] - raw[0]).abs()).max((v[1] - raw[1]).abs());
                    }
                }
                (y, dev)
            })
            .collect()
    }
}

/// Ladder of heights used for the far-field extraction: geometric between
/// 20% and 80% of the cap, all above the roughness.
fn plateau_ladder(cap: f64) -> Vec<f64> {
    let mut heights = Vec::new();
    let mut y = 0.2 * cap;
    while y <= 0.8 * cap + 1e-12 {
        heights.push(y);
        y *= 1.5;
    }
    heights
}

/// Solve the cell problem for the chosen wall of the pair.
pub fn solve_cell(pair: &BoundaryPair, side: Side, options: &CellOptions) -> Result<CellFlow> {
    options.validate()?;
    let mesh = build_halfstrip_mesh(pair, side, options.halfwidth, options.cap, options.target_h)?;
    let space = Space::build(
        &mesh.mesh,
        WallFlags {
            bottom: true,
            top: false,
        },
        mesh.sigma0_row,
    );
    let strength = 6.0 * options.viscosity * options.flux;
    let problem = SaddleProblem {
        mesh: &mesh.mesh,
        space: &space,
        viscosity: options.viscosity,
        // The stress-free cap fixes the pressure constant naturally.
        fix_pressure_dof: None,
        sigma0_jump: Some(SigmaJump {
            level: mesh.sigma0_row,
            coefficient: strength,
        }),
        advect_with: None,
    };
    let sys = assemble(&problem);
    let lin = solve_sparse(sys.n, &sys.triplets, &sys.rhs)?;
    let z = lin.solution;
    let (momentum_inf, continuity_inf) = split_residual_inf(&space, sys.n, &sys.triplets, &sys.rhs, &z);

    let geoms: Vec<TriGeom> = (0..space.n_elem)
        .map(|t| TriGeom::new(&mesh.mesh.tri_coords(t)))
        .collect();

    // Far field: ladder of lateral averages above the roughness.
    let heights = plateau_ladder(mesh.cap);
    let averages: Vec<[f64; 2]> = heights
        .iter()
        .map(|&y| {
            let f0 = velocity_sampler(&space, &geoms, &z, 0);
            let f1 = velocity_sampler(&space, &geoms, &z, 1);
            [
                lateral_average(&mesh.mesh, y, &f0),
                lateral_average(&mesh.mesh, y, &f1),
            ]
        })
        .collect();
    let mut u_inf = [0.0_f64; 2];
    let mut spread = 0.0_f64;
    for c in 0..2 {
        let vals: Vec<f64> = averages.iter().map(|a| a[c]).collect();
        let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        for &v in &vals {
            lo = lo.min(v);
            hi = hi.max(v);
            sum += v;
        }
        u_inf[c] = sum / vals.len() as f64;
        spread = spread.max(hi - lo);
    }
    let scale = u_inf[0].abs().max(1e-12 * (1.0 + strength.abs()));
    if spread > options.plateau_tol * scale {
        return Err(Error::Extraction(format!(
            "lateral averages did not settle: spread {spread:.3e} over heights \
             {heights:?} exceeds {:.1e} of the far-field value {:.6e}; refine \
             target_h or raise the cap",
            options.plateau_tol, u_inf[0]
        )));
    }

    let cap_flux = {
        let f1 = velocity_sampler(&space, &geoms, &z, 1);
        horizontal_line_integral(&mesh.mesh, mesh.cap, &f1)
    };

    // Energy identity: testing the weak form with the solution itself gives
    // ν ∫ |∇U|² = 6νφ ∫_{Σ₀} U₁. Both sides are recomputed independently by
    // quadrature, so the defect measures solver plus quadrature error.
    let (dissipation, jump_work) = {
        let quad = crate::fem::quadrature::triangle_rule();
        let mut diss = 0.0;
        for t in 0..space.n_elem {
            let geom = &geoms[t];
            let mut acc = 0.0;
            for q in quad {
                let g = space.velocity_grad_in(&z, t, geom, q.xi, q.eta);
                acc += q.w
                    * (g[0][0] * g[0][0]
                        + g[0][1] * g[0][1]
                        + g[1][0] * g[1][0]
                        + g[1][1] * g[1][1]);
            }
            diss += acc * geom.det;
        }
        let f0 = velocity_sampler(&space, &geoms, &z, 0);
        let work = strength * horizontal_line_integral(&mesh.mesh, 0.0, &f0);
        (options.viscosity * diss, work)
    };
    let energy_rel =
        (dissipation - jump_work).abs() / dissipation.abs().max(jump_work.abs()).max(1e-300);

    let report = CellReport {
        momentum_inf,
        continuity_inf,
        u_infinity_raw: u_inf,
        plateau_heights: heights,
        plateau_residual: spread,
        cap_flux,
        dissipation,
        jump_work,
        energy_rel,
    };
    Ok(CellFlow {
        mesh,
        space,
        z,
        side,
        options: *options,
        report,
        geoms,
    })
}

/// Solve both walls of a pair and return (α_lower, α_upper).
pub fn slip_coefficients(pair: &BoundaryPair, options: &CellOptions) -> Result<(f64, f64)> {
    let lower = solve_cell(pair, Side::Lower, options)?;
    let upper = solve_cell(pair, Side::Upper, options)?;
    Ok((lower.slip_coefficient()?, upper.slip_coefficient()?))
}

/// One successful draw of an ensemble study.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AlphaSample {
    pub seed: u64,
    pub alpha: f64,
    pub plateau_residual: f64,
}

/// One failed draw, kept so a study can report what it skipped.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AlphaFailure {
    pub seed: u64,
    pub message: String,
}

/// Slip coefficients of one wall over an ensemble of sampled boundaries.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EnsembleAlpha {
    pub samples: Vec<AlphaSample>,
    pub failures: Vec<AlphaFailure>,
    /// Mean slip coefficient over the successful draws (None if none).
    pub mean: Option<f64>,
    /// Max−min spread over the successful draws.
    pub spread: f64,
}

/// Solve the cell problem for `side` across the seeds, in seed order.
/// Failures are recorded per seed rather than aborting the ensemble.
pub fn ensemble_alpha(
    spec: &RoughnessSpec,
    seeds: &[u64],
    side: Side,
    options: &CellOptions,
) -> EnsembleAlpha {
    let mut samples = Vec::new();
    let mut failures = Vec::new();
    for &seed in seeds {
        let outcome = sample_boundary(spec, seed)
            .and_then(|pair| solve_cell(&pair, side, options))
            .and_then(|cell| {
                Ok(AlphaSample {
                    seed,
                    alpha: cell.slip_coefficient()?,
                    plateau_residual: cell.report.plateau_residual,
                })
            });
        match outcome {
            Ok(s) => samples.push(s),
            Err(e) => failures.push(AlphaFailure {
                seed,
                message: e.to_string(),
            }),
        }
    }
    let mean = if samples.is_empty() {
        None
    } else {
        Some(samples.iter().map(|s| s.alpha).sum::<f64>() / samples.len() as f64)
    };
    let spread = if samples.len() < 2 {
        0.0
    } else {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in &samples {
            lo = lo.min(s.alpha);
            hi = hi.max(s.alpha);
        }
        hi - lo
    };
    EnsembleAlpha {
        samples,
        failures,
        mean,
        spread,
    }
}

/// Lateral average of a velocity sampler at a height of a foreign mesh —
/// used by consumers that compare reconstructions against the cell field.
pub fn foreign_lateral_average(mesh: &TriMesh, y: f64, f: &dyn Fn(usize, [f64; 2]) -> f64) -> f64 {
    lateral_average(mesh, y, &f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roughness::RoughnessKind;

    fn flat_pair(depth: f64) -> BoundaryPair {
        let spec = RoughnessSpec {
            kind: RoughnessKind::FlatOffset,
            mode_count: 0,
            amplitude: depth,
            clamp_margin: 0.01,
            lipschitz_cap: 1.0,
            period_hint: None,
        };
        sample_boundary(&spec, 1).unwrap()
    }

    fn rough_spec() -> RoughnessSpec {
        RoughnessSpec {
            kind: RoughnessKind::ShiftedPeriodic,
            mode_count: 2,
            amplitude: 0.25,
            clamp_margin: 0.05,
            lipschitz_cap: 2.5,
            period_hint: Some(1.0),
        }
    }

    #[test]
    fn flat_wall_cell_is_exact_and_alpha_equals_depth() {
        let depth = 0.3;
        let mut opts = CellOptions::new(0.5, 2.0, 0.075);
        opts.viscosity = 1.3;
        opts.flux = 0.25;
        let cell = solve_cell(&flat_pair(depth), Side::Lower, &opts).unwrap();
        // The exact solution is piecewise linear: 6φ(y₂+c) below the
        // matching line, the constant 6φc above. It lies in the discrete
        // space, so everything is exact to solver precision.
        let alpha = cell.slip_coefficient().unwrap();
        assert!((alpha - depth).abs() < 1e-8, "alpha {alpha}");
        let vfar = cell.velocity_bl(0.3, 1.2).unwrap();
        assert!((vfar[0] - 6.0 * 0.25 * depth).abs() < 1e-9);
        assert!(vfar[1].abs() < 1e-10);
        let vbelow = cell.velocity_bl(-0.2, -0.15).unwrap();
        assert!((vbelow[0] - 6.0 * 0.25 * (depth - 0.15)).abs() < 1e-9);
        assert!(cell.report.plateau_residual < 1e-10);
        assert!(cell.report.continuity_inf < 1e-11);
        assert!(cell.report.cap_flux.abs() < 1e-12);
        // No-slip holds strongly on the wall.
        let vwall = cell.velocity_bl(0.1, -depth + 1e-13).unwrap();
        assert!(vwall[0].abs() < 1e-9 && vwall[1].abs() < 1e-9);
        // Energy identity, with both sides known in closed form:
        // ν ∫|∇U|² = ν (6φ)² c over one period of width 1, and the jump work
        // is 6νφ · 6φc. Both equal 1.3 · 1.5² · 0.3.
        let exact = 1.3 * (6.0 * 0.25) * (6.0 * 0.25) * depth;
        assert!((cell.report.dissipation - exact).abs() < 1e-8 * exact);
        assert!((cell.report.jump_work - exact).abs() < 1e-8 * exact);
        assert!(cell.report.energy_rel < 1e-10);
        // The gradient of the exact two-region profile: ∂₂U₁ = 6φ below the
        // matching line and 0 above it.
        let g_below = cell.velocity_grad_bl(0.2, -0.1).unwrap();
        assert!((g_below[0][1] - 1.5).abs() < 1e-8, "{g_below:?}");
        let g_above = cell.velocity_grad_bl(0.2, 0.7).unwrap();
        assert!(g_above[0][1].abs() < 1e-8, "{g_above:?}");
    }

    #[test]
    fn slip_coefficient_is_invariant_under_forcing_and_viscosity() {
        let pair = sample_boundary(&rough_spec(), 7).unwrap();
        let mut base = CellOptions::new(0.5, 2.0, 1.0 / 12.0);
        base.flux = 0.1;
        let a0 = solve_cell(&pair, Side::Lower, &base)
            .unwrap()
            .slip_coefficient()
            .unwrap();
        let mut double_flux = base;
        double_flux.flux = 0.2;
        let a1 = solve_cell(&pair, Side::Lower, &double_flux)
            .unwrap()
            .slip_coefficient()
            .unwrap();
        let mut thick = base;
        thick.viscosity = 0.37;
        let a2 = solve_cell(&pair, Side::Lower, &thick)
            .unwrap()
            .slip_coefficient()
            .unwrap();
        assert!((a0 - a1).abs() < 1e-10, "flux scaling {a0} vs {a1}");
        assert!((a0 - a2).abs() < 1e-10, "viscosity scaling {a0} vs {a2}");
    }

    #[test]
    fn slip_coefficient_is_invariant_under_column_aligned_shift() {
        let pair = sample_boundary(&rough_spec(), 21).unwrap();
        let opts = CellOptions::new(0.5, 2.0, 1.0 / 12.0);
        // The mesh uses ceil(window / target_h) = 12 columns; shifting the
        // profile by an exact column multiple relabels columns cyclically
        // and must reproduce the same slip coefficient.
        let shifted = crate::roughness::shift(&pair, 3.0 / 12.0);
        let a = solve_cell(&pair, Side::Lower, &opts)
            .unwrap()
            .slip_coefficient()
            .unwrap();
        let b = solve_cell(&shifted, Side::Lower, &opts)
            .unwrap()
            .slip_coefficient()
            .unwrap();
        assert!((a - b).abs() < 1e-10, "shift changed alpha: {a} vs {b}");
    }

    #[test]
    fn rough_cell_settles_to_a_positive_plateau_and_decays() {
        let pair = sample_boundary(&rough_spec(), 42).unwrap();
        let mut opts = CellOptions::new(0.5, 2.0, 1.0 / 16.0);
        opts.flux = 0.1;
        let cell = solve_cell(&pair, Side::Lower, &opts).unwrap();
        let alpha = cell.slip_coefficient().unwrap();
        // Outward roughness slips forward; the coefficient stays on the
        // scale of the wall depth.
        assert!(alpha > 0.0 && alpha < 0.6, "alpha {alpha}");
        assert!(cell.u_infinity()[1].abs() < 1e-8);
        // The energy identity must hold on a genuinely rough solve too.
        assert!(
            cell.report.energy_rel < 1e-8,
            "energy defect {:.3e}",
            cell.report.energy_rel
        );
        // The deviation from the far field dies off between the matching
        // line and the cap.
        let decay = cell.decay_profile(5);
        let first = decay.first().unwrap().1;
        let last = decay.last().unwrap().1;
        assert!(
            last < 0.2 * first,
            "no decay: {first:.3e} → {last:.3e} over {decay:?}"
        );
        // Truncation insensitivity: a taller strip gives the same slip
        // coefficient well inside the plateau tolerance.
        let mut taller = opts;
        taller.cap = 3.0;
        let cell3 = solve_cell(&pair, Side::Lower, &taller).unwrap();
        let alpha3 = cell3.slip_coefficient().unwrap();
        assert!((alpha - alpha3).abs() < 1e-4, "cap moved alpha: {alpha} vs {alpha3}");
    }

    #[test]
    fn upper_wall_solves_in_reflected_coordinates() {
        let pair = sample_boundary(&rough_spec(), 9).unwrap();
        let mut opts = CellOptions::new(0.5, 2.0, 1.0 / 12.0);
        opts.flux = 0.1;
        let upper = solve_cell(&pair, Side::Upper, &opts).unwrap();
        // The solver works on the mirrored strip: evaluating in boundary
        // coordinates must flip height and vertical component.
        let (y1, y2) = (0.17, -0.9);
        let v = upper.velocity_bl(y1, y2).unwrap();
        let raw = upper.velocity_raw(y1, -y2).unwrap();
        assert_eq!(v[0], raw[0]);
        assert_eq!(v[1], -raw[1]);
        // The mirrored gradient must match finite differences of the
        // mirrored velocity (checked against central differences).
        let g = upper.velocity_grad_bl(y1, y2).unwrap();
        let d = 1e-6;
        for comp in 0..2 {
            let dx = (upper.velocity_bl(y1 + d, y2).unwrap()[comp]
                - upper.velocity_bl(y1 - d, y2).unwrap()[comp])
                / (2.0 * d);
            let dy = (upper.velocity_bl(y1, y2 + d).unwrap()[comp]
                - upper.velocity_bl(y1, y2 - d).unwrap()[comp])
                / (2.0 * d);
            assert!((g[comp][0] - dx).abs() < 1e-5 * (1.0 + dx.abs()), "{comp} {g:?}");
            assert!((g[comp][1] - dy).abs() < 1e-5 * (1.0 + dy.abs()), "{comp} {g:?}");
        }
        // The far field lies below the bumps (negative heights).
        assert!(upper.velocity_bl(0.0, -1.5).is_some());
        // α of the upper wall equals α of its profile solved as a lower
        // wall, because the mirrored problems are identical.
        let mut as_lower_pair = pair.clone();
        as_lower_pair.lower = pair.upper.clone();
        let lower = solve_cell(&as_lower_pair, Side::Lower, &opts).unwrap();
        assert_eq!(
            upper.slip_coefficient().unwrap(),
            lower.slip_coefficient().unwrap()
        );
    }

    #[test]
    fn ensemble_alpha_is_deterministic_and_reports_failures() {
        let spec = rough_spec();
        let mut opts = CellOptions::new(0.5, 2.0, 1.0 / 10.0);
        opts.flux = 0.1;
        let seeds = [11, 12, 13];
        let e1 = ensemble_alpha(&spec, &seeds, Side::Lower, &opts);
        let e2 = ensemble_alpha(&spec, &seeds, Side::Lower, &opts);
        assert_eq!(e1.samples.len(), 3);
        assert!(e1.failures.is_empty());
        for (a, b) in e1.samples.iter().zip(&e2.samples) {
            assert_eq!(a.alpha, b.alpha, "ensemble must be bitwise deterministic");
        }
        assert!(e1.mean.unwrap() > 0.0);
        assert!(e1.spread >= 0.0);
        // An impossible plateau tolerance turns every draw into a recorded
        // failure instead of a panic.
        let mut strict = opts;
        strict.plateau_tol = 1e-18;
        let bad = ensemble_alpha(&spec, &seeds, Side::Lower, &strict);
        assert!(bad.samples.is_empty());
        assert_eq!(bad.failures.len(), 3);
        assert!(bad.mean.is_none());
        assert!(bad.failures[0].message.contains("did not settle"));
    }
}
