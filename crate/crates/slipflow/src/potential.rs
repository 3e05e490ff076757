//! Half-plane double-layer representation of viscous flow.
//!
//! A bounded, laterally periodic Stokes field in the upper half plane is
//! determined by its trace on the line `y₂ = 0` and can be written as a
//! convolution of that trace with the half-plane kernel
//!
//! ```text
//! K_ij(y) = (2 y₂ / π) · y_i y_j / |y|⁴        (y₂ > 0)
//! ```
//!
//! whose rows integrate to the identity at every height — constants are
//! reproduced exactly. This gives a solver-independent cross-check of the
//! cell problems: the field a cell solver computed above the roughness must
//! match the convolution of its own matching-line trace.
//!
//! The kernel decays only like `1/y₁²`, so truncating the convolution
//! converges poorly. For periodic traces the convolution is instead taken
//! against the *periodized* kernel `Σ_m K(y₁ + mT, y₂)`, which has a closed
//! form through `Σ_m 1/((s+m)² + a²) = (π/a)·sinh 2πa / (cosh 2πa − cos 2πs)`
//! and its derivatives: one smooth single-period integral, no tails at all.

use crate::boundary_layer::CellFlow;
use crate::error::{Error, Result};
use crate::fem::quadrature::adaptive_simpson;
use std::f64::consts::PI;

/// The free-space half-plane kernel at `y` (rows: velocity component of the
/// reconstruction; columns: trace component).
pub fn kernel(y1: f64, y2: f64) -> Result<[[f64; 2]; 2]> {
    if !(y2 > 0.0) {
        return Err(Error::OutOfDomain(format!(
            "half-plane kernel needs a positive height, got y2 = {y2}"
        )));
    }
    let r2 = y1 * y1 + y2 * y2;
    let c = 2.0 * y2 / (PI * r2 * r2);
    Ok([[c * y1 * y1, c * y1 * y2], [c * y1 * y2, c * y2 * y2]])
}

/// Row mass of the free-space kernel beyond `|y₁| > w` (closed form). The
/// off-diagonal contributions cancel by parity.
pub fn truncated_tail_mass(w: f64, y2: f64) -> Result<[[f64; 2]; 2]> {
    if !(y2 > 0.0) || !(w >= 0.0) {
        return Err(Error::OutOfDomain(
            "tail mass needs y2 > 0 and w >= 0".into(),
        ));
    }
    let a = y2;
    // ∫ s²/(s²+a²)² ds = atan(s/a)/(2a) − s/(2(s²+a²))
    let t11 = PI / (4.0 * a) - (w / a).atan() / (2.0 * a) + w / (2.0 * (w * w + a * a));
    // ∫ ds/(s²+a²)²   = s/(2a²(s²+a²)) + atan(s/a)/(2a³)
    let t22 = PI / (4.0 * a * a * a)
        - w / (2.0 * a * a * (w * w + a * a))
        - (w / a).atan() / (2.0 * a * a * a);
    Ok([
        [2.0 * (2.0 * a / PI) * t11, 0.0],
        [0.0, 2.0 * (2.0 * a * a * a / PI) * t22],
    ])
}

/// Row mass `∫_ℝ K(y₁, y₂) dy₁` computed numerically (the tangent
/// substitution maps the line onto a bounded, smooth integral). Equals the
/// identity for every height; kept numeric so it can audit `kernel` itself.
pub fn kernel_row_mass(y2: f64, tol: f64) -> Result<[[f64; 2]; 2]> {
    if !(y2 > 0.0) {
        return Err(Error::OutOfDomain(
            "row mass needs a positive height".into(),
        ));
    }
    let mut m = [[0.0_f64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let f = |theta: f64| {
                let y1 = y2 * theta.tan();
                let jac = y2 / (theta.cos() * theta.cos());
                kernel(y1, y2).expect("y2 > 0")[i][j] * jac
            };
            let (v, _) = adaptive_simpson(&f, -PI / 2.0 + 1e-9, PI / 2.0 - 1e-9, tol);
            m[i][j] = v;
        }
    }
    Ok(m)
}

/// The laterally periodized kernel `Σ_m K(s + mT, y₂)` in closed form.
pub fn periodized_kernel(s: f64, y2: f64, period: f64) -> Result<[[f64; 2]; 2]> {
    if !(y2 > 0.0) {
        return Err(Error::OutOfDomain(format!(
            "periodized kernel needs a positive height, got y2 = {y2}"
        )));
    }
    if !(period > 0.0) {
        return Err(Error::Config("kernel period must be positive".into()));
    }
    // K is homogeneous of degree −1: reduce to period 1 and rescale.
    let sp = s / period;
    let a = y2 / period;
    let two_pi = 2.0 * PI;
    if two_pi * a > 300.0 {
        // cosh overflows; the kernel is uniform to below machine precision.
        return Ok([[1.0 / period, 0.0], [0.0, 1.0 / period]]);
    }
    let ch = (two_pi * a).cosh();
    let sh = (two_pi * a).sinh();
    let cs = (two_pi * sp).cos();
    let sn = (two_pi * sp).sin();
    let d = ch - cs;
    // C(s,a) = Σ_m ((s+m)² + a²)⁻¹ = (π/a)·sinh(2πa) / (cosh(2πa) − cos(2πs))
    let n = PI * sh / a;
    let c = n / d;
    let dn_da = PI * (two_pi * ch * a - sh) / (a * a);
    let dc_da = (dn_da * d - n * two_pi * sh) / (d * d);
    let dc_ds = -n * two_pi * sn / (d * d);
    // Σ s²/(s²+a²)²  = C + (a/2) ∂C/∂a
    // Σ s /(s²+a²)²  = −(1/2) ∂C/∂s
    // Σ 1 /(s²+a²)²  = −(1/(2a)) ∂C/∂a
    let k11 = (2.0 * a / PI) * (c + 0.5 * a * dc_da);
    let k12 = -(a * a / PI) * dc_ds;
    let k22 = -(a * a / PI) * dc_da;
    Ok([
        [k11 / period, k12 / period],
        [k12 / period, k22 / period],
    ])
}

/// Reconstruct a periodic half-plane field at `(x1, x2)` from its trace on
/// the line `y₂ = 0`. `trace(t)` must be `period`-periodic; the integral
/// uses the midpoint rule with `samples` points, which converges
/// geometrically for smooth traces (the integrand is analytic in a strip of
/// width `x2`).
pub fn reconstruct_periodic(
    trace: &dyn Fn(f64) -> [f64; 2],
    period: f64,
    x1: f64,
    x2: f64,
    samples: usize,
) -> Result<[f64; 2]> {
    if samples == 0 {
        return Err(Error::Config("need at least one trace sample".into()));
    }
    let h = period / samples as f64;
    let mut out = [0.0_f64; 2];
    for m in 0..samples {
        let t = (m as f64 + 0.5) * h;
        let g = trace(t);
        let k = periodized_kernel(x1 - t, x2, period)?;
        for i in 0..2 {
            out[i] += h * (k[i][0] * g[0] + k[i][1] * g[1]);
        }
    }
    Ok(out)
}

/// Agreement between a cell solver's field and the double-layer
/// reconstruction from its own matching-line trace.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CellCrosscheck {
    /// Target points (solver coordinates), row per point.
    pub targets: Vec<[f64; 2]>,
    /// max |reconstruction − field| over targets and components.
    pub max_abs_err: f64,
    /// Per-target error (∞-norm over components).
    pub per_target: Vec<f64>,
    /// Largest deviation of the trace from the far-field constant: the
    /// natural scale of the decaying part being reconstructed.
    pub deviation_scale: f64,
    /// Quadrature budget: largest shift under halving the trace sampling.
    pub budget: f64,
}

/// Compare the cell field against the reconstruction from its trace at a
/// grid of heights and lateral stations. Heights must clear twice the mesh
/// spacing (below that the trace cannot resolve the kernel concentration)
/// and stay under 80% of the cap.
pub fn crosscheck_cell(
    cell: &CellFlow,
    heights: &[f64],
    stations: usize,
    samples: usize,
) -> Result<CellCrosscheck> {
    let mesh = &cell.mesh;
    let period = 2.0 * mesh.halfwidth;
    let x0 = -mesh.halfwidth;
    for &h in heights {
        if h < 2.0 * mesh.target_h || h > 0.8 * mesh.cap {
            return Err(Error::OutOfDomain(format!(
                "crosscheck height {h} outside [2·target_h, 0.8·cap] = [{}, {}]",
                2.0 * mesh.target_h,
                0.8 * mesh.cap
            )));
        }
    }
    let trace = |t: f64| cell.velocity_raw(t, 0.0).expect("matching line is interior");
    let u_inf = cell.report.u_infinity_raw;
    let mut deviation_scale = 0.0_f64;
    for m in 0..samples {
        let g = trace(x0 + period * (m as f64 + 0.5) / samples as f64);
        deviation_scale = deviation_scale
            .max((g[0] - u_inf[0]).abs())
            .max((g[1] - u_inf[1]).abs());
    }

    let mut targets = Vec::new();
    let mut per_target = Vec::new();
    let mut max_abs_err = 0.0_f64;
    let mut budget = 0.0_f64;
    for &h in heights {
        for j in 0..stations {
            let x1 = x0 + period * (j as f64 + 0.37) / stations as f64;
            let fine = reconstruct_periodic(&trace, period, x1, h, samples)?;
            let coarse = reconstruct_periodic(&trace, period, x1, h, samples / 2)?;
            let field = cell
                .velocity_raw(x1, h)
                .ok_or_else(|| Error::OutOfDomain(format!("target ({x1}, {h}) left the mesh")))?;
            let err = (fine[0] - field[0]).abs().max((fine[1] - field[1]).abs());
            budget = budget
                .max((fine[0] - coarse[0]).abs())
                .max((fine[1] - coarse[1]).abs());
            targets.push([x1, h]);
            per_target.push(err);
            max_abs_err = max_abs_err.max(err);
        }
    }
    Ok(CellCrosscheck {
        targets,
        max_abs_err,
        per_target,
        deviation_scale,
        budget,
    })
}
