//! Windowed integrals and norms over column-structured meshes.
//!
//! All routines take a *sampler* `f(tri, point) -> f64`: the integrand
//! density evaluated at a physical point known to lie in triangle `tri`.
//! Passing the triangle id lets finite-element fields evaluate their local
//! polynomial directly. None of the norm routines apply a square root: to
//! compute an L²-type norm, pass the squared density and take the root of
//! the result.

use crate::error::{Error, Result};
use crate::fem::quadrature::{segment_rule, triangle_rule};
use crate::geometry::clip::{clip_triangle_slab, fan_triangulate, signed_area, triangle_line_section};
use crate::geometry::mesh::TriMesh;

/// Integrand density evaluated at a point inside a given triangle.
pub type Sampler<'a> = &'a dyn Fn(usize, [f64; 2]) -> f64;

/// Flavours of the lateral-window norms used by the studies.
#[derive(Debug, Clone, PartialEq)]
pub enum WindowNorm {
    /// sup over radii R of (1/R) ∫ over the window |x₁| < R.
    B2Sup { radii: Vec<f64> },
    /// sup over unit-width windows of the plain integral.
    L2Uloc,
    /// Plain integral over the whole window.
    PlainL2,
}

impl WindowNorm {
    pub fn parse(kind: &str, radii: &[f64]) -> Result<Self> {
        match kind {
            "b2-sup" => {
                if radii.is_empty() {
                    return Err(Error::config("b2-sup norm needs at least one radius"));
                }
                Ok(WindowNorm::B2Sup {
                    radii: radii.to_vec(),
                })
            }
            "l2-uloc" => Ok(WindowNorm::L2Uloc),
            "plain-l2" => Ok(WindowNorm::PlainL2),
            other => Err(Error::config(format!(
                "unknown norm kind '{other}' (expected b2-sup, l2-uloc, or plain-l2)"
            ))),
        }
    }
}

/// Integrate a sampler over one physical triangle.
fn tri_integral(tri_id: usize, coords: &[[f64; 2]; 3], f: Sampler) -> f64 {
    let area2 = 2.0 * signed_area(coords).abs();
    let mut acc = 0.0;
    for q in triangle_rule() {
        let p = [
            coords[0][0] + q.xi * (coords[1][0] - coords[0][0]) + q.eta * (coords[2][0] - coords[0][0]),
            coords[0][1] + q.xi * (coords[1][1] - coords[0][1]) + q.eta * (coords[2][1] - coords[0][1]),
        ];
        acc += q.w * f(tri_id, p);
    }
    acc * area2
}

/// Integral of the sampler over `tris ∩ {xlo ≤ x₁ ≤ xhi}`.
pub fn integral_over_slab(mesh: &TriMesh, tris: &[usize], xlo: f64, xhi: f64, f: Sampler) -> f64 {
    let mut total = 0.0;
    for &t in tris {
        let c = mesh.tri_coords(t);
        let txlo = c[0][0].min(c[1][0]).min(c[2][0]);
        let txhi = c[0][0].max(c[1][0]).max(c[2][0]);
        if txhi <= xlo || txlo >= xhi {
            continue;
        }
        if txlo >= xlo && txhi <= xhi {
            total += tri_integral(t, &c, f);
        } else {
            let poly = clip_triangle_slab(&c, xlo, xhi);
            for sub in fan_triangulate(&poly) {
                total += tri_integral(t, &sub, f);
            }
        }
    }
    total
}

/// Integral of the sampler over all listed triangles.
pub fn integral_over(mesh: &TriMesh, tris: &[usize], f: Sampler) -> f64 {
    tris.iter()
        .map(|&t| tri_integral(t, &mesh.tri_coords(t), f))
        .sum()
}

/// Evaluate a windowed norm of the sampler over the listed triangles.
pub fn windowed_norm(mesh: &TriMesh, tris: &[usize], norm: &WindowNorm, f: Sampler) -> Result<f64> {
    let half = mesh.halfwidth();
    let x0 = mesh.xcols[0];
    let x1 = mesh.xcols[mesh.ncols];
    match norm {
        WindowNorm::B2Sup { radii } => {
            let mut best = f64::NEG_INFINITY;
            for &r in radii {
                if !(r > 0.0) {
                    return Err(Error::config("b2-sup radii must be positive"));
                }
                if r > half + 1e-12 {
                    return Err(Error::config(format!(
                        "b2-sup radius {r} exceeds the mesh halfwidth {half}"
                    )));
                }
                let v = integral_over_slab(mesh, tris, -r, r, f) / r;
                best = best.max(v);
            }
            Ok(best)
        }
        WindowNorm::L2Uloc => {
            let mut best = f64::NEG_INFINITY;
            let mut k = x0.floor();
            while k < x1 {
                let (lo, hi) = (k.max(x0), (k + 1.0).min(x1));
                if hi > lo {
                    best = best.max(integral_over_slab(mesh, tris, lo, hi, f));
                }
                k += 1.0;
            }
            Ok(best)
        }
        WindowNorm::PlainL2 => Ok(integral_over(mesh, tris, f)),
    }
}

/// Integral of the sampler along the horizontal line `x₂ = y` across the
/// whole lateral window. When `y` coincides with a flat mesh level the
/// integral runs along that level's edges (valid for samplers continuous
/// across edges); otherwise the line is intersected with each element.
pub fn horizontal_line_integral(mesh: &TriMesh, y: f64, f: Sampler) -> f64 {
    let height = mesh.levels[0][mesh.nrows] - mesh.levels[0][0];
    for j in 0..=mesh.nrows {
        if mesh.level_is_flat(j) && (mesh.levels[0][j] - y).abs() <= 1e-9 * height.max(1.0) {
            return row_level_integral(mesh, j, f);
        }
    }
    let mut total = 0.0;
    for i in 0..mesh.ncols {
        for j in 0..mesh.nrows {
            let ymin = mesh.levels[i][j].min(mesh.levels[i + 1][j]);
            let ymax = mesh.levels[i][j + 1].max(mesh.levels[i + 1][j + 1]);
            if y < ymin || y > ymax {
                continue;
            }
            for t in [2 * (i * mesh.nrows + j), 2 * (i * mesh.nrows + j) + 1] {
                let c = mesh.tri_coords(t);
                if let Some((lo, hi)) = triangle_line_section(&c, y) {
                    total += segment_integral(t, lo, hi, y, f);
                }
            }
        }
    }
    total
}

/// Integral along the flat node level `j` using its edges directly.
fn row_level_integral(mesh: &TriMesh, j: usize, f: Sampler) -> f64 {
    let y = mesh.levels[0][j];
    let mut total = 0.0;
    for i in 0..mesh.ncols {
        // Use the triangle just above the edge (or below for the cap row).
        let t = if j < mesh.nrows {
            2 * (i * mesh.nrows + j)
        } else {
            2 * (i * mesh.nrows + (mesh.nrows - 1)) + 1
        };
        total += segment_integral(t, mesh.xcols[i], mesh.xcols[i + 1], y, f);
    }
    total
}

fn segment_integral(tri_id: usize, xlo: f64, xhi: f64, y: f64, f: Sampler) -> f64 {
    let len = xhi - xlo;
    let mut acc = 0.0;
    for q in segment_rule() {
        acc += q.w * f(tri_id, [xlo + q.t * len, y]);
    }
    acc * len
}

/// Average of the sampler over the horizontal line `x₂ = y` (integral
/// divided by the window width).
pub fn lateral_average(mesh: &TriMesh, y: f64, f: Sampler) -> f64 {
    horizontal_line_integral(mesh, y, f) / (mesh.xcols[mesh.ncols] - mesh.xcols[0])
}

/// Integral of the sampler along the vertical column line `i` (bottom to
/// top). The sampler is evaluated inside the quad to the right of the line
/// (to the left for the last line), so it must be continuous across column
/// lines.
pub fn column_line_integral(mesh: &TriMesh, i: usize, f: Sampler) -> f64 {
    assert!(i <= mesh.ncols);
    let x = mesh.xcols[i];
    let mut total = 0.0;
    for j in 0..mesh.nrows {
        let (ylo, yhi, tri) = if i < mesh.ncols {
            // Upper triangle of quad (i, j) carries the left edge.
            (mesh.levels[i][j], mesh.levels[i][j + 1], 2 * (i * mesh.nrows + j) + 1)
        } else {
            // Lower triangle of quad (i-1, j) carries the right edge.
            (
                mesh.levels[i][j],
                mesh.levels[i][j + 1],
                2 * ((i - 1) * mesh.nrows + j),
            )
        };
        let len = yhi - ylo;
        let mut acc = 0.0;
        for q in segment_rule() {
            acc += q.w * f(tri, [x, ylo + q.t * len]);
        }
        total += acc * len;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::mesh::{build_channel_mesh, build_halfstrip_mesh, Side};
    use crate::roughness::{sample_boundary, RoughnessKind, RoughnessSpec};

    fn flat_channel(halfwidth: f64) -> crate::geometry::mesh::ChannelMesh {
        let spec = RoughnessSpec {
            kind: RoughnessKind::FlatOffset,
            mode_count: 0,
            amplitude: 0.0,
            clamp_margin: 0.01,
            lipschitz_cap: 1.0,
            period_hint: None,
        };
        let pair = sample_boundary(&spec, 1).unwrap();
        build_channel_mesh(&pair, 0.4, halfwidth, 0.1).unwrap()
    }

    #[test]
    fn b2_sup_of_unit_density_is_two() {
        // Density 1 over the unit strip: (1/R) * (2R * 1) = 2 at every R.
        let ch = flat_channel(4.0);
        let tris = ch.core_tris();
        let norm = WindowNorm::B2Sup {
            radii: vec![1.0, 2.0, 4.0],
        };
        let v = windowed_norm(&ch.mesh, &tris, &norm, &|_, _| 1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn uloc_and_plain_norms_of_unit_density() {
        let ch = flat_channel(2.0);
        let tris = ch.core_tris();
        let v = windowed_norm(&ch.mesh, &tris, &WindowNorm::L2Uloc, &|_, _| 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "unit window over unit strip: {v}");
        let v = windowed_norm(&ch.mesh, &tris, &WindowNorm::PlainL2, &|_, _| 1.0).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
    }

    #[test]
    fn clipped_polynomial_integrals_are_exact() {
        let ch = flat_channel(1.0);
        let tris = ch.core_tris();
        // f = x² y over the core, clipped to |x| < 0.7 (cuts through cells):
        // integral = (2·0.7³/3)·(1/2).
        let f = |_: usize, p: [f64; 2]| p[0] * p[0] * p[1];
        let v = integral_over_slab(&ch.mesh, &tris, -0.7, 0.7, &f);
        let want = 2.0 * 0.7_f64.powi(3) / 3.0 * 0.5;
        assert!((v - want).abs() < 1e-12, "got {v}, want {want}");
    }

    #[test]
    fn line_integrals_on_and_off_mesh_levels() {
        let spec = RoughnessSpec {
            kind: RoughnessKind::ShiftedPeriodic,
            mode_count: 2,
            amplitude: 0.2,
            clamp_margin: 0.05,
            lipschitz_cap: 2.0,
            period_hint: Some(1.0),
        };
        let pair = sample_boundary(&spec, 3).unwrap();
        let hs = build_halfstrip_mesh(&pair, Side::Lower, 1.0, 4.0, 0.1).unwrap();
        let f = |_: usize, p: [f64; 2]| p[0] * p[0];
        let want = 2.0 / 3.0; // ∫_{-1}^{1} x² dx
        // On the matching line y = 0 (a flat level).
        let v0 = horizontal_line_integral(&hs.mesh, 0.0, &f);
        assert!((v0 - want).abs() < 1e-12, "on-level: {v0}");
        // At a height that is not a mesh level.
        let v1 = horizontal_line_integral(&hs.mesh, 1.2345, &f);
        assert!((v1 - want).abs() < 1e-10, "off-level: {v1}");
        // Lateral average of a linear-in-y density at that height.
        let g = |_: usize, p: [f64; 2]| 3.0 * p[1];
        let a = lateral_average(&hs.mesh, 1.2345, &g);
        assert!((a - 3.0 * 1.2345).abs() < 1e-10);
    }

    #[test]
    fn column_line_integral_of_polynomial() {
        let ch = flat_channel(1.0);
        // Column lines span the full channel height (flat walls: 0 to 1).
        let f = |_: usize, p: [f64; 2]| 6.0 * p[1] * (1.0 - p[1]);
        for i in [0, ch.mesh.ncols / 2, ch.mesh.ncols] {
            let v = column_line_integral(&ch.mesh, i, &f);
            assert!((v - 1.0).abs() < 1e-12, "column {i}: {v}");
        }
    }
}
