//! Column-structured triangle meshes for the channel and half-strip domains.
//!
//! Both domains are meshed the same way: uniform vertical columns across the
//! lateral window, and per-column vertical node levels that follow the rough
//! wall exactly (wall nodes are placed by evaluating the boundary curve) and
//! land exactly on the horizontal interface lines. Quads are split into two
//! triangles along the same diagonal, which keeps the element pattern fully
//! deterministic.

use crate::error::{Error, Result};
use crate::roughness::{BoundaryPair, WallProfile};
use std::io::Write as _;

/// Which physical wall a half-strip cell problem resolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Side {
    Lower,
    Upper,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Lower => write!(f, "lower"),
            Side::Upper => write!(f, "upper"),
        }
    }
}

/// Region of a channel mesh row: below the flat strip, inside it, or above.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowRegion {
    BottomBand,
    Core,
    TopBand,
}

/// A structured triangle mesh over a column grid.
///
/// Nodes are indexed `node(i, j) = i * (nrows + 1) + j` for column line
/// `i ∈ 0..=ncols` and level `j ∈ 0..=nrows`; `levels[i][j]` is the height of
/// that node. Each grid quad is split along the diagonal from its lower-left
/// to its upper-right corner, producing triangles `2*(i*nrows + j)` (lower)
/// and `2*(i*nrows + j) + 1` (upper).
#[derive(Debug, Clone)]
pub struct TriMesh {
    pub nodes: Vec<[f64; 2]>,
    pub tris: Vec<[usize; 3]>,
    pub ncols: usize,
    pub nrows: usize,
    pub xcols: Vec<f64>,
    pub levels: Vec<Vec<f64>>,
    /// Number of wall-fitted rows at the bottom (rows `0..m_bottom`).
    pub m_bottom: usize,
    /// Number of wall-fitted rows at the top.
    pub m_top: usize,
}

impl TriMesh {
    pub fn node_id(&self, i: usize, j: usize) -> usize {
        i * (self.nrows + 1) + j
    }

    /// Column/level of a node id.
    pub fn node_ij(&self, id: usize) -> (usize, usize) {
        (id / (self.nrows + 1), id % (self.nrows + 1))
    }

    /// Grid position of a triangle: (column, row, upper-half flag).
    pub fn tri_ij(&self, t: usize) -> (usize, usize, bool) {
        let quad = t / 2;
        (quad / self.nrows, quad % self.nrows, t % 2 == 1)
    }

    pub fn halfwidth(&self) -> f64 {
        0.5 * (self.xcols[self.ncols] - self.xcols[0])
    }

    pub fn tri_coords(&self, t: usize) -> [[f64; 2]; 3] {
        let v = self.tris[t];
        [self.nodes[v[0]], self.nodes[v[1]], self.nodes[v[2]]]
    }

    /// Whether node level `j` has the same height in every column.
    pub fn level_is_flat(&self, j: usize) -> bool {
        j >= self.m_bottom && j + self.m_top <= self.nrows
    }

    /// Whether row interval `j` (between levels `j` and `j+1`) is bounded by
    /// two flat levels.
    pub fn row_is_flat(&self, j: usize) -> bool {
        self.level_is_flat(j) && self.level_is_flat(j + 1)
    }

    /// Lateral boundary node pairs (right node, matching left node).
    pub fn periodic_node_pairs(&self) -> Vec<(usize, usize)> {
        (0..=self.nrows)
            .map(|j| (self.node_id(self.ncols, j), self.node_id(0, j)))
            .collect()
    }

    /// Bottom boundary nodes, left to right.
    pub fn bottom_nodes(&self) -> Vec<usize> {
        (0..=self.ncols).map(|i| self.node_id(i, 0)).collect()
    }

    /// Top boundary nodes, left to right.
    pub fn top_nodes(&self) -> Vec<usize> {
        (0..=self.ncols)
            .map(|i| self.node_id(i, self.nrows))
            .collect()
    }

    /// Horizontal edges along level `j`, as (left node, right node) pairs.
    pub fn row_edges(&self, j: usize) -> Vec<[usize; 2]> {
        (0..self.ncols)
            .map(|i| [self.node_id(i, j), self.node_id(i + 1, j)])
            .collect()
    }

    /// Vertical edges along column line `i`, bottom to top.
    pub fn column_edges(&self, i: usize) -> Vec<[usize; 2]> {
        (0..self.nrows)
            .map(|j| [self.node_id(i, j), self.node_id(i, j + 1)])
            .collect()
    }

    /// Triangle ids whose row index satisfies a predicate.
    pub fn tris_in_rows(&self, pred: impl Fn(usize) -> bool) -> Vec<usize> {
        (0..self.tris.len())
            .filter(|&t| pred(self.tri_ij(t).1))
            .collect()
    }

    /// Minimum element quality 2r/R over the mesh (1 for equilateral).
    pub fn min_quality(&self) -> f64 {
        (0..self.tris.len())
            .map(|t| triangle_quality(&self.tri_coords(t)))
            .fold(f64::INFINITY, f64::min)
    }

    /// Interpolated height of level `j` at lateral position `x` (clamped to
    /// the window).
    fn level_at(&self, j: usize, x: f64) -> f64 {
        let w = self.xcols[self.ncols] - self.xcols[0];
        let s = ((x - self.xcols[0]) / w * self.ncols as f64).clamp(0.0, self.ncols as f64);
        let i = (s.floor() as usize).min(self.ncols - 1);
        let t = s - i as f64;
        self.levels[i][j] * (1.0 - t) + self.levels[i + 1][j] * t
    }

    /// Locate the triangle containing `(x, y)`, wrapping `x` periodically
    /// into the lateral window. Returns the triangle id and barycentric
    /// coordinates. `None` when `y` is outside the domain.
    pub fn locate(&self, x: f64, y: f64) -> Option<(usize, [f64; 3])> {
        let x0 = self.xcols[0];
        let w = self.xcols[self.ncols] - x0;
        let mut xr = (x - x0).rem_euclid(w) + x0;
        if !xr.is_finite() {
            return None;
        }
        // rem_euclid can return exactly w for x just below the window start.
        if xr >= self.xcols[self.ncols] {
            xr = self.xcols[self.ncols];
        }
        let s = ((xr - x0) / w * self.ncols as f64).clamp(0.0, self.ncols as f64);
        let i = (s.floor() as usize).min(self.ncols - 1);
        if y < self.level_at(0, xr) - 1e-12 || y > self.level_at(self.nrows, xr) + 1e-12 {
            return None;
        }
        // Binary search for the row whose interpolated bounds bracket y.
        let (mut lo, mut hi) = (0usize, self.nrows);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if y >= self.level_at(mid, xr) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let j = lo;
        // Two candidate triangles in quad (i, j); accept the one whose
        // barycentric coordinates are (almost) nonnegative.
        let base = 2 * (i * self.nrows + j);
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for t in [base, base + 1] {
            let c = self.tri_coords(t);
            let b = barycentric(&c, [xr, y]);
            let worst = b[0].min(b[1]).min(b[2]);
            if best.as_ref().map_or(true, |(_, _, w0)| worst > *w0) {
                best = Some((t, b, worst));
            }
        }
        // Fall back to neighbouring columns for points on column lines where
        // shear makes the nominal quad miss by roundoff.
        let (t, b, worst) = best.unwrap();
        if worst > -1e-9 {
            return Some((t, clamp_bary(b)));
        }
        for di in [-1i64, 1] {
            let ii = i as i64 + di;
            if ii < 0 || ii >= self.ncols as i64 {
                continue;
            }
            let base = 2 * (ii as usize * self.nrows + j);
            for t in [base, base + 1] {
                let c = self.tri_coords(t);
                let b = barycentric(&c, [xr, y]);
                if b[0].min(b[1]).min(b[2]) > -1e-9 {
                    return Some((t, clamp_bary(b)));
                }
            }
        }
        Some((t, clamp_bary(b)))
    }

    /// Write the mesh in the plain-text dump format (see docs/formats.md).
    pub fn dump(&self, path: &std::path::Path, tags: &[(String, String)]) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "# slipflow mesh v1")?;
        writeln!(f, "nodes {}", self.nodes.len())?;
        for (k, p) in self.nodes.iter().enumerate() {
            writeln!(f, "{} {:.17e} {:.17e}", k, p[0], p[1])?;
        }
        writeln!(f, "triangles {}", self.tris.len())?;
        for (k, t) in self.tris.iter().enumerate() {
            writeln!(f, "{} {} {} {}", k, t[0], t[1], t[2])?;
        }
        writeln!(f, "grid ncols {} nrows {}", self.ncols, self.nrows)?;
        writeln!(f, "bands bottom {} top {}", self.m_bottom, self.m_top)?;
        for (k, v) in tags {
            writeln!(f, "tag {} {}", k, v)?;
        }
        Ok(())
    }
}

fn clamp_bary(b: [f64; 3]) -> [f64; 3] {
    let c = [b[0].max(0.0), b[1].max(0.0), b[2].max(0.0)];
    let s = c[0] + c[1] + c[2];
    [c[0] / s, c[1] / s, c[2] / s]
}

/// Barycentric coordinates of `p` in triangle `t`.
pub fn barycentric(t: &[[f64; 2]; 3], p: [f64; 2]) -> [f64; 3] {
    let d = (t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[2][0] - t[0][0]) * (t[1][1] - t[0][1]);
    let l1 = ((p[0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[2][0] - t[0][0]) * (p[1] - t[0][1])) / d;
    let l2 = ((t[1][0] - t[0][0]) * (p[1] - t[0][1]) - (p[0] - t[0][0]) * (t[1][1] - t[0][1])) / d;
    [1.0 - l1 - l2, l1, l2]
}

/// Element quality 2r/R: 1 for equilateral, → 0 for degenerate triangles.
pub fn triangle_quality(t: &[[f64; 2]; 3]) -> f64 {
    let e = |a: [f64; 2], b: [f64; 2]| ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
    let (a, b, c) = (e(t[1], t[2]), e(t[0], t[2]), e(t[0], t[1]));
    let area = super::clip::signed_area(t).abs();
    if area <= 0.0 {
        return 0.0;
    }
    let r = 2.0 * area / (a + b + c);
    let bigr = a * b * c / (4.0 * area);
    2.0 * r / bigr
}

/// Smallest acceptable element quality; builders refuse meshes below this.
pub const QUALITY_FLOOR: f64 = 0.1;

/// Graded node levels from 0 to 1: spacing starts at `h0` at both ends,
/// grows geometrically by `ratio`, and is capped at `hmax`.
fn graded_unit_levels(h0: f64, hmax: f64, ratio: f64) -> Vec<f64> {
    let mut half: Vec<f64> = Vec::new();
    let mut s = 0.0;
    let mut h = h0;
    while s < 0.5 {
        let inc = h.min(hmax);
        half.push(inc);
        s += inc;
        h *= ratio;
    }
    let scale = 0.5 / s;
    let mut levels = vec![0.0];
    let mut acc = 0.0;
    for inc in &half {
        acc += inc * scale;
        levels.push(acc);
    }
    let n = levels.len();
    levels[n - 1] = 0.5;
    let mut upper: Vec<f64> = levels[..n - 1].iter().rev().map(|v| 1.0 - v).collect();
    levels.append(&mut upper);
    levels
}

/// Graded node levels from 0 to `total`: spacing starts at `h0`, grows
/// geometrically, capped at `hmax`; a sliver last interval is merged away.
fn graded_one_sided(h0: f64, hmax: f64, ratio: f64, total: f64) -> Vec<f64> {
    let mut incs: Vec<f64> = Vec::new();
    let mut s = 0.0;
    let mut h = h0;
    while s < total - 1e-12 * total {
        let inc = h.min(hmax).min(total - s);
        incs.push(inc);
        s += inc;
        h *= ratio;
    }
    if incs.len() >= 2 {
        let n = incs.len();
        if incs[n - 1] < 0.5 * incs[n - 2] {
            let merged = incs[n - 1] + incs[n - 2];
            incs.truncate(n - 2);
            incs.push(0.5 * merged);
            incs.push(0.5 * merged);
        }
    }
    let mut levels = vec![0.0];
    let mut acc = 0.0;
    for inc in &incs {
        acc += inc;
        levels.push(acc);
    }
    let n = levels.len();
    levels[n - 1] = total;
    levels
}

fn build_from_levels(xcols: Vec<f64>, levels: Vec<Vec<f64>>, m_bottom: usize, m_top: usize) -> TriMesh {
    let ncols = xcols.len() - 1;
    let nrows = levels[0].len() - 1;
    let mut nodes = Vec::with_capacity((ncols + 1) * (nrows + 1));
    for (i, &x) in xcols.iter().enumerate() {
        for &y in &levels[i] {
            nodes.push([x, y]);
        }
    }
    let node = |i: usize, j: usize| i * (nrows + 1) + j;
    let mut tris = Vec::with_capacity(2 * ncols * nrows);
    for i in 0..ncols {
        for j in 0..nrows {
            let (n00, n10) = (node(i, j), node(i + 1, j));
            let (n01, n11) = (node(i, j + 1), node(i + 1, j + 1));
            tris.push([n00, n10, n11]);
            tris.push([n00, n11, n01]);
        }
    }
    TriMesh {
        nodes,
        tris,
        ncols,
        nrows,
        xcols,
        levels,
        m_bottom,
        m_top,
    }
}

/// Rough channel mesh: the domain between `x₂ = -ε h_l(x₁/ε)` and
/// `x₂ = 1 + ε h_u(x₁/ε)` over the lateral window `|x₁| ≤ halfwidth`.
#[derive(Debug, Clone)]
pub struct ChannelMesh {
    pub mesh: TriMesh,
    pub pair: BoundaryPair,
    pub epsilon: f64,
    pub halfwidth: f64,
    /// Row index of the flat interface `x₂ = 0`.
    pub sigma0_row: usize,
    /// Row index of the flat interface `x₂ = 1`.
    pub sigma1_row: usize,
    pub target_h: f64,
}

impl ChannelMesh {
    pub fn region_of_row(&self, j: usize) -> RowRegion {
        if j < self.sigma0_row {
            RowRegion::BottomBand
        } else if j < self.sigma1_row {
            RowRegion::Core
        } else {
            RowRegion::TopBand
        }
    }

    /// Triangles of the flat core strip 0 < x₂ < 1.
    pub fn core_tris(&self) -> Vec<usize> {
        let (s0, s1) = (self.sigma0_row, self.sigma1_row);
        self.mesh.tris_in_rows(|j| j >= s0 && j < s1)
    }

    /// All triangles (the full rough channel).
    pub fn all_tris(&self) -> Vec<usize> {
        (0..self.mesh.tris.len()).collect()
    }
}

/// Build a channel mesh. `target_h` is the element size at the walls; the
/// core spacing is allowed to grow to four times that.
pub fn build_channel_mesh(
    pair: &BoundaryPair,
    epsilon: f64,
    halfwidth: f64,
    target_h: f64,
) -> Result<ChannelMesh> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::config(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if !(halfwidth > 0.0) || !(target_h > 0.0) {
        return Err(Error::config("halfwidth and target_h must be positive"));
    }
    if target_h > epsilon / 4.0 + 1e-12 {
        return Err(Error::config(format!(
            "unresolved roughness: target_h = {target_h} exceeds epsilon/4 = {}; \
             refine to at most that",
            epsilon / 4.0
        )));
    }
    let window = 2.0 * halfwidth / epsilon;
    if !crate::roughness::is_periodic_over(pair, window, 1e-9) {
        return Err(Error::config(format!(
            "boundary pair is not periodic over the lateral window {window} \
             (in fast-variable units); periodize it first"
        )));
    }

    let ncols = ((2.0 * halfwidth) / target_h).ceil() as usize;
    let ncols = ncols.max(4);
    let xcols: Vec<f64> = (0..=ncols)
        .map(|i| -halfwidth + 2.0 * halfwidth * i as f64 / ncols as f64)
        .collect();

    // Wall-band vertical spacing: at least target_h, but no finer than the
    // lateral shear (slope × column width) — finer rows would only produce
    // degenerate sheared triangles without resolving anything new.
    let dx = 2.0 * halfwidth / ncols as f64;
    let band_rows = |profile: &WallProfile| -> Result<usize> {
        let depth = xcols
            .iter()
            .map(|&x| profile.eval(x / epsilon))
            .fold(0.0_f64, f64::max);
        if depth <= 0.0 {
            return Ok(0);
        }
        let min_depth = xcols
            .iter()
            .map(|&x| profile.eval(x / epsilon))
            .fold(f64::INFINITY, f64::min);
        if min_depth <= 1e-12 {
            return Err(Error::config(
                "wall profile touches its reference line inside the window; \
                 the wall band would degenerate",
            ));
        }
        let spacing = target_h.max(profile.slope_bound() * dx);
        Ok((((epsilon * depth) / spacing).ceil() as usize).max(1))
    };
    let m_l = band_rows(&pair.lower)?;
    let m_u = band_rows(&pair.upper)?;

    let core = graded_unit_levels(target_h, 4.0 * target_h, 1.2);
    let n_core = core.len() - 1;
    let nrows_total = m_l + n_core + m_u;

    let mut levels: Vec<Vec<f64>> = Vec::with_capacity(ncols + 1);
    for &x in &xcols {
        let mut col = Vec::with_capacity(nrows_total + 1);
        let d = epsilon * pair.lower.eval(x / epsilon);
        for j in 0..m_l {
            col.push(-d * (1.0 - j as f64 / m_l as f64));
        }
        col.extend_from_slice(&core);
        let u = epsilon * pair.upper.eval(x / epsilon);
        for j in 1..=m_u {
            col.push(1.0 + u * j as f64 / m_u as f64);
        }
        levels.push(col);
    }
    // Lateral partners must have bitwise-identical heights; the periodicity
    // check above bounds the snap at 1e-9.
    levels[ncols] = levels[0].clone();

    let mesh = build_from_levels(xcols, levels, m_l, m_u);
    let q = mesh.min_quality();
    if q < QUALITY_FLOOR {
        return Err(Error::config(format!(
            "mesh quality {q:.3} fell below the floor {QUALITY_FLOOR}; \
             reduce target_h or the wall slope"
        )));
    }
    Ok(ChannelMesh {
        mesh,
        pair: pair.clone(),
        epsilon,
        halfwidth,
        sigma0_row: m_l,
        sigma1_row: m_l + n_core,
        target_h,
    })
}

/// Half-strip cell mesh: the domain between `y₂ = -h(y₁)` and the stress-free
/// cap `y₂ = cap`, laterally periodic over `|y₁| ≤ halfwidth`.
#[derive(Debug, Clone)]
pub struct HalfStripMesh {
    pub mesh: TriMesh,
    pub pair: BoundaryPair,
    pub side: Side,
    pub halfwidth: f64,
    pub cap: f64,
    /// Row index of the matching line `y₂ = 0`.
    pub sigma0_row: usize,
    pub target_h: f64,
}

impl HalfStripMesh {
    pub fn profile(&self) -> &WallProfile {
        match self.side {
            Side::Lower => &self.pair.lower,
            Side::Upper => &self.pair.upper,
        }
    }
}

/// Build a half-strip mesh for one wall of the pair. The wall profile is the
/// lower or upper member chosen by `side`; the upper-wall cell problem is
/// solved in reflected coordinates so both sides use the same geometry.
pub fn build_halfstrip_mesh(
    pair: &BoundaryPair,
    side: Side,
    halfwidth: f64,
    cap: f64,
    target_h: f64,
) -> Result<HalfStripMesh> {
    if !(halfwidth > 0.0) || !(target_h > 0.0) {
        return Err(Error::config("halfwidth and target_h must be positive"));
    }
    let profile = match side {
        Side::Lower => &pair.lower,
        Side::Upper => &pair.upper,
    };
    let window = 2.0 * halfwidth;
    if !crate::roughness::is_periodic_over(pair, window, 1e-9) {
        return Err(Error::config(format!(
            "wall profile is not periodic over the cell window {window}; periodize it first"
        )));
    }

    let ncols = (window / target_h).ceil() as usize;
    let ncols = ncols.max(4);
    let xcols: Vec<f64> = (0..=ncols)
        .map(|i| -halfwidth + window * i as f64 / ncols as f64)
        .collect();

    let depth = xcols
        .iter()
        .map(|&x| profile.eval(x))
        .fold(0.0_f64, f64::max);
    if !(cap > 1.0) || cap <= depth {
        return Err(Error::config(format!(
            "cell cap height {cap} must exceed 1 and the wall depth {depth:.3}"
        )));
    }
    let m = if depth <= 0.0 {
        0
    } else {
        let min_depth = xcols
            .iter()
            .map(|&x| profile.eval(x))
            .fold(f64::INFINITY, f64::min);
        if min_depth <= 1e-12 {
            return Err(Error::config(
                "wall profile touches its reference line inside the window; \
                 the wall band would degenerate",
            ));
        }
        // Same shear-aware spacing rule as the channel builder.
        let dx = window / ncols as f64;
        let spacing = target_h.max(profile.slope_bound() * dx);
        ((depth / spacing).ceil() as usize).max(1)
    };

    let above = graded_one_sided(target_h, 4.0 * target_h, 1.3, cap);
    let nrows_total = m + above.len() - 1;

    let mut levels: Vec<Vec<f64>> = Vec::with_capacity(ncols + 1);
    for &x in &xcols {
        let mut col = Vec::with_capacity(nrows_total + 1);
        let d = profile.eval(x);
        for j in 0..m {
            col.push(-d * (1.0 - j as f64 / m as f64));
        }
        col.extend_from_slice(&above);
        levels.push(col);
    }
    levels[ncols] = levels[0].clone();

    let mesh = build_from_levels(xcols, levels, m, 0);
    let q = mesh.min_quality();
    if q < QUALITY_FLOOR {
        return Err(Error::config(format!(
            "mesh quality {q:.3} fell below the floor {QUALITY_FLOOR}; \
             reduce target_h or the wall slope"
        )));
    }
    Ok(HalfStripMesh {
        mesh,
        pair: pair.clone(),
        side,
        halfwidth,
        cap,
        sigma0_row: m,
        target_h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roughness::{sample_boundary, RoughnessKind, RoughnessSpec};

    fn flat_pair(offset: f64) -> BoundaryPair {
        let spec = RoughnessSpec {
            kind: RoughnessKind::FlatOffset,
            mode_count: 0,
            amplitude: offset,
            clamp_margin: 0.01,
            lipschitz_cap: 1.0,
            period_hint: None,
        };
        sample_boundary(&spec, 7).unwrap()
    }

    fn periodic_pair() -> BoundaryPair {
        let spec = RoughnessSpec {
            kind: RoughnessKind::ShiftedPeriodic,
            mode_count: 3,
            amplitude: 0.2,
            clamp_margin: 0.05,
            lipschitz_cap: 2.0,
            period_hint: Some(1.0),
        };
        sample_boundary(&spec, 11).unwrap()
    }

    #[test]
    fn flat_channel_mesh_has_exact_interfaces() {
        let pair = flat_pair(0.0);
        let ch = build_channel_mesh(&pair, 0.1, 0.2, 0.02).unwrap();
        assert_eq!(ch.sigma0_row, 0);
        let m = &ch.mesh;
        for i in 0..=m.ncols {
            assert_eq!(m.levels[i][ch.sigma0_row], 0.0);
            assert_eq!(m.levels[i][ch.sigma1_row], 1.0);
        }
        assert!(m.min_quality() > 0.3, "quality {}", m.min_quality());
        // Interior spacing stays within the 4x growth cap.
        for j in 0..m.nrows {
            let dy = m.levels[0][j + 1] - m.levels[0][j];
            assert!(dy <= 4.0 * 0.02 + 1e-12);
            assert!(dy > 0.0);
        }
    }

    #[test]
    fn rough_channel_wall_nodes_lie_on_the_curve() {
        let pair = periodic_pair();
        let eps = 0.1;
        let ch = build_channel_mesh(&pair, eps, 0.5, eps / 8.0).unwrap();
        let m = &ch.mesh;
        for i in 0..=m.ncols {
            let x = m.xcols[i];
            let want_lo = -eps * pair.lower.eval(x / eps);
            let want_hi = 1.0 + eps * pair.upper.eval(x / eps);
            if i < m.ncols {
                assert!((m.levels[i][0] - want_lo).abs() < 1e-10);
                assert!((m.levels[i][m.nrows] - want_hi).abs() < 1e-10);
            }
            assert_eq!(m.levels[i][ch.sigma0_row], 0.0);
            assert_eq!(m.levels[i][ch.sigma1_row], 1.0);
        }
        // Lateral partners identical to machine precision (bitwise here).
        for (r, l) in m.periodic_node_pairs() {
            assert_eq!(m.nodes[r][1], m.nodes[l][1]);
        }
        assert!(m.min_quality() >= QUALITY_FLOOR);
    }

    #[test]
    fn unresolved_roughness_is_refused() {
        let pair = periodic_pair();
        let err = build_channel_mesh(&pair, 0.05, 0.5, 0.05).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let msg = format!("{err}");
        assert!(msg.contains("0.0125"), "message should state the required resolution: {msg}");
    }

    #[test]
    fn halfstrip_mesh_resolves_wall_and_interface() {
        let pair = periodic_pair();
        let hs = build_halfstrip_mesh(&pair, Side::Lower, 1.0, 6.0, 0.05).unwrap();
        let m = &hs.mesh;
        // The matching line y = 0 has a full row of nodes: 2R/h + 1 of them.
        let count = (0..=m.ncols)
            .filter(|&i| m.levels[i][hs.sigma0_row] == 0.0)
            .count();
        assert_eq!(count, m.ncols + 1);
        assert_eq!(m.ncols, (2.0 / 0.05_f64).ceil() as usize);
        // Wall nodes follow the profile exactly.
        for i in 0..m.ncols {
            let want = -pair.lower.eval(m.xcols[i]);
            assert!((m.levels[i][0] - want).abs() < 1e-12);
        }
        // Top cap is flat at the requested height.
        for i in 0..=m.ncols {
            assert_eq!(m.levels[i][m.nrows], 6.0);
        }
        assert!(m.min_quality() >= QUALITY_FLOOR);
    }

    #[test]
    fn degenerate_cap_is_refused() {
        let pair = periodic_pair();
        assert!(build_halfstrip_mesh(&pair, Side::Lower, 1.0, 0.2, 0.05).is_err());
    }

    #[test]
    fn locate_round_trip_on_random_points() {
        let pair = periodic_pair();
        let hs = build_halfstrip_mesh(&pair, Side::Lower, 1.0, 4.0, 0.08).unwrap();
        let m = &hs.mesh;
        // Deterministic scatter of interior points.
        for k in 0..500 {
            let x = -1.0 + 2.0 * ((k as f64 * 0.6180339887) % 1.0);
            let y = -0.1 + 3.9 * ((k as f64 * 0.3819660113) % 1.0);
            if let Some((t, b)) = m.locate(x, y) {
                let c = m.tri_coords(t);
                let px = b[0] * c[0][0] + b[1] * c[1][0] + b[2] * c[2][0];
                let py = b[0] * c[0][1] + b[1] * c[1][1] + b[2] * c[2][1];
                assert!((px - x).abs() < 1e-9, "x mismatch at k={k}");
                assert!((py - y).abs() < 1e-9, "y mismatch at k={k}");
            } else {
                // Only acceptable below the wall.
                let depth = pair.lower.eval(x);
                assert!(y < -depth + 1e-6, "locate failed inside the domain at ({x}, {y})");
            }
        }
        // Periodic wrap: a point shifted by the window width lands in the
        // same triangle.
        let a = m.locate(0.3, 1.0).unwrap();
        let b = m.locate(0.3 + 2.0, 1.0).unwrap();
        assert_eq!(a.0, b.0);
    }

    #[test]
    fn quality_metric_reference_values() {
        let eq = [[0.0, 0.0], [1.0, 0.0], [0.5, 3.0_f64.sqrt() / 2.0]];
        assert!((triangle_quality(&eq) - 1.0).abs() < 1e-12);
        // Right isoceles: r = (2 - sqrt2)/2, R = sqrt2/2, so 2r/R = 2(sqrt2 - 1).
        let right = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let q = triangle_quality(&right);
        assert!((q - 2.0 * (2.0_f64.sqrt() - 1.0)).abs() < 1e-12);
        // Thin sliver has low quality.
        let thin = [[0.0, 0.0], [1.0, 0.0], [0.5, 0.01]];
        assert!(triangle_quality(&thin) < 0.1);
    }
}
