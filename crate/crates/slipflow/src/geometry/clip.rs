//! Polygon and segment clipping helpers used by windowed integrals.

/// Clip a convex polygon against the half-plane `x ≥ xlo` (when `keep_ge` is
/// true) or `x ≤ xlo` (false). Sutherland–Hodgman, one edge.
fn clip_halfplane(poly: &[[f64; 2]], x: f64, keep_ge: bool) -> Vec<[f64; 2]> {
    let inside = |p: [f64; 2]| {
        if keep_ge {
            p[0] >= x
        } else {
            p[0] <= x
        }
    };
    let mut out = Vec::with_capacity(poly.len() + 2);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let ia = inside(a);
        let ib = inside(b);
        if ia {
            out.push(a);
        }
        if ia != ib {
            let t = (x - a[0]) / (b[0] - a[0]);
            out.push([x, a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Intersection of a triangle with the vertical slab `xlo ≤ x ≤ xhi`,
/// returned as a convex polygon (possibly empty).
pub fn clip_triangle_slab(tri: &[[f64; 2]; 3], xlo: f64, xhi: f64) -> Vec<[f64; 2]> {
    let p = clip_halfplane(tri, xlo, true);
    if p.is_empty() {
        return p;
    }
    clip_halfplane(&p, xhi, false)
}

/// Fan-triangulate a convex polygon.
pub fn fan_triangulate(poly: &[[f64; 2]]) -> Vec<[[f64; 2]; 3]> {
    if poly.len() < 3 {
        return Vec::new();
    }
    (1..poly.len() - 1)
        .map(|i| [poly[0], poly[i], poly[i + 1]])
        .collect()
}

/// Intersection of the horizontal line `y = c` with a triangle, as a segment
/// `[xmin, xmax]` (None when the line misses the triangle or only touches a
/// vertex).
pub fn triangle_line_section(tri: &[[f64; 2]; 3], y: f64) -> Option<(f64, f64)> {
    let mut xs: Vec<f64> = Vec::with_capacity(4);
    for i in 0..3 {
        let a = tri[i];
        let b = tri[(i + 1) % 3];
        let (ya, yb) = (a[1], b[1]);
        if (ya - y) * (yb - y) < 0.0 {
            let t = (y - ya) / (yb - ya);
            xs.push(a[0] + t * (b[0] - a[0]));
        } else if ya == y && yb == y {
            // Edge lies on the line: the caller must use the edge path instead.
            xs.push(a[0]);
            xs.push(b[0]);
        } else if ya == y {
            xs.push(a[0]);
        }
    }
    if xs.len() < 2 {
        return None;
    }
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 0.0 {
        None
    } else {
        Some((lo, hi))
    }
}

/// Signed area of a triangle (positive for counterclockwise vertices).
pub fn signed_area(t: &[[f64; 2]; 3]) -> f64 {
    0.5 * ((t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[2][0] - t[0][0]) * (t[1][1] - t[0][1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRI: [[f64; 2]; 3] = [[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]];

    fn poly_area(poly: &[[f64; 2]]) -> f64 {
        fan_triangulate(poly).iter().map(signed_area).sum()
    }

    #[test]
    fn slab_containing_triangle_is_identity() {
        let p = clip_triangle_slab(&TRI, -1.0, 3.0);
        assert!((poly_area(&p) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn slab_cutting_triangle() {
        // x in [0, 1] cuts off the trapezoid of area 2 - 0.5 = 1.5.
        let p = clip_triangle_slab(&TRI, 0.0, 1.0);
        assert!((poly_area(&p) - 1.5).abs() < 1e-14);
        let p = clip_triangle_slab(&TRI, 5.0, 6.0);
        assert!(p.is_empty());
    }

    #[test]
    fn line_section_through_interior() {
        let (lo, hi) = triangle_line_section(&TRI, 1.0).unwrap();
        assert!((lo - 0.0).abs() < 1e-14 && (hi - 1.0).abs() < 1e-14);
        assert!(triangle_line_section(&TRI, 2.5).is_none());
    }
}
