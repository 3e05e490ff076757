//! Quadrature rules on reference elements.
//!
//! The triangle rule is a 6×6 Gauss–Legendre product rule collapsed onto the
//! reference triangle {ξ ≥ 0, η ≥ 0, ξ+η ≤ 1}; the collapse Jacobian (1−ξ)
//! raises the required 1-D degree by one, so the rule integrates every
//! bivariate polynomial of total degree ≤ 10 exactly. That covers the
//! highest-degree integrand assembled anywhere in the crate (advection with
//! cubic bubbles, degree 8) with margin.

/// 6-point Gauss–Legendre nodes and weights on [-1, 1].
const GL6_X: [f64; 6] = [
    -0.932469514203152,
    -0.661209386466265,
    -0.238619186083197,
    0.238619186083197,
    0.661209386466265,
    0.932469514203152,
];
const GL6_W: [f64; 6] = [
    0.171324492379170,
    0.360761573048139,
    0.467913934572691,
    0.467913934572691,
    0.360761573048139,
    0.171324492379170,
];

/// Quadrature point in reference-triangle coordinates with weight.
/// Weights sum to 1/2, the reference-triangle area.
#[derive(Debug, Clone, Copy)]
pub struct TriPoint {
    pub xi: f64,
    pub eta: f64,
    pub w: f64,
}

/// Quadrature point on the reference segment [0,1].
#[derive(Debug, Clone, Copy)]
pub struct SegPoint {
    pub t: f64,
    pub w: f64,
}

/// Collapsed-product triangle rule, exact to total degree 10.
pub fn triangle_rule() -> &'static [TriPoint] {
    use std::sync::OnceLock;
    static RULE: OnceLock<Vec<TriPoint>> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut pts = Vec::with_capacity(36);
        for i in 0..6 {
            // map to [0,1]
            let xi = 0.5 * (GL6_X[i] + 1.0);
            let wxi = 0.5 * GL6_W[i];
            for j in 0..6 {
                let s = 0.5 * (GL6_X[j] + 1.0);
                let ws = 0.5 * GL6_W[j];
                pts.push(TriPoint {
                    xi,
                    eta: s * (1.0 - xi),
                    w: wxi * ws * (1.0 - xi),
                });
            }
        }
        pts
    })
}

/// Gauss–Legendre rule on [0,1], exact to degree 11. Weights sum to 1.
pub fn segment_rule() -> &'static [SegPoint] {
    use std::sync::OnceLock;
    static RULE: OnceLock<Vec<SegPoint>> = OnceLock::new();
    RULE.get_or_init(|| {
        (0..6)
            .map(|i| SegPoint {
                t: 0.5 * (GL6_X[i] + 1.0),
                w: 0.5 * GL6_W[i],
            })
            .collect()
    })
}

/// Adaptive Simpson integration of a scalar function, used where integrands
/// are not polynomial (kernel masses, profile tails).
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: usize,
    ) -> (f64, f64) {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            (left + right + delta / 15.0, delta.abs() / 15.0)
        } else {
            let (vl, el) = rec(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1);
            let (vr, er) = rec(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1);
            (vl + vr, el + er)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact ∫ over the reference triangle of ξ^p η^q is p! q! / (p+q+2)!.
    fn exact_monomial(p: u32, q: u32) -> f64 {
        let fact = |n: u32| (1..=n as u64).product::<u64>() as f64;
        fact(p) * fact(q) / fact(p + q + 2)
    }

    #[test]
    fn triangle_rule_exact_to_degree_10() {
        let rule = triangle_rule();
        for p in 0..=10u32 {
            for q in 0..=(10 - p) {
                let num: f64 = rule
                    .iter()
                    .map(|pt| pt.w * pt.xi.powi(p as i32) * pt.eta.powi(q as i32))
                    .sum();
                let ex = exact_monomial(p, q);
                assert!(
                    (num - ex).abs() < 1e-14,
                    "monomial ({p},{q}): {num} vs {ex}"
                );
            }
        }
    }

    #[test]
    fn triangle_weights_sum_to_area() {
        let s: f64 = triangle_rule().iter().map(|p| p.w).sum();
        assert!((s - 0.5).abs() < 1e-15);
    }

    #[test]
    fn segment_rule_exact_to_degree_11() {
        let rule = segment_rule();
        for p in 0..=11u32 {
            let num: f64 = rule.iter().map(|pt| pt.w * pt.t.powi(p as i32)).sum();
            let ex = 1.0 / (p as f64 + 1.0);
            assert!((num - ex).abs() < 1e-14, "degree {p}: {num} vs {ex}");
        }
    }

    #[test]
    fn adaptive_simpson_smooth_integral() {
        let (v, e) = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-10, "got {v}, err est {e}");
    }

    #[test]
    fn adaptive_simpson_decaying_tail() {
        // ∫_1^∞ x^-2 = 1, truncated at 10^6.
        let (v, _) = adaptive_simpson(&|x: f64| x.powi(-2), 1.0, 1e6, 1e-10);
        assert!((v - (1.0 - 1e-6)).abs() < 1e-8, "got {v}");
    }
}
