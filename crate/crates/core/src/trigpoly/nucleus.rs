//! The kernel `N(x, y) = ∫₀^{2π} dφ / (ψ(x,φ) - ψ(y,φ))²` whose vanishing
//! off the diagonal makes the inversion formula exact.

use std::f64::consts::TAU;

use super::{pv_inverse_square, PvOptions, TrigPoly};
use crate::error::{Error, Result};
use crate::geometry::{Family, Geometry, Point};
use crate::quadrature;

/// How the nucleus was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NucleusMethod {
    /// `ψ(x,·) - ψ(y,·)` is a trigonometric polynomial in `φ`.
    TrigPoly,
    /// Parabola: the difference is a trigonometric polynomial in the half
    /// angle `u = φ/2` once `ψ` is continued to the signed branch
    /// `-sqrt(2|x|) cos((φ - θ)/2)` over `φ ∈ [0, 4π)`.
    HalfAngle,
}

/// Outcome of [`nucleus_check`].
#[derive(Debug, Clone)]
pub struct NucleusReport {
    pub value: f64,
    /// Extrapolation error indicator.
    pub error: f64,
    pub method: NucleusMethod,
    /// Real roots of the difference polynomial (in its own angle variable).
    pub real_roots: Vec<f64>,
    /// All roots of the difference polynomial are real and simple, so the
    /// nucleus is zero analytically.
    pub roots_real_simple: bool,
    /// `max |d/dφ (ψ(x) - ψ(y))|` at the real roots.
    pub slope: f64,
    /// The pass threshold `1e-4 · max(1, slope²)`.
    pub tolerance: f64,
    /// Regularized values `(ε, N_ε)` behind the extrapolated value.
    pub regularized: Vec<(f64, f64)>,
    pub passed: bool,
}

fn half_angle_difference(x: Point, y: Point) -> Result<TrigPoly> {
    // -sqrt(2r) cos(u - θ/2) = -<w, (cos u, sin u)> with w = sqrt(2r) e(θ/2).
    let w = |p: Point| {
        let r = p.norm();
        let th = p.y.atan2(p.x) / 2.0;
        Point::new(th.cos(), th.sin()) * (2.0 * r).sqrt()
    };
    let d = w(y) - w(x);
    TrigPoly::first_order(0.0, d.x, d.y)
}

/// Evaluate the nucleus for `x ≠ y`.
pub fn nucleus_check(geo: &Geometry, x: Point, y: Point, opts: &PvOptions) -> Result<NucleusReport> {
    if !geo.contains(x) || !geo.contains(y) {
        let bad = if geo.contains(x) { y } else { x };
        return Err(Error::Domain {
            family: geo.tag(),
            x: bad.x,
            y: bad.y,
        });
    }
    if x == y {
        return Err(Error::param("the nucleus is singular on the diagonal x = y"));
    }
    let (t, method, factor, slope_factor) = match geo.family() {
        Family::Parabola => (half_angle_difference(x, y)?, NucleusMethod::HalfAngle, 2.0, 0.5),
        _ => (geo.trig_difference(x, y)?, NucleusMethod::TrigPoly, 1.0, 1.0),
    };
    let est = pv_inverse_square(&t, opts)?;
    let slope = est.slope * slope_factor;
    let tolerance = 1e-4 * slope.powi(2).max(1.0);
    let value = est.value * factor;
    Ok(NucleusReport {
        value,
        error: est.error * factor,
        method,
        roots_real_simple: t.all_real_simple(opts.root_tol)?,
        real_roots: est.real_roots,
        slope,
        tolerance,
        regularized: est.regularized.iter().map(|&(e, v)| (e, v * factor)).collect(),
        passed: value.abs() <= tolerance,
    })
}

/// The parabola nucleus exactly as written with the non-negative root,
/// `∫₀^{2π} dφ / (s(x,φ) - s(y,φ))²` with `s = sqrt(|x| + ⟨x, e⟩)`.
///
/// This is *not* zero: the non-negative root folds the mirror half of every
/// curve pair away. It is kept for comparison with the half-angle form that
/// [`nucleus_check`] uses.
pub fn parabola_literal_nucleus(x: Point, y: Point, opts: &PvOptions) -> Result<f64> {
    let s = |p: Point, phi: f64| {
        let (sn, c) = phi.sin_cos();
        (p.norm() + p.x * c + p.y * sn).max(0.0).sqrt()
    };
    let d = |phi: f64| s(x, phi) - s(y, phi);
    // Bracket sign changes on a fine grid, then bisect.
    let n = 4096;
    let mut roots = Vec::new();
    let mut prev = d(0.0);
    for i in 1..=n {
        let b = TAU * i as f64 / n as f64;
        let cur = d(b);
        if prev == 0.0 || prev.signum() != cur.signum() {
            let (mut lo, mut hi) = (TAU * (i - 1) as f64 / n as f64, b);
            let flo = d(lo);
            for _ in 0..200 {
                let m = 0.5 * (lo + hi);
                if (d(m) > 0.0) == (flo > 0.0) {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev = cur;
    }
    let scale = (2.0 * x.norm()).sqrt().max((2.0 * y.norm()).sqrt());
    let mut h = Vec::new();
    let mut vals = Vec::new();
    for &e in &opts.eps {
        let eps = e * scale;
        let mut breaks = vec![0.0, TAU];
        for &r in &roots {
            for b in [r - 8.0 * eps, r, r + 8.0 * eps] {
                if b > 0.0 && b < TAU {
                    breaks.push(b);
                }
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let r = quadrature::integrate(
            |phi| {
                let v = d(phi);
                let q = v * v + eps * eps;
                (v * v - eps * eps) / (q * q)
            },
            &breaks,
            opts.quadrature,
        )?;
        h.push(eps);
        vals.push(r.value);
    }
    Ok(quadrature::extrapolate_to_zero(&h, &vals).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn radon_nucleus_vanishes() {
        let geo = Geometry::parse("radon").unwrap();
        let r = nucleus_check(&geo, p(0.0, 0.0), p(1.0, 0.0), &PvOptions::default()).unwrap();
        assert!(r.passed && r.roots_real_simple);
        assert!(r.value.abs() < 1e-8, "{r:?}");
        assert_eq!(r.real_roots.len(), 2);
    }

    #[test]
    fn ellipse_nucleus_vanishes_inside_support() {
        let geo = Geometry::parse("ellipse:e1=1,e2=1,support=0.7").unwrap();
        let r = nucleus_check(&geo, p(0.0, 0.0), p(0.5, 0.0), &PvOptions::default()).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn ellipse_nucleus_can_fail_outside_support_condition() {
        // |x|^2 - |y|^2 dominates the first harmonic: no real roots.
        let geo = Geometry::parse("ellipse:e1=1,e2=1,support=3").unwrap();
        let r = nucleus_check(&geo, p(2.5, 0.0), p(0.0, 0.1), &PvOptions::default()).unwrap();
        assert!(!r.roots_real_simple);
        assert!(!r.passed, "{r:?}");
    }

    #[test]
    fn parabola_half_angle_nucleus_vanishes() {
        let geo = Geometry::parse("parabola").unwrap();
        let r = nucleus_check(&geo, p(0.5, 0.2), p(-0.3, 0.4), &PvOptions::default()).unwrap();
        assert_eq!(r.method, NucleusMethod::HalfAngle);
        assert!(r.passed && r.value.abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn parabola_literal_nucleus_is_not_zero() {
        // Equals -∫ dφ/(s_x + s_y)^2, the dropped mirror term.
        let (x, y) = (p(0.5, 0.2), p(-0.3, 0.4));
        let lit = parabola_literal_nucleus(x, y, &PvOptions::default()).unwrap();
        let s = |q: Point, phi: f64| (q.norm() + q.x * phi.cos() + q.y * phi.sin()).sqrt();
        let mirror = quadrature::integrate(
            |phi| (s(x, phi) + s(y, phi)).powi(-2),
            &[0.0, std::f64::consts::PI, TAU],
            Default::default(),
        )
        .unwrap()
        .value;
        assert!((lit + mirror).abs() < 1e-4 * mirror, "{lit} vs {}", -mirror);
        assert!(lit.abs() > 1.0);
    }

    #[test]
    fn diagonal_and_domain_are_rejected() {
        let geo = Geometry::parse("equidistant").unwrap();
        assert!(nucleus_check(&geo, p(0.1, 0.1), p(0.1, 0.1), &PvOptions::default()).is_err());
        assert!(matches!(
            nucleus_check(&geo, p(1.1, 0.0), p(0.1, 0.1), &PvOptions::default()),
            Err(Error::Domain { .. })
        ));
    }
}
