//! Tracing level sets `{x : level(x, φ) = λ}` inside a disc, and integrating
//! along them.

use crate::error::{Error, Result};
use crate::geometry::{Geometry, MetricUse, Point};
use crate::quadrature::gauss_legendre;

/// A disc with an optional small hole punched around a singular point.
#[derive(Debug, Clone, Copy)]
pub struct Region {
    pub center: Point,
    pub radius: f64,
    pub hole: Option<(Point, f64)>,
}

impl Region {
    /// The disc clipped to the geometry's chart, with a hole of radius
    /// `hole_frac · radius` around the singular point if it lies inside.
    pub fn for_geometry(geo: &Geometry, center: Point, radius: f64) -> Region {
        let mut radius = radius;
        if let Some(d) = geo.domain_radius() {
            radius = radius.min(d * (1.0 - 1e-9) - center.norm());
        }
        let hole = geo
            .singular_point()
            .filter(|s| (s - center).norm() < radius)
            .map(|s| (s, 1e-9 * radius));
        Region {
            center,
            radius,
            hole,
        }
    }

    #[inline]
    pub fn contains(&self, x: Point) -> bool {
        (x - self.center).norm_squared() < self.radius * self.radius
            && self
                .hole
                .is_none_or(|(c, r)| (x - c).norm_squared() > r * r)
    }
}

/// A traced piece of curve: vertices on the curve, joined by short chords.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<Point>,
    /// First and last vertex coincide.
    pub closed: bool,
}

/// Knobs for [`trace_curve`].
#[derive(Debug, Clone, Copy)]
pub struct TraceOptions {
    /// Longest chord between consecutive vertices.
    pub step: f64,
    /// Largest tangent turn per chord, in radians.
    pub max_turn: f64,
    /// Chords stay shorter than this fraction of their distance to the
    /// singular point, where weights and curvature change on that scale.
    pub singular_fraction: f64,
    /// Sign changes are searched for at this many points on each boundary
    /// circle.
    pub boundary_samples: usize,
    pub max_vertices: usize,
}

impl TraceOptions {
    pub fn with_step(step: f64) -> Self {
        TraceOptions {
            step,
            max_turn: 0.15,
            singular_fraction: 0.1,
            boundary_samples: 128,
            max_vertices: 1_000_000,
        }
    }
}

struct Tracer<'a> {
    geo: &'a Geometry,
    lambda: f64,
    phi: f64,
    region: Region,
    opts: TraceOptions,
    tol: f64,
}

enum End {
    Exit(Point),
    Closed,
}

impl<'a> Tracer<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Trace {
            lambda: self.lambda,
            phi: self.phi,
            msg: msg.into(),
        }
    }

    #[inline]
    fn h(&self, x: Point) -> f64 {
        self.geo.level(x, self.phi) - self.lambda
    }

    /// Newton iteration along the gradient onto the curve.
    fn project(&self, mut x: Point) -> Option<Point> {
        for _ in 0..50 {
            let (v, g) = self.geo.level_grad(x, self.phi);
            let r = v - self.lambda;
            if r.abs() <= self.tol {
                return Some(x);
            }
            let g2 = g.norm_squared();
            if !(g2 > 0.0 && g2.is_finite()) {
                return None;
            }
            let dx = g * (r / g2);
            if dx.norm() > self.opts.step {
                return None;
            }
            x -= dx;
        }
        None
    }

    #[inline]
    fn tangent(&self, x: Point, sign: f64) -> Option<Point> {
        let (_, g) = self.geo.level_grad(x, self.phi);
        let n = g.norm();
        if !(n > 0.0 && n.is_finite()) {
            return None;
        }
        Some(Point::new(-g.y, g.x) * (sign / n))
    }

    /// Point where the curve leaves the region between `inside` and
    /// `outside` (both on the curve).
    fn crossing(&self, inside: Point, outside: Point) -> Point {
        let (mut a, mut b) = (inside, outside);
        for _ in 0..48 {
            let m = self.project((a + b) * 0.5).unwrap_or((a + b) * 0.5);
            if self.region.contains(m) {
                a = m;
            } else {
                b = m;
            }
            if (b - a).norm() < 1e-14 * (1.0 + self.region.radius) {
                break;
            }
        }
        (a + b) * 0.5
    }

    /// Roots of `h` on a circle: sign changes between samples, plus pairs of
    /// close roots hiding between samples of equal sign. Those are found by
    /// minimising `|h|` around every local minimum of the samples; curves
    /// that graze the circle or pass through it twice within one sample
    /// spacing (near a singular point) would otherwise be missed.
    pub(crate) fn circle_seeds(&self, c: Point, r: f64, n: usize) -> Vec<Point> {
        let at = |t: f64| c + Point::new(t.cos(), t.sin()) * r;
        let dt = std::f64::consts::TAU / n as f64;
        let ts: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
        let hs: Vec<f64> = ts.iter().map(|&t| self.h(at(t))).collect();
        let bisect = |mut lo: f64, mut hi: f64| {
            let neg = self.h(at(lo)) < 0.0;
            for _ in 0..60 {
                let m = 0.5 * (lo + hi);
                if (self.h(at(m)) < 0.0) == neg {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            0.5 * (lo + hi)
        };
        let mut roots = Vec::new();
        for i in 0..n {
            let k = (i + 1) % n;
            let (h0, h1) = (hs[i], hs[k]);
            let t1 = ts[i] + dt;
            if !(h0.is_finite() && h1.is_finite()) {
                continue;
            }
            if (h0 < 0.0) != (h1 < 0.0) {
                roots.push(bisect(ts[i], t1));
                continue;
            }
            // Equal signs at both ends: look for a dip through zero when
            // sample i is a local minimum of |h|.
            let hp = hs[(i + n - 1) % n];
            if !hp.is_finite() || (hp < 0.0) != (h0 < 0.0) || !(h0.abs() <= hp.abs() && h0.abs() <= h1.abs()) {
                continue;
            }
            let sgn = h0.signum();
            let f = |t: f64| sgn * self.h(at(t));
            let (mut a, mut b) = (ts[i] - dt, t1);
            let g = 0.5 * (5f64.sqrt() - 1.0);
            let (mut x1, mut x2) = (b - g * (b - a), a + g * (b - a));
            let (mut f1, mut f2) = (f(x1), f(x2));
            let mut found = None;
            for _ in 0..80 {
                if f1 < 0.0 {
                    found = Some(x1);
                    break;
                }
                if f2 < 0.0 {
                    found = Some(x2);
                    break;
                }
                if f1 < f2 {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - g * (b - a);
                    f1 = f(x1);
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + g * (b - a);
                    f2 = f(x2);
                }
                if b - a < 1e-15 {
                    break;
                }
            }
            if let Some(m) = found {
                roots.push(bisect(ts[i] - dt, m));
                roots.push(bisect(m, t1));
            }
        }
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        roots.into_iter().map(at).collect()
    }

    /// March from `start` along the curve in direction `sign` until the
    /// region is left or the curve closes.
    fn march(&self, start: Point, sign: f64, may_close: bool) -> Result<(Vec<Point>, End)> {
        let mut pts = vec![start];
        let mut x = start;
        let mut t = self.tangent(x, sign).ok_or_else(|| self.err("vanishing gradient"))?;
        let mut h = self.opts.step;
        let h_min = 1e-13 * (1.0 + self.region.radius);
        let mut travelled = 0.0;
        loop {
            if pts.len() > self.opts.max_vertices {
                return Err(self.err("too many vertices"));
            }
            if let Some((c, _)) = self.region.hole {
                h = h.min(self.opts.singular_fraction * (x - c).norm());
            }
            if h < h_min {
                return Err(self.err("step size underflow"));
            }
            let Some(y) = self.project(x + t * h) else {
                h *= 0.5;
                continue;
            };
            let d = y - x;
            let len = d.norm();
            let Some(ty) = self.tangent(y, sign) else {
                h *= 0.5;
                continue;
            };
            let cos_turn = ty.dot(&t);
            let cos_chord = if len > 0.0 { d.dot(&t) / len } else { -1.0 };
            let limit = self.opts.max_turn.cos();
            if len < 0.5 * h || len > 1.5 * h || cos_turn < limit || cos_chord < limit {
                h *= 0.5;
                continue;
            }
            if !self.region.contains(y) {
                let exit = self.crossing(x, y);
                pts.push(exit);
                return Ok((pts, End::Exit(exit)));
            }
            if may_close && travelled > 2.0 * len {
                // Does the chord x -> y pass the start point?
                let s = (start - x).dot(&d) / (len * len);
                if (0.0..=1.0).contains(&s) && (x + d * s - start).norm() < 0.25 * len {
                    pts.push(start);
                    return Ok((pts, End::Closed));
                }
            }
            travelled += len;
            pts.push(y);
            x = y;
            t = ty;
            h = (h * 1.5).min(self.opts.step);
        }
    }
}

/// Trace every component of the curve `(λ, φ)` inside `region`.
///
/// Seeds are the sign changes of `level - λ` on the region's boundary circle
/// (and on the hole around a singular point); each component is marched
/// inward from one seed until it leaves the region again, which consumes the
/// seed at its other end. Closed loops of the ellipse family that lie
/// entirely inside the region are traced from a point known in closed form.
pub fn trace_curve(
    geo: &Geometry,
    lambda: f64,
    phi: f64,
    region: &Region,
    opts: &TraceOptions,
) -> Result<Vec<Polyline>> {
    let tr = Tracer {
        geo,
        lambda,
        phi,
        region: *region,
        opts: *opts,
        tol: 1e-13 * (1.0 + lambda.abs()),
    };
    if let (Some((c, r_hole)), Some((level, dirs))) = (region.hole, geo.singular_rays(phi)) {
        if (lambda - level).abs() <= tr.tol {
            return Ok(rays(region, c, r_hole, &dirs, opts));
        }
    }
    // Each seed remembers the radius of its circle, which sets the
    // tolerance for recognising it as the far end of a traced component.
    let mut seeds: Vec<(Point, f64)> = tr
        .circle_seeds(region.center, region.radius, opts.boundary_samples)
        .into_iter()
        .map(|p| (p, region.radius))
        .collect();
    if let Some((c, r)) = region.hole {
        seeds.extend(tr.circle_seeds(c, r, 64).into_iter().map(|p| (p, r)));
    }
    let mut used = vec![false; seeds.len()];
    let mut out = Vec::new();

    for i in 0..seeds.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let s0 = seeds[i].0;
        // Pick the direction that heads into the region.
        let probe = (opts.step * 1e-3).max(1e-9 * region.radius);
        let mut dir = None;
        for sign in [1.0, -1.0] {
            if let Some(t) = tr.tangent(s0, sign) {
                if region.contains(s0 + t * probe) {
                    dir = Some(sign);
                    break;
                }
            }
        }
        let Some(sign) = dir else { continue };
        let (pts, end) = tr.march(s0, sign, false)?;
        if let End::Exit(p) = end {
            if let Some(k) = (0..seeds.len())
                .filter(|&k| !used[k])
                .min_by(|&a, &b| (seeds[a].0 - p).norm().total_cmp(&(seeds[b].0 - p).norm()))
            {
                if (seeds[k].0 - p).norm() < 1e-6 * seeds[k].1 + 1e-12 * (1.0 + region.radius) {
                    used[k] = true;
                }
            }
        }
        if pts.len() >= 2 {
            out.push(Polyline {
                points: pts,
                closed: false,
            });
        }
    }

    if out.is_empty() {
        if let Some((c, rho)) = closed_curve(geo, lambda, phi) {
            if (c - region.center).norm() + rho < region.radius {
                let start = c + Point::new(rho, 0.0);
                let (pts, end) = tr.march(start, 1.0, true)?;
                if matches!(end, End::Closed) {
                    out.push(Polyline {
                        points: pts,
                        closed: true,
                    });
                } else {
                    return Err(tr.err("closed curve did not close"));
                }
            }
        }
    }
    Ok(out)
}

/// The curve through the singular point `c`: straight rays in the directions
/// `dirs`, from the hole out to the region boundary, with vertices graded
/// towards `c`. Tracing cannot follow it through the branch point.
fn rays(region: &Region, c: Point, r_hole: f64, dirs: &[f64], opts: &TraceOptions) -> Vec<Polyline> {
    let d = c - region.center;
    let mut out = Vec::new();
    for &theta in dirs {
        let u = crate::geometry::unit(theta);
        let b = d.dot(&u);
        let s_out = -b + (b * b - d.norm_squared() + region.radius * region.radius).max(0.0).sqrt();
        if s_out <= r_hole {
            continue;
        }
        let mut s = r_hole;
        let mut points = vec![c + u * s];
        while s < s_out {
            s = (s + opts.step.min(opts.singular_fraction * s)).min(s_out);
            points.push(c + u * s);
        }
        out.push(Polyline { points, closed: false });
    }
    out
}

/// Centre and radius of the curve when it is a circle known in closed form.
fn closed_curve(geo: &Geometry, lambda: f64, phi: f64) -> Option<(Point, f64)> {
    match geo.family() {
        crate::geometry::Family::Ellipse { e1, e2 } if lambda > 0.0 => {
            let (s, c) = phi.sin_cos();
            Some((Point::new(e1 * c, e2 * s), lambda.sqrt()))
        }
        _ => None,
    }
}

/// Integrand weighting along the curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    /// `f ds / |∇ψ|` in the transform metric.
    Transform,
    /// `f ds` in the curve metric.
    ArcLength,
}

/// Gauss–Legendre rule used on each chord.
#[derive(Debug, Clone)]
pub struct ChordRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl ChordRule {
    pub fn new(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        ChordRule {
            nodes: x.iter().map(|x| 0.5 * (x + 1.0)).collect(),
            weights: w.iter().map(|w| 0.5 * w).collect(),
        }
    }
}

/// Integrate `f` along traced polylines.
///
/// Each chord `A → B` is treated as the base of a graph: the curve point
/// above the chord parameter `s` is `A + s(B - A) + t(s) ν` with `ν` the chord
/// normal, found by one-dimensional Newton. The slope `t'` follows from the
/// gradient, so the line element is exact at every node and Gauss–Legendre
/// converges at its full order.
#[allow(clippy::too_many_arguments)]
pub fn integrate_polylines(
    geo: &Geometry,
    lambda: f64,
    phi: f64,
    lines: &[Polyline],
    rule: &ChordRule,
    weighting: Weighting,
    f: &dyn Fn(Point) -> f64,
) -> f64 {
    let mut total = 0.0;
    let metric = match weighting {
        Weighting::Transform => MetricUse::Transform,
        Weighting::ArcLength => MetricUse::Curve,
    };
    let integrand = |p: Point, v: Point, g: Point| {
        let ds = geo.line_element(p, v, metric);
        match weighting {
            Weighting::Transform => f(p) * ds / geo.metric_grad_norm(p, g),
            Weighting::ArcLength => f(p) * ds,
        }
    };
    for line in lines {
        for w in line.points.windows(2) {
            let (a, b) = (w[0], w[1]);
            let d = b - a;
            let len = d.norm();
            if len == 0.0 {
                continue;
            }
            let nu = Point::new(-d.y, d.x) / len;
            let mut seg = 0.0;
            let mut ok = true;
            for (s, wt) in rule.nodes.iter().zip(&rule.weights) {
                let p0 = a + d * *s;
                let mut t = 0.0;
                let mut found = None;
                for _ in 0..30 {
                    let (v, g) = geo.level_grad(p0 + nu * t, phi);
                    let gn = g.dot(&nu);
                    if !(gn.abs() > 1e-300) || !v.is_finite() {
                        break;
                    }
                    let dt = (v - lambda) / gn;
                    t -= dt;
                    if dt.abs() <= 1e-9 * len {
                        // Quadratic convergence: one more step reaches rounding.
                        let (v, g) = geo.level_grad(p0 + nu * t, phi);
                        t -= (v - lambda) / g.dot(&nu);
                        found = Some(t);
                        break;
                    }
                }
                let Some(t) = found.filter(|t| t.abs() < len) else {
                    ok = false;
                    break;
                };
                let p = p0 + nu * t;
                let (_, g) = geo.level_grad(p, phi);
                let slope = -g.dot(&d) / g.dot(&nu);
                let v = d + nu * slope;
                seg += wt * integrand(p, v, g);
            }
            if !ok || !seg.is_finite() {
                // Fall back to the trapezoid rule on the chord end points.
                seg = 0.0;
                for p in [a, b] {
                    let (_, g) = geo.level_grad(p, phi);
                    let t = Point::new(-g.y, g.x);
                    let n = t.norm();
                    if n > 0.0 && n.is_finite() {
                        let v = t * (len / n);
                        let val = integrand(p, v, g);
                        if val.is_finite() {
                            seg += 0.5 * val;
                        }
                    }
                }
            }
            total += seg;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region(r: f64) -> Region {
        Region {
            center: Point::zeros(),
            radius: r,
            hole: None,
        }
    }

    #[test]
    fn radon_line_is_a_single_chord_polyline() {
        let geo = Geometry::parse("radon").unwrap();
        let lines = trace_curve(&geo, 0.3, 0.4, &region(1.0), &TraceOptions::with_step(0.05)).unwrap();
        assert_eq!(lines.len(), 1);
        let pl = &lines[0];
        let len: f64 = pl.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
        assert!((len - 2.0 * (1.0 - 0.09_f64).sqrt()).abs() < 1e-10, "{len}");
        for p in &pl.points {
            assert!((geo.level(*p, 0.4) - 0.3).abs() < 1e-12);
        }
        for w in pl.points.windows(2) {
            assert!((w[1] - w[0]).norm() <= 0.05 * 1.5 + 1e-12);
        }
    }

    #[test]
    fn ellipse_circle_inside_region_is_closed() {
        let geo = Geometry::parse("ellipse:e1=1,e2=1,support=0.7").unwrap();
        let lines = trace_curve(&geo, 0.25, 0.0, &region(3.0), &TraceOptions::with_step(0.05)).unwrap();
        assert_eq!(lines.len(), 1);
        assert!(lines[0].closed);
        for p in &lines[0].points {
            assert!(((p - Point::new(1.0, 0.0)).norm() - 0.5).abs() < 1e-12);
        }
        let rule = ChordRule::new(5);
        let len = integrate_polylines(&geo, 0.25, 0.0, &lines, &rule, Weighting::ArcLength, &|_| 1.0);
        assert!((len - std::f64::consts::PI).abs() < 1e-12, "{len}");
    }

    #[test]
    fn ellipse_circle_crossing_region_gives_arcs() {
        let geo = Geometry::parse("ellipse:e1=1,e2=1,support=0.7").unwrap();
        let lines = trace_curve(&geo, 0.25, 0.0, &region(1.0), &TraceOptions::with_step(0.05)).unwrap();
        assert_eq!(lines.len(), 1);
        assert!(!lines[0].closed);
    }

    #[test]
    fn hyperbola_through_singular_origin() {
        let geo = Geometry::parse("hyperbola:eps=2,support=1").unwrap();
        let reg = Region::for_geometry(&geo, Point::zeros(), 1.0);
        // lambda = 0: two rays from the origin.
        let lines = trace_curve(&geo, 0.0, 0.3, &reg, &TraceOptions::with_step(0.05)).unwrap();
        assert_eq!(lines.len(), 2);
        let rule = ChordRule::new(5);
        let len = integrate_polylines(&geo, 0.0, 0.3, &lines, &rule, Weighting::ArcLength, &|_| 1.0);
        assert!((len - 2.0).abs() < 1e-8, "{len}");
        // Small lambda: one branch hugging the origin.
        let lines = trace_curve(&geo, 1e-3, 0.3, &reg, &TraceOptions::with_step(0.05)).unwrap();
        assert_eq!(lines.len(), 1);
    }

    #[test]
    fn cormack_level_set_has_k_components() {
        let geo = Geometry::parse("cormack:k=3,support=1").unwrap();
        let reg = Region::for_geometry(&geo, Point::zeros(), 1.0);
        let lines = trace_curve(&geo, 0.2, 0.7, &reg, &TraceOptions::with_step(0.05)).unwrap();
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn parabola_small_lambda_wraps_origin() {
        let geo = Geometry::parse("parabola:support=1").unwrap();
        let reg = Region::for_geometry(&geo, Point::zeros(), 1.0);
        let lam = 1e-3;
        let lines = trace_curve(&geo, lam, 0.0, &reg, &TraceOptions::with_step(0.05)).unwrap();
        assert_eq!(lines.len(), 1);
        for p in &lines[0].points {
            assert!((geo.level(*p, 0.0) - lam).abs() < 1e-13);
        }
    }

    #[test]
    fn arc_length_of_hgeodesic_diameter() {
        // lambda = 0 is the diameter perpendicular to e; its hyperbolic length
        // inside |x| < r is 2 log((1 + r)/(1 - r)).
        let geo = Geometry::parse("hgeodesic:support=0.5").unwrap();
        let r = 0.6;
        let lines = trace_curve(&geo, 0.0, 1.1, &region(r), &TraceOptions::with_step(0.02)).unwrap();
        let rule = ChordRule::new(6);
        let len = integrate_polylines(&geo, 0.0, 1.1, &lines, &rule, Weighting::ArcLength, &|_| 1.0);
        let exact = 2.0 * ((1.0 + r) / (1.0 - r)).ln();
        assert!((len - exact).abs() < 1e-10, "{len} vs {exact}");
    }
}
