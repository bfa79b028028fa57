//! Curve families.
//!
//! Every family is described by a function `ψ(x, φ)` on a planar chart. For
//! fixed `φ` its level sets are the curves of the family; the level value of
//! the curve through `x` is [`Geometry::level`], so that the curve with
//! parameters `(λ, φ)` is `{x : level(x, φ) = λ}`. For all families except
//! the ellipse `level = -ψ`; for the ellipse `ψ = |x - e(φ)|²` is itself the
//! squared radius of the circle and `level = ψ`.
//!
//! The metric matters in two places. The weighted transform `M_φ` divides by
//! `|∇ψ|` and integrates arc length in the *transform metric*, which is the
//! spherical metric for the Funk family (in gnomonic coordinates) and the
//! Euclidean metric otherwise. Plain arc-length data use the *curve metric*:
//! spherical for Funk, Poincaré for the hyperbolic-geodesic family and
//! Euclidean otherwise.

mod descriptor;

use std::f64::consts::{PI, TAU};
use std::fmt;

use nalgebra::Vector2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::trigpoly::{residue_integral, TrigPoly};

/// A point of the planar chart.
pub type Point = Vector2<f64>;

/// Unit vector `(cos φ, sin φ)`.
#[inline]
pub fn unit(phi: f64) -> Point {
    let (s, c) = phi.sin_cos();
    Point::new(c, s)
}

/// The curve families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Straight lines, `ψ = -⟨x, e⟩`.
    Radon,
    /// Great circles of the upper hemisphere in gnomonic coordinates, which
    /// become straight lines `ψ = ⟨y, e⟩`.
    Funk,
    /// Geodesic circles of the Poincaré disc,
    /// `ψ = -2⟨x, e⟩/(1 + |x|²)`.
    HGeodesic,
    /// Curves equidistant from diameters, `ψ = -2⟨x, e⟩/(1 - |x|²)`.
    Equidistant,
    /// Circles centred on the ellipse `e(φ) = (e1 cos φ, e2 sin φ)`,
    /// `ψ = |x - e(φ)|²`.
    Ellipse { e1: f64, e2: f64 },
    /// Hyperbola branches with a focus at the origin,
    /// `ψ = ε⟨x, e⟩ - |x|`.
    Hyperbola { eps: f64 },
    /// Parabolas with focus at the origin, `ψ = -sqrt(|x| + ⟨x, e⟩)`.
    Parabola,
    /// Level sets of `Re(e^{-iφ} z^k)`, `ψ = -|x|^k cos(kθ - φ)`.
    Cormack { k: u32 },
}

/// Which metric a length or gradient is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricUse {
    /// The metric of the weighted transform `M_φ`.
    Transform,
    /// The metric of plain arc-length data.
    Curve,
}

/// A curve family together with the radius of the disc (about the origin)
/// that contains the unknown field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    family: Family,
    support: f64,
}

impl Geometry {
    pub fn new(family: Family, support: f64) -> Result<Self> {
        if !(support.is_finite() && support > 0.0) {
            return Err(Error::param(format!("support must be positive, got {support}")));
        }
        match family {
            Family::HGeodesic | Family::Equidistant if support >= 1.0 => {
                return Err(Error::param(format!(
                    "support must be < 1 for the unit-disc family {}, got {support}",
                    family.tag()
                )))
            }
            Family::Ellipse { e1, e2 } if !(e1 > 0.0 && e2 > 0.0 && e1.is_finite() && e2.is_finite()) => {
                return Err(Error::param("ellipse semi-axes e1, e2 must be positive"))
            }
            Family::Hyperbola { eps } if !(eps > 1.0 && eps.is_finite()) => {
                return Err(Error::param(format!("hyperbola needs eps > 1, got {eps}")))
            }
            Family::Cormack { k } if !(1..=32).contains(&k) => {
                return Err(Error::param(format!("cormack needs 1 <= k <= 32, got {k}")))
            }
            _ => {}
        }
        Ok(Geometry { family, support })
    }

    /// Parse a descriptor such as `ellipse:e1=1.2,e2=0.8,support=0.7`.
    pub fn parse(s: &str) -> Result<Self> {
        descriptor::parse(s)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn support_radius(&self) -> f64 {
        self.support
    }

    /// Same family, different support radius.
    pub fn with_support(&self, support: f64) -> Result<Self> {
        Geometry::new(self.family, support)
    }

    pub fn tag(&self) -> &'static str {
        self.family.tag()
    }

    /// Is `x` in the chart on which `ψ` is defined?
    pub fn contains(&self, x: Point) -> bool {
        if !(x.x.is_finite() && x.y.is_finite()) {
            return false;
        }
        match self.family {
            Family::HGeodesic | Family::Equidistant => x.norm_squared() < 1.0,
            Family::Parabola | Family::Cormack { .. } => x.norm_squared() > 0.0,
            _ => true,
        }
    }

    /// Radius of the chart when it is the unit disc.
    pub fn domain_radius(&self) -> Option<f64> {
        match self.family {
            Family::HGeodesic | Family::Equidistant => Some(1.0),
            _ => None,
        }
    }

    /// A point where `ψ` is not smooth in `x` (the origin for the hyperbola,
    /// parabola and Cormack families).
    pub fn singular_point(&self) -> Option<Point> {
        match self.family {
            Family::Hyperbola { .. } | Family::Parabola | Family::Cormack { .. } => {
                Some(Point::zeros())
            }
            _ => None,
        }
    }

    /// The level through the singular point, whose curve is a union of
    /// straight rays leaving that point, and the directions of those rays.
    pub fn singular_rays(&self, phi: f64) -> Option<(f64, Vec<f64>)> {
        match self.family {
            Family::Hyperbola { eps } => {
                let a = (1.0 / eps).acos();
                Some((0.0, vec![phi - a, phi + a]))
            }
            Family::Parabola => Some((0.0, vec![phi + PI])),
            // |z|^k cos(kθ - φ) = 0.
            Family::Cormack { k } => {
                let k = k as f64;
                Some((0.0, (0..2 * k as usize).map(|m| (phi + PI / 2.0 + m as f64 * PI) / k).collect()))
            }
            _ => None,
        }
    }

    /// Whether some curves of the family are closed loops.
    pub fn has_closed_curves(&self) -> bool {
        matches!(self.family, Family::Ellipse { .. })
    }

    /// Order of the rotational symmetry the data are quotiented by (`k` for
    /// the Cormack family, 1 otherwise). Plane integrals are divided by it.
    pub fn quotient_order(&self) -> u32 {
        match self.family {
            Family::Cormack { k } => k,
            _ => 1,
        }
    }

    /// Parabola data are reflected evenly to negative `λ` before filtering.
    pub fn reflects_lambda(&self) -> bool {
        matches!(self.family, Family::Parabola)
    }

    /// For the ellipse family: does the support disc fit inside the ellipse?
    /// (Always true for other families.)
    pub fn support_condition_holds(&self) -> bool {
        match self.family {
            Family::Ellipse { e1, e2 } => self.support < e1.min(e2),
            _ => true,
        }
    }

    fn check(&self, x: Point) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain {
                family: self.tag(),
                x: x.x,
                y: x.y,
            })
        }
    }

    /// `ψ(x, φ)`.
    pub fn psi(&self, x: Point, phi: f64) -> Result<f64> {
        self.check(x)?;
        if !phi.is_finite() {
            return Err(Error::param("phi must be finite"));
        }
        let l = self.level(x, phi);
        Ok(match self.family {
            Family::Ellipse { .. } => l,
            _ => -l,
        })
    }

    /// Level value `λ` of the curve through `x` in direction `φ`. No domain
    /// check.
    #[inline]
    pub fn level(&self, x: Point, phi: f64) -> f64 {
        let e = unit(phi);
        match self.family {
            Family::Radon => x.dot(&e),
            Family::Funk => -x.dot(&e),
            Family::HGeodesic => 2.0 * x.dot(&e) / (1.0 + x.norm_squared()),
            Family::Equidistant => 2.0 * x.dot(&e) / (1.0 - x.norm_squared()),
            Family::Ellipse { e1, e2 } => (x - Point::new(e1 * e.x, e2 * e.y)).norm_squared(),
            Family::Hyperbola { eps } => x.norm() - eps * x.dot(&e),
            Family::Parabola => (x.norm() + x.dot(&e)).max(0.0).sqrt(),
            Family::Cormack { k } => {
                let w = Complex64::new(x.x, x.y).powu(k) * Complex64::new(e.x, -e.y);
                w.re
            }
        }
    }

    /// Level value and its coordinate gradient. No domain check; the gradient
    /// is not finite at singular points.
    #[inline]
    pub fn level_grad(&self, x: Point, phi: f64) -> (f64, Point) {
        let e = unit(phi);
        match self.family {
            Family::Radon => (x.dot(&e), e),
            Family::Funk => (-x.dot(&e), -e),
            Family::HGeodesic => {
                let p = x.dot(&e);
                let d = 1.0 + x.norm_squared();
                (2.0 * p / d, e * (2.0 / d) - x * (4.0 * p / (d * d)))
            }
            Family::Equidistant => {
                let p = x.dot(&e);
                let d = 1.0 - x.norm_squared();
                (2.0 * p / d, e * (2.0 / d) + x * (4.0 * p / (d * d)))
            }
            Family::Ellipse { e1, e2 } => {
                let v = x - Point::new(e1 * e.x, e2 * e.y);
                (v.norm_squared(), v * 2.0)
            }
            Family::Hyperbola { eps } => {
                let r = x.norm();
                (r - eps * x.dot(&e), x / r - e * eps)
            }
            Family::Parabola => {
                let r = x.norm();
                let s = (r + x.dot(&e)).max(0.0).sqrt();
                (s, (x / r + e) / (2.0 * s))
            }
            Family::Cormack { k } => {
                let z = Complex64::new(x.x, x.y);
                let rot = Complex64::new(e.x, -e.y);
                let zk1 = z.powu(k - 1);
                let w = zk1 * z * rot;
                let d = zk1 * rot * k as f64;
                (w.re, Point::new(d.re, -d.im))
            }
        }
    }

    /// `|∇ψ(x, φ)|` in the transform metric, from closed forms.
    pub fn grad_norm(&self, x: Point, phi: f64) -> Result<f64> {
        self.check(x)?;
        let e = unit(phi);
        let r2 = x.norm_squared();
        Ok(match self.family {
            Family::Radon => 1.0,
            Family::Funk => ((1.0 + r2) * (1.0 + x.dot(&e).powi(2))).sqrt(),
            Family::HGeodesic => {
                let psi = 2.0 * x.dot(&e) / (1.0 + r2);
                2.0 / (1.0 + r2) * (1.0 - psi * psi).sqrt()
            }
            Family::Equidistant => {
                let psi = 2.0 * x.dot(&e) / (1.0 - r2);
                2.0 / (1.0 - r2) * (1.0 + psi * psi).sqrt()
            }
            Family::Ellipse { e1, e2 } => 2.0 * (x - Point::new(e1 * e.x, e2 * e.y)).norm(),
            Family::Hyperbola { eps } => {
                if r2 == 0.0 {
                    return Err(Error::Domain {
                        family: self.tag(),
                        x: x.x,
                        y: x.y,
                    });
                }
                (1.0 + eps * eps - 2.0 * eps * x.dot(&e) / r2.sqrt()).sqrt()
            }
            Family::Parabola => 1.0 / (2.0 * r2.sqrt()).sqrt(),
            Family::Cormack { k } => k as f64 * r2.sqrt().powi(k as i32 - 1),
        })
    }

    /// Length of the tangent vector `v` at `x` in the chosen metric.
    #[inline]
    pub fn line_element(&self, x: Point, v: Point, metric: MetricUse) -> f64 {
        match (self.family, metric) {
            (Family::Funk, _) => {
                let r2 = 1.0 + x.norm_squared();
                (r2 * v.norm_squared() - x.dot(&v).powi(2)).max(0.0).sqrt() / r2
            }
            (Family::HGeodesic, MetricUse::Curve) => 2.0 * v.norm() / (1.0 - x.norm_squared()),
            _ => v.norm(),
        }
    }

    /// Transform-metric norm of the coordinate gradient `g` of a function at
    /// `x`.
    #[inline]
    pub fn metric_grad_norm(&self, x: Point, g: Point) -> f64 {
        match self.family {
            Family::Funk => {
                ((1.0 + x.norm_squared()) * (g.norm_squared() + x.dot(&g).powi(2))).sqrt()
            }
            _ => g.norm(),
        }
    }

    /// The normalizing coefficient `D(x) = (1/2π) ∫ dφ / |∇ψ|²`, in closed
    /// form.
    pub fn dcoef(&self, x: Point) -> Result<f64> {
        self.check(x)?;
        let r2 = x.norm_squared();
        Ok(match self.family {
            Family::Radon => 1.0,
            Family::Funk => (1.0 + r2).powf(-1.5),
            Family::HGeodesic => (1.0 + r2).powi(3) / (4.0 * (1.0 - r2)),
            Family::Equidistant => (1.0 - r2).powi(3) / (4.0 * (1.0 + r2)),
            Family::Ellipse { e1, e2 } => {
                if e1 == e2 {
                    let d = e1 * e1 - r2;
                    if d == 0.0 {
                        return Err(self.on_source_curve(x));
                    }
                    1.0 / (4.0 * d.abs())
                } else {
                    let t = self.ellipse_distance_poly(x)?;
                    residue_integral(&TrigPoly::constant(1.0), &t)
                        .map_err(|_| self.on_source_curve(x))?
                        / TAU
                }
            }
            Family::Hyperbola { eps } => 1.0 / (eps * eps - 1.0),
            Family::Parabola => 2.0 * r2.sqrt(),
            Family::Cormack { k } => 1.0 / (k as f64).powi(2) / r2.powi(k as i32 - 1),
        })
    }

    /// `1/D(x)`, finite at the origin for the Cormack family (where it is 0).
    pub fn inv_dcoef(&self, x: Point) -> Result<f64> {
        match self.family {
            Family::Cormack { k } if x.norm_squared() == 0.0 => Ok(if k == 1 { 1.0 } else { 0.0 }),
            _ => Ok(1.0 / self.dcoef(x)?),
        }
    }

    /// `D(x)` by the periodic trapezoid rule with `n_phi` angles.
    pub fn dcoef_quadrature(&self, x: Point, n_phi: usize) -> Result<f64> {
        if n_phi == 0 {
            return Err(Error::param("n_phi must be positive"));
        }
        let mut s = 0.0;
        for j in 0..n_phi {
            let g = self.grad_norm(x, TAU * j as f64 / n_phi as f64)?;
            s += 1.0 / (g * g);
        }
        Ok(s / n_phi as f64)
    }

    fn on_source_curve(&self, x: Point) -> Error {
        Error::Domain {
            family: self.tag(),
            x: x.x,
            y: x.y,
        }
    }

    /// `4|x - e(φ)|²` as an order-2 trigonometric polynomial.
    fn ellipse_distance_poly(&self, x: Point) -> Result<TrigPoly> {
        let Family::Ellipse { e1, e2 } = self.family else {
            unreachable!()
        };
        TrigPoly::new(
            vec![
                4.0 * (x.norm_squared() + 0.5 * (e1 * e1 + e2 * e2)),
                -8.0 * x.x * e1,
                2.0 * (e1 * e1 - e2 * e2),
            ],
            vec![-8.0 * x.y * e2, 0.0],
        )
    }

    /// Range of level values met by curves through the support disc.
    pub fn lambda_range(&self) -> (f64, f64) {
        self.lambda_range_for(self.support)
    }

    /// Range of level values met by curves through the disc of radius `r`.
    pub fn lambda_range_for(&self, r: f64) -> (f64, f64) {
        match self.family {
            Family::Radon | Family::Funk => (-r, r),
            Family::HGeodesic => {
                let m = 2.0 * r / (1.0 + r * r);
                (-m, m)
            }
            Family::Equidistant => {
                let m = 2.0 * r / (1.0 - r * r);
                (-m, m)
            }
            Family::Ellipse { e1, e2 } => {
                let lo = (e1.min(e2) - r).max(0.0);
                let hi = e1.max(e2) + r;
                (lo * lo, hi * hi)
            }
            Family::Hyperbola { eps } => (-(eps - 1.0) * r, (eps + 1.0) * r),
            Family::Parabola => (0.0, (2.0 * r).sqrt()),
            Family::Cormack { k } => {
                let m = r.powi(k as i32);
                (-m, m)
            }
        }
    }

    /// Spatial weight `m(x)` relating arc-length data to `M_φ`:
    /// `R f = μ · M_φ(m f)`.
    pub fn weight_m(&self, x: Point) -> Result<f64> {
        self.check(x)?;
        let r2 = x.norm_squared();
        Ok(match self.family {
            Family::Radon | Family::Ellipse { .. } => 1.0,
            Family::Funk => (1.0 + r2).sqrt(),
            Family::HGeodesic => 4.0 / (1.0 - r2 * r2),
            Family::Equidistant => 2.0 / (1.0 - r2),
            Family::Parabola => 1.0 / (2.0 * r2.sqrt()).sqrt(),
            Family::Cormack { k } => k as f64 * r2.sqrt().powi(k as i32 - 1),
            Family::Hyperbola { .. } => return Err(self.no_factorization()),
        })
    }

    /// Level weight `μ(λ)` relating arc-length data to `M_φ`.
    pub fn weight_mu(&self, lambda: f64) -> Result<f64> {
        Ok(match self.family {
            Family::Radon | Family::Parabola | Family::Cormack { .. } => 1.0,
            Family::Funk | Family::Equidistant => (1.0 + lambda * lambda).sqrt(),
            Family::HGeodesic => {
                if lambda.abs() > 1.0 {
                    return Err(Error::param(format!(
                        "hgeodesic level {lambda} is outside [-1, 1]"
                    )));
                }
                (1.0 - lambda * lambda).sqrt()
            }
            Family::Ellipse { .. } => {
                if lambda < 0.0 {
                    return Err(Error::param(format!(
                        "ellipse level {lambda} is a squared radius and must be >= 0"
                    )));
                }
                2.0 * lambda.sqrt()
            }
            Family::Hyperbola { .. } => return Err(self.no_factorization()),
        })
    }

    fn no_factorization(&self) -> Error {
        Error::Unsupported(
            "the hyperbola family has no weight factorization; arc-length data cannot be \
             converted"
                .into(),
        )
    }

    /// `ψ(x, ·) - ψ(y, ·)` as a first-order trigonometric polynomial.
    ///
    /// Not available for the parabola family, whose difference is not a
    /// trigonometric polynomial in `φ` (see [`crate::trigpoly::nucleus_check`]).
    pub fn trig_difference(&self, x: Point, y: Point) -> Result<TrigPoly> {
        self.check(x)?;
        self.check(y)?;
        let (a0, v) = match self.family {
            Family::Radon => (0.0, y - x),
            Family::Funk => (0.0, x - y),
            Family::HGeodesic => (
                0.0,
                y * (2.0 / (1.0 + y.norm_squared())) - x * (2.0 / (1.0 + x.norm_squared())),
            ),
            Family::Equidistant => (
                0.0,
                y * (2.0 / (1.0 - y.norm_squared())) - x * (2.0 / (1.0 - x.norm_squared())),
            ),
            Family::Ellipse { e1, e2 } => {
                let d = (y - x) * 2.0;
                (
                    x.norm_squared() - y.norm_squared(),
                    Point::new(d.x * e1, d.y * e2),
                )
            }
            Family::Hyperbola { eps } => (y.norm() - x.norm(), (x - y) * eps),
            Family::Cormack { k } => {
                let zx = Complex64::new(x.x, x.y).powu(k);
                let zy = Complex64::new(y.x, y.y).powu(k);
                (0.0, Point::new(zy.re - zx.re, zy.im - zx.im))
            }
            Family::Parabola => {
                return Err(Error::Unsupported(
                    "parabola differences are not trigonometric polynomials in phi".into(),
                ))
            }
        };
        TrigPoly::first_order(a0, v.x, v.y)
    }
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Radon => "radon",
            Family::Funk => "funk",
            Family::HGeodesic => "hgeodesic",
            Family::Equidistant => "equidistant",
            Family::Ellipse { .. } => "ellipse",
            Family::Hyperbola { .. } => "hyperbola",
            Family::Parabola => "parabola",
            Family::Cormack { .. } => "cormack",
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.tag())?;
        match self.family {
            Family::Ellipse { e1, e2 } => write!(f, "e1={e1},e2={e2},")?,
            Family::Hyperbola { eps } => write!(f, "eps={eps},")?,
            Family::Cormack { k } => write!(f, "k={k},")?,
            _ => {}
        }
        write!(f, "support={}", self.support)
    }
}

impl std::str::FromStr for Geometry {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Geometry::parse(s)
    }
}

#[cfg(test)]
mod tests;
