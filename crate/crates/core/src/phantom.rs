//! Analytic test fields: sums of Gaussians and (optionally mollified) discs.
//!
//! Descriptor syntax, components separated by `;`:
//!
//! * `gauss:cx,cy,sigma,amp` — `amp · exp(-|x - c|² / (2 sigma²))`;
//! * `disc:cx,cy,r,amp[,w]` — `amp · smoothstep((r - |x - c|) / w)`, an
//!   indicator when `w` is 0 or absent.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Grid, ScalarField};
use crate::geometry::Point;

/// Gaussians are treated as supported within this many standard deviations.
pub const GAUSS_SUPPORT_SIGMAS: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Component {
    Gauss { center: Point, sigma: f64, amp: f64 },
    Disc { center: Point, r: f64, amp: f64, w: f64 },
}

impl Component {
    #[inline]
    pub fn eval(&self, x: Point) -> f64 {
        match *self {
            Component::Gauss { center, sigma, amp } => {
                amp * (-(x - center).norm_squared() / (2.0 * sigma * sigma)).exp()
            }
            Component::Disc { center, r, amp, w } => {
                let d = (x - center).norm();
                if w == 0.0 {
                    if d <= r {
                        amp
                    } else {
                        0.0
                    }
                } else {
                    amp * smoothstep((r - d) / w)
                }
            }
        }
    }

    pub fn center(&self) -> Point {
        match *self {
            Component::Gauss { center, .. } | Component::Disc { center, .. } => center,
        }
    }

    /// Radius about the centre outside which the component is (numerically)
    /// zero.
    pub fn support_radius(&self) -> f64 {
        match *self {
            Component::Gauss { sigma, .. } => GAUSS_SUPPORT_SIGMAS * sigma,
            Component::Disc { r, .. } => r,
        }
    }

    /// Length over which the component varies.
    pub fn feature_scale(&self) -> f64 {
        match *self {
            Component::Gauss { sigma, .. } => sigma,
            Component::Disc { r, w, .. } => {
                if w > 0.0 {
                    w.min(r)
                } else {
                    r / 8.0
                }
            }
        }
    }

    /// Margin added around the support when tracing curves.
    pub fn margin(&self) -> f64 {
        match *self {
            Component::Gauss { sigma, .. } => 3.0 * sigma,
            Component::Disc { r, .. } => 0.05 * r,
        }
    }

    pub fn is_indicator(&self) -> bool {
        matches!(self, Component::Disc { w, .. } if *w == 0.0)
    }
}

/// `3u² - 2u³` on `[0, 1]`, clamped outside.
#[inline]
pub fn smoothstep(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        u * u * (3.0 - 2.0 * u)
    }
}

/// A sum of [`Component`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct Phantom {
    components: Vec<Component>,
}

impl Phantom {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::param("a phantom needs at least one component"));
        }
        for c in &components {
            let ok = match *c {
                Component::Gauss { center, sigma, amp } => {
                    center.iter().all(|v| v.is_finite()) && sigma > 0.0 && sigma.is_finite() && amp.is_finite()
                }
                Component::Disc { center, r, amp, w } => {
                    center.iter().all(|v| v.is_finite())
                        && r > 0.0
                        && r.is_finite()
                        && amp.is_finite()
                        && w >= 0.0
                        && w.is_finite()
                }
            };
            if !ok {
                return Err(Error::param(format!("invalid phantom component {c:?}")));
            }
        }
        Ok(Phantom { components })
    }

    /// A single Gaussian.
    pub fn gaussian(center: Point, sigma: f64, amp: f64) -> Result<Self> {
        Phantom::new(vec![Component::Gauss { center, sigma, amp }])
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut components = Vec::new();
        let mut at = 0;
        for part in s.split(';') {
            let pos = at;
            at += part.len() + 1;
            let Some((tag, args)) = part.split_once(':') else {
                return Err(Error::parse(pos, format!("expected tag:args, got '{part}'")));
            };
            let mut nums = Vec::new();
            let mut a = pos + tag.len() + 1;
            for v in args.split(',') {
                let x: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(a, format!("'{v}' is not a number")))?;
                if !x.is_finite() {
                    return Err(Error::parse(a, format!("'{v}' is not finite")));
                }
                nums.push(x);
                a += v.len() + 1;
            }
            let c = match (tag, nums.as_slice()) {
                ("gauss", &[cx, cy, sigma, amp]) => {
                    if !(sigma > 0.0) {
                        return Err(Error::parse(pos, "gauss sigma must be positive"));
                    }
                    Component::Gauss {
                        center: Point::new(cx, cy),
                        sigma,
                        amp,
                    }
                }
                ("disc", &[cx, cy, r, amp]) | ("disc", &[cx, cy, r, amp, _]) => {
                    let w = nums.get(4).copied().unwrap_or(0.0);
                    if !(r > 0.0) || w < 0.0 {
                        return Err(Error::parse(pos, "disc needs r > 0 and w >= 0"));
                    }
                    Component::Disc {
                        center: Point::new(cx, cy),
                        r,
                        amp,
                        w,
                    }
                }
                ("gauss", _) => {
                    return Err(Error::parse(pos, "gauss takes cx,cy,sigma,amp"));
                }
                ("disc", _) => {
                    return Err(Error::parse(pos, "disc takes cx,cy,r,amp[,w]"));
                }
                _ => {
                    return Err(Error::parse(
                        pos,
                        format!("unknown phantom component '{tag}' (expected gauss or disc)"),
                    ))
                }
            };
            components.push(c);
        }
        Phantom::new(components)
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    #[inline]
    pub fn eval(&self, x: Point) -> f64 {
        self.components.iter().map(|c| c.eval(x)).sum()
    }

    pub fn sample(&self, grid: &Grid) -> ScalarField {
        ScalarField::from_fn(*grid, |x| self.eval(x))
    }

    /// Smallest disc about the origin containing every component's support.
    pub fn support_radius(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.center().norm() + c.support_radius())
            .fold(0.0, f64::max)
    }

    /// A disc containing the support plus a safety margin: centre and radius.
    pub fn bounding_disc(&self) -> (Point, f64) {
        let (mut lo, mut hi) = (Point::repeat(f64::INFINITY), Point::repeat(f64::NEG_INFINITY));
        for c in &self.components {
            let r = c.support_radius() + c.margin();
            lo = lo.inf(&(c.center() - Point::repeat(r)));
            hi = hi.sup(&(c.center() + Point::repeat(r)));
        }
        let center = (lo + hi) * 0.5;
        let radius = self
            .components
            .iter()
            .map(|c| (c.center() - center).norm() + c.support_radius() + c.margin())
            .fold(0.0, f64::max);
        (center, radius)
    }

    /// Smallest length over which any component varies.
    pub fn feature_scale(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.feature_scale())
            .fold(f64::INFINITY, f64::min)
    }

    /// Split into (indicator discs, everything else).
    pub fn split_indicators(&self) -> (Vec<Component>, Vec<Component>) {
        self.components.iter().partition(|c| c.is_indicator())
    }
}

impl fmt::Display for Phantom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            match *c {
                Component::Gauss { center, sigma, amp } => {
                    write!(f, "gauss:{},{},{},{}", center.x, center.y, sigma, amp)?
                }
                Component::Disc { center, r, amp, w } => {
                    write!(f, "disc:{},{},{},{}", center.x, center.y, r, amp)?;
                    if w > 0.0 {
                        write!(f, ",{w}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for Phantom {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Phantom::parse(s)
    }
}
