//! Filtered backprojection for the inversion formula
//!
//! ```text
//! f(x) = -1/(4π² D(x)) ∫₀^{2π} f.p.∫ M_φ f(λ, φ) / (λ - λ(x, φ))² dλ dφ.
//! ```
//!
//! [`pv_filter`] does the inner integral for every angle; [`backproject`]
//! samples it at `λ(x, φ_j)` and sums over the angles.

pub mod filter;
mod focus;

use std::f64::consts::PI;
use std::sync::atomic::{AtomicBool, Ordering};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Family, Geometry, Point};
use crate::transform::{riemann_to_mphi, with_workers, DataKind, Sinogram};

pub use crate::field::{linf, rel_l2, Grid, ScalarField};
pub use filter::{pv_filter, Filtered};

static SIGN_FLIP: AtomicBool = AtomicBool::new(false);

/// Fault injection for the self-test: flips the sign of every
/// backprojection while set.
#[doc(hidden)]
pub fn inject_sign_flip(on: bool) {
    SIGN_FLIP.store(on, Ordering::SeqCst);
}

/// Is `x` in the part of the plane that gets reconstructed? Points outside
/// the support disc or the chart are written as zero.
fn reconstructs(geo: &Geometry, x: Point) -> bool {
    x.norm() <= geo.support_radius() && geo.contains(x)
}

/// Sum the filtered data over the angles at every grid node.
pub fn backproject(filtered: &Filtered, geo: &Geometry, grid: &Grid) -> Result<ScalarField> {
    let bp = Backprojector::new(filtered, geo);
    let sign = if SIGN_FLIP.load(Ordering::SeqCst) { -1.0 } else { 1.0 };
    let singular = match geo.family() {
        Family::Parabola => Some(parabola_origin(filtered)?),
        Family::Hyperbola { .. } => Some(bp.ring_limit(Point::zeros())?),
        _ => None,
    };
    let rows: Vec<Vec<f64>> = (0..grid.ny)
        .into_par_iter()
        .map(|jy| {
            let mut row = vec![0.0; grid.nx];
            for (ix, out) in row.iter_mut().enumerate() {
                let x = grid.point(ix, jy);
                if let Some(v) = singular {
                    if x.norm_squared() == 0.0 {
                        *out = sign * v;
                        continue;
                    }
                }
                if reconstructs(geo, x) {
                    *out = sign * bp.value(x)?;
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(ScalarField {
        grid: *grid,
        values: rows.concat(),
    })
}

struct Backprojector<'a> {
    filtered: &'a Filtered,
    geo: &'a Geometry,
    angles: Vec<f64>,
    scale: f64,
}

impl<'a> Backprojector<'a> {
    fn new(filtered: &'a Filtered, geo: &'a Geometry) -> Self {
        let n_phi = filtered.n_phi;
        Backprojector {
            filtered,
            geo,
            angles: (0..n_phi).map(|j| filtered.phi(j)).collect(),
            scale: -(2.0 * PI / n_phi as f64) / (4.0 * PI * PI),
        }
    }

    fn value(&self, x: Point) -> Result<f64> {
        let w = self.geo.inv_dcoef(x)?;
        if w == 0.0 {
            return Ok(0.0);
        }
        let mut sum = 0.0;
        for (j, &phi) in self.angles.iter().enumerate() {
            let l0 = self.geo.level(x, phi);
            sum += self.filtered.interpolate(j, l0).ok_or(Error::Coverage {
                x: x.x,
                y: x.y,
                phi,
                lambda: l0,
            })?;
        }
        Ok(self.scale * w * sum)
    }

    /// The limit of `f` at a point where the level is not differentiable.
    ///
    /// The data are singular at the level through such a point, so the
    /// formula evaluated there is not the limit, and the first few `λ` steps
    /// around it are not resolved either. Ring averages further out are
    /// `f(c) + a ρ² + b ρ⁴ + …`; a least-squares fit over a few rings
    /// gives `f(c)`. The rings span 3 to 8 `λ` steps, at most a quarter of
    /// the support radius.
    fn ring_limit(&self, c: Point) -> Result<f64> {
        const RINGS: [f64; 4] = [3.0, 4.0, 6.0, 8.0];
        const RING_POINTS: usize = 16;
        let unit = self.filtered.lambda.step().min(0.25 * self.geo.support_radius() / 8.0);
        let mean = |r: f64| -> Result<f64> {
            let mut sum = 0.0;
            for k in 0..RING_POINTS {
                let t = 2.0 * PI * (k as f64 + 0.5) / RING_POINTS as f64;
                sum += self.value(c + crate::geometry::unit(t) * r)?;
            }
            Ok(sum / RING_POINTS as f64)
        };
        let m = DMatrix::from_fn(RINGS.len(), 3, |i, j| (RINGS[i] * RINGS[i]).powi(j as i32));
        let y = RINGS.iter().map(|j| mean(j * unit)).collect::<Result<Vec<f64>>>()?;
        let coef = m
            .svd(true, true)
            .solve(&DVector::from_vec(y), 1e-14)
            .map_err(|e| Error::Numerical(format!("ring fit failed: {e}")))?;
        Ok(coef[0])
    }
}

/// The parabola value at the focus, where `D = 2|x|` vanishes.
///
/// In the half-angle plane `w` (with `x = w²/2` as complex numbers) the
/// backprojection reconstructs `h(w) = |w|² f(x)`, so `f(0) = Δh(0) / 4`, and
/// the Laplacian of a backprojection is the backprojection of `G''`:
/// `f(0) = -1/(16π²) ∫₀^{2π} G''(0, φ) dφ`.
fn parabola_origin(filtered: &Filtered) -> Result<f64> {
    let g2 = filtered.curvature_at_zero.as_ref().ok_or_else(|| {
        Error::Precondition("parabola data must be filtered with their even continuation".into())
    })?;
    let sum: f64 = g2.iter().sum();
    Ok(-sum * (2.0 * PI / filtered.n_phi as f64) / (16.0 * PI * PI))
}

/// Options for [`reconstruct_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct InvertOptions {
    /// Worker threads (`None`: rayon's default).
    pub workers: Option<usize>,
}

/// Recover `f` from `M`-data on `grid`.
pub fn reconstruct(sino: &Sinogram, grid: &Grid) -> Result<ScalarField> {
    reconstruct_with(sino, grid, &InvertOptions::default())
}

pub fn reconstruct_with(sino: &Sinogram, grid: &Grid, opts: &InvertOptions) -> Result<ScalarField> {
    let geo = sino.geometry;
    if !geo.support_condition_holds() {
        if let Family::Ellipse { e1, e2 } = geo.family() {
            return Err(Error::Precondition(format!(
                "support radius {} must be below min(e1, e2) = {} for exact inversion",
                geo.support_radius(),
                e1.min(e2)
            )));
        }
    }
    match sino.kind {
        DataKind::Mphi => with_workers(opts.workers, || {
            let Some(sub) = focus::subtract(sino)? else {
                return backproject(&pv_filter(sino)?, &geo, grid);
            };
            let mut out = backproject(&pv_filter(&sub.remainder)?, &geo, grid)?;
            for jy in 0..grid.ny {
                for ix in 0..grid.nx {
                    let x = grid.point(ix, jy);
                    if x.norm() <= geo.support_radius() {
                        out.values[jy * grid.nx + ix] += sub.field(x);
                    }
                }
            }
            Ok(out)
        })?,
        DataKind::Riemann => reconstruct_riemann_with(sino, grid, opts),
    }
}

/// Recover `f` from arc-length data: convert to `M`-data of `m f`, invert,
/// divide by `m`.
pub fn reconstruct_riemann(sino: &Sinogram, grid: &Grid) -> Result<ScalarField> {
    reconstruct_riemann_with(sino, grid, &InvertOptions::default())
}

pub fn reconstruct_riemann_with(sino: &Sinogram, grid: &Grid, opts: &InvertOptions) -> Result<ScalarField> {
    let geo = sino.geometry;
    let m = riemann_to_mphi(sino)?;
    let mut out = reconstruct_with(&m, grid, opts)?;
    for jy in 0..grid.ny {
        for ix in 0..grid.nx {
            let x = grid.point(ix, jy);
            let v = &mut out.values[jy * grid.nx + ix];
            if !geo.contains(x) {
                // The parabola focus: m is infinite there.
                *v = 0.0;
            } else if *v != 0.0 {
                *v /= geo.weight_m(x)?;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
