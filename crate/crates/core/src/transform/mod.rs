//! Sinograms and the forward model.
//!
//! A [`Sinogram`] samples data on a uniform `λ` axis and on `n_φ` equally
//! spaced angles covering either the full circle or, for families with the
//! antipodal symmetry `λ(x, φ + π) = -λ(x, φ)`, half of it.

pub mod trace;

use std::f64::consts::{PI, TAU};
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{unit, Family, Geometry, Point};
use crate::phantom::{Component, Phantom};
use trace::{integrate_polylines, trace_curve, ChordRule, Region, TraceOptions, Weighting};

/// What a sinogram holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataKind {
    /// `M_φ f = ∫ f ds / |∇ψ|`.
    Mphi,
    /// Plain arc-length integrals `∫ f ds` in the curve metric.
    Riemann,
}

impl DataKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DataKind::Mphi => "mphi",
            DataKind::Riemann => "riemann",
        }
    }
}

impl fmt::Display for DataKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Angular coverage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiRange {
    /// `φ_j = 2πj/n`.
    Full,
    /// `φ_j = πj/n`; the other half follows from `g(λ, φ + π) = g(-λ, φ)`.
    Half,
}

impl PhiRange {
    pub fn as_str(&self) -> &'static str {
        match self {
            PhiRange::Full => "full",
            PhiRange::Half => "half",
        }
    }

    pub fn span(&self) -> f64 {
        match self {
            PhiRange::Full => TAU,
            PhiRange::Half => PI,
        }
    }
}

/// `n` equally spaced values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaAxis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl LambdaAxis {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::param(format!("n_lambda must be at least 4, got {n}")));
        }
        if !(min.is_finite() && max.is_finite() && max > min) {
            return Err(Error::param(format!("bad lambda range [{min}, {max}]")));
        }
        Ok(LambdaAxis { min, max, n })
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    #[inline]
    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.max
        } else {
            self.min + i as f64 * self.step()
        }
    }

    /// Is the axis symmetric about 0 (needed for half-range data)?
    pub fn is_symmetric(&self) -> bool {
        (self.min + self.max).abs() <= 1e-12 * self.max.abs().max(self.min.abs())
    }
}

/// Sampled curve integrals, stored `φ`-major: `data[j * n_lambda + i]` is
/// the value at `(λ_i, φ_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    pub geometry: Geometry,
    pub kind: DataKind,
    pub lambda: LambdaAxis,
    pub n_phi: usize,
    pub phi_range: PhiRange,
    pub data: Vec<f64>,
}

impl Sinogram {
    pub fn new(
        geometry: Geometry,
        kind: DataKind,
        lambda: LambdaAxis,
        n_phi: usize,
        phi_range: PhiRange,
        data: Vec<f64>,
    ) -> Result<Self> {
        if n_phi == 0 {
            return Err(Error::param("n_phi must be positive"));
        }
        if data.len() != n_phi * lambda.n {
            return Err(Error::param(format!(
                "sinogram needs {} values, got {}",
                n_phi * lambda.n,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("sinogram values must be finite"));
        }
        if phi_range == PhiRange::Half {
            check_half_range(&geometry, &lambda)?;
        }
        Ok(Sinogram {
            geometry,
            kind,
            lambda,
            n_phi,
            phi_range,
            data,
        })
    }

    #[inline]
    pub fn phi(&self, j: usize) -> f64 {
        self.phi_range.span() * j as f64 / self.n_phi as f64
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.lambda.n + i]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.data[j * self.lambda.n..(j + 1) * self.lambda.n]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Expand half-range data to the full circle using
    /// `g(λ, φ + π) = g(-λ, φ)`.
    pub fn to_full_range(&self) -> Result<Sinogram> {
        if self.phi_range == PhiRange::Full {
            return Ok(self.clone());
        }
        check_half_range(&self.geometry, &self.lambda)?;
        let mut data = self.data.clone();
        for j in 0..self.n_phi {
            data.extend(self.row(j).iter().rev());
        }
        Sinogram::new(
            self.geometry,
            self.kind,
            self.lambda,
            2 * self.n_phi,
            PhiRange::Full,
            data,
        )
    }
}

/// Families whose level satisfies `λ(x, φ + π) = -λ(x, φ)` with the same
/// weights, so that half of the angles determine the rest.
pub fn has_antipodal_symmetry(geo: &Geometry) -> bool {
    matches!(
        geo.family(),
        Family::Radon | Family::Funk | Family::HGeodesic | Family::Equidistant | Family::Cormack { .. }
    )
}

fn check_half_range(geo: &Geometry, axis: &LambdaAxis) -> Result<()> {
    if !has_antipodal_symmetry(geo) {
        return Err(Error::Unsupported(format!(
            "half-range angles need the symmetry lambda(phi + pi) = -lambda(phi), which the {} family lacks",
            geo.tag()
        )));
    }
    if !axis.is_symmetric() {
        return Err(Error::Precondition(format!(
            "half-range data need a symmetric lambda axis, got [{}, {}]",
            axis.min, axis.max
        )));
    }
    Ok(())
}

/// Sampling and accuracy choices for [`forward`].
#[derive(Debug, Clone)]
pub struct SinogramSpec {
    pub n_lambda: usize,
    pub n_phi: usize,
    pub phi_range: PhiRange,
    pub kind: DataKind,
    /// Explicit `λ` axis bounds; by default the geometry's range (see
    /// [`default_lambda_axis`]).
    pub lambda_bounds: Option<(f64, f64)>,
    /// Longest chord used when tracing; by default half the phantom's
    /// smallest feature.
    pub step: Option<f64>,
    /// Gauss–Legendre nodes per chord.
    pub nodes_per_chord: usize,
    /// Worker threads (`None`: rayon's default).
    pub workers: Option<usize>,
}

impl SinogramSpec {
    pub fn new(n_lambda: usize, n_phi: usize) -> Self {
        SinogramSpec {
            n_lambda,
            n_phi,
            phi_range: PhiRange::Full,
            kind: DataKind::Mphi,
            lambda_bounds: None,
            step: None,
            nodes_per_chord: 5,
            workers: None,
        }
    }

    pub fn half_range(mut self) -> Self {
        self.phi_range = PhiRange::Half;
        self
    }

    pub fn kind(mut self, kind: DataKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn step(mut self, step: f64) -> Self {
        self.step = Some(step);
        self
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }
}

/// The `λ` axis used by default for `n` samples.
///
/// It spans the geometry's range for its support disc. Parabola levels are
/// non-negative and the curve degenerates at `λ = 0`, so that axis is offset
/// by half a step: `λ_i = (i + 1/2) Δ`, reaching half a step beyond the range.
pub fn default_lambda_axis(geo: &Geometry, n: usize) -> Result<LambdaAxis> {
    let (lo, hi) = geo.lambda_range();
    if geo.reflects_lambda() {
        let d = (hi - lo) / (n as f64 - 1.0);
        LambdaAxis::new(lo + 0.5 * d, hi + 0.5 * d, n)
    } else {
        LambdaAxis::new(lo, hi, n)
    }
}

/// Run `f` on a pool with the requested number of workers.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Numerical(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Forward model: sample `M_φ f` (or arc-length data) of a phantom.
///
/// Indicator discs are integrated in closed form for the Radon and ellipse
/// families (chord and arc lengths); every other component is integrated
/// along traced curves. The result does not depend on the worker count.
pub fn forward(geo: &Geometry, phantom: &Phantom, spec: &SinogramSpec) -> Result<Sinogram> {
    let axis = match spec.lambda_bounds {
        Some((lo, hi)) => LambdaAxis::new(lo, hi, spec.n_lambda)?,
        None => default_lambda_axis(geo, spec.n_lambda)?,
    };
    if spec.phi_range == PhiRange::Half {
        check_half_range(geo, &axis)?;
    }
    if spec.n_phi == 0 {
        return Err(Error::param("n_phi must be positive"));
    }
    let model = ForwardModel::new(geo, phantom, spec)?;
    let n = axis.n;
    let span = spec.phi_range.span();
    let n_phi = spec.n_phi;
    let data = with_workers(spec.workers, || {
        (0..n * n_phi)
            .into_par_iter()
            .map(|idx| {
                let (j, i) = (idx / n, idx % n);
                model.value(axis.value(i), span * j as f64 / n_phi as f64)
            })
            .collect::<Result<Vec<f64>>>()
    })??;
    Sinogram::new(*geo, spec.kind, axis, n_phi, spec.phi_range, data)
}

/// Everything needed to evaluate single sinogram entries.
pub struct ForwardModel<'a> {
    geo: &'a Geometry,
    kind: DataKind,
    analytic: Vec<Component>,
    traced: Vec<Component>,
    region: Option<Region>,
    trace: TraceOptions,
    rule: ChordRule,
}

impl<'a> ForwardModel<'a> {
    pub fn new(geo: &'a Geometry, phantom: &Phantom, spec: &SinogramSpec) -> Result<Self> {
        let closed_form = matches!(geo.family(), Family::Radon | Family::Ellipse { .. });
        let (analytic, traced) = if closed_form {
            phantom.split_indicators()
        } else {
            (Vec::new(), phantom.components().to_vec())
        };
        let region = if traced.is_empty() {
            None
        } else {
            let sub = Phantom::new(traced.clone())?;
            let (c, r) = sub.bounding_disc();
            Some(Region::for_geometry(geo, c, r))
        };
        let step = match spec.step {
            Some(s) if s > 0.0 && s.is_finite() => s,
            Some(s) => return Err(Error::param(format!("step must be positive, got {s}"))),
            None => {
                let scale = Phantom::new(phantom.components().to_vec())?.feature_scale();
                let r = region.map(|r| r.radius).unwrap_or(1.0);
                (0.5 * scale).min(r / 8.0)
            }
        };
        if spec.nodes_per_chord == 0 {
            return Err(Error::param("nodes_per_chord must be positive"));
        }
        Ok(ForwardModel {
            geo,
            kind: spec.kind,
            analytic,
            traced,
            region,
            trace: TraceOptions::with_step(step),
            rule: ChordRule::new(spec.nodes_per_chord),
        })
    }

    /// One sinogram entry.
    pub fn value(&self, lambda: f64, phi: f64) -> Result<f64> {
        let mut v = 0.0;
        for c in &self.analytic {
            v += closed_form_disc(self.geo, c, lambda, phi, self.kind);
        }
        if let Some(region) = &self.region {
            let lines = trace_curve(self.geo, lambda, phi, region, &self.trace)?;
            let weighting = match self.kind {
                DataKind::Mphi => Weighting::Transform,
                DataKind::Riemann => Weighting::ArcLength,
            };
            let f = |x: Point| self.traced.iter().map(|c| c.eval(x)).sum::<f64>();
            let q = integrate_polylines(self.geo, lambda, phi, &lines, &self.rule, weighting, &f);
            v += q / self.geo.quotient_order() as f64;
        }
        Ok(v)
    }
}

/// Closed-form integral of an indicator disc over a line (Radon) or a circle
/// (ellipse family).
fn closed_form_disc(geo: &Geometry, c: &Component, lambda: f64, phi: f64, kind: DataKind) -> f64 {
    let Component::Disc { center, r, amp, .. } = *c else {
        return 0.0;
    };
    match geo.family() {
        Family::Radon => {
            let d = lambda - center.dot(&unit(phi));
            if d.abs() < r {
                amp * 2.0 * (r * r - d * d).sqrt()
            } else {
                0.0
            }
        }
        Family::Ellipse { e1, e2 } => {
            if lambda <= 0.0 {
                return 0.0;
            }
            let rho = lambda.sqrt();
            let (s, co) = phi.sin_cos();
            let dist = (Point::new(e1 * co, e2 * s) - center).norm();
            // Half-angle of the arc of the circle inside the disc.
            let alpha = if rho + dist <= r {
                PI
            } else if dist >= rho + r || rho >= dist + r {
                0.0
            } else {
                ((rho * rho + dist * dist - r * r) / (2.0 * rho * dist))
                    .clamp(-1.0, 1.0)
                    .acos()
            };
            match kind {
                // |∇ψ| = 2ρ on the circle.
                DataKind::Mphi => amp * alpha,
                DataKind::Riemann => amp * 2.0 * alpha * rho,
            }
        }
        _ => 0.0,
    }
}

/// Convert arc-length data to `M_φ` data of `m f`: divide by `μ(λ)`.
pub fn riemann_to_mphi(sino: &Sinogram) -> Result<Sinogram> {
    if sino.kind != DataKind::Riemann {
        return Err(Error::Precondition("sinogram does not hold arc-length data".into()));
    }
    let geo = &sino.geometry;
    let n = sino.lambda.n;
    let mut data = sino.data.clone();
    for i in 0..n {
        let mu = geo.weight_mu(sino.lambda.value(i))?;
        for j in 0..sino.n_phi {
            let v = &mut data[j * n + i];
            *v = if mu == 0.0 { 0.0 } else { *v / mu };
        }
    }
    Sinogram::new(*geo, DataKind::Mphi, sino.lambda, sino.n_phi, sino.phi_range, data)
}
