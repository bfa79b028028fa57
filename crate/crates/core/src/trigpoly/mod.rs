//! Real trigonometric polynomials in one angle and the singular integrals
//! built from them.
//!
//! A trigonometric polynomial of order `k` is
//! `t(φ) = a₀ + Σ_{m=1..k} (a_m cos mφ + b_m sin mφ)`. Its `2k` complex roots
//! (counted in the strip `0 ≤ Re φ < 2π`) decide the two integrals this
//! module evaluates:
//!
//! * [`pv_inverse_square`]: the finite part of `∫₀^{2π} dφ / t(φ)²`, which
//!   vanishes when every root is real and simple;
//! * [`residue_integral`]: `∫₀^{2π} s/t dφ` for `t` without real roots,
//!   summed from residues in the upper half strip.

mod nucleus;

pub use nucleus::{nucleus_check, parabola_literal_nucleus, NucleusMethod, NucleusReport};

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};

/// `a₀ + Σ a_m cos mφ + b_m sin mφ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl TrigPoly {
    /// Build from cosine coefficients `a[0..=k]` and sine coefficients
    /// `b[1..=k]` (so `b.len() == a.len() - 1`).
    ///
    /// Trailing zero harmonics are dropped, so the stored order always has a
    /// non-zero leading pair.
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::param("trig polynomial needs a constant term"));
        }
        if b.len() + 1 != a.len() {
            return Err(Error::param(format!(
                "trig polynomial with {} cosine terms needs {} sine terms, got {}",
                a.len(),
                a.len() - 1,
                b.len()
            )));
        }
        if a.iter().chain(&b).any(|c| !c.is_finite()) {
            return Err(Error::param("trig polynomial coefficients must be finite"));
        }
        let mut b0 = Vec::with_capacity(a.len());
        b0.push(0.0);
        b0.extend(b);
        let mut t = TrigPoly { a, b: b0 };
        while t.a.len() > 1 {
            let k = t.a.len() - 1;
            if t.a[k] == 0.0 && t.b[k] == 0.0 {
                t.a.pop();
                t.b.pop();
            } else {
                break;
            }
        }
        Ok(t)
    }

    pub fn constant(c: f64) -> Self {
        TrigPoly {
            a: vec![c],
            b: vec![0.0],
        }
    }

    /// `a₀ + a₁ cos φ + b₁ sin φ`.
    pub fn first_order(a0: f64, a1: f64, b1: f64) -> Result<Self> {
        TrigPoly::new(vec![a0, a1], vec![b1])
    }

    pub fn order(&self) -> usize {
        self.a.len() - 1
    }

    /// Cosine coefficient `a_m` (zero beyond the order).
    pub fn cos_coef(&self, m: usize) -> f64 {
        self.a.get(m).copied().unwrap_or(0.0)
    }

    /// Sine coefficient `b_m` (zero for `m = 0` and beyond the order).
    pub fn sin_coef(&self, m: usize) -> f64 {
        self.b.get(m).copied().unwrap_or(0.0)
    }

    /// Largest coefficient magnitude; the natural size of `t`.
    pub fn scale(&self) -> f64 {
        self.a
            .iter()
            .chain(&self.b)
            .fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, phi: f64) -> f64 {
        let mut s = self.a[0];
        for m in 1..self.a.len() {
            let (sin, cos) = (m as f64 * phi).sin_cos();
            s += self.a[m] * cos + self.b[m] * sin;
        }
        s
    }

    /// Evaluate at a complex angle.
    pub fn eval_complex(&self, phi: Complex64) -> Complex64 {
        let mut s = Complex64::new(self.a[0], 0.0);
        for m in 1..self.a.len() {
            let w = phi * m as f64;
            s += w.cos() * self.a[m] + w.sin() * self.b[m];
        }
        s
    }

    pub fn derivative(&self) -> TrigPoly {
        let k = self.order();
        let mut a = vec![0.0; k + 1];
        let mut b = vec![0.0; k + 1];
        for m in 1..=k {
            a[m] = m as f64 * self.b[m];
            b[m] = -(m as f64) * self.a[m];
        }
        TrigPoly { a, b }
    }

    /// All `2k` complex roots with `0 ≤ Re φ < 2π`.
    ///
    /// Substituting `z = e^{iφ}` turns `z^k t(φ)` into an ordinary polynomial
    /// of degree `2k`; its companion-matrix eigenvalues are mapped back with
    /// `φ = -i log z` and polished by Newton steps on `t` itself.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let k = self.order();
        if k == 0 {
            return Ok(Vec::new());
        }
        let n = 2 * k;
        let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
        c[k] = Complex64::new(self.a[0], 0.0);
        for m in 1..=k {
            c[k + m] = Complex64::new(self.a[m], -self.b[m]) * 0.5;
            c[k - m] = Complex64::new(self.a[m], self.b[m]) * 0.5;
        }
        let lead = c[n];
        let mut comp = DMatrix::<Complex64>::zeros(n, n);
        for i in 1..n {
            comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..n {
            comp[(i, n - 1)] = -c[i] / lead;
        }
        let eig = comp
            .schur()
            .eigenvalues()
            .ok_or_else(|| Error::Numerical("companion eigenvalues did not converge".into()))?;
        let dt = self.derivative();
        let mut out = Vec::with_capacity(n);
        for z in eig.iter() {
            if z.norm() == 0.0 || !z.norm().is_finite() {
                return Err(Error::Numerical("degenerate companion root".into()));
            }
            let mut phi = Complex64::new(z.arg(), -z.norm().ln());
            let mut res = self.eval_complex(phi).norm();
            for _ in 0..4 {
                let d = dt.eval_complex(phi);
                if d.norm() == 0.0 {
                    break;
                }
                let cand = phi - self.eval_complex(phi) / d;
                let r = self.eval_complex(cand).norm();
                if r.is_finite() && r < res {
                    phi = cand;
                    res = r;
                } else {
                    break;
                }
            }
            let re = phi.re.rem_euclid(TAU);
            out.push(Complex64::new(if re >= TAU { 0.0 } else { re }, phi.im));
        }
        out.sort_by(|p, q| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)));
        Ok(out)
    }

    /// Real roots in `[0, 2π)`: roots whose imaginary part is below `tol`.
    pub fn real_roots(&self, tol: f64) -> Result<Vec<f64>> {
        let mut r: Vec<f64> = self
            .roots()?
            .into_iter()
            .filter(|z| z.im.abs() <= tol)
            .map(|z| z.re)
            .collect();
        r.sort_by(f64::total_cmp);
        Ok(r)
    }

    /// Classify the roots: are all `2k` of them real and pairwise distinct?
    pub fn all_real_simple(&self, tol: f64) -> Result<bool> {
        let roots = self.roots()?;
        if roots.iter().any(|z| z.im.abs() > tol) {
            return Ok(false);
        }
        Ok(!has_repeated(&roots.iter().map(|z| z.re).collect::<Vec<_>>(), tol))
    }
}

fn has_repeated(sorted_real: &[f64], tol: f64) -> bool {
    let n = sorted_real.len();
    (0..n).any(|i| {
        let d = (sorted_real[(i + 1) % n] - sorted_real[i]).rem_euclid(TAU);
        n > 1 && (d < tol.sqrt() || TAU - d < tol.sqrt())
    })
}

/// Knobs for [`pv_inverse_square`].
#[derive(Debug, Clone)]
pub struct PvOptions {
    /// Regularization parameters, strictly decreasing, in units of the
    /// polynomial's scale.
    pub eps: Vec<f64>,
    /// Roots with `|Im φ|` below this (times the scale) count as real.
    pub root_tol: f64,
    pub quadrature: Tolerance,
}

impl Default for PvOptions {
    fn default() -> Self {
        PvOptions {
            eps: (0..6).map(|j| 1e-2 / f64::powi(2.0, j)).collect(),
            root_tol: 1e-8,
            // Relative to the L1 norm, which grows like 1/eps; round-off
            // sets the floor.
            quadrature: Tolerance {
                abs: 1e-15,
                rel: 1e-12,
                max_intervals: 5_000,
            },
        }
    }
}

/// Value of the finite-part integral together with diagnostics.
#[derive(Debug, Clone)]
pub struct PvEstimate {
    pub value: f64,
    /// Extrapolation error indicator.
    pub error: f64,
    /// Real roots of `t` in `[0, 2π)`.
    pub real_roots: Vec<f64>,
    /// `max |t'|` over the real roots (0 when there are none).
    pub slope: f64,
    /// The regularized integrals `(ε, value)` that were extrapolated (empty
    /// when `t` has no real roots and the integral is regular).
    pub regularized: Vec<(f64, f64)>,
}

/// Finite part of `∫₀^{2π} dφ / t(φ)²`.
///
/// `Re ∫ dφ / (t + iε)²` is analytic in `ε`, and its limit as `ε → 0` is the
/// finite part. The regularized integrals are computed with adaptive
/// quadrature split at the real roots and extrapolated to `ε = 0`.
pub fn pv_inverse_square(t: &TrigPoly, opts: &PvOptions) -> Result<PvEstimate> {
    if opts.eps.is_empty() {
        return Err(Error::param("eps sequence must not be empty"));
    }
    if opts.eps.windows(2).any(|w| !(w[1] < w[0])) || opts.eps.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::param("eps sequence must be positive and strictly decreasing"));
    }
    let scale = t.scale();
    if scale == 0.0 {
        return Err(Error::param("t is identically zero"));
    }
    let roots = t.roots()?;
    let mut real: Vec<f64> = roots
        .iter()
        .filter(|z| z.im.abs() <= opts.root_tol)
        .map(|z| z.re)
        .collect();
    real.sort_by(f64::total_cmp);
    if has_repeated(&real, opts.root_tol) {
        return Err(Error::Precondition(
            "t has a repeated real root; the finite part does not exist".into(),
        ));
    }
    let dt = t.derivative();
    let slope = real.iter().fold(0.0_f64, |m, r| m.max(dt.eval(*r).abs()));

    if real.is_empty() {
        let r = quadrature::integrate(
            |p| {
                let v = t.eval(p);
                1.0 / (v * v)
            },
            &[0.0, PI, TAU],
            opts.quadrature,
        )?;
        return Ok(PvEstimate {
            value: r.value,
            error: r.error,
            real_roots: real,
            slope,
            regularized: Vec::new(),
        });
    }

    let mut h = Vec::with_capacity(opts.eps.len());
    let mut vals = Vec::with_capacity(opts.eps.len());
    for &e in &opts.eps {
        let eps = e * scale;
        let mut breaks = vec![0.0, TAU];
        for &r in &real {
            let w = (8.0 * eps / dt.eval(r).abs().max(1e-300)).min(0.1);
            for b in [r - w, r, r + w] {
                breaks.push(b.rem_euclid(TAU));
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let r = quadrature::integrate(
            |p| {
                let v = t.eval(p);
                let d = v * v + eps * eps;
                (v * v - eps * eps) / (d * d)
            },
            &breaks,
            opts.quadrature,
        )?;
        h.push(eps);
        vals.push(r.value);
    }
    let (value, error) = quadrature::extrapolate_to_zero(&h, &vals);
    Ok(PvEstimate {
        value,
        error,
        real_roots: real,
        slope,
        regularized: h.into_iter().zip(vals).collect(),
    })
}

/// `∫₀^{2π} s(φ)/t(φ) dφ` by residues, for `order(s) ≤ order(t)` and `t`
/// without real roots: `Re(2πi Σ s(φ_m)/t'(φ_m))` over the roots with
/// `Im φ_m > 0`.
///
/// When the orders are equal, `s/t` tends to a constant far up the strip and
/// the top edge of the contour contributes `2π` times that constant.
pub fn residue_integral(s: &TrigPoly, t: &TrigPoly) -> Result<f64> {
    if t.order() == 0 || s.order() > t.order() {
        return Err(Error::Precondition(format!(
            "residue integral needs 0 < order(t) and order(s) <= order(t), got {} and {}",
            s.order(),
            t.order()
        )));
    }
    let dt = t.derivative();
    let mut sum = Complex64::new(0.0, 0.0);
    let roots = t.roots()?;
    let tol = 1e-9;
    for z in &roots {
        if z.im.abs() <= tol {
            return Err(Error::Precondition(format!(
                "t has a real root at phi = {}; the integral diverges",
                z.re
            )));
        }
    }
    for z in roots.iter().filter(|z| z.im > 0.0) {
        sum += s.eval_complex(*z) / dt.eval_complex(*z);
    }
    let mut value = (Complex64::new(0.0, TAU) * sum).re;
    let k = t.order();
    if s.order() == k {
        let top = Complex64::new(s.a[k], s.b[k]) / Complex64::new(t.a[k], t.b[k]);
        value += TAU * top.re;
    }
    Ok(value)
}
