//! The `λ`-part of the inversion: `G(λ₀, φ) = f.p.∫ g(λ, φ) / (λ - λ₀)² dλ`.
//!
//! For data that vanish at both ends of the axis the finite part equals
//! `PV ∫ g'(λ) / (λ - λ₀) dλ`. `g'` is taken by central differences, with
//! the data extended by zeros, and the principal value by subtracting the
//! singularity:
//!
//! ```text
//! PV ∫_a^b d(λ)/(λ - λ₀) dλ = ∫_a^b (d(λ) - d(λ₀))/(λ - λ₀) dλ + d(λ₀) ln((b - λ₀)/(λ₀ - a))
//! ```
//!
//! where the first integral is smooth and done by the trapezoid rule.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::transform::{DataKind, LambdaAxis, PhiRange, Sinogram};

/// Largest tolerated `|g|` at the ends of the `λ` axis, relative to the
/// largest `|g|` in the sinogram.
pub const WINDOW_TOLERANCE: f64 = 1e-6;

/// Filtered data on the full circle of angles: `values[j * n + i]` is
/// `G(λ_i, φ_j)` with `φ_j = 2πj / n_phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtered {
    pub lambda: LambdaAxis,
    pub n_phi: usize,
    pub values: Vec<f64>,
    /// For evenly reflected (parabola) data: `G''(0, φ_j)` for every row.
    pub curvature_at_zero: Option<Vec<f64>>,
}

impl Filtered {
    #[inline]
    pub fn phi(&self, j: usize) -> f64 {
        std::f64::consts::TAU * j as f64 / self.n_phi as f64
    }

    pub fn row(&self, j: usize) -> &[f64] {
        let n = self.lambda.n;
        &self.values[j * n..(j + 1) * n]
    }

    /// `G(λ₀, φ_j)` by four-point Lagrange interpolation, or `None` when
    /// `λ₀` is off the axis by more than `1e-9` of its span.
    #[inline]
    pub fn interpolate(&self, j: usize, lambda0: f64) -> Option<f64> {
        let ax = &self.lambda;
        let d = ax.step();
        let slack = 1e-9 * (ax.max - ax.min);
        if !(lambda0 >= ax.min - slack && lambda0 <= ax.max + slack) {
            return None;
        }
        let row = self.row(j);
        let u = (lambda0 - ax.min) / d;
        let k = (u.floor() as isize).clamp(1, ax.n as isize - 3) as usize;
        let t = u - k as f64;
        // Nodes at t = -1, 0, 1, 2.
        let (a, b, c, e) = (row[k - 1], row[k], row[k + 1], row[k + 2]);
        let w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
        Some(w0 * a + w1 * b + w2 * c + w3 * e)
    }
}

/// Central differences of `g` extended by zeros, at `j = -1..=n` (stored at
/// `j + 1`).
fn derivative(g: &[f64], step: f64) -> Vec<f64> {
    let n = g.len() as isize;
    let at = |k: isize| if k < 0 || k >= n { 0.0 } else { g[k as usize] };
    (-1..=n).map(|j| (at(j + 1) - at(j - 1)) / (2.0 * step)).collect()
}

/// The filter output at node `i`, given `d = derivative(g)`.
fn filter_at(g: &[f64], d: &[f64], step: f64, i: usize) -> f64 {
    let n = g.len();
    let m = d.len();
    let ii = i + 1;
    let di = d[ii];
    let mut sum = 0.0;
    for (jj, &dj) in d.iter().enumerate() {
        if jj == ii {
            continue;
        }
        let w = if jj == 0 || jj == m - 1 { 0.5 } else { 1.0 };
        sum += w * (dj - di) / (jj as f64 - ii as f64);
    }
    // The node itself contributes the limit d'(λ_i).
    let at = |k: isize| if k < 0 || k >= n as isize { 0.0 } else { g[k as usize] };
    let ic = i as isize;
    sum += (at(ic + 2) - 2.0 * g[i] + at(ic - 2)) / (4.0 * step);
    sum + di * ((n - i) as f64 / (i + 1) as f64).ln()
}

/// Filter one row sampled with spacing `step`.
pub fn filter_row(g: &[f64], step: f64) -> Vec<f64> {
    let d = derivative(g, step);
    (0..g.len()).map(|i| filter_at(g, &d, step, i)).collect()
}

/// `G''(0)` for a row on an even axis symmetric about 0 with no node at 0:
/// the filter commutes with differentiation, so this is the filter of `g''`
/// interpolated to 0 from the four central nodes.
pub fn second_derivative_at_zero(g: &[f64], step: f64) -> f64 {
    let n = g.len();
    let at = |k: isize| if k < 0 || k >= n as isize { 0.0 } else { g[k as usize] };
    let g2: Vec<f64> = (0..n as isize)
        .map(|k| (at(k + 1) - 2.0 * at(k) + at(k - 1)) / (step * step))
        .collect();
    let d = derivative(&g2, step);
    let c = n / 2;
    let v = |i: usize| filter_at(&g2, &d, step, i);
    (9.0 * (v(c - 1) + v(c)) - (v(c - 2) + v(c + 1))) / 16.0
}

/// Bring data into the form the filter expects: full circle of angles and,
/// for the parabola, the even continuation to negative `λ`.
pub fn prepare(sino: &Sinogram) -> Result<Sinogram> {
    if sino.kind != DataKind::Mphi {
        return Err(Error::Precondition(
            "the filter takes M-data; convert arc-length data first".into(),
        ));
    }
    let s = sino.to_full_range()?;
    if !s.geometry.reflects_lambda() {
        return Ok(s);
    }
    let ax = s.lambda;
    let d = ax.step();
    if (ax.min - 0.5 * d).abs() > 1e-9 * d {
        return Err(Error::Precondition(format!(
            "parabola data must start half a step above 0 (lambda_min = step/2), got lambda_min = {}, step = {d}",
            ax.min
        )));
    }
    let n = ax.n;
    let mut data = Vec::with_capacity(2 * n * s.n_phi);
    for j in 0..s.n_phi {
        let row = s.row(j);
        data.extend(row.iter().rev());
        data.extend(row.iter());
    }
    let axis = LambdaAxis::new(-ax.max, ax.max, 2 * n)?;
    Sinogram::new(s.geometry, DataKind::Mphi, axis, s.n_phi, PhiRange::Full, data)
}

/// Refuse data that have not decayed at the ends of the axis.
pub fn check_window(sino: &Sinogram) -> Result<()> {
    let max = sino.max_abs();
    if max == 0.0 {
        return Ok(());
    }
    let n = sino.lambda.n;
    for j in 0..sino.n_phi {
        let row = sino.row(j);
        let edge = row[0].abs().max(row[n - 1].abs());
        if edge > WINDOW_TOLERANCE * max {
            return Err(Error::Windowing {
                row: j,
                ratio: edge / max,
            });
        }
    }
    Ok(())
}

/// Filter every row of `M`-data.
pub fn pv_filter(sino: &Sinogram) -> Result<Filtered> {
    let s = prepare(sino)?;
    check_window(&s)?;
    let step = s.lambda.step();
    let rows: Vec<Vec<f64>> = (0..s.n_phi)
        .into_par_iter()
        .map(|j| filter_row(s.row(j), step))
        .collect();
    let curvature_at_zero = s.geometry.reflects_lambda().then(|| {
        (0..s.n_phi)
            .into_par_iter()
            .map(|j| second_derivative_at_zero(s.row(j), step))
            .collect()
    });
    Ok(Filtered {
        lambda: s.lambda,
        n_phi: s.n_phi,
        values: rows.concat(),
        curvature_at_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{self, Tolerance};

    /// Finite part by `Re ∫ g/(λ - λ₀ + iε)²` extrapolated to `ε = 0`.
    fn oracle(g: impl Fn(f64) -> f64, a: f64, b: f64, l0: f64) -> f64 {
        let tol = Tolerance {
            abs: 1e-15,
            rel: 1e-12,
            max_intervals: 5000,
        };
        let mut hs = Vec::new();
        let mut vs = Vec::new();
        for k in 0..6 {
            let eps = 1e-2 * 0.5_f64.powi(k);
            let v = quadrature::integrate(
                |l| {
                    let t = l - l0;
                    let q = t * t + eps * eps;
                    g(l) * (t * t - eps * eps) / (q * q)
                },
                &[a, l0 - 8.0 * eps, l0, l0 + 8.0 * eps, b],
                tol,
            )
            .unwrap()
            .value;
            hs.push(eps);
            vs.push(v);
        }
        quadrature::extrapolate_to_zero(&hs, &vs).0
    }

    fn sample(g: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> (Vec<f64>, f64) {
        let d = (b - a) / (n - 1) as f64;
        ((0..n).map(|i| g(a + i as f64 * d)).collect(), d)
    }

    #[test]
    fn oracle_reproduces_the_bump_example() {
        let g = |l: f64| (1.0 - l * l).powi(2);
        assert!((oracle(g, -1.0, 1.0, 0.0) + 16.0 / 3.0).abs() < 1e-7);
    }

    #[test]
    fn bump_at_zero() {
        let g = |l: f64| (1.0 - l * l).powi(2);
        let (v, d) = sample(g, -1.0, 1.0, 401);
        let out = filter_row(&v, d);
        assert!((out[200] + 16.0 / 3.0).abs() < 1e-3, "{}", out[200]);
    }

    #[test]
    fn bump_matches_oracle_off_centre() {
        let g = |l: f64| (1.0 - l * l).max(0.0).powi(3);
        let (v, d) = sample(g, -1.5, 1.5, 601);
        let out = filter_row(&v, d);
        // Node 400 is lambda = 0.5.
        let want = oracle(g, -1.0, 1.0, 0.5);
        assert!((out[400] - want).abs() < 1e-3 * want.abs(), "{} vs {want}", out[400]);
    }

    #[test]
    fn odd_data_give_zero_at_the_centre() {
        let g = |l: f64| l * (-l * l).exp();
        let (v, d) = sample(g, -8.0, 8.0, 801);
        let out = filter_row(&v, d);
        assert!(out[400].abs() < 1e-9);
        assert!(oracle(g, -8.0, 8.0, 0.0).abs() < 1e-9);
    }

    #[test]
    fn gaussian_converges_at_second_order() {
        // f.p.∫ e^{-λ²}/λ² dλ = -2 sqrt(π).
        let want = -2.0 * std::f64::consts::PI.sqrt();
        let err = |n: usize| {
            let (v, d) = sample(|l| (-l * l).exp(), -7.0, 7.0, n);
            (filter_row(&v, d)[n / 2] - want).abs()
        };
        let (e1, e2) = (err(201), err(401));
        assert!(e2 < 1e-2 && e1 / e2 > 3.5, "{e1} {e2}");
    }

    #[test]
    fn curvature_at_zero_of_a_gaussian() {
        // G''(0) = p.v.∫ g'''(λ)/λ dλ = ∫ (12 - 8λ²) e^{-λ²} dλ = 8 sqrt(π).
        let n = 400;
        let d = 14.0 / n as f64;
        let g: Vec<f64> = (0..n)
            .map(|i| {
                let l = (i as f64 + 0.5 - n as f64 / 2.0) * d;
                (-l * l).exp()
            })
            .collect();
        let want = 8.0 * std::f64::consts::PI.sqrt();
        let got = second_derivative_at_zero(&g, d);
        assert!((got - want).abs() < 1e-2 * want, "{got} vs {want}");
    }

    #[test]
    fn zero_in_zero_out() {
        assert!(filter_row(&[0.0; 16], 0.1).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn interpolation_is_exact_for_cubics() {
        let axis = LambdaAxis::new(-1.0, 2.0, 13).unwrap();
        let p = |l: f64| 1.0 - 2.0 * l + 0.5 * l * l * l;
        let f = Filtered {
            lambda: axis,
            n_phi: 1,
            values: (0..13).map(|i| p(axis.value(i))).collect(),
            curvature_at_zero: None,
        };
        for l in [-1.0, -0.93, 0.1, 1.77, 2.0] {
            assert!((f.interpolate(0, l).unwrap() - p(l)).abs() < 1e-12);
        }
        assert!(f.interpolate(0, 2.01).is_none());
        assert!(f.interpolate(0, -1.0 - 1e-12).is_some());
    }
}
