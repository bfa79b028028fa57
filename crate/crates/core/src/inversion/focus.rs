//! Removing the singularity of Cormack data at `λ = 0`.
//!
//! Near the origin the Cormack families with `k ≥ 2` see the plane through
//! `w = z^k`: the data are plane Radon data of
//! `H(w) = f(x) / (k² |w|^{2-2/k})`. Unless `f(0) = 0`, `H` blows up at
//! `w = 0` and the data are singular at `λ = 0` (like `ln|λ|` for `k = 2`,
//! like `|λ|^{2/k - 1}` above). Uniform samples cannot resolve that; the
//! filter smears the error over the whole image, where `1/D` amplifies it.
//!
//! So the singular part is taken out first. A radial Gaussian `r` with
//! `r(0) = 1` has data given by a one-dimensional Abel integral. Its
//! amplitude `a` is fitted to the samples next to `λ = 0`, the remainder
//! `g - a g_r` (data of a field vanishing at the origin) is inverted, and
//! `a r` is added back.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::geometry::{Family, Point};
use crate::quadrature::{integrate, Tolerance};
use crate::transform::{DataKind, Sinogram};

/// Width of the reference Gaussian, relative to the support radius.
const REFERENCE_WIDTH: f64 = 0.12;
/// Samples on each side of `λ = 0` used to fit the amplitude.
const FIT_NODES: usize = 6;

pub(crate) struct Subtracted {
    pub remainder: Sinogram,
    pub amplitude: f64,
    width: f64,
}

impl Subtracted {
    /// The part taken out of the data, as a field.
    pub fn field(&self, x: Point) -> f64 {
        self.amplitude * (-x.norm_squared() / (2.0 * self.width * self.width)).exp()
    }
}

/// Data of the reference Gaussian of width `s` at level `λ` (infinite at 0).
pub(crate) fn reference_data(k: u32, s: f64, lambda: f64) -> Result<f64> {
    let l = lambda.abs();
    if l == 0.0 {
        return Ok(f64::INFINITY);
    }
    let kf = k as f64;
    let h = |rho: f64| (-rho.powf(2.0 / kf) / (2.0 * s * s)).exp() / (kf * kf * rho.powf(2.0 - 2.0 / kf));
    // H is below e^{-50} beyond rho_max.
    let rho_max = (100.0 * s * s).powf(kf / 2.0);
    if l >= rho_max {
        return Ok(0.0);
    }
    let u_max = (rho_max / l).acosh();
    let v = integrate(|u| h(l * u.cosh()) * u.cosh(), &[0.0, u_max], Tolerance::default())?;
    Ok(2.0 * l * v.value)
}

/// Terms besides the reference that the data of a smooth field may contain
/// near `λ = 0`: a polynomial, and the singular terms coming from the
/// `|x|^{2m}` part of the field, `|λ|^p` with `p = (2m + 2)/k - 1` (times
/// `ln|λ|` when `p` is even, absent when `p` is odd).
fn regular_basis(k: u32) -> Vec<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
    let mut b: Vec<Box<dyn Fn(f64) -> f64 + Send + Sync>> = (0..=4).map(|n| Box::new(move |l: f64| l.powi(n)) as Box<_>).collect();
    for m in 1..=4u32 {
        let p = (2 * m + 2) as f64 / k as f64 - 1.0;
        if p <= 0.0 {
            continue;
        }
        if p.fract() == 0.0 {
            if p as u32 % 2 == 0 {
                b.push(Box::new(move |l: f64| if l == 0.0 { 0.0 } else { l.powf(p) * l.abs().ln() }));
            }
        } else {
            b.push(Box::new(move |l: f64| l.abs().powf(p)));
        }
    }
    b
}

/// Least-squares coefficients of `y` in the columns `cols`.
fn fit(cols: &[Vec<f64>], y: &[f64]) -> Option<DVector<f64>> {
    let m = DMatrix::from_fn(y.len(), cols.len(), |r, c| cols[c][r]);
    m.svd(true, true).solve(&DVector::from_column_slice(y), 1e-14).ok()
}

/// Split Cormack data (`k ≥ 2`) into a reference part and a remainder.
/// `None` for other families, or when the axis has too few samples around
/// `λ = 0` to fit.
pub(crate) fn subtract(sino: &Sinogram) -> Result<Option<Subtracted>> {
    let Family::Cormack { k } = sino.geometry.family() else {
        return Ok(None);
    };
    if k < 2 || sino.kind != DataKind::Mphi {
        return Ok(None);
    }
    let s = sino.to_full_range()?;
    let ax = s.lambda;
    let d = ax.step();
    let n = ax.n;
    let zero = (0..n).find(|&i| ax.value(i).abs() <= 1e-9 * d);
    let window: Vec<usize> = (0..n)
        .filter(|&i| Some(i) != zero && ax.value(i).abs() <= (FIT_NODES as f64 + 0.5) * d)
        .collect();
    let basis = regular_basis(k);
    if window.len() < basis.len() + 3 {
        return Ok(None);
    }
    let width = REFERENCE_WIDTH * s.geometry.support_radius();
    let gref: Vec<f64> = (0..n)
        .map(|i| reference_data(k, width, ax.value(i)))
        .collect::<Result<_>>()?;
    // Fit on λ / W, so that the columns have comparable size.
    let scale = (FIT_NODES as f64 + 0.5) * d;
    let regular: Vec<Vec<f64>> = basis
        .iter()
        .map(|b| window.iter().map(|&i| b(ax.value(i) / scale)).collect())
        .collect();
    let mut cols = vec![window.iter().map(|&i| gref[i]).collect::<Vec<f64>>()];
    cols.extend(regular.iter().cloned());
    let mut amplitude = 0.0;
    for j in 0..s.n_phi {
        let y: Vec<f64> = window.iter().map(|&i| s.get(i, j)).collect();
        let Some(c) = fit(&cols, &y) else {
            return Ok(None);
        };
        amplitude += c[0];
    }
    amplitude /= s.n_phi as f64;

    let mut data = s.data.clone();
    for j in 0..s.n_phi {
        for i in 0..n {
            if Some(i) != zero {
                data[j * n + i] -= amplitude * gref[i];
            }
        }
        // The sample through the origin is meaningless when f(0) != 0; the
        // remainder is regular there and takes its fitted value.
        if let Some(z) = zero {
            let y: Vec<f64> = window.iter().map(|&i| data[j * n + i]).collect();
            let Some(c) = fit(&regular, &y) else {
                return Ok(None);
            };
            data[j * n + z] = c[0];
        }
    }
    let remainder = Sinogram::new(s.geometry, s.kind, ax, s.n_phi, s.phi_range, data)?;
    Ok(Some(Subtracted {
        remainder,
        amplitude,
        width,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_data_match_bessel_closed_form_for_k2() {
        // For k = 2 the Abel integral is K₀(|λ| / 2s²) / 2; values from a
        // reference implementation of K₀.
        for (l, want) in [
            (0.01, 0.6199245515979864),
            (-0.05, 0.07906036113648945),
            (0.2, 0.00022539962991414747),
        ] {
            let got = reference_data(2, 0.12, l).unwrap();
            assert!((got - want).abs() < 1e-12 * want.max(1e-3), "{l}: {got} vs {want}");
        }
    }

    #[test]
    fn reference_data_decay_to_zero() {
        assert_eq!(reference_data(3, 0.12, 2.0).unwrap(), 0.0);
        assert!(reference_data(3, 0.12, 0.0).unwrap().is_infinite());
    }
}
