//! Sampling grids and scalar fields on them.

use crate::error::{Error, Result};
use crate::geometry::Point;

/// A uniform grid of `nx × ny` nodes starting at `(x0, y0)` with spacing `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub h: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, x0: f64, y0: f64, h: f64) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::param("grid dimensions must be positive"));
        }
        if !(h > 0.0 && h.is_finite() && x0.is_finite() && y0.is_finite()) {
            return Err(Error::param("grid origin must be finite and spacing positive"));
        }
        Ok(Grid { nx, ny, x0, y0, h })
    }

    /// `n × n` nodes covering `[-half_width, half_width]²`, corners included.
    pub fn square(n: usize, half_width: f64) -> Self {
        assert!(n >= 2, "a square grid needs at least two nodes per side");
        let h = 2.0 * half_width / (n - 1) as f64;
        Grid {
            nx: n,
            ny: n,
            x0: -half_width,
            y0: -half_width,
            h,
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node `(i, j)`: column `i`, row `j`.
    #[inline]
    pub fn point(&self, i: usize, j: usize) -> Point {
        Point::new(self.x0 + i as f64 * self.h, self.y0 + j as f64 * self.h)
    }
}

/// Values on a [`Grid`], stored row by row (`values[j * nx + i]`).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        ScalarField {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(Point) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                values.push(f(grid.point(i, j)));
            }
        }
        ScalarField { grid, values }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.nx + i]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Largest pointwise difference `max |a - b|`.
pub fn linf(a: &ScalarField, b: &ScalarField) -> f64 {
    assert_eq!(a.grid, b.grid, "fields live on different grids");
    a.values
        .iter()
        .zip(&b.values)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Relative L2 error `‖a - b‖ / ‖b‖` of `a` against the reference `b`.
pub fn rel_l2(a: &ScalarField, b: &ScalarField) -> f64 {
    assert_eq!(a.grid, b.grid, "fields live on different grids");
    let (mut num, mut den) = (0.0, 0.0);
    for (x, y) in a.values.iter().zip(&b.values) {
        num += (x - y) * (x - y);
        den += y * y;
    }
    (num / den).sqrt()
}
