//! Generalized Funk–Radon transforms on families of plane curves.
//!
//! A family of curves is given by a function `ψ(x, φ)` on a planar chart; the
//! curve with parameters `(λ, φ)` is a level set of `ψ(·, φ)`. This crate
//! provides the forward map
//!
//! ```text
//! M_φ f(λ, φ) = ∫_{curve(λ,φ)} f ds / |∇ψ|
//! ```
//!
//! for eight families (straight lines, great circles, hyperbolic geodesic
//! circles, equidistants, circles centred on an ellipse, hyperbolas,
//! parabolas and Cormack's `z^k` curves) and its exact inversion
//!
//! ```text
//! f(x) = -1/(4π² D(x)) ∫₀^{2π} ∫ M_φ f(λ, φ) / (λ - λ(x, φ))² dλ dφ,
//! ```
//!
//! where the inner integral is a Hadamard finite part and
//! `D(x) = (1/2π) ∫ dφ / |∇ψ|²`.
//!
//! The pieces:
//!
//! * [`geometry`] — the families, their level functions, gradients, `D(x)`
//!   and the weights converting arc-length data;
//! * [`trigpoly`] — trigonometric polynomials, their roots, and the
//!   singular integrals that decide whether the inversion is exact;
//! * [`phantom`] — analytic test fields;
//! * [`transform`] — sinograms and the forward model;
//! * [`inversion`] — filtering and backprojection;
//! * [`io`] — the text and image file formats;
//! * [`acceptance`] — executable acceptance criteria.
//!
//! ```
//! use funkradon::{geometry::Geometry, phantom::Phantom, transform, inversion};
//!
//! let geo = Geometry::parse("radon:support=1")?;
//! let ph = Phantom::parse("gauss:0,0,0.15,1")?;
//! let sino = transform::forward(&geo, &ph, &transform::SinogramSpec::new(129, 90))?;
//! let grid = inversion::Grid::square(33, geo.support_radius());
//! let rec = inversion::reconstruct(&sino, &grid)?;
//! let err = inversion::rel_l2(&rec, &ph.sample(&grid));
//! assert!(err < 0.05, "{err}");
//! # Ok::<(), funkradon::Error>(())
//! ```

// `!(a > b)` is used on purpose: it is also true for NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod error;
pub mod geometry;
pub mod inversion;
pub mod io;
pub mod field;
pub mod phantom;
pub mod quadrature;
pub mod transform;
pub mod trigpoly;

pub use error::{Error, Result};
pub use geometry::{Family, Geometry, Point};
pub use phantom::Phantom;
