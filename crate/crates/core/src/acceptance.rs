//! Executable acceptance criteria.
//!
//! Each criterion runs end to end and reports a [`CriterionResult`]; the
//! tolerances are fixed here. [`run`] executes the whole suite; with
//! `fast = true` it runs a quick subset (criterion 5 for the Radon family
//! only, criterion 6 skipped).

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::field::{rel_l2, Grid};
use crate::geometry::{Geometry, Point};
use crate::inversion::{reconstruct_with, InvertOptions};
use crate::phantom::{Component, Phantom};
use crate::quadrature::{integrate, Tolerance};
use crate::transform::{forward, ForwardModel, SinogramSpec};
use crate::trigpoly::{nucleus_check, residue_integral, PvOptions, TrigPoly};

/// Outcome of one criterion.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {} ({:.1} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

fn timed(id: u32, name: &'static str, body: impl FnOnce() -> Result<(bool, String)>) -> CriterionResult {
    let t = Instant::now();
    let (passed, detail) = match body() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id,
        name,
        passed,
        detail,
        seconds: t.elapsed().as_secs_f64(),
    }
}

fn geo(s: &str) -> Geometry {
    Geometry::parse(s).expect("built-in descriptor")
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniform random point of the support disc (shrunk by `shrink`) inside
/// the chart.
fn random_point(rng: &mut ChaCha8Rng, g: &Geometry, shrink: f64) -> Point {
    let r = shrink * g.support_radius();
    loop {
        let p = Point::new(rng.gen_range(-r..r), rng.gen_range(-r..r));
        if p.norm() < r && g.contains(p) {
            return p;
        }
    }
}

pub const NUCLEUS_PAIRS: usize = 100;
pub const NUCLEUS_TIME_LIMIT: f64 = 120.0;

/// Criterion 1: the nucleus vanishes off the diagonal for every family.
pub fn nucleus_vanishing() -> CriterionResult {
    timed(1, "nucleus vanishing", || {
        let t = Instant::now();
        let families = [
            "radon:support=1",
            "funk:support=1.5",
            "hgeodesic:support=0.9",
            "equidistant:support=0.9",
            "ellipse:e1=1.2,e2=0.8,support=0.75",
            "hyperbola:eps=2,support=1.5",
            "cormack:k=2,support=1",
            "cormack:k=3,support=1",
            "parabola:support=1",
        ];
        let opts = PvOptions::default();
        let mut rng = rng(1);
        let mut worst = (0.0, String::new());
        let mut failures = Vec::new();
        for s in families {
            let g = geo(s);
            let mut n = 0;
            while n < NUCLEUS_PAIRS {
                let x = random_point(&mut rng, &g, 1.0);
                let y = random_point(&mut rng, &g, 1.0);
                if (x - y).norm() < 1e-3 * g.support_radius() {
                    continue;
                }
                n += 1;
                let r = nucleus_check(&g, x, y, &opts)?;
                let ratio = r.value.abs() / r.tolerance;
                if ratio > worst.0 {
                    worst = (ratio, s.to_string());
                }
                if !r.passed {
                    failures.push(format!("{s} x={x:?} y={y:?} N={:e}", r.value));
                }
            }
        }
        let secs = t.elapsed().as_secs_f64();
        let detail = format!(
            "{} families x {NUCLEUS_PAIRS} pairs, max |N|/tol = {:.2e} ({}), {} failures, {secs:.1} s (limit {NUCLEUS_TIME_LIMIT} s){}",
            families.len(),
            worst.0,
            worst.1,
            failures.len(),
            failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        );
        Ok((failures.is_empty() && secs <= NUCLEUS_TIME_LIMIT, detail))
    })
}

pub const DCOEF_TOLERANCE: f64 = 1e-8;

/// Criterion 2: closed-form `D(x)` agrees with its defining quadrature.
pub fn normalizer_identity() -> CriterionResult {
    timed(2, "normalizer identity", || {
        let families = [
            "radon:support=1",
            "funk:support=1.5",
            "hgeodesic:support=0.9",
            "equidistant:support=0.9",
            "ellipse:e1=1,e2=1,support=0.7",
            "ellipse:e1=1.2,e2=0.8,support=0.75",
            "hyperbola:eps=2,support=1.5",
            "parabola:support=1",
            "cormack:k=2,support=1",
            "cormack:k=3,support=1",
        ];
        let mut rng = rng(2);
        let mut worst = (0.0_f64, String::new());
        for s in families {
            let g = geo(s);
            for _ in 0..20 {
                let x = random_point(&mut rng, &g, 1.0);
                let a = g.dcoef(x)?;
                let b = g.dcoef_quadrature(x, 256)?;
                let rel = (a - b).abs() / b.abs();
                if rel > worst.0 || worst.1.is_empty() {
                    worst = (rel, format!("{s} at ({:.3}, {:.3})", x.x, x.y));
                }
            }
        }
        Ok((
            worst.0 <= DCOEF_TOLERANCE,
            format!("{} families x 20 points, max rel diff {:.2e} at {}", families.len(), worst.0, worst.1),
        ))
    })
}

pub const RESIDUE_TOLERANCE: f64 = 1e-10;

/// A trigonometric polynomial of the given order with a dominant constant
/// term of random sign, so it has no real zeros.
fn zero_free(rng: &mut ChaCha8Rng, order: usize) -> TrigPoly {
    let a: Vec<f64> = (0..order).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b: Vec<f64> = (0..order).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let sum: f64 = a.iter().chain(&b).map(|v| v.abs()).sum();
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let c = sign * sum * rng.gen_range(1.05..3.0) + sign * 1e-3;
    let mut ca = vec![c];
    ca.extend(a);
    TrigPoly::new(ca, b).expect("finite coefficients")
}

/// Criterion 3: the residue formula against adaptive quadrature.
pub fn residue_formula() -> CriterionResult {
    timed(3, "residue formula", || {
        let tol = Tolerance {
            abs: 0.0,
            rel: 1e-14,
            max_intervals: 50_000,
        };
        let rel = |s: &TrigPoly, t: &TrigPoly| -> Result<f64> {
            let a = residue_integral(s, t)?;
            let b = integrate(|phi| s.eval(phi) / t.eval(phi), &[0.0, PI, TAU], tol)?.value;
            Ok((a - b).abs() / b.abs())
        };
        let mut rng = rng(3);
        let mut worst = 0.0_f64;
        for _ in 0..50 {
            let nt = rng.gen_range(1..=4);
            let ns = rng.gen_range(0..=nt);
            let t = zero_free(&mut rng, nt);
            let s = zero_free(&mut rng, ns);
            worst = worst.max(rel(&s, &t)?);
        }
        // ∫ dφ / (1 + y² cos² φ) = 2π / sqrt(1 + y²).
        let mut exact = 0.0_f64;
        for y in [0.5_f64, 1.0, 2.0] {
            let y2 = y * y;
            let t = TrigPoly::new(vec![1.0 + y2 / 2.0, 0.0, y2 / 2.0], vec![0.0; 2])?;
            let a = residue_integral(&TrigPoly::constant(1.0), &t)?;
            let want = TAU / (1.0 + y2).sqrt();
            exact = exact.max((a - want).abs() / want);
        }
        Ok((
            worst <= RESIDUE_TOLERANCE && exact <= RESIDUE_TOLERANCE,
            format!("50 random pairs: max rel err {worst:.2e}; closed-form instances: {exact:.2e}"),
        ))
    })
}

pub const CHORD_TOLERANCE: f64 = 1e-6;
pub const PROJECTION_TOLERANCE: f64 = 1e-8;

/// Criterion 4: forward values against closed forms for straight lines.
pub fn forward_exactness() -> CriterionResult {
    timed(4, "forward exactness", || {
        let g = geo("radon:support=1");
        let mut rng = rng(4);
        let disc = Phantom::new(vec![Component::Disc {
            center: Point::zeros(),
            r: 1.0,
            amp: 1.0,
            w: 0.0,
        }])?;
        let sigma = 0.2;
        let gauss = Phantom::gaussian(Point::zeros(), sigma, 1.0)?;
        let spec = SinogramSpec::new(513, 360);
        let disc_model = ForwardModel::new(&g, &disc, &spec)?;
        let gauss_model = ForwardModel::new(&g, &gauss, &spec)?;
        let (mut chord, mut proj) = (0.0_f64, 0.0_f64);
        for _ in 0..50 {
            let lambda: f64 = rng.gen_range(-0.999..0.999);
            let phi = rng.gen_range(0.0..TAU);
            let want = 2.0 * (1.0 - lambda * lambda).sqrt();
            chord = chord.max((disc_model.value(lambda, phi)? - want).abs());
            let want = sigma * TAU.sqrt() * (-lambda * lambda / (2.0 * sigma * sigma)).exp();
            proj = proj.max((gauss_model.value(lambda, phi)? - want).abs());
        }
        Ok((
            chord <= CHORD_TOLERANCE && proj <= PROJECTION_TOLERANCE,
            format!("disc chords: max err {chord:.2e}; Gaussian projections: max err {proj:.2e}"),
        ))
    })
}

/// Round-trip setting for one family.
struct RoundTrip {
    descriptor: &'static str,
    limit: f64,
}

const ROUND_TRIPS: [RoundTrip; 8] = [
    RoundTrip { descriptor: "radon:support=1", limit: 0.03 },
    RoundTrip { descriptor: "ellipse:e1=1,e2=1,support=0.7", limit: 0.03 },
    RoundTrip { descriptor: "hyperbola:eps=2,support=1", limit: 0.03 },
    RoundTrip { descriptor: "equidistant:support=0.7", limit: 0.05 },
    RoundTrip { descriptor: "hgeodesic:support=0.7", limit: 0.05 },
    RoundTrip { descriptor: "parabola:support=1", limit: 0.05 },
    RoundTrip { descriptor: "cormack:k=2,support=1", limit: 0.05 },
    RoundTrip { descriptor: "funk:support=1", limit: 0.05 },
];

pub const ROUND_TRIP_SECONDS: f64 = 90.0;

/// Forward-project the centred Gaussian of width `0.15 · support` and
/// reconstruct it; returns `rel_l2`.
fn round_trip(g: &Geometry, n_lambda: usize, n_phi: usize, n_grid: usize, workers: Option<usize>) -> Result<f64> {
    let ph = Phantom::gaussian(Point::zeros(), 0.15 * g.support_radius(), 1.0)?;
    let mut spec = SinogramSpec::new(n_lambda, n_phi);
    spec.workers = workers;
    let sino = forward(g, &ph, &spec)?;
    let grid = Grid::square(n_grid, g.support_radius());
    let rec = reconstruct_with(&sino, &grid, &InvertOptions { workers })?;
    Ok(rel_l2(&rec, &ph.sample(&grid)))
}

/// Criterion 5: round-trip accuracy and time, single worker. With
/// `radon_only`, just the first family.
pub fn round_trip_reconstruction(radon_only: bool) -> CriterionResult {
    timed(5, "round-trip reconstruction", || {
        let mut ok = true;
        let mut parts = Vec::new();
        let cases = if radon_only { &ROUND_TRIPS[..1] } else { &ROUND_TRIPS[..] };
        for c in cases {
            let g = geo(c.descriptor);
            let t = Instant::now();
            let r = round_trip(&g, 513, 360, 129, Some(1));
            let secs = t.elapsed().as_secs_f64();
            match r {
                Ok(err) => {
                    let pass = err <= c.limit && secs <= ROUND_TRIP_SECONDS;
                    ok &= pass;
                    parts.push(format!(
                        "{} {}: {err:.2e} (limit {}) {secs:.0} s",
                        if pass { "ok" } else { "FAILED" },
                        g.tag(),
                        c.limit
                    ));
                }
                Err(e) => {
                    ok = false;
                    parts.push(format!("FAILED {}: {e}", g.tag()));
                }
            }
        }
        Ok((ok, parts.join("; ")))
    })
}

/// Criterion 6: errors do not grow under refinement.
pub fn convergence() -> CriterionResult {
    timed(6, "convergence", || {
        let mut ok = true;
        let mut parts = Vec::new();
        for s in ["radon:support=1", "ellipse:e1=1,e2=1,support=0.7"] {
            let g = geo(s);
            let errs = [(257, 180, 65), (513, 360, 129), (1025, 720, 257)]
                .iter()
                .map(|&(l, p, n)| round_trip(&g, l, p, n, None))
                .collect::<Result<Vec<f64>>>()?;
            let mono = errs.windows(2).all(|w| w[1] <= w[0]);
            ok &= mono;
            parts.push(format!(
                "{}: {:.2e} -> {:.2e} -> {:.2e}",
                g.tag(),
                errs[0],
                errs[1],
                errs[2]
            ));
        }
        Ok((ok, parts.join("; ")))
    })
}

pub const HALF_RANGE_TOLERANCE: f64 = 1e-6;

/// Criterion 7: half-range data with symmetry doubling reconstruct the same
/// field as full-range data.
pub fn half_range_consistency() -> CriterionResult {
    timed(7, "half-range consistency", || {
        let g = geo("radon:support=1");
        let ph = Phantom::gaussian(Point::zeros(), 0.15, 1.0)?;
        let grid = Grid::square(65, 1.0);
        let full = forward(&g, &ph, &SinogramSpec::new(257, 360))?;
        let half = forward(&g, &ph, &SinogramSpec::new(257, 180).half_range())?;
        let opts = InvertOptions::default();
        let a = reconstruct_with(&full, &grid, &opts)?;
        let b = reconstruct_with(&half, &grid, &opts)?;
        let d = rel_l2(&b, &a);
        let truth = rel_l2(&a, &ph.sample(&grid));
        Ok((
            d <= HALF_RANGE_TOLERANCE && truth < 0.03,
            format!("rel_l2(half, full) = {d:.2e}; full vs phantom {truth:.2e}"),
        ))
    })
}

/// Criterion 8: FKR1 and F64GRID files read back bit-identically.
pub fn format_round_trip() -> CriterionResult {
    timed(8, "format round-trip", || {
        use crate::io::{read_field, read_sinogram, write_field, write_sinogram};
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<u64>>();
        let g = geo("ellipse:e1=1.2,e2=0.8,support=0.7");
        let ph = Phantom::parse("gauss:0.1,-0.2,0.1,1;disc:-0.2,0.1,0.3,0.5,0.05")?;
        let sino = forward(&g, &ph, &SinogramSpec::new(65, 48))?;
        let mut buf = Vec::new();
        write_sinogram(&mut buf, &sino)?;
        let back = read_sinogram(&buf[..])?;
        let sino_ok = back.geometry == sino.geometry
            && back.kind == sino.kind
            && back.n_phi == sino.n_phi
            && back.phi_range == sino.phi_range
            && bits(&[back.lambda.min, back.lambda.max]) == bits(&[sino.lambda.min, sino.lambda.max])
            && bits(&back.data) == bits(&sino.data);

        let rec = crate::field::ScalarField::from_fn(Grid::new(17, 13, -0.7, -1.0 / 3.0, 0.0875)?, |x| {
            ph.eval(x) / 3.0
        });
        let mut buf = Vec::new();
        write_field(&mut buf, &rec)?;
        let back = read_field(&buf[..])?;
        let field_ok = back.grid == rec.grid && bits(&back.values) == bits(&rec.values);
        if !sino_ok || !field_ok {
            return Ok((false, format!("FKR1 exact: {sino_ok}, F64GRID exact: {field_ok}")));
        }
        Ok((true, format!("FKR1 {}x{} and F64GRID 17x13 bit-identical", sino.lambda.n, sino.n_phi)))
    })
}

/// Run the suite in criterion order.
pub fn run(fast: bool) -> Vec<CriterionResult> {
    run_with(fast, |_| {})
}

/// Like [`run`], calling `report` as each criterion finishes.
pub fn run_with(fast: bool, mut report: impl FnMut(&CriterionResult)) -> Vec<CriterionResult> {
    let mut out = Vec::new();
    let mut push = |r: CriterionResult| {
        report(&r);
        out.push(r);
    };
    push(nucleus_vanishing());
    push(normalizer_identity());
    push(residue_formula());
    push(forward_exactness());
    push(round_trip_reconstruction(fast));
    if !fast {
        push(convergence());
    }
    push(half_range_consistency());
    push(format_round_trip());
    out
}
