use super::*;
use crate::phantom::Phantom;
use crate::transform::{forward, LambdaAxis, PhiRange, SinogramSpec};

fn geo(s: &str) -> Geometry {
    Geometry::parse(s).unwrap()
}

fn round_trip(g: &str, ph: &str, n_lambda: usize, n_phi: usize, n_grid: usize) -> (f64, ScalarField, ScalarField) {
    let g = geo(g);
    let ph = Phantom::parse(ph).unwrap();
    let sino = forward(&g, &ph, &SinogramSpec::new(n_lambda, n_phi)).unwrap();
    let grid = Grid::square(n_grid, g.support_radius());
    let rec = reconstruct(&sino, &grid).unwrap();
    let truth = ph.sample(&grid);
    (rel_l2(&rec, &truth), rec, truth)
}

#[test]
fn radon_round_trip_small() {
    let (err, _, _) = round_trip("radon:support=1", "gauss:0.1,-0.1,0.15,1", 129, 90, 33);
    assert!(err < 0.05, "{err}");
}

#[test]
fn ellipse_round_trip_small() {
    let (err, _, _) = round_trip("ellipse:e1=1,e2=1,support=0.7", "gauss:0,0,0.105,1", 129, 90, 33);
    assert!(err < 0.05, "{err}");
}

#[test]
fn radon_reconstruction_conserves_mass() {
    let (_, rec, truth) = round_trip("radon:support=1", "gauss:0,0,0.15,1", 257, 180, 65);
    let (a, b): (f64, f64) = (rec.values.iter().sum(), truth.values.iter().sum());
    assert!((a - b).abs() < 0.01 * b, "{a} vs {b}");
}

#[test]
fn zero_data_give_zero_field() {
    let g = geo("hyperbola:eps=2,support=1");
    let axis = LambdaAxis::new(-3.0, 3.0, 33).unwrap();
    let s = Sinogram::new(g, DataKind::Mphi, axis, 16, PhiRange::Full, vec![0.0; 33 * 16]).unwrap();
    let rec = reconstruct(&s, &Grid::square(9, 1.0)).unwrap();
    assert!(rec.values.iter().all(|&v| v == 0.0));
}

#[test]
fn reconstruction_is_linear_in_the_data() {
    let g = geo("radon:support=1");
    let a = forward(&g, &Phantom::parse("gauss:0.2,0,0.1,1").unwrap(), &SinogramSpec::new(65, 40)).unwrap();
    let b = forward(&g, &Phantom::parse("gauss:-0.1,0.3,0.11,2").unwrap(), &SinogramSpec::new(65, 40)).unwrap();
    let mut ab = a.clone();
    for (v, w) in ab.data.iter_mut().zip(&b.data) {
        *v = 2.0 * *v - 0.5 * w;
    }
    let grid = Grid::square(17, 1.0);
    let (ra, rb, rab) = (
        reconstruct(&a, &grid).unwrap(),
        reconstruct(&b, &grid).unwrap(),
        reconstruct(&ab, &grid).unwrap(),
    );
    for k in 0..grid.len() {
        let want = 2.0 * ra.values[k] - 0.5 * rb.values[k];
        assert!((rab.values[k] - want).abs() < 1e-12 * (1.0 + want.abs()));
    }
}

#[test]
fn half_range_data_reconstruct_like_full_range() {
    let g = geo("radon:support=1");
    let ph = Phantom::parse("gauss:0.1,0.2,0.12,1").unwrap();
    let full = forward(&g, &ph, &SinogramSpec::new(129, 60)).unwrap();
    let half = forward(&g, &ph, &SinogramSpec::new(129, 30).half_range()).unwrap();
    let grid = Grid::square(33, 1.0);
    let (rf, rh) = (reconstruct(&full, &grid).unwrap(), reconstruct(&half, &grid).unwrap());
    assert!(rel_l2(&rh, &rf) < 1e-6);
}

#[test]
fn radon_riemann_path_is_the_plain_path() {
    let g = geo("radon:support=1");
    let ph = Phantom::parse("gauss:0,0.1,0.15,1").unwrap();
    let spec = SinogramSpec::new(65, 40);
    let m = forward(&g, &ph, &spec).unwrap();
    let r = forward(&g, &ph, &spec.clone().kind(DataKind::Riemann)).unwrap();
    let grid = Grid::square(17, 1.0);
    let (a, b) = (reconstruct(&m, &grid).unwrap(), reconstruct_riemann(&r, &grid).unwrap());
    assert!(rel_l2(&b, &a) < 1e-12);
}

#[test]
fn ellipse_riemann_round_trip() {
    let g = geo("ellipse:e1=1,e2=1,support=0.7");
    let ph = Phantom::parse("gauss:0.05,0,0.105,1").unwrap();
    let r = forward(&g, &ph, &SinogramSpec::new(129, 90).kind(DataKind::Riemann)).unwrap();
    let grid = Grid::square(33, 0.7);
    let rec = reconstruct_riemann(&r, &grid).unwrap();
    let err = rel_l2(&rec, &ph.sample(&grid));
    assert!(err < 0.05, "{err}");
}

#[test]
fn hyperbola_arc_length_data_are_refused() {
    let g = geo("hyperbola:eps=2,support=1");
    let axis = LambdaAxis::new(-3.0, 3.0, 9).unwrap();
    let s = Sinogram::new(g, DataKind::Riemann, axis, 4, PhiRange::Full, vec![0.0; 36]).unwrap();
    assert!(matches!(reconstruct(&s, &Grid::square(5, 1.0)), Err(Error::Unsupported(_))));
}

#[test]
fn ellipse_support_condition_is_enforced() {
    let g = geo("ellipse:e1=1,e2=1,support=1.2");
    let axis = LambdaAxis::new(0.01, 4.0, 9).unwrap();
    let s = Sinogram::new(g, DataKind::Mphi, axis, 4, PhiRange::Full, vec![0.0; 36]).unwrap();
    assert!(matches!(reconstruct(&s, &Grid::square(5, 1.0)), Err(Error::Precondition(_))));
}

#[test]
fn narrow_lambda_axis_is_a_coverage_error() {
    let g = geo("radon:support=1");
    let ph = Phantom::parse("gauss:0,0,0.05,1").unwrap();
    let mut spec = SinogramSpec::new(65, 8);
    spec.lambda_bounds = Some((-0.5, 0.5));
    let s = forward(&g, &ph, &spec).unwrap();
    let e = reconstruct(&s, &Grid::square(9, 1.0)).unwrap_err();
    assert!(matches!(e, Error::Coverage { .. }), "{e}");
    assert!(e.is_numerical());
}

#[test]
fn undecayed_data_are_a_windowing_error() {
    let g = geo("radon:support=1");
    let ph = Phantom::parse("gauss:0,0,0.5,1").unwrap();
    let s = forward(&g, &ph, &SinogramSpec::new(33, 8)).unwrap();
    assert!(matches!(
        reconstruct(&s, &Grid::square(9, 1.0)),
        Err(Error::Windowing { .. })
    ));
}

#[test]
fn pixels_outside_the_support_are_zero() {
    let (_, rec, _) = round_trip("hgeodesic:support=0.5", "gauss:0,0,0.075,1", 65, 40, 17);
    let g = geo("hgeodesic:support=0.5");
    for j in 0..17 {
        for i in 0..17 {
            if rec.grid.point(i, j).norm() > g.support_radius() {
                assert_eq!(rec.get(i, j), 0.0);
            }
        }
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let g = geo("radon:support=1");
    let s = forward(&g, &Phantom::parse("gauss:0,0,0.15,1").unwrap(), &SinogramSpec::new(65, 20)).unwrap();
    let grid = Grid::square(17, 1.0);
    let a = reconstruct_with(&s, &grid, &InvertOptions { workers: Some(1) }).unwrap();
    let b = reconstruct_with(&s, &grid, &InvertOptions { workers: Some(4) }).unwrap();
    assert_eq!(a, b);
}

