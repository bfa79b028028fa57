use std::f64::consts::PI;

use super::*;

fn g(s: &str) -> Geometry {
    Geometry::parse(s).unwrap()
}

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

fn all() -> Vec<Geometry> {
    [
        "radon:support=1",
        "funk:support=1.5",
        "hgeodesic:support=0.7",
        "equidistant:support=0.7",
        "ellipse:e1=1.2,e2=0.8,support=0.7",
        "ellipse:e1=1,e2=1,support=0.7",
        "hyperbola:eps=2,support=1.5",
        "parabola:support=1",
        "cormack:k=2,support=1",
        "cormack:k=3,support=1",
    ]
    .iter()
    .map(|s| g(s))
    .collect()
}

#[test]
fn psi_examples() {
    assert_eq!(g("radon").psi(p(1.0, 0.0), 0.0).unwrap(), -1.0);
    assert!((g("ellipse:e1=1,e2=1,support=0.5").psi(p(0.0, 0.0), 1.234).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(g("hyperbola:eps=2").psi(p(1.0, 0.0), 0.0).unwrap(), 1.0);
    assert!((g("cormack:k=2").psi(p(1.0, 0.0), 0.0).unwrap() + 1.0).abs() < 1e-15);
    assert!(matches!(
        g("equidistant").psi(p(1.0, 0.0), 0.0),
        Err(Error::Domain { .. })
    ));
    assert!(g("parabola").psi(p(0.0, 0.0), 0.0).is_err());
}

#[test]
fn grad_norm_examples() {
    assert!((g("parabola").grad_norm(p(0.5, 0.0), 0.3).unwrap() - 1.0).abs() < 1e-15);
    assert!((g("cormack:k=2").grad_norm(p(0.0, 1.0), 0.3).unwrap() - 2.0).abs() < 1e-15);
    assert!(g("hyperbola:eps=2").grad_norm(p(0.0, 0.0), 0.0).is_err());
}

#[test]
fn dcoef_examples() {
    let h = g("hyperbola:eps=1.4142135623730951");
    assert!((h.dcoef(p(0.3, 0.1)).unwrap() - 1.0).abs() < 1e-12);
    assert!((g("equidistant").dcoef(p(0.0, 0.0)).unwrap() - 0.25).abs() < 1e-15);
    assert!((g("hgeodesic").dcoef(p(0.0, 0.0)).unwrap() - 0.25).abs() < 1e-15);
    assert!((g("parabola").dcoef(p(0.0, 0.5)).unwrap() - 1.0).abs() < 1e-15);
    // Circle of radius 1: D = 1/(4(1 - |x|^2)).
    let c = g("ellipse:e1=1,e2=1,support=0.7");
    assert!((c.dcoef(p(0.5, 0.0)).unwrap() - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn lambda_range_examples() {
    assert_eq!(g("radon:support=1").lambda_range(), (-1.0, 1.0));
    let (lo, hi) = g("ellipse:e1=1,e2=1,support=0.9").lambda_range();
    assert!((lo - 0.01).abs() < 1e-15 && (hi - 3.61).abs() < 1e-15);
    let (lo, hi) = g("hgeodesic:support=0.9").lambda_range();
    assert!(lo > -1.0 && hi < 1.0);
}

#[test]
fn weight_examples() {
    assert_eq!(g("ellipse:e1=1,e2=1,support=0.5").weight_mu(4.0).unwrap(), 4.0);
    assert!((g("cormack:k=3").weight_m(p(2.0, 0.0)).unwrap() - 12.0).abs() < 1e-12);
    assert!((g("hgeodesic").weight_mu(0.6).unwrap() - 0.8).abs() < 1e-15);
    assert!(matches!(
        g("hyperbola:eps=2").weight_m(p(0.1, 0.0)),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn level_is_minus_psi_except_ellipse() {
    for geo in all() {
        let x = p(0.31, -0.22);
        let sign = if matches!(geo.family(), Family::Ellipse { .. }) { 1.0 } else { -1.0 };
        for phi in [0.0, 1.0, 2.5, 4.0] {
            let l = geo.level(x, phi);
            assert!((l - sign * geo.psi(x, phi).unwrap()).abs() < 1e-14, "{geo}");
        }
    }
}

#[test]
fn gradients_match_finite_differences() {
    let h = 1e-6;
    for geo in all() {
        for x in [p(0.31, -0.22), p(-0.4, 0.15), p(0.05, 0.6)] {
            for phi in [0.1, 1.3, 2.9, 4.4, 5.9] {
                let (_, gr) = geo.level_grad(x, phi);
                let fd = Point::new(
                    (geo.level(x + p(h, 0.0), phi) - geo.level(x - p(h, 0.0), phi)) / (2.0 * h),
                    (geo.level(x + p(0.0, h), phi) - geo.level(x - p(0.0, h), phi)) / (2.0 * h),
                );
                assert!((gr - fd).norm() < 1e-7 * (1.0 + gr.norm()), "{geo} {x:?} {phi}");
                let closed = geo.grad_norm(x, phi).unwrap();
                let metric = geo.metric_grad_norm(x, gr);
                assert!((closed - metric).abs() < 1e-12 * closed, "{geo} {x:?} {phi}");
            }
        }
    }
}

#[test]
fn dcoef_closed_form_matches_quadrature() {
    for geo in all() {
        for x in [p(0.31, -0.22), p(-0.4, 0.15), p(0.05, 0.6)] {
            let a = geo.dcoef(x).unwrap();
            let b = geo.dcoef_quadrature(x, 256).unwrap();
            assert!((a - b).abs() < 1e-10 * a, "{geo}: {a} vs {b}");
        }
    }
}

#[test]
fn trig_difference_matches_psi() {
    for geo in all() {
        if geo.family() == Family::Parabola {
            assert!(matches!(
                geo.trig_difference(p(0.1, 0.0), p(0.2, 0.0)),
                Err(Error::Unsupported(_))
            ));
            continue;
        }
        let (x, y) = (p(0.31, -0.22), p(-0.4, 0.15));
        let t = geo.trig_difference(x, y).unwrap();
        assert_eq!(t.order(), 1);
        for phi in [0.0, 0.7, 2.0, PI, 5.5] {
            let d = geo.psi(x, phi).unwrap() - geo.psi(y, phi).unwrap();
            assert!((t.eval(phi) - d).abs() < 1e-14, "{geo}");
        }
    }
}

#[test]
fn radon_difference_example() {
    let t = g("radon").trig_difference(p(0.0, 0.0), p(1.0, 0.0)).unwrap();
    assert_eq!((t.cos_coef(0), t.cos_coef(1), t.sin_coef(1)), (0.0, 1.0, 0.0));
}

#[test]
fn lambda_range_covers_sampled_levels() {
    for geo in all() {
        let (lo, hi) = geo.lambda_range();
        let r = geo.support_radius();
        for i in 0..40 {
            for j in 0..24 {
                let rho = r * (i as f64 + 0.5) / 40.0;
                let th = j as f64 * 0.27;
                let x = p(rho * th.cos(), rho * th.sin());
                for phi in [0.0, 0.9, 2.2, 3.3, 4.8] {
                    let l = geo.level(x, phi);
                    assert!(l >= lo - 1e-12 && l <= hi + 1e-12, "{geo}: {l} not in [{lo}, {hi}]");
                }
            }
        }
    }
}

#[test]
fn descriptor_round_trip_and_order_insensitivity() {
    for geo in all() {
        let s = geo.to_string();
        assert_eq!(Geometry::parse(&s).unwrap(), geo, "{s}");
    }
    assert_eq!(
        g("ellipse:support=0.7,e2=0.8,e1=1.2"),
        g("ellipse:e1=1.2,e2=0.8,support=0.7")
    );
}

#[test]
fn descriptor_errors_name_the_problem() {
    let e = Geometry::parse("elipse:e1=1,e2=1").unwrap_err();
    assert!(matches!(e, Error::Parse { pos: 0, .. }));
    assert!(e.to_string().contains("elipse"));
    let e = Geometry::parse("radon:suport=1").unwrap_err();
    assert!(e.to_string().contains("suport"));
    assert!(Geometry::parse("Radon").is_err());
    assert!(Geometry::parse("hyperbola:eps=0.5").is_err());
    assert!(Geometry::parse("hyperbola").is_err());
    assert!(Geometry::parse("cormack:k=1.5").is_err());
    assert!(Geometry::parse("equidistant:support=1.2").is_err());
    assert!(Geometry::parse("radon:support=1,support=2").is_err());
    assert!(Geometry::parse("radon:support=abc").is_err());
}

#[test]
fn ellipse_support_condition() {
    assert!(g("ellipse:e1=1.2,e2=0.8,support=0.7").support_condition_holds());
    assert!(!g("ellipse:e1=1.2,e2=0.8,support=0.9").support_condition_holds());
}
