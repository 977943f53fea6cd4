use ghcert_core::bounds::BoundSource;
use ghcert_core::segment_circle::{
    certificate, gh_formula, lower_bound, replay, sweep, CertificatePath, Grids, Regime, BREAK_AB, BREAK_BC,
};
use std::f64::consts::PI;

#[test]
fn certificates_track_the_formula_on_default_grids() {
    let g = Grids::default();
    for k in 0..100 {
        let lambda = 3.0 * PI * k as f64 / 99.0;
        let cert = certificate(lambda, &g).unwrap();
        let gap = cert.half_distortion() - gh_formula(lambda).unwrap();
        let wide = 4.0 * g.pl_step + 4.0 * PI / g.n_circle as f64 + 2.0 * lambda / g.m_grid as f64;
        assert!(cert.slack <= wide && cert.slack <= 0.02, "lambda {lambda}: slack {}", cert.slack);
        assert!(gap.abs() <= cert.slack, "lambda {lambda}: gap {gap}, slack {}", cert.slack);
    }
}

#[test]
fn certificate_spot_values() {
    let g = Grids::default();
    for (lambda, expected) in [
        (PI / 3.0, PI / 2.0 - PI / 12.0),
        (PI, PI / 3.0),
        (11.0 * PI / 6.0, 5.0 * PI / 12.0),
        (3.0 * PI, PI),
    ] {
        let cert = certificate(lambda, &g).unwrap();
        assert!((cert.half_distortion() - expected).abs() <= cert.slack, "lambda {lambda}");
        assert_eq!(replay(&cert.construction).unwrap(), cert.measured);
    }
    let c1 = certificate(11.0 * PI / 6.0, &g).unwrap();
    assert!(matches!(c1.path, CertificatePath::Anchored { .. }));
    let c2 = certificate(3.0 * PI, &g).unwrap();
    let h = c2.hausdorff.unwrap();
    assert!((h - PI).abs() <= 2.0 * g.circle_step());
}

#[test]
fn lower_bounds_are_tight_where_exact() {
    let g = Grids::default();
    for k in 0..=8 {
        let lambda = BREAK_AB * k as f64 / 8.0;
        let r = lower_bound(lambda, &g).unwrap();
        assert!(matches!(r.source, BoundSource::Round { .. }));
        assert!((r.value - gh_formula(lambda).unwrap()).abs() <= 1e-12);
    }
    for lambda in [2.0 * PI, 2.5 * PI, 3.0 * PI] {
        let r = lower_bound(lambda, &g).unwrap();
        assert_eq!(r.source, BoundSource::DiameterDifference);
        assert!((r.value - gh_formula(lambda).unwrap()).abs() <= 1e-12);
    }
    let r = lower_bound(4.0 * PI / 3.0, &g).unwrap();
    assert!((r.value - PI / 3.0).abs() <= 2.0 * PI / 720.0);
    assert_eq!(r.slack, 2.0 * PI / 720.0);
}

#[test]
fn sweep_has_the_expected_shape() {
    let g = Grids { n_circle: 240, m_grid: 240, pl_step: PI / 240.0, n_whisker: None };
    let reports = sweep(0.0, 3.0 * PI, 60, &g).unwrap();
    assert_eq!(reports.len(), 60);
    for r in &reports {
        assert!(r.consistent(), "{r:?}");
        assert_eq!(r.regime, Regime::of(r.lambda).unwrap());
    }
    for w in reports.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if b.lambda <= BREAK_AB {
            assert!(b.formula <= a.formula);
        } else if a.lambda >= BREAK_AB && b.lambda <= BREAK_BC {
            assert_eq!(a.formula, b.formula);
        } else if a.lambda >= BREAK_BC {
            assert!(b.formula > a.formula);
        }
    }
    let min = reports.iter().map(|r| r.formula).fold(f64::INFINITY, f64::min);
    assert_eq!(min, PI / 3.0);
    for r in reports.iter().filter(|r| r.lambda >= BREAK_AB && r.lambda <= BREAK_BC) {
        assert!((r.upper.value - PI / 3.0).abs() <= r.upper.slack);
        assert!((r.lower.value - PI / 3.0).abs() <= g.circle_step());
    }
}
