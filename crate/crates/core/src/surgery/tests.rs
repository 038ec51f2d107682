use super::*;

/// Area of the equilateral triangle with side `l`: each angle has cosine
/// `cosh l / (1 + cosh l)` by the cosine rule.
fn equilateral_area(l: f64) -> f64 {
    let ch = l.cosh();
    std::f64::consts::PI - 3.0 * (ch / (1.0 + ch)).acos()
}

fn consts() -> SurgeryConstants {
    SurgeryConstants::default()
}

#[test]
fn constants_are_validated() {
    assert!(SurgeryConstants::new(0.1, 0.5).is_err());
    assert!(SurgeryConstants::new(0.0, 0.1).is_err());
    assert!(SurgeryConstants::new(0.1, 0.0).is_err());
    assert!((consts().eta_prime() - 0.01).abs() < 1e-15);
}

#[test]
fn polygon_without_short_edges_is_unchanged() {
    let p = CoxeterPolygon::regular(5, 2).unwrap();
    let (q, r) = remove_small_edges(&p, &consts()).unwrap();
    assert!(r.removed.is_empty() && r.removed_areas.is_empty());
    assert_eq!(q.vertices(), p.vertices());
    assert_eq!(r.area_ratio, 1.0);
}

#[test]
fn one_short_edge_is_removed() {
    let c = consts();
    let p = short_edge_hexagon(c.eta_prime() / 2.0, 1.0, 1.0).unwrap();
    let (q, r) = remove_small_edges(&p, &c).unwrap();
    assert_eq!(q.len(), 5);
    assert_eq!(r.removed, vec![1]);
    assert!(r.min_edge_ok && r.min_edge >= (1.0 - c.alpha) * c.eta);
    assert!(r.convex);
    assert!(r.area_defect.abs() < 1e-9);
    assert!(r.area_ratio > 0.0 && r.area_ratio <= 1.0);
    // The removed triangle matches Gauss-Bonnet on its measured angles.
    let t = p.triangle(0, 1, 2);
    let gb = crate::kernel::gauss_bonnet_area(&t.angles().unwrap()).unwrap();
    assert!((r.removed_areas[0] - gb).abs() < 1e-12);
}

#[test]
fn adjacent_short_edges_are_rejected() {
    let p = CoxeterPolygon::regular(5, 2).unwrap();
    let big = SurgeryConstants::new(2.0, 0.1).unwrap();
    match remove_small_edges(&p, &big) {
        Err(Error::Precondition(msg)) => assert!(msg.contains("adjacent edges 0")),
        other => panic!("{other:?}"),
    }
    let ideal = CoxeterPolygon::ideal_regular(5).unwrap();
    assert!(remove_small_edges(&ideal, &consts()).is_err());
}

#[test]
fn corpus_surgery_bounds() {
    let c = consts();
    let min_a = min_area_triangle(c.eta).unwrap().area;
    for p in short_edge_corpus(40, 3, &c).unwrap() {
        let (q, r) = remove_small_edges(&p, &c).unwrap();
        assert_eq!(q.len(), 5);
        assert!(r.min_edge_ok && r.convex);
        assert!(r.area_defect.abs() < 1e-9);
        for s in span_triangle_check(&p, &c, min_a).unwrap() {
            assert!(s.admissible && s.area_ok, "{s:?}");
        }
    }
}

#[test]
fn u_prime_calibration_is_stable() {
    let c = consts();
    let a = calibrate_u_prime(200, 1, &c).unwrap();
    let b = calibrate_u_prime(200, 2, &c).unwrap();
    assert!(
        (a.u_prime - b.u_prime).abs() <= 0.05 * a.u_prime,
        "{a:?} {b:?}"
    );
    assert!(a.angle_constant >= a.area_constant);
    for p in short_edge_corpus(200, 1, &c).unwrap() {
        let (_, r) = remove_small_edges(&p, &c).unwrap();
        for area in r.removed_areas {
            assert!(area <= a.u_prime * c.alpha);
        }
    }
}

#[test]
fn angle_estimates() {
    let c = consts();
    let u = calibrate_u_prime(50, 1, &c).unwrap().u_prime;
    for p in short_edge_corpus(20, 9, &c).unwrap() {
        let e = angle_estimate_check(&p, 0, &c, u).unwrap();
        assert!(e.right_angle);
        assert!(e.sine_ok && e.angle_ok, "{e:?}");
        assert!(e.sine_law_residual < 1e-10 * e.a.sinh().max(1.0));
    }
    // As the short edge shrinks the angle tends to a right angle.
    let mut last = f64::INFINITY;
    for short in [5e-3, 2e-3, 1e-3] {
        let p = short_edge_hexagon(short, 1.0, 1.5).unwrap();
        let e = angle_estimate_check(&p, 0, &c, u).unwrap();
        let gap = FRAC_PI_2 - e.gamma;
        assert!(
            gap > 0.0 && gap < last && gap < 2.0 * short,
            "{short}: {gap}"
        );
        last = gap;
    }
    let p = CoxeterPolygon::regular(5, 2).unwrap();
    assert!(angle_estimate_check(&p, 0, &c, u).is_err());
}

#[test]
fn min_area_triangle_matches_equilateral() {
    let m = min_area_triangle(1.0).unwrap();
    assert!((m.area - equilateral_area(1.0)).abs() < 1e-6, "{m:?}");
    assert_eq!(m.active, vec!["a = l0", "b = l0", "c = l0"]);
    assert!(m.far_face_min > m.area);
    let again = min_area_triangle(1.0).unwrap();
    assert!((again.area - m.area).abs() < 1e-6);
    let small = min_area_triangle(0.5).unwrap();
    let large = min_area_triangle(2.0).unwrap();
    assert!(small.area <= m.area && m.area <= large.area);
    assert!(min_area_triangle(0.0).is_err());
}

#[test]
fn thin_comparison() {
    let c = consts();
    let cfg = SamplerConfig::new(21);
    let p = short_edge_hexagon(c.eta_prime() / 2.0, 1.0, 1.0).unwrap();
    let (q, _) = remove_small_edges(&p, &c).unwrap();
    let cmp = surgery_thin_comparison(p.polygon(), &q, 2.0, 100_000, &c, &cfg).unwrap();
    assert!(cmp.passed(), "{cmp:?}");
    let same = surgery_thin_comparison(p.polygon(), p.polygon(), 1.0, 20_000, &c, &cfg).unwrap();
    assert_eq!(same.before.ratio, same.after.ratio);
    assert_eq!(same.max_excess, 0.0);
}
