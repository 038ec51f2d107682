use super::*;
use crate::kernel::point_distance;
use crate::polygon::CoxeterPolygon;

fn t237() -> CoxeterPolygon {
    CoxeterPolygon::triangle(2, 3, 7).unwrap()
}

/// Every word up to length `l`, multiplied out and deduplicated naively.
fn brute_force(gens: &[Isometry], l: usize) -> Vec<(Isometry, usize)> {
    let mut found: Vec<(Isometry, usize)> = vec![(Isometry::IDENTITY, 0)];
    let mut frontier = vec![Isometry::IDENTITY];
    for len in 1..=l {
        let mut next = Vec::new();
        for m in &frontier {
            for g in gens {
                let p = *m * *g;
                let scale = p.max_abs();
                if !found
                    .iter()
                    .any(|(q, _)| q.max_entry_distance(&p) < 1e-8 * scale)
                {
                    found.push((p, len));
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    found
}

#[test]
fn generators_are_involutions_fixing_their_sides() {
    let p = t237();
    for (i, s) in side_reflections(&p).iter().enumerate() {
        assert!((*s * *s).max_entry_distance(&Isometry::IDENTITY) < 1e-12);
        assert!(s.is_lorentz(1e-12));
        for v in [p.vertex(i), p.vertex(i + 1)] {
            let x = v.vector();
            assert!((s.apply(x) - x).max_abs() < 1e-12);
        }
    }
}

#[test]
fn vertex_rotations_have_the_declared_order() {
    let p = t237();
    let gens = side_reflections(&p);
    let n = gens.len();
    for i in 0..n {
        // Sides i and i + 1 meet at vertex i + 1.
        let m = match p.orders()[(i + 1) % n] {
            crate::polygon::AngleOrder::Finite(m) => m,
            _ => unreachable!(),
        };
        let r = gens[i] * gens[(i + 1) % n];
        assert!(r.pow(m).max_entry_distance(&Isometry::IDENTITY) < 1e-8);
        for k in 1..m {
            assert!(r.pow(k).max_entry_distance(&Isometry::IDENTITY) > 1e-3);
        }
    }
}

#[test]
fn small_balls() {
    let p = t237();
    let o = p.incenter();
    let cfg = BallConfig::default();
    let b0 = GroupBall::by_length(&p, 0, &o, &cfg).unwrap();
    assert_eq!(b0.len(), 1);
    let b1 = GroupBall::by_length(&p, 1, &o, &cfg).unwrap();
    assert_eq!(b1.len(), 4);
    let b2 = GroupBall::by_length(&p, 2, &o, &cfg).unwrap();
    assert_eq!(
        b2.len(),
        brute_force(side_reflections(&p).as_slice(), 2).len()
    );
    // Two of the three vertex pairs have order >= 3; the right-angle pair
    // commutes and contributes one element for two words.
    assert_eq!(b2.len(), 9);
    assert!(GroupBall::by_length(&p, MAX_BALL_LENGTH + 1, &o, &cfg).is_err());
}

#[test]
fn ball_matches_brute_force_and_reproduces_words() {
    for p in [
        t237(),
        CoxeterPolygon::triangle(3, 3, 4).unwrap(),
        CoxeterPolygon::regular(5, 2).unwrap(),
    ] {
        let o = p.incenter();
        let ball = GroupBall::by_length(&p, 6, &o, &BallConfig::default()).unwrap();
        let brute = brute_force(ball.generators(), 6);
        assert_eq!(ball.len(), brute.len());
        for (m, len) in &brute {
            let idx = ball.find(m).expect("brute-force element missing");
            assert_eq!(ball.elements()[idx].length, *len);
        }
        for e in ball.elements() {
            assert_eq!(e.word.len(), e.length);
            let m = ball.evaluate(&e.word).unwrap();
            assert!(m.max_entry_distance(&e.matrix) < 1e-9 * m.max_abs().max(1.0));
        }
        assert!(ball.min_pairwise_distance() > 1e-3);
    }
}

#[test]
fn parent_dag_lists_every_minimal_word() {
    let p = t237();
    let ball = GroupBall::by_length(&p, 5, &p.incenter(), &BallConfig::default()).unwrap();
    let gens = ball.generators().to_vec();
    for idx in 0..ball.len() {
        let e = &ball.elements()[idx];
        let words = ball.minimal_words(idx);
        // Oracle: every word of that length evaluating to the element.
        let mut expected = Vec::new();
        let total = 3usize.pow(e.length as u32);
        for code in 0..total {
            let w: Vec<usize> = (0..e.length)
                .map(|k| code / 3usize.pow(k as u32) % 3)
                .collect();
            let m = w.iter().fold(Isometry::IDENTITY, |acc, &s| acc * gens[s]);
            if m.max_entry_distance(&e.matrix) < 1e-8 * m.max_abs() {
                expected.push(w);
            }
        }
        let mut got = words.clone();
        got.sort();
        expected.sort();
        assert_eq!(got, expected, "element {:?}", e.word);
    }
}

#[test]
fn minimal_support_examples() {
    let p = t237();
    let ball = GroupBall::by_length(&p, 4, &p.incenter(), &BallConfig::default()).unwrap();
    for s in 0..3 {
        let g = GroupElement {
            matrix: ball.generators()[s],
            word: vec![s],
            length: 1,
        };
        assert_eq!(minimal_support(&g, &ball).unwrap(), vec![s]);
    }
    // Vertex orders are [2, 3, 7] at vertices 0, 1, 2; sides 0 and 1 meet at
    // vertex 1 (order 3), sides 2 and 0 at vertex 0 (order 2).
    let g = ball.evaluate(&[0, 1]).unwrap();
    let idx = ball.find(&g).unwrap();
    assert_eq!(ball.minimal_words(idx), vec![vec![0, 1]]);
    assert_eq!(ball.minimal_support_of(idx), vec![0, 1]);
    let g = ball.evaluate(&[2, 0]).unwrap();
    let idx = ball.find(&g).unwrap();
    assert_eq!(ball.minimal_words(idx).len(), 2);
    assert_eq!(ball.minimal_support_of(idx), vec![0, 2]);

    let far = GroupElement {
        matrix: ball.evaluate(&[0, 1, 2, 0, 1, 2, 0, 1]).unwrap(),
        word: vec![],
        length: 0,
    };
    assert!(matches!(
        minimal_support(&far, &ball),
        Err(Error::NotInBall)
    ));
}

#[test]
fn lemma6_holds_on_small_groups() {
    let p = t237();
    let r = check_gens_minlength(&p, &p.incenter(), 8).unwrap();
    assert!(r.passed(), "{:?}", r.violations.first());
    assert!(r.pairs_checked > r.elements);
    let p = CoxeterPolygon::regular(5, 2).unwrap();
    let r = check_gens_minlength(&p, &p.incenter(), 6).unwrap();
    assert!(r.passed(), "{:?}", r.violations.first());
    // Generators themselves meet the inequality with equality.
    let p = CoxeterPolygon::triangle(2, 4, 5).unwrap();
    let r = check_gens_minlength(&p, &p.incenter(), 1).unwrap();
    assert!(r.passed());
    assert!(r.min_slack.abs() < 1e-12);
}

#[test]
fn bounded_factorization_cases() {
    let p = t237();
    let o = p.incenter();
    let ball = GroupBall::by_length(&p, 8, &o, &BallConfig::default()).unwrap();
    let id = ball.elements()[0].clone();
    assert_eq!(
        bounded_factorization(&id, &ball, 0.0).unwrap(),
        Vec::<usize>::new()
    );
    for idx in 0..ball.len() {
        let r = ball.displacement(idx);
        let w = bounded_factorization_at(&ball, idx, r).unwrap();
        assert_eq!(w.len(), ball.elements()[idx].length);
        let m = ball.evaluate(&w).unwrap();
        assert!(m.max_entry_distance(&ball.elements()[idx].matrix) < 1e-9 * m.max_abs());
        let ov = o.vector();
        for s in &w {
            assert!(point_distance(ov, ball.generators()[*s].apply(ov)) <= r + 1e-9);
        }
    }
    assert!(bounded_factorization_at(&ball, ball.len() - 1, 0.0).is_err());
}

#[test]
fn radius_ball_contains_length_ball_elements_within_radius() {
    let p = t237();
    let o = p.incenter();
    let r = 1.2;
    let by_r = GroupBall::by_radius(&p, r, &o, &BallConfig::default()).unwrap();
    let by_l = GroupBall::by_length(&p, 14, &o, &BallConfig::default()).unwrap();
    let mut inside = 0;
    for (i, e) in by_l.elements().iter().enumerate() {
        if by_l.displacement(i) <= r {
            inside += 1;
            let j = by_r.find(&e.matrix).expect("element within radius missing");
            assert_eq!(by_r.elements()[j].length, e.length);
        }
    }
    assert!(inside > 10);
    let ideal = CoxeterPolygon::ideal_regular(3).unwrap();
    assert!(GroupBall::by_radius(&ideal, 1.0, &ideal.incenter(), &BallConfig::default()).is_err());
}

#[test]
fn element_cap_is_enforced() {
    let p = t237();
    let cfg = BallConfig {
        cap: 50,
        ..BallConfig::default()
    };
    assert!(matches!(
        GroupBall::by_length(&p, 10, &p.incenter(), &cfg),
        Err(Error::SizeLimit { cap: 50 })
    ));
}

#[test]
fn local_displacement_cases() {
    let p = CoxeterPolygon::regular(5, 2).unwrap();
    let o = p.incenter();
    let ball = GroupBall::by_radius(&p, 4.0, &o, &BallConfig::default()).unwrap();
    // Deep point: only elements moving it a lot.
    let l = local_small_displacement(&o, 0.5 * 2.0 * p.inradius(), &ball);
    assert!(l.elements.is_empty());
    assert!(l.warnings.is_empty());
    // Point on side 0: its reflection fixes it.
    let x = crate::kernel::point_toward(&p.vertex(0).finite().unwrap(), p.vertex(1), 0.3).unwrap();
    let l = local_small_displacement(&x, 0.0, &ball);
    let s0 = ball.find(&ball.generators()[0]).unwrap();
    assert!(l.elements.contains(&s0));
    // Reflection in the nearest side moves x by twice its depth.
    let y = HPoint::from_polar(0.2, 0.4);
    let best = (0..5)
        .map(|i| point_distance(y.vector(), ball.generators()[i].apply(y.vector())))
        .fold(f64::INFINITY, f64::min);
    assert!((best - 2.0 * p.depth(&y)).abs() < 1e-12);
}

#[test]
fn orbit_packing_bound() {
    for p in [t237(), CoxeterPolygon::regular(5, 2).unwrap()] {
        let o = p.incenter();
        let r = 3.0;
        let ball = GroupBall::by_radius(&p, r, &o, &BallConfig::default()).unwrap();
        let rep = packing_check(&p, &ball, r, 2.0);
        assert!(rep.passed, "{rep:?}");
        // Tiles meeting the disc of radius r - rho around o are in the count.
        let lower = 2.0 * std::f64::consts::PI * ((r - rep.rho).cosh() - 1.0) / p.area();
        assert!(rep.count as f64 >= lower, "{} < {lower}", rep.count);
    }
}

#[test]
fn collision_audit_matches_quadratic_scan() {
    let p = CoxeterPolygon::triangle(2, 4, 5).unwrap();
    let ball = GroupBall::by_length(&p, 6, &p.incenter(), &BallConfig::default()).unwrap();
    let els = ball.elements();
    let mut best = f64::INFINITY;
    for i in 0..els.len() {
        for j in i + 1..els.len() {
            best = best.min(els[i].matrix.max_entry_distance(&els[j].matrix));
        }
    }
    assert_eq!(best, ball.min_pairwise_distance());
    let table = ball_size_table(&p, &p.incenter(), 3, &BallConfig::default()).unwrap();
    assert_eq!(
        table.iter().map(|r| r.size).collect::<Vec<_>>()[..2],
        [1, 4]
    );
}
