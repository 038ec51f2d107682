//! Acceptance criteria, one line each. Oracles (closed forms, finite
//! differences, tree walks, distances) are recomputed here from raw
//! coordinates rather than taken from the library.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coxlab::io::FamilySpec;
use coxlab::kernel::{equidistant_jacobian, heron_area, Isometry, LorentzVector};
use coxlab::polygon::{CoxeterPolygon, Polygon};
use coxlab::refgroup::{bounded_factorization_at, side_reflections, BallConfig, GroupBall};
use coxlab::surgery::{
    calibrate_u_prime, remove_small_edges, short_edge_corpus, surgery_thin_comparison,
    SurgeryConstants,
};
use coxlab::thinpart::{
    collar_inequality_check, group_thin_cross_check, sample_uniform, thin_ratio, thin_ratios,
    with_retry, SamplerConfig,
};
use coxlab::triangulation::{balanced_triangulate, Direction, DualTree, TriangulatedPolygon};
use coxlab::verify::{escape_rounding, theorem1_corpus};

const SEED: u64 = 20_240_611;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn mink(u: [f64; 3], v: [f64; 3]) -> f64 {
    -u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

fn arr(v: LorentzVector) -> [f64; 3] {
    v.to_array()
}

/// Hyperbolic distance between two points of the hyperboloid.
fn dist(u: [f64; 3], v: [f64; 3]) -> f64 {
    (-mink(u, v)).max(1.0).acosh()
}

fn apply(m: &Isometry, x: [f64; 3]) -> [f64; 3] {
    let r = m.rows();
    [0, 1, 2].map(|i| r[i][0] * x[0] + r[i][1] * x[1] + r[i][2] * x[2])
}

/// Distance from an interior point to the boundary: minimum over the
/// side geodesics, from the unnormalized poles.
fn boundary_distance(p: &Polygon, x: [f64; 3]) -> f64 {
    p.edges()
        .iter()
        .map(|g| {
            let e = arr(g.pole());
            (mink(x, e) / mink(e, e).sqrt()).asinh()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Interior angle at vertex `b` of the triangle `a b c`, from the tangent
/// vectors at `b`.
fn angle(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let tangent = |w: [f64; 3]| {
        let k = mink(w, b);
        [0, 1, 2].map(|i| w[i] + k * b[i])
    };
    let (u, v) = (tangent(a), tangent(c));
    (mink(u, v) / (mink(u, u) * mink(v, v)).sqrt())
        .clamp(-1.0, 1.0)
        .acos()
}

fn triangle_area(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    PI - angle(c, a, b) - angle(a, b, c) - angle(b, c, a)
}

// --------------------------------------------------------------------- 1

fn trig_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    let mut errors = 0;
    let trials = 10_000;
    for _ in 0..trials {
        let [a, b, c] = loop {
            let t: [f64; 3] = [0; 3].map(|_| rng.gen_range(0.05..=PI / 2.0));
            if t.iter().sum::<f64>() < PI - 1e-6 {
                break t;
            }
        };
        // Dual law of cosines for the side opposite each angle.
        let side =
            |x: f64, y: f64, z: f64| ((x.cos() + y.cos() * z.cos()) / (y.sin() * z.sin())).acosh();
        let (sa, sb, sc) = (side(a, b, c), side(b, c, a), side(c, a, b));
        match heron_area(sa, sb, sc) {
            Ok(h) => worst = worst.max((h - (PI - a - b - c)).abs()),
            Err(_) => errors += 1,
        }
    }
    outcome(
        errors == 0 && worst <= 1e-9,
        format!("{trials} triangles, max |heron - (pi - sum of angles)| = {worst:.2e} (<= 1e-9), {errors} errors"),
    )
}

// --------------------------------------------------------------------- 2

fn golden_values() -> Outcome {
    let t = CoxeterPolygon::triangle(2, 3, 7).expect("(2,3,7) exists");
    let tv: Vec<_> = t.vertices().iter().map(|v| arr(v.vector())).collect();
    let e_area = (t.area() - PI / 42.0).abs();
    let e_area_raw = (triangle_area(tv[0], tv[1], tv[2]) - PI / 42.0).abs();

    let p = CoxeterPolygon::regular(5, 2).expect("right-angled pentagon exists");
    let pv: Vec<_> = p.vertices().iter().map(|v| arr(v.vector())).collect();
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let e_side = (0..5)
        .map(|i| (-mink(pv[i], pv[(i + 1) % 5]) - golden).abs())
        .fold(0.0, f64::max);
    let e_pent = (p.area() - PI / 2.0).abs();
    let worst = e_area.max(e_area_raw).max(e_side).max(e_pent);
    outcome(
        worst <= 1e-12,
        format!(
            "(2,3,7) area err {e_area:.1e} (from vertices {e_area_raw:.1e}); pentagon cosh(side) err {e_side:.1e}, area err {e_pent:.1e} (all <= 1e-12)"
        ),
    )
}

// --------------------------------------------------------------------- 3

/// Fermi coordinates about the geodesic `{x1 = 0}`: signed distance `s`,
/// arclength `u` along the geodesic.
fn fermi(s: f64, u: f64) -> [f64; 3] {
    [s.cosh() * u.cosh(), s.sinh(), s.cosh() * u.sinh()]
}

fn jacobian() -> Outcome {
    // Flow inward from the distance-1 curve: (t, v) -> point at distance
    // 1 - t, with v arclength along the distance-1 curve.
    let map = |t: f64, v: f64| fermi(1.0 - t, v / 1f64.cosh());
    let h = 1e-5;
    let mut worst = 0.0f64;
    for i in 0..100 {
        let t = i as f64 / 99.0;
        let (t0, t1) = ((t - h).max(0.0), (t + h).min(1.0));
        let v = 0.7;
        let (a, b) = (map(t1, v), map(t0, v));
        let (c, d) = (map(t, v + h), map(t, v - h));
        let dt = [0, 1, 2].map(|k| (a[k] - b[k]) / (t1 - t0));
        let dv = [0, 1, 2].map(|k| (c[k] - d[k]) / (2.0 * h));
        let fd = (mink(dt, dt) * mink(dv, dv) - mink(dt, dv).powi(2)).sqrt();
        match equidistant_jacobian(t) {
            Ok(j) => worst = worst.max((j - fd).abs()),
            Err(_) => worst = f64::INFINITY,
        }
    }
    let min = (0..=10_000)
        .map(|i| equidistant_jacobian(i as f64 / 10_000.0).unwrap_or(f64::NAN))
        .fold(f64::INFINITY, f64::min);
    let e_min = (min - 1.0 / 1f64.cosh()).abs();
    outcome(
        worst <= 1e-6 && e_min <= 1e-9,
        format!("max |J - finite difference| = {worst:.2e} on 100 points (<= 1e-6); |min J - 1/cosh 1| = {e_min:.1e} (<= 1e-9)"),
    )
}

// --------------------------------------------------------------------- 4

fn theorem1() -> Outcome {
    let bound = 1.0 / (1.0 + 1f64.cosh());
    let mut failures = Vec::new();
    let mut worst = f64::INFINITY;
    for (k, spec) in theorem1_corpus().into_iter().enumerate() {
        let p = spec.build().expect("corpus polygon").into_polygon();
        let cfg = SamplerConfig::new(SEED.wrapping_add(k as u64));
        let res = with_retry(1_000_000, |n| {
            let e = thin_ratio(&p, 2.0, n, &cfg)?;
            Ok((e.ratio >= bound - 3.0 * e.stderr, e))
        });
        match res {
            Ok((ok, e, _)) => {
                worst = worst.min(e.ratio - (bound - 3.0 * e.stderr));
                if !ok {
                    failures.push(format!("{} ({:.4})", spec.id(), e.ratio));
                }
            }
            Err(e) => failures.push(format!("{}: {e}", spec.id())),
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "15 polygons at R = 2, 1e6 samples: worst ratio - (1/(1+cosh 1) - 3 stderr) = {worst:+.4}{}",
            if failures.is_empty() { String::new() } else { format!("; failing: {}", failures.join(", ")) }
        ),
    )
}

// --------------------------------------------------------------------- 5

fn collar() -> Outcome {
    let mut checked = Vec::new();
    let mut failures = Vec::new();
    for (k, spec) in theorem1_corpus().into_iter().enumerate() {
        let p = spec.build().expect("corpus polygon").into_polygon();
        if !p.is_compact() || p.inradius() <= 1.0 {
            continue;
        }
        checked.push(spec.id());
        let cfg = SamplerConfig::new(SEED.wrapping_add(100 + k as u64));
        match collar_inequality_check(&p, 1_000_000, &cfg) {
            Ok(r) => {
                let ok =
                    r.core_fraction <= 1f64.cosh() * r.collar_fraction + 3.0 * r.combined_stderr;
                if !(ok && r.passed && !r.vacuous) {
                    failures.push(spec.id());
                }
            }
            Err(e) => failures.push(format!("{}: {e}", spec.id())),
        }
    }
    outcome(
        !checked.is_empty() && failures.is_empty(),
        format!(
            "vol(P') <= cosh(1) vol(U) + 3 sigma on {} ({} failing)",
            checked.join(", "),
            failures.len()
        ),
    )
}

// --------------------------------------------------------------------- 6

/// Depths from the root and distances to the nearest childless node, by
/// breadth-first search over the parent/child links.
fn tree_walks(t: &DualTree) -> (Vec<usize>, Vec<usize>) {
    let m = t.parent.len();
    let mut depth = vec![usize::MAX; m];
    depth[t.root] = 0;
    let mut q = VecDeque::from([t.root]);
    while let Some(u) = q.pop_front() {
        for &c in &t.children[u] {
            depth[c] = depth[u] + 1;
            q.push_back(c);
        }
    }
    let mut leaf = vec![usize::MAX; m];
    let mut q: VecDeque<usize> = (0..m).filter(|&i| t.children[i].is_empty()).collect();
    for &l in &q {
        leaf[l] = 0;
    }
    while let Some(u) = q.pop_front() {
        let next = t.children[u].iter().copied().chain(t.parent[u]);
        for v in next {
            if leaf[v] == usize::MAX {
                leaf[v] = leaf[u] + 1;
                q.push_back(v);
            }
        }
    }
    (depth, leaf)
}

fn tree_bounds() -> Outcome {
    let mut radius_fail = Vec::new();
    let mut depth_fail = Vec::new();
    let mut count_fail = Vec::new();
    let mut worst_depth = (f64::INFINITY, 0, 0);
    for n in 3..=4096usize {
        let Ok((_, tree)) = balanced_triangulate(n, Direction::Clockwise) else {
            radius_fail.push(n);
            continue;
        };
        let (depth, leaf) = tree_walks(&tree);
        let leaves: Vec<usize> = (0..depth.len())
            .filter(|&i| tree.children[i].is_empty())
            .collect();
        let radius = leaves.iter().map(|&l| depth[l]).max().unwrap_or(0);
        let min_leaf = leaves.iter().map(|&l| depth[l]).min().unwrap_or(0);
        let log = (n as f64).log2();
        if radius as f64 > log.floor() + 1.0 {
            radius_fail.push(n);
        }
        let slack = min_leaf as f64 - (log - 1.0);
        if slack < 0.0 {
            depth_fail.push(n);
        }
        if slack < worst_depth.0 {
            worst_depth = (slack, n, min_leaf);
        }
        for s in 0..=radius + 1 {
            let count = leaf.iter().filter(|&&d| d <= s).count() as f64;
            if count < (n - 2) as f64 - 2f64.powf(log + 1.0 - s as f64) {
                count_fail.push(n);
                break;
            }
        }
    }
    let (slack, n, d) = worst_depth;
    outcome(
        radius_fail.is_empty() && depth_fail.is_empty() && count_fail.is_empty(),
        format!(
            "n = 3..4096: radius > floor(log2 n) + 1 for {} sizes; min leaf depth < log2 n - 1 for {} sizes \
             (worst n = {n}: depth {d}, slack {slack:.2}); leaf-count bound fails for {} sizes",
            radius_fail.len(),
            depth_fail.len(),
            count_fail.len()
        ),
    )
}

// --------------------------------------------------------------------- 7

fn escape_paths() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for n in [19u32, 24, 100] {
        let p = CoxeterPolygon::ideal_regular(n)
            .expect("ideal polygon")
            .into_polygon();
        let tp = TriangulatedPolygon::new(p.clone(), Direction::Clockwise).expect("triangulation");
        // Subtree heights: distance to the farthest descendant leaf.
        let (depth, _) = tree_walks(&tp.tree);
        let mut order: Vec<usize> = (0..depth.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(depth[i]));
        let mut height = vec![0usize; depth.len()];
        for u in order {
            if let Some(q) = tp.tree.parent[u] {
                height[q] = height[q].max(height[u] + 1);
            }
        }
        let xs = sample_uniform(&p, 10_000, &SamplerConfig::new(SEED.wrapping_add(n as u64)))
            .expect("samples");
        let (mut upper, mut lower, mut errors) = (f64::INFINITY, f64::INFINITY, 0);
        for (x, path) in xs.iter().zip(tp.escape_paths(&xs)) {
            let Ok(path) = path else {
                errors += 1;
                continue;
            };
            let s = height[path.triangles[0]] as f64;
            upper = upper.min(3f64.ln() * (s + 1.0) - path.length);
            lower = lower
                .min(path.length - boundary_distance(&p, arr(x.vector())) + escape_rounding(x));
        }
        ok &= errors == 0 && upper >= 0.0 && lower >= 0.0;
        lines.push(format!(
            "ideal-{n}: upper slack {upper:.3}, lower slack {lower:.1e}, {errors} errors"
        ));
    }
    outcome(ok, format!("1e4 points each; {}", lines.join("; ")))
}

// --------------------------------------------------------------------- 8

fn thick_decay() -> Outcome {
    let rs = [1.0, 2.0, 3.0, 4.0, 6.0];
    let mut non_monotone = Vec::new();
    let mut large = Vec::new();
    let mut at6 = Vec::new();
    for n in [3u32, 10, 19, 24, 50, 100, 200] {
        let p = CoxeterPolygon::ideal_regular(n)
            .expect("ideal polygon")
            .into_polygon();
        let est = thin_ratios(
            &p,
            &rs,
            100_000,
            &SamplerConfig::new(SEED.wrapping_add(200 + n as u64)),
        )
        .expect("thin ratios");
        let thick: Vec<f64> = est.iter().map(|e| 1.0 - e.ratio).collect();
        if thick.windows(2).any(|w| w[1] > w[0]) {
            non_monotone.push(n);
        }
        if n >= 50 {
            at6.push(format!("{n}: {:.4}", thick[4]));
            if thick[4] > 0.05 {
                large.push(n);
            }
        }
    }
    outcome(
        non_monotone.is_empty() && large.is_empty(),
        format!(
            "ideal n-gons, R in {{1,2,3,4,6}}, shared seed: {} non-monotone; thick fraction at R = 6 ({}) <= 0.05",
            non_monotone.len(),
            at6.join(", ")
        ),
    )
}

// --------------------------------------------------------------------- 9

fn lemma6() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (spec, l) in [
        (FamilySpec::Triangle { p: 2, q: 3, r: 7 }, 8),
        (FamilySpec::Regular { n: 5, m: 2 }, 6),
    ] {
        let p = spec.build().expect("corpus polygon").into_polygon();
        let o = p.incenter();
        let ball = GroupBall::by_length(&p, l, &o, &BallConfig::default()).expect("ball");
        let gens = side_reflections(&p);
        let ov = arr(o.vector());
        let gen_disp: Vec<f64> = gens.iter().map(|s| dist(ov, apply(s, ov))).collect();
        let mut violations = 0;
        let mut factor_fail = 0;
        for (idx, g) in ball.elements().iter().enumerate() {
            let d = dist(ov, apply(&g.matrix, ov));
            for s in ball.minimal_support_of(idx) {
                if d + 1e-9 < gen_disp[s] {
                    violations += 1;
                }
            }
            // The factorization must be a word of minimal length that
            // multiplies out to the element.
            match bounded_factorization_at(&ball, idx, ball.displacement(idx)) {
                Ok(w) if w.len() == g.length => {
                    let m = w
                        .iter()
                        .fold(Isometry::from_rows_unchecked(IDENTITY), |acc, &s| {
                            acc.compose(&gens[s])
                        });
                    if m.max_entry_distance(&g.matrix) > 1e-8 * g.matrix.max_abs() {
                        factor_fail += 1;
                    }
                }
                _ => factor_fail += 1,
            }
        }
        ok &= violations == 0 && factor_fail == 0;
        lines.push(format!(
            "{} L={l}: {} elements, {violations} violations, {factor_fail} factorization failures",
            spec.id(),
            ball.len()
        ));
    }
    outcome(ok, lines.join("; "))
}

const IDENTITY: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

// -------------------------------------------------------------------- 10

fn surgery() -> Outcome {
    let c = SurgeryConstants::new(0.1, 0.1).expect("constants");
    let (a, b) = match (
        calibrate_u_prime(200, SEED, &c),
        calibrate_u_prime(200, SEED + 1, &c),
    ) {
        (Ok(a), Ok(b)) => (a.u_prime, b.u_prime),
        (Err(e), _) | (_, Err(e)) => return outcome(false, format!("calibration failed: {e}")),
    };
    let drift = (a - b).abs() / a;
    let corpus = short_edge_corpus(40, SEED + 2, &c).expect("corpus");
    let bound = (1.0 - c.alpha) * c.eta;
    let (mut min_edge, mut worst_area, mut worst_inflation) =
        (f64::INFINITY, 0.0f64, f64::NEG_INFINITY);
    let mut errors = 0;
    for (k, p) in corpus.iter().enumerate() {
        let Ok((q, rep)) = remove_small_edges(p, &c) else {
            errors += 1;
            continue;
        };
        let qv: Vec<_> = q.vertices().iter().map(|v| arr(v.vector())).collect();
        for i in 0..qv.len() {
            min_edge = min_edge.min(dist(qv[i], qv[(i + 1) % qv.len()]));
        }
        let pv: Vec<_> = p.vertices().iter().map(|v| arr(v.vector())).collect();
        let m = pv.len();
        for &v in &rep.removed {
            let area = triangle_area(pv[(v + m - 1) % m], pv[v], pv[(v + 1) % m]);
            worst_area = worst_area.max(area);
        }
        let cfg = SamplerConfig::new(SEED.wrapping_add(300 + k as u64));
        let res = with_retry(100_000, |n| {
            let cmp = surgery_thin_comparison(p.polygon(), &q, 2.0, n, &c, &cfg)?;
            let slack = 2.0 * cmp.before.ratio + 3.0 * cmp.combined_stderr - cmp.after.ratio;
            Ok((slack >= 0.0, slack))
        });
        match res {
            Ok((_, slack, _)) => worst_inflation = worst_inflation.max(-slack),
            Err(_) => errors += 1,
        }
    }
    let ok = errors == 0
        && min_edge >= bound
        && worst_inflation <= 0.0
        && worst_area <= a * c.alpha
        && drift <= 0.05;
    outcome(
        ok,
        format!(
            "40 hexagons: min edge {min_edge:.4} (>= {bound:.3}); max removed area {worst_area:.4} (<= u' alpha = {:.4}); \
             worst ratio(P') - 2 ratio(P) - 3 sigma = {worst_inflation:+.4}; u' = {a:.4} / {b:.4} (drift {:.2}%, <= 5%); {errors} errors",
            a * c.alpha,
            100.0 * drift
        ),
    )
}

// -------------------------------------------------------------------- 11

fn definition_equivalence() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (k, (pq, q, r)) in [(2, 3, 7), (2, 4, 5), (3, 3, 4)].into_iter().enumerate() {
        let p = CoxeterPolygon::triangle(pq, q, r)
            .expect("triangle group")
            .into_polygon();
        let o = p.incenter();
        let ov = arr(o.vector());
        let rho = p
            .vertices()
            .iter()
            .map(|v| dist(ov, arr(v.vector())))
            .fold(0.0, f64::max);
        let mut worst = 0.0f64;
        for radius in [0.05, 0.1, 0.2, 0.4, 2.0] {
            // A hair larger than the guard, so rounding in rho cannot trip it.
            let ball =
                GroupBall::by_radius(&p, radius + 2.0 * rho + 1e-9, &o, &BallConfig::default())
                    .expect("ball");
            let guard = ball.radius().is_some_and(|b| b >= radius + 2.0 * rho);
            let cfg = SamplerConfig::new(SEED.wrapping_add(400 + k as u64));
            match group_thin_cross_check(&p, radius, 100_000, &ball, 1e-6, &cfg) {
                Ok(rep) => {
                    if !rep.warnings.is_empty() {
                        lines.push(rep.warnings.join("; "));
                    }
                    worst = worst.max(rep.disagreement_rate);
                    ok &= guard && rep.warnings.is_empty() && rep.disagreement_rate <= 0.005;
                }
                Err(_) => ok = false,
            }
        }
        lines.push(format!("({pq},{q},{r}) {worst:.2e}"));
    }
    outcome(
        ok,
        format!(
            "max disagreement rate over R in {{0.05,0.1,0.2,0.4,2}} at n = 1e5 (<= 0.5%): {}",
            lines.join(", ")
        ),
    )
}

// ----------------------------------------------------------------------

type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria: [Criterion; 11] = [
        ("trig consistency", Some(secs(5)), trig_consistency),
        ("golden values", None, golden_values),
        ("equidistant Jacobian", None, jacobian),
        ("thin-part lower bound", Some(secs(300)), theorem1),
        ("collar inequality", None, collar),
        ("tree bounds", Some(secs(30)), tree_bounds),
        ("escape paths", None, escape_paths),
        ("thick-fraction decay", None, thick_decay),
        ("minimal-length generators", Some(secs(120)), lemma6),
        ("short-edge surgery", None, surgery),
        ("thin-part definitions agree", None, definition_equivalence),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_time = limit.is_none_or(|l| took <= l);
        let passed = out.passed && in_time;
        let time = match limit {
            Some(l) => format!("{:.2} s (limit {} s)", took.as_secs_f64(), l.as_secs()),
            None => format!("{:.2} s", took.as_secs_f64()),
        };
        println!(
            "{} criterion {:>2} {name}: {} [{time}]",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            out.detail
        );
        if !passed {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 11 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!(
            "acceptance: {} of 11 criteria fail: {failed:?}",
            failed.len()
        );
        ExitCode::FAILURE
    }
}
