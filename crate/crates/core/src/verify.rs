//! Invariant suites: each check records what was measured, the bound it was
//! held to and the slack left over (negative when it fails).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::FamilySpec;
use crate::kernel::{
    angles_from_sides, equidistant_jacobian, exp_map, gauss_bonnet_area, heron_area,
    point_distance, side_from_angles, Geodesic, HPoint, Isometry, LorentzVector, Vertex,
};
use crate::polygon::{CoxeterPolygon, Polygon};
use crate::refgroup::{
    bounded_factorization_at, check_gens_minlength_in, packing_check, BallConfig, GroupBall,
};
use crate::surgery::{
    angle_estimate_check, calibrate_u_prime, min_area_triangle, remove_small_edges,
    short_edge_corpus, span_triangle_check, surgery_thin_comparison, SurgeryConstants,
};
use crate::thinpart::{
    collar_epsilon, collar_inequality_check, sample_uniform, theorem1_constant, thin_ratio,
    with_retry, SamplerConfig,
};
use crate::tolerance::TOL;
use crate::triangulation::{balanced_triangulate, Direction, TriangulatedPolygon};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Kernel,
    Thm1,
    Tree,
    Lemma6,
    Surgery,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [
        Suite::Kernel,
        Suite::Thm1,
        Suite::Tree,
        Suite::Lemma6,
        Suite::Surgery,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Kernel => "kernel",
            Suite::Thm1 => "thm1",
            Suite::Tree => "tree",
            Suite::Lemma6 => "lemma6",
            Suite::Surgery => "surgery",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Monte Carlo samples per polygon for the statistical checks.
    pub samples: usize,
    /// Word length of the balls in the Lemma 6 suite; `None` uses 8 for the
    /// (2,3,7) triangle and 6 for the right-angled pentagon.
    pub ball_length: Option<usize>,
    pub surgery: SurgeryConstants,
    pub grid: usize,
}

impl VerifyConfig {
    pub fn new(seed: u64) -> Self {
        VerifyConfig {
            seed,
            samples: 100_000,
            ball_length: None,
            surgery: SurgeryConstants::default(),
            grid: SamplerConfig::default().grid,
        }
    }

    fn sampler(&self, salt: u64) -> SamplerConfig {
        SamplerConfig {
            grid: self.grid,
            seed: self.seed.wrapping_add(salt),
        }
    }
}

/// One invariant, evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub bound: f64,
    /// How far `measured` is from violating `bound`; negative on failure.
    pub slack: f64,
    pub detail: String,
}

impl Check {
    fn at_most(
        suite: Suite,
        name: &str,
        measured: f64,
        bound: f64,
        detail: impl Into<String>,
    ) -> Self {
        Check {
            suite: suite.name().into(),
            name: name.into(),
            passed: measured <= bound,
            measured,
            bound,
            slack: bound - measured,
            detail: detail.into(),
        }
    }

    fn at_least(
        suite: Suite,
        name: &str,
        measured: f64,
        bound: f64,
        detail: impl Into<String>,
    ) -> Self {
        Check {
            suite: suite.name().into(),
            name: name.into(),
            passed: measured >= bound,
            measured,
            bound,
            slack: measured - bound,
            detail: detail.into(),
        }
    }

    /// A check whose measurement is a count of failures.
    fn none_failed(suite: Suite, name: &str, failures: usize, detail: impl Into<String>) -> Self {
        Self::at_most(suite, name, failures as f64, 0.0, detail)
    }

    /// An operation that should have succeeded but returned an error.
    fn errored(suite: Suite, name: &str, e: &Error) -> Self {
        Check {
            suite: suite.name().into(),
            name: name.into(),
            passed: false,
            measured: f64::NAN,
            bound: f64::NAN,
            slack: f64::NEG_INFINITY,
            detail: format!("error: {e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub config: VerifyConfig,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Plain-text table, one line per check.
    pub fn render(&self) -> String {
        let width = self
            .checks
            .iter()
            .map(|c| c.suite.len() + c.name.len() + 1)
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let label = format!("{}/{}", c.suite, c.name);
            out.push_str(&format!(
                "{} {label:<width$}  measured {:<12.6e} bound {:<12.6e} slack {:<+12.4e} {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.measured,
                c.bound,
                c.slack,
                c.detail,
            ));
        }
        let failed = self.failures().count();
        out.push_str(&format!(
            "{}: {} checks, {failed} failed\n",
            if self.passed { "PASSED" } else { "FAILED" },
            self.checks.len()
        ));
        out
    }
}

/// Runs a suite. Errors from the library are recorded as failed checks;
/// only invalid configuration is returned as `Err`.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<VerifyReport> {
    cfg.surgery.validate()?;
    if cfg.samples < 1000 {
        return Err(Error::domain(format!(
            "{} samples is below the minimum of 1000",
            cfg.samples
        )));
    }
    SamplerConfig {
        grid: cfg.grid,
        seed: cfg.seed,
    }
    .validate()?;
    let mut checks = Vec::new();
    let suites: Vec<Suite> = match suite {
        Suite::All => Suite::EACH.to_vec(),
        s => vec![s],
    };
    for s in suites {
        match s {
            Suite::Kernel => kernel_suite(cfg, &mut checks),
            Suite::Thm1 => thm1_suite(cfg, &mut checks),
            Suite::Tree => tree_suite(cfg, &mut checks),
            Suite::Lemma6 => lemma6_suite(cfg, &mut checks),
            Suite::Surgery => surgery_suite(cfg, &mut checks),
            Suite::All => unreachable!(),
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        suite,
        config: *cfg,
        checks,
        passed,
    })
}

// ------------------------------------------------------------------ kernel

const KERNEL_TRIALS: usize = 10_000;

fn random_point(rng: &mut impl Rng, max_r: f64) -> HPoint {
    HPoint::from_polar(rng.gen_range(0.0..max_r), rng.gen_range(0.0..2.0 * PI))
}

fn random_geodesic(rng: &mut impl Rng) -> Geodesic {
    loop {
        let (a, b) = (random_point(rng, 3.0), random_point(rng, 3.0));
        if let Ok(g) = Geodesic::through(&Vertex::Finite(a), &Vertex::Finite(b)) {
            return g;
        }
    }
}

/// Random triangle angles in `[0.05, pi/2]` with sum below `pi`.
pub fn random_triangle_angles(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let a: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.05..=PI / 2.0));
        if a.iter().sum::<f64>() < PI - 1e-3 {
            return a;
        }
    }
}

fn kernel_suite(cfg: &VerifyConfig, out: &mut Vec<Check>) {
    let k = Suite::Kernel;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let (mut involution, mut fixed, mut isometry, mut matrix_gap, mut drift) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..KERNEL_TRIALS {
        let g = random_geodesic(&mut rng);
        let (x, y) = (random_point(&mut rng, 3.0), random_point(&mut rng, 3.0));
        // Rounding in x - 2 q(x, e) e grows like |x| |e|^2.
        let scale = x.vector().max_abs() * g.pole().max_abs().powi(2);
        let rx = g.reflect(x.vector());
        involution = involution.max((g.reflect(rx) - x.vector()).max_abs() / scale);
        let foot = g.foot(&x).vector();
        fixed = fixed.max(
            (g.reflect(foot) - foot).max_abs() / (foot.max_abs() * g.pole().max_abs().powi(2)),
        );
        let ry = g.reflect(y.vector());
        let before = point_distance(x.vector(), y.vector());
        isometry = isometry.max((point_distance(rx, ry) - before).abs());
        let m = Isometry::reflection(&g);
        matrix_gap = matrix_gap.max((m.apply(x.vector()) - rx).max_abs() / scale);
        drift = drift.max(m.drift());
    }
    out.push(Check::at_most(
        k,
        "reflect.involution",
        involution,
        TOL.algebraic,
        "max |s(s(x)) - x| / (|x| |e|^2)",
    ));
    out.push(Check::at_most(
        k,
        "reflect.fixes_geodesic",
        fixed,
        TOL.algebraic,
        "max |s(p) - p| / (|p| |e|^2), p on the geodesic",
    ));
    out.push(Check::at_most(
        k,
        "reflect.isometry",
        isometry,
        TOL.constructed,
        "max |d(sx, sy) - d(x, y)|",
    ));
    out.push(Check::at_most(
        k,
        "reflection_matrix.matches_reflect",
        matrix_gap,
        TOL.algebraic,
        "max |M x - s(x)| / (|x| |e|^2)",
    ));
    out.push(Check::at_most(
        k,
        "reflection_matrix.lorentz",
        drift,
        TOL.drift,
        "max |M^T J M - J|",
    ));

    let mut triangle = 0.0f64;
    let mut symmetric = 0.0f64;
    for _ in 0..KERNEL_TRIALS {
        let (x, y, z) = (
            random_point(&mut rng, 4.0),
            random_point(&mut rng, 4.0),
            random_point(&mut rng, 4.0),
        );
        let (dxy, dyz, dxz) = (
            point_distance(x.vector(), y.vector()),
            point_distance(y.vector(), z.vector()),
            point_distance(x.vector(), z.vector()),
        );
        triangle = triangle.max(dxz - dxy - dyz);
        symmetric = symmetric.max((dxy - point_distance(y.vector(), x.vector())).abs());
    }
    out.push(Check::at_most(
        k,
        "distance.triangle_inequality",
        triangle.max(0.0),
        TOL.algebraic,
        "max d(x,z) - d(x,y) - d(y,z)",
    ));
    out.push(Check::at_most(
        k,
        "distance.symmetry",
        symmetric,
        0.0,
        "max |d(x,y) - d(y,x)|",
    ));

    let mut heron = 0.0f64;
    let mut round_trip = 0.0f64;
    let mut failures = 0;
    for _ in 0..KERNEL_TRIALS {
        let ang = random_triangle_angles(&mut rng);
        let sides = (
            side_from_angles(ang[1], ang[2], ang[0]),
            side_from_angles(ang[2], ang[0], ang[1]),
            side_from_angles(ang[0], ang[1], ang[2]),
        );
        let (Ok(a), Ok(b), Ok(c)) = sides else {
            failures += 1;
            continue;
        };
        match (
            heron_area(a, b, c),
            gauss_bonnet_area(&ang),
            angles_from_sides(a, b, c),
        ) {
            (Ok(h), Ok(gb), Ok(back)) => {
                heron = heron.max((h - gb).abs());
                for (u, v) in back.iter().zip(ang) {
                    round_trip = round_trip.max((u - v).abs());
                }
            }
            _ => failures += 1,
        }
    }
    out.push(Check::at_most(
        k,
        "trig.heron_vs_gauss_bonnet",
        heron,
        TOL.constructed,
        format!("{KERNEL_TRIALS} triangles, angles in [0.05, pi/2]"),
    ));
    out.push(Check::at_most(
        k,
        "trig.angles_round_trip",
        round_trip,
        1e-8,
        "angles -> sides -> angles",
    ));
    out.push(Check::none_failed(
        k,
        "trig.domain",
        failures,
        "valid triangles rejected",
    ));

    match CoxeterPolygon::triangle(2, 3, 7) {
        Ok(t) => out.push(Check::at_most(
            k,
            "golden.triangle_237_area",
            (t.area() - PI / 42.0).abs(),
            1e-12,
            "area pi/42",
        )),
        Err(e) => out.push(Check::errored(k, "golden.triangle_237_area", &e)),
    }
    match CoxeterPolygon::regular(5, 2) {
        Ok(p) => {
            let golden = (1.0 + 5f64.sqrt()) / 2.0;
            let worst = p
                .edge_lengths()
                .iter()
                .map(|l| (l.cosh() - golden).abs())
                .fold(0.0, f64::max);
            out.push(Check::at_most(
                k,
                "golden.pentagon_cosh_side",
                worst,
                1e-12,
                "cosh(side) = (1 + sqrt 5)/2",
            ));
            out.push(Check::at_most(
                k,
                "golden.pentagon_area",
                (p.polygon().area() - PI / 2.0).abs(),
                1e-12,
                "area pi/2",
            ));
        }
        Err(e) => out.push(Check::errored(k, "golden.pentagon", &e)),
    }

    // Normal flow from the distance-1 equidistant curve of a geodesic in
    // general position, differentiated numerically.
    let g = random_geodesic(&mut rng);
    let base = g.foot(&random_point(&mut rng, 1.0));
    let along = tangent_along(&g, &base);
    let flow = |t: f64, u: f64| -> Option<LorentzVector> {
        let y = exp_map(&base, along * u).ok()?;
        let normal = g.pole() - y.vector() * (-y.vector().mink(g.pole()));
        let normal = normal / normal.mink(normal).sqrt();
        exp_map(&y, normal * (1.0 - t)).ok().map(|p| p.vector())
    };
    let h = 1e-5;
    let mut fd_err = 0.0f64;
    let mut ok = true;
    for i in 0..100 {
        let t = i as f64 / 99.0;
        let (t0, t1) = ((t - h).max(0.0), (t + h).min(1.0));
        let u = 0.3;
        let (Some(a), Some(b), Some(c), Some(d)) =
            (flow(t1, u), flow(t0, u), flow(t, u + h), flow(t, u - h))
        else {
            ok = false;
            continue;
        };
        let dt = (a - b) / (t1 - t0);
        // `u` is arclength on the geodesic; the curve at distance 1 is cosh 1 longer.
        let du = (c - d) / (2.0 * h * 1f64.cosh());
        let area = (dt.mink(dt) * du.mink(du) - dt.mink(du).powi(2)).sqrt();
        fd_err = fd_err.max((area - equidistant_jacobian(t).unwrap_or(f64::NAN)).abs());
    }
    if ok {
        out.push(Check::at_most(
            k,
            "jacobian.finite_difference",
            fd_err,
            TOL.finite_diff,
            "100 grid points on [0, 1]",
        ));
    } else {
        out.push(Check::errored(
            k,
            "jacobian.finite_difference",
            &Error::degenerate("flow map failed"),
        ));
    }
    let min = (0..=1000)
        .map(|i| equidistant_jacobian(i as f64 / 1000.0).unwrap_or(f64::NAN))
        .fold(f64::INFINITY, f64::min);
    out.push(Check::at_most(
        k,
        "jacobian.minimum",
        (min - 1.0 / 1f64.cosh()).abs(),
        TOL.constructed,
        "min over [0,1] = 1/cosh 1",
    ));
}

/// Unit tangent to `g` at the point `x` on it.
fn tangent_along(g: &Geodesic, x: &HPoint) -> LorentzVector {
    let t = g.pole().cross(x.vector());
    t / t.mink(t).sqrt()
}

// ------------------------------------------------------------------- thm1

/// Polygons on which the thin-part lower bound is checked.
pub fn theorem1_corpus() -> Vec<FamilySpec> {
    let mut v: Vec<FamilySpec> = [7, 12, 20, 50, 100, 200]
        .into_iter()
        .map(|n| FamilySpec::Regular { n, m: 3 })
        .collect();
    v.extend(
        [3, 10, 19, 24, 50, 200]
            .into_iter()
            .map(|n| FamilySpec::Ideal { n }),
    );
    v.extend(
        [(2, 3, 7), (2, 4, 5), (3, 3, 4)]
            .into_iter()
            .map(|(p, q, r)| FamilySpec::Triangle { p, q, r }),
    );
    v
}

fn thm1_suite(cfg: &VerifyConfig, out: &mut Vec<Check>) {
    let s = Suite::Thm1;
    let c = theorem1_constant();
    let expected = 1.0 / (1.0 + 1f64.cosh());
    out.push(Check::at_most(
        s,
        "constant.value",
        (c - expected).abs(),
        TOL.algebraic,
        "1/(1 + cosh 1)",
    ));
    out.push(Check::at_most(
        s,
        "constant.epsilon",
        (collar_epsilon() - 1.0 / 1f64.cosh()).abs(),
        TOL.algebraic,
        "collar Jacobian minimum",
    ));

    for (k, spec) in theorem1_corpus().into_iter().enumerate() {
        let name = format!("thin_ratio.{}", spec.id());
        let p = match spec.build() {
            Ok(p) => p,
            Err(e) => {
                out.push(Check::errored(s, &name, &e));
                continue;
            }
        };
        let sc = cfg.sampler(k as u64);
        let res = with_retry(cfg.samples, |n| {
            let e = thin_ratio(&p, 2.0, n, &sc)?;
            Ok((e.ratio >= c - 3.0 * e.stderr, e))
        });
        match res {
            Ok((_, e, n)) => out.push(Check::at_least(
                s,
                &name,
                e.ratio,
                c - 3.0 * e.stderr,
                format!("R = 2, n = {n}, stderr {:.2e}", e.stderr),
            )),
            Err(e) => out.push(Check::errored(s, &name, &e)),
        }
        if p.is_compact() && p.inradius() > 1.0 {
            let name = format!("collar.{}", spec.id());
            match collar_inequality_check(&p, cfg.samples, &sc) {
                Ok(r) => {
                    let lhs = r.core_fraction;
                    let rhs = 1f64.cosh() * r.collar_fraction + 3.0 * r.combined_stderr;
                    out.push(Check::at_most(
                        s,
                        &name,
                        lhs,
                        rhs,
                        "vol(P')/vol(P) <= cosh(1) vol(U)/vol(P) + 3 sigma",
                    ));
                    let partition = (r.collar_fraction + r.core_fraction - 1.0).abs();
                    out.push(Check::at_most(
                        s,
                        &format!("{name}.partition"),
                        partition,
                        3.0 * r.combined_stderr,
                        "vol(U) + vol(P') = vol(P)",
                    ));
                }
                Err(e) => out.push(Check::errored(s, &name, &e)),
            }
        }
    }
    match (FamilySpec::Ideal { n: 19 })
        .build()
        .and_then(|p| thin_ratio(&p, 0.0, cfg.samples, &cfg.sampler(99)))
    {
        Ok(e) => out.push(Check::at_most(
            s,
            "thin_ratio.zero_radius",
            e.ratio,
            0.0,
            "R = 0 on ideal-19",
        )),
        Err(e) => out.push(Check::errored(s, "thin_ratio.zero_radius", &e)),
    }
}

// ------------------------------------------------------------------- tree

pub const TREE_MAX_N: usize = 4096;

fn tree_suite(cfg: &VerifyConfig, out: &mut Vec<Check>) {
    let s = Suite::Tree;
    let mut radius_slack = f64::INFINITY;
    let mut depth_slack = f64::INFINITY;
    let mut depth_failures = Vec::new();
    let mut count_slack = f64::INFINITY;
    let mut errors = 0;
    for n in 3..=TREE_MAX_N {
        let Ok((_, tree)) = balanced_triangulate(n, Direction::Clockwise) else {
            errors += 1;
            continue;
        };
        let log = (n as f64).log2();
        radius_slack = radius_slack.min(log.floor() + 1.0 - tree.radius_from_root() as f64);
        let d = tree.min_leaf_depth() as f64 - (log - 1.0);
        if d < 0.0 {
            depth_failures.push(n);
        }
        depth_slack = depth_slack.min(d);
        let dist = tree.leaf_distance();
        for k in 0..=tree.radius_from_root() + 1 {
            let count = dist.iter().filter(|&&x| x <= k).count() as f64;
            count_slack =
                count_slack.min(count - ((n - 2) as f64 - 2f64.powf(log + 1.0 - k as f64)));
        }
    }
    out.push(Check::none_failed(
        s,
        "triangulate",
        errors,
        "n in 3..=4096",
    ));
    out.push(Check::at_least(
        s,
        "radius",
        radius_slack,
        0.0,
        "worst floor(log2 n) + 1 - radius",
    ));
    out.push(Check::at_least(
        s,
        "min_leaf_depth",
        depth_slack,
        0.0,
        format!(
            "worst min leaf depth - (log2 n - 1); {} of {} sizes fail{}",
            depth_failures.len(),
            TREE_MAX_N - 2,
            depth_failures
                .first()
                .map(|n| format!(", first n = {n}"))
                .unwrap_or_default()
        ),
    ));
    out.push(Check::at_least(
        s,
        "leaf_count",
        count_slack,
        0.0,
        "#{triangles within S of a leaf} >= (n-2) - 2^(log2 n + 1 - S)",
    ));

    for n in [19u32, 24, 100] {
        let name = format!("escape.ideal-{n}");
        match escape_check(n, cfg) {
            Ok((upper, lower, steps)) => {
                out.push(Check::at_least(
                    s,
                    &format!("{name}.upper"),
                    upper,
                    0.0,
                    "worst log(3)(S+1) - length",
                ));
                out.push(Check::at_least(
                    s,
                    &format!("{name}.lower"),
                    lower,
                    0.0,
                    "worst length - d(x, boundary) + rounding allowance",
                ));
                out.push(Check::at_least(
                    s,
                    &format!("{name}.steps"),
                    steps,
                    0.0,
                    "worst S + 1 - segments",
                ));
            }
            Err(e) => out.push(Check::errored(s, &name, &e)),
        }
    }
}

/// Rounding allowance when comparing path length with depth at `x`:
/// coordinates of size `x0` carry absolute error about `eps * x0`.
pub fn escape_rounding(x: &HPoint) -> f64 {
    1e-9 + 64.0 * f64::EPSILON * x.vector().x0
}

fn escape_check(n: u32, cfg: &VerifyConfig) -> Result<(f64, f64, f64)> {
    let p = CoxeterPolygon::ideal_regular(n)?.into_polygon();
    let tp = TriangulatedPolygon::new(p.clone(), Direction::Clockwise)?;
    let height = tp.tree.height();
    let xs = sample_uniform(&p, cfg.samples.min(10_000), &cfg.sampler(n as u64))?;
    let (mut upper, mut lower, mut steps) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    for (x, path) in xs.iter().zip(tp.escape_paths(&xs)) {
        let path = path?;
        let depth_to_leaf = height[path.triangles[0]] as f64;
        upper = upper.min(3f64.ln() * (depth_to_leaf + 1.0) - path.length);
        lower = lower.min(path.length - p.depth(x) + escape_rounding(x));
        steps = steps.min(depth_to_leaf + 1.0 - path.steps() as f64);
    }
    Ok((upper, lower, steps))
}

// ----------------------------------------------------------------- lemma6

fn lemma6_suite(cfg: &VerifyConfig, out: &mut Vec<Check>) {
    let s = Suite::Lemma6;
    let cases = [
        (FamilySpec::Triangle { p: 2, q: 3, r: 7 }, 8),
        (FamilySpec::Regular { n: 5, m: 2 }, 6),
    ];
    for (spec, default_l) in cases {
        let l = cfg.ball_length.unwrap_or(default_l);
        let name = format!("{}.L{l}", spec.id());
        let ball = spec.build().and_then(|p| {
            GroupBall::by_length(&p, l, &p.incenter(), &BallConfig::default()).map(|b| (p, b))
        });
        let (p, ball) = match ball {
            Ok(x) => x,
            Err(e) => {
                out.push(Check::errored(s, &name, &e));
                continue;
            }
        };
        let rep = check_gens_minlength_in(&ball);
        out.push(Check::none_failed(
            s,
            &format!("{name}.minlength"),
            rep.violations.len(),
            format!(
                "{} elements, {} pairs, min slack {:.3e}",
                rep.elements, rep.pairs_checked, rep.min_slack
            ),
        ));
        out.push(Check::at_least(
            s,
            &format!("{name}.separation"),
            rep.min_pairwise_distance,
            1e3 * TOL.dedup,
            "min pairwise matrix distance",
        ));
        let mut failed = 0;
        let mut wrong_length = 0;
        for idx in 0..ball.len() {
            match bounded_factorization_at(&ball, idx, ball.displacement(idx)) {
                Ok(w) if w.len() == ball.elements()[idx].length => {}
                Ok(_) => wrong_length += 1,
                Err(_) => failed += 1,
            }
        }
        out.push(Check::none_failed(
            s,
            &format!("{name}.bounded_factorization"),
            failed + wrong_length,
            format!(
                "{} elements, {failed} failed, {wrong_length} non-minimal",
                ball.len()
            ),
        ));
        let r = ball.displacement(ball.len() - 1) / 2.0;
        let pack = packing_check(&p, &ball, r, 1.0);
        out.push(Check::at_most(
            s,
            &format!("{name}.packing"),
            pack.count as f64,
            pack.bound,
            format!("orbit points within R = {r:.3} vs 2 pi (cosh(R + rho) - 1)/area"),
        ));
    }
}

// ---------------------------------------------------------------- surgery

const SURGERY_CORPUS: usize = 40;
const CALIBRATION_CORPUS: usize = 200;

fn surgery_suite(cfg: &VerifyConfig, out: &mut Vec<Check>) {
    let s = Suite::Surgery;
    let c = cfg.surgery;
    let cal = (
        calibrate_u_prime(CALIBRATION_CORPUS, cfg.seed, &c),
        calibrate_u_prime(CALIBRATION_CORPUS, cfg.seed.wrapping_add(1), &c),
    );
    let u_prime = match cal {
        (Ok(a), Ok(b)) => {
            out.push(Check::at_most(
                s,
                "u_prime.stability",
                (a.u_prime - b.u_prime).abs() / a.u_prime,
                0.05,
                format!("u' = {:.4} and {:.4} on two seeds", a.u_prime, b.u_prime),
            ));
            a.u_prime
        }
        (Err(e), _) | (_, Err(e)) => {
            out.push(Check::errored(s, "u_prime.stability", &e));
            return;
        }
    };
    let min_area = match min_area_triangle(c.eta) {
        Ok(m) => m.area,
        Err(e) => {
            out.push(Check::errored(s, "min_area_triangle", &e));
            return;
        }
    };
    let corpus = match short_edge_corpus(SURGERY_CORPUS, cfg.seed.wrapping_add(2), &c) {
        Ok(v) => v,
        Err(e) => {
            out.push(Check::errored(s, "corpus", &e));
            return;
        }
    };
    let (mut edge_slack, mut area_slack, mut defect, mut angle_slack) =
        (f64::INFINITY, f64::INFINITY, 0.0f64, f64::INFINITY);
    let (mut nonconvex, mut span_failures, mut errors) = (0, 0, 0);
    let mut first: Option<(Polygon, Polygon)> = None;
    for p in &corpus {
        let (q, rep) = match remove_small_edges(p, &c) {
            Ok(x) => x,
            Err(_) => {
                errors += 1;
                continue;
            }
        };
        edge_slack = edge_slack.min(rep.min_edge - rep.min_edge_bound);
        defect = defect.max(rep.area_defect.abs());
        nonconvex += !rep.convex as usize;
        for (&v, &a) in rep.removed.iter().zip(&rep.removed_areas) {
            area_slack = area_slack.min(u_prime * c.alpha - a);
            let i = (v + p.len() - 1) % p.len();
            match angle_estimate_check(p, i, &c, u_prime) {
                Ok(e) if e.sine_ok => angle_slack = angle_slack.min(e.gamma - e.angle_bound),
                _ => errors += 1,
            }
        }
        match span_triangle_check(p, &c, min_area) {
            Ok(v) => span_failures += v.iter().filter(|x| !(x.admissible && x.area_ok)).count(),
            Err(_) => errors += 1,
        }
        if first.is_none() {
            first = Some((p.polygon().clone(), q));
        }
    }
    let n = corpus.len();
    out.push(Check::none_failed(
        s,
        "surgery.errors",
        errors,
        format!("{n} hexagons"),
    ));
    out.push(Check::at_least(
        s,
        "min_edge",
        edge_slack,
        0.0,
        "worst min edge - (1 - alpha) eta",
    ));
    out.push(Check::at_most(
        s,
        "area_defect",
        defect,
        TOL.constructed,
        "area(P) - sum area(T_i) - area(P')",
    ));
    out.push(Check::none_failed(
        s,
        "convex",
        nonconvex,
        "non-convex outputs",
    ));
    out.push(Check::at_least(
        s,
        "removed_area",
        area_slack,
        0.0,
        "worst u' alpha - area(T_i)",
    ));
    out.push(Check::at_least(
        s,
        "angle_estimate",
        angle_slack,
        0.0,
        "worst gamma - (pi/2 - u' alpha)",
    ));
    out.push(Check::none_failed(
        s,
        "span_triangle",
        span_failures,
        format!("area >= {min_area:.4e} for admissible spans"),
    ));

    if let Some((p, q)) = first {
        match surgery_thin_comparison(&p, &q, 2.0, cfg.samples, &c, &cfg.sampler(3)) {
            Ok(cmp) => {
                out.push(Check::at_most(
                    s,
                    "thin_inflation",
                    cmp.after.ratio,
                    2.0 * cmp.before.ratio + 3.0 * cmp.combined_stderr,
                    "ratio(P') <= 2 ratio(P) + 3 sigma at R = 2",
                ));
                out.push(Check::at_most(
                    s,
                    "thin_containment",
                    cmp.max_excess,
                    cmp.containment_bound + TOL.constructed,
                    "thin points of P' within alpha eta of P's thin part",
                ));
            }
            Err(e) => out.push(Check::errored(s, "thin_inflation", &e)),
        }
    }
}
