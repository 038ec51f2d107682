//! Removal of short edges from Coxeter polygons, and the area estimates
//! that control it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{angle_at, heron_area, point_distance, Triangle};
use crate::polygon::{CoxeterPolygon, GeneralPolygon, Polygon};
use crate::thinpart::{thin_ratio, AreaSampler, SamplerConfig, ThinRatioEstimate};
use crate::tolerance::TOL;

#[cfg(test)]
mod tests;

use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurgeryConstants {
    /// Short-edge threshold.
    pub eta: f64,
    /// Fraction of `eta` below which an edge is removed; in `(0, 1/2)`.
    pub alpha: f64,
}

impl Default for SurgeryConstants {
    fn default() -> Self {
        SurgeryConstants {
            eta: 0.1,
            alpha: 0.1,
        }
    }
}

impl SurgeryConstants {
    pub fn new(eta: f64, alpha: f64) -> Result<Self> {
        let c = SurgeryConstants { eta, alpha };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::domain(format!(
                "eta = {} must be positive",
                self.eta
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(Error::domain(format!(
                "alpha = {} must lie in (0, 1/2)",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Removal threshold `alpha * eta`.
    pub fn eta_prime(&self) -> f64 {
        self.alpha * self.eta
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurgeryReport {
    /// Indices (in the input polygon) of the removed vertices.
    pub removed: Vec<usize>,
    /// Area of each removed triangle `(v_i, v_{i+1}, v_{i+2})`.
    pub removed_areas: Vec<f64>,
    pub min_edge: f64,
    /// `(1 - alpha) eta`.
    pub min_edge_bound: f64,
    pub min_edge_ok: bool,
    pub area_before: f64,
    pub area_after: f64,
    pub area_ratio: f64,
    /// `area(P) - sum area(T_i) - area(P')`.
    pub area_defect: f64,
    pub convex: bool,
    pub thin: Option<ThinComparison>,
}

/// Drops `v_{i+1}` for every edge `(v_i, v_{i+1})` of length at most
/// `alpha * eta`.
///
/// Two adjacent edges of length at most `eta` are a precondition violation.
pub fn remove_small_edges(
    p: &CoxeterPolygon,
    c: &SurgeryConstants,
) -> Result<(GeneralPolygon, SurgeryReport)> {
    c.validate()?;
    if !p.is_compact() {
        return Err(Error::Precondition(
            "surgery needs a compact polygon".into(),
        ));
    }
    let n = p.len();
    let lengths = p.edge_lengths();
    for i in 0..n {
        let j = (i + 1) % n;
        if lengths[i] <= c.eta && lengths[j] <= c.eta {
            return Err(Error::Precondition(format!(
                "adjacent edges {i} (length {}) and {j} (length {}) are both <= eta = {}",
                lengths[i], lengths[j], c.eta
            )));
        }
    }
    let removed: Vec<usize> = (0..n)
        .filter(|&i| lengths[i] <= c.eta_prime())
        .map(|i| (i + 1) % n)
        .collect();
    if n - removed.len() < 3 {
        return Err(Error::Precondition(
            "surgery would leave fewer than 3 vertices".into(),
        ));
    }
    let removed_areas: Vec<f64> = removed
        .iter()
        .map(|&v| {
            let i = (v + n - 1) % n;
            p.triangle(i, v, (v + 1) % n).area()
        })
        .collect::<Result<_>>()?;
    let out = p.without_vertices(&removed)?;
    let min_edge = out.edge_lengths().into_iter().fold(f64::INFINITY, f64::min);
    let min_edge_bound = (1.0 - c.alpha) * c.eta;
    let area_before = p.polygon().area();
    let area_after = out.area();
    let report = SurgeryReport {
        area_defect: area_before - removed_areas.iter().sum::<f64>() - area_after,
        removed,
        removed_areas,
        min_edge,
        min_edge_bound,
        min_edge_ok: min_edge >= min_edge_bound,
        area_before,
        area_after,
        area_ratio: area_after / area_before,
        convex: out.is_convex(),
        thin: None,
    };
    Ok((out, report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThinComparison {
    pub before: ThinRatioEstimate,
    pub after: ThinRatioEstimate,
    pub combined_stderr: f64,
    /// `ratio(P') <= 2 ratio(P) + 3 sigma`.
    pub inflation_ok: bool,
    /// Largest `d(y, ∂P) - R/2` over sampled thin points `y` of `P'`.
    pub max_excess: f64,
    pub containment_bound: f64,
    pub containment_ok: bool,
}

impl ThinComparison {
    pub fn passed(&self) -> bool {
        self.inflation_ok && self.containment_ok
    }
}

/// Compares the thin ratios of `p` and its surgered version `q` at `r`, and
/// checks that every sampled thin point of `q` lies within `alpha * eta` of
/// the thin part of `p`.
pub fn surgery_thin_comparison(
    p: &Polygon,
    q: &Polygon,
    r: f64,
    n: usize,
    c: &SurgeryConstants,
    cfg: &SamplerConfig,
) -> Result<ThinComparison> {
    let before = thin_ratio(p, r, n, cfg)?;
    let after = thin_ratio(q, r, n, cfg)?;
    let combined = before.stderr.hypot(after.stderr);
    let sampler = AreaSampler::new(q, cfg)?;
    // Inside the convex polygon `p`, the distance to its thin part is the
    // excess of the depth over `r / 2`.
    let excess = sampler.map_samples(n, cfg.seed ^ 0x5eed, |y| {
        if q.depth(y) <= r / 2.0 {
            (p.depth(y) - r / 2.0).max(0.0)
        } else {
            0.0
        }
    });
    let max_excess = excess.into_iter().fold(0.0, f64::max);
    let bound = c.eta_prime();
    Ok(ThinComparison {
        before,
        after,
        combined_stderr: combined,
        inflation_ok: after.ratio <= 2.0 * before.ratio + 3.0 * combined,
        max_excess,
        containment_bound: bound,
        containment_ok: max_excess <= bound + TOL.constructed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinAreaTriangle {
    pub l0: f64,
    pub area: f64,
    pub sides: [f64; 3],
    pub angles: [f64; 3],
    /// Constraints active at the minimizer, e.g. `"a = l0"`, `"gamma = pi/2"`.
    pub active: Vec<String>,
    /// Width of the search box above `l0`.
    pub lambda: f64,
    /// Smallest area found on the far faces of the box.
    pub far_face_min: f64,
}

const GRID: usize = 200;
const REFINE_GRID: usize = 21;
const REFINE_ROUNDS: usize = 5;

/// Area of the triangle with sides `a, b, c` if it exists and has no
/// obtuse angle.
fn feasible_area(a: f64, b: f64, c: f64) -> Option<f64> {
    if a >= b + c || b >= a + c || c >= a + b {
        return None;
    }
    let (ca, cb, cc) = (a.cosh(), b.cosh(), c.cosh());
    // The angle opposite `a` is at most pi/2 iff cosh b cosh c >= cosh a.
    if cb * cc < ca || ca * cc < cb || ca * cb < cc {
        return None;
    }
    heron_area(a, b, c).ok()
}

fn grid_min(lo: [f64; 3], hi: [f64; 3], k: usize) -> Option<(f64, [f64; 3])> {
    let at = |d: usize, i: usize| lo[d] + (hi[d] - lo[d]) * i as f64 / (k - 1) as f64;
    (0..k)
        .into_par_iter()
        .filter_map(|i| {
            let a = at(0, i);
            let mut best: Option<(f64, [f64; 3])> = None;
            for j in 0..k {
                let b = at(1, j);
                for l in 0..k {
                    let c = at(2, l);
                    if let Some(area) = feasible_area(a, b, c) {
                        if best.is_none_or(|(m, _)| area < m) {
                            best = Some((area, [a, b, c]));
                        }
                    }
                }
            }
            best
        })
        .min_by(|x, y| x.0.total_cmp(&y.0))
}

/// Smallest area of a triangle with all sides at least `l0` and no obtuse
/// angle, by a grid search over `[l0, l0 + lambda]^3` with local refinement.
pub fn min_area_triangle(l0: f64) -> Result<MinAreaTriangle> {
    if !(l0 > 0.0 && l0.is_finite()) {
        return Err(Error::domain(format!("l0 = {l0} must be positive")));
    }
    let lambda = 2.0 * l0.max(1.0);
    let top = l0 + lambda;
    let (mut area, mut x) = grid_min([l0; 3], [top; 3], GRID)
        .ok_or_else(|| Error::domain("no feasible triangle in the search box"))?;
    let mut h = lambda / (GRID - 1) as f64;
    for _ in 0..REFINE_ROUNDS {
        let lo = x.map(|v| (v - 2.0 * h).max(l0));
        let hi = x.map(|v| (v + 2.0 * h).min(top));
        if let Some((a, y)) = grid_min(lo, hi, REFINE_GRID) {
            if a < area {
                area = a;
                x = y;
            }
        }
        h = 4.0 * h / (REFINE_GRID - 1) as f64;
    }
    // Far faces: one side pinned at the top of the box.
    let far_face_min = (0..3)
        .filter_map(|d| {
            let mut lo = [l0; 3];
            let hi = [top; 3];
            lo[d] = top;
            grid_min(lo, hi, 60)
        })
        .map(|(a, _)| a)
        .fold(f64::INFINITY, f64::min);
    let angles = crate::kernel::angles_from_sides(x[0], x[1], x[2])?;
    let mut active = Vec::new();
    for (name, s) in ["a", "b", "c"].iter().zip(x) {
        if (s - l0).abs() <= 1e-12 * l0.max(1.0) {
            active.push(format!("{name} = l0"));
        }
    }
    for (name, g) in ["alpha", "beta", "gamma"].iter().zip(angles) {
        if (g - FRAC_PI_2).abs() <= 1e-6 {
            active.push(format!("{name} = pi/2"));
        }
    }
    Ok(MinAreaTriangle {
        l0,
        area,
        sides: x,
        angles,
        active,
        lambda,
        far_face_min,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleEstimate {
    pub short_edge: usize,
    /// Length of the short edge `(v_i, v_{i+1})`.
    pub short: f64,
    /// `d(v_i, v_{i+2})`.
    pub a: f64,
    /// `d(v_{i+1}, v_{i+2})`.
    pub c: f64,
    /// Angle of the removed triangle at `v_i`.
    pub gamma: f64,
    /// `sinh(a - eta) / sinh(a)`.
    pub sine_bound: f64,
    pub sine_ok: bool,
    /// `pi/2 - u' alpha`.
    pub angle_bound: f64,
    pub angle_ok: bool,
    /// Whether the polygon angle at `v_{i+1}` is a right angle, where the
    /// sine law below applies.
    pub right_angle: bool,
    /// `|sinh(a) - sinh(c) / sin(gamma)|`.
    pub sine_law_residual: f64,
}

/// Checks `sin(gamma) >= sinh(a - eta)/sinh(a)` and
/// `gamma >= pi/2 - u' alpha` for the triangle cut off by removing `v_{i+1}`,
/// where `(v_i, v_{i+1})` is the short edge.
pub fn angle_estimate_check(
    p: &CoxeterPolygon,
    i: usize,
    c: &SurgeryConstants,
    u_prime: f64,
) -> Result<AngleEstimate> {
    let n = p.len();
    let (v0, v1, v2) = (p.vertex(i), p.vertex(i + 1), p.vertex(i + 2));
    let short = p.edge_length(i);
    if short > c.eta_prime() {
        return Err(Error::Precondition(format!(
            "edge {i} has length {short} > alpha * eta = {}",
            c.eta_prime()
        )));
    }
    let (Some(x0), Some(x1), Some(x2)) = (v0.finite(), v1.finite(), v2.finite()) else {
        return Err(Error::Precondition("surgery needs finite vertices".into()));
    };
    let a = point_distance(x0.vector(), x2.vector());
    let cc = point_distance(x1.vector(), x2.vector());
    let gamma = angle_at(&x0, x1.vector(), x2.vector())?;
    let sine_bound = (a - c.eta).sinh() / a.sinh();
    let angle_bound = FRAC_PI_2 - u_prime * c.alpha;
    let right_angle = (p.interior_angle((i + 1) % n) - FRAC_PI_2).abs() < TOL.constructed;
    Ok(AngleEstimate {
        short_edge: i,
        short,
        a,
        c: cc,
        gamma,
        sine_bound,
        sine_ok: gamma.sin() >= sine_bound,
        angle_bound,
        angle_ok: gamma >= angle_bound,
        right_angle,
        sine_law_residual: (a.sinh() - cc.sinh() / gamma.sin()).abs(),
    })
}

/// Right-angled hexagon with one side of length `short` and two
/// non-adjacent sides `b`, `c`.
pub fn short_edge_hexagon(short: f64, b: f64, c: f64) -> Result<CoxeterPolygon> {
    CoxeterPolygon::right_angled_hexagon(short, b, c)
}

/// Seeded family of right-angled hexagons with exactly one short side, of
/// length in `[alpha eta / 2, alpha eta]`, and every other side longer than
/// `eta`.
pub fn short_edge_corpus(
    count: usize,
    seed: u64,
    c: &SurgeryConstants,
) -> Result<Vec<CoxeterPolygon>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let short = rng.gen_range(0.5..=1.0) * c.eta_prime();
        let b = rng.gen_range(0.3..2.5);
        let cc = rng.gen_range(0.3..2.5);
        let h = short_edge_hexagon(short, b, cc)?;
        let others_long = h.edge_lengths().iter().filter(|&&l| l <= c.eta).count() == 1;
        if others_long {
            out.push(h);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub seed: u64,
    pub polygons: usize,
    /// Largest `area(T_i) / alpha`.
    pub area_constant: f64,
    /// Largest `(pi/2 - gamma) / alpha`.
    pub angle_constant: f64,
    /// Working `u'`: the larger of the two.
    pub u_prime: f64,
}

/// Empirical `u'` over a seeded short-edge corpus.
pub fn calibrate_u_prime(count: usize, seed: u64, c: &SurgeryConstants) -> Result<Calibration> {
    let mut cal = Calibration {
        seed,
        polygons: count,
        area_constant: 0.0,
        angle_constant: 0.0,
        u_prime: 0.0,
    };
    for p in short_edge_corpus(count, seed, c)? {
        let (_, report) = remove_small_edges(&p, c)?;
        for (&v, &area) in report.removed.iter().zip(&report.removed_areas) {
            let i = (v + p.len() - 1) % p.len();
            let est = angle_estimate_check(&p, i, c, 0.0)?;
            cal.area_constant = cal.area_constant.max(area / c.alpha);
            cal.angle_constant = cal.angle_constant.max((FRAC_PI_2 - est.gamma) / c.alpha);
        }
    }
    cal.u_prime = cal.area_constant.max(cal.angle_constant);
    Ok(cal)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanCheck {
    /// Vertex indices `(i - 1, i, i + 2)` around the short edge `(i, i + 1)`.
    pub vertices: [usize; 3],
    pub sides: [f64; 3],
    pub angles: [f64; 3],
    pub area: f64,
    /// All sides at least `eta` and no obtuse angle.
    pub admissible: bool,
    /// `area >= min_area_triangle(eta)` (only meaningful when admissible).
    pub area_ok: bool,
}

/// For each short edge `(v_i, v_{i+1})`, the triangle spanned by
/// `v_{i-1}, v_i, v_{i+2}` compared against the minimum-area bound.
pub fn span_triangle_check(
    p: &CoxeterPolygon,
    c: &SurgeryConstants,
    min_area: f64,
) -> Result<Vec<SpanCheck>> {
    let n = p.len();
    let lengths = p.edge_lengths();
    (0..n)
        .filter(|&i| lengths[i] <= c.eta_prime())
        .map(|i| {
            let idx = [(i + n - 1) % n, i, (i + 2) % n];
            let t = Triangle::new(*p.vertex(idx[0]), *p.vertex(idx[1]), *p.vertex(idx[2]));
            let sides = [t.side(0), t.side(1), t.side(2)];
            let angles = t.angles()?;
            let area = t.area()?;
            let admissible = sides.iter().all(|&s| s >= c.eta)
                && angles.iter().all(|&g| g <= FRAC_PI_2 + TOL.constructed);
            Ok(SpanCheck {
                vertices: idx,
                sides,
                angles,
                area,
                admissible,
                area_ok: area >= min_area,
            })
        })
        .collect()
}
