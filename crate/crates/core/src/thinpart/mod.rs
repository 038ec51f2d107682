//! Thin parts and collars of polygons, estimated by Monte Carlo.
//!
//! Convention: a point is in the `R`-thin part when some group element moves
//! it by at most `R`; for a reflection polygon that is the same as lying
//! within `R/2` of the boundary.

mod sampler;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{equidistant_jacobian, mink, point_distance};
use crate::polygon::Polygon;
use crate::refgroup::GroupBall;

pub use sampler::{sample_uniform, AreaSampler, SamplerConfig, CHUNK};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThinRatioEstimate {
    pub ratio: f64,
    pub stderr: f64,
    pub n_samples: usize,
    #[serde(rename = "R")]
    pub r: f64,
    pub seed: u64,
}

impl ThinRatioEstimate {
    pub fn from_count(count: usize, n: usize, r: f64, seed: u64) -> Self {
        let ratio = if n == 0 { 0.0 } else { count as f64 / n as f64 };
        ThinRatioEstimate {
            ratio,
            stderr: binomial_stderr(ratio, n),
            n_samples: n,
            r,
            seed,
        }
    }
}

pub fn binomial_stderr(p: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Distance to the boundary of `n` area-uniform samples, in stream order.
pub fn sample_depths(p: &Polygon, n: usize, cfg: &SamplerConfig) -> Result<Vec<f64>> {
    let sampler = AreaSampler::new(p, cfg)?;
    if p.is_convex() {
        Ok(sampler.map_samples(n, cfg.seed, |x| p.depth(x).max(0.0)))
    } else {
        Ok(sampler.map_samples(n, cfg.seed, |x| p.dist_to_boundary(x).unwrap_or(0.0)))
    }
}

pub fn thin_ratio(p: &Polygon, r: f64, n: usize, cfg: &SamplerConfig) -> Result<ThinRatioEstimate> {
    Ok(thin_ratios(p, &[r], n, cfg)?.remove(0))
}

/// Thin ratios for several thresholds from one shared sample, so the
/// estimates are monotone in `R` sample by sample.
pub fn thin_ratios(
    p: &Polygon,
    rs: &[f64],
    n: usize,
    cfg: &SamplerConfig,
) -> Result<Vec<ThinRatioEstimate>> {
    if let Some(r) = rs.iter().find(|r| !(**r >= 0.0)) {
        return Err(Error::domain(format!("thin-part radius {r} must be >= 0")));
    }
    let depths = sample_depths(p, n, cfg)?;
    Ok(rs
        .iter()
        .map(|&r| {
            let count = depths.iter().filter(|&&d| d <= r / 2.0).count();
            ThinRatioEstimate::from_count(count, n, r, cfg.seed)
        })
        .collect())
}

/// Smallest collar Jacobian over a unit-width collar: `1 / cosh 1`.
pub fn collar_epsilon() -> f64 {
    // The Jacobian `cosh(1 - t) / cosh 1` decreases in t.
    equidistant_jacobian(1.0).expect("t = 1 is in range")
}

/// Lower bound on `vol(P_{<=2}) / vol(P)` for Coxeter polygons.
pub fn theorem1_constant() -> f64 {
    1.0 / (1.0 + 1.0 / collar_epsilon())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollarReport {
    pub area: f64,
    /// Fraction of area within distance 1 of the boundary.
    pub collar_fraction: f64,
    /// Fraction of area at distance at least 1 from the boundary.
    pub core_fraction: f64,
    pub collar_stderr: f64,
    pub core_stderr: f64,
    pub combined_stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
    /// True when the polygon has ideal vertices and the check is skipped.
    pub vacuous: bool,
    pub passed: bool,
}

/// Checks `vol(P') <= cosh(1) vol(U)` where `U` is the unit collar of the
/// boundary and `P'` its complement.
pub fn collar_inequality_check(p: &Polygon, n: usize, cfg: &SamplerConfig) -> Result<CollarReport> {
    let area = p.area();
    if !p.is_compact() {
        return Ok(CollarReport {
            area,
            collar_fraction: 0.0,
            core_fraction: 0.0,
            collar_stderr: 0.0,
            core_stderr: 0.0,
            combined_stderr: 0.0,
            n_samples: 0,
            seed: cfg.seed,
            vacuous: true,
            passed: true,
        });
    }
    let depths = sample_depths(p, n, cfg)?;
    let collar = depths.iter().filter(|&&d| d <= 1.0).count();
    let core = depths.iter().filter(|&&d| d >= 1.0).count();
    let (fu, fc) = (collar as f64 / n as f64, core as f64 / n as f64);
    let (su, sc) = (binomial_stderr(fu, n), binomial_stderr(fc, n));
    let combined = su.hypot(sc);
    let passed = fc * area <= 1f64.cosh() * fu * area + 3.0 * combined * area;
    Ok(CollarReport {
        area,
        collar_fraction: fu,
        core_fraction: fc,
        collar_stderr: su,
        core_stderr: sc,
        combined_stderr: combined,
        n_samples: n,
        seed: cfg.seed,
        vacuous: false,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckReport {
    #[serde(rename = "R")]
    pub r: f64,
    pub n_samples: usize,
    /// Samples within the tolerance band of either threshold, not compared.
    pub excluded: usize,
    pub disagreements: usize,
    pub disagreement_rate: f64,
    pub group_thin: usize,
    pub boundary_thin: usize,
    pub warnings: Vec<String>,
}

/// Compares "some non-trivial group element in `ball` moves `x` by at most
/// `R`" with "`x` is within `R/2` of the boundary" on area-uniform samples.
///
/// Every `x` in `P` lies within `rho` of the ball's basepoint, so a ball of
/// radius at least `R + 2 rho` contains every element moving some `x` in `P`
/// by at most `R`; a smaller radius is reported as a warning.
pub fn group_thin_cross_check(
    p: &Polygon,
    r: f64,
    n: usize,
    ball: &GroupBall,
    band: f64,
    cfg: &SamplerConfig,
) -> Result<CrossCheckReport> {
    if !(r >= 0.0) {
        return Err(Error::domain(format!("thin-part radius {r} must be >= 0")));
    }
    let mut warnings = Vec::new();
    let o = ball.basepoint();
    let rho = p
        .vertices()
        .iter()
        .map(|v| match v.finite() {
            Some(q) => point_distance(o.vector(), q.vector()),
            None => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    match ball.radius() {
        Some(radius) if radius >= r + 2.0 * rho => {}
        Some(radius) => warnings.push(format!(
            "ball radius {radius} is below R + 2*rho = {}; group indicator may miss elements",
            r + 2.0 * rho
        )),
        None => warnings.push("ball is bounded by word length; radius margin unknown".into()),
    }
    let elements: Vec<_> = ball.elements().iter().skip(1).map(|e| e.matrix).collect();
    let sampler = AreaSampler::new(p, cfg)?;
    let rows = sampler.map_samples(n, cfg.seed, |x| {
        let depth = p.depth(x).max(0.0);
        let xv = x.vector();
        let min_c = elements
            .iter()
            .map(|g| -mink(xv, g.apply(xv)))
            .fold(f64::INFINITY, f64::min);
        let disp = if min_c.is_finite() {
            2.0 * ((min_c.max(1.0) - 1.0) / 2.0).sqrt().asinh()
        } else {
            f64::INFINITY
        };
        (depth, disp)
    });
    let mut report = CrossCheckReport {
        r,
        n_samples: n,
        excluded: 0,
        disagreements: 0,
        disagreement_rate: 0.0,
        group_thin: 0,
        boundary_thin: 0,
        warnings,
    };
    for (depth, disp) in rows {
        let a = disp <= r;
        let b = depth <= r / 2.0;
        report.group_thin += a as usize;
        report.boundary_thin += b as usize;
        if (disp - r).abs() < band || (depth - r / 2.0).abs() < band {
            report.excluded += 1;
        } else if a != b {
            report.disagreements += 1;
        }
    }
    let compared = n - report.excluded;
    report.disagreement_rate = if compared == 0 {
        0.0
    } else {
        report.disagreements as f64 / compared as f64
    };
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThinRow {
    pub polygon_id: String,
    pub n_vertices: usize,
    #[serde(rename = "R")]
    pub r: f64,
    pub ratio: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl ThinRow {
    pub fn new(polygon_id: &str, p: &Polygon, e: &ThinRatioEstimate) -> Self {
        ThinRow {
            polygon_id: polygon_id.to_string(),
            n_vertices: p.len(),
            r: e.r,
            ratio: e.ratio,
            stderr: e.stderr,
            n_samples: e.n_samples,
            seed: e.seed,
        }
    }
}

/// Thick fractions `1 - thin_ratio(P, R)` for each polygon and radius; the
/// `ratio` column holds the thick fraction.
pub fn thick_fraction_decay(
    family: &[(String, Polygon)],
    rs: &[f64],
    n: usize,
    cfg: &SamplerConfig,
) -> Result<Vec<ThinRow>> {
    let mut rows = Vec::new();
    for (id, p) in family {
        for e in thin_ratios(p, rs, n, cfg)? {
            let mut row = ThinRow::new(id, p, &e);
            row.ratio = 1.0 - e.ratio;
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Runs a statistical check; if it fails, runs it once more with four
/// times the samples. Returns the last outcome and the sample count used.
pub fn with_retry<T>(
    n: usize,
    mut check: impl FnMut(usize) -> Result<(bool, T)>,
) -> Result<(bool, T, usize)> {
    let (ok, value) = check(n)?;
    if ok {
        return Ok((true, value, n));
    }
    let (ok, value) = check(4 * n)?;
    Ok((ok, value, 4 * n))
}
