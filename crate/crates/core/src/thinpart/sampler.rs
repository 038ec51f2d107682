//! Uniform sampling with respect to hyperbolic area.
//!
//! The polygon is fanned into triangles from vertex 0, and each triangle is
//! covered by polar sectors anchored at a finite vertex (or, for a triangle
//! with three ideal vertices, at its incenter). In a sector with anchor `A`,
//! opening `Theta` and far side `BC`, the area element is
//! `(cosh r_max(theta) - 1) d theta` after integrating out `r`. Writing
//! `-q(u(theta), e) = rho cos(theta - phi)` for the pole `e` of `BC` and
//! `s = q(A, e)`, its primitive is
//! `asin(rho sin(theta - phi) / sqrt(rho^2 - s^2)) - theta`, which gives the
//! angular CDF in closed form. A `K`-point table of that CDF brackets the
//! inverse, and a safeguarded Newton step finishes it. The radius then
//! follows from the exact inverse CDF of `sinh r` on `[0, r_max]`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{unit_tangent_toward, Geodesic, HPoint, LorentzVector, Vertex};
use crate::polygon::Polygon;

/// Points per independently seeded sub-stream.
pub const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Resolution of the per-sector angular CDF table.
    pub grid: usize,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn new(seed: u64) -> Self {
        SamplerConfig { grid: 4096, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid < 16 {
            return Err(Error::Sampler(format!(
                "grid resolution {} < 16",
                self.grid
            )));
        }
        Ok(())
    }
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig::new(0)
    }
}

#[derive(Debug, Clone)]
struct Sector {
    anchor: LorentzVector,
    /// Unit tangent at the anchor toward the first far vertex.
    t1: LorentzVector,
    /// Unit tangent orthogonal to `t1`, on the side of the second far vertex.
    t2: LorentzVector,
    opening: f64,
    /// Pole of the far side, oriented so the anchor is on its positive side.
    pole: LorentzVector,
    s: f64,
    rho: f64,
    phi: f64,
    f0: f64,
    area: f64,
    /// Primitive of the angular density at `opening * i / (len - 1)`.
    table: Vec<f64>,
}

impl Sector {
    fn new(anchor: &HPoint, b: &Vertex, c: &Vertex, grid: usize) -> Result<Self> {
        let a = anchor.vector();
        let t1 = unit_tangent_toward(anchor, b.vector())?;
        let uc = unit_tangent_toward(anchor, c.vector())?;
        let cos = t1.mink(uc);
        let sin = t1.cross(uc).norm_sq().abs().sqrt();
        let opening = sin.atan2(cos);
        if !(opening > 0.0) {
            return Err(Error::Sampler("degenerate sector".into()));
        }
        let t2 = (uc - t1 * cos) / sin;
        let mut pole = Geodesic::through(b, c)?.pole();
        if a.mink(pole) < 0.0 {
            pole = -pole;
        }
        let s = a.mink(pole);
        // -q(u(theta), e) = alpha cos(theta) + beta sin(theta)
        let (alpha, beta) = (-t1.mink(pole), -t2.mink(pole));
        let rho = alpha.hypot(beta);
        let phi = beta.atan2(alpha);
        let mut sector = Sector {
            anchor: a,
            t1,
            t2,
            opening,
            pole,
            s,
            rho,
            phi,
            f0: 0.0,
            area: 0.0,
            table: Vec::new(),
        };
        // At an ideal far vertex the ray is asymptotic to the far side and
        // the primitive sits exactly at +-pi/2; evaluating it numerically
        // there loses half the digits to the square-root singularity.
        let pin = |v: &Vertex, theta: f64| {
            let raw = sector.primitive(theta);
            if v.is_ideal() {
                std::f64::consts::FRAC_PI_2.copysign(raw + theta) - theta
            } else {
                raw
            }
        };
        let (f0, f1) = (pin(b, 0.0), pin(c, opening));
        sector.f0 = f0;
        sector.area = f1 - f0;
        sector.table = (0..=grid)
            .map(|i| {
                sector
                    .cdf(opening * i as f64 / grid as f64)
                    .min(sector.area)
            })
            .collect();
        sector.table[grid] = sector.area;
        Ok(sector)
    }

    fn primitive(&self, theta: f64) -> f64 {
        // asin(rho sin(psi) / k), written with sqrt(k^2 - rho^2 sin^2 psi)
        // = sqrt(w^2 - s^2) to stay accurate near ideal far vertices.
        let (sn, cs) = (theta - self.phi).sin_cos();
        let w = self.rho * cs;
        let c = ((w - self.s) * (w + self.s)).max(0.0).sqrt();
        (self.rho * sn).atan2(c) - theta
    }

    /// Area of the part of the sector with polar angle below `theta`.
    fn cdf(&self, theta: f64) -> f64 {
        (self.primitive(theta) - self.f0).max(0.0)
    }

    fn direction(&self, theta: f64) -> LorentzVector {
        let (sn, cs) = theta.sin_cos();
        self.t1 * cs + self.t2 * sn
    }

    /// `cosh(r_max) - 1` along the ray at angle `theta`.
    fn density(&self, theta: f64) -> f64 {
        let w = -self.direction(theta).mink(self.pole);
        let d = w * w - self.s * self.s;
        if d <= 0.0 {
            f64::INFINITY
        } else {
            w / d.sqrt() - 1.0
        }
    }

    /// Polar angle whose CDF value is `target` (in `[0, area]`).
    fn invert(&self, target: f64) -> f64 {
        let grid = self.table.len() - 1;
        let i = self.table.partition_point(|&v| v < target).clamp(1, grid);
        let h = self.opening / grid as f64;
        let (mut lo, mut hi) = ((i - 1) as f64 * h, i as f64 * h);
        let (flo, fhi) = (self.table[i - 1], self.table[i]);
        let mut theta = if fhi > flo {
            lo + (target - flo) / (fhi - flo) * h
        } else {
            0.5 * (lo + hi)
        };
        for _ in 0..60 {
            let f = self.cdf(theta) - target;
            if f.abs() <= 1e-15 * self.area.max(1.0) {
                break;
            }
            if f > 0.0 {
                hi = theta;
            } else {
                lo = theta;
            }
            let step = theta - f / self.density(theta);
            theta = if step > lo && step < hi && step.is_finite() {
                step
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= 1e-16 * self.opening {
                break;
            }
        }
        theta
    }

    fn sample(&self, rng: &mut impl Rng) -> LorentzVector {
        let theta = self.invert(rng.gen::<f64>() * self.area);
        let u = self.direction(theta);
        // cosh r = 1 + U (cosh r_max - 1); written with d = cosh r - 1 for precision.
        let d = rng.gen::<f64>() * self.density(theta);
        let d = if d.is_finite() { d } else { 0.0 };
        let sinh = (d * (2.0 + d)).sqrt();
        self.anchor * (1.0 + d) + u * sinh
    }
}

/// Area-uniform sampler for a polygon.
#[derive(Debug, Clone)]
pub struct AreaSampler {
    sectors: Vec<Sector>,
    cumulative: Vec<f64>,
    area: f64,
}

impl AreaSampler {
    pub fn new(p: &Polygon, cfg: &SamplerConfig) -> Result<Self> {
        cfg.validate()?;
        let mut sectors = Vec::new();
        for i in 1..p.len() - 1 {
            let t = p.triangle(0, i, i + 1);
            match (0..3).find(|&j| !t.vertices[j].is_ideal()) {
                Some(j) => {
                    let anchor = t.vertices[j].finite().expect("finite vertex");
                    let (b, c) = (t.vertices[(j + 1) % 3], t.vertices[(j + 2) % 3]);
                    sectors.push(Sector::new(&anchor, &b, &c, cfg.grid)?);
                }
                None => {
                    let center = t.incenter();
                    for j in 0..3 {
                        let (b, c) = (t.vertices[j], t.vertices[(j + 1) % 3]);
                        sectors.push(Sector::new(&center, &b, &c, cfg.grid)?);
                    }
                }
            }
        }
        let mut acc = 0.0;
        let cumulative = sectors
            .iter()
            .map(|s| {
                acc += s.area;
                acc
            })
            .collect();
        if !(acc > 0.0 && acc.is_finite()) {
            return Err(Error::Sampler("polygon has no finite positive area".into()));
        }
        Ok(AreaSampler {
            sectors,
            cumulative,
            area: acc,
        })
    }

    /// Total area covered by the sectors.
    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn sample(&self, rng: &mut impl Rng) -> HPoint {
        let target = rng.gen::<f64>() * self.area;
        let i = self
            .cumulative
            .partition_point(|&c| c <= target)
            .min(self.sectors.len() - 1);
        // On the hyperboloid by construction; renormalizing would divide by
        // a q(v, v) that has cancelled to noise deep in a cusp.
        HPoint::from_raw(self.sectors[i].sample(rng))
    }

    /// Evaluates `f` on `n` samples. The stream is cut into chunks of
    /// [`CHUNK`] points, chunk `c` drawing from stream `c` of a ChaCha8
    /// generator seeded with `seed`; the output does not depend on the number
    /// of worker threads.
    pub fn map_samples<T, F>(&self, n: usize, seed: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&HPoint) -> T + Sync,
    {
        let chunks = n.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .flat_map_iter(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(c as u64);
                let len = CHUNK.min(n - c * CHUNK);
                let f = &f;
                (0..len)
                    .map(move |_| f(&self.sample(&mut rng)))
                    .collect::<Vec<_>>()
            })
            .collect()
    }
}

/// `n` points i.i.d. uniform with respect to area in `p`.
pub fn sample_uniform(p: &Polygon, n: usize, cfg: &SamplerConfig) -> Result<Vec<HPoint>> {
    let sampler = AreaSampler::new(p, cfg)?;
    Ok(sampler.map_samples(n, cfg.seed, |x| *x))
}
