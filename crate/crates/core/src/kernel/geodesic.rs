use serde::{Deserialize, Serialize};

use super::vector::{HPoint, LorentzVector, Vertex};
use crate::error::{Error, Result};

/// A complete oriented geodesic, stored as its unit spacelike pole `e`.
///
/// The positive side is `{x : q(x, e) > 0}`. For a geodesic built with
/// [`Geodesic::through`]`(p, q)` this is the left of the direction `p -> q`
/// in the Klein projection, so a counterclockwise polygon lies on the
/// non-negative side of each of its edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geodesic {
    pole: LorentzVector,
}

impl Geodesic {
    pub fn from_pole(e: LorentzVector) -> Result<Self> {
        let q = e.norm_sq();
        if !e.is_finite() || q <= 0.0 {
            return Err(Error::domain("pole must be spacelike"));
        }
        Ok(Geodesic { pole: e / q.sqrt() })
    }

    /// The geodesic through two distinct (finite or ideal) points.
    pub fn through(p: &Vertex, q: &Vertex) -> Result<Self> {
        let (u, v) = (p.vector(), q.vector());
        let e = u.cross(v);
        let n = e.norm_sq();
        // |u x v| vanishes exactly when u and v are proportional.
        let scale = u.max_abs() * v.max_abs();
        if !(n > (1e-12 * scale).powi(2)) {
            return Err(Error::degenerate("points are proportional"));
        }
        Ok(Geodesic { pole: e / n.sqrt() })
    }

    #[inline]
    pub fn pole(&self) -> LorentzVector {
        self.pole
    }

    pub fn reversed(&self) -> Geodesic {
        Geodesic { pole: -self.pole }
    }

    /// `q(x, e)`; equals `sinh` of the signed distance for points.
    #[inline]
    pub fn side(&self, x: LorentzVector) -> f64 {
        x.mink(self.pole)
    }

    pub fn signed_distance(&self, x: &HPoint) -> f64 {
        self.side(x.vector()).asinh()
    }

    pub fn distance(&self, x: &HPoint) -> f64 {
        self.side(x.vector()).abs().asinh()
    }

    /// Reflection across the geodesic: `x - 2 q(x, e) e`.
    #[inline]
    pub fn reflect(&self, x: LorentzVector) -> LorentzVector {
        let k = x.mink(self.pole);
        #[cfg(feature = "inject-reflect-bug")]
        let k = -k;
        x - self.pole * (2.0 * k)
    }

    /// Orthogonal projection of `x` onto the geodesic.
    pub fn foot(&self, x: &HPoint) -> HPoint {
        let s = self.side(x.vector());
        // q(x - s e, x - s e) = -(1 + s^2) exactly; renormalizing numerically
        // would cancel to eps * x0^2 deep in a cusp.
        HPoint::from_raw((x.vector() - self.pole * s) / s.hypot(1.0))
    }
}

/// Geodesic through `p` and `q`; see [`Geodesic::through`].
pub fn geodesic_through(p: &Vertex, q: &Vertex) -> Result<Geodesic> {
    Geodesic::through(p, q)
}

/// Reflection of an arbitrary ambient vector across `g`.
pub fn reflect(g: &Geodesic, x: LorentzVector) -> LorentzVector {
    g.reflect(x)
}

/// Hyperbolic distance `arcosh(-q(p, q))`.
///
/// Evaluated as `2 asinh(|p - q| / 2)`, which is exact in form and avoids the
/// cancellation of `arcosh` near 1.
pub fn distance(p: &HPoint, q: &HPoint) -> Result<f64> {
    let (u, v) = (p.vector(), q.vector());
    let c = -u.mink(v);
    if !(c >= 1.0 - 1e-9 * u.x0.max(v.x0)) {
        return Err(Error::domain(format!("-q(p,q) = {c} < 1")));
    }
    Ok(point_distance(u, v))
}

/// Distance between two vectors already known to lie on the hyperboloid.
#[inline]
pub(crate) fn point_distance(u: LorentzVector, v: LorentzVector) -> f64 {
    let d = u - v;
    2.0 * (d.norm_sq().max(0.0).sqrt() * 0.5).asinh()
}

pub fn dist_point_geodesic(x: &HPoint, g: &Geodesic) -> f64 {
    g.distance(x)
}

/// Distance from `x` to the geodesic segment `[a, b]`.
///
/// The perpendicular foot is written as `f = la * a + lb * b`; it lies on the
/// segment iff both coefficients are non-negative, otherwise the nearer
/// endpoint wins. A foot can never fall beyond an ideal endpoint.
pub fn dist_point_segment(x: &HPoint, a: &Vertex, b: &Vertex) -> Result<f64> {
    let g = Geodesic::through(a, b)?;
    Ok(segment_distance_with(x, a, b, &g))
}

pub(crate) fn segment_distance_with(x: &HPoint, a: &Vertex, b: &Vertex, g: &Geodesic) -> f64 {
    let (la, lb) = foot_coefficients(x, a.vector(), b.vector(), g);
    if la >= 0.0 && lb >= 0.0 {
        return g.distance(x);
    }
    // Beyond b when la < 0, beyond a when lb < 0.
    let end = if la < 0.0 { b } else { a };
    match end {
        Vertex::Finite(p) => point_distance(x.vector(), p.vector()),
        Vertex::Ideal(_) => g.distance(x),
    }
}

/// Point of the segment `[a, b]` closest to `x`.
pub fn closest_point_on_segment(x: &HPoint, a: &Vertex, b: &Vertex) -> Result<HPoint> {
    let g = Geodesic::through(a, b)?;
    let (la, lb) = foot_coefficients(x, a.vector(), b.vector(), &g);
    let end = if la < 0.0 {
        Some(b)
    } else if lb < 0.0 {
        Some(a)
    } else {
        None
    };
    Ok(match end.and_then(|v| v.finite()) {
        Some(p) => p,
        None => g.foot(x),
    })
}

/// Coefficients of the perpendicular foot of `x` in the basis `(a, b)` of the
/// geodesic's plane (up to a common positive factor).
pub(crate) fn foot_coefficients(
    x: &HPoint,
    a: LorentzVector,
    b: LorentzVector,
    g: &Geodesic,
) -> (f64, f64) {
    let f = x.vector() - g.pole() * g.side(x.vector());
    let (aa, ab, bb) = (a.norm_sq(), a.mink(b), b.norm_sq());
    let (fa, fb) = (f.mink(a), f.mink(b));
    let det = aa * bb - ab * ab;
    let la = (fa * bb - fb * ab) / det;
    let lb = (aa * fb - ab * fa) / det;
    (la, lb)
}

/// Exponential map at `x` applied to the tangent vector `v`.
pub fn exp_map(x: &HPoint, v: LorentzVector) -> Result<HPoint> {
    let p = x.vector();
    let scale = v.max_abs().max(1.0) * p.x0;
    if p.mink(v).abs() > 1e-9 * scale {
        return Err(Error::domain("vector is not tangent at x"));
    }
    let n2 = v.norm_sq();
    if n2 <= 0.0 {
        return Ok(*x);
    }
    let n = n2.sqrt();
    Ok(HPoint::normalize(p * n.cosh() + v * (n.sinh() / n)))
}

/// Unit tangent at `x` pointing toward `w` (finite or ideal).
pub fn unit_tangent_toward(x: &HPoint, w: LorentzVector) -> Result<LorentzVector> {
    let p = x.vector();
    let u = w + p * w.mink(p);
    let n = u.norm_sq();
    if !(n > 0.0) {
        return Err(Error::degenerate("direction toward the point itself"));
    }
    Ok(u / n.sqrt())
}

/// Point at distance `t` from `x` along the geodesic toward `w`.
pub fn point_toward(x: &HPoint, w: &Vertex, t: f64) -> Result<HPoint> {
    let u = unit_tangent_toward(x, w.vector())?;
    Ok(HPoint::normalize(x.vector() * t.cosh() + u * t.sinh()))
}

/// Interior angle at the finite point `v` between the geodesic rays toward
/// `w1` and `w2` (each finite or ideal), in `[0, pi]`.
pub fn angle_at(v: &HPoint, w1: LorentzVector, w2: LorentzVector) -> Result<f64> {
    let u1 = unit_tangent_toward(v, w1)?;
    let u2 = unit_tangent_toward(v, w2)?;
    let cos = u1.mink(u2);
    let sin = u1.cross(u2).norm_sq().abs().sqrt();
    Ok(sin.atan2(cos))
}
