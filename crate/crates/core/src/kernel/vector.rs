use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::TOL;

/// A vector in Minkowski 3-space with form `-x0*y0 + x1*y1 + x2*y2`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LorentzVector {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
}

impl LorentzVector {
    pub const fn new(x0: f64, x1: f64, x2: f64) -> Self {
        LorentzVector { x0, x1, x2 }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        LorentzVector::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x0, self.x1, self.x2]
    }

    #[inline]
    pub fn mink(self, other: LorentzVector) -> f64 {
        -self.x0 * other.x0 + self.x1 * other.x1 + self.x2 * other.x2
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.mink(self)
    }

    /// Lorentz cross product `J (u x v)`: Minkowski-orthogonal to both factors.
    #[inline]
    pub fn cross(self, v: LorentzVector) -> LorentzVector {
        let u = self;
        LorentzVector::new(
            -(u.x1 * v.x2 - u.x2 * v.x1),
            u.x2 * v.x0 - u.x0 * v.x2,
            u.x0 * v.x1 - u.x1 * v.x0,
        )
    }

    /// Largest absolute coordinate.
    pub fn max_abs(self) -> f64 {
        self.x0.abs().max(self.x1.abs()).max(self.x2.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x0.is_finite() && self.x1.is_finite() && self.x2.is_finite()
    }
}

impl Add for LorentzVector {
    type Output = LorentzVector;
    #[inline]
    fn add(self, o: LorentzVector) -> LorentzVector {
        LorentzVector::new(self.x0 + o.x0, self.x1 + o.x1, self.x2 + o.x2)
    }
}

impl Sub for LorentzVector {
    type Output = LorentzVector;
    #[inline]
    fn sub(self, o: LorentzVector) -> LorentzVector {
        LorentzVector::new(self.x0 - o.x0, self.x1 - o.x1, self.x2 - o.x2)
    }
}

impl Neg for LorentzVector {
    type Output = LorentzVector;
    #[inline]
    fn neg(self) -> LorentzVector {
        LorentzVector::new(-self.x0, -self.x1, -self.x2)
    }
}

impl Mul<f64> for LorentzVector {
    type Output = LorentzVector;
    #[inline]
    fn mul(self, k: f64) -> LorentzVector {
        LorentzVector::new(self.x0 * k, self.x1 * k, self.x2 * k)
    }
}

impl Mul<LorentzVector> for f64 {
    type Output = LorentzVector;
    #[inline]
    fn mul(self, v: LorentzVector) -> LorentzVector {
        v * self
    }
}

impl Div<f64> for LorentzVector {
    type Output = LorentzVector;
    #[inline]
    fn div(self, k: f64) -> LorentzVector {
        LorentzVector::new(self.x0 / k, self.x1 / k, self.x2 / k)
    }
}

/// `mink(u, v) = -u0 v0 + u1 v1 + u2 v2`.
pub fn mink(u: LorentzVector, v: LorentzVector) -> f64 {
    u.mink(v)
}

/// A point of the hyperbolic plane: `q(v, v) = -1`, `v.x0 > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LorentzVector", into = "LorentzVector")]
pub struct HPoint(LorentzVector);

impl HPoint {
    pub const ORIGIN: HPoint = HPoint(LorentzVector::new(1.0, 0.0, 0.0));

    /// Validates `v` as a point of the upper sheet and rescales it onto the
    /// hyperboloid. Vectors whose form is off by more than the constructed
    /// tolerance (relative to their size) are rejected.
    pub fn new(v: LorentzVector) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::domain("non-finite coordinates"));
        }
        if v.x0 <= 0.0 {
            return Err(Error::domain("point is not on the upper sheet"));
        }
        let q = v.norm_sq();
        let scale = v.x0 * v.x0;
        if (q + 1.0).abs() > TOL.constructed * scale.max(1.0) {
            return Err(Error::domain(format!(
                "q(v,v) = {q} is not -1 within tolerance"
            )));
        }
        Ok(HPoint::normalize(v))
    }

    /// Wraps a vector already known to lie on the upper sheet.
    pub(crate) fn from_raw(v: LorentzVector) -> Self {
        debug_assert!(v.x0 > 0.0);
        HPoint(v)
    }

    /// Projects a future-timelike vector onto the hyperboloid.
    pub(crate) fn normalize(v: LorentzVector) -> Self {
        let q = v.norm_sq();
        debug_assert!(q < 0.0 && v.x0 > 0.0, "not future timelike: {v:?}");
        HPoint(v / (-q).sqrt())
    }

    /// Polar coordinates about the origin.
    pub fn from_polar(r: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        HPoint(LorentzVector::new(r.cosh(), r.sinh() * c, r.sinh() * s))
    }

    /// Point with Klein-model coordinates `(u, v)`, `u^2 + v^2 < 1`.
    pub fn from_klein(u: f64, v: f64) -> Result<Self> {
        let rho2 = u * u + v * v;
        if !(rho2 < 1.0) {
            return Err(Error::domain("Klein coordinates outside the unit disk"));
        }
        Ok(HPoint::normalize(LorentzVector::new(1.0, u, v)))
    }

    pub fn to_klein(self) -> (f64, f64) {
        (self.0.x1 / self.0.x0, self.0.x2 / self.0.x0)
    }

    #[inline]
    pub fn vector(self) -> LorentzVector {
        self.0
    }
}

impl TryFrom<LorentzVector> for HPoint {
    type Error = Error;
    fn try_from(v: LorentzVector) -> Result<Self> {
        HPoint::new(v)
    }
}

impl From<HPoint> for LorentzVector {
    fn from(p: HPoint) -> LorentzVector {
        p.0
    }
}

/// A point at infinity, stored as a null vector with `x0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LorentzVector", into = "LorentzVector")]
pub struct IdealPoint(LorentzVector);

impl IdealPoint {
    pub fn new(v: LorentzVector) -> Result<Self> {
        if !v.is_finite() || v.x0 <= 0.0 {
            return Err(Error::domain("ideal point must have positive x0"));
        }
        let w = v / v.x0;
        if w.norm_sq().abs() > TOL.constructed {
            return Err(Error::domain("ideal point is not a null vector"));
        }
        // Put it exactly on the unit circle.
        let r = (w.x1 * w.x1 + w.x2 * w.x2).sqrt();
        Ok(IdealPoint(LorentzVector::new(1.0, w.x1 / r, w.x2 / r)))
    }

    /// The ideal point in direction `theta` as seen from the origin.
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        IdealPoint(LorentzVector::new(1.0, c, s))
    }

    #[inline]
    pub fn vector(self) -> LorentzVector {
        self.0
    }
}

impl TryFrom<LorentzVector> for IdealPoint {
    type Error = Error;
    fn try_from(v: LorentzVector) -> Result<Self> {
        IdealPoint::new(v)
    }
}

impl From<IdealPoint> for LorentzVector {
    fn from(p: IdealPoint) -> LorentzVector {
        p.0
    }
}

/// A polygon vertex or segment endpoint: a point of the plane or of its
/// boundary at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Vertex {
    Finite(HPoint),
    Ideal(IdealPoint),
}

impl Vertex {
    #[inline]
    pub fn vector(&self) -> LorentzVector {
        match self {
            Vertex::Finite(p) => p.vector(),
            Vertex::Ideal(p) => p.vector(),
        }
    }

    pub fn is_ideal(&self) -> bool {
        matches!(self, Vertex::Ideal(_))
    }

    pub fn finite(&self) -> Option<HPoint> {
        match self {
            Vertex::Finite(p) => Some(*p),
            Vertex::Ideal(_) => None,
        }
    }
}

impl From<HPoint> for Vertex {
    fn from(p: HPoint) -> Self {
        Vertex::Finite(p)
    }
}

impl From<IdealPoint> for Vertex {
    fn from(p: IdealPoint) -> Self {
        Vertex::Ideal(p)
    }
}
