use std::f64::consts::PI;

use super::geodesic::{angle_at, point_distance, Geodesic};
use super::vector::{HPoint, LorentzVector, Vertex};
use crate::error::Result;

/// A triangle with finite or ideal vertices, in counterclockwise order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub vertices: [Vertex; 3],
}

impl Triangle {
    pub fn new(a: Vertex, b: Vertex, c: Vertex) -> Self {
        Triangle {
            vertices: [a, b, c],
        }
    }

    /// Interior angle at vertex `i`; zero at an ideal vertex.
    pub fn angle(&self, i: usize) -> Result<f64> {
        match self.vertices[i] {
            Vertex::Ideal(_) => Ok(0.0),
            Vertex::Finite(p) => angle_at(
                &p,
                self.vertices[(i + 1) % 3].vector(),
                self.vertices[(i + 2) % 3].vector(),
            ),
        }
    }

    pub fn angles(&self) -> Result<[f64; 3]> {
        Ok([self.angle(0)?, self.angle(1)?, self.angle(2)?])
    }

    /// Gauss-Bonnet area, `pi` minus the angle sum (clamped at zero).
    pub fn area(&self) -> Result<f64> {
        let [a, b, c] = self.angles()?;
        Ok((PI - a - b - c).max(0.0))
    }

    /// Length of the side opposite vertex `i` (infinite when an endpoint is ideal).
    pub fn side(&self, i: usize) -> f64 {
        let (p, q) = (self.vertices[(i + 1) % 3], self.vertices[(i + 2) % 3]);
        match (p, q) {
            (Vertex::Finite(p), Vertex::Finite(q)) => point_distance(p.vector(), q.vector()),
            _ => f64::INFINITY,
        }
    }

    /// Oriented geodesic along the side opposite vertex `i`; the triangle is
    /// on its non-negative side.
    pub fn side_geodesic(&self, i: usize) -> Result<Geodesic> {
        Geodesic::through(&self.vertices[(i + 1) % 3], &self.vertices[(i + 2) % 3])
    }

    /// The point equidistant from the three side lines:
    /// `|B x C| A + |C x A| B + |A x B| C`, valid for ideal vertices too.
    pub fn incenter(&self) -> HPoint {
        let [a, b, c] = self.vertices.map(|v| v.vector());
        let w = |u: LorentzVector, v: LorentzVector| u.cross(v).norm_sq().abs().sqrt();
        HPoint::normalize(a * w(b, c) + b * w(c, a) + c * w(a, b))
    }
}
