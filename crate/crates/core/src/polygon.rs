//! Finite-area polygons in the hyperbolic plane, and the Coxeter ones among them.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{
    angle_at, gauss_bonnet_area, point_distance, segment_distance_with, side_from_angles, Geodesic,
    HPoint, IdealPoint, Isometry, LorentzVector, Triangle, Vertex,
};
use crate::tolerance::TOL;

/// Order `m` of a vertex: interior angle `pi / m`, or an ideal vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AngleOrder {
    Finite(u32),
    Infinite,
}

impl AngleOrder {
    pub fn angle(self) -> f64 {
        match self {
            AngleOrder::Finite(m) => PI / m as f64,
            AngleOrder::Infinite => 0.0,
        }
    }
}

impl fmt::Display for AngleOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AngleOrder::Finite(m) => write!(f, "{m}"),
            AngleOrder::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for AngleOrder {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            AngleOrder::Finite(m) => s.serialize_u32(*m),
            AngleOrder::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for AngleOrder {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(u32),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(m) if m >= 2 => Ok(AngleOrder::Finite(m)),
            Repr::Int(m) => Err(serde::de::Error::custom(format!("order {m} is below 2"))),
            Repr::Str(s) if s == "inf" => Ok(AngleOrder::Infinite),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("unknown order {s:?}"))),
        }
    }
}

/// A polygon given by a cyclic, counterclockwise list of finite or ideal
/// vertices. Angles are unconstrained; this is the output type of surgery.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Vertex>,
    /// `edges[i]` runs from vertex `i` to vertex `i + 1`, interior on its positive side.
    edges: Vec<Geodesic>,
    convex: bool,
}

/// Alias matching the role the type plays for surgery outputs.
pub type GeneralPolygon = Polygon;

impl Polygon {
    pub fn new(vertices: Vec<Vertex>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidPolygon(format!("{n} vertices")));
        }
        let edges = (0..n)
            .map(|i| Geodesic::through(&vertices[i], &vertices[(i + 1) % n]))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::InvalidPolygon(format!("bad edge: {e}")))?;
        let convex = edges.iter().all(|g| {
            vertices
                .iter()
                .all(|v| g.side(v.vector()) >= -TOL.constructed * v.vector().max_abs().max(1.0))
        });
        Ok(Polygon {
            vertices,
            edges,
            convex,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Vertex {
        &self.vertices[i % self.len()]
    }

    pub fn edges(&self) -> &[Geodesic] {
        &self.edges
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn is_compact(&self) -> bool {
        self.vertices.iter().all(|v| !v.is_ideal())
    }

    pub fn interior_angle(&self, i: usize) -> f64 {
        let n = self.len();
        match self.vertices[i] {
            Vertex::Ideal(_) => 0.0,
            Vertex::Finite(p) => angle_at(
                &p,
                self.vertices[(i + n - 1) % n].vector(),
                self.vertices[(i + 1) % n].vector(),
            )
            .expect("consecutive vertices are distinct"),
        }
    }

    pub fn interior_angles(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.interior_angle(i)).collect()
    }

    /// `(n - 2) pi` minus the sum of the measured interior angles.
    pub fn area(&self) -> f64 {
        (self.len() - 2) as f64 * PI - self.interior_angles().iter().sum::<f64>()
    }

    /// Side lengths in cyclic order; infinite when an endpoint is ideal.
    pub fn edge_lengths(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.edge_length(i)).collect()
    }

    pub fn edge_length(&self, i: usize) -> f64 {
        match (self.vertex(i), self.vertex(i + 1)) {
            (Vertex::Finite(a), Vertex::Finite(b)) => point_distance(a.vector(), b.vector()),
            _ => f64::INFINITY,
        }
    }

    pub fn perimeter(&self) -> f64 {
        self.edge_lengths().iter().sum()
    }

    /// Smallest distance between two non-adjacent finite vertices; `None` when
    /// no such pair exists.
    pub fn min_nonadjacent_vertex_distance(&self) -> Option<f64> {
        let n = self.len();
        let mut best: Option<f64> = None;
        for i in 0..n {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                if let (Vertex::Finite(a), Vertex::Finite(b)) = (self.vertex(i), self.vertex(j)) {
                    let d = point_distance(a.vector(), b.vector());
                    best = Some(best.map_or(d, |m| m.min(d)));
                }
            }
        }
        best
    }

    /// Whether `x` is weakly inside every edge (boundary counts as inside).
    pub fn contains(&self, x: &HPoint) -> bool {
        let v = x.vector();
        let tol = TOL.constructed * v.x0;
        self.edges.iter().all(|g| g.side(v) >= -tol)
    }

    /// Distance from an interior point to the boundary, as the minimum over
    /// the edge segments.
    pub fn dist_to_boundary(&self, x: &HPoint) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::Outside);
        }
        let n = self.len();
        Ok((0..n)
            .map(|i| {
                segment_distance_with(
                    x,
                    &self.vertices[i],
                    &self.vertices[(i + 1) % n],
                    &self.edges[i],
                )
            })
            .fold(f64::INFINITY, f64::min))
    }

    /// `sinh` of the distance to the boundary for a point of a convex polygon.
    ///
    /// In a convex polygon the nearest boundary point of an interior point is
    /// the nearest point of some edge line, so only poles are needed.
    #[inline]
    pub fn depth_sinh(&self, x: LorentzVector) -> f64 {
        self.edges
            .iter()
            .map(|g| g.side(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance to the boundary for a point of a convex polygon; see [`Polygon::depth_sinh`].
    pub fn depth(&self, x: &HPoint) -> f64 {
        self.depth_sinh(x.vector()).asinh()
    }

    /// The interior point farthest from the boundary, by nested ternary search
    /// over Klein coordinates.
    pub fn incenter(&self) -> HPoint {
        let klein: Vec<(f64, f64)> = self
            .vertices
            .iter()
            .map(|v| {
                let w = v.vector();
                (w.x1 / w.x0, w.x2 / w.x0)
            })
            .collect();
        let (mut u0, mut u1) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut v0, mut v1) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(u, v) in &klein {
            u0 = u0.min(u);
            u1 = u1.max(u);
            v0 = v0.min(v);
            v1 = v1.max(v);
        }
        let objective = |u: f64, v: f64| {
            let r2 = u * u + v * v;
            if r2 >= 1.0 {
                return -1e6 * r2;
            }
            let p = LorentzVector::new(1.0, u, v) / (1.0 - r2).sqrt();
            self.depth_sinh(p)
        };
        let best_v = |u: f64| ternary_max(v0, v1, |v| objective(u, v));
        let u = ternary_max(u0, u1, |u| objective(u, best_v(u)));
        let v = best_v(u);
        HPoint::from_klein(u, v).unwrap_or(HPoint::ORIGIN)
    }

    pub fn inradius(&self) -> f64 {
        self.depth(&self.incenter())
    }

    /// Triangle on three of the vertices.
    pub fn triangle(&self, i: usize, j: usize, k: usize) -> Triangle {
        Triangle::new(*self.vertex(i), *self.vertex(j), *self.vertex(k))
    }

    /// Polygon on the vertices whose indices are not listed, in order.
    pub fn without_vertices(&self, removed: &[usize]) -> Result<Polygon> {
        let kept = (0..self.len())
            .filter(|i| !removed.contains(i))
            .map(|i| self.vertices[i])
            .collect();
        Polygon::new(kept)
    }

    pub fn transformed(&self, m: &Isometry) -> Result<Polygon> {
        let vertices = self
            .vertices
            .iter()
            .map(|v| match v {
                Vertex::Finite(p) => Ok(Vertex::Finite(m.apply_point(p))),
                Vertex::Ideal(p) => IdealPoint::new(m.apply(p.vector())).map(Vertex::Ideal),
            })
            .collect::<Result<Vec<_>>>()?;
        Polygon::new(vertices)
    }
}

fn ternary_max(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..100 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    0.5 * (lo + hi)
}

/// A polygon whose finite angles are `pi / m_i`, `m_i >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoxeterPolygon {
    polygon: Polygon,
    orders: Vec<AngleOrder>,
}

impl Deref for CoxeterPolygon {
    type Target = Polygon;
    fn deref(&self) -> &Polygon {
        &self.polygon
    }
}

impl CoxeterPolygon {
    /// Checks the declared orders against the geometry and convexity.
    pub fn new(vertices: Vec<Vertex>, orders: Vec<AngleOrder>) -> Result<Self> {
        let polygon = Polygon::new(vertices)?;
        if orders.len() != polygon.len() {
            return Err(Error::InvalidPolygon(format!(
                "{} orders for {} vertices",
                orders.len(),
                polygon.len()
            )));
        }
        let report = validate_coxeter(&polygon, Some(&orders));
        if !report.passed {
            return Err(Error::InvalidPolygon(report.summary()));
        }
        let sum: f64 = orders.iter().map(|o| o.angle()).sum();
        if !((polygon.len() - 2) as f64 * PI - sum > 0.0) {
            return Err(Error::InvalidPolygon("non-positive area".into()));
        }
        Ok(CoxeterPolygon { polygon, orders })
    }

    /// Triangle with angles `pi/p, pi/q, pi/r`: first vertex at the origin,
    /// first edge along the positive `x1` axis.
    pub fn triangle(p: u32, q: u32, r: u32) -> Result<Self> {
        if p < 2 || q < 2 || r < 2 {
            return Err(Error::domain("orders must be at least 2"));
        }
        let (a, b, c) = (PI / p as f64, PI / q as f64, PI / r as f64);
        let (pl, ql, rl) = (p as u64, q as u64, r as u64);
        if ql * rl + pl * rl + pl * ql >= pl * ql * rl {
            return Err(Error::domain(format!(
                "({p},{q},{r}) is spherical or Euclidean: 1/p + 1/q + 1/r >= 1"
            )));
        }
        let side_ab = side_from_angles(a, b, c)?;
        let side_ac = side_from_angles(a, c, b)?;
        let vertices = vec![
            Vertex::Finite(HPoint::ORIGIN),
            Vertex::Finite(HPoint::from_polar(side_ab, 0.0)),
            Vertex::Finite(HPoint::from_polar(side_ac, a)),
        ];
        let orders = [p, q, r].map(AngleOrder::Finite).to_vec();
        CoxeterPolygon::new(vertices, orders)
    }

    /// Regular `n`-gon with all angles `pi/m`, centered at the origin.
    pub fn regular(n: u32, m: u32) -> Result<Self> {
        if n < 3 || m < 2 {
            return Err(Error::domain("need n >= 3 and m >= 2"));
        }
        let (nf, mf) = (n as f64, m as f64);
        // Integer form of (n - 2) pi > n pi / m, so the Euclidean case is exact.
        let (lhs, rhs) = ((n as u64 - 2) * m as u64, n as u64);
        if lhs <= rhs {
            let kind = if lhs == rhs { "Euclidean" } else { "spherical" };
            return Err(Error::domain(format!(
                "regular ({n},{m}) polygon is {kind}, not hyperbolic: angle sum n pi/m >= (n-2) pi"
            )));
        }
        // Right triangle center / vertex / edge midpoint: cosh R = cot(pi/n) cot(pi/2m).
        let cosh_r = 1.0 / ((PI / nf).tan() * (PI / (2.0 * mf)).tan());
        let r = cosh_r.acosh();
        let vertices = (0..n)
            .map(|k| Vertex::Finite(HPoint::from_polar(r, 2.0 * PI * k as f64 / nf)))
            .collect();
        CoxeterPolygon::new(vertices, vec![AngleOrder::Finite(m); n as usize])
    }

    /// Regular ideal `n`-gon centered at the origin.
    pub fn ideal_regular(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain("need n >= 3"));
        }
        let vertices = (0..n)
            .map(|k| Vertex::Ideal(IdealPoint::from_angle(2.0 * PI * k as f64 / n as f64)))
            .collect();
        CoxeterPolygon::new(vertices, vec![AngleOrder::Infinite; n as usize])
    }

    /// Right-angled hexagon whose sides 0, 2, 4 have lengths `a, b, c`.
    ///
    /// The remaining sides follow from `cosh a' = (cosh b cosh c + cosh a) / (sinh b sinh c)`
    /// for the side `a'` opposite `a`.
    ///
    /// A short side makes its two neighbours long and nearly parallel, and
    /// closing a turtle walk around such a hexagon amplifies rounding by
    /// about `e^(b' + c')`. Instead the six side lines are built so that
    /// consecutive ones are exactly perpendicular: lines 0-2 by walking
    /// forward from vertex 0, lines 5 and 4 by walking backward, and line 3
    /// as the common perpendicular of lines 2 and 4. Vertices are the
    /// intersections of consecutive lines; the side lengths are then checked.
    pub fn right_angled_hexagon(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && c > 0.0) {
            return Err(Error::domain("side lengths must be positive"));
        }
        let opposite = |x: f64, y: f64, z: f64| {
            ((y.cosh() * z.cosh() + x.cosh()) / (y.sinh() * z.sinh())).acosh()
        };
        let sides = [
            a,
            opposite(c, a, b),
            b,
            opposite(a, b, c),
            c,
            opposite(b, c, a),
        ];
        let first = hexagon_vertices(&sides, Isometry::IDENTITY)?;
        // Re-run from a frame that puts the centroid at the origin.
        let sum = first
            .iter()
            .fold(LorentzVector::new(0.0, 0.0, 0.0), |acc, v| acc + v.vector());
        let c = HPoint::normalize(sum).vector();
        let start = Isometry::boost(-c.x0.acosh()).compose(&Isometry::rotation(-c.x2.atan2(c.x1)));
        let vertices = hexagon_vertices(&sides, start)?;
        let gap = (0..6)
            .map(|i| {
                let d = point_distance(vertices[i].vector(), vertices[(i + 1) % 6].vector());
                (d - sides[i]).abs() / sides[i].max(1.0)
            })
            .fold(0.0, f64::max);
        // The angles are exact by construction; the lengths inherit the
        // conditioning of the long sides, hence the looser check.
        if gap > 1e-7 {
            return Err(Error::InvalidPolygon(format!(
                "hexagon side lengths off by {gap}"
            )));
        }
        CoxeterPolygon::new(vertices, vec![AngleOrder::Finite(2); 6])
    }

    pub fn orders(&self) -> &[AngleOrder] {
        &self.orders
    }

    pub fn polygon(&self) -> &Polygon {
        &self.polygon
    }

    pub fn into_polygon(self) -> Polygon {
        self.polygon
    }

    /// Exact Gauss-Bonnet area from the orders.
    pub fn area(&self) -> f64 {
        let angles: Vec<f64> = self.orders.iter().map(|o| o.angle()).collect();
        gauss_bonnet_area(&angles).expect("validated at construction")
    }
}

/// Vertices of the right-angled hexagon with the given side lengths, with
/// vertex 0 at `start(origin)` and side 0 leaving along `start(+x1)`.
fn hexagon_vertices(sides: &[f64; 6], start: Isometry) -> Result<Vec<Vertex>> {
    // Pole of the x1-axis, oriented so that its left side is positive.
    let ez = LorentzVector::new(0.0, 0.0, 1.0);
    let quarter = Isometry::rotation(PI / 2.0);
    let mut poles = [ez; 6];
    let mut frame = start;
    for (i, side) in sides.iter().enumerate().take(3) {
        poles[i] = frame.apply(ez);
        frame = frame.compose(&Isometry::boost(*side)).compose(&quarter);
    }
    // Walking backward the interior is on the right.
    let mut frame = start.compose(&quarter);
    poles[5] = -frame.apply(ez);
    frame = frame
        .compose(&Isometry::boost(sides[5]))
        .compose(&Isometry::rotation(-PI / 2.0));
    poles[4] = -frame.apply(ez);
    let perp = poles[2].cross(poles[4]);
    let n2 = perp.norm_sq();
    if !(n2 > 0.0) {
        return Err(Error::degenerate(
            "sides 2 and 4 have no common perpendicular",
        ));
    }
    poles[3] = perp / n2.sqrt();
    let inside = start.apply(HPoint::ORIGIN.vector());
    if poles[3].mink(inside) < 0.0 {
        poles[3] = -poles[3];
    }
    (0..6)
        .map(|i| {
            let p = poles[(i + 5) % 6].cross(poles[i]);
            let p = if p.x0 < 0.0 { -p } else { p };
            let q = -p.norm_sq();
            if !(q > 0.0) {
                return Err(Error::degenerate("consecutive sides do not meet"));
            }
            Ok(Vertex::Finite(HPoint::normalize(p / q.sqrt())))
        })
        .collect()
}

/// Per-vertex line of a [`CoxeterReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleCheck {
    pub index: usize,
    pub angle: f64,
    pub nearest_order: AngleOrder,
    pub declared_order: Option<AngleOrder>,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoxeterReport {
    pub angles: Vec<AngleCheck>,
    pub convex: bool,
    pub max_deviation: f64,
    pub passed: bool,
}

impl CoxeterReport {
    pub fn summary(&self) -> String {
        let bad: Vec<String> = self
            .angles
            .iter()
            .filter(|a| {
                a.deviation >= TOL.constructed
                    || a.declared_order.is_some_and(|d| d != a.nearest_order)
            })
            .map(|a| {
                format!(
                    "vertex {} angle {} (nearest pi/{})",
                    a.index, a.angle, a.nearest_order
                )
            })
            .collect();
        format!(
            "convex: {}, max deviation {:e}, offending: [{}]",
            self.convex,
            self.max_deviation,
            bad.join("; ")
        )
    }
}

/// Compares each interior angle with the nearest `pi/m` (and with the
/// declared order when given) and checks convexity.
pub fn validate_coxeter(p: &Polygon, declared: Option<&[AngleOrder]>) -> CoxeterReport {
    let angles: Vec<AngleCheck> = (0..p.len())
        .map(|i| {
            let declared_order = declared.and_then(|d| d.get(i).copied());
            let angle = p.interior_angle(i);
            let nearest_order = if p.vertex(i).is_ideal() {
                AngleOrder::Infinite
            } else {
                AngleOrder::Finite(((PI / angle).round().max(2.0)).min(u32::MAX as f64) as u32)
            };
            // Measure against the declared order if present, else the nearest one.
            let target = declared_order.unwrap_or(nearest_order);
            let deviation = match (p.vertex(i), target) {
                (Vertex::Ideal(_), AngleOrder::Infinite) => 0.0,
                (Vertex::Ideal(_), _) | (Vertex::Finite(_), AngleOrder::Infinite) => f64::INFINITY,
                (Vertex::Finite(_), t) => (angle - t.angle()).abs(),
            };
            AngleCheck {
                index: i,
                angle,
                nearest_order,
                declared_order,
                deviation,
            }
        })
        .collect();
    let max_deviation = angles.iter().map(|a| a.deviation).fold(0.0, f64::max);
    let passed = p.is_convex() && max_deviation < TOL.constructed;
    CoxeterReport {
        angles,
        convex: p.is_convex(),
        max_deviation,
        passed,
    }
}
