//! Hyperboloid-model geometry of the hyperbolic plane.
//!
//! Points are vectors with `q(x, x) = -1` on the upper sheet, ideal points are
//! null vectors scaled to `x0 = 1`, geodesics are unit spacelike poles, and
//! isometries are Lorentz matrices.

mod geodesic;
mod isometry;
mod triangle;
mod trig;
mod vector;

pub use geodesic::{
    angle_at, closest_point_on_segment, dist_point_geodesic, dist_point_segment, distance, exp_map,
    geodesic_through, point_toward, reflect, unit_tangent_toward, Geodesic,
};
pub(crate) use geodesic::{point_distance, segment_distance_with};
pub use isometry::Isometry;
pub use triangle::Triangle;
pub use trig::{
    angles_from_sides, equidistant_jacobian, gauss_bonnet_area, heron_area, side_from_angles,
};
pub use vector::{mink, HPoint, IdealPoint, LorentzVector, Vertex};
