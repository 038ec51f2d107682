//! Closed-form hyperbolic trigonometry.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Side opposite `gamma` in the triangle with angles `alpha, beta, gamma`:
/// `cosh c = (cos a cos b + cos g) / (sin a sin b)`.
pub fn side_from_angles(alpha: f64, beta: f64, gamma: f64) -> Result<f64> {
    if !(alpha > 0.0 && beta > 0.0 && gamma > 0.0) {
        return Err(Error::domain("angles must be positive"));
    }
    if !(alpha + beta + gamma < PI) {
        return Err(Error::domain("angle sum must be below pi"));
    }
    let c = (alpha.cos() * beta.cos() + gamma.cos()) / (alpha.sin() * beta.sin());
    Ok(c.max(1.0).acosh())
}

/// Angles opposite `a`, `b`, `c` by the cosine rule.
pub fn angles_from_sides(a: f64, b: f64, c: f64) -> Result<[f64; 3]> {
    check_sides(a, b, c)?;
    let angle = |x: f64, y: f64, z: f64| {
        // angle opposite x
        let cos = (y.cosh() * z.cosh() - x.cosh()) / (y.sinh() * z.sinh());
        cos.clamp(-1.0, 1.0).acos()
    };
    Ok([angle(a, b, c), angle(b, c, a), angle(c, a, b)])
}

fn check_sides(a: f64, b: f64, c: f64) -> Result<()> {
    if !(a > 0.0 && b > 0.0 && c > 0.0) || !(a + b + c).is_finite() {
        return Err(Error::domain("side lengths must be positive and finite"));
    }
    let slack = 1e-12 * (a + b + c);
    if a > b + c + slack || b > a + c + slack || c > a + b + slack {
        return Err(Error::domain(
            "side lengths violate the triangle inequality",
        ));
    }
    Ok(())
}

/// Area of the triangle with side lengths `a, b, c`.
///
/// Uses the half-angle form of the hyperbolic Heron formula,
///
/// ```text
/// sin(A/2) = sqrt(sinh s sinh(s-a) sinh(s-b) sinh(s-c)) / (2 cosh(a/2) cosh(b/2) cosh(c/2))
/// cos(A/2) = (1 + cosh a + cosh b + cosh c)          / (4 cosh(a/2) cosh(b/2) cosh(c/2))
/// ```
///
/// and recovers `A = 2 atan2(sin, cos)`, which has no branch ambiguity since
/// `A/2` lies in `[0, pi/2)`.
pub fn heron_area(a: f64, b: f64, c: f64) -> Result<f64> {
    check_sides(a, b, c)?;
    let s = 0.5 * (a + b + c);
    let prod =
        s.sinh() * (s - a).max(0.0).sinh() * (s - b).max(0.0).sinh() * (s - c).max(0.0).sinh();
    let sin_half = 2.0 * prod.sqrt();
    let cos_half = 1.0 + a.cosh() + b.cosh() + c.cosh();
    Ok(2.0 * sin_half.atan2(cos_half))
}

/// `(n - 2) pi - sum(angles)` for an `n`-gon with the given interior angles.
pub fn gauss_bonnet_area(angles: &[f64]) -> Result<f64> {
    if angles.len() < 3 {
        return Err(Error::domain("a polygon needs at least three angles"));
    }
    if let Some(a) = angles.iter().find(|a| !(0.0..PI).contains(*a)) {
        return Err(Error::domain(format!("angle {a} outside [0, pi)")));
    }
    let area = (angles.len() - 2) as f64 * PI - angles.iter().sum::<f64>();
    if !(area > 0.0) {
        return Err(Error::domain(
            "angle sum too large for a hyperbolic polygon",
        ));
    }
    Ok(area)
}

/// Area Jacobian of `(t, y) -> exp_y(t nu)` flowing from the distance-1
/// equidistant curve of a geodesic back toward the geodesic, per unit `t` and
/// unit arclength along the curve: `cosh(1 - t) / cosh(1)`.
pub fn equidistant_jacobian(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain("t must lie in [0, 1]"));
    }
    Ok((1.0 - t).cosh() / 1f64.cosh())
}
