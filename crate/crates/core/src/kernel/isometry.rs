use std::ops::Mul;

use serde::{Deserialize, Serialize};

use super::geodesic::Geodesic;
use super::vector::{HPoint, LorentzVector};
use crate::tolerance::TOL;

/// A Lorentz matrix preserving the upper sheet, acting on column vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    m: [[f64; 3]; 3],
}

const J: [f64; 3] = [-1.0, 1.0, 1.0];

impl Isometry {
    pub const IDENTITY: Isometry = Isometry {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Wraps a raw matrix without checking the Lorentz condition.
    pub fn from_rows_unchecked(m: [[f64; 3]; 3]) -> Self {
        Isometry { m }
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        self.m
    }

    /// `I - 2 e e^T J`.
    pub fn reflection(g: &Geodesic) -> Self {
        let e = g.pole().to_array();
        let mut m = Self::IDENTITY.m;
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry -= 2.0 * e[i] * e[j] * J[j];
            }
        }
        #[cfg(feature = "inject-reflect-bug")]
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry += 4.0 * e[i] * e[j] * J[j];
            }
        }
        Isometry { m }
    }

    /// Rotation by `theta` about the origin.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Isometry {
            m: [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]],
        }
    }

    /// Translation by `t` along the `x1` axis.
    pub fn boost(t: f64) -> Self {
        let (ch, sh) = (t.cosh(), t.sinh());
        Isometry {
            m: [[ch, sh, 0.0], [sh, ch, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    #[inline]
    pub fn apply(&self, v: LorentzVector) -> LorentzVector {
        let m = &self.m;
        LorentzVector::new(
            m[0][0] * v.x0 + m[0][1] * v.x1 + m[0][2] * v.x2,
            m[1][0] * v.x0 + m[1][1] * v.x1 + m[1][2] * v.x2,
            m[2][0] * v.x0 + m[2][1] * v.x1 + m[2][2] * v.x2,
        )
    }

    pub fn apply_point(&self, p: &HPoint) -> HPoint {
        HPoint::normalize(self.apply(p.vector()))
    }

    /// `J m^T J`.
    pub fn inverse(&self) -> Self {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = J[i] * self.m[j][i] * J[j];
            }
        }
        Isometry { m: out }
    }

    /// Largest entry of `|m^T J m - J|`, scaled by the squared matrix size.
    #[allow(clippy::needless_range_loop)]
    pub fn drift(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let g: f64 = (0..3).map(|k| self.m[k][i] * J[k] * self.m[k][j]).sum();
                let target = if i == j { J[i] } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst / self.max_abs().powi(2).max(1.0)
    }

    pub fn is_lorentz(&self, tol: f64) -> bool {
        self.drift() <= tol && self.m[0][0] > 0.0
    }

    /// Whether the matrix maps the upper sheet to itself.
    pub fn preserves_upper_sheet(&self) -> bool {
        self.m[0][0] > 0.0
    }

    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }

    pub fn max_entry_distance(&self, other: &Isometry) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.m[i][j] - other.m[i][j]).abs());
            }
        }
        worst
    }

    fn column(&self, j: usize) -> LorentzVector {
        LorentzVector::new(self.m[0][j], self.m[1][j], self.m[2][j])
    }

    /// Lorentz Gram-Schmidt on the columns.
    pub fn renormalized(&self) -> Self {
        let c0 = self.column(0);
        let c0 = c0 / (-c0.norm_sq()).sqrt();
        let c1 = self.column(1);
        let c1 = c1 + c0 * c1.mink(c0);
        let c1 = c1 / c1.norm_sq().sqrt();
        let c2 = self.column(2);
        let c2 = c2 + c0 * c2.mink(c0) - c1 * c2.mink(c1);
        let c2 = c2 / c2.norm_sq().sqrt();
        let cols = [c0.to_array(), c1.to_array(), c2.to_array()];
        let mut m = [[0.0; 3]; 3];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..3 {
                m[i][j] = col[i];
            }
        }
        Isometry { m }
    }

    /// Product followed by renormalization once drift exceeds tolerance.
    pub fn compose(&self, rhs: &Isometry) -> Isometry {
        let p = *self * *rhs;
        if p.drift() > TOL.drift {
            p.renormalized()
        } else {
            p
        }
    }

    pub fn pow(&self, k: u32) -> Isometry {
        (0..k).fold(Isometry::IDENTITY, |acc, _| acc.compose(self))
    }
}

impl Mul for Isometry {
    type Output = Isometry;
    fn mul(self, rhs: Isometry) -> Isometry {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..3).map(|k| self.m[i][k] * rhs.m[k][j]).sum();
            }
        }
        Isometry { m: out }
    }
}
