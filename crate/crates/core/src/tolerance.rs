//! Numerical tolerances shared by every module.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Identities that hold up to rounding (involutions, bilinearity, ...).
    pub algebraic: f64,
    /// Identities between independently constructed objects.
    pub constructed: f64,
    /// Agreement with finite-difference derivatives.
    pub finite_diff: f64,
    /// Drift of a point or matrix off the hyperboloid/Lorentz group before it
    /// is renormalized.
    pub drift: f64,
    /// Max-entry distance under which two group matrices are merged.
    pub dedup: f64,
    /// Half-width of the band around a thin-part threshold that cross-checks ignore.
    pub threshold_band: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        TOL
    }
}

/// The defaults, usable in `const` contexts.
pub const TOL: Tolerances = Tolerances {
    algebraic: 1e-12,
    constructed: 1e-9,
    finite_diff: 1e-6,
    drift: 1e-10,
    dedup: 1e-8,
    threshold_band: 1e-6,
};
