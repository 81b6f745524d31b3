//! Parabolic conduction band with a global chemical potential.

use crate::{Error, Result};

/// `ξ_p = p²/2m − μ` and `v = p/m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    mass: f64,
    mu: f64,
}

impl Band {
    pub fn new(mass: f64, mu: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter { name: "effective_mass", reason: "must be positive" });
        }
        if !mu.is_finite() {
            return Err(Error::InvalidParameter { name: "mu", reason: "must be finite" });
        }
        Ok(Band { mass, mu })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// On-shell energy measured from the chemical potential.
    pub fn xi(&self, p: f64) -> f64 {
        p * p / (2.0 * self.mass) - self.mu
    }

    pub fn velocity(&self, p: f64) -> f64 {
        p / self.mass
    }

    /// `√(2mμ)`, or `None` when μ ≤ 0 (no Fermi surface).
    pub fn fermi_momentum(&self) -> Option<f64> {
        (self.mu > 0.0).then(|| libm::sqrt(2.0 * self.mass * self.mu))
    }
}
