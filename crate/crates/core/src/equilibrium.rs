//! Linear temperature profile and the local Fermi–Dirac equilibrium
//! `f₀(p, x) = 1 / (exp(ξ_p / k_B T(x)) + 1)`.

use alloc::vec::Vec;

use crate::band::Band;
use crate::grid::{Field2, SimulationGrid};
use crate::quadrature::simpson;
use crate::units::UnitSystem;
use crate::{Error, Result};

/// `T(x) = T₀ + k·x` on `[0, L]`, strictly positive throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureProfile {
    t0: f64,
    gradient: f64,
    length: f64,
}

impl TemperatureProfile {
    /// `t0` in K, `gradient` in K/nm, `length` in nm.
    pub fn new(t0: f64, gradient: f64, length: f64) -> Result<Self> {
        if !(t0 > 0.0 && t0.is_finite()) {
            return Err(Error::InvalidParameter { name: "T0_kelvin", reason: "must be positive" });
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidParameter { name: "length_nm", reason: "must be positive" });
        }
        if !gradient.is_finite() || !(t0 + gradient * length > 0.0) {
            return Err(Error::InvalidParameter {
                name: "gradient_k_per_nm",
                reason: "temperature profile must stay positive on [0, L]",
            });
        }
        Ok(TemperatureProfile { t0, gradient, length })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn gradient(&self) -> f64 {
        self.gradient
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn temperature_at(&self, x: f64) -> Result<f64> {
        let slack = 1e-9 * self.length;
        if !(x >= -slack && x <= self.length + slack) {
            return Err(Error::Domain { what: "position outside [0, L]", value: x });
        }
        Ok(self.t0 + self.gradient * x)
    }
}

pub fn fermi_dirac(xi: f64, kbt: f64) -> f64 {
    // split on sign so the exponential never overflows
    if xi >= 0.0 {
        let e = libm::exp(-xi / kbt);
        e / (1.0 + e)
    } else {
        1.0 / (libm::exp(xi / kbt) + 1.0)
    }
}

/// `∂f₀/∂p = −f₀(1 − f₀)·(p/m)/k_B T`.
pub fn fermi_dirac_dp(band: &Band, p: f64, kbt: f64) -> f64 {
    let f = fermi_dirac(band.xi(p), kbt);
    -f * (1.0 - f) * band.velocity(p) / kbt
}

/// Equilibrium line density `(1/2πħ) ∫ f₀ dp` over the whole real line.
pub fn equilibrium_density(mass: f64, mu: f64, temperature: f64) -> f64 {
    let kbt = UnitSystem::thermal_energy(temperature);
    let cut = libm::sqrt(2.0 * mass * (mu.max(0.0) + 60.0 * kbt));
    let n = 8000;
    let h = 2.0 * cut / n as f64;
    let samples: Vec<f64> = (0..=n)
        .map(|i| {
            let p = -cut + h * i as f64;
            fermi_dirac(p * p / (2.0 * mass) - mu, kbt)
        })
        .collect();
    simpson(&samples, h) / (2.0 * core::f64::consts::PI)
}

/// Chemical potential giving line density `density` at `temperature`,
/// found by bisection to 1e-10 relative.
pub fn chemical_potential_for_density(mass: f64, density: f64, temperature: f64) -> Result<f64> {
    if !(density > 0.0 && density.is_finite()) {
        return Err(Error::InvalidParameter { name: "density_n0", reason: "must be positive" });
    }
    if !(temperature > 0.0) {
        return Err(Error::Domain { what: "temperature", value: temperature });
    }
    let kbt = UnitSystem::thermal_energy(temperature);
    let mut lo = -kbt;
    let mut hi = kbt;
    let mut guard = 0;
    while equilibrium_density(mass, lo, temperature) > density {
        lo -= 2.0 * (hi - lo);
        guard += 1;
        if guard > 200 {
            return Err(Error::NoBracket { density });
        }
    }
    while equilibrium_density(mass, hi, temperature) < density {
        hi += 2.0 * (hi - lo);
        guard += 1;
        if guard > 200 {
            return Err(Error::NoBracket { density });
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if equilibrium_density(mass, mid, temperature) < density {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-10 * mid.abs().max(kbt) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `f₀` and `∂f₀/∂p` tabulated on the (p, x) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumField {
    f0: Field2,
    f0_dp: Field2,
    temperatures: Vec<f64>,
    band: Band,
}

impl EquilibriumField {
    pub fn build(profile: &TemperatureProfile, band: Band, grid: &SimulationGrid) -> Result<Self> {
        let temperatures = grid
            .x
            .values()
            .iter()
            .map(|&x| profile.temperature_at(x))
            .collect::<Result<Vec<_>>>()?;
        let p = grid.p.values();
        let (np, nx) = (p.len(), temperatures.len());
        let f0 = Field2::from_fn(np, nx, |i, j| {
            fermi_dirac(band.xi(p[i]), UnitSystem::thermal_energy(temperatures[j]))
        });
        let f0_dp = Field2::from_fn(np, nx, |i, j| {
            fermi_dirac_dp(&band, p[i], UnitSystem::thermal_energy(temperatures[j]))
        });
        Ok(EquilibriumField { f0, f0_dp, temperatures, band })
    }

    pub fn f0(&self) -> &Field2 {
        &self.f0
    }

    pub fn f0_dp(&self) -> &Field2 {
        &self.f0_dp
    }

    /// Local temperature at every x-grid point.
    pub fn temperatures(&self) -> &[f64] {
        &self.temperatures
    }

    pub fn band(&self) -> &Band {
        &self.band
    }

    pub fn mu(&self) -> f64 {
        self.band.mu()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn temperature_examples() {
        let prof = TemperatureProfile::new(200.0, 2.0, 60.0).unwrap();
        assert_eq!(prof.temperature_at(0.0).unwrap(), 200.0);
        assert_eq!(prof.temperature_at(50.0).unwrap(), 300.0);
        let flat = TemperatureProfile::new(250.0, 0.0, 10.0).unwrap();
        assert_eq!(flat.temperature_at(7.3).unwrap(), 250.0);
        assert!(prof.temperature_at(61.0).is_err());
    }

    #[test]
    fn profile_rejects_nonpositive() {
        assert!(TemperatureProfile::new(0.0, 1.0, 1.0).is_err());
        assert!(TemperatureProfile::new(100.0, -30.0, 4.0).is_err());
        assert!(TemperatureProfile::new(100.0, -20.0, 4.0).is_ok());
    }

    #[test]
    fn fermi_function_limits() {
        let kbt = 0.025;
        assert_eq!(fermi_dirac(0.0, kbt), 0.5);
        assert!(fermi_dirac(50.0, kbt) < 1e-300);
        assert_eq!(fermi_dirac(-50.0, kbt), 1.0);
        for xi in [-0.1, -0.01, 0.003, 0.2] {
            let s = fermi_dirac(xi, kbt) + fermi_dirac(-xi, kbt);
            assert!((s - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn chemical_potential_reproduces_density() {
        let mu = chemical_potential_for_density(0.5, 0.045, 300.0).unwrap();
        let n = equilibrium_density(0.5, mu, 300.0);
        assert!(((n - 0.045) / 0.045).abs() < 1e-9);
        // degenerate limit: n = p_F/π
        let mu_cold = chemical_potential_for_density(0.5, 0.3, 2.0).unwrap();
        let pf = libm::sqrt(2.0 * 0.5 * mu_cold);
        assert!((pf / core::f64::consts::PI - 0.3).abs() < 1e-4);
    }
}
