//! Unit system: eV, nm, ħ/eV, ħ/nm, elementary charge.

/// Boltzmann constant in eV/K (CODATA 2018, exact).
pub const BOLTZMANN_EV_PER_K: f64 = 8.617_333_262e-5;
/// Reduced Planck constant in eV·s.
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;
/// Electron rest mass in units of ħ²/(eV·nm²).
pub const ELECTRON_MASS_INTERNAL: f64 = 13.123_421_196_457_826;

/// Conversions between SI-flavoured inputs and the internal units.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UnitSystem;

impl UnitSystem {
    /// `k_B·T` in eV.
    pub fn thermal_energy(kelvin: f64) -> f64 {
        BOLTZMANN_EV_PER_K * kelvin
    }

    pub fn temperature_from_energy(ev: f64) -> f64 {
        ev / BOLTZMANN_EV_PER_K
    }

    /// Force on a unit charge in eV/nm for a field in V/m.
    pub fn field_to_internal(v_per_m: f64) -> f64 {
        v_per_m * 1e-9
    }

    pub fn field_from_internal(ev_per_nm: f64) -> f64 {
        ev_per_nm * 1e9
    }

    /// Phonon group velocity in m/s to `ħ·c_s` in eV·nm.
    pub fn sound_speed_to_internal(m_per_s: f64) -> f64 {
        m_per_s * HBAR_EV_S * 1e9
    }

    pub fn sound_speed_from_internal(ev_nm: f64) -> f64 {
        ev_nm / (HBAR_EV_S * 1e9)
    }

    pub fn seconds_to_internal(seconds: f64) -> f64 {
        seconds / HBAR_EV_S
    }

    pub fn seconds_from_internal(t: f64) -> f64 {
        t * HBAR_EV_S
    }

    pub fn mass_to_internal(electron_masses: f64) -> f64 {
        electron_masses * ELECTRON_MASS_INTERNAL
    }

    pub fn mass_from_internal(m: f64) -> f64 {
        m / ELECTRON_MASS_INTERNAL
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn round_trips() {
        for v in [1e-3, 0.5, 300.0, 1.0e7, 4.7e3] {
            assert!(rel(UnitSystem::temperature_from_energy(UnitSystem::thermal_energy(v)), v) < 1e-12);
            assert!(rel(UnitSystem::field_from_internal(UnitSystem::field_to_internal(-v)), -v) < 1e-12);
            assert!(rel(UnitSystem::sound_speed_from_internal(UnitSystem::sound_speed_to_internal(v)), v) < 1e-12);
            assert!(rel(UnitSystem::seconds_from_internal(UnitSystem::seconds_to_internal(v * 1e-15)), v * 1e-15) < 1e-12);
            assert!(rel(UnitSystem::mass_from_internal(UnitSystem::mass_to_internal(v)), v) < 1e-12);
        }
    }

    #[test]
    fn reference_values() {
        // 1e7 V/m is 0.01 eV/nm on a unit charge
        assert!(rel(UnitSystem::field_to_internal(1.0e7), 0.01) < 1e-15);
        assert!(rel(UnitSystem::thermal_energy(300.0), 0.025_852_0) < 1e-6);
        // ħ²/(2 m_e) = 0.0380998 eV nm²
        assert!(rel(1.0 / (2.0 * ELECTRON_MASS_INTERNAL), 0.038_099_821) < 1e-6);
    }
}
