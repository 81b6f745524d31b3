//! Acoustic phonon bath: Debye dispersion, deformation-potential coupling
//! and the Boltzmann-form occupation `N_q = exp(-ω_q / k_B T)`.

use crate::units::UnitSystem;
use crate::{Error, Result};

/// Scattering environment seen by the conduction electrons.
///
/// `ω_q = c_s·|q|` (energy, ħ absorbed), `M_q² = g²·|q|`, hard cutoff at the
/// Debye wavenumber `q_D`, and `δ` regularizing the resolvent denominators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhononBath {
    sound_speed: f64,
    debye_cutoff: f64,
    coupling_g2: f64,
    delta: f64,
}

impl Default for PhononBath {
    fn default() -> Self {
        PhononBath { sound_speed: 0.02, debye_cutoff: 1.0, coupling_g2: 2e-4, delta: 5e-3 }
    }
}

impl PhononBath {
    /// `sound_speed` in eV·nm, `debye_cutoff` in 1/nm, `coupling_g2` in
    /// eV²·nm, `delta` in eV.
    pub fn new(sound_speed: f64, debye_cutoff: f64, coupling_g2: f64, delta: f64) -> Result<Self> {
        if !(sound_speed > 0.0 && sound_speed.is_finite()) {
            return Err(Error::InvalidParameter { name: "sound_speed", reason: "must be positive" });
        }
        if !(debye_cutoff > 0.0 && debye_cutoff.is_finite()) {
            return Err(Error::InvalidParameter { name: "debye_cutoff", reason: "must be positive" });
        }
        if !(coupling_g2 >= 0.0 && coupling_g2.is_finite()) {
            return Err(Error::InvalidParameter { name: "coupling_g2", reason: "must be non-negative" });
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter { name: "delta", reason: "must be strictly positive" });
        }
        Ok(PhononBath { sound_speed, debye_cutoff, coupling_g2, delta })
    }

    pub fn sound_speed(&self) -> f64 {
        self.sound_speed
    }

    pub fn debye_cutoff(&self) -> f64 {
        self.debye_cutoff
    }

    pub fn coupling_g2(&self) -> f64 {
        self.coupling_g2
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Same bath with the coupling `g²` replaced.
    pub fn with_coupling_g2(self, coupling_g2: f64) -> Result<Self> {
        PhononBath::new(self.sound_speed, self.debye_cutoff, coupling_g2, self.delta)
    }

    pub fn with_delta(self, delta: f64) -> Result<Self> {
        PhononBath::new(self.sound_speed, self.debye_cutoff, self.coupling_g2, delta)
    }

    fn check_cutoff(&self, q: f64) -> Result<()> {
        if q.abs() > self.debye_cutoff || q.is_nan() {
            return Err(Error::Domain { what: "phonon wavenumber beyond Debye cutoff", value: q });
        }
        Ok(())
    }

    /// `ω_q = c_s·|q|`; wavenumbers beyond the cutoff are an error.
    pub fn dispersion(&self, q: f64) -> Result<f64> {
        self.check_cutoff(q)?;
        Ok(self.sound_speed * q.abs())
    }

    /// `M_q² = g²·|q|`.
    pub fn coupling_sq(&self, q: f64) -> Result<f64> {
        self.check_cutoff(q)?;
        Ok(self.coupling_g2 * q.abs())
    }
}

/// Phonon occupation `exp(-ω_q / k_B T)` for `ω_q` in eV and `T` in kelvin.
pub fn occupation(omega_q: f64, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::Domain { what: "temperature", value: temperature });
    }
    if !(omega_q >= 0.0) {
        return Err(Error::Domain { what: "phonon energy", value: omega_q });
    }
    Ok(libm::exp(-omega_q / UnitSystem::thermal_energy(temperature)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn occupation_examples() {
        assert_eq!(occupation(0.0, 17.0).unwrap(), 1.0);
        let kt = UnitSystem::thermal_energy(123.4);
        assert!((occupation(kt, 123.4).unwrap() - libm::exp(-1.0)).abs() < 1e-15);
        let n = occupation(0.025_852, 300.0).unwrap();
        assert!((n - 0.367_879).abs() < 1e-6, "{n}");
    }

    #[test]
    fn occupation_domain_errors() {
        assert!(occupation(0.01, 0.0).is_err());
        assert!(occupation(0.01, -3.0).is_err());
        assert!(occupation(-0.01, 300.0).is_err());
    }

    #[test]
    fn occupation_monotone_on_grid() {
        for i in 0..10 {
            let w = 1e-3 * (i as f64 + 1.0);
            for j in 0..10 {
                let t = 50.0 + 30.0 * j as f64;
                let here = occupation(w, t).unwrap();
                assert!(here > 0.0 && here <= 1.0);
                assert!(occupation(w + 1e-3, t).unwrap() < here);
                assert!(occupation(w, t + 30.0).unwrap() > here);
            }
        }
    }

    #[test]
    fn occupation_freezes_out() {
        assert!(occupation(1e-3, 0.1).unwrap() < 1e-40);
    }

    #[test]
    fn dispersion_and_coupling() {
        let bath = PhononBath::new(0.02, 1.0, 0.01, 5e-3).unwrap();
        assert_eq!(bath.dispersion(0.0).unwrap(), 0.0);
        assert!((bath.dispersion(1.0).unwrap() - 0.02).abs() < 1e-15);
        assert_eq!(bath.dispersion(0.3).unwrap(), bath.dispersion(-0.3).unwrap());
        assert!(bath.dispersion(1.0 + 1e-9).is_err());
        assert_eq!(bath.coupling_sq(0.0).unwrap(), 0.0);
        assert_eq!(bath.coupling_sq(0.7).unwrap(), bath.coupling_sq(-0.7).unwrap());
        let doubled = bath.with_coupling_g2(0.01 * 4.0).unwrap();
        assert!((doubled.coupling_sq(0.4).unwrap() - 4.0 * bath.coupling_sq(0.4).unwrap()).abs() < 1e-18);
        let mut prev = -1.0;
        for i in 0..=100 {
            let w = bath.dispersion(i as f64 / 100.0).unwrap();
            assert!(w > prev);
            prev = w;
        }
    }

    #[test]
    fn constructor_rejects_zero_delta() {
        assert!(PhononBath::new(0.02, 1.0, 0.01, 0.0).is_err());
        assert!(PhononBath::new(0.02, 0.0, 0.01, 1e-3).is_err());
        assert!(PhononBath::new(0.02, 1.0, -1.0, 1e-3).is_err());
    }

    #[test]
    fn pure_functions_bit_identical() {
        let bath = PhononBath::default();
        for q in [0.0, 0.123, 0.999] {
            assert_eq!(bath.dispersion(q).unwrap().to_bits(), bath.dispersion(q).unwrap().to_bits());
            assert_eq!(bath.coupling_sq(q).unwrap().to_bits(), bath.coupling_sq(q).unwrap().to_bits());
        }
        assert_eq!(occupation(0.01, 250.0).unwrap().to_bits(), occupation(0.01, 250.0).unwrap().to_bits());
    }
}
