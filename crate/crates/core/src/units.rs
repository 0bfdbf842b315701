//! Physical constants and the two supported unit presets.
//!
//! All formulas in the crate are written in terms of `hbar`, `mass` and the
//! Coulomb strength `coulomb = e^2 / (4 pi eps0)`, so the same code serves
//! atomic units and SI.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant in J s (CODATA 2018).
pub const SI_HBAR: f64 = 1.054_571_817e-34;
/// Electron rest mass in kg (CODATA 2018).
pub const SI_ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Elementary charge in C (exact).
pub const SI_ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Vacuum permittivity in F/m (CODATA 2018).
pub const SI_VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
/// Joules per electronvolt (exact).
pub const JOULE_PER_EV: f64 = SI_ELEMENTARY_CHARGE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    Atomic,
    Si,
}

/// The three constants entering the hydrogen and free-particle problems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    hbar: f64,
    mass: f64,
    coulomb: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64, coulomb: f64) -> Result<Self> {
        for (name, v) in [("hbar", hbar), ("mass", mass), ("coulomb", coulomb)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Constants(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(Self {
            hbar,
            mass,
            coulomb,
        })
    }

    /// hbar = m = e^2/(4 pi eps0) = 1, hence Bohr radius = hartree = 1.
    pub const fn atomic() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            coulomb: 1.0,
        }
    }

    /// Electron in SI units, with the Coulomb strength formed from e and eps0.
    pub fn si() -> Self {
        let coulomb = SI_ELEMENTARY_CHARGE * SI_ELEMENTARY_CHARGE
            / (4.0 * std::f64::consts::PI * SI_VACUUM_PERMITTIVITY);
        Self {
            hbar: SI_HBAR,
            mass: SI_ELECTRON_MASS,
            coulomb,
        }
    }

    pub fn preset(system: UnitSystem) -> Self {
        match system {
            UnitSystem::Atomic => Self::atomic(),
            UnitSystem::Si => Self::si(),
        }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn coulomb(&self) -> f64 {
        self.coulomb
    }

    /// a = hbar^2 / (m * coulomb).
    pub fn bohr_radius(&self) -> f64 {
        self.hbar * self.hbar / (self.mass * self.coulomb)
    }

    /// Hartree energy, coulomb / a = m coulomb^2 / hbar^2.
    pub fn hartree(&self) -> f64 {
        self.mass * self.coulomb * self.coulomb / (self.hbar * self.hbar)
    }

    /// hbar^2 / (2m), the prefactor of every kinetic and Bohm term.
    pub fn kinetic_prefactor(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass)
    }

    /// Returns a copy with a different Coulomb strength.
    pub fn with_coulomb(&self, coulomb: f64) -> Result<Self> {
        Self::new(self.hbar, self.mass, coulomb)
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::atomic()
    }
}

/// Shorthand for [`PhysicalConstants::atomic`].
pub fn atomic_units() -> PhysicalConstants {
    PhysicalConstants::atomic()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_units_are_exact() {
        let c = atomic_units();
        assert_eq!(c.bohr_radius(), 1.0);
        assert_eq!(c.hartree(), 1.0);
        assert_eq!(c.kinetic_prefactor(), 0.5);
    }

    #[test]
    fn si_bohr_radius_and_rydberg() {
        let c = PhysicalConstants::si();
        let a = c.bohr_radius();
        assert!((a - 5.291_772_109e-11).abs() / a < 1e-8, "a = {a}");
        // Ground-state binding energy, hartree / 2, in eV.
        let ry_ev = c.hartree() / 2.0 / JOULE_PER_EV;
        assert!((ry_ev - 13.605_693).abs() < 1e-5, "Ry = {ry_ev}");
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(PhysicalConstants::new(0.0, 1.0, 1.0).is_err());
        assert!(PhysicalConstants::new(1.0, -1.0, 1.0).is_err());
        assert!(PhysicalConstants::new(1.0, 1.0, f64::NAN).is_err());
        assert!(PhysicalConstants::new(1.0, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn hartree_times_radius_is_coulomb() {
        for (h, m, k) in [(1.0, 1.0, 2.0), (0.7, 3.1, 0.25), (2.0, 0.5, 9.0)] {
            let c = PhysicalConstants::new(h, m, k).unwrap();
            assert!((c.hartree() * c.bohr_radius() - k).abs() <= 1e-14 * k);
        }
    }
}
