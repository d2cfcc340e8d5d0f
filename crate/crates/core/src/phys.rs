//! Physical constants, unit conventions, and the base parameter types.
//!
//! Everything in this crate works in SI units: energies in joules,
//! lengths in meters, wavevectors in 1/m, magnetic fields in tesla.
//! Conversion to meV, nm, and friends happens only at the I/O boundary.

use crate::error::{Error, Result};

/// Reduced Planck constant (J·s), CODATA 2018.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Elementary charge (C), exact since the 2019 SI redefinition.
pub const E_CHARGE: f64 = 1.602_176_634e-19;

/// Free electron mass (kg), CODATA 2018.
pub const M0: f64 = 9.109_383_701_5e-31;

/// Host material of the 2D electron gas.
///
/// Only the two parameters the transport model needs: the band effective
/// mass (as a fraction of the free electron mass) and the low-temperature
/// mobility. Note that the reference device assumes an unusually high
/// mobility of 6e2 m²V⁻¹s⁻¹ (6e6 cm²/Vs); we take such values verbatim
/// rather than clamping to a "typical" range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    effective_mass_ratio: f64,
    mobility: f64,
}

impl Material {
    /// `effective_mass_ratio` is m*/m0 (dimensionless), `mobility` in m²V⁻¹s⁻¹.
    pub fn new(effective_mass_ratio: f64, mobility: f64) -> Result<Self> {
        if !(effective_mass_ratio > 0.0) || !effective_mass_ratio.is_finite() {
            return Err(Error::domain(format!(
                "effective_mass_ratio must be positive and finite, got {effective_mass_ratio}"
            )));
        }
        if !(mobility > 0.0) || !mobility.is_finite() {
            return Err(Error::domain(format!(
                "mobility must be positive and finite, got {mobility}"
            )));
        }
        Ok(Material { effective_mass_ratio, mobility })
    }

    pub fn effective_mass_ratio(&self) -> f64 {
        self.effective_mass_ratio
    }

    /// Effective mass in kg.
    pub fn mass(&self) -> f64 {
        self.effective_mass_ratio * M0
    }

    /// Mobility in m²V⁻¹s⁻¹.
    pub fn mobility(&self) -> f64 {
        self.mobility
    }
}

/// Transverse confinement of the electron gas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Confinement {
    /// Harmonic well V(z) = m ω₀² z² / 2.
    Parabolic { omega0: f64 },
    /// Heterojunction-style well V(z) = e E_s z for z ≥ 0 with a hard wall
    /// at z = 0. `slope_field` is E_s in V/m.
    Triangular { slope_field: f64 },
}

impl Confinement {
    pub fn parabolic(omega0: f64) -> Result<Self> {
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(Error::domain(format!(
                "parabolic confinement needs omega0 > 0, got {omega0}"
            )));
        }
        Ok(Confinement::Parabolic { omega0 })
    }

    /// Parabolic confinement specified through the zero-field oscillator
    /// length z₀ instead of ω₀.
    pub fn parabolic_from_z0(z0: f64, material: &Material) -> Result<Self> {
        Ok(Confinement::Parabolic { omega0: omega0_from_z0(z0, material)? })
    }

    pub fn triangular(slope_field: f64) -> Result<Self> {
        if !(slope_field > 0.0) || !slope_field.is_finite() {
            return Err(Error::domain(format!(
                "triangular confinement needs slope_field > 0, got {slope_field}"
            )));
        }
        Ok(Confinement::Triangular { slope_field })
    }

    /// The parabolic frequency, or an error for the triangular variant.
    pub fn omega0(&self) -> Result<f64> {
        match self {
            Confinement::Parabolic { omega0 } => Ok(*omega0),
            Confinement::Triangular { .. } => Err(Error::UnsupportedConfinement(
                "operation requires a parabolic well".into(),
            )),
        }
    }
}

/// Zero-field oscillator frequency from the confinement length:
/// ω₀ = ħ / (m* z₀²).
///
/// `z0` here is the zero-field length; the in-field length shrinks with
/// the hybrid frequency and is obtained from [`z0_from_omega0`] instead.
pub fn omega0_from_z0(z0: f64, material: &Material) -> Result<f64> {
    if !(z0 > 0.0) || !z0.is_finite() {
        return Err(Error::domain(format!("z0 must be positive, got {z0}")));
    }
    Ok(HBAR / (material.mass() * z0 * z0))
}

/// Oscillator length for a given frequency: z₀(ω) = (ħ / m* ω)^{1/2}.
///
/// Called with the hybrid frequency ω(B) this yields the B-dependent
/// confinement length.
pub fn z0_from_omega0(omega: f64, material: &Material) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::domain(format!("omega must be positive, got {omega}")));
    }
    Ok((HBAR / (material.mass() * omega)).sqrt())
}
