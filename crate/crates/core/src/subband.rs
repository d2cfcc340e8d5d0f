//! Closed-form magnetoelectric subband model for a parabolic well.
//!
//! An in-plane field B along y couples the free motion along x to the
//! confinement along z. For V(z) = m ω₀² z²/2 the coupled problem remains an
//! exact oscillator: the confinement frequency stiffens to the hybrid
//! ω = √(ω₀² + ω_c²), the motion along x acquires the heavier mass
//! M = m(1 + ω_c²/ω₀²), and each subband rises by the diamagnetic shift
//! ħ(n + ½)(ω − ω₀). The transverse eigenfunctions stay oscillator
//! eigenfunctions, with the B-dependent width z₀(B) and a k_x-dependent
//! center displacement z̄.

use crate::error::{Error, Result};
use crate::phys::{Confinement, Material, E_CHARGE, HBAR};

/// Largest oscillator index accepted by [`eigenfunction_value`]; the
/// normalized recurrence is overflow-free but accuracy is only vetted up
/// to here.
pub const MAX_EIGENFUNCTION_INDEX: usize = 20;

/// Frequencies and masses of the parabolic model at one field value,
/// evaluated once and shared by every downstream formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    /// In-plane magnetic field along y (T).
    pub b: f64,
    /// Zero-field confinement frequency (rad/s).
    pub omega0: f64,
    /// Cyclotron frequency eB/m* (rad/s).
    pub omega_c: f64,
    /// Hybrid frequency √(ω₀² + ω_c²) (rad/s).
    pub omega: f64,
    /// Band effective mass m* (kg).
    pub mass: f64,
    /// Field-enhanced longitudinal mass m*(1 + ω_c²/ω₀²) (kg).
    pub m_long: f64,
}

impl FieldPoint {
    /// Confinement length at this field, z₀(B) = √(ħ / m* ω).
    pub fn oscillator_length(&self) -> f64 {
        (HBAR / (self.mass * self.omega)).sqrt()
    }
}

/// Evaluate the field-dependent model quantities at `b`.
///
/// Only parabolic confinement has this closed form; the triangular variant
/// must go through the finite-difference solver instead.
pub fn field_point(b: f64, material: &Material, confinement: &Confinement) -> Result<FieldPoint> {
    let omega0 = confinement.omega0()?;
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::domain(format!("magnetic field must be >= 0 T, got {b}")));
    }
    let mass = material.mass();
    let omega_c = E_CHARGE * b / mass;
    let omega = (omega0 * omega0 + omega_c * omega_c).sqrt();
    let ratio = omega_c / omega0;
    let m_long = mass * (1.0 + ratio * ratio);
    Ok(FieldPoint { b, omega0, omega_c, omega, mass, m_long })
}

/// Total energy of state (n, k_x, k_y): ħ²k_x²/2M + ħ²k_y²/2m + ħω(n + ½).
///
/// The spectrum does not depend on the orbit-center position, so the band
/// minimum sits at k_x = 0 for every n.
pub fn subband_energy(n: usize, kx: f64, ky: f64, fp: &FieldPoint) -> f64 {
    let along_x = HBAR * HBAR * kx * kx / (2.0 * fp.m_long);
    let along_y = HBAR * HBAR * ky * ky / (2.0 * fp.mass);
    along_x + along_y + HBAR * fp.omega * (n as f64 + 0.5)
}

/// Field-induced rise of subband n: ħ(n + ½)(ω − ω₀). Zero at B = 0.
pub fn diamagnetic_shift(n: usize, fp: &FieldPoint) -> f64 {
    HBAR * (n as f64 + 0.5) * (fp.omega - fp.omega0)
}

/// Orbit-center displacement z̄ = (ħk_x/eB)(ω_c²/ω²).
///
/// Returns 0 at B = 0 by convention: ω_c² vanishes faster than 1/B
/// diverges, so 0 is the continuous limit.
pub fn orbit_center(kx: f64, fp: &FieldPoint) -> f64 {
    if fp.b == 0.0 {
        return 0.0;
    }
    let ratio = fp.omega_c / fp.omega;
    (HBAR * kx / (E_CHARGE * fp.b)) * ratio * ratio
}

/// Normalized transverse eigenfunction of subband n at position z (1/√m).
///
/// The profile is the oscillator eigenfunction of width z₀(B) centered at
/// z̄(k_x, B), evaluated through the normalized Hermite-function recurrence
/// rather than raw H_n times a Gaussian, so no factorials or overflow appear.
pub fn eigenfunction_value(n: usize, z: f64, kx: f64, fp: &FieldPoint) -> Result<f64> {
    if n > MAX_EIGENFUNCTION_INDEX {
        return Err(Error::domain(format!(
            "eigenfunction index {n} exceeds the supported maximum {MAX_EIGENFUNCTION_INDEX}"
        )));
    }
    let z0 = fp.oscillator_length();
    let zeta = (z - orbit_center(kx, fp)) / z0;
    Ok(hermite_function(n, zeta) / z0.sqrt())
}

/// Orthonormal oscillator function h_n(ζ) with weight 1 (∫ h_n h_m dζ = δ_nm):
/// h₀ = π^(-1/4) exp(-ζ²/2), h_{n+1} = ζ√(2/(n+1)) h_n − √(n/(n+1)) h_{n-1}.
fn hermite_function(n: usize, zeta: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * zeta * zeta).exp();
    for k in 0..n {
        let kf = k as f64;
        let next = zeta * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}
