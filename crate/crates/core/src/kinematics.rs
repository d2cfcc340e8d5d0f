//! Momentum jumps at depopulation, drift wavevector, deflection angles,
//! and the resulting beam sets.
//!
//! When a subband empties, its carriers must land on the lower dispersion
//! branch. The released energy in this model is the diamagnetic-shift
//! difference between the two subbands, ħ(ω − ω₀) per adjacent pair, not the
//! full ladder spacing ħω; the smaller release is what reproduces the
//! reference deflection angles, and it is implemented verbatim. Carriers
//! absorb the release as longitudinal kinetic energy ħ²k_x²/2M with either
//! sign of k_x, while the drift k_y = mμF/ħ set by the drive field is
//! unchanged, so a beam entering at k_x = 0 splits into a symmetric pair at
//! deflection angles ±θ with tan θ = k_x/k_y.

use crate::error::{Error, Result};
use crate::occupancy::{depopulation_fields, SubbandLadder};
use crate::phys::{Confinement, Material, HBAR};
use crate::subband::{diamagnetic_shift, field_point, FieldPoint};

/// One propagating electron population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beam {
    /// Longitudinal wavevector (m⁻¹), signed.
    pub kx: f64,
    /// Drift wavevector toward the collector (m⁻¹).
    pub ky: f64,
    /// Fraction of the total current carried by this beam, in [0, 1].
    pub weight: f64,
    /// Subband the carriers originated from.
    pub origin_subband: usize,
}

/// The beams present at one field value; weights sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSet {
    /// Beams ordered by ascending k_x.
    pub beams: Vec<Beam>,
    /// Field at which the set was evaluated (T).
    pub b: f64,
}

/// Post-jump longitudinal wavevector for carriers leaving an emptied
/// subband with k_x = 0: the positive root of ħ²k_x²/2M = ħ(ω − ω₀).
///
/// Returns 0 at B = 0 (nothing has shifted, nothing jumps).
pub fn jump_kx(fp: &FieldPoint) -> f64 {
    if fp.b == 0.0 {
        return 0.0;
    }
    let release = HBAR * (fp.omega - fp.omega0);
    (2.0 * fp.m_long * release).sqrt() / HBAR
}

/// Post-jump wavevector for a carrier starting at `kx_initial` in subband
/// `n_from` and landing in `n_to`: positive root of
/// ħ²k_x′²/2M = ħ²k_x_initial²/2M + (ΔE_from − ΔE_to).
///
/// Reduces to [`jump_kx`] for kx_initial = 0, 1 → 0. Even in the sign of
/// `kx_initial`.
pub fn generalized_jump_kx(
    kx_initial: f64,
    n_from: usize,
    n_to: usize,
    fp: &FieldPoint,
) -> Result<f64> {
    if n_from <= n_to {
        return Err(Error::domain(format!(
            "jump must drop to a lower subband, got {n_from} -> {n_to}"
        )));
    }
    let release = diamagnetic_shift(n_from, fp) - diamagnetic_shift(n_to, fp);
    Ok((kx_initial * kx_initial + 2.0 * fp.m_long * release / (HBAR * HBAR)).sqrt())
}

/// Drift wavevector from the drive field: k_y = m*·μ·F/ħ.
pub fn drift_ky(drive_field: f64, material: &Material) -> f64 {
    material.mass() * material.mobility() * drive_field / HBAR
}

/// Deflection from the drift direction in degrees: atan(k_x/k_y), sign of
/// k_x preserved exactly (mirrored beams get bitwise-mirrored angles).
pub fn deflection_angle(kx: f64, ky: f64) -> Result<f64> {
    if !(ky > 0.0) {
        return Err(Error::domain(format!(
            "deflection needs forward drift ky > 0, got {ky:e}"
        )));
    }
    let magnitude = (kx.abs() / ky).atan().to_degrees();
    Ok(if kx < 0.0 { -magnitude } else { magnitude })
}

/// Beam set at field `b` for carriers injected with the composition of
/// `ladder_before`.
///
/// Below the first depopulation field the set is a single k_x = 0 beam.
/// At or above a depopulation field there are three beams: a center beam
/// carrying the fraction of carriers in the still-occupied subbands, and a
/// ±k_x pair splitting the depopulated fraction equally (the symmetric
/// 50/50 split is a modeling choice). The jump k_x is evaluated at the most
/// recent depopulation field, where the jump actually happened; carriers
/// emptied by earlier cascade events are folded into the same outer pair.
pub fn beam_set_at(
    b: f64,
    ladder_before: &SubbandLadder,
    drive_field: f64,
    material: &Material,
    confinement: &Confinement,
) -> Result<BeamSet> {
    let fp = field_point(b, material, confinement)?;
    let ky = drift_ky(drive_field, material);
    let n_total = ladder_before.total();
    let events = depopulation_fields(n_total, confinement, material, ladder_before.densities.len())?;
    let passed = events.iter().filter(|e| **e <= b).count();
    if passed == 0 {
        return Ok(BeamSet {
            beams: vec![Beam { kx: 0.0, ky, weight: 1.0, origin_subband: 0 }],
            b: fp.b,
        });
    }
    let surviving = ladder_before.occupied_count - passed;
    let surviving_fraction: f64 =
        ladder_before.densities[..surviving].iter().sum::<f64>() / n_total;
    let outer_weight = 0.5 * (1.0 - surviving_fraction);
    let fp_event = field_point(events[passed - 1], material, confinement)?;
    let kx = jump_kx(&fp_event);
    Ok(BeamSet {
        beams: vec![
            Beam { kx: -kx, ky, weight: outer_weight, origin_subband: surviving },
            Beam { kx: 0.0, ky, weight: surviving_fraction, origin_subband: 0 },
            Beam { kx, ky, weight: outer_weight, origin_subband: surviving },
        ],
        b: fp.b,
    })
}
