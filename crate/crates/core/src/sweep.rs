//! Field sweeps over a full device, and inverse design of its parameters.
//!
//! A sweep walks the in-plane field over a range and records, at every
//! point, everything the other modules can say: the subband fill, the
//! level shifts, the beam set after any momentum jumps, the deflection
//! angle, and the traced detector fractions. Depopulation fields inside
//! the range are bracketed with two extra samples so each switching edge
//! is captured from both sides. The inverse solvers run the same model
//! backwards: drive field from a wanted deflection angle, confinement
//! length from a wanted depopulation field.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{trace, Scene, TraceResult};
use crate::kinematics::{beam_set_at, deflection_angle, drift_ky, jump_kx, BeamSet};
use crate::occupancy::{depopulation_field_closed_form, depopulation_fields, fermi_fill, SubbandLadder};
use crate::phys::{omega0_from_z0, Confinement, Material, HBAR};
use crate::roots::bisect;
use crate::subband::{diamagnetic_shift, field_point};

/// Relative offset of the extra samples inserted around each
/// depopulation field.
const EVENT_BRACKET_OFFSET: f64 = 1e-6;

/// A complete device: material, well, drive, and carriers.
#[derive(Debug, Clone, PartialEq)]
pub struct Device {
    pub material: Material,
    pub confinement: Confinement,
    /// Longitudinal drive field (V/m) setting the drift momentum.
    pub drive_field: f64,
    /// Zero-field subband fill; beam composition is taken from here.
    pub ladder0: SubbandLadder,
    /// Number of subbands tracked in fills and reports.
    pub max_subbands: usize,
}

impl Device {
    pub fn new(
        material: Material,
        confinement: Confinement,
        n_total: f64,
        drive_field: f64,
        max_subbands: usize,
    ) -> Result<Self> {
        if !(drive_field > 0.0) || !drive_field.is_finite() {
            return Err(Error::domain(format!(
                "drive field must be > 0 V/m, got {drive_field:e}"
            )));
        }
        let fp0 = field_point(0.0, &material, &confinement)?;
        let ladder0 = fermi_fill(n_total, &fp0, max_subbands)?;
        Ok(Device { material, confinement, drive_field, ladder0, max_subbands })
    }
}

/// Everything known about the device at one field value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    /// In-plane field (T).
    pub b: f64,
    /// Sheet density per subband (m⁻²), padded to `max_subbands` entries.
    pub densities: Vec<f64>,
    /// Number of occupied subbands.
    pub occupied_count: usize,
    /// Fermi energy (J).
    pub fermi_energy: f64,
    /// Field-induced level shift per subband (J), `max_subbands` entries.
    pub shifts: Vec<f64>,
    /// Beams in flight after all depopulation events up to this field.
    pub beams: BeamSet,
    /// Deflection angle of the +k_x beam (deg); 0 before any event.
    pub theta: f64,
    /// Traced window fractions.
    pub detector_fractions: TraceResult,
    /// Crude two-terminal signature: 1 / occupied subband count, so each
    /// depopulation event shows as an upward step.
    pub resistance_proxy: f64,
}

fn with_field_context(e: Error, b: f64) -> Error {
    match e {
        Error::Domain(msg) => Error::Domain(format!("at B = {b} T: {msg}")),
        Error::Numeric(msg) => Error::Numeric(format!("at B = {b} T: {msg}")),
        other => other,
    }
}

fn evaluate_at(
    b: f64,
    device: &Device,
    scene: &Scene,
    divergence_deg: f64,
) -> Result<SweepRecord> {
    let fp = field_point(b, &device.material, &device.confinement)?;
    let ladder = fermi_fill(device.ladder0.total(), &fp, device.max_subbands)?;
    let shifts = (0..device.max_subbands).map(|n| diamagnetic_shift(n, &fp)).collect();
    let beams = beam_set_at(
        b,
        &device.ladder0,
        device.drive_field,
        &device.material,
        &device.confinement,
    )?;
    let fastest = beams
        .beams
        .iter()
        .max_by(|p, q| p.kx.partial_cmp(&q.kx).expect("beam kx is never NaN"))
        .expect("a beam set is never empty");
    let theta = deflection_angle(fastest.kx, fastest.ky)?;
    let detector_fractions = trace(&beams, scene, divergence_deg)?;
    Ok(SweepRecord {
        b,
        occupied_count: ladder.occupied_count,
        fermi_energy: ladder.fermi_energy,
        densities: ladder.densities,
        shifts,
        beams,
        theta,
        detector_fractions,
        resistance_proxy: 1.0 / ladder.occupied_count as f64,
    })
}

/// Sweep the field from `b_start` to `b_end` over `steps` uniform samples,
/// plus a tight bracketing pair around every depopulation field inside the
/// range. Points are evaluated in parallel and returned in field order;
/// the output is bit-identical regardless of thread count.
pub fn sweep(
    b_start: f64,
    b_end: f64,
    steps: usize,
    device: &Device,
    scene: &Scene,
    divergence_deg: f64,
) -> Result<Vec<SweepRecord>> {
    if !(b_start >= 0.0) || !b_start.is_finite() {
        return Err(Error::domain(format!("sweep start must be >= 0 T, got {b_start}")));
    }
    if !(b_end > b_start) || !b_end.is_finite() {
        return Err(Error::domain(format!(
            "sweep needs b_end > b_start, got [{b_start}, {b_end}]"
        )));
    }
    if steps < 2 {
        return Err(Error::domain(format!("sweep needs at least 2 steps, got {steps}")));
    }
    let mut points = Vec::with_capacity(steps + 4);
    let span = b_end - b_start;
    for i in 0..steps {
        let b = if i == steps - 1 {
            b_end
        } else {
            b_start + span * i as f64 / (steps - 1) as f64
        };
        points.push(b);
    }
    let events = depopulation_fields(
        device.ladder0.total(),
        &device.confinement,
        &device.material,
        device.max_subbands,
    )?;
    for ev in events {
        for b in [ev * (1.0 - EVENT_BRACKET_OFFSET), ev * (1.0 + EVENT_BRACKET_OFFSET)] {
            if b > b_start && b < b_end {
                points.push(b);
            }
        }
    }
    points.sort_by(|a, b| a.partial_cmp(b).expect("sweep points are never NaN"));
    points.dedup();

    let results: Vec<Result<SweepRecord>> = points
        .par_iter()
        .map(|&b| evaluate_at(b, device, scene, divergence_deg))
        .collect();
    let mut records = Vec::with_capacity(points.len());
    for (i, r) in results.into_iter().enumerate() {
        records.push(r.map_err(|e| with_field_context(e, points[i]))?);
    }
    Ok(records)
}

/// Drive field (V/m) that deflects the post-jump beam at field `b1` by
/// `theta_deg`: inverts tan θ = k_x/k_y with k_y the drift momentum.
pub fn solve_drive_for_angle(
    theta_deg: f64,
    b1: f64,
    material: &Material,
    confinement: &Confinement,
) -> Result<f64> {
    if !(theta_deg > 0.0) || !(theta_deg < 90.0) {
        return Err(Error::domain(format!(
            "target angle must lie in (0, 90) degrees, got {theta_deg}"
        )));
    }
    if !(b1 > 0.0) || !b1.is_finite() {
        return Err(Error::domain(format!("jump field must be > 0 T, got {b1}")));
    }
    let fp = field_point(b1, material, confinement)?;
    let kx = jump_kx(&fp);
    let ky_needed = kx / theta_deg.to_radians().tan();
    let drive = HBAR * ky_needed / (material.mass() * material.mobility());
    let check = deflection_angle(kx, drift_ky(drive, material))?;
    if (check - theta_deg).abs() > 1e-9 {
        return Err(Error::numeric(format!(
            "drive-field inversion lost accuracy: asked {theta_deg} deg, got {check} deg"
        )));
    }
    Ok(drive)
}

/// Zero-field confinement length (m) whose two-subband device depopulates
/// at `b1_target` (T), given the zero-field upper-subband density `n1`.
///
/// The depopulation field decreases monotonically with the confinement
/// length, so the target is bracketed on [0.1, 100] nm and bisected; a
/// target outside the attainable range reports the bracket and the
/// objective values at its ends.
pub fn solve_confinement_for_depopulation(
    b1_target: f64,
    n1: f64,
    material: &Material,
) -> Result<f64> {
    if !(b1_target > 0.0) || !b1_target.is_finite() {
        return Err(Error::domain(format!(
            "target depopulation field must be > 0 T, got {b1_target}"
        )));
    }
    let (z_lo, z_hi) = (1e-10_f64, 1e-7_f64);
    let b1_of = |z0: f64| -> Result<f64> {
        depopulation_field_closed_form(n1, omega0_from_z0(z0, material)?, material)
    };
    // confirm monotonicity across the bracket before trusting bisection
    let mut previous = f64::INFINITY;
    for k in 0..=16 {
        let z0 = z_lo * (z_hi / z_lo).powf(k as f64 / 16.0);
        let b1 = b1_of(z0)?;
        if b1 >= previous {
            return Err(Error::numeric(format!(
                "depopulation field is not decreasing in the confinement length near {z0:e} m"
            )));
        }
        previous = b1;
    }
    let z0 = bisect(
        |z0| b1_of(z0).expect("bracket was validated") - b1_target,
        z_lo,
        z_hi,
        1e-15,
        "confinement length hitting the target depopulation field",
    )?;
    let residual = (b1_of(z0)? - b1_target).abs();
    if residual > 1e-4 {
        return Err(Error::numeric(format!(
            "confinement-length inversion lost accuracy: residual {residual:e} T"
        )));
    }
    Ok(z0)
}
