//! Detector geometry and ballistic beam tracing.
//!
//! The scene is a focusing geometry: an emitter at the origin launches
//! electrons toward a collector straight ahead, with one detector rotated
//! by the design angle to each side. Acceptance is expressed in angle
//! space as three disjoint windows of equal width: the collector window is
//! centered on the forward direction and each detector window on ±θ_d,
//! all θ_d wide. A beam either hits as an ideal ray or is smeared by a
//! Gaussian angular divergence; either way the traced fractions of the
//! total injected weight decide which detectors see signal.

use crate::error::{Error, Result};
use crate::kinematics::{beam_set_at, deflection_angle, BeamSet};
use crate::occupancy::SubbandLadder;
use crate::phys::{Confinement, Material};

/// Emitter slit width (m); narrow enough that the source is point-like on
/// the scale of the detector geometry.
pub const EMITTER_APERTURE: f64 = 1e-7;

/// Detector fraction above which a detector is reported as active.
pub const DEFAULT_SWITCH_THRESHOLD: f64 = 1e-3;

/// Planar layout of emitter, collector, and the two side detectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scene {
    /// Design deflection angle θ_d between emitter axis and detectors (deg).
    pub theta_design: f64,
    /// Emitter-to-collector distance (m).
    pub collector_distance: f64,
    /// Emitter-to-detector distance (m).
    pub detector_distance: f64,
    /// Emitter slit width (m).
    pub emitter_aperture: f64,
    /// Collector width subtending θ_d at the emitter (m).
    pub collector_width: f64,
    /// Detector width subtending θ_d at the emitter (m).
    pub detector_width: f64,
}

impl Scene {
    /// Lay out a scene from the design angle (deg) and the two flight
    /// distances (m); widths follow so every opening subtends θ_d.
    pub fn new(
        theta_design: f64,
        collector_distance: f64,
        detector_distance: f64,
    ) -> Result<Self> {
        if !(theta_design > 0.0) || !(theta_design < 45.0) {
            return Err(Error::domain(format!(
                "design angle must lie in (0, 45) degrees, got {theta_design}"
            )));
        }
        if !(collector_distance > 0.0) || !collector_distance.is_finite() {
            return Err(Error::domain(format!(
                "collector distance must be > 0 m, got {collector_distance:e}"
            )));
        }
        if !(detector_distance > 0.0) || !detector_distance.is_finite() {
            return Err(Error::domain(format!(
                "detector distance must be > 0 m, got {detector_distance:e}"
            )));
        }
        let half_rad = (0.5 * theta_design).to_radians();
        Ok(Scene {
            theta_design,
            collector_distance,
            detector_distance,
            emitter_aperture: EMITTER_APERTURE,
            collector_width: 2.0 * collector_distance * half_rad.tan(),
            detector_width: 2.0 * detector_distance * half_rad.tan(),
        })
    }

    /// Center of the detector on the +θ side, as (x, y) with y along the
    /// emitter axis (m).
    pub fn detector1_center(&self) -> (f64, f64) {
        let th = self.theta_design.to_radians();
        (self.detector_distance * th.sin(), self.detector_distance * th.cos())
    }

    /// Center of the detector on the −θ side; the mirror of detector 1.
    pub fn detector2_center(&self) -> (f64, f64) {
        let (x, y) = self.detector1_center();
        (-x, y)
    }
}

/// 20 µm flight paths at the given design angle.
pub fn default_scene(theta_design: f64) -> Result<Scene> {
    Scene::new(theta_design, 2e-5, 2e-5)
}

/// Weight fractions landing in each acceptance window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceResult {
    pub frac_c: f64,
    pub frac_d1: f64,
    pub frac_d2: f64,
    /// Weight outside every window (clamped at 0 against rounding).
    pub missed: f64,
}

/// erf with exact odd symmetry: erf_odd(-x) is bit-for-bit -erf_odd(x),
/// which the underlying implementation does not guarantee on its own.
fn erf_odd(x: f64) -> f64 {
    if x < 0.0 {
        -libm::erf(-x)
    } else {
        libm::erf(x)
    }
}

/// Mass of a unit Gaussian centered at `theta` inside the window [lo, hi];
/// `s` is σ√2.
fn gaussian_window(theta: f64, lo: f64, hi: f64, s: f64) -> f64 {
    0.5 * (erf_odd((hi - theta) / s) - erf_odd((lo - theta) / s))
}

/// Sum after sorting into total order, so the result depends only on the
/// multiset of values and never on their original order.
fn ordered_sum(mut contributions: Vec<f64>) -> f64 {
    contributions.sort_by(f64::total_cmp);
    contributions.iter().sum()
}

/// Window fractions (C, D1, D2) for an ideal ray at `theta` degrees. The
/// windows are C = [-half, half], D1 = (half, 3 half], D2 = [-3 half,
/// -half): a ray exactly on a shared edge lands in the inner window.
fn ray_fractions(theta: f64, half: f64) -> (f64, f64, f64) {
    let a = theta.abs();
    if a <= half {
        (1.0, 0.0, 0.0)
    } else if a <= 3.0 * half {
        if theta > 0.0 {
            (0.0, 1.0, 0.0)
        } else {
            (0.0, 0.0, 1.0)
        }
    } else {
        (0.0, 0.0, 0.0)
    }
}

/// Trace a beam set onto the windows, either as ideal rays
/// (`divergence_deg` = 0) or with each beam smeared into a Gaussian of the
/// given angular standard deviation (deg).
pub fn trace(beams: &BeamSet, scene: &Scene, divergence_deg: f64) -> Result<TraceResult> {
    if !(divergence_deg >= 0.0) || !divergence_deg.is_finite() {
        return Err(Error::domain(format!(
            "beam divergence must be >= 0 degrees, got {divergence_deg}"
        )));
    }
    let mut angles = Vec::with_capacity(beams.beams.len());
    for beam in &beams.beams {
        angles.push(deflection_angle(beam.kx, beam.ky)?);
    }
    let half = 0.5 * scene.theta_design;
    let n = beams.beams.len();
    let (mut c, mut d1, mut d2) =
        (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    if divergence_deg == 0.0 {
        for (beam, &t) in beams.beams.iter().zip(&angles) {
            let (fc, f1, f2) = ray_fractions(t, half);
            c.push(beam.weight * fc);
            d1.push(beam.weight * f1);
            d2.push(beam.weight * f2);
        }
    } else {
        let s = divergence_deg * std::f64::consts::SQRT_2;
        let outer = 3.0 * half;
        for (beam, &t) in beams.beams.iter().zip(&angles) {
            c.push(beam.weight * gaussian_window(t, -half, half, s));
            d1.push(beam.weight * gaussian_window(t, half, outer, s));
            d2.push(beam.weight * gaussian_window(t, -outer, -half, s));
        }
    }
    // sum each window in value order: combined with the exact odd symmetry
    // of the window integrals, beam sets whose contributions agree as
    // multisets (a set and its mirror image in particular) then produce
    // bitwise-identical totals regardless of beam order
    let frac_c = ordered_sum(c);
    let frac_d1 = ordered_sum(d1);
    let frac_d2 = ordered_sum(d2);
    let missed = (1.0 - frac_c - frac_d1 - frac_d2).max(0.0);
    Ok(TraceResult { frac_c, frac_d1, frac_d2, missed })
}

/// Detector activity at one field value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchState {
    pub b: f64,
    pub d1_active: bool,
    pub d2_active: bool,
}

/// Evaluate which detectors fire at each field value: beams are composed
/// from the zero-field ladder, traced, and a detector is active when its
/// traced fraction exceeds `threshold`.
#[allow(clippy::too_many_arguments)]
pub fn switch_truth_table(
    b_values: &[f64],
    ladder0: &SubbandLadder,
    drive_field: f64,
    material: &Material,
    confinement: &Confinement,
    scene: &Scene,
    divergence_deg: f64,
    threshold: f64,
) -> Result<Vec<SwitchState>> {
    if !(threshold >= 0.0) || !threshold.is_finite() {
        return Err(Error::domain(format!("switch threshold must be >= 0, got {threshold}")));
    }
    let mut out = Vec::with_capacity(b_values.len());
    for &b in b_values {
        let beams = beam_set_at(b, ladder0, drive_field, material, confinement)?;
        let traced = trace(&beams, scene, divergence_deg)?;
        out.push(SwitchState {
            b,
            d1_active: traced.frac_d1 > threshold,
            d2_active: traced.frac_d2 > threshold,
        });
    }
    Ok(out)
}
