//! Subband filling, magnetic depopulation, and critical-field computation.
//!
//! At T = 0 every occupied subband holds a sheet density proportional to the
//! Fermi-level overhang above its bottom edge. Raising B lifts all subbands
//! through the diamagnetic shift while the total density stays fixed, so
//! carriers drain from upper subbands into lower ones until, one by one, the
//! upper subbands empty. The field at which the second subband of a
//! two-subband system empties has a closed form; the general cascade is
//! found by bisection on the occupied count.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::phys::{Confinement, Material, E_CHARGE, HBAR};
use crate::subband::{diamagnetic_shift, field_point, FieldPoint};

/// Absolute bisection tolerance on depopulation fields (T).
pub const DEPOPULATION_FIELD_TOL: f64 = 1e-6;

/// Spin-degenerate 2D density of states of one subband, m*/(πħ²),
/// in states per joule per m².
///
/// The two-band transfer formula moves carriers at half this rate because
/// the Fermi level itself recedes by half the relative shift; both forms
/// describe the same filling (see `populations_two_subband`).
pub fn dos_per_subband(material: &Material) -> f64 {
    material.mass() / (PI * HBAR * HBAR)
}

/// Occupation snapshot at one field value.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandLadder {
    /// Field at which the ladder was filled (T).
    pub b: f64,
    /// Sheet density per subband (m⁻²), padded with zeros to the requested
    /// subband count; non-increasing in n.
    pub densities: Vec<f64>,
    /// Fermi energy (J).
    pub fermi_energy: f64,
    /// Number of strictly positive densities.
    pub occupied_count: usize,
}

impl SubbandLadder {
    /// Total sheet density (m⁻²).
    pub fn total(&self) -> f64 {
        self.densities.iter().sum()
    }
}

/// Result of the two-band transfer formula at one field value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBandPopulations {
    /// Lower-subband density N₀(B) (m⁻²).
    pub lower: f64,
    /// Upper-subband density N₁(B) (m⁻²), clamped at 0 once emptied.
    pub upper: f64,
    /// True when the raw upper density was ≤ 0 before clamping.
    pub upper_depopulated: bool,
}

/// Two-subband populations under field: the upper band sheds
/// (m/2πħ²)(ΔE₁ − ΔE₀) carriers into the lower band.
///
/// `n0` and `n1` are the zero-field densities. A negative upper result is
/// clamped to 0 and flagged; the lower value is the raw transfer result, so
/// the pair conserves n0 + n1 only up to the clamp (past depopulation the
/// two-band formula no longer applies; use [`fermi_fill`] there).
pub fn populations_two_subband(n0: f64, n1: f64, fp: &FieldPoint) -> Result<TwoBandPopulations> {
    if !(n1 >= 0.0) || !(n0 >= n1) || !n0.is_finite() {
        return Err(Error::domain(format!(
            "ladder ordering requires N0 >= N1 >= 0, got N0 = {n0:e}, N1 = {n1:e}"
        )));
    }
    let transfer = fp.mass * (diamagnetic_shift(1, fp) - diamagnetic_shift(0, fp))
        / (2.0 * PI * HBAR * HBAR);
    let lower = n0 + transfer;
    let raw_upper = n1 - transfer;
    if raw_upper <= 0.0 {
        Ok(TwoBandPopulations { lower, upper: 0.0, upper_depopulated: true })
    } else {
        Ok(TwoBandPopulations { lower, upper: raw_upper, upper_depopulated: false })
    }
}

/// Field at which the second subband of a two-subband system empties:
/// B₁ = (m/e)·√((ω₀ + 2πħN₁/m)² − ω₀²), with N₁ the zero-field upper density.
pub fn depopulation_field_closed_form(n1: f64, omega0: f64, material: &Material) -> Result<f64> {
    if !(n1 > 0.0) || !n1.is_finite() {
        return Err(Error::domain(format!("N1 must be > 0, got {n1:e}")));
    }
    if !(omega0 > 0.0) {
        return Err(Error::domain(format!("omega0 must be > 0, got {omega0:e}")));
    }
    let m = material.mass();
    let shifted = omega0 + 2.0 * PI * HBAR * n1 / m;
    Ok(m / E_CHARGE * (shifted * shifted - omega0 * omega0).sqrt())
}

/// Fill `n_total` carriers into the subband ladder at the field of `fp`.
///
/// Solves Σ_n max(0, D·(E_F − E_n)) = n_total with E_n = ħω(n + ½) and
/// D = m*/(πħ²). The piecewise-linear filling has a closed form: the
/// occupied count is the largest k (capped at `max_subbands`) with
/// n_total > D·ħω·k(k−1)/2, and E_F follows from the linear solve.
pub fn fermi_fill(n_total: f64, fp: &FieldPoint, max_subbands: usize) -> Result<SubbandLadder> {
    if !(n_total > 0.0) || !n_total.is_finite() {
        return Err(Error::domain(format!("total density must be > 0, got {n_total:e}")));
    }
    if max_subbands < 1 {
        return Err(Error::domain("max_subbands must be >= 1"));
    }
    let dos = fp.mass / (PI * HBAR * HBAR);
    let spacing = HBAR * fp.omega;
    let mut occupied = 1usize;
    while occupied < max_subbands {
        let next = (occupied + 1) as f64;
        if n_total > dos * spacing * next * (next - 1.0) * 0.5 {
            occupied += 1;
        } else {
            break;
        }
    }
    let k = occupied as f64;
    let fermi = n_total / (k * dos) + spacing * k * 0.5;
    let mut densities = vec![0.0; max_subbands];
    for (n, d) in densities.iter_mut().enumerate().take(occupied) {
        // the top density can round to a tiny negative exactly at an
        // emptying field; clamp it so the ladder stays physical
        *d = (dos * (fermi - spacing * (n as f64 + 0.5))).max(0.0);
    }
    let occupied_count = densities.iter().filter(|d| **d > 0.0).count();
    Ok(SubbandLadder { b: fp.b, densities, fermi_energy: fermi, occupied_count })
}

/// Ascending list of fields at which the occupied count drops by one,
/// each located by bisection to [`DEPOPULATION_FIELD_TOL`].
///
/// A system that already has a single occupied subband at B = 0 returns an
/// empty list. For a two-subband system whose zero-field ladder came from
/// [`fermi_fill`], the single entry matches the closed form to the same
/// tolerance.
pub fn depopulation_fields(
    n_total: f64,
    confinement: &Confinement,
    material: &Material,
    max_subbands: usize,
) -> Result<Vec<f64>> {
    let occupied_at = |b: f64| -> Result<usize> {
        let fp = field_point(b, material, confinement)?;
        Ok(fermi_fill(n_total, &fp, max_subbands)?.occupied_count)
    };
    let initial = occupied_at(0.0)?;
    let mut fields = Vec::new();
    for target in (2..=initial).rev() {
        // find the field where the count first drops below `target`
        let mut lo: f64 = fields.last().copied().unwrap_or(0.0);
        let mut hi = lo.max(1.0);
        let mut doublings = 0;
        while occupied_at(hi)? >= target {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > 60 {
                return Err(Error::numeric(format!(
                    "could not bracket the emptying of subband {} below {hi:e} T",
                    target - 1
                )));
            }
        }
        while hi - lo > DEPOPULATION_FIELD_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if occupied_at(mid)? >= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        fields.push(0.5 * (lo + hi));
    }
    Ok(fields)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phys::omega0_from_z0;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gaas() -> Material {
        Material::new(0.067, 6e2).unwrap()
    }

    fn parabolic(z0: f64) -> Confinement {
        Confinement::parabolic_from_z0(z0, &gaas()).unwrap()
    }

    fn fp_at(b: f64, z0: f64) -> FieldPoint {
        field_point(b, &gaas(), &parabolic(z0)).unwrap()
    }

    /// Zero-field densities consistent with a Fermi fill: N0 - N1 = D hbar omega0.
    fn consistent_pair(n1: f64, z0: f64) -> (f64, f64) {
        let fp0 = fp_at(0.0, z0);
        let n0 = n1 + dos_per_subband(&gaas()) * HBAR * fp0.omega0;
        (n0, n1)
    }

    #[test]
    fn populations_unchanged_at_zero_field() {
        let fp = fp_at(0.0, 4e-9);
        let p = populations_two_subband(2e16, 1.2e14, &fp).unwrap();
        assert_eq!(p.lower, 2e16);
        assert_eq!(p.upper, 1.2e14);
        assert!(!p.upper_depopulated);
    }

    #[test]
    fn populations_conserve_before_clamp() {
        let (n0, n1) = consistent_pair(1.2e14, 4e-9);
        for &b in &[0.5, 2.0, 5.0] {
            let p = populations_two_subband(n0, n1, &fp_at(b, 4e-9)).unwrap();
            assert!(!p.upper_depopulated, "B = {b}: unexpectedly depopulated");
            let sum = p.lower + p.upper;
            assert!(
                (sum - (n0 + n1)).abs() / (n0 + n1) < 1e-12,
                "B = {b}: sum = {sum:e} vs {:e}",
                n0 + n1
            );
        }
    }

    #[test]
    fn populations_reject_inverted_ladder() {
        let fp = fp_at(1.0, 4e-9);
        assert!(populations_two_subband(1e14, 2e14, &fp).is_err());
        assert!(populations_two_subband(1e14, -1.0, &fp).is_err());
    }

    #[test]
    fn upper_band_empties_at_the_closed_form_field() {
        let n1 = 1.2e14;
        let b1 = depopulation_field_closed_form(n1, fp_at(0.0, 4e-9).omega0, &gaas()).unwrap();
        let p = populations_two_subband(consistent_pair(n1, 4e-9).0, n1, &fp_at(b1, 4e-9)).unwrap();
        assert!(p.upper.abs() <= 1e-6 * n1, "upper at B1 = {:e}", p.upper);
        let above = populations_two_subband(2e16, n1, &fp_at(b1 * 1.5, 4e-9)).unwrap();
        assert!(above.upper_depopulated);
        assert_eq!(above.upper, 0.0);
    }

    #[test]
    fn critical_field_reference_values() {
        let mat = gaas();
        let b_a =
            depopulation_field_closed_form(1.2e14, omega0_from_z0(4e-9, &mat).unwrap(), &mat)
                .unwrap();
        let b_b =
            depopulation_field_closed_form(1.2e14, omega0_from_z0(5e-9, &mat).unwrap(), &mat)
                .unwrap();
        assert!((b_a - 6.409250).abs() < 1e-4, "B1(4 nm) = {b_a}");
        assert!((b_b - 5.136039).abs() < 1e-4, "B1(5 nm) = {b_b}");
    }

    #[test]
    fn critical_field_vanishes_with_upper_density() {
        let mat = gaas();
        let omega0 = omega0_from_z0(4e-9, &mat).unwrap();
        let mut last = depopulation_field_closed_form(1e12, omega0, &mat).unwrap();
        for &n1 in &[1e10, 1e8, 1e6] {
            let b = depopulation_field_closed_form(n1, omega0, &mat).unwrap();
            assert!(b < last, "B1 not shrinking at N1 = {n1:e}");
            last = b;
        }
        assert!(last < 1e-3, "B1(1e6) = {last:e}");
        assert!(depopulation_field_closed_form(0.0, omega0, &mat).is_err());
    }

    #[test]
    fn single_subband_fill_closed_form() {
        let fp = fp_at(3.0, 4e-9);
        let n = 1e15; // far below the two-subband threshold
        let ladder = fermi_fill(n, &fp, 4).unwrap();
        assert_eq!(ladder.occupied_count, 1);
        let expect = 0.5 * HBAR * fp.omega + PI * HBAR * HBAR * n / fp.mass;
        assert!(
            (ladder.fermi_energy - expect).abs() / expect < 1e-12,
            "E_F = {:e} vs {expect:e}",
            ladder.fermi_energy
        );
        assert_eq!(&ladder.densities[1..], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn two_subband_fill_matches_transfer_formula() {
        let n1 = 1.2e14;
        let (n0, _) = consistent_pair(n1, 4e-9);
        let total = n0 + n1;
        for &b in &[0.0, 1.0, 3.0, 6.0] {
            let fp = fp_at(b, 4e-9);
            let ladder = fermi_fill(total, &fp, 4).unwrap();
            let p = populations_two_subband(n0, n1, &fp).unwrap();
            assert_eq!(ladder.occupied_count, 2, "B = {b}");
            assert!(
                (ladder.densities[0] - p.lower).abs() / p.lower < 1e-10,
                "B = {b}: N0 fill {:e} vs transfer {:e}",
                ladder.densities[0],
                p.lower
            );
            assert!(
                (ladder.densities[1] - p.upper).abs() / p.upper.max(1.0) < 1e-10,
                "B = {b}: N1 fill {:e} vs transfer {:e}",
                ladder.densities[1],
                p.upper
            );
        }
    }

    #[test]
    fn equal_spacing_of_three_band_fill() {
        let fp = fp_at(0.0, 4e-9);
        let dos = dos_per_subband(&gaas());
        let step = dos * HBAR * fp.omega0;
        let total = 4.0 * step; // enough for three subbands, not four
        let ladder = fermi_fill(total, &fp, 6).unwrap();
        assert_eq!(ladder.occupied_count, 3);
        let d01 = ladder.densities[0] - ladder.densities[1];
        let d12 = ladder.densities[1] - ladder.densities[2];
        assert!((d01 - step).abs() / step < 1e-12, "d01 = {d01:e} vs {step:e}");
        assert!((d12 - step).abs() / step < 1e-12, "d12 = {d12:e} vs {step:e}");
    }

    #[test]
    fn fill_rejects_bad_inputs() {
        let fp = fp_at(0.0, 4e-9);
        assert!(fermi_fill(0.0, &fp, 4).is_err());
        assert!(fermi_fill(-1e15, &fp, 4).is_err());
        assert!(fermi_fill(1e15, &fp, 0).is_err());
    }

    #[test]
    fn two_subband_depopulation_matches_closed_form() {
        let n1 = 1.2e14;
        let (n0, _) = consistent_pair(n1, 4e-9);
        let mat = gaas();
        let fields = depopulation_fields(n0 + n1, &parabolic(4e-9), &mat, 4).unwrap();
        assert_eq!(fields.len(), 1);
        let closed =
            depopulation_field_closed_form(n1, omega0_from_z0(4e-9, &mat).unwrap(), &mat).unwrap();
        assert!(
            (fields[0] - closed).abs() <= DEPOPULATION_FIELD_TOL,
            "bisection {:e} vs closed form {closed:e}",
            fields[0]
        );
    }

    #[test]
    fn single_subband_has_no_depopulation() {
        let fields = depopulation_fields(1e15, &parabolic(4e-9), &gaas(), 4).unwrap();
        assert!(fields.is_empty(), "fields = {fields:?}");
    }

    #[test]
    fn fill_count_changes_across_each_reported_field() {
        let total = 8e16; // three occupied subbands at B = 0 for z0 = 4 nm
        let conf = parabolic(4e-9);
        let mat = gaas();
        let fields = depopulation_fields(total, &conf, &mat, 6).unwrap();
        assert_eq!(fields.len(), 2);
        assert!(fields[0] < fields[1], "not ascending: {fields:?}");
        for (i, &b) in fields.iter().enumerate() {
            let expected_above = 2 - i;
            let below = fermi_fill(total, &field_point(b - 1e-4, &mat, &conf).unwrap(), 6)
                .unwrap()
                .occupied_count;
            let above = fermi_fill(total, &field_point(b + 1e-4, &mat, &conf).unwrap(), 6)
                .unwrap()
                .occupied_count;
            assert_eq!(below, expected_above + 1, "below field {i}");
            assert_eq!(above, expected_above, "above field {i}");
        }
    }

    #[test]
    fn brute_force_scan_agrees_with_bisection() {
        // a wide 16 nm well puts two of its three events below 12 T;
        // count transitions on a 1e-4 T grid and compare against the solver
        let total = 1.2e16;
        let conf = parabolic(16e-9);
        let mat = gaas();
        let fields = depopulation_fields(total, &conf, &mat, 6).unwrap();
        assert_eq!(fields.len(), 3, "expected a 4-subband fill at zero field");
        let in_range: Vec<f64> = fields.iter().copied().filter(|f| *f < 12.0).collect();
        assert_eq!(in_range.len(), 2, "fields = {fields:?}");

        let mut scanned = Vec::new();
        let step = 1e-4;
        let mut prev = fermi_fill(total, &field_point(0.0, &mat, &conf).unwrap(), 6)
            .unwrap()
            .occupied_count;
        let mut b = step;
        while b < 12.0 {
            let count = fermi_fill(total, &field_point(b, &mat, &conf).unwrap(), 6)
                .unwrap()
                .occupied_count;
            if count < prev {
                scanned.push(b);
                prev = count;
            }
            b += step;
        }
        assert_eq!(scanned.len(), in_range.len());
        for (s, f) in scanned.iter().zip(&in_range) {
            assert!((s - f).abs() <= step, "scan {s} vs bisection {f}");
        }
    }

    #[test]
    fn density_conservation_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for case in 0..200 {
            let z0 = rng.gen_range(2e-9..10e-9);
            let total = 10f64.powf(rng.gen_range(14.0..17.0));
            let b = rng.gen_range(0.0..30.0);
            let ladder = fermi_fill(total, &fp_at(b, z0), 8).unwrap();
            let sum = ladder.total();
            assert!(
                (sum - total).abs() / total < 1e-10,
                "case {case}: sum = {sum:e} vs total = {total:e}"
            );
            for w in ladder.densities.windows(2) {
                assert!(w[0] >= w[1], "case {case}: densities not sorted: {:?}", ladder.densities);
            }
        }
    }

    #[test]
    fn occupied_count_monotone_in_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for case in 0..200 {
            let z0 = rng.gen_range(2e-9..10e-9);
            let total = 10f64.powf(rng.gen_range(14.0..17.0));
            let mut b_lo = rng.gen_range(0.0..20.0);
            let mut b_hi = rng.gen_range(0.0..20.0);
            if b_lo > b_hi {
                std::mem::swap(&mut b_lo, &mut b_hi);
            }
            let lo = fermi_fill(total, &fp_at(b_lo, z0), 8).unwrap().occupied_count;
            let hi = fermi_fill(total, &fp_at(b_hi, z0), 8).unwrap().occupied_count;
            assert!(hi <= lo, "case {case}: count rose from {lo} to {hi} as B {b_lo} -> {b_hi}");
        }
    }
}
