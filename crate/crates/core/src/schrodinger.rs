//! Finite-difference solver for the transverse Schrödinger problem at
//! fixed k_x, for arbitrary confinement.
//!
//! In the gauge A = (Bz, 0, 0) the transverse operator at fixed k_x is
//! (ħk_x + eBz)²/2m + p_z²/2m + V(z). Discretizing p_z²/2m with the
//! standard 3-point stencil on a uniform grid yields a symmetric
//! tridiagonal matrix whose lowest eigenvalues are the subband energies at
//! that k_x. This is the numerical cross-check for the closed-form
//! parabolic model, and the only solver available for the triangular well,
//! where the field pushes every dispersion minimum away from k_x = 0.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::phys::{z0_from_omega0, Confinement, Material, E_CHARGE, HBAR};
use crate::tridiag::SymTridiag;

/// Grid resolution used by [`default_grid`].
pub const DEFAULT_GRID_POINTS: usize = 2001;

/// Uniform 1D grid; the 3-point stencil imposes ψ = 0 just outside both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub z_min: f64,
    pub z_max: f64,
    pub n_points: usize,
}

impl Grid1D {
    pub fn new(z_min: f64, z_max: f64, n_points: usize) -> Result<Self> {
        if n_points < 3 {
            return Err(Error::domain(format!("grid needs at least 3 points, got {n_points}")));
        }
        if !(z_max > z_min) || !z_min.is_finite() || !z_max.is_finite() {
            return Err(Error::domain(format!(
                "grid needs z_max > z_min, got [{z_min:e}, {z_max:e}]"
            )));
        }
        Ok(Grid1D { z_min, z_max, n_points })
    }

    pub fn spacing(&self) -> f64 {
        (self.z_max - self.z_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.z_min + i as f64 * self.spacing()
    }
}

/// Characteristic length of the triangular well, (ħ²/2m·eE_s)^{1/3}.
pub fn triangular_effective_length(slope_field: f64, material: &Material) -> Result<f64> {
    if !(slope_field > 0.0) {
        return Err(Error::domain(format!("slope field must be > 0, got {slope_field:e}")));
    }
    Ok((HBAR * HBAR / (2.0 * material.mass() * E_CHARGE * slope_field)).cbrt())
}

/// Recommended grid: ±10 z₀ for a parabolic well (zero-field length), or
/// (0, 40 z_eff] for a triangular well, whose hard wall at z = 0 is the
/// lower Dirichlet boundary (the first grid point sits one spacing inside).
pub fn default_grid(
    confinement: &Confinement,
    material: &Material,
    n_points: usize,
) -> Result<Grid1D> {
    match confinement {
        Confinement::Parabolic { omega0 } => {
            let z0 = z0_from_omega0(*omega0, material)?;
            Grid1D::new(-10.0 * z0, 10.0 * z0, n_points)
        }
        Confinement::Triangular { slope_field } => {
            let z_max = 40.0 * triangular_effective_length(*slope_field, material)?;
            Grid1D::new(z_max / n_points as f64, z_max, n_points)
        }
    }
}

/// Discretized transverse Hamiltonian at one (k_x, B).
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian1D {
    pub matrix: SymTridiag,
    pub grid: Grid1D,
    /// Non-fatal quality complaints, e.g. a grid too coarse to resolve the
    /// confinement length.
    pub warnings: Vec<String>,
}

/// Build the symmetric tridiagonal Hamiltonian: diagonal
/// ħ²/mh² + (ħk_x + eBz_i)²/2m + V(z_i), off-diagonal −ħ²/2mh².
pub fn build_hamiltonian(
    kx: f64,
    b: f64,
    confinement: &Confinement,
    material: &Material,
    grid: &Grid1D,
) -> Result<Hamiltonian1D> {
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::domain(format!("magnetic field must be >= 0 T, got {b}")));
    }
    let m = material.mass();
    let h = grid.spacing();
    let kinetic = HBAR * HBAR / (m * h * h);
    let mut warnings = Vec::new();
    match confinement {
        Confinement::Parabolic { omega0 } => {
            let omega_c = E_CHARGE * b / m;
            let omega = (omega0 * omega0 + omega_c * omega_c).sqrt();
            let z0_b = (HBAR / (m * omega)).sqrt();
            if h > z0_b / 4.0 {
                warnings.push(format!(
                    "grid spacing {h:e} m exceeds a quarter of the confinement length {z0_b:e} m"
                ));
            }
        }
        Confinement::Triangular { .. } => {
            if grid.z_min <= 0.0 {
                return Err(Error::domain(
                    "triangular well grid must lie at z > 0; the wall at z = 0 is the Dirichlet boundary",
                ));
            }
        }
    }
    let mut diag = Vec::with_capacity(grid.n_points);
    for i in 0..grid.n_points {
        let z = grid.point(i);
        let potential = match confinement {
            Confinement::Parabolic { omega0 } => 0.5 * m * omega0 * omega0 * z * z,
            Confinement::Triangular { slope_field } => E_CHARGE * slope_field * z,
        };
        let canonical = HBAR * kx + E_CHARGE * b * z;
        diag.push(kinetic + canonical * canonical / (2.0 * m) + potential);
    }
    let off = vec![-0.5 * kinetic; grid.n_points - 1];
    Ok(Hamiltonian1D { matrix: SymTridiag::new(diag, off)?, grid: *grid, warnings })
}

/// The `k` lowest subband energies of a built Hamiltonian (J), ascending.
pub fn lowest_eigenvalues(hamiltonian: &Hamiltonian1D, k: usize) -> Result<Vec<f64>> {
    hamiltonian.matrix.lowest_eigenvalues(k)
}

/// Energies plus grid eigenvectors (unit Euclidean norm over grid points).
pub fn lowest_eigenpairs(
    hamiltonian: &Hamiltonian1D,
    k: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    hamiltonian.matrix.lowest_eigenpairs(k)
}

/// Energies over a k_x range, with per-band minima locations.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionCurve {
    /// Sampled k_x values (m⁻¹), ascending and symmetric about 0.
    pub kx_samples: Vec<f64>,
    /// energies[i][n] = E_n at kx_samples[i] (J), ascending in n.
    pub energies: Vec<Vec<f64>>,
    /// Vertex-interpolated minimum position of each band (m⁻¹).
    pub minima_kx: Vec<f64>,
    /// Resolution of the minima positions: 1e-3 of the sample spacing on
    /// smooth parabola-like data.
    pub interp_tolerance: f64,
}

/// Symmetric sample range for [`dispersion`]: `count` points (odd, so 0 is
/// included) from −kx_max to +kx_max, mirror pairs exactly negated.
pub fn symmetric_kx_range(kx_max: f64, count: usize) -> Result<Vec<f64>> {
    if !(kx_max > 0.0) || !kx_max.is_finite() {
        return Err(Error::domain(format!("kx_max must be > 0, got {kx_max:e}")));
    }
    if count < 3 || count % 2 == 0 {
        return Err(Error::domain(format!(
            "symmetric range needs an odd count >= 3 so k = 0 is included, got {count}"
        )));
    }
    let half = count / 2;
    let mut out = vec![0.0; count];
    for k in 1..=half {
        let v = kx_max * k as f64 / half as f64;
        out[half + k] = v;
        out[half - k] = -v;
    }
    Ok(out)
}

/// Diagonalize at every k_x sample and locate each band's minimum by
/// parabolic vertex interpolation through the discrete minimum and its
/// neighbors. Samples fan out across worker threads and are merged back in
/// order, so the result is bit-identical to a serial run.
pub fn dispersion(
    kx_samples: &[f64],
    b: f64,
    confinement: &Confinement,
    material: &Material,
    grid: &Grid1D,
    n_bands: usize,
) -> Result<DispersionCurve> {
    if n_bands < 1 {
        return Err(Error::domain("n_bands must be >= 1"));
    }
    if kx_samples.len() < 21 {
        return Err(Error::domain(format!(
            "dispersion needs at least 21 k_x samples, got {}",
            kx_samples.len()
        )));
    }
    let n = kx_samples.len();
    let kmax = kx_samples.iter().fold(0.0f64, |a, &k| a.max(k.abs()));
    for i in 0..n {
        if i + 1 < n && !(kx_samples[i] < kx_samples[i + 1]) {
            return Err(Error::domain("k_x samples must be strictly ascending"));
        }
        if (kx_samples[i] + kx_samples[n - 1 - i]).abs() > 1e-9 * kmax {
            return Err(Error::domain(format!(
                "k_x samples must be symmetric about 0; sample {i} breaks the mirror"
            )));
        }
    }
    let results: Vec<Result<Vec<f64>>> = kx_samples
        .par_iter()
        .map(|&kx| lowest_eigenvalues(&build_hamiltonian(kx, b, confinement, material, grid)?, n_bands))
        .collect();
    let mut energies = Vec::with_capacity(n);
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(row) => energies.push(row),
            Err(e) => {
                return Err(Error::numeric(format!(
                    "dispersion failed at kx = {:e}: {e}",
                    kx_samples[i]
                )))
            }
        }
    }
    let spacing = kx_samples[1] - kx_samples[0];
    let interp_tolerance = 1e-3 * spacing;
    let mut minima_kx = Vec::with_capacity(n_bands);
    for band in 0..n_bands {
        let mut imin = 0;
        for i in 1..n {
            if energies[i][band] < energies[imin][band] {
                imin = i;
            }
        }
        if imin == 0 || imin == n - 1 {
            return Err(Error::numeric(format!(
                "band {band} has its minimum at the edge of the k_x range; widen the range"
            )));
        }
        let (y0, y1, y2) =
            (energies[imin - 1][band], energies[imin][band], energies[imin + 1][band]);
        let denom = y0 - 2.0 * y1 + y2;
        let offset = if denom > 0.0 { 0.5 * spacing * (y0 - y2) / denom } else { 0.0 };
        minima_kx.push(kx_samples[imin] + offset);
    }
    Ok(DispersionCurve {
        kx_samples: kx_samples.to_vec(),
        energies,
        minima_kx,
        interp_tolerance,
    })
}
