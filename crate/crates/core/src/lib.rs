//! Magnetoelectric subband structure of a quasi-2D electron gas in an
//! in-plane magnetic field.
//!
//! The library models a high-mobility electron sheet confined along z and
//! threaded by a magnetic field along y. The field hybridizes the electric
//! confinement with the cyclotron motion, lifting every subband and
//! squeezing carriers out of the upper ones. Each depopulation event ejects
//! the emptied carriers into the lower subband with a fixed longitudinal
//! momentum, which an applied drive field turns into a pair of symmetric
//! deflection angles.
//!
//! Module map:
//! - [`phys`]: constants, material and confinement parameter types
//! - [`subband`]: closed-form hybrid subband ladder for parabolic wells
//! - [`occupancy`]: Fermi filling, populations, depopulation fields
//! - [`kinematics`]: momentum jumps, drift, deflection angles, beam sets
//! - [`tridiag`]: symmetric tridiagonal eigensolver
//! - [`schrodinger`]: finite-difference solver for arbitrary wells
//! - [`geometry`]: detector scene and beam tracing
//! - [`sweep`]: field sweeps and inverse design helpers

pub mod error;
pub mod geometry;
pub mod kinematics;
pub mod occupancy;
pub mod phys;
pub mod roots;
pub mod schrodinger;
pub mod subband;
pub mod sweep;
pub mod tridiag;

pub use error::{Error, Result};
pub use phys::{Confinement, Material, E_CHARGE, HBAR, M0};
