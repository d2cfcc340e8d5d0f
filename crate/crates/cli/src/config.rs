//! TOML device configuration: schema, validation, and conversion into the
//! core model types.
//!
//! Every key carries its unit in its name. Unknown keys are rejected with
//! an error naming the offending key, so a typo never silently falls back
//! to a default.

use std::path::Path;

use serde::Deserialize;

use mesub_core::occupancy::fermi_fill;
use mesub_core::subband::field_point;
use mesub_core::{Confinement, Material};

use crate::CliError;

/// Relative mismatch tolerated between configured per-subband densities
/// and the zero-field equilibrium fill.
const DENSITY_CONSISTENCY_TOL: f64 = 1e-6;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub material: MaterialSection,
    pub confinement: ConfinementSection,
    pub densities: Option<DensitiesSection>,
    pub drive: Option<DriveSection>,
    #[serde(default)]
    pub scene: SceneSection,
    #[serde(default)]
    pub numerics: NumericsSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    /// Effective mass in units of the free-electron mass.
    pub effective_mass_ratio: f64,
    /// Mobility (m²/Vs).
    pub mobility_m2_per_vs: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfinementSection {
    /// "parabolic" or "triangular".
    #[serde(rename = "type")]
    pub kind: String,
    /// Parabolic: zero-field confinement length (nm).
    pub z0_nm: Option<f64>,
    /// Parabolic alternative: confinement frequency (rad/s).
    pub omega0_rad_per_s: Option<f64>,
    /// Triangular: interface field strength (V/m).
    pub slope_field_v_per_m: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitiesSection {
    /// Total sheet density (m⁻²).
    pub total_per_m2: Option<f64>,
    /// Alternative: per-subband sheet densities (m⁻²), checked against the
    /// zero-field fill.
    pub per_subband_per_m2: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    /// Longitudinal drive field (V/m).
    #[serde(rename = "F_v_per_m")]
    pub f_v_per_m: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSection {
    #[serde(default = "default_theta_design")]
    pub theta_design_deg: f64,
    #[serde(default)]
    pub divergence_deg: f64,
    #[serde(default = "default_flight_distance")]
    pub collector_distance_m: f64,
    #[serde(default = "default_flight_distance")]
    pub detector_distance_m: f64,
}

fn default_theta_design() -> f64 {
    10.0
}

fn default_flight_distance() -> f64 {
    2e-5
}

impl Default for SceneSection {
    fn default() -> Self {
        SceneSection {
            theta_design_deg: default_theta_design(),
            divergence_deg: 0.0,
            collector_distance_m: default_flight_distance(),
            detector_distance_m: default_flight_distance(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    /// Grid resolution of the numeric eigensolver.
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    /// Number of subbands tracked in fills and reports.
    #[serde(default = "default_max_subbands")]
    pub max_subbands: usize,
    /// Largest allowed gap between the closed-form and bisected
    /// depopulation fields (T).
    #[serde(default = "default_depopulation_agreement", rename = "depopulation_agreement_T")]
    pub depopulation_agreement_t: f64,
}

fn default_grid_points() -> usize {
    2001
}

fn default_max_subbands() -> usize {
    8
}

fn default_depopulation_agreement() -> f64 {
    1e-6
}

impl Default for NumericsSection {
    fn default() -> Self {
        NumericsSection {
            grid_points: default_grid_points(),
            max_subbands: default_max_subbands(),
            depopulation_agreement_t: default_depopulation_agreement(),
        }
    }
}

pub fn load(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
}

impl Config {
    pub fn material(&self) -> Result<Material, CliError> {
        Ok(Material::new(self.material.effective_mass_ratio, self.material.mobility_m2_per_vs)?)
    }

    pub fn confinement(&self, material: &Material) -> Result<Confinement, CliError> {
        let c = &self.confinement;
        match c.kind.as_str() {
            "parabolic" => {
                if c.slope_field_v_per_m.is_some() {
                    return Err(CliError::Config(
                        "confinement.slope_field_v_per_m is only valid for type \"triangular\""
                            .into(),
                    ));
                }
                match (c.z0_nm, c.omega0_rad_per_s) {
                    (Some(z0_nm), None) => {
                        Ok(Confinement::parabolic_from_z0(z0_nm * 1e-9, material)?)
                    }
                    (None, Some(omega0)) => Ok(Confinement::parabolic(omega0)?),
                    _ => Err(CliError::Config(
                        "confinement: set exactly one of z0_nm or omega0_rad_per_s".into(),
                    )),
                }
            }
            "triangular" => {
                if c.z0_nm.is_some() || c.omega0_rad_per_s.is_some() {
                    return Err(CliError::Config(
                        "confinement.z0_nm and confinement.omega0_rad_per_s are only valid for \
                         type \"parabolic\""
                            .into(),
                    ));
                }
                match c.slope_field_v_per_m {
                    Some(slope) => Ok(Confinement::triangular(slope)?),
                    None => Err(CliError::Config(
                        "confinement: type \"triangular\" requires slope_field_v_per_m".into(),
                    )),
                }
            }
            other => Err(CliError::Config(format!(
                "confinement.type must be \"parabolic\" or \"triangular\", got \"{other}\""
            ))),
        }
    }

    /// Total sheet density, from whichever densities key is present. When
    /// the per-subband form is used, the split must match the zero-field
    /// equilibrium fill: a split the model would never produce is a config
    /// error, not an input.
    pub fn total_density(
        &self,
        material: &Material,
        confinement: &Confinement,
    ) -> Result<f64, CliError> {
        let section = self.densities.as_ref().ok_or_else(|| {
            CliError::Config("this command requires a [densities] section".into())
        })?;
        match (section.total_per_m2, &section.per_subband_per_m2) {
            (Some(total), None) => Ok(total),
            (None, Some(per)) => {
                if per.is_empty() {
                    return Err(CliError::Config(
                        "densities.per_subband_per_m2 must not be empty".into(),
                    ));
                }
                if per.len() > self.numerics.max_subbands {
                    return Err(CliError::Config(format!(
                        "densities.per_subband_per_m2 lists {} subbands but \
                         numerics.max_subbands is {}",
                        per.len(),
                        self.numerics.max_subbands
                    )));
                }
                let total = per.iter().sum();
                let fp0 = field_point(0.0, material, confinement)?;
                let fill = fermi_fill(total, &fp0, self.numerics.max_subbands)?;
                for (i, &filled) in fill.densities.iter().enumerate() {
                    let configured = per.get(i).copied().unwrap_or(0.0);
                    let scale = configured.abs().max(DENSITY_CONSISTENCY_TOL * total);
                    if (configured - filled).abs() > DENSITY_CONSISTENCY_TOL * scale {
                        return Err(CliError::Config(format!(
                            "densities.per_subband_per_m2[{i}] = {configured:e} does not match \
                             the zero-field fill {filled:e} for this confinement; adjust the \
                             entry or give total_per_m2 and let the fill decide"
                        )));
                    }
                }
                Ok(total)
            }
            _ => Err(CliError::Config(
                "densities: set exactly one of total_per_m2 or per_subband_per_m2".into(),
            )),
        }
    }

    pub fn drive_field(&self) -> Result<f64, CliError> {
        self.drive
            .as_ref()
            .map(|d| d.f_v_per_m)
            .ok_or_else(|| CliError::Config("this command requires a [drive] section".into()))
    }

    pub fn scene(&self) -> Result<mesub_core::geometry::Scene, CliError> {
        Ok(mesub_core::geometry::Scene::new(
            self.scene.theta_design_deg,
            self.scene.collector_distance_m,
            self.scene.detector_distance_m,
        )?)
    }
}
