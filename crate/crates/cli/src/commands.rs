//! Implementations of the five CLI commands.
//!
//! Reports go to stdout as `key = value` lines with units in the key
//! names. Tabular data goes to CSV or JSON files with every float at 17
//! significant digits, so a repeated run is byte-identical.

use std::io;
use std::path::Path;

use serde::Serialize;

use mesub_core::kinematics::{deflection_angle, drift_ky, jump_kx};
use mesub_core::occupancy::{
    depopulation_field_closed_form, depopulation_fields, fermi_fill,
};
use mesub_core::phys::omega0_from_z0;
use mesub_core::schrodinger::{
    default_grid, dispersion as grid_dispersion, symmetric_kx_range, Grid1D,
};
use mesub_core::subband::{diamagnetic_shift, field_point, subband_energy};
use mesub_core::sweep::{
    solve_confinement_for_depopulation, solve_drive_for_angle, sweep as run_sweep, Device,
    SweepRecord,
};
use mesub_core::{Confinement, Error, E_CHARGE};

use crate::config::Config;
use crate::{CliError, OutputFormat, Solver};

fn mev(energy_j: f64) -> f64 {
    energy_j / E_CHARGE * 1e3
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn parse_pair(text: &str, flag: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Config(format!("{flag} must be two comma-separated numbers, got \"{text}\""));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

pub fn subbands(cfg: &Config, b: f64, dispersion_out: Option<&Path>) -> Result<(), CliError> {
    let mat = cfg.material()?;
    let conf = cfg.confinement(&mat)?;
    let total = cfg.total_density(&mat, &conf)?;
    let fp = field_point(b, &mat, &conf)?;
    let ladder = fermi_fill(total, &fp, cfg.numerics.max_subbands)?;
    println!("B_T = {b}");
    println!("n_occupied = {}", ladder.occupied_count);
    println!("fermi_energy_meV = {}", mev(ladder.fermi_energy));
    for n in 0..cfg.numerics.max_subbands {
        println!("E{n}_k0_meV = {}", mev(subband_energy(n, 0.0, 0.0, &fp)));
        println!("dE{n}_meV = {}", mev(diamagnetic_shift(n, &fp)));
        println!("N{n}_per_m2 = {}", ladder.densities[n]);
    }
    if let Some(path) = dispersion_out {
        let samples = symmetric_kx_range(2e8, 41)?;
        let energies: Vec<Vec<f64>> = samples
            .iter()
            .map(|&kx| {
                (0..cfg.numerics.max_subbands)
                    .map(|n| subband_energy(n, kx, 0.0, &fp))
                    .collect()
            })
            .collect();
        write_file(path, &dispersion_csv(&samples, &energies))?;
        println!("wrote dispersion for {} bands to {}", cfg.numerics.max_subbands, path.display());
    }
    Ok(())
}

pub fn depopulate(cfg: &Config) -> Result<(), CliError> {
    let mat = cfg.material()?;
    let conf = cfg.confinement(&mat)?;
    let total = cfg.total_density(&mat, &conf)?;
    let max_subbands = cfg.numerics.max_subbands;
    let ladder0 = fermi_fill(total, &field_point(0.0, &mat, &conf)?, max_subbands)?;
    let fields = depopulation_fields(total, &conf, &mat, max_subbands)?;
    let rendered: Vec<String> = fields.iter().map(|f| f.to_string()).collect();
    println!("depopulation_fields_T = [{}]", rendered.join(", "));
    if ladder0.occupied_count == 2 {
        let closed = depopulation_field_closed_form(ladder0.densities[1], conf.omega0()?, &mat)?;
        let numeric = fields[0];
        let gap = (closed - numeric).abs();
        println!("closed_form_B1_T = {closed}");
        println!("numeric_B1_T = {numeric}");
        println!("agreement_T = {gap}");
        if gap > cfg.numerics.depopulation_agreement_t {
            return Err(Error::numeric(format!(
                "closed-form and bisected depopulation fields differ by {gap:e} T, more than \
                 the allowed {:e} T",
                cfg.numerics.depopulation_agreement_t
            ))
            .into());
        }
    }
    Ok(())
}

pub fn sweep(
    cfg: &Config,
    b_range: &str,
    steps: usize,
    out: &Path,
    format: OutputFormat,
) -> Result<(), CliError> {
    let (start, end) = parse_pair(b_range, "--B-range")?;
    let mat = cfg.material()?;
    let conf = cfg.confinement(&mat)?;
    let total = cfg.total_density(&mat, &conf)?;
    let device = Device::new(mat, conf, total, cfg.drive_field()?, cfg.numerics.max_subbands)?;
    let records = run_sweep(start, end, steps, &device, &cfg.scene()?, cfg.scene.divergence_deg)?;
    let contents = match format {
        OutputFormat::Csv => sweep_csv(&records, cfg.numerics.max_subbands),
        OutputFormat::Json => sweep_json(&records)?,
    };
    write_file(out, &contents)?;
    println!("wrote {} records to {}", records.len(), out.display());
    Ok(())
}

fn sweep_csv(records: &[SweepRecord], max_subbands: usize) -> String {
    let mut out = String::from("B_T,n_occupied");
    for n in 0..max_subbands {
        out.push_str(&format!(",N{n}_per_m2"));
    }
    out.push_str(",theta_deg,frac_C,frac_D1,frac_D2,resistance_proxy\n");
    for r in records {
        out.push_str(&format!("{:.16e},{}", r.b, r.occupied_count));
        for d in &r.densities {
            out.push_str(&format!(",{d:.16e}"));
        }
        out.push_str(&format!(
            ",{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.theta,
            r.detector_fractions.frac_c,
            r.detector_fractions.frac_d1,
            r.detector_fractions.frac_d2,
            r.resistance_proxy
        ));
    }
    out
}

#[derive(Serialize)]
struct SweepJson<'a> {
    model_notes: [&'a str; 4],
    records: Vec<JsonRecord>,
}

#[derive(Serialize)]
struct JsonRecord {
    #[serde(rename = "B_T")]
    b_t: f64,
    n_occupied: usize,
    densities_per_m2: Vec<f64>,
    theta_deg: f64,
    #[serde(rename = "frac_C")]
    frac_c: f64,
    #[serde(rename = "frac_D1")]
    frac_d1: f64,
    #[serde(rename = "frac_D2")]
    frac_d2: f64,
    resistance_proxy: f64,
}

/// JSON formatter printing every float at 17 significant digits, matching
/// the CSV convention.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

fn sweep_json(records: &[SweepRecord]) -> Result<String, CliError> {
    let payload = SweepJson {
        model_notes: [
            "beam composition is taken from the zero-field subband ladder",
            "each depopulated subband's weight splits 50/50 between the +kx and -kx beams",
            "theta_deg is the deflection angle of the +kx beam",
            "resistance_proxy = 1 / n_occupied",
        ],
        records: records
            .iter()
            .map(|r| JsonRecord {
                b_t: r.b,
                n_occupied: r.occupied_count,
                densities_per_m2: r.densities.clone(),
                theta_deg: r.theta,
                frac_c: r.detector_fractions.frac_c,
                frac_d1: r.detector_fractions.frac_d1,
                frac_d2: r.detector_fractions.frac_d2,
                resistance_proxy: r.resistance_proxy,
            })
            .collect(),
    };
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    payload
        .serialize(&mut ser)
        .map_err(|e| CliError::Io(format!("cannot serialize sweep records: {e}")))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| CliError::Io(format!("non-utf8 serializer output: {e}")))
}

pub fn design(
    cfg: &Config,
    target_theta_deg: Option<f64>,
    target_b1_t: Option<f64>,
) -> Result<(), CliError> {
    let mat = cfg.material()?;
    let conf = cfg.confinement(&mat)?;
    let total = cfg.total_density(&mat, &conf)?;
    let ladder0 = fermi_fill(total, &field_point(0.0, &mat, &conf)?, cfg.numerics.max_subbands)?;
    if ladder0.occupied_count != 2 {
        return Err(CliError::Config(format!(
            "design targets assume exactly two occupied subbands at zero field, got {}",
            ladder0.occupied_count
        )));
    }
    let n1 = ladder0.densities[1];
    match (target_theta_deg, target_b1_t) {
        (Some(theta), None) => {
            let b1 = depopulation_field_closed_form(n1, conf.omega0()?, &mat)?;
            let drive = solve_drive_for_angle(theta, b1, &mat, &conf)?;
            let fp = field_point(b1, &mat, &conf)?;
            let forward = deflection_angle(jump_kx(&fp), drift_ky(drive, &mat))?;
            println!("B1_T = {b1}");
            println!("F_v_per_m = {drive}");
            println!("forward_theta_deg = {forward}");
            println!("residual_deg = {}", (forward - theta).abs());
        }
        (None, Some(b1_target)) => {
            let z0 = solve_confinement_for_depopulation(b1_target, n1, &mat)?;
            let forward = depopulation_field_closed_form(n1, omega0_from_z0(z0, &mat)?, &mat)?;
            println!("z0_nm = {}", z0 * 1e9);
            println!("forward_B1_T = {forward}");
            println!("residual_T = {}", (forward - b1_target).abs());
        }
        _ => unreachable!("clap enforces exactly one design target"),
    }
    Ok(())
}

fn dispersion_csv(samples: &[f64], energies: &[Vec<f64>]) -> String {
    let bands = energies.first().map_or(0, Vec::len);
    let mut out = String::from("kx_per_m");
    for n in 0..bands {
        out.push_str(&format!(",E{n}_meV"));
    }
    out.push('\n');
    for (kx, row) in samples.iter().zip(energies) {
        out.push_str(&format!("{kx:.16e}"));
        for e in row {
            out.push_str(&format!(",{:.16e}", mev(*e)));
        }
        out.push('\n');
    }
    out
}

#[allow(clippy::too_many_arguments)]
pub fn dispersion(
    cfg: &Config,
    b: f64,
    kx_range: &str,
    kx_samples: usize,
    bands: usize,
    solver: Solver,
    compare: bool,
    out: Option<&Path>,
) -> Result<(), CliError> {
    if bands < 1 {
        return Err(CliError::Config("--bands must be at least 1".into()));
    }
    let mat = cfg.material()?;
    let conf = cfg.confinement(&mat)?;
    let (kx_min, kx_max) = parse_pair(kx_range, "--kx-range")?;
    if !(kx_max > 0.0) || kx_min != -kx_max {
        return Err(CliError::Config(format!(
            "--kx-range must be symmetric about 0 (MIN = -MAX), got {kx_min:e},{kx_max:e}"
        )));
    }
    let samples = symmetric_kx_range(kx_max, kx_samples)?;
    let parabolic = matches!(conf, Confinement::Parabolic { .. });
    let solver = match solver {
        Solver::Auto => {
            if parabolic {
                Solver::Analytic
            } else {
                Solver::Numeric
            }
        }
        chosen => chosen,
    };
    if !parabolic && (solver == Solver::Analytic || compare) {
        return Err(CliError::Config(
            "the analytic solver only handles parabolic confinement; use --solver numeric \
             (and drop --compare) for a triangular well"
            .into(),
        ));
    }

    let analytic = |samples: &[f64]| -> Result<Vec<Vec<f64>>, CliError> {
        let fp = field_point(b, &mat, &conf)?;
        Ok(samples
            .iter()
            .map(|&kx| (0..bands).map(|n| subband_energy(n, kx, 0.0, &fp)).collect())
            .collect())
    };
    let numeric = |samples: &[f64]| -> Result<mesub_core::schrodinger::DispersionCurve, CliError> {
        let grid = match conf {
            // 6 z0 half-width keeps the stencil error of the lowest bands
            // below 1e-5 relative; the wider default grid trades accuracy
            // for tail coverage this tabulation does not need
            Confinement::Parabolic { omega0 } => {
                let z0 = mesub_core::phys::z0_from_omega0(omega0, &mat)?;
                Grid1D::new(-6.0 * z0, 6.0 * z0, cfg.numerics.grid_points)?
            }
            Confinement::Triangular { .. } => {
                default_grid(&conf, &mat, cfg.numerics.grid_points)?
            }
        };
        Ok(grid_dispersion(samples, b, &conf, &mat, &grid, bands)?)
    };

    let mut minima: Option<(Vec<f64>, f64)> = None;
    let energies = match solver {
        Solver::Analytic => analytic(&samples)?,
        Solver::Numeric => {
            let curve = numeric(&samples)?;
            minima = Some((curve.minima_kx, curve.interp_tolerance));
            curve.energies
        }
        Solver::Auto => unreachable!("resolved above"),
    };
    if compare {
        let reference = analytic(&samples)?;
        let grid_curve = match solver {
            Solver::Numeric => energies.clone(),
            _ => numeric(&samples)?.energies,
        };
        let mut worst: f64 = 0.0;
        for (row_n, row_a) in grid_curve.iter().zip(&reference) {
            for (en, ea) in row_n.iter().zip(row_a) {
                worst = worst.max((en - ea).abs() / ea);
            }
        }
        println!("max_relative_deviation = {worst}");
    }

    let csv = dispersion_csv(&samples, &energies);
    let report = |line: String| {
        if out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    };
    if let Some((minima_kx, tolerance)) = minima {
        for (n, m) in minima_kx.iter().enumerate() {
            report(format!("minimum_kx_per_m[{n}] = {m}"));
        }
        report(format!("interp_tolerance_per_m = {tolerance}"));
    }
    match out {
        Some(path) => {
            write_file(path, &csv)?;
            println!("wrote {} samples x {bands} bands to {}", samples.len(), path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}
