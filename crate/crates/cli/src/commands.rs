//! Subcommand implementations.

use std::f64::consts::PI;

use anyhow::{bail, Context, Result};
use log::{info, warn};
use serde::Serialize;
use serde_json::json;
use sinegordon_core::bethe::{energy_momentum, lattice_energy, solve_ground_state, BetheState};
use sinegordon_core::checks::{
    bethe_ed_suite, commutation_suite, decoupled_limit_suite, decoupled_spectrum_suite,
    first_order_suite, reconciliation_suite, yang_baxter_suite, SuiteResult,
};
use sinegordon_core::continuum::{
    hole_dispersion_continuum, soliton_mass, vacuum_energy_integral, vacuum_energy_pole_term,
    vacuum_energy_singular, vacuum_residue_series, ContinuumConstants, DispersionCurve,
};
use sinegordon_core::io::{
    bethe_csv, dispersion_csv, operator_csv, plot_csv, series_csv, spectrum_csv,
};
use sinegordon_core::scaling::{
    energy_scan, hole_gap, mass_scan, power_law_fit, FitModel, MassSource,
};
use sinegordon_core::spectra::{diagonalize, translation_labels, DiagMode};
use sinegordon_core::vertex::{hamiltonian_local, hamiltonian_logderiv, SectorBasis};
use sinegordon_core::{Execution, ModelParams};

use crate::config::{Command, Convention, Observable, RunConfig, Source};
use crate::output::{Report, RunOutput};

/// Largest sector the check suites diagonalize densely.
pub const CHECK_DIM_CAP: usize = 2000;
/// Largest sector diagonalized densely by `diag`; above it the lowest
/// `levels` are found iteratively.
pub const DENSE_DIM_CAP: usize = 2000;
/// Sup-norm tolerance of the finite-lattice dispersion against the continuum.
pub const DISPERSION_TOL: f64 = 0.01;
pub const MASS_SLOPE_TOL: f64 = 5e-3;
pub const MASS_PREFACTOR_TOL: f64 = 0.02;
pub const ENERGY_EXPONENT_TOL: f64 = 0.01;
pub const CALIBRATION_SPREAD_TOL: f64 = 5e-3;
pub const CALIBRATION_TOL: f64 = 0.01;
pub const CALIBRATION_TARGET: f64 = -0.5;

pub fn dispatch(cfg: &RunConfig, exec: Execution) -> Result<Report> {
    let out = RunOutput::new(cfg)?;
    info!(
        "{} -> {} (config {})",
        cfg.command,
        out.dir().display(),
        &out.provenance().config_hash[..12]
    );
    match cfg.command {
        Command::Check => check(cfg, exec, out),
        Command::Diag => diag(cfg, out),
        Command::Bethe => bethe(cfg, out),
        Command::Dispersion => dispersion(cfg, exec, out),
        Command::Vacuum => vacuum(cfg, exec, out),
        Command::Scan => scan(cfg, exec, out),
    }
}

fn guard_dim(sites: usize, ups: usize, cap: usize) -> Result<usize> {
    let dim = SectorBasis::dimension_of(sites, ups);
    if dim > cap {
        return Err(sinegordon_core::Error::DimensionExceeded { dim, cap }.into());
    }
    Ok(dim)
}

fn check(cfg: &RunConfig, exec: Execution, mut out: RunOutput) -> Result<Report> {
    let l = cfg.sites;
    guard_dim(l, l / 2, CHECK_DIM_CAP.min(cfg.dim_cap))?;
    for &s in &cfg.sites_grid {
        guard_dim(s, s / 2, CHECK_DIM_CAP.min(cfg.dim_cap))?;
    }
    let m = cfg.magnetization.max(1);
    let sectors = if m == l / 2 { vec![m - 1, m] } else { vec![m] };
    let suites: Vec<SuiteResult> = vec![
        yang_baxter_suite(cfg.samples, cfg.seed),
        commutation_suite(cfg.eta, cfg.theta, l.min(6), 2, cfg.seed, exec)?,
        reconciliation_suite(&cfg.sites_grid, &cfg.eta_grid, &cfg.theta_grid, exec)?,
        decoupled_spectrum_suite(cfg.eta, l)?,
        decoupled_limit_suite(cfg.eta, 12.0, l)?,
        first_order_suite(cfg.eta, l)?,
        bethe_ed_suite(cfg.eta, cfg.theta, l, &sectors, exec)?,
    ];
    for s in &suites {
        info!(
            "{:<28} {} residual {:.3e} (tol {:.0e})",
            s.name,
            if s.passed { "pass" } else { "FAIL" },
            s.residual,
            s.tolerance
        );
    }
    out.json("checks.json", &suites)?;
    out.finish("check", suites, json!({}))
}

fn diag(cfg: &RunConfig, mut out: RunOutput) -> Result<Report> {
    let p = cfg.params();
    let dim = guard_dim(p.sites, p.magnetization, cfg.dim_cap)?;
    let (h, name) = match cfg.convention {
        Convention::Logderiv => (hamiltonian_logderiv(&p)?, "logderiv"),
        Convention::Local => (hamiltonian_local(&p)?, "local"),
    };
    let mode = if dim <= DENSE_DIM_CAP {
        DiagMode::Full
    } else {
        DiagMode::LowestK(cfg.levels.min(dim))
    };
    let mut spec = diagonalize(&h, &p, mode)?;
    if mode == DiagMode::Full && spec.hermitian {
        match translation_labels(&h, spec.clone()) {
            Ok(labelled) => spec = labelled,
            Err(e) => warn!("no momentum labels: {e}"),
        }
    }
    out.csv("spectrum.csv", spectrum_csv(&spec)?)?;
    out.json("spectrum.json", &spec)?;
    if cfg.dump_operator {
        let (bytes, desc) = operator_csv(&h, &p, name, 1e-14)?;
        out.csv("operator.csv", bytes)?;
        out.json("operator.json", &desc)?;
    }
    let summary = json!({ "dim": dim, "levels": spec.len(), "ground_energy": spec.ground_energy, "hermitian": spec.hermitian });
    out.finish("diag", Vec::new(), summary)
}

#[derive(Serialize)]
struct BetheSummary<'a> {
    state: &'a BetheState,
    energy: f64,
    momentum: f64,
    lattice_energy: f64,
}

fn bethe(cfg: &RunConfig, mut out: RunOutput) -> Result<Report> {
    let p = cfg.params();
    let state = solve_ground_state(&p).context("solving the ground state")?;
    let (energy, momentum) = energy_momentum(&state)?;
    let summary = BetheSummary {
        state: &state,
        energy,
        momentum,
        lattice_energy: lattice_energy(&state)?,
    };
    out.json("bethe.json", &summary)?;
    out.csv("roots.csv", bethe_csv(&state)?)?;
    let checks = vec![SuiteResult::new(
        "bethe_residual",
        state.residual,
        cfg.tol.max(1e-12),
        1,
    )];
    let s = json!({ "energy": energy, "momentum": momentum, "lattice_energy": summary.lattice_energy, "residual": state.residual });
    out.finish("bethe", checks, s)
}

fn dispersion(cfg: &RunConfig, exec: Execution, mut out: RunOutput) -> Result<Report> {
    let p = ModelParams::half_filled(cfg.eta, cfg.theta, cfg.sites)?;
    let gap = hole_gap(&p, exec)?;
    let ts: Vec<f64> = gap.samples.iter().map(|s| s.rapidity).collect();
    let finite = DispersionCurve::from_holes(&gap.samples, gap.gap);
    let continuum = DispersionCurve::continuum(&p, &ts)?;
    let relativistic = DispersionCurve::relativistic(&p, &ts);
    let physical = [
        finite.to_physical(p.eta),
        continuum.to_physical(p.eta),
        relativistic,
    ];
    out.csv(
        "dispersion.csv",
        dispersion_csv(&physical.iter().collect::<Vec<_>>())?,
    )?;
    let peak = ts
        .iter()
        .map(|&t| hole_dispersion_continuum(t, &p).0)
        .fold(0.0, f64::max);
    let worst = gap
        .samples
        .iter()
        .map(|s| (s.energy - hole_dispersion_continuum(s.rapidity, &p).0).abs())
        .fold(0.0, f64::max);
    let sv = ContinuumConstants::new(p.eta).v.sqrt();
    let summary = json!({
        "gap": gap.gap,
        "offset": gap.offset,
        "min_sample": gap.min_sample,
        "mass": gap.gap / sv,
        "continuum_mass": soliton_mass(&p),
        "sup_relative_deviation": worst / peak,
        "points": gap.samples.len(),
    });
    out.json(
        "dispersion.json",
        &json!({ "summary": summary, "holes": gap.samples }),
    )?;
    let checks = vec![SuiteResult::new(
        "continuum_dispersion",
        worst / peak,
        DISPERSION_TOL,
        ts.len(),
    )];
    out.finish("dispersion", checks, summary)
}

#[derive(Serialize)]
struct VacuumRow {
    theta: f64,
    h: f64,
    integral: f64,
    residue_series: f64,
    pole_term: Option<f64>,
    singular: Option<f64>,
}

fn vacuum(cfg: &RunConfig, exec: Execution, mut out: RunOutput) -> Result<Report> {
    let eta = cfg.eta;
    let pref = eta.sin() / 4.0;
    let rows: Vec<Result<VacuumRow>> = exec.map(&cfg.theta_grid, |&theta| {
        let p = ModelParams::half_filled(eta, theta, 4)?;
        Ok(VacuumRow {
            theta,
            h: (-theta).exp(),
            integral: vacuum_energy_integral(&p, cfg.tol)?,
            residue_series: pref * vacuum_residue_series(eta, theta, 400),
            pole_term: vacuum_energy_pole_term(&p).ok(),
            singular: vacuum_energy_singular(&p).ok(),
        })
    });
    let rows: Vec<VacuumRow> = rows.into_iter().collect::<Result<_>>()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "theta",
        "h",
        "integral",
        "residue_series",
        "pole_term",
        "singular",
    ])?;
    let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
    for r in &rows {
        w.write_record([
            format!("{:e}", r.theta),
            format!("{:e}", r.h),
            format!("{:e}", r.integral),
            format!("{:e}", r.residue_series),
            opt(r.pole_term),
            opt(r.singular),
        ])?;
    }
    out.csv("vacuum.csv", w.into_inner().map_err(|e| e.into_error())?)?;
    out.json("vacuum.json", &rows)?;
    // The residue series is only valid away from coinciding poles.
    let usable: Vec<&VacuumRow> = rows
        .iter()
        .filter(|r| r.residue_series.is_finite() && r.singular.is_some())
        .collect();
    let worst = usable
        .iter()
        .map(|r| (r.integral - r.residue_series).abs())
        .fold(0.0, f64::max);
    let checks = if usable.is_empty() {
        Vec::new()
    } else {
        vec![SuiteResult::new(
            "integral_vs_residues",
            worst,
            1e-10,
            usable.len(),
        )]
    };
    out.finish("vacuum", checks, json!({ "points": rows.len() }))
}

#[derive(Serialize)]
struct PointStatus {
    theta: f64,
    status: &'static str,
}

fn scan(cfg: &RunConfig, exec: Execution, mut out: RunOutput) -> Result<Report> {
    let eta = cfg.eta;
    let constants = ContinuumConstants::new(eta);
    match cfg.observable {
        Observable::Mass => {
            let source = match cfg.source {
                Source::Continuum => MassSource::Continuum,
                Source::Bethe => MassSource::BetheAnsatz { sites: cfg.sites },
            };
            let series = mass_scan(eta, &cfg.theta_grid, source, exec)?;
            let status: Vec<PointStatus> = cfg
                .theta_grid
                .iter()
                .map(|&t| PointStatus {
                    theta: t,
                    status: if series.thetas.contains(&t) {
                        "ok"
                    } else {
                        "failed"
                    },
                })
                .collect();
            if series.len() < 4 {
                out.json("points.json", &status)?;
                bail!(
                    "only {} of {} scan points succeeded",
                    series.len(),
                    cfg.theta_grid.len()
                );
            }
            let fit = power_law_fit(&series, FitModel::PurePower, constants.mass_exponent)?;
            out.csv("series.csv", series_csv(&series)?)?;
            out.csv("plot.csv", plot_csv(&series, &fit)?)?;
            let pref = 4.0 * constants.v.sqrt();
            let pref_dev = ((fit.prefactor - pref) / pref).abs();
            let summary = json!({
                "exponent": fit.exponent,
                "slope": -fit.exponent,
                "predicted_slope": -PI / (2.0 * eta),
                "prefactor": fit.prefactor,
                "predicted_prefactor": pref,
                "points": status,
            });
            out.json("fit.json", &json!({ "fit": fit, "summary": summary }))?;
            let checks = vec![
                SuiteResult::new("mass_slope", fit.deviation, MASS_SLOPE_TOL, series.len()),
                SuiteResult::new("mass_prefactor", pref_dev, MASS_PREFACTOR_TOL, series.len()),
            ];
            out.finish("scan", checks, summary)
        }
        Observable::Energy => {
            let scan = energy_scan(eta, &cfg.theta_grid, cfg.tol.min(1e-13), exec)?;
            out.csv("series.csv", series_csv(&scan.raw)?)?;
            out.csv("singular.csv", series_csv(&scan.singular)?)?;
            out.csv("plot.csv", plot_csv(&scan.raw, &scan.fit)?)?;
            let summary = json!({
                "exponent": scan.fit.exponent,
                "predicted_exponent": constants.energy_exponent,
                "calibration_mean": scan.calibration_mean,
                "calibration_spread": scan.calibration_spread,
                "background_order": scan.fit.background.len(),
            });
            out.json("fit.json", &scan)?;
            let n = scan.raw.len();
            let checks = vec![
                SuiteResult::new(
                    "energy_exponent",
                    scan.fit.deviation,
                    ENERGY_EXPONENT_TOL,
                    n,
                ),
                SuiteResult::new(
                    "calibration_spread",
                    scan.calibration_spread,
                    CALIBRATION_SPREAD_TOL,
                    n,
                ),
                SuiteResult::new(
                    "calibration_value",
                    (scan.calibration_mean - CALIBRATION_TARGET).abs() / CALIBRATION_TARGET.abs(),
                    CALIBRATION_TOL,
                    n,
                ),
            ];
            out.finish("scan", checks, summary)
        }
    }
}
