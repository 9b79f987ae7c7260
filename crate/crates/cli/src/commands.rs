//! Subcommand bodies.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use alioth_core::config::{parse_override, ConfigError, Scenario};
use alioth_core::dynamics::cem;
use alioth_core::sim::{simulate as run_sim, SimConfig, SimError, SimOutput, Termination};
use alioth_core::stta::{
    leveling_constraints, longitudinal_allocation, rank_deficiency, stta_set,
    transverse_residual_scale, transverse_singularity_residual, vertical_motion_check,
    ConstraintReport, RANK_TOL,
};
use alioth_core::sweep::{run_ablation, run_ablation_pair, run_parallel, sweep_cases, write_sweep_csv};
use alioth_core::validate::run_invariants;
use alioth_core::Vehicle;

use crate::plot::{self, Chart, Series};
use crate::Common;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{0}")]
    Degenerate(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("run diverged: {0}")]
    Diverged(String),
    #[error("with-Nussbaum run diverged for seeds {0:?}")]
    Regression(Vec<u64>),
    #[error("{0} invariant(s) failed")]
    Invalid(usize),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Diverged(_) => 3,
            CliError::Regression(_) => 4,
            _ => 2,
        }
    }
}

fn load(c: &Common) -> Result<Scenario, CliError> {
    let base = match &c.config {
        Some(p) => Scenario::load(p)?,
        None => Scenario::new(SimConfig::default()),
    };
    let overrides = c
        .set
        .iter()
        .map(|s| parse_override(s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut s = base.with_overrides(&overrides)?;
    if let Some(seed) = c.seed {
        s.sim.seed = seed;
    }
    Ok(s)
}

fn out_dir(c: &Common) -> Result<&Path, CliError> {
    fs::create_dir_all(&c.out).map_err(|source| CliError::Io {
        path: c.out.clone(),
        source,
    })?;
    Ok(&c.out)
}

fn write(path: PathBuf, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(&path, bytes).map_err(|source| CliError::Io { path: path.clone(), source })?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn write_json(path: PathBuf, v: &impl Serialize) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    write(path, s)
}

/// Plots are a convenience; a failure is reported and skipped.
fn write_plot(path: PathBuf, charts: &[Chart]) {
    match plot::render(charts) {
        Ok(svg) => {
            if let Err(e) = write(path, svg) {
                log::warn!("plot skipped: {e}");
            }
        }
        Err(e) => log::warn!("plot {} skipped: {e}", path.display()),
    }
}

fn deg(x: f64) -> f64 {
    x.to_degrees()
}

#[derive(Serialize)]
struct SingularCheck {
    subsystem: &'static str,
    beta: f64,
    /// Rows of the checked matrix that vanish, 0-based.
    null_rows: Vec<usize>,
    rank: Option<usize>,
    relative_residual: f64,
    verified: bool,
}

#[derive(Serialize)]
struct LevelingReport {
    beta_star: f64,
    beta_star_deg: f64,
    omega_sq_sum: f64,
    zg_residual: f64,
    vertical_motion: ConstraintReport,
}

#[derive(Serialize)]
struct SttaReport {
    beta_phi: f64,
    beta_theta: f64,
    beta_psi: f64,
    beta_heave: f64,
    beta_phi_deg: f64,
    beta_theta_deg: f64,
    beta_psi_deg: f64,
    beta_heave_deg: f64,
    phi_theta_coincident: bool,
    checks: Vec<SingularCheck>,
    leveling: LevelingReport,
}

pub fn stta(c: &Common) -> Result<(), CliError> {
    let s = load(c)?;
    let (p, e) = (&s.sim.vehicle, &s.sim.allocation);
    Vehicle::new(p.clone(), *e)
        .map_err(|err| CliError::Degenerate(format!("invalid parameters: {err}")))?;
    let set = stta_set(p).map_err(|err| {
        log::warn!("{err}");
        CliError::Degenerate(err.to_string())
    })?;
    let lev = leveling_constraints(p).map_err(|err| CliError::Degenerate(err.to_string()))?;

    let scale = cem(p, 0.0, e).norm();
    let cem_check = |subsystem, beta: f64, row: usize| {
        let b = cem(p, beta, e);
        let rep = rank_deficiency(&b, RANK_TOL);
        let rel = b.row(row).norm() / scale;
        SingularCheck {
            subsystem,
            beta,
            verified: rep.null_rows.contains(&row),
            null_rows: rep.null_rows,
            rank: Some(rep.rank),
            relative_residual: rel,
        }
    };
    let lon = longitudinal_allocation(p, 0.0, set.beta_theta, e);
    let lon_rep = rank_deficiency(&lon, RANK_TOL);
    let trans =
        transverse_singularity_residual(p, set.beta_phi).abs() / transverse_residual_scale(p);
    let checks = vec![
        SingularCheck {
            subsystem: "roll",
            beta: set.beta_phi,
            null_rows: vec![],
            rank: None,
            relative_residual: trans,
            verified: trans < RANK_TOL,
        },
        SingularCheck {
            subsystem: "pitch",
            beta: set.beta_theta,
            relative_residual: lon.row(2).norm() / lon.norm(),
            verified: lon_rep.null_rows == [2],
            null_rows: lon_rep.null_rows,
            rank: Some(lon_rep.rank),
        },
        cem_check("heading", set.beta_psi, 5),
        cem_check("heave", set.beta_heave, 2),
    ];
    let report = SttaReport {
        beta_phi: set.beta_phi,
        beta_theta: set.beta_theta,
        beta_psi: set.beta_psi,
        beta_heave: set.beta_heave,
        beta_phi_deg: deg(set.beta_phi),
        beta_theta_deg: deg(set.beta_theta),
        beta_psi_deg: deg(set.beta_psi),
        beta_heave_deg: deg(set.beta_heave),
        phi_theta_coincident: set.phi_theta_coincident(),
        checks,
        leveling: LevelingReport {
            beta_star: lev.beta_star,
            beta_star_deg: deg(lev.beta_star),
            omega_sq_sum: lev.omega_sq_sum,
            zg_residual: lev.zg_residual,
            vertical_motion: vertical_motion_check(p, lev.beta_star, lev.omega_sq_sum / 4.0),
        },
    };

    println!("{:<8} {:>12} {:>6} {:>12}  null rows", "axis", "beta [deg]", "ok", "residual");
    for ch in &report.checks {
        println!(
            "{:<8} {:>12.4} {:>6} {:>12.2e}  {:?}",
            ch.subsystem,
            deg(ch.beta),
            if ch.verified { "yes" } else { "NO" },
            ch.relative_residual,
            ch.null_rows
        );
    }
    println!(
        "leveling: beta* = {:.4} deg, sum of squared speeds = {:.6e}, CoG residual = {:.3e} m",
        report.leveling.beta_star_deg, report.leveling.omega_sq_sum, report.leveling.zg_residual
    );
    if report.phi_theta_coincident {
        println!("warning: roll and pitch singular angles coincide");
    }
    write_json(out_dir(c)?.join("stta.json"), &report)
}

fn attitude_chart(title: &str, out: &SimOutput) -> Chart {
    let rows = &out.log.rows;
    Chart {
        title: title.into(),
        x_label: "time [s]".into(),
        y_label: "angle [deg]".into(),
        series: vec![
            Series::new("roll", rows.iter().map(|r| (r.t, deg(r.eta[3]))).collect()),
            Series::new("pitch", rows.iter().map(|r| (r.t, deg(r.eta[4]))).collect()),
        ],
    }
}

fn nussbaum_chart(out: &SimOutput) -> Chart {
    let rows = &out.log.rows;
    Chart {
        title: "Nussbaum gains".into(),
        x_label: "time [s]".into(),
        y_label: "gain [-]".into(),
        series: vec![
            Series::new("N(zeta_phi)", rows.iter().map(|r| (r.t, r.n_phi)).collect()),
            Series::new("N(zeta_theta)", rows.iter().map(|r| (r.t, r.n_theta)).collect()),
        ],
    }
}

#[derive(Serialize)]
struct MetricsFile<'a> {
    metrics: &'a alioth_core::sim::ScenarioMetrics,
    termination: &'a Termination,
    energy: &'a Option<alioth_core::sim::EnergyCheck>,
}

pub fn simulate(c: &Common, allow_divergence: bool) -> Result<(), CliError> {
    let s = load(c)?;
    let out = run_sim(&s.sim)?;
    let dir = out_dir(c)?;
    write(dir.join("trajectory.csv"), out.log.to_csv_string())?;
    write_json(
        dir.join("metrics.json"),
        &MetricsFile {
            metrics: &out.metrics,
            termination: &out.termination,
            energy: &out.energy,
        },
    )?;
    write_plot(dir.join("attitude.svg"), &[attitude_chart("Roll and pitch", &out)]);
    write_plot(dir.join("nussbaum.svg"), &[nussbaum_chart(&out)]);

    let m = &out.metrics;
    println!(
        "max |roll| {:.3} deg, max |pitch| {:.3} deg, handovers {}, heave drift {:.4} m, {} rows",
        m.max_abs_roll,
        m.max_abs_pitch,
        m.handovers,
        m.heave_drift,
        out.log.len()
    );
    let failed = match &out.termination {
        Termination::Completed => None,
        Termination::Diverged(d) | Termination::StateError(d) | Termination::ControllerError(d) => {
            Some(d.clone())
        }
    };
    match failed {
        Some(d) if !allow_divergence => Err(CliError::Diverged(d)),
        Some(d) => {
            log::warn!("run diverged: {d}");
            Ok(())
        }
        None => Ok(()),
    }
}

pub fn sweep(c: &Common, jobs: Option<usize>) -> Result<(), CliError> {
    let s = load(c)?;
    let spec = s
        .sweep
        .clone()
        .ok_or_else(|| CliError::Usage("config has no `sweep` section".into()))?;
    let cases = sweep_cases(&s, &spec)?;
    if jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let rows = run_parallel(&cases, jobs);
    let dir = out_dir(c)?;
    let path = dir.join("sweep.csv");
    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf).expect("in-memory csv");
    write(path, buf)?;

    let w = spec.parameter.len().max(14);
    println!("{:>w$} {:>12} {:>12} {:>9}", spec.parameter, "roll [deg]", "pitch [deg]", "diverged");
    for r in &rows {
        match (&r.metrics, &r.error) {
            (Some(m), _) => println!(
                "{:>w$} {:>12.4} {:>12.4} {:>9}",
                r.value.to_string(),
                m.max_abs_roll,
                m.max_abs_pitch,
                m.diverged
            ),
            (None, e) => {
                let e = e.as_deref().unwrap_or("unknown error");
                log::warn!("sweep value {} failed: {e}", r.value);
                println!("{:>w$} failed: {e}", r.value.to_string());
            }
        }
    }
    if !rows.is_empty() && rows.iter().all(|r| r.failed()) {
        return Err(CliError::Usage("every sweep case failed".into()));
    }
    Ok(())
}

pub fn ablation(c: &Common) -> Result<(), CliError> {
    let s = load(c)?;
    let seeds = match (c.seed, &s.ablation) {
        (Some(n), _) => vec![n],
        (None, Some(a)) if !a.seeds.is_empty() => a.seeds.clone(),
        _ => vec![s.sim.seed],
    };
    let report = run_ablation(&s.sim, &seeds, Some(1))?;
    let dir = out_dir(c)?;
    write_json(dir.join("ablation.json"), &report)?;
    let (on, off) = run_ablation_pair(&s.sim, seeds[0])?;
    write_plot(
        dir.join("ablation.svg"),
        &[
            attitude_chart(&format!("With Nussbaum gain, seed {}", seeds[0]), &on),
            attitude_chart(&format!("Without Nussbaum gain, seed {}", seeds[0]), &off),
        ],
    );

    let verdict = |d: bool| if d { "diverged" } else { "stable" };
    for r in &report.runs {
        println!(
            "seed {:>4}: with Nussbaum {} (max |roll| {:.2} deg, max |pitch| {:.2} deg); without {} (max |roll| {:.2} deg, max |pitch| {:.2} deg)",
            r.seed,
            verdict(r.enabled.diverged),
            r.enabled.max_abs_roll,
            r.enabled.max_abs_pitch,
            verdict(r.disabled.diverged),
            r.disabled.max_abs_roll,
            r.disabled.max_abs_pitch
        );
    }
    if report.enabled_diverged {
        let bad = report
            .runs
            .iter()
            .filter(|r| r.enabled.diverged)
            .map(|r| r.seed)
            .collect();
        return Err(CliError::Regression(bad));
    }
    Ok(())
}

pub fn validate(c: &Common) -> Result<(), CliError> {
    let s = load(c)?;
    let results = run_invariants(&s.sim.vehicle, &s.sim.allocation);
    for r in &results {
        println!(
            "{} {:<24} {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
    }
    write_json(out_dir(c)?.join("validate.json"), &results)?;
    match results.iter().filter(|r| !r.passed).count() {
        0 => Ok(()),
        n => Err(CliError::Invalid(n)),
    }
}
