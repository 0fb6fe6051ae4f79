//! Trajectory runs, convergence and defect sweeps, and side-by-side comparisons.

use std::time::Instant;

use liepoisson::models::reference_flow;
use liepoisson::poisson::poisson_defect;
use liepoisson::{Error, Trajectory};
use serde::Serialize;
use serde_json::Value;

use crate::config::StudyConfig;
use crate::error::{HarnessError, Result};
use crate::registry::{build_step_map, Model};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Terminal errors below this are roundoff and excluded from order fits.
pub const ERROR_FLOOR: f64 = 1e-13;

/// Defects below this are at the resolution of the finite-difference Jacobian.
pub const DEFECT_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub step: usize,
    pub t: f64,
    pub state: Vec<f64>,
    #[serde(rename = "H")]
    pub energy: f64,
    #[serde(rename = "C", skip_serializing_if = "Option::is_none")]
    pub casimir: Option<f64>,
    /// `|‖z_k‖ − ‖z_0‖|`.
    pub orbit_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderRow {
    pub h: f64,
    pub steps: usize,
    pub error: f64,
    pub used: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefectRow {
    pub h: f64,
    pub defect: f64,
    pub used: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub integrator: String,
    pub terminal_error: f64,
    pub h_drift: f64,
    pub casimir_drift: f64,
    pub orbit_err: f64,
    /// Seconds spent stepping, excluding setup and I/O.
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Rows {
    Trajectory(Vec<TrajectoryRow>),
    Order(Vec<OrderRow>),
    Defect(Vec<DefectRow>),
    Compare(Vec<CompareRow>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Summary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_drift_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub casimir_drift_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit_err_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyReport {
    /// Config echo with the tool version.
    pub config: Value,
    pub rows: Rows,
    pub summary: Summary,
}

/// Least-squares fit of `log y = slope · log h + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    /// Root-mean-square residual of the fit in natural-log units.
    pub residual: f64,
    /// Number of points above the floor that entered the fit.
    pub points: usize,
}

/// Fits the points with `y ≥ floor`; fewer than three usable points is a degenerate study.
pub fn fit_loglog(hs: &[f64], ys: &[f64], floor: f64) -> liepoisson::Result<Fit> {
    let pts: Vec<(f64, f64)> = hs
        .iter()
        .zip(ys)
        .filter(|(_, y)| y.is_finite() && **y >= floor)
        .map(|(h, y)| (h.ln(), y.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::DegenerateStudy(format!(
            "{} of {} points above the floor {floor:e}; need 3",
            pts.len(),
            hs.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Ok(Fit {
        slope,
        residual: (ss / n).sqrt(),
        points: pts.len(),
    })
}

fn echo(cfg: &StudyConfig, study: &str) -> Value {
    let mut v = serde_json::to_value(cfg).expect("config serializes");
    if let Value::Object(map) = &mut v {
        map.insert("study".into(), Value::from(study));
        map.insert("tool_version".into(), Value::from(TOOL_VERSION));
    }
    v
}

fn trajectory_rows(traj: &Trajectory) -> Vec<TrajectoryRow> {
    let d = traj.diagnostics();
    let r0 = d[0].orbit_radius;
    traj.states()
        .iter()
        .zip(traj.times())
        .zip(d)
        .enumerate()
        .map(|(k, ((z, t), diag))| TrajectoryRow {
            step: k,
            t: *t,
            state: z.iter().copied().collect(),
            energy: diag.energy,
            casimir: diag.casimirs.first().copied(),
            orbit_err: (diag.orbit_radius - r0).abs(),
        })
        .collect()
}

/// Summary maxima recomputed from trajectory rows.
pub fn summarize(rows: &[TrajectoryRow]) -> Summary {
    let Some(first) = rows.first() else {
        return Summary::default();
    };
    let h_drift = rows
        .iter()
        .map(|r| (r.energy - first.energy).abs())
        .fold(0.0, f64::max);
    let c_drift = first.casimir.map(|c0| {
        rows.iter()
            .filter_map(|r| r.casimir)
            .map(|c| (c - c0).abs())
            .fold(0.0, f64::max)
    });
    let orbit = rows.iter().map(|r| r.orbit_err).fold(0.0, f64::max);
    Summary {
        h_drift_max: Some(h_drift),
        casimir_drift_max: c_drift,
        orbit_err_max: Some(orbit),
        slope: None,
        slope_residual: None,
    }
}

/// Integrates `cfg.steps` steps of size `cfg.h` from `cfg.mu0`.
pub fn run_trajectory(cfg: &StudyConfig) -> Result<(Trajectory, StudyReport)> {
    cfg.validate()?;
    let map = build_step_map(cfg)?;
    let z0 = Model::from_config(cfg)?.initial_state(&cfg.mu0)?;
    let traj = map.integrate(&z0, cfg.h, cfg.steps)?;
    let rows = trajectory_rows(&traj);
    let summary = summarize(&rows);
    let report = StudyReport {
        config: echo(cfg, "run"),
        rows: Rows::Trajectory(rows),
        summary,
    };
    Ok((traj, report))
}

/// Report of a sweep together with the outcome of its fit.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub report: StudyReport,
    pub fit: liepoisson::Result<Fit>,
}

fn steps_to(t_final: f64, h: f64) -> Result<usize> {
    let steps = (t_final / h).round();
    if steps < 1.0 || (steps * h - t_final).abs() > 1e-9 * t_final {
        return Err(HarnessError::config(format!(
            "h = {h} does not divide t_final = {t_final}"
        )));
    }
    Ok(steps as usize)
}

/// Terminal error against `reference_flow` at `cfg.t_final` for each `h` in `cfg.h_list`.
pub fn order_sweep(cfg: &StudyConfig) -> Result<SweepOutcome> {
    cfg.validate_sweep()?;
    let map = build_step_map(cfg)?;
    let z0 = Model::from_config(cfg)?.initial_state(&cfg.mu0)?;
    let exact = reference_flow(map.system(), &z0, cfg.t_final, cfg.reference_tol)?;
    let mut rows = Vec::with_capacity(cfg.h_list.len());
    for &h in &cfg.h_list {
        let steps = steps_to(cfg.t_final, h)?;
        let traj = map.integrate(&z0, h, steps)?;
        let error = (traj.last() - &exact).norm();
        rows.push(OrderRow {
            h,
            steps,
            error,
            used: error.is_finite() && error >= ERROR_FLOOR,
        });
    }
    let errors: Vec<f64> = rows.iter().map(|r| r.error).collect();
    let fit = fit_loglog(&cfg.h_list, &errors, ERROR_FLOOR);
    Ok(SweepOutcome {
        report: StudyReport {
            config: echo(cfg, "order"),
            rows: Rows::Order(rows),
            summary: fit_summary(&fit),
        },
        fit,
    })
}

/// Observed convergence order over `h_list`.
pub fn convergence_order(cfg: &StudyConfig, h_list: &[f64]) -> Result<Fit> {
    let cfg = StudyConfig {
        h_list: h_list.to_vec(),
        ..cfg.clone()
    };
    Ok(order_sweep(&cfg)?.fit?)
}

/// Poisson defect at `cfg.mu0` for each `h` in `cfg.h_list`.
pub fn defect_sweep(cfg: &StudyConfig) -> Result<SweepOutcome> {
    cfg.validate_sweep()?;
    let map = build_step_map(cfg)?;
    let z0 = Model::from_config(cfg)?.initial_state(&cfg.mu0)?;
    let mut rows = Vec::with_capacity(cfg.h_list.len());
    for &h in &cfg.h_list {
        let defect = poisson_defect(&map, &z0, h, cfg.fd_step)?;
        rows.push(DefectRow {
            h,
            defect,
            used: defect.is_finite() && defect >= DEFECT_FLOOR,
        });
    }
    let defects: Vec<f64> = rows.iter().map(|r| r.defect).collect();
    let fit = fit_loglog(&cfg.h_list, &defects, DEFECT_FLOOR);
    Ok(SweepOutcome {
        report: StudyReport {
            config: echo(cfg, "defect"),
            rows: Rows::Defect(rows),
            summary: fit_summary(&fit),
        },
        fit,
    })
}

/// Per-h defects; the fitted slope is absent when the defects sit at the floor.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectStudy {
    pub defects: Vec<(f64, f64)>,
    pub fit: Option<Fit>,
}

pub fn defect_study(cfg: &StudyConfig, h_list: &[f64]) -> Result<DefectStudy> {
    let cfg = StudyConfig {
        h_list: h_list.to_vec(),
        ..cfg.clone()
    };
    let outcome = defect_sweep(&cfg)?;
    let Rows::Defect(rows) = outcome.report.rows else {
        unreachable!("defect sweep produces defect rows");
    };
    let fit = match outcome.fit {
        Ok(fit) => Some(fit),
        Err(Error::DegenerateStudy(_)) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(DefectStudy {
        defects: rows.iter().map(|r| (r.h, r.defect)).collect(),
        fit,
    })
}

fn fit_summary(fit: &liepoisson::Result<Fit>) -> Summary {
    match fit {
        Ok(f) => Summary {
            slope: Some(f.slope),
            slope_residual: Some(f.residual),
            ..Summary::default()
        },
        Err(_) => Summary::default(),
    }
}

fn compare_one(cfg: &StudyConfig) -> Result<CompareRow> {
    let map = build_step_map(cfg)?;
    let z0 = Model::from_config(cfg)?.initial_state(&cfg.mu0)?;
    let started = Instant::now();
    let traj = map.integrate(&z0, cfg.h, cfg.steps)?;
    let wall_time = started.elapsed().as_secs_f64();
    let t = traj.times().last().copied().unwrap_or(0.0);
    let exact = reference_flow(map.system(), &z0, t, cfg.reference_tol)?;
    Ok(CompareRow {
        integrator: cfg.integrator.clone(),
        terminal_error: (traj.last() - &exact).norm(),
        h_drift: traj.energy_drift(),
        casimir_drift: traj.casimir_drift(),
        orbit_err: traj.orbit_error(),
        wall_time,
    })
}

/// Runs each config on its own thread and tabulates the results in input order.
pub fn compare(cfgs: &[StudyConfig]) -> Result<StudyReport> {
    let Some(first) = cfgs.first() else {
        return Err(HarnessError::config("compare needs at least one config"));
    };
    for cfg in cfgs {
        cfg.validate()?;
        if cfg.model != first.model || cfg.inertia != first.inertia || cfg.mu0 != first.mu0 {
            return Err(HarnessError::config(format!(
                "compare needs a shared model and initial state; {:?} differs from {:?}",
                cfg.integrator, first.integrator
            )));
        }
    }
    let results: Vec<Result<CompareRow>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cfgs
            .iter()
            .map(|cfg| scope.spawn(move || compare_one(cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("compare worker panicked"))
            .collect()
    });
    let rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    let config = Value::Array(cfgs.iter().map(|c| echo(c, "compare")).collect());
    Ok(StudyReport {
        config,
        rows: Rows::Compare(rows),
        summary: Summary::default(),
    })
}
