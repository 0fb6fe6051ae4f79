use liepoisson::models::reference_flow;
use liepoisson::Error;
use liepoisson_harness::output::write_report;
use liepoisson_harness::study::{compare, convergence_order, defect_study, run_trajectory, Rows};
use liepoisson_harness::{HarnessError, OutputFormat, StudyConfig};
use nalgebra::{DVector, Vector3};

fn cfg(integrator: &str) -> StudyConfig {
    StudyConfig {
        integrator: integrator.into(),
        ..StudyConfig::default()
    }
}

fn compare_row<'a>(rows: &'a Rows, name: &str) -> &'a liepoisson_harness::study::CompareRow {
    let Rows::Compare(rows) = rows else {
        panic!("compare rows expected");
    };
    rows.iter().find(|r| r.integrator == name).unwrap()
}

#[test]
fn zero_steps_returns_initial_state() {
    let (traj, report) = run_trajectory(&StudyConfig {
        steps: 0,
        ..cfg("midpoint")
    })
    .unwrap();
    assert_eq!(traj.len(), 1);
    assert_eq!(traj.last(), &DVector::from_vec(vec![1.0, 0.5, -0.3]));
    assert_eq!(report.summary.h_drift_max, Some(0.0));
}

#[test]
fn lie_euler_keeps_the_orbit() {
    let (traj, report) = run_trajectory(&StudyConfig {
        h: 0.05,
        steps: 1000,
        ..cfg("dlp")
    })
    .unwrap();
    assert_eq!(traj.len(), 1001);
    assert!(report.summary.orbit_err_max.unwrap() <= 1e-12);
}

#[test]
fn midpoint_run_matches_reference() {
    let c = StudyConfig {
        h: 0.01,
        steps: 100,
        ..cfg("midpoint")
    };
    let (traj, _) = run_trajectory(&c).unwrap();
    let body = liepoisson::RigidBody::new(Vector3::new(1.0, 2.0, 3.0)).unwrap();
    let exact = reference_flow(
        &body.system(),
        &DVector::from_vec(c.mu0.clone()),
        1.0,
        1e-12,
    )
    .unwrap();
    assert!((traj.last() - exact).norm() <= 1e-4);
}

#[test]
fn exact_flow_is_a_degenerate_order_study() {
    let err = convergence_order(&cfg("exact"), &[0.1, 0.05, 0.025]).unwrap_err();
    assert!(matches!(err, HarnessError::Core(Error::DegenerateStudy(_))));
    assert_eq!(err.exit_code(), 4);
}

#[test]
fn baseline_orders() {
    let hs = [0.1, 0.05, 0.025, 0.0125];
    let euler = convergence_order(&cfg("euler"), &hs).unwrap();
    assert!((euler.slope - 1.0).abs() <= 0.2, "{euler:?}");
    let mid = convergence_order(&cfg("midpoint"), &hs).unwrap();
    assert!((mid.slope - 2.0).abs() <= 0.2, "{mid:?}");
    assert!(mid.residual < 0.05);
}

#[test]
fn defect_studies() {
    let hs = [0.2, 0.1, 0.05, 0.025];
    let osc = StudyConfig {
        model: "oscillator".into(),
        mu0: vec![0.7, -0.4],
        ..cfg("midpoint")
    };
    let flat = defect_study(&osc, &hs).unwrap();
    assert!(flat.defects.iter().all(|(_, d)| *d <= 1e-8));
    assert!(flat.fit.is_none());

    let rigid = defect_study(&cfg("midpoint"), &hs).unwrap();
    let slope = rigid.fit.unwrap().slope;
    assert!((slope - 3.0).abs() <= 0.3, "{slope}");

    let retraction = defect_study(&cfg("retraction-h"), &hs).unwrap();
    assert!(retraction.defects.iter().all(|(_, d)| *d <= 1e-7));
}

#[test]
fn single_config_compare_matches_run() {
    let c = StudyConfig {
        h: 0.05,
        steps: 40,
        ..cfg("dep-rigid")
    };
    let (traj, report) = run_trajectory(&c).unwrap();
    let table = compare(std::slice::from_ref(&c)).unwrap();
    let row = compare_row(&table.rows, "dep-rigid");
    assert_eq!(Some(row.h_drift), report.summary.h_drift_max);
    assert_eq!(Some(row.casimir_drift), report.summary.casimir_drift_max);
    assert_eq!(Some(row.orbit_err), report.summary.orbit_err_max);
    let sys = liepoisson::RigidBody::new(Vector3::new(1.0, 2.0, 3.0))
        .unwrap()
        .system();
    let t = *traj.times().last().unwrap();
    let exact =
        reference_flow(&sys, &DVector::from_vec(c.mu0.clone()), t, c.reference_tol).unwrap();
    assert_eq!(row.terminal_error, (traj.last() - exact).norm());
}

#[test]
fn discrete_gradient_against_midpoint() {
    let base = StudyConfig {
        h: 0.1,
        steps: 1000,
        ..StudyConfig::default()
    };
    let cfgs = [
        StudyConfig {
            integrator: "midpoint".into(),
            ..base.clone()
        },
        StudyConfig {
            integrator: "dgrad-mid".into(),
            ..base.clone()
        },
    ];
    let table = compare(&cfgs).unwrap();
    let dgrad = compare_row(&table.rows, "dgrad-mid");
    let mid = compare_row(&table.rows, "midpoint");
    assert!(dgrad.h_drift <= 1e-10);
    // For quadratic H both schemes conserve energy up to their solver residuals, and the
    // discrete-gradient map solves to a tighter default tolerance.
    assert!(
        mid.h_drift > dgrad.h_drift,
        "{} vs {}",
        mid.h_drift,
        dgrad.h_drift
    );
}

#[test]
fn lie_euler_against_midpoint_orbit() {
    let base = StudyConfig {
        h: 0.05,
        steps: 200,
        ..StudyConfig::default()
    };
    let cfgs = [
        StudyConfig {
            integrator: "dlp".into(),
            ..base.clone()
        },
        StudyConfig {
            integrator: "midpoint".into(),
            ..base.clone()
        },
    ];
    let table = compare(&cfgs).unwrap();
    assert!(compare_row(&table.rows, "dlp").orbit_err <= 1e-12);
    let mid = compare_row(&table.rows, "midpoint").orbit_err;
    assert!(mid > 0.0 && mid <= base.h * base.h, "{mid:e}");
}

#[test]
fn mismatched_models_are_rejected() {
    let cfgs = [
        cfg("midpoint"),
        StudyConfig {
            inertia: vec![2.0, 2.0, 3.0],
            ..cfg("dlp")
        },
    ];
    assert!(matches!(compare(&cfgs), Err(HarnessError::Config(_))));
    assert!(matches!(compare(&[]), Err(HarnessError::Config(_))));
}

#[test]
fn reports_are_deterministic() {
    for format in [OutputFormat::Csv, OutputFormat::Json] {
        for name in ["midpoint", "collective", "hj2", "dgrad-mean"] {
            let c = StudyConfig {
                steps: 50,
                h: 0.05,
                format,
                ..cfg(name)
            };
            let render = || {
                let (_, report) = run_trajectory(&c).unwrap();
                let mut buf = Vec::new();
                write_report(&report, format, &mut buf).unwrap();
                buf
            };
            assert_eq!(render(), render(), "{name}");
        }
    }
}

#[test]
fn csv_drift_columns_agree_with_summary() {
    let c = StudyConfig {
        steps: 200,
        h: 0.05,
        ..cfg("dep-rigid")
    };
    let (_, report) = run_trajectory(&c).unwrap();
    let mut buf = Vec::new();
    write_report(&report, OutputFormat::Csv, &mut buf).unwrap();
    let mut reader = csv::Reader::from_reader(buf.as_slice());
    let header = reader.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (hi, ci, oi) = (col("H"), col("C"), col("orbit_err"));
    let rows: Vec<Vec<f64>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    let drift = |i: usize| {
        rows.iter()
            .map(|r| (r[i] - rows[0][i]).abs())
            .fold(0.0, f64::max)
    };
    assert_eq!(Some(drift(hi)), report.summary.h_drift_max);
    assert_eq!(Some(drift(ci)), report.summary.casimir_drift_max);
    let orbit = rows.iter().map(|r| r[oi]).fold(0.0, f64::max);
    assert_eq!(Some(orbit), report.summary.orbit_err_max);
}

#[test]
fn solver_failure_carries_step_index() {
    let c = StudyConfig {
        h: 0.5,
        steps: 10,
        max_iterations: Some(1),
        ..cfg("midpoint")
    };
    let err = run_trajectory(&c).unwrap_err();
    assert!(
        matches!(err, HarnessError::Core(Error::StepFailed { step: 0, .. })),
        "{err:?}"
    );
    assert_eq!(err.exit_code(), 3);
}
