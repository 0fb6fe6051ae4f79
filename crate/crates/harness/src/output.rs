use std::io::Write;

use crate::config::OutputFormat;
use crate::error::Result;
use crate::study::{Rows, StudyReport};

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn state_header(dim: usize) -> Vec<String> {
    let prefix = if dim == 3 { "mu" } else { "z" };
    (1..=dim).map(|i| format!("{prefix}{i}")).collect()
}

pub fn write_csv<W: Write>(report: &StudyReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    match &report.rows {
        Rows::Trajectory(rows) => {
            let dim = rows.first().map_or(0, |r| r.state.len());
            let has_c = rows.first().is_some_and(|r| r.casimir.is_some());
            let mut header = vec!["step".to_string(), "t".to_string()];
            header.extend(state_header(dim));
            header.push("H".into());
            if has_c {
                header.push("C".into());
            }
            header.push("orbit_err".into());
            out.write_record(&header)?;
            for r in rows {
                let mut rec = vec![r.step.to_string(), fmt_f64(r.t)];
                rec.extend(r.state.iter().map(|x| fmt_f64(*x)));
                rec.push(fmt_f64(r.energy));
                if let Some(c) = r.casimir {
                    rec.push(fmt_f64(c));
                }
                rec.push(fmt_f64(r.orbit_err));
                out.write_record(&rec)?;
            }
        }
        Rows::Order(rows) => {
            out.write_record(["h", "steps", "error", "used"])?;
            for r in rows {
                out.write_record([
                    fmt_f64(r.h),
                    r.steps.to_string(),
                    fmt_f64(r.error),
                    r.used.to_string(),
                ])?;
            }
        }
        Rows::Defect(rows) => {
            out.write_record(["h", "defect", "used"])?;
            for r in rows {
                out.write_record([fmt_f64(r.h), fmt_f64(r.defect), r.used.to_string()])?;
            }
        }
        Rows::Compare(rows) => {
            out.write_record([
                "integrator",
                "terminal_error",
                "h_drift",
                "casimir_drift",
                "orbit_err",
                "wall_time",
            ])?;
            for r in rows {
                out.write_record([
                    r.integrator.clone(),
                    fmt_f64(r.terminal_error),
                    fmt_f64(r.h_drift),
                    fmt_f64(r.casimir_drift),
                    fmt_f64(r.orbit_err),
                    fmt_f64(r.wall_time),
                ])?;
            }
        }
    }
    out.flush()
        .map_err(|e| crate::error::HarnessError::Output(e.to_string()))?;
    Ok(())
}

pub fn write_json<W: Write>(report: &StudyReport, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, report)?;
    writeln!(w).map_err(|e| crate::error::HarnessError::Output(e.to_string()))?;
    Ok(())
}

pub fn write_report<W: Write>(report: &StudyReport, format: OutputFormat, w: W) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(report, w),
        OutputFormat::Json => write_json(report, w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::StudyConfig;
    use crate::study::run_trajectory;

    #[test]
    fn formatting_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn csv_header_for_rigid_body() {
        let (_, report) = run_trajectory(&StudyConfig {
            steps: 3,
            ..Default::default()
        })
        .unwrap();
        let mut buf = Vec::new();
        write_csv(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "step,t,mu1,mu2,mu3,H,C,orbit_err");
        assert_eq!(lines.count(), 4);
    }

    #[test]
    fn csv_header_for_oscillator() {
        let (_, report) = run_trajectory(&StudyConfig {
            model: "oscillator".into(),
            mu0: vec![1.0, 0.0],
            steps: 2,
            ..Default::default()
        })
        .unwrap();
        let mut buf = Vec::new();
        write_csv(&report, &mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("step,t,z1,z2,H,orbit_err\n"));
    }

    #[test]
    fn json_has_report_sections() {
        let (_, report) = run_trajectory(&StudyConfig {
            steps: 2,
            ..Default::default()
        })
        .unwrap();
        let mut buf = Vec::new();
        write_json(&report, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert!(v["config"].is_object());
        assert_eq!(v["rows"].as_array().unwrap().len(), 3);
        assert!(v["summary"]["h_drift_max"].is_number());
        assert!(v["summary"].get("slope").is_none());
    }
}
