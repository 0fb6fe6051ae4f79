use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::registry::{INTEGRATORS, MODELS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Scaling {
    Half,
    #[default]
    Full,
}

/// One study, as read from a flat TOML document and/or command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub model: String,
    /// Principal moments of inertia (rigid body only).
    pub inertia: Vec<f64>,
    pub integrator: String,
    /// Factor placement of the retraction schemes.
    pub scaling: Scaling,
    pub mu0: Vec<f64>,
    pub h: f64,
    pub steps: usize,
    /// Step sizes for `order` and `defect` studies, decreasing.
    pub h_list: Vec<f64>,
    /// Final time of the `order` study.
    pub t_final: f64,
    /// Solver tolerance; `None` keeps the integrator's default.
    pub tol: Option<f64>,
    pub max_iterations: Option<usize>,
    /// Refinement tolerance of the reference flow.
    pub reference_tol: f64,
    /// Finite-difference width of the Poisson-defect Jacobian.
    pub fd_step: f64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            model: "rigidbody".into(),
            inertia: vec![1.0, 2.0, 3.0],
            integrator: "midpoint".into(),
            scaling: Scaling::Full,
            mu0: vec![1.0, 0.5, -0.3],
            h: 0.01,
            steps: 100,
            h_list: vec![0.1, 0.05, 0.025, 0.0125],
            t_final: 1.0,
            tol: None,
            max_iterations: None,
            reference_tol: 1e-12,
            fd_step: liepoisson::poisson::DEFAULT_FD_STEP,
            out: None,
            format: OutputFormat::Csv,
        }
    }
}

impl StudyConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| HarnessError::config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| HarnessError::Output(e.to_string()))
    }

    /// Checks everything a `run` needs.
    pub fn validate(&self) -> Result<()> {
        if !MODELS.contains(&self.model.as_str()) {
            return Err(HarnessError::config(format!(
                "unknown model {:?}; expected one of {}",
                self.model,
                MODELS.join(", ")
            )));
        }
        if !INTEGRATORS.contains(&self.integrator.as_str()) {
            return Err(HarnessError::config(format!(
                "unknown integrator {:?}; expected one of {}",
                self.integrator,
                INTEGRATORS.join(", ")
            )));
        }
        if self.model == "rigidbody" && self.inertia.len() != 3 {
            return Err(HarnessError::config("inertia needs three components"));
        }
        if self.mu0.iter().any(|x| !x.is_finite()) {
            return Err(HarnessError::config("mu0 must be finite"));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(HarnessError::config("h must be positive and finite"));
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0) {
                return Err(HarnessError::config("tol must be positive"));
            }
        }
        if self.max_iterations == Some(0) {
            return Err(HarnessError::config("max_iterations must be at least 1"));
        }
        if !(self.reference_tol > 0.0) {
            return Err(HarnessError::config("reference_tol must be positive"));
        }
        if !(self.fd_step > 0.0) {
            return Err(HarnessError::config("fd_step must be positive"));
        }
        Ok(())
    }

    /// Checks the step-size list of `order` and `defect` studies.
    pub fn validate_sweep(&self) -> Result<()> {
        self.validate()?;
        if self.h_list.len() < 3 {
            return Err(HarnessError::config(
                "h_list needs at least three step sizes",
            ));
        }
        if self.h_list.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(HarnessError::config(
                "h_list entries must be positive and finite",
            ));
        }
        if self.h_list.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(HarnessError::config("h_list must be strictly decreasing"));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(HarnessError::config("t_final must be positive and finite"));
        }
        Ok(())
    }
}
