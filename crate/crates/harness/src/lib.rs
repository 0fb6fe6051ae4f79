//! Study harness for the `liepoisson` integrators: configuration, named integrator
//! registry, trajectory/order/defect/compare studies and CSV/JSON reports.

pub mod config;
pub mod error;
pub mod output;
pub mod registry;
pub mod study;

pub use config::{OutputFormat, Scaling, StudyConfig};
pub use error::{HarnessError, Result};
pub use study::{
    compare, convergence_order, defect_study, run_trajectory, DefectStudy, Fit, StudyReport,
};
