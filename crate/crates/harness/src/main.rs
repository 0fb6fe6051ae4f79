use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use liepoisson_harness::config::{OutputFormat, Scaling, StudyConfig};
use liepoisson_harness::error::{HarnessError, Result};
use liepoisson_harness::output::write_report;
use liepoisson_harness::study::{compare, defect_sweep, order_sweep, run_trajectory, StudyReport};

#[derive(Parser)]
#[command(
    name = "liepoisson",
    version,
    about = "Lie-Poisson integrator studies on so(3)*"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one trajectory and report per-step diagnostics.
    Run(StudyArgs),
    /// Estimate the convergence order against a reference flow.
    Order(StudyArgs),
    /// Measure the Poisson-map defect over a sweep of step sizes.
    Defect(StudyArgs),
    /// Run several integrators side by side (comma-separated --integrator).
    Compare(StudyArgs),
}

#[derive(Args, Debug, Default)]
struct StudyArgs {
    /// TOML config file with flat keys; flags override its values. Repeatable for compare.
    #[arg(long)]
    config: Vec<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    inertia: Option<Vec<f64>>,
    #[arg(long)]
    integrator: Option<String>,
    #[arg(long, value_enum)]
    scaling: Option<ScalingArg>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mu0: Option<Vec<f64>>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long = "h-list", value_delimiter = ',')]
    h_list: Option<Vec<f64>>,
    #[arg(long = "t-final")]
    t_final: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iterations")]
    max_iterations: Option<usize>,
    #[arg(long = "reference-tol")]
    reference_tol: Option<f64>,
    #[arg(long = "fd-step")]
    fd_step: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum ScalingArg {
    Half,
    Full,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Csv,
    Json,
}

impl StudyArgs {
    fn apply(&self, mut cfg: StudyConfig) -> StudyConfig {
        if let Some(v) = &self.model {
            cfg.model = v.clone();
        }
        if let Some(v) = &self.inertia {
            cfg.inertia = v.clone();
        }
        if let Some(v) = &self.integrator {
            cfg.integrator = v.clone();
        }
        if let Some(v) = self.scaling {
            cfg.scaling = match v {
                ScalingArg::Half => Scaling::Half,
                ScalingArg::Full => Scaling::Full,
            };
        }
        if let Some(v) = &self.mu0 {
            cfg.mu0 = v.clone();
        }
        if let Some(v) = self.h {
            cfg.h = v;
        }
        if let Some(v) = self.steps {
            cfg.steps = v;
        }
        if let Some(v) = &self.h_list {
            cfg.h_list = v.clone();
        }
        if let Some(v) = self.t_final {
            cfg.t_final = v;
        }
        if let Some(v) = self.tol {
            cfg.tol = Some(v);
        }
        if let Some(v) = self.max_iterations {
            cfg.max_iterations = Some(v);
        }
        if let Some(v) = self.reference_tol {
            cfg.reference_tol = v;
        }
        if let Some(v) = self.fd_step {
            cfg.fd_step = v;
        }
        if let Some(v) = &self.out {
            cfg.out = Some(v.clone());
        }
        if let Some(v) = self.format {
            cfg.format = match v {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
            };
        }
        cfg
    }

    fn base_configs(&self) -> Result<Vec<StudyConfig>> {
        if self.config.is_empty() {
            return Ok(vec![StudyConfig::default()]);
        }
        self.config
            .iter()
            .map(|p| StudyConfig::from_file(p))
            .collect()
    }

    fn single(&self) -> Result<StudyConfig> {
        let bases = self.base_configs()?;
        if bases.len() > 1 {
            return Err(HarnessError::config(
                "only compare accepts several --config files",
            ));
        }
        Ok(self.apply(bases.into_iter().next().expect("one base config")))
    }

    /// One config per file, or one per comma-separated integrator name.
    fn many(&self) -> Result<Vec<StudyConfig>> {
        let bases = self.base_configs()?;
        let names: Option<Vec<String>> = self
            .integrator
            .as_ref()
            .map(|s| s.split(',').map(|n| n.trim().to_string()).collect());
        let mut out = Vec::new();
        for base in bases {
            let cfg = self.apply(base);
            match &names {
                Some(list) => out.extend(list.iter().map(|n| StudyConfig {
                    integrator: n.clone(),
                    ..cfg.clone()
                })),
                None => out.push(cfg),
            }
        }
        Ok(out)
    }
}

fn emit(report: &StudyReport, cfg: &StudyConfig) -> Result<()> {
    match &cfg.out {
        Some(path) => {
            let file = File::create(path).map_err(|source| HarnessError::Io {
                path: path.display().to_string(),
                source,
            })?;
            let mut w = BufWriter::new(file);
            write_report(report, cfg.format, &mut w)?;
            w.flush().map_err(|source| HarnessError::Io {
                path: path.display().to_string(),
                source,
            })
        }
        None => write_report(report, cfg.format, io::stdout().lock()),
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.single()?;
            let (_, report) = run_trajectory(&cfg)?;
            emit(&report, &cfg)
        }
        Command::Order(args) => {
            let cfg = args.single()?;
            let outcome = order_sweep(&cfg)?;
            emit(&outcome.report, &cfg)?;
            outcome.fit.map(|_| ()).map_err(Into::into)
        }
        Command::Defect(args) => {
            let cfg = args.single()?;
            let outcome = defect_sweep(&cfg)?;
            emit(&outcome.report, &cfg)?;
            outcome.fit.map(|_| ()).map_err(Into::into)
        }
        Command::Compare(args) => {
            let cfgs = args.many()?;
            let report = compare(&cfgs)?;
            emit(&report, &cfgs[0])
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
