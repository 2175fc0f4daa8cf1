//! Library side of the `asymkit` command: argument types, problem files, report
//! encoding and the four command families.

pub mod commands;
pub mod error;
pub mod problem;
pub mod report;

use std::path::PathBuf;

use asymkit::numkit::{tensor_cap_from_env, ToleranceConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

pub use error::{Error, Result};
use problem::{load_problem, ProblemFile, Tolerances};
use report::Report;

#[derive(Debug, Clone, Parser)]
#[command(name = "asymkit", version, about = "Asymmetry measures, conversion rates and covariant channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Asymmetry tensors and entropic measures of the problem's states.
    Measure {
        #[arg(value_enum)]
        sub: MeasureSub,
        #[command(flatten)]
        opts: Opts,
    },
    /// Asymptotic conversion rates and the bounds derived from them.
    Rate {
        #[arg(value_enum, default_value = "rate")]
        sub: RateSub,
        #[command(flatten)]
        opts: Opts,
    },
    /// Covariant conversion channels.
    Channel {
        #[arg(value_enum, default_value = "build")]
        sub: ChannelSub,
        #[command(flatten)]
        opts: Opts,
    },
    /// Finite-copy scans, the estimate-then-convert pipeline and property suites.
    Simulate {
        #[arg(value_enum, default_value = "scan")]
        sub: SimulateSub,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureSub {
    Qgt,
    Smatrix,
    Sq,
    Ag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateSub {
    Rate,
    Reversible,
    DistillBound,
    CostBound,
    ThermoBound,
    Refrate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelSub {
    Build,
    Twirl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimulateSub {
    Scan,
    Estimate,
    Check,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    Monotonicity,
    Sq,
    LargestEv,
    PureLimit,
    Counterexample,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Opts {
    /// Problem file (JSON).
    #[arg(long)]
    pub problem: Option<PathBuf>,
    /// Petz metric parameter in (0, 1).
    #[arg(long)]
    pub q: Option<f64>,
    /// Component index for tensors evaluated at a group component.
    #[arg(long)]
    pub component: Option<usize>,
    /// Sublinear-catalyst mode for rates.
    #[arg(long)]
    pub catalyst: bool,
    /// Copy range A:B (inclusive).
    #[arg(long)]
    pub copies: Option<String>,
    /// JSON list of shift vectors u.
    #[arg(long)]
    pub shift_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Draws for suites and Monte Carlo twirls.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Estimation share exponent ε: N^{1−ε} copies are measured.
    #[arg(long, default_value_t = 0.5)]
    pub split: f64,
    /// Output copies per input copy in scans, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub rate_r: f64,
    /// Distillation rate for thermo bounds.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub tol_herm: Option<f64>,
    #[arg(long)]
    pub tol_norm: Option<f64>,
    #[arg(long)]
    pub tol_psd: Option<f64>,
    #[arg(long)]
    pub tol_kernel: Option<f64>,
    #[arg(long)]
    pub tol_residual: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl Opts {
    fn tolerance_overrides(&self) -> Tolerances {
        Tolerances {
            tol_herm: self.tol_herm,
            tol_norm: self.tol_norm,
            tol_psd: self.tol_psd,
            tol_kernel: self.tol_kernel,
            tol_residual: self.tol_residual,
        }
    }
}

/// Everything a command needs: the parsed problem, effective tolerances and the cap.
pub struct Context<'a> {
    pub opts: &'a Opts,
    pub problem: Option<ProblemFile>,
    pub tol: ToleranceConfig,
    pub cap: usize,
}

impl Context<'_> {
    pub fn problem(&self) -> Result<&ProblemFile> {
        self.problem.as_ref().ok_or_else(|| Error::Validation("--problem is required".into()))
    }
}

/// What a command produced: a JSON report or, for scans, a CSV table.
pub enum Output {
    Json(Report),
    Csv(String),
}

impl Output {
    pub fn text(&self) -> String {
        match self {
            Output::Json(r) => r.to_json(),
            Output::Csv(s) => s.clone(),
        }
    }
}

pub fn run(cli: &Cli) -> Result<Output> {
    let (name, sub, opts) = match &cli.command {
        Command::Measure { sub, opts } => ("measure", json!(sub), opts),
        Command::Rate { sub, opts } => ("rate", json!(sub), opts),
        Command::Channel { sub, opts } => ("channel", json!(sub), opts),
        Command::Simulate { sub, opts } => ("simulate", json!(sub), opts),
    };
    let problem = opts.problem.as_deref().map(load_problem).transpose()?;
    let base = problem.as_ref().map(ProblemFile::tolerance).unwrap_or_default();
    let tol = opts.tolerance_overrides().apply(base);
    tol.validate().map_err(|e| Error::core("tolerances", e))?;
    let cx = Context { opts, problem, tol, cap: tensor_cap_from_env() };
    let is_scan = matches!(cli.command, Command::Simulate { sub: SimulateSub::Scan, .. });
    if opts.format == Format::Csv && !is_scan {
        return Err(Error::Validation("--format csv is only available for `simulate scan`".into()));
    }
    let (results, caveats) = match &cli.command {
        Command::Measure { sub, .. } => commands::measure(&cx, *sub)?,
        Command::Rate { sub, .. } => commands::rate(&cx, *sub)?,
        Command::Channel { sub, .. } => commands::channel(&cx, *sub)?,
        Command::Simulate { sub: SimulateSub::Scan, .. } if opts.format == Format::Csv => {
            return Ok(Output::Csv(commands::scan_csv(&cx)?));
        }
        Command::Simulate { sub, .. } => commands::simulate(&cx, *sub)?,
    };
    let config = json!({
        "options": opts,
        "tolerances": {
            "tol_herm": tol.tol_herm,
            "tol_norm": tol.tol_norm,
            "tol_psd": tol.tol_psd,
            "tol_kernel": tol.tol_kernel,
            "tol_residual": tol.tol_residual,
        },
        "tensor_cap": cx.cap,
        "problem": cx.problem,
    });
    Ok(Output::Json(Report {
        tool: report::TOOL,
        version: report::VERSION,
        command: name.into(),
        subcommand: sub.as_str().unwrap_or_default().into(),
        seed: opts.seed,
        config,
        results,
        caveats,
    }))
}
