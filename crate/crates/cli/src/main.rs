//! `hyperemb` command line.
//!
//! Exit codes: 0 success, 2 bad parameters, 3 disconnected input,
//! 4 unreadable or inconsistent data.

mod commands;
mod svg;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperemb::{DegreeKind, EmbedMethod, Error};

#[derive(Parser, Debug)]
#[command(name = "hyperemb", version, about = "Hyperbolic network generation, embedding and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Grow a network and write its edge list and true coordinates.
    Generate(GenerateArgs),
    /// Embed an edge list into the native disk.
    Embed(EmbedArgs),
    /// Score given coordinates of a graph.
    Evaluate(EvaluateArgs),
    /// Embed repeatedly over tie permutations and fit best-of-n curves.
    Repeat(RepeatArgs),
    /// Draw a coordinate file as SVG.
    Render(RenderArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Pso,
    Gpso,
    Epso,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Ncmce,
    #[value(name = "ncmce-opt")]
    NcmceOpt,
    Hypermap,
}

impl From<Method> for EmbedMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Ncmce => EmbedMethod::Ncmce,
            Method::NcmceOpt => EmbedMethod::NcmceOpt,
            Method::Hypermap => EmbedMethod::Hypermap,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Total,
    In,
    Out,
}

impl From<Kind> for DegreeKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Total => DegreeKind::Total,
            Kind::In => DegreeKind::In,
            Kind::Out => DegreeKind::Out,
        }
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct ParamArgs {
    /// External links per new node.
    #[arg(short = 'm', long = "m", allow_negative_numbers = true)]
    pub m: Option<f64>,
    /// Net internal links per step.
    #[arg(long = "L", allow_negative_numbers = true)]
    pub ell: Option<f64>,
    /// Popularity fading.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Temperature.
    #[arg(short = 'T', long = "temperature", allow_negative_numbers = true)]
    pub temperature: Option<f64>,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub zeta: f64,
}

#[derive(Args, Debug, Clone)]
pub struct ScheduleArgs {
    #[arg(long, default_value_t = 5)]
    pub swap_rounds: usize,
    #[arg(long, default_value_t = 3)]
    pub noswap_rounds: usize,
    /// Candidate angles per node and round.
    #[arg(short = 'q', default_value_t = 6)]
    pub q: usize,
    /// Stop once a round changes the loss by less than this fraction.
    #[arg(long)]
    pub stop_tol: Option<f64>,
    /// Trial angles per inserted node (hypermap).
    #[arg(long, default_value_t = hyperemb::hypermap::DEFAULT_ANGLE_GRID)]
    pub angle_grid: usize,
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Edge list, one `u v` pair per line.
    pub graph: PathBuf,
    /// Read edges as arcs `u -> v`.
    #[arg(long)]
    pub directed: bool,
    /// Embed the largest connected component instead of failing.
    #[arg(long)]
    pub largest_component: bool,
    #[arg(long, value_enum, default_value_t = Kind::Total)]
    pub degree_kind: Kind,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub model: Model,
    #[arg(short = 'N', long = "nodes")]
    pub nodes: usize,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Edge list destination; stdout when absent.
    #[arg(short = 'o', long)]
    pub out: Option<PathBuf>,
    /// True coordinate file destination.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Let nodes with a negative expected link count (E-PSO) go unlinked.
    #[arg(long)]
    pub clamp_deficit: bool,
    /// gPSO internal links deleted per step; `L + l-minus` are inserted.
    #[arg(long, default_value_t = 0)]
    pub l_minus: usize,
}

#[derive(Args, Debug)]
pub struct EmbedArgs {
    #[arg(value_enum)]
    pub method: Method,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Fit m, beta and T on an ncMCE embedding first, starting from any
    /// given values. Implied when one of them is missing.
    #[arg(long)]
    pub estimate_params: bool,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    /// Tie seed of the radial order.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Coordinate file destination.
    #[arg(short = 'o', long)]
    pub out: PathBuf,
    /// Report destination; stdout when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Where to write the parameters used, as JSON.
    #[arg(long)]
    pub params_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    pub coords: PathBuf,
    /// Parameter JSON as written by `embed --params-out`.
    #[arg(long = "params")]
    pub params_file: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Metadata copied into the report.
    #[arg(long, default_value = "external")]
    pub method: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub rounds: usize,
    /// Report destination; stdout when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RepeatArgs {
    #[arg(value_enum)]
    pub method: Method,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub estimate_params: bool,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[arg(long)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV destination; stdout when absent.
    #[arg(short = 'o', long)]
    pub out: Option<PathBuf>,
    /// Per-trial reports and fits as JSON.
    #[arg(long)]
    pub reports: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    pub coords: PathBuf,
    #[arg(short = 'o', long)]
    pub out: PathBuf,
    /// Edge list whose edges are drawn.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub directed: bool,
    /// Disk radius in pixels; the outermost node lands on the rim.
    #[arg(long, default_value_t = 400.0)]
    pub radius: f64,
}

/// Error with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn parameter(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            code: 4,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parameter(_) | Error::Domain(_) | Error::UnsupportedDegreeKind(_) => 2,
            Error::Disconnected { .. } => 3,
            Error::Parse { .. }
            | Error::SelfLoop { .. }
            | Error::NodeRange { .. }
            | Error::Data(_)
            | Error::Size(_) => 4,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => commands::generate(&a),
        Command::Embed(a) => commands::embed(&a),
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::Repeat(a) => commands::repeat(&a),
        Command::Render(a) => commands::render(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
