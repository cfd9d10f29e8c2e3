//! `nonrad`: batch front end for constructing and checking non-radiative
//! solutions of the 5D energy-critical radial wave equation.
//!
//! Exit codes: 0 success, 1 failed verification, 2 usage or input error,
//! 3 numerical non-convergence.

mod commands;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nonrad_core::extsolve::{Mask, Nonlinearity};
use nonrad_core::fixpoint::Order;
use nonrad_core::Error;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "nonrad", version, about = "Non-radiative solutions of the 5D radial critical wave equation")]
struct Cli {
    /// Base directory for run artifacts.
    #[arg(long, global = true, env = "NONRAD_OUT_DIR", default_value = "nonrad-out")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a weakly non-radiative solution by fixed-point iteration.
    Construct(ConstructArgs),
    /// Solve the exterior problem from a profile or radial data.
    Evolve(EvolveArgs),
    /// Characteristic numbers of a profile or of radial data.
    Charnums(CharnumsArgs),
    /// Time-translate a profile.
    Translate(TranslateArgs),
    /// Run the numbered acceptance checks.
    Verify(VerifyArgs),
    /// Power-law decay rate of a profile's L² tail.
    Decayfit(DecayfitArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Focusing,
    Defocusing,
    Zero,
}

impl Kind {
    pub fn nonlinearity(self) -> Nonlinearity {
        match self {
            Kind::Focusing => Nonlinearity::focusing(),
            Kind::Defocusing => Nonlinearity::defocusing(),
            Kind::Zero => Nonlinearity::zero(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderArg {
    First,
    Second,
}

impl From<OrderArg> for Order {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::First => Order::First,
            OrderArg::Second => Order::Second,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaskArg {
    Sharp,
    Smooth,
}

pub fn mask(kind: Option<MaskArg>, width: Option<f64>) -> Result<Mask, Error> {
    match (kind.unwrap_or(MaskArg::Sharp), width) {
        (MaskArg::Sharp, _) => Ok(Mask::Sharp),
        (MaskArg::Smooth, Some(w)) if w > 0.0 => Ok(Mask::Smooth { width: w }),
        (MaskArg::Smooth, _) => Err(Error::Input("a smooth mask needs a positive --mask-width".into())),
    }
}

/// Flat JSON config keys mirror the long flag names in snake case, with `R`
/// and `T` accepted for `radius` and `horizon`. Flags win over the file.
#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructArgs {
    /// JSON file with default values for any of the flags below.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, value_enum)]
    pub order: Option<OrderArg>,
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    /// Grid step h (time step 2h).
    #[arg(long)]
    pub step: Option<f64>,
    /// Profile grid is [-L, L].
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Horizon T of every exterior solve.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Cone radius; defaults to the contraction formula with constant `c`.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub picard_iters: Option<usize>,
    #[arg(long, value_enum)]
    pub mask: Option<MaskArg>,
    #[arg(long)]
    pub mask_width: Option<f64>,
    /// Keep every n-th radial node in snapshots.csv.
    #[arg(long)]
    pub stride: Option<usize>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveArgs {
    /// JSON file with default values for any of the flags below.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Radial data CSV `r,u0,u1`.
    #[arg(long, conflicts_with = "profile")]
    pub data: Option<PathBuf>,
    /// Profile CSV `s,value` on a symmetric grid.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    #[arg(long, value_enum)]
    pub solver: Option<SolverArg>,
    #[arg(long)]
    pub picard_iters: Option<usize>,
    #[arg(long, value_enum)]
    pub mask: Option<MaskArg>,
    #[arg(long)]
    pub mask_width: Option<f64>,
    /// Keep every n-th time level.
    #[arg(long)]
    pub snapshot_every: Option<usize>,
    /// Keep every n-th radial node in snapshots.csv.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Name of the run directory under the output directory.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverArg {
    /// Exact-propagator Duhamel march.
    Duhamel,
    /// Leapfrog finite differences.
    Fd,
}

#[derive(Args, Debug)]
pub struct CharnumsArgs {
    /// Profile CSV `s,value`.
    #[arg(long, conflicts_with = "data", required_unless_present = "data")]
    pub profile: Option<PathBuf>,
    /// Radial data CSV `r,u0,u1`.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Reference of the same kind as the input; enables beta.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Fit window for data input; defaults to [r_max/8, r_max/2].
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub window: Option<Vec<f64>>,
    /// Starting radius of the principal-value moment (profile input, no reference).
    #[arg(long, default_value_t = 4.0)]
    pub pv_radius: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub pv_tol: f64,
}

#[derive(Args, Debug)]
pub struct TranslateArgs {
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub t0: f64,
    /// First-order reference profile; reports beta before and after.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Output CSV; defaults to translated.csv in the output directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Linear,
    Fixpoint,
    Dynamics,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: SuiteArg,
    /// Shorter refinement ladders and horizons.
    #[arg(long)]
    pub fast: bool,
    /// Print the report as JSON instead of one line per criterion.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct DecayfitArgs {
    #[arg(long)]
    pub profile: PathBuf,
    /// Fit the tail of `profile - minus` instead.
    #[arg(long)]
    pub minus: Option<PathBuf>,
    #[arg(long, default_value_t = 2.5)]
    pub lo: f64,
    #[arg(long, default_value_t = 25.0)]
    pub hi: f64,
    #[arg(long, default_value_t = 9)]
    pub count: usize,
}

/// Short config keys accepted for their long names.
const ALIASES: [(&str, &str); 2] = [("R", "radius"), ("T", "horizon")];

/// Overlays the flags that were given onto the config file, if any.
pub fn resolve<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Path>) -> Result<T, Error> {
    let Some(path) = config else {
        return serde_json::from_value(serde_json::to_value(flags).map_err(|e| Error::Input(e.to_string()))?)
            .map_err(|e| Error::Input(e.to_string()));
    };
    let mut base: serde_json::Value = nonrad_core::io::read_json(path)?;
    let Some(map) = base.as_object_mut() else {
        return Err(Error::Input(format!("{}: config must be a JSON object", path.display())));
    };
    for (short, long) in ALIASES {
        if let Some(v) = map.remove(short) {
            if map.insert(long.to_string(), v).is_some() {
                return Err(Error::Input(format!("{}: both {short} and {long} given", path.display())));
            }
        }
    }
    let over = serde_json::to_value(flags).map_err(|e| Error::Input(e.to_string()))?;
    for (k, v) in over.as_object().into_iter().flatten() {
        if !v.is_null() {
            map.insert(k.clone(), v.clone());
        }
    }
    serde_json::from_value(base).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

pub enum Failure {
    Verification,
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonContraction(_) | Error::Convergence(_) | Error::Divergence { .. } | Error::Extraction(_) => 3,
        Error::Domain(_) | Error::Input(_) | Error::Io(_) => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let out = cli.out_dir.as_path();
    let result = match &cli.command {
        Command::Construct(a) => commands::construct(a, out),
        Command::Evolve(a) => commands::evolve(a, out),
        Command::Charnums(a) => commands::charnums(a),
        Command::Translate(a) => commands::translate(a, out),
        Command::Verify(a) => commands::verify(a, out),
        Command::Decayfit(a) => commands::decayfit(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
