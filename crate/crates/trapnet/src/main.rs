use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use trapnet::config::{Command, Criterion, Format, RunConfig, DEFAULT_SAMPLES, DEFAULT_STEPS};
use trapnet::{run, CliError};

/// Trapped modes, bound states, survival and transmission on
/// tight-binding networks.
#[derive(Parser)]
#[command(name = "trapnet", version, args_conflicts_with_subcommands = true)]
struct Cli {
    /// Read the whole run from a JSON file instead of flags.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Sub>,
}

#[derive(Subcommand)]
enum Sub {
    /// Certify subgraph modes that are eigenstates of the whole network.
    Trap(TrapArgs),
    /// Survival of central-chain modes of the pi-lattice.
    Evolve(EvolveArgs),
    /// Exact bound states of the pi-lattice.
    Bound(BoundArgs),
    /// Transmission spectrum and its zeros.
    Transmit(TransmitArgs),
}

#[derive(Args)]
struct Lattice {
    #[arg(long)]
    n0: Option<usize>,
    #[arg(long)]
    len: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    #[arg(long, default_value_t = 1.0)]
    kappa0: f64,
    /// Lead sites kept on each side.
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Args)]
struct Out {
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum CriterionArg {
    JointNodes,
    CouplingCancellation,
}

#[derive(Args)]
struct TrapArgs {
    #[command(flatten)]
    lattice: Lattice,
    /// Network file; the pi-lattice is used when absent.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    subgraph: Option<usize>,
    #[arg(long, value_enum, default_value = "joint-nodes")]
    criterion: CriterionArg,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    lattice: Lattice,
    /// 1-based modes, comma separated; all by default.
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<usize>>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Explicit times, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    times: Option<Vec<f64>>,
    #[arg(long)]
    allow_reflections: bool,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    lattice: Lattice,
    /// Also report the long-time survival of this central mode.
    #[arg(long, value_name = "N")]
    long_time: Option<usize>,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct TransmitArgs {
    #[command(flatten)]
    lattice: Lattice,
    #[arg(long, allow_hyphen_values = true)]
    e_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    e_max: Option<f64>,
    /// Sweep in momentum instead of energy; needs --k-max too.
    #[arg(long, requires = "k_max", conflicts_with_all = ["e_min", "e_max"])]
    k_min: Option<f64>,
    #[arg(long, requires = "k_min")]
    k_max: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    steps: usize,
    /// Second joint separation for a peak/dip comparison.
    #[arg(long, value_name = "L2")]
    compare: Option<usize>,
    #[command(flatten)]
    out: Out,
}

fn base(command: Command, lattice: Lattice, out: Out) -> RunConfig {
    let mut cfg = RunConfig::new(command);
    cfg.n0 = lattice.n0;
    cfg.len = lattice.len;
    cfg.kappa = lattice.kappa;
    cfg.kappa0 = lattice.kappa0;
    cfg.m = lattice.m;
    cfg.output = out.output;
    cfg.format = match out.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    cfg
}

fn to_config(sub: Sub) -> RunConfig {
    match sub {
        Sub::Trap(a) => {
            let mut cfg = base(Command::Trap, a.lattice, a.out);
            cfg.graph = a.graph;
            cfg.subgraph = a.subgraph;
            cfg.criterion = match a.criterion {
                CriterionArg::JointNodes => Criterion::JointNodes,
                CriterionArg::CouplingCancellation => Criterion::CouplingCancellation,
            };
            cfg
        }
        Sub::Evolve(a) => {
            let mut cfg = base(Command::Evolve, a.lattice, a.out);
            cfg.modes = a.modes;
            cfg.t_max = a.t_max;
            cfg.samples = a.samples;
            cfg.times = a.times;
            cfg.allow_reflections = a.allow_reflections;
            cfg
        }
        Sub::Bound(a) => {
            let mut cfg = base(Command::Bound, a.lattice, a.out);
            cfg.long_time = a.long_time;
            cfg
        }
        Sub::Transmit(a) => {
            let mut cfg = base(Command::Transmit, a.lattice, a.out);
            cfg.e_min = a.e_min;
            cfg.e_max = a.e_max;
            cfg.k_min = a.k_min;
            cfg.k_max = a.k_max;
            cfg.steps = a.steps;
            cfg.compare = a.compare;
            cfg
        }
    }
}

fn load_config(path: &PathBuf) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.clone(),
        source,
    })?;
    RunConfig::from_json(&text, &path.display().to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = match (cli.config, cli.command) {
        (Some(path), None) => load_config(&path),
        (None, Some(sub)) => Ok(to_config(sub)),
        _ => Err(CliError::Input("give a subcommand or --config <PATH>".into())),
    };
    match cfg.and_then(|c| run(&c)) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
