//! `sinf`: verification suites, samplers, kernel tables and experiments.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{run, RunError};
use crate::config::{ExperimentConfig, GridConfig, Mode};

#[derive(Parser, Debug)]
#[command(name = "sinf", version, about = "Harmonic analysis on the infinite symmetric group at desk scale")]
struct Cli {
    /// Base seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Exact rational or floating-point arithmetic where both exist.
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run verification suites.
    Verify {
        #[arg(value_enum)]
        suite: VerifySuite,
        #[command(flatten)]
        params: Params,
    },
    /// Enumerate partitions of n.
    Partitions {
        #[arg(value_enum, default_value = "list")]
        action: PartitionsAction,
        #[command(flatten)]
        params: Params,
    },
    /// Ewens samples and exact laws.
    Ewens {
        #[arg(value_enum)]
        action: EwensAction,
        #[command(flatten)]
        params: Params,
    },
    /// z-measure tables and samples.
    Zmeasure {
        #[arg(value_enum)]
        action: ZmeasureAction,
        #[command(flatten)]
        params: Params,
    },
    /// Character tables and χ_z.
    Characters {
        #[arg(value_enum)]
        action: CharactersAction,
        #[command(flatten)]
        params: Params,
    },
    /// Whittaker kernel, q(z) and the resolvent check.
    Kernel {
        #[arg(value_enum)]
        action: KernelAction,
        #[command(flatten)]
        params: Params,
    },
    /// Lattice correlations and their estimators.
    Pointproc {
        #[arg(value_enum)]
        action: PointprocAction,
        #[command(flatten)]
        params: Params,
    },
    /// Binned one-point density of the lifted process against K(x, x).
    Experiment {
        #[arg(value_enum, default_value = "run")]
        action: ExperimentAction,
        #[command(flatten)]
        params: Params,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VerifySuite {
    Exact,
    Cocycle,
    Samplers,
    Characters,
    Experiment,
    Operator,
    Q,
    Lattice,
    Degeneracies,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PartitionsAction {
    List,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum EwensAction {
    Sample,
    Law,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ZmeasureAction {
    Sample,
    Table,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CharactersAction {
    Table,
    ChiZ,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum KernelAction {
    Table,
    Q,
    Resolvent,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PointprocAction {
    Lattice,
    Witness,
    Estimate,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ExperimentAction {
    Run,
}

#[derive(Args, Debug, Default)]
struct Params {
    /// Spectral parameter, e.g. `0.5`, `0.3+0.2i`, `1/3-2/5i`.
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// Ewens parameter; must equal |z|² when z is also given.
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// Number of samples.
    #[arg(long)]
    count: Option<usize>,
    /// Correlation order.
    #[arg(long)]
    order: Option<usize>,
    /// `growth` or `mixed`.
    #[arg(long)]
    route: Option<String>,
    /// JSON file holding an array of points, or an inline comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
    /// Quadrature nodes of the kernel grid.
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long)]
    max_nodes: Option<usize>,
    #[arg(long)]
    max_samples: Option<usize>,
}

fn value_name<V: ValueEnum>(v: V) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

fn read_points(spec: &str) -> Result<Vec<f64>, RunError> {
    let text = if spec.trim_start().starts_with('[') || spec.contains(',') || spec.parse::<f64>().is_ok() {
        if spec.trim_start().starts_with('[') { spec.to_string() } else { format!("[{spec}]") }
    } else {
        std::fs::read_to_string(spec).map_err(|e| RunError::Config(format!("cannot read points file {spec}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| RunError::Config(format!("points must be a JSON array of numbers: {e}")))
}

impl Params {
    fn into_config(self, command: String) -> Result<ExperimentConfig, RunError> {
        let points = self.points.as_deref().map(read_points).transpose()?;
        Ok(ExperimentConfig {
            command: Some(command),
            z: self.z,
            t: self.t,
            xi: self.xi,
            n: self.n,
            sample_count: self.count,
            order: self.order,
            route: self.route,
            points,
            grid: self.nodes.map(|nodes| GridConfig { nodes, ..GridConfig::default() }),
            max_n: self.max_n,
            max_nodes: self.max_nodes,
            max_samples: self.max_samples,
            ..Default::default()
        })
    }
}

fn resolve(cli: Cli) -> Result<ExperimentConfig, RunError> {
    let (command, params) = match cli.command {
        Command::Verify { suite, params } => (format!("verify {}", value_name(suite)), params),
        Command::Partitions { action, params } => (format!("partitions {}", value_name(action)), params),
        Command::Ewens { action, params } => (format!("ewens {}", value_name(action)), params),
        Command::Zmeasure { action, params } => (format!("zmeasure {}", value_name(action)), params),
        Command::Characters { action, params } => (format!("characters {}", value_name(action)), params),
        Command::Kernel { action, params } => (format!("kernel {}", value_name(action)), params),
        Command::Pointproc { action, params } => (format!("pointproc {}", value_name(action)), params),
        Command::Experiment { action, params } => (format!("experiment {}", value_name(action)), params),
    };
    let file = match &cli.config {
        Some(path) => ExperimentConfig::load(path).map_err(|e| RunError::Config(e.0))?,
        None => ExperimentConfig::default(),
    };
    if let Some(c) = &file.command {
        if *c != command {
            return Err(RunError::Config(format!("config is for '{c}', not '{command}'")));
        }
    }
    let mut flags = params.into_config(command)?;
    flags.seed = cli.seed;
    flags.mode = cli.mode;
    flags.out = cli.out;
    // a bare --nodes only overrides the node count of a configured grid
    if let (Some(g), Some(file_grid)) = (&mut flags.grid, &file.grid) {
        *g = GridConfig { nodes: g.nodes, ..*file_grid };
    }
    Ok(file.overlay(flags))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = resolve(cli).and_then(|config| run(&config));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
