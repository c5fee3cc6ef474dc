// negated comparisons reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod jobs;
mod output;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use collective_emission::config::{parse_config, InitialStateConfig, SimulationConfig, Spacing};
use collective_emission::dynamics::Method;

use crate::args::{RealList, SpacingList};
use crate::output::CliError;
use crate::sweep::{Axis, Quantity};

#[derive(Parser, Debug)]
#[command(name = "colem", version, about = "Collective photon emission of solid-state emitter chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand; each overrides the config file.
#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of emitters.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Temperatures in K: `1,10,25`, `1..300` or `0..300:5`.
    #[arg(long = "T", allow_hyphen_values = true)]
    temperatures: Option<RealList>,
    /// Emitter spacing: nm or `lambda/k`.
    #[arg(long)]
    spacing: Option<Spacing>,
    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    /// Initial state: first_excited, symmetric, antisymmetric.
    #[arg(long)]
    state: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; falls back to SIM_WORKERS, then the logical core count.
    #[arg(long)]
    workers: Option<usize>,
    /// Also write each table as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// ZPL plus sideband spectra per temperature and method.
    Spectrum(Common),
    /// First-order correlation traces.
    G1(Common),
    /// Collective mode table with rates, shifts and populations.
    Modes(Common),
    /// Normalized photon flux with a multi-exponential fit.
    Intensity(Common),
    /// Two-emitter concurrence trajectories.
    Concurrence(Common),
    /// Linewidth-sum deviation between methods over spacings and temperatures.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Spacings to compare; defaults to the configured spacing.
        #[arg(long)]
        spacings: Option<SpacingList>,
    },
    /// One scalar quantity over a parameter axis.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        axis: Axis,
        /// Axis values, same list syntax as --T (spacings as for --spacings).
        #[arg(long)]
        values: String,
        #[arg(long, value_enum)]
        quantity: Quantity,
        /// Method used by method-dependent quantities.
        #[arg(long, default_value = "concatenation")]
        method: Method,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Spectrum(c)
            | Command::G1(c)
            | Command::Modes(c)
            | Command::Intensity(c)
            | Command::Concurrence(c) => c,
            Command::Compare { common, .. } | Command::Sweep { common, .. } => common,
        }
    }
}

fn load_config(c: &Common) -> Result<SimulationConfig, CliError> {
    let mut cfg = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => SimulationConfig::default(),
    };
    if let Some(n) = c.n {
        cfg.chain.n_emitters = n;
    }
    if let Some(t) = &c.temperatures {
        cfg.run.temperatures = t.0.clone();
    }
    if let Some(s) = c.spacing {
        cfg.chain.spacing = s;
    }
    if let Some(m) = &c.methods {
        cfg.run.methods = m.clone();
    }
    if let Some(s) = &c.state {
        cfg.run.initial_state = InitialStateConfig::Named(s.clone());
    }
    if let Some(o) = &c.out {
        cfg.output.dir = o.to_string_lossy().into_owned();
    }
    if c.json && !cfg.output.formats.contains(&collective_emission::config::OutputFormat::Json) {
        cfg.output.formats.push(collective_emission::config::OutputFormat::Json);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn workers(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var("SIM_WORKERS") {
        Ok(v) => {
            v.trim().parse().map_err(|_| CliError::Usage(format!("SIM_WORKERS must be a whole number, got `{v}`")))
        }
        // 0 lets rayon pick the logical core count
        Err(_) => Ok(0),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = cli.command.common();
    let cfg = load_config(common)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers(common.workers)?)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    log::info!("{} worker threads, output in {}", pool.current_num_threads(), cfg.output.dir);
    let explicit_methods = common.methods.is_some();
    pool.install(|| match &cli.command {
        Command::Spectrum(_) => jobs::spectrum(&cfg),
        Command::G1(_) => jobs::g1(&cfg),
        Command::Modes(_) => jobs::modes(&cfg),
        Command::Intensity(_) => jobs::intensity(&cfg),
        Command::Concurrence(_) => jobs::concurrence(&cfg, explicit_methods),
        Command::Compare { spacings, .. } => {
            let spacings = spacings.as_ref().map(|s| s.0.clone()).unwrap_or_else(|| vec![cfg.chain.spacing]);
            jobs::compare(&cfg, &spacings)
        }
        Command::Sweep { axis, values, quantity, method, .. } => sweep::run(&cfg, *axis, values, *quantity, *method),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return CliError::Usage(e.to_string().trim().to_string()).report(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}
