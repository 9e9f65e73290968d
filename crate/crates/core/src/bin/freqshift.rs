use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use freqshift::scenario::{run_experiment, sweep, GridSpec, RunOptions, RunSummary, Scenario, ScenarioConfig, EXPERIMENTS};

#[derive(Parser)]
#[command(name = "freqshift", version, about = "Cascaded quantum frequency shifter simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario TOML; the bundled default when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the Monte Carlo base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Skip Monte Carlo columns.
    #[arg(long)]
    no_montecarlo: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named experiment (`all` runs every one).
    Run {
        experiment: String,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep one parameter; without --variable, runs the sweeps in the config.
    Sweep {
        #[arg(long)]
        variable: Option<String>,
        #[arg(long, requires_all = ["variable", "max", "steps"])]
        min: Option<f64>,
        #[arg(long)]
        max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        log: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Check a scenario file and print its hash.
    ValidateConfig {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// List experiment names.
    ListExperiments,
}

const EXIT_VALIDATION: u8 = 1;
const EXIT_CHECK_FAILED: u8 = 2;

fn load(config: &Option<PathBuf>, seed: Option<u64>) -> freqshift::Result<Scenario> {
    let mut cfg = match config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::bundled(),
    };
    if let Some(seed) = seed {
        cfg = cfg.with_seed(seed);
    }
    Scenario::new(cfg)
}

fn report(summary: &RunSummary) -> bool {
    for check in &summary.checks {
        let verdict = if check.passed { "pass" } else { "FAIL" };
        println!("  [{verdict}] {}: {} ({})", check.name, check.value, check.requirement);
    }
    for w in &summary.warnings {
        eprintln!("  warning: {w}");
    }
    println!("  wrote {}", summary.outputs.join(", "));
    summary.passed()
}

fn run(cli: Cli) -> freqshift::Result<bool> {
    match cli.command {
        Command::ListExperiments => {
            for (name, about) in EXPERIMENTS {
                println!("{name:8} {about}");
            }
            Ok(true)
        }
        Command::ValidateConfig { config } => {
            let scn = load(&config, None)?;
            println!("ok {}", scn.hash);
            Ok(true)
        }
        Command::Run { experiment, common } => {
            let scn = load(&common.config, common.seed)?;
            let opts = RunOptions { out_dir: &common.out, montecarlo: !common.no_montecarlo };
            let names: Vec<&str> = if experiment == "all" {
                EXPERIMENTS.iter().map(|(n, _)| *n).collect()
            } else {
                vec![experiment.as_str()]
            };
            let mut ok = true;
            for name in names {
                println!("{name}");
                ok &= report(&run_experiment(name, &scn, opts)?);
            }
            Ok(ok)
        }
        Command::Sweep { variable, min, max, steps, log, common } => {
            let scn = load(&common.config, common.seed)?;
            let opts = RunOptions { out_dir: &common.out, montecarlo: !common.no_montecarlo };
            let jobs: Vec<(String, GridSpec)> = match variable {
                Some(v) => {
                    let grid = match (min, max, steps) {
                        (Some(min), Some(max), Some(steps)) => GridSpec { min, max, steps, log },
                        _ => match scn.config.sweeps.iter().find(|s| s.variable == v) {
                            Some(def) => def.grid(),
                            None => {
                                return Err(freqshift::Error::Parse {
                                    what: "sweep grid".into(),
                                    message: format!("no grid for `{v}`: pass --min, --max and --steps"),
                                })
                            }
                        },
                    };
                    vec![(v, grid)]
                }
                None => scn.config.sweeps.iter().map(|s| (s.variable.clone(), s.grid())).collect(),
            };
            for (v, grid) in jobs {
                println!("sweep {v}");
                report(&sweep(&scn, &v, &grid, opts)?);
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}
