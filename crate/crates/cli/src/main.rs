use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use coulomblab_cli::{parse_batch, run, run_batch, selftest, CliError, Outcome, ScenarioConfig};

#[derive(Parser)]
#[command(name = "coulomblab", version, about = "Double Coulomb decomposition, spectral index and Conley index experiments")]
struct Cli {
    /// Run the full acceptance suite.
    #[arg(long)]
    selftest: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Clone, Default)]
struct Common {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    /// CSV report path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// SVG output path (2D Conley runs only).
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Split a 1-cochain into its double Coulomb part and an exact part.
    Decompose {
        /// Generator `name:resolution` or an .off file.
        #[arg(long)]
        mesh: String,
        /// `random:SEED` or a JSON cochain file.
        #[arg(long)]
        alpha: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Fredholm index of the discretized spectral boundary value problem.
    Aps {
        /// `diag:a,b,..`, `random:M` or a JSON matrix.
        #[arg(long = "L")]
        l: String,
        /// `nonpositive`, `all` or `below:c`.
        #[arg(long, default_value = "nonpositive")]
        proj: String,
        /// Number of time steps.
        #[arg(long)]
        res: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Nonpositive eigenspace check of the L1 block operator on a closed mesh.
    Spectral {
        #[arg(long)]
        mesh: String,
        #[command(flatten)]
        common: Common,
    },
    /// Index pairs, validation, intersections and induced maps on a cubical grid.
    Conley {
        /// `index-pair`, `validate`, `intersect` or `induced-map`.
        #[arg(default_value = "index-pair")]
        action: String,
        /// Field name or JSON field description.
        #[arg(long)]
        field: String,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        res: Option<usize>,
        /// Time step of the cubical map.
        #[arg(long)]
        step: Option<f64>,
        /// Box half-width.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        seed_radius: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Conley index of compressed gradient flows across spectral levels.
    Fda {
        /// `linear` or `double-well`.
        #[arg(long)]
        field: String,
        /// Levels such as `(-2.5,2.5];(-3.5,3.5]`.
        #[arg(long)]
        levels: Option<String>,
        #[arg(long = "R")]
        radius: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a JSON batch of scenarios.
    Batch {
        config: PathBuf,
    },
    /// Run the full acceptance suite.
    Selftest {
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn with_common(mut c: ScenarioConfig, common: Common) -> ScenarioConfig {
    c.seed = common.seed;
    c.tol = common.tol;
    c.report = common.report;
    c.svg = common.svg;
    c
}

fn scenario(command: Command) -> Option<ScenarioConfig> {
    Some(match command {
        Command::Decompose { mesh, alpha, common } => {
            with_common(ScenarioConfig { mesh: Some(mesh), alpha, ..ScenarioConfig::new("decompose") }, common)
        }
        Command::Aps { l, proj, res, common } => {
            with_common(ScenarioConfig { l: Some(l), proj: Some(proj), res, ..ScenarioConfig::new("aps") }, common)
        }
        Command::Spectral { mesh, common } => with_common(ScenarioConfig { mesh: Some(mesh), ..ScenarioConfig::new("spectral") }, common),
        Command::Conley { action, field, dim, res, step, radius, seed_radius, common } => with_common(
            ScenarioConfig {
                action: Some(action),
                field: Some(field),
                dim,
                res,
                step,
                radius,
                seed_radius,
                ..ScenarioConfig::new("conley")
            },
            common,
        ),
        Command::Fda { field, levels, radius, common } => {
            with_common(ScenarioConfig { field: Some(field), levels, radius, ..ScenarioConfig::new("fda") }, common)
        }
        Command::Batch { .. } | Command::Selftest { .. } => return None,
    })
}

fn report_outcome(outcome: &Outcome, to_stdout: bool) -> bool {
    if to_stdout {
        print!("{}", outcome.csv);
    }
    outcome.passed
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error[{}]: {e}", e.code());
    ExitCode::from(2)
}

fn run_selftest(report: Option<PathBuf>) -> Result<bool, CliError> {
    let (outcome, results) = selftest()?;
    for r in &results {
        println!("{}", r.line());
    }
    if let Some(path) = report {
        std::fs::write(path, &outcome.csv)?;
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = match (cli.selftest, cli.command) {
        (true, _) | (false, Some(Command::Selftest { report: None })) => run_selftest(None),
        (false, Some(Command::Selftest { report })) => run_selftest(report),
        (false, Some(Command::Batch { config })) => std::fs::read_to_string(&config)
            .map_err(CliError::from)
            .and_then(|text| parse_batch(&text))
            .and_then(|configs| run_batch(&configs))
            .map(|results| {
                let mut ok = true;
                for (k, r) in results.iter().enumerate() {
                    match r {
                        Ok(o) => {
                            eprintln!("scenario {k}: {}", if o.passed { "pass" } else { "fail" });
                            ok &= o.passed;
                        }
                        Err(e) => {
                            eprintln!("scenario {k}: error[{}]: {e}", e.code());
                            ok = false;
                        }
                    }
                }
                ok
            }),
        (false, Some(command)) => {
            let config = scenario(command).expect("scenario subcommand");
            let to_stdout = config.report.is_none();
            run(&config).map(|o| report_outcome(&o, to_stdout))
        }
        (false, None) => Err(CliError::ConfigParse("no command given; see --help".into())),
    };
    eprintln!("elapsed {:.3} s", start.elapsed().as_secs_f64());
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => fail(&e),
    }
}
