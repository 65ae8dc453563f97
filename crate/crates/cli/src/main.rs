use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use syzlab_cli::catalogue::{conventions_json, conventions_text, list_models, models_text, parse_type};
use syzlab_cli::scenario::{read, FibrePayload, SheafPayload};
use syzlab_cli::{run_scenario, CliError, Overrides, RunReport, Scenario, Settings, Task};
use syzlab_lattice::k3::K3InputSpec;
use syzlab_lattice::sheaf::MonodromySpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Parser)]
#[command(name = "syzlab", version, about = "Checks semi-flat mirror constructions from scenario files")]
struct Cli {
    /// Quadrature nodes per fibre axis [default: 16]
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Residual tolerance [default: 1e-8]
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Also write the output to this file (reports are written as JSON).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Run { scenario: PathBuf },
    /// Integral cohomology of a fibre model.
    Fibre {
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 1)]
        subdivision: usize,
    },
    /// Cohomology of a local system on the punctured sphere.
    Sheaf {
        #[arg(long)]
        monodromy: PathBuf,
    },
    /// Lattice-level K3 mirror map.
    K3 {
        #[arg(long)]
        input: PathBuf,
    },
    /// List the singular fibre models.
    Models {
        #[arg(long)]
        json: bool,
        /// Only models of this type, e.g. 1,1
        #[arg(long = "type", value_parser = parse_type)]
        fibre_type: Option<(usize, usize)>,
    },
    /// Print the sign and orientation conventions.
    Conventions,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(cli: &Cli) -> Result<u8, CliError> {
    let overrides = Overrides { grid: cli.grid, tol: cli.tol, seed: cli.seed };
    let scenario = match &cli.command {
        Command::Run { scenario } => Scenario::load(scenario)?,
        Command::Fibre { model, subdivision } => task(
            format!("fibre {model}"),
            Task::Fibre(FibrePayload { model: model.clone(), rules: None, subdivision: *subdivision }),
        ),
        Command::Sheaf { monodromy } => {
            let system: MonodromySpec = serde_json::from_str(&read(monodromy)?)?;
            task("sheaf", Task::Sheaf(SheafPayload { system: Some(system), ..SheafPayload::default() }))
        }
        Command::K3 { input } => {
            let spec: K3InputSpec = serde_json::from_str(&read(input)?)?;
            task("k3", Task::K3(spec))
        }
        Command::Models { json, fibre_type } => {
            let rows = list_models(*fibre_type);
            let text = if *json || cli.format == Format::Json {
                serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n"
            } else {
                models_text(&rows)
            };
            return emit(&text, cli.out.as_deref()).map(|_| 0);
        }
        Command::Conventions => {
            let text = match cli.format {
                Format::Json => conventions_json() + "\n",
                Format::Text => conventions_text(),
            };
            return emit(&text, cli.out.as_deref()).map(|_| 0);
        }
    };
    let report = run_scenario(&scenario, &overrides)?;
    print_report(&report, cli)?;
    Ok(report.exit_code())
}

fn task(name: impl Into<String>, task: Task) -> Scenario {
    Scenario::new(name, Settings::default(), task)
}

fn print_report(report: &RunReport, cli: &Cli) -> Result<(), CliError> {
    let json = report.to_json() + "\n";
    match cli.format {
        Format::Json => print!("{json}"),
        Format::Text => print!("{}", report.to_text()),
    }
    if let Some(path) = &cli.out {
        write(path, &json)?;
    }
    Ok(())
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    print!("{text}");
    if let Some(path) = out {
        write(path, text)?;
    }
    Ok(())
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}
