use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use concealed_cli::{converge_to_dir, load_config, run_to_dir, ScenarioConfig, ScenarioKind, Sink};

#[derive(Parser)]
#[command(
    name = "concealed",
    version,
    about = "Quantum fluid runs with their concealed companion flow"
)]
struct Cli {
    /// Directory for CSV files and reports.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Print nothing but warnings and errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    Run { config: PathBuf },
    /// Rerun a config at each refinement level and report observed orders.
    Converge { config: PathBuf },
    /// Run a built-in scenario with its default settings.
    Demo {
        #[arg(value_parser = parse_scenario)]
        scenario: ScenarioKind,
    },
}

fn parse_scenario(s: &str) -> Result<ScenarioKind, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are configuration errors; 2 is reserved for numerical failure
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let mut sink = Sink { quiet: cli.quiet };
    let result = match &cli.command {
        Command::Run { config } => {
            load_config(config).and_then(|cfg| run_to_dir(&cfg, &cli.out_dir, &mut sink).map(drop))
        }
        Command::Converge { config } => {
            load_config(config).and_then(|cfg| converge_to_dir(&cfg, &cli.out_dir, &mut sink).map(drop))
        }
        Command::Demo { scenario } => {
            run_to_dir(&ScenarioConfig::defaults(*scenario), &cli.out_dir, &mut sink).map(drop)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
