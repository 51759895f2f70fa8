use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hyperctl::scenario::{curves, riemann_table, run_scenario, validate_config, write_plots, Scenario};
use hyperctl::{Error, Result};

#[derive(Parser)]
#[command(name = "hyperctl", version, about = "Front tracking and boundary control experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Suppress progress and summary output.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Overrides tracking.epsilon.
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    epsilon: Option<f64>,
    /// Overrides the scenario seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its reports.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Check a config file without running it.
    Validate {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
    },
    /// Solve the `[riemann]` section and print the wave table.
    Riemann {
        #[command(flatten)]
        common: Common,
        /// Print JSON instead of the aligned table.
        #[arg(long)]
        json: bool,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Sample the Lax curve of the `[curves]` section as CSV.
    Curves {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Turn the reports of a finished run into gnuplot data files.
    Plots {
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
}

fn load(c: &Common) -> Result<Scenario> {
    let mut sc = Scenario::load(&c.config)?;
    if let Some(e) = c.epsilon {
        sc.tracking.epsilon = e;
    }
    if let Some(s) = c.seed {
        sc.seed = s;
    }
    let diags = sc.diagnostics();
    if !diags.is_empty() {
        return Err(Error::Config(diags.join("; ")));
    }
    Ok(sc)
}

fn write_one(dir: &Path, name: &str, body: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), body)?;
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let quiet = cli.quiet;
    match &cli.command {
        Command::Run { common, out } => {
            let sc = load(common)?;
            let summary = run_scenario(&sc, out)?;
            if !quiet {
                println!("{} '{}': {} files in {}", sc.experiment.as_str(), sc.name, summary.files.len(), out.display());
            }
            Ok(0)
        }
        Command::Validate { config } => {
            let diags = validate_config(config)?;
            if diags.is_empty() {
                if !quiet {
                    println!("ok");
                }
                return Ok(0);
            }
            for d in &diags {
                eprintln!("{d}");
            }
            Ok(2)
        }
        Command::Riemann { common, json, out } => {
            let sc = load(common)?;
            let (table, csv, js) = riemann_table(&sc)?;
            if let Some(dir) = out {
                write_one(dir, "riemann.csv", &csv)?;
            }
            if !quiet {
                print!("{}", if *json { js } else { table });
            }
            Ok(0)
        }
        Command::Curves { common, out } => {
            let sc = load(common)?;
            let csv = curves(&sc)?;
            match out {
                Some(dir) => write_one(dir, "curve.csv", &csv)?,
                None if !quiet => print!("{csv}"),
                None => {}
            }
            Ok(0)
        }
        Command::Plots { out } => {
            let files = write_plots(out)?;
            if !quiet {
                for f in files {
                    println!("{f}");
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
