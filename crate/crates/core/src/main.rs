use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;
use std::thread;

use clap::{Parser, Subcommand};

use famcc::harness::{evaluate, load_config, read_csv, run_scenario, Report, PRESET_NAMES};
use famcc::Error;

#[derive(Parser)]
#[command(name = "famcc", version, about = "Run and check the manifold constraint control benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one preset or TOML scenario file, write its CSV and report.
    Run {
        scenario: String,
        /// Output directory for `<name>.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// Simulate every preset in parallel.
    RunAll {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Print the preset names.
    ListPresets {
        /// Also print each preset as TOML.
        #[arg(long)]
        show: bool,
    },
    /// Re-evaluate the acceptance checks on a stored CSV.
    Check {
        csv: PathBuf,
        #[arg(long)]
        preset: String,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Diverged { .. } | Error::NumericDomain(_) => 3,
        Error::InvalidParameter(_) | Error::Config(_) => 2,
        Error::Io(_) | Error::Csv(_) => 2,
    }
}

fn finish(report: &Report) -> u8 {
    println!("{}", report.render());
    if report.passed() {
        0
    } else {
        1
    }
}

fn run(scenario: &str, out: Option<PathBuf>, dt: Option<f64>, horizon: Option<f64>) -> Result<u8, Error> {
    let mut cfg = load_config(scenario)?;
    if let Some(dt) = dt {
        cfg.simulation.dt = dt;
    }
    if let Some(h) = horizon {
        cfg.simulation.horizon = h;
    }
    let out = out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let (report, _) = run_scenario(&cfg, Some(&out))?;
    Ok(finish(&report))
}

fn run_all(out: PathBuf) -> u8 {
    let results: Vec<_> = thread::scope(|scope| {
        let handles: Vec<_> = PRESET_NAMES
            .iter()
            .map(|name| {
                let out = &out;
                scope.spawn(move || {
                    let cfg = load_config(name)?;
                    run_scenario(&cfg, Some(out)).map(|(report, _)| report)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut code = 0;
    for (name, result) in PRESET_NAMES.iter().zip(results) {
        let c = match result {
            Ok(report) => finish(&report),
            Err(err) => {
                eprintln!("FAIL {name}: {err}");
                println!("RESULT {name} settle=none bound=none invariants=fail sat=fail");
                exit_code(&err)
            }
        };
        code = code.max(c);
    }
    code
}

fn check(csv: PathBuf, preset: &str) -> Result<u8, Error> {
    let cfg = load_config(preset)?;
    let log = read_csv(File::open(&csv)?)?;
    if log.records.is_empty() {
        return Err(Error::Config(format!("{} has no data rows", csv.display())));
    }
    let report = evaluate(&cfg, &log.records, None)?;
    Ok(finish(&report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenario, out, dt, horizon } => run(&scenario, out, dt, horizon),
        Command::RunAll { out } => Ok(run_all(out)),
        Command::ListPresets { show } => {
            for name in PRESET_NAMES {
                println!("{name}");
                if show {
                    println!("{}", load_config(name).map(|c| c.to_toml()).unwrap_or_default());
                }
            }
            Ok(0)
        }
        Command::Check { csv, preset } => check(csv, &preset),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
