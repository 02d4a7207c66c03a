//! Runs scenario files and the bundled benchmarks.
//!
//! Exit codes: 0 converged, 2 configuration or usage error, 3 no
//! convergence, 1 anything else (I/O).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cosserat_shell::scenario::{
    benchmark_names, load_benchmark, parse_scenario, Overrides, ScenarioConfig,
};
use cosserat_shell::ShellError;

#[derive(Parser)]
#[command(
    name = "cosserat-bench",
    version,
    about = "Cosserat shell benchmark driver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory for CSV, mesh dumps and reports.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Number of load steps.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Relative residual tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Newton iterations allowed per load increment.
    #[arg(long = "max-iter", global = true)]
    max_iter: Option<usize>,
    /// Suppress the per-iteration log.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Run { config: PathBuf },
    /// Run a bundled benchmark, or `all` of them.
    Bench { name: String },
    /// List the bundled benchmarks.
    List,
}

fn exit_code(err: &ShellError) -> u8 {
    match err {
        ShellError::Config { .. } | ShellError::UnknownBenchmark(_) => 2,
        ShellError::NonConvergence { .. } | ShellError::Singular { .. } | ShellError::Domain(_) => {
            3
        }
        _ => 1,
    }
}

fn run_one(cfg: ScenarioConfig, cli: &Cli, overrides: &Overrides) -> Result<(), ShellError> {
    let mut scenario = cfg.build()?;
    let outputs = scenario.run(overrides, Some(&cli.out), !cli.quiet)?;
    if let Some(last) = outputs.rows.last() {
        let u = last.tip_displacement;
        println!(
            "{}: converged in {} iterations over {} steps ({:.2} s); tip displacement ({:.6e}, {:.6e}, {:.6e}), rotation {:.6}",
            cfg.name,
            outputs.report.total_iterations(),
            outputs.report.steps.len(),
            outputs.report.wall_time.as_secs_f64(),
            u.x,
            u.y,
            u.z,
            last.tip_rotation.norm()
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        load_steps: cli.steps,
        tol_relative: cli.tol,
        max_iters: cli.max_iter,
    };
    let result = match &cli.command {
        Command::List => {
            for name in benchmark_names() {
                let description = load_benchmark(name)
                    .map(|c| c.description)
                    .unwrap_or_default();
                println!("{name:28} {description}");
            }
            Ok(())
        }
        Command::Run { config } => {
            parse_scenario(config).and_then(|cfg| run_one(cfg, &cli, &overrides))
        }
        Command::Bench { name } if name == "all" => {
            let mut worst: Option<ShellError> = None;
            for name in benchmark_names() {
                let res = load_benchmark(name).and_then(|cfg| run_one(cfg, &cli, &overrides));
                if let Err(e) = res {
                    eprintln!("{name}: {e}");
                    if worst.as_ref().is_none_or(|w| exit_code(&e) > exit_code(w)) {
                        worst = Some(e);
                    }
                }
            }
            worst.map_or(Ok(()), Err)
        }
        Command::Bench { name } => {
            load_benchmark(name).and_then(|cfg| run_one(cfg, &cli, &overrides))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
