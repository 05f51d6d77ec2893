use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qsigma::harness::{write_episode_csv, write_sweep_csv};
use qsigma::{run_experiment, sweep_alpha, AlgorithmKind, ExperimentConfig, Result, ENV_NAMES};
use qsigma_cli::pool::with_pool;
use qsigma_cli::reproduce;

/// Experiment runner for multi-step temporal-difference control with a
/// tunable degree of sampling.
#[derive(Parser)]
#[command(name = "qsigma", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config and write its per-episode CSV.
    Run(RunArgs),
    /// Run the step-size sweep over a config's `alphas` grid.
    Sweep(RunArgs),
    /// Re-run a published experiment suite and verify its headline results.
    Reproduce(ReproduceArgs),
    /// List the available environments.
    ListEnvs,
    /// List the available algorithms.
    ListAlgorithms,
}

#[derive(Args)]
struct RunArgs {
    /// Path to a TOML experiment config.
    config: PathBuf,
    /// Override the config's base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's number of independent runs.
    #[arg(long)]
    runs: Option<usize>,
    /// Output CSV path (default: the config's `out`, else next to the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the run batch (default: one per core).
    #[arg(long)]
    parallel: Option<usize>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Which experiment suite to reproduce.
    #[arg(value_enum)]
    task: Task,
    /// Directory for the emitted CSV files.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Worker threads for the run batches (default: one per core).
    #[arg(long)]
    parallel: Option<usize>,
}

#[derive(Copy, Clone, ValueEnum)]
enum Task {
    Randomwalk,
    Windygrid,
    Mountaincliff,
}

impl Task {
    fn name(self) -> &'static str {
        match self {
            Task::Randomwalk => "randomwalk",
            Task::Windygrid => "windygrid",
            Task::Mountaincliff => "mountaincliff",
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests arrive here too; only real usage
            // mistakes should produce a failing exit code.
            let code = if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
            let _ = e.print();
            return code;
        }
    };

    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run(args) => {
            let (cfg, out) = load(&args, "csv")?;
            let stats = with_pool(args.parallel, || run_experiment(&cfg))?;
            write_with_dirs(&out, |p| write_episode_csv(&stats, p))?;
            let (mean, stderr) = stats.overall_summary();
            println!(
                "wrote {} ({} runs x {} episodes, overall {} {:.4} +- {:.4})",
                out.display(),
                stats.runs(),
                stats.episodes(),
                measurement_label(&cfg),
                mean,
                stderr
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep(args) => {
            let (cfg, out) = load(&args, "sweep.csv")?;
            let points = with_pool(args.parallel, || sweep_alpha(&cfg))?;
            write_with_dirs(&out, |p| write_sweep_csv(&points, p))?;
            let best = points
                .iter()
                .max_by(|a, b| a.mean.total_cmp(&b.mean))
                .expect("validated grid is non-empty");
            println!(
                "wrote {} ({} step sizes; best alpha {} with {} {:.4} +- {:.4})",
                out.display(),
                points.len(),
                best.alpha,
                measurement_label(&cfg),
                best.mean,
                best.stderr
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Reproduce(args) => {
            let report =
                with_pool(args.parallel, || reproduce::run_task(args.task.name(), &args.out))?;
            for check in &report.checks {
                let verdict = if check.passed { "PASS" } else { "FAIL" };
                println!("{verdict} {}: {}", check.name, check.detail);
            }
            let passed = report.checks.iter().filter(|c| c.passed).count();
            println!(
                "{}: {passed}/{} checks passed, {} files in {}",
                report.task,
                report.checks.len(),
                report.files.len(),
                args.out.display()
            );
            if report.all_passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(3))
            }
        }
        Command::ListEnvs => {
            for name in ENV_NAMES {
                println!("{name}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ListAlgorithms => {
            for kind in AlgorithmKind::ALL {
                println!("{}", kind.name());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn measurement_label(cfg: &ExperimentConfig) -> &'static str {
    match cfg.measurement {
        qsigma::Measurement::RmsPerEpisode => "rms",
        qsigma::Measurement::ReturnPerEpisode => "return",
    }
}

fn load(args: &RunArgs, suffix: &str) -> Result<(ExperimentConfig, PathBuf)> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(runs) = args.runs {
        cfg.runs = runs;
        cfg.validate()?;
    }
    let out = args
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| args.config.with_extension(suffix));
    Ok((cfg, out))
}

fn write_with_dirs(path: &Path, write: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|source| qsigma::Error::Io { path: parent.to_path_buf(), source })?;
        }
    }
    write(path)
}
