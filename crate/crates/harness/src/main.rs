use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ragoose_harness::config::{AlgorithmId, ExperimentConfig, ProblemId};
use ragoose_harness::plotdata::{export_plot_data, PlotKind};
use ragoose_harness::runner::{compare, load_summary, run_experiment};

#[derive(Parser)]
#[command(
    name = "ragoose",
    about = "Safe risk-averse Bayesian optimization experiment runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment (repeated optimization runs) and persist traces.
    Run(RunArgs),
    /// Compare two or more summary.json files from the same problem.
    Compare(CompareArgs),
    /// Export long-format plot data from trace CSV files.
    PlotData(PlotDataArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Problem id: synthetic, axis-2d or axis-4d.
    #[arg(long)]
    problem: String,
    /// Algorithm: ragoose, goose or cbo.
    #[arg(long)]
    algo: String,
    /// Risk-tolerance coefficient.
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Optimization iterations per repetition.
    #[arg(long, default_value_t = 200)]
    iters: usize,
    /// Objective evaluations per iteration.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Independent repetitions.
    #[arg(long, default_value_t = 30)]
    reps: usize,
    /// Base seed; repetition i uses base + i.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output directory for traces, config snapshot and summary.
    #[arg(long)]
    out: PathBuf,
    /// Optional TOML config file; CLI flags override its run-shape fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker pool size (0 = available cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Override the hyperparameter retuning cadence (0 disables tuning).
    #[arg(long)]
    tune_every: Option<usize>,
}

#[derive(Args)]
struct CompareArgs {
    /// summary.json files produced by `run`.
    #[arg(required = true)]
    summaries: Vec<PathBuf>,
    /// Emit CSV instead of the text table.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct PlotDataArgs {
    /// One of cost-vs-t, var-vs-t, regret-vs-t, mean-vs-var-scatter.
    #[arg(long)]
    kind: String,
    /// Problem id, required for regret-vs-t.
    #[arg(long)]
    problem: Option<String>,
    /// Mean-variance weight for regret-vs-t.
    #[arg(long, default_value_t = 50.0)]
    weight: f64,
    /// Trace CSV files.
    #[arg(required = true)]
    traces: Vec<PathBuf>,
}

fn build_config(args: &RunArgs) -> Result<ExperimentConfig, ragoose::Error> {
    let problem = ProblemId::parse(&args.problem)?;
    let algo = AlgorithmId::parse(&args.algo)?;
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                ragoose::Error::InvalidArgument(format!("cannot read {}: {e}", path.display()))
            })?;
            ExperimentConfig::from_toml(&text)?
        }
        None => ExperimentConfig::preset(problem, algo),
    };
    cfg.problem = problem;
    cfg.algorithm = algo;
    cfg.alpha = args.alpha;
    cfg.iterations = args.iters;
    cfg.k = args.k;
    cfg.repetitions = args.reps;
    cfg.base_seed = args.seed;
    cfg.workers = args.workers;
    cfg.output_dir = args.out.to_string_lossy().into_owned();
    if let Some(every) = args.tune_every {
        if every == 0 {
            cfg.tune = None;
        } else if let Some(t) = cfg.tune.as_mut() {
            t.every = every;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn real_main() -> Result<(), (u8, String)> {
    let cli = Cli::try_parse().map_err(|e| (1u8, e.to_string()))?;
    match cli.command {
        Command::Run(args) => {
            let cfg = build_config(&args).map_err(|e| (1, e.to_string()))?;
            let summary = run_experiment(&cfg).map_err(|e| (2, e.to_string()))?;
            let failed = summary.reps.iter().filter(|r| r.error.is_some()).count();
            println!(
                "{}: {} repetitions ({failed} failed), mean f(x*) = {}, mean rho2(x*) = {}, \
                 violation rate = {:.4}%, mean time = {:.2}s",
                summary.label,
                summary.reps.len(),
                summary
                    .mean_final_f
                    .map_or("n/a".into(), |v| format!("{v:.6}")),
                summary
                    .mean_final_noise_var
                    .map_or("n/a".into(), |v| format!("{v:.6}")),
                100.0 * summary.violation_rate,
                summary.mean_wall_s,
            );
            if failed == summary.reps.len() {
                return Err((2, "every repetition failed".into()));
            }
            Ok(())
        }
        Command::Compare(args) => {
            let reports = args
                .summaries
                .iter()
                .map(|p| load_summary(p))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| (1, e.to_string()))?;
            let table = compare(&reports, args.csv).map_err(|e| (1, e.to_string()))?;
            print!("{table}");
            Ok(())
        }
        Command::PlotData(args) => {
            let kind = PlotKind::parse(&args.kind).map_err(|e| (1, e.to_string()))?;
            let problem = match (&args.problem, kind) {
                (Some(id), _) => {
                    let pid = ProblemId::parse(id).map_err(|e| (1, e.to_string()))?;
                    let cfg = ExperimentConfig::preset(pid, AlgorithmId::Ragoose);
                    Some(cfg.build_problem().map_err(|e| (2, e.to_string()))?)
                }
                (None, PlotKind::RegretVsT) => {
                    return Err((1, "regret-vs-t requires --problem".into()))
                }
                _ => None,
            };
            let traces = args
                .traces
                .iter()
                .map(|p| {
                    let text = std::fs::read_to_string(p).map_err(|e| {
                        (1u8, format!("cannot read {}: {e}", p.display()))
                    })?;
                    ragoose::optimizer::parse_trace_csv(&text).map_err(|e| (1, e.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let csv = export_plot_data(&traces, kind, problem.as_ref(), args.weight)
                .map_err(|e| (1, e.to_string()))?;
            print!("{csv}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
