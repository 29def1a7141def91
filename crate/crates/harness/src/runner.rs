//! Repetition management, trace persistence and summary statistics.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use ragoose::error::{Error, Result};
use ragoose::optimizer::{
    cbo_run, goose_run, ragoose_run, regret_series, trace_to_csv, ProblemDefinition, RunTrace,
};
use ragoose::risk::aggregate;

use crate::config::{AlgorithmId, ExperimentConfig};

/// Number of fresh draws used to estimate the observation noise at the final
/// recommendation when the problem has no analytic noise profile.
const FINAL_NOISE_DRAWS: usize = 200;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepSummary {
    pub rep: usize,
    pub seed: u64,
    pub final_x: Vec<f64>,
    /// Noise-free objective value at the recommendation.
    pub final_f: Option<f64>,
    /// Noise variance at the recommendation (analytic when available,
    /// otherwise a paired-seed sampled estimate).
    pub final_noise_var: Option<f64>,
    pub violations: usize,
    pub records: usize,
    pub wall_s: f64,
    pub error: Option<String>,
}

/// Aggregated results of one experiment; every number is recomputable from
/// the persisted traces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryReport {
    pub label: String,
    pub config: ExperimentConfig,
    pub reps: Vec<RepSummary>,
    pub mean_final_f: Option<f64>,
    pub mean_final_noise_var: Option<f64>,
    pub violation_rate: f64,
    pub mean_wall_s: f64,
    pub mean_iter_wall_s: f64,
    /// Per-iteration regret mean and two standard errors (oracle problems).
    pub regret_mean: Option<Vec<f64>>,
    pub regret_two_se: Option<Vec<f64>>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error with the n−1 divisor; zero for a single sample.
fn standard_error(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Mean-variance optimum `(f*, ρ²*)` over the true safe set by grid search;
/// available for problems with one-dimensional analytic oracles.
pub fn mv_optimum(problem: &ProblemDefinition, weight: f64) -> Option<(f64, f64)> {
    if problem.dim() != 1 {
        return None;
    }
    let probe = &problem.seeds[0];
    problem.oracle.true_noise_var(probe)?;
    problem.oracle.true_objective(probe)?;
    problem.oracle.true_constraint(probe)?;
    let (lo, hi) = problem.bounds[0];
    let n = 200_000usize;
    let mut best: Option<(f64, f64, f64)> = None;
    for i in 0..=n {
        let x = nalgebra::DVector::from_vec(vec![lo + (hi - lo) * i as f64 / n as f64]);
        let q = problem.oracle.true_constraint(&x)?;
        if q > problem.threshold {
            continue;
        }
        let f = problem.oracle.true_objective(&x)?;
        let v = problem.oracle.true_noise_var(&x)?;
        let mv = f + weight * v;
        if best.map_or(true, |(b, _, _)| mv < b) {
            best = Some((mv, f, v));
        }
    }
    best.map(|(_, f, v)| (f, v))
}

pub fn run_single(
    cfg: &ExperimentConfig,
    problem: &ProblemDefinition,
    rep: usize,
) -> Result<RunTrace> {
    let settings = cfg.run_settings(rep)?;
    match cfg.algorithm {
        AlgorithmId::Ragoose => ragoose_run(problem, &settings),
        AlgorithmId::Goose => goose_run(problem, &settings),
        AlgorithmId::Cbo => cbo_run(problem, &settings),
    }
}

/// Estimate the noise variance at the recommendation.  Analytic when the
/// oracle exposes it; otherwise sampled with a seed paired on
/// `(base_seed, rep)` so different algorithm configs share random numbers.
fn final_noise_var(
    cfg: &ExperimentConfig,
    problem: &ProblemDefinition,
    rep: usize,
    x: &nalgebra::DVector<f64>,
) -> Option<f64> {
    if let Some(v) = problem.oracle.true_noise_var(x) {
        return Some(v);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.base_seed + rep as u64);
    rng.set_stream(7);
    let batch = problem
        .oracle
        .evaluate_batch(x, FINAL_NOISE_DRAWS, &mut rng)
        .ok()?;
    aggregate(&batch).ok().map(|(_, s2)| s2)
}

fn summarize_rep(
    cfg: &ExperimentConfig,
    problem: &ProblemDefinition,
    rep: usize,
    trace: &RunTrace,
    wall_s: f64,
) -> RepSummary {
    RepSummary {
        rep,
        seed: cfg.base_seed + rep as u64,
        final_x: trace.final_x.iter().copied().collect(),
        final_f: problem.oracle.true_objective(&trace.final_x),
        final_noise_var: final_noise_var(cfg, problem, rep, &trace.final_x),
        violations: trace.violation_count(),
        records: trace.records.len(),
        wall_s,
        error: None,
    }
}

pub fn summarize(
    cfg: &ExperimentConfig,
    problem: &ProblemDefinition,
    outcomes: &[(usize, std::result::Result<(RunTrace, f64), String>)],
) -> SummaryReport {
    let mut reps = Vec::new();
    let mut finals_f = Vec::new();
    let mut finals_v = Vec::new();
    let mut walls = Vec::new();
    let mut violations = 0usize;
    let mut total_records = 0usize;
    let mut regret_per_rep: Vec<Vec<f64>> = Vec::new();
    let optimum = mv_optimum(problem, cfg.regret_weight);

    for (rep, outcome) in outcomes {
        match outcome {
            Ok((trace, wall_s)) => {
                let summary = summarize_rep(cfg, problem, *rep, trace, *wall_s);
                if let Some(f) = summary.final_f {
                    finals_f.push(f);
                }
                if let Some(v) = summary.final_noise_var {
                    finals_v.push(v);
                }
                walls.push(*wall_s);
                violations += summary.violations;
                total_records += summary.records;
                if let Some(opt) = optimum {
                    if let Ok(r) =
                        regret_series(trace, problem.oracle.as_ref(), opt, cfg.regret_weight)
                    {
                        regret_per_rep.push(r);
                    }
                }
                reps.push(summary);
            }
            Err(msg) => reps.push(RepSummary {
                rep: *rep,
                seed: cfg.base_seed + *rep as u64,
                final_x: vec![],
                final_f: None,
                final_noise_var: None,
                violations: 0,
                records: 0,
                wall_s: 0.0,
                error: Some(msg.clone()),
            }),
        }
    }

    let (regret_mean, regret_two_se) = if regret_per_rep.is_empty() {
        (None, None)
    } else {
        let t_len = regret_per_rep.iter().map(Vec::len).min().unwrap_or(0);
        let mut means = Vec::with_capacity(t_len);
        let mut two_ses = Vec::with_capacity(t_len);
        for t in 0..t_len {
            let at_t: Vec<f64> = regret_per_rep.iter().map(|r| r[t]).collect();
            means.push(mean(&at_t));
            two_ses.push(2.0 * standard_error(&at_t));
        }
        (Some(means), Some(two_ses))
    };

    let mean_wall = if walls.is_empty() { 0.0 } else { mean(&walls) };
    SummaryReport {
        label: cfg.label(),
        config: cfg.clone(),
        mean_final_f: (!finals_f.is_empty()).then(|| mean(&finals_f)),
        mean_final_noise_var: (!finals_v.is_empty()).then(|| mean(&finals_v)),
        violation_rate: if total_records == 0 {
            0.0
        } else {
            violations as f64 / total_records as f64
        },
        mean_wall_s: mean_wall,
        mean_iter_wall_s: mean_wall / cfg.iterations as f64,
        regret_mean,
        regret_two_se,
        reps,
    }
}

pub fn trace_path(out_dir: &Path, rep: usize) -> PathBuf {
    out_dir.join(format!("trace_{rep:03}.csv"))
}

/// All repetitions on a bounded worker pool, without touching the
/// filesystem.  A failing repetition is recorded while the remaining
/// repetitions continue.
pub fn execute(
    cfg: &ExperimentConfig,
) -> Result<Vec<(usize, std::result::Result<(RunTrace, f64), String>)>> {
    cfg.validate()?;
    let problem = cfg.build_problem()?;
    let workers = if cfg.workers == 0 {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    } else {
        cfg.workers
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid(format!("worker pool: {e}")))?;

    Ok(pool.install(|| {
        (0..cfg.repetitions)
            .into_par_iter()
            .map(|rep| {
                let start = Instant::now();
                let result = run_single(cfg, &problem, rep)
                    .map(|trace| (trace, start.elapsed().as_secs_f64()))
                    .map_err(|e| e.to_string());
                (rep, result)
            })
            .collect()
    }))
}

/// Run all repetitions, persist one trace CSV per repetition plus the config
/// snapshot and summary, and return the summary.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<SummaryReport> {
    cfg.validate()?;
    let problem = cfg.build_problem()?;
    let out_dir = PathBuf::from(&cfg.output_dir);
    fs::create_dir_all(&out_dir)
        .map_err(|e| Error::invalid(format!("cannot create output dir: {e}")))?;
    // Probe writability before any run starts.
    let probe = out_dir.join(".write_probe");
    fs::write(&probe, b"ok").map_err(|e| Error::invalid(format!("output dir unwritable: {e}")))?;
    let _ = fs::remove_file(&probe);

    fs::write(out_dir.join("config.toml"), cfg.to_toml()?)
        .map_err(|e| Error::invalid(format!("cannot write config snapshot: {e}")))?;

    let outcomes = execute(cfg)?;

    for (rep, outcome) in &outcomes {
        if let Ok((trace, _)) = outcome {
            fs::write(trace_path(&out_dir, *rep), trace_to_csv(trace, *rep))
                .map_err(|e| Error::invalid(format!("cannot write trace: {e}")))?;
        }
    }

    let summary = summarize(cfg, &problem, &outcomes);
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::invalid(format!("summary encode: {e}")))?;
    fs::write(out_dir.join("summary.json"), json)
        .map_err(|e| Error::invalid(format!("cannot write summary: {e}")))?;
    Ok(summary)
}

pub fn load_summary(path: &Path) -> Result<SummaryReport> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::invalid(format!("summary parse: {e}")))
}

/// Comparison table over summaries of the same problem, one column per
/// algorithm configuration.
pub fn compare(reports: &[SummaryReport], csv: bool) -> Result<String> {
    if reports.len() < 2 {
        return Err(Error::invalid("compare needs at least two summaries"));
    }
    let problem = reports[0].config.problem;
    if reports.iter().any(|r| r.config.problem != problem) {
        return Err(Error::invalid(
            "summaries come from different problems and cannot be compared",
        ));
    }
    let fmt_opt = |v: Option<f64>| match v {
        Some(v) => format!("{v:.6}"),
        None => "n/a".into(),
    };
    if csv {
        let mut out = String::from("metric");
        for r in reports {
            out.push(',');
            out.push_str(&r.label);
        }
        out.push('\n');
        let rows: Vec<(&str, Vec<String>)> = vec![
            (
                "mean_final_f",
                reports.iter().map(|r| fmt_opt(r.mean_final_f)).collect(),
            ),
            (
                "mean_final_noise_var",
                reports
                    .iter()
                    .map(|r| fmt_opt(r.mean_final_noise_var))
                    .collect(),
            ),
            (
                "violation_rate",
                reports
                    .iter()
                    .map(|r| format!("{:.6}", r.violation_rate))
                    .collect(),
            ),
            (
                "mean_wall_s",
                reports
                    .iter()
                    .map(|r| format!("{:.3}", r.mean_wall_s))
                    .collect(),
            ),
        ];
        for (name, cells) in rows {
            out.push_str(name);
            for c in cells {
                out.push(',');
                out.push_str(&c);
            }
            out.push('\n');
        }
        Ok(out)
    } else {
        let mut out = String::new();
        let w = 22usize;
        out.push_str(&format!("{:<24}", "metric"));
        for r in reports {
            out.push_str(&format!("{:>w$}", r.label, w = w));
        }
        out.push('\n');
        let mut row = |name: &str, cells: Vec<String>| {
            out.push_str(&format!("{name:<24}"));
            for c in cells {
                out.push_str(&format!("{c:>w$}", w = w));
            }
            out.push('\n');
        };
        row(
            "mean final f(x*)",
            reports.iter().map(|r| fmt_opt(r.mean_final_f)).collect(),
        );
        row(
            "mean rho2(x*)",
            reports
                .iter()
                .map(|r| fmt_opt(r.mean_final_noise_var))
                .collect(),
        );
        row(
            "violations [%]",
            reports
                .iter()
                .map(|r| format!("{:.3}", 100.0 * r.violation_rate))
                .collect(),
        );
        row(
            "mean time [s]",
            reports
                .iter()
                .map(|r| format!("{:.2}", r.mean_wall_s))
                .collect(),
        );
        Ok(out)
    }
}
