//! End-to-end optimization loops and their run traces.
//!
//! Three loops share one engine: the risk-averse safe loop (RAGoOSE), the
//! risk-neutral safe baseline (GoOSE, `α = 0` with a homoscedastic noise
//! model), and the unconstrained-proposal baseline (CBO, expected improvement
//! times feasibility probability over the full domain grid).
//!
//! Per iteration the engine refits the surrogates, rebuilds the safe region,
//! recomputes the optimum candidate when the previous query consumed it,
//! queries either the candidate (if its constraint ucb clears the threshold)
//! or the nearest certifying expander, and falls back to a safe seed when
//! neither exists.  Every evaluation draws `k` objective samples and one
//! constraint sample.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::acquisition::{pso_minimize, rahbo_acq, AcquisitionContext, PsoConfig};
use crate::error::{Error, Result};
use crate::gp::{fit, tune_hyperparameters, GpModel, KernelConfig, TrainingSet, TuneBounds};
use crate::risk::{aggregate, mv_value, noise_schedule, RiskConfig, SampleBatch};
use crate::safety::{discretization_step, select_expander, DiscretizedDomain, SafeRegion};

/// Black-box access to a problem: noisy draws plus optional ground truth.
pub trait ProblemOracle: Send + Sync {
    /// Draw `k` raw objective observations and one constraint observation.
    fn evaluate_batch(
        &self,
        x: &DVector<f64>,
        k: usize,
        rng: &mut dyn RngCore,
    ) -> Result<SampleBatch>;

    /// Noise-free objective value, when the problem exposes one.
    fn true_objective(&self, _x: &DVector<f64>) -> Option<f64> {
        None
    }

    /// True noise variance `ρ²(x)`, when the problem exposes one.
    fn true_noise_var(&self, _x: &DVector<f64>) -> Option<f64> {
        None
    }

    /// Noise-free constraint value, when the problem exposes one.
    fn true_constraint(&self, _x: &DVector<f64>) -> Option<f64> {
        None
    }
}

/// A problem instance: box domain, safe seeds, threshold and the oracle.
#[derive(Clone)]
pub struct ProblemDefinition {
    pub name: String,
    pub bounds: Vec<(f64, f64)>,
    pub seeds: Vec<DVector<f64>>,
    pub threshold: f64,
    /// Assumed constraint observation noise std `σ_q` (drives `ε = 6σ_q`).
    pub constraint_noise_std: f64,
    pub oracle: Arc<dyn ProblemOracle>,
}

impl fmt::Debug for ProblemDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemDefinition")
            .field("name", &self.name)
            .field("bounds", &self.bounds)
            .field("seeds", &self.seeds.len())
            .field("threshold", &self.threshold)
            .finish()
    }
}

impl ProblemDefinition {
    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.bounds.is_empty() {
            return Err(Error::invalid("problem must have at least one dimension"));
        }
        if self.seeds.is_empty() {
            return Err(Error::invalid("a non-empty safe seed set is required"));
        }
        if self.seeds.iter().any(|s| s.len() != self.dim()) {
            return Err(Error::invalid("seed dimension mismatch"));
        }
        if !(self.constraint_noise_std >= 0.0) {
            return Err(Error::invalid("constraint noise std must be >= 0"));
        }
        Ok(())
    }

    /// Exploration threshold `ε = 6σ_q`.
    pub fn epsilon(&self) -> f64 {
        6.0 * self.constraint_noise_std
    }
}

/// Kernel configurations and homoscedastic observation-noise variances for
/// the three surrogates.
#[derive(Debug, Clone, PartialEq)]
pub struct GpSettings {
    pub f_kernel: KernelConfig,
    pub q_kernel: KernelConfig,
    pub var_kernel: KernelConfig,
    /// Observation noise variance `σ_q²` used by the constraint GP.
    pub q_noise_var: f64,
    /// Observation noise variance `σ_var²` used by the variance GP.
    pub var_noise_var: f64,
}

/// Hyperparameter retuning cadence and search bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct TunePolicy {
    /// Retune every `every` iterations (1 = every iteration).
    pub every: usize,
    pub f_bounds: TuneBounds,
    pub q_bounds: TuneBounds,
    pub var_bounds: TuneBounds,
}

/// Everything a loop needs besides the problem itself.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub risk: RiskConfig,
    pub pso: PsoConfig,
    pub gp: GpSettings,
    pub tune: Option<TunePolicy>,
    pub iterations: usize,
    pub seed: u64,
    pub cell_budget: usize,
}

impl RunSettings {
    pub fn validate(&self, problem: &ProblemDefinition) -> Result<()> {
        problem.validate()?;
        self.risk.validate()?;
        self.pso.validate()?;
        if self.iterations < 1 {
            return Err(Error::invalid("at least one iteration required"));
        }
        let d = problem.dim();
        for (name, k) in [
            ("f", &self.gp.f_kernel),
            ("q", &self.gp.q_kernel),
            ("var", &self.gp.var_kernel),
        ] {
            k.validate()?;
            if k.dim() != d {
                return Err(Error::invalid(format!(
                    "{name} kernel dimension {} does not match problem dimension {d}",
                    k.dim()
                )));
            }
        }
        if let Some(tp) = &self.tune {
            if tp.every == 0 {
                return Err(Error::invalid("tune cadence must be >= 1"));
            }
            tp.f_bounds.validate(d)?;
            tp.q_bounds.validate(d)?;
            tp.var_bounds.validate(d)?;
        }
        Ok(())
    }
}

/// Why a point was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryRole {
    Optimum,
    Expander,
    Fallback,
}

impl QueryRole {
    pub fn as_str(&self) -> &'static str {
        match self {
            QueryRole::Optimum => "optimum-query",
            QueryRole::Expander => "expander-query",
            QueryRole::Fallback => "fallback",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "optimum-query" => Ok(QueryRole::Optimum),
            "expander-query" => Ok(QueryRole::Expander),
            "fallback" => Ok(QueryRole::Fallback),
            other => Err(Error::invalid(format!("unknown query role {other:?}"))),
        }
    }
}

impl fmt::Display for QueryRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One iteration's evaluation.
#[derive(Debug, Clone)]
pub struct EvaluationRecord {
    pub t: usize,
    pub x: DVector<f64>,
    pub y_mean: f64,
    pub s2: f64,
    pub m: f64,
    pub role: QueryRole,
    pub violation: bool,
    /// Acquisition value associated with the proposal.
    pub acq_value: f64,
    /// For optimum queries: the constraint ucb at decision time.
    pub ucb_q_at_decision: Option<f64>,
    /// For expander queries: whether the cell was a member of the expander
    /// set at decision time.
    pub expander_member: Option<bool>,
}

/// A full optimization run.
#[derive(Debug, Clone)]
pub struct RunTrace {
    pub algorithm: String,
    pub problem: String,
    pub seed: u64,
    pub records: Vec<EvaluationRecord>,
    /// Recommendation after each iteration's model refit.
    pub recommendations: Vec<DVector<f64>>,
    pub final_x: DVector<f64>,
}

impl RunTrace {
    pub fn violation_count(&self) -> usize {
        self.records.iter().filter(|r| r.violation).count()
    }

    pub fn dim(&self) -> usize {
        self.final_x.len()
    }
}

/// Pessimistic recommendation: argmin over safe cells of
/// `ucb_f(x) + α·max(ucb_var(x), 0)`; ties go to the lowest grid index.
/// `None` when the safe mask is empty (the caller falls back to a seed).
pub fn recommend(
    f_model: &GpModel,
    var_model: &GpModel,
    safe_mask: &[bool],
    domain: &DiscretizedDomain,
    alpha: f64,
    beta_f: f64,
    beta_var: f64,
) -> Result<Option<DVector<f64>>> {
    let cells: Vec<usize> = (0..safe_mask.len()).filter(|i| safe_mask[*i]).collect();
    if cells.is_empty() {
        return Ok(None);
    }
    let centers: Vec<DVector<f64>> = cells.iter().map(|&i| domain.cell_center(i)).collect();
    let f_preds = f_model.predict_many(&centers)?;
    let scores: Vec<f64> = if alpha == 0.0 {
        f_preds.iter().map(|(m, v)| m + beta_f * v.sqrt()).collect()
    } else {
        let var_preds = var_model.predict_many(&centers)?;
        f_preds
            .iter()
            .zip(&var_preds)
            .map(|((fm, fv), (vm, vv))| {
                fm + beta_f * fv.sqrt() + alpha * (vm + beta_var * vv.sqrt()).max(0.0)
            })
            .collect()
    };
    let mut best = 0usize;
    for i in 1..scores.len() {
        if scores[i] < scores[best] {
            best = i;
        }
    }
    Ok(Some(centers[best].clone()))
}

/// Per-iteration regret `[f(x_t) + w·ρ²(x_t)] − [f* + w·ρ²*]`, non-negative
/// when `(f*, ρ²*)` is the mean-variance optimum over the safe domain.
pub fn regret_series(
    trace: &RunTrace,
    oracle: &dyn ProblemOracle,
    optimum: (f64, f64),
    weight: f64,
) -> Result<Vec<f64>> {
    let best = mv_value(optimum.0, optimum.1, weight);
    trace
        .records
        .iter()
        .map(|r| {
            let f = oracle
                .true_objective(&r.x)
                .ok_or_else(|| Error::invalid("oracle does not expose a true objective"))?;
            let v = oracle
                .true_noise_var(&r.x)
                .ok_or_else(|| Error::invalid("oracle does not expose a true noise variance"))?;
            Ok(mv_value(f, v, weight) - best)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Algorithm {
    Ragoose,
    Goose,
    Cbo,
}

impl Algorithm {
    fn name(&self) -> &'static str {
        match self {
            Algorithm::Ragoose => "ragoose",
            Algorithm::Goose => "goose",
            Algorithm::Cbo => "cbo",
        }
    }
}

/// Shared per-run surrogate datasets.
struct Datasets {
    inputs: Vec<DVector<f64>>,
    y_means: Vec<f64>,
    s2s: Vec<f64>,
    ms: Vec<f64>,
}

impl Datasets {
    fn push(&mut self, x: DVector<f64>, y: f64, s2: f64, m: f64) {
        self.inputs.push(x);
        self.y_means.push(y);
        self.s2s.push(s2);
        self.ms.push(m);
    }

    fn running_mean_s2(&self) -> f64 {
        let n = self.s2s.len().max(1);
        (self.s2s.iter().sum::<f64>() / n as f64).max(1e-12)
    }
}

fn run_loop(
    problem: &ProblemDefinition,
    settings: &RunSettings,
    algorithm: Algorithm,
) -> Result<RunTrace> {
    settings.validate(problem)?;
    let risk = match algorithm {
        // The risk-neutral baselines fix α = 0 regardless of the setting.
        Algorithm::Goose | Algorithm::Cbo => RiskConfig {
            alpha: 0.0,
            ..settings.risk.clone()
        },
        Algorithm::Ragoose => settings.risk.clone(),
    };
    let epsilon = problem.epsilon();
    let threshold = problem.threshold;

    let mut datasets = Datasets {
        inputs: Vec::new(),
        y_means: Vec::new(),
        s2s: Vec::new(),
        ms: Vec::new(),
    };
    let mut f_cfg = settings.gp.f_kernel.clone();
    let mut q_cfg = settings.gp.q_kernel.clone();
    let mut var_cfg = settings.gp.var_kernel.clone();
    let mut eval_rng = ChaCha8Rng::seed_from_u64(settings.seed);
    eval_rng.set_stream(0);
    let mut tune_rng = ChaCha8Rng::seed_from_u64(settings.seed);
    tune_rng.set_stream(2);
    let mut fallback_count = 0usize;

    let evaluate = |x: &DVector<f64>, rng: &mut ChaCha8Rng| -> Result<(f64, f64, f64)> {
        let batch = problem.oracle.evaluate_batch(x, risk.k, rng)?;
        let (y, s2) = aggregate(&batch)?;
        Ok((y, s2, batch.constraint))
    };

    // Seed datasets: one aggregated evaluation per safe-seed point.
    for seed_x in &problem.seeds {
        let (y, s2, m) = evaluate(seed_x, &mut eval_rng)?;
        datasets.push(seed_x.clone(), y, s2, m);
    }

    // Lowest observed seed mean; the stable fallback recommendation.
    let fallback_rec = {
        let mut best = 0usize;
        for i in 1..problem.seeds.len() {
            if datasets.y_means[i] < datasets.y_means[best] {
                best = i;
            }
        }
        problem.seeds[best].clone()
    };

    let mut records: Vec<EvaluationRecord> = Vec::with_capacity(settings.iterations);
    let mut recommendations: Vec<DVector<f64>> = Vec::with_capacity(settings.iterations);
    let mut x_opt: Option<DVector<f64>> = None;
    let mut x_opt_value = f64::NAN;
    // The optimum candidate is recomputed on the first iteration and whenever
    // the previous query consumed it (optimum query) or was a fallback.
    let mut recompute_opt = true;

    for t in 1..=settings.iterations {
        let n = datasets.inputs.len();
        let tune_due = settings
            .tune
            .as_ref()
            .map(|p| (t - 1) % p.every == 0 && n >= 2)
            .unwrap_or(false);

        // Variance surrogate first: it feeds the objective GP's noise
        // schedule.  The risk-neutral baselines never read it, so they skip
        // straight to an empty prior model.
        let var_model = if matches!(algorithm, Algorithm::Ragoose) {
            let var_train = TrainingSet::new(
                datasets.inputs.clone(),
                datasets.s2s.clone(),
                vec![settings.gp.var_noise_var; n],
            );
            if tune_due {
                let policy = settings.tune.as_ref().expect("tune_due implies policy");
                var_cfg =
                    tune_hyperparameters(&var_train, &policy.var_bounds, &var_cfg, &mut tune_rng)?
                        .config;
            }
            fit(var_train, var_cfg.clone())?
        } else {
            fit(TrainingSet::empty(), var_cfg.clone())?
        };

        let f_noise: Vec<f64> = match algorithm {
            Algorithm::Ragoose => noise_schedule(
                &var_model,
                &datasets.inputs,
                risk.k,
                risk.beta_var,
                risk.var_floor,
            )?,
            // Homoscedastic baselines: running mean of observed sample
            // variances.
            Algorithm::Goose | Algorithm::Cbo => vec![datasets.running_mean_s2(); n],
        };
        let f_train = TrainingSet::new(
            datasets.inputs.clone(),
            datasets.y_means.clone(),
            f_noise,
        );
        let q_train = TrainingSet::new(
            datasets.inputs.clone(),
            datasets.ms.clone(),
            vec![settings.gp.q_noise_var; n],
        );
        if tune_due {
            let policy = settings.tune.as_ref().expect("tune_due implies policy");
            f_cfg = tune_hyperparameters(&f_train, &policy.f_bounds, &f_cfg, &mut tune_rng)?.config;
            q_cfg = tune_hyperparameters(&q_train, &policy.q_bounds, &q_cfg, &mut tune_rng)?.config;
        }
        let f_model = fit(f_train, f_cfg.clone())?;
        let q_model = fit(q_train, q_cfg.clone())?;

        let steps = discretization_step(&q_cfg);
        let domain = DiscretizedDomain::new(problem.bounds.clone(), steps, settings.cell_budget)?;

        let (x_t, role, acq_value, ucb_q_at_decision, expander_member) = match algorithm {
            Algorithm::Cbo => {
                // Feasible incumbent (lowest mean with m <= c), else lowest
                // mean overall.
                let feasible_min = datasets
                    .y_means
                    .iter()
                    .zip(&datasets.ms)
                    .filter(|(_, m)| **m <= threshold)
                    .map(|(y, _)| *y)
                    .fold(f64::INFINITY, f64::min);
                let incumbent = if feasible_min.is_finite() {
                    feasible_min
                } else {
                    datasets.y_means.iter().copied().fold(f64::INFINITY, f64::min)
                };
                let centers = domain.centers();
                let mut best = (f64::NEG_INFINITY, 0usize);
                for (i, c) in centers.iter().enumerate() {
                    let v = crate::acquisition::constrained_ei(
                        &f_model, &q_model, incumbent, threshold, c,
                    )?;
                    if v > best.0 {
                        best = (v, i);
                    }
                }
                (
                    domain.cell_center(best.1),
                    QueryRole::Optimum,
                    best.0,
                    None,
                    None,
                )
            }
            Algorithm::Ragoose | Algorithm::Goose => {
                let region =
                    SafeRegion::build(&q_model, &domain, risk.beta_q, threshold, epsilon, t)?;
                if region.safe_count() == 0 {
                    let seed_x = problem.seeds[fallback_count % problem.seeds.len()].clone();
                    fallback_count += 1;
                    recompute_opt = true;
                    x_opt = None;
                    (seed_x, QueryRole::Fallback, f64::NAN, None, None)
                } else {
                    let ctx = AcquisitionContext {
                        f_model: &f_model,
                        var_model: &var_model,
                        q_model: &q_model,
                        risk: &risk,
                        region: &region,
                        domain: &domain,
                        threshold,
                        epsilon,
                    };
                    if recompute_opt || x_opt.is_none() {
                        let pso_cfg = PsoConfig {
                            seed: pso_seed(settings.seed, t),
                            ..settings.pso.clone()
                        };
                        let (xo, vo) = pso_minimize(|x| rahbo_acq(&ctx, x), &ctx, &pso_cfg)?;
                        x_opt = Some(xo);
                        x_opt_value = vo;
                        recompute_opt = false;
                    }
                    let xo = x_opt.clone().expect("x_opt computed above");
                    let ucb_q = q_model.ucb(&xo, risk.beta_q)?;
                    if ucb_q <= threshold {
                        recompute_opt = true;
                        (xo, QueryRole::Optimum, x_opt_value, Some(ucb_q), None)
                    } else {
                        match select_expander(
                            &region.expanders,
                            &domain,
                            &q_model,
                            &xo,
                            risk.beta_q,
                            epsilon,
                            threshold,
                        )? {
                            Some(cell) => {
                                let xe = domain.cell_center(cell);
                                let member = region.expanders.contains(&cell);
                                let acq = rahbo_acq(&ctx, &xe)?;
                                (xe, QueryRole::Expander, acq, None, Some(member))
                            }
                            None => {
                                let seed_x =
                                    problem.seeds[fallback_count % problem.seeds.len()].clone();
                                fallback_count += 1;
                                recompute_opt = true;
                                x_opt = None;
                                (seed_x, QueryRole::Fallback, f64::NAN, None, None)
                            }
                        }
                    }
                }
            }
        };

        let (y, s2, m) = evaluate(&x_t, &mut eval_rng)?;
        let violation = m > threshold;
        records.push(EvaluationRecord {
            t,
            x: x_t.clone(),
            y_mean: y,
            s2,
            m,
            role,
            violation,
            acq_value,
            ucb_q_at_decision,
            expander_member,
        });

        // Per-iteration recommendation from this iteration's models.
        let rec = match algorithm {
            Algorithm::Cbo => {
                let mut best: Option<(f64, usize)> = None;
                for (i, (y, m)) in datasets.y_means.iter().zip(&datasets.ms).enumerate() {
                    if *m <= threshold && best.map_or(true, |(by, _)| *y < by) {
                        best = Some((*y, i));
                    }
                }
                match best {
                    Some((_, i)) => datasets.inputs[i].clone(),
                    None => fallback_rec.clone(),
                }
            }
            Algorithm::Ragoose | Algorithm::Goose => {
                let mask =
                    crate::safety::classify_safe(&q_model, &domain, risk.beta_q, threshold)?;
                match recommend(
                    &f_model,
                    &var_model,
                    &mask,
                    &domain,
                    risk.alpha,
                    risk.beta_f,
                    risk.beta_var,
                )? {
                    Some(x) => x,
                    None => fallback_rec.clone(),
                }
            }
        };
        recommendations.push(rec);

        datasets.push(x_t, y, s2, m);
    }

    let final_x = recommendations
        .last()
        .cloned()
        .unwrap_or_else(|| fallback_rec.clone());
    Ok(RunTrace {
        algorithm: algorithm.name().to_string(),
        problem: problem.name.clone(),
        seed: settings.seed,
        records,
        recommendations,
        final_x,
    })
}

/// Derive the per-iteration PSO seed from the run seed.
fn pso_seed(run_seed: u64, t: usize) -> u64 {
    run_seed ^ (t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Risk-averse safe optimization loop.
pub fn ragoose_run(problem: &ProblemDefinition, settings: &RunSettings) -> Result<RunTrace> {
    run_loop(problem, settings, Algorithm::Ragoose)
}

/// Risk-neutral safe baseline: `α = 0` and a homoscedastic noise model for
/// the objective GP (running mean of observed sample variances).
pub fn goose_run(problem: &ProblemDefinition, settings: &RunSettings) -> Result<RunTrace> {
    run_loop(problem, settings, Algorithm::Goose)
}

/// Constrained-BO baseline: expected improvement times feasibility
/// probability, maximized over the full domain grid without a safe set.
pub fn cbo_run(problem: &ProblemDefinition, settings: &RunSettings) -> Result<RunTrace> {
    run_loop(problem, settings, Algorithm::Cbo)
}

/// CSV header for a trace of dimension `dim`.
pub fn trace_csv_header(dim: usize) -> String {
    let xs: Vec<String> = (1..=dim).map(|d| format!("x{d}")).collect();
    format!(
        "rep,t,{},y_mean,s2,m,role,violation,acq_value,recommended",
        xs.join(",")
    )
}

/// One CSV row per iteration.  The `recommended` flag marks rows whose query
/// coincides with that iteration's recommendation.
pub fn trace_to_csv(trace: &RunTrace, rep: usize) -> String {
    let mut out = String::new();
    out.push_str(&trace_csv_header(trace.dim()));
    out.push('\n');
    for (rec, recommendation) in trace.records.iter().zip(&trace.recommendations) {
        let xs: Vec<String> = rec.x.iter().map(|v| format!("{v}")).collect();
        let recommended = (rec.x == *recommendation) as u8;
        out.push_str(&format!(
            "{rep},{t},{xs},{y},{s2},{m},{role},{viol},{acq},{recommended}\n",
            t = rec.t,
            xs = xs.join(","),
            y = rec.y_mean,
            s2 = rec.s2,
            m = rec.m,
            role = rec.role,
            viol = rec.violation as u8,
            acq = rec.acq_value,
        ));
    }
    out
}

/// A parsed trace CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub rep: usize,
    pub t: usize,
    pub x: Vec<f64>,
    pub y_mean: f64,
    pub s2: f64,
    pub m: f64,
    pub role: QueryRole,
    pub violation: bool,
    pub acq_value: f64,
    pub recommended: bool,
}

/// Parse a trace CSV produced by [`trace_to_csv`].
pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceRow>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::invalid("empty trace CSV"))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 10 || cols[0] != "rep" || cols[1] != "t" {
        return Err(Error::invalid("unrecognized trace CSV header"));
    }
    let dim = cols.len() - 9;
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(Error::invalid(format!(
                "trace CSV line {} has {} fields, expected {}",
                lineno + 2,
                fields.len(),
                cols.len()
            )));
        }
        let parse_f = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|e| Error::invalid(format!("bad float {s:?}: {e}")))
        };
        let parse_u = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|e| Error::invalid(format!("bad integer {s:?}: {e}")))
        };
        rows.push(TraceRow {
            rep: parse_u(fields[0])?,
            t: parse_u(fields[1])?,
            x: fields[2..2 + dim]
                .iter()
                .map(|s| parse_f(s))
                .collect::<Result<_>>()?,
            y_mean: parse_f(fields[2 + dim])?,
            s2: parse_f(fields[3 + dim])?,
            m: parse_f(fields[4 + dim])?,
            role: QueryRole::parse(fields[5 + dim])?,
            violation: fields[6 + dim] == "1",
            acq_value: parse_f(fields[7 + dim])?,
            recommended: fields[8 + dim] == "1",
        });
    }
    Ok(rows)
}
