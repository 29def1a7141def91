//! Long-format CSV exports for plotting runs.

use ragoose::error::{Error, Result};
use ragoose::optimizer::{ProblemDefinition, TraceRow};
use ragoose::risk::mv_value;

use crate::runner::mv_optimum;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    CostVsT,
    VarVsT,
    RegretVsT,
    MeanVsVarScatter,
}

impl PlotKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "cost-vs-t" => Ok(Self::CostVsT),
            "var-vs-t" => Ok(Self::VarVsT),
            "regret-vs-t" => Ok(Self::RegretVsT),
            "mean-vs-var-scatter" => Ok(Self::MeanVsVarScatter),
            other => Err(Error::invalid(format!(
                "unknown plot kind {other:?} (expected cost-vs-t, var-vs-t, regret-vs-t \
                 or mean-vs-var-scatter)"
            ))),
        }
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn two_se(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    2.0 * (var / n as f64).sqrt()
}

fn per_iteration_stats(
    traces: &[Vec<TraceRow>],
    value: impl Fn(&TraceRow) -> f64,
) -> Vec<(usize, f64, f64)> {
    let t_max = traces.iter().map(Vec::len).min().unwrap_or(0);
    (0..t_max)
        .map(|i| {
            let at_t: Vec<f64> = traces.iter().map(|rows| value(&rows[i])).collect();
            (traces[0][i].t, mean(&at_t), two_se(&at_t))
        })
        .collect()
}

fn series_csv(stats: &[(usize, f64, f64)]) -> String {
    let mut out = String::from("t,statistic,value\n");
    for (t, m, se2) in stats {
        out.push_str(&format!("{t},mean,{m}\n"));
        out.push_str(&format!("{t},2se,{se2}\n"));
    }
    out
}

/// Export plot data for one or more parsed traces of the same run shape.
///
/// `problem` and `weight` are only needed for the regret kind.
pub fn export_plot_data(
    traces: &[Vec<TraceRow>],
    kind: PlotKind,
    problem: Option<&ProblemDefinition>,
    weight: f64,
) -> Result<String> {
    if traces.is_empty() || traces.iter().any(Vec::is_empty) {
        return Err(Error::invalid("plot export requires non-empty traces"));
    }
    match kind {
        PlotKind::CostVsT => Ok(series_csv(&per_iteration_stats(traces, |r| r.y_mean))),
        PlotKind::VarVsT => Ok(series_csv(&per_iteration_stats(traces, |r| r.s2))),
        PlotKind::RegretVsT => {
            let problem = problem.ok_or_else(|| {
                Error::invalid("regret export requires a problem with analytic oracles")
            })?;
            let optimum = mv_optimum(problem, weight).ok_or_else(|| {
                Error::invalid("regret export requires analytic objective/noise/constraint")
            })?;
            let best = mv_value(optimum.0, optimum.1, weight);
            let regret = |row: &TraceRow| -> f64 {
                let x = nalgebra::DVector::from_vec(row.x.clone());
                let f = problem.oracle.true_objective(&x).unwrap_or(f64::NAN);
                let v = problem.oracle.true_noise_var(&x).unwrap_or(f64::NAN);
                mv_value(f, v, weight) - best
            };
            Ok(series_csv(&per_iteration_stats(traces, regret)))
        }
        PlotKind::MeanVsVarScatter => {
            let mut out = String::from("y_mean,s2,color_key\n");
            for rows in traces {
                for r in rows {
                    let color = r.x.last().copied().unwrap_or(f64::NAN);
                    out.push_str(&format!("{},{},{}\n", r.y_mean, r.s2, color));
                }
            }
            Ok(out)
        }
    }
}
