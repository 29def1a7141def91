//! Discretized-domain bookkeeping for safe exploration: the safe set, its
//! boundary, the expander subset and the noisy expansion operator.
//!
//! A cell is safe when the constraint surrogate's upper confidence bound at
//! its center stays below the threshold.  Boundary cells are safe cells with
//! an unsafe axis-neighbor; expanders are boundary cells whose constraint
//! confidence width is still at least `ε`.  The expansion operator certifies
//! a target point from a safe cell via a Lipschitz estimate built from the
//! posterior-mean gradient.

use std::io::Write;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gp::{GpModel, KernelConfig};

/// Default cap on the total number of grid cells.
pub const DEFAULT_CELL_BUDGET: usize = 2_000_000;

/// Axis-aligned grid over a box, indexed row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedDomain {
    bounds: Vec<(f64, f64)>,
    steps: Vec<f64>,
    counts: Vec<usize>,
}

/// Per-dimension grid step from the rule `κ(x, x+Δx e_d)/κ(x,x) = 0.95`,
/// i.e. `Δx_d = ℓ_d √(−2 ln 0.95)`.
pub fn discretization_step(kernel_q: &KernelConfig) -> Vec<f64> {
    let factor = (-2.0 * 0.95f64.ln()).sqrt();
    kernel_q.lengthscales.iter().map(|l| l * factor).collect()
}

impl DiscretizedDomain {
    pub fn new(bounds: Vec<(f64, f64)>, steps: Vec<f64>, budget: usize) -> Result<Self> {
        if bounds.is_empty() || bounds.len() != steps.len() {
            return Err(Error::invalid(
                "bounds and steps must be non-empty and of equal length",
            ));
        }
        for ((lo, hi), dx) in bounds.iter().zip(&steps) {
            if !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::invalid("domain bounds must be finite with hi >= lo"));
            }
            if !(*dx > 0.0) || !dx.is_finite() {
                return Err(Error::invalid("grid steps must be positive"));
            }
        }
        let counts: Vec<usize> = bounds
            .iter()
            .zip(&steps)
            .map(|((lo, hi), dx)| ((hi - lo) / dx).floor() as usize + 1)
            .collect();
        let total: usize = counts
            .iter()
            .try_fold(1usize, |acc, c| acc.checked_mul(*c))
            .ok_or_else(|| Error::invalid("grid size overflows"))?;
        if total > budget {
            return Err(Error::invalid(format!(
                "grid of {total} cells exceeds the budget of {budget}"
            )));
        }
        Ok(Self {
            bounds,
            steps,
            counts,
        })
    }

    pub fn with_default_budget(bounds: Vec<(f64, f64)>, steps: Vec<f64>) -> Result<Self> {
        Self::new(bounds, steps, DEFAULT_CELL_BUDGET)
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    fn coords(&self, index: usize) -> Vec<usize> {
        let mut rem = index;
        let mut out = vec![0usize; self.dim()];
        for d in (0..self.dim()).rev() {
            out[d] = rem % self.counts[d];
            rem /= self.counts[d];
        }
        out
    }

    fn index(&self, coords: &[usize]) -> usize {
        let mut idx = 0usize;
        for d in 0..self.dim() {
            idx = idx * self.counts[d] + coords[d];
        }
        idx
    }

    pub fn cell_center(&self, index: usize) -> DVector<f64> {
        let coords = self.coords(index);
        DVector::from_iterator(
            self.dim(),
            coords
                .iter()
                .enumerate()
                .map(|(d, c)| self.bounds[d].0 + *c as f64 * self.steps[d]),
        )
    }

    pub fn centers(&self) -> Vec<DVector<f64>> {
        (0..self.len()).map(|i| self.cell_center(i)).collect()
    }

    /// Snap a point to the nearest grid cell (clamped into the box).
    pub fn snap(&self, x: &DVector<f64>) -> usize {
        let coords: Vec<usize> = (0..self.dim())
            .map(|d| {
                let rel = (x[d] - self.bounds[d].0) / self.steps[d];
                let c = rel.round();
                (c.max(0.0) as usize).min(self.counts[d] - 1)
            })
            .collect();
        self.index(&coords)
    }

    /// Axis neighbors at exactly one grid step (von Neumann neighborhood).
    pub fn neighbors(&self, index: usize) -> Vec<usize> {
        let coords = self.coords(index);
        let mut out = Vec::with_capacity(2 * self.dim());
        for d in 0..self.dim() {
            if coords[d] > 0 {
                let mut c = coords.clone();
                c[d] -= 1;
                out.push(self.index(&c));
            }
            if coords[d] + 1 < self.counts[d] {
                let mut c = coords.clone();
                c[d] += 1;
                out.push(self.index(&c));
            }
        }
        out
    }
}

/// Euclidean distance in lengthscale-normalized coordinates.
pub fn normalized_distance(a: &DVector<f64>, b: &DVector<f64>, lengthscales: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut sq = 0.0;
    for d in 0..a.len() {
        let z = (a[d] - b[d]) / lengthscales[d];
        sq += z * z;
    }
    sq.sqrt()
}

/// Per-cell safe mask: `ucb_q(center) <= c`.
pub fn classify_safe(
    q_model: &GpModel,
    domain: &DiscretizedDomain,
    beta_q: f64,
    threshold: f64,
) -> Result<Vec<bool>> {
    let centers = domain.centers();
    // Chunked so the batched triangular solves stay cache-friendly while the
    // chunks can run in parallel.
    let chunks: Vec<&[DVector<f64>]> = centers.chunks(256).collect();
    let preds: Vec<Vec<(f64, f64)>> = chunks
        .par_iter()
        .map(|chunk| q_model.predict_many(chunk))
        .collect::<Result<_>>()?;
    Ok(preds
        .into_iter()
        .flatten()
        .map(|(mean, var)| mean + beta_q * var.sqrt() <= threshold)
        .collect())
}

/// Boundary of the safe set: safe cells with at least one unsafe axis
/// neighbor inside the grid.
pub fn boundary(safe_mask: &[bool], domain: &DiscretizedDomain) -> Vec<usize> {
    (0..safe_mask.len())
        .filter(|i| safe_mask[*i] && domain.neighbors(*i).iter().any(|j| !safe_mask[*j]))
        .collect()
}

/// Expander subset of the boundary: cells whose constraint confidence width
/// `ucb − lcb` is at least `ε`.
pub fn expanders(
    boundary_cells: &[usize],
    domain: &DiscretizedDomain,
    q_model: &GpModel,
    beta_q: f64,
    epsilon: f64,
) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for &i in boundary_cells {
        let x = domain.cell_center(i);
        let width = 2.0 * beta_q * q_model.predict_var(&x)?.sqrt();
        if width >= epsilon {
            out.push(i);
        }
    }
    Ok(out)
}

/// Noisy expansion operator: can the safe cell `x_bar` certify the target
/// `x`?  Evaluates `lcb_q(x̄) + ‖∇μ(x̄)‖∞·d(x̄, x) + ε <= c` with the gradient
/// and distance taken in lengthscale-normalized coordinates.
pub fn expansion_indicator(
    q_model: &GpModel,
    x_bar: &DVector<f64>,
    x: &DVector<f64>,
    beta_q: f64,
    epsilon: f64,
    threshold: f64,
) -> Result<bool> {
    let lcb = q_model.lcb(x_bar, beta_q)?;
    let grad = q_model.posterior_mean_gradient(x_bar)?;
    let ls = &q_model.config().lengthscales;
    let grad_norm = (0..grad.len())
        .map(|d| (grad[d] * ls[d]).abs())
        .fold(0.0f64, f64::max);
    let dist = normalized_distance(x_bar, x, ls);
    Ok(lcb + grad_norm * dist + epsilon <= threshold)
}

/// Safe-set snapshot at one iteration.
#[derive(Debug, Clone)]
pub struct SafeRegion {
    pub safe_mask: Vec<bool>,
    pub boundary: Vec<usize>,
    pub expanders: Vec<usize>,
    pub iteration: usize,
}

impl SafeRegion {
    pub fn build(
        q_model: &GpModel,
        domain: &DiscretizedDomain,
        beta_q: f64,
        threshold: f64,
        epsilon: f64,
        iteration: usize,
    ) -> Result<Self> {
        let safe_mask = classify_safe(q_model, domain, beta_q, threshold)?;
        let boundary_cells = boundary(&safe_mask, domain);
        let expander_cells = expanders(&boundary_cells, domain, q_model, beta_q, epsilon)?;
        Ok(Self {
            safe_mask,
            boundary: boundary_cells,
            expanders: expander_cells,
            iteration,
        })
    }

    pub fn safe_count(&self) -> usize {
        self.safe_mask.iter().filter(|s| **s).count()
    }

    pub fn safe_cells(&self) -> Vec<usize> {
        (0..self.safe_mask.len())
            .filter(|i| self.safe_mask[*i])
            .collect()
    }

    pub fn is_safe_cell(&self, index: usize) -> bool {
        self.safe_mask.get(index).copied().unwrap_or(false)
    }

    /// Debug dump: grid coordinates with safe/boundary/expander flags.
    pub fn dump_csv(&self, domain: &DiscretizedDomain, mut w: impl Write) -> std::io::Result<()> {
        let dim = domain.dim();
        let header: Vec<String> = (1..=dim).map(|d| format!("x{d}")).collect();
        writeln!(w, "{},safe,boundary,expander", header.join(","))?;
        for i in 0..self.safe_mask.len() {
            let center = domain.cell_center(i);
            let coords: Vec<String> = center.iter().map(|v| format!("{v}")).collect();
            writeln!(
                w,
                "{},{},{},{}",
                coords.join(","),
                self.safe_mask[i] as u8,
                self.boundary.contains(&i) as u8,
                self.expanders.contains(&i) as u8
            )?;
        }
        Ok(())
    }
}

/// Nearest expander (normalized distance) whose expansion indicator fires
/// toward the target; ties broken by lowest grid index.
pub fn select_expander(
    expander_cells: &[usize],
    domain: &DiscretizedDomain,
    q_model: &GpModel,
    x_target: &DVector<f64>,
    beta_q: f64,
    epsilon: f64,
    threshold: f64,
) -> Result<Option<usize>> {
    let ls = &q_model.config().lengthscales;
    let mut ranked: Vec<(f64, usize)> = expander_cells
        .iter()
        .map(|&i| {
            let c = domain.cell_center(i);
            (normalized_distance(&c, x_target, ls), i)
        })
        .collect();
    ranked.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    for (_, i) in ranked {
        let c = domain.cell_center(i);
        if expansion_indicator(q_model, &c, x_target, beta_q, epsilon, threshold)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}
