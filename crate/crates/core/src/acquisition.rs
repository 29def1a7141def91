//! Acquisition functions and the particle-swarm optimizer restricted to the
//! safe region.
//!
//! The risk-averse acquisition combines the objective lower confidence bound
//! with a clamped lower confidence bound on the noise variance.  The swarm is
//! seeded on safe grid cells; particles may wander outside, but personal and
//! global bests only update at positions that are either inside the safe mask
//! or certifiable from the nearest expander via the expansion indicator, which
//! is how the optimistic safe set is explored without materializing it.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gp::GpModel;
use crate::risk::RiskConfig;
use crate::safety::{expansion_indicator, normalized_distance, DiscretizedDomain, SafeRegion};

/// Particle-swarm settings.
#[derive(Debug, Clone, PartialEq)]
pub struct PsoConfig {
    pub particles: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Velocity clamp as a fraction of the domain width per dimension.
    pub velocity_clamp: f64,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            particles: 50,
            iterations: 80,
            inertia: 0.72,
            cognitive: 1.49,
            social: 1.49,
            velocity_clamp: 0.2,
            seed: 0,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.particles < 4 {
            return Err(Error::invalid("at least 4 particles required"));
        }
        if self.iterations < 1 {
            return Err(Error::invalid("at least 1 PSO iteration required"));
        }
        if !(self.inertia > 0.0 && self.inertia < 1.0) {
            return Err(Error::invalid("inertia must lie in (0, 1)"));
        }
        if !(self.cognitive > 0.0) || !(self.social > 0.0) {
            return Err(Error::invalid("cognitive and social coefficients must be > 0"));
        }
        if !(self.velocity_clamp > 0.0) {
            return Err(Error::invalid("velocity clamp must be > 0"));
        }
        Ok(())
    }
}

/// Models and safe-set state an acquisition is evaluated against.
pub struct AcquisitionContext<'a> {
    pub f_model: &'a GpModel,
    pub var_model: &'a GpModel,
    pub q_model: &'a GpModel,
    pub risk: &'a RiskConfig,
    pub region: &'a SafeRegion,
    pub domain: &'a DiscretizedDomain,
    pub threshold: f64,
    pub epsilon: f64,
}

/// Risk-averse acquisition `lcb_f(x) + α·max(lcb_var(x), 0)`.
///
/// The variance lcb is clamped at zero so the penalty stays a variance.
pub fn rahbo_acq(ctx: &AcquisitionContext, x: &DVector<f64>) -> Result<f64> {
    let lcb_f = ctx.f_model.lcb(x, ctx.risk.beta_f)?;
    if ctx.risk.alpha == 0.0 {
        return Ok(lcb_f);
    }
    let lcb_var = ctx.var_model.lcb(x, ctx.risk.beta_var)?.max(0.0);
    Ok(lcb_f + ctx.risk.alpha * lcb_var)
}

/// Standard normal pdf.
fn phi(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal cdf via `erfc`.
fn big_phi(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Expected improvement below the incumbent times the probability that the
/// constraint stays below the threshold; a quantity to MAXIMIZE.
pub fn constrained_ei(
    f_model: &GpModel,
    q_model: &GpModel,
    incumbent: f64,
    threshold: f64,
    x: &DVector<f64>,
) -> Result<f64> {
    if !incumbent.is_finite() {
        return Err(Error::invalid("incumbent must be finite"));
    }
    let mu = f_model.predict_mean(x)?;
    let sigma = f_model.predict_var(x)?.sqrt();
    let ei = if sigma <= 1e-300 {
        (incumbent - mu).max(0.0)
    } else {
        let z = ((incumbent - mu) / sigma).clamp(-40.0, 40.0);
        (sigma * (z * big_phi(z) + phi(z))).max(0.0)
    };
    let mu_q = q_model.predict_mean(x)?;
    let sigma_q = q_model.predict_var(x)?.sqrt();
    let feas = if sigma_q <= 1e-300 {
        if mu_q <= threshold {
            1.0
        } else {
            0.0
        }
    } else {
        big_phi(((threshold - mu_q) / sigma_q).clamp(-40.0, 40.0))
    };
    Ok(ei * feas)
}

/// Is a candidate position allowed to update swarm bests?  Either its nearest
/// grid cell is safe, or the nearest expander certifies it.
pub fn position_feasible(ctx: &AcquisitionContext, x: &DVector<f64>) -> Result<bool> {
    if ctx.region.is_safe_cell(ctx.domain.snap(x)) {
        return Ok(true);
    }
    let ls = &ctx.q_model.config().lengthscales;
    let nearest = ctx
        .region
        .expanders
        .iter()
        .map(|&i| {
            let c = ctx.domain.cell_center(i);
            (normalized_distance(&c, x, ls), i)
        })
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    match nearest {
        Some((_, i)) => expansion_indicator(
            ctx.q_model,
            &ctx.domain.cell_center(i),
            x,
            ctx.risk.beta_q,
            ctx.epsilon,
            ctx.threshold,
        ),
        None => Ok(false),
    }
}

/// Minimize an objective over the safe and optimistically-safe region.
///
/// Deterministic for a fixed seed: particles are updated in index order and
/// the best-update reduction is sequential.
pub fn pso_minimize(
    objective: impl Fn(&DVector<f64>) -> Result<f64>,
    ctx: &AcquisitionContext,
    pso: &PsoConfig,
) -> Result<(DVector<f64>, f64)> {
    pso.validate()?;
    let safe_cells = ctx.region.safe_cells();
    if safe_cells.is_empty() {
        return Err(Error::Infeasible(
            "PSO requires at least one safe cell".into(),
        ));
    }
    let dim = ctx.domain.dim();
    let bounds = ctx.domain.bounds();
    let widths: Vec<f64> = bounds.iter().map(|(lo, hi)| (hi - lo).max(1e-300)).collect();
    let vmax: Vec<f64> = widths.iter().map(|w| w * pso.velocity_clamp).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(pso.seed);

    let mut xs: Vec<DVector<f64>> = Vec::with_capacity(pso.particles);
    let mut vs: Vec<DVector<f64>> = Vec::with_capacity(pso.particles);
    for _ in 0..pso.particles {
        let cell = safe_cells[rng.gen_range(0..safe_cells.len())];
        xs.push(ctx.domain.cell_center(cell));
        vs.push(DVector::from_fn(dim, |d, _| {
            (rng.gen::<f64>() * 2.0 - 1.0) * vmax[d]
        }));
    }

    let mut pbest = xs.clone();
    let mut pbest_val: Vec<f64> = Vec::with_capacity(pso.particles);
    for x in &xs {
        pbest_val.push(objective(x)?);
    }
    let mut gbest_idx = 0usize;
    for i in 1..pso.particles {
        if pbest_val[i] < pbest_val[gbest_idx] {
            gbest_idx = i;
        }
    }
    let mut gbest = pbest[gbest_idx].clone();
    let mut gbest_val = pbest_val[gbest_idx];

    for _ in 0..pso.iterations {
        for i in 0..pso.particles {
            for d in 0..dim {
                let r1 = rng.gen::<f64>();
                let r2 = rng.gen::<f64>();
                let v = pso.inertia * vs[i][d]
                    + pso.cognitive * r1 * (pbest[i][d] - xs[i][d])
                    + pso.social * r2 * (gbest[d] - xs[i][d]);
                vs[i][d] = v.clamp(-vmax[d], vmax[d]);
                xs[i][d] = (xs[i][d] + vs[i][d]).clamp(bounds[d].0, bounds[d].1);
            }
            let val = objective(&xs[i])?;
            if val < pbest_val[i] && position_feasible(ctx, &xs[i])? {
                pbest[i] = xs[i].clone();
                pbest_val[i] = val;
                if val < gbest_val {
                    gbest = xs[i].clone();
                    gbest_val = val;
                }
            }
        }
    }
    Ok((gbest, gbest_val))
}
