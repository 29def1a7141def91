//! Gaussian-process regression with per-observation noise variances.
//!
//! The posterior mean and variance are computed from a Cholesky factorization
//! of `K + Σ`, where `Σ` is the diagonal of per-point noise variances.  The
//! prior is a constant mean `μ0` with covariance `λ⁻¹κ` for an RBF kernel
//! `κ`; `λ = 0` is treated as "no prior scaling" (`λ⁻¹ = 1`).

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};

/// RBF kernel hyperparameters plus the constant prior.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelConfig {
    /// Signal standard deviation `σ_n` (output units).
    pub signal_std: f64,
    /// One lengthscale per input dimension (input units).
    pub lengthscales: Vec<f64>,
    /// Constant prior mean `μ0` (output units).
    pub prior_mean: f64,
    /// Prior scale `λ`; the prior covariance is `λ⁻¹κ` and `λ = 0` means
    /// `λ⁻¹ = 1`.
    pub prior_scale: f64,
}

impl KernelConfig {
    pub fn new(signal_std: f64, lengthscales: Vec<f64>, prior_mean: f64, prior_scale: f64) -> Self {
        Self {
            signal_std,
            lengthscales,
            prior_mean,
            prior_scale,
        }
    }

    pub fn dim(&self) -> usize {
        self.lengthscales.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.signal_std > 0.0) || !self.signal_std.is_finite() {
            return Err(Error::invalid("signal_std must be positive and finite"));
        }
        if self.lengthscales.is_empty() {
            return Err(Error::invalid("at least one lengthscale is required"));
        }
        if self.lengthscales.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
            return Err(Error::invalid("lengthscales must be positive and finite"));
        }
        if !(self.prior_scale >= 0.0) || !self.prior_scale.is_finite() {
            return Err(Error::invalid("prior_scale must be non-negative and finite"));
        }
        if !self.prior_mean.is_finite() {
            return Err(Error::invalid("prior_mean must be finite"));
        }
        Ok(())
    }

    /// `λ⁻¹`, with the `λ = 0` substitution.
    pub fn inv_prior_scale(&self) -> f64 {
        if self.prior_scale == 0.0 {
            1.0
        } else {
            1.0 / self.prior_scale
        }
    }

    /// Prior variance `λ⁻¹ σ_n²` of the zero-data posterior.
    pub fn prior_variance(&self) -> f64 {
        self.inv_prior_scale() * self.signal_std * self.signal_std
    }
}

/// RBF kernel value `σ_n² exp(−½ Σ_d ((x_d−x'_d)/ℓ_d)²)`.
///
/// The prior-scale factor `λ⁻¹` is applied where the kernel is used as prior
/// covariance, not here.
pub fn rbf_kernel(x: &DVector<f64>, x2: &DVector<f64>, cfg: &KernelConfig) -> Result<f64> {
    if x.len() != cfg.dim() || x2.len() != cfg.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: kernel expects {}, got {} and {}",
            cfg.dim(),
            x.len(),
            x2.len()
        )));
    }
    let mut sq = 0.0;
    for d in 0..x.len() {
        let z = (x[d] - x2[d]) / cfg.lengthscales[d];
        sq += z * z;
    }
    Ok(cfg.signal_std * cfg.signal_std * (-0.5 * sq).exp())
}

/// Inputs, targets and the diagonal of per-point noise variances.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingSet {
    pub inputs: Vec<DVector<f64>>,
    pub targets: Vec<f64>,
    pub noise_vars: Vec<f64>,
}

impl TrainingSet {
    pub fn new(inputs: Vec<DVector<f64>>, targets: Vec<f64>, noise_vars: Vec<f64>) -> Self {
        Self {
            inputs,
            targets,
            noise_vars,
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn push(&mut self, x: DVector<f64>, y: f64, noise_var: f64) {
        self.inputs.push(x);
        self.targets.push(y);
        self.noise_vars.push(noise_var);
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.targets.len() != self.len() || self.noise_vars.len() != self.len() {
            return Err(Error::invalid(
                "inputs, targets and noise_vars must have equal length",
            ));
        }
        if self.inputs.iter().any(|x| x.len() != dim) {
            return Err(Error::invalid("training input dimension mismatch"));
        }
        if self
            .noise_vars
            .iter()
            .any(|v| !v.is_finite() || *v < 0.0)
        {
            return Err(Error::invalid("noise variances must be finite and >= 0"));
        }
        if self.targets.iter().any(|y| !y.is_finite()) {
            return Err(Error::invalid("targets must be finite"));
        }
        Ok(())
    }
}

/// A fitted GP: kernel configuration, data and the cached factorization.
#[derive(Debug, Clone)]
pub struct GpModel {
    cfg: KernelConfig,
    train: TrainingSet,
    /// Lower Cholesky factor of `λ⁻¹K + Σ + jitter·I` (empty when n = 0).
    chol_l: DMatrix<f64>,
    /// Solved weights `(λ⁻¹K + Σ)⁻¹ (y − μ0)`.
    weights: DVector<f64>,
}

const JITTER_START: f64 = 1e-10;
const JITTER_MAX: f64 = 1e-4;

fn covariance_matrix(train: &TrainingSet, cfg: &KernelConfig) -> Result<DMatrix<f64>> {
    let n = train.len();
    let inv_scale = cfg.inv_prior_scale();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = inv_scale * rbf_kernel(&train.inputs[i], &train.inputs[j], cfg)?;
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    for i in 0..n {
        k[(i, i)] += train.noise_vars[i];
    }
    Ok(k)
}

/// Factorize `K + Σ` with jitter escalation; returns the lower factor and the
/// jitter that succeeded.  The clean matrix is attempted first so that exact
/// noiseless interpolation stays exact.
fn factorize(base: &DMatrix<f64>, sigma_n: f64) -> Result<(DMatrix<f64>, f64)> {
    let var = sigma_n * sigma_n;
    let mut jitter = 0.0;
    loop {
        let mut m = base.clone();
        if jitter > 0.0 {
            for i in 0..m.nrows() {
                m[(i, i)] += jitter * var;
            }
        }
        if let Some(chol) = m.cholesky() {
            return Ok((chol.unpack(), jitter));
        }
        jitter = if jitter == 0.0 { JITTER_START } else { jitter * 10.0 };
        if jitter > JITTER_MAX * 1.0001 {
            return Err(Error::numerical(format!(
                "Cholesky factorization failed for n = {} even with jitter {:.1e}·σ_n² \
                 (σ_n = {:.3e}); the covariance matrix is not numerically SPD",
                base.nrows(),
                JITTER_MAX,
                sigma_n
            )));
        }
    }
}

fn solve_chol(l: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    let mut z = rhs.clone();
    l.solve_lower_triangular_mut(&mut z);
    l.tr_solve_lower_triangular_mut(&mut z);
    z
}

/// Fit a GP on the training set.  An empty set is legal and yields the prior.
pub fn fit(train: TrainingSet, cfg: KernelConfig) -> Result<GpModel> {
    cfg.validate()?;
    train.validate(cfg.dim())?;
    let n = train.len();
    if n == 0 {
        return Ok(GpModel {
            cfg,
            train,
            chol_l: DMatrix::zeros(0, 0),
            weights: DVector::zeros(0),
        });
    }
    let k = covariance_matrix(&train, &cfg)?;
    let (l, _jitter) = factorize(&k, cfg.signal_std)?;
    let resid0 = DVector::from_iterator(n, train.targets.iter().map(|y| y - cfg.prior_mean));
    let mut weights = solve_chol(&l, &resid0);
    // One step of iterative refinement keeps the weight residual tight even
    // when jitter had to be escalated.
    let r = &resid0 - &k * &weights;
    weights += solve_chol(&l, &r);
    Ok(GpModel {
        cfg,
        train,
        chol_l: l,
        weights,
    })
}

impl GpModel {
    pub fn config(&self) -> &KernelConfig {
        &self.cfg
    }

    pub fn training_set(&self) -> &TrainingSet {
        &self.train
    }

    pub fn len(&self) -> usize {
        self.train.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train.is_empty()
    }

    fn check_query(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.cfg.dim() {
            return Err(Error::invalid(format!(
                "query dimension {} does not match model dimension {}",
                x.len(),
                self.cfg.dim()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("query point must be finite"));
        }
        Ok(())
    }

    /// Scaled cross-covariance vector `λ⁻¹ κ_t(x)`.
    fn kappa_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        let inv_scale = self.cfg.inv_prior_scale();
        DVector::from_iterator(
            self.len(),
            self.train
                .inputs
                .iter()
                .map(|xi| inv_scale * rbf_kernel(x, xi, &self.cfg).expect("dims checked")),
        )
    }

    /// Posterior mean `μ0 + κ_t(x)ᵀ (K+Σ)⁻¹ (y − μ0)`.
    pub fn predict_mean(&self, x: &DVector<f64>) -> Result<f64> {
        self.check_query(x)?;
        if self.is_empty() {
            return Ok(self.cfg.prior_mean);
        }
        Ok(self.cfg.prior_mean + self.kappa_vec(x).dot(&self.weights))
    }

    /// Posterior variance, clamped at 0 against round-off.
    pub fn predict_var(&self, x: &DVector<f64>) -> Result<f64> {
        self.check_query(x)?;
        let prior = self.cfg.prior_variance();
        if self.is_empty() {
            return Ok(prior);
        }
        let mut v = self.kappa_vec(x);
        self.chol_l.solve_lower_triangular_mut(&mut v);
        Ok((prior - v.norm_squared()).max(0.0))
    }

    /// `(μ − βσ, μ + βσ)`.
    pub fn confidence_bounds(&self, x: &DVector<f64>, beta: f64) -> Result<(f64, f64)> {
        if !(beta >= 0.0) {
            return Err(Error::invalid("beta must be non-negative"));
        }
        let mu = self.predict_mean(x)?;
        let half = beta * self.predict_var(x)?.sqrt();
        Ok((mu - half, mu + half))
    }

    pub fn lcb(&self, x: &DVector<f64>, beta: f64) -> Result<f64> {
        Ok(self.confidence_bounds(x, beta)?.0)
    }

    pub fn ucb(&self, x: &DVector<f64>, beta: f64) -> Result<f64> {
        Ok(self.confidence_bounds(x, beta)?.1)
    }

    /// Analytic gradient of the posterior mean.
    ///
    /// For the RBF kernel, `∂κ(x,xᵢ)/∂x_d = κ(x,xᵢ)·(xᵢ_d − x_d)/ℓ_d²`, so the
    /// gradient is a weighted sum over training points.
    pub fn posterior_mean_gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_query(x)?;
        let d = self.cfg.dim();
        let mut grad = DVector::zeros(d);
        if self.is_empty() {
            return Ok(grad);
        }
        let kappa = self.kappa_vec(x);
        for (i, xi) in self.train.inputs.iter().enumerate() {
            let wk = self.weights[i] * kappa[i];
            for dd in 0..d {
                let l = self.cfg.lengthscales[dd];
                grad[dd] += wk * (xi[dd] - x[dd]) / (l * l);
            }
        }
        Ok(grad)
    }

    /// Posterior mean and variance for a batch of points.
    ///
    /// One triangular solve over an `n × m` right-hand side instead of `m`
    /// separate solves; used by the grid classification and PSO hot paths.
    pub fn predict_many(&self, xs: &[DVector<f64>]) -> Result<Vec<(f64, f64)>> {
        let prior = self.cfg.prior_variance();
        if self.is_empty() {
            return Ok(xs.iter().map(|_| (self.cfg.prior_mean, prior)).collect());
        }
        let n = self.len();
        let m = xs.len();
        let inv_scale = self.cfg.inv_prior_scale();
        let mut kmat = DMatrix::zeros(n, m);
        for (j, x) in xs.iter().enumerate() {
            self.check_query(x)?;
            for i in 0..n {
                kmat[(i, j)] =
                    inv_scale * rbf_kernel(x, &self.train.inputs[i], &self.cfg)?;
            }
        }
        let mut out = Vec::with_capacity(m);
        let mut solved = kmat.clone();
        self.chol_l.solve_lower_triangular_mut(&mut solved);
        for j in 0..m {
            let mean = self.cfg.prior_mean + kmat.column(j).dot(&self.weights);
            let var = (prior - solved.column(j).norm_squared()).max(0.0);
            out.push((mean, var));
        }
        Ok(out)
    }
}

/// Negative log marginal likelihood
/// `½(y−μ0)ᵀ(K+Σ)⁻¹(y−μ0) + ½ log det(K+Σ) + (n/2) log 2π`.
pub fn nlml(train: &TrainingSet, cfg: &KernelConfig) -> Result<f64> {
    cfg.validate()?;
    train.validate(cfg.dim())?;
    let n = train.len();
    if n == 0 {
        return Err(Error::invalid("nlml requires at least one observation"));
    }
    let k = covariance_matrix(train, cfg)?;
    let (l, _) = factorize(&k, cfg.signal_std)?;
    let resid = DVector::from_iterator(n, train.targets.iter().map(|y| y - cfg.prior_mean));
    let mut z = resid;
    l.solve_lower_triangular_mut(&mut z);
    let quad = 0.5 * z.norm_squared();
    let logdet: f64 = (0..n).map(|i| l[(i, i)].ln()).sum::<f64>() * 2.0;
    Ok(quad + 0.5 * logdet + 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln())
}

/// Box bounds for hyperparameter tuning over `(σ_n, ℓ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TuneBounds {
    pub signal_std: (f64, f64),
    pub lengthscales: Vec<(f64, f64)>,
}

impl TuneBounds {
    pub fn validate(&self, dim: usize) -> Result<()> {
        let ok = |(lo, hi): (f64, f64)| lo > 0.0 && hi >= lo && hi.is_finite();
        if !ok(self.signal_std) {
            return Err(Error::invalid("signal_std bounds must satisfy 0 < lo <= hi"));
        }
        if self.lengthscales.len() != dim {
            return Err(Error::invalid("one lengthscale bound per dimension required"));
        }
        if !self.lengthscales.iter().copied().all(ok) {
            return Err(Error::invalid("lengthscale bounds must satisfy 0 < lo <= hi"));
        }
        Ok(())
    }
}

/// Result of hyperparameter tuning; `fallback` is set when every search
/// evaluation failed and `cfg0` was returned unchanged.
#[derive(Debug, Clone)]
pub struct TuneOutcome {
    pub config: KernelConfig,
    pub fallback: bool,
}

const TUNE_STARTS: usize = 8;
const TUNE_EVALS_PER_START: usize = 10;
const TUNE_STEP0: f64 = 0.8;
const TUNE_STEP_MIN: f64 = 0.03;
/// A random start whose first evaluation lies this far (in nats) above the
/// best value seen so far is not searched further.
const TUNE_PRUNE_MARGIN: f64 = 10.0;

/// Evaluator that caches the unit-variance correlation matrix `E(ℓ)` so that
/// signal-std moves at fixed lengthscales avoid recomputing `exp`.
struct NlmlEvaluator<'a> {
    train: &'a TrainingSet,
    prior_mean: f64,
    prior_scale: f64,
    /// Per-dimension squared coordinate differences.
    sq_diffs: Vec<DMatrix<f64>>,
    cached_ls: Vec<f64>,
    cached_e: DMatrix<f64>,
}

impl<'a> NlmlEvaluator<'a> {
    fn new(train: &'a TrainingSet, prior_mean: f64, prior_scale: f64, dim: usize) -> Self {
        let n = train.len();
        let sq_diffs = (0..dim)
            .map(|d| {
                DMatrix::from_fn(n, n, |i, j| {
                    let z = train.inputs[i][d] - train.inputs[j][d];
                    z * z
                })
            })
            .collect();
        Self {
            train,
            prior_mean,
            prior_scale,
            sq_diffs,
            cached_ls: Vec::new(),
            cached_e: DMatrix::zeros(0, 0),
        }
    }

    fn correlation(&mut self, ls: &[f64]) -> &DMatrix<f64> {
        if self.cached_ls != ls {
            let n = self.train.len();
            let mut s: DMatrix<f64> = DMatrix::zeros(n, n);
            for (d, l) in ls.iter().enumerate() {
                let w = -0.5 / (l * l);
                s.zip_apply(&self.sq_diffs[d], |acc: &mut f64, sq: f64| *acc += w * sq);
            }
            s.apply(|v: &mut f64| *v = v.exp());
            self.cached_e = s;
            self.cached_ls = ls.to_vec();
        }
        &self.cached_e
    }

    fn eval(&mut self, sigma: f64, ls: &[f64]) -> Result<f64> {
        let n = self.train.len();
        let inv_scale = if self.prior_scale == 0.0 {
            1.0
        } else {
            1.0 / self.prior_scale
        };
        let amp = inv_scale * sigma * sigma;
        let e = self.correlation(ls).clone();
        let mut k = e * amp;
        for i in 0..n {
            k[(i, i)] += self.train.noise_vars[i];
        }
        let (l, _) = factorize(&k, sigma)?;
        let resid = DVector::from_iterator(
            n,
            self.train.targets.iter().map(|y| y - self.prior_mean),
        );
        let mut z = resid;
        l.solve_lower_triangular_mut(&mut z);
        let quad = 0.5 * z.norm_squared();
        let logdet: f64 = (0..n).map(|i| l[(i, i)].ln()).sum::<f64>() * 2.0;
        Ok(quad + 0.5 * logdet + 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln())
    }
}

/// Multi-start coordinate search over `(σ_n, ℓ)` in log space, minimizing the
/// negative log marginal likelihood.  `μ0` and `λ` are held fixed.  The result
/// is never worse than `cfg0` (clamped into the bounds).
pub fn tune_hyperparameters(
    train: &TrainingSet,
    bounds: &TuneBounds,
    cfg0: &KernelConfig,
    rng: &mut impl Rng,
) -> Result<TuneOutcome> {
    cfg0.validate()?;
    let dim = cfg0.dim();
    bounds.validate(dim)?;
    train.validate(dim)?;
    if train.len() < 2 {
        return Err(Error::invalid("tuning requires at least two observations"));
    }

    let lo: Vec<f64> = std::iter::once(bounds.signal_std.0)
        .chain(bounds.lengthscales.iter().map(|b| b.0))
        .map(f64::ln)
        .collect();
    let hi: Vec<f64> = std::iter::once(bounds.signal_std.1)
        .chain(bounds.lengthscales.iter().map(|b| b.1))
        .map(f64::ln)
        .collect();
    let clamp = |p: &mut Vec<f64>| {
        for i in 0..p.len() {
            p[i] = p[i].clamp(lo[i], hi[i]);
        }
    };

    let mut evaluator = NlmlEvaluator::new(train, cfg0.prior_mean, cfg0.prior_scale, dim);
    let eval_point = |p: &[f64], ev: &mut NlmlEvaluator| -> Option<f64> {
        let sigma = p[0].exp();
        let ls: Vec<f64> = p[1..].iter().map(|v| v.exp()).collect();
        ev.eval(sigma, &ls).ok()
    };

    let mut start0: Vec<f64> = std::iter::once(cfg0.signal_std)
        .chain(cfg0.lengthscales.iter().copied())
        .map(f64::ln)
        .collect();
    clamp(&mut start0);

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut any_ok = false;

    for s in 0..TUNE_STARTS {
        let mut p = if s == 0 {
            start0.clone()
        } else {
            let mut q: Vec<f64> = (0..=dim).map(|i| rng.gen_range(lo[i]..=hi[i])).collect();
            clamp(&mut q);
            q
        };
        let mut current = match eval_point(&p, &mut evaluator) {
            Some(v) => v,
            None => continue,
        };
        any_ok = true;
        if let Some((_, bv)) = &best {
            if current > bv + TUNE_PRUNE_MARGIN {
                continue;
            }
        }
        let mut evals = 1usize;
        let mut h = TUNE_STEP0;
        while h >= TUNE_STEP_MIN && evals < TUNE_EVALS_PER_START {
            let mut improved = false;
            'coords: for i in 0..p.len() {
                for dir in [1.0, -1.0] {
                    let cand = (p[i] + dir * h).clamp(lo[i], hi[i]);
                    if cand == p[i] {
                        continue;
                    }
                    let mut q = p.clone();
                    q[i] = cand;
                    evals += 1;
                    if let Some(v) = eval_point(&q, &mut evaluator) {
                        if v < current - 1e-12 {
                            p = q;
                            current = v;
                            improved = true;
                            continue 'coords;
                        }
                    }
                    if evals >= TUNE_EVALS_PER_START {
                        break 'coords;
                    }
                }
            }
            if !improved {
                h *= 0.35;
            }
        }
        match &best {
            Some((_, bv)) if *bv <= current => {}
            _ => best = Some((p, current)),
        }
    }

    if !any_ok {
        return Ok(TuneOutcome {
            config: cfg0.clone(),
            fallback: true,
        });
    }
    let (p, _) = best.expect("at least one start succeeded");
    Ok(TuneOutcome {
        config: KernelConfig {
            signal_std: p[0].exp(),
            lengthscales: p[1..].iter().map(|v| v.exp()).collect(),
            prior_mean: cfg0.prior_mean,
            prior_scale: cfg0.prior_scale,
        },
        fallback: false,
    })
}
