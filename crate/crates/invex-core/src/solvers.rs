//! Proximal solvers for `min 0.5 |Hx - b|^2 + lambda g(x)`.
//!
//! Three variants share the same problem and trace types:
//!
//! - [`apg`]: accelerated proximal gradient with an extrapolated candidate,
//!   a plain proximal candidate, and a per-iteration objective comparison
//!   that keeps the trace monotone.
//! - [`folded_pg`]: plain proximal gradient with the sufficient-decrease
//!   margin recorded each iteration.
//! - [`pnp_apg`]: the accelerated scheme with the plain proximal candidate
//!   replaced by an arbitrary denoiser (plug-and-play); the trace records
//!   the fixed-point residual of the denoising operator.
//!
//! All three are deterministic given the problem and config.

use std::time::Instant;

use thiserror::Error;

use crate::linalg::{all_finite, norm2_diff, norm2_diff_sq};
use crate::linops::LinearOperator;
use crate::prox::{prox_vector, prox_vector_into};
use crate::regularizers::Regularizer;
use crate::CoreError;

/// A reconstruction instance: operator, measurements, penalty, weight.
#[derive(Debug, Clone)]
pub struct Problem<H: LinearOperator> {
    op: H,
    b: Vec<f64>,
    reg: Regularizer,
    lambda: f64,
}

impl<H: LinearOperator> Problem<H> {
    pub fn new(op: H, b: Vec<f64>, reg: Regularizer, lambda: f64) -> Result<Self, CoreError> {
        if b.len() != op.out_dim() {
            return Err(CoreError::dimension(format!(
                "operator produces {} outputs but b has {}",
                op.out_dim(),
                b.len()
            )));
        }
        if !all_finite(&b) {
            return Err(CoreError::input("measurement vector must be finite"));
        }
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(CoreError::parameter(format!(
                "lambda must lie in (0,1], got {lambda}"
            )));
        }
        Ok(Problem {
            op,
            b,
            reg,
            lambda,
        })
    }

    pub fn op(&self) -> &H {
        &self.op
    }

    pub fn measurements(&self) -> &[f64] {
        &self.b
    }

    pub fn regularizer(&self) -> &Regularizer {
        &self.reg
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Data-fit term `0.5 |Hx - b|^2`.
    pub fn data_fit(&self, x: &[f64]) -> f64 {
        let hx = self.op.forward(x);
        0.5 * norm2_diff_sq(&hx, &self.b)
    }

    /// Full objective `0.5 |Hx - b|^2 + lambda g(x)`.
    ///
    /// The penalty term is [`Regularizer::prox_eval`], the penalty the
    /// proximal step minimizes, so the value decreases monotonically under
    /// the exact descent step.
    pub fn objective(&self, x: &[f64]) -> f64 {
        self.data_fit(x) + self.lambda * self.reg.prox_eval(x)
    }

    /// Gradient of the data-fit term: `H^T (Hx - b)`.
    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.op.in_dim()];
        self.grad_into(x, &mut out);
        out
    }

    pub fn grad_into(&self, x: &[f64], out: &mut [f64]) {
        let mut residual = self.op.forward(x);
        for (r, b) in residual.iter_mut().zip(&self.b) {
            *r -= b;
        }
        self.op.adjoint_into(&residual, out);
    }

    /// Default initial point `H^T b` (the adjoint image of the data).
    pub fn default_x0(&self) -> Vec<f64> {
        self.op.adjoint(&self.b)
    }
}

/// Step sizes and iteration budget for the solvers.
///
/// `alpha1`/`alpha2` feed the accelerated scheme and must stay strictly
/// below `1/L`; `alpha_t` feeds the folded scheme and must stay strictly
/// below `2/(L+2)`. [`SolverConfig::new`] picks the largest admissible
/// defaults (`0.99/L` and `1.9/(L+2)`).
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub iters: usize,
    pub lipschitz: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha_t: f64,
    pub x0: Option<Vec<f64>>,
    /// Optional early stop on the proximal residual; `None` runs all
    /// `iters` so traces match fixed-iteration experiments.
    pub early_stop: Option<f64>,
}

impl SolverConfig {
    pub fn new(iters: usize, lipschitz: f64) -> Self {
        SolverConfig {
            iters,
            lipschitz,
            alpha1: 0.99 / lipschitz,
            alpha2: 0.99 / lipschitz,
            alpha_t: 1.9 / (lipschitz + 2.0),
            x0: None,
            early_stop: None,
        }
    }

    pub fn with_x0(mut self, x0: Vec<f64>) -> Self {
        self.x0 = Some(x0);
        self
    }

    pub fn with_alphas(mut self, alpha1: f64, alpha2: f64) -> Self {
        self.alpha1 = alpha1;
        self.alpha2 = alpha2;
        self
    }

    pub fn with_alpha_t(mut self, alpha_t: f64) -> Self {
        self.alpha_t = alpha_t;
        self
    }

    pub fn with_early_stop(mut self, tol: f64) -> Self {
        self.early_stop = Some(tol);
        self
    }
}

/// One trace row.
#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub iter: usize,
    /// Objective value at the iterate.
    pub objective: f64,
    /// Proximal residual `|x_t - x_{t-1}|`.
    pub residual: f64,
    /// Milliseconds since the solver started.
    pub millis: f64,
    /// Folded scheme only: recorded sufficient-decrease margin.
    pub decrease_margin: Option<f64>,
    /// Plug-and-play only: squared fixed-point residual of the denoiser.
    pub fp_residual_sq: Option<f64>,
}

/// Per-iteration log of a solver run.
#[derive(Debug, Clone, Default)]
pub struct SolverTrace {
    pub entries: Vec<TraceEntry>,
    /// Averagedness parameter of the denoiser when known; `None` means the
    /// run carries no residual-bound certificate.
    pub denoiser_kappa: Option<f64>,
}

impl SolverTrace {
    /// Writes `t,objective,residual,ms` rows.
    pub fn to_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "t,objective,residual,ms")?;
        for e in &self.entries {
            writeln!(w, "{},{},{},{}", e.iter, e.objective, e.residual, e.millis)?;
        }
        Ok(())
    }

    /// Clears wall-clock columns so serialized output is reproducible.
    pub fn zero_timing(&mut self) {
        for e in self.entries.iter_mut() {
            e.millis = 0.0;
        }
    }

    pub fn final_objective(&self) -> f64 {
        self.entries.last().map(|e| e.objective).unwrap_or(f64::NAN)
    }

    /// Mean of the squared fixed-point residuals over the first `t` rows
    /// that carry one.
    pub fn mean_fp_residual_sq(&self, t: usize) -> Option<f64> {
        let vals: Vec<f64> = self
            .entries
            .iter()
            .filter_map(|e| e.fp_residual_sq)
            .take(t)
            .collect();
        if vals.is_empty() {
            None
        } else {
            Some(vals.iter().sum::<f64>() / vals.len() as f64)
        }
    }
}

/// Solver failure modes.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    Config(String),

    /// The objective rose by more than the divergence tolerance or became
    /// non-finite; should not happen under admissible step sizes.
    #[error("objective diverged at iteration {iter}")]
    Diverged {
        iter: usize,
        trace: Box<SolverTrace>,
    },

    #[error(transparent)]
    Core(#[from] CoreError),
}

const DIVERGENCE_TOL: f64 = 1e-6;

fn resolve_x0<H: LinearOperator>(
    prob: &Problem<H>,
    cfg: &SolverConfig,
) -> Result<Vec<f64>, SolverError> {
    let x0 = match &cfg.x0 {
        Some(x0) => x0.clone(),
        None => prob.default_x0(),
    };
    if x0.len() != prob.op.in_dim() {
        return Err(SolverError::Config(format!(
            "x0 has {} entries, operator expects {}",
            x0.len(),
            prob.op.in_dim()
        )));
    }
    if !all_finite(&x0) {
        return Err(SolverError::Config("x0 must be finite".into()));
    }
    Ok(x0)
}

fn check_effective_lambda(alpha: f64, lambda: f64, which: &str) -> Result<f64, SolverError> {
    let eff = alpha * lambda;
    if !(eff > 0.0 && eff <= 1.0) {
        return Err(SolverError::Config(format!(
            "effective prox weight {which} = {eff} outside (0,1]"
        )));
    }
    Ok(eff)
}

/// Accelerated proximal gradient.
///
/// Each iteration forms the extrapolated point `y_t`, takes a proximal
/// step from `y_t` (candidate `z`) and from `x_t` (candidate `v`), and
/// keeps whichever candidate has the smaller objective. The momentum
/// weights come from the recurrence `r_{t+1} = (sqrt(4 r_t^2 + 1) + 1)/2`
/// seeded with `r_0 = 0, r_1 = 1`; the first iteration therefore
/// extrapolates literally with coefficients `0` and `-1`.
///
/// The objective trace is non-increasing (up to arithmetic rounding)
/// because the `v` candidate alone already guarantees descent for step
/// sizes below `1/L`.
pub fn apg<H: LinearOperator>(
    prob: &Problem<H>,
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, SolverTrace), SolverError> {
    run_accelerated(prob, cfg, None)
}

/// Plug-and-play accelerated proximal gradient: the plain proximal
/// candidate is produced by `denoiser` instead of the penalty's prox.
///
/// The trace records `|x_t - d(x_t - alpha1 grad f(x_t))|^2` per iteration;
/// when the denoiser is averaged (kappa known) the running mean of this
/// quantity is bounded and decays like `1/T`. The objective-comparison
/// selection keeps each iterate no worse than the denoiser branch, but a
/// general denoiser gives no monotone-descent guarantee, so divergence
/// detection here only trips on non-finite objectives.
pub fn pnp_apg<H: LinearOperator>(
    prob: &Problem<H>,
    denoiser: &Denoiser,
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, SolverTrace), SolverError> {
    run_accelerated(prob, cfg, Some(denoiser))
}

fn run_accelerated<H: LinearOperator>(
    prob: &Problem<H>,
    cfg: &SolverConfig,
    denoiser: Option<&Denoiser>,
) -> Result<(Vec<f64>, SolverTrace), SolverError> {
    let l = cfg.lipschitz;
    if !(cfg.alpha1 > 0.0 && cfg.alpha1 < 1.0 / l) || !(cfg.alpha2 > 0.0 && cfg.alpha2 < 1.0 / l) {
        return Err(SolverError::Config(format!(
            "alpha1={}, alpha2={} must lie in (0, 1/L) with 1/L = {}",
            cfg.alpha1,
            cfg.alpha2,
            1.0 / l
        )));
    }
    let eff1 = check_effective_lambda(cfg.alpha1, prob.lambda, "alpha1*lambda")?;
    let eff2 = check_effective_lambda(cfg.alpha2, prob.lambda, "alpha2*lambda")?;

    let n = prob.op.in_dim();
    let x0 = resolve_x0(prob, cfg)?;
    let start = Instant::now();

    let mut x_prev = x0.clone();
    let mut x = x0.clone();
    let mut z = x0;
    let mut r_prev = 0.0_f64;
    let mut r = 1.0_f64;

    let mut trace = SolverTrace {
        entries: Vec::with_capacity(cfg.iters + 1),
        denoiser_kappa: denoiser.and_then(|d| d.kappa()),
    };
    let mut f_cur = prob.objective(&x);
    trace.entries.push(TraceEntry {
        iter: 0,
        objective: f_cur,
        residual: 0.0,
        millis: start.elapsed().as_secs_f64() * 1e3,
        decrease_margin: None,
        fp_residual_sq: None,
    });

    let mut y = vec![0.0; n];
    let mut grad = vec![0.0; n];
    let mut step = vec![0.0; n];
    let mut z_next = vec![0.0; n];

    for t in 1..=cfg.iters {
        let c1 = r_prev / r;
        let c2 = (r_prev - 1.0) / r;
        for i in 0..n {
            y[i] = x[i] + c1 * (z[i] - x[i]) + c2 * (x[i] - x_prev[i]);
        }

        prob.grad_into(&y, &mut grad);
        for i in 0..n {
            step[i] = y[i] - cfg.alpha2 * grad[i];
        }
        prox_vector_into(&prob.reg, eff2, &step, &mut z_next);

        prob.grad_into(&x, &mut grad);
        for i in 0..n {
            step[i] = x[i] - cfg.alpha1 * grad[i];
        }
        let v_next = match denoiser {
            None => {
                let mut v = vec![0.0; n];
                prox_vector_into(&prob.reg, eff1, &step, &mut v);
                v
            }
            Some(d) => {
                let v = d.apply(&step);
                if v.len() != n {
                    return Err(SolverError::Config(format!(
                        "denoiser returned {} entries, expected {n}",
                        v.len()
                    )));
                }
                v
            }
        };
        let fp_residual_sq = denoiser.map(|_| norm2_diff_sq(&x, &v_next));

        let r_next = 0.5 * ((4.0 * r * r + 1.0).sqrt() + 1.0);

        let f_z = prob.objective(&z_next);
        let f_v = prob.objective(&v_next);
        let take_z = f_z <= f_v;
        let f_next = if take_z { f_z } else { f_v };

        // With the exact prox in the v slot, descent is guaranteed and any
        // rise is a bug; an arbitrary denoiser carries no such guarantee,
        // so only non-finite objectives abort there.
        let rose_too_much = denoiser.is_none() && f_next > f_cur + DIVERGENCE_TOL;
        if !f_next.is_finite() || rose_too_much {
            return Err(SolverError::Diverged {
                iter: t,
                trace: Box::new(trace),
            });
        }

        x_prev.copy_from_slice(&x);
        let residual;
        if take_z {
            residual = norm2_diff(&z_next, &x);
            x.copy_from_slice(&z_next);
        } else {
            residual = norm2_diff(&v_next, &x);
            x.copy_from_slice(&v_next);
        }
        z.copy_from_slice(&z_next);
        r_prev = r;
        r = r_next;
        f_cur = f_next;

        trace.entries.push(TraceEntry {
            iter: t,
            objective: f_next,
            residual,
            millis: start.elapsed().as_secs_f64() * 1e3,
            decrease_margin: None,
            fp_residual_sq,
        });

        if let Some(tol) = cfg.early_stop {
            if residual < tol {
                break;
            }
        }
    }
    Ok((x, trace))
}

/// Folded (plain) proximal gradient: `x <- prox_{alpha lambda g}(x - alpha
/// grad f(x))` for `iters` steps with fixed `alpha = alpha_t`.
///
/// The objective trace is non-increasing for any admissible step. The trace
/// additionally records the sufficient-decrease margin
/// `F(x_t) - F(x_{t+1}) - (1/(alpha lambda) - 1 - L/2) |x_t - x_{t+1}|^2`
/// with `alpha_t < 2/(L+2)`. The margin's coefficient scales with
/// `1/lambda`, which over-claims the attainable decrease for `lambda < 1`;
/// at `lambda = 1` the recorded margin is non-negative up to rounding.
pub fn folded_pg<H: LinearOperator>(
    prob: &Problem<H>,
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, SolverTrace), SolverError> {
    let l = cfg.lipschitz;
    let bound = 2.0 / (l + 2.0);
    if !(cfg.alpha_t > 0.0 && cfg.alpha_t < bound) {
        return Err(SolverError::Config(format!(
            "alpha_t={} must lie in (0, 2/(L+2)) with 2/(L+2) = {bound}",
            cfg.alpha_t
        )));
    }
    let eff = check_effective_lambda(cfg.alpha_t, prob.lambda, "alpha_t*lambda")?;

    let n = prob.op.in_dim();
    let mut x = resolve_x0(prob, cfg)?;
    let start = Instant::now();

    let mut trace = SolverTrace::default();
    let mut f_cur = prob.objective(&x);
    trace.entries.push(TraceEntry {
        iter: 0,
        objective: f_cur,
        residual: 0.0,
        millis: start.elapsed().as_secs_f64() * 1e3,
        decrease_margin: None,
        fp_residual_sq: None,
    });

    let margin_coeff = 1.0 / (cfg.alpha_t * prob.lambda) - 1.0 - l / 2.0;
    let mut grad = vec![0.0; n];
    let mut step = vec![0.0; n];
    let mut x_next = vec![0.0; n];

    for t in 1..=cfg.iters {
        prob.grad_into(&x, &mut grad);
        for i in 0..n {
            step[i] = x[i] - cfg.alpha_t * grad[i];
        }
        prox_vector_into(&prob.reg, eff, &step, &mut x_next);

        let f_next = prob.objective(&x_next);
        if !f_next.is_finite() || f_next > f_cur + DIVERGENCE_TOL {
            return Err(SolverError::Diverged {
                iter: t,
                trace: Box::new(trace),
            });
        }
        let diff_sq = norm2_diff_sq(&x, &x_next);
        let margin = (f_cur - f_next) - margin_coeff * diff_sq;

        x.copy_from_slice(&x_next);
        f_cur = f_next;
        trace.entries.push(TraceEntry {
            iter: t,
            objective: f_next,
            residual: diff_sq.sqrt(),
            millis: start.elapsed().as_secs_f64() * 1e3,
            decrease_margin: Some(margin),
            fp_residual_sq: None,
        });

        if let Some(tol) = cfg.early_stop {
            if diff_sq.sqrt() < tol {
                break;
            }
        }
    }
    Ok((x, trace))
}

/// Proximal-gradient fixed-point residual
/// `|x - prox_{alpha lambda g}(x - alpha grad f(x))|`, the stationarity
/// measure the solvers drive to zero.
pub fn prox_gradient_residual<H: LinearOperator>(
    prob: &Problem<H>,
    x: &[f64],
    alpha: f64,
) -> Result<f64, SolverError> {
    let eff = check_effective_lambda(alpha, prob.lambda, "alpha*lambda")?;
    let grad = prob.grad(x);
    let step: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - alpha * gi).collect();
    let prox = prox_vector(&prob.reg, eff, &step)?;
    Ok(norm2_diff(x, &prox))
}

/// An image-to-image map usable as the plug-and-play denoising step.
pub struct Denoiser {
    f: Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
    kappa: Option<f64>,
}

impl Denoiser {
    /// Wraps an arbitrary map. Pass `kappa` when the map is known to be
    /// `kappa`-averaged; without it the run carries no residual-bound
    /// certificate and the trace is flagged accordingly.
    pub fn from_fn(
        f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        kappa: Option<f64>,
    ) -> Self {
        Denoiser {
            f: Box::new(f),
            kappa,
        }
    }

    /// The identity map (a no-op denoiser; the plug-and-play step reduces
    /// to a plain gradient step).
    pub fn identity() -> Self {
        Denoiser::from_fn(|x| x.to_vec(), None)
    }

    /// `d(x) = (1-beta) x + beta prox_{lambda g}(x)`, with `kappa = beta`
    /// recorded as the averagedness parameter.
    ///
    /// The parameter is a rigorous certificate when the underlying prox is
    /// nonexpansive, which holds for the convex `l1` baseline; the
    /// non-convex proxes can expand locally, so runs built on them carry
    /// the recorded `kappa` as a nominal value only.
    pub fn averaged_shrink(
        reg: Regularizer,
        lambda: f64,
        beta: f64,
    ) -> Result<Self, CoreError> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(CoreError::parameter(format!(
                "beta must lie in (0,1), got {beta}"
            )));
        }
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(CoreError::parameter(format!(
                "lambda must lie in (0,1], got {lambda}"
            )));
        }
        Ok(Denoiser::from_fn(
            move |x| {
                let mut out = vec![0.0; x.len()];
                prox_vector_into(&reg, lambda, x, &mut out);
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = (1.0 - beta) * xi + beta * *o;
                }
                out
            },
            Some(beta),
        ))
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (self.f)(x)
    }

    pub fn kappa(&self) -> Option<f64> {
        self.kappa
    }
}
