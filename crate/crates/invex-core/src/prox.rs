//! Scalar and vector proximal operators for the penalty family.
//!
//! Every operator solves `argmin_w lambda * r(w) + 0.5 (w - t)^2` exactly:
//! the subproblem is convex for `lambda` in `(0, 1]`, so the stationarity
//! equations have a unique positive root whenever one exists. For the log
//! penalty the root is a closed-form quadratic solution; for the power
//! penalty it is a bracketed root of a monotone equation; for the remaining
//! kinds it is found by bisection on the monotone map `psi` below. In all
//! cases the objective is compared at `w = 0` and at every positive
//! candidate, and the minimizer is returned (ties go to zero, the sparser
//! choice), which subsumes the threshold case splits of the closed forms.

use crate::regularizers::{RegKind, Regularizer};
use crate::CoreError;

/// Absolute bracket tolerance for root bisection.
const BISECT_TOL: f64 = 1e-12;
const BISECT_MAX_ITER: usize = 200;

fn validate(lambda: f64, t: f64) -> Result<(), CoreError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(CoreError::parameter(format!(
            "lambda must lie in (0,1], got {lambda}"
        )));
    }
    if !t.is_finite() {
        return Err(CoreError::input(format!("prox input must be finite, got {t}")));
    }
    Ok(())
}

/// The proximal subproblem objective `lambda * r(w) + 0.5 (w - t)^2`.
///
/// Uses [`Regularizer::prox_penalty`], the penalty the shrinkage rules
/// actually minimize.
pub fn prox_objective(reg: &Regularizer, lambda: f64, w: f64, t: f64) -> f64 {
    lambda * reg.prox_penalty(w) + 0.5 * (w - t) * (w - t)
}

/// Monotone stationarity map for the bisection-solved kinds.
///
/// For `w > 0` the condition `h'(w) = 0` of the subproblem rearranges to
/// `psi(w) = |t|` with:
/// - ratio: `psi(w) = lambda / (2 (1+w)^2) + w`
/// - sq: `psi(w) = 2 lambda w / (1+w^2)^2 + w`
/// - log_minus_ratio: `psi(w) = lambda (2w+1) / (2 (1+w)^2) + w`
///
/// Each is strictly increasing on `w >= 0` for `lambda` in `(0,1]`.
pub fn psi(kind: RegKind, lambda: f64, w: f64) -> f64 {
    match kind {
        RegKind::Ratio => lambda / (2.0 * (1.0 + w) * (1.0 + w)) + w,
        RegKind::Sq => {
            let d = 1.0 + w * w;
            2.0 * lambda * w / (d * d) + w
        }
        RegKind::LogMinusRatio => {
            lambda * (2.0 * w + 1.0) / (2.0 * (1.0 + w) * (1.0 + w)) + w
        }
        other => panic!("psi is not defined for kind {other:?}"),
    }
}

/// Bisection for `f(w) = 0` on `[lo, hi]` with `f(lo) <= 0 <= f(hi)`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    debug_assert!(lo <= hi);
    for _ in 0..BISECT_MAX_ITER {
        if hi - lo <= BISECT_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Positive candidate magnitudes for the subproblem at `a = |t| > 0`.
fn positive_candidates(reg: &Regularizer, lambda: f64, a: f64) -> Vec<f64> {
    match reg.kind() {
        RegKind::L1 => {
            if a > lambda {
                vec![a - lambda]
            } else {
                vec![]
            }
        }
        RegKind::Lp => {
            let p = reg.p();
            let beta = (2.0 * lambda * (1.0 - p)).powf(1.0 / (2.0 - p));
            let tau = beta + lambda * p * beta.powf(p - 1.0);
            if a <= tau {
                // At the threshold both branches tie; zero is returned.
                return vec![];
            }
            let f = |y: f64| lambda * p * y.powf(p - 1.0) + y - a;
            vec![bisect(f, beta, a)]
        }
        RegKind::Log => {
            let disc = (a + 1.0) * (a + 1.0) - 4.0 * lambda;
            if disc < 0.0 {
                return vec![];
            }
            let beta = 0.5 * (a - 1.0 + disc.sqrt());
            if beta > 0.0 {
                vec![beta]
            } else {
                vec![]
            }
        }
        RegKind::Ratio | RegKind::Sq | RegKind::LogMinusRatio => {
            let kind = reg.kind();
            if psi(kind, lambda, 0.0) > a {
                // psi is increasing, so no positive stationary point exists.
                return vec![];
            }
            let f = |w: f64| psi(kind, lambda, w) - a;
            vec![bisect(f, 0.0, a)]
        }
    }
}

/// Proximal operator of `lambda * r` at `t`: the global minimizer of
/// `lambda * r(w) + 0.5 (w - t)^2`.
///
/// The output has the sign of `t` (or is zero) and magnitude at most `|t|`.
pub fn prox_scalar(reg: &Regularizer, lambda: f64, t: f64) -> Result<f64, CoreError> {
    validate(lambda, t)?;
    Ok(prox_scalar_unchecked(reg, lambda, t))
}

pub(crate) fn prox_scalar_unchecked(reg: &Regularizer, lambda: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let a = t.abs();
    let mut best = 0.0;
    let mut best_obj = prox_objective(reg, lambda, 0.0, a);
    for cand in positive_candidates(reg, lambda, a) {
        let obj = prox_objective(reg, lambda, cand, a);
        if obj < best_obj {
            best = cand;
            best_obj = obj;
        }
    }
    if best == 0.0 {
        0.0
    } else {
        best.copysign(t)
    }
}

/// Elementwise proximal operator; the subproblem separates over coordinates.
pub fn prox_vector(reg: &Regularizer, lambda: f64, u: &[f64]) -> Result<Vec<f64>, CoreError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(CoreError::parameter(format!(
            "lambda must lie in (0,1], got {lambda}"
        )));
    }
    if let Some(bad) = u.iter().find(|v| !v.is_finite()) {
        return Err(CoreError::input(format!("prox input must be finite, got {bad}")));
    }
    Ok(u.iter()
        .map(|&t| prox_scalar_unchecked(reg, lambda, t))
        .collect())
}

pub(crate) fn prox_vector_into(reg: &Regularizer, lambda: f64, u: &[f64], out: &mut [f64]) {
    debug_assert_eq!(u.len(), out.len());
    for (o, &t) in out.iter_mut().zip(u) {
        *o = prox_scalar_unchecked(reg, lambda, t);
    }
}

/// Independent oracle: grid minimization of the subproblem objective over
/// `[-halfwidth, halfwidth]`, followed by golden-section refinement around
/// every grid-local minimum. Never consults the closed forms above.
pub fn brute_force_prox(
    reg: &Regularizer,
    lambda: f64,
    t: f64,
    halfwidth: f64,
    step: f64,
) -> f64 {
    assert!(step > 0.0, "step must be positive");
    assert!(
        halfwidth >= t.abs() + 1.0,
        "halfwidth must cover the shrinkage range"
    );
    let obj = |w: f64| prox_objective(reg, lambda, w, t);

    let n = (2.0 * halfwidth / step).ceil() as usize + 1;
    let grid = |i: usize| -halfwidth + (2.0 * halfwidth) * i as f64 / (n - 1) as f64;
    let vals: Vec<f64> = (0..n).map(|i| obj(grid(i))).collect();

    let mut best_w = 0.0;
    let mut best_obj = obj(0.0);
    let mut consider = |w: f64| {
        let o = obj(w);
        if o < best_obj {
            best_obj = o;
            best_w = w;
        }
    };

    let spacing = 2.0 * halfwidth / (n - 1) as f64;
    for i in 0..n {
        let is_local_min = (i == 0 || vals[i] <= vals[i - 1]) && (i + 1 == n || vals[i] <= vals[i + 1]);
        if is_local_min {
            let lo = (grid(i) - spacing).max(-halfwidth);
            let hi = (grid(i) + spacing).min(halfwidth);
            consider(golden_section(&obj, lo, hi));
        }
    }
    best_w
}

/// Golden-section search for the minimum of `f` on `[lo, hi]`.
fn golden_section(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > 1e-13 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let mid = 0.5 * (lo + hi);
    if f(mid) < fc.min(fd) {
        mid
    } else if fc < fd {
        c
    } else {
        d
    }
}

/// Distance from the stationarity condition `0 in lambda * dr(w) + (w - t)`.
///
/// Zero (up to root-finding tolerance) at the value returned by
/// [`prox_scalar`]. For the power kind the shift-free derivative
/// `p |w|^(p-1) sign(w)` is used, matching [`Regularizer::prox_penalty`]; at
/// `w = 0` that penalty has unbounded slope, so the condition holds for any
/// `t` and the gap is zero.
pub fn resolvent_gap(reg: &Regularizer, lambda: f64, t: f64, w: f64) -> f64 {
    let target = (t - w) / lambda;
    if w == 0.0 {
        if reg.kind() == RegKind::Lp {
            return 0.0;
        }
        let iv = reg.subdiff_scalar(0.0);
        return if iv.contains(target) {
            0.0
        } else {
            (target - iv.lo).abs().min((target - iv.hi).abs())
        };
    }
    let d = if reg.kind() == RegKind::Lp {
        reg.p() * w.abs().powf(reg.p() - 1.0) * w.signum()
    } else {
        reg.subdiff_scalar(w).midpoint()
    };
    (target - d).abs()
}
