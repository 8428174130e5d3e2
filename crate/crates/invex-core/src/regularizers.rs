//! The invex penalty family and its scalar subdifferentials.
//!
//! Each regularizer is a separable sum `g(x) = sum_i r(x[i])` of a scalar
//! penalty `r`. Five non-convex members (a shifted power penalty, a
//! logarithmic penalty, a saturating ratio, a squared ratio, and the
//! difference of the log and ratio penalties) are invex: away from zero the
//! Clarke subdifferential never contains zero, and at zero it does, so every
//! stationary point is the global minimum. The convex `l1` norm is included
//! as the baseline every experiment compares against.

use serde::{Deserialize, Serialize};

use crate::CoreError;

/// Discriminant of the penalty family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegKind {
    /// `(|w| + eps)^p` with `p` in `(0,1)`; `eps` keeps it Lipschitz.
    Lp,
    /// `log(1 + |w|)`.
    Log,
    /// `|w| / (2 + 2|w|)`.
    Ratio,
    /// `w^2 / (1 + w^2)`.
    Sq,
    /// `log(1 + |w|) - |w| / (2 + 2|w|)`.
    LogMinusRatio,
    /// `|w|`, the convex baseline.
    L1,
}

impl RegKind {
    /// All six kinds, in a fixed order convenient for sweeps.
    pub const ALL: [RegKind; 6] = [
        RegKind::Lp,
        RegKind::Log,
        RegKind::Ratio,
        RegKind::Sq,
        RegKind::LogMinusRatio,
        RegKind::L1,
    ];

    /// Short lowercase name used in CSV output and CLI flags.
    pub fn name(&self) -> &'static str {
        match self {
            RegKind::Lp => "lp",
            RegKind::Log => "log",
            RegKind::Ratio => "ratio",
            RegKind::Sq => "sq",
            RegKind::LogMinusRatio => "log_minus_ratio",
            RegKind::L1 => "l1",
        }
    }

    /// Parses the name produced by [`RegKind::name`].
    pub fn parse(s: &str) -> Result<RegKind, CoreError> {
        match s {
            "lp" => Ok(RegKind::Lp),
            "log" => Ok(RegKind::Log),
            "ratio" => Ok(RegKind::Ratio),
            "sq" => Ok(RegKind::Sq),
            "log_minus_ratio" => Ok(RegKind::LogMinusRatio),
            "l1" => Ok(RegKind::L1),
            other => Err(CoreError::parameter(format!("unknown regularizer kind '{other}'"))),
        }
    }
}

/// A closed interval `[lo, hi]`, used for scalar Clarke subdifferentials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// Degenerate interval `[v, v]`.
    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Smallest admissible `eps` for the power penalty: `(p(1-p))^(1/(2-p))`.
///
/// Below this value the proximal subproblem `r(w) + 0.5 (w-u)^2` loses
/// convexity at the origin.
pub fn min_epsilon(p: f64) -> Result<f64, CoreError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(CoreError::parameter(format!("p must lie in (0,1), got {p}")));
    }
    Ok((p * (1.0 - p)).powf(1.0 / (2.0 - p)))
}

/// A validated member of the penalty family.
///
/// Only the `lp` kind carries parameters; construction checks
/// `0 < p < 1` and `eps >= min_epsilon(p)`, so a `Regularizer` value is
/// always usable without further validation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RegRepr", into = "RegRepr")]
pub struct Regularizer {
    kind: RegKind,
    p: f64,
    epsilon: f64,
}

/// Serialized shape: `{"kind": "lp", "p": 0.5, "epsilon": 0.3969}`,
/// parameter-free kinds serialize as `{"kind": "log"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RegRepr {
    kind: RegKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
}

impl TryFrom<RegRepr> for Regularizer {
    type Error = CoreError;

    fn try_from(r: RegRepr) -> Result<Self, CoreError> {
        match r.kind {
            RegKind::Lp => {
                let p = r
                    .p
                    .ok_or_else(|| CoreError::parameter("lp regularizer requires 'p'"))?;
                match r.epsilon {
                    Some(eps) => Regularizer::lp(p, eps),
                    None => Regularizer::lp_min_eps(p),
                }
            }
            kind => {
                if r.p.is_some() || r.epsilon.is_some() {
                    return Err(CoreError::parameter(format!(
                        "kind '{}' carries no parameters",
                        kind.name()
                    )));
                }
                Ok(Regularizer::simple(kind))
            }
        }
    }
}

impl From<Regularizer> for RegRepr {
    fn from(reg: Regularizer) -> RegRepr {
        match reg.kind {
            RegKind::Lp => RegRepr {
                kind: RegKind::Lp,
                p: Some(reg.p),
                epsilon: Some(reg.epsilon),
            },
            kind => RegRepr {
                kind,
                p: None,
                epsilon: None,
            },
        }
    }
}

impl Regularizer {
    fn simple(kind: RegKind) -> Self {
        debug_assert!(kind != RegKind::Lp);
        Regularizer {
            kind,
            p: 0.0,
            epsilon: 0.0,
        }
    }

    /// Power penalty `(|w| + eps)^p`. Rejects `eps` below [`min_epsilon`].
    pub fn lp(p: f64, epsilon: f64) -> Result<Self, CoreError> {
        let floor = min_epsilon(p)?;
        if !epsilon.is_finite() || epsilon < floor {
            return Err(CoreError::parameter(format!(
                "epsilon {epsilon} below admissible floor {floor} for p={p}"
            )));
        }
        Ok(Regularizer {
            kind: RegKind::Lp,
            p,
            epsilon,
        })
    }

    /// Power penalty with the smallest admissible `eps`.
    pub fn lp_min_eps(p: f64) -> Result<Self, CoreError> {
        let eps = min_epsilon(p)?;
        Ok(Regularizer {
            kind: RegKind::Lp,
            p,
            epsilon: eps,
        })
    }

    pub fn log() -> Self {
        Self::simple(RegKind::Log)
    }

    pub fn ratio() -> Self {
        Self::simple(RegKind::Ratio)
    }

    pub fn sq() -> Self {
        Self::simple(RegKind::Sq)
    }

    pub fn log_minus_ratio() -> Self {
        Self::simple(RegKind::LogMinusRatio)
    }

    pub fn l1() -> Self {
        Self::simple(RegKind::L1)
    }

    pub fn kind(&self) -> RegKind {
        self.kind
    }

    /// Exponent of the power penalty; meaningful only for [`RegKind::Lp`].
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Shift of the power penalty; meaningful only for [`RegKind::Lp`].
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Scalar penalty `r(w)`.
    pub fn penalty(&self, w: f64) -> f64 {
        let a = w.abs();
        match self.kind {
            RegKind::Lp => (a + self.epsilon).powf(self.p),
            RegKind::Log => (1.0 + a).ln(),
            RegKind::Ratio => a / (2.0 + 2.0 * a),
            RegKind::Sq => (w * w) / (1.0 + w * w),
            RegKind::LogMinusRatio => (1.0 + a).ln() - a / (2.0 + 2.0 * a),
            RegKind::L1 => a,
        }
    }

    /// Scalar penalty minimized by the shrinkage rules in [`crate::prox`].
    ///
    /// Identical to [`Regularizer::penalty`] except for the power kind,
    /// where the `eps` shift is dropped: the closed-form threshold rule
    /// solves `argmin lambda |w|^p + 0.5 (w-t)^2`. Solvers score iterates
    /// with this penalty so that their objective traces are monotone under
    /// the exact proximal step.
    pub fn prox_penalty(&self, w: f64) -> f64 {
        match self.kind {
            RegKind::Lp => w.abs().powf(self.p),
            _ => self.penalty(w),
        }
    }

    /// `g(x) = sum_i r(x[i])`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        x.iter().map(|&w| self.penalty(w)).sum()
    }

    /// Sum of [`Regularizer::prox_penalty`] over the entries of `x`.
    pub fn prox_eval(&self, x: &[f64]) -> f64 {
        x.iter().map(|&w| self.prox_penalty(w)).sum()
    }

    /// Clarke subdifferential of the scalar penalty at `w`.
    ///
    /// Degenerate (a single derivative value) for `w != 0`; at `w = 0` the
    /// symmetric interval between the one-sided limits. Zero lies strictly
    /// outside the interval for every `w != 0` and inside it at `w = 0`,
    /// which is the invexity certificate the property tests exercise.
    pub fn subdiff_scalar(&self, w: f64) -> Interval {
        if w == 0.0 {
            let c = match self.kind {
                RegKind::Lp => self.p * self.epsilon.powf(self.p - 1.0),
                RegKind::Log => 1.0,
                RegKind::Ratio => 0.5,
                RegKind::Sq => 0.0,
                RegKind::LogMinusRatio => 0.5,
                RegKind::L1 => 1.0,
            };
            return Interval::new(-c, c);
        }
        let a = w.abs();
        let s = w.signum();
        let d = match self.kind {
            RegKind::Lp => s * self.p * (a + self.epsilon).powf(self.p - 1.0),
            RegKind::Log => s / (1.0 + a),
            RegKind::Ratio => s / (2.0 * (1.0 + a) * (1.0 + a)),
            RegKind::Sq => 2.0 * w / ((1.0 + w * w) * (1.0 + w * w)),
            RegKind::LogMinusRatio => s * (2.0 * a + 1.0) / (2.0 * (1.0 + a) * (1.0 + a)),
            RegKind::L1 => s,
        };
        Interval::point(d)
    }
}
