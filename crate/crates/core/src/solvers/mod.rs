//! Hard and soft switching methods, explicit and proximal.
//!
//! All methods share one loop: evaluate `f`, `g` and the switching weight at
//! `w_t`, record the step, then move to `w_{t+1}`:
//!
//! * `sgm` steps along `∇f(w_t)` when `g(w_t) <= ε`, else along `∇g(w_t)`.
//! * `ssgm` steps along the blended field `F(w_t)`.
//! * `ssppm_implicit` solves `w = w_t − ηF(w)` by fixed-point iteration.
//! * `ssppm_explicit` takes a proximal step on `h_t = σ_t·g + (1 − σ_t)·f`
//!   with `σ_t` frozen at `w_t`.
//! * `sppm` takes a proximal step on `f` or `g`, switched as in `sgm`.
//! * `penalty_gd` is gradient descent on `f + ρ[g − ε]_+`.

mod schedule;
mod trace;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use schedule::{theoretical_schedule, Schedule, ScheduleInputs};
pub use trace::{
    average_solution, average_steps, averaging_weights, read_steps_csv, write_steps_csv,
    InnerSolve, Trace, TraceStep, TRACE_HEADER,
};

use crate::analysis::{contraction_margin, lipschitz_bound_f};
use crate::error::{Error, Result};
use crate::problem::{ProblemInstance, ScalarFunction, Vector};
use crate::switching::{field_eval, RuleKind, SwitchingRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Sgm,
    Ssgm,
    SsppmImplicit,
    SsppmExplicit,
    Sppm,
    PenaltyGd,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Sgm,
        Method::Ssgm,
        Method::SsppmImplicit,
        Method::SsppmExplicit,
        Method::Sppm,
        Method::PenaltyGd,
    ];

    /// Soft methods average over `g < ε` with weights `1 − σ`.
    pub fn is_soft(self) -> bool {
        matches!(
            self,
            Method::Ssgm | Method::SsppmImplicit | Method::SsppmExplicit
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Sgm => "sgm",
            Method::Ssgm => "ssgm",
            Method::SsppmImplicit => "ssppm_implicit",
            Method::SsppmExplicit => "ssppm_explicit",
            Method::Sppm => "sppm",
            Method::PenaltyGd => "penalty_gd",
        }
    }

    /// Theorems whose schedule applies to this method.
    pub fn theorems(self) -> &'static [u8] {
        match self {
            Method::Sgm => &[1, 2],
            Method::Ssgm => &[3, 4],
            Method::SsppmImplicit => &[5],
            Method::SsppmExplicit => &[6],
            Method::Sppm => &[7],
            Method::PenaltyGd => &[],
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}")))
    }
}

/// Stopping rule for inner solves (fixed-point iteration and prox by descent).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for InnerConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: Method,
    /// Number of steps `T`.
    pub horizon: usize,
    pub eta: f64,
    pub rule: SwitchingRule,
    /// Penalty weight of `penalty_gd`; defaults to
    /// `10·max{1, ‖∇f(w₁)‖/‖∇g(w₁)‖}`.
    pub rho: Option<f64>,
    pub inner: InnerConfig,
}

impl SolverConfig {
    /// Configuration with the default rule for `method`: hard for
    /// `sgm`/`sppm`/`penalty_gd`, trimmed hinge with β = 1 otherwise.
    pub fn new(method: Method, horizon: usize, eta: f64, epsilon: f64) -> Result<Self> {
        let rule = if method.is_soft() {
            SwitchingRule::trimmed_hinge(epsilon, 1.0)?
        } else {
            SwitchingRule::hard(epsilon)?
        };
        let cfg = Self {
            method,
            horizon,
            eta,
            rule,
            rho: None,
            inner: InnerConfig::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_rule(mut self, rule: SwitchingRule) -> Result<Self> {
        self.rule = rule;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidParameter("T must be at least 1".into()));
        }
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "step size must be positive, got {}",
                self.eta
            )));
        }
        self.rule.validate()?;
        if self.method.is_soft() != self.rule.is_soft() {
            return Err(Error::InvalidParameter(format!(
                "method {} cannot use the {:?} rule",
                self.method, self.rule.kind
            )));
        }
        if let Some(rho) = self.rho {
            if !(rho > 0.0) {
                return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
            }
        }
        if !(self.inner.tol > 0.0) || self.inner.max_iter == 0 {
            return Err(Error::InvalidParameter("inner tol and max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// Minimizes `h(x) + ‖x − v‖²/(2η)` by gradient descent with step
/// `1/(smoothness + 1/η)`, stopping once the objective's gradient norm is at
/// most `inner.tol`.
pub fn prox_by_descent<G>(
    grad_h: G,
    smoothness: f64,
    eta: f64,
    v: &Vector,
    inner: &InnerConfig,
) -> Result<Vector>
where
    G: Fn(&Vector) -> Result<Vector>,
{
    let step = 1.0 / (smoothness + 1.0 / eta);
    let mut x = v.clone();
    let mut norm = f64::INFINITY;
    for _ in 0..=inner.max_iter {
        let grad = grad_h(&x)? + (&x - v) / eta;
        norm = grad.norm();
        if norm <= inner.tol {
            return Ok(x);
        }
        if !norm.is_finite() {
            break;
        }
        x -= grad * step;
    }
    Err(Error::FixedPointDivergence {
        iterations: inner.max_iter,
        residual: norm,
    })
}

/// Proximal step on `func`, closed form when available.
fn prox_step(func: &ScalarFunction, eta: f64, v: &Vector, inner: &InnerConfig) -> Result<Vector> {
    match func.prox(eta, v) {
        Err(Error::NoClosedFormProx) => {
            prox_by_descent(|x| func.grad(x), func.smoothness(), eta, v, inner)
        }
        other => other,
    }
}

fn check_ball(radius: Option<f64>, w: &Vector, step: usize) -> Result<()> {
    if let Some(radius) = radius {
        let norm = w.norm();
        if !(norm <= radius) {
            return Err(Error::BallExit { step, norm, radius });
        }
    }
    Ok(())
}

fn default_rho(p: &ProblemInstance, w1: &Vector) -> Result<f64> {
    let gf = p.f.grad(w1)?.norm();
    let gg = p.g.grad(w1)?.norm();
    let ratio = if gg > 0.0 { gf / gg } else { 1.0 };
    Ok(10.0 * ratio.max(1.0))
}

fn implicit_margin(p: &ProblemInstance, cfg: &SolverConfig) -> Option<f64> {
    let g = p.constants.lipschitz?;
    let l = p.constants.smoothness?;
    Some(contraction_margin(
        cfg.eta,
        lipschitz_bound_f(g, l, cfg.rule.beta),
    ))
}

/// Runs `cfg.horizon` steps of `cfg.method` from `w1`.
///
/// When the instance carries a certified ball radius every iterate
/// `w_1, …, w_{T+1}` is checked against it.
pub fn run(p: &ProblemInstance, cfg: &SolverConfig, w1: &Vector) -> Result<Trace> {
    cfg.validate()?;
    if w1.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: w1.len(),
        });
    }
    let radius = p.constants.ball_radius;
    let eta = cfg.eta;
    let rule = &cfg.rule;
    let soft = cfg.method.is_soft();

    let rho = match cfg.method {
        Method::PenaltyGd => Some(match cfg.rho {
            Some(r) => r,
            None => default_rho(p, w1)?,
        }),
        _ => None,
    };

    let mut margin = None;
    if cfg.method == Method::SsppmImplicit {
        margin = implicit_margin(p, cfg);
        match margin {
            None => log::warn!("instance lacks G or L; fixed-point contraction is not verified"),
            Some(m) if m <= 0.0 => log::warn!(
                "eta * G_F >= 1 (margin {m:.3e}); fixed-point iteration may not converge"
            ),
            _ => {}
        }
    }

    let mut steps = Vec::with_capacity(cfg.horizon);
    let mut inner_solves = Vec::new();
    let mut w = w1.clone();

    for t in 1..=cfg.horizon {
        check_ball(radius, &w, t)?;
        let f_val = p.f.eval(&w)?;
        let g_val = p.g.eval(&w)?;
        let sigma = rule.weight(g_val);
        let in_a = if soft {
            g_val < rule.epsilon
        } else {
            g_val <= rule.epsilon
        };

        let (next, u_norm) = match cfg.method {
            Method::Sgm | Method::Ssgm => {
                let u = field_eval(p, rule, &w)?.direction;
                (&w - &u * eta, u.norm())
            }
            Method::PenaltyGd => {
                let mut u = p.f.grad(&w)?;
                if sigma > 0.0 {
                    u += p.g.grad(&w)? * rho.unwrap_or(1.0);
                }
                (&w - &u * eta, u.norm())
            }
            Method::SsppmImplicit => {
                let solve = solve_implicit(p, rule, eta, &w, &cfg.inner, t)?;
                let u_norm = (&w - &solve.0).norm() / eta;
                inner_solves.push(solve.1);
                (solve.0, u_norm)
            }
            Method::SsppmExplicit => {
                let next = match ScalarFunction::blend(sigma, &p.g, 1.0 - sigma, &p.f) {
                    Some(h) => prox_step(&h, eta, &w, &cfg.inner)?,
                    None => {
                        let smooth = p.f.smoothness().max(p.g.smoothness());
                        let grad_h = |x: &Vector| -> Result<Vector> {
                            Ok(p.g.grad(x)? * sigma + p.f.grad(x)? * (1.0 - sigma))
                        };
                        prox_by_descent(grad_h, smooth, eta, &w, &cfg.inner)?
                    }
                };
                let u_norm = (&w - &next).norm() / eta;
                (next, u_norm)
            }
            Method::Sppm => {
                let h = if sigma > 0.0 { &p.g } else { &p.f };
                let next = prox_step(h, eta, &w, &cfg.inner)?;
                let u_norm = (&w - &next).norm() / eta;
                (next, u_norm)
            }
        };

        steps.push(TraceStep {
            t,
            w,
            f: f_val,
            g: g_val,
            sigma,
            in_a,
            u_norm,
        });
        w = next;
    }
    check_ball(radius, &w, cfg.horizon + 1)?;

    Ok(Trace {
        method: cfg.method,
        epsilon: rule.epsilon,
        steps,
        final_w: w,
        inner: inner_solves,
        contraction_margin: margin,
    })
}

/// Fixed-point iteration `z ← w_t − ηF(z)` started at `w_t`.
///
/// Runs the plain iteration while residuals shrink. After the first
/// non-decreasing residual it switches to the averaged update
/// `z ← ½z + ½(w_t − ηF(z))`, which still converges when `ηF` is only
/// nonexpansive.
fn solve_implicit(
    p: &ProblemInstance,
    rule: &SwitchingRule,
    eta: f64,
    anchor: &Vector,
    inner: &InnerConfig,
    step: usize,
) -> Result<(Vector, InnerSolve)> {
    debug_assert!(rule.kind != RuleKind::Hard);
    let mut z = anchor.clone();
    let mut residuals: Vec<f64> = Vec::new();
    let mut relaxation = 1.0;
    for k in 0..=inner.max_iter {
        let image = anchor - field_eval(p, rule, &z)?.direction * eta;
        let residual = (&z - &image).norm();
        if relaxation == 1.0 && residuals.last().is_some_and(|&prev| residual >= prev) {
            relaxation = 0.5;
        }
        residuals.push(residual);
        if residual <= inner.tol {
            return Ok((z, InnerSolve { step, residuals }));
        }
        if !residual.is_finite() || k == inner.max_iter {
            break;
        }
        z += (image - &z) * relaxation;
    }
    Err(Error::FixedPointDivergence {
        iterations: residuals.len() - 1,
        residual: residuals.last().copied().unwrap_or(f64::NAN),
    })
}
