//! Parameter schedules `(ε, η, β)` that come with a certification guarantee
//! after `T` steps.
//!
//! | theorem | method            | ε                          | η                                  | β     |
//! |---------|-------------------|----------------------------|------------------------------------|-------|
//! | 1       | sgm               | DG/√T                      | D/(G√T)                            | –     |
//! | 2       | sgm (smooth)      | 2LD²/T + √(8LD²Δmax/T)     | min{1/(2L), √(D²/(2LΔmax T))}      | –     |
//! | 3       | ssgm              | 2DG/√T                     | D/(G√T)                            | 2/ε   |
//! | 4       | ssgm (smooth)     | 4LD²/T + √(32LD²Δmax/T)    | as for 2                           | 2/ε   |
//! | 5       | ssppm_implicit    | D²/(ηT)                    | free                               | 2/ε   |
//! | 6       | ssppm_explicit    | 2√2·DG/√T                  | D/(G√(2T))                         | 2/ε   |
//! | 7       | sppm              | √2·DG/√T                   | D/(G√(2T))                         | –     |

use serde::{Deserialize, Serialize};

use super::{InnerConfig, Method, SolverConfig};
use crate::error::{Error, Result};
use crate::switching::SwitchingRule;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub epsilon: f64,
    pub eta: f64,
    pub beta: Option<f64>,
    pub source_theorem: u8,
}

/// Problem constants consumed by [`theoretical_schedule`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScheduleInputs {
    /// `‖w₁ − w*‖`
    pub distance: f64,
    pub lipschitz: Option<f64>,
    pub smoothness: Option<f64>,
    pub delta_max: Option<f64>,
    /// Step size for theorem 5, which leaves η free.
    pub eta_free: Option<f64>,
}

fn positive(value: Option<f64>, name: &'static str) -> Result<f64> {
    let v = value.ok_or(Error::MissingConstant(name))?;
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
    }
    Ok(v)
}

fn smooth_step(l: f64, d: f64, delta: f64, t: f64) -> f64 {
    let short = 1.0 / (2.0 * l);
    if delta == 0.0 {
        short
    } else {
        short.min((d * d / (2.0 * l * delta * t)).sqrt())
    }
}

pub fn theoretical_schedule(theorem: u8, inputs: &ScheduleInputs, horizon: usize) -> Result<Schedule> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("T must be at least 1".into()));
    }
    let d = positive(Some(inputs.distance), "D")?;
    let t = horizon as f64;
    let sqrt_t = t.sqrt();

    let (epsilon, eta, soft) = match theorem {
        1 => {
            let g = positive(inputs.lipschitz, "G")?;
            (d * g / sqrt_t, d / (g * sqrt_t), false)
        }
        2 | 4 => {
            let l = positive(inputs.smoothness, "L")?;
            let delta = inputs.delta_max.ok_or(Error::MissingConstant("delta_max"))?;
            if !(delta >= 0.0) || !delta.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "delta_max must be finite and nonnegative, got {delta}"
                )));
            }
            let (a, b) = if theorem == 2 { (2.0, 8.0) } else { (4.0, 32.0) };
            let eps = a * l * d * d / t + (b * l * d * d * delta / t).sqrt();
            (eps, smooth_step(l, d, delta, t), theorem == 4)
        }
        3 => {
            let g = positive(inputs.lipschitz, "G")?;
            (2.0 * d * g / sqrt_t, d / (g * sqrt_t), true)
        }
        5 => {
            let eta = positive(inputs.eta_free, "eta_free")?;
            (d * d / (eta * t), eta, true)
        }
        6 => {
            let g = positive(inputs.lipschitz, "G")?;
            (
                2.0 * 2f64.sqrt() * d * g / sqrt_t,
                d / (g * (2.0 * t).sqrt()),
                true,
            )
        }
        7 => {
            let g = positive(inputs.lipschitz, "G")?;
            (2f64.sqrt() * d * g / sqrt_t, d / (g * (2.0 * t).sqrt()), false)
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "no schedule for theorem {other} (expected 1..=7)"
            )))
        }
    };
    Ok(Schedule {
        epsilon,
        eta,
        beta: soft.then(|| 2.0 / epsilon),
        source_theorem: theorem,
    })
}

impl Schedule {
    /// Method the schedule was derived for.
    pub fn method(&self) -> Method {
        match self.source_theorem {
            1 | 2 => Method::Sgm,
            3 | 4 => Method::Ssgm,
            5 => Method::SsppmImplicit,
            6 => Method::SsppmExplicit,
            _ => Method::Sppm,
        }
    }

    /// Solver configuration running the scheduled method for `horizon` steps.
    /// Soft schedules use the trimmed hinge.
    pub fn to_config(&self, horizon: usize) -> Result<SolverConfig> {
        let rule = match self.beta {
            Some(beta) => SwitchingRule::trimmed_hinge(self.epsilon, beta)?,
            None => SwitchingRule::hard(self.epsilon)?,
        };
        Ok(SolverConfig {
            method: self.method(),
            horizon,
            eta: self.eta,
            rule,
            rho: None,
            inner: InnerConfig::default(),
        })
    }
}
