use crate::analysis::{fit_power_law, RateFit};
use crate::error::{Error, Result};
use crate::problem::{ProblemInstance, Vector};
use crate::solvers::{run, SolverConfig, Trace};

use super::{f_gap_series, RATE_WINDOW_FRACTION};

/// Admissibility test for a candidate step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuningCriteria {
    /// Minimum r² of the f-gap power-law fit; lower values indicate a
    /// chattering trajectory rather than a steady decay.
    pub min_r_squared: f64,
}

impl Default for TuningCriteria {
    fn default() -> Self {
        Self { min_r_squared: 0.8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepCandidate {
    pub eta: f64,
    /// `max{|f(w_T) − f*|, [g(w_T)]_+}`, or the failure that ruled it out.
    pub final_error: std::result::Result<f64, String>,
    pub fit: Option<RateFit>,
    pub admissible: bool,
}

#[derive(Debug, Clone)]
pub struct TunedStep {
    pub eta: f64,
    pub trace: Trace,
    pub fit: RateFit,
    pub candidates: Vec<StepCandidate>,
}

/// Picks the constant step from `grid` with the smallest final error among
/// runs that stay bounded and whose f-gap decays steadily (fit r² at least
/// `criteria.min_r_squared`).
///
/// `make_config(eta)` builds the solver configuration for a step.
pub fn tune_step<C>(
    p: &ProblemInstance,
    grid: &[f64],
    w1: &Vector,
    criteria: TuningCriteria,
    make_config: C,
) -> Result<TunedStep>
where
    C: Fn(f64) -> Result<SolverConfig>,
{
    let f_star = p.constants.f_star.ok_or(Error::MissingConstant("f_star"))?;
    let mut best: Option<(f64, f64, Trace, RateFit)> = None;
    let mut candidates = Vec::with_capacity(grid.len());
    for &eta in grid {
        let cfg = make_config(eta)?;
        let outcome = run(p, &cfg, w1).and_then(|trace| {
            let last = trace.steps.last().expect("horizon is at least 1");
            let err = (last.f - f_star).abs().max(last.g.max(0.0));
            if !err.is_finite() {
                return Err(Error::InvalidParameter("non-finite iterate".into()));
            }
            let fit = fit_power_law(&f_gap_series(&trace, f_star), RATE_WINDOW_FRACTION)?;
            Ok((trace, err, fit))
        });
        match outcome {
            Ok((trace, err, fit)) => {
                let admissible = fit.r_squared >= criteria.min_r_squared;
                candidates.push(StepCandidate {
                    eta,
                    final_error: Ok(err),
                    fit: Some(fit),
                    admissible,
                });
                if admissible && best.as_ref().is_none_or(|b| err < b.1) {
                    best = Some((eta, err, trace, fit));
                }
            }
            Err(e) => candidates.push(StepCandidate {
                eta,
                final_error: Err(e.to_string()),
                fit: None,
                admissible: false,
            }),
        }
    }
    let (eta, _, trace, fit) = best.ok_or_else(|| {
        Error::InvalidParameter(format!(
            "no admissible step in grid {grid:?} (all diverged or chattered)"
        ))
    })?;
    Ok(TunedStep {
        eta,
        trace,
        fit,
        candidates,
    })
}
