//! Switching weights σ and the blended update field
//! `F(w) = σ(g(w) − ε)·∇g(w) + (1 − σ(g(w) − ε))·∇f(w)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{ProblemInstance, Vector};

/// Beyond this |β·x| the logistic is exactly 0 or 1 in double precision.
const SIGMOID_CUTOFF: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Hard,
    Sigmoid,
    TrimmedHinge,
}

/// Weight on the constraint gradient as a function of `g(w)`, shifted by the
/// tolerance `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchingRule {
    pub kind: RuleKind,
    pub epsilon: f64,
    /// Temperature; ignored by the hard rule.
    pub beta: f64,
}

impl SwitchingRule {
    pub fn hard(epsilon: f64) -> Result<Self> {
        Self::new(RuleKind::Hard, epsilon, f64::INFINITY)
    }

    pub fn sigmoid(epsilon: f64, beta: f64) -> Result<Self> {
        Self::new(RuleKind::Sigmoid, epsilon, beta)
    }

    pub fn trimmed_hinge(epsilon: f64, beta: f64) -> Result<Self> {
        Self::new(RuleKind::TrimmedHinge, epsilon, beta)
    }

    /// Trimmed hinge whose weight on the boundary `g = 0` equals
    /// `λ*/(1 + λ*)`, so that the blended field vanishes at the KKT point
    /// `w*`. This needs `ε = 1/(β(1 + λ*))`.
    pub fn multiplier_matched_hinge(beta: f64, lambda_star: f64) -> Result<Self> {
        if !(lambda_star >= 0.0) || !lambda_star.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lambda_star must be finite and nonnegative, got {lambda_star}"
            )));
        }
        Self::trimmed_hinge(1.0 / (beta * (1.0 + lambda_star)), beta)
    }

    pub fn new(kind: RuleKind, epsilon: f64, beta: f64) -> Result<Self> {
        let rule = Self {
            kind,
            epsilon,
            beta,
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.is_soft() && !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta must be positive and finite for soft rules, got {}",
                self.beta
            )));
        }
        Ok(())
    }

    pub fn is_soft(&self) -> bool {
        self.kind != RuleKind::Hard
    }

    /// σ in `[0, 1]`.
    pub fn weight(&self, g_val: f64) -> f64 {
        let x = g_val - self.epsilon;
        match self.kind {
            // Boundary g = ε belongs to the objective branch.
            RuleKind::Hard => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            RuleKind::Sigmoid => {
                let z = self.beta * x;
                if z > SIGMOID_CUTOFF {
                    1.0
                } else if z < -SIGMOID_CUTOFF {
                    0.0
                } else {
                    1.0 / (1.0 + (-z).exp())
                }
            }
            RuleKind::TrimmedHinge => (1.0 + self.beta * x).clamp(0.0, 1.0),
        }
    }

    /// dσ/dg at `g_val`; `None` where σ is not differentiable.
    pub fn weight_derivative(&self, g_val: f64) -> Option<f64> {
        let x = g_val - self.epsilon;
        match self.kind {
            RuleKind::Hard => (x != 0.0).then_some(0.0),
            RuleKind::Sigmoid => {
                let s = self.weight(g_val);
                Some(self.beta * s * (1.0 - s))
            }
            RuleKind::TrimmedHinge => {
                let z = 1.0 + self.beta * x;
                if z.abs() <= 1e-12 || (z - 1.0).abs() <= 1e-12 {
                    None
                } else if z > 0.0 && z < 1.0 {
                    Some(self.beta)
                } else {
                    Some(0.0)
                }
            }
        }
    }
}

/// Blended direction `σ·∇g(w) + (1 − σ)·∇f(w)` together with σ and `g(w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldEval {
    pub direction: Vector,
    pub sigma: f64,
    pub g_val: f64,
}

pub fn field_eval(p: &ProblemInstance, rule: &SwitchingRule, w: &Vector) -> Result<FieldEval> {
    let g_val = p.g.eval(w)?;
    let sigma = rule.weight(g_val);
    // Pure branches stay exact, with no 0·∇ blending.
    let direction = if sigma == 0.0 {
        p.f.grad(w)?
    } else if sigma == 1.0 {
        p.g.grad(w)?
    } else {
        p.g.grad(w)? * sigma + p.f.grad(w)? * (1.0 - sigma)
    };
    Ok(FieldEval {
        direction,
        sigma,
        g_val,
    })
}

pub fn field(p: &ProblemInstance, rule: &SwitchingRule, w: &Vector) -> Result<Vector> {
    field_eval(p, rule, w).map(|e| e.direction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Matrix, ScalarFunction};
    use nalgebra::dvector;

    fn norm_and_first_coordinate() -> ProblemInstance {
        let f = ScalarFunction::quadratic(Matrix::identity(2, 2), Vector::zeros(2), 0.0).unwrap();
        let g = ScalarFunction::affine(dvector![1.0, 0.0], 0.0);
        ProblemInstance::new(f, g).unwrap()
    }

    #[test]
    fn matched_hinge_field_vanishes_at_kkt_point() {
        let f = ScalarFunction::centered_quadratic(Matrix::identity(2, 2), &dvector![2.0, 0.0], 0.0)
            .unwrap();
        let g = ScalarFunction::quadratic(Matrix::identity(2, 2) * 2.0, Vector::zeros(2), -1.0)
            .unwrap();
        let p = ProblemInstance::new(f, g).unwrap();
        let rule = SwitchingRule::multiplier_matched_hinge(3.0, 0.5).unwrap();
        assert!(field(&p, &rule, &dvector![1.0, 0.0]).unwrap().norm() < 1e-15);
        assert!(SwitchingRule::multiplier_matched_hinge(1.0, -1.0).is_err());
    }

    #[test]
    fn hard_boundary_goes_to_objective() {
        let r = SwitchingRule::hard(0.1).unwrap();
        assert_eq!(r.weight(0.1), 0.0);
        assert_eq!(r.weight(0.1 + 1e-15), 1.0);
        assert_eq!(r.weight(-3.0), 0.0);
    }

    #[test]
    fn sigmoid_midpoint_and_saturation() {
        for beta in [0.1, 1.0, 37.0, 1e6] {
            let r = SwitchingRule::sigmoid(0.2, beta).unwrap();
            assert_eq!(r.weight(0.2), 0.5);
        }
        let r = SwitchingRule::sigmoid(0.0001, 1e8).unwrap();
        assert_eq!(r.weight(1.0), 1.0);
        assert_eq!(r.weight(-1.0), 0.0);
    }

    #[test]
    fn trimmed_hinge_endpoints() {
        let r = SwitchingRule::trimmed_hinge(0.3, 2.0).unwrap();
        assert_eq!(r.weight(0.3 - 0.5), 0.0);
        assert_eq!(r.weight(0.3), 1.0);
        assert_eq!(r.weight(0.3 - 0.25), 0.5);
        assert_eq!(r.weight(5.0), 1.0);
    }

    #[test]
    fn invalid_rules_are_rejected() {
        assert!(SwitchingRule::hard(0.0).is_err());
        assert!(SwitchingRule::sigmoid(0.1, 0.0).is_err());
        assert!(SwitchingRule::trimmed_hinge(-1.0, 1.0).is_err());
        assert!(SwitchingRule::trimmed_hinge(1.0, f64::NAN).is_err());
    }

    #[test]
    fn hard_field_is_exact_branch() {
        let p = norm_and_first_coordinate();
        let r = SwitchingRule::hard(0.5).unwrap();
        let w = dvector![0.5, 2.0];
        assert_eq!(field(&p, &r, &w).unwrap(), p.f.grad(&w).unwrap());
        let w = dvector![0.75, 2.0];
        assert_eq!(field(&p, &r, &w).unwrap(), p.g.grad(&w).unwrap());
    }

    #[test]
    fn sigmoid_field_example() {
        let p = norm_and_first_coordinate();
        // ε = 0 fails validation, so build the rule directly.
        let r = SwitchingRule {
            kind: RuleKind::Sigmoid,
            epsilon: 0.0,
            beta: 1.0,
        };
        let e = field_eval(&p, &r, &dvector![0.0, 1.0]).unwrap();
        assert_eq!(e.sigma, 0.5);
        assert_eq!(e.direction, dvector![0.5, 0.5]);
    }

    #[test]
    fn field_rejects_bad_dimension() {
        let p = norm_and_first_coordinate();
        let r = SwitchingRule::hard(0.5).unwrap();
        assert!(field(&p, &r, &dvector![1.0]).is_err());
    }

    #[test]
    fn hinge_derivative_kinks() {
        let r = SwitchingRule::trimmed_hinge(1.0, 2.0).unwrap();
        assert_eq!(r.weight_derivative(1.0), None);
        assert_eq!(r.weight_derivative(0.5), None);
        assert_eq!(r.weight_derivative(0.75), Some(2.0));
        assert_eq!(r.weight_derivative(3.0), Some(0.0));
        let s = SwitchingRule::sigmoid(1.0, 4.0).unwrap();
        assert_eq!(s.weight_derivative(1.0), Some(1.0));
    }
}
