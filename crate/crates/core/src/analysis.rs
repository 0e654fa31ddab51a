//! Certification of averaged points, Jacobian diagnostics of the switching
//! field, Lipschitz and contraction bounds, and power-law rate fits.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{Matrix, ProblemInstance, Vector};
use crate::switching::SwitchingRule;

/// Verdict on whether a point is an ε-solution: objective gap and
/// constraint value both at most ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub f_gap: f64,
    pub g_val: f64,
    pub epsilon: f64,
    pub passed: bool,
}

impl Certificate {
    pub fn new(f_gap: f64, g_val: f64, epsilon: f64) -> Self {
        Self {
            f_gap,
            g_val,
            epsilon,
            passed: f_gap <= epsilon && g_val <= epsilon,
        }
    }
}

pub fn certify(p: &ProblemInstance, w_bar: &Vector, epsilon: f64) -> Result<Certificate> {
    let f_star = p
        .constants
        .f_star
        .ok_or(Error::MissingConstant("f_star"))?;
    Ok(Certificate::new(
        p.f.eval(w_bar)? - f_star,
        p.g.eval(w_bar)?,
        epsilon,
    ))
}

/// Jacobian of the switching field split into symmetric and skew parts.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianReport {
    pub jacobian: Matrix,
    /// Frobenius norm of `(J + Jᵀ)/2`.
    pub sym_norm: f64,
    /// Frobenius norm of `(J − Jᵀ)/2`.
    pub skew_norm: f64,
    pub skew_ratio: f64,
}

impl JacobianReport {
    pub fn from_jacobian(jacobian: Matrix) -> Self {
        let sym_norm = jacobian.symmetric_part().norm();
        let skew_norm = skew_part(&jacobian).norm();
        let total = sym_norm + skew_norm;
        Self {
            jacobian,
            sym_norm,
            skew_norm,
            skew_ratio: if total > 0.0 { skew_norm / total } else { 0.0 },
        }
    }

    pub fn symmetric(&self) -> Matrix {
        self.jacobian.symmetric_part()
    }

    pub fn skew(&self) -> Matrix {
        skew_part(&self.jacobian)
    }

    /// Writes `J` as row-major CSV, one matrix row per line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for row in self.jacobian.row_iter() {
            let line: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            writeln!(out, "{}", line.join(",")).map_err(|e| Error::Io(e.to_string()))?;
        }
        Ok(())
    }
}

fn skew_part(m: &Matrix) -> Matrix {
    (m - m.transpose()) * 0.5
}

/// Analytic Jacobian of `F(w) = σ·∇g + (1 − σ)·∇f`:
///
/// `J = ∇²f + σ(∇²g − ∇²f) + σ′·(∇g − ∇f)∇gᵀ`
///
/// The rank-one term is the only non-symmetric piece, and it is symmetric
/// exactly when the two gradients are parallel.
pub fn field_jacobian(
    p: &ProblemInstance,
    rule: &SwitchingRule,
    w: &Vector,
) -> Result<JacobianReport> {
    let g_val = p.g.eval(w)?;
    let sigma = rule.weight(g_val);
    let dsigma = rule
        .weight_derivative(g_val)
        .ok_or(Error::NonDifferentiablePoint)?;
    let hf = p.f.hessian(w)?;
    let hg = p.g.hessian(w)?;
    let grad_f = p.f.grad(w)?;
    let grad_g = p.g.grad(w)?;
    let mut jacobian = &hf + (hg - &hf) * sigma;
    jacobian += (&grad_g - &grad_f) * grad_g.transpose() * dsigma;
    Ok(JacobianReport::from_jacobian(jacobian))
}

/// Lipschitz bound `2(L + G²β)` of the trimmed-hinge field when f and g are
/// G-Lipschitz and L-smooth.
pub fn lipschitz_bound_f(g: f64, l: f64, beta: f64) -> f64 {
    2.0 * (l + g * g * beta)
}

/// `1 − η·G_F`: positive means `w ↦ w_t − ηF(w)` is a contraction.
pub fn contraction_margin(eta: f64, g_f_bound: f64) -> f64 {
    1.0 - eta * g_f_bound
}

/// Fitted `value ≈ C·t^(−α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    #[serde(rename = "C")]
    pub c: f64,
    pub alpha: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
}

pub const RATE_FLOOR: f64 = 1e-16;
pub const MIN_FIT_POINTS: usize = 10;
pub const DEFAULT_WINDOW_FRACTION: f64 = 0.1;

/// Least-squares fit of `ln v` on `ln t` over `t ∈ [fraction·T, T]`, where
/// `T` is the largest `t` in the series.
///
/// Non-positive values are dropped; positive values below `1e-16` are
/// clamped to it.
pub fn fit_power_law(series: &[(f64, f64)], window_fraction: f64) -> Result<RateFit> {
    if !(0.0..=1.0).contains(&window_fraction) {
        return Err(Error::InvalidParameter(format!(
            "window fraction must lie in [0, 1], got {window_fraction}"
        )));
    }
    let t_max = series.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let t_min = window_fraction * t_max;
    let points: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, v)| *t > 0.0 && *t >= t_min && *v > 0.0 && v.is_finite())
        .map(|&(t, v)| (t.ln(), v.max(RATE_FLOOR).ln()))
        .collect();
    let above_floor = series
        .iter()
        .filter(|(t, v)| *t > 0.0 && *t >= t_min && *v > RATE_FLOOR && v.is_finite())
        .count();
    if above_floor < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            positive: above_floor,
            required: MIN_FIT_POINTS,
        });
    }

    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in &points {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::InsufficientData {
            positive: 1,
            required: MIN_FIT_POINTS,
        });
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let first = points.first().map_or(0.0, |p| p.0.exp());
    let last = points.last().map_or(0.0, |p| p.0.exp());
    Ok(RateFit {
        c: intercept.exp(),
        alpha: -slope,
        r_squared,
        window: (first.round(), last.round()),
    })
}

/// Mean and population standard deviation of `f(w_t)` and `g(w_t)` over the
/// last `fraction` of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailStats {
    pub mean_f: f64,
    pub std_f: f64,
    pub mean_g: f64,
    pub std_g: f64,
}

pub fn tail_stats(steps: &[crate::solvers::TraceStep], fraction: f64) -> Result<TailStats> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tail fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let start = steps.len() - (fraction * steps.len() as f64).round() as usize;
    let tail = &steps[start.min(steps.len())..];
    if tail.is_empty() {
        return Err(Error::InsufficientData {
            positive: 0,
            required: 1,
        });
    }
    let moments = |xs: &mut dyn Iterator<Item = f64>| {
        let v: Vec<f64> = xs.collect();
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        (mean, var.sqrt())
    };
    let (mean_f, std_f) = moments(&mut tail.iter().map(|s| s.f));
    let (mean_g, std_g) = moments(&mut tail.iter().map(|s| s.g));
    Ok(TailStats {
        mean_f,
        std_f,
        mean_g,
        std_g,
    })
}
