//! Ground truth used to check the solvers: a multiplier-bisection solver for
//! constrained quadratics, central finite differences, and a second,
//! independently written switching-gradient loop.

use nalgebra::Cholesky;

use crate::error::{Error, Result};
use crate::problem::{delta_max, generate_quadratic_instance, Matrix, ProblemInstance, ScalarFunction, Vector};
use crate::solvers::{Method, SolverConfig, Trace, TraceStep};

const BISECTION_CAP: usize = 200;
const MULTIPLIER_CEILING: f64 = 1e12;
const FEASIBILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub w_star: Vector,
    pub f_star: f64,
    pub lambda_star: f64,
    pub active: bool,
}

fn quadratic_parts(func: &ScalarFunction) -> Option<(Matrix, Vector)> {
    match func {
        ScalarFunction::Quadratic {
            hessian, linear, ..
        } => Some((hessian.clone(), linear.clone())),
        ScalarFunction::Affine { slope, .. } => {
            Some((Matrix::zeros(slope.len(), slope.len()), slope.clone()))
        }
        ScalarFunction::MaxOf(_) => None,
    }
}

/// Minimizer of `f + λg`, one SPD solve.
fn lagrangian_argmin(hf: &Matrix, bf: &Vector, hg: &Matrix, bg: &Vector, lambda: f64) -> Result<Vector> {
    let system = hf + hg * lambda;
    let rhs = -(bf + bg * lambda);
    Cholesky::new(system)
        .map(|c| c.solve(&rhs))
        .ok_or(Error::SingularSystem)
}

/// Solves `min f s.t. g <= 0` for a strongly convex quadratic `f` and a convex
/// quadratic or affine `g`.
///
/// If the unconstrained minimizer is feasible it is returned with λ = 0.
/// Otherwise `φ(λ) = g(argmin f + λg)` is nonincreasing, and λ is bisected
/// until `|φ(λ)| <= 1e-12` or the bracket collapses.
pub fn solve_reference(p: &ProblemInstance) -> Result<ReferenceSolution> {
    let (hf, bf) = quadratic_parts(&p.f)
        .filter(|_| matches!(p.f, ScalarFunction::Quadratic { .. }))
        .ok_or_else(|| Error::InvalidFunction("reference solver needs a quadratic objective".into()))?;
    let (hg, bg) = quadratic_parts(&p.g)
        .ok_or_else(|| Error::InvalidFunction("reference solver needs a quadratic or affine constraint".into()))?;

    let phi = |lambda: f64| -> Result<(Vector, f64)> {
        let x = lagrangian_argmin(&hf, &bf, &hg, &bg, lambda)?;
        let gv = p.g.eval(&x)?;
        Ok((x, gv))
    };

    let finish = |w: Vector, lambda: f64, active: bool| -> Result<ReferenceSolution> {
        Ok(ReferenceSolution {
            f_star: p.f.eval(&w)?,
            w_star: w,
            lambda_star: lambda,
            active,
        })
    };

    let (x0, g0) = phi(0.0).map_err(|_| {
        Error::InvalidFunction("reference solver needs a strongly convex objective".into())
    })?;
    if g0 <= 0.0 {
        return finish(x0, 0.0, false);
    }

    let mut lo = 0.0;
    let mut hi = 1.0;
    let (mut x_hi, mut g_hi) = phi(hi)?;
    while g_hi > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > MULTIPLIER_CEILING {
            return Err(Error::InfeasibleOrIllConditioned(MULTIPLIER_CEILING));
        }
        (x_hi, g_hi) = phi(hi)?;
    }

    for _ in 0..BISECTION_CAP {
        if g_hi.abs() <= FEASIBILITY_TOL || hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (x_mid, g_mid) = phi(mid)?;
        if g_mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
            x_hi = x_mid;
            g_hi = g_mid;
        }
    }
    finish(x_hi, hi, true)
}

/// Instance from [`generate_quadratic_instance`] with `w*`, `f*`, `λ*`,
/// `D = ‖w*‖` and `Δmax` filled in.
pub fn generate_solved_instance(dim: usize, seed: u64) -> Result<ProblemInstance> {
    attach_reference(generate_quadratic_instance(dim, seed)?)
}

/// Stores the reference solution and the derived constants on `p`.
pub fn attach_reference(mut p: ProblemInstance) -> Result<ProblemInstance> {
    let sol = solve_reference(&p)?;
    p.constants.distance = Some(sol.w_star.norm());
    p.constants.w_star = Some(sol.w_star);
    p.constants.f_star = Some(sol.f_star);
    p.constants.lambda_star = Some(sol.lambda_star);
    p.constants.delta_max = Some(delta_max(&p)?.value);
    p.validate()?;
    Ok(p)
}

/// KKT residuals `(‖∇f + λ∇g‖, [g]_+, |λ·g|)` of a candidate solution.
pub fn kkt_residuals(p: &ProblemInstance, sol: &ReferenceSolution) -> Result<(f64, f64, f64)> {
    let stationarity = (p.f.grad(&sol.w_star)? + p.g.grad(&sol.w_star)? * sol.lambda_star).norm();
    let g = p.g.eval(&sol.w_star)?;
    Ok((stationarity, g.max(0.0), (sol.lambda_star * g).abs()))
}

/// Central differences `(fn(w + h·eᵢ) − fn(w − h·eᵢ)) / 2h`.
pub fn finite_diff_grad(func: &ScalarFunction, w: &Vector, h: f64) -> Result<Vector> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    let mut out = Vector::zeros(w.len());
    let mut probe = w.clone();
    for i in 0..w.len() {
        probe[i] = w[i] + h;
        let up = func.eval(&probe)?;
        probe[i] = w[i] - h;
        let down = func.eval(&probe)?;
        probe[i] = w[i];
        out[i] = (up - down) / (2.0 * h);
    }
    Ok(out)
}

// Plain-loop evaluation used by `reference_sgm`; deliberately shares nothing
// with `ScalarFunction::eval`/`grad`.
fn plain_value(func: &ScalarFunction, w: &[f64]) -> f64 {
    match func {
        ScalarFunction::Quadratic {
            hessian,
            linear,
            offset,
        } => {
            let d = w.len();
            let mut acc = *offset;
            for i in 0..d {
                let mut row = 0.0;
                for j in 0..d {
                    row += hessian[(i, j)] * w[j];
                }
                acc += 0.5 * w[i] * row + linear[i] * w[i];
            }
            acc
        }
        ScalarFunction::Affine { slope, offset } => {
            let mut acc = *offset;
            for i in 0..w.len() {
                acc += slope[i] * w[i];
            }
            acc
        }
        ScalarFunction::MaxOf(members) => {
            let mut best = f64::NEG_INFINITY;
            for m in members {
                best = best.max(plain_value(m, w));
            }
            best
        }
    }
}

fn plain_grad(func: &ScalarFunction, w: &[f64]) -> Vec<f64> {
    match func {
        ScalarFunction::Quadratic {
            hessian, linear, ..
        } => {
            let d = w.len();
            let mut out = vec![0.0; d];
            for i in 0..d {
                let mut row = linear[i];
                for j in 0..d {
                    row += hessian[(i, j)] * w[j];
                }
                out[i] = row;
            }
            out
        }
        ScalarFunction::Affine { slope, .. } => slope.iter().copied().collect(),
        ScalarFunction::MaxOf(members) => {
            let mut idx = 0;
            let mut best = f64::NEG_INFINITY;
            for (i, m) in members.iter().enumerate() {
                let v = plain_value(m, w);
                if v > best {
                    best = v;
                    idx = i;
                }
            }
            plain_grad(&members[idx], w)
        }
    }
}

/// Straight-line switching gradient method: `w ← w − η∇f(w)` when
/// `g(w) <= ε`, else `w ← w − η∇g(w)`.
pub fn reference_sgm(p: &ProblemInstance, cfg: &SolverConfig, w1: &Vector) -> Result<Trace> {
    if cfg.horizon == 0 {
        return Err(Error::InvalidParameter("T must be at least 1".into()));
    }
    let d = p.dim();
    if w1.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: w1.len(),
        });
    }
    let eps = cfg.rule.epsilon;
    let eta = cfg.eta;
    let radius = p.constants.ball_radius;
    let outside = |w: &[f64]| -> Option<f64> {
        let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        radius.filter(|r| !(n <= *r)).map(|_| n)
    };

    let mut w: Vec<f64> = w1.iter().copied().collect();
    let mut steps = Vec::with_capacity(cfg.horizon);
    for t in 1..=cfg.horizon {
        if let Some(norm) = outside(&w) {
            return Err(Error::BallExit {
                step: t,
                norm,
                radius: radius.unwrap_or(f64::NAN),
            });
        }
        let fv = plain_value(&p.f, &w);
        let gv = plain_value(&p.g, &w);
        let feasible = gv <= eps;
        let u = if feasible {
            plain_grad(&p.f, &w)
        } else {
            plain_grad(&p.g, &w)
        };
        let u_norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        steps.push(TraceStep {
            t,
            w: Vector::from_column_slice(&w),
            f: fv,
            g: gv,
            sigma: if feasible { 0.0 } else { 1.0 },
            in_a: feasible,
            u_norm,
        });
        for i in 0..d {
            w[i] -= eta * u[i];
        }
    }
    if let Some(norm) = outside(&w) {
        return Err(Error::BallExit {
            step: cfg.horizon + 1,
            norm,
            radius: radius.unwrap_or(f64::NAN),
        });
    }
    Ok(Trace {
        method: Method::Sgm,
        epsilon: eps,
        steps,
        final_w: Vector::from_vec(w),
        inner: Vec::new(),
        contraction_margin: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn disk_problem() -> ProblemInstance {
        let f = ScalarFunction::centered_quadratic(Matrix::identity(2, 2), &dvector![2.0, 0.0], 0.0)
            .unwrap();
        let g = ScalarFunction::quadratic(Matrix::identity(2, 2) * 2.0, Vector::zeros(2), -1.0)
            .unwrap();
        ProblemInstance::new(f, g).unwrap()
    }

    #[test]
    fn disk_reference_solution() {
        let p = disk_problem();
        let sol = solve_reference(&p).unwrap();
        assert!((&sol.w_star - dvector![1.0, 0.0]).norm() < 1e-10);
        assert!((sol.f_star - 0.5).abs() < 1e-10);
        // ∇f(w*) = (−1, 0) and ∇g(w*) = (2, 0), so stationarity forces λ* = ½.
        assert!((sol.lambda_star - 0.5).abs() < 1e-9);
        assert!(sol.active);
        let (stat, feas, comp) = kkt_residuals(&p, &sol).unwrap();
        assert!(stat <= 1e-8 && feas <= 1e-8 && comp <= 1e-8);
    }

    #[test]
    fn disk_reference_matches_grid_search() {
        let sol = solve_reference(&disk_problem()).unwrap();
        let n = 2000;
        let mut best = f64::INFINITY;
        for i in 0..=n {
            for j in 0..=n {
                let x = -1.0 + 2.0 * i as f64 / n as f64;
                let y = -1.0 + 2.0 * j as f64 / n as f64;
                if x * x + y * y <= 1.0 {
                    best = best.min(0.5 * ((x - 2.0).powi(2) + y * y));
                }
            }
        }
        // Grid spacing 1e-3 bounds the gap by |∇f|·spacing.
        assert!(best >= sol.f_star - 1e-10);
        assert!(best - sol.f_star <= 2e-3);
    }

    #[test]
    fn inactive_constraint() {
        let f = ScalarFunction::quadratic(Matrix::identity(2, 2), Vector::zeros(2), 0.0).unwrap();
        let g = ScalarFunction::affine(dvector![1.0, 0.0], -1.0);
        let sol = solve_reference(&ProblemInstance::new(f, g).unwrap()).unwrap();
        assert_eq!(sol.w_star, dvector![0.0, 0.0]);
        assert_eq!(sol.lambda_star, 0.0);
        assert!(!sol.active);
    }

    #[test]
    fn infeasible_problem_is_reported() {
        let f = ScalarFunction::quadratic(Matrix::identity(1, 1), Vector::zeros(1), 0.0).unwrap();
        // g = 1 + 0·w can never be satisfied.
        let g = ScalarFunction::affine(dvector![0.0], 1.0);
        assert!(matches!(
            solve_reference(&ProblemInstance::new(f, g).unwrap()),
            Err(Error::InfeasibleOrIllConditioned(_))
        ));
    }

    #[test]
    fn generated_instances_satisfy_kkt() {
        for seed in [42, 1, 2, 3] {
            let p = generate_solved_instance(10, seed).unwrap();
            let sol = solve_reference(&p).unwrap();
            assert!(sol.active);
            let (stat, feas, comp) = kkt_residuals(&p, &sol).unwrap();
            assert!(stat <= 1e-8 && feas <= 1e-8 && comp <= 1e-8, "seed {seed}");
            assert!(sol.lambda_star >= 0.0);
            assert_eq!(p.constants.distance, Some(sol.w_star.norm()));
        }
    }

    #[test]
    fn finite_differences() {
        let q = ScalarFunction::quadratic(Matrix::identity(2, 2), Vector::zeros(2), 0.0).unwrap();
        let fd = finite_diff_grad(&q, &dvector![3.0, 4.0], 1e-5).unwrap();
        assert!((fd - dvector![3.0, 4.0]).amax() < 1e-9);
        let a = ScalarFunction::affine(dvector![1.5, -2.0], 0.3);
        let fd = finite_diff_grad(&a, &dvector![10.0, -7.0], 1e-5).unwrap();
        assert!((fd - dvector![1.5, -2.0]).amax() < 1e-9);
        let m = ScalarFunction::max_of(vec![a.clone(), q.clone()]).unwrap();
        let w = dvector![3.0, 4.0];
        let fd = finite_diff_grad(&m, &w, 1e-5).unwrap();
        assert!((fd - m.grad(&w).unwrap()).amax() < 1e-6);
        assert!(finite_diff_grad(&q, &w, 0.0).is_err());
    }

    #[test]
    fn reference_sgm_is_plain_descent_without_violation() {
        let f = ScalarFunction::quadratic(Matrix::identity(2, 2), Vector::zeros(2), 0.0).unwrap();
        let g = ScalarFunction::affine(Vector::zeros(2), -1.0);
        let p = ProblemInstance::new(f, g).unwrap();
        let cfg = SolverConfig::new(Method::Sgm, 3, 0.5, 0.1).unwrap();
        let trace = reference_sgm(&p, &cfg, &dvector![1.0, 0.0]).unwrap();
        assert_eq!(trace.final_w, dvector![0.125, 0.0]);
        let mut zero = cfg;
        zero.horizon = 0;
        assert!(reference_sgm(&p, &zero, &dvector![1.0, 0.0]).is_err());
    }
}
