//! Several constraints folded into g = max_i g_i. Gradient-based methods
//! use the gradient of the active constraint. The maximum has no closed-form
//! prox, so proximal methods fall back to inner gradient descent. That loop
//! meets its stopping tolerance only when the prox point lies on a single
//! smooth piece; at a kink of the maximum it reports an error.

use nalgebra::dvector;
use switchopt::analysis::certify;
use switchopt::oracle::{finite_diff_grad, reference_sgm};
use switchopt::problem::{Constants, Matrix, ProblemInstance, ScalarFunction, Vector};
use switchopt::solvers::{average_solution, run, Method, SolverConfig};
use switchopt::switching::SwitchingRule;

fn main() -> switchopt::Result<()> {
    // min ½‖w − (2, 2)‖²  s.t.  w₁ <= 1,  w₂ <= 0.5,  ½‖w‖² <= 2
    let f = ScalarFunction::centered_quadratic(Matrix::identity(2, 2), &dvector![2.0, 2.0], 0.0)?;
    let g = ScalarFunction::max_of(vec![
        ScalarFunction::affine(dvector![1.0, 0.0], -1.0),
        ScalarFunction::affine(dvector![0.0, 1.0], -0.5),
        ScalarFunction::quadratic(Matrix::identity(2, 2), Vector::zeros(2), -2.0)?,
    ])?;
    let p = ProblemInstance::new(f, g)?.with_constants(Constants {
        w_star: Some(dvector![1.0, 0.5]),
        f_star: Some(0.5 * (1.0 + 1.5 * 1.5)),
        ..Constants::default()
    })?;

    let w = dvector![0.5, -0.3];
    println!("grad g at (0.5, -0.3): {:?}", p.g.grad(&w)?.as_slice());
    println!("finite diff:      {:?}", finite_diff_grad(&p.g, &w, 1e-6)?.as_slice());

    let w1 = Vector::zeros(2);
    for method in [Method::Sgm, Method::Ssgm] {
        let mut cfg = SolverConfig::new(method, 4000, 0.01, 0.01)?;
        if method.is_soft() {
            cfg = cfg.with_rule(SwitchingRule::trimmed_hinge(0.01, 20.0)?)?;
        }
        let trace = run(&p, &cfg, &w1)?;
        let cert = certify(&p, &average_solution(&trace)?, 0.05)?;
        println!(
            "{:<15} w_T+1 = ({:.4}, {:.4})  f_gap {:+.3e}  g {:+.3e}  eps 0.05: {}",
            method.name(),
            trace.final_w[0],
            trace.final_w[1],
            cert.f_gap,
            cert.g_val,
            cert.passed
        );
    }

    for (method, start) in [(Method::Sppm, dvector![3.0, 3.0]), (Method::SsppmExplicit, w1.clone())] {
        match run(&p, &SolverConfig::new(method, 4000, 0.01, 0.01)?, &start) {
            Ok(_) => println!("{method} from {:?}: inner solves converged", start.as_slice()),
            Err(e) => println!("{method} from {:?}: {e}", start.as_slice()),
        }
    }

    let cfg = SolverConfig::new(Method::Sgm, 4000, 0.01, 0.01)?;
    let a = run(&p, &cfg, &w1)?;
    let b = reference_sgm(&p, &cfg, &w1)?;
    println!("sgm vs plain-loop reference: max |Δw| = {:.1e}", (&a.final_w - &b.final_w).amax());
    Ok(())
}
