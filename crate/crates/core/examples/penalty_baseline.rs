//! Gradient descent on the exact penalty f + ρ[g − ε]_+ next to hard
//! switching with the same step.

use switchopt::oracle::generate_solved_instance;
use switchopt::problem::Vector;
use switchopt::solvers::{run, Method, SolverConfig};

fn main() -> switchopt::Result<()> {
    let p = generate_solved_instance(10, 42)?;
    let f_star = p.constants.f_star.unwrap();
    let (eta, epsilon, horizon) = (3e-3, 1e-3, 2000);

    for (method, rho) in [(Method::Sgm, None), (Method::PenaltyGd, None), (Method::PenaltyGd, Some(1.0))] {
        let mut cfg = SolverConfig::new(method, horizon, eta, epsilon)?;
        cfg.rho = rho;
        let trace = run(&p, &cfg, &Vector::zeros(p.dim()))?;
        let last = trace.steps.last().unwrap();
        let label = match rho {
            Some(r) => format!("{method} (rho = {r})"),
            None if method == Method::PenaltyGd => format!("{method} (default rho)"),
            None => method.to_string(),
        };
        println!(
            "{label:<26} f - f* = {:+.4e}   g = {:+.4e}",
            last.f - f_star,
            last.g
        );
    }
    Ok(())
}
