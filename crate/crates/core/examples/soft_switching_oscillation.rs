//! Sigmoid-switched gradient steps at increasing temperature β. A sharper
//! switch turns the approach to the constraint boundary into a persistent
//! oscillation of f and g.

use switchopt::analysis::tail_stats;
use switchopt::oracle::generate_solved_instance;
use switchopt::problem::Vector;
use switchopt::solvers::{run, Method, SolverConfig};
use switchopt::switching::SwitchingRule;

fn main() -> switchopt::Result<()> {
    let p = generate_solved_instance(10, 42)?;
    let (eta, epsilon, horizon) = (0.1, 1e-3, 500);

    println!("beta     std g (last half)  mean g      std f (last half)");
    for beta in [1.0, 3.0, 10.0, 30.0, 100.0] {
        let cfg = SolverConfig::new(Method::Ssgm, horizon, eta, epsilon)?
            .with_rule(SwitchingRule::sigmoid(epsilon, beta)?)?;
        let trace = run(&p, &cfg, &Vector::zeros(p.dim()))?;
        let s = tail_stats(&trace.steps, 0.5)?;
        println!("{beta:<8} {:.4e}         {:+.4e}  {:.4e}", s.std_g, s.mean_g, s.std_f);
    }
    Ok(())
}
