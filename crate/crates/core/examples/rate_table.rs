//! Empirical power-law rates of the last iterate. Each method's constant step
//! is tuned on a grid; soft methods use the trimmed hinge with β = 1 placed
//! so that the soft field vanishes at the reference solution.

use switchopt::harness::{tune_step, TuningCriteria};
use switchopt::oracle::generate_solved_instance;
use switchopt::problem::Vector;
use switchopt::solvers::{Method, SolverConfig};
use switchopt::switching::SwitchingRule;

fn main() -> switchopt::Result<()> {
    let p = generate_solved_instance(10, 42)?;
    let lambda = p.constants.lambda_star.unwrap();
    let grid = [1e-3, 3e-3, 1e-2, 3e-2];
    let horizon = 1000;

    println!("method          eta     alpha(f)  r2");
    for method in [Method::Sgm, Method::Ssgm, Method::Sppm, Method::SsppmExplicit] {
        let tuned = tune_step(&p, &grid, &Vector::zeros(p.dim()), TuningCriteria::default(), |eta| {
            let cfg = SolverConfig::new(method, horizon, eta, 1e-3)?;
            if method.is_soft() {
                cfg.with_rule(SwitchingRule::multiplier_matched_hinge(1.0, lambda)?)
            } else {
                Ok(cfg)
            }
        })?;
        println!(
            "{:<15} {:.0e}   {:>7.3}   {:.3}",
            method.name(),
            tuned.eta,
            tuned.fit.alpha,
            tuned.fit.r_squared
        );
        for c in &tuned.candidates {
            let err = match &c.final_error {
                Ok(e) => format!("{e:.3e}"),
                Err(msg) => msg.clone(),
            };
            let r2 = c.fit.map_or(f64::NAN, |f| f.r_squared);
            println!("    eta {:.0e}: final error {err}, r2 {r2:.3}", c.eta);
        }
    }
    Ok(())
}
