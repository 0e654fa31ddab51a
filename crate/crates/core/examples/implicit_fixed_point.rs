//! Implicit soft proximal steps: each step solves w = w_t − ηF(w) by
//! fixed-point iteration. With η·2(L + G²β) < 1 the map is a contraction
//! and the residuals shrink geometrically.

use switchopt::analysis::lipschitz_bound_f;
use switchopt::oracle::generate_solved_instance;
use switchopt::problem::Vector;
use switchopt::solvers::{run, Method, SolverConfig};
use switchopt::switching::SwitchingRule;

fn main() -> switchopt::Result<()> {
    let p = generate_solved_instance(10, 42)?;
    let (g, l) = (p.constants.lipschitz.unwrap(), p.constants.smoothness.unwrap());
    let beta = 1.0;
    let g_f = lipschitz_bound_f(g, l, beta);

    for factor in [0.5, 0.9] {
        let eta = factor / g_f;
        let cfg = SolverConfig::new(Method::SsppmImplicit, 200, eta, 0.05)?
            .with_rule(SwitchingRule::trimmed_hinge(0.05, beta)?)?;
        let trace = run(&p, &cfg, &Vector::zeros(p.dim()))?;
        let worst = trace
            .inner
            .iter()
            .filter_map(|s| s.max_contraction(1e-13))
            .fold(0.0_f64, f64::max);
        let iters: usize = trace.inner.iter().map(|s| s.iterations()).sum();
        println!(
            "eta·G_F = {factor}: margin {:.3}, {iters} inner iterations over {} steps, worst residual ratio {worst:.3e}",
            trace.contraction_margin.unwrap(),
            trace.len(),
        );
        let first = &trace.inner[0];
        println!("  step 1 residuals: {}", first.residuals.iter().take(6).map(|r| format!("{r:.3e}")).collect::<Vec<_>>().join(" "));
    }
    Ok(())
}
