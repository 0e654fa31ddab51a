//! Run every method under its theoretical schedule and certify the averaged
//! iterate.

use switchopt::analysis::certify;
use switchopt::oracle::generate_solved_instance;
use switchopt::problem::Vector;
use switchopt::solvers::{average_solution, run, theoretical_schedule, ScheduleInputs};

fn main() -> switchopt::Result<()> {
    let horizon = 10_000;
    let p = generate_solved_instance(10, 42)?;
    let c = &p.constants;
    let inputs = ScheduleInputs {
        distance: c.distance.unwrap(),
        lipschitz: c.lipschitz,
        smoothness: c.smoothness,
        delta_max: c.delta_max,
        eta_free: Some(1e-3),
    };

    println!("theorem  method          epsilon     eta         f_gap        g(w_bar)     verdict");
    for theorem in 1..=7u8 {
        let schedule = theoretical_schedule(theorem, &inputs, horizon)?;
        let cfg = schedule.to_config(horizon)?;
        let trace = run(&p, &cfg, &Vector::zeros(p.dim()))?;
        let w_bar = average_solution(&trace)?;
        let cert = certify(&p, &w_bar, schedule.epsilon)?;
        println!(
            "{theorem:>7}  {:<14}  {:.3e}  {:.3e}  {:+.3e}  {:+.3e}  {}",
            cfg.method,
            schedule.epsilon,
            schedule.eta,
            cert.f_gap,
            cert.g_val,
            if cert.passed { "certified" } else { "FAILED" }
        );
    }
    Ok(())
}
