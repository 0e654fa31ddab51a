//! Generate a random quadratic instance, solve it by multiplier bisection,
//! and write it as JSON.
//!
//! ```text
//! cargo run --example generate_instance -- 10 42 instance.json
//! ```

use std::path::PathBuf;

use switchopt::io::save_instance;
use switchopt::oracle::{generate_solved_instance, kkt_residuals, ReferenceSolution};

fn main() -> switchopt::Result<()> {
    let mut args = std::env::args().skip(1);
    let dim: usize = args.next().map_or(10, |s| s.parse().expect("dim"));
    let seed: u64 = args.next().map_or(42, |s| s.parse().expect("seed"));
    let out = args.next().map(PathBuf::from);

    let p = generate_solved_instance(dim, seed)?;
    let c = &p.constants;
    println!("dim {dim}, seed {seed}");
    println!("  L           = {:.6}", c.smoothness.unwrap());
    println!("  G (on ball) = {:.6}  radius {:.3}", c.lipschitz.unwrap(), c.ball_radius.unwrap());
    println!("  f*          = {:.12}", c.f_star.unwrap());
    println!("  lambda*     = {:.12}", c.lambda_star.unwrap());
    println!("  D = |w*|    = {:.6}", c.distance.unwrap());
    println!("  delta_max   = {:.6}", c.delta_max.unwrap());

    let sol = ReferenceSolution {
        w_star: c.w_star.clone().unwrap(),
        f_star: c.f_star.unwrap(),
        lambda_star: c.lambda_star.unwrap(),
        active: true,
    };
    let (stat, infeas, slack) = kkt_residuals(&p, &sol)?;
    println!("  KKT residuals: stationarity {stat:.2e}, infeasibility {infeas:.2e}, complementarity {slack:.2e}");

    if let Some(path) = out {
        save_instance(&p, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
