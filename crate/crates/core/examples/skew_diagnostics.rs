//! Symmetric and skew-symmetric parts of the switching field's Jacobian on
//! f = ½‖w‖², g = aᵀw, evaluated on the switching surface g(w) = ε.

use nalgebra::dvector;
use switchopt::analysis::field_jacobian;
use switchopt::problem::{Matrix, ProblemInstance, ScalarFunction, Vector};
use switchopt::switching::SwitchingRule;

fn main() -> switchopt::Result<()> {
    let f = ScalarFunction::quadratic(Matrix::identity(2, 2), Vector::zeros(2), 0.0)?;
    let g = ScalarFunction::affine(dvector![1.0, 2.0], 0.0);
    let p = ProblemInstance::new(f, g)?;
    let epsilon = 0.5;
    // a·w = ε, off the line through a so that ∇f and ∇g are not parallel
    let w = dvector![epsilon + 2.0, -1.0];

    println!("beta    sym_norm    skew_norm   skew_ratio");
    for beta in [1.0, 3.0, 10.0, 30.0, 100.0] {
        let rule = SwitchingRule::sigmoid(epsilon, beta)?;
        let r = field_jacobian(&p, &rule, &w)?;
        println!("{beta:<7} {:.4e}  {:.4e}  {:.4}", r.sym_norm, r.skew_norm, r.skew_ratio);
    }

    let rule = SwitchingRule::sigmoid(epsilon, 10.0)?;
    let r = field_jacobian(&p, &rule, &w)?;
    println!("\nJacobian at beta = 10:{}", r.jacobian);
    println!("skew part:{}", r.skew());
    Ok(())
}
