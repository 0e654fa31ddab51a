//! Constrained problem `min f(w) s.t. g(w) <= 0` over quadratic and affine
//! building blocks, plus the seeded random quadratic instance generator.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

const SYMMETRY_TOL: f64 = 1e-12;
const PSD_TOL: f64 = -1e-10;

/// Convex scalar function of a vector argument.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarFunction {
    /// `½ wᵀHw + bᵀw + c`
    Quadratic {
        hessian: Matrix,
        linear: Vector,
        offset: f64,
    },
    /// `aᵀw + c`
    Affine { slope: Vector, offset: f64 },
    /// Pointwise maximum of the members. Used to fold several constraints
    /// `g_i(w) <= 0` into one.
    MaxOf(Vec<ScalarFunction>),
}

impl ScalarFunction {
    pub fn quadratic(hessian: Matrix, linear: Vector, offset: f64) -> Result<Self> {
        let d = linear.len();
        if hessian.nrows() != d || hessian.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: hessian.nrows(),
            });
        }
        let asym = (&hessian - hessian.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::InvalidFunction(format!(
                "hessian is not symmetric (max asymmetry {asym:e})"
            )));
        }
        if d > 0 {
            let lo = SymmetricEigen::new(hessian.clone()).eigenvalues.min();
            if lo < PSD_TOL {
                return Err(Error::InvalidFunction(format!(
                    "hessian is not positive semidefinite (eigenvalue {lo:e})"
                )));
            }
        }
        Ok(Self::Quadratic {
            hessian,
            linear,
            offset,
        })
    }

    pub fn affine(slope: Vector, offset: f64) -> Self {
        Self::Affine { slope, offset }
    }

    pub fn max_of(members: Vec<ScalarFunction>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::InvalidFunction("max-of needs at least one member".into()))?;
        let d = first.dim();
        if let Some(bad) = members.iter().find(|m| m.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.dim(),
            });
        }
        Ok(Self::MaxOf(members))
    }

    /// `½‖w − center‖²_H + offset`.
    pub fn centered_quadratic(hessian: Matrix, center: &Vector, offset: f64) -> Result<Self> {
        let linear = -(&hessian * center);
        let c = 0.5 * center.dot(&(&hessian * center)) + offset;
        Self::quadratic(hessian, linear, c)
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Quadratic { linear, .. } => linear.len(),
            Self::Affine { slope, .. } => slope.len(),
            Self::MaxOf(m) => m[0].dim(),
        }
    }

    fn check_dim(&self, w: &Vector) -> Result<()> {
        if w.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: w.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, w: &Vector) -> Result<f64> {
        self.check_dim(w)?;
        Ok(self.value_unchecked(w))
    }

    fn value_unchecked(&self, w: &Vector) -> f64 {
        match self {
            Self::Quadratic {
                hessian,
                linear,
                offset,
            } => 0.5 * w.dot(&(hessian * w)) + linear.dot(w) + offset,
            Self::Affine { slope, offset } => slope.dot(w) + offset,
            Self::MaxOf(m) => m
                .iter()
                .map(|f| f.value_unchecked(w))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Index of the lowest-index member attaining the maximum.
    fn active_member(members: &[ScalarFunction], w: &Vector) -> usize {
        let mut best = 0;
        let mut best_val = members[0].value_unchecked(w);
        for (i, m) in members.iter().enumerate().skip(1) {
            let v = m.value_unchecked(w);
            if v > best_val {
                best = i;
                best_val = v;
            }
        }
        best
    }

    /// Gradient; for `MaxOf` the gradient of the lowest-index maximizer.
    pub fn grad(&self, w: &Vector) -> Result<Vector> {
        self.check_dim(w)?;
        Ok(self.grad_unchecked(w))
    }

    fn grad_unchecked(&self, w: &Vector) -> Vector {
        match self {
            Self::Quadratic {
                hessian, linear, ..
            } => hessian * w + linear,
            Self::Affine { slope, .. } => slope.clone(),
            Self::MaxOf(m) => m[Self::active_member(m, w)].grad_unchecked(w),
        }
    }

    pub fn hessian(&self, w: &Vector) -> Result<Matrix> {
        self.check_dim(w)?;
        Ok(match self {
            Self::Quadratic { hessian, .. } => hessian.clone(),
            Self::Affine { slope, .. } => Matrix::zeros(slope.len(), slope.len()),
            Self::MaxOf(m) => m[Self::active_member(m, w)].hessian(w)?,
        })
    }

    /// Closed-form `argmin_x fn(x) + ‖x − v‖²/(2η)`.
    pub fn prox(&self, eta: f64, v: &Vector) -> Result<Vector> {
        if !(eta > 0.0) {
            return Err(Error::InvalidParameter(format!("prox step must be positive, got {eta}")));
        }
        self.check_dim(v)?;
        match self {
            Self::Quadratic {
                hessian, linear, ..
            } => {
                let d = v.len();
                let system = Matrix::identity(d, d) + hessian * eta;
                let rhs = v - linear * eta;
                system
                    .cholesky()
                    .map(|c| c.solve(&rhs))
                    .ok_or(Error::SingularSystem)
            }
            Self::Affine { slope, .. } => Ok(v - slope * eta),
            Self::MaxOf(_) => Err(Error::NoClosedFormProx),
        }
    }

    /// `weight_a·a + weight_b·b` when both are quadratic or affine.
    pub fn blend(weight_a: f64, a: &Self, weight_b: f64, b: &Self) -> Option<Self> {
        let (ha, la, ca) = a.as_quadratic_parts()?;
        let (hb, lb, cb) = b.as_quadratic_parts()?;
        Some(Self::Quadratic {
            hessian: ha * weight_a + hb * weight_b,
            linear: la * weight_a + lb * weight_b,
            offset: weight_a * ca + weight_b * cb,
        })
    }

    fn as_quadratic_parts(&self) -> Option<(Matrix, Vector, f64)> {
        match self {
            Self::Quadratic {
                hessian,
                linear,
                offset,
            } => Some((hessian.clone(), linear.clone(), *offset)),
            Self::Affine { slope, offset } => Some((
                Matrix::zeros(slope.len(), slope.len()),
                slope.clone(),
                *offset,
            )),
            Self::MaxOf(_) => None,
        }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, Self::Affine { .. })
    }

    /// Spectral norm of the Hessian (the gradient's Lipschitz constant).
    /// For `MaxOf` this is the largest member value, which bounds each
    /// piece but not the nonsmooth maximum itself.
    pub fn smoothness(&self) -> f64 {
        match self {
            Self::Quadratic { hessian, .. } => spectral_norm(hessian),
            Self::Affine { .. } => 0.0,
            Self::MaxOf(m) => m.iter().map(Self::smoothness).fold(0.0, f64::max),
        }
    }

    /// Global minimum value, `None` when unbounded below or not available in
    /// closed form.
    pub fn minimum(&self) -> Option<f64> {
        match self {
            Self::Quadratic {
                hessian,
                linear,
                offset,
            } => {
                // PD case only; singular PSD hessians are reported as unknown.
                let x = hessian.clone().cholesky()?.solve(&(-linear));
                Some(0.5 * x.dot(&(hessian * &x)) + linear.dot(&x) + offset)
            }
            Self::Affine { slope, offset } => (slope.amax() == 0.0).then_some(*offset),
            Self::MaxOf(_) => None,
        }
    }

    /// Returns a copy with `shift` added to the function value.
    pub fn shifted(&self, shift: f64) -> Self {
        match self {
            Self::Quadratic {
                hessian,
                linear,
                offset,
            } => Self::Quadratic {
                hessian: hessian.clone(),
                linear: linear.clone(),
                offset: offset + shift,
            },
            Self::Affine { slope, offset } => Self::Affine {
                slope: slope.clone(),
                offset: offset + shift,
            },
            Self::MaxOf(m) => Self::MaxOf(m.iter().map(|f| f.shifted(shift)).collect()),
        }
    }
}

pub(crate) fn spectral_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .fold(0.0_f64, |acc, e| acc.max(e.abs()))
}

/// Known constants of an instance. Every field is optional; solvers and
/// schedules report which one is missing when they need it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Constants {
    /// Gradient bound `G` of both f and g, valid on `‖w‖ <= ball_radius`.
    pub lipschitz: Option<f64>,
    pub ball_radius: Option<f64>,
    /// Smoothness `L` shared by f and g.
    pub smoothness: Option<f64>,
    /// `min f`; `None` when unbounded below or unknown.
    pub f_tilde: Option<f64>,
    pub g_tilde: Option<f64>,
    pub w_star: Option<Vector>,
    pub f_star: Option<f64>,
    pub lambda_star: Option<f64>,
    /// `‖w₁ − w*‖` for the default start `w₁ = 0`.
    pub distance: Option<f64>,
    pub delta_max: Option<f64>,
}

/// The pair `(f, g)` of `min f(w) s.t. g(w) <= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub f: ScalarFunction,
    pub g: ScalarFunction,
    pub constants: Constants,
    pub seed: Option<u64>,
}

impl ProblemInstance {
    pub fn new(f: ScalarFunction, g: ScalarFunction) -> Result<Self> {
        if f.dim() != g.dim() {
            return Err(Error::DimensionMismatch {
                expected: f.dim(),
                got: g.dim(),
            });
        }
        if f.dim() == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        Ok(Self {
            f,
            g,
            constants: Constants::default(),
            seed: None,
        })
    }

    pub fn with_constants(mut self, constants: Constants) -> Result<Self> {
        self.constants = constants;
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.constants;
        if let Some(w) = &c.w_star {
            let gv = self.g.eval(w)?;
            if gv > 1e-8 {
                return Err(Error::InvalidParameter(format!(
                    "reference solution is infeasible: g(w*) = {gv:e}"
                )));
            }
        }
        if let (Some(ft), Some(fs)) = (c.f_tilde, c.f_star) {
            if ft > fs + 1e-12 * (1.0 + fs.abs()) {
                return Err(Error::InvalidParameter(format!(
                    "f_tilde {ft} exceeds f_star {fs}"
                )));
            }
        }
        Ok(())
    }

    /// Distance from `w1` to the stored reference solution.
    pub fn distance_from(&self, w1: &Vector) -> Result<f64> {
        let w_star = self
            .constants
            .w_star
            .as_ref()
            .ok_or(Error::OracleRequired("w_star is needed to compute D"))?;
        if w_star.len() != w1.len() {
            return Err(Error::DimensionMismatch {
                expected: w_star.len(),
                got: w1.len(),
            });
        }
        Ok((w1 - w_star).norm())
    }
}

/// `max{f(w*) − f̃, g(w*) − g̃}` with affine components excluded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaMax {
    pub value: f64,
    pub f_excluded: bool,
    pub g_excluded: bool,
}

pub fn delta_max(p: &ProblemInstance) -> Result<DeltaMax> {
    let w_star = p
        .constants
        .w_star
        .as_ref()
        .ok_or(Error::OracleRequired("delta_max needs w_star"))?;

    // Affine parts have L = 0, so their L·Δ contribution is defined as 0.
    let excess = |func: &ScalarFunction, stored: Option<f64>| -> Result<Option<f64>> {
        if func.is_affine() {
            return Ok(None);
        }
        let floor = stored
            .or_else(|| func.minimum())
            .ok_or(Error::MissingConstant("f_tilde/g_tilde"))?;
        Ok(Some(func.eval(w_star)? - floor))
    };
    let f_term = excess(&p.f, p.constants.f_tilde)?;
    let g_term = excess(&p.g, p.constants.g_tilde)?;
    let value = f_term
        .into_iter()
        .chain(g_term)
        .fold(0.0_f64, f64::max);
    Ok(DeltaMax {
        value,
        f_excluded: f_term.is_none(),
        g_excluded: g_term.is_none(),
    })
}

const REGULARIZATION: f64 = 0.1;

/// Seeded random instance `f = ½‖w − w_f‖²_{H_f}`, `g = ½‖w − w_g‖²_{H_g} − r`.
///
/// Hessians are `MᵀM/d + 0.1·I` with standard normal `M`; centers are standard
/// normal. The radius `r = ¼·½‖w_f − w_g‖²_{H_g} + 0.1` keeps `w_g` strictly
/// feasible and makes the unconstrained minimizer `w_f` infeasible. When the
/// centers are so close that this would fail, `r` falls back to half the
/// centers' g-distance. `G` is certified on the ball
/// `‖w‖ <= 2(‖w_f‖ + ‖w_g‖) + 2√(2r/λ_min(H_g))`. The reference solution is
/// left empty; see [`crate::oracle::generate_solved_instance`].
pub fn generate_quadratic_instance(dim: usize, seed: u64) -> Result<ProblemInstance> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };

    let mut random_hessian = || {
        let m = Matrix::from_fn(dim, dim, |_, _| normal());
        let h = m.transpose() * &m / dim as f64 + Matrix::identity(dim, dim) * REGULARIZATION;
        (&h + h.transpose()) * 0.5
    };
    let h_f = random_hessian();
    let h_g = random_hessian();
    let w_f = Vector::from_fn(dim, |_, _| normal());
    let w_g = Vector::from_fn(dim, |_, _| normal());

    let diff = &w_f - &w_g;
    let half_dist = 0.5 * diff.dot(&(&h_g * &diff));
    let mut r = 0.25 * half_dist + 0.1;
    if half_dist - r <= 0.0 {
        r = 0.5 * half_dist;
    }

    let lambda_min_g = SymmetricEigen::new(h_g.clone()).eigenvalues.min();
    let norm_f = spectral_norm(&h_f);
    let norm_g = spectral_norm(&h_g);
    let radius = 2.0 * (w_f.norm() + w_g.norm()) + 2.0 * (2.0 * r / lambda_min_g).sqrt();
    // ‖H(w − c)‖ <= ‖H‖(‖w‖ + ‖c‖) on the ball.
    let lipschitz = (norm_f * (radius + w_f.norm())).max(norm_g * (radius + w_g.norm()));

    let f = ScalarFunction::centered_quadratic(h_f, &w_f, 0.0)?;
    let g = ScalarFunction::centered_quadratic(h_g, &w_g, -r)?;
    let mut p = ProblemInstance::new(f, g)?;
    p.seed = Some(seed);
    p.constants = Constants {
        lipschitz: Some(lipschitz),
        ball_radius: Some(radius),
        smoothness: Some(norm_f.max(norm_g)),
        f_tilde: Some(0.0),
        g_tilde: Some(-r),
        ..Constants::default()
    };
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::dvector;

    fn identity_quadratic(d: usize) -> ScalarFunction {
        ScalarFunction::quadratic(Matrix::identity(d, d), Vector::zeros(d), 0.0).unwrap()
    }

    #[test]
    fn eval_examples() {
        let q = identity_quadratic(2);
        assert_eq!(q.eval(&dvector![3.0, 4.0]).unwrap(), 12.5);
        let a = ScalarFunction::affine(dvector![1.0, 0.0], -1.0);
        assert_eq!(a.eval(&dvector![0.0, 0.0]).unwrap(), -1.0);
        let abs = ScalarFunction::max_of(vec![
            ScalarFunction::affine(dvector![1.0, 0.0], 0.0),
            ScalarFunction::affine(dvector![-1.0, 0.0], 0.0),
        ])
        .unwrap();
        assert_eq!(abs.eval(&dvector![2.0, 7.0]).unwrap(), 2.0);
        assert_eq!(abs.eval(&dvector![-2.0, 7.0]).unwrap(), 2.0);
    }

    #[test]
    fn grad_examples() {
        let q = identity_quadratic(2);
        assert_eq!(q.grad(&dvector![3.0, 4.0]).unwrap(), dvector![3.0, 4.0]);
        let a = ScalarFunction::affine(dvector![1.0, 0.0], -1.0);
        assert_eq!(a.grad(&dvector![5.0, -3.0]).unwrap(), dvector![1.0, 0.0]);
    }

    #[test]
    fn max_of_ties_pick_lowest_index() {
        let abs = ScalarFunction::max_of(vec![
            ScalarFunction::affine(dvector![1.0, 0.0], 0.0),
            ScalarFunction::affine(dvector![-1.0, 0.0], 0.0),
        ])
        .unwrap();
        assert_eq!(abs.grad(&dvector![0.0, 1.0]).unwrap(), dvector![1.0, 0.0]);
        assert_eq!(abs.grad(&dvector![-1.0, 1.0]).unwrap(), dvector![-1.0, 0.0]);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let q = identity_quadratic(2);
        assert_eq!(
            q.eval(&dvector![1.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 1
            })
        );
        assert!(q.grad(&dvector![1.0, 2.0, 3.0]).is_err());
        assert!(q.prox(1.0, &dvector![1.0]).is_err());
    }

    #[test]
    fn constructor_rejects_bad_hessians() {
        let asym = Matrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(ScalarFunction::quadratic(asym, Vector::zeros(2), 0.0).is_err());
        let indefinite = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(ScalarFunction::quadratic(indefinite, Vector::zeros(2), 0.0).is_err());
        assert!(ScalarFunction::max_of(vec![]).is_err());
    }

    #[test]
    fn prox_examples() {
        let q = identity_quadratic(2);
        assert!((q.prox(1.0, &dvector![2.0, 2.0]).unwrap() - dvector![1.0, 1.0]).amax() < 1e-15);
        let a = ScalarFunction::affine(dvector![1.0, 0.0], 3.0);
        assert_eq!(a.prox(0.5, &dvector![0.0, 0.0]).unwrap(), dvector![-0.5, 0.0]);
        assert!(q.prox(0.0, &dvector![0.0, 0.0]).is_err());
        let m = ScalarFunction::max_of(vec![a]).unwrap();
        assert_eq!(m.prox(1.0, &dvector![0.0, 0.0]), Err(Error::NoClosedFormProx));
    }

    #[test]
    fn prox_first_order_condition() {
        let p = generate_quadratic_instance(6, 3).unwrap();
        let v = Vector::from_fn(6, |i, _| (i as f64 - 2.5) * 0.7);
        for eta in [0.01, 0.3, 5.0] {
            let x = p.f.prox(eta, &v).unwrap();
            let residual = p.f.grad(&x).unwrap() + (&x - &v) / eta;
            assert!(residual.norm() < 1e-9, "eta={eta}: {}", residual.norm());
        }
    }

    #[test]
    fn generated_instance_is_deterministic() {
        let a = generate_quadratic_instance(10, 42).unwrap();
        let b = generate_quadratic_instance(10, 42).unwrap();
        assert_eq!(a, b);
        let c = generate_quadratic_instance(10, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generated_instance_has_slater_point_and_active_constraint() {
        for seed in [1, 7, 42, 1234] {
            let p = generate_quadratic_instance(10, seed).unwrap();
            let (w_f, w_g) = centers(&p);
            let r = -p.constants.g_tilde.unwrap();
            assert_relative_eq!(p.g.eval(&w_g).unwrap(), -r, epsilon = 1e-12);
            assert!(r > 0.0);
            assert!(p.g.eval(&w_f).unwrap() > 0.0, "seed {seed}");
            assert_relative_eq!(p.f.eval(&w_f).unwrap(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn seed_42_minimizer_of_f_is_infeasible() {
        let p = generate_quadratic_instance(10, 42).unwrap();
        let (w_f, _) = centers(&p);
        assert!(p.g.eval(&w_f).unwrap() > 0.1);
    }

    #[test]
    fn one_dimensional_instance() {
        let p = generate_quadratic_instance(1, 5).unwrap();
        assert_eq!(p.dim(), 1);
        let (w_f, w_g) = centers(&p);
        assert!(p.g.eval(&w_g).unwrap() < 0.0);
        assert!(p.g.eval(&w_f).unwrap() > 0.0);
    }

    #[test]
    fn lipschitz_bound_holds_on_ball() {
        let p = generate_quadratic_instance(10, 9).unwrap();
        let radius = p.constants.ball_radius.unwrap();
        let lip = p.constants.lipschitz.unwrap();
        for k in 0..50 {
            let dir = Vector::from_fn(10, |i, _| ((i * 7 + k * 3) % 11) as f64 - 5.0);
            let w = dir.normalize() * radius;
            assert!(p.f.grad(&w).unwrap().norm() <= lip);
            assert!(p.g.grad(&w).unwrap().norm() <= lip);
        }
    }

    fn centers(p: &ProblemInstance) -> (Vector, Vector) {
        let center = |f: &ScalarFunction| match f {
            ScalarFunction::Quadratic {
                hessian, linear, ..
            } => hessian.clone().cholesky().unwrap().solve(&(-linear)),
            _ => unreachable!(),
        };
        (center(&p.f), center(&p.g))
    }

    #[test]
    fn delta_max_examples() {
        let shifted = ScalarFunction::centered_quadratic(
            Matrix::identity(2, 2),
            &dvector![2.0, 0.0],
            0.0,
        )
        .unwrap();
        let ball = ScalarFunction::quadratic(Matrix::identity(2, 2) * 2.0, Vector::zeros(2), -1.0)
            .unwrap();
        let p = ProblemInstance::new(shifted.clone(), ball)
            .unwrap()
            .with_constants(Constants {
                w_star: Some(dvector![1.0, 0.0]),
                ..Constants::default()
            })
            .unwrap();
        let dm = delta_max(&p).unwrap();
        assert_relative_eq!(dm.value, 1.0, epsilon = 1e-12);

        let same = ProblemInstance::new(shifted.clone(), shifted.shifted(-1.0))
            .unwrap()
            .with_constants(Constants {
                w_star: Some(dvector![2.0, 0.0]),
                ..Constants::default()
            })
            .unwrap();
        assert_relative_eq!(delta_max(&same).unwrap().value, 0.0, epsilon = 1e-12);

        let affine_g = ProblemInstance::new(
            shifted.clone(),
            ScalarFunction::affine(dvector![1.0, 0.0], -1.0),
        )
        .unwrap()
        .with_constants(Constants {
            w_star: Some(dvector![1.0, 0.0]),
            ..Constants::default()
        })
        .unwrap();
        let dm = delta_max(&affine_g).unwrap();
        assert!(dm.g_excluded && !dm.f_excluded);
        assert_relative_eq!(dm.value, 0.5, epsilon = 1e-12);

        let no_oracle = ProblemInstance::new(shifted.clone(), shifted).unwrap();
        assert!(matches!(delta_max(&no_oracle), Err(Error::OracleRequired(_))));
    }

    #[test]
    fn infeasible_reference_is_rejected() {
        let q = identity_quadratic(2);
        let g = ScalarFunction::affine(dvector![1.0, 0.0], -1.0);
        let res = ProblemInstance::new(q, g).unwrap().with_constants(Constants {
            w_star: Some(dvector![2.0, 0.0]),
            ..Constants::default()
        });
        assert!(res.is_err());
    }
}
