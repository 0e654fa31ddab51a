//! JSON form of problem instances.
//!
//! ```json
//! {
//!   "dim": 2,
//!   "seed": 7,
//!   "f": { "kind": "quadratic", "H": [[1, 0], [0, 1]], "b": [0, 0], "c": 0 },
//!   "g": { "kind": "affine", "a": [1, 0], "c": -1 },
//!   "constants": { "G": null, "L": 1, "w_star": null, ... }
//! }
//! ```
//!
//! `H` is listed row by row. Absent constants are `null`; an objective that
//! is unbounded below has `"f_tilde": null`. Numbers are written in shortest
//! round-trip form, so a save/load cycle reproduces the instance exactly.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{Constants, Matrix, ProblemInstance, ScalarFunction, Vector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum FunctionDoc {
    Quadratic {
        #[serde(rename = "H")]
        hessian: Vec<Vec<f64>>,
        b: Vec<f64>,
        c: f64,
    },
    Affine {
        a: Vec<f64>,
        c: f64,
    },
    Max {
        members: Vec<FunctionDoc>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantsDoc {
    #[serde(rename = "G", default)]
    lipschitz: Option<f64>,
    #[serde(default)]
    ball_radius: Option<f64>,
    #[serde(rename = "L", default)]
    smoothness: Option<f64>,
    #[serde(default)]
    f_tilde: Option<f64>,
    #[serde(default)]
    g_tilde: Option<f64>,
    #[serde(default)]
    w_star: Option<Vec<f64>>,
    #[serde(default)]
    f_star: Option<f64>,
    #[serde(default)]
    lambda_star: Option<f64>,
    #[serde(rename = "D", default)]
    distance: Option<f64>,
    #[serde(default)]
    delta_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    dim: usize,
    #[serde(default)]
    seed: Option<u64>,
    f: FunctionDoc,
    g: FunctionDoc,
    #[serde(default)]
    constants: ConstantsDoc,
}

impl FunctionDoc {
    fn from_function(func: &ScalarFunction) -> Self {
        match func {
            ScalarFunction::Quadratic {
                hessian,
                linear,
                offset,
            } => FunctionDoc::Quadratic {
                hessian: hessian
                    .row_iter()
                    .map(|r| r.iter().copied().collect())
                    .collect(),
                b: linear.iter().copied().collect(),
                c: *offset,
            },
            ScalarFunction::Affine { slope, offset } => FunctionDoc::Affine {
                a: slope.iter().copied().collect(),
                c: *offset,
            },
            ScalarFunction::MaxOf(members) => FunctionDoc::Max {
                members: members.iter().map(Self::from_function).collect(),
            },
        }
    }

    fn into_function(self, name: &str) -> Result<ScalarFunction> {
        match self {
            FunctionDoc::Quadratic { hessian, b, c } => {
                let d = b.len();
                if hessian.len() != d || hessian.iter().any(|row| row.len() != d) {
                    return Err(Error::Parse(format!("{name}.H must be a {d}x{d} matrix")));
                }
                let h = Matrix::from_fn(d, d, |i, j| hessian[i][j]);
                ScalarFunction::quadratic(h, Vector::from_vec(b), c)
                    .map_err(|e| Error::Parse(format!("{name}: {e}")))
            }
            FunctionDoc::Affine { a, c } => Ok(ScalarFunction::affine(Vector::from_vec(a), c)),
            FunctionDoc::Max { members } => {
                let members = members
                    .into_iter()
                    .enumerate()
                    .map(|(i, m)| m.into_function(&format!("{name}.members[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                ScalarFunction::max_of(members).map_err(|e| Error::Parse(format!("{name}: {e}")))
            }
        }
    }
}

impl From<&Constants> for ConstantsDoc {
    fn from(c: &Constants) -> Self {
        Self {
            lipschitz: c.lipschitz,
            ball_radius: c.ball_radius,
            smoothness: c.smoothness,
            f_tilde: c.f_tilde,
            g_tilde: c.g_tilde,
            w_star: c.w_star.as_ref().map(|w| w.iter().copied().collect()),
            f_star: c.f_star,
            lambda_star: c.lambda_star,
            distance: c.distance,
            delta_max: c.delta_max,
        }
    }
}

impl From<ConstantsDoc> for Constants {
    fn from(c: ConstantsDoc) -> Self {
        Self {
            lipschitz: c.lipschitz,
            ball_radius: c.ball_radius,
            smoothness: c.smoothness,
            f_tilde: c.f_tilde,
            g_tilde: c.g_tilde,
            w_star: c.w_star.map(Vector::from_vec),
            f_star: c.f_star,
            lambda_star: c.lambda_star,
            distance: c.distance,
            delta_max: c.delta_max,
        }
    }
}

pub fn instance_to_json(p: &ProblemInstance) -> String {
    let doc = InstanceDoc {
        dim: p.dim(),
        seed: p.seed,
        f: FunctionDoc::from_function(&p.f),
        g: FunctionDoc::from_function(&p.g),
        constants: ConstantsDoc::from(&p.constants),
    };
    serde_json::to_string_pretty(&doc).expect("instance documents always serialize")
}

pub fn instance_from_json(text: &str) -> Result<ProblemInstance> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let f = doc.f.into_function("f")?;
    let g = doc.g.into_function("g")?;
    if f.dim() != doc.dim {
        return Err(Error::Parse(format!(
            "dim is {} but f has dimension {}",
            doc.dim,
            f.dim()
        )));
    }
    let mut p = ProblemInstance::new(f, g).map_err(|e| Error::Parse(e.to_string()))?;
    p.seed = doc.seed;
    if let Some(w) = &doc.constants.w_star {
        if w.len() != doc.dim {
            return Err(Error::Parse(format!(
                "constants.w_star has length {}, expected {}",
                w.len(),
                doc.dim
            )));
        }
    }
    p.with_constants(doc.constants.into())
        .map_err(|e| Error::Parse(format!("constants: {e}")))
}

pub fn save_instance(p: &ProblemInstance, path: &Path) -> Result<()> {
    fs::write(path, instance_to_json(p) + "\n")
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn load_instance(path: &Path) -> Result<ProblemInstance> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    instance_from_json(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::generate_solved_instance;
    use nalgebra::dvector;

    #[test]
    fn generated_instance_round_trips_exactly() {
        let p = generate_solved_instance(10, 7).unwrap();
        let back = instance_from_json(&instance_to_json(&p)).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn max_and_affine_round_trip() {
        let g = ScalarFunction::max_of(vec![
            ScalarFunction::affine(dvector![1.0, 0.0], -1.0),
            ScalarFunction::affine(dvector![0.0, 1.0], -0.5),
        ])
        .unwrap();
        let f = ScalarFunction::affine(dvector![0.1, 0.2], 0.0);
        let p = ProblemInstance::new(f, g).unwrap();
        let text = instance_to_json(&p);
        assert!(text.contains("\"f_tilde\": null"));
        assert_eq!(instance_from_json(&text).unwrap(), p);
    }

    #[test]
    fn malformed_documents_are_parse_errors() {
        for text in [
            "{",
            r#"{"dim": 1, "f": {"kind": "cubic"}, "g": {"kind": "affine", "a": [1], "c": 0}}"#,
            r#"{"dim": 2, "f": {"kind": "affine", "a": [1], "c": 0}, "g": {"kind": "affine", "a": [1], "c": 0}}"#,
            r#"{"dim": 1, "f": {"kind": "quadratic", "H": [[-1]], "b": [0], "c": 0}, "g": {"kind": "affine", "a": [1], "c": 0}}"#,
        ] {
            assert!(matches!(instance_from_json(text), Err(Error::Parse(_))), "{text}");
        }
    }
}
