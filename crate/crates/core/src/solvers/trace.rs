use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::problem::Vector;

use super::Method;

/// Column header of exported traces; iterate coordinates follow as
/// `w_1, …, w_d`.
pub const TRACE_HEADER: [&str; 6] = ["t", "f", "g", "sigma", "in_A", "u_norm"];

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub t: usize,
    pub w: Vector,
    pub f: f64,
    pub g: f64,
    /// Switching weight at `w_t`.
    pub sigma: f64,
    pub in_a: bool,
    /// Norm of the update direction used to leave `w_t`.
    pub u_norm: f64,
}

/// Residual history of one implicit solve.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolve {
    pub step: usize,
    pub residuals: Vec<f64>,
}

impl InnerSolve {
    pub fn iterations(&self) -> usize {
        self.residuals.len().saturating_sub(1)
    }

    /// Largest ratio of consecutive residuals above `floor`.
    pub fn max_contraction(&self, floor: f64) -> Option<f64> {
        self.residuals
            .windows(2)
            .filter(|w| w[0] > floor && w[1] > floor)
            .map(|w| w[1] / w[0])
            .reduce(f64::max)
    }

    pub fn is_monotone(&self) -> bool {
        self.residuals.windows(2).all(|w| w[1] <= w[0])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub method: Method,
    pub epsilon: f64,
    pub steps: Vec<TraceStep>,
    /// `w_{T+1}`
    pub final_w: Vector,
    /// Fixed-point solves of `ssppm_implicit`, one per step.
    pub inner: Vec<InnerSolve>,
    /// `1 − η·G_F` when the instance carries `G` and `L`.
    pub contraction_margin: Option<f64>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn f_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.steps.iter().map(|s| s.f)
    }

    pub fn g_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.steps.iter().map(|s| s.g)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_steps_csv(&self.steps, out)
    }
}

pub fn average_solution(trace: &Trace) -> Result<Vector> {
    average_steps(&trace.steps, trace.method)
}

/// Averaged iterate over the steps flagged `in_A`: uniform for hard methods,
/// weighted by `1 − σ_t` for soft ones.
pub fn average_steps(steps: &[TraceStep], method: Method) -> Result<Vector> {
    let first = steps
        .first()
        .ok_or_else(|| Error::InvalidParameter("trace is empty".into()))?;
    let mut acc = Vector::zeros(first.w.len());
    let mut total = 0.0;
    for s in steps.iter().filter(|s| s.in_a) {
        let weight = if method.is_soft() { 1.0 - s.sigma } else { 1.0 };
        acc += &s.w * weight;
        total += weight;
    }
    if total <= 0.0 {
        let hint = if method.is_soft() {
            "soft averaging needs some g(w_t) < epsilon"
        } else {
            "hard averaging needs some g(w_t) <= epsilon"
        };
        return Err(Error::EmptyFeasibleSet { hint: hint.into() });
    }
    Ok(acc / total)
}

/// Averaging weights `α_t` over the `in_A` steps, in step order.
pub fn averaging_weights(steps: &[TraceStep], method: Method) -> Vec<(usize, f64)> {
    let raw: Vec<(usize, f64)> = steps
        .iter()
        .filter(|s| s.in_a)
        .map(|s| (s.t, if method.is_soft() { 1.0 - s.sigma } else { 1.0 }))
        .collect();
    let total: f64 = raw.iter().map(|(_, w)| w).sum();
    raw.into_iter().map(|(t, w)| (t, w / total)).collect()
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_steps_csv<W: Write>(steps: &[TraceStep], out: W) -> Result<()> {
    let dim = steps.first().map_or(0, |s| s.w.len());
    let mut wtr = csv::Writer::from_writer(out);
    let header: Vec<String> = TRACE_HEADER
        .iter()
        .map(|s| s.to_string())
        .chain((1..=dim).map(|i| format!("w_{i}")))
        .collect();
    wtr.write_record(&header).map_err(csv_err)?;
    for s in steps {
        let mut row = vec![
            s.t.to_string(),
            fmt17(s.f),
            fmt17(s.g),
            fmt17(s.sigma),
            if s.in_a { "1" } else { "0" }.to_string(),
            fmt17(s.u_norm),
        ];
        row.extend(s.w.iter().map(|&x| fmt17(x)));
        wtr.write_record(&row).map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| Error::Io(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::Io(_) => Error::Io(e.to_string()),
        _ => Error::Parse(e.to_string()),
    }
}

pub fn read_steps_csv<R: Read>(input: R) -> Result<Vec<TraceStep>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers().map_err(csv_err)?.clone();
    let names: Vec<&str> = header.iter().collect();
    if names.len() < TRACE_HEADER.len() || names[..TRACE_HEADER.len()] != TRACE_HEADER {
        return Err(Error::Parse(format!(
            "trace header must start with {}",
            TRACE_HEADER.join(",")
        )));
    }
    let dim = names.len() - TRACE_HEADER.len();
    if dim == 0 {
        return Err(Error::Parse("trace has no iterate columns".into()));
    }

    let mut steps = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let line = row + 2;
        let num = |col: usize| -> Result<f64> {
            let field = record.get(col).unwrap_or("");
            field.trim().parse::<f64>().map_err(|_| {
                Error::Parse(format!("line {line}, column {}: bad number {field:?}", names[col]))
            })
        };
        let t = record
            .get(0)
            .and_then(|s| s.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::Parse(format!("line {line}: bad step index")))?;
        let in_a = match record.get(4).map(str::trim) {
            Some("1") | Some("true") => true,
            Some("0") | Some("false") => false,
            other => {
                return Err(Error::Parse(format!("line {line}: bad in_A value {other:?}")))
            }
        };
        let w = (0..dim)
            .map(|i| num(TRACE_HEADER.len() + i))
            .collect::<Result<Vec<f64>>>()?;
        steps.push(TraceStep {
            t,
            w: Vector::from_vec(w),
            f: num(1)?,
            g: num(2)?,
            sigma: num(3)?,
            in_a,
            u_norm: num(5)?,
        });
    }
    if steps.is_empty() {
        return Err(Error::Parse("trace has no rows".into()));
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn step(t: usize, w: Vector, sigma: f64, in_a: bool) -> TraceStep {
        TraceStep {
            t,
            w,
            f: 0.0,
            g: 0.0,
            sigma,
            in_a,
            u_norm: 0.0,
        }
    }

    #[test]
    fn hard_average_is_uniform_mean() {
        let steps = vec![
            step(1, dvector![1.0, 0.0], 0.0, true),
            step(2, dvector![100.0, 0.0], 1.0, false),
            step(3, dvector![3.0, 0.0], 0.0, true),
        ];
        assert_eq!(average_steps(&steps, Method::Sgm).unwrap(), dvector![2.0, 0.0]);
    }

    #[test]
    fn soft_average_weights_by_one_minus_sigma() {
        let steps = vec![
            step(1, dvector![1.0, 0.0], 0.5, true),
            step(2, dvector![3.0, 0.0], 0.75, true),
        ];
        let avg = average_steps(&steps, Method::Ssgm).unwrap();
        assert!((avg[0] - 5.0 / 3.0).abs() < 1e-15 && avg[1] == 0.0);
        let weights = averaging_weights(&steps, Method::Ssgm);
        assert!((weights[0].1 - 2.0 / 3.0).abs() < 1e-15);
        assert!((weights[1].1 - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn empty_set_is_an_error() {
        let steps = vec![step(1, dvector![1.0], 1.0, false)];
        assert!(matches!(
            average_steps(&steps, Method::SsppmExplicit),
            Err(Error::EmptyFeasibleSet { .. })
        ));
        assert!(average_steps(&[], Method::Sgm).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let steps = vec![
            TraceStep {
                t: 1,
                w: dvector![0.1, -1.0 / 3.0],
                f: std::f64::consts::PI,
                g: -1e-300,
                sigma: 0.123_456_789_012_345_68,
                in_a: true,
                u_norm: 5e-324,
            },
            TraceStep {
                t: 2,
                w: dvector![f64::MAX, f64::MIN_POSITIVE],
                f: 1.0 / 7.0,
                g: 2.0f64.sqrt(),
                sigma: 1.0,
                in_a: false,
                u_norm: 0.0,
            },
        ];
        let mut buf = Vec::new();
        write_steps_csv(&steps, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,f,g,sigma,in_A,u_norm,w_1,w_2\n"));
        assert_eq!(read_steps_csv(buf.as_slice()).unwrap(), steps);
    }

    #[test]
    fn corrupt_csv_is_rejected() {
        assert!(matches!(
            read_steps_csv("a,b\n1,2\n".as_bytes()),
            Err(Error::Parse(_))
        ));
        let bad = "t,f,g,sigma,in_A,u_norm,w_1\n1,0.5,zz,0,1,0,1\n";
        assert!(matches!(read_steps_csv(bad.as_bytes()), Err(Error::Parse(_))));
        let header_only = "t,f,g,sigma,in_A,u_norm,w_1\n";
        assert!(read_steps_csv(header_only.as_bytes()).is_err());
    }
}
