//! Experiment runner behind the `switchopt` binary: instance generation,
//! config-driven runs with CSV/JSON/gnuplot artifacts, and post-hoc
//! certification of stored traces.

mod config;
mod tuning;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

pub use config::{ExperimentConfig, InstanceSpec, Outputs, RunSpec, ScheduleSpec, Sweep};
pub use tuning::{tune_step, StepCandidate, TunedStep, TuningCriteria};

use crate::analysis::{certify, fit_power_law, tail_stats, Certificate, RateFit, TailStats};
use crate::error::{Error, Result};
use crate::io::{load_instance, save_instance};
use crate::oracle::{attach_reference, generate_solved_instance};
use crate::problem::{ProblemInstance, Vector};
use crate::solvers::{
    average_steps, read_steps_csv, run, theoretical_schedule, Method, ScheduleInputs,
    SolverConfig, Trace,
};
use crate::switching::{RuleKind, SwitchingRule};

/// Overrides the seed of generated instances in experiment configs.
pub const SEED_ENV: &str = "SWITCHOPT_SEED";

/// Fraction of the trace used for the rate table's log-log fits.
pub const RATE_WINDOW_FRACTION: f64 = 0.1;

/// Fraction of the trace summarized in the oscillation table.
pub const OSCILLATION_TAIL: f64 = 0.5;

pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const CERTIFICATION: i32 = 2;
    pub const IO: i32 = 3;
}

/// Process exit status for a failed command.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::EmptyFeasibleSet { .. } => exit::CERTIFICATION,
        Error::Io(_) | Error::Parse(_) => exit::IO,
        _ => exit::CONFIG,
    }
}

/// Writes a solved random instance to `out`.
pub fn cmd_generate(dim: usize, seed: u64, out: &Path) -> Result<ProblemInstance> {
    if dim == 0 {
        return Err(Error::Config("--dim must be at least 1".into()));
    }
    let p = generate_solved_instance(dim, seed)?;
    save_instance(&p, out)?;
    Ok(p)
}

/// Recomputes the averaged point of a stored trace under `method`'s rule
/// with tolerance `epsilon`, and certifies it.
///
/// Membership in the averaging set is re-derived from the `g` column, so a
/// stricter `epsilon` than the one used for the run shrinks the set.
pub fn cmd_certify(
    instance: &Path,
    trace: &Path,
    method: Method,
    epsilon: f64,
) -> Result<Certificate> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Config(format!("--epsilon must be positive, got {epsilon}")));
    }
    let p = load_instance(instance)?;
    let file = File::open(trace).map_err(|e| Error::Io(format!("{}: {e}", trace.display())))?;
    let mut steps = read_steps_csv(file).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", trace.display())),
        other => other,
    })?;
    if steps[0].w.len() != p.dim() {
        return Err(Error::Parse(format!(
            "{}: trace has {} coordinates, instance has {}",
            trace.display(),
            steps[0].w.len(),
            p.dim()
        )));
    }
    for s in &mut steps {
        s.in_a = if method.is_soft() {
            s.g < epsilon
        } else {
            s.g <= epsilon
        };
    }
    let w_bar = average_steps(&steps, method)?;
    certify(&p, &w_bar, epsilon)
}

/// One run after schedule resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannedRun {
    pub name: String,
    pub config: SolverConfig,
    pub w1: Vector,
    pub theorem: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub run: String,
    pub method: Method,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub eta: f64,
    pub epsilon: f64,
    pub rule: RuleKind,
    pub beta: Option<f64>,
    pub theorem: Option<u8>,
    pub certificate: Option<Certificate>,
    /// Why no certificate could be issued.
    pub error: Option<String>,
    pub w_bar: Option<Vec<f64>>,
    pub final_f: f64,
    pub final_g: f64,
    pub contraction_margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub run: String,
    pub method: Method,
    /// `f_gap` (`|f(w_t) − f*|`) or `g_plus` (`[g(w_t)]_+`).
    pub quantity: &'static str,
    pub fit: Option<RateFit>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationRow {
    pub run: String,
    pub method: Method,
    pub beta: f64,
    pub stats: TailStats,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub instance: ProblemInstance,
    pub traces: Vec<(PlannedRun, Trace)>,
    pub summaries: Vec<RunSummary>,
    pub rates: Vec<RateRow>,
    pub oscillation: Vec<OscillationRow>,
}

/// Reads the config at `config_path` and runs it into `out_dir`, honouring
/// `SWITCHOPT_SEED`.
pub fn cmd_run(config_path: &Path, out_dir: &Path, jobs: Option<usize>) -> Result<RunReport> {
    let cfg = ExperimentConfig::load(config_path)?;
    let seed_override = match std::env::var(SEED_ENV) {
        Ok(v) => Some(v.trim().parse::<u64>().map_err(|_| {
            Error::Config(format!("{SEED_ENV} must be an unsigned integer, got {v:?}"))
        })?),
        Err(_) => None,
    };
    let base = config_path.parent().unwrap_or(Path::new("."));
    run_experiment(&cfg, base, out_dir, jobs, seed_override)
}

pub fn resolve_instance(
    spec: &InstanceSpec,
    base: &Path,
    seed_override: Option<u64>,
) -> Result<ProblemInstance> {
    match spec {
        InstanceSpec::Generated { seed, dim } => {
            generate_solved_instance(*dim, seed_override.unwrap_or(*seed))
        }
        InstanceSpec::File { path } => {
            let path = if path.is_absolute() {
                path.clone()
            } else {
                base.join(path)
            };
            let p = load_instance(&path)?;
            if p.constants.w_star.is_some() {
                return Ok(p);
            }
            match attach_reference(p.clone()) {
                Ok(solved) => Ok(solved),
                Err(e) => {
                    log::warn!("no reference solution for {}: {e}", path.display());
                    Ok(p)
                }
            }
        }
    }
}

/// Expands sweeps and resolves every run's schedule against `p`.
pub fn plan_runs(cfg: &ExperimentConfig, p: &ProblemInstance) -> Result<Vec<PlannedRun>> {
    let mut planned: Vec<PlannedRun> = Vec::new();
    for (i, spec) in cfg.runs.iter().enumerate() {
        let at = format!("runs[{i}]");
        let base_name = spec.name.clone().unwrap_or_else(|| spec.method.to_string());
        let betas: Vec<Option<f64>> = match &cfg.sweep {
            Some(sweep) if spec.method.is_soft() => sweep.values.iter().copied().map(Some).collect(),
            _ => vec![None],
        };
        for beta in betas {
            let name = match beta {
                Some(b) => format!("{base_name}_beta{b}"),
                None => base_name.clone(),
            };
            let (config, w1) = resolve_run(spec, p, beta).map_err(|e| match e {
                Error::Config(msg) => Error::Config(format!("{at}: {msg}")),
                other => Error::Config(format!("{at}: {other}")),
            })?;
            planned.push(PlannedRun {
                name,
                config,
                w1,
                theorem: spec.schedule.theorem,
            });
        }
    }
    let mut seen = std::collections::HashMap::<String, usize>::new();
    for run in &mut planned {
        let count = seen.entry(run.name.clone()).or_insert(0);
        *count += 1;
        if *count > 1 {
            run.name = format!("{}_{}", run.name, count);
        }
    }
    Ok(planned)
}

fn resolve_run(
    spec: &RunSpec,
    p: &ProblemInstance,
    beta_override: Option<f64>,
) -> Result<(SolverConfig, Vector)> {
    let w1 = match &spec.w1 {
        Some(w) if w.len() != p.dim() => {
            return Err(Error::Config(format!(
                "w1 has length {}, instance dimension is {}",
                w.len(),
                p.dim()
            )))
        }
        Some(w) => Vector::from_column_slice(w),
        None => Vector::zeros(p.dim()),
    };
    let s = &spec.schedule;
    let mut config = match s.theorem {
        Some(theorem) => {
            let c = &p.constants;
            let inputs = ScheduleInputs {
                distance: p.distance_from(&w1)?,
                lipschitz: c.lipschitz,
                smoothness: c.smoothness,
                delta_max: c.delta_max,
                eta_free: s.eta,
            };
            theoretical_schedule(theorem, &inputs, spec.horizon)?.to_config(spec.horizon)?
        }
        None => {
            let eta = s.eta.expect("validated");
            let beta = beta_override.or(s.beta).unwrap_or(1.0);
            let rule = if !spec.method.is_soft() {
                SwitchingRule::hard(s.epsilon.expect("validated"))?
            } else if s.match_multiplier {
                let lambda = p
                    .constants
                    .lambda_star
                    .ok_or(Error::OracleRequired("match_multiplier needs lambda_star"))?;
                SwitchingRule::multiplier_matched_hinge(beta, lambda)?
            } else {
                let kind = s.rule.unwrap_or(RuleKind::TrimmedHinge);
                SwitchingRule::new(kind, s.epsilon.expect("validated"), beta)?
            };
            let mut cfg = SolverConfig::new(spec.method, spec.horizon, eta, rule.epsilon)?
                .with_rule(rule)?;
            cfg.rho = s.rho;
            cfg
        }
    };
    if let (Some(beta), Some(_)) = (beta_override, s.theorem) {
        config.rule.beta = beta;
        config.validate()?;
    }
    Ok((config, w1))
}

/// Runs a parsed config. `base` resolves relative instance paths.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    base: &Path,
    out_dir: &Path,
    jobs: Option<usize>,
    seed_override: Option<u64>,
) -> Result<RunReport> {
    cfg.validate()?;
    let p = resolve_instance(&cfg.instance, base, seed_override)?;
    let planned = plan_runs(cfg, &p)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::Io(format!("{}: {e}", out_dir.display())))?;
    save_instance(&p, &out_dir.join("instance.json"))?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = jobs {
        if k == 0 {
            return Err(Error::Config("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(k);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Io(format!("thread pool: {e}")))?;
    let write_traces = cfg.outputs.trace_csv || cfg.outputs.plots;
    let results: Vec<Result<(Trace, RunSummary)>> = pool.install(|| {
        planned
            .par_iter()
            .map(|run| execute_run(&p, run, out_dir, write_traces))
            .collect()
    });

    let mut traces = Vec::with_capacity(planned.len());
    let mut summaries = Vec::with_capacity(planned.len());
    for (run, result) in planned.into_iter().zip(results) {
        let (trace, summary) = result.inspect_err(|e| log::error!("run {}: {e}", run.name))?;
        summaries.push(summary);
        traces.push((run, trace));
    }

    let rates = if cfg.outputs.rate_table {
        let rows = rate_rows(&p, &traces);
        write_rate_table(&rows, &out_dir.join("rate_table.csv"))?;
        rows
    } else {
        Vec::new()
    };
    if cfg.outputs.plots {
        let names: Vec<&str> = traces.iter().map(|(r, _)| r.name.as_str()).collect();
        fs::write(out_dir.join("plot.gp"), plot_script(&names))?;
    }
    let oscillation = if cfg.sweep.is_some() {
        let rows = oscillation_rows(&traces)?;
        write_oscillation(&rows, &out_dir.join("oscillation.csv"))?;
        rows
    } else {
        Vec::new()
    };

    Ok(RunReport {
        instance: p,
        traces,
        summaries,
        rates,
        oscillation,
    })
}

fn execute_run(
    p: &ProblemInstance,
    run_plan: &PlannedRun,
    out_dir: &Path,
    write_trace: bool,
) -> Result<(Trace, RunSummary)> {
    let cfg = &run_plan.config;
    let trace = run(p, cfg, &run_plan.w1)?;
    if write_trace {
        let path = out_dir.join(format!("{}.csv", run_plan.name));
        let file = File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        trace.write_csv(BufWriter::new(file))?;
    }
    let (certificate, error, w_bar) = match average_steps(&trace.steps, cfg.method) {
        Ok(w_bar) => match certify(p, &w_bar, cfg.rule.epsilon) {
            Ok(c) => (Some(c), None, Some(w_bar.iter().copied().collect())),
            Err(e) => (None, Some(e.to_string()), Some(w_bar.iter().copied().collect())),
        },
        Err(e) => (None, Some(e.to_string()), None),
    };
    let last = trace.steps.last().expect("horizon is at least 1");
    let summary = RunSummary {
        run: run_plan.name.clone(),
        method: cfg.method,
        horizon: cfg.horizon,
        eta: cfg.eta,
        epsilon: cfg.rule.epsilon,
        rule: cfg.rule.kind,
        beta: cfg.rule.is_soft().then_some(cfg.rule.beta),
        theorem: run_plan.theorem,
        certificate,
        error,
        w_bar,
        final_f: last.f,
        final_g: last.g,
        contraction_margin: trace.contraction_margin,
    };
    let path = out_dir.join(format!("{}.certificate.json", run_plan.name));
    let json = serde_json::to_string_pretty(&summary).expect("summaries always serialize");
    fs::write(&path, json + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok((trace, summary))
}

/// `(t, |f(w_t) − f*|)` for a trace.
pub fn f_gap_series(trace: &Trace, f_star: f64) -> Vec<(f64, f64)> {
    trace
        .steps
        .iter()
        .map(|s| (s.t as f64, (s.f - f_star).abs()))
        .collect()
}

/// `(t, [g(w_t)]_+)` for a trace.
pub fn g_plus_series(trace: &Trace) -> Vec<(f64, f64)> {
    trace
        .steps
        .iter()
        .map(|s| (s.t as f64, s.g.max(0.0)))
        .collect()
}

fn rate_rows(p: &ProblemInstance, traces: &[(PlannedRun, Trace)]) -> Vec<RateRow> {
    let mut rows = Vec::new();
    for (plan, trace) in traces {
        let mut push = |quantity, fitted: Result<RateFit>| {
            let (fit, note) = match fitted {
                Ok(f) => (Some(f), String::new()),
                Err(e) => (None, e.to_string()),
            };
            rows.push(RateRow {
                run: plan.name.clone(),
                method: trace.method,
                quantity,
                fit,
                note,
            });
        };
        let f_fit = match p.constants.f_star {
            Some(f_star) => fit_power_law(&f_gap_series(trace, f_star), RATE_WINDOW_FRACTION),
            None => Err(Error::MissingConstant("f_star")),
        };
        push("f_gap", f_fit);
        push("g_plus", fit_power_law(&g_plus_series(trace), RATE_WINDOW_FRACTION));
    }
    rows
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_rate_table(rows: &[RateRow], path: &Path) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    let io = |e: csv::Error| Error::Io(e.to_string());
    wtr.write_record(["run", "method", "quantity", "C", "alpha", "r_squared", "note"])
        .map_err(io)?;
    for row in rows {
        let (c, alpha, r2) = match &row.fit {
            Some(f) => (fmt17(f.c), fmt17(f.alpha), fmt17(f.r_squared)),
            None => (String::new(), String::new(), String::new()),
        };
        wtr.write_record([
            row.run.as_str(),
            row.method.name(),
            row.quantity,
            &c,
            &alpha,
            &r2,
            &row.note,
        ])
        .map_err(io)?;
    }
    wtr.flush().map_err(Error::from)
}

fn oscillation_rows(traces: &[(PlannedRun, Trace)]) -> Result<Vec<OscillationRow>> {
    traces
        .iter()
        .filter(|(plan, _)| plan.config.rule.is_soft())
        .map(|(plan, trace)| {
            Ok(OscillationRow {
                run: plan.name.clone(),
                method: trace.method,
                beta: plan.config.rule.beta,
                stats: tail_stats(&trace.steps, OSCILLATION_TAIL)?,
            })
        })
        .collect()
}

fn write_oscillation(rows: &[OscillationRow], path: &Path) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    let io = |e: csv::Error| Error::Io(e.to_string());
    wtr.write_record(["run", "method", "beta", "std_g", "mean_g", "std_f", "mean_f"])
        .map_err(io)?;
    for row in rows {
        let s = &row.stats;
        wtr.write_record([
            row.run.clone(),
            row.method.to_string(),
            fmt17(row.beta),
            fmt17(s.std_g),
            fmt17(s.mean_g),
            fmt17(s.std_f),
            fmt17(s.mean_f),
        ])
        .map_err(io)?;
    }
    wtr.flush().map_err(Error::from)
}

/// gnuplot script drawing `f(w_t)` and `[g(w_t)]_+` of every trace on
/// log-log axes. Run it from the output directory.
pub fn plot_script(runs: &[&str]) -> String {
    let curves = |column: &str| {
        runs.iter()
            .map(|name| format!("'{name}.csv' skip 1 using 1:({column}) with lines title '{name}'"))
            .collect::<Vec<_>>()
            .join(", \\\n     ")
    };
    let mut s = String::new();
    s.push_str("set terminal pngcairo size 1200,480\n");
    s.push_str("set output 'convergence.png'\n");
    s.push_str("set datafile separator ','\n");
    s.push_str("set termoption noenhanced\n");
    s.push_str("set logscale xy\n");
    s.push_str("set xlabel 't'\n");
    s.push_str("set multiplot layout 1,2\n");
    s.push_str("set title 'f(w_t)'\n");
    s.push_str(&format!("plot {}\n", curves("$2 > 0 ? $2 : 1/0")));
    s.push_str("set title '[g(w_t)]_+'\n");
    s.push_str(&format!("plot {}\n", curves("$3 > 0 ? $3 : 1/0")));
    s.push_str("unset multiplot\n");
    s
}

/// Paths written for a run named `name`.
pub fn run_artifacts(out_dir: &Path, name: &str) -> (PathBuf, PathBuf) {
    (
        out_dir.join(format!("{name}.csv")),
        out_dir.join(format!("{name}.certificate.json")),
    )
}

impl RunReport {
    pub fn trace(&self, name: &str) -> Option<&Trace> {
        self.traces
            .iter()
            .find(|(plan, _)| plan.name == name)
            .map(|(_, t)| t)
    }

    /// Prints a short per-run summary.
    pub fn print_summary<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for s in &self.summaries {
            let verdict = match (&s.certificate, &s.error) {
                (Some(c), _) if c.passed => "certified".to_string(),
                (Some(c), _) => format!("not certified (f_gap {:.3e}, g {:.3e})", c.f_gap, c.g_val),
                (None, Some(e)) => e.clone(),
                (None, None) => "no verdict".to_string(),
            };
            writeln!(
                out,
                "{:<24} {:<15} T={:<6} eta={:.3e} eps={:.3e}  {verdict}",
                s.run, s.method, s.horizon, s.eta, s.epsilon
            )?;
        }
        for r in &self.rates {
            if let Some(f) = &r.fit {
                writeln!(
                    out,
                    "{:<24} {:<7} alpha={:>8.4} r2={:.3}",
                    r.run, r.quantity, f.alpha, f.r_squared
                )?;
            }
        }
        Ok(())
    }
}
