use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::solvers::Method;
use crate::switching::RuleKind;

/// Experiment description read from a single JSON document.
///
/// ```json
/// {
///   "instance": { "seed": 42, "dim": 10 },
///   "runs": [
///     { "name": "sgm", "method": "sgm", "schedule": { "theorem": 1 }, "T": 1000 },
///     { "method": "ssgm", "schedule": { "eta": 0.03, "beta": 1, "match_multiplier": true }, "T": 1000 }
///   ],
///   "outputs": { "trace_csv": true, "plots": true, "rate_table": true },
///   "sweep": { "param": "beta", "values": [1, 10, 100] }
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    pub runs: Vec<RunSpec>,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub sweep: Option<Sweep>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum InstanceSpec {
    Generated { seed: u64, dim: usize },
    /// Relative paths are resolved against the config file's directory.
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    /// Defaults to the method name, suffixed when that name is taken.
    #[serde(default)]
    pub name: Option<String>,
    pub method: Method,
    pub schedule: ScheduleSpec,
    #[serde(rename = "T")]
    pub horizon: usize,
    /// Start point, zero by default.
    #[serde(default)]
    pub w1: Option<Vec<f64>>,
}

/// Either `theorem` alone (plus `eta` for theorem 5), or explicit
/// parameters.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    #[serde(default)]
    pub theorem: Option<u8>,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub rho: Option<f64>,
    /// Switching rule of soft methods; the trimmed hinge by default.
    #[serde(default)]
    pub rule: Option<RuleKind>,
    /// Place the trimmed hinge at `ε = 1/(β(1 + λ*))` so that the soft
    /// field vanishes at the reference solution.
    #[serde(default)]
    pub match_multiplier: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "yes")]
    pub trace_csv: bool,
    #[serde(default = "yes")]
    pub plots: bool,
    #[serde(default = "yes")]
    pub rate_table: bool,
}

fn yes() -> bool {
    true
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            trace_csv: true,
            plots: true,
            rate_table: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub param: String,
    pub values: Vec<f64>,
}

fn config_err(field: impl AsRef<str>, msg: impl AsRef<str>) -> Error {
    Error::Config(format!("{}: {}", field.as_ref(), msg.as_ref()))
}

fn positive(field: String, value: Option<f64>) -> Result<()> {
    match value {
        Some(v) if !(v > 0.0 && v.is_finite()) => {
            Err(config_err(field, format!("must be positive and finite, got {v}")))
        }
        _ => Ok(()),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| {
            Error::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if let InstanceSpec::Generated { dim, .. } = self.instance {
            if dim == 0 {
                return Err(config_err("instance.dim", "must be at least 1"));
            }
        }
        if self.runs.is_empty() {
            return Err(config_err("runs", "at least one run is required"));
        }
        for (i, run) in self.runs.iter().enumerate() {
            run.validate(&format!("runs[{i}]"))?;
        }
        if let Some(sweep) = &self.sweep {
            if sweep.param != "beta" {
                return Err(config_err(
                    "sweep.param",
                    format!("only \"beta\" can be swept, got {:?}", sweep.param),
                ));
            }
            if sweep.values.is_empty() {
                return Err(config_err("sweep.values", "must not be empty"));
            }
            for (j, v) in sweep.values.iter().enumerate() {
                positive(format!("sweep.values[{j}]"), Some(*v))?;
            }
            if !self.runs.iter().any(|r| r.method.is_soft()) {
                return Err(config_err("sweep", "a beta sweep needs at least one soft method run"));
            }
        }
        Ok(())
    }
}

impl RunSpec {
    fn validate(&self, at: &str) -> Result<()> {
        if self.horizon == 0 {
            return Err(config_err(format!("{at}.T"), "must be at least 1"));
        }
        if let Some(name) = &self.name {
            if name.is_empty() || name.contains(['/', '\\']) {
                return Err(config_err(
                    format!("{at}.name"),
                    "must be a nonempty file-name-safe string",
                ));
            }
        }
        let s = &self.schedule;
        let at_s = format!("{at}.schedule");
        positive(format!("{at_s}.eta"), s.eta)?;
        positive(format!("{at_s}.epsilon"), s.epsilon)?;
        positive(format!("{at_s}.beta"), s.beta)?;
        positive(format!("{at_s}.rho"), s.rho)?;
        if s.rho.is_some() && self.method != Method::PenaltyGd {
            return Err(config_err(format!("{at_s}.rho"), "only penalty_gd uses rho"));
        }
        if let Some(rule) = s.rule {
            if (rule != RuleKind::Hard) != self.method.is_soft() {
                return Err(config_err(
                    format!("{at_s}.rule"),
                    format!("rule {rule:?} does not fit method {}", self.method),
                ));
            }
        }
        if s.match_multiplier {
            if !self.method.is_soft() || s.rule.is_some_and(|r| r != RuleKind::TrimmedHinge) {
                return Err(config_err(
                    format!("{at_s}.match_multiplier"),
                    "applies only to soft methods with the trimmed hinge",
                ));
            }
            if s.epsilon.is_some() {
                return Err(config_err(
                    format!("{at_s}.epsilon"),
                    "is derived when match_multiplier is set",
                ));
            }
        }

        match s.theorem {
            Some(th) => {
                if !self.method.theorems().contains(&th) {
                    return Err(config_err(
                        format!("{at_s}.theorem"),
                        format!(
                            "theorem {th} does not apply to method {} (valid: {:?})",
                            self.method,
                            self.method.theorems()
                        ),
                    ));
                }
                if s.epsilon.is_some() || s.beta.is_some() || s.match_multiplier || s.rule.is_some() {
                    return Err(config_err(
                        &at_s,
                        "a theorem schedule fixes epsilon, beta and the rule",
                    ));
                }
                if (th == 5) != s.eta.is_some() {
                    return Err(config_err(
                        format!("{at_s}.eta"),
                        "is required by theorem 5 and fixed by the other theorems",
                    ));
                }
            }
            None => {
                if s.eta.is_none() {
                    return Err(config_err(format!("{at_s}.eta"), "is required"));
                }
                if s.epsilon.is_none() && !s.match_multiplier {
                    return Err(config_err(format!("{at_s}.epsilon"), "is required"));
                }
                if s.beta.is_some() && !self.method.is_soft() {
                    return Err(config_err(
                        format!("{at_s}.beta"),
                        format!("method {} uses the hard rule", self.method),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err_of(text: &str) -> String {
        match ExperimentConfig::from_json(text) {
            Err(Error::Config(msg)) => msg,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_parses_with_default_outputs() {
        let cfg = ExperimentConfig::from_json(
            r#"{"instance": {"seed": 1, "dim": 3},
                "runs": [{"method": "sgm", "schedule": {"theorem": 1}, "T": 10}]}"#,
        )
        .unwrap();
        assert_eq!(cfg.outputs, Outputs::default());
        assert_eq!(cfg.instance, InstanceSpec::Generated { seed: 1, dim: 3 });
    }

    #[test]
    fn empty_runs_names_the_field() {
        let msg = err_of(r#"{"instance": {"seed": 1, "dim": 3}, "runs": []}"#);
        assert!(msg.starts_with("runs:"), "{msg}");
    }

    #[test]
    fn theorem_must_match_method() {
        let msg = err_of(
            r#"{"instance": {"seed": 1, "dim": 3},
                "runs": [{"method": "sgm", "schedule": {"theorem": 1}, "T": 10},
                         {"method": "sppm", "schedule": {"theorem": 3}, "T": 10}]}"#,
        );
        assert!(msg.starts_with("runs[1].schedule.theorem"), "{msg}");
    }

    #[test]
    fn syntax_errors_report_line() {
        let msg = err_of("{\n  \"instance\": {\"seed\": 1, \"dim\": 3},\n  \"runs\": [,]\n}");
        assert!(msg.contains("line 3"), "{msg}");
        let msg = err_of(
            r#"{"instance": {"seed": 1, "dim": 3}, "runs": [{"method": "sgm", "schedule": {"eta": 0.1, "epsilon": 0.1}, "T": 10, "typo": 1}]}"#,
        );
        assert!(msg.contains("typo"), "{msg}");
    }

    #[test]
    fn explicit_schedule_needs_eta_and_epsilon() {
        let msg = err_of(
            r#"{"instance": {"seed": 1, "dim": 3},
                "runs": [{"method": "ssgm", "schedule": {"epsilon": 0.1, "beta": 1}, "T": 10}]}"#,
        );
        assert!(msg.starts_with("runs[0].schedule.eta"), "{msg}");
        let msg = err_of(
            r#"{"instance": {"seed": 1, "dim": 3},
                "runs": [{"method": "sgm", "schedule": {"eta": 0.1, "epsilon": 0.1, "beta": 2}, "T": 10}]}"#,
        );
        assert!(msg.starts_with("runs[0].schedule.beta"), "{msg}");
    }

    #[test]
    fn sweep_is_checked() {
        let msg = err_of(
            r#"{"instance": {"seed": 1, "dim": 3},
                "runs": [{"method": "ssgm", "schedule": {"eta": 0.1, "epsilon": 0.1}, "T": 10}],
                "sweep": {"param": "eta", "values": [1]}}"#,
        );
        assert!(msg.starts_with("sweep.param"), "{msg}");
    }
}
