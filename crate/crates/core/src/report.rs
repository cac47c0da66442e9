//! Check reports and the `verify` driver.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Rational, ScalarMode};
use crate::suites::{run_suite, suite, Outcome, SuiteSpec, SUITES};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_id: String,
    pub paper_anchor: String,
    pub status: Status,
    pub max_residual: f64,
    pub tolerance: f64,
    pub trials: u64,
    /// Wall time; left out unless timing was requested, so reports stay
    /// reproducible byte for byte.
    pub elapsed_ms: Option<u64>,
    pub mode: ScalarMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckReport {
    /// Status from a residual: pass iff residual ≤ tolerance (NaN fails).
    pub fn judged(
        check_id: &str,
        anchor: &str,
        mode: ScalarMode,
        max_residual: f64,
        tolerance: f64,
        trials: u64,
    ) -> Self {
        let status = if max_residual <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            check_id: check_id.into(),
            paper_anchor: anchor.into(),
            status,
            max_residual,
            tolerance,
            trials,
            elapsed_ms: None,
            mode,
            detail: None,
        }
    }

    pub fn skipped(check_id: &str, anchor: &str, mode: ScalarMode, reason: String) -> Self {
        Self {
            check_id: check_id.into(),
            paper_anchor: anchor.into(),
            status: Status::Skip,
            max_residual: 0.0,
            tolerance: 0.0,
            trials: 0,
            elapsed_ms: None,
            mode,
            detail: Some(reason),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{:<26} {:<5} residual={:<10.3e} tol={:<8.1e} trials={:<6} [{}]{}",
            self.check_id,
            self.status.as_str(),
            self.max_residual,
            self.tolerance,
            self.trials,
            self.paper_anchor,
            self.detail
                .as_ref()
                .map(|d| format!(" {d}"))
                .unwrap_or_default()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub command: String,
    pub seed: u64,
    pub mode: ScalarMode,
    pub checks: Vec<CheckReport>,
    pub summary: Summary,
}

impl RunReport {
    pub fn new(command: &str, seed: u64, mode: ScalarMode, mut checks: Vec<CheckReport>) -> Self {
        checks.sort_by(|a, b| a.check_id.cmp(&b.check_id));
        let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
        let summary = Summary {
            passed: count(Status::Pass),
            failed: count(Status::Fail),
            skipped: count(Status::Skip),
        };
        Self {
            schema: SCHEMA,
            command: command.into(),
            seed,
            mode,
            checks,
            summary,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    /// Overrides every suite's default trial count.
    pub trials: Option<u64>,
    pub tolerances: BTreeMap<String, f64>,
    pub mode: ScalarMode,
    pub out: Option<PathBuf>,
    /// Empty selects every suite.
    pub suites: Vec<String>,
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: None,
            tolerances: BTreeMap::new(),
            mode: ScalarMode::Exact,
            out: None,
            suites: Vec::new(),
            timing: false,
        }
    }
}

/// Parses `check=value`.
pub fn parse_tolerance(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected <check>=<value>, got `{s}`"))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| format!("bad tolerance value `{v}`"))?;
    if !(v >= 0.0) {
        return Err(format!("tolerance must be non-negative, got {v}"));
    }
    Ok((k.trim().to_string(), v))
}

impl RunConfig {
    pub fn selected(&self) -> Result<Vec<&'static SuiteSpec>> {
        if self.suites.is_empty() {
            return Ok(SUITES.iter().collect());
        }
        let mut out: Vec<&'static SuiteSpec> = Vec::new();
        for name in &self.suites {
            let s = suite(name).ok_or_else(|| unknown_suite(name))?;
            if !out.contains(&s) {
                out.push(s);
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        self.selected()?;
        for k in self.tolerances.keys() {
            suite(k).ok_or_else(|| unknown_suite(k))?;
        }
        if self.mode == ScalarMode::Exact && !self.tolerances.is_empty() {
            return Err(Error::Precondition(
                "tolerance overrides apply in float mode only; exact checks require zero residuals"
                    .into(),
            ));
        }
        Ok(())
    }

    pub fn tolerance(&self, s: &SuiteSpec) -> f64 {
        match self.mode {
            ScalarMode::Exact => 0.0,
            ScalarMode::Float => self
                .tolerances
                .get(s.id)
                .copied()
                .unwrap_or(s.float_tolerance),
        }
    }

    pub fn trials(&self, s: &SuiteSpec) -> u64 {
        self.trials.unwrap_or(match self.mode {
            ScalarMode::Exact => s.exact_trials,
            ScalarMode::Float => s.float_trials,
        })
    }
}

fn unknown_suite(name: &str) -> Error {
    let known: Vec<&str> = SUITES.iter().map(|s| s.id).collect();
    Error::Precondition(format!(
        "unknown suite `{name}` (known: {})",
        known.join(", ")
    ))
}

/// Runs one suite under the configuration.
pub fn run_check(cfg: &RunConfig, s: &SuiteSpec) -> CheckReport {
    let n = cfg.trials(s);
    if n == 0 {
        return CheckReport::skipped(s.id, s.anchor, cfg.mode, "zero trials".into());
    }
    let start = Instant::now();
    let res: Result<Outcome> = match cfg.mode {
        ScalarMode::Exact => run_suite::<Rational>(s.id, cfg.seed, n),
        ScalarMode::Float => run_suite::<f64>(s.id, cfg.seed, n),
    };
    let elapsed = start.elapsed().as_millis() as u64;
    let tol = cfg.tolerance(s);
    let mut r = match res {
        Ok(o) => CheckReport::judged(s.id, s.anchor, cfg.mode, o.max_residual, tol, o.trials),
        Err(e) => {
            let mut r = CheckReport::judged(s.id, s.anchor, cfg.mode, f64::NAN, tol, n);
            r.detail = Some(format!("error: {e}"));
            r
        }
    };
    if cfg.timing {
        r.elapsed_ms = Some(elapsed);
    }
    r
}

/// Runs the selected suites; results are ordered by check id.
pub fn verify(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    let selected = cfg.selected()?;
    let checks: Vec<CheckReport> = selected.par_iter().map(|s| run_check(cfg, s)).collect();
    Ok(RunReport::new("verify", cfg.seed, cfg.mode, checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_follows_tolerance() {
        let r = CheckReport::judged("x", "a", ScalarMode::Float, 1e-12, 1e-10, 3);
        assert_eq!(r.status, Status::Pass);
        assert_eq!(
            CheckReport::judged("x", "a", ScalarMode::Exact, 1e-30, 0.0, 1).status,
            Status::Fail
        );
        assert_eq!(
            CheckReport::judged("x", "a", ScalarMode::Float, f64::NAN, 1.0, 1).status,
            Status::Fail
        );
    }

    #[test]
    fn tolerance_parsing() {
        assert_eq!(
            parse_tolerance("hl-identity=1e-30").unwrap(),
            ("hl-identity".into(), 1e-30)
        );
        assert!(parse_tolerance("hl-identity").is_err());
        assert!(parse_tolerance("a=-1").is_err());
        assert!(parse_tolerance("a=x").is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = RunConfig {
            suites: vec!["nope".into()],
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        cfg.suites.clear();
        cfg.tolerances.insert("hl-identity".into(), 1.0);
        assert!(cfg.validate().is_err());
        cfg.mode = ScalarMode::Float;
        assert!(cfg.validate().is_ok());
        cfg.tolerances.insert("bogus".into(), 1.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn report_is_sorted_and_counted() {
        let cfg = RunConfig {
            suites: vec!["model-fidelity".into(), "b-formulas".into()],
            trials: Some(3),
            ..Default::default()
        };
        let r = verify(&cfg).unwrap();
        assert_eq!(r.checks[0].check_id, "b-formulas");
        assert_eq!(
            r.summary,
            Summary {
                passed: 2,
                failed: 0,
                skipped: 0
            }
        );
        assert_eq!(r.to_json(), verify(&cfg).unwrap().to_json());
    }
}
