use std::path::Path;

use indexmap::IndexMap;
use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Degenerate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Degenerate => "DEGENERATE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageReport {
    pub residual_max: f64,
    pub residual_mean: f64,
    pub points: usize,
    pub verdict: Verdict,
    pub details: Value,
    /// Set when a FAIL comes from iterative numerics rather than a residual.
    #[serde(skip)]
    pub numeric_failure: bool,
}

impl StageReport {
    pub fn new(verdict: Verdict, residual_max: f64, residual_mean: f64, points: usize, details: Value) -> StageReport {
        StageReport {
            residual_max,
            residual_mean,
            points,
            verdict,
            details,
            numeric_failure: false,
        }
    }
}

/// Machine-readable outcome of one pipeline run. Stages keep execution order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub system: String,
    pub seed: u64,
    pub version: String,
    pub stages: IndexMap<String, StageReport>,
    pub verdicts: IndexMap<String, Verdict>,
}

impl RunReport {
    pub fn new(system: impl Into<String>, seed: u64) -> RunReport {
        RunReport {
            system: system.into(),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            stages: IndexMap::new(),
            verdicts: IndexMap::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, stage: StageReport) {
        let name = name.into();
        self.verdicts.insert(name.clone(), stage.verdict);
        self.stages.insert(name, stage);
    }

    pub fn stage(&self, name: &str) -> Option<&StageReport> {
        self.stages.get(name)
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.values().all(|v| *v == Verdict::Pass)
    }

    /// 0 when every stage passed; otherwise decided by the first stage that
    /// did not: 2 for DEGENERATE, 3 for a numeric FAIL, 1 for any other FAIL.
    pub fn exit_code(&self) -> i32 {
        for stage in self.stages.values() {
            match stage.verdict {
                Verdict::Pass => continue,
                Verdict::Degenerate => return 2,
                Verdict::Fail if stage.numeric_failure => return 3,
                Verdict::Fail => return 1,
            }
        }
        0
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}

/// Pretty-printed JSON to `path`, or to stdout when `path` is `None`.
pub fn emit_report(report: &RunReport, path: Option<&Path>) -> Result<()> {
    let text = report.to_json()?;
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}
