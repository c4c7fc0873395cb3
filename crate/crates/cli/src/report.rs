//! The `report.json` document and the files written next to it.

use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::ScenarioConfig;
use crate::tasks::{Artifact, TaskReport, Verdict};

pub const TOOL: &str = "bmc";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub not_applicable: usize,
    pub no_convergence: usize,
    pub exit_code: i32,
}

impl Summary {
    pub fn tally(tasks: &[TaskReport]) -> Self {
        let mut s = Summary::default();
        for t in tasks {
            match t.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Fail => s.fail += 1,
                Verdict::NotApplicable => s.not_applicable += 1,
                Verdict::NoConvergence => s.no_convergence += 1,
            }
        }
        s.exit_code = if s.fail + s.no_convergence == 0 { 0 } else { 1 };
        s
    }
}

/// Everything deterministic about a run; wall-clock times live in `timings.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: ScenarioConfig,
    pub constants: Value,
    pub tasks: Vec<TaskReport>,
    pub summary: Summary,
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskTiming {
    pub index: usize,
    pub kind: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub tasks: Vec<TaskTiming>,
    pub total_seconds: f64,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn write_all(dir: &Path, report: &Report, timings: &Timings, artifacts: &[Artifact]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), to_json(report))?;
    fs::write(dir.join("timings.json"), to_json(timings))?;
    for a in artifacts {
        fs::write(dir.join(&a.file_name), &a.contents)?;
    }
    Ok(())
}
