//! Runs every task of a scenario and assembles the report.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Instant;

use bmc::curvature::conjugate_radius_bound;
use bmc::error::Error;
use bmc::iso_net::{monotonicity_constants, v0};
use serde_json::{json, Value};

use crate::config::{ConfigError, ScenarioConfig};
use crate::report::{Report, Summary, TaskTiming, Timings, TOOL, VERSION};
use crate::tasks::{run_task, Artifact, TaskOutput, Workspace};

pub struct RunOutput {
    pub report: Report,
    pub timings: Timings,
    pub artifacts: Vec<Artifact>,
}

impl RunOutput {
    pub fn exit_code(&self) -> i32 {
        self.report.summary.exit_code
    }
}

/// Constants shared by every task, derived once from the ambient and `h0`.
fn global_constants(ws: &Workspace) -> Value {
    let k0 = ws.k0();
    let r = conjugate_radius_bound(k0);
    let mut out = json!({
        "h0": ws.constants.h0,
        "a0": ws.constants.a0,
        "beta": ws.constants.beta,
        "seed": ws.constants.seed,
        "tolerance_scale": ws.constants.tolerance_scale,
        "K0": k0,
        "conjugate_radius": if r.unbounded { Value::Null } else { json!(r.radius) },
        "v0": v0(&ws.ambient),
    });
    match monotonicity_constants(&ws.ambient, ws.constants.h0, ws.constants.beta) {
        Ok(m) => {
            out["c"] = json!(m.c);
            out["monotonicity_delta"] = json!(m.delta);
        }
        Err(Error::Unsupported(_)) => {
            let b = ws.constants.beta;
            out["c"] = json!(1.0f64.min(1.0 / (16.0 * b * b)));
        }
        Err(e) => out["monotonicity_error"] = json!(e.to_string()),
    }
    out
}

/// Output directory: the explicit flag, then the config, then `out/<name>`.
pub fn output_dir(config: &ScenarioConfig, flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(&config.name))
}

/// Runs tasks in order, or one thread per task with its own workspace when `parallel`.
pub fn run_scenario(config: &ScenarioConfig, parallel: bool) -> Result<RunOutput, ConfigError> {
    config.validate()?;
    let start = Instant::now();
    let ws = Workspace::new(config)?;
    let constants = global_constants(&ws);
    let timed = |ws: &mut Workspace, i: usize| {
        let t = Instant::now();
        let out = run_task(ws, i, &config.tasks[i]);
        (out, t.elapsed().as_secs_f64())
    };
    let results: Vec<(TaskOutput, f64)> = if parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..config.tasks.len())
                .map(|i| {
                    scope.spawn(move || {
                        let mut ws = Workspace::new(config).expect("validated above");
                        timed(&mut ws, i)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("task thread"))
                .collect()
        })
    } else {
        let mut ws = ws;
        (0..config.tasks.len()).map(|i| timed(&mut ws, i)).collect()
    };

    let mut tasks = Vec::new();
    let mut timings = Vec::new();
    let mut artifacts = Vec::new();
    let mut names = BTreeSet::new();
    for (out, seconds) in results {
        let index = out.report.index;
        timings.push(TaskTiming {
            index,
            kind: out.report.kind.clone(),
            seconds,
        });
        for mut a in out.artifacts {
            if !names.insert(a.file_name.clone()) {
                a.file_name = format!("task{index}_{}", a.file_name);
                names.insert(a.file_name.clone());
            }
            artifacts.push(a);
        }
        tasks.push(out.report);
    }
    let summary = Summary::tally(&tasks);
    Ok(RunOutput {
        report: Report {
            tool: TOOL,
            version: VERSION,
            config: config.clone(),
            constants,
            tasks,
            summary,
        },
        timings: Timings {
            tasks: timings,
            total_seconds: start.elapsed().as_secs_f64(),
        },
        artifacts,
    })
}
