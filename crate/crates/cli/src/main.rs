use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use bmc::surface::CatalogSurface;
use bmc_cli::config::{AmbientBlock, Constants, DimensionSource, FamilyBlock, SurfaceBlock};
use bmc_cli::report::{to_json, write_all};
use bmc_cli::shorthand::{parse_annulus, parse_family, parse_surface, AnnulusSpec};
use bmc_cli::{load_config, output_dir, run_scenario, ConfigError, ScenarioConfig, TaskConfig};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

const USAGE_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "bmc",
    version,
    about = "Curvature, covering and limit checks for surfaces with bounded mean curvature"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GlobalArgs {
    /// Seed for every random choice; overrides the scenario.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; defaults to `out/<scenario name>`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Multiplies every acceptance tolerance.
    #[arg(long, global = true)]
    tolerance_scale: Option<f64>,
    /// Runs scenario tasks on separate threads.
    #[arg(long, global = true)]
    parallel: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Runs a scenario file.
    Run { scenario: PathBuf },
    /// Compares mesh curvature with the bound from h0.
    VerifyCurvature {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        h0: Option<f64>,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    /// Integrates the Jacobi equation along one geodesic.
    Jacobi {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        h0: Option<f64>,
        #[arg(long, default_value_t = 0.3)]
        theta: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Checks the deformed metric in normal coordinates.
    Schwarz {
        /// A catalog surface, or `plane`.
        #[arg(long)]
        surface: String,
        #[arg(long)]
        k0: f64,
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
    /// Checks the isoperimetric inequality on a surface or a flat disc.
    Isoperimetric {
        #[arg(long, conflicts_with = "disc_radius")]
        surface: Option<String>,
        #[arg(long)]
        disc_radius: Option<f64>,
        #[arg(long)]
        h0: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Checks the area lower bound of small intrinsic balls.
    Monotonicity {
        #[arg(long)]
        surface: String,
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.1")]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 50)]
        centers: usize,
        #[arg(long)]
        h0: Option<f64>,
        #[arg(long, default_value_t = 32)]
        resolution: usize,
    },
    /// Builds maximal separated nets and checks their cardinality.
    Net {
        #[arg(long)]
        surface: String,
        #[arg(long, value_delimiter = ',')]
        delta: Vec<f64>,
        #[arg(long)]
        h0: Option<f64>,
        #[arg(long)]
        a0: Option<f64>,
        #[arg(long, default_value_t = 32)]
        resolution: usize,
    },
    /// Computes the conformal modulus and a short separating curve of an annulus.
    Modulus {
        /// `right:H,W`, `round:r,rho` or an OFF mesh path.
        #[arg(long)]
        annulus: String,
        #[arg(long, default_value = "loop:0")]
        b0: String,
        #[arg(long, default_value = "loop:1")]
        b1: String,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    /// Lifts an immersed disc to the tangent plane of its base point.
    Lift {
        /// A builtin disc (sphere-cap, flat-disc, peanut, torus-strip) or an OFF mesh path.
        #[arg(long)]
        disc: String,
        /// Target surface for mesh discs.
        #[arg(long)]
        surface: Option<String>,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Estimates the Gromov-Hausdorff limit of a surface family.
    Limit {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    /// Estimates a covering dimension from greedy covers.
    Dimension {
        #[arg(long, value_delimiter = ',')]
        deltas: Vec<f64>,
        /// A catalog surface; the last member of `--family` when absent.
        #[arg(long)]
        surface: Option<String>,
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long, default_value_t = 2.0)]
        expected: f64,
    },
}

fn constants(global: &GlobalArgs, h0: f64, a0: Option<f64>, beta: Option<f64>) -> Constants {
    Constants {
        h0,
        a0,
        beta: beta.unwrap_or(bmc::iso_net::monotonicity::DEFAULT_BETA),
        seed: global.seed.unwrap_or(0),
        tolerance_scale: global.tolerance_scale.unwrap_or(1.0),
    }
}

fn surface_blocks(spec: &str, resolution: usize) -> anyhow::Result<(AmbientBlock, SurfaceBlock)> {
    parse_surface(spec, resolution).map_err(|e| anyhow::anyhow!(UsageError(e)))
}

/// The analytic max |H| of a surface, the natural default for h0.
fn analytic_h0(ambient: &AmbientBlock, surface: &SurfaceBlock) -> anyhow::Result<f64> {
    let a = ambient.build()?;
    let s: CatalogSurface = surface.build(&a)?;
    Ok(s.max_mean_curvature())
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn single(
    name: &str,
    ambient: AmbientBlock,
    surface: Option<SurfaceBlock>,
    c: Constants,
    task: TaskConfig,
) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        ambient,
        surface,
        family: None,
        constants: c,
        tasks: vec![task],
        output: None,
    }
}

fn euclidean() -> AmbientBlock {
    AmbientBlock {
        kind: "euclidean".into(),
        dim: 3,
        periods: None,
        radius: None,
    }
}

fn build_config(cli: &Cli) -> anyhow::Result<ScenarioConfig> {
    let g = &cli.global;
    Ok(match &cli.command {
        Command::Run { scenario } => {
            let mut config = load_config(scenario)?;
            if let Some(seed) = g.seed {
                config.constants.seed = seed;
            }
            if let Some(t) = g.tolerance_scale {
                config.constants.tolerance_scale = t;
            }
            config
        }
        Command::VerifyCurvature {
            surface,
            h0,
            resolution,
        } => {
            let (a, s) = surface_blocks(surface, *resolution)?;
            let h0 = h0.map_or_else(|| analytic_h0(&a, &s), Ok)?;
            single(
                "verify-curvature",
                a,
                Some(s),
                constants(g, h0, None, None),
                TaskConfig::Curvature { resolution: None },
            )
        }
        Command::Jacobi {
            surface,
            h0,
            theta,
            step,
        } => {
            let (a, s) = surface_blocks(surface, 64)?;
            let h0 = h0.map_or_else(|| analytic_h0(&a, &s), Ok)?;
            let task = TaskConfig::Jacobi {
                chart: [0.3, 0.2],
                theta: *theta,
                radius: None,
                step: *step,
            };
            single("jacobi", a, Some(s), constants(g, h0, None, None), task)
        }
        Command::Schwarz { surface, k0, grid } => {
            let plane = surface == "plane";
            let (a, s) = if plane {
                (euclidean(), None)
            } else {
                let (a, s) = surface_blocks(surface, 64)?;
                (a, Some(s))
            };
            let task = TaskConfig::Schwarz {
                flat_plane: plane,
                chart: [0.3, 0.2],
                radial: *grid,
                angular: *grid,
                k0: Some(*k0),
            };
            single("schwarz", a, s, constants(g, 0.0, None, None), task)
        }
        Command::Isoperimetric {
            surface,
            disc_radius,
            h0,
            beta,
        } => {
            let (a, s) = match surface {
                Some(spec) => {
                    let (a, s) = surface_blocks(spec, 64)?;
                    (a, Some(s))
                }
                None => (euclidean(), None),
            };
            let disc_radius = match (surface, disc_radius) {
                (None, None) => Some(1.0),
                (_, r) => *r,
            };
            let c = constants(g, h0.unwrap_or(0.0), None, *beta);
            single(
                "isoperimetric",
                a,
                s,
                c,
                TaskConfig::Isoperimetric { disc_radius },
            )
        }
        Command::Monotonicity {
            surface,
            eps,
            centers,
            h0,
            resolution,
        } => {
            let (a, s) = surface_blocks(surface, *resolution)?;
            let h0 = h0.map_or_else(|| analytic_h0(&a, &s), Ok)?;
            let task = TaskConfig::Monotonicity {
                centers: *centers,
                eps: eps.clone(),
                resolution: None,
            };
            single("monotonicity", a, Some(s), constants(g, h0, None, None), task)
        }
        Command::Net {
            surface,
            delta,
            h0,
            a0,
            resolution,
        } => {
            let (a, s) = surface_blocks(surface, *resolution)?;
            let h0 = h0.map_or_else(|| analytic_h0(&a, &s), Ok)?;
            let deltas = if delta.is_empty() {
                vec![0.2, 0.1, 0.05]
            } else {
                delta.clone()
            };
            let task = TaskConfig::Net {
                deltas,
                resolution: None,
            };
            single("net", a, Some(s), constants(g, h0, *a0, None), task)
        }
        Command::Modulus {
            annulus,
            b0,
            b1,
            resolution,
        } => {
            let spec = parse_annulus(annulus).map_err(UsageError)?;
            let (kind, height, circumference, outer, inner) = match spec {
                AnnulusSpec::Right {
                    height,
                    circumference,
                } => ("right".into(), Some(height), Some(circumference), None, None),
                AnnulusSpec::Round { outer, inner } => ("round".into(), None, None, Some(outer), Some(inner)),
                AnnulusSpec::Mesh(path) => (path, None, None, None, None),
            };
            let task = TaskConfig::Modulus {
                annulus: kind,
                height,
                circumference,
                outer,
                inner,
                resolution: *resolution,
                b0: b0.clone(),
                b1: b1.clone(),
            };
            single("modulus", euclidean(), None, constants(g, 0.0, None, None), task)
        }
        Command::Lift { disc, surface, eps } => {
            let (a, s) = match surface {
                Some(spec) => {
                    let (a, s) = surface_blocks(spec, 64)?;
                    (a, Some(s))
                }
                None => (euclidean(), None),
            };
            let task = TaskConfig::Lift {
                disc: disc.clone(),
                size: None,
                rings: None,
                eps: *eps,
                square_scale: None,
            };
            single("lift", a, s, constants(g, 0.0, None, None), task)
        }
        Command::Limit {
            family,
            samples,
            resolution,
        } => {
            let f = parse_family(family, *resolution, *samples).map_err(UsageError)?;
            let mut c = single(
                "limit",
                euclidean(),
                None,
                constants(g, 0.0, None, None),
                TaskConfig::Limit { zeta: None },
            );
            c.family = Some(f);
            c
        }
        Command::Dimension {
            deltas,
            surface,
            family,
            resolution,
            expected,
        } => {
            let deltas = if deltas.is_empty() {
                vec![0.2, 0.1, 0.05]
            } else {
                deltas.clone()
            };
            let (a, s, f, source) = match (surface, family) {
                (Some(spec), None) => {
                    let (a, s) = surface_blocks(spec, resolution.unwrap_or(128))?;
                    (a, Some(s), None, DimensionSource::Surface)
                }
                (None, Some(spec)) => {
                    let f: FamilyBlock = parse_family(spec, 64, 2).map_err(UsageError)?;
                    (euclidean(), None, Some(f), DimensionSource::LimitMember)
                }
                (None, None) => (euclidean(), None, None, DimensionSource::Segment),
                (Some(_), Some(_)) => {
                    anyhow::bail!(UsageError("give --surface or --family, not both".into()))
                }
            };
            let task = TaskConfig::Dimension {
                source,
                deltas,
                expected: *expected,
                resolution: *resolution,
                steiner_points: 1,
            };
            let mut c = single("dimension", a, s, constants(g, 0.0, None, None), task);
            c.family = f;
            c
        }
    })
}

fn task_line(t: &bmc_cli::tasks::TaskReport) -> serde_json::Value {
    let mut v = json!({ "kind": t.kind, "verdict": t.verdict });
    if let Some(r) = &t.reason {
        v["reason"] = json!(r);
    }
    v
}

fn is_usage(e: &anyhow::Error) -> bool {
    e.downcast_ref::<UsageError>().is_some() || e.downcast_ref::<ConfigError>().is_some()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(if is_usage(&e) { USAGE_ERROR } else { 1 });
        }
    };
    let run = match run_scenario(&config, cli.global.parallel) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE_ERROR);
        }
    };
    let dir = output_dir(&config, cli.global.out.clone());
    if let Err(e) = write_all(&dir, &run.report, &run.timings, &run.artifacts)
        .with_context(|| format!("cannot write outputs to {}", dir.display()))
    {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    let printed = match &cli.command {
        Command::Run { .. } => json!({
            "report": dir.join("report.json"),
            "summary": run.report.summary,
            "tasks": run.report.tasks.iter().map(task_line).collect::<Vec<_>>(),
        }),
        _ => {
            let t = &run.report.tasks[0];
            let mut v = t.results.clone();
            if !v.is_object() {
                v = json!({});
            }
            v["verdict"] = json!(t.verdict);
            v["constants"] = run.report.constants.clone();
            if let Some(r) = &t.reason {
                v["reason"] = json!(r);
            }
            v["artifacts"] = json!(run
                .artifacts
                .iter()
                .map(|a| dir.join(&a.file_name))
                .collect::<Vec<_>>());
            v
        }
    };
    print!("{}", to_json(&printed));
    ExitCode::from(run.exit_code() as u8)
}
