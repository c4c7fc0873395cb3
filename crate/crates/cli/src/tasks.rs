//! One function per task kind; each maps library results to a verdict and artifacts.

use std::f64::consts::PI;
use std::path::Path;

use bmc::ambient::AmbientSpace;
use bmc::conformal::{
    ahlfors_curve, modulus_right_annulus, modulus_round_annulus, right_annulus, round_annulus,
};
use bmc::conformal::{AnnulusRegion, LoopSelector};
use bmc::curvature::jacobi::comparison_function;
use bmc::curvature::{conjugate_radius_bound, curvature_bound, jacobi_profile, verify_curvature};
use bmc::error::Error;
use bmc::iso_net::{
    gauss_bonnet_ball_scan, greedy_net, isoperimetric_check, monotonicity_check, monotonicity_constants,
    net_cardinality_bounds, packing_bracket, v0, RegionMeasure, ScanOutcome,
};
use bmc::lifting::domains::{flat_disc, peanut, sphere_cap, torus_strip, BasePlacement};
use bmc::lifting::{lift_disc, order_squares, verify_lift, DiscImmersion, LiftTarget};
use bmc::limits::{
    box_dimension, diameter_experiment, dumbbell_family, limit_pseudometric, DistanceMatrix, LimitVerdict,
    MeshMetric, SurfaceSequence, WAIST_SAMPLES,
};
use bmc::schwarz::{deformation_check, DeformationSource, SchwarzGrid};
use bmc::surface::off::{format_float, read_off};
use bmc::surface::sample::area_weighted_samples;
use bmc::surface::DEFAULT_STEINER_POINTS;
use bmc::surface::{build_surface, locate, CatalogSurface, Family, SteinerGraph, BALL_STEINER_POINTS};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Constants, DimensionSource, FamilyBlock, ScenarioConfig, TaskConfig};

/// Slope tolerance of the covering-dimension check.
pub const DIMENSION_TOLERANCE: f64 = 0.15;
/// Relative tolerance of the right-annulus modulus and curve length.
pub const RIGHT_ANNULUS_TOLERANCE: f64 = 0.01;
/// Relative tolerance of the round-annulus modulus.
pub const ROUND_ANNULUS_TOLERANCE: f64 = 0.02;
/// Largest `sn_K0(r) - f(r)` accepted by the Jacobi comparison.
pub const JACOBI_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
    NoConvergence,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_success(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::NotApplicable)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskReport {
    pub index: usize,
    pub kind: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub inputs: TaskConfig,
    pub results: Value,
}

/// A file written next to the report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

#[derive(Debug, Clone)]
pub struct TaskOutput {
    pub report: TaskReport,
    pub artifacts: Vec<Artifact>,
}

struct Outcome {
    verdict: Verdict,
    reason: Option<String>,
    results: Value,
    artifacts: Vec<Artifact>,
}

impl Outcome {
    fn new(verdict: Verdict, results: Value) -> Self {
        Outcome {
            verdict,
            reason: None,
            results,
            artifacts: Vec::new(),
        }
    }

    fn because(mut self, reason: impl Into<String>) -> Self {
        self.reason = Some(reason.into());
        self
    }

    fn with(mut self, artifact: Artifact) -> Self {
        self.artifacts.push(artifact);
        self
    }
}

type TaskResult = Result<Outcome, Error>;

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

/// Rows of floats as CSV with 17 significant digits.
fn float_csv(header: Option<&[&str]>, rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(h) = header {
        w.write_record(h).expect("in-memory write");
    }
    for row in rows {
        w.write_record(row.iter().map(|&x| format_float(x)))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}

pub fn matrix_csv(m: &DistanceMatrix) -> String {
    float_csv(None, (0..m.size).map(|i| m.row(i).to_vec()))
}

/// Scenario state shared by the tasks of one run.
pub struct Workspace {
    pub ambient: AmbientSpace,
    pub surface: Option<CatalogSurface>,
    pub surface_resolution: usize,
    pub family: Option<(FamilyBlock, Vec<CatalogSurface>)>,
    pub constants: Constants,
    sequence: Option<SurfaceSequence>,
    matrices: Option<Vec<DistanceMatrix>>,
}

impl Workspace {
    /// Builds library objects from a validated config.
    pub fn new(config: &ScenarioConfig) -> Result<Self, crate::config::ConfigError> {
        let ambient = config.ambient.build()?;
        let surface = config.surface.as_ref().map(|s| s.build(&ambient)).transpose()?;
        let family = match &config.family {
            Some(f) => Some((f.clone(), f.build(&ambient)?)),
            None => None,
        };
        Ok(Workspace {
            surface_resolution: config.surface.as_ref().map_or(64, |s| s.resolution),
            ambient,
            surface,
            family,
            constants: config.constants.clone(),
            sequence: None,
            matrices: None,
        })
    }

    pub fn k0(&self) -> f64 {
        curvature_bound(self.constants.h0, &self.ambient)
    }

    fn surface(&self) -> Result<&CatalogSurface, Error> {
        self.surface
            .as_ref()
            .ok_or_else(|| Error::Config("task needs a surface block".into()))
    }

    fn family(&self) -> Result<&(FamilyBlock, Vec<CatalogSurface>), Error> {
        self.family
            .as_ref()
            .ok_or_else(|| Error::Config("task needs a family block".into()))
    }

    fn sequence(&mut self) -> Result<&SurfaceSequence, Error> {
        if self.sequence.is_none() {
            let (block, surfaces) = self.family()?;
            let seed = self.constants.seed;
            let seq = if block.kind == "dumbbell" {
                dumbbell_family(&block.parameters, block.resolution, block.samples, seed)?
            } else {
                SurfaceSequence::new(
                    &block.kind,
                    block.parameters.clone(),
                    surfaces.clone(),
                    block.resolution,
                    block.samples,
                    &[],
                    seed,
                )?
            };
            self.sequence = Some(seq);
        }
        Ok(self.sequence.as_ref().expect("built above"))
    }

    fn matrices(&mut self) -> Result<&[DistanceMatrix], Error> {
        if self.matrices.is_none() {
            let m = self.sequence()?.matrices()?;
            self.matrices = Some(m);
        }
        Ok(self.matrices.as_deref().expect("built above"))
    }
}

/// Runs one task; library errors become verdicts rather than aborting the run.
pub fn run_task(ws: &mut Workspace, index: usize, task: &TaskConfig) -> TaskOutput {
    let result = match task {
        TaskConfig::Curvature { resolution } => curvature(ws, *resolution),
        TaskConfig::Jacobi {
            chart,
            theta,
            radius,
            step,
        } => jacobi(ws, *chart, *theta, *radius, *step),
        TaskConfig::Schwarz {
            flat_plane,
            chart,
            radial,
            angular,
            k0,
        } => schwarz(
            ws,
            *flat_plane,
            *chart,
            SchwarzGrid {
                radial: *radial,
                angular: *angular,
            },
            *k0,
        ),
        TaskConfig::Isoperimetric { disc_radius } => isoperimetric(ws, *disc_radius),
        TaskConfig::Monotonicity {
            centers,
            eps,
            resolution,
        } => monotonicity(ws, *centers, eps, *resolution),
        TaskConfig::Net { deltas, resolution } => net(ws, deltas, *resolution),
        TaskConfig::GaussBonnet {
            delta,
            constant,
            chart,
            grid_points,
            resolution,
        } => gauss_bonnet(ws, *delta, *constant, *chart, *grid_points, *resolution),
        TaskConfig::Modulus { .. } => modulus(ws, task),
        TaskConfig::Lift {
            disc,
            size,
            rings,
            eps,
            square_scale,
        } => lift(ws, disc, *size, *rings, *eps, *square_scale),
        TaskConfig::Limit { zeta } => limit(ws, *zeta),
        TaskConfig::Dimension {
            source,
            deltas,
            expected,
            resolution,
            steiner_points,
        } => dimension(ws, *source, deltas, *expected, *resolution, *steiner_points),
        TaskConfig::Diameter {
            genus,
            tail,
            d_config,
            inject_sphere,
        } => diameter(ws, *genus, *tail, *d_config, *inject_sphere),
    };
    let outcome = result.unwrap_or_else(|e| {
        let verdict = match e {
            Error::Hypothesis(_) | Error::Inapplicable(_) | Error::Unsupported(_) => Verdict::NotApplicable,
            _ => Verdict::Fail,
        };
        Outcome::new(verdict, Value::Null).because(e.to_string())
    });
    TaskOutput {
        report: TaskReport {
            index,
            kind: task.kind().into(),
            verdict: outcome.verdict,
            reason: outcome.reason,
            inputs: task.clone(),
            results: outcome.results,
        },
        artifacts: outcome.artifacts,
    }
}

fn curvature(ws: &Workspace, resolution: Option<usize>) -> TaskResult {
    let surface = ws.surface()?;
    let res = resolution.unwrap_or(ws.surface_resolution);
    let v = verify_curvature(surface, res, ws.constants.h0, ws.constants.tolerance_scale)?;
    let mut results = to_value(&v);
    results["K0"] = json!(v.k0);
    results["max_K"] = json!(v.max_k);
    results["maxH"] = json!(v.max_h);
    let out = Outcome::new(Verdict::from_pass(v.pass), results);
    Ok(if v.hypothesis_ok {
        out
    } else {
        Outcome {
            verdict: Verdict::NotApplicable,
            ..out
        }
        .because(format!(
            "analytic max |H| = {} exceeds h0 = {}",
            v.analytic_max_h, v.h0
        ))
    })
}

fn jacobi(ws: &Workspace, chart: [f64; 2], theta: f64, radius: Option<f64>, step: f64) -> TaskResult {
    let surface = ws.surface()?;
    let k0 = ws.k0();
    let conjugate = conjugate_radius_bound(k0);
    let radius = radius.unwrap_or(if conjugate.unbounded {
        1.0
    } else {
        conjugate.radius
    });
    let p = jacobi_profile(surface, (chart[0], chart[1]), theta, radius, step)?;
    let deficit = p.comparison_deficit(k0);
    let tolerance = JACOBI_TOLERANCE * ws.constants.tolerance_scale;
    let pass = p.increasing && p.above_half && deficit <= tolerance;
    let csv = float_csv(
        Some(&["r", "f", "df", "curvature", "comparison"]),
        (0..p.radii.len()).map(|i| {
            vec![
                p.radii[i],
                p.f[i],
                p.df[i],
                p.curvature[i],
                comparison_function(k0, p.radii[i]),
            ]
        }),
    );
    Ok(Outcome::new(
        Verdict::from_pass(pass),
        json!({
            "K0": k0,
            "conjugate_radius": conjugate.radius,
            "radius": radius,
            "step": p.step,
            "samples": p.radii.len(),
            "increasing": p.increasing,
            "above_half": p.above_half,
            "comparison_deficit": deficit,
            "tolerance": tolerance,
            "pass": pass,
        }),
    )
    .with(Artifact {
        file_name: "jacobi_profile.csv".into(),
        contents: csv,
    }))
}

fn schwarz(
    ws: &Workspace,
    flat_plane: bool,
    chart: [f64; 2],
    grid: SchwarzGrid,
    k0: Option<f64>,
) -> TaskResult {
    let source = if flat_plane {
        DeformationSource::FlatPlane
    } else {
        DeformationSource::Surface {
            surface: ws.surface()?.clone(),
            chart: (chart[0], chart[1]),
        }
    };
    let k0 = k0.unwrap_or_else(|| ws.k0());
    let c = deformation_check(&source, k0, grid, None)?;
    let mut results = to_value(&c);
    results["min_Ktilde"] = json!(c.min_deformed_curvature);
    results["max_Ktilde"] = json!(c.max_deformed_curvature);
    Ok(Outcome::new(Verdict::from_pass(c.pass), results))
}

fn isoperimetric(ws: &Workspace, disc_radius: Option<f64>) -> TaskResult {
    let v0 = v0(&ws.ambient);
    let region = match disc_radius {
        Some(r) => RegionMeasure::flat_disc(r),
        None => {
            let built = build_surface(ws.surface()?, ws.surface_resolution)?;
            RegionMeasure::from_mesh_estimated(&built.mesh)
        }
    };
    let record = isoperimetric_check(&region, ws.constants.beta, v0)?;
    let mut results = to_value(&record);
    results["flat_disc_beta"] = json!(1.0 / (2.0 * PI.sqrt()));
    Ok(Outcome::new(Verdict::from_pass(record.pass), results))
}

/// `c = min{1, 1/(16 beta^2)}` with the full constant set when the ambient allows it.
fn monotonicity_constant(ws: &Workspace) -> Result<(f64, Value), Error> {
    match monotonicity_constants(&ws.ambient, ws.constants.h0, ws.constants.beta) {
        Ok(c) => Ok((c.c, to_value(&c))),
        Err(Error::Unsupported(_)) => {
            let beta = ws.constants.beta;
            let c = 1.0f64.min(1.0 / (16.0 * beta * beta));
            Ok((c, json!({ "beta": beta, "c": c })))
        }
        Err(e) => Err(e),
    }
}

fn monotonicity(ws: &Workspace, centers: usize, radii: &[f64], resolution: Option<usize>) -> TaskResult {
    let surface = ws.surface()?;
    let (c, constants) = monotonicity_constant(ws)?;
    let delta = constants.get("delta").and_then(Value::as_f64);
    let built = build_surface(surface, resolution.unwrap_or(ws.surface_resolution))?;
    let graph = SteinerGraph::new(&built.mesh, BALL_STEINER_POINTS);
    let samples = area_weighted_samples(&built.mesh, centers, ws.constants.seed);
    let mut rows = Vec::new();
    let mut failures = 0;
    let mut min_ratio = f64::INFINITY;
    for p in &samples.points {
        for &eps in radii {
            let r = monotonicity_check(&built.mesh, &graph, p, eps, c, delta);
            failures += usize::from(!r.pass);
            min_ratio = min_ratio.min(r.area / r.lower_bound);
            rows.push(vec![
                r.center[0],
                r.center[1],
                r.center[2],
                eps,
                r.area,
                r.lower_bound,
            ]);
        }
    }
    let checks = rows.len();
    Ok(Outcome::new(
        Verdict::from_pass(failures == 0),
        json!({
            "constants": constants,
            "c": c,
            "centers": centers,
            "eps": radii,
            "checks": checks,
            "failures": failures,
            "min_area_ratio": min_ratio,
        }),
    )
    .with(Artifact {
        file_name: "monotonicity.csv".into(),
        contents: float_csv(
            Some(&["x", "y", "z", "eps", "area", "lower_bound"]),
            rows.into_iter(),
        ),
    }))
}

fn net(ws: &Workspace, deltas: &[f64], resolution: Option<usize>) -> TaskResult {
    let surface = ws.surface()?;
    let built = build_surface(surface, resolution.unwrap_or(ws.surface_resolution))?;
    let graph = SteinerGraph::new(&built.mesh, DEFAULT_STEINER_POINTS);
    let area = built.mesh.surface_area();
    let area_max = ws.constants.a0.unwrap_or(area);
    let (c, _) = monotonicity_constant(ws)?;
    let k0 = ws.k0();
    let chi = built.mesh.euler_characteristic();
    let mut rows = Vec::new();
    let mut pass = true;
    for &delta in deltas {
        let net = greedy_net(&built.mesh, &graph, delta, ws.constants.seed)?;
        let n = net.len() as f64;
        let (lo, hi) = packing_bracket(area, delta);
        let in_packing = lo <= n && n <= hi;
        let formula = net_cardinality_bounds(delta, area_max, area, k0, chi, c);
        let (formula_value, in_formula) = match &formula {
            Ok(b) => (to_value(b), Some(b.lower <= n && n <= b.upper)),
            Err(Error::Hypothesis(m)) => (json!({ "not_applicable": m }), None),
            Err(e) => return Err(Error::Config(e.to_string())),
        };
        pass &= net.certified && in_packing && in_formula != Some(false);
        rows.push(json!({
            "delta": delta,
            "size": net.len(),
            "certified": net.certified,
            "min_separation": net.min_separation,
            "covering_radius": net.covering_radius,
            "packing_bracket": [lo, hi],
            "in_packing_bracket": in_packing,
            "formula": formula_value,
            "in_formula_bracket": in_formula,
        }));
    }
    Ok(Outcome::new(
        Verdict::from_pass(pass),
        json!({
            "area": area,
            "a0": area_max,
            "k0": k0,
            "c": c,
            "euler_characteristic": chi,
            "nets": rows,
        }),
    ))
}

fn gauss_bonnet(
    ws: &Workspace,
    delta: f64,
    constant: f64,
    chart: [f64; 2],
    grid_points: usize,
    resolution: Option<usize>,
) -> TaskResult {
    let surface = ws.surface()?;
    let built = build_surface(surface, resolution.unwrap_or(ws.surface_resolution))?;
    let graph = SteinerGraph::new(&built.mesh, BALL_STEINER_POINTS);
    let center = locate(&built.mesh, &surface.embed(chart[0], chart[1]));
    let scan = gauss_bonnet_ball_scan(
        &built.mesh,
        &graph,
        &center,
        delta,
        constant,
        ws.k0(),
        grid_points,
    )?;
    let verdict = match scan.outcome {
        ScanOutcome::Pass => Verdict::Pass,
        ScanOutcome::Fail => Verdict::Fail,
        ScanOutcome::NotApplicable => Verdict::NotApplicable,
    };
    let csv = float_csv(
        Some(&["delta_prime", "contained", "straddle", "weighted"]),
        scan.rows
            .iter()
            .map(|r| vec![r.delta_prime, r.contained, r.straddle, r.weighted]),
    );
    let mut out = Outcome::new(verdict, to_value(&scan)).with(Artifact {
        file_name: "gauss_bonnet.csv".into(),
        contents: csv,
    });
    if verdict == Verdict::NotApplicable {
        out = out.because(format!("ball area {} is at most C delta^2", scan.ball_area));
    }
    Ok(out)
}

fn modulus(ws: &Workspace, task: &TaskConfig) -> TaskResult {
    let TaskConfig::Modulus {
        annulus,
        height,
        circumference,
        outer,
        inner,
        resolution,
        b0,
        b1,
    } = task
    else {
        unreachable!("dispatched on kind")
    };
    let (mut region, closed_form, curve_reference, tolerance): (
        AnnulusRegion,
        Option<f64>,
        Option<f64>,
        f64,
    ) = match annulus.as_str() {
        "right" => {
            let (h, w) = (height.unwrap_or(1.0), circumference.unwrap_or(1.0));
            (
                right_annulus(h, w, *resolution)?,
                Some(modulus_right_annulus(h, w)),
                Some(w),
                RIGHT_ANNULUS_TOLERANCE,
            )
        }
        "round" => {
            let (o, i) = (outer.unwrap_or(1.0), inner.unwrap_or(0.5));
            (
                round_annulus(o, i, *resolution)?,
                Some(modulus_round_annulus(o, i)),
                None,
                ROUND_ANNULUS_TOLERANCE,
            )
        }
        path => {
            let mesh = read_off(Path::new(path), ws.ambient.clone(), true)?;
            let (s0, s1): (LoopSelector, LoopSelector) = (b0.parse()?, b1.parse()?);
            (AnnulusRegion::new(mesh, s0, s1)?, None, None, 0.0)
        }
    };
    let modulus = region.solve()?;
    let curve = ahlfors_curve(&region)?;
    let tolerance = tolerance * ws.constants.tolerance_scale;
    let modulus_error = closed_form.map(|m| (modulus - m).abs() / m);
    let curve_error = curve_reference.map(|l| (curve.length - l).abs() / l);
    let pass = curve.inequality_holds
        && modulus_error.is_none_or(|e| e <= tolerance)
        && curve_error.is_none_or(|e| e <= tolerance);
    let points = float_csv(
        Some(&["x", "y", "z"]),
        curve.curve.points.iter().map(|p| p.to_vec()),
    );
    Ok(Outcome::new(
        Verdict::from_pass(pass),
        json!({
            "modulus": modulus,
            "area": region.area,
            "curve_length": curve.length,
            "inequality_slack": curve.slack,
            "inequality_holds": curve.inequality_holds,
            "curve_level": curve.curve.level,
            "midlevel_length": curve.midlevel_length,
            "boundary_lengths": region.boundary_lengths,
            "closed_form_modulus": closed_form,
            "modulus_relative_error": modulus_error,
            "curve_relative_error": curve_error,
            "tolerance": tolerance,
            "clamped_weights": region.clamped_weights,
            "cg_iterations": region.cg_iterations,
        }),
    )
    .with(Artifact {
        file_name: "ahlfors_curve.csv".into(),
        contents: points,
    }))
}

fn builtin_disc(
    disc: &str,
    size: Option<f64>,
    rings: Option<usize>,
    eps: Option<f64>,
) -> Result<DiscImmersion, Error> {
    match disc {
        "sphere-cap" => sphere_cap(
            size.unwrap_or(0.015),
            rings.unwrap_or(8),
            BasePlacement::Centre,
            eps,
        ),
        "flat-disc" => flat_disc(size.unwrap_or(0.1), rings.unwrap_or(10), eps),
        "peanut" => peanut(size.unwrap_or(1.0), 0.6, rings.unwrap_or(24), eps),
        "torus-strip" => torus_strip([0.15, 1.0], size.unwrap_or(0.2), 0.02, [60, 6], eps),
        other => Err(Error::Config(format!("unknown builtin disc `{other}`"))),
    }
}

fn lift(
    ws: &Workspace,
    disc: &str,
    size: Option<f64>,
    rings: Option<usize>,
    eps: Option<f64>,
    square_scale: Option<f64>,
) -> TaskResult {
    let disc = if crate::config::BUILTIN_DISCS.contains(&disc) {
        builtin_disc(disc, size, rings, eps)?
    } else {
        let target = LiftTarget::from_surface(ws.surface()?)?;
        let mesh = read_off(Path::new(disc), ws.ambient.clone(), true)?;
        let image = mesh.vertices.clone();
        DiscImmersion::new(mesh, image, target, eps, 0)?
    };
    let order = order_squares(&disc, ws.constants.seed, square_scale)?;
    let chart = lift_disc(&disc, &order)?;
    let report = verify_lift(&disc, &chart);
    let pass = order.certified && chart.seed_ok && chart.anchors_ok && report.pass;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["vertex", "u", "v", "residual"])
        .expect("in-memory write");
    for (v, l) in chart.lifts.iter().enumerate() {
        w.write_record([
            v.to_string(),
            format_float(l[0]),
            format_float(l[1]),
            format_float(chart.residuals[v]),
        ])
        .expect("in-memory write");
    }
    let csv = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii");
    let failed: Vec<&str> = [
        ("order.certified", order.certified),
        ("chart.seed_ok", chart.seed_ok),
        ("chart.anchors_ok", chart.anchors_ok),
        ("verification.pass", report.pass),
    ]
    .into_iter()
    .filter_map(|(name, ok)| (!ok).then_some(name))
    .collect();
    let mut out = Outcome::new(
        Verdict::from_pass(pass),
        json!({
            "disc": to_value(&disc),
            "order": {
                "square_scale": order.square_scale,
                "invertibility_scale": order.invertibility_scale,
                "squares": order.squares.len(),
                "basins": order.num_basins(),
                "repairs": order.repairs,
                "refinements": order.refinements,
                "max_square_diameter": order.max_square_diameter,
                "overlaps_ok": order.overlaps_ok,
                "boundary_ok": order.boundary_ok,
                "paths_2eps_ok": order.paths_2eps_ok,
                "pairs_5eps_ok": order.pairs_5eps_ok,
                "diameters_ok": order.diameters_ok,
                "certified": order.certified,
            },
            "chart": to_value(&chart),
            "verification": to_value(&report),
            "pass": pass,
        }),
    )
    .with(Artifact {
        file_name: "lift_chart.csv".into(),
        contents: csv,
    });
    if !failed.is_empty() {
        out = out.because(format!("failed certificates: {}", failed.join(", ")));
    }
    Ok(out)
}

fn limit(ws: &mut Workspace, zeta: Option<f64>) -> TaskResult {
    let is_dumbbell = ws.family()?.0.kind == "dumbbell";
    let zeta = match zeta {
        Some(z) => z,
        None => {
            let seq = ws.sequence()?;
            2.0 * seq.mesh_tolerance(seq.len() - 1)
        }
    };
    let matrices = ws.matrices()?.to_vec();
    let pm = limit_pseudometric(&matrices, zeta)?;
    let waist: Vec<usize> = (0..WAIST_SAMPLES).collect();
    let neck_collapsed = is_dumbbell.then(|| pm.same_class(&waist));
    let verdict = match pm.verdict {
        LimitVerdict::NoConvergence => Verdict::NoConvergence,
        LimitVerdict::Converged => Verdict::from_pass(pm.axioms_hold && neck_collapsed != Some(false)),
    };
    let seq = ws.sequence()?;
    let mut results = to_value(&pm);
    results["members"] = to_value(&seq.parameters);
    results["samples"] = json!(seq.chart_samples.len());
    results["asymmetry"] = json!(matrices.iter().map(|m| m.asymmetry).collect::<Vec<_>>());
    results["neck_collapsed"] = json!(neck_collapsed);
    let mut out = Outcome::new(verdict, results);
    if verdict == Verdict::NoConvergence {
        out = out.because("Cauchy tails do not decrease");
    }
    for (j, m) in matrices.iter().enumerate() {
        out = out.with(Artifact {
            file_name: format!("matrix_{j}.csv"),
            contents: matrix_csv(m),
        });
    }
    Ok(out)
}

fn segment_matrix(n: usize) -> DistanceMatrix {
    DistanceMatrix::from_fn(n, |i, j| (i as f64 - j as f64).abs() / n as f64)
}

fn dimension(
    ws: &mut Workspace,
    source: DimensionSource,
    deltas: &[f64],
    expected: f64,
    resolution: Option<usize>,
    steiner_points: usize,
) -> TaskResult {
    let estimate = match source {
        DimensionSource::Surface => {
            let built = build_surface(ws.surface()?, resolution.unwrap_or(ws.surface_resolution))?;
            box_dimension(&mut MeshMetric::new(&built.mesh, steiner_points), deltas)?
        }
        DimensionSource::LimitMember => {
            let (block, surfaces) = ws.family()?;
            let last = surfaces.last().expect("validated family");
            let built = build_surface(last, resolution.unwrap_or(block.resolution))?;
            box_dimension(&mut MeshMetric::new(&built.mesh, steiner_points), deltas)?
        }
        DimensionSource::LimitMatrix => {
            let mut m = ws.matrices()?.last().expect("validated family").clone();
            box_dimension(&mut m, deltas)?
        }
        DimensionSource::Segment => box_dimension(&mut segment_matrix(resolution.unwrap_or(100)), deltas)?,
    };
    let tolerance = DIMENSION_TOLERANCE * ws.constants.tolerance_scale;
    let pass = (estimate.slope - expected).abs() <= tolerance;
    let mut results = to_value(&estimate);
    results["expected"] = json!(expected);
    results["tolerance"] = json!(tolerance);
    Ok(Outcome::new(Verdict::from_pass(pass), results))
}

fn diameter(
    ws: &mut Workspace,
    genus: i64,
    tail: usize,
    d_config: Option<f64>,
    inject: Option<f64>,
) -> TaskResult {
    let (block, surfaces) = ws.family()?.clone();
    let mut parameters = block.parameters.clone();
    let mut members = surfaces;
    if let Some(r) = inject {
        members.push(CatalogSurface::new(
            Family::RoundSphere { radius: r },
            AmbientSpace::euclidean(3)?,
        )?);
        parameters.push(r);
    }
    let seq = SurfaceSequence::new(
        &block.kind,
        parameters,
        members,
        block.resolution,
        2,
        &[],
        ws.constants.seed,
    )?;
    let a0 = ws
        .constants
        .a0
        .ok_or_else(|| Error::Config("the diameter task needs constants.a0".into()))?;
    let exp = diameter_experiment(&seq, ws.constants.h0, a0, genus, tail, d_config)?;
    let injected_excluded = inject.map(|_| exp.members.last().is_some_and(|m| m.excluded.is_some()));
    let pass = exp.stable && exp.within_config != Some(false) && injected_excluded != Some(false);
    let mut results = to_value(&exp);
    results["injected_excluded"] = json!(injected_excluded);
    Ok(Outcome::new(Verdict::from_pass(pass), results))
}
