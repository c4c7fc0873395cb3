//! Scenario files: TOML with strict keys, validated into library types.

use std::fmt;
use std::path::PathBuf;

use bmc::ambient::AmbientSpace;
use bmc::surface::{CatalogSurface, Family};
use serde::{Deserialize, Serialize};

/// A config problem located in the source text or at a key path.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    Invalid {
        path: String,
        message: String,
    },
    Io(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse {
                line,
                column,
                message,
            } => {
                write!(f, "parse error at line {line}, column {column}: {message}")
            }
            ConfigError::Invalid { path, message } => write!(f, "invalid value at `{path}`: {message}"),
            ConfigError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub ambient: AmbientBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyBlock>,
    pub constants: Constants,
    pub tasks: Vec<TaskConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientBlock {
    pub kind: String,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periods: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

/// One catalog surface; which shape keys apply depends on `family`.
#[derive(Debug, Clone, PartialEq, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceBlock {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub major: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neck: Option<f64>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

/// A one-parameter family; `parameters` are neck radii for dumbbells and radii for spheres.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyBlock {
    pub kind: String,
    pub parameters: Vec<f64>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub h0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<f64>,
    #[serde(default = "default_beta")]
    pub beta: f64,
    pub seed: u64,
    #[serde(default = "default_tolerance_scale")]
    pub tolerance_scale: f64,
}

fn default_resolution() -> usize {
    64
}
fn default_samples() -> usize {
    200
}
fn default_beta() -> f64 {
    bmc::iso_net::monotonicity::DEFAULT_BETA
}
fn default_tolerance_scale() -> f64 {
    1.0
}

/// Where a covering dimension is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DimensionSource {
    /// Vertices of the scenario surface.
    Surface,
    /// Vertices of the last family member.
    LimitMember,
    /// The shared-sample matrix of the last family member.
    LimitMatrix,
    /// Equally spaced points on a unit segment.
    Segment,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskConfig {
    Curvature {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<usize>,
    },
    Jacobi {
        #[serde(default = "default_chart")]
        chart: [f64; 2],
        #[serde(default = "default_theta")]
        theta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
        #[serde(default = "default_step")]
        step: f64,
    },
    Schwarz {
        #[serde(default)]
        flat_plane: bool,
        #[serde(default = "default_chart")]
        chart: [f64; 2],
        #[serde(default = "default_grid")]
        radial: usize,
        #[serde(default = "default_grid")]
        angular: usize,
        /// Overrides the curvature bound derived from `constants.h0`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k0: Option<f64>,
    },
    Isoperimetric {
        /// Radius of a flat disc measured in closed form; the surface mesh when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        disc_radius: Option<f64>,
    },
    Monotonicity {
        #[serde(default = "default_centers")]
        centers: usize,
        #[serde(default = "default_radii")]
        eps: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<usize>,
    },
    Net {
        #[serde(default = "default_deltas")]
        deltas: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<usize>,
    },
    GaussBonnet {
        delta: f64,
        constant: f64,
        #[serde(default = "default_chart")]
        chart: [f64; 2],
        #[serde(default = "default_scan_points")]
        grid_points: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<usize>,
    },
    Modulus {
        /// `right`, `round` or a path to an OFF mesh.
        annulus: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        height: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        circumference: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        outer: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        inner: Option<f64>,
        #[serde(default = "default_resolution")]
        resolution: usize,
        #[serde(default = "default_loop0")]
        b0: String,
        #[serde(default = "default_loop1")]
        b1: String,
    },
    Lift {
        /// `sphere-cap`, `flat-disc`, `peanut`, `torus-strip` or a path to an OFF mesh.
        disc: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        size: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rings: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eps: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        square_scale: Option<f64>,
    },
    Limit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        zeta: Option<f64>,
    },
    Dimension {
        source: DimensionSource,
        #[serde(default = "default_deltas")]
        deltas: Vec<f64>,
        #[serde(default = "default_expected_dimension")]
        expected: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<usize>,
        #[serde(default = "default_dimension_steiner")]
        steiner_points: usize,
    },
    Diameter {
        #[serde(default)]
        genus: i64,
        #[serde(default = "default_tail")]
        tail: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d_config: Option<f64>,
        /// Radius of a round sphere appended to the family to exercise the filter.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        inject_sphere: Option<f64>,
    },
}

fn default_chart() -> [f64; 2] {
    [0.3, 0.2]
}
fn default_theta() -> f64 {
    0.3
}
fn default_step() -> f64 {
    1e-3
}
fn default_grid() -> usize {
    200
}
fn default_centers() -> usize {
    50
}
fn default_radii() -> Vec<f64> {
    vec![0.05, 0.1]
}
fn default_deltas() -> Vec<f64> {
    vec![0.2, 0.1, 0.05]
}
fn default_scan_points() -> usize {
    50
}
fn default_loop0() -> String {
    "loop:0".into()
}
fn default_loop1() -> String {
    "loop:1".into()
}
fn default_expected_dimension() -> f64 {
    2.0
}
fn default_dimension_steiner() -> usize {
    1
}
fn default_tail() -> usize {
    3
}

/// Disc names the lift task builds itself; anything else is an OFF path.
pub const BUILTIN_DISCS: [&str; 4] = ["sphere-cap", "flat-disc", "peanut", "torus-strip"];

impl TaskConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            TaskConfig::Curvature { .. } => "curvature",
            TaskConfig::Jacobi { .. } => "jacobi",
            TaskConfig::Schwarz { .. } => "schwarz",
            TaskConfig::Isoperimetric { .. } => "isoperimetric",
            TaskConfig::Monotonicity { .. } => "monotonicity",
            TaskConfig::Net { .. } => "net",
            TaskConfig::GaussBonnet { .. } => "gauss-bonnet",
            TaskConfig::Modulus { .. } => "modulus",
            TaskConfig::Lift { .. } => "lift",
            TaskConfig::Limit { .. } => "limit",
            TaskConfig::Dimension { .. } => "dimension",
            TaskConfig::Diameter { .. } => "diameter",
        }
    }

    fn needs_surface(&self) -> bool {
        match self {
            TaskConfig::Curvature { .. }
            | TaskConfig::Jacobi { .. }
            | TaskConfig::Monotonicity { .. }
            | TaskConfig::Net { .. }
            | TaskConfig::GaussBonnet { .. } => true,
            TaskConfig::Schwarz { flat_plane, .. } => !flat_plane,
            TaskConfig::Isoperimetric { disc_radius } => disc_radius.is_none(),
            TaskConfig::Dimension { source, .. } => *source == DimensionSource::Surface,
            TaskConfig::Lift { disc, .. } => !BUILTIN_DISCS.contains(&disc.as_str()),
            _ => false,
        }
    }

    fn needs_family(&self) -> bool {
        match self {
            TaskConfig::Limit { .. } | TaskConfig::Diameter { .. } => true,
            TaskConfig::Dimension { source, .. } => {
                matches!(
                    source,
                    DimensionSource::LimitMember | DimensionSource::LimitMatrix
                )
            }
            _ => false,
        }
    }
}

/// Parses TOML text into a config; syntax and schema errors carry line and column.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    toml::from_str(text).map_err(|e| {
        let (line, column) = e
            .span()
            .map(|span| line_column(text, span.start))
            .unwrap_or((1, 1));
        ConfigError::Parse {
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

/// Reads, parses and validates a scenario file.
pub fn load_config(path: &std::path::Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io(format!("cannot read {}: {e}", path.display())))?;
    let config = parse_config(&text)?;
    config.validate()?;
    Ok(config)
}

fn positive(path: &str, x: f64) -> Result<f64, ConfigError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(path, format!("must be positive and finite, got {x}")))
    }
}

fn decreasing_positive(path: &str, xs: &[f64]) -> Result<(), ConfigError> {
    for (i, &x) in xs.iter().enumerate() {
        positive(&format!("{path}[{i}]"), x)?;
    }
    if xs.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid(path, "values must be strictly decreasing"));
    }
    Ok(())
}

impl AmbientBlock {
    pub fn build(&self) -> Result<AmbientSpace, ConfigError> {
        if self.dim < 3 {
            return Err(invalid(
                "ambient.dim",
                format!("must be at least 3, got {}", self.dim),
            ));
        }
        let no_radius = |kind: &str| match self.radius {
            Some(_) => Err(invalid("ambient.radius", format!("not used by kind `{kind}`"))),
            None => Ok(()),
        };
        let no_periods = |kind: &str| match self.periods {
            Some(_) => Err(invalid("ambient.periods", format!("not used by kind `{kind}`"))),
            None => Ok(()),
        };
        let space = match self.kind.as_str() {
            "euclidean" => {
                no_radius("euclidean")?;
                no_periods("euclidean")?;
                AmbientSpace::euclidean(self.dim)
            }
            "flat-torus" => {
                no_radius("flat-torus")?;
                let periods = self
                    .periods
                    .clone()
                    .ok_or_else(|| invalid("ambient.periods", "required for a flat torus"))?;
                if periods.len() != self.dim {
                    return Err(invalid(
                        "ambient.periods",
                        format!("expected {} periods, got {}", self.dim, periods.len()),
                    ));
                }
                for (i, &p) in periods.iter().enumerate() {
                    positive(&format!("ambient.periods[{i}]"), p)?;
                }
                AmbientSpace::flat_torus(periods)
            }
            "round-sphere" => {
                no_periods("round-sphere")?;
                let r = self
                    .radius
                    .ok_or_else(|| invalid("ambient.radius", "required for a round sphere"))?;
                positive("ambient.radius", r)?;
                AmbientSpace::round_sphere(self.dim, r)
            }
            other => {
                return Err(invalid(
                    "ambient.kind",
                    format!("unknown kind `{other}`; expected euclidean, flat-torus or round-sphere"),
                ))
            }
        };
        space.map_err(|e| invalid("ambient", e.to_string()))
    }
}

impl SurfaceBlock {
    fn family(&self) -> Result<Family, ConfigError> {
        let need = |key: &str, v: Option<f64>| -> Result<f64, ConfigError> {
            let path = format!("surface.{key}");
            positive(
                &path,
                v.ok_or_else(|| invalid(&path, format!("required for `{}`", self.family)))?,
            )
        };
        Ok(match self.family.as_str() {
            "round-sphere" => Family::RoundSphere {
                radius: need("radius", self.radius)?,
            },
            "ellipsoid" => {
                let [a, b, c] = self
                    .axes
                    .ok_or_else(|| invalid("surface.axes", "required for `ellipsoid`"))?;
                for (i, x) in [a, b, c].into_iter().enumerate() {
                    positive(&format!("surface.axes[{i}]"), x)?;
                }
                Family::Ellipsoid { a, b, c }
            }
            "flat-torus" => Family::FlatTorus2,
            "torus-of-revolution" => Family::TorusOfRevolution {
                major: need("major", self.major)?,
                minor: need("minor", self.minor)?,
            },
            "dumbbell" => Family::Dumbbell {
                neck: need("neck", self.neck)?,
            },
            other => {
                return Err(invalid(
                    "surface.family",
                    format!(
                        "unknown family `{other}`; expected round-sphere, ellipsoid, flat-torus, \
                         torus-of-revolution or dumbbell"
                    ),
                ))
            }
        })
    }

    pub fn build(&self, ambient: &AmbientSpace) -> Result<CatalogSurface, ConfigError> {
        if self.resolution < 3 {
            return Err(invalid(
                "surface.resolution",
                format!("must be at least 3, got {}", self.resolution),
            ));
        }
        CatalogSurface::new(self.family()?, ambient.clone()).map_err(|e| invalid("surface", e.to_string()))
    }
}

impl FamilyBlock {
    pub fn build(&self, ambient: &AmbientSpace) -> Result<Vec<CatalogSurface>, ConfigError> {
        if self.parameters.len() < 3 {
            return Err(invalid("family.parameters", "a family needs at least 3 members"));
        }
        for (i, &p) in self.parameters.iter().enumerate() {
            positive(&format!("family.parameters[{i}]"), p)?;
        }
        if self.samples < 2 {
            return Err(invalid("family.samples", "need at least 2 samples"));
        }
        if self.resolution < 3 {
            return Err(invalid("family.resolution", "must be at least 3"));
        }
        self.parameters
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let family = match self.kind.as_str() {
                    "dumbbell" => Family::Dumbbell { neck: p },
                    "round-sphere" => Family::RoundSphere { radius: p },
                    other => {
                        return Err(invalid(
                            "family.kind",
                            format!("unknown family `{other}`; expected dumbbell or round-sphere"),
                        ))
                    }
                };
                CatalogSurface::new(family, ambient.clone())
                    .map_err(|e| invalid(format!("family.parameters[{i}]"), e.to_string()))
            })
            .collect()
    }
}

impl ScenarioConfig {
    /// Checks every constraint not expressible in the schema; errors name the key path.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.name.trim().is_empty() {
            return Err(invalid("name", "must not be empty"));
        }
        let c = &self.constants;
        if !(c.h0 >= 0.0 && c.h0.is_finite()) {
            return Err(invalid(
                "constants.h0",
                format!("must be nonnegative and finite, got {}", c.h0),
            ));
        }
        if let Some(a0) = c.a0 {
            positive("constants.a0", a0)?;
        }
        positive("constants.beta", c.beta)?;
        positive("constants.tolerance_scale", c.tolerance_scale)?;
        let ambient = self.ambient.build()?;
        if let Some(s) = &self.surface {
            s.build(&ambient)?;
        }
        if let Some(f) = &self.family {
            f.build(&ambient)?;
        }
        if self.tasks.is_empty() {
            return Err(invalid("tasks", "at least one task is required"));
        }
        for (i, task) in self.tasks.iter().enumerate() {
            let at = |key: &str| format!("tasks[{i}].{key}");
            if task.needs_surface() && self.surface.is_none() {
                return Err(invalid(
                    "surface",
                    format!("required by task {i} ({})", task.kind()),
                ));
            }
            if task.needs_family() && self.family.is_none() {
                return Err(invalid(
                    "family",
                    format!("required by task {i} ({})", task.kind()),
                ));
            }
            match task {
                TaskConfig::Jacobi { radius, step, .. } => {
                    if let Some(r) = radius {
                        positive(&at("radius"), *r)?;
                    }
                    if !(*step > 0.0 && *step <= bmc::curvature::jacobi::MAX_STEP) {
                        return Err(invalid(at("step"), format!("must lie in (0, 1e-3], got {step}")));
                    }
                }
                TaskConfig::Schwarz {
                    radial, angular, k0, ..
                } => {
                    if let Some(k) = k0 {
                        positive(&at("k0"), *k)?;
                    }
                    if *radial < 2 || *angular < 3 {
                        return Err(invalid(
                            at("radial"),
                            "grid needs at least 2 radial and 3 angular samples",
                        ));
                    }
                }
                TaskConfig::Isoperimetric { disc_radius: Some(r) } => {
                    positive(&at("disc_radius"), *r)?;
                }
                TaskConfig::Monotonicity { centers, eps, .. } => {
                    if *centers == 0 {
                        return Err(invalid(at("centers"), "must be positive"));
                    }
                    for (k, &e) in eps.iter().enumerate() {
                        positive(&at(&format!("eps[{k}]")), e)?;
                    }
                }
                TaskConfig::Net { deltas, .. } => {
                    for (k, &d) in deltas.iter().enumerate() {
                        positive(&at(&format!("deltas[{k}]")), d)?;
                    }
                }
                TaskConfig::GaussBonnet {
                    delta,
                    constant,
                    grid_points,
                    ..
                } => {
                    positive(&at("delta"), *delta)?;
                    if !(*constant >= 0.0) {
                        return Err(invalid(at("constant"), "must be nonnegative"));
                    }
                    if *grid_points == 0 {
                        return Err(invalid(at("grid_points"), "must be positive"));
                    }
                }
                TaskConfig::Modulus {
                    annulus,
                    height,
                    circumference,
                    outer,
                    inner,
                    b0,
                    b1,
                    ..
                } => {
                    match annulus.as_str() {
                        "right" => {
                            positive(
                                &at("height"),
                                height.ok_or_else(|| invalid(at("height"), "required"))?,
                            )?;
                            positive(
                                &at("circumference"),
                                circumference.ok_or_else(|| invalid(at("circumference"), "required"))?,
                            )?;
                        }
                        "round" => {
                            let o = outer.ok_or_else(|| invalid(at("outer"), "required"))?;
                            let r = inner.ok_or_else(|| invalid(at("inner"), "required"))?;
                            positive(&at("outer"), o)?;
                            positive(&at("inner"), r)?;
                            if r >= o {
                                return Err(invalid(at("inner"), "must be smaller than outer"));
                            }
                        }
                        _ => {}
                    }
                    for (key, spec) in [("b0", b0), ("b1", b1)] {
                        spec.parse::<bmc::conformal::LoopSelector>()
                            .map_err(|e| invalid(at(key), e.to_string()))?;
                    }
                }
                TaskConfig::Lift {
                    size,
                    eps,
                    square_scale,
                    ..
                } => {
                    for (key, v) in [("size", size), ("eps", eps), ("square_scale", square_scale)] {
                        if let Some(v) = v {
                            positive(&at(key), *v)?;
                        }
                    }
                }
                TaskConfig::Limit { zeta: Some(z) } if !(*z >= 0.0) => {
                    return Err(invalid(at("zeta"), "must be nonnegative"));
                }
                TaskConfig::Dimension { deltas, expected, .. } => {
                    if deltas.len() < 3 {
                        return Err(invalid(at("deltas"), "need at least 3 values"));
                    }
                    decreasing_positive(&at("deltas"), deltas)?;
                    positive(&at("expected"), *expected)?;
                }
                TaskConfig::Diameter {
                    tail,
                    d_config,
                    inject_sphere,
                    ..
                } => {
                    if *tail == 0 {
                        return Err(invalid(at("tail"), "must be positive"));
                    }
                    if self.constants.a0.is_none() {
                        return Err(invalid("constants.a0", "required by the diameter task"));
                    }
                    for (key, v) in [("d_config", d_config), ("inject_sphere", inject_sphere)] {
                        if let Some(v) = v {
                            positive(&at(key), *v)?;
                        }
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "t"
[ambient]
kind = "euclidean"
dim = 3
[surface]
family = "round-sphere"
radius = 1.0
[constants]
h0 = 2.0
seed = 1
[[tasks]]
kind = "curvature"
"#;

    #[test]
    fn minimal_config_validates() {
        let c = parse_config(MINIMAL).unwrap();
        c.validate().unwrap();
        assert_eq!(c.constants.beta, 10.0);
        assert_eq!(c.surface.unwrap().resolution, 64);
    }

    #[test]
    fn unknown_task_key_is_a_parse_error() {
        let text = format!("{MINIMAL}resolutoin = 3\n");
        let err = parse_config(&text).unwrap_err();
        let ConfigError::Parse { line, message, .. } = err else {
            panic!()
        };
        assert!(message.contains("resolutoin"), "{message}");
        assert_eq!(line, 12, "points at the offending table");
    }

    #[test]
    fn line_and_column_are_one_based() {
        assert_eq!(line_column("ab\ncd", 4), (2, 2));
        assert_eq!(line_column("ab", 0), (1, 1));
    }
}
