//! Degenerating families sampled at shared chart points: distance matrices,
//! their uniform limit, neck collapse, diameters and covering dimension.

pub mod diameter;
pub mod dimension;
pub mod neck;
pub mod pseudometric;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::surface::build::{build_surface, BuiltMesh};
use crate::surface::sample::{chart_samples, locate_chart_points};
use crate::surface::{CatalogSurface, SampleSet, SteinerGraph, TriMesh, DEFAULT_STEINER_POINTS};

pub use diameter::{diameter_experiment, mesh_diameter, DiameterExperiment, MemberDiameter};
pub use dimension::{box_dimension, CoveringMetric, DimensionEstimate, MeshMetric};
pub use neck::{neck_band, neck_diameter, polar_band, NeckReport};
pub use pseudometric::{limit_pseudometric, LimitVerdict, PseudoMetric};

/// Symmetric matrix of pairwise distances between samples, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceMatrix {
    pub size: usize,
    /// Largest `|d(i, j) - d(j, i)|` before averaging.
    pub asymmetry: f64,
    #[serde(skip)]
    pub values: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds from a possibly asymmetric kernel and averages the two triangles.
    pub fn from_fn(size: usize, mut kernel: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = vec![0.0; size * size];
        for i in 0..size {
            for j in 0..size {
                if i != j {
                    values[i * size + j] = kernel(i, j);
                }
            }
        }
        let mut asymmetry: f64 = 0.0;
        for i in 0..size {
            for j in i + 1..size {
                let (a, b) = (values[i * size + j], values[j * size + i]);
                asymmetry = asymmetry.max((a - b).abs());
                let mean = 0.5 * (a + b);
                values[i * size + j] = mean;
                values[j * size + i] = mean;
            }
        }
        DistanceMatrix {
            size,
            asymmetry,
            values,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.size..(i + 1) * self.size]
    }

    pub fn scaled(&self, t: f64) -> Self {
        DistanceMatrix {
            size: self.size,
            asymmetry: self.asymmetry * t,
            values: self.values.iter().map(|v| v * t).collect(),
        }
    }

    /// `sup |self - other|` over all entries.
    pub fn uniform_deviation(&self, other: &DistanceMatrix) -> Result<f64> {
        if self.size != other.size {
            return Err(Error::Config(format!(
                "matrices of size {} and {} are not identified",
                self.size, other.size
            )));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Largest `d(i, k) - d(i, j) - d(j, k)` over all triples.
    pub fn max_triangle_violation(&self) -> f64 {
        let n = self.size;
        let mut worst = f64::NEG_INFINITY;
        for j in 0..n {
            let rj = self.row(j);
            for i in 0..n {
                let (ri, dij) = (self.row(i), rj[i]);
                for k in 0..n {
                    worst = worst.max(ri[k] - dij - rj[k]);
                }
            }
        }
        worst
    }

    /// Smallest off-diagonal entry and largest `|d(i, i)|`.
    pub fn extremes(&self) -> (f64, f64) {
        let mut min_off = f64::INFINITY;
        let mut max_diag: f64 = 0.0;
        for i in 0..self.size {
            for j in 0..self.size {
                if i == j {
                    max_diag = max_diag.max(self.get(i, i).abs());
                } else {
                    min_off = min_off.min(self.get(i, j));
                }
            }
        }
        (min_off, max_diag)
    }
}

/// All-pairs geodesic distances between `samples` on a connected mesh.
pub fn distance_matrix(mesh: &TriMesh, samples: &SampleSet) -> Result<DistanceMatrix> {
    if mesh.components() != 1 {
        return Err(Error::Topology(format!(
            "distance matrix needs a connected mesh, got {} components",
            mesh.components()
        )));
    }
    let graph = SteinerGraph::new(mesh, DEFAULT_STEINER_POINTS);
    let n = samples.points.len();
    let mut rows = Vec::with_capacity(n);
    for p in &samples.points {
        let labels = graph.node_distances(mesh, p);
        let row: Vec<f64> = samples
            .points
            .iter()
            .map(|q| graph.point_distance(mesh, &labels, p, q))
            .collect();
        if let Some(target) = row.iter().position(|d| !d.is_finite()) {
            return Err(Error::Unreachable { target });
        }
        rows.push(row);
    }
    Ok(DistanceMatrix::from_fn(n, |i, j| rows[i][j]))
}

/// A family of catalog surfaces with samples identified through shared chart coordinates.
#[derive(Debug, Clone, Serialize)]
pub struct SurfaceSequence {
    pub family: String,
    pub parameters: Vec<f64>,
    pub surfaces: Vec<CatalogSurface>,
    pub resolution: usize,
    pub seed: u64,
    pub chart_samples: Vec<(f64, f64)>,
    /// Indices of the samples placed explicitly rather than drawn.
    pub pinned: Vec<usize>,
    #[serde(skip)]
    pub meshes: Vec<BuiltMesh>,
}

impl SurfaceSequence {
    /// Members meshed at `resolution`; `pinned` chart points come first and the
    /// rest of the `count` samples are area-weighted draws on the first member.
    pub fn new(
        family: &str,
        parameters: Vec<f64>,
        surfaces: Vec<CatalogSurface>,
        resolution: usize,
        count: usize,
        pinned: &[(f64, f64)],
        seed: u64,
    ) -> Result<Self> {
        if surfaces.is_empty() || surfaces.len() != parameters.len() {
            return Err(Error::Config(format!(
                "{} surfaces for {} parameters",
                surfaces.len(),
                parameters.len()
            )));
        }
        if count < pinned.len() {
            return Err(Error::Config(format!(
                "{count} samples cannot hold {} pinned points",
                pinned.len()
            )));
        }
        let meshes = surfaces
            .iter()
            .map(|s| build_surface(s, resolution))
            .collect::<Result<Vec<_>>>()?;
        let mut chart = pinned.to_vec();
        chart.extend(chart_samples(
            &surfaces[0],
            &meshes[0].mesh,
            count - pinned.len(),
            seed,
        ));
        Ok(SurfaceSequence {
            family: family.into(),
            parameters,
            surfaces,
            resolution,
            seed,
            pinned: (0..pinned.len()).collect(),
            chart_samples: chart,
            meshes,
        })
    }

    pub fn len(&self) -> usize {
        self.surfaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.surfaces.is_empty()
    }

    /// The shared samples placed on member `j`.
    pub fn samples(&self, j: usize) -> SampleSet {
        locate_chart_points(
            &self.surfaces[j],
            &self.meshes[j].mesh,
            &self.chart_samples,
            self.seed,
        )
    }

    pub fn matrix(&self, j: usize) -> Result<DistanceMatrix> {
        distance_matrix(&self.meshes[j].mesh, &self.samples(j))
    }

    pub fn matrices(&self) -> Result<Vec<DistanceMatrix>> {
        (0..self.len()).map(|j| self.matrix(j)).collect()
    }

    /// Distance tolerance of member `j`: its longest edge.
    pub fn mesh_tolerance(&self, j: usize) -> f64 {
        self.meshes[j].mesh.max_edge_length()
    }
}

/// Number of samples pinned to the waist circle by [`dumbbell_family`].
pub const WAIST_SAMPLES: usize = 4;

/// Dumbbells with the given neck radii; the first `WAIST_SAMPLES` samples sit on the waist.
pub fn dumbbell_family(necks: &[f64], resolution: usize, count: usize, seed: u64) -> Result<SurfaceSequence> {
    let surfaces = necks
        .iter()
        .map(|&n| CatalogSurface::dumbbell(n))
        .collect::<Result<Vec<_>>>()?;
    let waist: Vec<(f64, f64)> = (0..WAIST_SAMPLES)
        .map(|k| (0.5, k as f64 / WAIST_SAMPLES as f64))
        .collect();
    SurfaceSequence::new(
        "dumbbell",
        necks.to_vec(),
        surfaces,
        resolution,
        count,
        &waist,
        seed,
    )
}
