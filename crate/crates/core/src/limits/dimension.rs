//! Greedy covering counts and the box-counting slope.

use serde::Serialize;

use super::DistanceMatrix;
use crate::error::{Error, Result};
use crate::surface::{SteinerGraph, TriMesh};

/// A finite metric space that can enumerate open balls.
pub trait CoveringMetric {
    fn num_points(&self) -> usize;
    /// Marks every point at distance `< radius` from `center`.
    fn cover(&mut self, center: usize, radius: f64, covered: &mut [bool]);
    /// Scale below which counts only reflect the sampling.
    fn resolution(&self) -> f64;
}

impl CoveringMetric for DistanceMatrix {
    fn num_points(&self) -> usize {
        self.size
    }

    fn cover(&mut self, center: usize, radius: f64, covered: &mut [bool]) {
        for (c, &d) in covered.iter_mut().zip(self.row(center)) {
            if d < radius {
                *c = true;
            }
        }
    }

    /// Largest nearest-neighbour distance.
    fn resolution(&self) -> f64 {
        (0..self.size)
            .map(|i| {
                (0..self.size)
                    .filter(|&j| j != i)
                    .map(|j| self.get(i, j))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
}

/// Mesh vertices under the Steiner-graph metric, explored by pruned searches.
pub struct MeshMetric<'a> {
    mesh: &'a TriMesh,
    graph: SteinerGraph,
    labels: Vec<f64>,
}

impl<'a> MeshMetric<'a> {
    pub fn new(mesh: &'a TriMesh, steiner_points: usize) -> Self {
        let graph = SteinerGraph::new(mesh, steiner_points);
        let labels = vec![f64::INFINITY; graph.num_nodes()];
        MeshMetric { mesh, graph, labels }
    }
}

impl CoveringMetric for MeshMetric<'_> {
    fn num_points(&self) -> usize {
        self.mesh.num_vertices()
    }

    fn cover(&mut self, center: usize, radius: f64, covered: &mut [bool]) {
        let settled = self.graph.run(&[(center, 0.0)], &mut self.labels, Some(radius));
        for n in settled {
            if n < covered.len() && self.labels[n] < radius {
                covered[n] = true;
            }
            self.labels[n] = f64::INFINITY;
        }
    }

    fn resolution(&self) -> f64 {
        self.mesh.max_edge_length()
    }
}

/// Centres chosen in index order, each the first point not yet covered.
pub fn greedy_cover_count(metric: &mut dyn CoveringMetric, delta: f64) -> usize {
    let n = metric.num_points();
    let mut covered = vec![false; n];
    let mut count = 0;
    for p in 0..n {
        if !covered[p] {
            count += 1;
            metric.cover(p, delta, &mut covered);
            covered[p] = true;
        }
    }
    count
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverRow {
    pub delta: f64,
    pub count: usize,
    /// `n(delta) delta`.
    pub content1: f64,
    /// `n(delta) delta^2`.
    pub content2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DimensionEstimate {
    pub resolution: f64,
    pub rows: Vec<CoverRow>,
    pub excluded: Vec<f64>,
    pub warnings: Vec<String>,
    /// Least-squares slope of `ln n` against `ln(1/delta)`.
    pub slope: f64,
    pub intercept: f64,
    /// `max n(delta) delta`.
    pub v1: f64,
    /// `max n(delta) delta^2`.
    pub v2: f64,
}

/// Covering counts at each `delta` (at least 3, strictly decreasing) and the fitted slope.
/// Values at or below the metric's resolution are dropped with a warning.
pub fn box_dimension(metric: &mut dyn CoveringMetric, deltas: &[f64]) -> Result<DimensionEstimate> {
    if deltas.len() < 3 || deltas.windows(2).any(|w| !(w[1] < w[0])) || deltas.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::Config(format!(
            "need at least 3 positive strictly decreasing deltas, got {deltas:?}"
        )));
    }
    let resolution = metric.resolution();
    let (kept, excluded): (Vec<f64>, Vec<f64>) = deltas.iter().partition(|&&d| d > resolution);
    let warnings: Vec<String> = excluded
        .iter()
        .map(|d| format!("delta {d} is not above the sample resolution {resolution}; excluded"))
        .collect();
    if kept.len() < 2 {
        return Err(Error::Config(format!(
            "only {} delta values lie above the sample resolution {resolution}",
            kept.len()
        )));
    }
    let rows: Vec<CoverRow> = kept
        .iter()
        .map(|&delta| {
            let count = greedy_cover_count(metric, delta);
            CoverRow {
                delta,
                count,
                content1: count as f64 * delta,
                content2: count as f64 * delta * delta,
            }
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| (1.0 / r.delta).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| (r.count as f64).ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(DimensionEstimate {
        resolution,
        v1: rows.iter().map(|r| r.content1).fold(0.0, f64::max),
        v2: rows.iter().map(|r| r.content2).fold(0.0, f64::max),
        intercept: my - slope * mx,
        slope,
        rows,
        excluded,
        warnings,
    })
}
