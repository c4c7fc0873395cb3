use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::surface::ball::{ball_from_distances, bounded_vertex_distances};
use crate::surface::{SteinerGraph, SurfacePoint, TriMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanOutcome {
    Pass,
    Fail,
    /// `area(B(p, delta)) <= C delta^2`.
    NotApplicable,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub delta_prime: f64,
    /// Defects of vertices whose whole one-ring lies in the ball.
    pub contained: f64,
    /// Sum of `|defect|` over vertices whose one-ring meets the ball boundary.
    pub straddle: f64,
    /// `contained` plus each straddling defect times the fraction of its
    /// one-ring area inside the ball.
    pub weighted: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GaussBonnetScan {
    pub delta: f64,
    pub constant: f64,
    pub k0: f64,
    pub ball_area: f64,
    /// `2 pi - C / 2`.
    pub target: f64,
    pub outcome: ScanOutcome,
    /// Largest grid radius meeting the target.
    pub delta_prime: Option<f64>,
    pub curvature_integral: Option<f64>,
    pub weighted_integral: Option<f64>,
    pub straddle_tolerance: Option<f64>,
    pub rows: Vec<ScanRow>,
}

/// Scans `delta' = delta k / grid_points`, `k = 1..=grid_points`, for a ball
/// whose curvature integral is at most `2 pi - C / 2`.
pub fn gauss_bonnet_ball_scan(
    mesh: &TriMesh,
    graph: &SteinerGraph,
    center: &SurfacePoint,
    delta: f64,
    constant: f64,
    k0: f64,
    grid_points: usize,
) -> Result<GaussBonnetScan> {
    if k0 > 0.0 && delta >= 1.0 / (3.0 * k0).sqrt() {
        return Err(Error::Hypothesis(format!(
            "delta = {delta} must be below 1/sqrt(3 K0) = {}",
            1.0 / (3.0 * k0).sqrt()
        )));
    }
    if grid_points == 0 {
        return Err(Error::Config("scan needs at least one grid point".into()));
    }
    let limit = delta + 2.0 * mesh.max_edge_length();
    let d = bounded_vertex_distances(mesh, graph, center, limit);
    let target = 2.0 * PI - constant / 2.0;
    let ball_area = ball_from_distances(mesh, &d, delta).area;
    let mut scan = GaussBonnetScan {
        delta,
        constant,
        k0,
        ball_area,
        target,
        outcome: ScanOutcome::NotApplicable,
        delta_prime: None,
        curvature_integral: None,
        weighted_integral: None,
        straddle_tolerance: None,
        rows: Vec::new(),
    };
    if ball_area <= constant * delta * delta {
        return Ok(scan);
    }
    let defects = mesh.angle_defects();
    let ring_area: Vec<f64> = (0..mesh.num_vertices())
        .map(|v| mesh.vertex_faces(v).iter().map(|&f| mesh.face_area(f)).sum())
        .collect();
    for k in 1..=grid_points {
        let r = delta * k as f64 / grid_points as f64;
        let ball = ball_from_distances(mesh, &d, r);
        let mut row = ScanRow {
            delta_prime: r,
            contained: 0.0,
            straddle: 0.0,
            weighted: 0.0,
        };
        for v in 0..mesh.num_vertices() {
            let ring = mesh.neighbors(v);
            let inside = (d[v] <= r) as usize + ring.iter().filter(|&&w| d[w] <= r).count();
            if inside == ring.len() + 1 {
                row.contained += defects[v];
                row.weighted += defects[v];
            } else if inside > 0 {
                let covered: f64 = mesh
                    .vertex_faces(v)
                    .iter()
                    .map(|&f| ball.face_fraction[f] * mesh.face_area(f))
                    .sum();
                row.straddle += defects[v].abs();
                row.weighted += defects[v] * covered / ring_area[v];
            }
        }
        scan.rows.push(row);
    }
    let chosen = scan
        .rows
        .iter()
        .rev()
        .find(|row| row.contained <= target + row.straddle);
    scan.outcome = if chosen.is_some() {
        ScanOutcome::Pass
    } else {
        ScanOutcome::Fail
    };
    let shown = chosen
        .unwrap_or_else(|| scan.rows.last().expect("nonempty grid"))
        .clone();
    scan.delta_prime = chosen.map(|row| row.delta_prime);
    scan.curvature_integral = Some(shown.contained);
    scan.weighted_integral = Some(shown.weighted);
    scan.straddle_tolerance = Some(shown.straddle);
    Ok(scan)
}
