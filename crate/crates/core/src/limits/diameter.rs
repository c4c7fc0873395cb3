//! Observed diameters across a family with fixed curvature, area and genus bounds.

use serde::Serialize;

use super::SurfaceSequence;
use crate::error::{Error, Result};
use crate::surface::{SteinerGraph, SurfacePoint, TriMesh, DEFAULT_STEINER_POINTS};

const SWEEPS: usize = 4;
/// Relative spread of diameters over the tail regarded as stable.
pub const DIAMETER_STABILITY: f64 = 0.05;

/// Largest distance found by repeated farthest-point sweeps from vertex 0.
pub fn mesh_diameter(mesh: &TriMesh) -> f64 {
    let graph = SteinerGraph::new(mesh, DEFAULT_STEINER_POINTS);
    let nv = mesh.num_vertices();
    let mut from = 0;
    let mut best: f64 = 0.0;
    for _ in 0..SWEEPS {
        let d = graph.node_distances(mesh, &SurfacePoint::Vertex(from));
        let (far, dist) = (0..nv)
            .map(|v| (v, d[v]))
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
            .expect("nonempty mesh");
        if dist <= best {
            break;
        }
        best = dist;
        from = far;
    }
    best
}

#[derive(Debug, Clone, Serialize)]
pub struct MemberDiameter {
    pub member: usize,
    pub parameter: f64,
    pub surface: String,
    pub max_mean_curvature: f64,
    pub area: f64,
    pub genus: i64,
    pub diameter: Option<f64>,
    pub excluded: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiameterExperiment {
    pub h0: f64,
    pub a0: f64,
    pub genus: i64,
    pub members: Vec<MemberDiameter>,
    pub d_obs: f64,
    /// Admitted members in the tail.
    pub tail: Vec<usize>,
    /// `(max - min) / max` of diameters over the tail.
    pub tail_spread: f64,
    pub stable: bool,
    pub d_config: Option<f64>,
    pub within_config: Option<bool>,
}

/// Diameters of members meeting `|H| <= h0`, `area <= a0` and the genus; the tail
/// is the last `tail_len` admitted members.
pub fn diameter_experiment(
    seq: &SurfaceSequence,
    h0: f64,
    a0: f64,
    genus: i64,
    tail_len: usize,
    d_config: Option<f64>,
) -> Result<DiameterExperiment> {
    if !(h0 >= 0.0 && a0 > 0.0) || tail_len == 0 {
        return Err(Error::Config(format!(
            "need h0 >= 0, a0 > 0 and a nonempty tail; got h0 = {h0}, a0 = {a0}, tail {tail_len}"
        )));
    }
    let mut members = Vec::with_capacity(seq.len());
    for (j, surface) in seq.surfaces.iter().enumerate() {
        let h = surface.max_mean_curvature();
        let area = surface.analytic_area();
        let g = surface.genus();
        let mut reasons = Vec::new();
        if h > h0 {
            reasons.push(format!("max |H| = {h} exceeds H0 = {h0}"));
        }
        if area > a0 {
            reasons.push(format!("area {area} exceeds A0 = {a0}"));
        }
        if g != genus {
            reasons.push(format!("genus {g} differs from {genus}"));
        }
        let excluded = (!reasons.is_empty()).then(|| reasons.join("; "));
        members.push(MemberDiameter {
            member: j,
            parameter: seq.parameters[j],
            surface: surface.name(),
            max_mean_curvature: h,
            area,
            genus: g,
            diameter: excluded.is_none().then(|| mesh_diameter(&seq.meshes[j].mesh)),
            excluded,
        });
    }
    let admitted: Vec<usize> = members
        .iter()
        .filter(|m| m.diameter.is_some())
        .map(|m| m.member)
        .collect();
    if admitted.is_empty() {
        return Err(Error::Config("every member violates the constraints".into()));
    }
    let diam = |j: usize| members[j].diameter.expect("admitted");
    let d_obs = admitted.iter().map(|&j| diam(j)).fold(0.0, f64::max);
    let tail: Vec<usize> = admitted[admitted.len().saturating_sub(tail_len)..].to_vec();
    let (lo, hi) = tail
        .iter()
        .map(|&j| diam(j))
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d), hi.max(d)));
    let tail_spread = (hi - lo) / hi;
    Ok(DiameterExperiment {
        h0,
        a0,
        genus,
        d_obs,
        stable: tail_spread <= DIAMETER_STABILITY,
        tail,
        tail_spread,
        within_config: d_config.map(|d| d_obs <= d),
        d_config,
        members,
    })
}
