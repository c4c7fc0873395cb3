use serde::Serialize;

use super::isoperimetric::v0;
use crate::ambient::AmbientSpace;
use crate::curvature::{conjugate_radius_bound, curvature_bound};
use crate::error::{Error, Result};
use crate::surface::{local_ball, SteinerGraph, SurfacePoint, TriMesh};

/// Isoperimetric constant used when none is configured.
pub const DEFAULT_BETA: f64 = 10.0;

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityConstants {
    pub beta: f64,
    pub h0: f64,
    pub k0: f64,
    /// `c = min{1, 1 / (16 beta^2)}`.
    pub c: f64,
    pub conjugate_radius: f64,
    pub v0: f64,
    pub sqrt_v0: f64,
    /// `T = 1 / (2 beta H0)`, infinite when `H0 = 0`.
    pub threshold: f64,
    /// The literal `2 beta H0`, reported for comparison with `threshold`.
    pub literal_threshold: f64,
    /// `delta = min{R, sqrt(v0), T}`.
    pub delta: f64,
}

pub fn monotonicity_constants(ambient: &AmbientSpace, h0: f64, beta: f64) -> Result<MonotonicityConstants> {
    if !ambient.is_compact() {
        return Err(Error::Unsupported(
            "monotonicity constants need a compact ambient (v0)".into(),
        ));
    }
    if !(h0 >= 0.0) || !(beta > 0.0) {
        return Err(Error::Config(format!(
            "need h0 >= 0 and beta > 0, got h0 = {h0}, beta = {beta}"
        )));
    }
    let k0 = curvature_bound(h0, ambient);
    let conjugate_radius = conjugate_radius_bound(k0).radius;
    let v0 = v0(ambient);
    let threshold = if h0 == 0.0 {
        f64::INFINITY
    } else {
        1.0 / (2.0 * beta * h0)
    };
    Ok(MonotonicityConstants {
        beta,
        h0,
        k0,
        c: 1.0f64.min(1.0 / (16.0 * beta * beta)),
        conjugate_radius,
        v0,
        sqrt_v0: v0.sqrt(),
        threshold,
        literal_threshold: 2.0 * beta * h0,
        delta: conjugate_radius.min(v0.sqrt()).min(threshold),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityResult {
    pub center: [f64; 3],
    pub eps: f64,
    pub area: f64,
    /// `c eps^2`.
    pub lower_bound: f64,
    /// `eps` exceeds the supplied `delta`; evaluated regardless.
    pub out_of_range: bool,
    pub pass: bool,
}

/// `area(B(p, eps)) >= c eps^2` on the graph metric of `mesh`.
pub fn monotonicity_check(
    mesh: &TriMesh,
    graph: &SteinerGraph,
    center: &SurfacePoint,
    eps: f64,
    c: f64,
    delta: Option<f64>,
) -> MonotonicityResult {
    let ball = local_ball(mesh, graph, center, eps);
    let p = center.position(mesh);
    let lower_bound = c * eps * eps;
    MonotonicityResult {
        center: [p.x, p.y, p.z],
        eps,
        area: ball.area,
        lower_bound,
        out_of_range: delta.is_some_and(|d| eps > d),
        pass: ball.area >= lower_bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_is_rejected() {
        let e = AmbientSpace::euclidean(3).unwrap();
        assert!(matches!(
            monotonicity_constants(&e, 1.0, 10.0),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn minimal_case_has_no_threshold() {
        let t = AmbientSpace::flat_torus(vec![1.0, 1.0, 1.0]).unwrap();
        let m = monotonicity_constants(&t, 0.0, 10.0).unwrap();
        assert!(m.threshold.is_infinite());
        assert_eq!(m.delta, m.sqrt_v0);
        assert_eq!(m.c, 1.0 / 1600.0);
    }
}
