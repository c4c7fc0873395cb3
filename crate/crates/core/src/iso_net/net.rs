use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::surface::sample::rng;
use crate::surface::{SteinerGraph, SurfacePoint, TriMesh};

/// Maximal `delta`-separated vertex set with its certificates.
#[derive(Debug, Clone, Serialize)]
pub struct Net {
    pub delta: f64,
    pub seed: u64,
    /// Mesh vertices in insertion order.
    pub points: Vec<usize>,
    /// Exact when below `2 delta`, which holds whenever the net has two points.
    pub min_separation: f64,
    /// Largest distance from a mesh vertex to the net.
    pub covering_radius: f64,
    /// `min_separation >= delta` and `covering_radius < delta`.
    pub certified: bool,
    /// `delta` exceeds every distance from the first point.
    pub single_point: bool,
}

impl Net {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Farthest-point insertion from a seeded start vertex until every vertex is
/// within `delta` of the net. Ties go to the lowest vertex index.
pub fn greedy_net(mesh: &TriMesh, graph: &SteinerGraph, delta: f64, seed: u64) -> Result<Net> {
    if !(delta > 0.0) {
        return Err(Error::Config(format!("net radius must be positive, got {delta}")));
    }
    let nv = mesh.num_vertices();
    let start = rng(seed).gen_range(0..nv);
    let mut field = vec![f64::INFINITY; graph.num_nodes()];
    let mut points = vec![start];
    graph.lower_field(mesh, &SurfacePoint::Vertex(start), &mut field);
    let farthest = |field: &[f64]| {
        (0..nv).fold((0, f64::NEG_INFINITY), |best, v| {
            if field[v] > best.1 {
                (v, field[v])
            } else {
                best
            }
        })
    };
    loop {
        let (v, d) = farthest(&field);
        if d < delta {
            break;
        }
        points.push(v);
        graph.lower_field(mesh, &SurfacePoint::Vertex(v), &mut field);
    }
    let covering_radius = farthest(&field).1;
    let mut is_point = vec![false; nv];
    for &p in &points {
        is_point[p] = true;
    }
    let mut dist = vec![f64::INFINITY; graph.num_nodes()];
    let mut min_separation = f64::INFINITY;
    for &a in &points {
        let settled = graph.run(
            &graph.source_labels(mesh, &SurfacePoint::Vertex(a)),
            &mut dist,
            Some(2.0 * delta),
        );
        for &n in &settled {
            if n < nv && n != a && is_point[n] {
                min_separation = min_separation.min(dist[n]);
            }
        }
        for n in settled {
            dist[n] = f64::INFINITY;
        }
    }
    Ok(Net {
        delta,
        seed,
        single_point: points.len() == 1,
        certified: min_separation >= delta && covering_radius < delta,
        points,
        min_separation,
        covering_radius,
    })
}

/// `[area / (pi delta^2), area / (pi (delta/2)^2)]`: covering by `delta`-balls
/// and disjointness of `delta/2`-balls.
pub fn packing_bracket(area: f64, delta: f64) -> (f64, f64) {
    (area / (PI * delta * delta), area / (PI * delta * delta / 4.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct CardinalityBounds {
    pub delta: f64,
    /// `C0 = 8 pi^2 (1 - chi) + 4 pi K0 A0`.
    pub c0: f64,
    /// `(a0 / C0) delta^-2`, or 0 when `C0 <= 0`.
    pub lower: f64,
    /// Set when `C0 <= 0` and the lower bound is vacuous.
    pub lower_vacuous: bool,
    /// `A0 / (c (delta/2)^2)`.
    pub upper: f64,
}

/// Cardinality bracket for a `delta`-net from area bounds `a0 <= area <= A0`.
pub fn net_cardinality_bounds(
    delta: f64,
    area_max: f64,
    area_min: f64,
    k0: f64,
    chi: i64,
    c: f64,
) -> Result<CardinalityBounds> {
    if k0 > 0.0 && delta >= 1.0 / (2.0 * k0).sqrt() {
        return Err(Error::Hypothesis(format!(
            "delta = {delta} must be below 1/sqrt(2 K0) = {}",
            1.0 / (2.0 * k0).sqrt()
        )));
    }
    let c0 = 8.0 * PI * PI * (1.0 - chi as f64) + 4.0 * PI * k0 * area_max;
    let lower_vacuous = c0 <= 0.0;
    Ok(CardinalityBounds {
        delta,
        c0,
        lower: if lower_vacuous {
            0.0
        } else {
            area_min / c0 / (delta * delta)
        },
        lower_vacuous,
        upper: area_max / (c * (delta / 2.0).powi(2)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_two_constant() {
        // chi = -2 and K0 A0 = 1.
        let b = net_cardinality_bounds(0.1, 1.0, 1.0, 1.0, -2, 0.000625).unwrap();
        assert!((b.c0 - (24.0 * PI * PI + 4.0 * PI)).abs() < 1e-12);
        assert!((b.upper - 640_000.0).abs() < 1e-6);
    }

    #[test]
    fn sphere_lower_bound_is_vacuous_for_small_area() {
        // C0 = -8 pi^2 + 4 pi K0 A0 <= 0 once K0 A0 <= 2 pi.
        let b = net_cardinality_bounds(0.1, 1.0, 1.0, 1.0, 2, 0.000625).unwrap();
        assert!(b.c0 < 0.0 && b.lower_vacuous && b.lower == 0.0);
        let round = net_cardinality_bounds(0.1, 4.0 * PI, 4.0 * PI, 1.0, 2, 0.000625).unwrap();
        assert!((round.c0 - 8.0 * PI * PI).abs() < 1e-9 && !round.lower_vacuous);
    }

    #[test]
    fn delta_hypothesis() {
        assert!(matches!(
            net_cardinality_bounds(0.8, 1.0, 1.0, 1.0, 0, 0.1),
            Err(Error::Hypothesis(_))
        ));
    }
}
