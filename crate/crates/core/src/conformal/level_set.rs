//! Level curves of the annulus potential and the shortest separating one.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use super::AnnulusRegion;
use crate::error::{Error, Result};
use crate::surface::TriMesh;

/// Number of levels `t_k = (k + 1) / (LEVEL_COUNT + 1)` scanned.
pub const LEVEL_COUNT: usize = 101;

/// Relative slack allowed on `length^2 <= area / modulus`.
pub const AHLFORS_SLACK: f64 = 0.02;

/// One closed component of a level set.
#[derive(Debug, Clone, Serialize)]
pub struct LevelCurve {
    pub level: f64,
    pub points: Vec<[f64; 3]>,
    pub length: f64,
    /// Removing the curve disconnects the two boundary loops.
    pub separating: bool,
    /// Mesh edges crossed, in curve order.
    #[serde(skip)]
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AhlforsCurve {
    pub curve: LevelCurve,
    pub length: f64,
    pub area: f64,
    pub modulus: f64,
    /// `area / modulus`.
    pub bound: f64,
    /// `(bound - length^2) / bound`.
    pub slack: f64,
    pub inequality_holds: bool,
    /// The chosen level had more than one component.
    pub disconnected: bool,
    /// Length of the level set `u = 1/2`, summed over components.
    pub midlevel_length: f64,
}

/// Closed components of `{u = level}`, each with its separation flag.
pub fn level_curves(annulus: &AnnulusRegion, u: &[f64], level: f64) -> Vec<LevelCurve> {
    let mesh = &annulus.mesh;
    let below = |v: usize| u[v] < level;
    let crossing = |e: usize| {
        let [a, b] = mesh.edges()[e];
        let s = (level - u[a]) / (u[b] - u[a]);
        let d = mesh.ambient.displacement(&mesh.vertices[a], &mesh.vertices[b]);
        mesh.vertices[a] + d * s
    };
    // Each crossed face links its two crossed edges.
    let mut links: HashMap<usize, Vec<usize>> = HashMap::new();
    for face in &mesh.faces {
        let crossed: Vec<usize> = (0..3)
            .filter(|&k| below(face[k]) != below(face[(k + 1) % 3]))
            .map(|k| mesh.edge_id(face[k], face[(k + 1) % 3]).expect("face edge"))
            .collect();
        if let [e0, e1] = crossed[..] {
            links.entry(e0).or_default().push(e1);
            links.entry(e1).or_default().push(e0);
        }
    }
    let mut starts: Vec<usize> = links.keys().copied().collect();
    starts.sort_unstable();
    let mut seen = vec![false; mesh.edges().len()];
    let mut curves = Vec::new();
    for start in starts {
        if seen[start] {
            continue;
        }
        let mut edges = vec![start];
        seen[start] = true;
        let mut current = start;
        while let Some(&next) = links[&current].iter().find(|&&n| !seen[n]) {
            seen[next] = true;
            edges.push(next);
            current = next;
        }
        let points: Vec<_> = edges.iter().map(|&e| crossing(e)).collect();
        let length = (0..points.len())
            .map(|i| {
                mesh.ambient
                    .displacement(&points[i], &points[(i + 1) % points.len()])
                    .norm()
            })
            .sum();
        curves.push(LevelCurve {
            level,
            points: points.iter().map(|p| [p.x, p.y, p.z]).collect(),
            length,
            separating: separates(mesh, annulus, &edges),
            edges,
        });
    }
    curves
}

/// Breadth-first search from `boundary0` over uncrossed edges never reaches `boundary1`.
fn separates(mesh: &TriMesh, annulus: &AnnulusRegion, crossed: &[usize]) -> bool {
    let mut blocked = vec![false; mesh.edges().len()];
    for &e in crossed {
        blocked[e] = true;
    }
    let mut target = vec![false; mesh.num_vertices()];
    for &v in &annulus.boundary1 {
        target[v] = true;
    }
    let mut seen = vec![false; mesh.num_vertices()];
    let mut queue: VecDeque<usize> = annulus.boundary0.iter().copied().collect();
    for &v in &annulus.boundary0 {
        seen[v] = true;
    }
    while let Some(v) = queue.pop_front() {
        if target[v] {
            return false;
        }
        for &w in mesh.neighbors(v) {
            let e = mesh.edge_id(v, w).expect("neighbour edge");
            if !seen[w] && !blocked[e] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    true
}

/// Shortest separating level component over the level grid; ties go to the
/// level nearest 1/2.
pub fn ahlfors_curve(annulus: &AnnulusRegion) -> Result<AhlforsCurve> {
    let (Some(u), Some(modulus)) = (annulus.potential.as_ref(), annulus.modulus) else {
        return Err(Error::Config("solve the annulus before extracting curves".into()));
    };
    let mut best: Option<(LevelCurve, usize)> = None;
    let mut midlevel_length = 0.0;
    for k in 0..LEVEL_COUNT {
        let level = (k + 1) as f64 / (LEVEL_COUNT + 1) as f64;
        let curves = level_curves(annulus, u, level);
        if 2 * (k + 1) == LEVEL_COUNT + 1 {
            midlevel_length = curves.iter().map(|c| c.length).sum();
        }
        let count = curves.len();
        for c in curves.into_iter().filter(|c| c.separating) {
            let better = match &best {
                None => true,
                Some((b, _)) => {
                    c.length < b.length
                        || (c.length == b.length && (c.level - 0.5).abs() < (b.level - 0.5).abs())
                }
            };
            if better {
                best = Some((c, count));
            }
        }
    }
    let (curve, count) =
        best.ok_or_else(|| Error::Topology("no level curve separates the boundary loops".into()))?;
    let bound = annulus.area / modulus;
    let slack = (bound - curve.length * curve.length) / bound;
    Ok(AhlforsCurve {
        length: curve.length,
        area: annulus.area,
        modulus,
        bound,
        slack,
        inequality_holds: slack >= -AHLFORS_SLACK,
        disconnected: count > 1,
        midlevel_length,
        curve,
    })
}
