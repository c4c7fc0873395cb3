//! Square-by-square lift through anchored local inverses of `exp_x`.

use std::collections::HashMap;

use nalgebra::{Matrix2, Vector2, Vector3};
use serde::Serialize;

use super::order::SquareOrder;
use super::paths::edge_dijkstra;
use super::{DiscImmersion, LiftTarget};
use crate::error::{Error, Result};

pub const NEWTON_MAX_ITERATIONS: usize = 50;
pub const NEWTON_TOLERANCE: f64 = 1e-10;
/// Largest `|exp_x(lift) - image|` accepted by `verify_lift`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
/// Lifts recomputed from two anchors must agree to this distance.
const BRANCH_AGREEMENT: f64 = 1e-6;
const SPOT_CHECK_PAIRS: usize = 64;

#[derive(Debug, Clone, Serialize)]
pub struct LiftChart {
    pub base: usize,
    pub base_point: [f64; 3],
    #[serde(skip)]
    pub frame: [Vector3<f64>; 2],
    pub target: LiftTarget,
    pub eps: f64,
    pub seed_vertex: usize,
    /// Lift of the seed vertex, reached along a shortest path from the base.
    pub seed_lift: [f64; 2],
    /// `|seed_lift| <= 3 eps`.
    pub seed_ok: bool,
    pub max_anchor_norm: f64,
    /// Every anchor lift has norm at most `8 eps`.
    pub anchors_ok: bool,
    /// Largest difference between lifts of one vertex from different anchors.
    pub max_branch_disagreement: f64,
    pub max_newton_iterations: usize,
    /// Tangent coordinates of each vertex in `frame`.
    #[serde(skip)]
    pub lifts: Vec<[f64; 2]>,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LiftReport {
    pub max_residual: f64,
    pub residual_ok: bool,
    pub max_radius: f64,
    pub radius_bound: f64,
    pub radius_ok: bool,
    pub base_norm: f64,
    pub base_ok: bool,
    pub spot_checks: usize,
    pub injectivity_failures: usize,
    pub pass: bool,
}

struct Inverse {
    w: [f64; 2],
    residual: f64,
    iterations: usize,
}

/// Damped Gauss-Newton solve of `exp_x(w) = goal` started at `start`.
fn inverse_exp(
    target: &LiftTarget,
    x: &Vector3<f64>,
    frame: &[Vector3<f64>; 2],
    goal: &Vector3<f64>,
    start: [f64; 2],
) -> Result<Inverse> {
    let misfit = |w: [f64; 2]| target.displacement(goal, &target.exp(x, frame, w));
    let mut w = start;
    let mut r = misfit(w);
    for it in 0..NEWTON_MAX_ITERATIONS {
        let h = 1e-7 * (1.0 + w[0].hypot(w[1]));
        let column = |k: usize| {
            let (mut a, mut b) = (w, w);
            a[k] -= h;
            b[k] += h;
            target.displacement(&target.exp(x, frame, a), &target.exp(x, frame, b)) / (2.0 * h)
        };
        let (j0, j1) = (column(0), column(1));
        let normal = Matrix2::new(j0.dot(&j0), j0.dot(&j1), j1.dot(&j0), j1.dot(&j1));
        let rhs = -Vector2::new(j0.dot(&r), j1.dot(&r));
        let step = normal
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::NumericalLift(format!("singular differential of exp at {w:?}")))?;
        let mut t = 1.0;
        let (mut next, mut next_r) = (w, r);
        while t > 1e-4 {
            next = [w[0] + t * step[0], w[1] + t * step[1]];
            next_r = misfit(next);
            if next_r.norm() <= r.norm() {
                break;
            }
            t *= 0.5;
        }
        w = next;
        r = next_r;
        if t * step.norm() <= NEWTON_TOLERANCE * (1.0 + w[0].hypot(w[1])) {
            return Ok(Inverse {
                w,
                residual: r.norm(),
                iterations: it + 1,
            });
        }
    }
    Err(Error::NumericalLift(format!(
        "no convergence in {NEWTON_MAX_ITERATIONS} iterations; residual {}",
        r.norm()
    )))
}

fn norm(w: [f64; 2]) -> f64 {
    w[0].hypot(w[1])
}

/// Lifts every vertex of `disc` to `T_x` with `x` the image of the base vertex,
/// so that `exp_x(lift(v)) = image(v)` and `lift(base) = 0`.
pub fn lift_disc(disc: &DiscImmersion, order: &SquareOrder) -> Result<LiftChart> {
    let mesh = &disc.domain;
    let target = disc.target;
    let eps = disc.eps;
    let x = disc.image[disc.base];
    let frame = target.frame(&x);
    let mut max_newton_iterations = 0;

    // Lift a shortest path from the base to the seed vertex, starting at 0.
    let path = edge_dijkstra(mesh, &[disc.base], |_| true, f64::INFINITY).path_to(order.seed_vertex);
    let mut w = [0.0, 0.0];
    for &v in &path[1..] {
        let inv = inverse_exp(&target, &x, &frame, &disc.image[v], w)?;
        max_newton_iterations = max_newton_iterations.max(inv.iterations);
        w = inv.w;
    }
    let seed_lift = w;

    let nv = mesh.num_vertices();
    let mut lifts: Vec<Option<[f64; 2]>> = vec![None; nv];
    let mut residuals = vec![0.0; nv];
    lifts[order.seed_vertex] = Some(seed_lift);
    residuals[order.seed_vertex] = target
        .displacement(&disc.image[order.seed_vertex], &target.exp(&x, &frame, seed_lift))
        .norm();
    let mut max_anchor_norm: f64 = 0.0;
    let mut max_branch_disagreement: f64 = 0.0;
    for (j, square) in order.squares.iter().enumerate() {
        let anchor = square
            .vertices
            .iter()
            .copied()
            .find(|&v| lifts[v].is_some())
            .ok_or_else(|| Error::LiftDomain {
                square: j,
                reason: "square does not meet the lifted prefix".into(),
            })?;
        let z = lifts[anchor].expect("anchor lifted");
        max_anchor_norm = max_anchor_norm.max(norm(z));
        let reach = target.invertibility_radius(norm(z));
        for &v in &square.vertices {
            let inv = inverse_exp(&target, &x, &frame, &disc.image[v], z)?;
            max_newton_iterations = max_newton_iterations.max(inv.iterations);
            let offset = norm([inv.w[0] - z[0], inv.w[1] - z[1]]);
            if offset >= reach {
                return Err(Error::LiftDomain {
                    square: j,
                    reason: format!("vertex {v} lifts {offset} from the anchor, beyond {reach}"),
                });
            }
            match lifts[v] {
                Some(old) => {
                    let gap = norm([inv.w[0] - old[0], inv.w[1] - old[1]]);
                    if gap > BRANCH_AGREEMENT {
                        return Err(Error::LiftDomain {
                            square: j,
                            reason: format!("vertex {v} lifts to two branches {gap} apart"),
                        });
                    }
                    max_branch_disagreement = max_branch_disagreement.max(gap);
                }
                None => {
                    lifts[v] = Some(inv.w);
                    residuals[v] = inv.residual;
                }
            }
        }
    }
    let lifts: Vec<[f64; 2]> = lifts
        .into_iter()
        .enumerate()
        .map(|(v, l)| l.ok_or_else(|| Error::Mesh(format!("vertex {v} lies in no face"))))
        .collect::<Result<_>>()?;
    Ok(LiftChart {
        base: disc.base,
        base_point: [x[0], x[1], x[2]],
        frame,
        target,
        eps,
        seed_vertex: order.seed_vertex,
        seed_lift,
        seed_ok: norm(seed_lift) <= 3.0 * eps,
        max_anchor_norm,
        anchors_ok: max_anchor_norm <= 8.0 * eps,
        max_branch_disagreement,
        max_newton_iterations,
        lifts,
        residuals,
    })
}

/// Recomputes residuals from the stored lifts and checks the lift contract.
pub fn verify_lift(disc: &DiscImmersion, chart: &LiftChart) -> LiftReport {
    let target = chart.target;
    let x = disc.image[chart.base];
    let max_residual = chart
        .lifts
        .iter()
        .zip(&disc.image)
        .map(|(&w, p)| target.displacement(p, &target.exp(&x, &chart.frame, w)).norm())
        .fold(0.0, f64::max);
    let max_radius = chart.lifts.iter().map(|&w| norm(w)).fold(0.0, f64::max);
    let radius_bound = 9.0 * chart.eps;
    let base_norm = norm(chart.lifts[chart.base]);

    // Distinct vertices must have distinct lifts, including those sharing an image.
    let nv = chart.lifts.len();
    let mut pairs: Vec<(usize, usize)> = (0..SPOT_CHECK_PAIRS.min(nv / 2))
        .map(|i| {
            let a = i * nv / SPOT_CHECK_PAIRS.min(nv / 2).max(1);
            (a, (a + nv / 2) % nv)
        })
        .collect();
    let cell = 1e-9;
    let mut by_image: HashMap<[i64; 3], usize> = HashMap::new();
    for (v, p) in disc.image.iter().enumerate() {
        let key = [0, 1, 2].map(|k| (p[k] / cell).round() as i64);
        if let Some(&u) = by_image.get(&key) {
            pairs.push((u, v));
        } else {
            by_image.insert(key, v);
        }
    }
    let separation = |(a, b): (usize, usize)| {
        let (p, q) = (chart.lifts[a], chart.lifts[b]);
        norm([p[0] - q[0], p[1] - q[1]])
    };
    let injectivity_failures = pairs
        .iter()
        .filter(|&&pq| pq.0 != pq.1 && separation(pq) <= cell)
        .count();
    let residual_ok = max_residual <= RESIDUAL_TOLERANCE;
    let radius_ok = max_radius <= radius_bound;
    let base_ok = base_norm <= RESIDUAL_TOLERANCE;
    LiftReport {
        max_residual,
        residual_ok,
        max_radius,
        radius_bound,
        radius_ok,
        base_norm,
        base_ok,
        spot_checks: pairs.len(),
        injectivity_failures,
        pass: residual_ok && radius_ok && base_ok && injectivity_failures == 0,
    }
}
