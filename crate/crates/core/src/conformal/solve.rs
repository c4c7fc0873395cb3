//! Cotangent Laplacian and a Jacobi-preconditioned conjugate gradient solve.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::surface::TriMesh;

/// Relative residual at which CG stops.
pub const CG_TOLERANCE: f64 = 1e-12;

/// Weights below this fraction of the mean absolute weight are raised to it.
const WEIGHT_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct CotangentWeights {
    /// `(cot alpha + cot beta) / 2` per mesh edge, after clamping.
    pub weights: Vec<f64>,
    pub clamped: usize,
}

impl CotangentWeights {
    /// `sum_e w_e (u_a - u_b)^2`, the Dirichlet energy of the piecewise-linear `u`.
    pub fn energy(&self, mesh: &TriMesh, u: &[f64]) -> f64 {
        mesh.edges()
            .iter()
            .zip(&self.weights)
            .map(|(&[a, b], w)| w * (u[a] - u[b]).powi(2))
            .sum()
    }
}

pub fn cotangent_weights(mesh: &TriMesh) -> Result<CotangentWeights> {
    let mut weights = vec![0.0; mesh.edges().len()];
    for f in 0..mesh.num_faces() {
        let angles = mesh.face_angles(f);
        let face = mesh.faces[f];
        for k in 0..3 {
            let cot = 1.0 / angles[k].tan();
            if !cot.is_finite() {
                return Err(Error::MeshQuality(format!("face {f} has a degenerate angle")));
            }
            let e = mesh
                .edge_id(face[(k + 1) % 3], face[(k + 2) % 3])
                .expect("face edge");
            weights[e] += 0.5 * cot;
        }
    }
    let mean = weights.iter().map(|w: &f64| w.abs()).sum::<f64>() / weights.len() as f64;
    let floor = WEIGHT_FLOOR * mean;
    let mut clamped = 0;
    for w in &mut weights {
        if *w < floor {
            *w = floor;
            clamped += 1;
        }
    }
    Ok(CotangentWeights { weights, clamped })
}

/// Harmonic extension of the `fixed` values; returns the field and CG iterations.
pub(crate) fn dirichlet(
    mesh: &TriMesh,
    weights: &CotangentWeights,
    fixed: &[Option<f64>],
) -> Result<(Vec<f64>, usize)> {
    let n = mesh.num_vertices();
    let mut index = vec![usize::MAX; n];
    let mut free = Vec::new();
    for v in 0..n {
        if fixed[v].is_none() {
            index[v] = free.len();
            free.push(v);
        }
    }
    let m = free.len();
    let mut u: Vec<f64> = fixed.iter().map(|x| x.unwrap_or(0.0)).collect();
    if m == 0 {
        return Ok((u, 0));
    }
    // Assemble L_II in CSR and b = -L_IB u_B.
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
    let mut diag = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    for (e, &[a, b]) in mesh.edges().iter().enumerate() {
        let w = weights.weights[e];
        for (p, q) in [(a, b), (b, a)] {
            if let Some(i) = (index[p] != usize::MAX).then_some(index[p]) {
                diag[i] += w;
                match fixed[q] {
                    Some(val) => rhs[i] += w * val,
                    None => rows[i].push((index[q], -w)),
                }
            }
        }
    }
    let apply = |x: &[f64], out: &mut [f64]| {
        for i in 0..m {
            out[i] = diag[i] * x[i] + rows[i].iter().map(|&(j, w)| w * x[j]).sum::<f64>();
        }
    };
    let mut x = vec![0.0; m];
    let mut r = rhs.clone();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; m];
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let norm_b = dot(&rhs, &rhs).sqrt().max(f64::MIN_POSITIVE);
    let mut rz = dot(&r, &z);
    let max_iter = 20 * m + 100;
    let mut iterations = 0;
    while dot(&r, &r).sqrt() > CG_TOLERANCE * norm_b {
        if iterations == max_iter {
            return Err(Error::MeshQuality(format!(
                "CG did not converge in {max_iter} iterations"
            )));
        }
        apply(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..m {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..m {
            z[i] = r[i] / diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..m {
            p[i] = z[i] + beta * p[i];
        }
        iterations += 1;
    }
    for (i, &v) in free.iter().enumerate() {
        u[v] = x[i];
    }
    Ok((u, iterations))
}
