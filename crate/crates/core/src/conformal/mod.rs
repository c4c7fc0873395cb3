//! Conformal moduli of annuli and short separating curves.
//!
//! The modulus of an annulus is `1 / E(u)` where `u` is the harmonic function
//! equal to 0 on one boundary loop and 1 on the other and `E` its Dirichlet
//! energy. A right circular annulus of circumference `W` and height `H` has
//! `u = y / H`, `E = W / H` and modulus `H / W`.

pub mod builders;
pub mod level_set;
pub mod solve;

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::surface::TriMesh;

pub use builders::{annulus_from_faces, right_annulus, round_annulus, square_annulus};
pub use level_set::{ahlfors_curve, AhlforsCurve, LevelCurve, LEVEL_COUNT};
pub use solve::{cotangent_weights, CotangentWeights, CG_TOLERANCE};

/// `H / W`.
pub fn modulus_right_annulus(height: f64, circumference: f64) -> f64 {
    height / circumference
}

/// `ln(outer / inner) / (2 pi)`.
pub fn modulus_round_annulus(outer: f64, inner: f64) -> f64 {
    (outer / inner).ln() / (2.0 * PI)
}

/// Selects one boundary loop of an annulus mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoopSelector {
    /// Loop containing this vertex.
    Vertex(usize),
    /// Loop by position in the mesh's boundary loop list.
    Index(usize),
    Shorter,
    Longer,
}

impl std::str::FromStr for LoopSelector {
    type Err = Error;

    /// Accepts `vertex:<id>`, `loop:<index>`, `shorter` or `longer`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Parse(format!(
                "loop spec `{s}`: expected vertex:<id>, loop:<index>, shorter or longer"
            ))
        };
        match s.split_once(':') {
            Some(("vertex", v)) => v.parse().map(LoopSelector::Vertex).map_err(|_| bad()),
            Some(("loop", v)) => v.parse().map(LoopSelector::Index).map_err(|_| bad()),
            None if s == "shorter" => Ok(LoopSelector::Shorter),
            None if s == "longer" => Ok(LoopSelector::Longer),
            _ => Err(bad()),
        }
    }
}

fn loop_length(mesh: &TriMesh, l: &[usize]) -> f64 {
    (0..l.len())
        .map(|i| {
            mesh.ambient
                .displacement(&mesh.vertices[l[i]], &mesh.vertices[l[(i + 1) % l.len()]])
                .norm()
        })
        .sum()
}

/// Triangulated annulus with labelled boundary loops and, once solved, its potential.
#[derive(Debug, Clone, Serialize)]
pub struct AnnulusRegion {
    #[serde(skip)]
    pub mesh: TriMesh,
    /// Loop where the potential is 0.
    pub boundary0: Vec<usize>,
    /// Loop where the potential is 1.
    pub boundary1: Vec<usize>,
    pub area: f64,
    pub boundary_lengths: [f64; 2],
    pub modulus: Option<f64>,
    pub energy: Option<f64>,
    #[serde(skip)]
    pub potential: Option<Vec<f64>>,
    /// Cotangent weights raised to the positive floor.
    pub clamped_weights: usize,
    pub cg_iterations: usize,
}

impl AnnulusRegion {
    pub fn new(mesh: TriMesh, b0: LoopSelector, b1: LoopSelector) -> Result<Self> {
        let loops = mesh.boundary_loops();
        if loops.len() != 2 || mesh.euler_characteristic() != 0 {
            return Err(Error::Topology(format!(
                "an annulus needs two boundary loops and chi = 0, got {} loops and chi = {}",
                loops.len(),
                mesh.euler_characteristic()
            )));
        }
        let lengths = [loop_length(&mesh, &loops[0]), loop_length(&mesh, &loops[1])];
        let pick = |sel: LoopSelector| -> Result<usize> {
            match sel {
                LoopSelector::Vertex(v) => loops
                    .iter()
                    .position(|l| l.contains(&v))
                    .ok_or_else(|| Error::Config(format!("vertex {v} is not on a boundary loop"))),
                LoopSelector::Index(i) if i < 2 => Ok(i),
                LoopSelector::Index(i) => Err(Error::Config(format!("loop index {i} out of range"))),
                LoopSelector::Shorter => Ok(if lengths[0] <= lengths[1] { 0 } else { 1 }),
                LoopSelector::Longer => Ok(if lengths[0] > lengths[1] { 0 } else { 1 }),
            }
        };
        let (i0, i1) = (pick(b0)?, pick(b1)?);
        if i0 == i1 {
            return Err(Error::Config("both selectors name the same boundary loop".into()));
        }
        Ok(AnnulusRegion {
            boundary0: loops[i0].clone(),
            boundary1: loops[i1].clone(),
            area: mesh.surface_area(),
            boundary_lengths: [lengths[i0], lengths[i1]],
            mesh,
            modulus: None,
            energy: None,
            potential: None,
            clamped_weights: 0,
            cg_iterations: 0,
        })
    }

    /// Solves the Dirichlet problem and stores the potential and modulus.
    pub fn solve(&mut self) -> Result<f64> {
        let weights = cotangent_weights(&self.mesh)?;
        let mut fixed = vec![None; self.mesh.num_vertices()];
        for &v in &self.boundary0 {
            fixed[v] = Some(0.0);
        }
        for &v in &self.boundary1 {
            fixed[v] = Some(1.0);
        }
        let (u, iterations) = solve::dirichlet(&self.mesh, &weights, &fixed)?;
        let energy = weights.energy(&self.mesh, &u);
        if !(energy > 0.0) {
            return Err(Error::MeshQuality(format!(
                "Dirichlet energy {energy} is not positive"
            )));
        }
        self.clamped_weights = weights.clamped;
        self.cg_iterations = iterations;
        self.energy = Some(energy);
        self.modulus = Some(1.0 / energy);
        self.potential = Some(u);
        Ok(1.0 / energy)
    }

    /// `(min, max)` of the potential over interior vertices.
    pub fn interior_range(&self) -> Option<(f64, f64)> {
        let u = self.potential.as_ref()?;
        let range = (0..self.mesh.num_vertices())
            .filter(|&v| !self.mesh.is_boundary_vertex(v))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(u[v]), hi.max(u[v]))
            });
        Some(range)
    }
}

/// Solves the annulus and returns its modulus.
pub fn modulus_mesh_annulus(annulus: &mut AnnulusRegion) -> Result<f64> {
    annulus.solve()
}
