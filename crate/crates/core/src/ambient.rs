//! Model ambient spaces with closed-form curvature and injectivity radius.
//!
//! Three kinds are supported: euclidean space, a flat torus `R^n / (periods)`
//! and the round sphere of a given radius. Surfaces are carried in the first
//! three ambient coordinates; higher coordinates are identically zero.

use std::f64::consts::PI;

use nalgebra::{DVector, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AmbientKind {
    Euclidean,
    FlatTorus { periods: Vec<f64> },
    RoundSphere { radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmbientSpace {
    pub dim: usize,
    #[serde(flatten)]
    pub kind: AmbientKind,
}

/// Sectional curvature bound `K_M` and injectivity radius `i0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmbientConstants {
    pub curvature_bound: f64,
    pub injectivity_radius: f64,
}

impl AmbientSpace {
    pub fn euclidean(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            kind: AmbientKind::Euclidean,
        })
    }

    /// Flat torus whose dimension is the number of periods.
    pub fn flat_torus(periods: Vec<f64>) -> Result<Self> {
        check_dim(periods.len())?;
        if let Some(p) = periods.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::Config(format!(
                "flat-torus periods must be positive, got {p}"
            )));
        }
        Ok(Self {
            dim: periods.len(),
            kind: AmbientKind::FlatTorus { periods },
        })
    }

    pub fn round_sphere(dim: usize, radius: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Config(format!(
                "round-sphere radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            dim,
            kind: AmbientKind::RoundSphere { radius },
        })
    }

    pub fn constants(&self) -> AmbientConstants {
        match &self.kind {
            AmbientKind::Euclidean => AmbientConstants {
                curvature_bound: 0.0,
                injectivity_radius: f64::INFINITY,
            },
            AmbientKind::FlatTorus { periods } => AmbientConstants {
                curvature_bound: 0.0,
                injectivity_radius: periods.iter().cloned().fold(f64::INFINITY, f64::min) / 2.0,
            },
            AmbientKind::RoundSphere { radius } => AmbientConstants {
                curvature_bound: 1.0 / (radius * radius),
                injectivity_radius: PI * radius,
            },
        }
    }

    pub fn is_compact(&self) -> bool {
        !matches!(self.kind, AmbientKind::Euclidean)
    }

    /// Displacement `b - a` in the first three coordinates. On a flat torus the
    /// minimal image is taken per axis.
    pub fn displacement(&self, a: &Vector3<f64>, b: &Vector3<f64>) -> Vector3<f64> {
        let mut d = b - a;
        if let AmbientKind::FlatTorus { periods } = &self.kind {
            for (i, p) in periods.iter().take(3).enumerate() {
                d[i] -= p * (d[i] / p).round();
            }
        }
        d
    }

    /// Wraps a point back into the fundamental domain (flat torus only).
    pub fn wrap(&self, p: Vector3<f64>) -> Vector3<f64> {
        let mut q = p;
        if let AmbientKind::FlatTorus { periods } = &self.kind {
            for (i, per) in periods.iter().take(3).enumerate() {
                q[i] = q[i].rem_euclid(*per);
            }
        }
        q
    }

    pub fn distance(&self, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
        self.displacement(a, b).norm()
    }

    /// Ambient geodesic `t -> exp_p(t v)` in full `n`-dimensional coordinates.
    ///
    /// For the round sphere `p` must lie on the sphere and `v` be tangent to it.
    pub fn geodesic(&self, p: &DVector<f64>, v: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
        if p.len() != self.dim || v.len() != self.dim {
            return Err(Error::Config(format!(
                "expected {}-dimensional point and velocity",
                self.dim
            )));
        }
        match &self.kind {
            AmbientKind::Euclidean => Ok(p + v * t),
            AmbientKind::FlatTorus { periods } => {
                let mut q = p + v * t;
                for (x, per) in q.iter_mut().zip(periods) {
                    *x = x.rem_euclid(*per);
                }
                Ok(q)
            }
            AmbientKind::RoundSphere { radius } => {
                let speed = v.norm();
                if speed == 0.0 {
                    return Ok(p.clone());
                }
                let angle = speed * t / radius;
                Ok(p * angle.cos() + v * (radius * angle.sin() / speed))
            }
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 3 {
        return Err(Error::Config(format!(
            "ambient dimension must be at least 3, got {dim}"
        )));
    }
    Ok(())
}

/// `(K_M, i0)` for a model ambient space.
pub fn ambient_constants(space: &AmbientSpace) -> (f64, f64) {
    let c = space.constants();
    (c.curvature_bound, c.injectivity_radius)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_torus_constants() {
        let t = AmbientSpace::flat_torus(vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(ambient_constants(&t), (0.0, 0.5));
    }

    #[test]
    fn sphere_constants() {
        let s = AmbientSpace::round_sphere(3, 1.0).unwrap();
        assert_eq!(ambient_constants(&s), (1.0, PI));
    }

    #[test]
    fn euclidean_constants() {
        let e = AmbientSpace::euclidean(4).unwrap();
        let (k, i0) = ambient_constants(&e);
        assert_eq!(k, 0.0);
        assert!(i0.is_infinite());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(AmbientSpace::euclidean(2).is_err());
        assert!(AmbientSpace::flat_torus(vec![1.0, 0.0, 1.0]).is_err());
        assert!(AmbientSpace::round_sphere(3, -1.0).is_err());
    }

    #[test]
    fn constants_are_pure() {
        let s = AmbientSpace::flat_torus(vec![0.3, 0.7, 1.1, 2.0]).unwrap();
        let a = ambient_constants(&s);
        let b = ambient_constants(&s.clone());
        assert_eq!(a.0.to_bits(), b.0.to_bits());
        assert_eq!(a.1.to_bits(), b.1.to_bits());
    }

    #[test]
    fn minimal_image_displacement() {
        let t = AmbientSpace::flat_torus(vec![1.0, 1.0, 1.0]).unwrap();
        let d = t.displacement(&Vector3::new(0.95, 0.0, 0.0), &Vector3::new(0.05, 0.0, 0.0));
        assert!((d.x - 0.1).abs() < 1e-12);
    }

    /// Second differences of ambient geodesics have no tangential component.
    #[test]
    fn geodesics_have_zero_ambient_acceleration() {
        let h = 1e-4;
        let cases = [
            (
                AmbientSpace::euclidean(3).unwrap(),
                DVector::from_vec(vec![0.1, 0.2, 0.3]),
                DVector::from_vec(vec![1.0, -2.0, 0.5]),
            ),
            (
                AmbientSpace::flat_torus(vec![1.0, 1.0, 1.0]).unwrap(),
                DVector::from_vec(vec![0.5, 0.5, 0.5]),
                DVector::from_vec(vec![0.3, 0.1, -0.2]),
            ),
            (
                AmbientSpace::round_sphere(4, 2.0).unwrap(),
                DVector::from_vec(vec![2.0, 0.0, 0.0, 0.0]),
                DVector::from_vec(vec![0.0, 1.0, 0.5, -0.3]),
            ),
        ];
        for (space, p, v) in cases {
            let t = 0.1;
            let a = space.geodesic(&p, &v, t - h).unwrap();
            let b = space.geodesic(&p, &v, t).unwrap();
            let c = space.geodesic(&p, &v, t + h).unwrap();
            let acc = (&a - &b * 2.0 + &c) / (h * h);
            let tangential = match &space.kind {
                AmbientKind::RoundSphere { .. } => {
                    let n = b.normalize();
                    &acc - &n * acc.dot(&n)
                }
                _ => acc,
            };
            assert!(
                tangential.norm() < 1e-5,
                "{:?}: {}",
                space.kind,
                tangential.norm()
            );
        }
    }
}
