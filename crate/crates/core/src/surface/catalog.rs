//! Analytic surface families with exact embeddings and curvature.
//!
//! Every family is parametrized by chart coordinates `(s, t)` in `[0, 1]^2`,
//! periodic in `t`. Closed-form families also expose an implicit equation
//! used by the geodesic integrator.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::Serialize;

use super::dumbbell::{gauss_legendre, DumbbellProfile};
use crate::ambient::{AmbientKind, AmbientSpace};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    RoundSphere {
        radius: f64,
    },
    Ellipsoid {
        a: f64,
        b: f64,
        c: f64,
    },
    /// The coordinate plane `z = 0` of a flat 3-torus.
    FlatTorus2,
    TorusOfRevolution {
        major: f64,
        minor: f64,
    },
    Dumbbell {
        neck: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogSurface {
    #[serde(flatten)]
    pub family: Family,
    pub ambient: AmbientSpace,
}

/// Value, gradient and Hessian of an implicit equation `F = 0`.
pub struct ImplicitJet {
    pub value: f64,
    pub gradient: Vector3<f64>,
    pub hessian: Matrix3<f64>,
}

impl ImplicitJet {
    /// Gaussian curvature `-det [[Hess, grad], [grad^T, 0]] / |grad|^4`.
    pub fn gaussian_curvature(&self) -> f64 {
        let g = self.gradient;
        let a = self.hessian;
        let bordered = Matrix4::new(
            a[(0, 0)],
            a[(0, 1)],
            a[(0, 2)],
            g.x,
            a[(1, 0)],
            a[(1, 1)],
            a[(1, 2)],
            g.y,
            a[(2, 0)],
            a[(2, 1)],
            a[(2, 2)],
            g.z,
            g.x,
            g.y,
            g.z,
            0.0,
        );
        -bordered.determinant() / g.norm_squared().powi(2)
    }

    /// Trace mean curvature `(|g|^2 tr A - g^T A g) / |g|^3`, unsigned.
    pub fn mean_curvature(&self) -> f64 {
        let g = self.gradient;
        let n2 = g.norm_squared();
        ((n2 * self.hessian.trace() - g.dot(&(self.hessian * g))) / n2.powf(1.5)).abs()
    }
}

impl CatalogSurface {
    pub fn new(family: Family, ambient: AmbientSpace) -> Result<Self> {
        let positive = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {x}")))
            }
        };
        match &family {
            Family::RoundSphere { radius } => positive("radius", *radius)?,
            Family::Ellipsoid { a, b, c } => {
                positive("a", *a)?;
                positive("b", *b)?;
                positive("c", *c)?;
            }
            Family::FlatTorus2 => {
                if !matches!(ambient.kind, AmbientKind::FlatTorus { .. }) {
                    return Err(Error::Config("flat-torus-2 needs a flat-torus ambient".into()));
                }
            }
            Family::TorusOfRevolution { major, minor } => {
                positive("major", *major)?;
                positive("minor", *minor)?;
                if minor >= major {
                    return Err(Error::Config("torus needs minor < major".into()));
                }
            }
            Family::Dumbbell { neck } => {
                DumbbellProfile::new(*neck).ok_or_else(|| {
                    Error::Config(format!("dumbbell neck must lie in (0, 0.3), got {neck}"))
                })?;
            }
        }
        if !matches!(family, Family::FlatTorus2) && !matches!(ambient.kind, AmbientKind::Euclidean) {
            return Err(Error::Unsupported(format!(
                "catalog surface {family:?} is only embedded in euclidean space"
            )));
        }
        Ok(Self { family, ambient })
    }

    pub fn unit_sphere() -> Self {
        Self::new(
            Family::RoundSphere { radius: 1.0 },
            AmbientSpace::euclidean(3).expect("valid"),
        )
        .expect("valid")
    }

    /// Flat unit torus `z = 0` inside the flat torus with the given periods.
    pub fn flat_torus(periods: [f64; 3]) -> Result<Self> {
        Self::new(Family::FlatTorus2, AmbientSpace::flat_torus(periods.to_vec())?)
    }

    pub fn dumbbell(neck: f64) -> Result<Self> {
        Self::new(Family::Dumbbell { neck }, AmbientSpace::euclidean(3)?)
    }

    pub fn name(&self) -> String {
        match &self.family {
            Family::RoundSphere { radius } => format!("round-sphere({radius})"),
            Family::Ellipsoid { a, b, c } => format!("ellipsoid({a},{b},{c})"),
            Family::FlatTorus2 => "flat-torus-2".into(),
            Family::TorusOfRevolution { major, minor } => {
                format!("torus-of-revolution({major},{minor})")
            }
            Family::Dumbbell { neck } => format!("dumbbell({neck})"),
        }
    }

    pub(crate) fn flat_periods(&self) -> (f64, f64) {
        match &self.ambient.kind {
            AmbientKind::FlatTorus { periods } => (periods[0], periods[1]),
            _ => (1.0, 1.0),
        }
    }

    pub(crate) fn dumbbell_profile(&self) -> Option<DumbbellProfile> {
        match self.family {
            Family::Dumbbell { neck } => DumbbellProfile::new(neck),
            _ => None,
        }
    }

    /// Embedding of chart point `(s, t)`.
    pub fn embed(&self, s: f64, t: f64) -> Vector3<f64> {
        let phi = 2.0 * PI * t;
        match &self.family {
            Family::RoundSphere { radius } => {
                let th = PI * s;
                *radius * Vector3::new(th.sin() * phi.cos(), th.sin() * phi.sin(), th.cos())
            }
            Family::Ellipsoid { a, b, c } => {
                let th = PI * s;
                Vector3::new(a * th.sin() * phi.cos(), b * th.sin() * phi.sin(), c * th.cos())
            }
            Family::FlatTorus2 => {
                let (p0, p1) = self.flat_periods();
                Vector3::new((s * p0).rem_euclid(p0), (t * p1).rem_euclid(p1), 0.0)
            }
            Family::TorusOfRevolution { major, minor } => {
                let v = 2.0 * PI * s;
                let ring = major + minor * v.cos();
                Vector3::new(ring * phi.cos(), ring * phi.sin(), minor * v.sin())
            }
            Family::Dumbbell { .. } => {
                let (r, z) = self.dumbbell_profile().expect("valid").point(s);
                Vector3::new(r * phi.cos(), r * phi.sin(), z)
            }
        }
    }

    /// Chart coordinates of a point on the surface (inverse of [`Self::embed`]).
    pub fn chart_of(&self, p: &Vector3<f64>) -> (f64, f64) {
        let t = (p.y.atan2(p.x) / (2.0 * PI)).rem_euclid(1.0);
        match &self.family {
            Family::RoundSphere { radius } => ((p.z / radius).clamp(-1.0, 1.0).acos() / PI, t),
            Family::Ellipsoid { a, b, c } => {
                let t = ((p.y / b).atan2(p.x / a) / (2.0 * PI)).rem_euclid(1.0);
                ((p.z / c).clamp(-1.0, 1.0).acos() / PI, t)
            }
            Family::FlatTorus2 => {
                let (p0, p1) = self.flat_periods();
                ((p.x / p0).rem_euclid(1.0), (p.y / p1).rem_euclid(1.0))
            }
            Family::TorusOfRevolution { major, .. } => {
                let q = p.x.hypot(p.y) - major;
                ((p.z.atan2(q) / (2.0 * PI)).rem_euclid(1.0), t)
            }
            Family::Dumbbell { .. } => {
                let prof = self.dumbbell_profile().expect("valid");
                (prof.chart_of(p.x.hypot(p.y), p.z), t)
            }
        }
    }

    /// Implicit equation for the closed-form embedded families.
    pub fn implicit(&self, p: &Vector3<f64>) -> Option<ImplicitJet> {
        match &self.family {
            Family::RoundSphere { radius } => Some(ImplicitJet {
                value: p.norm_squared() - radius * radius,
                gradient: 2.0 * p,
                hessian: 2.0 * Matrix3::identity(),
            }),
            Family::Ellipsoid { a, b, c } => {
                let inv = Vector3::new(1.0 / (a * a), 1.0 / (b * b), 1.0 / (c * c));
                Some(ImplicitJet {
                    value: p.component_mul(&p).dot(&inv) - 1.0,
                    gradient: 2.0 * p.component_mul(&inv),
                    hessian: 2.0 * Matrix3::from_diagonal(&inv),
                })
            }
            Family::TorusOfRevolution { major, minor } => {
                let q = p.x.hypot(p.y);
                let (x, y, z) = (p.x, p.y, p.z);
                let k = q - major;
                let q3 = q * q * q;
                let hxx = 2.0 * (x * x / (q * q) + k * y * y / q3);
                let hyy = 2.0 * (y * y / (q * q) + k * x * x / q3);
                let hxy = 2.0 * (x * y / (q * q) - k * x * y / q3);
                Some(ImplicitJet {
                    value: k * k + z * z - minor * minor,
                    gradient: Vector3::new(2.0 * k * x / q, 2.0 * k * y / q, 2.0 * z),
                    hessian: Matrix3::new(hxx, hxy, 0.0, hxy, hyy, 0.0, 0.0, 0.0, 2.0),
                })
            }
            Family::FlatTorus2 | Family::Dumbbell { .. } => None,
        }
    }

    /// `(|H|, K)` at chart point `(s, t)`; `|H|` uses the trace convention.
    pub fn curvatures_at(&self, s: f64, t: f64) -> (f64, f64) {
        match &self.family {
            Family::FlatTorus2 => (0.0, 0.0),
            Family::Dumbbell { .. } => self.dumbbell_profile().expect("valid").curvatures(s),
            _ => {
                let jet = self.implicit(&self.embed(s, t)).expect("implicit family");
                (jet.mean_curvature(), jet.gaussian_curvature())
            }
        }
    }

    pub fn analytic_area(&self) -> f64 {
        match &self.family {
            Family::RoundSphere { radius } => 4.0 * PI * radius * radius,
            Family::FlatTorus2 => {
                let (p0, p1) = self.flat_periods();
                p0 * p1
            }
            Family::TorusOfRevolution { major, minor } => 4.0 * PI * PI * major * minor,
            Family::Ellipsoid { a, b, c } => {
                // Area element |X_theta x X_phi| on the (theta, phi) rectangle.
                let element = |th: f64, ph: f64| {
                    let xt = Vector3::new(a * th.cos() * ph.cos(), b * th.cos() * ph.sin(), -c * th.sin());
                    let xp = Vector3::new(-a * th.sin() * ph.sin(), b * th.sin() * ph.cos(), 0.0);
                    xt.cross(&xp).norm()
                };
                gauss_legendre(0.0, PI, 64, |th| {
                    gauss_legendre(0.0, 2.0 * PI, 64, |ph| element(th, ph))
                })
            }
            Family::Dumbbell { .. } => self.dumbbell_profile().expect("valid").area(),
        }
    }

    /// Supremum of `|H|` over a dense chart sample.
    pub fn max_mean_curvature(&self) -> f64 {
        match &self.family {
            Family::RoundSphere { radius } => 2.0 / radius,
            Family::FlatTorus2 => 0.0,
            Family::Dumbbell { .. } => self.dumbbell_profile().expect("valid").max_mean_curvature(),
            _ => {
                let n = 400;
                let mut best: f64 = 0.0;
                for i in 0..=n {
                    for j in 0..n {
                        let (h, _) = self.curvatures_at(i as f64 / n as f64, j as f64 / n as f64);
                        if h.is_finite() {
                            best = best.max(h);
                        }
                    }
                }
                best
            }
        }
    }

    /// Injectivity radius where it is known in closed form.
    pub fn injectivity_radius(&self) -> Option<f64> {
        match &self.family {
            Family::RoundSphere { radius } => Some(PI * radius),
            Family::FlatTorus2 => {
                let (p0, p1) = self.flat_periods();
                Some(p0.min(p1) / 2.0)
            }
            _ => None,
        }
    }

    /// Genus of the closed surface.
    pub fn genus(&self) -> i64 {
        match self.family {
            Family::FlatTorus2 | Family::TorusOfRevolution { .. } => 1,
            _ => 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn implicit_curvatures_match_closed_forms() {
        let s = CatalogSurface::unit_sphere();
        let (h, k) = s.curvatures_at(0.3, 0.2);
        assert!((h - 2.0).abs() < 1e-12 && (k - 1.0).abs() < 1e-12);

        let e = AmbientSpace::euclidean(3).unwrap();
        let t = CatalogSurface::new(
            Family::TorusOfRevolution {
                major: 2.0,
                minor: 0.5,
            },
            e.clone(),
        )
        .unwrap();
        for s in [0.0, 0.1, 0.25, 0.4, 0.5] {
            let v = 2.0 * PI * s;
            let (h, k) = t.curvatures_at(s, 0.3);
            let expected_k = v.cos() / (0.5 * (2.0 + 0.5 * v.cos()));
            let expected_h = (1.0 / 0.5 + v.cos() / (2.0 + 0.5 * v.cos())).abs();
            assert!((k - expected_k).abs() < 1e-10, "s={s}");
            assert!((h - expected_h).abs() < 1e-10, "s={s}");
        }

        let el = CatalogSurface::new(
            Family::Ellipsoid {
                a: 1.0,
                b: 1.0,
                c: 0.5,
            },
            e,
        )
        .unwrap();
        // Both principal curvatures at the pole of an oblate spheroid are c / a^2.
        let (h, k) = el.curvatures_at(0.0, 0.0);
        assert!((k - 0.25).abs() < 1e-10 && (h - 1.0).abs() < 1e-10);
    }

    #[test]
    fn spheroid_area_matches_closed_form() {
        let e = AmbientSpace::euclidean(3).unwrap();
        let el = CatalogSurface::new(
            Family::Ellipsoid {
                a: 1.0,
                b: 1.0,
                c: 0.5,
            },
            e,
        )
        .unwrap();
        let ecc: f64 = (1.0f64 - 0.25).sqrt();
        let oracle = 2.0 * PI * (1.0 + (1.0 - ecc * ecc) / ecc * ecc.atanh());
        assert!((el.analytic_area() - oracle).abs() < 1e-9);
    }

    #[test]
    fn chart_round_trip() {
        for surf in [
            CatalogSurface::unit_sphere(),
            CatalogSurface::dumbbell(0.1).unwrap(),
            CatalogSurface::flat_torus([1.0, 1.0, 1.0]).unwrap(),
        ] {
            for (s, t) in [(0.2, 0.3), (0.5, 0.7), (0.77, 0.1)] {
                let (s2, t2) = surf.chart_of(&surf.embed(s, t));
                assert!((s - s2).abs() < 1e-9 && (t - t2).abs() < 1e-9, "{}", surf.name());
            }
        }
    }

    #[test]
    fn rejects_invalid_families() {
        let e = AmbientSpace::euclidean(3).unwrap();
        assert!(CatalogSurface::new(Family::FlatTorus2, e.clone()).is_err());
        assert!(CatalogSurface::new(Family::Dumbbell { neck: 0.5 }, e.clone()).is_err());
        let s = AmbientSpace::round_sphere(3, 1.0).unwrap();
        assert!(CatalogSurface::new(Family::RoundSphere { radius: 1.0 }, s).is_err());
    }
}
