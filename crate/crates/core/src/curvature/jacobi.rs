//! Radial Jacobi fields along surface geodesics.
//!
//! The geodesic and the scalar Jacobi equation `f'' = -K f` are integrated
//! together with classical RK4. Geodesics of an implicit surface `F = 0` obey
//! `x'' = -(x'^T Hess F x') / |grad F|^2 grad F`.

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::surface::{CatalogSurface, Family};

/// Largest admissible step.
pub const MAX_STEP: f64 = 1e-3;

/// Normalized residual `|F| / |grad F|` beyond which a geodesic is off the surface.
const SURFACE_DRIFT: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct JacobiProfile {
    pub base: [f64; 3],
    pub direction_angle: f64,
    pub step: f64,
    pub radii: Vec<f64>,
    pub f: Vec<f64>,
    pub df: Vec<f64>,
    pub curvature: Vec<f64>,
    /// `f` strictly increasing on the sampled interval.
    pub increasing: bool,
    /// `f(r) > r / 2` at every positive sample.
    pub above_half: bool,
}

impl JacobiProfile {
    /// Largest `sin(sqrt(K0) r)/sqrt(K0) - f(r)` over the samples (zero-curvature
    /// comparison is `r - f`).
    pub fn comparison_deficit(&self, k0: f64) -> f64 {
        self.radii
            .iter()
            .zip(&self.f)
            .map(|(&r, &f)| comparison_function(k0, r) - f)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Linear interpolation of `f` at radius `r`.
    pub fn f_at(&self, r: f64) -> f64 {
        let k = self
            .radii
            .partition_point(|&x| x < r)
            .clamp(1, self.radii.len() - 1);
        let (r0, r1) = (self.radii[k - 1], self.radii[k]);
        let t = (r - r0) / (r1 - r0);
        self.f[k - 1] * (1.0 - t) + self.f[k] * t
    }
}

/// `sin(sqrt(k) r) / sqrt(k)` for `k > 0`, `r` for `k = 0`, `sinh` form for `k < 0`.
pub fn comparison_function(k: f64, r: f64) -> f64 {
    if k > 0.0 {
        (k.sqrt() * r).sin() / k.sqrt()
    } else if k < 0.0 {
        ((-k).sqrt() * r).sinh() / (-k).sqrt()
    } else {
        r
    }
}

/// Deterministic unit tangent at `p` making angle `theta` with a fixed frame.
pub fn tangent_direction(normal: &Vector3<f64>, theta: f64) -> Vector3<f64> {
    let helper = if normal.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let e1 = (helper - normal * normal.dot(&helper)).normalize();
    let e2 = normal.cross(&e1);
    e1 * theta.cos() + e2 * theta.sin()
}

#[derive(Clone, Copy)]
struct State {
    x: Vector3<f64>,
    v: Vector3<f64>,
    f: f64,
    df: f64,
}

impl State {
    fn add(&self, k: &State, h: f64) -> State {
        State {
            x: self.x + k.x * h,
            v: self.v + k.v * h,
            f: self.f + k.f * h,
            df: self.df + k.df * h,
        }
    }
}

/// Integrates the Jacobi profile from chart point `(s, t)` in direction `theta`
/// out to `radius` with step at most `step`.
pub fn jacobi_profile(
    surface: &CatalogSurface,
    chart: (f64, f64),
    theta: f64,
    radius: f64,
    step: f64,
) -> Result<JacobiProfile> {
    if !(step > 0.0 && step <= MAX_STEP) {
        return Err(Error::Config(format!(
            "step must lie in (0, {MAX_STEP}], got {step}"
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Config(format!(
            "radius must be positive and finite, got {radius}"
        )));
    }
    let n = (radius / step).ceil() as usize;
    let h = radius / n as f64;
    let p = surface.embed(chart.0, chart.1);

    type Rhs<'a> = Box<dyn Fn(&State) -> Result<(State, f64)> + 'a>;
    let (v0, rhs): (Vector3<f64>, Rhs) = match &surface.family {
        Family::FlatTorus2 => {
            let v0 = Vector3::new(theta.cos(), theta.sin(), 0.0);
            let rhs: Rhs = Box::new(|s: &State| {
                Ok((
                    State {
                        x: s.v,
                        v: Vector3::zeros(),
                        f: s.df,
                        df: 0.0,
                    },
                    0.0,
                ))
            });
            (v0, rhs)
        }
        Family::Dumbbell { .. } => {
            return Err(Error::Unsupported(
                "Jacobi profiles need an implicit equation; the dumbbell has none".into(),
            ))
        }
        _ => {
            let jet = surface.implicit(&p).expect("implicit family");
            let v0 = tangent_direction(&jet.gradient.normalize(), theta);
            let rhs: Rhs = Box::new(move |s: &State| {
                let jet = surface.implicit(&s.x).expect("implicit family");
                let g = jet.gradient;
                if jet.value.abs() / g.norm() > SURFACE_DRIFT {
                    return Err(Error::ChartExtension(format!(
                        "residual {:e} at {:?}",
                        jet.value.abs() / g.norm(),
                        s.x.as_slice()
                    )));
                }
                let k = jet.gaussian_curvature();
                let acc = -g * (s.v.dot(&(jet.hessian * s.v)) / g.norm_squared());
                Ok((
                    State {
                        x: s.v,
                        v: acc,
                        f: s.df,
                        df: -k * s.f,
                    },
                    k,
                ))
            });
            (v0, rhs)
        }
    };

    let mut state = State {
        x: p,
        v: v0,
        f: 0.0,
        df: 1.0,
    };
    let mut radii = Vec::with_capacity(n + 1);
    let mut f = Vec::with_capacity(n + 1);
    let mut df = Vec::with_capacity(n + 1);
    let mut curvature = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let (k1, kappa) = rhs(&state)?;
        radii.push(i as f64 * h);
        f.push(state.f);
        df.push(state.df);
        curvature.push(kappa);
        if i == n {
            break;
        }
        let (k2, _) = rhs(&state.add(&k1, h / 2.0))?;
        let (k3, _) = rhs(&state.add(&k2, h / 2.0))?;
        let (k4, _) = rhs(&state.add(&k3, h))?;
        state = State {
            x: state.x + (k1.x + k2.x * 2.0 + k3.x * 2.0 + k4.x) * (h / 6.0),
            v: state.v + (k1.v + k2.v * 2.0 + k3.v * 2.0 + k4.v) * (h / 6.0),
            f: state.f + (k1.f + 2.0 * k2.f + 2.0 * k3.f + k4.f) * (h / 6.0),
            df: state.df + (k1.df + 2.0 * k2.df + 2.0 * k3.df + k4.df) * (h / 6.0),
        };
    }
    let increasing = f.windows(2).all(|w| w[1] > w[0]);
    let above_half = radii.iter().zip(&f).skip(1).all(|(&r, &v)| v > r / 2.0);
    Ok(JacobiProfile {
        base: [p.x, p.y, p.z],
        direction_angle: theta,
        step: h,
        radii,
        f,
        df,
        curvature,
        increasing,
        above_half,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_must_be_small() {
        let s = CatalogSurface::unit_sphere();
        assert!(jacobi_profile(&s, (0.0, 0.0), 0.0, 1.0, 1e-2).is_err());
    }

    #[test]
    fn dumbbell_is_unsupported() {
        let d = CatalogSurface::dumbbell(0.1).unwrap();
        assert!(matches!(
            jacobi_profile(&d, (0.2, 0.0), 0.0, 0.5, 1e-3),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn initial_conditions() {
        let s = CatalogSurface::unit_sphere();
        let prof = jacobi_profile(&s, (0.3, 0.1), 1.0, 0.1, 1e-3).unwrap();
        assert_eq!(prof.f[0], 0.0);
        assert_eq!(prof.df[0], 1.0);
    }
}
