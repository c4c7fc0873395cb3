//! Conformal deformation to curvature at most -1 near a point, and the
//! derivative bound for conformal maps out of a hyperbolic ball.
//!
//! With `u = lambda^2 rho^2` and `lambda = sqrt(K0 / 2 + 1)` the deformed metric
//! `exp(2u) g` has curvature `(K - Lap u) exp(-2u)`, where `Lap = div grad`, so
//! `Lap rho^2 = 4` on the flat plane. The Laplacian is evaluated by conservative
//! finite differences in geodesic polar coordinates `dr^2 + f(r, theta)^2 dtheta^2`.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::curvature::jacobi::{jacobi_profile, MAX_STEP};
use crate::error::{Error, Result};
use crate::surface::CatalogSurface;

/// Slack on `K~ <= -1` and on the Laplacian comparison.
pub const FINITE_DIFFERENCE_TOLERANCE: f64 = 1e-3;

/// Conformality pre-check threshold on the relative Jacobian distortion.
pub const CONFORMAL_DISTORTION_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub enum DeformationSource {
    /// Euclidean plane; `f(r) = r`, `K = 0` in closed form.
    FlatPlane,
    /// Catalog surface around chart point `chart`.
    Surface {
        surface: CatalogSurface,
        chart: (f64, f64),
    },
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SchwarzGrid {
    pub radial: usize,
    pub angular: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSample {
    pub rho: f64,
    pub theta: f64,
    pub u: f64,
    pub laplacian_u: f64,
    pub curvature: f64,
    pub deformed_curvature: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SchwarzCheck {
    pub k0: f64,
    pub lambda: f64,
    pub injectivity_radius: f64,
    /// `eta = min{i0, pi/(4 sqrt K0), log2/2} / 2` exactly as stated.
    pub eta: f64,
    /// The literal `log 2 / 2` term inside `eta`.
    pub eta_log_term: f64,
    /// Radius `sqrt(log 2 / 2)` at which the deformation bound is derived.
    pub derivation_radius: f64,
    /// `sqrt(log 2 / 2) / lambda`, the radius where `exp(-2u) >= 1/2` with `lambda` kept.
    pub corrected_radius: f64,
    /// Grid extent: `min{pi/(4 sqrt K0), sqrt(log 2 / 2)}`.
    pub grid_radius: f64,
    pub grid: SchwarzGrid,
    pub points_evaluated: usize,
    pub points_within_eta: usize,
    /// Grid points at or beyond the injectivity radius, skipped.
    pub excluded_beyond_injectivity: usize,
    pub max_deformed_curvature: f64,
    pub min_deformed_curvature: f64,
    /// Smallest `Lap rho - sqrt(K0) cot(sqrt(K0) rho)` on the grid.
    pub laplacian_comparison_margin: f64,
    pub min_laplacian_rho: f64,
    pub u_at_base: f64,
    pub exp_2u_at_base: f64,
    /// Largest `|K~ exp(2u) + Lap_exact u - K|`, where `Lap_exact u` uses `f'/f`.
    pub identity_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip)]
    pub samples: Vec<GridSample>,
}

/// `f0'/f0` for the constant-curvature comparison space, i.e. `Lap rho_0`.
pub fn comparison_laplacian(k0: f64, rho: f64) -> f64 {
    if k0 > 0.0 {
        k0.sqrt() / (k0.sqrt() * rho).tan()
    } else if k0 < 0.0 {
        (-k0).sqrt() / ((-k0).sqrt() * rho).tanh()
    } else {
        1.0 / rho
    }
}

/// `eta = 1/2 min{i0, pi/(4 sqrt K0), log 2 / 2}`.
pub fn eta(k0: f64, i0: f64) -> f64 {
    0.5 * i0.min(quarter_wave(k0)).min(LN_2 / 2.0)
}

fn quarter_wave(k0: f64) -> f64 {
    if k0 > 0.0 {
        PI / (4.0 * k0.sqrt())
    } else {
        f64::INFINITY
    }
}

/// Radial profile `(f, f', K)` along one direction at `2 * radial + 2` half-steps.
fn polar_profile(
    source: &DeformationSource,
    theta: f64,
    half_step: f64,
    half_steps: usize,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    match source {
        DeformationSource::FlatPlane => {
            let r: Vec<f64> = (0..=half_steps).map(|i| i as f64 * half_step).collect();
            Ok((r.clone(), vec![1.0; r.len()], vec![0.0; r.len()]))
        }
        DeformationSource::Surface { surface, chart } => {
            let sub = (half_step / MAX_STEP).ceil() as usize;
            let radius = half_step * half_steps as f64;
            let prof = jacobi_profile(surface, *chart, theta, radius, half_step / sub as f64)?;
            let pick = |v: &Vec<f64>| (0..=half_steps).map(|i| v[i * sub]).collect::<Vec<_>>();
            Ok((pick(&prof.f), pick(&prof.df), pick(&prof.curvature)))
        }
    }
}

pub fn deformation_check(
    source: &DeformationSource,
    k0: f64,
    grid: SchwarzGrid,
    injectivity_override: Option<f64>,
) -> Result<SchwarzCheck> {
    if grid.radial < 2 || grid.angular < 3 {
        return Err(Error::Config(
            "grid needs at least 2 radial and 3 angular samples".into(),
        ));
    }
    let i0 = match (injectivity_override, source) {
        (Some(i), _) => i,
        (None, DeformationSource::FlatPlane) => f64::INFINITY,
        (None, DeformationSource::Surface { surface, .. }) => {
            surface.injectivity_radius().ok_or_else(|| {
                Error::Config(format!(
                    "injectivity radius of {} is not known in closed form; supply one",
                    surface.name()
                ))
            })?
        }
    };
    let lambda = (k0.max(0.0) / 2.0 + 1.0).sqrt();
    let derivation_radius = (LN_2 / 2.0).sqrt();
    let grid_radius = quarter_wave(k0).min(derivation_radius);
    let dr = grid_radius / (grid.radial + 1) as f64;
    let dtheta = 2.0 * PI / grid.angular as f64;
    let eta_value = eta(k0, i0);

    let mut samples = Vec::with_capacity(grid.radial * grid.angular);
    let mut excluded = 0;
    let mut margin = f64::INFINITY;
    let mut min_lap_rho = f64::INFINITY;
    let mut identity_residual: f64 = 0.0;
    let profiles: Vec<_> = (0..grid.angular)
        .map(|j| polar_profile(source, j as f64 * dtheta, dr / 2.0, 2 * grid.radial + 2))
        .collect::<Result<_>>()?;
    let u = |rho: f64| lambda * lambda * rho * rho;
    for (j, (f, df, k)) in profiles.iter().enumerate() {
        for i in 1..=grid.radial {
            let rho = i as f64 * dr;
            if rho >= i0 {
                excluded += 1;
                continue;
            }
            let c = 2 * i;
            let (f_in, f_mid, f_out) = (f[c - 1], f[c], f[c + 1]);
            // u is radial, so the angular second difference vanishes identically.
            let lap_u = (f_out * (u(rho + dr) - u(rho)) - f_in * (u(rho) - u(rho - dr))) / (f_mid * dr * dr);
            let lap_rho = (f_out - f_in) / (f_mid * dr);
            let kappa = k[c];
            let deformed = (kappa - lap_u) * (-2.0 * u(rho)).exp();
            let exact_lap_u = lambda * lambda * (2.0 + 2.0 * rho * df[c] / f_mid);
            identity_residual =
                identity_residual.max((deformed * (2.0 * u(rho)).exp() + exact_lap_u - kappa).abs());
            margin = margin.min(lap_rho - comparison_laplacian(k0, rho));
            min_lap_rho = min_lap_rho.min(lap_rho);
            samples.push(GridSample {
                rho,
                theta: j as f64 * dtheta,
                u: u(rho),
                laplacian_u: lap_u,
                curvature: kappa,
                deformed_curvature: deformed,
            });
        }
    }
    let max_k = samples
        .iter()
        .map(|s| s.deformed_curvature)
        .fold(f64::NEG_INFINITY, f64::max);
    let min_k = samples
        .iter()
        .map(|s| s.deformed_curvature)
        .fold(f64::INFINITY, f64::min);
    let tol = FINITE_DIFFERENCE_TOLERANCE;
    let points_within_eta = samples.iter().filter(|s| s.rho < eta_value).count();
    let pass =
        !samples.is_empty() && max_k <= -1.0 + tol && margin >= -tol && min_lap_rho >= -tol && u(0.0) == 0.0;
    Ok(SchwarzCheck {
        k0,
        lambda,
        injectivity_radius: i0,
        eta: eta_value,
        eta_log_term: LN_2 / 2.0,
        derivation_radius,
        corrected_radius: derivation_radius / lambda,
        grid_radius,
        grid,
        points_evaluated: samples.len(),
        points_within_eta,
        excluded_beyond_injectivity: excluded,
        max_deformed_curvature: max_k,
        min_deformed_curvature: min_k,
        laplacian_comparison_margin: margin,
        min_laplacian_rho: min_lap_rho,
        u_at_base: u(0.0),
        exp_2u_at_base: (2.0 * u(0.0)).exp(),
        identity_residual,
        tolerance: tol,
        pass,
        samples,
    })
}

/// A map from a neighbourhood of 0 in the unit disc into a conformally flat target.
pub trait ConformalTestMap {
    fn eval(&self, z: [f64; 2]) -> [f64; 2];
    /// Conformal factor of the target metric at `w` (metric `density^2 |dw|^2`).
    fn target_density(&self, w: [f64; 2]) -> f64;
    fn name(&self) -> String;
}

/// Poincare density `2 / (1 - |z|^2)`.
pub fn poincare_density(z: [f64; 2]) -> f64 {
    2.0 / (1.0 - z[0] * z[0] - z[1] * z[1])
}

/// Disc automorphism `z -> (z + c) / (1 + conj(c) z)` into the Poincare disc; an isometry.
#[derive(Debug, Clone, Copy)]
pub struct DiscAutomorphism {
    pub c: [f64; 2],
}

impl ConformalTestMap for DiscAutomorphism {
    fn eval(&self, z: [f64; 2]) -> [f64; 2] {
        let (zr, zi) = (z[0], z[1]);
        let (cr, ci) = (self.c[0], self.c[1]);
        let (nr, ni) = (zr + cr, zi + ci);
        // 1 + conj(c) z
        let (dr, di) = (1.0 + cr * zr + ci * zi, cr * zi - ci * zr);
        let den = dr * dr + di * di;
        [(nr * dr + ni * di) / den, (ni * dr - nr * di) / den]
    }

    fn target_density(&self, w: [f64; 2]) -> f64 {
        poincare_density(w)
    }

    fn name(&self) -> String {
        format!("disc-automorphism({}, {})", self.c[0], self.c[1])
    }
}

/// Complex-linear map `z -> a z` into the flat plane.
#[derive(Debug, Clone, Copy)]
pub struct LinearIntoFlat {
    pub a: [f64; 2],
}

impl ConformalTestMap for LinearIntoFlat {
    fn eval(&self, z: [f64; 2]) -> [f64; 2] {
        [
            self.a[0] * z[0] - self.a[1] * z[1],
            self.a[0] * z[1] + self.a[1] * z[0],
        ]
    }

    fn target_density(&self, _w: [f64; 2]) -> f64 {
        1.0
    }

    fn name(&self) -> String {
        format!("linear({}, {})", self.a[0], self.a[1])
    }
}

/// Real-linear map with matrix `m` into the flat plane (generally not conformal).
#[derive(Debug, Clone, Copy)]
pub struct RealLinear {
    pub m: [[f64; 2]; 2],
}

impl ConformalTestMap for RealLinear {
    fn eval(&self, z: [f64; 2]) -> [f64; 2] {
        [
            self.m[0][0] * z[0] + self.m[0][1] * z[1],
            self.m[1][0] * z[0] + self.m[1][1] * z[1],
        ]
    }

    fn target_density(&self, _w: [f64; 2]) -> f64 {
        1.0
    }

    fn name(&self) -> String {
        format!("real-linear({:?})", self.m)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivativeBound {
    pub map: String,
    pub r: f64,
    pub distortion: f64,
    /// `max_v |df_0(v)|_g / |v|_h` over a frame of directions.
    pub lhs: f64,
    /// `r^-2`.
    pub rhs: f64,
    pub pass: bool,
}

/// Relative slack allowed for the equality case.
const BOUND_SLACK: f64 = 1e-8;

pub fn derivative_bound_check(map: &dyn ConformalTestMap, r: f64) -> Result<DerivativeBound> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Config(format!(
            "hyperbolic ball radius must lie in (0, 1], got {r}"
        )));
    }
    let h = 1e-5 * r;
    let column = |dir: [f64; 2]| {
        let p = map.eval([h * dir[0], h * dir[1]]);
        let m = map.eval([-h * dir[0], -h * dir[1]]);
        [(p[0] - m[0]) / (2.0 * h), (p[1] - m[1]) / (2.0 * h)]
    };
    let jx = column([1.0, 0.0]);
    let jy = column([0.0, 1.0]);
    // Cauchy-Riemann: J = [[a, -b], [b, a]].
    let scale = (jx[0] * jx[0] + jx[1] * jx[1] + jy[0] * jy[0] + jy[1] * jy[1]).sqrt();
    let distortion = ((jx[0] - jy[1]).abs() + (jx[1] + jy[0]).abs()) / scale.max(f64::MIN_POSITIVE);
    if distortion > CONFORMAL_DISTORTION_LIMIT {
        return Err(Error::NonConformal(distortion));
    }
    let sigma = map.target_density(map.eval([0.0, 0.0]));
    let source_density = poincare_density([0.0, 0.0]);
    let lhs = (0..8)
        .map(|k| {
            let a = k as f64 * PI / 8.0;
            let (c, s) = (a.cos(), a.sin());
            let jv = [jx[0] * c + jy[0] * s, jx[1] * c + jy[1] * s];
            sigma * jv[0].hypot(jv[1]) / source_density
        })
        .fold(0.0, f64::max);
    let rhs = r.powi(-2);
    Ok(DerivativeBound {
        map: map.name(),
        r,
        distortion,
        lhs,
        rhs,
        pass: lhs <= rhs * (1.0 + BOUND_SLACK),
    })
}
