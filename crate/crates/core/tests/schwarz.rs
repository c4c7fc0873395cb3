use std::f64::consts::LN_2;
use std::time::Instant;

use bmc::schwarz::{
    deformation_check, derivative_bound_check, eta, DeformationSource, DiscAutomorphism, LinearIntoFlat,
    SchwarzGrid,
};
use bmc::surface::CatalogSurface;
use proptest::prelude::*;

fn sphere_source() -> DeformationSource {
    DeformationSource::Surface {
        surface: CatalogSurface::unit_sphere(),
        chart: (0.3, 0.2),
    }
}

#[test]
fn flat_plane_deformation_is_closed_form() {
    let grid = SchwarzGrid {
        radial: 200,
        angular: 200,
    };
    let check = deformation_check(&DeformationSource::FlatPlane, 0.0, grid, None).unwrap();
    assert!(check.pass);
    for s in &check.samples {
        let exact = -4.0 * (-2.0 * s.rho * s.rho).exp();
        assert!((s.deformed_curvature - exact).abs() < 1e-9);
    }
    // exp(-2 rho^2) >= 1/2 on the grid, so K~ <= -2.
    assert!(check.max_deformed_curvature <= -2.0 + 1e-9);
    assert_eq!(check.u_at_base, 0.0);
    assert_eq!(check.exp_2u_at_base, 1.0);
    assert!(check.eta.is_finite() && (check.eta - LN_2 / 4.0).abs() < 1e-15);
}

#[test]
fn unit_sphere_deformation_on_full_grid() {
    let start = Instant::now();
    let grid = SchwarzGrid {
        radial: 200,
        angular: 200,
    };
    let check = deformation_check(&sphere_source(), 1.0, grid, None).unwrap();
    assert!(start.elapsed().as_secs_f64() < 30.0);
    assert!(check.pass, "{check:?}");
    assert!(check.max_deformed_curvature <= -1.0 + 1e-3);
    // Equality case of the comparison on the round sphere.
    assert!(check.laplacian_comparison_margin.abs() < 1e-3);
    assert!(check.identity_residual < 1e-3);
    assert_eq!(check.excluded_beyond_injectivity, 0);
    assert!((check.lambda - 1.5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn sphere_edge_value_by_hand() {
    // K~(rho) = (1 - 1.5 (2 + 2 rho cot rho)) exp(-3 rho^2) on the unit sphere.
    let grid = SchwarzGrid {
        radial: 100,
        angular: 8,
    };
    let check = deformation_check(&sphere_source(), 1.0, grid, None).unwrap();
    let edge = check
        .samples
        .iter()
        .max_by(|a, b| a.rho.total_cmp(&b.rho))
        .unwrap();
    let r = edge.rho;
    let exact = (1.0 - 1.5 * (2.0 + 2.0 * r / r.tan())) * (-3.0 * r * r).exp();
    assert!(
        (edge.deformed_curvature - exact).abs() < 1e-3,
        "{} vs {exact}",
        edge.deformed_curvature
    );
}

#[test]
fn grid_refinement_oracle() {
    let coarse = deformation_check(
        &sphere_source(),
        1.0,
        SchwarzGrid {
            radial: 50,
            angular: 12,
        },
        None,
    )
    .unwrap();
    let fine = deformation_check(
        &sphere_source(),
        1.0,
        SchwarzGrid {
            radial: 101,
            angular: 24,
        },
        None,
    )
    .unwrap();
    // Every coarse radius is a fine radius; values must agree to discretization accuracy.
    for c in coarse.samples.iter().filter(|s| s.theta == 0.0) {
        let f = fine
            .samples
            .iter()
            .filter(|s| s.theta == 0.0)
            .min_by(|a, b| (a.rho - c.rho).abs().total_cmp(&(b.rho - c.rho).abs()))
            .unwrap();
        assert!((f.rho - c.rho).abs() < 1e-12);
        assert!((f.deformed_curvature - c.deformed_curvature).abs() < 1e-3);
    }
}

#[test]
fn small_injectivity_radius_excludes_points() {
    let check = deformation_check(
        &sphere_source(),
        1.0,
        SchwarzGrid {
            radial: 20,
            angular: 4,
        },
        Some(0.2),
    )
    .unwrap();
    assert!(check.excluded_beyond_injectivity > 0);
    assert!(check.samples.iter().all(|s| s.rho < 0.2));
    assert!((check.eta - 0.1).abs() < 1e-15);
}

#[test]
fn unknown_injectivity_radius_is_a_config_error() {
    let e = CatalogSurface::new(
        bmc::surface::Family::Ellipsoid {
            a: 1.0,
            b: 1.0,
            c: 0.5,
        },
        bmc::ambient::AmbientSpace::euclidean(3).unwrap(),
    )
    .unwrap();
    let src = DeformationSource::Surface {
        surface: e,
        chart: (0.2, 0.0),
    };
    assert!(matches!(
        deformation_check(
            &src,
            4.0,
            SchwarzGrid {
                radial: 10,
                angular: 4
            },
            None
        ),
        Err(bmc::Error::Config(_))
    ));
}

#[test]
fn scaled_map_into_small_ball_satisfies_bound() {
    // z -> (eta / r) z sends the hyperbolic ball of radius r into a flat ball of radius eta.
    let r = 0.5;
    let e = eta(1.0, std::f64::consts::PI);
    let b = derivative_bound_check(&LinearIntoFlat { a: [e / r, 0.0] }, r).unwrap();
    assert!((b.rhs - 4.0).abs() < 1e-15);
    assert!(b.lhs < 4.0 && b.pass);
    assert!((b.lhs - e / (2.0 * r)).abs() < 1e-8);
}

#[test]
fn dilation_violates_bound() {
    let b = derivative_bound_check(&LinearIntoFlat { a: [100.0, 0.0] }, 0.5).unwrap();
    assert!(!b.pass);
    assert!((b.lhs - 50.0).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn disc_automorphisms_are_isometries(x in -0.8f64..0.8, y in -0.5f64..0.5) {
        let b = derivative_bound_check(&DiscAutomorphism { c: [x, y] }, 1.0).unwrap();
        prop_assert!((b.lhs - 1.0).abs() < 1e-7);
        prop_assert!(b.distortion < 1e-6);
    }

    #[test]
    fn eta_never_exceeds_half_injectivity(k0 in 0.0f64..50.0, i0 in 1e-3f64..10.0) {
        prop_assert!(eta(k0, i0) <= i0 / 2.0);
    }
}
