use std::f64::consts::PI;

use bmc::ambient::AmbientSpace;
use bmc::curvature::jacobi::comparison_function;
use bmc::curvature::{
    conjugate_radius_bound, curvature_bound, estimate_curvatures, jacobi_profile, verify_curvature,
};
use bmc::surface::build::open_grid;
use bmc::surface::{build_surface, CatalogSurface, Family, TriMesh};
use nalgebra::Vector3;
use proptest::prelude::*;

fn euclid() -> AmbientSpace {
    AmbientSpace::euclidean(3).unwrap()
}

fn ellipsoid() -> CatalogSurface {
    CatalogSurface::new(
        Family::Ellipsoid {
            a: 1.0,
            b: 1.0,
            c: 0.5,
        },
        euclid(),
    )
    .unwrap()
}

fn torus() -> CatalogSurface {
    CatalogSurface::new(
        Family::TorusOfRevolution {
            major: 2.0,
            minor: 0.5,
        },
        euclid(),
    )
    .unwrap()
}

#[test]
fn unit_sphere_curvatures() {
    let b = build_surface(&CatalogSurface::unit_sphere(), 64).unwrap();
    let f = estimate_curvatures(&b.mesh);
    for v in 0..b.mesh.num_vertices() {
        assert!((f.mean[v] - 2.0).abs() < 0.04);
        assert!((f.gaussian[v] - 1.0).abs() < 0.02);
    }
}

#[test]
fn flat_torus_curvatures() {
    let b = build_surface(&CatalogSurface::flat_torus([1.0, 1.0, 1.0]).unwrap(), 32).unwrap();
    let f = estimate_curvatures(&b.mesh);
    assert!(f.max_mean() <= 1e-6);
    assert!(f.gaussian.iter().all(|k| k.abs() <= 1e-3));
}

#[test]
fn cylinder_patch_curvatures() {
    let (v, faces) = open_grid(40, 30, |s, t| {
        let a = s * PI / 2.0;
        Vector3::new(a.cos(), a.sin(), t)
    });
    let m = TriMesh::new(v, faces, euclid(), true).unwrap();
    let f = estimate_curvatures(&m);
    let mut interior = 0;
    for v in 0..m.num_vertices() {
        if f.interior[v] {
            interior += 1;
            assert!((f.mean[v] - 1.0).abs() < 0.02, "{}", f.mean[v]);
            assert!(f.gaussian[v].abs() < 0.02, "{}", f.gaussian[v]);
        } else {
            assert!(f.gaussian[v].is_nan());
        }
    }
    assert!(interior > 0);
}

#[test]
fn total_defect_is_two_pi_chi() {
    for surf in [
        CatalogSurface::unit_sphere(),
        ellipsoid(),
        torus(),
        CatalogSurface::dumbbell(0.05).unwrap(),
        CatalogSurface::flat_torus([1.0, 0.7, 1.0]).unwrap(),
    ] {
        let b = build_surface(&surf, 12).unwrap();
        let f = estimate_curvatures(&b.mesh);
        let chi = b.mesh.euler_characteristic() as f64;
        assert!(
            (f.total_defect() - 2.0 * PI * chi).abs() < 1e-6,
            "{}",
            surf.name()
        );
    }
}

#[test]
fn mesh_level_bound_on_catalog_surfaces() {
    for surf in [
        CatalogSurface::unit_sphere(),
        ellipsoid(),
        torus(),
        CatalogSurface::dumbbell(0.1).unwrap(),
    ] {
        let h0 = surf.max_mean_curvature();
        let report = verify_curvature(&surf, 32, h0, 1.0).unwrap();
        assert!(report.hypothesis_ok);
        assert!(report.pass, "{}: {report:?}", surf.name());
    }
}

#[test]
fn sphere_jacobi_matches_sine() {
    let s = CatalogSurface::unit_sphere();
    let r = conjugate_radius_bound(1.0).radius;
    let prof = jacobi_profile(&s, (0.0, 0.0), 0.3, r, 1e-3).unwrap();
    for (&x, &f) in prof.radii.iter().zip(&prof.f) {
        assert!((f - x.sin()).abs() < 1e-6);
    }
    assert!(prof.increasing && prof.above_half);
}

#[test]
fn flat_torus_jacobi_is_linear() {
    let t = CatalogSurface::flat_torus([1.0, 1.0, 1.0]).unwrap();
    let prof = jacobi_profile(&t, (0.2, 0.4), 1.1, 2.0, 1e-3).unwrap();
    for (&x, &f) in prof.radii.iter().zip(&prof.f) {
        assert!((f - x).abs() < 1e-9);
    }
    assert!(prof.increasing && prof.above_half);
}

#[test]
fn ellipsoid_jacobi_against_refined_integration() {
    let e = ellipsoid();
    let k0 = curvature_bound(e.max_mean_curvature(), &e.ambient);
    let r = conjugate_radius_bound(k0).radius;
    let coarse = jacobi_profile(&e, (0.0, 0.0), 0.7, r, 1e-3).unwrap();
    let fine = jacobi_profile(&e, (0.0, 0.0), 0.7, r, 1e-4).unwrap();
    for (i, &x) in coarse.radii.iter().enumerate() {
        assert!((coarse.f[i] - fine.f_at(x)).abs() < 1e-4);
    }
    assert!(coarse.increasing && coarse.above_half);
}

#[test]
fn geodesic_leaving_the_surface_is_reported() {
    // A tube much thinner than the step cannot be followed around its meridian.
    let thin = CatalogSurface::new(
        Family::TorusOfRevolution {
            major: 1.0,
            minor: 5e-4,
        },
        euclid(),
    )
    .unwrap();
    let failures = (0..8)
        .filter(|k| {
            let theta = *k as f64 * PI / 4.0;
            matches!(
                jacobi_profile(&thin, (0.0, 0.0), theta, 0.5, 1e-3),
                Err(bmc::Error::ChartExtension(_))
            )
        })
        .count();
    assert!(failures > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn jacobi_lower_bound_holds(which in 0usize..3, s in 0.0f64..1.0, t in 0.0f64..1.0, theta in 0.0f64..(2.0 * PI)) {
        let surf = [CatalogSurface::unit_sphere(), ellipsoid(), torus()][which].clone();
        let k0 = curvature_bound(surf.max_mean_curvature(), &surf.ambient);
        let r = conjugate_radius_bound(k0).radius;
        let h = 1e-3;
        let prof = jacobi_profile(&surf, (s, t), theta, r, h).unwrap();
        prop_assert!(prof.comparison_deficit(k0) <= 10.0 * h * h);
        prop_assert!(prof.increasing && prof.above_half);
        prop_assert!(comparison_function(k0, r) > r / 2.0);
    }

    #[test]
    fn defect_sum_is_combinatorial(res in 3usize..10, which in 0usize..3) {
        let surf = [CatalogSurface::unit_sphere(), ellipsoid(), torus()][which].clone();
        let b = build_surface(&surf, res).unwrap();
        let f = estimate_curvatures(&b.mesh);
        prop_assert!((f.total_defect() - 2.0 * PI * b.mesh.euler_characteristic() as f64).abs() < 1e-6);
    }
}
