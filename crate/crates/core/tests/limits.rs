use std::f64::consts::PI;

use bmc::ambient::AmbientSpace;
use bmc::conformal::builders::right_annulus;
use bmc::error::Error;
use bmc::limits::dimension::{greedy_cover_count, CoveringMetric};
use bmc::limits::*;
use bmc::surface::build::build_surface;
use bmc::surface::sample::locate_chart_points;
use bmc::surface::{CatalogSurface, Family};
use proptest::prelude::*;

fn sphere(radius: f64) -> CatalogSurface {
    CatalogSurface::new(
        Family::RoundSphere { radius },
        AmbientSpace::euclidean(3).unwrap(),
    )
    .unwrap()
}

fn torus() -> CatalogSurface {
    CatalogSurface::flat_torus([1.0, 1.0, 1.0]).unwrap()
}

fn chart_matrix(surface: &CatalogSurface, res: usize, chart: &[(f64, f64)]) -> DistanceMatrix {
    let built = build_surface(surface, res).unwrap();
    distance_matrix(&built.mesh, &locate_chart_points(surface, &built.mesh, chart, 0)).unwrap()
}

/// Minimal-image distance on the unit flat torus.
fn torus_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    let wrap = |x: f64| {
        let x = x.rem_euclid(1.0);
        x.min(1.0 - x)
    };
    wrap(a.0 - b.0).hypot(wrap(a.1 - b.1))
}

/// Greedy cover count by closed-form distances on an `n x n` torus grid.
fn grid_cover_oracle(n: usize, delta: f64) -> usize {
    let pts: Vec<(f64, f64)> = (0..n * n)
        .map(|k| ((k / n) as f64 / n as f64, (k % n) as f64 / n as f64))
        .collect();
    let mut covered = vec![false; pts.len()];
    let mut count = 0;
    for c in 0..pts.len() {
        if covered[c] {
            continue;
        }
        count += 1;
        for (k, p) in pts.iter().enumerate() {
            if torus_distance(pts[c], *p) < delta {
                covered[k] = true;
            }
        }
    }
    count
}

fn segment_matrix(n: usize) -> DistanceMatrix {
    DistanceMatrix::from_fn(n, |i, j| (i as f64 - j as f64).abs() / n as f64)
}

#[test]
fn sphere_octant_distances() {
    let d = chart_matrix(&sphere(1.0), 64, &[(0.0, 0.0), (0.5, 0.0), (0.5, 0.25)]);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        assert!((d.get(i, j) / (PI / 2.0) - 1.0).abs() < 0.02, "{}", d.get(i, j));
    }
    assert!(d.asymmetry < 1e-9);
}

#[test]
fn flat_torus_distances() {
    let d = chart_matrix(&torus(), 64, &[(0.0, 0.0), (0.5, 0.0), (0.0, 0.5)]);
    assert!((d.get(0, 1) / 0.5 - 1.0).abs() < 0.02);
    assert!((d.get(0, 2) / 0.5 - 1.0).abs() < 0.02);
    // The two half-period points are a diagonal apart.
    assert!(
        (d.get(1, 2) / 0.5f64.sqrt() - 1.0).abs() < 0.02,
        "{}",
        d.get(1, 2)
    );
}

#[test]
fn dumbbell_matrix_agrees_with_refined_mesh() {
    let seq = dumbbell_family(&[0.2], 32, 24, 3).unwrap();
    let coarse = seq.matrix(0).unwrap();
    let fine = chart_matrix(&seq.surfaces[0], 64, &seq.chart_samples);
    for i in 0..coarse.size {
        for j in i + 1..coarse.size {
            let (a, b) = (coarse.get(i, j), fine.get(i, j));
            assert!((a - b).abs() <= 0.02 * b, "({i}, {j}): {a} vs {b}");
        }
    }
}

#[test]
fn disconnected_mesh_has_no_distance_matrix() {
    let built = build_surface(&sphere(1.0), 8).unwrap();
    let mut verts = built.mesh.vertices.clone();
    let offset = verts.len();
    verts.extend(
        built
            .mesh
            .vertices
            .iter()
            .map(|p| p + nalgebra::Vector3::new(5.0, 0.0, 0.0)),
    );
    let mut faces = built.mesh.faces.clone();
    faces.extend(built.mesh.faces.iter().map(|f| f.map(|v| v + offset)));
    let mesh = bmc::surface::TriMesh::new(verts, faces, AmbientSpace::euclidean(3).unwrap(), true).unwrap();
    let samples = bmc::surface::sample::area_weighted_samples(&mesh, 4, 0);
    assert!(matches!(
        distance_matrix(&mesh, &samples),
        Err(Error::Topology(_))
    ));
}

#[test]
fn constant_sequence_converges_with_zero_tails() {
    let seq = SurfaceSequence::new("sphere", vec![1.0; 3], vec![sphere(1.0); 3], 16, 12, &[], 5).unwrap();
    let matrices = seq.matrices().unwrap();
    let limit = limit_pseudometric(&matrices, 2.0 * seq.mesh_tolerance(2)).unwrap();
    assert!(limit.tails.iter().all(|&t| t == 0.0));
    assert_eq!(limit.verdict, LimitVerdict::Converged);
    assert_eq!(limit.limit, matrices[0]);
    assert!(limit.axioms_hold);
}

#[test]
fn alternating_tori_do_not_converge() {
    let wide = CatalogSurface::flat_torus([2.0, 1.0, 1.0]).unwrap();
    let seq = SurfaceSequence::new(
        "alternating",
        vec![1.0, 2.0, 1.0, 2.0],
        vec![torus(), wide.clone(), torus(), wide],
        16,
        10,
        &[],
        9,
    )
    .unwrap();
    let limit = limit_pseudometric(&seq.matrices().unwrap(), 0.1).unwrap();
    assert!(!limit.strictly_decreasing);
    assert_eq!(limit.verdict, LimitVerdict::NoConvergence);
}

#[test]
fn limit_needs_three_members() {
    let d = segment_matrix(4);
    assert!(matches!(
        limit_pseudometric(&[d.clone(), d], 0.1),
        Err(Error::Config(_))
    ));
}

#[test]
fn dumbbell_tails_decrease_and_the_waist_collapses() {
    let seq = dumbbell_family(&[0.2, 0.1, 0.05, 0.025], 32, 40, 11).unwrap();
    let limit = limit_pseudometric(&seq.matrices().unwrap(), 2.0 * seq.mesh_tolerance(3)).unwrap();
    assert!(limit.strictly_decreasing, "{:?}", limit.tails);
    assert_eq!(limit.verdict, LimitVerdict::Converged);
    assert!(limit.axioms_hold);
    let waist: Vec<usize> = (0..WAIST_SAMPLES).collect();
    assert!(limit.same_class(&waist), "{:?}", limit.zero_classes);
}

#[test]
fn flat_cylinder_neck_closed_forms() {
    let annulus = right_annulus(0.1, 0.05, 64).unwrap();
    let report = neck_diameter(&annulus, 0.05).unwrap();
    let expected = 0.1f64.hypot(0.025);
    assert!(
        (report.diameter / expected - 1.0).abs() < 0.02,
        "{}",
        report.diameter
    );
    assert!((report.area - 0.005).abs() < 0.005 * 0.02);
    assert!(report.area_ok && report.area <= 0.05 * report.split_boundary);
    assert!((report.cut_length / 0.1 - 1.0).abs() < 0.02);
}

#[test]
fn dumbbell_neck_diameters_decrease() {
    let diameters: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&neck| {
            let surface = CatalogSurface::dumbbell(neck).unwrap();
            let built = build_surface(&surface, 128).unwrap();
            let annulus = neck_band(&surface, &built, 1.4).unwrap();
            let eps = annulus.boundary_lengths[0].max(annulus.boundary_lengths[1]);
            let report = neck_diameter(&annulus, eps).unwrap();
            assert!(
                report.boundaries_within_2eps && report.split_within_6eps,
                "{report:?}"
            );
            report.diameter
        })
        .collect();
    assert!(diameters.windows(2).all(|w| w[1] < w[0]), "{diameters:?}");
}

#[test]
fn neck_band_rejects_other_surfaces() {
    let s = sphere(1.0);
    let built = build_surface(&s, 16).unwrap();
    assert!(matches!(neck_band(&s, &built, 1.5), Err(Error::Unsupported(_))));
    let d = CatalogSurface::dumbbell(0.2).unwrap();
    let built = build_surface(&d, 16).unwrap();
    assert!(matches!(neck_band(&d, &built, 3.0), Err(Error::Config(_))));
}

#[test]
fn sphere_band_control_reports_without_collapse() {
    let s = sphere(1.0);
    let built = build_surface(&s, 64).unwrap();
    let annulus = polar_band(&s, &built, 1.0, 1.4).unwrap();
    let report = neck_diameter(&annulus, 0.1).unwrap();
    // A wide band is far from any neck; the chain does not hold.
    assert!(report.diameter > 1.0);
    assert!(!report.split_within_6eps);
}

#[test]
fn sphere_family_diameter_is_pi() {
    let seq = SurfaceSequence::new(
        "spheres",
        vec![0.5, 1.0],
        vec![sphere(0.5), sphere(1.0)],
        64,
        8,
        &[],
        1,
    )
    .unwrap();
    let exp = diameter_experiment(&seq, 4.0, 4.0 * PI * (1.0 + 1e-12), 0, 2, Some(3.3)).unwrap();
    assert!((exp.d_obs / PI - 1.0).abs() < 0.02, "{}", exp.d_obs);
    assert!(exp.members.iter().all(|m| m.excluded.is_none()));
    assert_eq!(exp.within_config, Some(true));
}

#[test]
fn oversized_member_is_excluded_with_reason() {
    let seq = SurfaceSequence::new(
        "spheres",
        vec![1.0, 2.0],
        vec![sphere(1.0), sphere(2.0)],
        16,
        8,
        &[],
        1,
    )
    .unwrap();
    let exp = diameter_experiment(&seq, 4.0, 4.0 * PI * 1.01, 0, 1, None).unwrap();
    assert!(exp.members[0].excluded.is_none());
    let reason = exp.members[1].excluded.as_deref().unwrap();
    assert!(reason.contains("area"), "{reason}");
    assert!(exp.members[1].diameter.is_none());
    assert_eq!(exp.tail, vec![0]);
}

#[test]
fn torus_grid_oracle_sits_in_the_packing_bracket() {
    // Frozen from the closed-form grid oracle.
    let counts: Vec<usize> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&d| grid_cover_oracle(120, d))
        .collect();
    for (&n, &d) in counts.iter().zip(&[0.2, 0.1, 0.05]) {
        let content = n as f64 * d * d;
        assert!((1.0 / PI..=4.0).contains(&content), "{n} at {d}");
    }
}

#[test]
fn flat_torus_covering_dimension_is_two() {
    let built = build_surface(&torus(), 128).unwrap();
    let mut metric = MeshMetric::new(&built.mesh, 1);
    let est = box_dimension(&mut metric, &[0.2, 0.1, 0.05]).unwrap();
    assert!((est.slope - 2.0).abs() <= 0.15, "{est:?}");
    assert!(est.rows.iter().all(|r| (1.0 / PI..=4.0).contains(&r.content2)));
    let oracle: Vec<usize> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&d| grid_cover_oracle(120, d))
        .collect();
    for (row, o) in est.rows.iter().zip(oracle) {
        let ratio = row.count as f64 / o as f64;
        assert!((0.5..2.0).contains(&ratio), "{} vs {o}", row.count);
    }
}

#[test]
fn segment_control_is_one_dimensional() {
    let mut d = segment_matrix(100);
    let est = box_dimension(&mut d, &[0.2, 0.1, 0.05]).unwrap();
    let counts: Vec<usize> = est.rows.iter().map(|r| r.count).collect();
    assert_eq!(counts, vec![5, 10, 20]);
    assert!((est.slope - 1.0).abs() < 1e-12);
    assert!((est.v1 - 1.0).abs() < 1e-12);
}

#[test]
fn deltas_below_resolution_are_excluded() {
    let mut d = segment_matrix(10);
    let est = box_dimension(&mut d, &[0.5, 0.3, 0.2, 0.05]).unwrap();
    assert_eq!(est.excluded, vec![0.05]);
    assert_eq!(est.warnings.len(), 1);
    assert!(matches!(
        box_dimension(&mut d, &[0.2, 0.1, 0.05]),
        Err(Error::Config(_))
    ));
    assert!(matches!(
        box_dimension(&mut d, &[0.5, 0.6, 0.2]),
        Err(Error::Config(_))
    ));
}

#[test]
fn greedy_cover_of_a_point_set() {
    let mut d = segment_matrix(10);
    assert_eq!(d.num_points(), 10);
    assert_eq!(greedy_cover_count(&mut d, 10.0), 1);
    assert_eq!(greedy_cover_count(&mut d, 0.05), 10);
}

fn random_matrix() -> impl Strategy<Value = DistanceMatrix> {
    (3usize..9, any::<u64>()).prop_map(|(n, seed)| {
        let surface = torus();
        let built = build_surface(&surface, 12).unwrap();
        let samples = bmc::surface::sample::area_weighted_samples(&built.mesh, n, seed);
        distance_matrix(&built.mesh, &samples).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn matrices_are_pseudometrics(d in random_matrix()) {
        let (min_off, max_diag) = d.extremes();
        prop_assert!(d.max_triangle_violation() <= 1e-9);
        prop_assert!(max_diag == 0.0 && min_off >= 0.0);
        for i in 0..d.size {
            for j in 0..d.size {
                prop_assert_eq!(d.get(i, j), d.get(j, i));
            }
        }
    }

    #[test]
    fn uniform_deviation_obeys_the_triangle_inequality(
        a in prop::collection::vec(0.0f64..5.0, 16),
        b in prop::collection::vec(0.0f64..5.0, 16),
        c in prop::collection::vec(0.0f64..5.0, 16),
    ) {
        let m = |v: &Vec<f64>| DistanceMatrix::from_fn(4, |i, j| v[i * 4 + j]);
        let (a, b, c) = (m(&a), m(&b), m(&c));
        let ac = a.uniform_deviation(&c).unwrap();
        prop_assert!(ac <= a.uniform_deviation(&b).unwrap() + b.uniform_deviation(&c).unwrap());
    }

    #[test]
    fn slope_is_scale_invariant(n in 60usize..200, t in prop::sample::select(vec![0.5, 2.0])) {
        let deltas = [0.2, 0.1, 0.05];
        let base = box_dimension(&mut segment_matrix(n), &deltas).unwrap();
        let scaled_deltas: Vec<f64> = deltas.iter().map(|d| d * t).collect();
        let scaled = box_dimension(&mut segment_matrix(n).scaled(t), &scaled_deltas).unwrap();
        prop_assert!((base.slope - scaled.slope).abs() < 1e-12);
    }

    #[test]
    fn distances_are_equicontinuous(d in random_matrix(), picks in prop::array::uniform4(0usize..64)) {
        let [p1, q1, p2, q2] = picks.map(|k| k % d.size);
        let lhs = (d.get(p1, q1) - d.get(p2, q2)).abs();
        prop_assert!(lhs <= d.get(p1, p2) + d.get(q1, q2) + 1e-12);
    }
}
