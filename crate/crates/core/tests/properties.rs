//! Property-based invariants on randomized points and directions.

use proptest::prelude::*;

use tgfield_core::analysis::PointAnalysis;
use tgfield_core::builtin::{flat_space, flat_tg_field, hopf_field, make_sphere};
use tgfield_core::geometry::{Point, Tangent};
use tgfield_core::kernel;
use tgfield_core::linalg;
use tgfield_core::ode;

fn coords3() -> impl Strategy<Value = [f64; 3]> {
    [-1.1..1.1, -1.1..1.1, -1.1..1.1]
}

fn vec3() -> impl Strategy<Value = [f64; 3]> {
    [-1.0..1.0, -1.0..1.0, -1.0..1.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn curvature_is_antisymmetric_and_multilinear(
        u in coords3(),
        x in vec3(),
        y in vec3(),
        z in vec3(),
        s in -2.0f64..2.0,
    ) {
        let m = make_sphere(3);
        let p = Point::on(&u);
        let c = kernel::curvature_at(&m, &p).unwrap();
        let rxy = c.apply(&x, &y, &z);
        let ryx = c.apply(&y, &x, &z);
        for i in 0..3 {
            prop_assert!((rxy[i] + ryx[i]).abs() < 1e-10);
        }
        // linearity in the first slot
        let xs: Vec<f64> = x.iter().map(|v| v * s).collect();
        let rs = c.apply(&xs, &y, &z);
        for i in 0..3 {
            prop_assert!((rs[i] - s * rxy[i]).abs() < 1e-9 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn hessian_and_harmonicity_are_symmetric_bilinear(
        u in coords3(),
        x in vec3(),
        y in vec3(),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
    ) {
        let m = make_sphere(3);
        let f = hopf_field(1);
        let p = Point::on(&u);
        let pa = PointAnalysis::new(&m, &f, &p).unwrap();

        let h_xy = pa.rough_hessian(&x, &y);
        let h_yx = pa.rough_hessian(&y, &x);
        let hm_xy = pa.harmonicity_tensor(&x, &y);
        let hm_yx = pa.harmonicity_tensor(&y, &x);
        for i in 0..3 {
            prop_assert!((h_xy[i] - h_yx[i]).abs() < 1e-13);
            prop_assert!((hm_xy[i] - hm_yx[i]).abs() < 1e-13);
        }

        // bilinearity: T(aX + bY, Y) = a T(X,Y) + b T(Y,Y)
        let comb: Vec<f64> = (0..3).map(|i| a * x[i] + b * y[i]).collect();
        let h_comb = pa.rough_hessian(&comb, &y);
        let h_yy = pa.rough_hessian(&y, &y);
        let hm_comb = pa.harmonicity_tensor(&comb, &y);
        let hm_yy = pa.harmonicity_tensor(&y, &y);
        let scale = 1.0 + a.abs() + b.abs();
        for i in 0..3 {
            prop_assert!((h_comb[i] - (a * h_xy[i] + b * h_yy[i])).abs() < 1e-10 * scale);
            prop_assert!((hm_comb[i] - (a * hm_xy[i] + b * hm_yy[i])).abs() < 1e-10 * scale);
        }
    }

    #[test]
    fn rotation_field_solves_the_geodesic_image_equation(
        u in coords3(),
        x in vec3(),
        y in vec3(),
    ) {
        let m = make_sphere(3);
        let f = hopf_field(1);
        let p = Point::on(&u);
        let pa = PointAnalysis::new(&m, &f, &p).unwrap();
        prop_assert!(pa.tg_residual(&x, &y).norm < 1e-9 * (1.0 + linalg::norm(&x) * linalg::norm(&y)));
    }

    #[test]
    fn sphere_transitions_round_trip(u in coords3()) {
        let r2: f64 = u.iter().map(|v| v * v).sum();
        prop_assume!(r2 > 0.05);
        let m = make_sphere(3);
        let p = Point::on(&u);
        let q = m.transition_point(&p, 1).unwrap();
        let back = m.transition_point(&q, 0).unwrap();
        for (a, b) in back.coords.iter().zip(&u) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        // tangent push-pull round trip
        let x = Tangent::new(p.clone(), vec![0.3, -0.8, 0.5]);
        let tx = m.transition_tangent(&x, 1).unwrap();
        let bx = m.transition_tangent(&tx, 0).unwrap();
        for (a, b) in bx.components.iter().zip(&x.components) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        // metric norms agree across the transition
        let n0 = kernel::norm(&m, &p, &x.components).unwrap();
        let n1 = kernel::norm(&m, &q, &tx.components).unwrap();
        prop_assert!((n0 - n1).abs() < 1e-10);
    }

    #[test]
    fn helical_trajectories_have_unit_speed(
        a in 0.2f64..2.0,
        w0 in -1.0f64..1.0,
        y0 in -1.0f64..1.0,
    ) {
        let m = flat_space(2);
        let f = flat_tg_field(a, w0);
        let x0 = 0.4 * std::f64::consts::PI / a - w0 / a;
        let traj = ode::integral_curve(&m, &f, &Point::on(&[x0, y0]), 0.5, 1e-3).unwrap();
        for s in traj.segment_speeds(&m).unwrap() {
            prop_assert!((s - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn chart_metrics_are_symmetric_positive_definite(u in coords3(), w in -1.0f64..1.0) {
        // every built-in chart, sampled inside its box
        let spec = tgfield_core::builtin::make_warped_surface(0.5, std::f64::consts::FRAC_PI_4).unwrap();
        let warped = spec.manifold();
        let (lo, hi) = spec.u_range;
        let probes: Vec<(tgfield_core::geometry::Manifold, Vec<f64>)> = vec![
            (flat_space(3), u.to_vec()),
            (make_sphere(3), u.to_vec()),
            (warped, vec![lo + (0.5 + 0.45 * w) * (hi - lo), u[1]]),
        ];
        for (m, coords) in probes {
            let p = Point::new(0, coords);
            let g = kernel::metric_at(&m, &p).unwrap();
            let n = p.coords.len();
            prop_assert!(linalg::asymmetry(&g, n) < 1e-14);
            prop_assert!(linalg::is_positive_definite(&g, n));
        }
    }

    #[test]
    fn unit_fields_stay_unit_everywhere(u in coords3()) {
        let m = make_sphere(3);
        let f = hopf_field(1);
        let p = Point::on(&u);
        let v = f.at(&p);
        let n = kernel::norm(&m, &p, &v.components).unwrap();
        prop_assert!((n - 1.0).abs() < 1e-10);
        // shape operator image stays orthogonal to the field
        let pa = PointAnalysis::new(&m, &f, &p).unwrap();
        let ax = pa.apply_shape(&[0.4, -0.9, 0.2]);
        prop_assert!(pa.inner(&ax, &pa.xi).abs() < 1e-10);
    }
}

#[test]
fn rotation_field_on_the_five_sphere() {
    // The odd-sphere constructions are dimension-generic: same operator
    // structure and geodesic image on S^5.
    use tgfield_core::builtin::hopf_field;
    use tgfield_core::sasaki::{self, MetricScaling};

    let m = make_sphere(5);
    let f = hopf_field(2);
    for coords in [[0.3, -0.2, 0.5, 0.1, -0.4], [0.9, 0.4, -0.1, 0.6, 0.2]] {
        let p = Point::new(0, coords.to_vec());
        let pa = PointAnalysis::new(&m, &f, &p).unwrap();
        let frame = kernel::adapted_frame(&m, &f, &p, &[]).unwrap();
        let mut worst = 0.0f64;
        for x in &frame.vectors {
            for y in &frame.vectors {
                worst = worst.max(pa.tg_residual(x, y).norm);
            }
        }
        assert!(worst < 1e-9, "geodesic-image residual {worst:e}");

        // A^2 = -Id on the complement, skew overall
        let op = tgfield_core::analysis::shape_operator(&m, &f, &p, &frame).unwrap();
        let a2 = linalg::mat_mul(&op.matrix_a, &op.matrix_a, 5);
        for i in 1..5 {
            for j in 1..5 {
                let want = if i == j { -1.0 } else { 0.0 };
                assert!((a2[i * 5 + j] - want).abs() < 1e-9);
            }
        }

        let k =
            sasaki::phi_sectional_curvature(&m, &f, &p, &frame.vectors[1], MetricScaling::Sasaki)
                .unwrap();
        assert!((k - 1.25).abs() < 1e-9, "phi-plane curvature {k}");
    }
}
