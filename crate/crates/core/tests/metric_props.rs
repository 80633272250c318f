use hquot::chart::{phi, ChartPoint};
use hquot::lie::{minkowski_form, AlgebraElement};
use hquot::metric::{
    closed_frame_2d, hyperbolic_metric, kappa2_closed, r_isometry_defect, sectional_numeric, vertical_basis,
    Metric, QuotientMetric, RightQuotientMetric,
};
use hquot::sample::{case_rng, random_compact, random_point, random_unit_vector};
use hquot::tolerance;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

/// Left-invariant coordinates of a tangent matrix `a` at `g`.
/// The matrix is first projected onto the algebra, `(X - J X^T J) / 2`, to
/// remove finite-difference noise.
fn left_coords(g_inv: &DMatrix<f64>, a: &DMatrix<f64>, n: usize) -> DVector<f64> {
    let j = minkowski_form(n);
    let x = g_inv * a;
    let projected = (&x - &j * x.transpose() * &j) * 0.5;
    AlgebraElement::new(n, projected).expect("tangent matrix at a group element").coefficients()
}

/// Submersion metric from first principles: differentiate the chart map
/// numerically, project off the vertical tangent matrices `E phi(p)` and
/// take Gram matrices of what remains.
fn gram_oracle(p: &ChartPoint) -> DMatrix<f64> {
    let n = p.rank();
    let g_inv = phi(p).inverse().matrix().clone();
    let h = 1e-3 * p.y();
    let derivs: Vec<DVector<f64>> = (0..n)
        .map(|axis| {
            let at = |e: f64| phi(&p.shifted(axis, e).unwrap()).matrix().clone();
            let d = (at(-2.0 * h) - at(2.0 * h) + (at(h) - at(-h)) * 8.0) / (12.0 * h);
            left_coords(&g_inv, &d, n)
        })
        .collect();
    let vertical: Vec<DVector<f64>> = vertical_basis(p).unwrap().iter().map(|v| left_coords(&g_inv, v, n)).collect();
    let q = DMatrix::from_columns(&vertical).qr().q();
    let d = DMatrix::from_columns(&derivs);
    let horizontal = &d - &q * (q.transpose() * &d);
    horizontal.transpose() * horizontal
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn frames_are_orthonormal(n in 2usize..=5, seed in any::<u64>()) {
        let p = random_point(&mut case_rng(seed, 0), n, 2.0, 0.25, 4.0);
        let s = QuotientMetric::new(n).unwrap().sample(&p).unwrap();
        prop_assert!(s.orthonormality_defect() <= tolerance::FRAME);
    }

    #[test]
    fn planar_metric_equals_the_closed_frame(x in -3.0f64..3.0, ly in -1.5f64..1.5) {
        let p = ChartPoint::new(vec![x], ly.exp()).unwrap();
        let g = QuotientMetric::new(2).unwrap().tensor(&p).unwrap();
        let c = closed_frame_2d(&p).unwrap().g;
        prop_assert!((&g - &c).amax() <= tolerance::FRAME * c.amax());
    }

    #[test]
    fn metric_matches_the_projection_oracle(n in 2usize..=4, seed in any::<u64>()) {
        let p = random_point(&mut case_rng(seed, 1), n, 1.5, 0.3, 3.0);
        let g = QuotientMetric::new(n).unwrap().tensor(&p).unwrap();
        let oracle = gram_oracle(&p);
        prop_assert!((&g - &oracle).amax() <= 1e-8 * oracle.amax());
    }

    #[test]
    fn right_quotient_is_the_hyperbolic_metric(n in 2usize..=5, seed in any::<u64>()) {
        let p = random_point(&mut case_rng(seed, 2), n, 3.0, 0.1, 10.0);
        let g = RightQuotientMetric::new(n).unwrap().tensor(&p).unwrap();
        let h = hyperbolic_metric(&p).g;
        prop_assert!((&g - &h).amax() <= 1e-12 * h.amax());
    }

    #[test]
    fn right_action_is_isometric(n in 2usize..=3, seed in any::<u64>()) {
        let mut rng = case_rng(seed, 3);
        let p = random_point(&mut rng, n, 2.0, 0.25, 4.0);
        let k = random_compact(&mut rng, n);
        let m = QuotientMetric::new(n).unwrap();
        prop_assert!(r_isometry_defect(&m, &k, &p).unwrap() <= tolerance::PULLBACK);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn planar_curvature_matches_closed_form(x in -2.0f64..2.0, y in 0.25f64..4.0) {
        let p = ChartPoint::new(vec![x], y).unwrap();
        let e0 = DVector::from_vec(vec![1.0, 0.0]);
        let e1 = DVector::from_vec(vec![0.0, 1.0]);
        let k = sectional_numeric(&QuotientMetric::new(2).unwrap(), &p, &e0, &e1).unwrap();
        prop_assert!((k - kappa2_closed(x, y)).abs() <= tolerance::CURVATURE_ORACLE);
    }

    #[test]
    fn curvature_is_positive_and_bounded(n in 3usize..=4, seed in any::<u64>()) {
        let mut rng = case_rng(seed, 4);
        let p = random_point(&mut rng, n, 1.5, 0.3, 3.0);
        let u = random_unit_vector(&mut rng, n);
        let v = random_unit_vector(&mut rng, n);
        let k = sectional_numeric(&QuotientMetric::new(n).unwrap(), &p, &u, &v).unwrap();
        prop_assert!(k > 0.0 && k <= 5.0 + tolerance::CURVATURE_ORACLE, "kappa = {}", k);
    }
}
