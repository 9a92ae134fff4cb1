use arbk::potentials::{soft_shrink, BregmanPoint, Potential};
use proptest::prelude::*;

fn vec_and_lambda(len: std::ops::Range<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, f64)> {
    len.prop_flat_map(|n| {
        (
            prop::collection::vec(-50.0..50.0f64, n),
            prop::collection::vec(-50.0..50.0f64, n),
            0.0..20.0f64,
        )
    })
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn shrinkage_is_nonexpansive((x, y, lambda) in vec_and_lambda(1..40)) {
        let sx = soft_shrink(&x, lambda);
        let sy = soft_shrink(&y, lambda);
        prop_assert!(sq_dist(&sx, &sy).sqrt() <= sq_dist(&x, &y).sqrt() * (1.0 + 1e-15));
    }

    #[test]
    fn fenchel_equality_at_selected_subgradient((x, _y, lambda) in vec_and_lambda(1..40)) {
        let p = Potential::new(lambda).unwrap();
        let xs = p.subgradient(&x);
        let gap = p.fenchel_gap(&x, &xs);
        prop_assert!(gap.abs() <= 1e-10 * (1.0 + p.value(&x)), "gap {}", gap);
        prop_assert!(BregmanPoint::new(&p, x, xs).is_ok());
    }

    #[test]
    fn bregman_dominates_half_squared_distance((x, y, lambda) in vec_and_lambda(1..40)) {
        let p = Potential::new(lambda).unwrap();
        let from = BregmanPoint::from_primal(&p, x.clone());
        let d = p.bregman_distance(&from, &y).unwrap();
        let scale = 1.0 + p.value(&x) + p.value(&y);
        prop_assert!(d >= 0.5 * sq_dist(&x, &y) - 1e-12 * scale, "{} < {}", d, 0.5 * sq_dist(&x, &y));
    }

    #[test]
    fn bregman_forms_agree((xs, y, lambda) in vec_and_lambda(1..40)) {
        let p = Potential::new(lambda).unwrap();
        let from = BregmanPoint::from_dual(&p, xs.clone());
        let conj = p.bregman_distance(&from, &y).unwrap();
        let direct = p.bregman_distance_direct(&from, &y).unwrap();
        let split = p.bregman_from_dual(&xs, &y).unwrap();
        let scale = conj.abs().max(direct.abs()).max(1.0);
        prop_assert!((conj - direct).abs() <= 1e-10 * scale, "{} vs {}", conj, direct);
        prop_assert!((conj - split).abs() <= 1e-10 * scale, "{} vs {}", conj, split);
    }

    #[test]
    fn quadratic_bregman_is_half_squared_distance((x, y, _l) in vec_and_lambda(1..40)) {
        let p = Potential::quadratic();
        let from = BregmanPoint::from_primal(&p, x.clone());
        let d = p.bregman_distance(&from, &y).unwrap();
        let expect = 0.5 * sq_dist(&x, &y);
        prop_assert!((d - expect).abs() <= 1e-12 * (1.0 + expect), "{} vs {}", d, expect);
    }

    #[test]
    fn conjugate_gradient_matches_central_differences(
        (xs, _y, lambda) in vec_and_lambda(1..20)
    ) {
        // Keep f* moderate so the difference quotient is not swamped by rounding.
        let xs: Vec<f64> = xs.iter().map(|v| 0.4 * v).collect();
        let lambda = 0.4 * lambda;
        let h = 1e-5;
        // Only probe away from the kinks at ±λ.
        prop_assume!(xs.iter().all(|v| (v - lambda).abs() > 10.0 * h && (v + lambda).abs() > 10.0 * h));
        let p = Potential::new(lambda).unwrap();
        let g = p.conj_grad(&xs);
        for j in 0..xs.len() {
            let mut up = xs.clone();
            let mut dn = xs.clone();
            up[j] += h;
            dn[j] -= h;
            let fd = (p.conj_value(&up) - p.conj_value(&dn)) / (2.0 * h);
            prop_assert!((fd - g[j]).abs() <= 1e-6, "j={} fd={} grad={}", j, fd, g[j]);
        }
    }
}
