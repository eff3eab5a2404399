use ctreserve_core::calibration::{
    ct_to_discrete, discrete_to_ct, discrete_to_ct_with_law, fit_jump_gamma, CtParams,
};
use proptest::prelude::*;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()) || (a - b).abs() <= 1e-300
}

fn drift() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(1e-9), Just(-1e-9), -2.0f64..2.0]
}

fn ct_params() -> impl Strategy<Value = CtParams<f64>> {
    (2usize..=8).prop_flat_map(|n| {
        (
            prop::collection::vec(0.0f64..2.0, n),
            prop::collection::vec(drift(), n - 1),
            prop::collection::vec(0.0f64..5.0, n - 1),
            0.1f64..3.0,
            0.01f64..5.0,
        )
            .prop_map(|(lambda, d, t, ez, gap)| {
                let delta = std::iter::once(0.0).chain(d).collect();
                let tau2 = std::iter::once(0.0).chain(t).collect();
                CtParams::new(lambda, delta, tau2, fit_jump_gamma(ez, ez + gap).unwrap()).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn continuous_parameters_survive_the_round_trip(ct in ct_params()) {
        let back = discrete_to_ct_with_law(&ct_to_discrete(&ct), *ct.jump_law()).unwrap();
        for j in 0..ct.n() {
            prop_assert!(rel_close(back.delta(j), ct.delta(j), 1e-10), "delta {j}: {} vs {}", back.delta(j), ct.delta(j));
            prop_assert!(rel_close(back.tau2(j), ct.tau2(j), 1e-10), "tau2 {j}");
            prop_assert!(rel_close(back.lambda(j + 1), ct.lambda(j + 1), 1e-10), "lambda {}", j + 1);
        }
    }

    #[test]
    fn discrete_parameters_survive_the_round_trip(ct in ct_params()) {
        let p = ct_to_discrete(&ct);
        let q = ct_to_discrete(&discrete_to_ct_with_law(&p, *ct.jump_law()).unwrap());
        for j in 1..p.n() {
            prop_assert!(rel_close(q.delta(j), p.delta(j), 1e-10));
            prop_assert!(rel_close(q.t2(j), p.t2(j), 1e-10));
        }
        for j in 1..=p.n() {
            prop_assert!(rel_close(q.lambda(j), p.lambda(j), 1e-10));
        }
    }

    #[test]
    fn intensity_products_ignore_the_jump_mean(ct in ct_params(), ez2 in 0.05f64..0.95) {
        let p = ct_to_discrete(&ct);
        let x = ct.jump_law().second_moment_ratio;
        let a = discrete_to_ct(&p, ct.jump_law().mean, x).unwrap().lambda_times_mean();
        let b = discrete_to_ct(&p, ez2 * x, x).unwrap().lambda_times_mean();
        for (u, v) in a.iter().zip(&b) {
            prop_assert!(rel_close(*u, *v, 1e-12));
        }
    }

    #[test]
    fn gamma_jump_variance(ez in 0.01f64..10.0, gap in 1e-6f64..10.0) {
        let law = fit_jump_gamma(ez, ez + gap).unwrap();
        let shape_rate_var = law.shape / (law.rate * law.rate);
        prop_assert!(rel_close(law.variance(), shape_rate_var, 1e-12));
        prop_assert!(rel_close(law.shape / law.rate, ez, 1e-12));
    }
}
