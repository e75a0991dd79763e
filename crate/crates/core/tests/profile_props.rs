use std::f64::consts::TAU;

use firefront::{
    check_strong_convexity, gielis_theta_jet, speed_jet, AnalyticProfile, AngularProfile,
    GielisParams, ParamField,
};
use proptest::prelude::*;

fn base_params() -> impl Strategy<Value = GielisParams> {
    (0.1f64..10.0, 0.1f64..10.0, 0.1f64..10.0, 0.0f64..TAU)
        .prop_map(|(a, b, l, p)| GielisParams::base(a, b, l, p).unwrap())
}

fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 200,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn periodic_in_theta(p in base_params(), th in 0.0f64..TAU) {
        let a = gielis_theta_jet(&p, th).unwrap();
        let b = gielis_theta_jet(&p, th + TAU).unwrap();
        prop_assert!(close(a.v, b.v, 1e-12));
        prop_assert!(close(a.v_th, b.v_th, 1e-9));
    }

    #[test]
    fn rotation_covariant(p in base_params(), th in 0.0f64..TAU) {
        let unrotated = GielisParams { varphi: 0.0, ..p };
        let a = gielis_theta_jet(&p, th).unwrap();
        let b = gielis_theta_jet(&unrotated, th - p.varphi).unwrap();
        prop_assert!(close(a.v, b.v, 1e-12));
        prop_assert!(close(a.v_th, b.v_th, 1e-9));
        prop_assert!(close(a.v_thth, b.v_thth, 1e-9));
    }

    #[test]
    fn scale_covariant(p in base_params(), th in 0.0f64..TAU, k in 0.1f64..5.0) {
        let scaled = GielisParams { lambda: p.lambda * k, ..p };
        let a = gielis_theta_jet(&p, th).unwrap();
        let b = gielis_theta_jet(&scaled, th).unwrap();
        prop_assert!(close(b.v, k * a.v, 1e-13));
        prop_assert!(close(b.v_thth, k * a.v_thth, 1e-12));
    }

    /// A rotation angle that varies along x1 exposes `∂v/∂φ` through the
    /// x1-gradient, which must equal `-v̇` and match finite differences.
    #[test]
    fn varphi_derivative_is_minus_theta_derivative(
        a in 1.0f64..6.0, b in 1.0f64..6.0, x1 in 0.1f64..6.0, th in 0.0f64..TAU
    ) {
        let field = ParamField::parse(&a.to_string(), &b.to_string(), "1", "x1").unwrap();
        let jet = speed_jet(&field, 0.0, [x1, 0.0], th).unwrap();
        prop_assert!(close(jet.grad_v[0], -jet.v_th, 1e-12));
        prop_assert!(close(jet.grad_v_th[0], -jet.v_thth, 1e-12));
        let h = 1e-6;
        let vp = speed_jet(&field, 0.0, [x1 + h, 0.0], th).unwrap().v;
        let vm = speed_jet(&field, 0.0, [x1 - h, 0.0], th).unwrap().v;
        prop_assert!(close(jet.grad_v[0], (vp - vm) / (2.0 * h), 1e-6));
    }

    #[test]
    fn spatial_gradient_matches_differences(x1 in -8.0f64..8.0, x2 in -8.0f64..8.0, th in 0.0f64..TAU) {
        let field = ParamField::parse("4+cos(x1/2)+t/2", "2+sin(x2/2)", "1+x1*x1/100", "t").unwrap();
        let t = 0.7;
        let jet = speed_jet(&field, t, [x1, x2], th).unwrap();
        let h = 1e-6;
        let v = |t: f64, p: [f64; 2]| speed_jet(&field, t, p, th).unwrap();
        let fd = [
            (v(t, [x1 + h, x2]).v - v(t, [x1 - h, x2]).v) / (2.0 * h),
            (v(t, [x1, x2 + h]).v - v(t, [x1, x2 - h]).v) / (2.0 * h),
            (v(t + h, [x1, x2]).v - v(t - h, [x1, x2]).v) / (2.0 * h),
        ];
        let fd_th = [
            (v(t, [x1 + h, x2]).v_th - v(t, [x1 - h, x2]).v_th) / (2.0 * h),
            (v(t, [x1, x2 + h]).v_th - v(t, [x1, x2 - h]).v_th) / (2.0 * h),
            (v(t + h, [x1, x2]).v_th - v(t - h, [x1, x2]).v_th) / (2.0 * h),
        ];
        for q in 0..3 {
            prop_assert!(close(jet.grad_v[q], fd[q], 1e-6), "q={q}: {} vs {}", jet.grad_v[q], fd[q]);
            prop_assert!(close(jet.grad_v_th[q], fd_th[q], 1e-5), "q={q}: {} vs {}", jet.grad_v_th[q], fd_th[q]);
        }
    }
}

#[test]
fn convexity_of_random_base_profiles_and_reciprocal_form() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let p = GielisParams::base(
            rng.gen_range(0.1..10.0),
            rng.gen_range(0.1..10.0),
            rng.gen_range(0.1..10.0),
            rng.gen_range(0.0..TAU),
        )
        .unwrap();
        let r = check_strong_convexity(&p, 4096).unwrap();
        assert!(r.passed, "{p:?}: {r:?}");
        for k in 0..4096 {
            let j = p.theta_jet(TAU * k as f64 / 4096.0).unwrap();
            assert_eq!(
                j.convexity_margin() > 0.0,
                j.reciprocal_margin() > 0.0,
                "{p:?}"
            );
        }
    }
}

#[test]
fn superformula_ellipse_matches_closed_form() {
    for (a, b) in [(3.0, 1.5), (1.0, 1.0), (0.4, 7.0)] {
        let sf = GielisParams::new(a, b, 4.0, 2.0, 2.0, 2.0, 1.0, 0.0).unwrap();
        let cf = AnalyticProfile::ellipse(a, b);
        for k in 0..360 {
            let th = TAU * k as f64 / 360.0;
            let (x, y) = (sf.theta_jet(th).unwrap(), cf.theta_jet(th).unwrap());
            let s = x.v.abs().max(1.0);
            assert!((x.v - y.v).abs() <= 1e-12 * s);
            assert!((x.v_th - y.v_th).abs() <= 1e-12 * s * 50.0);
            assert!((x.v_thth - y.v_thth).abs() <= 1e-12 * s * 500.0);
        }
    }
}

#[test]
fn double_semi_ellipse_axes() {
    // forward reach a^(n2/n1) = 8, backward reach b^(n3/n1) = 2
    let p = GielisParams::base(4.0, 2.0, 1.0, 0.0).unwrap();
    let v = |th: f64| p.theta_jet(th).unwrap().v;
    assert!((v(0.0) - 8.0).abs() < 1e-12);
    assert!((v(std::f64::consts::PI) - 2.0).abs() < 1e-12);
}
