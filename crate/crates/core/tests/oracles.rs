//! Public-API checks against closed forms and structural identities.

use bilgamma::finance::{price_call_integral, PricingInputs};
use bilgamma::sampling::{mean_std_error, sample_law};
use bilgamma::{BgParams, Component, Law, LinearCombinationModel, QuadratureSpec, RandomStream};
use proptest::prelude::*;

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

/// `BG(α, 1, β, 1)` has density `αβ/(α+β)` times `e^{-αx}` on the right and `e^{βx}` on the left.
fn two_sided_exponential(alpha: f64, beta: f64, x: f64) -> f64 {
    let c = alpha * beta / (alpha + beta);
    if x >= 0.0 {
        c * (-alpha * x).exp()
    } else {
        c * (beta * x).exp()
    }
}

#[test]
fn unit_shape_density_is_two_sided_exponential() {
    let (alpha, beta) = (1.7, 0.6);
    let law = BgParams::new(alpha, 1.0, beta, 1.0).unwrap();
    let model = LinearCombinationModel::single(law, 1.0, 1.0).unwrap();
    for x in [-6.0, -2.5, -0.3, 0.4, 1.0, 3.7, 8.0] {
        let exact = two_sided_exponential(alpha, beta, x);
        assert!((law.pdf(x, &spec()).unwrap() - exact).abs() < 1e-9, "direct at {x}");
        assert!((model.pdf_fourier(x, &spec()).unwrap() - exact).abs() < 1e-8, "fourier at {x}");
    }
}

#[test]
fn sum_of_two_exponentials_has_a_series_density() {
    // X₁ - Y₁ + X₂ - Y₂ with all four terms Exp(2): a symmetric BG(2, 2, 2, 2),
    // whose density is (1 + 2|x|) e^{-2|x|} / 2.
    let model = LinearCombinationModel::new(vec![Component::new(2.0, 1.0, 2.0, 1.0, 1.0, 1.0); 2]).unwrap();
    let rep = model.mixture(1e-14, 10_000).unwrap();
    for x in [-3.0, -1.0, -0.2, 0.5, 2.0] {
        let exact = 0.5 * (1.0 + 2.0 * f64::abs(x)) * (-2.0 * f64::abs(x)).exp();
        assert!((rep.pdf_series(x, &spec()).unwrap() - exact).abs() < 1e-9, "series at {x}");
        assert!((model.pdf_fourier(x, &spec()).unwrap() - exact).abs() < 1e-8, "fourier at {x}");
    }
}

#[test]
fn seeded_sampling_is_reproducible_and_unbiased() {
    let model = LinearCombinationModel::new(vec![
        Component::new(2.0, 1.5, 3.0, 0.7, 1.2, 0.8),
        Component::new(1.0, 0.5, 2.0, 2.0, 0.4, 1.0),
    ])
    .unwrap();
    let a = sample_law(&model, 50_000, &mut RandomStream::new(5, 1)).unwrap();
    let b = sample_law(&model, 50_000, &mut RandomStream::new(5, 1)).unwrap();
    assert_eq!(a, b);
    let c = sample_law(&model, 50_000, &mut RandomStream::new(5, 2)).unwrap();
    assert_ne!(a, c);
    let (mean, se) = mean_std_error(&a);
    assert!((mean - Law::mean(&model)).abs() < 5.0 * se);
}

#[test]
fn call_price_respects_no_arbitrage_bounds() {
    let model = LinearCombinationModel::new(vec![
        Component::new(3.0, 1.2, 4.0, 0.8, 1.0, 1.0),
        Component::new(5.0, 0.7, 3.0, 1.1, 1.5, 0.9),
    ])
    .unwrap();
    let mut previous = f64::INFINITY;
    for strike in [0.5, 0.9, 1.0, 1.1, 2.0] {
        let inputs = PricingInputs::new(1.0, strike, 0.03, 0.0, 0.0, 1.0).unwrap();
        let price = price_call_integral(&model, &inputs, &spec()).unwrap().price;
        assert!(price > 0.0 && price < previous, "strike {strike}");
        previous = price;
    }
}

fn component() -> impl Strategy<Value = Component> {
    (0.5..5.0f64, 0.2..3.0f64, 0.5..5.0f64, 0.2..3.0f64, 0.2..2.0f64, 0.2..2.0f64)
        .prop_map(|(a, p, b, q, w1, w2)| Component::new(a, p, b, q, w1, w2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weighted_component_is_a_rescaled_bg(c in component(), z in -15.0..15.0f64) {
        let model = LinearCombinationModel::new(vec![c]).unwrap();
        let law = BgParams::new(c.alpha / c.w1, c.p, c.beta / c.w2, c.q).unwrap();
        prop_assert!((model.cf(z) - law.cf(z)).norm() < 1e-12);
        for k in 1..=4 {
            let (a, b) = (model.cumulant(k), law.cumulant(k));
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn cumulants_and_cf_factor_over_components(a in component(), b in component(), z in -10.0..10.0f64) {
        let joint = LinearCombinationModel::new(vec![a, b]).unwrap();
        let (ma, mb) = (LinearCombinationModel::new(vec![a]).unwrap(), LinearCombinationModel::new(vec![b]).unwrap());
        prop_assert!((joint.cf(z) - ma.cf(z) * mb.cf(z)).norm() < 1e-12);
        for k in 1..=5 {
            let sum = ma.cumulant(k) + mb.cumulant(k);
            prop_assert!((joint.cumulant(k) - sum).abs() <= 1e-10 * sum.abs().max(1.0));
        }
    }

    #[test]
    fn mixture_cf_matches_product_cf(a in component(), b in component(), z in -10.0..10.0f64) {
        let model = LinearCombinationModel::new(vec![a, b]).unwrap();
        let rep = model.mixture(1e-12, 100_000).unwrap();
        prop_assert!((rep.cf(z) - model.cf(z)).norm() < 1e-8 + 4e-12);
    }

    #[test]
    fn time_scaling_adds_cumulants(c in component(), t in 0.1..3.0f64) {
        let model = LinearCombinationModel::new(vec![c]).unwrap();
        let scaled = model.time_scaled(t).unwrap();
        for k in 1..=4 {
            let expected = t * model.cumulant(k);
            prop_assert!((scaled.cumulant(k) - expected).abs() <= 1e-12 * expected.abs().max(1.0));
        }
    }
}
