//! The Stein operator of `T_n` and Monte Carlo checks of its characterizing identity.

use rayon::prelude::*;
use serde::Serialize;

use super::test_functions::TestFunction;
use crate::error::{Error, Result};
use crate::lincomb::LinearCombinationModel;
use crate::sampling::{mean_std_error, sample_tn_direct, RandomStream};
use crate::special::{integrate_upper, QuadratureSpec};

/// Smallest sample size accepted by [`stein_identity_check`].
pub const MIN_IDENTITY_SAMPLES: usize = 10_000;

/// `A f(x) = -x f(x) + ∫ f(x+u) u ν(du)`, with the integral by quadrature.
///
/// The `u`-weighted Lévy measure has density `Σ p_j e^{-λ_j u}` on `u > 0`
/// and `-Σ q_j e^{-μ_j |u|}` on `u < 0`, so
/// `A f(x) = -x f(x) + ∫_0^∞ [f(x+u) K_+(u) - f(x-u) K_-(u)] du`.
pub fn stein_apply<F: Fn(f64) -> f64>(
    model: &LinearCombinationModel,
    f: F,
    x: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let comps = model.components();
    let kernel = |u: f64| -> f64 {
        let mut pos = 0.0;
        let mut neg = 0.0;
        for c in comps {
            pos += c.p * (-c.lambda() * u).exp();
            neg += c.q * (-c.mu() * u).exp();
        }
        let a = if pos == 0.0 { 0.0 } else { f(x + u) * pos };
        let b = if neg == 0.0 { 0.0 } else { f(x - u) * neg };
        a - b
    };
    let slowest = comps
        .iter()
        .map(|c| c.lambda().min(c.mu()))
        .fold(f64::INFINITY, f64::min);
    let integral = integrate_upper(kernel, 0.0, 1.0 / slowest, spec)?;
    Ok(-x * f(x) + integral.value)
}

/// `A h(x)` for a shipped test function, from closed-form exponential transforms.
pub fn stein_apply_closed(model: &LinearCombinationModel, h: &TestFunction, x: f64) -> f64 {
    let mut v = -x * h.eval(x);
    for c in model.components() {
        v += c.p * h.exp_transform(x, c.lambda(), 1.0);
        v -= c.q * h.exp_transform(x, c.mu(), -1.0);
    }
    v
}

/// Monte Carlo estimate of `E[A h(T_n)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

impl IdentityCheck {
    /// `|estimate| <= k · std_error`.
    pub fn holds(&self, k: f64) -> bool {
        self.estimate.abs() <= k * self.std_error
    }
}

/// Check `E[A h(T_n)] = 0` on `n_samples` exact draws of `T_n`.
pub fn stein_identity_check(
    model: &LinearCombinationModel,
    h: &TestFunction,
    n_samples: usize,
    rng: &mut RandomStream,
) -> Result<IdentityCheck> {
    if n_samples < MIN_IDENTITY_SAMPLES {
        return Err(Error::Domain(format!(
            "identity check needs at least {MIN_IDENTITY_SAMPLES} samples, got {n_samples}"
        )));
    }
    let draws = sample_tn_direct(model, n_samples, rng)?;
    let values: Vec<f64> = draws.par_iter().map(|&t| stein_apply_closed(model, h, t)).collect();
    let (estimate, std_error) = mean_std_error(&values);
    Ok(IdentityCheck {
        estimate,
        std_error,
        n_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomb::Component;
    use proptest::prelude::*;

    fn model() -> LinearCombinationModel {
        LinearCombinationModel::new(vec![
            Component::new(1.0, 1.0, 3.0, 0.7, 1.0, 1.0),
            Component::new(2.0, 1.5, 1.2, 1.3, 0.6, 0.8),
        ])
        .unwrap()
    }

    #[test]
    fn constant_function_gives_mean_minus_x() {
        let m = model();
        let spec = QuadratureSpec::default();
        for &x in &[-2.0, 0.0, 1.5] {
            let q = stein_apply(&m, |_| 1.0, x, &spec).unwrap();
            assert!((q - (m.mean() - x)).abs() < 1e-10);
            assert!((stein_apply_closed(&m, &TestFunction::constant(), x) - (m.mean() - x)).abs() < 1e-13);
        }
    }

    #[test]
    fn identity_function_closed_form() {
        let m = model();
        let second: f64 = m
            .components()
            .iter()
            .map(|c| c.p / (c.lambda() * c.lambda()) + c.q / (c.mu() * c.mu()))
            .sum();
        for &x in &[-1.0, 0.3, 2.0] {
            let q = stein_apply(&m, |u| u, x, &QuadratureSpec::default()).unwrap();
            let exact = -x * x + x * m.mean() + second;
            assert!((q - exact).abs() < 1e-9, "x={x}: {q} vs {exact}");
        }
    }

    #[test]
    fn sine_at_origin_for_laplace_like_model() {
        let m = LinearCombinationModel::new(vec![Component::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0)]).unwrap();
        let spec = QuadratureSpec::new(1e-13, 1e-13, 2000).unwrap();
        // ∫_0^∞ sin(u) e^{-u} du = 1/2 on each side.
        let v = stein_apply(&m, f64::sin, 0.0, &spec).unwrap();
        assert!((v - 1.0).abs() < 1e-8);
    }

    #[test]
    fn identity_holds_for_sine() {
        let m = model();
        let mut rng = RandomStream::new(5, 0);
        let check = stein_identity_check(&m, &TestFunction::sine(), 200_000, &mut rng).unwrap();
        assert!(check.holds(4.0), "{check:?}");
        assert!(stein_identity_check(&m, &TestFunction::sine(), 10, &mut rng).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn closed_form_matches_quadrature(x in -6.0f64..6.0, which in 0usize..5) {
            let h = [
                TestFunction::constant(),
                TestFunction::sine(),
                TestFunction::cosine(),
                TestFunction::gaussian(),
                TestFunction::x_gaussian(),
            ][which];
            let m = model();
            let spec = QuadratureSpec::new(1e-13, 1e-12, 2000).unwrap();
            let q = stein_apply(&m, |u| h.eval(u), x, &spec).unwrap();
            prop_assert!((q - stein_apply_closed(&m, &h, x)).abs() < 1e-9);
        }
    }
}
