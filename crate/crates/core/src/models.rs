//! The shipped model grid used by the verification suite, the acceptance
//! tests and the CLI examples.

use crate::bg::BgParams;
use crate::finance::PricingInputs;
use crate::lincomb::{Component, GammaSumModel, GammaTerm, LinearCombinationModel};

/// A named member of the grid.
#[derive(Debug, Clone)]
pub struct NamedModel {
    pub name: &'static str,
    pub model: LinearCombinationModel,
}

/// A model paired with a bilateral gamma target for the d3 bound checks.
#[derive(Debug, Clone)]
pub struct BoundPair {
    pub name: &'static str,
    pub model: LinearCombinationModel,
    pub target: BgParams,
    /// Whether `target` is the law of the single component of `model`.
    pub self_target: bool,
}

fn c(alpha: f64, p: f64, beta: f64, q: f64, w1: f64, w2: f64) -> Component {
    Component::new(alpha, p, beta, q, w1, w2)
}

fn model(components: Vec<Component>) -> LinearCombinationModel {
    LinearCombinationModel::new(components).expect("grid models are valid")
}

fn bg(alpha: f64, p: f64, beta: f64, q: f64) -> BgParams {
    BgParams::new(alpha, p, beta, q).expect("grid targets are valid")
}

/// `BG(α, 1, α, 1)`, the Laplace law with density `(α/2) e^{-α|x|}`.
pub fn laplace(alpha: f64) -> LinearCombinationModel {
    model(vec![c(alpha, 1.0, alpha, 1.0, 1.0, 1.0)])
}

/// Six models covering `n ∈ {1, 2, 5}` with unequal weights and
/// non-integer shapes. Every member has total shape above 1, so its
/// density is bounded and Fourier inversion applies at every point.
pub fn grid() -> Vec<NamedModel> {
    vec![
        NamedModel {
            name: "laplace",
            model: laplace(1.0),
        },
        NamedModel {
            name: "single",
            model: model(vec![c(2.0, 1.5, 3.0, 0.7, 1.2, 0.8)]),
        },
        NamedModel {
            name: "pair",
            model: model(vec![c(1.0, 1.0, 3.0, 0.7, 1.0, 1.0), c(2.0, 1.5, 1.2, 1.3, 0.6, 0.8)]),
        },
        NamedModel {
            name: "pair_symmetric",
            model: model(vec![c(1.5, 0.8, 1.5, 0.8, 1.0, 1.0), c(2.5, 1.3, 2.5, 1.3, 0.7, 0.7)]),
        },
        NamedModel {
            name: "five_a",
            model: model(vec![
                c(2.0, 0.6, 2.5, 0.45, 1.0, 1.2),
                c(3.0, 0.35, 1.8, 0.7, 1.5, 0.9),
                c(1.2, 0.9, 3.3, 0.25, 0.5, 1.1),
                c(4.1, 0.5, 2.2, 0.55, 1.3, 0.6),
                c(2.6, 0.75, 1.7, 0.8, 0.65, 1.4),
            ]),
        },
        NamedModel {
            name: "five_b",
            model: model(vec![
                c(0.8, 1.1, 1.0, 0.6, 0.5, 0.7),
                c(1.5, 0.4, 0.9, 1.25, 0.6, 0.45),
                c(2.2, 0.85, 3.1, 0.3, 1.1, 1.3),
                c(0.9, 0.65, 1.6, 0.95, 0.3, 0.8),
                c(3.5, 0.2, 2.8, 0.5, 1.75, 1.6),
            ]),
        },
    ]
}

/// Model and target pairs with `κ_n` defined.
pub fn bound_pairs() -> Vec<BoundPair> {
    vec![
        BoundPair {
            name: "self_single",
            model: model(vec![c(2.0, 1.5, 3.0, 0.7, 1.0, 1.0)]),
            target: bg(2.0, 1.5, 3.0, 0.7),
            self_target: true,
        },
        BoundPair {
            name: "self_symmetric",
            model: model(vec![c(2.0, 1.0, 2.0, 1.0, 1.0, 1.0)]),
            target: bg(2.0, 1.0, 2.0, 1.0),
            self_target: true,
        },
        BoundPair {
            name: "pair_vs_bg",
            model: model(vec![c(4.0, 1.2, 5.0, 0.9, 1.0, 1.0), c(6.0, 0.8, 5.0, 1.5, 0.9, 1.1)]),
            target: bg(2.2, 1.6, 2.4, 1.9),
            self_target: false,
        },
        BoundPair {
            name: "five_vs_bg",
            model: model(vec![
                c(10.0, 1.5, 9.0, 1.2, 1.0, 0.9),
                c(8.0, 2.0, 11.0, 1.8, 0.8, 1.1),
                c(12.0, 1.1, 10.0, 2.4, 1.2, 1.0),
                c(9.5, 2.6, 8.5, 1.4, 0.95, 0.85),
                c(11.0, 1.9, 12.0, 2.1, 1.1, 1.2),
            ]),
            target: bg(2.0, 2.5, 2.0, 2.5),
            self_target: false,
        },
    ]
}

/// Gamma-driven pricing model with rates `λ = (4, 6)`, so `η = 6 > 1`.
pub fn gamma_driven() -> GammaSumModel {
    GammaSumModel::new(vec![
        GammaTerm {
            alpha: 4.0,
            p: 1.5,
            w: 1.0,
        },
        GammaTerm {
            alpha: 3.0,
            p: 2.0,
            w: 0.5,
        },
    ])
    .expect("grid models are valid")
}

/// Pricing inputs for [`gamma_driven`]: `S_0 = 1`, `r = 0.03`, `v = 0.01`, `T = 1`.
pub fn gamma_driven_inputs(strike: f64) -> PricingInputs {
    PricingInputs::new(1.0, strike, 0.03, 0.01, 0.0, 1.0).expect("grid inputs are valid")
}

/// Bilateral model with `min λ_j ≥ 2`, so `e^{T(1)}` has finite variance.
pub fn calibration_model() -> LinearCombinationModel {
    model(vec![c(3.0, 1.2, 4.0, 0.8, 1.0, 1.0), c(5.0, 0.7, 3.0, 1.1, 1.5, 0.9)])
}

/// Single-component normal-limit scaling at size `n`: `w = n^{-1/2}`,
/// `α = β = n`, `p = q = n³/2`, which has unit variance for every `n`.
pub fn normal_scaling(n: u32) -> LinearCombinationModel {
    let nf = n as f64;
    let w = nf.sqrt().recip();
    let shape = 0.5 * nf.powi(3);
    model(vec![c(nf, shape, nf, shape, w, w)])
}

/// The same parameters read as `n` identical components, whose variance is `n`.
pub fn normal_scaling_components(n: u32) -> LinearCombinationModel {
    let one = normal_scaling(n).components()[0];
    model(vec![one; n as usize])
}
