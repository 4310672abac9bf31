//! Explicit approximation bounds for `T_n`.
//!
//! The `d₃` bounds are deterministic functions of the parameters. The
//! two-sum and compound Poisson bounds carry unspecified universal constants;
//! with the default value 1 they describe the shape of the bound only.

use serde::{Deserialize, Serialize};

use crate::bg::BgParams;
use crate::error::{Error, Result};
use crate::lincomb::{GammaSumModel, LinearCombinationModel};

/// Universal constants `c` (compound Poisson) and `c₁`, `c₂` (two sums).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Default for BoundConstants {
    fn default() -> Self {
        Self {
            c: 1.0,
            c1: 1.0,
            c2: 1.0,
        }
    }
}

impl BoundConstants {
    pub fn new(c: f64, c1: f64, c2: f64) -> Result<Self> {
        let k = Self { c, c1, c2 };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c", self.c), ("c1", self.c1), ("c2", self.c2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("bound constant {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// True when every constant is the placeholder 1, so values are bound shapes.
    pub fn is_default(&self) -> bool {
        *self == Self::default()
    }
}

/// `g_n = Π α_j β_j`, `h_n = g_n Σ (w1_j w2_j + |w1_j β_j - w2_j α_j|)/(α_j β_j)`
/// and `κ_n = g_n/(g_n - h_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaInputs {
    pub g_n: f64,
    pub h_n: f64,
    pub kappa_n: f64,
}

/// [`KappaInputs`] of a model, or [`Error::KappaUndefined`] when `g_n <= h_n`.
pub fn kappa_inputs(model: &LinearCombinationModel) -> Result<KappaInputs> {
    let comps = model.components();
    let g_n: f64 = comps.iter().map(|c| c.alpha * c.beta).product();
    // κ depends only on h_n/g_n, which stays finite when g_n overflows.
    let ratio: f64 = comps
        .iter()
        .map(|c| (c.w1 * c.w2 + (c.w1 * c.beta - c.w2 * c.alpha).abs()) / (c.alpha * c.beta))
        .sum();
    let h_n = g_n * ratio;
    if ratio >= 1.0 {
        return Err(Error::KappaUndefined { g_n, h_n });
    }
    Ok(KappaInputs {
        g_n,
        h_n,
        kappa_n: 1.0 / (1.0 - ratio),
    })
}

/// A `d₃` bound together with its four constituent terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct D3Bound {
    pub kappa: KappaInputs,
    pub mean_tn: f64,
    pub mean_target: f64,
    /// Scale, asymmetry, shape and mean terms, in that order.
    pub terms: [f64; 4],
}

impl D3Bound {
    pub fn value(&self) -> f64 {
        self.terms.iter().sum()
    }
}

/// Target-side quantities entering the four terms.
struct D3Target {
    inv_ab: f64,
    rate_diff: f64,
    shape_over_ab: f64,
    mean: f64,
}

fn d3_bound(model: &LinearCombinationModel, target: D3Target) -> Result<D3Bound> {
    let kappa = kappa_inputs(model)?;
    let k = kappa.kappa_n;
    let mean_tn = model.cumulant(1);
    let e = mean_tn.abs();
    let mut scale = 0.0;
    let mut asym = 0.0;
    let mut shape = 0.0;
    for c in model.components() {
        let ab = c.alpha * c.beta;
        scale += c.w1 * c.w2 / ab;
        asym += c.w1 / c.alpha - c.w2 / c.beta;
        shape += c.w1 * c.w2 * (c.p + c.q) / ab;
    }
    let terms = [
        (2.0 + e / 3.0) * k * (scale - target.inv_ab).abs(),
        (2.0 + e / 2.0) * k * (asym - target.rate_diff).abs(),
        0.5 * k * (shape - target.shape_over_ab).abs(),
        k * (mean_tn - target.mean).abs(),
    ];
    Ok(D3Bound {
        kappa,
        mean_tn,
        mean_target: target.mean,
        terms,
    })
}

/// Bound on `d₃(T_n, Z)` for `Z ~ BG(α, p, β, q)`.
pub fn bound_d3_bg(model: &LinearCombinationModel, target: &BgParams) -> Result<D3Bound> {
    target.validate()?;
    d3_bound(
        model,
        D3Target {
            inv_ab: 1.0 / (target.alpha * target.beta),
            rate_diff: 1.0 / target.alpha - 1.0 / target.beta,
            shape_over_ab: (target.p + target.q) / (target.alpha * target.beta),
            mean: target.cumulant(1),
        },
    )
}

/// Bound on `d₃(T_n, Z)` for the variance gamma target `BG(α, p, β, p)`.
pub fn bound_d3_vg(model: &LinearCombinationModel, alpha: f64, beta: f64, p: f64) -> Result<D3Bound> {
    bound_d3_bg(model, &BgParams::variance_gamma(alpha, beta, p)?)
}

/// Bound on `d₃(T_n, N(0, σ²))`, the large-shape limit of the symmetric BG bound.
pub fn bound_d3_normal(model: &LinearCombinationModel, sigma: f64) -> Result<D3Bound> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    d3_bound(
        model,
        D3Target {
            inv_ab: 0.0,
            rate_diff: 0.0,
            shape_over_ab: sigma * sigma,
            mean: 0.0,
        },
    )
}

/// Wasserstein bound between two models that differ only in their weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoSumBound {
    /// `c₁ Σ p_j/√(2α_j) · |w1_j - π1_j|/√(w1_j + π1_j)`
    pub positive: f64,
    /// `c₂ Σ q_j/√(2β_j) · |w2_j - π2_j|/√(w2_j + π2_j)`
    pub negative: f64,
}

impl TwoSumBound {
    pub fn value(&self) -> f64 {
        self.positive + self.negative
    }
}

fn weight_gap(shape: f64, rate: f64, w: f64, pi: f64) -> f64 {
    shape / (2.0 * rate).sqrt() * (w - pi).abs() / (w + pi).sqrt()
}

/// Bound on `d_W(T_n^{(1)}, T_n^{(2)})` for `model_w` and `model_pi`.
pub fn bound_two_sums(
    model_w: &LinearCombinationModel,
    model_pi: &LinearCombinationModel,
    constants: &BoundConstants,
) -> Result<TwoSumBound> {
    constants.validate()?;
    if !model_w.same_laws(model_pi) {
        return Err(Error::ModelMismatch(
            "both models need the same components (alpha, p, beta, q) in the same order".into(),
        ));
    }
    let mut positive = 0.0;
    let mut negative = 0.0;
    for (a, b) in model_w.components().iter().zip(model_pi.components()) {
        positive += weight_gap(a.p, a.alpha, a.w1, b.w1);
        negative += weight_gap(a.q, a.beta, a.w2, b.w2);
    }
    Ok(TwoSumBound {
        positive: constants.c1 * positive,
        negative: constants.c2 * negative,
    })
}

/// The two-sum bound for gamma-driven sums, where only the positive part survives.
pub fn bound_two_sums_gamma(
    model_w: &GammaSumModel,
    model_pi: &GammaSumModel,
    constants: &BoundConstants,
) -> Result<f64> {
    constants.validate()?;
    let (a, b) = (model_w.terms(), model_pi.terms());
    if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.alpha != y.alpha || x.p != y.p) {
        return Err(Error::ModelMismatch(
            "both sums need the same terms (alpha, p) in the same order".into(),
        ));
    }
    Ok(constants.c1 * a.iter().zip(b).map(|(x, y)| weight_gap(x.p, x.alpha, x.w, y.w)).sum::<f64>())
}

/// `(|C₁(T_n)| + |C₂(T_n)|)^{2/5}`, the model factor of the compound Poisson bound.
pub fn compound_poisson_scale(model: &LinearCombinationModel) -> f64 {
    (model.cumulant(1).abs() + model.cumulant(2).abs()).powf(0.4)
}

/// Bound on `d_K(Z_m, T_n)`, `c (|C₁| + |C₂|)^{2/5} m^{-1/5}`.
pub fn bound_compound_poisson_k(model: &LinearCombinationModel, m: u32, constants: &BoundConstants) -> Result<f64> {
    constants.validate()?;
    if m == 0 {
        return Err(Error::Domain("compound Poisson index m must be at least 1".into()));
    }
    Ok(constants.c * compound_poisson_scale(model) * (m as f64).powf(-0.2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomb::{Component, GammaTerm};

    fn single(alpha: f64, p: f64, beta: f64, q: f64, w1: f64, w2: f64) -> LinearCombinationModel {
        LinearCombinationModel::new(vec![Component::new(alpha, p, beta, q, w1, w2)]).unwrap()
    }

    #[test]
    fn kappa_examples() {
        let k = kappa_inputs(&single(2.0, 1.0, 2.0, 1.0, 1.0, 1.0)).unwrap();
        assert_eq!((k.g_n, k.h_n), (4.0, 1.0));
        assert!((k.kappa_n - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            kappa_inputs(&single(1.0, 1.0, 1.0, 1.0, 1.0, 1.0)),
            Err(Error::KappaUndefined { g_n: 1.0, h_n: 1.0 })
        );
        let k = kappa_inputs(&single(2.0, 1.0, 3.0, 1.0, 1.0, 1.0)).unwrap();
        assert_eq!((k.g_n, k.h_n), (6.0, 2.0));
        assert!((k.kappa_n - 1.5).abs() < 1e-15);
    }

    #[test]
    fn self_target_bound_vanishes() {
        let m = single(2.5, 0.7, 3.0, 1.9, 1.0, 1.0);
        let b = bound_d3_bg(&m, &m.components()[0].bg()).unwrap();
        assert_eq!(b.terms, [0.0; 4]);
        assert_eq!(b.value(), 0.0);
    }

    #[test]
    fn two_component_against_hand_evaluation() {
        let m = LinearCombinationModel::new(vec![
            Component::new(3.0, 1.0, 4.0, 2.0, 0.5, 0.5),
            Component::new(5.0, 2.0, 6.0, 1.0, 1.0, 0.5),
        ])
        .unwrap();
        let target = BgParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        // h/g = (0.25 + |2 - 1.5|)/12 + (0.5 + |6 - 2.5|)/30
        let ratio = 0.75 / 12.0 + 4.0 / 30.0;
        let kappa = 1.0 / (1.0 - ratio);
        let mean = 1.0 * 0.5 / 3.0 - 2.0 * 0.5 / 4.0 + 2.0 * 1.0 / 5.0 - 1.0 * 0.5 / 6.0;
        let e = f64::abs(mean);
        let expected = [
            (2.0 + e / 3.0) * kappa * f64::abs(0.25 / 12.0 + 0.5 / 30.0 - 1.0),
            (2.0 + e / 2.0) * kappa * f64::abs(0.5 / 3.0 - 0.5 / 4.0 + 1.0 / 5.0 - 0.5 / 6.0),
            0.5 * kappa * f64::abs(0.25 * 3.0 / 12.0 + 0.5 * 3.0 / 30.0 - 2.0),
            kappa * e,
        ];
        let b = bound_d3_bg(&m, &target).unwrap();
        for (got, want) in b.terms.iter().zip(expected) {
            assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        }
    }

    #[test]
    fn vg_and_normal_reductions() {
        let m = LinearCombinationModel::new(vec![
            Component::new(3.0, 1.0, 4.0, 2.0, 0.5, 0.5),
            Component::new(5.0, 2.0, 6.0, 1.0, 1.0, 0.5),
        ])
        .unwrap();
        let vg = bound_d3_vg(&m, 1.0, 1.0, 1.0).unwrap();
        let bg = bound_d3_bg(&m, &BgParams::new(1.0, 1.0, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!(vg, bg);
        assert!(vg.value() > 0.0 && vg.value().is_finite());

        // BG(2, 2, 2, 2) has variance 1 and zero mean: only the scale term survives.
        let s = single(2.0, 2.0, 2.0, 2.0, 1.0, 1.0);
        let n = bound_d3_normal(&s, 1.0).unwrap();
        assert_eq!(n.terms[1], 0.0);
        assert_eq!(n.terms[2], 0.0);
        assert_eq!(n.terms[3], 0.0);
        assert!((n.terms[0] - 2.0 * (4.0 / 3.0) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn normal_bound_decreases_under_single_component_scaling() {
        let mut last = f64::INFINITY;
        for n in [4.0f64, 16.0, 64.0] {
            let m = single(n, n.powi(3) / 2.0, n, n.powi(3) / 2.0, n.powf(-0.5), n.powf(-0.5));
            let v = bound_d3_normal(&m, 1.0).unwrap().value();
            assert!((v - 2.0 / (n.powi(3) - 1.0)).abs() < 1e-14);
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn two_sum_examples() {
        let k = BoundConstants::default();
        let a = single(2.0, 1.0, 1.5, 0.5, 2.0, 1.0);
        let b = single(2.0, 1.0, 1.5, 0.5, 1.0, 1.0);
        assert_eq!(bound_two_sums(&a, &a, &k).unwrap().value(), 0.0);
        let v = bound_two_sums(&a, &b, &k).unwrap();
        assert!((v.positive - 0.5 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(v.negative, 0.0);
        let other = single(2.1, 1.0, 1.5, 0.5, 1.0, 1.0);
        assert!(matches!(bound_two_sums(&a, &other, &k), Err(Error::ModelMismatch(_))));

        let s1 = GammaSumModel::new(vec![GammaTerm { alpha: 2.0, p: 1.0, w: 2.0 }]).unwrap();
        let s2 = GammaSumModel::new(vec![GammaTerm { alpha: 2.0, p: 1.0, w: 1.0 }]).unwrap();
        assert!((bound_two_sums_gamma(&s1, &s2, &k).unwrap() - v.positive).abs() < 1e-15);
    }

    #[test]
    fn compound_poisson_rate_law() {
        let k = BoundConstants::default();
        let m = single(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
        assert!((bound_compound_poisson_k(&m, 1, &k).unwrap() - 2f64.powf(0.4)).abs() < 1e-15);
        let ratio = bound_compound_poisson_k(&m, 32, &k).unwrap() / bound_compound_poisson_k(&m, 1, &k).unwrap();
        assert!((ratio - 0.5).abs() < 1e-15);
        let mut last = f64::INFINITY;
        for mm in 1..200 {
            let v = bound_compound_poisson_k(&m, mm, &k).unwrap();
            assert!(v < last);
            last = v;
        }
    }
}
