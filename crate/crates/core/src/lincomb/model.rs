//! Linear combinations `T_n = Σ (w1_j X_j - w2_j Y_j)` of independent
//! bilateral gamma variables, and their gamma-only special case.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::inversion::{invert_cf, InversionResult, InversionTarget};
use super::law::{Law, LawSampler};
use super::mixture::{GammaMixture, MixtureRepresentation};
use crate::bg::{levy_side_density, BgParams};
use crate::error::{positive, Error, Result};
use crate::special::{ln_gamma, QuadratureSpec};

/// One weighted bilateral gamma term `w1 X - w2 Y`, `X ~ Ga(α, p)`, `Y ~ Ga(β, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub alpha: f64,
    pub p: f64,
    pub beta: f64,
    pub q: f64,
    pub w1: f64,
    pub w2: f64,
}

impl Component {
    pub fn new(alpha: f64, p: f64, beta: f64, q: f64, w1: f64, w2: f64) -> Self {
        Self { alpha, p, beta, q, w1, w2 }
    }

    /// Effective positive-part rate `λ = α / w1`.
    pub fn lambda(&self) -> f64 {
        self.alpha / self.w1
    }

    /// Effective negative-part rate `μ = β / w2`.
    pub fn mu(&self) -> f64 {
        self.beta / self.w2
    }

    pub fn bg(&self) -> BgParams {
        BgParams {
            alpha: self.alpha,
            p: self.p,
            beta: self.beta,
            q: self.q,
        }
    }

    fn validate(&self, index: usize) -> Result<()> {
        positive(index, "alpha", self.alpha)?;
        positive(index, "p", self.p)?;
        positive(index, "beta", self.beta)?;
        positive(index, "q", self.q)?;
        positive(index, "w1", self.w1)?;
        positive(index, "w2", self.w2)?;
        Ok(())
    }
}

/// `T_n = Σ_j (w1_j X_j - w2_j Y_j)` with independent `X_j ~ Ga(α_j, p_j)`
/// and `Y_j ~ Ga(β_j, q_j)`.
///
/// Deserializes from `{"components": [...]}` through [`LinearCombinationModel::new`],
/// so a parsed model is always valid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel")]
pub struct LinearCombinationModel {
    components: Vec<Component>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    components: Vec<Component>,
}

impl TryFrom<RawModel> for LinearCombinationModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        Self::new(raw.components)
    }
}

impl LinearCombinationModel {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidModel("a model needs at least one component".into()));
        }
        for (i, c) in components.iter().enumerate() {
            c.validate(i)?;
        }
        Ok(Self { components })
    }

    /// `w1 X - w2 Y` for a single bilateral gamma law.
    pub fn single(params: BgParams, w1: f64, w2: f64) -> Result<Self> {
        Self::new(vec![Component::new(params.alpha, params.p, params.beta, params.q, w1, w2)])
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    /// Product form `Π (1 - iz w1_j/α_j)^{-p_j} (1 + iz w2_j/β_j)^{-q_j}`.
    pub fn cf(&self, z: f64) -> Complex64 {
        let mut ln = Complex64::new(0.0, 0.0);
        for c in &self.components {
            ln -= Complex64::new(1.0, -z / c.lambda()).ln() * c.p;
            ln -= Complex64::new(1.0, z / c.mu()).ln() * c.q;
        }
        ln.exp()
    }

    /// Interval `(-min μ_j, min λ_j)` on which the mgf is finite.
    pub fn strip(&self) -> (f64, f64) {
        let upper = self.components.iter().map(Component::lambda).fold(f64::INFINITY, f64::min);
        let lower = self.components.iter().map(Component::mu).fold(f64::INFINITY, f64::min);
        (-lower, upper)
    }

    /// `ln E[e^{z T_n}] = Σ p_j ln(λ_j/(λ_j - z)) + q_j ln(μ_j/(μ_j + z))`.
    pub fn ln_mgf(&self, z: f64) -> Result<f64> {
        let (lower, upper) = self.strip();
        if !(z > lower && z < upper) {
            return Err(Error::OutOfStrip { z, lower, upper });
        }
        Ok(self
            .components
            .iter()
            .map(|c| -c.p * (1.0 - z / c.lambda()).ln() - c.q * (1.0 + z / c.mu()).ln())
            .sum())
    }

    pub fn mgf(&self, z: f64) -> Result<f64> {
        self.ln_mgf(z).map(f64::exp)
    }

    /// `ν(u) = (1/|u|) Σ_j p_j e^{-λ_j u}` for `u > 0`, `(1/|u|) Σ_j q_j e^{-μ_j |u|}` for `u < 0`.
    pub fn levy_density(&self, u: f64) -> Result<f64> {
        let pos: Vec<(f64, f64)> = self.components.iter().map(|c| (c.lambda(), c.p)).collect();
        let neg: Vec<(f64, f64)> = self.components.iter().map(|c| (c.mu(), c.q)).collect();
        levy_side_density(u, &pos, &neg)
    }

    /// `C_k = (k-1)! Σ_j [p_j (w1_j/α_j)^k + (-1)^k q_j (w2_j/β_j)^k]`.
    pub fn cumulant(&self, k: u32) -> f64 {
        assert!(k >= 1, "cumulant order starts at 1");
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let fact = ln_gamma(k as f64).exp();
        fact * self
            .components
            .iter()
            .map(|c| c.p * c.lambda().powi(-(k as i32)) + sign * c.q * c.mu().powi(-(k as i32)))
            .sum::<f64>()
    }

    pub fn mean(&self) -> f64 {
        self.cumulant(1)
    }

    pub fn variance(&self) -> f64 {
        self.cumulant(2)
    }

    pub fn total_shape(&self) -> f64 {
        self.components.iter().map(|c| c.p + c.q).sum()
    }

    /// `T_n(t)`: the same combination with every shape multiplied by `t`.
    pub fn time_scaled(&self, t: f64) -> Result<Self> {
        positive(0, "time", t)?;
        Self::new(
            self.components
                .iter()
                .map(|c| Component { p: c.p * t, q: c.q * t, ..*c })
                .collect(),
        )
    }

    /// Esscher transform by `θ`: each `Ga(α_j, p_j)` becomes `Ga(α_j - θ w1_j, p_j)`
    /// and each `Ga(β_j, q_j)` becomes `Ga(β_j + θ w2_j, q_j)`.
    pub fn tilted(&self, theta: f64) -> Result<Self> {
        let (lower, upper) = self.strip();
        if !(theta > lower && theta < upper) {
            return Err(Error::OutOfStrip { z: theta, lower, upper });
        }
        Self::new(
            self.components
                .iter()
                .map(|c| Component {
                    alpha: c.alpha - theta * c.w1,
                    beta: c.beta + theta * c.w2,
                    ..*c
                })
                .collect(),
        )
    }

    /// Positive parts only, `Σ w1_j X_j`.
    pub fn positive_part(&self) -> GammaSumModel {
        GammaSumModel {
            terms: self
                .components
                .iter()
                .map(|c| GammaTerm { alpha: c.alpha, p: c.p, w: c.w1 })
                .collect(),
        }
    }

    /// Negative parts only, `Σ w2_j Y_j`.
    pub fn negative_part(&self) -> GammaSumModel {
        GammaSumModel {
            terms: self
                .components
                .iter()
                .map(|c| GammaTerm { alpha: c.beta, p: c.q, w: c.w2 })
                .collect(),
        }
    }

    /// Builds the mixture representation with pmfs carrying mass `1 - tail_tol`.
    pub fn mixture(&self, tail_tol: f64, k_max: usize) -> Result<MixtureRepresentation> {
        Ok(MixtureRepresentation::new(
            self.positive_part().mixture(tail_tol, k_max)?,
            self.negative_part().mixture(tail_tol, k_max)?,
        ))
    }

    pub fn pdf_fourier(&self, x: f64, spec: &QuadratureSpec) -> Result<f64> {
        Ok(invert_cf(self, x, spec)?.value)
    }

    /// Inverted density together with the raw (unclamped) quadrature value.
    pub fn pdf_fourier_detailed(&self, x: f64, spec: &QuadratureSpec) -> Result<InversionResult> {
        invert_cf(self, x, spec)
    }

    /// Whether `T_n` and `-T_n` have the same law component by component.
    pub fn is_symmetric(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.alpha == c.beta && c.p == c.q && c.w1 == c.w2)
    }

    /// Whether two models differ only in their weights.
    pub fn same_laws(&self, other: &Self) -> bool {
        self.n() == other.n()
            && self.components.iter().zip(&other.components).all(|(a, b)| {
                a.alpha == b.alpha && a.p == b.p && a.beta == b.beta && a.q == b.q
            })
    }
}

impl InversionTarget for LinearCombinationModel {
    fn cf(&self, z: f64) -> Complex64 {
        LinearCombinationModel::cf(self, z)
    }

    fn total_shape(&self) -> f64 {
        LinearCombinationModel::total_shape(self)
    }

    fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }
}

impl Law for LinearCombinationModel {
    fn ln_mgf(&self, z: f64) -> Result<f64> {
        LinearCombinationModel::ln_mgf(self, z)
    }

    fn strip(&self) -> (f64, f64) {
        LinearCombinationModel::strip(self)
    }

    fn time_scaled(&self, t: f64) -> Result<Self> {
        LinearCombinationModel::time_scaled(self, t)
    }

    fn tilted(&self, theta: f64) -> Result<Self> {
        LinearCombinationModel::tilted(self, theta)
    }

    fn cumulant(&self, k: u32) -> f64 {
        LinearCombinationModel::cumulant(self, k)
    }

    fn sampler(&self) -> Result<LawSampler> {
        LawSampler::new(
            self.components.iter().map(|c| (c.p, c.alpha, c.w1)),
            self.components.iter().map(|c| (c.q, c.beta, c.w2)),
        )
    }
}

/// One weighted gamma term `w X`, `X ~ Ga(α, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaTerm {
    pub alpha: f64,
    pub p: f64,
    pub w: f64,
}

impl GammaTerm {
    pub fn lambda(&self) -> f64 {
        self.alpha / self.w
    }
}

/// `S_n = Σ_j w_j X_j`, the gamma-driven special case without negative parts.
///
/// Deserializes from `{"terms": [...]}` through [`GammaSumModel::new`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGammaSum")]
pub struct GammaSumModel {
    terms: Vec<GammaTerm>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGammaSum {
    terms: Vec<GammaTerm>,
}

impl TryFrom<RawGammaSum> for GammaSumModel {
    type Error = Error;

    fn try_from(raw: RawGammaSum) -> Result<Self> {
        Self::new(raw.terms)
    }
}

impl GammaSumModel {
    pub fn new(terms: Vec<GammaTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidModel("a model needs at least one component".into()));
        }
        for (i, t) in terms.iter().enumerate() {
            positive(i, "alpha", t.alpha)?;
            positive(i, "p", t.p)?;
            positive(i, "w1", t.w)?;
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[GammaTerm] {
        &self.terms
    }

    pub fn cf(&self, z: f64) -> Complex64 {
        let mut ln = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            ln -= Complex64::new(1.0, -z / t.lambda()).ln() * t.p;
        }
        ln.exp()
    }

    pub fn strip(&self) -> (f64, f64) {
        let upper = self.terms.iter().map(GammaTerm::lambda).fold(f64::INFINITY, f64::min);
        (f64::NEG_INFINITY, upper)
    }

    pub fn ln_mgf(&self, z: f64) -> Result<f64> {
        let (lower, upper) = self.strip();
        if !(z < upper) {
            return Err(Error::OutOfStrip { z, lower, upper });
        }
        Ok(self.terms.iter().map(|t| -t.p * (1.0 - z / t.lambda()).ln()).sum())
    }

    /// `C_k = (k-1)! Σ_j p_j (w_j/α_j)^k`.
    pub fn cumulant(&self, k: u32) -> f64 {
        assert!(k >= 1, "cumulant order starts at 1");
        ln_gamma(k as f64).exp()
            * self.terms.iter().map(|t| t.p * t.lambda().powi(-(k as i32))).sum::<f64>()
    }

    pub fn mean(&self) -> f64 {
        self.cumulant(1)
    }

    pub fn variance(&self) -> f64 {
        self.cumulant(2)
    }

    pub fn total_shape(&self) -> f64 {
        self.terms.iter().map(|t| t.p).sum()
    }

    pub fn time_scaled(&self, t: f64) -> Result<Self> {
        positive(0, "time", t)?;
        Self::new(self.terms.iter().map(|g| GammaTerm { p: g.p * t, ..*g }).collect())
    }

    /// Esscher transform by `θ < min λ_j`: each `Ga(α_j, p_j)` becomes `Ga(α_j - θ w_j, p_j)`.
    pub fn tilted(&self, theta: f64) -> Result<Self> {
        let (lower, upper) = self.strip();
        if !(theta < upper) {
            return Err(Error::OutOfStrip { z: theta, lower, upper });
        }
        Self::new(
            self.terms
                .iter()
                .map(|g| GammaTerm {
                    alpha: g.alpha - theta * g.w,
                    ..*g
                })
                .collect(),
        )
    }

    pub fn mixture(&self, tail_tol: f64, k_max: usize) -> Result<GammaMixture> {
        let rates: Vec<f64> = self.terms.iter().map(GammaTerm::lambda).collect();
        let shapes: Vec<f64> = self.terms.iter().map(|t| t.p).collect();
        GammaMixture::build(&rates, &shapes, tail_tol, k_max)
    }

    pub fn pdf_fourier(&self, x: f64, spec: &QuadratureSpec) -> Result<f64> {
        Ok(invert_cf(self, x, spec)?.value)
    }
}

impl InversionTarget for GammaSumModel {
    fn cf(&self, z: f64) -> Complex64 {
        GammaSumModel::cf(self, z)
    }

    fn total_shape(&self) -> f64 {
        GammaSumModel::total_shape(self)
    }

    fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }
}

impl Law for GammaSumModel {
    fn ln_mgf(&self, z: f64) -> Result<f64> {
        GammaSumModel::ln_mgf(self, z)
    }

    fn strip(&self) -> (f64, f64) {
        GammaSumModel::strip(self)
    }

    fn time_scaled(&self, t: f64) -> Result<Self> {
        GammaSumModel::time_scaled(self, t)
    }

    fn tilted(&self, theta: f64) -> Result<Self> {
        GammaSumModel::tilted(self, theta)
    }

    fn cumulant(&self, k: u32) -> f64 {
        GammaSumModel::cumulant(self, k)
    }

    fn sampler(&self) -> Result<LawSampler> {
        LawSampler::new(self.terms.iter().map(|t| (t.p, t.alpha, t.w)), std::iter::empty())
    }
}
