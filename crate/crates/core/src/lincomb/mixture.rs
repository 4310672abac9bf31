//! Gamma mixtures behind weighted sums of independent gamma variables.
//!
//! A sum `Σ w_j X_j` with `X_j ~ Ga(α_j, p_j)` equals in law `Ga(η, p + L)`
//! where `λ_j = α_j / w_j`, `η = max λ_j`, `p = Σ p_j` and the random shape
//! increment `L` has `P(L = k) = c γ_k` with
//! `c = Π (λ_j/η)^{p_j}`, `a_i = (1/i) Σ p_j (1 - λ_j/η)^i`,
//! `γ_0 = 1` and `γ_k = (1/k) Σ_{i=1}^k i a_i γ_{k-i}`.
//! A linear combination of bilateral gamma variables is the difference of
//! two such mixtures.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{ln_conf_hypergeom_f, ln_gamma, QuadratureSpec};

/// Default mass target of the truncated pmfs.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
/// Default hard cap on the number of pmf terms.
pub const DEFAULT_K_MAX: usize = 10_000;

/// Relative size below which an extra series term is treated as negligible.
const SERIES_REL_TOL: f64 = 1e-15;

/// `Ga(η, p + L)` with `L` from the recursion above, truncated at the first
/// support size that carries mass `1 - tail_tol`.
#[derive(Debug, Clone, Serialize)]
pub struct GammaMixture {
    rates: Vec<f64>,
    shapes: Vec<f64>,
    ratios: Vec<f64>,
    eta: f64,
    min_rate: f64,
    shape_total: f64,
    ln_c: f64,
    gamma_seq: Vec<f64>,
    pmf: Vec<f64>,
    tail_mass_bound: f64,
    tail_tol: f64,
    k_max: usize,
}

impl GammaMixture {
    /// Builds the mixture of `Σ X_j`, `X_j ~ Ga(rates[j], shapes[j])`.
    /// Weights are already folded into the rates (`λ_j = α_j / w_j`).
    pub fn build(rates: &[f64], shapes: &[f64], tail_tol: f64, k_max: usize) -> Result<Self> {
        if rates.is_empty() || rates.len() != shapes.len() {
            return Err(Error::InvalidModel("mixture needs matching, nonempty rates and shapes".into()));
        }
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::Domain(format!("tail_tol must lie in (0, 1), got {tail_tol}")));
        }
        if k_max < 1 {
            return Err(Error::Domain("k_max must be at least 1".into()));
        }
        for (j, (&r, &s)) in rates.iter().zip(shapes).enumerate() {
            crate::error::positive(j, "rate", r)?;
            crate::error::positive(j, "shape", s)?;
        }
        let eta = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min_rate = rates.iter().copied().fold(f64::INFINITY, f64::min);
        let ratios: Vec<f64> = rates.iter().map(|&l| 1.0 - l / eta).collect();
        let shape_total = shapes.iter().sum();
        let ln_c: f64 = rates.iter().zip(shapes).map(|(&l, &s)| s * (l / eta).ln()).sum();
        let c = ln_c.exp();
        if !(c > 0.0) {
            return Err(Error::TruncationFailure {
                terms: 0,
                mass: 0.0,
                tail_tol,
            });
        }

        let mut weighted = WeightedCoefficients::new(shapes, &ratios);
        let mut gamma_seq = vec![1.0];
        let mut pmf = vec![c];
        let mut mass = c;
        while mass < 1.0 - tail_tol {
            let k = pmf.len();
            if k > k_max {
                return Err(Error::TruncationFailure {
                    terms: k,
                    mass,
                    tail_tol,
                });
            }
            let g = weighted.next_term(&gamma_seq);
            let pk = weighted.next_term(&pmf);
            gamma_seq.push(g);
            pmf.push(pk);
            mass += pk;
        }
        let rounding = 4.0 * f64::EPSILON * pmf.len() as f64;
        Ok(Self {
            rates: rates.to_vec(),
            shapes: shapes.to_vec(),
            ratios,
            eta,
            min_rate,
            shape_total,
            ln_c,
            gamma_seq,
            pmf,
            tail_mass_bound: (1.0 - mass).max(0.0) + rounding,
            tail_tol,
            k_max,
        })
    }

    /// The mixture of the same sum with every shape multiplied by `t`.
    pub fn time_scaled(&self, t: f64) -> Result<Self> {
        crate::error::positive(0, "time", t)?;
        let shapes: Vec<f64> = self.shapes.iter().map(|s| s * t).collect();
        Self::build(&self.rates, &shapes, self.tail_tol, self.k_max)
    }

    /// A copy with `γ_k` (and with it `P(L=k)`) multiplied by `factor`, where
    /// `k` is 1 or the last stored index when the support is a single point.
    /// Fault-injection hook for the verification suite.
    pub fn with_perturbed_recursion(&self, factor: f64) -> Self {
        let mut out = self.clone();
        let k = 1.min(out.pmf.len() - 1);
        out.gamma_seq[k] *= factor;
        out.pmf[k] *= factor;
        out
    }

    /// Common rate `η = max λ_j`.
    pub fn rate(&self) -> f64 {
        self.eta
    }

    /// `α* = η / (1 + η) = max α_j / (w_j + α_j)`.
    pub fn alpha_star(&self) -> f64 {
        self.eta / (1.0 + self.eta)
    }

    /// Smallest component rate; the mgf exists strictly below it.
    pub fn min_rate(&self) -> f64 {
        self.min_rate
    }

    pub fn shape_total(&self) -> f64 {
        self.shape_total
    }

    /// `c = Π (λ_j/η)^{p_j} = P(L = 0)`.
    pub fn c(&self) -> f64 {
        self.ln_c.exp()
    }

    pub fn ln_c(&self) -> f64 {
        self.ln_c
    }

    /// `a_i = (1/i) Σ p_j (1 - λ_j/η)^i`.
    pub fn a_coefficient(&self, i: usize) -> f64 {
        assert!(i >= 1, "coefficients start at i = 1");
        self.shapes
            .iter()
            .zip(&self.ratios)
            .map(|(&s, &r)| s * r.powi(i as i32))
            .sum::<f64>()
            / i as f64
    }

    pub fn gamma_seq(&self) -> &[f64] {
        &self.gamma_seq
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn tail_mass_bound(&self) -> f64 {
        self.tail_mass_bound
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn shapes(&self) -> &[f64] {
        &self.shapes
    }

    /// Largest ratio `1 - λ_j/η`; `P(L = k)` decays like its `k`-th power.
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }

    /// `E[(1 - iz/η)^{-(p+L)}]` over the retained support.
    pub fn cf(&self, z: f64) -> Complex64 {
        let base = Complex64::new(1.0, -z / self.eta).inv();
        let mut power = base.ln().scale(self.shape_total).exp();
        let mut acc = Complex64::new(0.0, 0.0);
        for &pk in &self.pmf {
            acc += power * pk;
            power *= base;
        }
        acc
    }

    /// Density of the mixture `Σ_k P(L=k) Ga(η, p+k)` at `x > 0`.
    pub fn pdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        let ln_x = x.ln();
        let ln_eta = self.eta.ln();
        self.pmf
            .iter()
            .enumerate()
            .filter(|(_, &pk)| pk > 0.0)
            .map(|(k, &pk)| {
                let a = self.shape_total + k as f64;
                (pk.ln() + a * ln_eta + (a - 1.0) * ln_x - self.eta * x - ln_gamma(a)).exp()
            })
            .sum()
    }

    /// `Σ_k P(L=k) f(k)` summed until the remainder is negligible.
    ///
    /// `growth` bounds `f(k+1)/f(k)` for large `k`. Because `P(L=k)` decays
    /// geometrically with ratio [`max_ratio`](Self::max_ratio), the series
    /// diverges when `growth · max_ratio ≥ 1`; that case is reported as
    /// [`Error::Divergent`] before any summation. Past the stored support the
    /// pmf recursion is continued up to `k_max` terms.
    pub fn expectation<F: Fn(usize) -> f64>(&self, f: F, growth: f64, what: &str) -> Result<f64> {
        let decay = growth * self.max_ratio();
        if decay >= 1.0 {
            return Err(Error::Divergent(format!(
                "{what}: pmf ratio {} times growth {growth} is not below 1",
                self.max_ratio()
            )));
        }
        let mut sum = 0.0;
        for (k, &pk) in self.pmf.iter().enumerate() {
            sum += pk * f(k);
        }
        if self.max_ratio() == 0.0 {
            return Ok(sum);
        }
        let mut weighted = WeightedCoefficients::new(&self.shapes, &self.ratios);
        let mut probs = self.pmf.clone();
        let geometric = 1.0 / (1.0 - decay);
        let mut quiet = 0;
        while probs.len() <= self.k_max {
            let pk = weighted.next_term(&probs);
            let k = probs.len();
            probs.push(pk);
            let term = pk * f(k);
            sum += term;
            if (term * geometric).abs() <= SERIES_REL_TOL * sum.abs() {
                quiet += 1;
                if quiet >= 3 {
                    return Ok(sum);
                }
            } else {
                quiet = 0;
            }
        }
        Err(Error::TruncationFailure {
            terms: probs.len(),
            mass: probs.iter().sum(),
            tail_tol: self.tail_tol,
        })
    }

    /// `E[(η/(η - z))^{p+L}]` for `z < min λ_j`.
    pub fn mgf(&self, z: f64) -> Result<f64> {
        if !(z < self.min_rate) {
            return Err(Error::OutOfStrip {
                z,
                lower: f64::NEG_INFINITY,
                upper: self.min_rate,
            });
        }
        let rho = self.eta / (self.eta - z);
        let ln_rho = rho.ln();
        let base = (self.shape_total * ln_rho).exp();
        self.expectation(|k| base * (k as f64 * ln_rho).exp(), rho, "mixture mgf")
    }

    /// `E[G^i]` for `G ~ Ga(η, p + L)`: `E[(p+L)(p+L+1)…(p+L+i-1)] / η^i`.
    pub fn raw_moment(&self, i: u32) -> Result<f64> {
        if i == 0 {
            return Ok(1.0);
        }
        let p = self.shape_total;
        let rising = |k: usize| (0..i).map(|m| p + k as f64 + m as f64).product::<f64>();
        Ok(self.expectation(rising, 1.0, "mixture moment")? / self.eta.powi(i as i32))
    }
}

/// Running evaluation of `x_k = (1/k) Σ_{i=1}^k (i a_i) x_{k-i}`.
struct WeightedCoefficients<'a> {
    shapes: &'a [f64],
    ratios: &'a [f64],
    powers: Vec<f64>,
    ia: Vec<f64>,
}

impl<'a> WeightedCoefficients<'a> {
    fn new(shapes: &'a [f64], ratios: &'a [f64]) -> Self {
        Self {
            shapes,
            ratios,
            powers: vec![1.0; ratios.len()],
            ia: vec![0.0],
        }
    }

    /// `i a_i = Σ p_j r_j^i`, cached by index.
    fn ensure(&mut self, upto: usize) {
        while self.ia.len() <= upto {
            let mut v = 0.0;
            for (j, pw) in self.powers.iter_mut().enumerate() {
                *pw *= self.ratios[j];
                v += self.shapes[j] * *pw;
            }
            self.ia.push(v);
        }
    }

    fn next_term(&mut self, prev: &[f64]) -> f64 {
        let k = prev.len();
        self.ensure(k);
        let s: f64 = (1..=k).map(|i| self.ia[i] * prev[k - i]).sum();
        s / k as f64
    }
}

/// The mixture representation of `T_n`: `BG(η, p+L, ξ, q+M)` with independent
/// random shape increments `L` (positive parts) and `M` (negative parts).
#[derive(Debug, Clone, Serialize)]
pub struct MixtureRepresentation {
    pub(crate) positive: GammaMixture,
    pub(crate) negative: GammaMixture,
}

impl MixtureRepresentation {
    pub fn new(positive: GammaMixture, negative: GammaMixture) -> Self {
        Self { positive, negative }
    }

    pub fn positive(&self) -> &GammaMixture {
        &self.positive
    }

    pub fn negative(&self) -> &GammaMixture {
        &self.negative
    }

    pub fn alpha_star(&self) -> f64 {
        self.positive.alpha_star()
    }

    pub fn beta_star(&self) -> f64 {
        self.negative.alpha_star()
    }

    pub fn eta(&self) -> f64 {
        self.positive.rate()
    }

    pub fn xi(&self) -> f64 {
        self.negative.rate()
    }

    pub fn p_total(&self) -> f64 {
        self.positive.shape_total()
    }

    pub fn q_total(&self) -> f64 {
        self.negative.shape_total()
    }

    pub fn c_n(&self) -> f64 {
        self.positive.c()
    }

    pub fn d_n(&self) -> f64 {
        self.negative.c()
    }

    pub fn gamma_seq(&self) -> &[f64] {
        self.positive.gamma_seq()
    }

    pub fn delta_seq(&self) -> &[f64] {
        self.negative.gamma_seq()
    }

    pub fn pmf_l(&self) -> &[f64] {
        self.positive.pmf()
    }

    pub fn pmf_m(&self) -> &[f64] {
        self.negative.pmf()
    }

    /// Upper bound on the mass missing from either truncated pmf.
    pub fn tail_mass_bound(&self) -> f64 {
        self.positive.tail_mass_bound().max(self.negative.tail_mass_bound())
    }

    /// The representation of the same combination with all shapes times `t`.
    pub fn time_scaled(&self, t: f64) -> Result<Self> {
        Ok(Self::new(self.positive.time_scaled(t)?, self.negative.time_scaled(t)?))
    }

    /// `Σ_j Σ_k P(L=j) P(M=k) (1 - iz/η)^{-(p+j)} (1 + iz/ξ)^{-(q+k)}`.
    pub fn cf(&self, z: f64) -> Complex64 {
        self.positive.cf(z) * self.negative.cf(-z)
    }

    /// Strip `(lower, upper)` on which the mgf is finite.
    pub fn strip(&self) -> (f64, f64) {
        (-self.negative.min_rate(), self.positive.min_rate())
    }

    /// `E[(η/(η-z))^{p+L}] · E[(ξ/(ξ+z))^{q+M}]`.
    pub fn mgf(&self, z: f64) -> Result<f64> {
        let (lower, upper) = self.strip();
        if !(z > lower && z < upper) {
            return Err(Error::OutOfStrip { z, lower, upper });
        }
        Ok(self.positive.mgf(z)? * self.negative.mgf(-z)?)
    }

    /// `E[T^k] = Σ_i C(k,i) (-1)^{k-i} E[G_+^i] E[G_-^{k-i}]`.
    pub fn moment(&self, k: u32) -> Result<f64> {
        if k == 0 {
            return Ok(1.0);
        }
        let mut total = 0.0;
        let mut binom = 1.0;
        for i in 0..=k {
            let sign = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
            total += binom * sign * self.positive.raw_moment(i)? * self.negative.raw_moment(k - i)?;
            binom = binom * (k - i) as f64 / (i + 1) as f64;
        }
        Ok(total)
    }

    /// Density by the double series of `BG(η, p+j, ξ, q+k)` densities, each
    /// written through the confluent hypergeometric integral `F`:
    /// `η^a ξ^b/(Γa Γb) e^{-ηx} x^{a+b-1} Γ(b) F(b, a+b, (η+ξ)x)` for `x > 0`
    /// and `η^a ξ^b/(Γa Γb) e^{ξx} |x|^{a+b-1} Γ(a) F(a, a+b, (η+ξ)|x|)` for
    /// `x < 0`, with `a = p+j`, `b = q+k`.
    ///
    /// Terms whose weight times the density bound falls below
    /// `abs_tol · 1e-3` are skipped.
    pub fn pdf_series(&self, x: f64, spec: &QuadratureSpec) -> Result<f64> {
        spec.validate()?;
        if x == 0.0 {
            return Err(Error::SingularPoint(0.0));
        }
        if !x.is_finite() {
            return Err(Error::Domain(format!("density argument must be finite, got {x}")));
        }
        let (eta, xi) = (self.eta(), self.xi());
        let (p, q) = (self.p_total(), self.q_total());
        let ax = x.abs();
        let (ln_eta, ln_xi, ln_ax) = (eta.ln(), xi.ln(), ax.ln());
        let arg = (eta + xi) * ax;
        let skip = spec.abs_tol * 1e-3;
        let sup_pos: Vec<f64> = (0..self.pmf_l().len()).map(|j| gamma_pdf_sup(eta, p + j as f64)).collect();
        let mut total = 0.0;
        for (j, &pj) in self.pmf_l().iter().enumerate() {
            if pj == 0.0 {
                continue;
            }
            let a = p + j as f64;
            for (k, &qk) in self.pmf_m().iter().enumerate() {
                let b = q + k as f64;
                let bound = sup_pos[j].min(gamma_pdf_sup(xi, b));
                if pj * qk * bound < skip {
                    continue;
                }
                let common = a * ln_eta + b * ln_xi - ln_gamma(a) - ln_gamma(b) + (a + b - 1.0) * ln_ax;
                let ln_term = if x > 0.0 {
                    common - eta * ax + ln_gamma(b) + ln_conf_hypergeom_f(b, a + b, arg, spec)?
                } else {
                    common - xi * ax + ln_gamma(a) + ln_conf_hypergeom_f(a, a + b, arg, spec)?
                };
                total += pj * qk * ln_term.exp();
            }
        }
        Ok(total)
    }

    /// Density of the positive part alone, `Σ_j c γ_j Ga(η, p+j)(x)`: the
    /// limit of `T_n` when every negative-part rate grows without bound.
    pub fn gamma_limit_pdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!("gamma-limit density needs x > 0, got {x}")));
        }
        Ok(self.positive.pdf(x))
    }
}

/// `sup_x` of the `Ga(rate, shape)` density; infinite for shape ≤ 1 except
/// the exponential case.
fn gamma_pdf_sup(rate: f64, shape: f64) -> f64 {
    if shape < 1.0 {
        f64::INFINITY
    } else if shape == 1.0 {
        rate
    } else {
        let m = shape - 1.0;
        (rate.ln() + m * m.ln() - m - ln_gamma(shape)).exp()
    }
}
