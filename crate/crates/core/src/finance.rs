//! Exponential Lévy stock model `S_t = S_0 e^{T(t)}` driven by the process
//! with `T(1) ~ T_n`: martingale condition and European call prices.

use std::cell::RefCell;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lincomb::{GammaMixture, Law, LinearCombinationModel, MixtureRepresentation};
use crate::sampling::{mean_std_error, sample_law, sample_paths, RandomStream};
use crate::special::{integrate_with_points, regularized_upper_incomplete_gamma, QuadratureSpec};

/// Market data and contract terms of a European call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PricingInputs {
    pub s0: f64,
    pub strike: f64,
    pub rate: f64,
    #[serde(default)]
    pub dividend: f64,
    #[serde(default)]
    pub t_now: f64,
    pub maturity: f64,
    /// Conditioning value `S_t = s`; defaults to `s0` when `t_now = 0`.
    #[serde(default)]
    pub spot_at_t: Option<f64>,
    /// Time used in the discount factor `e^{-r·horizon}`; defaults to the maturity.
    #[serde(default)]
    pub discount_horizon: Option<f64>,
}

impl PricingInputs {
    pub fn new(s0: f64, strike: f64, rate: f64, dividend: f64, t_now: f64, maturity: f64) -> Result<Self> {
        let inputs = Self {
            s0,
            strike,
            rate,
            dividend,
            t_now,
            maturity,
            spot_at_t: None,
            discount_horizon: None,
        };
        inputs.validate()?;
        Ok(inputs)
    }

    pub fn validate(&self) -> Result<()> {
        let domain = |msg: String| Err(Error::Domain(msg));
        if !(self.s0 > 0.0 && self.s0.is_finite()) {
            return domain(format!("s0 must be positive, got {}", self.s0));
        }
        if !(self.strike > 0.0 && self.strike.is_finite()) {
            return domain(format!("strike must be positive, got {}", self.strike));
        }
        if !(self.dividend >= 0.0 && self.rate >= self.dividend && self.rate.is_finite()) {
            return domain(format!(
                "rates need rate >= dividend >= 0, got rate {} and dividend {}",
                self.rate, self.dividend
            ));
        }
        if !(self.t_now >= 0.0 && self.maturity > self.t_now && self.maturity.is_finite()) {
            return domain(format!(
                "times need maturity > t_now >= 0, got t_now {} and maturity {}",
                self.t_now, self.maturity
            ));
        }
        match self.spot_at_t {
            Some(s) if !(s > 0.0 && s.is_finite()) => return domain(format!("spot_at_t must be positive, got {s}")),
            None if self.t_now > 0.0 => return domain("spot_at_t is required when t_now > 0".into()),
            _ => {}
        }
        if let Some(h) = self.discount_horizon {
            if !(h >= 0.0 && h.is_finite()) {
                return domain(format!("discount_horizon must be nonnegative, got {h}"));
            }
        }
        Ok(())
    }

    /// `S_t = s`.
    pub fn spot(&self) -> f64 {
        self.spot_at_t.unwrap_or(self.s0)
    }

    /// Remaining life `t' = T - t`.
    pub fn t_prime(&self) -> f64 {
        self.maturity - self.t_now
    }

    pub fn discount(&self) -> f64 {
        (-self.rate * self.discount_horizon.unwrap_or(self.maturity)).exp()
    }

    /// `ln(K/s)`, the log-moneyness at which the payoff starts.
    pub fn log_moneyness(&self) -> f64 {
        (self.strike / self.spot()).ln()
    }
}

fn require_unit_mgf<L: Law>(law: &L) -> Result<()> {
    let (lower, upper) = law.strip();
    if upper <= 1.0 {
        return Err(Error::OutOfStrip { z: 1.0, lower, upper });
    }
    Ok(())
}

/// `E[e^{T(1)}] - e^{r - v}`; zero exactly when the discounted price is a martingale.
pub fn martingale_gap<L: Law>(law: &L, rate: f64, dividend: f64) -> Result<f64> {
    require_unit_mgf(law)?;
    Ok(law.ln_mgf(1.0)?.exp() - (rate - dividend).exp())
}

/// The carry `r - v = ln E[e^{T(1)}]` that makes the model a martingale model.
pub fn calibrated_carry<L: Law>(law: &L) -> Result<f64> {
    require_unit_mgf(law)?;
    law.ln_mgf(1.0)
}

/// Both readings of the martingale condition, evaluated on the mixture representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MartingaleDiagnostics {
    /// `E[e^{T(1)}] - e^{r-v}` from the product form of the mgf.
    pub gap: f64,
    /// `E_L[(η/(η-1))^{p+L}] · E_M[(ξ/(ξ+1))^{q+M}]`, the mixture form of `E[e^{T(1)}]`.
    pub mixture_mgf: f64,
    /// `E_L[(η/(η-1))^L] · E_M[(ξ/(ξ-1))^M]`, when finite.
    pub literal_lhs: Option<f64>,
    /// `(1 - 1/η)^p (1 - 1/ξ)^q e^{r-v}`, when `ξ > 1`.
    pub literal_rhs: Option<f64>,
}

pub fn martingale_diagnostics(
    model: &LinearCombinationModel,
    rep: &MixtureRepresentation,
    rate: f64,
    dividend: f64,
) -> Result<MartingaleDiagnostics> {
    let gap = martingale_gap(model, rate, dividend)?;
    let mixture_mgf = rep.mgf(1.0)?;
    let (eta, xi) = (rep.eta(), rep.xi());
    let pow_mean = |mix: &GammaMixture, base: f64| -> Option<f64> {
        let ln = base.ln();
        mix.expectation(|k| (k as f64 * ln).exp(), base, "martingale diagnostics").ok()
    };
    let literal_lhs = if eta > 1.0 && xi > 1.0 {
        match (pow_mean(rep.positive(), eta / (eta - 1.0)), pow_mean(rep.negative(), xi / (xi - 1.0))) {
            (Some(a), Some(b)) => Some(a * b),
            _ => None,
        }
    } else {
        None
    };
    let literal_rhs = (eta > 1.0 && xi > 1.0).then(|| {
        (rep.p_total() * (1.0 - 1.0 / eta).ln() + rep.q_total() * (1.0 - 1.0 / xi).ln() + rate - dividend).exp()
    });
    Ok(MartingaleDiagnostics {
        gap,
        mixture_mgf,
        literal_lhs,
        literal_rhs,
    })
}

/// A deterministic price with its quadrature or truncation error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Price {
    pub price: f64,
    pub error: f64,
}

/// `e^{-rT} ∫_{ln(K/s)}^∞ (s e^x - K) h(x, t') dx` with `h` the density of `T(t')`
/// by Fourier inversion.
///
/// The growing part is rewritten as `e^x h(x) = E[e^{T(t')}] h̃(x)`, with `h̃`
/// the density of the Esscher transform by 1, so that only bounded densities
/// enter the quadrature and their absolute errors are not amplified by `e^x`.
/// When the log-strike lies beyond the mean of that transform, the whole
/// premium is instead written against the transform by the Chernoff saddle
/// point `θ > 1`, which centres the density at the strike; the integrand
/// `K (e^{x-a} - 1) E[e^{θT}] e^{-θx} h_θ(x)` is then nonnegative and free of
/// cancellation between the two legs.
pub fn price_call_integral<L: Law>(law: &L, inputs: &PricingInputs, spec: &QuadratureSpec) -> Result<Price> {
    inputs.validate()?;
    require_unit_mgf(law)?;
    let law_t = law.time_scaled(inputs.t_prime())?;
    let (s, k) = (inputs.spot(), inputs.strike);
    let a = inputs.log_moneyness();
    // Densities are resolved well below the outer tolerance so that their noise
    // does not stall the adaptive subdivision.
    let pdf_spec = spec.scaled(1e-3);
    // Beyond x_hi the remaining premium is below a small fraction of abs_tol.
    let threshold = 1e-3 * spec.abs_tol;
    let (tail_at_a, saddle) = chernoff(&law_t, s, a);
    if tail_at_a <= threshold {
        return Ok(Price {
            price: 0.0,
            error: inputs.discount() * tail_at_a,
        });
    }
    let mut x_hi = a.max(law_t.mean()) + law_t.std_dev();
    let mut step = law_t.std_dev();
    while chernoff(&law_t, s, x_hi).0 > threshold {
        x_hi += step;
        step *= 2.0;
    }
    let failure = RefCell::new(None);
    let (_, upper) = law_t.strip();
    let theta = if upper.is_finite() { saddle.min(1.0 + 0.9 * (upper - 1.0)) } else { saddle };
    let mut est = if theta > 1.0 + 1e-6 {
        let tilted = law_t.tilted(theta)?;
        let ln_m = law_t.ln_mgf(theta)?;
        let integrand = |x: f64| -> f64 {
            match tilted.pdf(x, &pdf_spec) {
                Ok(d) => k * (x - a).exp_m1() * (ln_m - theta * x).exp() * d,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        };
        integrate_with_points(&integrand, a, x_hi, &[0.0], spec)?
    } else {
        let tilted = law_t.tilted(1.0)?;
        let growth = law_t.ln_mgf(1.0)?.exp();
        let integrand = |x: f64| -> f64 {
            match (tilted.pdf(x, &pdf_spec), law_t.pdf(x, &pdf_spec)) {
                (Ok(up), Ok(d)) => s * growth * up - k * d,
                (Err(e), _) | (_, Err(e)) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        };
        integrate_with_points(&integrand, a, x_hi, &[0.0], spec)?
    };
    est.error += chernoff(&law_t, s, x_hi).0;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let disc = inputs.discount();
    Ok(Price {
        price: (disc * est.value).max(0.0),
        error: disc * est.error,
    })
}

/// `min_z s E[e^{zX}] e^{-(z-1)x}` over `1 <= z < λ_min`, an upper bound on
/// `∫_x^∞ s e^y h(y) dy`, together with its minimizer.
fn chernoff<L: Law>(law: &L, s: f64, x: f64) -> (f64, f64) {
    let (_, upper) = law.strip();
    let hi = if upper.is_finite() { upper - (upper - 1.0) * 1e-9 } else { 1.0 + 64.0 * (1.0 + x.abs()) };
    let objective = |z: f64| law.ln_mgf(z).map_or(f64::INFINITY, |m| m - (z - 1.0) * x);
    // The objective is convex in z; golden-section search on (1, hi).
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo_z, mut hi_z) = (1.0, hi);
    let mut c = hi_z - g * (hi_z - lo_z);
    let mut d = lo_z + g * (hi_z - lo_z);
    let (mut fc, mut fd) = (objective(c), objective(d));
    for _ in 0..100 {
        if fc < fd {
            hi_z = d;
            d = c;
            fd = fc;
            c = hi_z - g * (hi_z - lo_z);
            fc = objective(c);
        } else {
            lo_z = c;
            c = d;
            fc = fd;
            d = lo_z + g * (hi_z - lo_z);
            fd = objective(d);
        }
    }
    // At z = 1 the bound is s E[e^X] e^0 for any x, a safe fallback.
    let (f1, mut best, mut z) = (objective(1.0), fc, c);
    if fd < best {
        (best, z) = (fd, d);
    }
    if f1 <= best {
        (best, z) = (f1, 1.0);
    }
    (s * best.exp(), z)
}

fn gamma_driven_rate(mix: &GammaMixture) -> Result<f64> {
    let eta = mix.rate();
    if !(eta > 1.0) {
        return Err(Error::Domain(format!("gamma-driven pricing needs eta > 1, got {eta}")));
    }
    Ok(eta)
}

/// Series price of the gamma-driven model (no negative parts) for `K >= s`:
/// `e^{-rT} Σ_j P(L=j) [s ρ^{w_j} Q(w_j, (η-1)ℓ) - K Q(w_j, ηℓ)]`, `w_j = p' + j`,
/// `ρ = η/(η-1)`, `ℓ = ln(K/s)`.
///
/// `mix` is the time-1 representation; the series runs on the representation
/// of `T(t')`, whose shapes are those of `mix` times `t'`.
pub fn price_call_gamma_driven(mix: &GammaMixture, inputs: &PricingInputs) -> Result<Price> {
    inputs.validate()?;
    let mix_t = mix.time_scaled(inputs.t_prime())?;
    let eta = gamma_driven_rate(&mix_t)?;
    let (s, k) = (inputs.spot(), inputs.strike);
    if k < s {
        return Err(Error::Domain(format!(
            "gamma-driven series needs strike >= spot, got K = {k} and s = {s}"
        )));
    }
    let ell = inputs.log_moneyness();
    let rho = eta / (eta - 1.0);
    let p = mix_t.shape_total();
    let failure = RefCell::new(None);
    let sum = mix_t.expectation(
        |j| {
            let w = p + j as f64;
            let upper_a = regularized_upper_incomplete_gamma(w, (eta - 1.0) * ell);
            let upper_b = regularized_upper_incomplete_gamma(w, eta * ell);
            match (upper_a, upper_b) {
                (Ok(qa), Ok(qb)) => s * (w * rho.ln()).exp() * qa - k * qb,
                (Err(e), _) | (_, Err(e)) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        rho,
        "gamma-driven price series",
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let disc = inputs.discount();
    Ok(Price {
        price: (disc * sum?).max(0.0),
        error: disc * (s * rho.powf(p) + k) * mix_t.tail_mass_bound(),
    })
}

/// At-the-money price `K e^{-rT} (E[ρ^{p'+L'}] - 1)` of the gamma-driven model.
///
/// Divergence of the expectation is detected from the pmf decay ratio before
/// any summation and reported as [`Error::Divergent`].
pub fn price_call_atm(mix: &GammaMixture, inputs: &PricingInputs) -> Result<Price> {
    inputs.validate()?;
    let (s, k) = (inputs.spot(), inputs.strike);
    if (s - k).abs() > 1e-12 * k {
        return Err(Error::Domain(format!("at-the-money formula needs s = K, got s = {s} and K = {k}")));
    }
    let mix_t = mix.time_scaled(inputs.t_prime())?;
    let eta = gamma_driven_rate(&mix_t)?;
    let rho = eta / (eta - 1.0);
    let ln_rho = rho.ln();
    let p = mix_t.shape_total();
    let mean = mix_t.expectation(|j| ((p + j as f64) * ln_rho).exp(), rho, "at-the-money expectation")?;
    let disc = inputs.discount();
    Ok(Price {
        price: (k * disc * (mean - 1.0)).max(0.0),
        error: k * disc * rho.powf(p) * mix_t.tail_mass_bound(),
    })
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n: usize,
}

/// `e^{-rT} mean((s e^X - K)^+)` over `n` exact draws of `X = T(t')`.
pub fn price_call_monte_carlo<L: Law>(
    law: &L,
    inputs: &PricingInputs,
    n: usize,
    rng: &mut RandomStream,
) -> Result<McEstimate> {
    inputs.validate()?;
    if n < 2 {
        return Err(Error::Domain(format!("Monte Carlo pricing needs at least 2 draws, got {n}")));
    }
    let law_t = law.time_scaled(inputs.t_prime())?;
    let (s, k) = (inputs.spot(), inputs.strike);
    let draws = sample_law(&law_t, n, rng)?;
    let payoffs: Vec<f64> = draws.par_iter().map(|&x| (s * x.exp() - k).max(0.0)).collect();
    let (mean, se) = mean_std_error(&payoffs);
    let disc = inputs.discount();
    Ok(McEstimate {
        value: disc * mean,
        std_error: disc * se,
        n,
    })
}

/// `mean(e^{-carry·t} S_t / S_0)` at the last point of `t_grid`, over `n_paths`
/// simulated paths. Equals 1 in expectation when `carry = ln E[e^{T(1)}]`.
pub fn discounted_price_mean<L: Law>(
    law: &L,
    carry: f64,
    t_grid: &[f64],
    n_paths: usize,
    rng: &mut RandomStream,
) -> Result<McEstimate> {
    let paths = sample_paths(law, t_grid, n_paths, rng)?;
    let t = *t_grid.last().ok_or_else(|| Error::Grid("time grid is empty".into()))?;
    let values: Vec<f64> = paths.par_iter().map(|p| (p[p.len() - 1] - carry * t).exp()).collect();
    let (value, std_error) = mean_std_error(&values);
    Ok(McEstimate {
        value,
        std_error,
        n: n_paths,
    })
}
