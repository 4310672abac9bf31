//! The invariant suite: identities, route agreements and Monte Carlo checks
//! over the shipped models, each reported as a pass/fail record.
//!
//! Every check draws from its own stream of the suite seed, so the report is
//! a deterministic function of the configuration.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::finance::{
    calibrated_carry, discounted_price_mean, martingale_gap, price_call_atm, price_call_gamma_driven,
    price_call_integral, price_call_monte_carlo,
};
use crate::lincomb::{LinearCombinationModel, MixtureRepresentation, DEFAULT_K_MAX, DEFAULT_TAIL_TOL};
use crate::models::{self, BoundPair, NamedModel};
use crate::sampling::{mean_std_error, sample_compound_poisson, sample_tn_direct, sample_tn_mixture, RandomStream};
use crate::special::{integrate_real_line_scaled, integrate_upper, QuadratureSpec};
use crate::stein::{
    bound_compound_poisson_k, bound_d3_bg, bound_d3_normal, empirical_kolmogorov, ks_critical_value, ks_noise,
    stein_identity_check, BoundConstants, TestFunction,
};

/// Truncation tolerance of the mixture representations under test.
pub const TAIL_TOL: f64 = DEFAULT_TAIL_TOL;
/// `sup |φ - φ_mix|` allowed on the cf grid.
pub const CF_TOL: f64 = 1e-8 + 2.0 * TAIL_TOL;
/// Half-width and size of the cf grid.
pub const CF_ZMAX: f64 = 20.0;
pub const CF_POINTS: usize = 401;
/// Laplace closed form against Fourier inversion.
pub const LAPLACE_TOL: f64 = 1e-7;
/// Series against Fourier density, and the normalization error.
pub const DENSITY_TOL: f64 = 1e-6;
/// Closed-form cumulants against quadrature of the Lévy measure.
pub const CUMULANT_REL_TOL: f64 = 1e-8;
/// Standard errors allowed for every Monte Carlo comparison.
pub const SE_MULTIPLE: f64 = 4.0;
/// Relative agreement between deterministic prices.
pub const PRICE_REL_TOL: f64 = 1e-4;
/// Level of the two-sample KS test in the sampler comparison.
pub const KS_LEVEL: f64 = 0.01;
/// Allowed KS rejections among the repetitions of the sampler comparison.
pub const KS_MAX_REJECTIONS: usize = 1;
/// Most negative log-log slope tolerated above the `m^{-1/5}` rate.
pub const CP_SLOPE_MAX: f64 = -0.2 + 0.1;
/// Multiple of the KS noise level tolerated as an increase between sweep points.
pub const CP_NOISE_MULTIPLE: f64 = 2.0;

/// Size of the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Reduced Monte Carlo sizes with unchanged tolerances.
    Quick,
    /// The sample sizes of the acceptance criteria.
    Full,
}

/// Deliberate corruption used to confirm that the suite detects faults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Scale one coefficient of the `γ` recursion by 1.01.
    GammaRecursion,
}

/// Sample sizes and the seed of a suite run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub seed: u64,
    pub fault: Option<Fault>,
    pub stein_samples: usize,
    pub cumulant_samples: usize,
    pub bound_samples: usize,
    pub pricing_samples: usize,
    pub martingale_paths: usize,
    pub equivalence_samples: usize,
    pub equivalence_reps: usize,
    pub cp_samples: usize,
    pub cp_indices: Vec<u32>,
}

impl SuiteConfig {
    pub fn new(suite: Suite, seed: u64) -> Self {
        match suite {
            Suite::Full => Self {
                suite,
                seed,
                fault: None,
                stein_samples: 1_000_000,
                cumulant_samples: 1_000_000,
                bound_samples: 1_000_000,
                pricing_samples: 10_000_000,
                martingale_paths: 1_000_000,
                equivalence_samples: 100_000,
                equivalence_reps: 20,
                cp_samples: 100_000,
                cp_indices: vec![1, 2, 4, 8, 16, 32, 64],
            },
            Suite::Quick => Self {
                suite,
                seed,
                fault: None,
                stein_samples: 100_000,
                cumulant_samples: 100_000,
                bound_samples: 100_000,
                pricing_samples: 400_000,
                martingale_paths: 100_000,
                equivalence_samples: 20_000,
                equivalence_reps: 5,
                cp_samples: 20_000,
                cp_indices: vec![1, 2, 4, 8, 16, 32, 64],
            },
        }
    }

    pub fn with_fault(mut self, fault: Fault) -> Self {
        self.fault = Some(fault);
        self
    }
}

/// Outcome of one invariant on one subject.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub invariant: &'static str,
    pub subject: String,
    pub passed: bool,
    pub metrics: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    /// One line for logs: status, invariant, subject and the metrics.
    pub fn summary(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let metrics: Vec<String> = self.metrics.iter().map(|(k, v)| format!("{k}={v:.3e}")).collect();
        let mut line = format!("{status} {} [{}] {}", self.invariant, self.subject, metrics.join(" "));
        if let Some(e) = &self.error {
            line.push_str(&format!(" error: {e}"));
        }
        line
    }
}

/// Metrics collected while a check runs.
#[derive(Debug, Default)]
pub struct Metrics(BTreeMap<String, f64>);

impl Metrics {
    pub fn set(&mut self, key: impl Into<String>, value: f64) {
        self.0.insert(key.into(), value);
    }
}

/// Runs `body`; a numerical error fails the check and is recorded.
fn check(invariant: &'static str, subject: &str, body: impl FnOnce(&mut Metrics) -> Result<bool>) -> Check {
    let mut metrics = Metrics::default();
    let outcome = body(&mut metrics);
    let (passed, error) = match outcome {
        Ok(p) => (p, None),
        Err(e) => (false, Some(e.to_string())),
    };
    Check {
        invariant,
        subject: subject.to_string(),
        passed,
        metrics: metrics.0,
        error,
    }
}

/// The whole suite's report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
    pub passed: bool,
    pub n_checks: usize,
    pub n_failed: usize,
    pub checks: Vec<Check>,
}

fn representation(model: &LinearCombinationModel) -> Result<MixtureRepresentation> {
    model.mixture(TAIL_TOL, DEFAULT_K_MAX)
}

/// `sup_z |φ_{T_n}(z) - φ_mix(z)|` on the cf grid.
pub fn cf_identity(name: &str, model: &LinearCombinationModel, fault: Option<Fault>) -> Check {
    check("cf_identity", name, |m| {
        let mut rep = representation(model)?;
        if fault == Some(Fault::GammaRecursion) {
            rep = MixtureRepresentation::new(rep.positive().with_perturbed_recursion(1.01), rep.negative().clone());
        }
        let step = 2.0 * CF_ZMAX / (CF_POINTS - 1) as f64;
        let sup = (0..CF_POINTS)
            .map(|i| {
                let z = -CF_ZMAX + step * i as f64;
                (model.cf(z) - rep.cf(z)).norm()
            })
            .fold(0.0, f64::max);
        m.set("sup_error", sup);
        m.set("tolerance", CF_TOL);
        m.set("support_l", rep.pmf_l().len() as f64);
        m.set("support_m", rep.pmf_m().len() as f64);
        Ok(sup <= CF_TOL)
    })
}

/// Fourier density of `BG(α, 1, α, 1)` against `(α/2) e^{-α|x|}` on 401 points of `[-5, 5]`.
pub fn laplace_density(alpha: f64) -> Check {
    check("laplace_density", &format!("alpha={alpha}"), |m| {
        let model = models::laplace(alpha);
        let spec = QuadratureSpec::default();
        let mut sup: f64 = 0.0;
        for i in 0..401 {
            let x = -5.0 + 0.025 * i as f64;
            let exact = 0.5 * alpha * (-alpha * x.abs()).exp();
            sup = sup.max((model.pdf_fourier(x, &spec)? - exact).abs());
        }
        m.set("sup_error", sup);
        m.set("tolerance", LAPLACE_TOL);
        Ok(sup <= LAPLACE_TOL)
    })
}

/// Series against Fourier density on `x = -5, -4.9, ..., 5` without 0, and
/// the normalization of the Fourier density.
pub fn density_routes(name: &str, model: &LinearCombinationModel) -> Check {
    check("density_routes", name, |m| {
        let rep = representation(model)?;
        let spec = QuadratureSpec::default();
        let xs: Vec<f64> = (0..=100).filter(|&i| i != 50).map(|i| -5.0 + 0.1 * i as f64).collect();
        let diffs = xs
            .par_iter()
            .map(|&x| Ok((rep.pdf_series(x, &spec)? - model.pdf_fourier(x, &spec)?).abs()))
            .collect::<Result<Vec<f64>>>()?;
        let sup = diffs.into_iter().fold(0.0, f64::max);
        // Inner densities resolved well below the outer tolerance, so that
        // their noise does not drive the outer subdivision to its cap.
        let outer = QuadratureSpec::new(1e-9, 1e-9, 2000)?;
        let inner = outer.scaled(1e-3);
        let total = integrate_real_line_scaled(
            |x| model.pdf_fourier(x, &inner).unwrap_or(f64::NAN),
            model.mean(),
            model.variance().sqrt(),
            &outer,
        )?
        .value;
        m.set("sup_route_diff", sup);
        m.set("normalization_error", (total - 1.0).abs());
        m.set("tolerance", DENSITY_TOL);
        Ok(sup <= DENSITY_TOL && (total - 1.0).abs() <= DENSITY_TOL)
    })
}

/// `∫_0^∞ u^k ν(du)` and `∫_{-∞}^0 u^k ν(du)` by quadrature.
pub fn cumulant_by_quadrature(model: &LinearCombinationModel, k: u32) -> Result<(f64, f64)> {
    let spec = QuadratureSpec::new(1e-14, 1e-12, 2000)?;
    let (lower, upper) = model.strip();
    let ki = k as i32;
    let pos = integrate_upper(|u: f64| u.powi(ki) * model.levy_density(u).unwrap_or(0.0), 0.0, 1.0 / upper, &spec)?;
    let neg = integrate_upper(
        |u: f64| (-u).powi(ki) * model.levy_density(-u).unwrap_or(0.0),
        0.0,
        -1.0 / lower,
        &spec,
    )?;
    Ok((pos.value, neg.value))
}

/// Unbiased k-statistics `k_1..k_4` of a sample.
pub fn k_statistics(sample: &[f64]) -> [f64; 4] {
    let n = sample.len() as f64;
    let (mean, _) = mean_std_error(sample);
    let (mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0);
    for &x in sample {
        let d = x - mean;
        let d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }
    let (m2, m3, m4) = (s2 / n, s3 / n, s4 / n);
    let k2 = n * m2 / (n - 1.0);
    let k3 = n * n * m3 / ((n - 1.0) * (n - 2.0));
    let k4 = n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2) / ((n - 1.0) * (n - 2.0) * (n - 3.0));
    [mean, k2, k3, k4]
}

/// Exact sampling variances of `k_1..k_4` from the population cumulants `κ_1..κ_8`.
pub fn k_statistic_variances(kappa: &[f64; 8], n: usize) -> [f64; 4] {
    let n = n as f64;
    let k = |i: usize| kappa[i - 1];
    let (a, b, c) = (n - 1.0, (n - 1.0) * (n - 2.0), (n - 1.0) * (n - 2.0) * (n - 3.0));
    [
        k(2) / n,
        k(4) / n + 2.0 * k(2).powi(2) / a,
        k(6) / n + 9.0 * k(2) * k(4) / a + 9.0 * k(3).powi(2) / a + 6.0 * n * k(2).powi(3) / b,
        k(8) / n
            + 16.0 * k(2) * k(6) / a
            + 48.0 * k(3) * k(5) / a
            + 34.0 * k(4).powi(2) / a
            + 72.0 * n * k(2).powi(2) * k(4) / b
            + 144.0 * n * k(2) * k(3).powi(2) / b
            + 24.0 * n * (n + 1.0) * k(2).powi(4) / c,
    ]
}

/// Closed-form cumulants against quadrature of the Lévy measure and against
/// sample k-statistics.
pub fn cumulant_agreement(name: &str, model: &LinearCombinationModel, n: usize, rng: &mut RandomStream) -> Check {
    check("cumulant_agreement", name, |m| {
        let mut ok = true;
        for k in 1..=4u32 {
            // Relative to the size of the two half-line parts, which stays
            // positive when odd cumulants cancel to 0.
            let closed = model.cumulant(k);
            let (pos, neg) = cumulant_by_quadrature(model, k)?;
            let rel = (pos + neg - closed).abs() / (pos.abs() + neg.abs());
            m.set(format!("quadrature_rel_error_k{k}"), rel);
            ok &= rel <= CUMULANT_REL_TOL;
        }
        let kappa: [f64; 8] = std::array::from_fn(|i| model.cumulant(i as u32 + 1));
        let sample = sample_tn_direct(model, n, rng)?;
        let stats = k_statistics(&sample);
        let vars = k_statistic_variances(&kappa, n);
        for k in 0..4 {
            let z = (stats[k] - kappa[k]) / vars[k].sqrt();
            m.set(format!("sample_z_k{}", k + 1), z);
            ok &= z.abs() <= SE_MULTIPLE;
        }
        Ok(ok)
    })
}

/// Test functions of the Stein identity check.
pub fn stein_functions() -> [TestFunction; 3] {
    [TestFunction::sine(), TestFunction::x_gaussian(), TestFunction::gaussian()]
}

/// `|Ê[A h(T_n)]| <= 4 SE`.
pub fn stein_identity(
    name: &str,
    model: &LinearCombinationModel,
    h: &TestFunction,
    n: usize,
    rng: &mut RandomStream,
) -> Check {
    check("stein_identity", &format!("{name} h={}", h.name()), |m| {
        let c = stein_identity_check(model, h, n, rng)?;
        m.set("estimate", c.estimate);
        m.set("std_error", c.std_error);
        Ok(c.holds(SE_MULTIPLE))
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// One point of the compound Poisson sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub m: u32,
    pub d_k: f64,
    /// The Kolmogorov bound with `c = 1`.
    pub bound_shape: f64,
}

/// `d_K(Z_m, T_n)` for each `m`, on `n` draws of each law. `T_n` is sampled once.
pub fn compound_poisson_sweep(
    model: &LinearCombinationModel,
    ms: &[u32],
    n: usize,
    rng: &mut RandomStream,
) -> Result<Vec<SweepPoint>> {
    let target = sample_tn_direct(model, n, rng)?;
    let defaults = BoundConstants::default();
    ms.iter()
        .map(|&m| {
            let z = sample_compound_poisson(model, m, n, rng)?;
            Ok(SweepPoint {
                m,
                d_k: empirical_kolmogorov(&z, &target)?,
                bound_shape: bound_compound_poisson_k(model, m, &defaults)?,
            })
        })
        .collect()
}

/// The sweep is nonincreasing up to twice the KS noise, lies below the bound
/// with `c` fitted at the first index, and decays at least at rate `m^{-1/10}`.
pub fn compound_poisson_convergence(
    name: &str,
    model: &LinearCombinationModel,
    ms: &[u32],
    n: usize,
    rng: &mut RandomStream,
) -> Check {
    check("compound_poisson_convergence", name, |m| {
        let sweep = compound_poisson_sweep(model, ms, n, rng)?;
        let noise = ks_noise(n, n);
        let monotone = sweep.windows(2).all(|w| w[1].d_k <= w[0].d_k + CP_NOISE_MULTIPLE * noise);
        let c_fit = sweep[0].d_k / sweep[0].bound_shape;
        let below = sweep.iter().all(|p| p.d_k <= c_fit * p.bound_shape * (1.0 + 1e-12));
        let xs: Vec<f64> = sweep.iter().map(|p| p.m as f64).collect();
        let ys: Vec<f64> = sweep.iter().map(|p| p.d_k).collect();
        let slope = log_log_slope(&xs, &ys);
        for p in &sweep {
            m.set(format!("d_k_m{:02}", p.m), p.d_k);
        }
        m.set("ks_noise", noise);
        m.set("c_fitted", c_fit);
        m.set("slope", slope);
        m.set("monotone", f64::from(u8::from(monotone)));
        m.set("below_bound", f64::from(u8::from(below)));
        Ok(monotone && below && slope <= CP_SLOPE_MAX)
    })
}

/// Certified members of `W_3` used as lower estimates of `d_3`.
pub fn w3_functions() -> Vec<TestFunction> {
    [TestFunction::sine(), TestFunction::cosine(), TestFunction::w3_gaussian()]
        .into_iter()
        .filter(|h| h.in_class(3))
        .collect()
}

/// The `d_3` bound dominates `|Ê h(T_n) - Ê h(Z)| - 4 SE` for every certified
/// `h`; for a self-target every term is zero.
pub fn d3_bound_consistency(pair: &BoundPair, n: usize, rng: &mut RandomStream) -> Check {
    check("d3_bound_consistency", pair.name, |m| {
        let bound = bound_d3_bg(&pair.model, &pair.target)?;
        let value = bound.value();
        m.set("bound", value);
        m.set("kappa", bound.kappa.kappa_n);
        let mut ok = true;
        if pair.self_target {
            ok &= bound.terms.iter().all(|&t| t == 0.0);
        }
        let t = sample_tn_direct(&pair.model, n, rng)?;
        let z = pair.target.sample(n, rng)?;
        let functions = w3_functions();
        ok &= !functions.is_empty();
        for (i, h) in functions.iter().enumerate() {
            let ht: Vec<f64> = t.par_iter().map(|&x| h.eval(x)).collect();
            let hz: Vec<f64> = z.par_iter().map(|&x| h.eval(x)).collect();
            let (mt, st) = mean_std_error(&ht);
            let (mz, sz) = mean_std_error(&hz);
            let lower = (mt - mz).abs() - SE_MULTIPLE * st.hypot(sz);
            m.set(format!("lower_estimate_h{i}"), lower);
            ok &= value >= lower;
        }
        Ok(ok)
    })
}

/// Sizes at which the normal-limit scaling is evaluated.
pub const NORMAL_SCALING_SIZES: [u32; 3] = [4, 16, 64];

/// `bound_d3_normal(σ = 1)` decreases strictly along the single-component
/// scaling; the `n`-component reading is reported alongside.
pub fn normal_scaling() -> Check {
    check("normal_scaling", "w=n^-1/2 alpha=beta=n p=q=n^3/2", |m| {
        let mut values = Vec::new();
        for n in NORMAL_SCALING_SIZES {
            let b = bound_d3_normal(&models::normal_scaling(n), 1.0)?.value();
            m.set(format!("bound_n{n:02}"), b);
            values.push(b);
            match bound_d3_normal(&models::normal_scaling_components(n), 1.0) {
                Ok(lit) => m.set(format!("n_component_bound_n{n:02}"), lit.value()),
                Err(_) => m.set(format!("n_component_bound_n{n:02}"), f64::NAN),
            }
        }
        Ok(values.windows(2).all(|w| w[1] < w[0]))
    })
}

fn agree(a: f64, b: f64, se: f64) -> bool {
    (a - b).abs() <= (PRICE_REL_TOL * a.abs().max(b.abs())).max(SE_MULTIPLE * se)
}

/// Integral, series and Monte Carlo prices of the gamma-driven model agree
/// pairwise; at the money the closed form matches the integral.
pub fn pricing_agreement(strike: f64, n: usize, rng: &mut RandomStream) -> Check {
    check("pricing_agreement", &format!("gamma_driven K={strike}"), |m| {
        let law = models::gamma_driven();
        let inputs = models::gamma_driven_inputs(strike);
        let mix = law.mixture(TAIL_TOL, DEFAULT_K_MAX)?;
        let integral = price_call_integral(&law, &inputs, &QuadratureSpec::default())?.price;
        let series = price_call_gamma_driven(&mix, &inputs)?.price;
        let mc = price_call_monte_carlo(&law, &inputs, n, rng)?;
        m.set("integral", integral);
        m.set("series", series);
        m.set("monte_carlo", mc.value);
        m.set("monte_carlo_se", mc.std_error);
        let mut ok = agree(integral, series, 0.0) && agree(integral, mc.value, mc.std_error) && agree(series, mc.value, mc.std_error);
        if (inputs.spot() - strike).abs() <= 1e-12 * strike {
            let atm = price_call_atm(&mix, &inputs)?.price;
            m.set("atm", atm);
            ok &= (atm - integral).abs() <= PRICE_REL_TOL * integral.abs();
        }
        Ok(ok)
    })
}

/// With `r - v = ln E[e^{T(1)}]`, `mean(e^{-(r-v)} S_1/S_0)` over simulated paths is 1 within 4 SE.
pub fn martingale_calibration(n_paths: usize, rng: &mut RandomStream) -> Check {
    check("martingale_calibration", "calibration_model", |m| {
        let model = models::calibration_model();
        let carry = calibrated_carry(&model)?;
        let grid: Vec<f64> = (0..=10).map(|i| 0.1 * i as f64).collect();
        let est = discounted_price_mean(&model, carry, &grid, n_paths, rng)?;
        m.set("carry", carry);
        m.set("gap", martingale_gap(&model, carry, 0.0)?);
        m.set("discounted_mean", est.value);
        m.set("std_error", est.std_error);
        Ok((est.value - 1.0).abs() <= SE_MULTIPLE * est.std_error)
    })
}

/// Two-sample KS between the direct and mixture samplers rejects at level
/// 0.01 in at most one repetition.
pub fn sampling_equivalence(
    name: &str,
    model: &LinearCombinationModel,
    n: usize,
    reps: usize,
    rng: &mut RandomStream,
) -> Check {
    check("sampling_equivalence", name, |m| {
        let rep = representation(model)?;
        let critical = ks_critical_value(n, n, KS_LEVEL);
        let mut rejections = 0;
        let mut largest: f64 = 0.0;
        for r in 0..reps {
            let mut stream = rng.child(r as u64);
            let direct = sample_tn_direct(model, n, &mut stream)?;
            let mixture = sample_tn_mixture(&rep, n, &mut stream)?;
            let d = empirical_kolmogorov(&direct, &mixture)?;
            largest = largest.max(d);
            if d > critical {
                rejections += 1;
            }
        }
        m.set("rejections", rejections as f64);
        m.set("critical_value", critical);
        m.set("largest_statistic", largest);
        Ok(rejections <= KS_MAX_REJECTIONS)
    })
}

/// Laplace rates of the closed-form density check.
pub const LAPLACE_ALPHAS: [f64; 3] = [0.5, 1.0, 2.0];
/// Strikes of the pricing check: at the money and out of the money.
pub const PRICING_STRIKES: [f64; 2] = [1.0, 1.2];

/// Runs every invariant in a fixed order; each check has its own stream.
pub fn run(config: &SuiteConfig) -> Report {
    let grid = models::grid();
    let mut stream_id = 0u64;
    let mut next = || {
        stream_id += 1;
        RandomStream::new(config.seed, stream_id)
    };
    let mut checks = Vec::new();
    for NamedModel { name, model } in &grid {
        checks.push(cf_identity(name, model, config.fault));
    }
    for alpha in LAPLACE_ALPHAS {
        checks.push(laplace_density(alpha));
    }
    for NamedModel { name, model } in &grid {
        checks.push(density_routes(name, model));
    }
    for NamedModel { name, model } in &grid {
        checks.push(cumulant_agreement(name, model, config.cumulant_samples, &mut next()));
    }
    for NamedModel { name, model } in &grid {
        for h in stein_functions() {
            checks.push(stein_identity(name, model, &h, config.stein_samples, &mut next()));
        }
    }
    for NamedModel { name, model } in &grid {
        checks.push(compound_poisson_convergence(name, model, &config.cp_indices, config.cp_samples, &mut next()));
    }
    for pair in models::bound_pairs() {
        checks.push(d3_bound_consistency(&pair, config.bound_samples, &mut next()));
    }
    checks.push(normal_scaling());
    for strike in PRICING_STRIKES {
        checks.push(pricing_agreement(strike, config.pricing_samples, &mut next()));
    }
    checks.push(martingale_calibration(config.martingale_paths, &mut next()));
    for NamedModel { name, model } in &grid {
        checks.push(sampling_equivalence(
            name,
            model,
            config.equivalence_samples,
            config.equivalence_reps,
            &mut next(),
        ));
    }
    let n_failed = checks.iter().filter(|c| !c.passed).count();
    Report {
        suite: config.suite,
        seed: config.seed,
        fault: config.fault,
        passed: n_failed == 0,
        n_checks: checks.len(),
        n_failed,
        checks,
    }
}
