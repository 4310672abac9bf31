//! Argument definitions and the implementation of every subcommand.

use std::path::PathBuf;

use bilgamma::finance::{
    martingale_diagnostics, martingale_gap, price_call_atm, price_call_gamma_driven, price_call_integral,
    price_call_monte_carlo, MartingaleDiagnostics, PricingInputs,
};
use bilgamma::lincomb::{DEFAULT_K_MAX, DEFAULT_TAIL_TOL};
use bilgamma::sampling::{par_fill, sample_law, sample_paths, sample_tn_mixture, MixtureSampler};
use bilgamma::stein::{
    bound_d3_bg, bound_d3_normal, bound_two_sums, bound_two_sums_gamma, compound_poisson_scale, kappa_inputs,
    ks_noise, BoundConstants, D3Bound,
};
use bilgamma::verify::{self, Fault, Suite, SuiteConfig};
use bilgamma::{Error, QuadratureSpec, RandomStream};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::io::{load_model, load_pricing, load_target, write_csv, write_json, Model};

/// Computations on linear combinations of bilateral gamma variables.
///
/// Grids are written as CSV and reports as JSON, to `--out` or standard
/// output. Exit codes: 0 success, 1 verification failure, 2 configuration
/// error, 3 numerical or domain error. BILGAMMA_THREADS caps the number of
/// worker threads.
#[derive(Debug, Parser)]
#[command(name = "bilgamma", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density on a grid by Fourier inversion and by the mixture series.
    Pdf(PdfArgs),
    /// Characteristic function on a grid, product form and mixture form.
    Cf(CfArgs),
    /// Cumulants in closed form and raw moments from the mixture.
    Moments(MomentsArgs),
    /// Exact draws of the model.
    Sample(SampleArgs),
    /// Approximation bounds against a target law, a normal law or a reweighted model.
    Bounds(BoundsArgs),
    /// Kolmogorov distance of compound Poisson approximations over a list of indices.
    CpSweep(CpSweepArgs),
    /// European call price in the exponential model driven by the model.
    Price(PriceArgs),
    /// Paths of the Lévy process on a time grid.
    Simulate(SimulateArgs),
    /// The invariant suite over the shipped models.
    Verify(VerifyArgs),
}

/// Quadrature overrides shared by the commands that integrate.
#[derive(Debug, Clone, Args)]
pub struct Tolerances {
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub max_subdivisions: Option<usize>,
}

impl Tolerances {
    /// `base` with the overrides applied.
    fn apply(&self, base: QuadratureSpec) -> CliResult<QuadratureSpec> {
        let spec = QuadratureSpec {
            abs_tol: self.abs_tol.unwrap_or(base.abs_tol),
            rel_tol: self.rel_tol.unwrap_or(base.rel_tol),
            max_subdivisions: self.max_subdivisions.unwrap_or(base.max_subdivisions),
        };
        spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(spec)
    }
}

/// Truncation of the mixture representation.
#[derive(Debug, Clone, Args)]
pub struct MixtureArgs {
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
    pub tail_tol: f64,
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    pub k_max: usize,
}

#[derive(Debug, Args)]
pub struct PdfArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    pub xmin: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub xmax: f64,
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub tolerances: Tolerances,
    #[command(flatten)]
    pub mixture: MixtureArgs,
}

#[derive(Debug, Args)]
pub struct CfArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 20.0)]
    pub zmax: f64,
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub mixture: MixtureArgs,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub kmax: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub mixture: MixtureArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleMethod {
    /// Weighted gamma variates of every component.
    Direct,
    /// Random shapes from the mixture representation.
    Mixture,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SampleMethod::Direct)]
    pub method: SampleMethod,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub mixture: MixtureArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Bilateral gamma target `{"alpha", "p", "beta", "q"}`.
    #[arg(long, group = "against")]
    pub target: Option<PathBuf>,
    /// Standard deviation of a centred normal target.
    #[arg(long, group = "against")]
    pub sigma: Option<f64>,
    /// A second model with the same laws and different weights.
    #[arg(long, group = "against")]
    pub other: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c2: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CpSweepArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32,64")]
    pub m: Vec<u32>,
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PriceMethod {
    /// `atm` or `series` for gamma-driven models when they apply, else `integral`.
    Auto,
    Integral,
    Series,
    Atm,
    MonteCarlo,
}

#[derive(Debug, Args)]
pub struct PriceArgs {
    /// Model file; defaults to the `model` entry of the pricing file.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub pricing: PathBuf,
    #[arg(long, value_enum, default_value_t = PriceMethod::Auto)]
    pub method: PriceMethod,
    /// Required for `monte-carlo`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo draws.
    #[arg(long, default_value_t = 1_000_000)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub tolerances: Tolerances,
    #[command(flatten)]
    pub mixture: MixtureArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// `0:step:end`.
    #[arg(long)]
    pub tgrid: String,
    #[arg(long)]
    pub paths: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Quick,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    /// Scale one coefficient of the gamma recursion (fault injection).
    GammaRecursion,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::Full)]
    pub suite: SuiteArg,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub inject_fault: Option<FaultArg>,
}

/// Applies BILGAMMA_THREADS, if set, to the global worker pool.
pub fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("BILGAMMA_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("BILGAMMA_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Pdf(a) => pdf(&a),
        Command::Cf(a) => cf(&a),
        Command::Moments(a) => moments(&a),
        Command::Sample(a) => sample(&a),
        Command::Bounds(a) => bounds(&a),
        Command::CpSweep(a) => cp_sweep(&a),
        Command::Price(a) => price(&a),
        Command::Simulate(a) => simulate(&a),
        Command::Verify(a) => verify_cmd(&a),
    }
}

/// `points` equally spaced values from `lo` to `hi`.
fn linspace(lo: f64, hi: f64, points: usize) -> CliResult<Vec<f64>> {
    if points == 0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(CliError::Config(format!(
            "grid needs finite bounds with min <= max and at least one point, got [{lo}, {hi}] with {points}"
        )));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (points - 1) as f64;
    Ok((0..points).map(|i| if i + 1 == points { hi } else { lo + step * i as f64 }).collect())
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn pdf(a: &PdfArgs) -> CliResult<()> {
    let model = load_model(&a.model)?;
    let spec = a.tolerances.apply(QuadratureSpec::default())?;
    let xs = linspace(a.xmin, a.xmax, a.points)?;
    let (tail, k_max) = (a.mixture.tail_tol, a.mixture.k_max);
    let rows: Vec<Vec<Option<f64>>> = match &model {
        Model::Bilateral(m) => {
            let rep = m.mixture(tail, k_max)?;
            xs.par_iter()
                .map(|&x| {
                    let fourier = m.pdf_fourier(x, &spec)?;
                    let series = match rep.pdf_series(x, &spec) {
                        Ok(v) => Some(v),
                        Err(Error::SingularPoint(_)) => None,
                        Err(e) => return Err(e),
                    };
                    Ok(vec![Some(x), Some(fourier), series, series.map(|s| (s - fourier).abs())])
                })
                .collect::<bilgamma::Result<_>>()?
        }
        Model::GammaDriven(g) => {
            let mix = g.mixture(tail, k_max)?;
            xs.par_iter()
                .map(|&x| {
                    let fourier = g.pdf_fourier(x, &spec)?;
                    let series = mix.pdf(x);
                    Ok(vec![Some(x), Some(fourier), Some(series), Some((series - fourier).abs())])
                })
                .collect::<bilgamma::Result<_>>()?
        }
    };
    write_csv(a.out.as_deref(), &header(&["x", "pdf_fourier", "pdf_series", "abs_diff"]), &rows)
}

fn cf(a: &CfArgs) -> CliResult<()> {
    let model = load_model(&a.model)?;
    if !(a.zmax >= 0.0) {
        return Err(CliError::Config(format!("zmax must be nonnegative, got {}", a.zmax)));
    }
    let zs = linspace(-a.zmax, a.zmax, a.points)?;
    let (tail, k_max) = (a.mixture.tail_tol, a.mixture.k_max);
    let pairs: Vec<_> = match &model {
        Model::Bilateral(m) => {
            let rep = m.mixture(tail, k_max)?;
            zs.iter().map(|&z| (z, m.cf(z), rep.cf(z))).collect()
        }
        Model::GammaDriven(g) => {
            let mix = g.mixture(tail, k_max)?;
            zs.iter().map(|&z| (z, g.cf(z), mix.cf(z))).collect()
        }
    };
    let rows: Vec<Vec<Option<f64>>> = pairs
        .into_iter()
        .map(|(z, a, b)| vec![Some(z), Some(a.re), Some(a.im), Some(b.re), Some(b.im), Some((a - b).norm())])
        .collect();
    write_csv(
        a.out.as_deref(),
        &header(&["z", "cf_re", "cf_im", "mixture_re", "mixture_im", "abs_diff"]),
        &rows,
    )
}

#[derive(Serialize)]
struct MomentRow {
    k: u32,
    cumulant: f64,
    raw_moment: f64,
}

#[derive(Serialize)]
struct MomentsReport {
    model_kind: &'static str,
    mean: f64,
    variance: f64,
    total_shape: f64,
    orders: Vec<MomentRow>,
}

fn moments(a: &MomentsArgs) -> CliResult<()> {
    if a.kmax == 0 {
        return Err(CliError::Config("kmax must be at least 1".into()));
    }
    let model = load_model(&a.model)?;
    let (tail, k_max) = (a.mixture.tail_tol, a.mixture.k_max);
    let report = match &model {
        Model::Bilateral(m) => {
            let rep = m.mixture(tail, k_max)?;
            MomentsReport {
                model_kind: "bilateral",
                mean: m.mean(),
                variance: m.variance(),
                total_shape: m.total_shape(),
                orders: (1..=a.kmax)
                    .map(|k| Ok(MomentRow { k, cumulant: m.cumulant(k), raw_moment: rep.moment(k)? }))
                    .collect::<bilgamma::Result<_>>()?,
            }
        }
        Model::GammaDriven(g) => {
            let mix = g.mixture(tail, k_max)?;
            MomentsReport {
                model_kind: "gamma_driven",
                mean: g.mean(),
                variance: g.variance(),
                total_shape: g.total_shape(),
                orders: (1..=a.kmax)
                    .map(|k| Ok(MomentRow { k, cumulant: g.cumulant(k), raw_moment: mix.raw_moment(k)? }))
                    .collect::<bilgamma::Result<_>>()?,
            }
        }
    };
    write_json(a.out.as_deref(), &report)
}

fn sample(a: &SampleArgs) -> CliResult<()> {
    let model = load_model(&a.model)?;
    let mut rng = RandomStream::new(a.seed, 0);
    let (tail, k_max) = (a.mixture.tail_tol, a.mixture.k_max);
    let draws = match (&model, a.method) {
        (Model::Bilateral(m), SampleMethod::Direct) => sample_law(m, a.n, &mut rng)?,
        (Model::GammaDriven(g), SampleMethod::Direct) => sample_law(g, a.n, &mut rng)?,
        (Model::Bilateral(m), SampleMethod::Mixture) => sample_tn_mixture(&m.mixture(tail, k_max)?, a.n, &mut rng)?,
        (Model::GammaDriven(g), SampleMethod::Mixture) => {
            let sampler = MixtureSampler::new(&g.mixture(tail, k_max)?)?;
            par_fill(a.n, &mut rng, |r| sampler.draw(r))
        }
    };
    let rows: Vec<Vec<Option<f64>>> = draws.into_iter().map(|x| vec![Some(x)]).collect();
    write_csv(a.out.as_deref(), &header(&["x"]), &rows)
}

#[derive(Serialize)]
struct KappaReport {
    defined: bool,
    g_n: f64,
    h_n: f64,
    kappa_n: Option<f64>,
}

#[derive(Serialize)]
struct D3Terms {
    scale: f64,
    asymmetry: f64,
    shape: f64,
    mean: f64,
}

#[derive(Serialize)]
struct D3Report {
    target: serde_json::Value,
    value: f64,
    terms: D3Terms,
    mean_tn: f64,
    mean_target: f64,
}

impl D3Report {
    fn new(target: serde_json::Value, b: &D3Bound) -> Self {
        let [scale, asymmetry, shape, mean] = b.terms;
        Self {
            target,
            value: b.value(),
            terms: D3Terms {
                scale,
                asymmetry,
                shape,
                mean,
            },
            mean_tn: b.mean_tn,
            mean_target: b.mean_target,
        }
    }
}

#[derive(Serialize)]
struct ShapeBound {
    label: &'static str,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    positive: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    negative: Option<f64>,
}

#[derive(Serialize)]
struct CompoundPoissonReport {
    label: &'static str,
    scale: f64,
    c: f64,
}

#[derive(Serialize)]
struct BoundsReport {
    constants: BoundConstants,
    constants_default: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa: Option<KappaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d3_bg: Option<D3Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d3_normal: Option<D3Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    two_sums: Option<ShapeBound>,
    #[serde(skip_serializing_if = "Option::is_none")]
    compound_poisson: Option<CompoundPoissonReport>,
}

fn bounds(a: &BoundsArgs) -> CliResult<()> {
    let model = load_model(&a.model)?;
    let constants = BoundConstants::new(a.c, a.c1, a.c2).map_err(|e| CliError::Config(e.to_string()))?;
    let defaults = constants.is_default();
    let label = if defaults { "bound shape" } else { "bound" };
    let mut report = BoundsReport {
        constants,
        constants_default: defaults,
        kappa: None,
        d3_bg: None,
        d3_normal: None,
        two_sums: None,
        compound_poisson: None,
    };
    if let Model::Bilateral(m) = &model {
        report.kappa = Some(match kappa_inputs(m) {
            Ok(k) => KappaReport {
                defined: true,
                g_n: k.g_n,
                h_n: k.h_n,
                kappa_n: Some(k.kappa_n),
            },
            Err(Error::KappaUndefined { g_n, h_n }) => KappaReport {
                defined: false,
                g_n,
                h_n,
                kappa_n: None,
            },
            Err(e) => return Err(e.into()),
        });
        report.compound_poisson = Some(CompoundPoissonReport {
            label,
            scale: compound_poisson_scale(m),
            c: constants.c,
        });
    }
    if let Some(path) = &a.target {
        let target = load_target(path)?;
        let m = model.bilateral("a bilateral gamma target")?;
        let b = bound_d3_bg(m, &target)?;
        let t = serde_json::to_value(target).map_err(|e| CliError::Config(e.to_string()))?;
        report.d3_bg = Some(D3Report::new(t, &b));
    }
    if let Some(sigma) = a.sigma {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(CliError::Config(format!("sigma must be positive, got {sigma}")));
        }
        let m = model.bilateral("a normal target")?;
        let b = bound_d3_normal(m, sigma)?;
        report.d3_normal = Some(D3Report::new(serde_json::json!({ "sigma": sigma }), &b));
    }
    if let Some(path) = &a.other {
        let other = load_model(path)?;
        report.two_sums = Some(match (&model, &other) {
            (Model::Bilateral(x), Model::Bilateral(y)) => {
                let b = bound_two_sums(x, y, &constants)?;
                ShapeBound {
                    label,
                    value: b.value(),
                    positive: Some(b.positive),
                    negative: Some(b.negative),
                }
            }
            (Model::GammaDriven(x), Model::GammaDriven(y)) => ShapeBound {
                label,
                value: bound_two_sums_gamma(x, y, &constants)?,
                positive: None,
                negative: None,
            },
            _ => return Err(CliError::Config("--other must have the same kind as --model".into())),
        });
    }
    write_json(a.out.as_deref(), &report)
}

fn cp_sweep(a: &CpSweepArgs) -> CliResult<()> {
    let model = load_model(&a.model)?;
    let m = model.bilateral("cp-sweep")?;
    if a.m.is_empty() || a.m.contains(&0) {
        return Err(CliError::Config("--m needs a nonempty list of indices >= 1".into()));
    }
    if a.n < 1 {
        return Err(CliError::Config("--n must be at least 1".into()));
    }
    if !(a.c > 0.0 && a.c.is_finite()) {
        return Err(CliError::Config(format!("--c must be positive, got {}", a.c)));
    }
    let mut rng = RandomStream::new(a.seed, 0);
    let sweep = verify::compound_poisson_sweep(m, &a.m, a.n, &mut rng)?;
    let noise = ks_noise(a.n, a.n);
    let c_fit = sweep[0].d_k / sweep[0].bound_shape;
    let rows: Vec<Vec<Option<f64>>> = sweep
        .iter()
        .map(|p| {
            vec![
                Some(p.m as f64),
                Some(p.d_k),
                Some(noise),
                Some(a.c * p.bound_shape),
                Some(c_fit * p.bound_shape),
            ]
        })
        .collect();
    write_csv(
        a.out.as_deref(),
        &header(&["m", "d_k", "ks_noise", "bound", "bound_fitted"]),
        &rows,
    )
}

#[derive(Serialize)]
struct PriceReport {
    method: &'static str,
    price: f64,
    /// Quadrature or truncation error estimate of a deterministic price.
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_draws: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    martingale_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    martingale_diagnostics: Option<MartingaleDiagnostics>,
    inputs: PricingInputs,
    tolerances: QuadratureSpec,
}

fn price(a: &PriceArgs) -> CliResult<()> {
    let request = load_pricing(&a.pricing)?;
    let model_path = a
        .model
        .clone()
        .or(request.model.clone())
        .ok_or_else(|| CliError::Config("no model: pass --model or set `model` in the pricing file".into()))?;
    let model = load_model(&model_path)?;
    let spec = a.tolerances.apply(request.tolerances.unwrap_or_default())?;
    let inputs = request.inputs;
    let (tail, k_max) = (a.mixture.tail_tol, a.mixture.k_max);

    let method = match (a.method, &model) {
        (PriceMethod::Auto, Model::GammaDriven(_)) if (inputs.spot() - inputs.strike).abs() <= 1e-12 * inputs.strike => {
            PriceMethod::Atm
        }
        (PriceMethod::Auto, Model::GammaDriven(_)) if inputs.strike > inputs.spot() => PriceMethod::Series,
        (PriceMethod::Auto, _) => PriceMethod::Integral,
        (m, _) => m,
    };
    let mut report = PriceReport {
        method: "",
        price: f64::NAN,
        error: None,
        std_error: None,
        n_draws: None,
        seed: None,
        martingale_gap: match &model {
            Model::Bilateral(m) => martingale_gap(m, inputs.rate, inputs.dividend)?,
            Model::GammaDriven(g) => martingale_gap(g, inputs.rate, inputs.dividend)?,
        },
        martingale_diagnostics: match &model {
            Model::Bilateral(m) => Some(martingale_diagnostics(m, &m.mixture(tail, k_max)?, inputs.rate, inputs.dividend)?),
            Model::GammaDriven(_) => None,
        },
        inputs,
        tolerances: spec,
    };
    match method {
        PriceMethod::Integral => {
            let p = match &model {
                Model::Bilateral(m) => price_call_integral(m, &inputs, &spec)?,
                Model::GammaDriven(g) => price_call_integral(g, &inputs, &spec)?,
            };
            report.method = "integral";
            report.price = p.price;
            report.error = Some(p.error);
        }
        PriceMethod::Series | PriceMethod::Atm => {
            let Model::GammaDriven(g) = &model else {
                return Err(CliError::Config("series and atm prices need a gamma-driven model (`terms`)".into()));
            };
            let mix = g.mixture(tail, k_max)?;
            let (name, p) = if method == PriceMethod::Series {
                ("series", price_call_gamma_driven(&mix, &inputs)?)
            } else {
                ("atm", price_call_atm(&mix, &inputs)?)
            };
            report.method = name;
            report.price = p.price;
            report.error = Some(p.error);
        }
        PriceMethod::MonteCarlo => {
            let seed = a
                .seed
                .ok_or_else(|| CliError::Config("monte-carlo pricing needs --seed".into()))?;
            let mut rng = RandomStream::new(seed, 0);
            let est = match &model {
                Model::Bilateral(m) => price_call_monte_carlo(m, &inputs, a.n, &mut rng)?,
                Model::GammaDriven(g) => price_call_monte_carlo(g, &inputs, a.n, &mut rng)?,
            };
            report.method = "monte-carlo";
            report.price = est.value;
            report.std_error = Some(est.std_error);
            report.n_draws = Some(est.n);
            report.seed = Some(seed);
        }
        PriceMethod::Auto => unreachable!("auto is resolved above"),
    }
    write_json(a.out.as_deref(), &report)
}

/// Parses `0:step:end` into an increasing grid whose last point is `end`.
fn parse_tgrid(spec: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Config(format!("--tgrid must look like 0:step:end, got `{spec}`"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<CliResult<_>>()?;
    let [start, step, end] = parts[..] else {
        return Err(bad());
    };
    if start != 0.0 || !(step > 0.0) || !(end > start) || !end.is_finite() {
        return Err(CliError::Config(format!(
            "--tgrid needs start 0, a positive step and end > 0, got `{spec}`"
        )));
    }
    let steps = ((end - start) / step - 1e-9).ceil().max(1.0) as usize;
    Ok((0..=steps).map(|i| if i == steps { end } else { start + step * i as f64 }).collect())
}

fn simulate(a: &SimulateArgs) -> CliResult<()> {
    let model = load_model(&a.model)?;
    let grid = parse_tgrid(&a.tgrid)?;
    if a.paths == 0 {
        return Err(CliError::Config("--paths must be at least 1".into()));
    }
    let mut rng = RandomStream::new(a.seed, 0);
    let paths = match &model {
        Model::Bilateral(m) => sample_paths(m, &grid, a.paths, &mut rng)?,
        Model::GammaDriven(g) => sample_paths(g, &grid, a.paths, &mut rng)?,
    };
    let mut names = vec!["t".to_string()];
    names.extend((0..a.paths).map(|i| format!("path_{i}")));
    let rows: Vec<Vec<Option<f64>>> = grid
        .iter()
        .enumerate()
        .map(|(i, &t)| std::iter::once(Some(t)).chain(paths.iter().map(|p| Some(p[i]))).collect())
        .collect();
    write_csv(a.out.as_deref(), &names, &rows)
}

fn verify_cmd(a: &VerifyArgs) -> CliResult<()> {
    let suite = match a.suite {
        SuiteArg::Quick => Suite::Quick,
        SuiteArg::Full => Suite::Full,
    };
    let mut config = SuiteConfig::new(suite, a.seed);
    if let Some(FaultArg::GammaRecursion) = a.inject_fault {
        config = config.with_fault(Fault::GammaRecursion);
    }
    let report = verify::run(&config);
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("{}", c.summary());
    }
    eprintln!("{} of {} checks passed", report.n_checks - report.n_failed, report.n_checks);
    write_json(a.out.as_deref(), &report)?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::VerifyFailed(report.n_failed))
    }
}
