//! Adaptive Gauss–Kronrod (10/21) quadrature with interval bisection.
//!
//! Infinite ranges are compactified with `t = u / (1 - u)` (optionally
//! rescaled). The integrand is never evaluated at the endpoints of a
//! subinterval, so integrable endpoint singularities are tolerated.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and work limit for every adaptive integration in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.max_subdivisions == 0 {
            return Err(Error::Domain(format!(
                "quadrature tolerances must be positive and max_subdivisions >= 1, got {self:?}"
            )));
        }
        Ok(())
    }

    /// Same work limit, tolerances scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            max_subdivisions: self.max_subdivisions,
        }
    }

    pub(crate) fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// An integral value together with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
        }
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_727,
    0.054_755_896_574_351_996,
    0.075_039_674_810_919_953,
    0.093_125_454_583_697_606,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_138,
    0.149_451_349_150_580_59,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_36,
    0.295_524_224_714_752_87,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    floor: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Kronrod value, error estimate and the rounding floor of that estimate.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = WGK[10] * fc;
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    (value, err, floor)
}

/// Adaptive integration of `f` over the finite interval `[a, b]`, starting from
/// the partition induced by `points` (sorted interior breakpoints).
pub fn integrate_with_points<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    spec.validate()?;
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!(
            "finite interval required, got [{a}, {b}]"
        )));
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts = vec![lo];
    cuts.extend(points.iter().copied().filter(|p| *p > lo && *p < hi));
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut total_floor = 0.0;
    for w in cuts.windows(2) {
        let (value, error, floor) = gk21(&f, w[0], w[1]);
        total += value;
        total_err += error;
        total_floor += floor;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value,
            error,
            floor,
        });
    }
    let mut subdivisions = heap.len();
    // Error left over once every segment sits at its rounding floor cannot be
    // reduced by further bisection.
    while total_err > spec.target(total).max(2.0 * total_floor) {
        if !total.is_finite() {
            break;
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature",
                estimate: sign * total,
                error: total_err,
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted by floating point; accept its contribution.
            heap.push(Segment {
                error: 0.0,
                ..worst
            });
            total_err -= worst.error;
            if heap.iter().all(|s| s.error == 0.0) {
                break;
            }
            continue;
        }
        let (v1, e1, r1) = gk21(&f, worst.a, mid);
        let (v2, e2, r2) = gk21(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        total_floor += r1 + r2 - worst.floor;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
            floor: r1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
            floor: r2,
        });
        subdivisions += 1;
    }
    // Re-sum to shed accumulated cancellation in the running totals.
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    if !value.is_finite() {
        return Err(Error::NonConvergence {
            what: "adaptive quadrature (non-finite integrand)",
            estimate: value,
            error,
        });
    }
    Ok(Estimate {
        value: sign * value,
        error,
    })
}

/// Adaptive integration over a finite interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    integrate_with_points(f, a, b, &[], spec)
}

/// `∫_a^∞ f(u) du` via `u = a + scale · t/(1 - t)`.
pub fn integrate_upper<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    if !(scale > 0.0) {
        return Err(Error::Domain(format!("scale must be positive, got {scale}")));
    }
    let g = |t: f64| {
        let one_minus = 1.0 - t;
        let u = a + scale * t / one_minus;
        let jac = scale / (one_minus * one_minus);
        let v = f(u);
        if v == 0.0 {
            0.0
        } else {
            v * jac
        }
    };
    integrate(g, 0.0, 1.0, spec)
}

/// `∫_{-∞}^b f(u) du`.
pub fn integrate_lower<F: Fn(f64) -> f64>(
    f: F,
    b: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    integrate_upper(|u| f(2.0 * b - u), b, scale, spec)
}

/// `∫_ℝ f(x) dx`, split at the origin into two compactified half-lines.
pub fn integrate_real_line<F: Fn(f64) -> f64>(f: F, spec: &QuadratureSpec) -> Result<f64> {
    Ok(integrate_real_line_scaled(f, 0.0, 1.0, spec)?.value)
}

/// `∫_ℝ f(x) dx`, split at `center` with compactification scale `scale`.
pub fn integrate_real_line_scaled<F: Fn(f64) -> f64>(
    f: F,
    center: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let half = spec.scaled(0.5);
    let right = integrate_upper(&f, center, scale, &half)?;
    let left = integrate_lower(&f, center, scale, &half)?;
    Ok(left + right)
}
