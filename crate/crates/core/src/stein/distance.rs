//! Two-sample Kolmogorov and Wasserstein-1 distances.

use crate::error::{Error, Result};

fn sorted(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if sample.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain("sample contains NaN".into()));
    }
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

/// `sup_x |F_a(x) - F_b(x)|` for the empirical cdfs, exact over the pooled order statistics.
pub fn empirical_kolmogorov(sample_a: &[f64], sample_b: &[f64]) -> Result<f64> {
    let a = sorted(sample_a)?;
    let b = sorted(sample_b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup: f64 = 0.0;
    while i < a.len() && j < b.len() {
        // Step past every copy of the smallest remaining value in both samples.
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        sup = sup.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(sup)
}

/// `∫_0^1 |F_a^{-1}(t) - F_b^{-1}(t)| dt` for the empirical quantile functions.
///
/// For equal sizes this is the mean absolute difference of the sorted samples.
pub fn empirical_wasserstein1(sample_a: &[f64], sample_b: &[f64]) -> Result<f64> {
    let a = sorted(sample_a)?;
    let b = sorted(sample_b)?;
    if a.len() == b.len() {
        let total: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
        return Ok(total / a.len() as f64);
    }
    // Walk the merged quantile breakpoints k/na and l/nb.
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut t = 0.0;
    let mut total = 0.0;
    while i < na && j < nb {
        let ta = (i + 1) as f64 / na as f64;
        let tb = (j + 1) as f64 / nb as f64;
        let next = ta.min(tb);
        total += (next - t) * (a[i] - b[j]).abs();
        t = next;
        if ta <= next {
            i += 1;
        }
        if tb <= next {
            j += 1;
        }
    }
    Ok(total)
}

/// Large-sample mean of the two-sample statistic under the null,
/// `√(π/2) ln 2 · √((n+m)/(nm))`.
pub fn ks_noise(n: usize, m: usize) -> f64 {
    (0.5 * std::f64::consts::PI).sqrt() * std::f64::consts::LN_2 * ks_scale(n, m)
}

/// Asymptotic critical value of the two-sample statistic at level `alpha`,
/// `√(-ln(α/2)/2) · √((n+m)/(nm))`.
pub fn ks_critical_value(n: usize, m: usize, alpha: f64) -> f64 {
    (-(0.5 * alpha).ln() / 2.0).sqrt() * ks_scale(n, m)
}

fn ks_scale(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    ((n + m) / (n * m)).sqrt()
}
