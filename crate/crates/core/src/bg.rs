//! The bilateral gamma law `BG(α, p, β, q)`: the difference `X - Y` of
//! independent `X ~ Ga(α, p)` and `Y ~ Ga(β, q)` (rates α, β; shapes p, q).

use num_complex::Complex64;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::lincomb::inversion::{invert_cf, InversionTarget};
use crate::sampling::{par_fill, RandomStream};
use crate::special::{ln_gamma, ln_shifted_gamma_integral, QuadratureSpec};

/// Parameters of one bilateral gamma law. Deserialization validates them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBg")]
pub struct BgParams {
    pub alpha: f64,
    pub p: f64,
    pub beta: f64,
    pub q: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBg {
    alpha: f64,
    p: f64,
    beta: f64,
    q: f64,
}

impl TryFrom<RawBg> for BgParams {
    type Error = Error;

    fn try_from(raw: RawBg) -> Result<Self> {
        Self::new(raw.alpha, raw.p, raw.beta, raw.q)
    }
}

impl BgParams {
    pub fn new(alpha: f64, p: f64, beta: f64, q: f64) -> Result<Self> {
        let params = Self { alpha, p, beta, q };
        params.validate()?;
        Ok(params)
    }

    /// Variance gamma `VG(α, β, p)`, i.e. `BG(α, p, β, p)`.
    pub fn variance_gamma(alpha: f64, beta: f64, p: f64) -> Result<Self> {
        Self::new(alpha, p, beta, p)
    }

    pub fn validate(&self) -> Result<()> {
        positive(0, "alpha", self.alpha)?;
        positive(0, "p", self.p)?;
        positive(0, "beta", self.beta)?;
        positive(0, "q", self.q)?;
        Ok(())
    }

    /// `φ(z) = (1 - iz/α)^{-p} (1 + iz/β)^{-q}`.
    pub fn cf(&self, z: f64) -> Complex64 {
        let pos = Complex64::new(1.0, -z / self.alpha).ln() * (-self.p);
        let neg = Complex64::new(1.0, z / self.beta).ln() * (-self.q);
        (pos + neg).exp()
    }

    /// Density from the convolution of the two gamma densities.
    ///
    /// For `x > 0` the integral over the negative part is
    /// `α^p β^q e^{-αx} / (Γ(p)Γ(q)) ∫_0^∞ s^{q-1} (x+s)^{p-1} e^{-(α+β)s} ds`;
    /// `x < 0` mirrors the roles of the two sides. At the origin the density
    /// is taken from Fourier inversion, and is singular when `p + q ≤ 1`.
    pub fn pdf(&self, x: f64, spec: &QuadratureSpec) -> Result<f64> {
        spec.validate()?;
        if x == 0.0 {
            if self.p + self.q <= 1.0 {
                return Err(Error::SingularPoint(0.0));
            }
            return self.pdf_fourier(0.0, spec);
        }
        Ok(ln_convolution_pdf(self.alpha, self.p, self.beta, self.q, x, spec)?.exp())
    }

    /// Density by numerical inversion of the characteristic function.
    pub fn pdf_fourier(&self, x: f64, spec: &QuadratureSpec) -> Result<f64> {
        Ok(invert_cf(self, x, spec)?.value)
    }

    /// `ν(u) = (p/u) e^{-αu}` for `u > 0` and `(q/|u|) e^{-β|u|}` for `u < 0`.
    pub fn levy_density(&self, u: f64) -> Result<f64> {
        levy_side_density(u, &[(self.alpha, self.p)], &[(self.beta, self.q)])
    }

    /// `C_k = (k-1)! (p/α^k + (-1)^k q/β^k)`.
    pub fn cumulant(&self, k: u32) -> f64 {
        assert!(k >= 1, "cumulant order starts at 1");
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let fact = ln_gamma(k as f64).exp();
        fact * (self.p / self.alpha.powi(k as i32) + sign * self.q / self.beta.powi(k as i32))
    }

    pub fn mean(&self) -> f64 {
        self.cumulant(1)
    }

    pub fn variance(&self) -> f64 {
        self.cumulant(2)
    }

    /// `n` independent draws, each the difference of two exact gamma variates.
    pub fn sample(&self, n: usize, rng: &mut RandomStream) -> Result<Vec<f64>> {
        self.validate()?;
        let pos = Gamma::new(self.p, 1.0 / self.alpha).map_err(|e| Error::Domain(e.to_string()))?;
        let neg = Gamma::new(self.q, 1.0 / self.beta).map_err(|e| Error::Domain(e.to_string()))?;
        Ok(par_fill(n, rng, |r| pos.sample(r) - neg.sample(r)))
    }
}

impl InversionTarget for BgParams {
    fn cf(&self, z: f64) -> Complex64 {
        BgParams::cf(self, z)
    }

    fn total_shape(&self) -> f64 {
        self.p + self.q
    }

    fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }
}

/// `ln` of the `BG(α, p, β, q)` density at `x ≠ 0` by the convolution integral.
pub(crate) fn ln_convolution_pdf(
    alpha: f64,
    p: f64,
    beta: f64,
    q: f64,
    x: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let (ra, sa, rb, sb, y) = if x > 0.0 {
        (alpha, p, beta, q, x)
    } else {
        (beta, q, alpha, p, -x)
    };
    let prefactor = sa * ra.ln() + sb * rb.ln() - ln_gamma(sa) - ln_gamma(sb);
    let integral = ln_shifted_gamma_integral(sb, y, sa - 1.0, ra + rb, spec)?;
    Ok(prefactor - ra * y + integral)
}

/// Lévy density of a law whose positive jumps have kernel `Σ p_j e^{-λ_j u}/u`
/// and negative jumps `Σ q_j e^{-μ_j |u|}/|u|`, given as `(rate, shape)` pairs.
pub(crate) fn levy_side_density(u: f64, pos: &[(f64, f64)], neg: &[(f64, f64)]) -> Result<f64> {
    if u == 0.0 || !u.is_finite() {
        return Err(Error::Domain(format!("Lévy density is defined for finite u != 0, got {u}")));
    }
    let side = if u > 0.0 { pos } else { neg };
    let a = u.abs();
    Ok(side.iter().map(|&(rate, shape)| shape * (-rate * a).exp()).sum::<f64>() / a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::integrate_real_line_scaled;

    fn laplace() -> BgParams {
        BgParams::new(1.0, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn cf_reference_values() {
        let b = laplace();
        assert_eq!(b.cf(0.0), Complex64::new(1.0, 0.0));
        let v = b.cf(1.0);
        assert!((v.re - 0.5).abs() < 1e-15 && v.im.abs() < 1e-15);
        let g = BgParams::new(2.0, 3.0, 5.0, 0.5).unwrap();
        for &z in &[-3.0, 0.4, 1.7, 12.0] {
            let a = g.cf(z);
            let b = g.cf(-z);
            assert!(a.norm() <= 1.0);
            assert!((a - b.conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn cf_matches_empirical_cf() {
        let g = BgParams::new(2.0, 3.0, 5.0, 0.5).unwrap();
        let n = 1_000_000;
        let draws = g.sample(n, &mut RandomStream::new(2024, 0)).unwrap();
        let z = 1.7;
        let (mut c, mut s, mut c2, mut s2) = (0.0, 0.0, 0.0, 0.0);
        for x in &draws {
            let (si, co) = (z * x).sin_cos();
            c += co;
            s += si;
            c2 += co * co;
            s2 += si * si;
        }
        let nf = n as f64;
        let (mc, ms) = (c / nf, s / nf);
        let se_c = ((c2 / nf - mc * mc) / nf).sqrt();
        let se_s = ((s2 / nf - ms * ms) / nf).sqrt();
        let exact = g.cf(z);
        assert!((mc - exact.re).abs() < 4.0 * se_c);
        assert!((ms - exact.im).abs() < 4.0 * se_s);
    }

    #[test]
    fn laplace_density() {
        let b = laplace();
        let spec = QuadratureSpec::default();
        let e = 0.5 * (-1.0f64).exp();
        assert!((b.pdf(1.0, &spec).unwrap() - e).abs() < 1e-12);
        assert!((b.pdf(-1.0, &spec).unwrap() - e).abs() < 1e-12);
        assert!((b.pdf(0.0, &spec).unwrap() - 0.5).abs() < 1e-9);
        for &a in &[0.5, 2.0] {
            let l = BgParams::new(a, 1.0, a, 1.0).unwrap();
            for &x in &[-3.0, -0.2, 0.01, 4.0] {
                let exact = 0.5 * a * (-a * f64::abs(x)).exp();
                assert!((l.pdf(x, &spec).unwrap() - exact).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn convolution_matches_inversion() {
        let g = BgParams::new(2.0, 2.0, 3.0, 1.0).unwrap();
        let spec = QuadratureSpec::default();
        for &x in &[-2.0, -0.3, 0.7, 1.5, 4.0] {
            let a = g.pdf(x, &spec).unwrap();
            let b = g.pdf_fourier(x, &spec).unwrap();
            assert!((a - b).abs() < 1e-7, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn density_normalizes() {
        let spec = QuadratureSpec::default();
        for g in [
            BgParams::new(2.0, 2.0, 3.0, 1.0).unwrap(),
            BgParams::new(1.3, 0.4, 0.7, 0.45).unwrap(),
            BgParams::new(4.0, 6.5, 2.0, 3.0).unwrap(),
        ] {
            let mut fine = spec;
            fine.max_subdivisions = 4000;
            let total = integrate_real_line_scaled(|x| g.pdf(x, &spec).unwrap(), 0.0, g.variance().sqrt(), &fine)
                .unwrap()
                .value;
            assert!((total - 1.0).abs() < 1e-6, "{g:?}: {total}");
        }
    }

    #[test]
    fn singular_origin_is_reported() {
        let g = BgParams::new(1.0, 0.3, 1.0, 0.5).unwrap();
        assert_eq!(g.pdf(0.0, &QuadratureSpec::default()), Err(Error::SingularPoint(0.0)));
        assert!(g.pdf(0.1, &QuadratureSpec::default()).unwrap() > 0.0);
    }

    #[test]
    fn symmetric_variance_gamma() {
        let g = BgParams::variance_gamma(1.7, 1.7, 0.8).unwrap();
        let spec = QuadratureSpec::default();
        for &x in &[0.05, 0.5, 2.5] {
            let a = g.pdf(x, &spec).unwrap();
            let b = g.pdf(-x, &spec).unwrap();
            assert!((a - b).abs() <= 1e-13 * a);
        }
    }

    #[test]
    fn gamma_limit() {
        let g = BgParams::new(1.5, 2.0, 1e6, 1.0).unwrap();
        let spec = QuadratureSpec::default();
        let ga = |x: f64| (2.0 * 1.5f64.ln() + x.ln() - 1.5 * x - ln_gamma(2.0)).exp();
        for i in 0..=99 {
            let x = 0.1 + i as f64 * 0.1;
            assert!((g.pdf(x, &spec).unwrap() - ga(x)).abs() < 1e-3);
        }
    }

    #[test]
    fn levy_density_values() {
        let b = laplace();
        let e = (-1.0f64).exp();
        assert!((b.levy_density(1.0).unwrap() - e).abs() < 1e-15);
        assert!((b.levy_density(-1.0).unwrap() - e).abs() < 1e-15);
        let g = BgParams::new(2.0, 3.0, 5.0, 0.5).unwrap();
        assert!((g.levy_density(0.1).unwrap() - 30.0 * (-0.2f64).exp()).abs() < 1e-12);
        assert!(matches!(g.levy_density(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn cumulant_values() {
        let b = laplace();
        assert_eq!(b.cumulant(1), 0.0);
        assert!((b.cumulant(4) - 12.0).abs() < 1e-12);
        let g = BgParams::new(2.0, 3.0, 5.0, 0.5).unwrap();
        assert!((g.cumulant(2) - 0.77).abs() < 1e-14);
        assert!((g.mean() - 1.4).abs() < 1e-14);
    }

    #[test]
    fn cumulants_match_levy_moments() {
        // C_k = ∫ u^k ν(du); the factorial comes out of ∫_0^∞ u^{k-1} e^{-αu} du.
        let g = BgParams::new(2.0, 3.0, 5.0, 0.5).unwrap();
        let spec = QuadratureSpec::default();
        for k in 1..=4 {
            let m = integrate_real_line_scaled(
                |u: f64| if u == 0.0 { 0.0 } else { u.powi(k) * g.levy_density(u).unwrap() },
                0.0,
                0.5,
                &spec,
            )
            .unwrap()
            .value;
            let c = g.cumulant(k as u32);
            assert!((m - c).abs() <= 1e-8 * c.abs().max(1e-300), "k={k}: {m} vs {c}");
        }
    }

    #[test]
    fn sample_moments_and_determinism() {
        let b = laplace();
        let draws = b.sample(1_000_000, &mut RandomStream::new(7, 1)).unwrap();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        assert!(mean.abs() < 4.0 * (2.0f64 / 1e6).sqrt());
        let g = BgParams::new(2.0, 3.0, 5.0, 0.5).unwrap();
        let draws = g.sample(1_000_000, &mut RandomStream::new(8, 1)).unwrap();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        assert!((mean - 1.4).abs() < 4.0 * (g.variance() / 1e6).sqrt());
        let a = g.sample(1, &mut RandomStream::new(99, 3)).unwrap();
        let b2 = g.sample(1, &mut RandomStream::new(99, 3)).unwrap();
        assert_eq!(a, b2);
    }
}
