//! Density by Fourier inversion, `h(x) = (1/π) ∫_0^∞ Re(e^{-ixz} φ(z)) dz`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{integrate_oscillatory, integrate_upper, QuadratureSpec};

/// A law whose density can be recovered from its characteristic function.
pub trait InversionTarget {
    fn cf(&self, z: f64) -> Complex64;
    /// Sum of all gamma shapes; `|φ(z)|` decays like `|z|^{-total_shape}`.
    fn total_shape(&self) -> f64;
    fn std_dev(&self) -> f64;
}

/// Inverted density with the raw quadrature value before clamping at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InversionResult {
    pub value: f64,
    pub raw: f64,
    pub error: f64,
}

impl InversionResult {
    pub fn clamped(&self) -> bool {
        self.raw < 0.0
    }
}

/// Inverts the characteristic function of `target` at `x`.
///
/// Requires a total shape above 1 so that `φ` is absolutely integrable.
/// Small negative values produced by quadrature noise are clamped to 0.
pub fn invert_cf<T: InversionTarget + ?Sized>(
    target: &T,
    x: f64,
    spec: &QuadratureSpec,
) -> Result<InversionResult> {
    spec.validate()?;
    let total_shape = target.total_shape();
    if !(total_shape > 1.0) {
        return Err(Error::InversionNotIntegrable { total_shape });
    }
    if !x.is_finite() {
        return Err(Error::Domain(format!("density argument must be finite, got {x}")));
    }
    let scale = 1.0 / target.std_dev();
    let integrand = |z: f64| {
        let phi = target.cf(z);
        let (s, c) = (x * z).sin_cos();
        // Re(e^{-ixz} φ) = cos(xz) Re φ + sin(xz) Im φ
        c * phi.re + s * phi.im
    };
    let spec_scaled = spec.scaled(std::f64::consts::PI);
    let est = if x == 0.0 {
        integrate_upper(integrand, 0.0, scale, &spec_scaled)?
    } else {
        integrate_oscillatory(integrand, x, scale, &spec_scaled)?
    };
    let raw = est.value / std::f64::consts::PI;
    Ok(InversionResult {
        value: raw.max(0.0),
        raw,
        error: est.error / std::f64::consts::PI,
    })
}
