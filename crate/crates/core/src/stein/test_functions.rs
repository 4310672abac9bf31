//! Test functions with analytically known derivative bounds and closed-form
//! exponential transforms.

use std::f64::consts::PI;

use crate::special::erfcx;

/// Highest derivative order for which the sup-norms below are tabulated.
pub const MAX_CERTIFIED_ORDER: u32 = 3;

/// Base shapes of the shipped test functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Constant,
    Sine,
    Cosine,
    /// `e^{-x²/2}`
    Gaussian,
    /// `x e^{-x²/2}`
    XGaussian,
}

/// `h(x) = amplitude · shape(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub shape: Shape,
    pub amplitude: f64,
}

/// `sup |d^k/dx^k e^{-x²/2}|` for `k = 0..=4`.
fn gaussian_sup(k: u32) -> f64 {
    match k {
        0 => 1.0,
        1 => (-0.5f64).exp(),
        2 => 1.0,
        3 => {
            // Maximum of |x(3 - x²)| e^{-x²/2} at x² = 3 - √6.
            let x2 = 3.0 - 6f64.sqrt();
            x2.sqrt() * (3.0 - x2) * (-0.5 * x2).exp()
        }
        4 => 3.0,
        _ => f64::NAN,
    }
}

impl TestFunction {
    pub const fn new(shape: Shape) -> Self {
        Self { shape, amplitude: 1.0 }
    }

    pub const fn constant() -> Self {
        Self::new(Shape::Constant)
    }

    pub const fn sine() -> Self {
        Self::new(Shape::Sine)
    }

    pub const fn cosine() -> Self {
        Self::new(Shape::Cosine)
    }

    pub const fn gaussian() -> Self {
        Self::new(Shape::Gaussian)
    }

    pub const fn x_gaussian() -> Self {
        Self::new(Shape::XGaussian)
    }

    /// `e^{-x²/2}` rescaled so that its first three derivatives are bounded by 1.
    pub fn w3_gaussian() -> Self {
        Self::gaussian().scaled(1.0 / gaussian_sup(3))
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            amplitude: self.amplitude * factor,
            ..self
        }
    }

    pub fn name(&self) -> String {
        let base = match self.shape {
            Shape::Constant => "1",
            Shape::Sine => "sin(x)",
            Shape::Cosine => "cos(x)",
            Shape::Gaussian => "exp(-x^2/2)",
            Shape::XGaussian => "x*exp(-x^2/2)",
        };
        if self.amplitude == 1.0 {
            base.to_string()
        } else {
            format!("{:.6}*{base}", self.amplitude)
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let v = match self.shape {
            Shape::Constant => 1.0,
            Shape::Sine => x.sin(),
            Shape::Cosine => x.cos(),
            Shape::Gaussian => (-0.5 * x * x).exp(),
            Shape::XGaussian => x * (-0.5 * x * x).exp(),
        };
        self.amplitude * v
    }

    /// `sup_x |h^{(k)}(x)|`, known in closed form for `k <= MAX_CERTIFIED_ORDER`.
    pub fn derivative_sup(&self, k: u32) -> f64 {
        let base = match self.shape {
            Shape::Constant => {
                if k == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            Shape::Sine | Shape::Cosine => 1.0,
            Shape::Gaussian => gaussian_sup(k),
            // x e^{-x²/2} is minus the derivative of the Gaussian.
            Shape::XGaussian => gaussian_sup(k + 1),
        };
        self.amplitude.abs() * base
    }

    /// Whether `‖h^{(k)}‖ <= 1` for every `k = 0..=r`.
    pub fn in_class(&self, r: u32) -> bool {
        r <= MAX_CERTIFIED_ORDER && (0..=r).all(|k| self.derivative_sup(k) <= 1.0 + 1e-12)
    }

    /// Largest certified `r` with `h` in the class `W_r`, if any.
    pub fn derivative_bound_order(&self) -> Option<u32> {
        (0..=MAX_CERTIFIED_ORDER).rev().find(|&r| self.in_class(r))
    }

    /// `∫_0^∞ h(x + sign·u) e^{-rate·u} du` for `sign = ±1` and `rate > 0`.
    pub fn exp_transform(&self, x: f64, rate: f64, sign: f64) -> f64 {
        let l = rate;
        let v = match self.shape {
            Shape::Constant => 1.0 / l,
            Shape::Sine => (l * x.sin() + sign * x.cos()) / (l * l + 1.0),
            Shape::Cosine => (l * x.cos() - sign * x.sin()) / (l * l + 1.0),
            Shape::Gaussian => gaussian_transform(sign * x, l),
            Shape::XGaussian => {
                // x e^{-x²/2} = -g'(x); integrate by parts.
                let g = (-0.5 * x * x).exp();
                sign * (g - l * gaussian_transform(sign * x, l))
            }
        };
        self.amplitude * v
    }
}

/// `∫_0^∞ e^{-(x+u)²/2 - λu} du`, free of overflow for any sign of `x + λ`.
fn gaussian_transform(x: f64, lambda: f64) -> f64 {
    let half_root_pi = (0.5 * PI).sqrt();
    let a = (x + lambda) / std::f64::consts::SQRT_2;
    let g = (-0.5 * x * x).exp();
    if a >= 0.0 {
        half_root_pi * g * erfcx(a)
    } else {
        half_root_pi * (2.0 * (lambda * x + 0.5 * lambda * lambda).exp() - g * erfcx(-a))
    }
}
