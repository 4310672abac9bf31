//! Special functions and quadrature.

pub mod functions;
pub mod oscillatory;
pub mod quadrature;

pub use functions::{
    conf_hypergeom_f, erfcx, ln_conf_hypergeom_f, ln_gamma, ln_shifted_gamma_integral,
    regularized_upper_incomplete_gamma, upper_incomplete_gamma,
};
pub use oscillatory::{integrate_oscillatory, wynn_epsilon};
pub use quadrature::{
    integrate, integrate_lower, integrate_real_line, integrate_real_line_scaled, integrate_upper,
    integrate_with_points, Estimate, QuadratureSpec,
};
