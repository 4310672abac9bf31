//! Stein-type characterization of `T_n`, empirical distances and explicit
//! approximation bounds.

pub mod bounds;
pub mod distance;
pub mod operator;
pub mod test_functions;

pub use bounds::{
    bound_compound_poisson_k, bound_d3_bg, bound_d3_normal, bound_d3_vg, bound_two_sums,
    bound_two_sums_gamma, compound_poisson_scale, kappa_inputs, BoundConstants, D3Bound,
    KappaInputs, TwoSumBound,
};
pub use distance::{empirical_kolmogorov, empirical_wasserstein1, ks_critical_value, ks_noise};
pub use operator::{stein_apply, stein_apply_closed, stein_identity_check, IdentityCheck};
pub use test_functions::{Shape, TestFunction};
