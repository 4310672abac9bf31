//! Linear combinations of independent bilateral gamma variables.

pub mod inversion;
pub mod law;
pub mod mixture;
pub mod model;

pub use inversion::{invert_cf, InversionResult, InversionTarget};
pub use law::{Law, LawSampler};
pub use mixture::{GammaMixture, MixtureRepresentation, DEFAULT_K_MAX, DEFAULT_TAIL_TOL};
pub use model::{Component, GammaSumModel, GammaTerm, LinearCombinationModel};
