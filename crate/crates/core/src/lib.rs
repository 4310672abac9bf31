//! Bilateral gamma distributions and weighted sums of independent bilateral
//! gamma variables: densities, characteristic functions, Stein-type
//! approximation bounds, exact sampling and option pricing.

pub mod bg;
pub mod error;
pub mod finance;
pub mod lincomb;
pub mod models;
pub mod sampling;
pub mod special;
pub mod stein;
pub mod verify;

pub use bg::BgParams;
pub use error::{Error, Result};
pub use lincomb::{
    Component, GammaMixture, GammaSumModel, GammaTerm, Law, LinearCombinationModel,
    MixtureRepresentation,
};
pub use sampling::RandomStream;
pub use special::QuadratureSpec;
