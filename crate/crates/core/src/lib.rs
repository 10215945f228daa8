pub mod cochain;
pub mod complex;
pub mod error;
pub mod garland;
pub mod generators;
pub mod mixing;
pub mod overlap;
pub mod rng;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};

pub type WeightedComplex64 = complex::WeightedComplex<f64>;
pub type WeightedComplex32 = complex::WeightedComplex<f32>;
pub type WeightFunction64 = complex::WeightFunction<f64>;
pub type WeightFunction32 = complex::WeightFunction<f32>;
pub type Cochain64 = cochain::Cochain<f64>;
pub type Cochain32 = cochain::Cochain<f32>;
pub type Operator64 = cochain::Operator<f64>;
pub type Operator32 = cochain::Operator<f32>;
