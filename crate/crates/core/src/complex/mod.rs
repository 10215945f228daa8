//! Pure simplicial complexes, balanced weights, links and partite structure.

mod complex;
pub mod io;
mod partite;
mod simplex;
mod weight;

pub use complex::SimplicialComplex;
pub use partite::{
    check_regularity, detect_partite, partite_weight_residuals, set_membership, simplices_spanning,
    PartiteStructure, Regularity,
};
pub use simplex::Simplex;
pub use weight::{weight_identity_residuals, WeightFunction, WeightIdentityResiduals, WeightedComplex};
