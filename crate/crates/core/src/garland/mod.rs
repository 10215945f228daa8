//! Localization of cochains to links and the Garland-method identities.

mod bounds;
mod identities;

use rayon::prelude::*;

use crate::cochain::{lower_walk, nonlazy_upper, partite_projection, Cochain, Operator};
use crate::complex::{PartiteStructure, Simplex, WeightedComplex};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub use bounds::{verify_orthogonal_bound, verify_partite_bound, OrthogonalBoundReport, PartiteBoundReport, PartiteEqCheck};
pub use identities::{verify_garland_decomposition, verify_localization_identities, GarlandReport, LocalizationReport};

/// φ_τ(η) = φ(τ ∪ η), a cochain on X_τ at level l - dim τ - 1.
pub fn localize<T: Real>(x: &WeightedComplex<T>, phi: &Cochain<T>, tau: &Simplex) -> Result<(WeightedComplex<T>, Cochain<T>)> {
    let (link, map) = x.link_with_map(tau)?;
    let c = localize_with_map(&map, tau, phi)?;
    Ok((link, c))
}

fn localize_with_map<T: Real>(map: &[Vec<usize>], tau: &Simplex, phi: &Cochain<T>) -> Result<Cochain<T>> {
    let level = phi.level() - tau.len() as isize;
    if level < -1 || (level + 1) as usize >= map.len() {
        return Err(Error::LevelOutOfRange { k: tau.dim(), min: -1, max: phi.level() - 1 });
    }
    let ids = &map[(level + 1) as usize];
    Ok(Cochain::from_raw(level, ids.iter().map(|&g| phi.values()[g]).collect()))
}

/// A link X_τ with the walk operators used by the Garland identities.
#[derive(Debug, Clone)]
pub struct LinkEntry<T: Real> {
    pub tau: Simplex,
    pub link: WeightedComplex<T>,
    map: Vec<Vec<usize>>,
    pub nonlazy: Operator<T>,
    pub lower: Operator<T>,
    pub partite_projection: Option<Operator<T>>,
}

impl<T: Real> LinkEntry<T> {
    pub fn localize(&self, phi: &Cochain<T>) -> Result<Cochain<T>> {
        localize_with_map(&self.map, &self.tau, phi)
    }
}

/// Links of all τ ∈ X(k-1) for a fixed k, built once and reused across trials.
#[derive(Debug, Clone)]
pub struct LinkCache<T: Real> {
    pub k: isize,
    pub entries: Vec<LinkEntry<T>>,
}

impl<T: Real> LinkCache<T> {
    /// Requires 0 ≤ k ≤ n - 1 so that every link has dimension at least 1.
    pub fn new(x: &WeightedComplex<T>, k: isize, partite: Option<&PartiteStructure>) -> Result<Self> {
        let n = x.dim() as isize;
        if k < 0 || k > n - 1 {
            return Err(Error::LevelOutOfRange { k, min: 0, max: n - 1 });
        }
        let entries = x
            .complex
            .simplices(k - 1)
            .par_iter()
            .map(|tau| {
                let (link, map) = x.link_with_map(tau)?;
                let nonlazy = nonlazy_upper(&link, 0)?;
                let lower = lower_walk(&link, 0)?;
                let partite_projection = match partite.and_then(|p| p.restrict(&link.complex)) {
                    Some(lp) => Some(partite_projection(&link, &lp)?),
                    None => None,
                };
                Ok(LinkEntry { tau: tau.clone(), link, map, nonlazy, lower, partite_projection })
            })
            .collect::<Result<_>>()?;
        Ok(LinkCache { k, entries })
    }
}
