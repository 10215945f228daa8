use rayon::prelude::*;

use super::{localize_with_map, LinkCache};
use crate::cochain::{codifferential, d_dstar, dstar_d, inner_product, inner_product_scale, differential, Cochain};
use crate::complex::{Simplex, WeightedComplex};
use crate::error::{Error, Result};
use crate::rng::SeedSplitter;
use crate::scalar::{relative_residual, Real};

/// Worst relative residuals of the three localization identities.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationReport {
    pub k: isize,
    pub trials: usize,
    /// (k+1)⟨φ,ψ⟩ = Σ_τ ⟨φ_τ,ψ_τ⟩.
    pub inner: f64,
    /// ⟨d*φ,d*ψ⟩ = Σ_τ ⟨d*_τ φ_τ, d*_τ ψ_τ⟩.
    pub codifferential: f64,
    /// ⟨dφ,dψ⟩ = Σ_τ (⟨d_τ φ_τ, d_τ ψ_τ⟩ - k/(k+1) ⟨φ_τ,ψ_τ⟩); only for k < n.
    pub differential: Option<f64>,
    pub tolerance: f64,
}

impl LocalizationReport {
    pub fn max_residual(&self) -> f64 {
        self.inner.max(self.codifferential).max(self.differential.unwrap_or(0.0))
    }

    pub fn passed(&self) -> bool {
        self.max_residual() <= self.tolerance
    }
}

/// Checks the localization identities on `trials` random pairs at level k, 0 ≤ k ≤ n.
pub fn verify_localization_identities<T: Real>(
    x: &WeightedComplex<T>,
    k: isize,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> Result<LocalizationReport> {
    let n = x.dim() as isize;
    if k < 0 || k > n {
        return Err(Error::LevelOutOfRange { k, min: 0, max: n });
    }
    let links: Vec<(Simplex, WeightedComplex<T>, Vec<Vec<usize>>)> = x
        .complex
        .simplices(k - 1)
        .par_iter()
        .map(|tau| x.link_with_map(tau).map(|(l, m)| (tau.clone(), l, m)))
        .collect::<Result<_>>()?;
    let split = SeedSplitter::new(seed);
    let per_trial: Vec<(f64, f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = split.stream(t as u64);
            let phi = Cochain::gaussian(&x.complex, k, &mut rng)?;
            let psi = Cochain::gaussian(&x.complex, k, &mut rng)?;
            localization_residuals(x, &links, &phi, &psi)
        })
        .collect::<Result<_>>()?;
    let fold = |f: fn(&(f64, f64, f64)) -> f64| per_trial.iter().map(f).fold(0.0, f64::max);
    Ok(LocalizationReport {
        k,
        trials,
        inner: fold(|r| r.0),
        codifferential: fold(|r| r.1),
        differential: (k < n).then(|| fold(|r| r.2)),
        tolerance,
    })
}

fn localization_residuals<T: Real>(
    x: &WeightedComplex<T>,
    links: &[(Simplex, WeightedComplex<T>, Vec<Vec<usize>>)],
    phi: &Cochain<T>,
    psi: &Cochain<T>,
) -> Result<(f64, f64, f64)> {
    let k = phi.level();
    let n = x.dim() as isize;
    let k1 = T::from_count((k + 1) as usize);
    let ratio = T::from_count(k as usize) / k1;

    let (mut inner_sum, mut inner_scale) = (T::zero(), T::zero());
    let (mut co_sum, mut co_scale) = (T::zero(), T::zero());
    let (mut d_sum, mut d_scale) = (T::zero(), T::zero());
    for (tau, link, map) in links {
        let pt = localize_with_map(map, tau, phi)?;
        let qt = localize_with_map(map, tau, psi)?;
        inner_sum += inner_product(link, &pt, &qt)?;
        inner_scale += inner_product_scale(link, &pt, &qt)?;
        let (a, b) = (codifferential(link, &pt)?, codifferential(link, &qt)?);
        co_sum += inner_product(link, &a, &b)?;
        co_scale += inner_product_scale(link, &a, &b)?;
        if k < n {
            let (a, b) = (differential(link, &pt)?, differential(link, &qt)?);
            d_sum += inner_product(link, &a, &b)? - ratio * inner_product(link, &pt, &qt)?;
            d_scale += inner_product_scale(link, &a, &b)? + ratio * inner_product_scale(link, &pt, &qt)?;
        }
    }
    let lhs = k1 * inner_product(x, phi, psi)?;
    let inner = relative_residual(lhs, inner_sum, k1 * inner_product_scale(x, phi, psi)? + inner_scale);

    let (a, b) = (codifferential(x, phi)?, codifferential(x, psi)?);
    let co = relative_residual(inner_product(x, &a, &b)?, co_sum, inner_product_scale(x, &a, &b)? + co_scale);

    let d = if k < n {
        let (a, b) = (differential(x, phi)?, differential(x, psi)?);
        relative_residual(inner_product(x, &a, &b)?, d_sum, inner_product_scale(x, &a, &b)? + d_scale)
    } else {
        0.0
    };
    Ok((inner, co, d))
}

/// Worst relative residual of ⟨(d*d - dd*)φ,ψ⟩ = ⟨φ,ψ⟩ + Σ_τ ⟨(M')+_{τ,0}(I - M-_{τ,0})φ_τ, ψ_τ⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct GarlandReport {
    pub k: isize,
    pub trials: usize,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl GarlandReport {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

pub fn verify_garland_decomposition<T: Real>(
    x: &WeightedComplex<T>,
    k: isize,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> Result<GarlandReport> {
    let cache = LinkCache::new(x, k, None)?;
    let laplacian = dstar_d(x, k)?.sub(&d_dstar(x, k)?)?;
    let split = SeedSplitter::new(seed);
    let residuals: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = split.stream(t as u64);
            let phi = Cochain::gaussian(&x.complex, k, &mut rng)?;
            let psi = Cochain::gaussian(&x.complex, k, &mut rng)?;
            let lap = laplacian.apply(&phi)?;
            let lhs = inner_product(x, &lap, &psi)?;
            let mut rhs = inner_product(x, &phi, &psi)?;
            let mut scale = inner_product_scale(x, &lap, &psi)? + inner_product_scale(x, &phi, &psi)?;
            for e in &cache.entries {
                let pt = e.localize(&phi)?;
                let qt = e.localize(&psi)?;
                let centered = pt.sub(&e.lower.apply(&pt)?)?;
                let moved = e.nonlazy.apply(&centered)?;
                rhs += inner_product(&e.link, &moved, &qt)?;
                scale += inner_product_scale(&e.link, &moved, &qt)?;
            }
            Ok(relative_residual(lhs, rhs, scale))
        })
        .collect::<Result<_>>()?;
    Ok(GarlandReport { k, trials, max_residual: residuals.into_iter().fold(0.0, f64::max), tolerance })
}
