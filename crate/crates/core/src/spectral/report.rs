use rayon::prelude::*;

use super::{restricted_spectrum, weighted_spectrum};
use crate::cochain::nonlazy_upper;
use crate::complex::{detect_partite, PartiteStructure, Simplex, WeightedComplex};
use crate::error::{Error, Result};
use crate::scalar::Real;

const SLACK: f64 = 1e-10;

/// Spectrum of the non-lazy upper 0-walk of one link X_τ.
#[derive(Debug, Clone)]
pub struct LinkSpectrum<T> {
    pub tau: Simplex,
    /// k = dim τ + 1; the link has dimension n - k.
    pub k: usize,
    /// Full sorted spectrum.
    pub spectrum: Vec<T>,
    /// Spectrum on the m-orthogonal complement of the constants.
    pub nontrivial: Vec<T>,
    /// Spectrum on the complement of span{χ_{S_i ∩ X_τ(0)}}, for partite links.
    pub partite_nontrivial: Option<Vec<T>>,
}

impl<T: Real> LinkSpectrum<T> {
    pub fn min_nontrivial(&self) -> Option<T> {
        self.nontrivial.first().copied()
    }

    pub fn max_nontrivial(&self) -> Option<T> {
        self.nontrivial.last().copied()
    }

    /// λ(X_τ): largest partite-nontrivial eigenvalue.
    pub fn partite_lambda(&self) -> Option<T> {
        self.partite_nontrivial.as_ref().and_then(|s| s.last().copied())
    }

    /// κ_partite(X_τ): smallest partite-nontrivial eigenvalue.
    pub fn partite_kappa(&self) -> Option<T> {
        self.partite_nontrivial.as_ref().and_then(|s| s.first().copied())
    }

    /// Dimension of the link.
    pub fn link_dim(&self, n: usize) -> usize {
        n - self.k
    }
}

#[derive(Debug, Clone)]
pub struct SpectralReport<T> {
    pub n: usize,
    pub links: Vec<LinkSpectrum<T>>,
    /// μ_k, k = 0..n-1: max nontrivial eigenvalue over links of (k-1)-simplices.
    pub mu: Vec<T>,
    /// ν_k: min nontrivial eigenvalue over the same links.
    pub nu: Vec<T>,
    /// Same extremes over partite-nontrivial spectra, when the complex is partite.
    pub partite_mu: Option<Vec<T>>,
    pub partite_nu: Option<Vec<T>>,
    pub partite: Option<PartiteStructure>,
}

impl<T: Real> SpectralReport<T> {
    pub fn links_at(&self, k: usize) -> impl Iterator<Item = &LinkSpectrum<T>> {
        self.links.iter().filter(move |l| l.k == k)
    }

    /// Max |nontrivial eigenvalue| over links at level k.
    pub fn lambda_at(&self, k: usize) -> T {
        self.mu[k].abs().max(self.nu[k].abs())
    }

    /// Max |nontrivial eigenvalue| over all links.
    pub fn lambda(&self) -> T {
        (0..self.n).map(|k| self.lambda_at(k)).fold(T::zero(), |a, b| a.max(b))
    }

    /// Smallest λ ≥ 0 for the one-sided hypothesis: max(0, max_k μ_k).
    pub fn one_sided_lambda(&self) -> T {
        self.mu.iter().fold(T::zero(), |a, b| a.max(*b))
    }

    /// Partite-excluded counterpart of [`SpectralReport::lambda`].
    pub fn partite_lambda(&self) -> Option<T> {
        let mu = self.partite_mu.as_ref()?;
        let nu = self.partite_nu.as_ref()?;
        Some(mu.iter().chain(nu).fold(T::zero(), |a, b| a.max(b.abs())))
    }

    /// Every link spectrum contains 1 and lies in [-1, 1] up to 1e-10.
    pub fn sanity_ok(&self) -> bool {
        let one = T::one();
        let tol = T::lit(1e-10f64.max(1e3 * T::default_epsilon().as_f64()));
        self.links.iter().all(|l| {
            l.spectrum.iter().any(|v| (*v - one).abs() <= tol)
                && l.spectrum.iter().all(|v| *v >= -one - tol && *v <= one + tol)
        })
    }
}

/// Report with the partite structure detected automatically.
pub fn link_spectral_report<T: Real>(x: &WeightedComplex<T>) -> Result<SpectralReport<T>> {
    let partite = match detect_partite(&x.complex) {
        Ok(p) => p,
        Err(Error::AmbiguousPartition) => None,
        Err(e) => return Err(e),
    };
    link_spectral_report_with(x, partite.as_ref())
}

/// Spectra of (M'_τ)+_0 for every τ ∈ X(k-1), 0 ≤ k ≤ n-1.
pub fn link_spectral_report_with<T: Real>(
    x: &WeightedComplex<T>,
    partite: Option<&PartiteStructure>,
) -> Result<SpectralReport<T>> {
    let n = x.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("spectral report needs dimension at least 1".into()));
    }
    let taus: Vec<(usize, Simplex)> = (0..n)
        .flat_map(|k| x.complex.simplices(k as isize - 1).iter().map(move |t| (k, t.clone())))
        .collect();
    let links: Vec<LinkSpectrum<T>> = taus
        .into_par_iter()
        .map(|(k, tau)| link_spectrum(x, partite, k, tau))
        .collect::<Result<_>>()?;
    let extreme = |pick: &dyn Fn(&LinkSpectrum<T>) -> Option<(T, T)>| -> Option<(Vec<T>, Vec<T>)> {
        let mut mu = Vec::with_capacity(n);
        let mut nu = Vec::with_capacity(n);
        for k in 0..n {
            let mut hi: Option<T> = None;
            let mut lo: Option<T> = None;
            for l in links.iter().filter(|l| l.k == k) {
                if let Some((a, b)) = pick(l) {
                    hi = Some(hi.map_or(b, |h| h.max(b)));
                    lo = Some(lo.map_or(a, |h| h.min(a)));
                }
            }
            mu.push(hi?);
            nu.push(lo?);
        }
        Some((mu, nu))
    };
    let (mu, nu) = extreme(&|l| Some((l.min_nontrivial()?, l.max_nontrivial()?)))
        .ok_or_else(|| Error::InvalidArgument("some level has no nontrivial eigenvalues".into()))?;
    let partite_ext = if partite.is_some() {
        extreme(&|l| Some((l.partite_kappa()?, l.partite_lambda()?)))
    } else {
        None
    };
    let (partite_mu, partite_nu) = match partite_ext {
        Some((a, b)) => (Some(a), Some(b)),
        None => (None, None),
    };
    Ok(SpectralReport { n, links, mu, nu, partite_mu, partite_nu, partite: partite.cloned() })
}

fn link_spectrum<T: Real>(
    x: &WeightedComplex<T>,
    partite: Option<&PartiteStructure>,
    k: usize,
    tau: Simplex,
) -> Result<LinkSpectrum<T>> {
    let link = x.link(&tau)?;
    if !link.complex.is_one_skeleton_connected() {
        return Err(Error::DisconnectedLink(tau));
    }
    let op = nonlazy_upper(&link, 0)?;
    let spectrum = weighted_spectrum(&link, &op)?;
    let len = link.complex.count(0);
    let nontrivial = restricted_spectrum(&link, &op, &[vec![T::one(); len]])?;
    let partite_nontrivial = match partite.and_then(|p| p.restrict(&link.complex)) {
        Some(lp) => {
            let trivial: Vec<Vec<T>> = (0..lp.num_sides()).map(|i| lp.side_indicator(&link.complex, i)).collect();
            Some(restricted_spectrum(&link, &op, &trivial)?)
        }
        None => None,
    };
    Ok(LinkSpectrum { tau, k, spectrum, nontrivial, partite_nontrivial })
}

/// How partite-trivial eigenvalues are treated by the two-sided check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoSidedMode {
    /// Only the eigenvalue 1 (constants) is excluded.
    Plain,
    /// On partite links the eigenvalues of the side indicators are excluded too.
    PartiteExcluded,
}

/// Every link's nontrivial spectrum lies in [-λ, λ] (slack 1e-10).
pub fn check_two_sided_hypothesis<T: Real>(report: &SpectralReport<T>, lambda: f64, mode: TwoSidedMode) -> bool {
    report.links.iter().all(|l| {
        let spec = match (mode, &l.partite_nontrivial) {
            (TwoSidedMode::PartiteExcluded, Some(p)) => p,
            _ => &l.nontrivial,
        };
        spec.iter().all(|v| v.as_f64().abs() <= lambda + SLACK)
    })
}

/// Every link's nontrivial spectrum lies in [-1, λ] (slack 1e-10).
pub fn check_one_sided_hypothesis<T: Real>(report: &SpectralReport<T>, lambda: f64) -> bool {
    report
        .links
        .iter()
        .all(|l| l.nontrivial.iter().all(|v| v.as_f64() <= lambda + SLACK && v.as_f64() >= -1.0 - SLACK))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::SimplicialComplex;
    use approx::assert_abs_diff_eq;

    fn hom(tops: Vec<Vec<usize>>) -> WeightedComplex<f64> {
        WeightedComplex::homogeneous(SimplicialComplex::from_top_simplices(tops).unwrap())
    }

    fn tripartite(side: usize) -> WeightedComplex<f64> {
        let mut tops = Vec::new();
        for a in 0..side {
            for b in side..2 * side {
                for c in 2 * side..3 * side {
                    tops.push(vec![a, b, c]);
                }
            }
        }
        hom(tops)
    }

    #[test]
    fn single_triangle() {
        let r = link_spectral_report(&hom(vec![vec![0, 1, 2]])).unwrap();
        assert_abs_diff_eq!(r.mu[1], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.nu[1], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.mu[0], -0.5, epsilon = 1e-12);
        assert!(r.sanity_ok());
        assert!(!check_two_sided_hypothesis(&r, 0.5, TwoSidedMode::Plain));
        assert!(check_one_sided_hypothesis(&r, 1.0));
    }

    #[test]
    fn tetrahedron_boundary() {
        let r = link_spectral_report(&hom(vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]])).unwrap();
        assert!(r.partite.is_none());
        for l in r.links_at(1) {
            assert_eq!(l.nontrivial.len(), 2);
            for v in &l.nontrivial {
                assert_abs_diff_eq!(*v, -0.5, epsilon = 1e-12);
            }
        }
        assert_abs_diff_eq!(r.mu[1], -0.5, epsilon = 1e-12);
    }

    #[test]
    fn complete_tripartite() {
        let r = link_spectral_report(&tripartite(2)).unwrap();
        let p = r.partite_mu.as_ref().unwrap();
        assert_abs_diff_eq!(p[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.mu[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.nu[1], -1.0, epsilon = 1e-12);
        assert!(check_one_sided_hypothesis(&r, 0.01));
        assert!(!check_two_sided_hypothesis(&r, 0.01, TwoSidedMode::Plain));
        assert!(check_two_sided_hypothesis(&r, 0.01, TwoSidedMode::PartiteExcluded));
        assert!(r.sanity_ok());
    }

    #[test]
    fn disconnected_link_is_reported() {
        let x = hom(vec![vec![0, 1, 2], vec![0, 3, 4]]);
        match link_spectral_report(&x) {
            Err(Error::DisconnectedLink(t)) => assert_eq!(t.vertices(), &[0]),
            other => panic!("{other:?}"),
        }
    }
}
