use rayon::prelude::*;

use super::LinkCache;
use crate::cochain::{codifferential, d_dstar, dstar_d, inner_product, inner_product_scale, norm, Cochain, Operator};
use crate::complex::{PartiteStructure, WeightedComplex};
use crate::error::{Error, Result};
use crate::rng::SeedSplitter;
use crate::scalar::{relative_residual, Real};

/// |⟨(d*d - dd*)φ,ψ⟩| ≤ (k+1) λ ‖φ‖‖ψ‖ on random m-orthogonal pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalBoundReport {
    pub k: isize,
    pub lambda: f64,
    pub trials: usize,
    /// Max of |LHS| / ((k+1)‖φ‖‖ψ‖), the smallest λ consistent with the samples.
    pub max_effective_lambda: f64,
    /// Max of |LHS| - bound, with bound including slack; positive means violated.
    pub worst_excess: f64,
}

impl OrthogonalBoundReport {
    pub fn passed(&self) -> bool {
        self.worst_excess <= 0.0
    }

    /// max_effective_lambda / λ, or `None` when λ = 0.
    pub fn max_ratio(&self) -> Option<f64> {
        (self.lambda > 0.0).then(|| self.max_effective_lambda / self.lambda)
    }
}

fn slack(norms: f64, factor: f64, tol: f64) -> f64 {
    tol * (1.0 + factor * norms)
}

pub fn verify_orthogonal_bound<T: Real>(
    x: &WeightedComplex<T>,
    k: isize,
    lambda: f64,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> Result<OrthogonalBoundReport> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!("lambda must be non-negative, got {lambda}")));
    }
    let laplacian = dstar_d(x, k)?.sub(&d_dstar(x, k)?)?;
    let k1 = (k + 1) as f64;
    let split = SeedSplitter::new(seed);
    let samples: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = split.stream(t as u64);
            let phi = Cochain::gaussian(&x.complex, k, &mut rng)?;
            let raw = Cochain::gaussian(&x.complex, k, &mut rng)?;
            let c = inner_product(x, &raw, &phi)? / inner_product(x, &phi, &phi)?;
            let psi = raw.sub(&phi.scaled(c))?;
            sample(x, &laplacian, &phi, &psi, k1, lambda, tolerance)
        })
        .collect::<Result<_>>()?;
    Ok(OrthogonalBoundReport {
        k,
        lambda,
        trials,
        max_effective_lambda: samples.iter().map(|s| s.0).fold(0.0, f64::max),
        worst_excess: samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max),
    })
}

fn sample<T: Real>(
    x: &WeightedComplex<T>,
    op: &Operator<T>,
    phi: &Cochain<T>,
    psi: &Cochain<T>,
    factor: f64,
    lambda: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let lhs = inner_product(x, &op.apply(phi)?, psi)?.as_f64().abs();
    let norms = norm(x, phi)?.as_f64() * norm(x, psi)?.as_f64();
    let effective = if norms > 0.0 { lhs / (factor * norms) } else { 0.0 };
    Ok((effective, lhs - factor * lambda * norms - slack(norms, factor, tol)))
}

/// Residuals of ⟨(M')+_{τ,0}(M^{-,p}_{τ,0} - M-_{τ,0})φ_τ, ψ_τ⟩ against
/// c·⟨d*_τφ_τ, d*_τψ_τ⟩ for c = 1/(n-k) and for c = -(n-k-1)/(n-k).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartiteEqCheck {
    pub positive_residual: f64,
    pub negative_residual: f64,
    pub tolerance: f64,
}

impl PartiteEqCheck {
    pub fn positive_holds(&self) -> bool {
        self.positive_residual <= self.tolerance
    }

    pub fn negative_holds(&self) -> bool {
        self.negative_residual <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartiteBoundReport {
    pub k: isize,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub lambda: f64,
    pub trials: usize,
    /// Max of |LHS| / ((n-k)(k+1)‖φ‖‖ψ‖).
    pub max_effective_lambda: f64,
    pub worst_excess: f64,
    /// Present when |A ∩ B| = k, i.e. some link sees both supports.
    pub eq: Option<PartiteEqCheck>,
}

impl PartiteBoundReport {
    pub fn passed(&self) -> bool {
        self.worst_excess <= 0.0
    }
}

fn side_mask(x: &WeightedComplex<impl Real>, p: &PartiteStructure, k: isize, types: &[usize]) -> Vec<usize> {
    x.complex
        .simplices(k)
        .iter()
        .enumerate()
        .filter(|(_, s)| p.type_of(s.vertices()) == types)
        .map(|(i, _)| i)
        .collect()
}

fn check_type(t: &[usize], k: isize, n: usize) -> Result<Vec<usize>> {
    let mut t = t.to_vec();
    t.sort_unstable();
    t.dedup();
    if t.len() as isize != k + 1 || t.iter().any(|&i| i > n) {
        return Err(Error::InvalidArgument(format!("side set {t:?} must hold {} distinct sides in 0..={n}", k + 1)));
    }
    Ok(t)
}

/// |⟨(d*d - ((n+1-k)/(n-k)) dd*)φ,ψ⟩| ≤ (n-k)(k+1) λ ‖φ‖‖ψ‖ for φ, ψ supported
/// on X(S_i; i ∈ A) and X(S_i; i ∈ B).
#[allow(clippy::too_many_arguments)]
pub fn verify_partite_bound<T: Real>(
    x: &WeightedComplex<T>,
    p: &PartiteStructure,
    k: isize,
    a: &[usize],
    b: &[usize],
    lambda: f64,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> Result<PartiteBoundReport> {
    let n = x.dim();
    if p.num_sides() != n + 1 {
        return Err(Error::NotPartite);
    }
    if k < 0 || k > n as isize - 1 {
        return Err(Error::LevelOutOfRange { k, min: 0, max: n as isize - 1 });
    }
    let a = check_type(a, k, n)?;
    let b = check_type(b, k, n)?;
    if a == b {
        return Err(Error::InvalidArgument("side sets A and B must differ".into()));
    }
    if !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!("lambda must be non-negative, got {lambda}")));
    }
    let nk = T::from_count(n - k as usize);
    let c = T::from_count(n + 1 - k as usize) / nk;
    let op = dstar_d(x, k)?.sub(&d_dstar(x, k)?.scaled(c))?;
    let mask_a = side_mask(x, p, k, &a);
    let mask_b = side_mask(x, p, k, &b);
    let common: Vec<usize> = a.iter().copied().filter(|i| b.contains(i)).collect();
    let cache = if common.len() as isize == k { Some(LinkCache::new(x, k, Some(p))?) } else { None };
    let factor = ((n - k as usize) * (k as usize + 1)) as f64;
    let split = SeedSplitter::new(seed);
    let samples: Vec<(f64, f64, f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = split.stream(t as u64);
            let phi = Cochain::gaussian(&x.complex, k, &mut rng)?.restricted(&mask_a);
            let psi = Cochain::gaussian(&x.complex, k, &mut rng)?.restricted(&mask_b);
            let (eff, excess) = sample(x, &op, &phi, &psi, factor, lambda, tolerance)?;
            let (pos, neg) = match &cache {
                Some(cache) => eq_residuals(cache, p, &common, nk, &phi, &psi)?,
                None => (0.0, 0.0),
            };
            Ok((eff, excess, pos, neg))
        })
        .collect::<Result<_>>()?;
    let max = |f: fn(&(f64, f64, f64, f64)) -> f64, init: f64| samples.iter().map(f).fold(init, f64::max);
    Ok(PartiteBoundReport {
        k,
        a,
        b,
        lambda,
        trials,
        max_effective_lambda: max(|s| s.0, 0.0),
        worst_excess: max(|s| s.1, f64::NEG_INFINITY),
        eq: cache.map(|_| PartiteEqCheck {
            positive_residual: max(|s| s.2, 0.0),
            negative_residual: max(|s| s.3, 0.0),
            tolerance,
        }),
    })
}

fn eq_residuals<T: Real>(
    cache: &LinkCache<T>,
    p: &PartiteStructure,
    common: &[usize],
    nk: T,
    phi: &Cochain<T>,
    psi: &Cochain<T>,
) -> Result<(f64, f64)> {
    let mut pos = 0.0f64;
    let mut neg = 0.0f64;
    for e in cache.entries.iter().filter(|e| p.type_of(e.tau.vertices()) == common) {
        let proj = e.partite_projection.as_ref().ok_or(Error::NotPartite)?;
        let pt = e.localize(phi)?;
        let qt = e.localize(psi)?;
        let moved = e.nonlazy.apply(&proj.apply(&pt)?.sub(&e.lower.apply(&pt)?)?)?;
        let lhs = inner_product(&e.link, &moved, &qt)?;
        let lhs_scale = inner_product_scale(&e.link, &moved, &qt)?;
        let (da, db) = (codifferential(&e.link, &pt)?, codifferential(&e.link, &qt)?);
        let dd = inner_product(&e.link, &da, &db)?;
        let dd_scale = inner_product_scale(&e.link, &da, &db)?;
        let cp = T::one() / nk;
        let cn = -(nk - T::one()) / nk;
        pos = pos.max(relative_residual(lhs, cp * dd, lhs_scale + cp.abs() * dd_scale));
        neg = neg.max(relative_residual(lhs, cn * dd, lhs_scale + cn.abs() * dd_scale));
    }
    Ok((pos, neg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{detect_partite, SimplicialComplex};

    fn complete_partite(parts: usize, side: usize) -> WeightedComplex<f64> {
        let mut tops: Vec<Vec<usize>> = vec![vec![]];
        for p in 0..parts {
            tops = tops
                .into_iter()
                .flat_map(|t| {
                    (0..side).map(move |v| {
                        let mut t = t.clone();
                        t.push(p * side + v);
                        t
                    })
                })
                .collect();
        }
        WeightedComplex::homogeneous(SimplicialComplex::from_top_simplices(tops).unwrap())
    }

    #[test]
    fn orthogonal_bound_with_trivial_lambda() {
        let x = WeightedComplex::<f64>::homogeneous(SimplicialComplex::from_top_simplices([[0, 1, 2]]).unwrap());
        let r = verify_orthogonal_bound(&x, 0, 1.0, 30, 2, 1e-9).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.max_effective_lambda <= 1.0);
        assert!(verify_orthogonal_bound(&x, 0, -1.0, 30, 2, 1e-9).is_err());
    }

    #[test]
    fn partite_bound_is_exact_when_lambda_vanishes() {
        let x = complete_partite(3, 2);
        let p = detect_partite(&x.complex).unwrap().unwrap();
        let r = verify_partite_bound(&x, &p, 0, &[0], &[1], 0.0, 20, 4, 1e-9).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.max_effective_lambda < 1e-12, "{r:?}");
        let eq = r.eq.unwrap();
        assert!(eq.positive_holds(), "{eq:?}");
    }

    #[test]
    fn partite_eq_sign() {
        let x = complete_partite(4, 2);
        let p = detect_partite(&x.complex).unwrap().unwrap();
        let r = verify_partite_bound(&x, &p, 1, &[0, 1], &[1, 2], 0.0, 20, 4, 1e-9).unwrap();
        assert!(r.passed(), "{r:?}");
        let eq = r.eq.unwrap();
        assert!(eq.positive_holds() && !eq.negative_holds(), "{eq:?}");
    }

    #[test]
    fn partite_argument_errors() {
        let x = complete_partite(3, 2);
        let p = detect_partite(&x.complex).unwrap().unwrap();
        assert!(verify_partite_bound(&x, &p, 0, &[0], &[0], 0.0, 1, 0, 1e-9).is_err());
        assert!(verify_partite_bound(&x, &p, 1, &[0], &[1], 0.0, 1, 0, 1e-9).is_err());
        assert!(verify_partite_bound(&x, &p, 0, &[0], &[3], 0.0, 1, 0, 1e-9).is_err());
    }
}
