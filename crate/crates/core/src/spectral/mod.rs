//! Spectra of operators that are self-adjoint for the weighted inner product,
//! link spectral reports and spectral descent.

mod descent;
mod report;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::cochain::Operator;
use crate::complex::WeightedComplex;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub use descent::{descent_bound, threshold_for_target, verify_descent, DescentBound, DescentReport, DescentStep};
pub use report::{
    check_one_sided_hypothesis, check_two_sided_hypothesis, link_spectral_report, link_spectral_report_with,
    LinkSpectrum, SpectralReport, TwoSidedMode,
};

fn adjoint_tolerance<T: Real>() -> f64 {
    1e-8f64.max(100.0 * T::default_epsilon().as_f64())
}

/// D^{1/2} A D^{-1/2}, symmetrized, for A self-adjoint with respect to D = diag(m).
fn symmetric_form<T: Real>(x: &WeightedComplex<T>, op: &Operator<T>) -> Result<DMatrix<T>> {
    let defect = op.adjointness_defect(x)?;
    if defect > adjoint_tolerance::<T>() {
        return Err(Error::NotSelfAdjoint(defect));
    }
    let sq: Vec<T> = x.weight.level(op.domain()).iter().map(|w| w.sqrt()).collect();
    let a = op.matrix();
    let n = a.nrows();
    let s = DMatrix::from_fn(n, n, |i, j| a[(i, j)] * sq[i] / sq[j]);
    Ok((&s + s.transpose()) * T::lit(0.5))
}

fn sorted_eigenvalues<T: Real>(s: DMatrix<T>) -> Result<Vec<T>> {
    if s.nrows() == 0 {
        return Ok(Vec::new());
    }
    let eig = SymmetricEigen::try_new(s, T::default_epsilon(), 100_000).ok_or(Error::EigenNoConvergence)?;
    let mut v: Vec<T> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(v)
}

/// Sorted spectrum of an operator self-adjoint for ⟨·,·⟩_m (checked to 1e-8).
pub fn weighted_spectrum<T: Real>(x: &WeightedComplex<T>, op: &Operator<T>) -> Result<Vec<T>> {
    sorted_eigenvalues(symmetric_form(x, op)?)
}

/// Sorted spectrum of the operator restricted to the m-orthogonal complement
/// of span(`trivial`). The span must be invariant under the operator.
pub fn restricted_spectrum<T: Real>(x: &WeightedComplex<T>, op: &Operator<T>, trivial: &[Vec<T>]) -> Result<Vec<T>> {
    let s = symmetric_form(x, op)?;
    let q = complement_basis(x, op.domain(), trivial);
    sorted_eigenvalues(q.transpose() * s * &q)
}

/// Orthonormal basis (in D^{1/2}-conjugated coordinates) of the complement of
/// span(trivial).
fn complement_basis<T: Real>(x: &WeightedComplex<T>, level: isize, trivial: &[Vec<T>]) -> DMatrix<T> {
    let m = x.weight.level(level);
    let n = m.len();
    let mut basis: Vec<nalgebra::DVector<T>> = Vec::new();
    for t in trivial {
        let mut u = nalgebra::DVector::from_iterator(n, t.iter().zip(m).map(|(v, w)| *v * w.sqrt()));
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&u);
                u -= b * c;
            }
        }
        let len = u.norm();
        if len > T::lit(1e-6) {
            basis.push(u / len);
        }
    }
    let mut proj = DMatrix::<T>::identity(n, n);
    for b in &basis {
        proj -= b * b.transpose();
    }
    let eig = SymmetricEigen::new(proj);
    let cols: Vec<nalgebra::DVector<T>> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .filter(|(l, _)| **l > T::lit(0.5))
        .map(|(_, c)| c.into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::{lower_walk, nonlazy_upper};
    use crate::complex::SimplicialComplex;
    use approx::assert_abs_diff_eq;

    #[test]
    fn walk_spectra() {
        let tri = WeightedComplex::<f64>::homogeneous(SimplicialComplex::from_top_simplices([[0, 1, 2]]).unwrap());
        let s = weighted_spectrum(&tri, &nonlazy_upper(&tri, 0).unwrap()).unwrap();
        for (a, b) in s.iter().zip([-0.5, -0.5, 1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        let k22 = WeightedComplex::<f64>::homogeneous(
            SimplicialComplex::from_top_simplices([[0, 2], [0, 3], [1, 2], [1, 3]]).unwrap(),
        );
        let s = weighted_spectrum(&k22, &nonlazy_upper(&k22, 0).unwrap()).unwrap();
        for (a, b) in s.iter().zip([-1.0, 0.0, 0.0, 1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        let s = weighted_spectrum(&k22, &lower_walk(&k22, 0).unwrap()).unwrap();
        for (a, b) in s.iter().zip([0.0, 0.0, 0.0, 1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        let s = restricted_spectrum(&k22, &nonlazy_upper(&k22, 0).unwrap(), &[vec![1.0; 4]]).unwrap();
        assert_eq!(s.len(), 3);
        assert_abs_diff_eq!(s[0], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_non_self_adjoint() {
        let x = WeightedComplex::<f64>::homogeneous(SimplicialComplex::from_top_simplices([[0, 1], [1, 2]]).unwrap());
        let mut a = DMatrix::zeros(3, 3);
        a[(0, 1)] = 1.0;
        let op = Operator::new(&x, 0, 0, a, false).unwrap();
        assert!(matches!(weighted_spectrum(&x, &op), Err(Error::NotSelfAdjoint(_))));
    }
}
