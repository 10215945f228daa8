use crate::cochain::{d_dstar, dstar_d, inner_product, Cochain, Operator};
use crate::complex::{set_membership, simplices_spanning, WeightedComplex};
use crate::error::{Error, Result};
use crate::scalar::{approx_eq, Real};

/// χ_{X(U_0,...,U_k)} for the given sets (k = sets.len() - 1).
pub fn spanning_indicator<T: Real>(x: &WeightedComplex<T>, sets: &[Vec<usize>]) -> Result<Cochain<T>> {
    let ids = simplices_spanning(&x.complex, sets)?;
    Cochain::indicator(&x.complex, sets.len() as isize - 1, &ids)
}

fn check_family<T: Real>(x: &WeightedComplex<T>, sets: &[Vec<usize>], k: isize) -> Result<()> {
    let n = x.dim();
    if sets.len() != n + 1 {
        return Err(Error::InvalidArgument(format!("expected {} sets, got {}", n + 1, sets.len())));
    }
    set_membership(sets)?;
    if k < 0 || k > n as isize - 1 {
        return Err(Error::LevelOutOfRange { k, min: 0, max: n as isize - 1 });
    }
    Ok(())
}

/// d*_k d_k and d_{k-1} d*_{k-1} for every 0 ≤ k ≤ n-1, assembled once.
#[derive(Debug, Clone)]
pub struct ProductContext<T: Real> {
    pub n: usize,
    pub dstar_d: Vec<Operator<T>>,
    pub d_dstar: Vec<Operator<T>>,
}

impl<T: Real> ProductContext<T> {
    pub fn new(x: &WeightedComplex<T>) -> Result<Self> {
        let n = x.dim();
        if n == 0 {
            return Err(Error::InvalidArgument("mixing needs dimension at least 1".into()));
        }
        let dstar_d = (0..n as isize).map(|k| dstar_d(x, k)).collect::<Result<_>>()?;
        let d_dstar = (0..n as isize).map(|k| d_dstar(x, k)).collect::<Result<_>>()?;
        Ok(ProductContext { n, dstar_d, d_dstar })
    }

    /// ⟨(Π_{i=1}^{n-k} P_{X(U_i..U_{k+i})} A) χ_{X(U_0..U_k)}, χ_{X(U_{n-k}..U_n)}⟩
    /// with A = d*_k d_k (`upper`) or d_{k-1} d*_{k-1}, each factor scaled by `scale`.
    pub fn pairing(&self, x: &WeightedComplex<T>, sets: &[Vec<usize>], k: usize, upper: bool, scale: T) -> Result<T> {
        let n = self.n;
        let a = if upper { &self.dstar_d[k] } else { &self.d_dstar[k] };
        let mut v = spanning_indicator(x, &sets[0..=k])?;
        for i in 1..=n - k {
            let keep = simplices_spanning(&x.complex, &sets[i..=k + i])?;
            v = a.apply(&v)?.scaled(scale).restricted(&keep);
        }
        let target = spanning_indicator(x, &sets[n - k..=n])?;
        inner_product(x, &v, &target)
    }
}

fn product<T: Real>(x: &WeightedComplex<T>, sets: &[Vec<usize>], k: isize, a: Operator<T>) -> Result<Operator<T>> {
    let n = x.dim();
    let ku = k as usize;
    let mut acc = Operator::identity(x, k)?;
    for i in 1..=n - ku {
        let p = crate::cochain::set_projection(x, &sets[i..=ku + i])?;
        acc = p.after(&a)?.after(&acc)?;
    }
    Ok(acc)
}

/// Π_{i=1}^{n-k} P_{X(U_i,...,U_{k+i})} d*_k d_k, multiplied right to left.
pub fn restricted_upper_product<T: Real>(x: &WeightedComplex<T>, k: isize, sets: &[Vec<usize>]) -> Result<Operator<T>> {
    check_family(x, sets, k)?;
    product(x, sets, k, dstar_d(x, k)?)
}

/// Π_{i=1}^{n-k} P_{X(U_i,...,U_{k+i})} d_{k-1} d*_{k-1}, multiplied right to left.
pub fn restricted_lower_product<T: Real>(x: &WeightedComplex<T>, k: isize, sets: &[Vec<usize>]) -> Result<Operator<T>> {
    check_family(x, sets, k)?;
    product(x, sets, k, d_dstar(x, k)?)
}

/// ⟨(Π_{i=1}^n P_{X(U_i)} d_{-1} d*_{-1}) χ_{U_0}, χ_{U_n}⟩ by assembly and by
/// the closed form m(U_0)···m(U_n)/m(X(0))^n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BottomProduct<T> {
    pub assembled: T,
    pub closed_form: T,
    pub agree: bool,
}

pub fn bottom_product_value<T: Real>(x: &WeightedComplex<T>, sets: &[Vec<usize>], tol: f64) -> Result<BottomProduct<T>> {
    check_family(x, sets, 0)?;
    let n = x.dim();
    let op = restricted_lower_product(x, 0, sets)?;
    let chi0 = spanning_indicator(x, &sets[0..1])?;
    let chin = spanning_indicator(x, &sets[n..=n])?;
    let assembled = inner_product(x, &op.apply(&chi0)?, &chin)?;
    let closed_form = closed_bottom(x, sets)?;
    Ok(BottomProduct { assembled, closed_form, agree: approx_eq(assembled, closed_form, tol) })
}

pub(crate) fn closed_bottom<T: Real>(x: &WeightedComplex<T>, sets: &[Vec<usize>]) -> Result<T> {
    let total = x.weight.total(0);
    let mut v = T::one();
    for s in sets {
        v *= vertex_mass(x, s)?;
    }
    for _ in 0..x.dim() {
        v /= total;
    }
    Ok(v)
}

/// m(U) for a vertex set.
pub(crate) fn vertex_mass<T: Real>(x: &WeightedComplex<T>, set: &[usize]) -> Result<T> {
    let ids = simplices_spanning(&x.complex, &[set.to_vec()])?;
    if ids.len() != set.len() {
        return Err(Error::InvalidArgument(format!("set {set:?} contains vertices outside the complex")));
    }
    Ok(x.weight.of_set(0, &ids))
}
