use nalgebra::DMatrix;

use super::{Cochain, Operator};
use crate::complex::{simplices_spanning, PartiteStructure, WeightedComplex};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::weighted_spectrum;

fn range(x_dim: usize, k: isize, min: isize, max_offset: isize) -> Result<()> {
    let max = x_dim as isize + max_offset;
    if k < min || k > max {
        return Err(Error::LevelOutOfRange { k, min, max });
    }
    Ok(())
}

/// Matrix of d_k : C^k → C^{k+1}, for -1 ≤ k ≤ n-1.
pub fn differential_matrix<T: Real>(x: &WeightedComplex<T>, k: isize) -> Result<Operator<T>> {
    range(x.dim(), k, -1, -1)?;
    let c = &x.complex;
    let mut a = DMatrix::zeros(c.count(k + 1), c.count(k));
    for s in 0..c.count(k + 1) {
        for &t in c.faces(k + 1, s) {
            a[(s, t)] = T::one();
        }
    }
    Ok(Operator::from_parts(k, k + 1, a, false))
}

/// Matrix of d*_k : C^{k+1} → C^k, for -1 ≤ k ≤ n-1.
pub fn codifferential_matrix<T: Real>(x: &WeightedComplex<T>, k: isize) -> Result<Operator<T>> {
    range(x.dim(), k, -1, -1)?;
    let c = &x.complex;
    let mut a = DMatrix::zeros(c.count(k), c.count(k + 1));
    for t in 0..c.count(k) {
        for &s in c.cofaces(k, t) {
            a[(t, s)] = x.m(k + 1, s) / x.m(k, t);
        }
    }
    Ok(Operator::from_parts(k + 1, k, a, false))
}

/// M+_k: stay with probability 1/(k+2), otherwise move to τ' with
/// probability m(τ ∪ τ')/((k+2) m(τ)) when τ ∪ τ' is a (k+1)-simplex.
pub fn upper_walk<T: Real>(x: &WeightedComplex<T>, k: isize) -> Result<Operator<T>> {
    range(x.dim(), k, 0, -1)?;
    let c = &x.complex;
    let kk = T::from_count((k + 2) as usize);
    let mut a = DMatrix::zeros(c.count(k), c.count(k));
    for t in 0..c.count(k) {
        a[(t, t)] = T::one() / kk;
        let mt = x.m(k, t);
        for &s in c.cofaces(k, t) {
            let p = x.m(k + 1, s) / (kk * mt);
            for &u in c.faces(k + 1, s) {
                if u != t {
                    a[(t, u)] += p;
                }
            }
        }
    }
    Ok(Operator::from_parts(k, k, a, true))
}

/// M-_k: pick a (k-1)-face η of τ uniformly, then a k-simplex τ' ⊃ η with
/// probability m(τ')/m(η).
pub fn lower_walk<T: Real>(x: &WeightedComplex<T>, k: isize) -> Result<Operator<T>> {
    range(x.dim(), k, 0, 0)?;
    let c = &x.complex;
    let kk = T::from_count((k + 1) as usize);
    let mut a = DMatrix::zeros(c.count(k), c.count(k));
    for t in 0..c.count(k) {
        for &e in c.faces(k, t) {
            let me = x.m(k - 1, e);
            for &u in c.cofaces(k - 1, e) {
                a[(t, u)] += x.m(k, u) / (kk * me);
            }
        }
    }
    Ok(Operator::from_parts(k, k, a, true))
}

/// (M')+_k = ((k+2)/(k+1)) M+_k - (1/(k+1)) I.
pub fn nonlazy_upper<T: Real>(x: &WeightedComplex<T>, k: isize) -> Result<Operator<T>> {
    let up = upper_walk(x, k)?;
    let k1 = T::from_count((k + 1) as usize);
    let k2 = T::from_count((k + 2) as usize);
    let n = up.matrix().nrows();
    let a = up.matrix() * (k2 / k1) - DMatrix::<T>::identity(n, n) / k1;
    Ok(Operator::from_parts(k, k, a, true))
}

/// d*_k d_k on C^k, for -1 ≤ k ≤ n-1.
pub fn dstar_d<T: Real>(x: &WeightedComplex<T>, k: isize) -> Result<Operator<T>> {
    Ok(codifferential_matrix(x, k)?.after(&differential_matrix(x, k)?)?.assume_self_adjoint())
}

/// d_{k-1} d*_{k-1} on C^k, for 0 ≤ k ≤ n.
pub fn d_dstar<T: Real>(x: &WeightedComplex<T>, k: isize) -> Result<Operator<T>> {
    range(x.dim(), k, 0, 0)?;
    Ok(differential_matrix(x, k - 1)?.after(&codifferential_matrix(x, k - 1)?)?.assume_self_adjoint())
}

/// Value of the constant cochain M-_0 φ: Σ_v m(v) φ(v) / m(X(0)).
pub fn lower_zero_constant<T: Real>(x: &WeightedComplex<T>, phi: &Cochain<T>) -> Result<T> {
    if phi.level() != 0 {
        return Err(Error::LevelMismatch { expected: 0, found: phi.level() });
    }
    let m = x.weight.level(0);
    if phi.len() != m.len() {
        return Err(Error::CochainLength { level: 0, expected: m.len(), found: phi.len() });
    }
    Ok(m.iter().zip(phi.values()).fold(T::zero(), |a, (w, v)| a + *w * *v) / x.weight.total(0))
}

/// P_{X(U_0,...,U_k)}: keeps the values on k-simplices with one vertex in each U_i.
pub fn set_projection<T: Real>(x: &WeightedComplex<T>, sets: &[Vec<usize>]) -> Result<Operator<T>> {
    let keep = simplices_spanning(&x.complex, sets)?;
    let k = sets.len() as isize - 1;
    let n = x.complex.count(k);
    let mut a = DMatrix::zeros(n, n);
    for i in keep {
        a[(i, i)] = T::one();
    }
    Ok(Operator::from_parts(k, k, a, true))
}

/// M^{-,p}_0: orthogonal projection of C^0 onto span{χ_{S_0}, ..., χ_{S_n}}.
pub fn partite_projection<T: Real>(x: &WeightedComplex<T>, p: &PartiteStructure) -> Result<Operator<T>> {
    let verts = x.complex.vertices();
    let side: Vec<usize> = verts.iter().map(|v| p.side_of(*v).ok_or(Error::NotPartite)).collect::<Result<_>>()?;
    let mut side_mass = vec![T::zero(); p.num_sides()];
    for (i, s) in side.iter().enumerate() {
        side_mass[*s] += x.m(0, i);
    }
    let n = verts.len();
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if side[i] == side[j] {
                a[(i, j)] = x.m(0, j) / side_mass[side[j]];
            }
        }
    }
    Ok(Operator::from_parts(0, 0, a, true))
}

/// Result of comparing d*_k d_k with (k+2) M+_k and d_{k-1} d*_{k-1} with (k+1) M-_k.
#[derive(Debug, Clone)]
pub struct CompositionCheck<T: Real> {
    pub k: isize,
    pub dstar_d: Operator<T>,
    pub d_dstar: Operator<T>,
    /// Max mixed entrywise difference between d*d and (k+2) M+.
    pub upper_residual: f64,
    /// Max mixed entrywise difference between dd* and (k+1) M-.
    pub lower_residual: f64,
    /// Largest eigenvalue of d*d (its norm for the weighted inner product).
    pub dstar_d_norm: T,
    pub d_dstar_norm: T,
    pub passed: bool,
}

pub fn compose_check_dstar_d<T: Real>(x: &WeightedComplex<T>, k: isize, tol: f64) -> Result<CompositionCheck<T>> {
    range(x.dim(), k, 0, -1)?;
    let dd = dstar_d(x, k)?;
    let ddt = d_dstar(x, k)?;
    let upper = upper_walk(x, k)?.scaled(T::from_count((k + 2) as usize));
    let lower = lower_walk(x, k)?.scaled(T::from_count((k + 1) as usize));
    let upper_residual = dd.max_mixed_difference(&upper)?;
    let lower_residual = ddt.max_mixed_difference(&lower)?;
    let top = |op: &Operator<T>| -> Result<T> {
        Ok(*weighted_spectrum(x, op)?.last().expect("nonempty level"))
    };
    let dstar_d_norm = top(&dd)?;
    let d_dstar_norm = top(&ddt)?;
    let norm_ok = |v: T, want: usize| {
        let w = T::from_count(want);
        ((v - w).abs() / w).as_f64() <= tol.max(1e-9)
    };
    let passed = upper_residual <= tol
        && lower_residual <= tol
        && norm_ok(dstar_d_norm, (k + 2) as usize)
        && norm_ok(d_dstar_norm, (k + 1) as usize);
    Ok(CompositionCheck { k, dstar_d: dd, d_dstar: ddt, upper_residual, lower_residual, dstar_d_norm, d_dstar_norm, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::{inner_product, Cochain};
    use crate::complex::{detect_partite, SimplicialComplex};
    use crate::rng::SeedSplitter;
    use approx::assert_abs_diff_eq;

    fn tri() -> WeightedComplex<f64> {
        WeightedComplex::homogeneous(SimplicialComplex::from_top_simplices([[0, 1, 2]]).unwrap())
    }

    fn tet() -> WeightedComplex<f64> {
        WeightedComplex::homogeneous(
            SimplicialComplex::from_top_simplices([[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]).unwrap(),
        )
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
        WeightedComplex::homogeneous(SimplicialComplex::from_top_simplices(tops).unwrap())
    }

    #[test]
    fn triangle_walks() {
        let x = tri();
        let up = upper_walk(&x, 0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(up.matrix()[(i, j)], if i == j { 0.5 } else { 0.25 }, epsilon = 1e-15);
            }
        }
        let nl = nonlazy_upper(&x, 0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(nl.matrix()[(i, j)], if i == j { 0.0 } else { 0.5 }, epsilon = 1e-15);
            }
        }
        let lo = lower_walk(&x, 0).unwrap();
        let phi = Cochain::new(&x.complex, 0, vec![1.0, 4.0, -2.0]).unwrap();
        let c = lower_zero_constant(&x, &phi).unwrap();
        assert_abs_diff_eq!(c, 1.0, epsilon = 1e-15);
        for v in lo.apply(&phi).unwrap().values() {
            assert_abs_diff_eq!(*v, c, epsilon = 1e-15);
        }
    }

    #[test]
    fn composition_identities() {
        let x = tri();
        let chk = compose_check_dstar_d(&x, 0, 1e-10).unwrap();
        assert!(chk.passed, "{chk:?}");
        assert_abs_diff_eq!(chk.dstar_d_norm, 2.0, epsilon = 1e-10);
        let t = tet();
        for k in 0..2 {
            let chk = compose_check_dstar_d(&t, k, 1e-10).unwrap();
            assert!(chk.passed, "{k}: {} {}", chk.upper_residual, chk.lower_residual);
        }
        let lower = lower_walk(&t, 1).unwrap().scaled(2.0);
        assert!(d_dstar(&t, 1).unwrap().max_mixed_difference(&lower).unwrap() < 1e-12);
        assert!(upper_walk(&t, 2).is_err());
        assert!(lower_walk(&t, 2).is_ok());
    }

    #[test]
    fn walks_are_stochastic_and_self_adjoint() {
        let c = SimplicialComplex::from_top_simplices([[0, 1, 2], [1, 2, 3], [2, 3, 4], [0, 4, 5], [0, 2, 4]]).unwrap();
        let x = WeightedComplex::with_top_weights(c, &[1.0, 2.5, 0.5, 3.0, 1.25]).unwrap();
        let mut rng = SeedSplitter::new(3).stream(0);
        for k in 0..=2 {
            let mut ops = vec![lower_walk(&x, k).unwrap()];
            if k < 2 {
                ops.push(upper_walk(&x, k).unwrap());
                ops.push(nonlazy_upper(&x, k).unwrap());
            }
            for op in ops {
                for s in op.row_sums() {
                    assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
                }
                assert!(op.adjointness_defect(&x).unwrap() < 1e-13);
                let a = Cochain::gaussian(&x.complex, k, &mut rng).unwrap();
                let b = Cochain::gaussian(&x.complex, k, &mut rng).unwrap();
                let l = inner_product(&x, &op.apply(&a).unwrap(), &b).unwrap();
                let r = inner_product(&x, &a, &op.apply(&b).unwrap()).unwrap();
                assert_abs_diff_eq!(l, r, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn set_projection_examples() {
        let x = tri();
        let p = set_projection(&x, &[vec![0], vec![1]]).unwrap();
        assert_eq!(p.matrix().diagonal().as_slice(), &[1.0, 0.0, 0.0]);
        assert_eq!(p.after(&p).unwrap().matrix(), p.matrix());
        assert!(matches!(set_projection(&x, &[vec![0], vec![0]]), Err(Error::OverlappingSets(0))));
    }

    #[test]
    fn partite_projection_examples() {
        let x = tripartite(2);
        let part = detect_partite(&x.complex).unwrap().unwrap();
        let mp = partite_projection(&x, &part).unwrap();
        let delta = Cochain::indicator(&x.complex, 0, &[0]).unwrap();
        let out = mp.apply(&delta).unwrap();
        assert_eq!(out.values(), &[0.5, 0.5, 0.0, 0.0, 0.0, 0.0]);
        let chi = Cochain::indicator(&x.complex, 0, &[2, 3]).unwrap();
        assert_eq!(mp.apply(&chi).unwrap(), chi);
        let nl = nonlazy_upper(&x, 0).unwrap();
        let ab = nl.after(&mp).unwrap();
        let ba = mp.after(&nl).unwrap();
        assert!(ab.max_mixed_difference(&ba).unwrap() < 1e-12);
        // φ_i = n on S_i, -1 elsewhere has eigenvalue -1/n
        for i in 0..3 {
            let phi = Cochain::new(&x.complex, 0, (0..6).map(|v| if v / 2 == i { 2.0 } else { -1.0 }).collect()).unwrap();
            let got = nl.apply(&phi).unwrap();
            for (g, p) in got.values().iter().zip(phi.values()) {
                assert_abs_diff_eq!(*g, -0.5 * p, epsilon = 1e-12);
            }
        }
    }
}
