//! Non-oriented cochains, the weighted inner product and the signless
//! differential and codifferential.

mod operator;
mod walks;

use rand::Rng;

use crate::complex::{SimplicialComplex, WeightedComplex};
use crate::error::{Error, Result};
use crate::rng::gaussian_vec;
use crate::scalar::Real;

pub use operator::Operator;
pub use walks::{
    codifferential_matrix, compose_check_dstar_d, d_dstar, differential_matrix, dstar_d, lower_walk,
    lower_zero_constant, nonlazy_upper, partite_projection, set_projection, upper_walk, CompositionCheck,
};

/// Real function on the k-simplices, indexed as in the complex.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain<T> {
    level: isize,
    values: Vec<T>,
}

impl<T: Real> Cochain<T> {
    pub fn new(x: &SimplicialComplex, level: isize, values: Vec<T>) -> Result<Self> {
        x.check_level(level)?;
        if values.len() != x.count(level) {
            return Err(Error::CochainLength { level, expected: x.count(level), found: values.len() });
        }
        Ok(Cochain { level, values })
    }

    pub(crate) fn from_raw(level: isize, values: Vec<T>) -> Self {
        Cochain { level, values }
    }

    pub fn zeros(x: &SimplicialComplex, level: isize) -> Result<Self> {
        Self::constant(x, level, T::zero())
    }

    pub fn constant(x: &SimplicialComplex, level: isize, c: T) -> Result<Self> {
        x.check_level(level)?;
        Ok(Cochain { level, values: vec![c; x.count(level)] })
    }

    /// χ of the given simplex indices at `level`.
    pub fn indicator(x: &SimplicialComplex, level: isize, indices: &[usize]) -> Result<Self> {
        let mut c = Self::zeros(x, level)?;
        for &i in indices {
            if i >= c.values.len() {
                return Err(Error::InvalidArgument(format!("simplex index {i} out of range at level {level}")));
            }
            c.values[i] = T::one();
        }
        Ok(c)
    }

    /// Independent standard normal values.
    pub fn gaussian<R: Rng + ?Sized>(x: &SimplicialComplex, level: isize, rng: &mut R) -> Result<Self> {
        x.check_level(level)?;
        Ok(Cochain { level, values: gaussian_vec(rng, x.count(level)) })
    }

    pub fn level(&self) -> isize {
        self.level
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, c: T) -> Self {
        Cochain { level: self.level, values: self.values.iter().map(|v| *v * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        same_level(self, other)?;
        Ok(Cochain { level: self.level, values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect() })
    }

    /// Pointwise restriction to the given indices (others set to zero).
    pub fn restricted(&self, keep: &[usize]) -> Self {
        let mut values = vec![T::zero(); self.values.len()];
        for &i in keep {
            values[i] = self.values[i];
        }
        Cochain { level: self.level, values }
    }
}

fn same_level<T>(a: &Cochain<T>, b: &Cochain<T>) -> Result<()> {
    if a.level != b.level {
        return Err(Error::LevelMismatch { expected: a.level, found: b.level });
    }
    if a.values.len() != b.values.len() {
        return Err(Error::CochainLength { level: b.level, expected: a.values.len(), found: b.values.len() });
    }
    Ok(())
}

fn check_cochain<T: Real>(x: &WeightedComplex<T>, c: &Cochain<T>) -> Result<()> {
    x.complex.check_level(c.level)?;
    if c.values.len() != x.complex.count(c.level) {
        return Err(Error::CochainLength { level: c.level, expected: x.complex.count(c.level), found: c.values.len() });
    }
    Ok(())
}

/// ⟨φ, ψ⟩ = Σ_σ m(σ) φ(σ) ψ(σ).
pub fn inner_product<T: Real>(x: &WeightedComplex<T>, phi: &Cochain<T>, psi: &Cochain<T>) -> Result<T> {
    same_level(phi, psi)?;
    check_cochain(x, phi)?;
    let m = x.weight.level(phi.level);
    Ok(m.iter().zip(phi.values.iter().zip(&psi.values)).fold(T::zero(), |acc, (w, (a, b))| acc + *w * *a * *b))
}

/// Σ_σ m(σ) |φ(σ) ψ(σ)|, the magnitude scale of [`inner_product`].
pub fn inner_product_scale<T: Real>(x: &WeightedComplex<T>, phi: &Cochain<T>, psi: &Cochain<T>) -> Result<T> {
    same_level(phi, psi)?;
    check_cochain(x, phi)?;
    let m = x.weight.level(phi.level);
    Ok(m.iter()
        .zip(phi.values.iter().zip(&psi.values))
        .fold(T::zero(), |acc, (w, (a, b))| acc + *w * (*a * *b).abs()))
}

pub fn norm<T: Real>(x: &WeightedComplex<T>, phi: &Cochain<T>) -> Result<T> {
    Ok(inner_product(x, phi, phi)?.sqrt())
}

/// (d φ)(σ) = Σ over the k-faces τ of σ of φ(τ).
pub fn differential<T: Real>(x: &WeightedComplex<T>, phi: &Cochain<T>) -> Result<Cochain<T>> {
    check_cochain(x, phi)?;
    let k = phi.level;
    let n = x.dim() as isize;
    if k >= n {
        return Err(Error::LevelOutOfRange { k, min: -1, max: n - 1 });
    }
    let c = &x.complex;
    let values = (0..c.count(k + 1))
        .map(|s| c.faces(k + 1, s).iter().fold(T::zero(), |acc, &t| acc + phi.values[t]))
        .collect();
    Ok(Cochain { level: k + 1, values })
}

/// (d* ψ)(τ) = Σ_{σ ⊃ τ} m(σ)/m(τ) ψ(σ), for ψ on level k+1 ≥ 0.
pub fn codifferential<T: Real>(x: &WeightedComplex<T>, psi: &Cochain<T>) -> Result<Cochain<T>> {
    check_cochain(x, psi)?;
    let l = psi.level;
    if l < 0 {
        return Err(Error::LevelOutOfRange { k: l, min: 0, max: x.dim() as isize });
    }
    let k = l - 1;
    let c = &x.complex;
    let values = (0..c.count(k))
        .map(|t| {
            let mt = x.m(k, t);
            c.cofaces(k, t).iter().fold(T::zero(), |acc, &s| acc + x.m(l, s) / mt * psi.values[s])
        })
        .collect();
    Ok(Cochain { level: k, values })
}
