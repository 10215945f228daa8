use super::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::scalar::{factorial_real, Real};

/// Balanced positive weight on every simplex of a complex.
///
/// Values are stored per level in the complex's index order. A balanced
/// weight is determined by its values on the top simplices: each lower
/// simplex weighs the sum of its cofaces.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction<T> {
    levels: Vec<Vec<T>>,
}

impl<T: Real> WeightFunction<T> {
    /// Weight 1 on every top simplex.
    pub fn homogeneous(x: &SimplicialComplex) -> Self {
        let ones = vec![T::one(); x.count(x.dim() as isize)];
        Self::balance_down(x, ones)
    }

    /// Fills lower levels from positive top weights by the balance recursion.
    pub fn from_top(x: &SimplicialComplex, top_weights: &[T]) -> Result<Self> {
        let n = x.dim() as isize;
        if top_weights.len() != x.count(n) {
            return Err(Error::WeightCount { expected: x.count(n), found: top_weights.len() });
        }
        if let Some(w) = top_weights.iter().find(|w| !(**w > T::zero())) {
            return Err(Error::NonPositiveWeight(w.as_f64()));
        }
        Ok(Self::balance_down(x, top_weights.to_vec()))
    }

    fn balance_down(x: &SimplicialComplex, top: Vec<T>) -> Self {
        let n = x.dim() as isize;
        let mut levels = vec![Vec::new(); x.dim() + 2];
        levels[(n + 1) as usize] = top;
        for k in (-1..n).rev() {
            let upper = &levels[(k + 2) as usize];
            let vals: Vec<T> = (0..x.count(k))
                .map(|i| x.cofaces(k, i).iter().fold(T::zero(), |acc, &j| acc + upper[j]))
                .collect();
            levels[(k + 1) as usize] = vals;
        }
        WeightFunction { levels }
    }

    /// Accepts explicit values for every level after checking positivity and
    /// balance to relative tolerance `tol`.
    pub fn from_levels(x: &SimplicialComplex, levels: Vec<Vec<T>>, tol: f64) -> Result<Self> {
        if levels.len() != x.dim() + 2 {
            return Err(Error::InvalidArgument(format!(
                "expected {} weight levels, got {}",
                x.dim() + 2,
                levels.len()
            )));
        }
        for (slot, vals) in levels.iter().enumerate() {
            let k = slot as isize - 1;
            if vals.len() != x.count(k) {
                return Err(Error::WeightCount { expected: x.count(k), found: vals.len() });
            }
            if let Some(w) = vals.iter().find(|w| !(**w > T::zero())) {
                return Err(Error::NonPositiveWeight(w.as_f64()));
            }
        }
        let w = WeightFunction { levels };
        if let Some((level, residual)) = w.balance_violation(x, tol) {
            return Err(Error::Unbalanced { level, residual });
        }
        Ok(w)
    }

    /// First level whose balance residual exceeds `tol`, with that residual.
    pub fn balance_violation(&self, x: &SimplicialComplex, tol: f64) -> Option<(isize, f64)> {
        let n = x.dim() as isize;
        for k in -1..n {
            let r = self.balance_residual(x, k);
            if r > tol {
                return Some((k, r));
            }
        }
        None
    }

    /// Max over τ ∈ X(k) of |m(τ) - Σ_{σ ⊃ τ} m(σ)| / m(τ).
    pub fn balance_residual(&self, x: &SimplicialComplex, k: isize) -> f64 {
        (0..x.count(k))
            .map(|i| {
                let s = x.cofaces(k, i).iter().fold(T::zero(), |acc, &j| acc + self.get(k + 1, j));
                let m = self.get(k, i);
                ((m - s).abs() / m).as_f64()
            })
            .fold(0.0, f64::max)
    }

    pub fn get(&self, k: isize, i: usize) -> T {
        self.levels[(k + 1) as usize][i]
    }

    pub fn level(&self, k: isize) -> &[T] {
        &self.levels[(k + 1) as usize]
    }

    pub fn of(&self, x: &SimplicialComplex, s: &Simplex) -> Option<T> {
        x.index_of(s).map(|i| self.get(s.dim(), i))
    }

    /// m(X(k)).
    pub fn total(&self, k: isize) -> T {
        self.level(k).iter().fold(T::zero(), |a, &b| a + b)
    }

    /// m(U) for a set of k-simplex indices; 0 for the empty set.
    pub fn of_set(&self, k: isize, indices: &[usize]) -> T {
        indices.iter().fold(T::zero(), |a, &i| a + self.get(k, i))
    }

    pub fn scaled(&self, c: T) -> Self {
        WeightFunction { levels: self.levels.iter().map(|l| l.iter().map(|&v| v * c).collect()).collect() }
    }

    pub(crate) fn restrict(&self, map: &[Vec<usize>], offset: isize) -> Self {
        WeightFunction {
            levels: map
                .iter()
                .enumerate()
                .map(|(slot, ids)| ids.iter().map(|&g| self.get(slot as isize - 1 + offset, g)).collect())
                .collect(),
        }
    }
}

/// A complex bundled with a balanced weight.
#[derive(Debug, Clone)]
pub struct WeightedComplex<T> {
    pub complex: SimplicialComplex,
    pub weight: WeightFunction<T>,
}

impl<T: Real> WeightedComplex<T> {
    pub fn homogeneous(complex: SimplicialComplex) -> Self {
        let weight = WeightFunction::homogeneous(&complex);
        WeightedComplex { complex, weight }
    }

    pub fn with_top_weights(complex: SimplicialComplex, top: &[T]) -> Result<Self> {
        let weight = WeightFunction::from_top(&complex, top)?;
        Ok(WeightedComplex { complex, weight })
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    pub fn m(&self, k: isize, i: usize) -> T {
        self.weight.get(k, i)
    }

    /// Link of `tau` with the induced weight m_τ(η) = m(τ ∪ η).
    pub fn link(&self, tau: &Simplex) -> Result<WeightedComplex<T>> {
        self.link_with_map(tau).map(|(l, _)| l)
    }

    /// Link plus the lift map (link level l → global level l + |τ|).
    pub fn link_with_map(&self, tau: &Simplex) -> Result<(WeightedComplex<T>, Vec<Vec<usize>>)> {
        let (complex, map) = self.complex.link_with_map(tau)?;
        let weight = self.weight.restrict(&map, tau.len() as isize);
        Ok((WeightedComplex { complex, weight }, map))
    }

    /// Residuals of the closed-form weight identities; all should vanish.
    pub fn weight_identity_residuals(&self) -> WeightIdentityResiduals {
        weight_identity_residuals(&self.complex, &self.weight)
    }
}

/// Worst relative residuals of the weight identities over all levels.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WeightIdentityResiduals {
    /// m(τ) = Σ cofaces
    pub balance: f64,
    /// m(τ)/(n-k)! = Σ_{σ ∈ X(n), τ ⊆ σ} m(σ)
    pub top_sum: f64,
    /// m(τ)/(l-k)! = Σ_{σ ∈ X(l), τ ⊂ σ} m(σ) for all k < l
    pub level_sum: f64,
    /// m(X(k)) = (l+1)!/(k+1)! m(X(l))
    pub total_ratio: f64,
}

impl WeightIdentityResiduals {
    pub fn max(&self) -> f64 {
        self.balance.max(self.top_sum).max(self.level_sum).max(self.total_ratio)
    }
}

/// Evaluates every weight identity by direct enumeration of containing
/// simplices, independent of the coface incidence used to build the weight.
pub fn weight_identity_residuals<T: Real>(x: &SimplicialComplex, m: &WeightFunction<T>) -> WeightIdentityResiduals {
    let n = x.dim() as isize;
    let mut out = WeightIdentityResiduals::default();
    for k in -1..n {
        out.balance = out.balance.max(m.balance_residual(x, k));
    }
    for k in -1..=n {
        for l in (k + 1)..=n {
            let fact: T = factorial_real((l - k) as usize);
            for (i, tau) in x.simplices(k).iter().enumerate() {
                let sum = x
                    .simplices(l)
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| tau.is_face_of(s))
                    .fold(T::zero(), |a, (j, _)| a + m.get(l, j));
                let lhs = m.get(k, i) / fact;
                let r = ((lhs - sum).abs() / lhs).as_f64();
                out.level_sum = out.level_sum.max(r);
                if l == n {
                    out.top_sum = out.top_sum.max(r);
                }
            }
            let ratio: T = factorial_real::<T>((l + 1) as usize) / factorial_real::<T>((k + 1) as usize);
            let a = m.total(k);
            let b = ratio * m.total(l);
            out.total_ratio = out.total_ratio.max(((a - b).abs() / a).as_f64());
        }
    }
    out
}
