use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::Cochain;
use crate::complex::WeightedComplex;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense matrix of a linear map between cochain levels, in simplex-index bases.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T: Real> {
    domain: isize,
    codomain: isize,
    matrix: DMatrix<T>,
    self_adjoint: bool,
}

impl<T: Real> Operator<T> {
    /// Wraps a matrix, validating its shape against the complex.
    pub fn new(x: &WeightedComplex<T>, domain: isize, codomain: isize, matrix: DMatrix<T>, self_adjoint: bool) -> Result<Self> {
        x.complex.check_level(domain)?;
        x.complex.check_level(codomain)?;
        let want = (x.complex.count(codomain), x.complex.count(domain));
        if matrix.shape() != want {
            return Err(Error::Shape(format!("expected {}x{}, got {}x{}", want.0, want.1, matrix.nrows(), matrix.ncols())));
        }
        Ok(Operator { domain, codomain, matrix, self_adjoint })
    }

    pub(crate) fn from_parts(domain: isize, codomain: isize, matrix: DMatrix<T>, self_adjoint: bool) -> Self {
        Operator { domain, codomain, matrix, self_adjoint }
    }

    pub fn identity(x: &WeightedComplex<T>, level: isize) -> Result<Self> {
        x.complex.check_level(level)?;
        Ok(Operator::from_parts(level, level, DMatrix::identity(x.complex.count(level), x.complex.count(level)), true))
    }

    pub fn domain(&self) -> isize {
        self.domain
    }

    pub fn codomain(&self) -> isize {
        self.codomain
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.matrix
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.self_adjoint
    }

    pub fn apply(&self, phi: &Cochain<T>) -> Result<Cochain<T>> {
        if phi.level() != self.domain {
            return Err(Error::LevelMismatch { expected: self.domain, found: phi.level() });
        }
        if phi.len() != self.matrix.ncols() {
            return Err(Error::CochainLength { level: phi.level(), expected: self.matrix.ncols(), found: phi.len() });
        }
        let v = nalgebra::DVector::from_column_slice(phi.values());
        let out = &self.matrix * v;
        Ok(Cochain::from_raw(self.codomain, out.as_slice().to_vec()))
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn after(&self, inner: &Operator<T>) -> Result<Self> {
        if inner.codomain != self.domain {
            return Err(Error::LevelMismatch { expected: self.domain, found: inner.codomain });
        }
        Ok(Operator::from_parts(inner.domain, self.codomain, &self.matrix * &inner.matrix, false))
    }

    pub fn scaled(&self, c: T) -> Self {
        Operator::from_parts(self.domain, self.codomain, &self.matrix * c, self.self_adjoint)
    }

    pub fn sub(&self, other: &Operator<T>) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Operator::from_parts(self.domain, self.codomain, &self.matrix - &other.matrix, self.self_adjoint && other.self_adjoint))
    }

    pub fn add(&self, other: &Operator<T>) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Operator::from_parts(self.domain, self.codomain, &self.matrix + &other.matrix, self.self_adjoint && other.self_adjoint))
    }

    fn check_same_shape(&self, other: &Operator<T>) -> Result<()> {
        if (self.domain, self.codomain) != (other.domain, other.codomain) {
            return Err(Error::LevelMismatch { expected: self.domain, found: other.domain });
        }
        Ok(())
    }

    /// Marks the operator self-adjoint after the caller has established it.
    pub fn assume_self_adjoint(mut self) -> Self {
        self.self_adjoint = true;
        self
    }

    pub fn row_sums(&self) -> Vec<T> {
        self.matrix.row_iter().map(|r| r.sum()).collect()
    }

    /// Max entrywise `|a - b| / (1 + |a| + |b|)`.
    pub fn max_mixed_difference(&self, other: &Operator<T>) -> Result<f64> {
        if self.matrix.shape() != other.matrix.shape() {
            return Err(Error::Shape("operators differ in shape".into()));
        }
        Ok(self
            .matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| ((*a - *b).abs() / (T::one() + a.abs() + b.abs())).as_f64())
            .fold(0.0, f64::max))
    }

    /// Max over i, j of |m_i A_ij - m_j A_ji| / max |m_i A_ij|: zero iff the
    /// operator is self-adjoint for the weighted inner product.
    pub fn adjointness_defect(&self, x: &WeightedComplex<T>) -> Result<f64> {
        if self.domain != self.codomain {
            return Err(Error::LevelMismatch { expected: self.domain, found: self.codomain });
        }
        let m = x.weight.level(self.domain);
        let a = &self.matrix;
        let mut scale = T::zero();
        let mut worst = T::zero();
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                let lhs = m[i] * a[(i, j)];
                scale = scale.max(lhs.abs());
                worst = worst.max((lhs - m[j] * a[(j, i)]).abs());
            }
        }
        Ok(if scale == T::zero() { 0.0 } else { (worst / scale).as_f64() })
    }

    /// Rows of space-separated values, for debugging output.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in self.matrix.row_iter() {
            let row: Vec<String> = r.iter().map(|v| format!("{:.12e}", v.as_f64())).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}
