//! Linear subspaces of Rⁿ given by a basis.

use crate::error::{Error, Result};
use crate::matrix::{independent_columns, rank_of};
use crate::scalar::{Scalar, Tolerance};

/// Subspace spanned by linearly independent vectors (possibly none).
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<T> {
    ambient: usize,
    basis: Vec<Vec<T>>,
    tol: Tolerance,
}

impl<T: Scalar> Subspace<T> {
    /// Spans `vectors`, discarding dependent ones.
    pub fn span(ambient: usize, vectors: Vec<Vec<T>>, tol: Tolerance) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient) {
            return Err(Error::AmbientMismatch { expected: ambient, found: v.len() });
        }
        let keep = independent_columns(&as_rows(ambient, &vectors), vectors.len(), &tol);
        let basis = keep.into_iter().map(|i| vectors[i].clone()).collect();
        Ok(Subspace { ambient, basis, tol })
    }

    pub(crate) fn from_basis_unchecked(ambient: usize, basis: Vec<Vec<T>>, tol: Tolerance) -> Self {
        Subspace { ambient, basis, tol }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<T>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `true` if `v` lies in the subspace.
    pub fn contains(&self, v: &[T]) -> bool {
        let mut cols = self.basis.clone();
        cols.push(v.to_vec());
        rank_of(&as_rows(self.ambient, &cols), cols.len(), &self.tol) == self.dim()
    }

    /// `Σ cᵢ bᵢ` over the basis.
    pub fn combine(&self, coefficients: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.ambient];
        for (c, b) in coefficients.iter().zip(&self.basis) {
            for (o, x) in out.iter_mut().zip(b) {
                *o = o.clone() + c.clone() * x.clone();
            }
        }
        out
    }
}

/// Lays column vectors out as the rows of an `ambient × k` matrix.
pub(crate) fn as_rows<T: Scalar>(ambient: usize, columns: &[Vec<T>]) -> Vec<Vec<T>> {
    (0..ambient).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect()
}

/// Dimension of the sum of the given subspaces.
pub fn sum_dim<T: Scalar>(spaces: &[&Subspace<T>]) -> Result<usize> {
    let Some(first) = spaces.first() else { return Ok(0) };
    let ambient = first.ambient;
    if let Some(s) = spaces.iter().find(|s| s.ambient != ambient) {
        return Err(Error::AmbientMismatch { expected: ambient, found: s.ambient });
    }
    let cols: Vec<Vec<T>> = spaces.iter().flat_map(|s| s.basis.iter().cloned()).collect();
    Ok(rank_of(&as_rows(ambient, &cols), cols.len(), &first.tol))
}
