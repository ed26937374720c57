//! Symmetric matrices, positive semidefinite validation, determinants and
//! rank-revealing elimination.

use std::fmt;
use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tolerance};
use crate::subspace::Subspace;

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 12;

/// Square symmetric matrix. Symmetry is exact for exact backends; float
/// input within tolerance is symmetrized on ingest.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    n: usize,
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> SymMatrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        Self::from_rows_with_tol(rows, &Tolerance::default())
    }

    pub fn from_rows_with_tol(mut rows: Vec<Vec<T>>, tol: &Tolerance) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        if n > MAX_DIM {
            return Err(Error::DimensionTooLarge { n, cap: MAX_DIM });
        }
        if let Some((row, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::NotSquare { rows: n, row, len: r.len() });
        }
        for i in 0..n {
            for j in i + 1..n {
                if !rows[i][j].approx_eq(&rows[j][i], tol) {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
                if !T::EXACT {
                    let mean = (rows[i][j].clone() + rows[j][i].clone()) / T::from_i64(2);
                    rows[i][j] = mean.clone();
                    rows[j][i] = mean;
                }
            }
        }
        Ok(SymMatrix { n, rows })
    }

    /// Caller guarantees squareness and symmetry.
    pub(crate) fn from_rows_unchecked(rows: Vec<Vec<T>>) -> Self {
        SymMatrix { n: rows.len(), rows }
    }

    pub fn zero(n: usize) -> Self {
        Self::from_rows_unchecked(vec![vec![T::zero(); n]; n])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.rows[i][i] = T::one();
        }
        m
    }

    pub fn diagonal(diag: Vec<T>) -> Self {
        let n = diag.len();
        let mut m = Self::zero(n);
        for (i, d) in diag.into_iter().enumerate() {
            m.rows[i][i] = d;
        }
        m
    }

    /// The rank-one matrix `v vᵀ`.
    pub fn outer(v: &[T]) -> Self {
        Self::from_rows_unchecked(
            v.iter()
                .map(|a| v.iter().map(|b| a.clone() * b.clone()).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.rows[i][j]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        self.rows.iter().map(|r| r[j].clone()).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        Self::from_rows_unchecked(
            self.rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect())
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-T::one()))
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_rows_unchecked(
            self.rows
                .iter()
                .map(|r| r.iter().map(|x| c.clone() * x.clone()).collect())
                .collect(),
        )
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        self.rows.iter().map(|r| dot(r, x)).collect()
    }

    /// The quadratic form `x·(Ax)`.
    pub fn quadratic_form(&self, x: &[T]) -> T {
        dot(x, &self.mul_vec(x))
    }

    /// `Bᵀ A B` for a square `b` given by rows.
    pub fn congruence(&self, b: &[Vec<T>]) -> Self {
        let n = self.n;
        let ab: Vec<Vec<T>> = (0..n)
            .map(|i| (0..n).map(|j| sum((0..n).map(|k| self.rows[i][k].clone() * b[k][j].clone()))).collect())
            .collect();
        let mut out: Vec<Vec<T>> = (0..n)
            .map(|i| (0..n).map(|j| sum((0..n).map(|k| b[k][i].clone() * ab[k][j].clone()))).collect())
            .collect();
        // Round-off can break symmetry in float mode.
        for i in 0..n {
            for j in i + 1..n {
                let mean = (out[i][j].clone() + out[j][i].clone()) / T::from_i64(2);
                out[i][j] = mean.clone();
                out[j][i] = mean;
            }
        }
        Self::from_rows_unchecked(out)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        max_abs(self.rows.iter().flatten())
    }

    pub fn determinant(&self) -> T {
        determinant(self)
    }

    /// Leading principal block of size `k`.
    pub fn leading_block(&self, k: usize) -> Self {
        Self::from_rows_unchecked(self.rows[..k].iter().map(|r| r[..k].to_vec()).collect())
    }

    pub fn to_f64(&self) -> SymMatrix<f64> {
        SymMatrix::from_rows_unchecked(
            self.rows.iter().map(|r| r.iter().map(Scalar::to_f64).collect()).collect(),
        )
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.rows[i][j].to_f64())
    }
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    sum(a.iter().zip(b).map(|(x, y)| x.clone() * y.clone()))
}

pub(crate) fn sum<T: Scalar>(it: impl Iterator<Item = T>) -> T {
    it.fold(T::zero(), |acc, x| acc + x)
}

pub(crate) fn max_abs<'a, T: Scalar>(it: impl Iterator<Item = &'a T>) -> T {
    it.fold(T::zero(), |acc, x| {
        let a = x.abs();
        if a > acc {
            a
        } else {
            acc
        }
    })
}

/// Determinant: fraction-free elimination over the rationals, partial
/// pivoting for floats.
pub fn determinant<T: Scalar>(m: &SymMatrix<T>) -> T {
    T::determinant(m.rows.clone())
}

/// Evidence that a matrix is positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub enum PsdCertificate<T> {
    /// Symmetric-pivoted LDLᵀ: pivot indices in elimination order with their
    /// (positive) pivot values; every remaining block was exactly zero.
    Ldlt { pivots: Vec<(usize, T)> },
    /// Smallest eigenvalue and spectral norm; `min_eigenvalue ≥ −τ·norm`.
    MinEigenvalue { min_eigenvalue: f64, norm: f64 },
}

/// A validated positive semidefinite matrix.
#[derive(Clone)]
pub struct PsdMatrix<T> {
    base: SymMatrix<T>,
    tol: Tolerance,
    certificate: PsdCertificate<T>,
    rank: OnceLock<usize>,
}

impl<T: PartialEq> PartialEq for PsdMatrix<T> {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
    }
}

impl<T: fmt::Debug> fmt::Debug for PsdMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("PsdMatrix").field(&self.base).finish()
    }
}

/// Validates `m` as positive semidefinite under the default tolerance.
pub fn validate_psd<T: Scalar>(m: SymMatrix<T>) -> Result<PsdMatrix<T>> {
    validate_psd_with_tol(m, Tolerance::default())
}

pub fn validate_psd_with_tol<T: Scalar>(m: SymMatrix<T>, tol: Tolerance) -> Result<PsdMatrix<T>> {
    let certificate = if T::EXACT { ldlt_certificate(&m)? } else { eigen_certificate(&m, &tol)? };
    Ok(PsdMatrix { base: m, tol, certificate, rank: OnceLock::new() })
}

fn not_psd<T: Scalar>(m: &SymMatrix<T>, witness: Vec<T>) -> Error {
    let value = m.quadratic_form(&witness);
    Error::NotPsd {
        witness: witness.iter().map(Scalar::to_repr).collect(),
        value: value.to_repr(),
    }
}

/// Exact symmetric-pivoted LDLᵀ by congruence `W = Cᵀ A C`. A witness `y`
/// for `W` maps back to `x = C y` with `x·Ax = y·Wy`.
fn ldlt_certificate<T: Scalar>(m: &SymMatrix<T>) -> Result<PsdCertificate<T>> {
    let n = m.n;
    let mut w = m.rows.clone();
    let mut c: Vec<Vec<T>> = SymMatrix::<T>::identity(n).rows;
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::new();
    let column = |c: &Vec<Vec<T>>, j: usize| -> Vec<T> { c.iter().map(|r| r[j].clone()).collect() };

    while !remaining.is_empty() {
        if let Some(&i) = remaining.iter().find(|&&i| w[i][i] < T::zero()) {
            return Err(not_psd(m, column(&c, i)));
        }
        let p = remaining
            .iter()
            .copied()
            .filter(|&i| w[i][i] > T::zero())
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if w[b][b] >= w[i][i] => Some(b),
                _ => Some(i),
            });
        let Some(p) = p else {
            // Zero diagonal: the block must vanish entirely.
            for (a, &i) in remaining.iter().enumerate() {
                for &j in &remaining[a + 1..] {
                    if !w[i][j].is_zero() {
                        let sign = if w[i][j] > T::zero() { -T::one() } else { T::one() };
                        let y: Vec<T> = (0..n)
                            .map(|k| {
                                if k == i {
                                    T::one()
                                } else if k == j {
                                    sign.clone()
                                } else {
                                    T::zero()
                                }
                            })
                            .collect();
                        let x = (0..n).map(|r| dot(&c[r], &y)).collect();
                        return Err(not_psd(m, x));
                    }
                }
            }
            break;
        };
        let pv = w[p][p].clone();
        remaining.retain(|&i| i != p);
        for &i in &remaining {
            if w[i][p].is_zero() {
                continue;
            }
            let f = w[i][p].clone() / pv.clone();
            for r in 0..n {
                let d = f.clone() * w[r][p].clone();
                w[r][i] = w[r][i].clone() - d;
            }
            for k in 0..n {
                let d = f.clone() * w[p][k].clone();
                w[i][k] = w[i][k].clone() - d;
            }
            for r in 0..n {
                let d = f.clone() * c[r][p].clone();
                c[r][i] = c[r][i].clone() - d;
            }
        }
        pivots.push((p, pv));
    }
    Ok(PsdCertificate::Ldlt { pivots })
}

fn eigen_certificate<T: Scalar>(m: &SymMatrix<T>, tol: &Tolerance) -> Result<PsdCertificate<T>> {
    let eig = SymmetricEigen::new(m.to_nalgebra());
    let norm = eig.eigenvalues.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let (imin, min) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, v)| if v < best.1 { (i, v) } else { best });
    if min < -tol.rel * norm && min < -tol.abs {
        let witness: Vec<T> = eig
            .eigenvectors
            .column(imin)
            .iter()
            .map(|&v| T::from_f64(v).unwrap_or_else(T::zero))
            .collect();
        return Err(not_psd(m, witness));
    }
    Ok(PsdCertificate::MinEigenvalue { min_eigenvalue: min, norm })
}

impl<T: Scalar> PsdMatrix<T> {
    pub fn matrix(&self) -> &SymMatrix<T> {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.n
    }

    pub fn tolerance(&self) -> &Tolerance {
        &self.tol
    }

    pub fn certificate(&self) -> &PsdCertificate<T> {
        &self.certificate
    }

    pub fn rank(&self) -> usize {
        *self.rank.get_or_init(|| independent_columns(&self.base.rows, self.base.n, &self.tol).len())
    }

    /// Range of `A`, which for PSD `A` equals the span of the eigenvectors
    /// with positive eigenvalues. The basis consists of columns of `A`.
    pub fn column_space(&self) -> Subspace<T> {
        let cols = independent_columns(&self.base.rows, self.base.n, &self.tol);
        let _ = self.rank.set(cols.len());
        Subspace::from_basis_unchecked(self.base.n, cols.iter().map(|&j| self.base.column(j)).collect(), self.tol)
    }

    /// Sum of two PSD matrices; the cone is closed under addition.
    pub fn add(&self, other: &Self) -> Self {
        // Re-validation keeps the certificate attached to the new matrix.
        validate_psd_with_tol(self.base.add(&other.base), self.tol)
            .expect("sum of PSD matrices is PSD")
    }

    /// `c·A` for `c ≥ 0`.
    pub fn scale(&self, c: &T) -> Result<Self> {
        if *c < T::zero() {
            return Err(Error::NegativeCoefficient(c.to_repr()));
        }
        validate_psd_with_tol(self.base.scale(c), self.tol)
    }

    /// `A ≺ B`, i.e. `B − A` is positive semidefinite.
    pub fn precedes(&self, other: &Self) -> bool {
        validate_psd_with_tol(other.base.sub(&self.base), self.tol).is_ok()
    }

    pub fn into_inner(self) -> SymMatrix<T> {
        self.base
    }
}

pub fn column_space<T: Scalar>(a: &PsdMatrix<T>) -> Subspace<T> {
    a.column_space()
}

/// Rank-revealing elimination with complete pivoting on a matrix given by
/// rows with `ncols` columns. Returns the indices of a maximal independent
/// set of columns, in increasing order. In float mode a pivot is zero when
/// `|pivot| ≤ max(τ·max|entry|, τ_abs)`, measured on the input matrix.
pub(crate) fn independent_columns<T: Scalar>(rows: &[Vec<T>], ncols: usize, tol: &Tolerance) -> Vec<usize> {
    let mut w: Vec<Vec<T>> = rows.to_vec();
    let scale = max_abs(w.iter().flatten());
    let mut free_rows: Vec<usize> = (0..w.len()).collect();
    let mut free_cols: Vec<usize> = (0..ncols).collect();
    let mut chosen = Vec::new();
    loop {
        let mut best: Option<(usize, usize)> = None;
        for &r in &free_rows {
            for &c in &free_cols {
                if best.is_none_or(|(br, bc)| w[r][c].abs() > w[br][bc].abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = best else { break };
        if w[pr][pc].is_zero() || w[pr][pc].is_negligible(&scale, tol) {
            break;
        }
        let pivot = w[pr][pc].clone();
        free_rows.retain(|&r| r != pr);
        free_cols.retain(|&c| c != pc);
        for &r in &free_rows {
            if w[r][pc].is_zero() {
                continue;
            }
            let f = w[r][pc].clone() / pivot.clone();
            for &c in &free_cols {
                let d = f.clone() * w[pr][c].clone();
                w[r][c] = w[r][c].clone() - d;
            }
            w[r][pc] = T::zero();
        }
        chosen.push(pc);
    }
    chosen.sort_unstable();
    chosen
}

/// Rank of a general matrix given by rows.
pub(crate) fn rank_of<T: Scalar>(rows: &[Vec<T>], ncols: usize, tol: &Tolerance) -> usize {
    independent_columns(rows, ncols, tol).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    fn qm(rows: &[&[i64]]) -> SymMatrix<Rational> {
        SymMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect()).unwrap()
    }

    #[test]
    fn identity_is_psd_full_rank() {
        let a = validate_psd(SymMatrix::<Rational>::identity(2)).unwrap();
        assert_eq!(a.rank(), 2);
    }

    #[test]
    fn diag_one_zero_is_rank_one() {
        let a = validate_psd(qm(&[&[1, 0], &[0, 0]])).unwrap();
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn indefinite_matrix_yields_witness() {
        let m = qm(&[&[1, 2], &[2, 1]]);
        let err = validate_psd(m.clone()).unwrap_err();
        let Error::NotPsd { witness, value } = err else { panic!("expected NotPsd") };
        let x: Vec<Rational> = witness.iter().map(|s| Rational::parse_repr(s).unwrap()).collect();
        let v = m.quadratic_form(&x);
        assert!(v < q(0));
        assert_eq!(Rational::parse_repr(&value), Some(v));
        // The stated witness (1, -1) gives exactly -2.
        assert_eq!(m.quadratic_form(&[q(1), q(-1)]), q(-2));
    }

    #[test]
    fn zero_diagonal_with_offdiagonal_is_rejected() {
        let m = qm(&[&[0, 1], &[1, 0]]);
        let Error::NotPsd { witness, .. } = validate_psd(m.clone()).unwrap_err() else { panic!() };
        let x: Vec<Rational> = witness.iter().map(|s| Rational::parse_repr(s).unwrap()).collect();
        assert!(m.quadratic_form(&x) < q(0));
    }

    #[test]
    fn negative_schur_complement_witness_maps_back() {
        // Diagonal positive, but det < 0.
        let m = qm(&[&[1, 3, 0], &[3, 2, 0], &[0, 0, 5]]);
        let Error::NotPsd { witness, .. } = validate_psd(m.clone()).unwrap_err() else { panic!() };
        let x: Vec<Rational> = witness.iter().map(|s| Rational::parse_repr(s).unwrap()).collect();
        assert!(m.quadratic_form(&x) < q(0));
    }

    #[test]
    fn asymmetric_rejected() {
        let rows = vec![vec![q(1), q(2)], vec![q(3), q(1)]];
        assert_eq!(SymMatrix::from_rows(rows), Err(Error::NotSymmetric { row: 0, col: 1 }));
    }

    #[test]
    fn dimension_cap_enforced() {
        let rows = vec![vec![q(0); 13]; 13];
        assert_eq!(SymMatrix::from_rows(rows), Err(Error::DimensionTooLarge { n: 13, cap: MAX_DIM }));
    }

    #[test]
    fn float_symmetrized_within_tolerance() {
        let m = SymMatrix::from_rows(vec![vec![1.0, 0.5 + 1e-12], vec![0.5, 1.0]]).unwrap();
        assert_eq!(m.get(0, 1), m.get(1, 0));
        assert!(SymMatrix::from_rows(vec![vec![1.0, 0.6], vec![0.5, 1.0]]).is_err());
    }

    #[test]
    fn float_not_psd_witness() {
        let m = SymMatrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        let Error::NotPsd { value, .. } = validate_psd(m).unwrap_err() else { panic!() };
        assert!((value.parse::<f64>().unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(SymMatrix::<Rational>::identity(3).determinant(), q(1));
        assert_eq!(SymMatrix::diagonal(vec![q(2), q(3)]).determinant(), q(6));
        assert_eq!(qm(&[&[2, 1], &[1, 2]]).determinant(), q(3));
        assert!((SymMatrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap().determinant() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn column_space_examples() {
        let a = validate_psd(SymMatrix::diagonal(vec![q(1), q(0), q(0)])).unwrap();
        let s = a.column_space();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.basis()[0], vec![q(1), q(0), q(0)]);

        let z = validate_psd(SymMatrix::<Rational>::zero(3)).unwrap();
        assert_eq!(z.column_space().dim(), 0);
        assert_eq!(z.rank(), 0);

        let v = validate_psd(SymMatrix::outer(&[q(1), q(1)])).unwrap();
        let s = v.column_space();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.basis()[0], vec![q(1), q(1)]);
    }

    #[test]
    fn float_rank_uses_relative_pivot_threshold() {
        let m = SymMatrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0 + 1e-12]]).unwrap();
        let a = validate_psd(m).unwrap();
        assert_eq!(a.rank(), 1);
        let m = SymMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1e-6]]).unwrap();
        assert_eq!(validate_psd(m).unwrap().rank(), 2);
    }

    #[test]
    fn precedes_is_psd_order() {
        let a = validate_psd(SymMatrix::diagonal(vec![q(1), q(0)])).unwrap();
        let b = validate_psd(SymMatrix::<Rational>::identity(2)).unwrap();
        assert!(a.precedes(&b));
        assert!(!b.precedes(&a));
    }
}
