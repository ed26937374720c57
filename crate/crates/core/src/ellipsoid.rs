//! Centered ellipsoids and their L2 calculus.
//!
//! A centered ellipsoid `E = T·Bⁿ` corresponds to the PSD matrix
//! `A_E = T Tᵀ` through its support function, `h(E, u)² = u·(A_E u)`.
//! Under this correspondence the L2 sum `E₁ +₂ E₂` (squared support
//! functions add) is matrix addition, `λ ·₂ E = √λ·E` is scaling by `λ`,
//! `dim E = rank A_E` and `vol E = κₙ·√det A_E`.

use nalgebra::SymmetricEigen;

use crate::discriminant::{det_expansion, md, Algorithm, MatrixTuple};
use crate::error::{Error, Result};
use crate::matrix::{dot, validate_psd_with_tol, PsdMatrix, SymMatrix};
use crate::scalar::{Scalar, Tolerance};

/// Centered ellipsoid, stored as its matrix `A_E`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid<T> {
    matrix: PsdMatrix<T>,
}

/// Support function value. `squared` is exact in the exact backend; `value`
/// is its square root in floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportValue<T> {
    pub squared: T,
    pub value: f64,
}

impl<T: Scalar> Ellipsoid<T> {
    pub fn new(matrix: PsdMatrix<T>) -> Self {
        Ellipsoid { matrix }
    }

    /// The unit ball `Bⁿ`.
    pub fn unit_ball(n: usize) -> Self {
        Self::new(validate_psd_with_tol(SymMatrix::identity(n), Tolerance::default()).expect("identity is PSD"))
    }

    /// `E = T·Bⁿ` for a (possibly singular) linear map `T` given by rows.
    pub fn from_linear_map(t: &[Vec<T>]) -> Result<Self> {
        let n = t.len();
        if let Some(r) = t.iter().find(|r| r.len() != n) {
            return Err(Error::AmbientMismatch { expected: n, found: r.len() });
        }
        let rows = (0..n).map(|i| (0..n).map(|j| dot(&t[i], &t[j])).collect()).collect();
        Ok(Self::new(validate_psd_with_tol(SymMatrix::from_rows(rows)?, Tolerance::default())?))
    }

    pub fn matrix(&self) -> &PsdMatrix<T> {
        &self.matrix
    }

    pub fn ambient(&self) -> usize {
        self.matrix.dim()
    }

    /// Affine dimension of `E`, equal to the rank of `A_E`.
    pub fn dim(&self) -> usize {
        self.matrix.rank()
    }

    pub fn support(&self, u: &[T]) -> Result<SupportValue<T>> {
        if u.len() != self.ambient() {
            return Err(Error::AmbientMismatch { expected: self.ambient(), found: u.len() });
        }
        let squared = self.matrix.matrix().quadratic_form(u);
        let value = squared.to_f64().max(0.0).sqrt();
        Ok(SupportValue { squared, value })
    }

    /// `self ⊆ other`, equivalent to `A_other − A_self` being PSD.
    pub fn is_contained_in(&self, other: &Self) -> bool {
        self.matrix.precedes(&other.matrix)
    }

    /// `vol(E)² / κₙ² = det A_E`.
    pub fn volume_sq_normalized(&self) -> T {
        self.matrix.matrix().determinant()
    }

    /// `vol(E) = κₙ·√det A_E`, in floating point.
    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.ambient()) * self.volume_sq_normalized().to_f64().max(0.0).sqrt()
    }
}

pub fn volume_sq_normalized<T: Scalar>(e: &Ellipsoid<T>) -> T {
    e.volume_sq_normalized()
}

/// `κₙ = π^{n/2} / Γ(n/2 + 1)`, via `κₙ = (2π/n)·κₙ₋₂`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Centered segment `conv{−t, t}`, with matrix `t tᵀ` and support `|t·u|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment<T> {
    vector: Vec<T>,
}

impl<T: Scalar> Segment<T> {
    pub fn new(vector: Vec<T>) -> Self {
        Segment { vector }
    }

    pub fn vector(&self) -> &[T] {
        &self.vector
    }

    pub fn ambient(&self) -> usize {
        self.vector.len()
    }

    pub fn is_degenerate(&self) -> bool {
        self.vector.iter().all(|x| x.is_zero())
    }

    /// `|t|²`, the squared half-length.
    pub fn length_sq(&self) -> T {
        dot(&self.vector, &self.vector)
    }

    pub fn matrix(&self) -> SymMatrix<T> {
        SymMatrix::outer(&self.vector)
    }

    pub fn to_ellipsoid(&self) -> Ellipsoid<T> {
        Ellipsoid::new(validate_psd_with_tol(self.matrix(), Tolerance::default()).expect("outer products are PSD"))
    }

    pub fn support(&self, u: &[T]) -> Result<SupportValue<T>> {
        if u.len() != self.ambient() {
            return Err(Error::AmbientMismatch { expected: self.ambient(), found: u.len() });
        }
        let p = dot(&self.vector, u);
        let value = p.to_f64().abs();
        Ok(SupportValue { squared: p.clone() * p, value })
    }
}

/// `λ₁ ·₂ E₁ +₂ … +₂ λ_m ·₂ E_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct L2Combination<T> {
    pub terms: Vec<(T, Ellipsoid<T>)>,
}

impl<T: Scalar> L2Combination<T> {
    pub fn new() -> Self {
        L2Combination { terms: Vec::new() }
    }

    pub fn term(mut self, lambda: T, e: Ellipsoid<T>) -> Self {
        self.terms.push((lambda, e));
        self
    }
}

impl<T: Scalar> Default for L2Combination<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Evaluates an L2 combination: the result has matrix `Σ λᵢ A_{Eᵢ}`.
pub fn combine<T: Scalar>(c: &L2Combination<T>) -> Result<Ellipsoid<T>> {
    let (_, first) = c.terms.first().ok_or(Error::EmptyDimension)?;
    let n = first.ambient();
    let tol = *first.matrix.tolerance();
    let mut acc = SymMatrix::zero(n);
    for (lambda, e) in &c.terms {
        if e.ambient() != n {
            return Err(Error::AmbientMismatch { expected: n, found: e.ambient() });
        }
        if *lambda < T::zero() {
            return Err(Error::NegativeCoefficient(lambda.to_repr()));
        }
        acc = acc.add(&e.matrix.matrix().scale(lambda));
    }
    Ok(Ellipsoid::new(validate_psd_with_tol(acc, tol)?))
}

/// Both κ-free sides of the polarization identity
/// `vol(Σ₂ λᵢ·₂Eᵢ)²/κₙ² = Σ λ_{i₁}⋯λ_{iₙ} D(A_{i₁},…,A_{iₙ})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eq7Report<T> {
    /// Normalized squared volume of the L2 combination.
    pub lhs: T,
    /// Mixed-discriminant expansion evaluated at the λ's.
    pub rhs: T,
    pub equal: bool,
}

pub fn eq7_check<T: Scalar>(es: &[Ellipsoid<T>], lambdas: &[T]) -> Result<Eq7Report<T>> {
    if es.len() != lambdas.len() {
        return Err(Error::AmbientMismatch { expected: es.len(), found: lambdas.len() });
    }
    let combination = L2Combination { terms: lambdas.iter().cloned().zip(es.iter().cloned()).collect() };
    let lhs = combine(&combination)?.volume_sq_normalized();
    let n = es[0].ambient();
    let mats: Vec<PsdMatrix<T>> = es.iter().map(|e| e.matrix.clone()).collect();
    let rhs = det_expansion(&mats, n)?.evaluate(lambdas)?;
    let equal = lhs.approx_eq(&rhs, es[0].matrix.tolerance());
    Ok(Eq7Report { lhs, rhs, equal })
}

/// Writes `E` as an L2 sum of `rank A_E` mutually orthogonal segments using
/// a symmetric eigensolver. Eigenvalues within tolerance of zero are
/// clamped. Only available for floating-point backends; exact
/// decompositions can be checked with [`verify_decomposition`].
pub fn decompose_segments<T: Scalar>(e: &Ellipsoid<T>) -> Result<Vec<Segment<T>>> {
    if T::EXACT {
        return Err(Error::ExactDecompositionUnsupported);
    }
    let tol = e.matrix.tolerance();
    let eig = SymmetricEigen::new(e.matrix.matrix().to_nalgebra());
    let scale = eig.eigenvalues.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let segments = order
        .into_iter()
        .filter(|&k| eig.eigenvalues[k] > tol.threshold(scale))
        .map(|k| {
            let root = eig.eigenvalues[k].sqrt();
            Segment::new(
                eig.eigenvectors
                    .column(k)
                    .iter()
                    .map(|&x| T::from_f64(root * x).unwrap_or_else(T::zero))
                    .collect(),
            )
        })
        .collect();
    Ok(segments)
}

/// Checks `Σ A_{Sᵢ} = A_E` (exactly, or within tolerance for floats) with
/// one segment per unit of rank.
pub fn verify_decomposition<T: Scalar>(e: &Ellipsoid<T>, segments: &[Segment<T>]) -> Result<()> {
    let n = e.ambient();
    let mut acc = SymMatrix::zero(n);
    for s in segments {
        if s.ambient() != n {
            return Err(Error::AmbientMismatch { expected: n, found: s.ambient() });
        }
        acc = acc.add(&s.matrix());
    }
    let target = e.matrix.matrix();
    let scale = target.max_abs();
    let tol = e.matrix.tolerance();
    let close = acc
        .rows()
        .iter()
        .flatten()
        .zip(target.rows().iter().flatten())
        .all(|(a, b)| (a.clone() - b.clone()).is_negligible(&scale, tol));
    if close && segments.len() == e.dim() {
        Ok(())
    } else {
        Err(Error::DecompositionMismatch)
    }
}

/// Both sides of `n·D(A_S, A_{E₂},…,A_{Eₙ}) = |t|²·D′(A′_{E₂},…,A′_{Eₙ})`
/// for a segment `S` along `eₙ` and ellipsoids in `S^⊥`, where `D′` is the
/// mixed discriminant of the leading `(n−1)×(n−1)` blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport<T> {
    pub lhs: T,
    pub rhs: T,
    pub equal: bool,
}

pub fn reduce_dimension<T: Scalar>(s: &Segment<T>, es: &[Ellipsoid<T>]) -> Result<ReductionReport<T>> {
    let n = s.ambient();
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    if s.vector[..n - 1].iter().any(|x| !x.is_zero()) {
        return Err(Error::PreconditionViolated("segment must be parallel to the last basis vector".into()));
    }
    if es.len() != n - 1 {
        return Err(Error::TupleLength { n: n - 1, len: es.len() });
    }
    for (index, e) in es.iter().enumerate() {
        if e.ambient() != n {
            return Err(Error::AmbientMismatch { expected: n, found: e.ambient() });
        }
        if !e.matrix.matrix().column(n - 1).iter().all(|x| x.is_zero()) {
            return Err(Error::NotInOrthogonalComplement { index });
        }
    }
    let tol = *es.first().map_or(&Tolerance::default(), |e| e.matrix.tolerance());

    let mut full = vec![validate_psd_with_tol(s.matrix(), tol)?];
    full.extend(es.iter().map(|e| e.matrix.clone()));
    let lhs = T::from_i64(n as i64) * md(&MatrixTuple::new(full)?, Algorithm::Auto)?;

    let reduced = if n == 1 {
        T::one()
    } else {
        let blocks = es
            .iter()
            .map(|e| validate_psd_with_tol(e.matrix.matrix().leading_block(n - 1), tol))
            .collect::<Result<Vec<_>>>()?;
        md(&MatrixTuple::new(blocks)?, Algorithm::Auto)?
    };
    let rhs = s.length_sq() * reduced;
    let equal = lhs.approx_eq(&rhs, &tol);
    Ok(ReductionReport { lhs, rhs, equal })
}
