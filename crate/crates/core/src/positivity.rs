//! Deciding `D(A₁,…,Aₙ) > 0`.
//!
//! For PSD arguments the following are equivalent:
//!
//! * `D(A₁,…,Aₙ) > 0`;
//! * there are linearly independent `vᵢ ∈ P(Aᵢ)` (a transversal);
//! * `dim(P(A_{i₁}) + … + P(A_{i_k})) ≥ k` for every index subset;
//! * the mixed volume of the sections `P(Aᵢ) ∩ Bⁿ` is positive (not
//!   computed here).
//!
//! `P(A)` is the range of `A`. A `Zero` verdict carries the lexicographically
//! smallest index subset violating the dimension condition; a `Positive`
//! verdict carries a transversal. Both re-verify independently.
//!
//! Float verdicts depend on a tolerance-based rank and are advisory only.

use itertools::Itertools;
use rand::Rng;

use crate::discriminant::MatrixTuple;
use crate::error::{Error, Result};
use crate::matrix::PsdMatrix;
use crate::sampling;
use crate::scalar::{Scalar, Tolerance};
use crate::subspace::{as_rows, sum_dim, Subspace};

/// Index subset whose range sum is too small. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolationCertificate {
    pub indices: Vec<usize>,
    pub achieved_dim: usize,
}

impl ViolationCertificate {
    /// Recomputes the range sum from scratch.
    pub fn verify<T: Scalar>(&self, t: &MatrixTuple<T>) -> bool {
        if self.indices.is_empty()
            || !self.indices.windows(2).all(|w| w[0] < w[1])
            || self.indices.iter().any(|&i| i >= t.dim())
        {
            return false;
        }
        let spaces: Vec<Subspace<T>> = self.indices.iter().map(|&i| t.get(i).column_space()).collect();
        let refs: Vec<&Subspace<T>> = spaces.iter().collect();
        matches!(sum_dim(&refs), Ok(d) if d == self.achieved_dim && d < self.indices.len())
    }
}

/// Linearly independent `vᵢ ∈ P(Aᵢ)`, each stored with its coefficients on
/// the column-space basis of `Aᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransversalCertificate<T> {
    pub vectors: Vec<Vec<T>>,
    pub coefficients: Vec<Vec<T>>,
    pub determinant: T,
}

impl<T: Scalar> TransversalCertificate<T> {
    /// Recomputes bases, memberships and the determinant from scratch.
    pub fn verify(&self, t: &MatrixTuple<T>) -> bool {
        let n = t.dim();
        if self.vectors.len() != n || self.coefficients.len() != n {
            return false;
        }
        let tol = *t.get(0).tolerance();
        for (i, (v, c)) in self.vectors.iter().zip(&self.coefficients).enumerate() {
            let space = t.get(i).column_space();
            if v.len() != n || c.len() != space.dim() || !space.contains(v) {
                return false;
            }
            let rebuilt = space.combine(c);
            if !rebuilt.iter().zip(v).all(|(a, b)| a.approx_eq(b, &tol)) {
                return false;
            }
        }
        independent(&self.vectors, &tol).is_some()
    }
}

/// Outcome of the dimension condition alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubsetCondition {
    Holds,
    Violated(ViolationCertificate),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PositivityVerdict<T> {
    Positive(TransversalCertificate<T>),
    Zero(ViolationCertificate),
}

impl<T: Scalar> PositivityVerdict<T> {
    pub fn is_positive(&self) -> bool {
        matches!(self, PositivityVerdict::Positive(_))
    }

    pub fn status(&self) -> &'static str {
        if self.is_positive() {
            "POSITIVE"
        } else {
            "ZERO"
        }
    }

    pub fn verify(&self, t: &MatrixTuple<T>) -> bool {
        match self {
            PositivityVerdict::Positive(c) => c.verify(t),
            PositivityVerdict::Zero(c) => c.verify(t),
        }
    }
}

/// Parameters of the randomized transversal search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Combination coefficients are uniform in `[-coeff_bound, coeff_bound]`.
    pub coeff_bound: i64,
    /// Random attempts before the exhaustive fallback.
    pub retries: usize,
    pub seed: u64,
    /// Largest number of basis-vector tuples the fallback may enumerate.
    pub exhaustive_bound: u128,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { coeff_bound: 1000, retries: 20, seed: 0, exhaustive_bound: 1_000_000 }
    }
}

/// Checks the dimension condition on every nonempty index subset.
///
/// Subsets are visited in lexicographic order of their sorted index lists
/// (`[0] < [0,1] < [0,1,2] < [0,2] < [1] < …`), so the first violation found
/// is the lexicographically smallest; among subsets sharing a prefix the
/// shorter one comes first.
pub fn check_subset_condition<T: Scalar>(t: &MatrixTuple<T>) -> Result<SubsetCondition> {
    let n = t.dim();
    if n > crate::discriminant::POLAR_CAP {
        return Err(Error::DimensionTooLarge { n, cap: crate::discriminant::POLAR_CAP });
    }
    let spaces: Vec<Subspace<T>> = t.entries().iter().map(PsdMatrix::column_space).collect();
    let mut stack: Vec<usize> = Vec::with_capacity(n);
    Ok(match visit(&spaces, &mut stack, 0)? {
        Some(c) => SubsetCondition::Violated(c),
        None => SubsetCondition::Holds,
    })
}

fn visit<T: Scalar>(spaces: &[Subspace<T>], prefix: &mut Vec<usize>, start: usize) -> Result<Option<ViolationCertificate>> {
    for i in start..spaces.len() {
        prefix.push(i);
        let refs: Vec<&Subspace<T>> = prefix.iter().map(|&j| &spaces[j]).collect();
        let d = sum_dim(&refs)?;
        if d < prefix.len() {
            return Ok(Some(ViolationCertificate { indices: prefix.clone(), achieved_dim: d }));
        }
        if let Some(c) = visit(spaces, prefix, i + 1)? {
            return Ok(Some(c));
        }
        prefix.pop();
    }
    Ok(None)
}

/// Returns the determinant when the vectors are independent.
fn independent<T: Scalar>(vectors: &[Vec<T>], tol: &Tolerance) -> Option<T> {
    let n = vectors.len();
    let det = T::determinant(as_rows(n, vectors));
    if T::EXACT {
        return (!det.is_zero()).then_some(det);
    }
    let norms: f64 = vectors
        .iter()
        .map(|v| v.iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt())
        .product();
    (det.to_f64().abs() > tol.rel * norms).then_some(det)
}

/// Finds linearly independent `vᵢ ∈ P(Aᵢ)`.
///
/// Random integer combinations of each column-space basis are tried first;
/// when the dimension condition holds, the determinant of such a draw is a
/// nonzero polynomial in the coefficients, so failures are rare. After
/// `retries` failures every tuple of basis vectors is searched, which always
/// contains a transversal when one exists.
pub fn find_transversal<T: Scalar>(t: &MatrixTuple<T>, cfg: &SearchConfig) -> Result<TransversalCertificate<T>> {
    if let SubsetCondition::Violated(v) = check_subset_condition(t)? {
        return Err(Error::PreconditionViolated(format!(
            "subset {:?} spans only {} dimensions",
            v.indices, v.achieved_dim
        )));
    }
    let tol = *t.get(0).tolerance();
    let spaces: Vec<Subspace<T>> = t.entries().iter().map(PsdMatrix::column_space).collect();
    let mut rng = sampling::rng(cfg.seed);

    for _ in 0..cfg.retries {
        let coefficients: Vec<Vec<T>> = spaces
            .iter()
            .map(|s| (0..s.dim()).map(|_| T::from_i64(rng.random_range(-cfg.coeff_bound..=cfg.coeff_bound))).collect())
            .collect();
        let vectors: Vec<Vec<T>> = spaces.iter().zip(&coefficients).map(|(s, c)| s.combine(c)).collect();
        if let Some(determinant) = independent(&vectors, &tol) {
            return Ok(TransversalCertificate { vectors, coefficients, determinant });
        }
    }

    let tuples: u128 = spaces.iter().map(|s| s.dim() as u128).product();
    if tuples > cfg.exhaustive_bound {
        return Err(Error::SearchExhausted { tuples, bound: cfg.exhaustive_bound });
    }
    for pick in spaces.iter().map(|s| 0..s.dim()).multi_cartesian_product() {
        let vectors: Vec<Vec<T>> = pick.iter().zip(&spaces).map(|(&k, s)| s.basis()[k].clone()).collect();
        if let Some(determinant) = independent(&vectors, &tol) {
            let coefficients = pick
                .iter()
                .zip(&spaces)
                .map(|(&k, s)| (0..s.dim()).map(|j| if j == k { T::one() } else { T::zero() }).collect())
                .collect();
            return Ok(TransversalCertificate { vectors, coefficients, determinant });
        }
    }
    // Only reachable in float mode, where the tolerance-based ranks can
    // disagree with the determinant test.
    Err(Error::PreconditionViolated(format!("no independent tuple among {tuples} basis-vector tuples")))
}

/// Full verdict with certificate.
pub fn decide<T: Scalar>(t: &MatrixTuple<T>) -> Result<PositivityVerdict<T>> {
    decide_with(t, &SearchConfig::default())
}

pub fn decide_with<T: Scalar>(t: &MatrixTuple<T>, cfg: &SearchConfig) -> Result<PositivityVerdict<T>> {
    let verdict = match check_subset_condition(t)? {
        SubsetCondition::Violated(c) => PositivityVerdict::Zero(c),
        SubsetCondition::Holds => PositivityVerdict::Positive(find_transversal(t, cfg)?),
    };
    #[cfg(debug_assertions)]
    if T::EXACT {
        let d = crate::discriminant::md(t, crate::discriminant::Algorithm::Auto)?;
        debug_assert_eq!(verdict.is_positive(), d > T::zero(), "positivity verdict disagrees with D");
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{validate_psd, SymMatrix};
    use crate::scalar::Rational;

    fn q(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    fn diag(d: &[i64]) -> PsdMatrix<Rational> {
        validate_psd(SymMatrix::diagonal(d.iter().map(|&v| q(v)).collect())).unwrap()
    }

    fn outer(v: &[i64]) -> PsdMatrix<Rational> {
        validate_psd(SymMatrix::outer(&v.iter().map(|&x| q(x)).collect::<Vec<_>>())).unwrap()
    }

    fn tuple(ms: Vec<PsdMatrix<Rational>>) -> MatrixTuple<Rational> {
        MatrixTuple::new(ms).unwrap()
    }

    #[test]
    fn subset_condition_examples() {
        let t = tuple(vec![diag(&[1, 0]), diag(&[0, 1])]);
        assert_eq!(check_subset_condition(&t).unwrap(), SubsetCondition::Holds);

        let t = tuple(vec![diag(&[1, 0]), diag(&[1, 0])]);
        let SubsetCondition::Violated(c) = check_subset_condition(&t).unwrap() else { panic!() };
        assert_eq!(c, ViolationCertificate { indices: vec![0, 1], achieved_dim: 1 });
        assert!(c.verify(&t));

        let t = tuple(vec![diag(&[0, 0]), diag(&[1, 1])]);
        let SubsetCondition::Violated(c) = check_subset_condition(&t).unwrap() else { panic!() };
        assert_eq!(c, ViolationCertificate { indices: vec![0], achieved_dim: 0 });
    }

    #[test]
    fn lexicographic_tie_break() {
        // Only the full index set violates: range sum 2 < 3.
        let t = tuple(vec![diag(&[1, 0, 0]), diag(&[0, 1, 0]), outer(&[1, 1, 0])]);
        let SubsetCondition::Violated(c) = check_subset_condition(&t).unwrap() else { panic!() };
        assert_eq!(c, ViolationCertificate { indices: vec![0, 1, 2], achieved_dim: 2 });

        let t = tuple(vec![diag(&[1, 1, 0]), outer(&[0, 0, 1]), outer(&[0, 0, 2])]);
        let SubsetCondition::Violated(c) = check_subset_condition(&t).unwrap() else { panic!() };
        assert_eq!(c, ViolationCertificate { indices: vec![1, 2], achieved_dim: 1 });
    }

    #[test]
    fn transversal_examples() {
        let cfg = SearchConfig::default();
        let t = tuple(vec![diag(&[1, 0]), diag(&[0, 1])]);
        let c = find_transversal(&t, &cfg).unwrap();
        assert!(c.verify(&t));
        assert_eq!(c.vectors[0][1], q(0));
        assert_eq!(c.vectors[1][0], q(0));

        let t = tuple(vec![diag(&[1, 1]), diag(&[1, 1])]);
        assert!(find_transversal(&t, &cfg).unwrap().verify(&t));

        let t = tuple(vec![diag(&[1, 1, 1]), diag(&[0, 0, 1]), diag(&[1, 1, 0])]);
        let c = find_transversal(&t, &cfg).unwrap();
        assert!(c.verify(&t));
        assert_eq!(&c.vectors[1][..2], &[q(0), q(0)]);
        assert_eq!(c.vectors[2][2], q(0));
    }

    #[test]
    fn exhaustive_fallback_finds_transversal() {
        let cfg = SearchConfig { retries: 0, ..SearchConfig::default() };
        let t = tuple(vec![diag(&[1, 1, 1]), diag(&[0, 0, 1]), diag(&[1, 1, 0])]);
        let c = find_transversal(&t, &cfg).unwrap();
        assert!(c.verify(&t));
    }

    #[test]
    fn exhaustive_bound_is_reported() {
        let cfg = SearchConfig { retries: 0, exhaustive_bound: 3, ..SearchConfig::default() };
        let t = tuple(vec![diag(&[1, 1]), diag(&[1, 1])]);
        assert_eq!(find_transversal(&t, &cfg), Err(Error::SearchExhausted { tuples: 4, bound: 3 }));
    }

    #[test]
    fn transversal_on_zero_tuple_is_rejected() {
        let t = tuple(vec![diag(&[1, 0]), diag(&[1, 0])]);
        assert!(matches!(find_transversal(&t, &SearchConfig::default()), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn decide_examples() {
        let t = tuple(vec![diag(&[1, 1]), diag(&[1, 1])]);
        assert!(decide(&t).unwrap().is_positive());

        let t = tuple(vec![diag(&[1, 0]), diag(&[0, 1])]);
        let v = decide(&t).unwrap();
        assert!(v.is_positive() && v.verify(&t));

        let t = tuple(vec![outer(&[1, 1, 0]), outer(&[2, 2, 0]), diag(&[1, 1, 1])]);
        assert_eq!(
            decide(&t).unwrap(),
            PositivityVerdict::Zero(ViolationCertificate { indices: vec![0, 1], achieved_dim: 1 })
        );
    }

    #[test]
    fn seeds_reproduce_certificates() {
        let t = tuple(vec![diag(&[1, 1, 1]), diag(&[2, 1, 1]), diag(&[1, 3, 0])]);
        let cfg = SearchConfig { seed: 7, ..SearchConfig::default() };
        assert_eq!(decide_with(&t, &cfg).unwrap(), decide_with(&t, &cfg).unwrap());
    }

    #[test]
    fn float_verdicts() {
        let a = validate_psd(SymMatrix::diagonal(vec![1.0, 0.0])).unwrap();
        let b = validate_psd(SymMatrix::diagonal(vec![0.0, 1.0])).unwrap();
        let t = MatrixTuple::new(vec![a.clone(), b]).unwrap();
        assert!(decide(&t).unwrap().verify(&t));
        let t = MatrixTuple::new(vec![a.clone(), a]).unwrap();
        assert!(!decide(&t).unwrap().is_positive());
    }
}
