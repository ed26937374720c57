//! Mixed discriminants.
//!
//! `D(A₁,…,Aₙ)` is the symmetric coefficient function of the expansion
//!
//! ```text
//! det(λ₁A₁ + … + λ_mA_m) = Σ λ_{i₁}⋯λ_{iₙ} D(A_{i₁},…,A_{iₙ})
//! ```
//!
//! Two independent routes are provided. [`md_perm`] sums the determinants of
//! all column-mixed matrices over Sₙ. [`md_polar`] extracts the coefficient
//! by inclusion–exclusion over nonempty subsets:
//!
//! ```text
//! n!·D(A₁,…,Aₙ) = Σ_{∅≠J⊆[n]} (−1)^{n−|J|} det(Σ_{j∈J} A_j)
//! ```
//!
//! For `n = 2` this reads `det(A+B) − det A − det B = 2D(A,B)`.

use std::collections::BTreeMap;

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{PsdMatrix, SymMatrix, MAX_DIM};
use crate::scalar::Scalar;

/// Largest `n` accepted by the permutation-sum algorithm by default.
pub const PERM_CAP: usize = 8;
/// Largest `n` accepted by the subset-sum algorithm by default.
pub const POLAR_CAP: usize = MAX_DIM;

/// Arguments `(A₁,…,Aₙ)` of a mixed discriminant in dimension `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTuple<T> {
    n: usize,
    entries: Vec<PsdMatrix<T>>,
}

impl<T: Scalar> MatrixTuple<T> {
    pub fn new(entries: Vec<PsdMatrix<T>>) -> Result<Self> {
        let n = entries.first().map(PsdMatrix::dim).ok_or(Error::EmptyDimension)?;
        if entries.len() != n {
            return Err(Error::TupleLength { n, len: entries.len() });
        }
        if let Some(m) = entries.iter().find(|m| m.dim() != n) {
            return Err(Error::AmbientMismatch { expected: n, found: m.dim() });
        }
        Ok(MatrixTuple { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[PsdMatrix<T>] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> &PsdMatrix<T> {
        &self.entries[i]
    }

    /// Copy with slot `i` replaced.
    pub fn with_slot(&self, i: usize, m: PsdMatrix<T>) -> Result<Self> {
        let mut entries = self.entries.clone();
        entries[i] = m;
        Self::new(entries)
    }

    /// Copy with entries reordered: slot `k` receives entry `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        MatrixTuple { n: self.n, entries: order.iter().map(|&i| self.entries[i].clone()).collect() }
    }

    fn matrices(&self) -> Vec<&SymMatrix<T>> {
        self.entries.iter().map(PsdMatrix::matrix).collect()
    }
}

/// Algorithm selector for [`md`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Perm,
    Polar,
    Auto,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Perm => "perm",
            Algorithm::Polar => "polar",
            Algorithm::Auto => "auto",
        }
    }
}

fn factorial<T: Scalar>(n: usize) -> T {
    (1..=n as i64).fold(T::one(), |acc, k| acc * T::from_i64(k))
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::DimensionTooLarge { n, cap })
    } else {
        Ok(())
    }
}

/// Determinant of the matrix whose column `i` is column `i` of `mats[labels[i]]`.
fn mixed_column_det<T: Scalar>(mats: &[&SymMatrix<T>], labels: &[usize]) -> T {
    let n = labels.len();
    let rows = (0..n)
        .map(|r| (0..n).map(|c| mats[labels[c]].get(r, c).clone()).collect())
        .collect();
    T::determinant(rows)
}

/// Permutation-sum formula `D = (1/n!) Σ_σ det(A^{(1)}_{σ(1)},…,A^{(n)}_{σ(n)})`.
pub fn md_perm<T: Scalar>(t: &MatrixTuple<T>) -> Result<T> {
    md_perm_capped(t, PERM_CAP)
}

pub fn md_perm_capped<T: Scalar>(t: &MatrixTuple<T>, cap: usize) -> Result<T> {
    let n = t.n;
    check_cap(n, cap)?;
    let mats = t.matrices();
    // Split S(n) by the image of the first column; any partition sums to the
    // same exact value.
    let total = (0..n)
        .into_par_iter()
        .map(|first| {
            let rest: Vec<usize> = (0..n).filter(|&i| i != first).collect();
            rest.iter()
                .copied()
                .permutations(n - 1)
                .map(|tail| {
                    let mut labels = Vec::with_capacity(n);
                    labels.push(first);
                    labels.extend(tail);
                    mixed_column_det(&mats, &labels)
                })
                .fold(T::zero(), |a, b| a + b)
        })
        .collect::<Vec<T>>()
        .into_iter()
        .fold(T::zero(), |a, b| a + b);
    Ok(total / factorial(n))
}

/// Inclusion–exclusion over nonempty subsets of the tuple.
pub fn md_polar<T: Scalar>(t: &MatrixTuple<T>) -> Result<T> {
    md_polar_capped(t, POLAR_CAP)
}

pub fn md_polar_capped<T: Scalar>(t: &MatrixTuple<T>, cap: usize) -> Result<T> {
    let n = t.n;
    check_cap(n, cap)?;
    let mats = t.matrices();
    let total = (1u32..1 << n)
        .into_par_iter()
        .map(|mask| {
            let mut acc = SymMatrix::zero(n);
            for (j, m) in mats.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    acc = acc.add(m);
                }
            }
            let d = acc.determinant();
            if (n - mask.count_ones() as usize).is_multiple_of(2) {
                d
            } else {
                -d
            }
        })
        .collect::<Vec<T>>()
        .into_iter()
        .fold(T::zero(), |a, b| a + b);
    Ok(total / factorial(n))
}

/// Groups exactly-equal entries: distinct matrices with multiplicities.
fn group_entries<T: Scalar>(t: &MatrixTuple<T>) -> (Vec<&SymMatrix<T>>, Vec<usize>) {
    let mut mats: Vec<&SymMatrix<T>> = Vec::new();
    let mut counts = Vec::new();
    for m in t.matrices() {
        match mats.iter().position(|g| *g == m) {
            Some(i) => counts[i] += 1,
            None => {
                mats.push(m);
                counts.push(1);
            }
        }
    }
    (mats, counts)
}

/// All arrangements of a multiset given by label counts.
fn multiset_permutations(counts: &mut [usize], prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
    if prefix.len() == n {
        out.push(prefix.clone());
        return;
    }
    for g in 0..counts.len() {
        if counts[g] > 0 {
            counts[g] -= 1;
            prefix.push(g);
            multiset_permutations(counts, prefix, n, out);
            prefix.pop();
            counts[g] += 1;
        }
    }
}

/// Permutation sum over distinct column-label patterns; each pattern stands
/// for `∏ kᵍ!` permutations.
fn md_perm_grouped<T: Scalar>(mats: &[&SymMatrix<T>], counts: &[usize], n: usize) -> T {
    let mut patterns = Vec::new();
    multiset_permutations(&mut counts.to_vec(), &mut Vec::with_capacity(n), n, &mut patterns);
    let weight = counts.iter().fold(T::one(), |acc, &k| acc * factorial::<T>(k));
    let total = patterns
        .par_iter()
        .map(|labels| mixed_column_det(mats, labels))
        .collect::<Vec<T>>()
        .into_iter()
        .fold(T::zero(), |a, b| a + b);
    total * weight / factorial(n)
}

fn binomial<T: Scalar>(n: usize, k: usize) -> T {
    factorial::<T>(n) / (factorial::<T>(k) * factorial::<T>(n - k))
}

/// Subset sum over multiplicity vectors `0 ≤ cᵍ ≤ kᵍ`, weighted by `∏ C(kᵍ, cᵍ)`.
fn md_polar_grouped<T: Scalar>(mats: &[&SymMatrix<T>], counts: &[usize], n: usize) -> T {
    let choices: Vec<Vec<usize>> = counts.iter().map(|&k| (0..=k).collect()).collect();
    let total = choices
        .into_iter()
        .multi_cartesian_product()
        .filter(|c| c.iter().any(|&x| x > 0))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|c| {
            let mut acc = SymMatrix::zero(n);
            let mut weight = T::one();
            for ((m, &k), &ci) in mats.iter().zip(counts).zip(c) {
                if ci > 0 {
                    acc = acc.add(&m.scale(&T::from_i64(ci as i64)));
                }
                weight = weight * binomial::<T>(k, ci);
            }
            let size: usize = c.iter().sum();
            let term = weight * acc.determinant();
            if (n - size).is_multiple_of(2) {
                term
            } else {
                -term
            }
        })
        .collect::<Vec<T>>()
        .into_iter()
        .fold(T::zero(), |a, b| a + b);
    total / factorial(n)
}

/// Dispatching entry point. `Auto` uses the permutation route up to
/// [`PERM_CAP`] and the subset route above it, after collapsing repeated
/// arguments (exact entry-wise equality only).
pub fn md<T: Scalar>(t: &MatrixTuple<T>, algo: Algorithm) -> Result<T> {
    match algo {
        Algorithm::Perm => md_perm(t),
        Algorithm::Polar => md_polar(t),
        Algorithm::Auto => {
            let n = t.n;
            check_cap(n, POLAR_CAP)?;
            let (mats, counts) = group_entries(t);
            if mats.len() == 1 {
                return Ok(mats[0].determinant());
            }
            Ok(if n > PERM_CAP {
                md_polar_grouped(&mats, &counts, n)
            } else {
                md_perm_grouped(&mats, &counts, n)
            })
        }
    }
}

/// Mixed discriminant of raw symmetric matrices with repetition counts,
/// `D(A₁[k₁],…,A_m[k_m])`. No PSD check is performed.
pub fn md_with_multiplicities<T: Scalar>(mats: &[&SymMatrix<T>], counts: &[usize]) -> Result<T> {
    let n: usize = counts.iter().sum();
    check_cap(n, POLAR_CAP)?;
    let (mats, counts): (Vec<&SymMatrix<T>>, Vec<usize>) =
        mats.iter().zip(counts).filter(|(_, &k)| k > 0).map(|(m, &k)| (*m, k)).unzip();
    if let Some(m) = mats.iter().find(|m| m.dim() != n) {
        return Err(Error::AmbientMismatch { expected: n, found: m.dim() });
    }
    Ok(if n > PERM_CAP { md_polar_grouped(&mats, &counts, n) } else { md_perm_grouped(&mats, &counts, n) })
}

/// Coefficients of `det(λ₁A₁ + … + λ_mA_m)` as a homogeneous polynomial of
/// degree `n` in the λ's.
///
/// Keys are sorted index multisets `[i₁ ≤ … ≤ iₙ]` (0-based). The value for
/// multiplicities `(k₁,…,k_m)` is `n!/(k₁!⋯k_m!)·D(A₁[k₁],…,A_m[k_m])`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCoefficients<T> {
    m: usize,
    n: usize,
    table: BTreeMap<Vec<usize>, T>,
}

impl<T: Scalar> ExpansionCoefficients<T> {
    pub fn num_matrices(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &BTreeMap<Vec<usize>, T> {
        &self.table
    }

    pub fn coefficient(&self, multiset: &[usize]) -> Option<&T> {
        self.table.get(multiset)
    }

    /// Evaluates the polynomial at `lambdas`.
    pub fn evaluate(&self, lambdas: &[T]) -> Result<T> {
        if lambdas.len() != self.m {
            return Err(Error::AmbientMismatch { expected: self.m, found: lambdas.len() });
        }
        Ok(self.table.iter().fold(T::zero(), |acc, (key, c)| {
            acc + key.iter().fold(c.clone(), |p, &i| p * lambdas[i].clone())
        }))
    }
}

/// Builds the expansion table of `det(Σ λⱼAⱼ)`.
pub fn det_expansion<T: Scalar>(matrices: &[PsdMatrix<T>], n: usize) -> Result<ExpansionCoefficients<T>> {
    check_cap(n, POLAR_CAP)?;
    if let Some(a) = matrices.iter().find(|a| a.dim() != n) {
        return Err(Error::AmbientMismatch { expected: n, found: a.dim() });
    }
    let m = matrices.len();
    let mats: Vec<&SymMatrix<T>> = matrices.iter().map(PsdMatrix::matrix).collect();
    let mut table = BTreeMap::new();
    for key in (0..m).combinations_with_replacement(n) {
        let mut counts = vec![0usize; m];
        for &i in &key {
            counts[i] += 1;
        }
        let multinomial = counts.iter().fold(factorial::<T>(n), |acc, &k| acc / factorial::<T>(k));
        let d = md_with_multiplicities(&mats, &counts)?;
        table.insert(key, multinomial * d);
    }
    Ok(ExpansionCoefficients { m, n, table })
}
