//! Seeded random generators for PSD matrices, tuples, segments and
//! orthogonal matrices. Everything is driven by [`ChaCha8Rng`] so identical
//! seeds reproduce identical draws.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::discriminant::MatrixTuple;
use crate::matrix::{validate_psd, PsdMatrix, SymMatrix};
use crate::scalar::{Rational, Scalar};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random nonzero-or-zero integer vector with entries in `[-bound, bound]`.
pub fn int_vector(rng: &mut SampleRng, n: usize, bound: i64) -> Vec<Rational> {
    (0..n).map(|_| Rational::from_i64(rng.random_range(-bound..=bound))).collect()
}

/// Random nonzero integer vector.
pub fn nonzero_int_vector(rng: &mut SampleRng, n: usize, bound: i64) -> Vec<Rational> {
    loop {
        let v = int_vector(rng, n, bound);
        if v.iter().any(|x| *x != Rational::from_i64(0)) {
            return v;
        }
    }
}

/// Small positive rational `p/q` with `1 ≤ p ≤ 5`, `1 ≤ q ≤ 4`.
pub fn small_positive(rng: &mut SampleRng) -> Rational {
    Rational::from_ratio(rng.random_range(1..=5), rng.random_range(1..=4))
}

/// `Σₖ cₖ wₖwₖᵀ` over the given generators with random positive weights.
pub fn psd_from_generators(rng: &mut SampleRng, n: usize, generators: &[Vec<Rational>]) -> PsdMatrix<Rational> {
    let mut m = SymMatrix::zero(n);
    for w in generators {
        m = m.add(&SymMatrix::outer(w).scale(&small_positive(rng)));
    }
    validate_psd(m).expect("sum of weighted outer products is PSD")
}

/// Random rational PSD matrix of rank at most `rank`.
pub fn psd_of_rank(rng: &mut SampleRng, n: usize, rank: usize) -> PsdMatrix<Rational> {
    let gens: Vec<Vec<Rational>> = (0..rank).map(|_| nonzero_int_vector(rng, n, 3)).collect();
    psd_from_generators(rng, n, &gens)
}

/// Random rational PSD matrix with rank drawn uniformly from `0..=n`.
pub fn psd(rng: &mut SampleRng, n: usize) -> PsdMatrix<Rational> {
    let rank = rng.random_range(0..=n);
    psd_of_rank(rng, n, rank)
}

/// Random rational PSD matrix of full rank with overwhelming probability.
pub fn psd_full(rng: &mut SampleRng, n: usize) -> PsdMatrix<Rational> {
    psd_of_rank(rng, n, n + 1)
}

/// Tuple of independent random PSD matrices with ranks in `0..=n`.
pub fn tuple(rng: &mut SampleRng, n: usize) -> MatrixTuple<Rational> {
    MatrixTuple::new((0..n).map(|_| psd(rng, n)).collect()).expect("consistent dimensions")
}

/// Tuple biased toward vanishing mixed discriminants: every matrix is built
/// from a small shared palette of directions, with low ranks preferred.
pub fn degenerate_biased_tuple(rng: &mut SampleRng, n: usize) -> MatrixTuple<Rational> {
    let palette_size = rng.random_range(1..=n.max(1));
    let palette: Vec<Vec<Rational>> = (0..palette_size).map(|_| nonzero_int_vector(rng, n, 2)).collect();
    let entries = (0..n)
        .map(|_| {
            if rng.random_bool(0.5) {
                let rank = rng.random_range(0..=palette_size.min(2));
                let gens: Vec<Vec<Rational>> =
                    (0..rank).map(|_| palette[rng.random_range(0..palette_size)].clone()).collect();
                psd_from_generators(rng, n, &gens)
            } else {
                let rank = rng.random_range(0..=n).min(rng.random_range(0..=n));
                psd_of_rank(rng, n, rank)
            }
        })
        .collect();
    MatrixTuple::new(entries).expect("consistent dimensions")
}

/// Random float PSD matrix `G Gᵀ` with Gaussian `G` of `rank` columns.
pub fn psd_f64(rng: &mut SampleRng, n: usize, rank: usize) -> PsdMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(n, rank, |_, _| rng.sample(StandardNormal));
    let a = &g * g.transpose();
    let rows = (0..n).map(|i| (0..n).map(|j| 0.5 * (a[(i, j)] + a[(j, i)])).collect()).collect();
    validate_psd(SymMatrix::from_rows(rows).expect("symmetric")).expect("Gram matrix is PSD")
}

/// Orthogonal matrix from the QR factorization of a Gaussian matrix, with
/// column signs fixed so the distribution is Haar.
pub fn orthogonal(rng: &mut SampleRng, n: usize) -> Vec<Vec<f64>> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    (0..n)
        .map(|i| (0..n).map(|j| if r[(j, j)] < 0.0 { -q[(i, j)] } else { q[(i, j)] }).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_draws() {
        let a = tuple(&mut rng(3), 4);
        let b = tuple(&mut rng(3), 4);
        assert_eq!(a, b);
    }

    #[test]
    fn rank_bounded() {
        let mut r = rng(1);
        for k in 0..=3 {
            assert!(psd_of_rank(&mut r, 3, k).rank() <= k);
        }
    }

    #[test]
    fn orthogonal_is_orthogonal() {
        let b = orthogonal(&mut rng(9), 4);
        for i in 0..4 {
            for j in 0..4 {
                let d: f64 = (0..4).map(|k| b[k][i] * b[k][j]).sum();
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((d - e).abs() < 1e-12);
            }
        }
    }
}
