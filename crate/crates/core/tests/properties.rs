//! Randomized invariants of the matrix, discriminant, positivity, ellipsoid
//! and harness layers. Inputs come from the crate's seeded samplers; proptest
//! chooses seeds and dimensions.

use mixdisc::discriminant::{det_expansion, md, md_perm, md_polar, Algorithm, MatrixTuple};
use mixdisc::ellipsoid::{combine, decompose_segments, eq7_check, verify_decomposition, Ellipsoid, L2Combination};
use mixdisc::harness::{audit, measure_functional, product_functional, ScaledMd};
use mixdisc::matrix::{validate_psd, PsdMatrix, SymMatrix};
use mixdisc::positivity::decide;
use mixdisc::sampling;
use mixdisc::{Rational, Scalar, Tolerance};
use proptest::prelude::*;
use rand::Rng;

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn zero() -> Rational {
    q(0, 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psd_determinant_nonnegative_and_rank_matches_column_space(seed in any::<u64>(), n in 1usize..=5) {
        let a = sampling::psd(&mut sampling::rng(seed), n);
        prop_assert!(a.matrix().determinant() >= zero());
        prop_assert_eq!(a.rank(), a.column_space().dim());
        let f = validate_psd(a.matrix().to_f64()).unwrap();
        prop_assert!(f.matrix().determinant() >= -Tolerance::default().rel);
    }

    #[test]
    fn psd_cone_closed_under_addition(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = sampling::rng(seed);
        let a = sampling::psd(&mut rng, n);
        let b = sampling::psd(&mut rng, n);
        prop_assert!(validate_psd(a.matrix().add(b.matrix())).is_ok());
    }

    #[test]
    fn exact_and_float_determinants_agree(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = sampling::rng(seed);
        let rows: Vec<Vec<Rational>> = (0..n)
            .map(|_| (0..n).map(|_| q(rng.random_range(-20..=20), rng.random_range(1..=9))).collect())
            .collect();
        let exact = Rational::determinant(rows.clone()).to_f64();
        let float = f64::determinant(rows.iter().map(|r| r.iter().map(Scalar::to_f64).collect()).collect());
        prop_assert!((exact - float).abs() <= 1e-9 * exact.abs().max(1.0), "{} vs {}", exact, float);
    }

    #[test]
    fn symmetric_under_permutation(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = sampling::rng(seed);
        let t = sampling::tuple(&mut rng, n);
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        prop_assert_eq!(md(&t, Algorithm::Auto).unwrap(), md(&t.permuted(&order), Algorithm::Auto).unwrap());
    }

    #[test]
    fn multilinear_in_every_slot(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = sampling::rng(seed);
        let t = sampling::tuple(&mut rng, n);
        let slot = rng.random_range(0..n);
        let a = sampling::psd(&mut rng, n);
        let b = sampling::psd(&mut rng, n);
        let alpha = q(rng.random_range(0..=6), rng.random_range(1..=5));
        let beta = q(rng.random_range(0..=6), rng.random_range(1..=5));
        let mixed = a.scale(&alpha).unwrap().add(&b.scale(&beta).unwrap());
        let lhs = md(&t.with_slot(slot, mixed).unwrap(), Algorithm::Auto).unwrap();
        let rhs = alpha * md(&t.with_slot(slot, a).unwrap(), Algorithm::Auto).unwrap()
            + beta * md(&t.with_slot(slot, b).unwrap(), Algorithm::Auto).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn nonnegative_and_monotone(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = sampling::rng(seed);
        let t = sampling::tuple(&mut rng, n);
        let d = md(&t, Algorithm::Auto).unwrap();
        prop_assert!(d >= zero());
        let slot = rng.random_range(0..n);
        let delta = sampling::psd(&mut rng, n);
        let bigger = t.with_slot(slot, t.get(slot).add(&delta)).unwrap();
        prop_assert!(md(&bigger, Algorithm::Auto).unwrap() >= d);
    }

    #[test]
    fn normalization_is_determinant(seed in any::<u64>(), n in 1usize..=6) {
        let a = sampling::psd(&mut sampling::rng(seed), n);
        let t = MatrixTuple::new(vec![a.clone(); n]).unwrap();
        prop_assert_eq!(md_polar(&t).unwrap(), a.matrix().determinant());
        prop_assert_eq!(md(&t, Algorithm::Auto).unwrap(), a.matrix().determinant());
    }

    #[test]
    fn auto_matches_naive_with_repeats(seed in any::<u64>(), n in 2usize..=6) {
        let mut rng = sampling::rng(seed);
        let pool: Vec<PsdMatrix<Rational>> = (0..2).map(|_| sampling::psd(&mut rng, n)).collect();
        let entries = (0..n).map(|_| pool[rng.random_range(0..2)].clone()).collect();
        let t = MatrixTuple::new(entries).unwrap();
        let naive = md_perm(&t).unwrap();
        prop_assert_eq!(md(&t, Algorithm::Auto).unwrap(), naive.clone());
        prop_assert_eq!(md_polar(&t).unwrap(), naive);
    }

    #[test]
    fn expansion_reproduces_determinant(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=3) {
        let mut rng = sampling::rng(seed);
        let mats: Vec<PsdMatrix<Rational>> = (0..m).map(|_| sampling::psd(&mut rng, n)).collect();
        let table = det_expansion(&mats, n).unwrap();
        let lambdas: Vec<Rational> = (0..m).map(|_| q(rng.random_range(0..=8), rng.random_range(1..=6))).collect();
        let direct = mats
            .iter()
            .zip(&lambdas)
            .fold(SymMatrix::zero(n), |acc, (a, l)| acc.add(&a.matrix().scale(l)))
            .determinant();
        prop_assert_eq!(table.evaluate(&lambdas).unwrap(), direct);
    }

    #[test]
    fn rotation_invariance_in_float(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = sampling::rng(seed);
        let mats: Vec<PsdMatrix<f64>> = (0..n).map(|_| { let r = rng.random_range(1..=n); sampling::psd_f64(&mut rng, n, r) }).collect();
        let b = sampling::orthogonal(&mut rng, n);
        let rotated: Vec<PsdMatrix<f64>> = mats.iter().map(|a| validate_psd(a.matrix().congruence(&b)).unwrap()).collect();
        let d0 = md(&MatrixTuple::new(mats).unwrap(), Algorithm::Auto).unwrap();
        let d1 = md(&MatrixTuple::new(rotated).unwrap(), Algorithm::Auto).unwrap();
        prop_assert!((d1 - d0).abs() <= 1e-9 * (1.0 + d0.abs()));
    }

    #[test]
    fn verdict_matches_sign_and_certificates_verify(seed in any::<u64>(), n in 1usize..=5) {
        let t = sampling::degenerate_biased_tuple(&mut sampling::rng(seed), n);
        let v = decide(&t).unwrap();
        prop_assert_eq!(v.is_positive(), md(&t, Algorithm::Auto).unwrap() > zero());
        prop_assert!(v.verify(&t));
    }

    #[test]
    fn verdict_invariant_under_positive_scaling(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = sampling::rng(seed);
        let t = sampling::degenerate_biased_tuple(&mut rng, n);
        let scaled = MatrixTuple::new(
            t.entries().iter().map(|a| a.scale(&sampling::small_positive(&mut rng)).unwrap()).collect(),
        ).unwrap();
        prop_assert_eq!(decide(&t).unwrap().is_positive(), decide(&scaled).unwrap().is_positive());
    }

    #[test]
    fn positive_status_survives_growth(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = sampling::rng(seed);
        let t = sampling::degenerate_biased_tuple(&mut rng, n);
        if decide(&t).unwrap().is_positive() {
            let slot = rng.random_range(0..n);
            let grown = t.with_slot(slot, t.get(slot).add(&sampling::psd(&mut rng, n))).unwrap();
            prop_assert!(decide(&grown).unwrap().is_positive());
        }
    }

    #[test]
    fn ellipsoid_correspondence_round_trip(seed in any::<u64>(), n in 1usize..=5) {
        let a = sampling::psd(&mut sampling::rng(seed), n);
        let e = Ellipsoid::new(a.clone());
        prop_assert_eq!(e.matrix(), &a);
        prop_assert_eq!(e.dim(), a.rank());
    }

    #[test]
    fn l2_sum_commutative_and_associative(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = sampling::rng(seed);
        let es: Vec<Ellipsoid<Rational>> = (0..3).map(|_| Ellipsoid::new(sampling::psd(&mut rng, n))).collect();
        let ls: Vec<Rational> = (0..3).map(|_| sampling::small_positive(&mut rng)).collect();
        let one = q(1, 1);
        let ab = combine(&L2Combination::new().term(ls[0].clone(), es[0].clone()).term(ls[1].clone(), es[1].clone())).unwrap();
        let ba = combine(&L2Combination::new().term(ls[1].clone(), es[1].clone()).term(ls[0].clone(), es[0].clone())).unwrap();
        prop_assert_eq!(&ab, &ba);
        let left = combine(&L2Combination::new().term(one.clone(), ab).term(ls[2].clone(), es[2].clone())).unwrap();
        let bc = combine(&L2Combination::new().term(ls[1].clone(), es[1].clone()).term(ls[2].clone(), es[2].clone())).unwrap();
        let right = combine(&L2Combination::new().term(ls[0].clone(), es[0].clone()).term(one, bc)).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn combined_support_squares_add(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = sampling::rng(seed);
        let e = Ellipsoid::new(sampling::psd(&mut rng, n));
        let f = Ellipsoid::new(sampling::psd(&mut rng, n));
        let (l1, l2) = (sampling::small_positive(&mut rng), sampling::small_positive(&mut rng));
        let c = combine(&L2Combination::new().term(l1.clone(), e.clone()).term(l2.clone(), f.clone())).unwrap();
        let u = sampling::int_vector(&mut rng, n, 5);
        let expected = l1 * e.support(&u).unwrap().squared + l2 * f.support(&u).unwrap().squared;
        prop_assert_eq!(c.support(&u).unwrap().squared, expected);
    }

    #[test]
    fn inclusion_matches_psd_order(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = sampling::rng(seed);
        let e = Ellipsoid::new(sampling::psd(&mut rng, n));
        let f = Ellipsoid::new(sampling::psd(&mut rng, n));
        let grown = combine(&L2Combination::new().term(q(1, 1), e.clone()).term(q(1, 1), f.clone())).unwrap();
        prop_assert!(e.is_contained_in(&grown));
        let dirs: Vec<Vec<Rational>> = (0..20).map(|_| sampling::int_vector(&mut rng, n, 4)).collect();
        for u in &dirs {
            prop_assert!(e.support(u).unwrap().squared <= grown.support(u).unwrap().squared);
        }
        // A sampled support violation certifies that f − e is not PSD.
        if dirs.iter().any(|u| e.support(u).unwrap().squared > f.support(u).unwrap().squared) {
            prop_assert!(!e.is_contained_in(&f));
        }
    }

    #[test]
    fn homogeneity_in_each_slot(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = sampling::rng(seed);
        let t = sampling::tuple(&mut rng, n);
        let slot = rng.random_range(0..n);
        let lambda = q(rng.random_range(0..=9), rng.random_range(1..=4));
        let scaled = t.with_slot(slot, t.get(slot).scale(&lambda).unwrap()).unwrap();
        prop_assert_eq!(md(&scaled, Algorithm::Auto).unwrap(), lambda * md(&t, Algorithm::Auto).unwrap());
    }

    #[test]
    fn polarization_identity_exact(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=3) {
        let mut rng = sampling::rng(seed);
        let es: Vec<Ellipsoid<Rational>> = (0..m).map(|_| Ellipsoid::new(sampling::psd(&mut rng, n))).collect();
        let ls: Vec<Rational> = (0..m).map(|_| q(rng.random_range(0..=5), rng.random_range(1..=3))).collect();
        let r = eq7_check(&es, &ls).unwrap();
        prop_assert!(r.equal);
        prop_assert_eq!(r.lhs, r.rhs);
    }

    #[test]
    fn float_decomposition_recombines(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = sampling::rng(seed);
        let rank = rng.random_range(0..=n);
        let e = Ellipsoid::new(sampling::psd_f64(&mut rng, n, rank));
        let segs = decompose_segments(&e).unwrap();
        prop_assert_eq!(segs.len(), e.dim());
        prop_assert!(verify_decomposition(&e, &segs).is_ok());
    }

    #[test]
    fn scaled_md_audit_recovers_factor(seed in any::<u64>(), num in 0i64..=12, den in 1i64..=5) {
        let c = q(num, den);
        let r = audit(&ScaledMd::new(c.clone()), 2, 4, seed).unwrap();
        prop_assert_eq!(r.estimated_a, Some(c));
        prop_assert!(r.proportionality.unwrap().passed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Boundedness by a multiple of D forces vanishing: a sampled vanishing
    /// failure and sampled boundedness never co-occur.
    #[test]
    fn vanishing_failures_refute_boundedness(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = sampling::rng(seed);
        let fixed: Vec<PsdMatrix<Rational>> = (0..n - 1).map(|_| sampling::psd(&mut rng, n)).collect();
        let product = product_functional(n, fixed).unwrap();
        let atoms = vec![(0..n).map(|_| sampling::nonzero_int_vector(&mut rng, n, 3)).collect()];
        let measure = measure_functional(atoms, vec![q(1, 1)]).unwrap();
        for r in [audit(&product, n, 6, seed).unwrap(), audit(&measure, n, 6, seed).unwrap(), audit(&ScaledMd::new(q(2, 1)), n, 6, seed).unwrap()] {
            prop_assert!(r.vanishing_on_proportional_rank_one.passed || !r.bounded_by_md);
            prop_assert!(r.nonnegative.passed);
            prop_assert!(r.additive_per_slot.iter().all(|c| c.passed));
        }
    }
}

#[test]
fn full_rank_tuple_is_positive() {
    let mut rng = sampling::rng(11);
    for n in 1..=5 {
        let t = MatrixTuple::new((0..n).map(|_| sampling::psd_full(&mut rng, n)).collect()).unwrap();
        assert!(decide(&t).unwrap().is_positive());
    }
}
