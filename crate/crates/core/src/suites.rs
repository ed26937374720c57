//! Randomized verification suites run by `mixdisc verify`.
//!
//! Each suite draws seeded random instances, checks an identity on each one
//! and collects failing instances for replay. Suites are deterministic given
//! their parameters.

use rand::Rng;

use crate::discriminant::{det_expansion, md, md_perm, md_polar, Algorithm, MatrixTuple};
use crate::ellipsoid::{eq7_check, reduce_dimension, Ellipsoid, Segment};
use crate::error::{Error, Result};
use crate::harness::{self, audit, lemma_traces, CandidateFunctional, ScaledMd};
use crate::matrix::{validate_psd, PsdMatrix, SymMatrix};
use crate::positivity::decide;
use crate::sampling::{self, SampleRng};
use crate::scalar::{Rational, Scalar};

/// Relative deviation allowed by the rotation-invariance check.
pub const ROTATION_TOLERANCE: f64 = 1e-8;

pub const SUITES: [&str; 5] = ["oracle", "prop1", "eq7", "lemmas", "harness"];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SuiteParams {
    /// Largest dimension exercised; suite-specific default when `None`.
    pub n: Option<usize>,
    /// Instances per dimension (or per check); suite-specific default when `None`.
    pub trials: Option<usize>,
    pub seed: u64,
}

/// A failing instance, kept for replay.
#[derive(Debug, Clone, PartialEq)]
pub struct FailureCase {
    pub check: String,
    pub case: usize,
    pub message: String,
    pub matrices: Vec<SymMatrix<Rational>>,
    pub lambdas: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<FailureCase>,
}

impl CheckReport {
    fn new(name: &str) -> Self {
        CheckReport { name: name.to_string(), cases: 0, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, message: String, matrices: Vec<SymMatrix<Rational>>, lambdas: Vec<Rational>) {
        self.failures.push(FailureCase { check: self.name.clone(), case: self.cases, message, matrices, lambdas });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckReport::passed)
    }
}

fn raw(t: &MatrixTuple<Rational>) -> Vec<SymMatrix<Rational>> {
    t.entries().iter().map(|m| m.matrix().clone()).collect()
}

pub fn run(name: &str, params: &SuiteParams) -> Result<Vec<SuiteReport>> {
    match name {
        "oracle" => Ok(vec![oracle(params)?]),
        "prop1" => Ok(vec![prop1(params)?]),
        "eq7" => Ok(vec![eq7(params)?]),
        "lemmas" => Ok(vec![lemmas(params)?]),
        "harness" => Ok(vec![harness(params)?]),
        "all" => SUITES.iter().map(|s| run(s, params).map(|mut v| v.remove(0))).collect(),
        other => Err(Error::PreconditionViolated(format!("unknown suite {other:?}"))),
    }
}

/// `md_perm = md_polar = md(Auto)` on random tuples of mixed rank, for every
/// dimension `1..=n` (default 6, 500 tuples each).
pub fn oracle(p: &SuiteParams) -> Result<SuiteReport> {
    let max_n = p.n.unwrap_or(6);
    let trials = p.trials.unwrap_or(500);
    let mut rng = sampling::rng(p.seed);
    let mut check = CheckReport::new("perm_equals_polar");
    for n in 1..=max_n {
        for _ in 0..trials {
            let t = sampling::tuple(&mut rng, n);
            let perm = md_perm(&t)?;
            let polar = md_polar(&t)?;
            let auto = md(&t, Algorithm::Auto)?;
            if perm != polar || perm != auto {
                check.fail(format!("perm {} polar {} auto {}", perm.to_repr(), polar.to_repr(), auto.to_repr()), raw(&t), vec![]);
            }
            check.cases += 1;
        }
    }
    Ok(SuiteReport { suite: "oracle".into(), checks: vec![check] })
}

/// Positivity verdicts against the sign of `D`, with certificate
/// re-verification, on tuples biased toward rank deficiency (default 1000
/// tuples cycling through `n = 1..=5`).
pub fn prop1(p: &SuiteParams) -> Result<SuiteReport> {
    let max_n = p.n.unwrap_or(5);
    let trials = p.trials.unwrap_or(1000);
    let mut rng = sampling::rng(p.seed);
    let mut agree = CheckReport::new("status_matches_sign");
    let mut sound = CheckReport::new("certificates_reverify");
    for k in 0..trials {
        let n = 1 + k % max_n;
        let t = sampling::degenerate_biased_tuple(&mut rng, n);
        let verdict = decide(&t)?;
        let positive = md(&t, Algorithm::Auto)? > Rational::from_i64(0);
        if verdict.is_positive() != positive {
            agree.fail(format!("verdict {} but D > 0 is {positive}", verdict.status()), raw(&t), vec![]);
        }
        agree.cases += 1;
        if !verdict.verify(&t) {
            sound.fail(format!("{} certificate failed re-verification", verdict.status()), raw(&t), vec![]);
        }
        sound.cases += 1;
    }
    Ok(SuiteReport { suite: "prop1".into(), checks: vec![agree, sound] })
}

/// Polarization identity and the defining expansion on random ellipsoids.
pub fn eq7(p: &SuiteParams) -> Result<SuiteReport> {
    let max_n = p.n.unwrap_or(4);
    let trials = p.trials.unwrap_or(200);
    let mut rng = sampling::rng(p.seed);
    let mut polar = CheckReport::new("volume_polarization");
    let mut expansion = CheckReport::new("defining_expansion");
    for _ in 0..trials {
        let n = rng.random_range(1..=max_n);
        let m = rng.random_range(1..=4);
        let es: Vec<Ellipsoid<Rational>> = (0..m).map(|_| Ellipsoid::new(sampling::psd(&mut rng, n))).collect();
        let lambdas = random_lambdas(&mut rng, m);
        let r = eq7_check(&es, &lambdas)?;
        let mats: Vec<SymMatrix<Rational>> = es.iter().map(|e| e.matrix().matrix().clone()).collect();
        if !r.equal {
            polar.fail(format!("lhs {} rhs {}", r.lhs.to_repr(), r.rhs.to_repr()), mats.clone(), lambdas.clone());
        }
        polar.cases += 1;

        let psd: Vec<PsdMatrix<Rational>> = es.iter().map(|e| e.matrix().clone()).collect();
        let table = det_expansion(&psd, n)?;
        let direct = mats
            .iter()
            .zip(&lambdas)
            .fold(SymMatrix::zero(n), |acc, (a, l)| acc.add(&a.scale(l)))
            .determinant();
        let via = table.evaluate(&lambdas)?;
        if via != direct {
            expansion.fail(format!("expansion {} determinant {}", via.to_repr(), direct.to_repr()), mats, lambdas);
        }
        expansion.cases += 1;
    }
    Ok(SuiteReport { suite: "eq7".into(), checks: vec![polar, expansion] })
}

/// Nonnegative rationals, occasionally zero.
pub fn random_lambdas(rng: &mut SampleRng, m: usize) -> Vec<Rational> {
    (0..m)
        .map(|_| Rational::from_ratio(rng.random_range(0..=9), rng.random_range(1..=7)))
        .collect()
}

/// Segment along `eₙ` and `n−1` random ellipsoids in its orthogonal
/// complement.
pub fn reduction_instance(rng: &mut SampleRng, n: usize) -> (Segment<Rational>, Vec<Ellipsoid<Rational>>) {
    let mut t = vec![Rational::from_i64(0); n];
    t[n - 1] = Rational::from_ratio(rng.random_range(1..=9) * if rng.random_bool(0.5) { 1 } else { -1 }, rng.random_range(1..=4));
    let es = (0..n - 1)
        .map(|_| {
            let small = sampling::psd(rng, n - 1);
            let mut rows = vec![vec![Rational::from_i64(0); n]; n];
            for (i, row) in small.matrix().rows().iter().enumerate() {
                rows[i][..n - 1].clone_from_slice(row);
            }
            Ellipsoid::new(validate_psd(SymMatrix::from_rows(rows).expect("symmetric")).expect("embedded PSD"))
        })
        .collect();
    (Segment::new(t), es)
}

/// Relative deviation of `D` under a random orthogonal change of basis.
pub fn rotation_deviation(rng: &mut SampleRng, n: usize) -> Result<(f64, Vec<SymMatrix<f64>>)> {
    let mats: Vec<PsdMatrix<f64>> = (0..n)
        .map(|_| {
            let rank = rng.random_range(1..=n);
            sampling::psd_f64(rng, n, rank)
        })
        .collect();
    let b = sampling::orthogonal(rng, n);
    let rotated = mats
        .iter()
        .map(|a| validate_psd(a.matrix().congruence(&b)))
        .collect::<Result<Vec<_>>>()?;
    let d0 = md(&MatrixTuple::new(mats.clone())?, Algorithm::Auto)?;
    let d1 = md(&MatrixTuple::new(rotated)?, Algorithm::Auto)?;
    Ok(((d1 - d0).abs() / (1.0 + d0.abs()), mats.into_iter().map(PsdMatrix::into_inner).collect()))
}

/// Segment identities, dimension reduction and rotation invariance.
pub fn lemmas(p: &SuiteParams) -> Result<SuiteReport> {
    let max_n = p.n.unwrap_or(4).max(2);
    let seeds = p.trials.unwrap_or(100);
    let mut traces = CheckReport::new("segment_traces");
    for n in 2..=max_n {
        for k in 0..seeds {
            let seed = p.seed.wrapping_mul(1_000_003).wrapping_add((n * 100_000 + k) as u64);
            let r = lemma_traces(n, 2, seed)?;
            for f in &r.failures {
                traces.fail(
                    format!("{} at n={n} seed={seed}: {} vs {}", f.kind.name(), f.left_value.to_repr(), f.right_value.to_repr()),
                    raw(&f.left).into_iter().chain(raw(&f.right)).collect(),
                    vec![],
                );
            }
            traces.cases += r.shift_checks + r.swap_checks + r.diagonal_checks;
        }
    }

    let instances = 2 * seeds;
    let mut rng = sampling::rng(p.seed ^ 0x5eed);
    let mut reduction = CheckReport::new("dimension_reduction");
    for k in 0..instances {
        let n = 2 + k % (max_n - 1);
        let (s, es) = reduction_instance(&mut rng, n);
        let r = reduce_dimension(&s, &es)?;
        if !r.equal {
            let mut mats = vec![s.matrix()];
            mats.extend(es.iter().map(|e| e.matrix().matrix().clone()));
            reduction.fail(format!("lhs {} rhs {}", r.lhs.to_repr(), r.rhs.to_repr()), mats, vec![]);
        }
        reduction.cases += 1;
    }

    let mut rotation = CheckReport::new("rotation_invariance");
    for k in 0..instances {
        let n = 1 + k % max_n.max(5);
        let (dev, mats) = rotation_deviation(&mut rng, n)?;
        if dev.is_nan() || dev > ROTATION_TOLERANCE {
            let exact = mats
                .iter()
                .map(|m| {
                    SymMatrix::from_rows_unchecked(
                        m.rows().iter().map(|r| r.iter().map(|&x| Rational::from_f64(x).unwrap_or_default()).collect()).collect(),
                    )
                })
                .collect();
            rotation.fail(format!("relative deviation {dev:e}"), exact, vec![]);
        }
        rotation.cases += 1;
    }
    Ok(SuiteReport { suite: "lemmas".into(), checks: vec![traces, reduction, rotation] })
}

/// Characterization audits: scaled `D` recovers its factor, the two
/// counterexample functionals fail only the vanishing hypothesis.
pub fn harness(p: &SuiteParams) -> Result<SuiteReport> {
    let n = p.n.unwrap_or(3).max(2);
    let trials = p.trials.unwrap_or(200);
    let mut recovery = CheckReport::new("scaled_md_recovery");
    for (k, c) in [(0, 1), (1, 1), (1, 3), (7, 1)].into_iter().enumerate() {
        let c = Rational::from_ratio(c.0, c.1);
        let f = ScaledMd::new(c.clone());
        let r = audit(&f, n, trials, p.seed.wrapping_add(k as u64))?;
        let proportional = r.proportionality.as_ref().is_some_and(|p| p.passed);
        if r.estimated_a.as_ref() != Some(&c) || !proportional || !r.hypotheses_hold() {
            recovery.fail(
                format!("factor {} estimated {:?}", c.to_repr(), r.estimated_a.as_ref().map(Scalar::to_repr)),
                vec![],
                vec![c],
            );
        }
        recovery.cases += 1;
    }

    let mut rng = sampling::rng(p.seed ^ 0xfeed);
    let mut counter = CheckReport::new("counterexamples_fail_vanishing_only");
    let fixed: Vec<PsdMatrix<Rational>> = (0..n - 1).map(|_| sampling::psd_full(&mut rng, n)).collect();
    let product = harness::product_functional(n, fixed.clone())?;
    let atoms: Vec<Vec<Vec<Rational>>> =
        (0..3).map(|_| (0..n).map(|_| sampling::nonzero_int_vector(&mut rng, n, 3)).collect()).collect();
    let weights: Vec<Rational> = (0..3).map(|_| sampling::small_positive(&mut rng)).collect();
    let measure = harness::measure_functional(atoms, weights)?;
    let candidates: [&dyn CandidateFunctional<Rational>; 2] = [&product, &measure];
    for f in candidates {
        let r = audit(f, n, trials, p.seed)?;
        let ok = r.nonnegative.passed
            && r.additive_per_slot.iter().all(|c| c.passed)
            && r.zero_argument.passed
            && !r.vanishing_on_proportional_rank_one.passed
            && r.reverify(f)?;
        if !ok {
            counter.fail(format!("{} audit did not fail exactly the vanishing hypothesis", f.name()), fixed.iter().map(|m| m.matrix().clone()).collect(), vec![]);
        }
        counter.cases += 1;
    }
    Ok(SuiteReport { suite: "harness".into(), checks: vec![recovery, counter] })
}
