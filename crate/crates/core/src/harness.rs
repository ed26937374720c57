//! Auditing candidate functionals `F: (ℳⁿ)ⁿ → ℝ` against the hypotheses
//! that force `F = a·D`: nonnegativity, additivity in each argument, and
//! vanishing whenever two arguments are proportional rank-one matrices.
//!
//! The audit samples random rational PSD tuples. Every failed check keeps a
//! [`Witness`] that can be re-evaluated with [`Witness::reverify`]. When all
//! hypotheses hold on the samples, the constant `a` is estimated on a
//! reference tuple and `F = a·D` is checked on every sample.
//!
//! [`lemma_traces`] replays the segment identities used to establish the
//! symmetry of such functionals, evaluated on `D` itself.

use rand::Rng;

use crate::discriminant::{md, Algorithm, MatrixTuple};
use crate::error::{Error, Result};
use crate::matrix::{validate_psd, PsdMatrix, SymMatrix};
use crate::sampling::{self, SampleRng};
use crate::scalar::{Rational, Scalar};

/// A functional of `n` PSD arguments. Evaluation must be deterministic.
pub trait CandidateFunctional<T: Scalar>: Send + Sync {
    fn name(&self) -> &str;
    fn evaluate(&self, t: &MatrixTuple<T>) -> Result<T>;
}

/// `c·D`.
#[derive(Debug, Clone)]
pub struct ScaledMd<T> {
    pub factor: T,
}

impl<T: Scalar> ScaledMd<T> {
    pub fn new(factor: T) -> Self {
        ScaledMd { factor }
    }
}

impl<T: Scalar> CandidateFunctional<T> for ScaledMd<T> {
    fn name(&self) -> &str {
        "scaled_md"
    }

    fn evaluate(&self, t: &MatrixTuple<T>) -> Result<T> {
        Ok(self.factor.clone() * md(t, Algorithm::Auto)?)
    }
}

/// `F(A₁,…,Aₙ) = ∏ᵢ D(Aᵢ, B₂,…,Bₙ)` for fixed `B₂,…,Bₙ`.
#[derive(Debug, Clone)]
pub struct ProductFunctional<T> {
    fixed: Vec<PsdMatrix<T>>,
}

pub fn product_functional<T: Scalar>(n: usize, fixed: Vec<PsdMatrix<T>>) -> Result<ProductFunctional<T>> {
    if fixed.len() + 1 != n {
        return Err(Error::TupleLength { n: n.saturating_sub(1), len: fixed.len() });
    }
    if let Some(b) = fixed.iter().find(|b| b.dim() != n) {
        return Err(Error::AmbientMismatch { expected: n, found: b.dim() });
    }
    Ok(ProductFunctional { fixed })
}

impl<T: Scalar> ProductFunctional<T> {
    pub fn fixed(&self) -> &[PsdMatrix<T>] {
        &self.fixed
    }
}

impl<T: Scalar> CandidateFunctional<T> for ProductFunctional<T> {
    fn name(&self) -> &str {
        "product"
    }

    fn evaluate(&self, t: &MatrixTuple<T>) -> Result<T> {
        let mut acc = T::one();
        for a in t.entries() {
            let mut args = Vec::with_capacity(t.dim());
            args.push(a.clone());
            args.extend(self.fixed.iter().cloned());
            acc = acc * md(&MatrixTuple::new(args)?, Algorithm::Auto)?;
        }
        Ok(acc)
    }
}

/// `F(A₁,…,Aₙ) = Σ_atoms w·∏ᵢ ⟨uᵢ, Aᵢuᵢ⟩` for a finite atomic measure on
/// tuples of unit vectors. Atom vectors need not be normalized: the form is
/// divided by `|uᵢ|²`, which keeps rational inputs exact.
#[derive(Debug, Clone)]
pub struct MeasureFunctional<T> {
    atoms: Vec<Vec<Vec<T>>>,
    weights: Vec<T>,
}

pub fn measure_functional<T: Scalar>(atoms: Vec<Vec<Vec<T>>>, weights: Vec<T>) -> Result<MeasureFunctional<T>> {
    if atoms.len() != weights.len() {
        return Err(Error::AmbientMismatch { expected: atoms.len(), found: weights.len() });
    }
    let n = atoms.first().map_or(0, Vec::len);
    for (a, atom) in atoms.iter().enumerate() {
        if atom.len() != n {
            return Err(Error::TupleLength { n, len: atom.len() });
        }
        for (slot, u) in atom.iter().enumerate() {
            if u.len() != n {
                return Err(Error::AmbientMismatch { expected: n, found: u.len() });
            }
            if u.iter().all(|x| x.is_zero()) {
                return Err(Error::ZeroAtomVector { atom: a, slot });
            }
        }
    }
    if let Some(w) = weights.iter().find(|w| **w <= T::zero()) {
        return Err(Error::NonPositiveWeight(w.to_repr()));
    }
    Ok(MeasureFunctional { atoms, weights })
}

impl<T: Scalar> MeasureFunctional<T> {
    pub fn atoms(&self) -> &[Vec<Vec<T>>] {
        &self.atoms
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }
}

impl<T: Scalar> CandidateFunctional<T> for MeasureFunctional<T> {
    fn name(&self) -> &str {
        "measure"
    }

    fn evaluate(&self, t: &MatrixTuple<T>) -> Result<T> {
        let mut total = T::zero();
        for (atom, w) in self.atoms.iter().zip(&self.weights) {
            if atom.len() != t.dim() {
                return Err(Error::AmbientMismatch { expected: atom.len(), found: t.dim() });
            }
            let mut term = w.clone();
            for (u, a) in atom.iter().zip(t.entries()) {
                let norm_sq = crate::matrix::dot(u, u);
                term = term * a.matrix().quadratic_form(u) / norm_sq;
            }
            total = total + term;
        }
        Ok(total)
    }
}

/// A sampled input on which a hypothesis fails.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness<T> {
    /// `F(tuple) < 0`.
    Negative { tuple: MatrixTuple<T>, value: T },
    /// `F(A+B, rest) ≠ F(A, rest) + F(B, rest)` in `slot`.
    NonAdditive { slot: usize, a: PsdMatrix<T>, b: PsdMatrix<T>, rest: MatrixTuple<T>, sum: T, parts: T },
    /// `F(0, rest) ≠ 0` in `slot`.
    NonzeroAtZero { slot: usize, tuple: MatrixTuple<T>, value: T },
    /// `F(A+Δ, rest) < F(A, rest)` in `slot`.
    NonMonotone { slot: usize, a: PsdMatrix<T>, delta: PsdMatrix<T>, rest: MatrixTuple<T>, lower: T, upper: T },
    /// `F ≠ 0` though `slots` hold proportional rank-one matrices.
    NonVanishing { slots: (usize, usize), tuple: MatrixTuple<T>, value: T },
    /// `F(tuple) ≠ a·D(tuple)`.
    NotProportional { tuple: MatrixTuple<T>, value: T, expected: T },
}

impl<T: Scalar> Witness<T> {
    /// Re-evaluates `f` and reports whether the violation reproduces.
    pub fn reverify(&self, f: &dyn CandidateFunctional<T>) -> Result<bool> {
        let tol = crate::scalar::Tolerance::default();
        Ok(match self {
            Witness::Negative { tuple, .. } => is_negative(&f.evaluate(tuple)?, &tol),
            Witness::NonAdditive { slot, a, b, rest, .. } => {
                let sum = f.evaluate(&rest.with_slot(*slot, a.add(b))?)?;
                let parts = f.evaluate(&rest.with_slot(*slot, a.clone())?)? + f.evaluate(&rest.with_slot(*slot, b.clone())?)?;
                !sum.approx_eq(&parts, &tol)
            }
            Witness::NonzeroAtZero { tuple, .. } => !f.evaluate(tuple)?.approx_eq(&T::zero(), &tol),
            Witness::NonMonotone { slot, a, delta, rest, .. } => {
                let upper = f.evaluate(&rest.with_slot(*slot, a.add(delta))?)?;
                let lower = f.evaluate(&rest.with_slot(*slot, a.clone())?)?;
                is_negative(&(upper - lower), &tol)
            }
            Witness::NonVanishing { slots, tuple, .. } => {
                let (i, j) = *slots;
                proportional_rank_one(tuple.get(i), tuple.get(j)) && !f.evaluate(tuple)?.approx_eq(&T::zero(), &tol)
            }
            Witness::NotProportional { tuple, expected, .. } => !f.evaluate(tuple)?.approx_eq(expected, &tol),
        })
    }
}

fn is_negative<T: Scalar>(v: &T, tol: &crate::scalar::Tolerance) -> bool {
    if T::EXACT {
        *v < T::zero()
    } else {
        v.is_definitely_negative(&T::one(), tol)
    }
}

/// `true` if both matrices have rank one and the same range.
fn proportional_rank_one<T: Scalar>(a: &PsdMatrix<T>, b: &PsdMatrix<T>) -> bool {
    a.rank() == 1 && b.rank() == 1 && crate::subspace::sum_dim(&[&a.column_space(), &b.column_space()]) == Ok(1)
}

/// Pass/fail of one hypothesis with the first witness found.
#[derive(Debug, Clone, PartialEq)]
pub struct Check<T> {
    pub passed: bool,
    pub checked: usize,
    pub witness: Option<Witness<T>>,
}

impl<T> Check<T> {
    fn new() -> Self {
        Check { passed: true, checked: 0, witness: None }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Witness<T>) {
        self.checked += 1;
        if !ok && self.passed {
            self.passed = false;
            self.witness = Some(witness());
        }
    }
}

/// Proportionality `F = a·D` over every sampled tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct Proportionality<T> {
    pub passed: bool,
    pub worst_deviation: T,
    pub witness: Option<Witness<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalAudit<T> {
    pub name: String,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub nonnegative: Check<T>,
    pub additive_per_slot: Vec<Check<T>>,
    /// `F(0ₙ, rest) = 0`, forced by additivity.
    pub zero_argument: Check<T>,
    pub vanishing_on_proportional_rank_one: Check<T>,
    /// Increasing in each slot under the PSD order; reported independently.
    pub monotone: Check<T>,
    /// No sample has `D = 0 < F`, so `F ≤ c·D` is not refuted.
    pub bounded_by_md: bool,
    /// Largest `F/D` over samples with `D > 0`.
    pub max_ratio: Option<T>,
    pub estimated_a: Option<T>,
    pub proportionality: Option<Proportionality<T>>,
}

impl<T: Scalar> FunctionalAudit<T> {
    /// All hypotheses hold on the samples.
    pub fn hypotheses_hold(&self) -> bool {
        self.nonnegative.passed
            && self.additive_per_slot.iter().all(|c| c.passed)
            && self.zero_argument.passed
            && self.vanishing_on_proportional_rank_one.passed
    }

    pub fn witnesses(&self) -> impl Iterator<Item = &Witness<T>> {
        [&self.nonnegative, &self.zero_argument, &self.vanishing_on_proportional_rank_one, &self.monotone]
            .into_iter()
            .chain(&self.additive_per_slot)
            .filter_map(|c| c.witness.as_ref())
            .chain(self.proportionality.as_ref().and_then(|p| p.witness.as_ref()))
    }

    /// Re-evaluates every recorded witness; `true` if all reproduce.
    pub fn reverify(&self, f: &dyn CandidateFunctional<T>) -> Result<bool> {
        for w in self.witnesses() {
            if !w.reverify(f)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn identity_tuple(n: usize) -> MatrixTuple<Rational> {
    let i = validate_psd(SymMatrix::identity(n)).expect("identity is PSD");
    MatrixTuple::new(vec![i; n]).expect("consistent dimensions")
}

/// Audits `f` on `trials` random rational tuples, using `(I,…,I)` as the
/// reference tuple for the constant.
pub fn audit(f: &dyn CandidateFunctional<Rational>, n: usize, trials: usize, seed: u64) -> Result<FunctionalAudit<Rational>> {
    audit_with_reference(f, n, trials, seed, &identity_tuple(n))
}

pub fn audit_with_reference(
    f: &dyn CandidateFunctional<Rational>,
    n: usize,
    trials: usize,
    seed: u64,
    reference: &MatrixTuple<Rational>,
) -> Result<FunctionalAudit<Rational>> {
    if trials == 0 {
        return Err(Error::PreconditionViolated("trials must be at least 1".into()));
    }
    if reference.dim() != n {
        return Err(Error::AmbientMismatch { expected: n, found: reference.dim() });
    }
    let zero = Rational::from_i64(0);
    let mut rng = sampling::rng(seed);
    let mut nonnegative = Check::new();
    let mut additive_per_slot = vec![Check::new(); n];
    let mut zero_argument = Check::new();
    let mut vanishing = Check::new();
    let mut monotone = Check::new();
    // (tuple, F, D) for every evaluated sample tuple.
    let mut samples: Vec<(MatrixTuple<Rational>, Rational, Rational)> = Vec::new();

    for _ in 0..trials {
        let t = sampling::tuple(&mut rng, n);
        let value = f.evaluate(&t)?;
        nonnegative.record(value >= zero, || Witness::Negative { tuple: t.clone(), value: value.clone() });
        let d = md(&t, Algorithm::Auto)?;
        samples.push((t, value, d));

        for (slot, additive) in additive_per_slot.iter_mut().enumerate() {
            let rest = sampling::tuple(&mut rng, n);
            let a = sampling::psd(&mut rng, n);
            let b = sampling::psd(&mut rng, n);
            let fa = f.evaluate(&rest.with_slot(slot, a.clone())?)?;
            let fb = f.evaluate(&rest.with_slot(slot, b.clone())?)?;
            let fab = f.evaluate(&rest.with_slot(slot, a.add(&b))?)?;
            let parts = fa.clone() + fb;
            additive.record(fab == parts, || Witness::NonAdditive {
                slot,
                a: a.clone(),
                b: b.clone(),
                rest: rest.clone(),
                sum: fab.clone(),
                parts: parts.clone(),
            });
            monotone.record(fab >= fa, || Witness::NonMonotone {
                slot,
                a: a.clone(),
                delta: b.clone(),
                rest: rest.clone(),
                lower: fa.clone(),
                upper: fab.clone(),
            });
            let zt = rest.with_slot(slot, validate_psd(SymMatrix::zero(n))?)?;
            let fz = f.evaluate(&zt)?;
            zero_argument.record(fz == zero, || Witness::NonzeroAtZero { slot, tuple: zt.clone(), value: fz.clone() });
        }

        if n >= 2 {
            let i = rng.random_range(0..n);
            let j = (i + rng.random_range(1..n)) % n;
            let v = sampling::nonzero_int_vector(&mut rng, n, 3);
            let base = SymMatrix::outer(&v);
            let mut t = sampling::tuple(&mut rng, n);
            t = t.with_slot(i, validate_psd(base.scale(&sampling::small_positive(&mut rng)))?)?;
            t = t.with_slot(j, validate_psd(base.scale(&sampling::small_positive(&mut rng)))?)?;
            let value = f.evaluate(&t)?;
            let slots = (i.min(j), i.max(j));
            vanishing.record(value == zero, || Witness::NonVanishing { slots, tuple: t.clone(), value: value.clone() });
            let d = md(&t, Algorithm::Auto)?;
            samples.push((t, value, d));
        }
    }

    let bounded_by_md = samples.iter().all(|(_, v, d)| *d > zero || *v == zero);
    let max_ratio = samples
        .iter()
        .filter(|(_, _, d)| *d > zero)
        .map(|(_, v, d)| v / d)
        .reduce(|a, b| if b > a { b } else { a });

    let mut report = FunctionalAudit {
        name: f.name().to_string(),
        n,
        trials,
        seed,
        nonnegative,
        additive_per_slot,
        zero_argument,
        vanishing_on_proportional_rank_one: vanishing,
        monotone,
        bounded_by_md,
        max_ratio,
        estimated_a: None,
        proportionality: None,
    };

    if report.hypotheses_hold() {
        let d_ref = md(reference, Algorithm::Auto)?;
        if d_ref == zero {
            return Err(Error::ReferenceTupleDegenerate);
        }
        let a = f.evaluate(reference)? / d_ref;
        let mut worst = zero.clone();
        let mut witness = None;
        for (t, v, d) in &samples {
            let expected = &a * d;
            let dev = num_traits::Signed::abs(&(v - &expected));
            if dev > worst {
                worst = dev;
                if witness.is_none() {
                    witness = Some(Witness::NotProportional { tuple: t.clone(), value: v.clone(), expected });
                }
            }
        }
        report.proportionality = Some(Proportionality { passed: witness.is_none(), worst_deviation: worst, witness });
        report.estimated_a = Some(a);
    }
    Ok(report)
}

/// One equality replayed on segment tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaCase<T> {
    pub kind: LemmaKind,
    pub trial: usize,
    pub left: MatrixTuple<T>,
    pub right: MatrixTuple<T>,
    pub left_value: T,
    pub right_value: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaKind {
    /// `D(T₁, S, …) = D(T₂, S, …)` when `T₁ + ℝS = T₂ + ℝS`.
    SegmentShift,
    /// `D(S, T, …) = D(T, S, …)`.
    SegmentSwap,
    /// The three shift equalities through a diagonal of `S + T`.
    Diagonal,
}

impl LemmaKind {
    pub fn name(self) -> &'static str {
        match self {
            LemmaKind::SegmentShift => "segment_shift",
            LemmaKind::SegmentSwap => "segment_swap",
            LemmaKind::Diagonal => "diagonal",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport<T> {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub shift_checks: usize,
    pub swap_checks: usize,
    pub diagonal_checks: usize,
    pub failures: Vec<LemmaCase<T>>,
}

impl<T> LemmaReport<T> {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn seg(v: &[Rational]) -> PsdMatrix<Rational> {
    validate_psd(SymMatrix::outer(v)).expect("outer products are PSD")
}

fn axpy(alpha: &Rational, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
    x.iter().zip(y).map(|(a, b)| alpha * a + b).collect()
}

/// Random pair of distinct slots and filler matrices for the rest.
fn frame(rng: &mut SampleRng, n: usize) -> (usize, usize, Vec<PsdMatrix<Rational>>) {
    let i = rng.random_range(0..n);
    let j = (i + rng.random_range(1..n)) % n;
    let fill = (0..n).map(|_| sampling::psd(rng, n)).collect();
    (i, j, fill)
}

fn place(fill: &[PsdMatrix<Rational>], i: usize, a: PsdMatrix<Rational>, j: usize, b: PsdMatrix<Rational>) -> MatrixTuple<Rational> {
    let mut entries = fill.to_vec();
    entries[i] = a;
    entries[j] = b;
    MatrixTuple::new(entries).expect("consistent dimensions")
}

/// Replays the segment identities on `D` for random rational segments.
///
/// * shift: with `t₂ = t + αs`, `D(ttᵀ, ssᵀ, rest) = D(t₂t₂ᵀ, ssᵀ, rest)`;
/// * swap: `D(ssᵀ, ttᵀ, rest) = D(ttᵀ, ssᵀ, rest)`;
/// * diagonal: with `d = s + t`, `D(d,s,…) = D(t,s,…)`, `D(d,t,…) = D(s,t,…)`
///   and `D(d,s,…) = D(d,t,…)`.
///
/// The pair occupies two random slots; the remaining slots hold random PSD
/// matrices.
pub fn lemma_traces(n: usize, trials: usize, seed: u64) -> Result<LemmaReport<Rational>> {
    if n < 2 {
        return Err(Error::PreconditionViolated("segment traces need n ≥ 2".into()));
    }
    let mut rng = sampling::rng(seed);
    let mut report =
        LemmaReport { n, trials, seed, shift_checks: 0, swap_checks: 0, diagonal_checks: 0, failures: Vec::new() };
    let mut check = |kind: LemmaKind, trial: usize, left: MatrixTuple<Rational>, right: MatrixTuple<Rational>| -> Result<()> {
        let lv = md(&left, Algorithm::Auto)?;
        let rv = md(&right, Algorithm::Auto)?;
        match kind {
            LemmaKind::SegmentShift => report.shift_checks += 1,
            LemmaKind::SegmentSwap => report.swap_checks += 1,
            LemmaKind::Diagonal => report.diagonal_checks += 1,
        }
        if lv != rv {
            report.failures.push(LemmaCase { kind, trial, left, right, left_value: lv, right_value: rv });
        }
        Ok(())
    };

    for trial in 0..trials {
        let s = sampling::nonzero_int_vector(&mut rng, n, 4);
        let t = sampling::nonzero_int_vector(&mut rng, n, 4);
        let alpha = Rational::from_ratio(rng.random_range(-9..=9), rng.random_range(1..=5));
        let (i, j, fill) = frame(&mut rng, n);

        let t2 = axpy(&alpha, &s, &t);
        check(LemmaKind::SegmentShift, trial, place(&fill, i, seg(&t), j, seg(&s)), place(&fill, i, seg(&t2), j, seg(&s)))?;

        check(LemmaKind::SegmentSwap, trial, place(&fill, i, seg(&s), j, seg(&t)), place(&fill, i, seg(&t), j, seg(&s)))?;

        let d = axpy(&Rational::from_i64(1), &s, &t);
        check(LemmaKind::Diagonal, trial, place(&fill, i, seg(&d), j, seg(&s)), place(&fill, i, seg(&t), j, seg(&s)))?;
        check(LemmaKind::Diagonal, trial, place(&fill, i, seg(&d), j, seg(&t)), place(&fill, i, seg(&s), j, seg(&t)))?;
        check(LemmaKind::Diagonal, trial, place(&fill, i, seg(&d), j, seg(&s)), place(&fill, i, seg(&d), j, seg(&t)))?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn diag(d: &[i64]) -> PsdMatrix<Rational> {
        validate_psd(SymMatrix::diagonal(d.iter().map(|&v| q(v, 1)).collect())).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| q(x, 1)).collect()
    }

    #[test]
    fn product_functional_examples() {
        let f = product_functional(2, vec![diag(&[1, 1])]).unwrap();
        let t = MatrixTuple::new(vec![diag(&[1, 1]), diag(&[1, 1])]).unwrap();
        assert_eq!(f.evaluate(&t).unwrap(), q(1, 1));
        let e1 = diag(&[1, 0]);
        let t = MatrixTuple::new(vec![e1.clone(), e1]).unwrap();
        assert_eq!(f.evaluate(&t).unwrap(), q(1, 4));

        let a = diag(&[2, 5]);
        let b = validate_psd(SymMatrix::outer(&ints(&[1, 3]))).unwrap();
        let ab = MatrixTuple::new(vec![a.clone(), b.clone()]).unwrap();
        let ba = MatrixTuple::new(vec![b, a]).unwrap();
        assert_eq!(f.evaluate(&ab).unwrap(), f.evaluate(&ba).unwrap());
        assert!(product_functional(3, vec![diag(&[1, 1, 1])]).is_err());
    }

    #[test]
    fn measure_functional_examples() {
        let e1 = ints(&[1, 0, 0]);
        let f = measure_functional(vec![vec![e1.clone(), e1.clone(), e1]], vec![q(1, 1)]).unwrap();
        let i3 = diag(&[1, 1, 1]);
        let t = MatrixTuple::new(vec![i3.clone(), i3.clone(), i3]).unwrap();
        assert_eq!(f.evaluate(&t).unwrap(), q(1, 1));
        let t = MatrixTuple::new(vec![diag(&[2, 1, 1]), diag(&[3, 0, 0]), diag(&[5, 1, 0])]).unwrap();
        assert_eq!(f.evaluate(&t).unwrap(), q(30, 1));

        // Unnormalized atom vectors behave as their normalizations.
        let f = measure_functional(vec![vec![ints(&[2, 0]), ints(&[0, 3])]], vec![q(1, 2)]).unwrap();
        let t = MatrixTuple::new(vec![diag(&[4, 1]), diag(&[1, 6])]).unwrap();
        assert_eq!(f.evaluate(&t).unwrap(), q(12, 1));

        assert_eq!(
            measure_functional(vec![vec![ints(&[0, 0]), ints(&[1, 0])]], vec![q(1, 1)]).unwrap_err(),
            Error::ZeroAtomVector { atom: 0, slot: 0 }
        );
        assert!(measure_functional(vec![vec![ints(&[1, 0]), ints(&[1, 0])]], vec![q(0, 1)]).is_err());
    }

    #[test]
    fn audit_of_md_recovers_one() {
        let f = ScaledMd::new(q(1, 1));
        let r = audit(&f, 3, 10, 1).unwrap();
        assert!(r.hypotheses_hold());
        assert!(r.monotone.passed && r.bounded_by_md);
        assert_eq!(r.estimated_a, Some(q(1, 1)));
        let p = r.proportionality.unwrap();
        assert!(p.passed);
        assert_eq!(p.worst_deviation, q(0, 1));
    }

    #[test]
    fn audit_of_scaled_md_recovers_factor() {
        let r = audit(&ScaledMd::new(q(5, 1)), 2, 10, 2).unwrap();
        assert_eq!(r.estimated_a, Some(q(5, 1)));
    }

    #[test]
    fn product_counterexample_fails_vanishing() {
        let f = product_functional(2, vec![diag(&[1, 1])]).unwrap();
        let r = audit(&f, 2, 10, 3).unwrap();
        assert!(r.nonnegative.passed);
        assert!(r.additive_per_slot.iter().all(|c| c.passed));
        assert!(!r.vanishing_on_proportional_rank_one.passed);
        assert!(!r.bounded_by_md);
        assert_eq!(r.estimated_a, None);
        assert!(r.reverify(&f).unwrap());
    }

    #[test]
    fn non_additive_functional_is_caught() {
        struct Squared;
        impl CandidateFunctional<Rational> for Squared {
            fn name(&self) -> &str {
                "squared"
            }
            fn evaluate(&self, t: &MatrixTuple<Rational>) -> Result<Rational> {
                let d = md(t, Algorithm::Auto)?;
                Ok(&d * &d)
            }
        }
        let r = audit(&Squared, 2, 20, 4).unwrap();
        assert!(r.nonnegative.passed);
        assert!(!r.additive_per_slot[0].passed);
        assert!(r.reverify(&Squared).unwrap());
    }

    #[test]
    fn negative_functional_is_caught() {
        let f = ScaledMd::new(q(-1, 1));
        let r = audit(&f, 2, 20, 5).unwrap();
        assert!(!r.nonnegative.passed);
        assert!(!r.monotone.passed);
        assert!(r.reverify(&f).unwrap());
    }

    #[test]
    fn degenerate_reference_is_rejected() {
        let z = validate_psd(SymMatrix::zero(2)).unwrap();
        let reference = MatrixTuple::new(vec![z.clone(), z]).unwrap();
        let err = audit_with_reference(&ScaledMd::new(q(1, 1)), 2, 2, 0, &reference).unwrap_err();
        assert_eq!(err, Error::ReferenceTupleDegenerate);
    }

    #[test]
    fn lemma_trace_worked_example() {
        // s = e₂, t = e₁, α = 3.
        let s = ints(&[0, 1]);
        let t = ints(&[1, 0]);
        let t2 = axpy(&q(3, 1), &s, &t);
        let left = MatrixTuple::new(vec![seg(&t), seg(&s)]).unwrap();
        let right = MatrixTuple::new(vec![seg(&t2), seg(&s)]).unwrap();
        assert_eq!(md(&left, Algorithm::Perm).unwrap(), q(1, 2));
        assert_eq!(md(&right, Algorithm::Perm).unwrap(), q(1, 2));
    }

    #[test]
    fn lemma_traces_pass() {
        for n in 2..=4 {
            let r = lemma_traces(n, 5, n as u64).unwrap();
            assert!(r.passed(), "n = {n}: {:?}", r.failures.first());
            assert_eq!((r.shift_checks, r.swap_checks, r.diagonal_checks), (5, 5, 15));
        }
        assert!(lemma_traces(1, 1, 0).is_err());
    }
}
