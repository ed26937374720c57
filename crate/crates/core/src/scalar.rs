//! Scalar backends.
//!
//! Two backends are supported: [`Rational`] (arbitrary precision, every
//! comparison exact) and `f64` (binary64 with a relative/absolute tolerance
//! policy carried by [`Tolerance`]). All algorithms in the crate are written
//! once against the [`Scalar`] trait.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Tolerance policy for the FLOAT backend. Ignored by exact backends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Relative tolerance τ.
    pub rel: f64,
    /// Absolute floor τ_abs.
    pub abs: f64,
}

impl Tolerance {
    pub const DEFAULT_REL: f64 = 1e-9;
    pub const DEFAULT_ABS: f64 = 1e-12;

    pub fn new(rel: f64, abs: f64) -> Self {
        Tolerance { rel, abs }
    }

    pub fn with_rel(rel: f64) -> Self {
        Tolerance { rel, abs: Self::DEFAULT_ABS }
    }

    /// Threshold below which a quantity of magnitude `scale` counts as zero.
    pub fn threshold(&self, scale: f64) -> f64 {
        (self.rel * scale.abs()).max(self.abs)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: Self::DEFAULT_REL, abs: Self::DEFAULT_ABS }
    }
}

/// Ordered field element used for matrix entries, coefficients and results.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Whether arithmetic and comparisons are error-free.
    const EXACT: bool;
    /// Field tag used by the JSON schema.
    const FIELD: &'static str;

    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Converts a finite float. Exact backends take the float's exact value.
    fn from_f64(v: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// `true` if `self` is zero relative to a reference magnitude `scale`.
    fn is_negligible(&self, scale: &Self, tol: &Tolerance) -> bool;

    /// `true` if `self` is strictly below zero beyond tolerance.
    fn is_definitely_negative(&self, scale: &Self, tol: &Tolerance) -> bool {
        *self < Self::zero() && !self.is_negligible(scale, tol)
    }

    /// Equality under the backend's comparison policy.
    fn approx_eq(&self, other: &Self, tol: &Tolerance) -> bool {
        let diff = self.clone() - other.clone();
        let scale = if self.abs() > other.abs() { self.abs() } else { other.abs() };
        diff.is_negligible(&scale, tol)
    }

    /// Determinant of a square matrix given by rows.
    fn determinant(rows: Vec<Vec<Self>>) -> Self {
        gaussian_determinant(rows)
    }

    /// Canonical text form: `"p/q"` for rationals, shortest round-trip
    /// decimal for floats.
    fn to_repr(&self) -> String;

    /// Parses the text form; rationals also accept bare integers.
    fn parse_repr(s: &str) -> Option<Self>;
}

/// Partial-pivoting Gaussian elimination, valid for any field.
pub(crate) fn gaussian_determinant<T: Scalar>(mut a: Vec<Vec<T>>) -> T {
    let n = a.len();
    let mut det = T::one();
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].is_zero() {
            return T::zero();
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det = det * p.clone();
        for row in col + 1..n {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = a[row][col].clone() / p.clone();
            for k in col + 1..n {
                let delta = factor.clone() * a[col][k].clone();
                a[row][k] = a[row][k].clone() - delta;
            }
        }
    }
    det
}

/// Bareiss fraction-free elimination over the integers.
fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const FIELD: &'static str = "rational";

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn is_negligible(&self, _scale: &Self, _tol: &Tolerance) -> bool {
        self.is_zero()
    }

    fn approx_eq(&self, other: &Self, _tol: &Tolerance) -> bool {
        self == other
    }

    fn determinant(rows: Vec<Vec<Self>>) -> Self {
        // Clear denominators row by row, then eliminate over Z.
        let mut scale = BigInt::one();
        let ints: Vec<Vec<BigInt>> = rows
            .into_iter()
            .map(|row| {
                let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                scale *= &lcm;
                row.into_iter()
                    .map(|x| x.numer() * (&lcm / x.denom()))
                    .collect()
            })
            .collect();
        BigRational::new(bareiss_determinant(ints), scale)
    }

    fn to_repr(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse_repr(s: &str) -> Option<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().ok()?;
                let q: BigInt = q.trim().parse().ok()?;
                if q.is_zero() {
                    None
                } else {
                    Some(BigRational::new(p, q))
                }
            }
            None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const FIELD: &'static str = "float64";

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn is_negligible(&self, scale: &Self, tol: &Tolerance) -> bool {
        f64::abs(*self) <= tol.threshold(*scale)
    }

    fn to_repr(&self) -> String {
        format!("{self:?}")
    }

    fn parse_repr(s: &str) -> Option<Self> {
        s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn rational_repr_round_trip() {
        let x = q(-6, 4);
        assert_eq!(x.to_repr(), "-3/2");
        assert_eq!(Rational::parse_repr("-3/2"), Some(x));
        assert_eq!(Rational::parse_repr("7"), Some(q(7, 1)));
        assert_eq!(Rational::parse_repr("1/0"), None);
        assert_eq!(Rational::parse_repr("abc"), None);
    }

    #[test]
    fn bareiss_matches_gaussian() {
        let rows = vec![
            vec![q(1, 2), q(2, 3), q(0, 1)],
            vec![q(3, 1), q(-1, 5), q(4, 7)],
            vec![q(2, 9), q(1, 1), q(-3, 2)],
        ];
        let exact = Rational::determinant(rows.clone());
        assert_eq!(exact, gaussian_determinant(rows));
    }

    #[test]
    fn bareiss_handles_zero_leading_pivot() {
        let rows = vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]];
        assert_eq!(Rational::determinant(rows), q(-1, 1));
    }

    #[test]
    fn empty_determinant_is_one() {
        assert_eq!(Rational::determinant(vec![]), q(1, 1));
        assert_eq!(f64::determinant(vec![]), 1.0);
    }

    #[test]
    fn float_tolerance_is_scale_aware() {
        let tol = Tolerance::default();
        assert!(1e-8_f64.is_negligible(&1e2, &tol));
        assert!(!1e-8_f64.is_negligible(&1.0, &tol));
        assert!(1e-13_f64.is_negligible(&0.0, &tol));
    }
}
