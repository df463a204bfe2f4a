//! Laurent polynomials with complex coefficients.
//!
//! A [`LaurentPolynomial`] is a finitely supported map from integer exponents to
//! nonzero complex coefficients. Arithmetic drops coefficients below
//! `1e-14` times the largest magnitude present.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const PRUNE_REL: f64 = 1e-14;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LaurentPolynomial {
    coeffs: BTreeMap<i32, C64>,
}

impl LaurentPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(k: i32, c: C64) -> Self {
        Self::from_coeffs([(k, c)])
    }

    /// Builds a polynomial, summing repeated exponents and pruning.
    pub fn from_coeffs<I: IntoIterator<Item = (i32, C64)>>(it: I) -> Self {
        let mut coeffs = BTreeMap::new();
        for (k, c) in it {
            *coeffs.entry(k).or_insert(C64::new(0.0, 0.0)) += c;
        }
        let mut p = Self { coeffs };
        p.prune();
        p
    }

    /// Real coefficients listed from exponent `lo` upward.
    pub fn from_real_slice(lo: i32, cs: &[f64]) -> Self {
        Self::from_coeffs(
            cs.iter()
                .enumerate()
                .map(|(i, &c)| (lo + i as i32, C64::new(c, 0.0))),
        )
    }

    fn prune(&mut self) {
        let max = self.max_abs();
        if max == 0.0 {
            self.coeffs.clear();
            return;
        }
        let cut = PRUNE_REL * max;
        self.coeffs.retain(|_, c| c.norm() >= cut && c.norm() > 0.0);
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: i32) -> C64 {
        self.coeffs.get(&k).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, C64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest stored exponent; 0 for the zero polynomial.
    pub fn deg_plus(&self) -> i32 {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    /// Smallest stored exponent; 0 for the zero polynomial.
    pub fn deg_minus(&self) -> i32 {
        self.coeffs.keys().next().copied().unwrap_or(0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_coeffs(self.iter().map(|(k, c)| (k, c * s)))
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self {
            coeffs: self.iter().map(|(e, c)| (e + k, c)).collect(),
        }
    }

    /// `p(z) -> conj(p)(1/z)`: coefficient at `k` moves conjugated to `-k`.
    pub fn conj_reflect(&self) -> Self {
        Self {
            coeffs: self.iter().map(|(k, c)| (-k, c.conj())).collect(),
        }
    }

    /// Conjugates coefficients in place of exponents.
    pub fn conj_coeffs(&self) -> Self {
        Self {
            coeffs: self.iter().map(|(k, c)| (k, c.conj())).collect(),
        }
    }

    pub fn evaluate(&self, z: C64) -> Result<C64> {
        if self.is_zero() {
            return Ok(C64::new(0.0, 0.0));
        }
        if z == C64::new(0.0, 0.0) {
            if self.deg_minus() < 0 {
                return Err(Error::ZeroArgument);
            }
            return Ok(self.coeff(0));
        }
        Ok(self.eval_unchecked(z))
    }

    /// Evaluation for `z != 0`; Horner on each half.
    pub fn eval_unchecked(&self, z: C64) -> C64 {
        let zero = C64::new(0.0, 0.0);
        let hi = self.deg_plus().max(0);
        let lo = self.deg_minus().min(0);
        let mut pos = zero;
        for k in (0..=hi).rev() {
            pos = pos * z + self.coeff(k);
        }
        if lo == 0 {
            return pos;
        }
        let w = z.inv();
        let mut neg = zero;
        for k in lo..0 {
            neg = neg * w + self.coeff(k);
        }
        pos + neg * w
    }

    /// `q(x)` with `p(z0) - p(x) = (z0 - x) q(x)`.
    pub fn divided_difference(&self, z0: C64) -> Self {
        let mut terms = Vec::new();
        for (k, c) in self.iter() {
            if k > 0 {
                for j in 0..k {
                    terms.push((j, c * z0.powi(k - 1 - j)));
                }
            } else if k < 0 {
                let m = -k;
                for j in 0..m {
                    terms.push((j - m, -c * z0.powi(-1 - j)));
                }
            }
        }
        Self::from_coeffs(terms)
    }

    /// Quotient and remainder of `self / divisor` as polynomials in `z`
    /// after clearing negative powers. The remainder is returned as the
    /// max coefficient magnitude relative to `self`.
    pub fn div_exact(&self, divisor: &Self) -> (Self, f64) {
        if divisor.is_zero() {
            return (Self::zero(), f64::INFINITY);
        }
        if self.is_zero() {
            return (Self::zero(), 0.0);
        }
        let a = self.deg_minus();
        let b = divisor.deg_minus();
        let num: Vec<C64> = (a..=self.deg_plus()).map(|k| self.coeff(k)).collect();
        let den: Vec<C64> = (b..=divisor.deg_plus()).map(|k| divisor.coeff(k)).collect();
        let mut rem = num.clone();
        let dl = den.len();
        if rem.len() < dl {
            return (Self::zero(), 1.0);
        }
        let ql = rem.len() - dl + 1;
        let mut quo = vec![C64::new(0.0, 0.0); ql];
        let lead = den[dl - 1];
        for i in (0..ql).rev() {
            let c = rem[i + dl - 1] / lead;
            quo[i] = c;
            for (j, d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
        let r = rem[..dl - 1].iter().map(|c| c.norm()).fold(0.0, f64::max);
        let q = Self::from_coeffs(quo.into_iter().enumerate().map(|(i, c)| (a - b + i as i32, c)));
        (q, r / self.max_abs())
    }

    /// Max coefficient distance.
    pub fn distance(&self, other: &Self) -> f64 {
        let keys: std::collections::BTreeSet<i32> =
            self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        keys.into_iter()
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: Self) -> LaurentPolynomial {
        LaurentPolynomial::from_coeffs(self.iter().chain(rhs.iter()))
    }
}

impl Sub for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: Self) -> LaurentPolynomial {
        LaurentPolynomial::from_coeffs(self.iter().chain(rhs.iter().map(|(k, c)| (k, -c))))
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: Self) -> LaurentPolynomial {
        let mut acc: BTreeMap<i32, C64> = BTreeMap::new();
        for (i, a) in self.iter() {
            for (j, b) in rhs.iter() {
                *acc.entry(i + j).or_default() += a * b;
            }
        }
        LaurentPolynomial::from_coeffs(acc)
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for LaurentPolynomial {
            type Output = LaurentPolynomial;
            fn $f(self, rhs: Self) -> LaurentPolynomial { (&self).$f(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)", c.re, c.im)?;
            if k != 0 {
                write!(f, "z^{k}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CoeffList {
    coeffs: Vec<(i32, f64, f64)>,
}

impl Serialize for LaurentPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CoeffList {
            coeffs: self.iter().map(|(k, c)| (k, c.re, c.im)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let l = CoeffList::deserialize(d)?;
        Ok(Self::from_coeffs(
            l.coeffs.into_iter().map(|(k, re, im)| (k, C64::new(re, im))),
        ))
    }
}

/// Row-major grid of Laurent polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<LaurentPolynomial>,
}

impl LaurentPolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![LaurentPolynomial::zero(); rows * cols],
        }
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<LaurentPolynomial>) -> Result<Self> {
        if entries.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} grid",
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn diagonal(diag: Vec<LaurentPolynomial>) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, p) in diag.into_iter().enumerate() {
            m.entries[i * n + i] = p;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &LaurentPolynomial {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: LaurentPolynomial) {
        self.entries[r * self.cols + c] = p;
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch("inner dimensions differ".into()));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = LaurentPolynomial::zero();
                for k in 0..self.cols {
                    acc = &acc + &(self.get(i, k) * rhs.get(k, j));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn evaluate(&self, z: C64) -> Result<nalgebra::DMatrix<C64>> {
        let mut m = nalgebra::DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self.get(i, j).evaluate(z)?;
            }
        }
        Ok(m)
    }

    /// Matrix coefficient of `z^k`.
    pub fn coeff(&self, k: i32) -> nalgebra::DMatrix<C64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).coeff(k))
    }

    pub fn deg_plus(&self) -> i32 {
        self.entries.iter().filter(|p| !p.is_zero()).map(|p| p.deg_plus()).max().unwrap_or(0)
    }

    pub fn deg_minus(&self) -> i32 {
        self.entries.iter().filter(|p| !p.is_zero()).map(|p| p.deg_minus()).min().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn conj_reflect_monomial() {
        let z = LaurentPolynomial::monomial(1, C64::new(0.0, 2.0));
        let r = z.conj_reflect();
        assert_eq!(r.coeff(-1), C64::new(0.0, -2.0));
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn shift_by_multiplication() {
        let p = LaurentPolynomial::from_coeffs([(-1, c(1.0)), (0, c(-0.5))]);
        let q = &p * &LaurentPolynomial::monomial(1, c(1.0));
        assert_eq!(q, LaurentPolynomial::from_coeffs([(0, c(1.0)), (1, c(-0.5))]));
    }

    #[test]
    fn evaluation_examples() {
        let p = LaurentPolynomial::from_coeffs([(-1, c(1.0)), (1, c(1.0))]);
        assert!((p.evaluate(c(1.0)).unwrap() - c(2.0)).norm() < 1e-15);
        let q = LaurentPolynomial::from_coeffs([(-1, c(1.0)), (0, c(-0.5))]);
        assert!(q.evaluate(c(2.0)).unwrap().norm() < 1e-15);
        assert_eq!(q.evaluate(c(0.0)), Err(Error::ZeroArgument));
        assert_eq!(LaurentPolynomial::one().evaluate(C64::new(3.0, -1.0)).unwrap(), c(1.0));
    }

    #[test]
    fn negative_horner_matches_powers() {
        let p = LaurentPolynomial::from_coeffs([(-3, c(2.0)), (-2, c(-1.0)), (-1, c(0.5)), (2, c(1.5))]);
        let z = C64::new(0.3, 0.7);
        let direct: C64 = p.iter().map(|(k, a)| a * z.powi(k)).sum();
        assert!((p.evaluate(z).unwrap() - direct).norm() < 1e-13);
    }

    #[test]
    fn divided_difference_examples() {
        let z = LaurentPolynomial::monomial(1, c(1.0));
        assert_eq!(z.divided_difference(c(5.0)), LaurentPolynomial::one());
        let x2 = LaurentPolynomial::monomial(2, c(1.0));
        assert_eq!(
            x2.divided_difference(c(2.0)),
            LaurentPolynomial::from_coeffs([(0, c(2.0)), (1, c(1.0))])
        );
    }

    #[test]
    fn divided_difference_of_balanced_degrees() {
        // (z-2)(z-1/2)(z-3)(z+1/3) z^-2
        let roots = [2.0, 0.5, 3.0, -1.0 / 3.0];
        let mut w = LaurentPolynomial::monomial(-2, c(1.0));
        for r in roots {
            w = &w * &LaurentPolynomial::from_coeffs([(0, c(-r)), (1, c(1.0))]);
        }
        let d = w.divided_difference(C64::new(0.4, 1.1));
        assert_eq!(d.deg_plus(), 1);
        assert_eq!(d.deg_minus(), -2);
    }

    #[test]
    fn exact_division() {
        let w = LaurentPolynomial::from_coeffs([(-1, c(1.0)), (0, c(-2.5)), (1, c(1.0))]);
        let q = LaurentPolynomial::from_coeffs([(-2, C64::new(0.3, 1.0)), (3, c(2.0))]);
        let (quo, rem) = (&w * &q).div_exact(&w);
        assert!(rem < 1e-14);
        assert!(quo.distance(&q) < 1e-13);
    }

    #[test]
    fn zero_has_zero_degrees() {
        let z = LaurentPolynomial::zero();
        assert_eq!((z.deg_plus(), z.deg_minus()), (0, 0));
        let p = LaurentPolynomial::from_coeffs([(3, c(1.0)), (3, c(-1.0))]);
        assert!(p.is_zero());
    }

    #[test]
    fn json_round_trip() {
        let p = LaurentPolynomial::from_coeffs([(2, C64::new(1.0, -1.0)), (-1, c(0.25))]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"coeffs":[[-1,0.25,0.0],[2,1.0,-1.0]]}"#);
        let back: LaurentPolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
