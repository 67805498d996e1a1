//! Exact multivariate polynomials over the rationals.
//!
//! A [`Polynomial`] is a sparse map from exponent vectors to nonzero
//! [`Scalar`] coefficients. The map never stores zero coefficients, so
//! structural equality is mathematical equality. Printing uses grevlex with
//! `X0 > X1 > ...`, highest term first.

mod monomial;
mod parse;
pub mod serde_scalar;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

pub use monomial::{Monomial, MonomialOrder};
pub use parse::{parse_poly, ParseError};

/// Coefficient field element: an exact rational in lowest terms.
pub type Scalar = BigRational;

pub fn scalar(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("variable index {index} out of range for {num_vars} variables")]
    VarOutOfRange { index: usize, num_vars: usize },
    #[error("arity mismatch: expected {expected}, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("polynomial is not homogeneous")]
    Inhomogeneous,
    #[error("entries are not homogeneous of a common degree")]
    MixedDegrees,
    #[error("division by the zero polynomial")]
    DivisionByZero,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    num_vars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero(num_vars: usize) -> Self {
        Polynomial {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(num_vars: usize) -> Self {
        Self::constant(Scalar::one(), num_vars)
    }

    pub fn constant(c: Scalar, num_vars: usize) -> Self {
        Self::monomial(Monomial::one(num_vars), c)
    }

    pub fn var(num_vars: usize, index: usize) -> Self {
        Self::monomial(Monomial::var(num_vars, index), Scalar::one())
    }

    pub fn monomial(m: Monomial, c: Scalar) -> Self {
        let num_vars = m.num_vars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { num_vars, terms }
    }

    /// Builds a polynomial from (monomial, coefficient) pairs, merging
    /// repeated monomials and dropping zeros.
    pub fn from_terms(num_vars: usize, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = Self::zero(num_vars);
        for (m, c) in terms {
            assert_eq!(m.num_vars(), num_vars, "monomial arity mismatch");
            p.add_term(m, c);
        }
        p
    }

    /// Linear form `sum coeffs[i] * X_i`.
    pub fn linear_form(coeffs: &[Scalar]) -> Self {
        let n = coeffs.len();
        Self::from_terms(
            n,
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (Monomial::var(n, i), c.clone())),
        )
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Terms in descending grevlex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> + '_ {
        self.terms.iter().rev()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value of a constant polynomial (zero for the zero polynomial).
    pub fn constant_value(&self) -> Option<Scalar> {
        if !self.is_constant() {
            return None;
        }
        Some(self.coefficient(&Monomial::one(self.num_vars)))
    }

    /// Maximum exponent sum over the terms; `None` stands for the degree
    /// of the zero polynomial (minus infinity).
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    /// `Some(d)` when every term has degree `d`; `None` otherwise and for zero.
    pub fn is_homogeneous(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn homogeneous_part(&self, degree: u32) -> Polynomial {
        Polynomial {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Leading (monomial, coefficient) under `order`.
    pub fn leading_term(&self, order: MonomialOrder) -> Option<(&Monomial, &Scalar)> {
        match order {
            MonomialOrder::Grevlex => self.terms.iter().next_back(),
            _ => self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0)),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Self::zero(self.num_vars);
        }
        Polynomial {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// Divides by the leading coefficient (grevlex).
    pub fn monic(&self) -> Polynomial {
        match self.leading_term(MonomialOrder::Grevlex) {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    fn mul_term(&self, m: &Monomial, c: &Scalar) -> Polynomial {
        Polynomial {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(a, b)| (a.mul(m), b * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Self::one(self.num_vars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn evaluate(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.num_vars, "point arity mismatch");
        let mut total = Scalar::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    v *= num_traits::pow(x.clone(), e as usize);
                }
            }
            total += v;
        }
        total
    }

    fn check_var(&self, index: usize) -> Result<(), PolyError> {
        if index >= self.num_vars {
            return Err(PolyError::VarOutOfRange {
                index,
                num_vars: self.num_vars,
            });
        }
        Ok(())
    }

    /// Formal partial derivative with respect to variable `index`.
    pub fn partial_derivative(&self, index: usize) -> Result<Polynomial, PolyError> {
        self.check_var(index)?;
        let mut out = Self::zero(self.num_vars);
        for (m, c) in &self.terms {
            let e = m.exponents()[index];
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents().to_vec();
            exps[index] -= 1;
            out.add_term(Monomial::from_exponents(exps), c * scalar(e as i64));
        }
        Ok(out)
    }

    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.num_vars)
            .map(|i| self.partial_derivative(i).expect("index in range"))
            .collect()
    }

    /// Substitutes `maps[i]` for variable `i`.
    pub fn compose(&self, maps: &[Polynomial]) -> Result<Polynomial, PolyError> {
        if maps.len() != self.num_vars {
            return Err(PolyError::Arity {
                expected: self.num_vars,
                found: maps.len(),
            });
        }
        let target_vars = maps.first().map_or(0, Polynomial::num_vars);
        if let Some(bad) = maps.iter().find(|m| m.num_vars != target_vars) {
            return Err(PolyError::Arity {
                expected: target_vars,
                found: bad.num_vars,
            });
        }
        // powers[i][e] = maps[i]^e, filled lazily
        let mut powers: Vec<Vec<Polynomial>> =
            maps.iter().map(|_| vec![Self::one(target_vars)]).collect();
        let mut out = Self::zero(target_vars);
        for (m, c) in &self.terms {
            let mut term = Self::constant(c.clone(), target_vars);
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().expect("nonempty") * &maps[i];
                    powers[i].push(next);
                }
                term = &term * &powers[i][e as usize];
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Sets variable `chart` to one and drops it, keeping the other
    /// variables in their original relative order.
    pub fn dehomogenize(&self, chart: usize) -> Result<Polynomial, PolyError> {
        self.check_var(chart)?;
        if !self.is_zero() && self.is_homogeneous().is_none() {
            return Err(PolyError::Inhomogeneous);
        }
        Ok(Self::from_terms(
            self.num_vars - 1,
            self.terms
                .iter()
                .map(|(m, c)| (m.remove_var(chart), c.clone())),
        ))
    }

    /// Inverse of [`Polynomial::dehomogenize`]: reinserts variable `chart`
    /// with the exponent making every term degree `total_degree`.
    pub fn homogenize(&self, chart: usize) -> Polynomial {
        let Some(d) = self.total_degree() else {
            return Self::zero(self.num_vars + 1);
        };
        Self::from_terms(
            self.num_vars + 1,
            self.terms
                .iter()
                .map(|(m, c)| (m.insert_var(chart, d - m.degree()), c.clone())),
        )
    }

    /// Embeds into a ring with `extra` new variables placed before the
    /// existing ones.
    pub fn prepend_vars(&self, extra: usize) -> Polynomial {
        let mut out = Self::zero(self.num_vars + extra);
        for (m, c) in &self.terms {
            let mut exps = vec![0; extra];
            exps.extend_from_slice(m.exponents());
            out.terms.insert(Monomial::from_exponents(exps), c.clone());
        }
        out
    }

    /// Drops the first `count` variables, which must not occur.
    pub(crate) fn drop_leading_vars(&self, count: usize) -> Polynomial {
        let mut out = Self::zero(self.num_vars - count);
        for (m, c) in &self.terms {
            debug_assert!(m.exponents()[..count].iter().all(|&e| e == 0));
            out.terms.insert(
                Monomial::from_exponents(m.exponents()[count..].to_vec()),
                c.clone(),
            );
        }
        out
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder. Division with remainder by a single divisor under grevlex.
    pub fn exact_divide(&self, divisor: &Polynomial) -> Result<Option<Polynomial>, PolyError> {
        let Some((lm, lc)) = divisor.leading_term(MonomialOrder::Grevlex) else {
            return Err(PolyError::DivisionByZero);
        };
        let (lm, lc_inv) = (lm.clone(), lc.recip());
        let mut rest = self.clone();
        let mut quotient = Self::zero(self.num_vars);
        while let Some((m, c)) = rest.terms.iter().next_back() {
            // a leading term the divisor cannot cancel lands in the remainder
            let Some(q) = lm.quotient_of(m) else {
                return Ok(None);
            };
            let qc = c * &lc_inv;
            rest = &rest - &divisor.mul_term(&q, &qc);
            quotient.add_term(q, qc);
        }
        Ok(Some(quotient))
    }

    /// Canonical text with a custom variable prefix (`X` by default).
    pub fn to_string_with_prefix(&self, prefix: &str) -> String {
        let mut out = String::new();
        if self.terms.is_empty() {
            return "0".to_string();
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(abs.to_string());
            }
            for (i, &e) in m.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("{prefix}{i}")),
                    _ => factors.push(format!("{prefix}{i}^{e}")),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

/// Determinant of the Jacobian matrix `(d maps[i] / d X_j)`.
///
/// The maps must be `n+1` forms in `n+1` variables of a common degree `m`;
/// the result is zero or homogeneous of degree `(n+1)(m-1)`. Computed by
/// fraction-free (Bareiss) elimination with exact polynomial division.
pub fn jacobian_det(maps: &[Polynomial]) -> Result<Polynomial, PolyError> {
    let size = maps.len();
    if size == 0 {
        return Err(PolyError::Arity {
            expected: 1,
            found: 0,
        });
    }
    let nv = maps[0].num_vars();
    if let Some(bad) = maps.iter().find(|p| p.num_vars() != size) {
        return Err(PolyError::Arity {
            expected: size,
            found: bad.num_vars(),
        });
    }
    let degrees: Vec<Option<u32>> = maps.iter().map(Polynomial::is_homogeneous).collect();
    if degrees.iter().any(Option::is_none) {
        return Err(PolyError::Inhomogeneous);
    }
    if degrees.windows(2).any(|w| w[0] != w[1]) {
        return Err(PolyError::MixedDegrees);
    }
    let mut a: Vec<Vec<Polynomial>> = maps.iter().map(Polynomial::gradient).collect();
    bareiss_det(&mut a, nv)
}

/// Fraction-free determinant over the polynomial ring (an integral domain).
pub(crate) fn bareiss_det(a: &mut [Vec<Polynomial>], nv: usize) -> Result<Polynomial, PolyError> {
    let size = a.len();
    let mut sign = false;
    let mut prev = Polynomial::one(nv);
    for k in 0..size {
        if a[k][k].is_zero() {
            match (k + 1..size).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = !sign;
                }
                None => return Ok(Polynomial::zero(nv)),
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num
                    .exact_divide(&prev)?
                    .expect("Bareiss step divides exactly");
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[size - 1][size - 1].clone();
    Ok(if sign { -det } else { det })
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with_prefix("X"))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({})", self.num_vars, self)
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count mismatch");
        let mut out = Polynomial::zero(self.num_vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}
