//! Dense univariate polynomials over the rationals, used for eliminants.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::polyring::Scalar;

/// Coefficients low to high, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly(Vec<Scalar>);

impl UniPoly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn lead(&self) -> &Scalar {
        self.0.last().expect("nonzero polynomial")
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.0
            .iter()
            .rev()
            .fold(Scalar::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Scalar::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lead().recip();
        UniPoly(self.0.iter().map(|c| c * &inv).collect())
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.0.len() - 1;
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return (UniPoly::new(vec![]), self.clone());
        }
        let mut quot = vec![Scalar::zero(); rem.len() - dd];
        let inv = d.lead().recip();
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.0.iter().enumerate() {
                rem[k + j] -= &c * dc;
            }
            quot[k] = c;
        }
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Product of the distinct irreducible factors (monic).
    pub fn squarefree_part(&self) -> UniPoly {
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Sturm sequence `p, p', -rem(p, p'), ...`.
    fn sturm(&self) -> Vec<UniPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                return seq;
            }
            let r = seq[n - 2].div_rem(&seq[n - 1]).1.neg();
            if r.is_zero() {
                return seq;
            }
            seq.push(r);
        }
    }

    /// Distinct real roots of a squarefree polynomial in the half-open
    /// interval `(lo, hi]`.
    fn count_roots(seq: &[UniPoly], lo: &Scalar, hi: &Scalar) -> usize {
        let variations = |x: &Scalar| {
            let signs: Vec<Ordering> = seq
                .iter()
                .map(|p| p.eval(x).cmp(&Scalar::zero()))
                .filter(|s| *s != Ordering::Equal)
                .collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        variations(lo) - variations(hi)
    }

    /// All rational roots, ascending. Real roots are isolated with a Sturm
    /// sequence and each is shrunk until at most one rational of bounded
    /// denominator fits; that candidate is then checked exactly.
    pub fn rational_roots(&self) -> Vec<Scalar> {
        if self.degree().unwrap_or(0) == 0 {
            return vec![];
        }
        let p = self.squarefree_part();
        // clear denominators; any rational root p/q has q | lead
        let den_lcm = p
            .0
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = p
            .0
            .iter()
            .map(|c| (c * Scalar::from_integer(den_lcm.clone())).to_integer())
            .collect();
        let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let ints: Vec<BigInt> = ints.into_iter().map(|c| c / &content).collect();
        let lead = ints.last().expect("nonzero").abs();
        let bound = Scalar::one()
            + ints[..ints.len() - 1]
                .iter()
                .map(|c| Scalar::new(c.abs(), lead.clone()))
                .max()
                .unwrap_or_else(Scalar::zero);
        let seq = p.sturm();
        // two distinct rationals with denominators <= lead differ by >= 1/lead^2
        let width = Scalar::new(BigInt::one(), &lead * &lead * 2);
        let mut stack = vec![(-bound.clone(), bound)];
        let mut roots = Vec::new();
        while let Some((lo, hi)) = stack.pop() {
            let k = Self::count_roots(&seq, &lo, &hi);
            if k == 0 {
                continue;
            }
            if k == 1 {
                let sign_lo = int_sign(&ints, &lo);
                if sign_lo != Ordering::Equal {
                    roots.extend(refine(&ints, &lead, &width, lo, hi, sign_lo));
                    continue;
                }
            }
            let mid = (&lo + &hi) / Scalar::from_integer(2.into());
            stack.push((mid.clone(), hi));
            stack.push((lo, mid));
        }
        roots.sort();
        roots.dedup();
        roots
    }
}

/// Sign of `sum ints[i] x^i` for rational `x`, computed over the integers.
fn int_sign(ints: &[BigInt], x: &Scalar) -> Ordering {
    let (a, b) = (x.numer(), x.denom());
    let mut acc = BigInt::zero();
    let mut bpow = BigInt::one();
    for c in ints.iter().rev() {
        acc = acc * a + c * &bpow;
        bpow *= b;
    }
    acc.cmp(&BigInt::zero())
}

/// Bisection on the sign of `ints` over `(lo, hi]`, which holds exactly one
/// simple root and has `ints(lo) != 0` with sign `sign_lo`.
fn refine(ints: &[BigInt], lead: &BigInt, width: &Scalar, mut lo: Scalar, mut hi: Scalar, sign_lo: Ordering) -> Option<Scalar> {
    if int_sign(ints, &hi) == Ordering::Equal {
        return Some(hi);
    }
    let two = Scalar::from_integer(2.into());
    loop {
        let cand = simplest_rational_between(&lo, &hi);
        if cand.denom() > lead {
            return None;
        }
        if int_sign(ints, &cand) == Ordering::Equal {
            return Some(cand);
        }
        if &hi - &lo <= *width {
            return None;
        }
        let mid = (&lo + &hi) / &two;
        match int_sign(ints, &mid) {
            Ordering::Equal => return Some(mid),
            s if s == sign_lo => lo = mid,
            _ => hi = mid,
        }
    }
}

/// The rational with the smallest denominator in the closed interval
/// `[lo, hi]` (continued-fraction descent).
pub fn simplest_rational_between(lo: &Scalar, hi: &Scalar) -> Scalar {
    debug_assert!(lo <= hi);
    if lo <= &Scalar::zero() && hi >= &Scalar::zero() {
        return Scalar::zero();
    }
    if hi < &Scalar::zero() {
        return -simplest_rational_between(&-hi, &-lo);
    }
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    let ceil = lo.ceil();
    if &ceil <= hi {
        return ceil;
    }
    // lo and hi share the integer part; recurse on the reciprocals of the
    // fractional parts
    let a = fl;
    let inner = simplest_rational_between(&(hi - &a).recip(), &(lo - &a).recip());
    a + inner.recip()
}
