//! Hilbert series of monomial quotients `k[X]/M`.
//!
//! The series is `N(t) / (1-t)^n`; the numerator is computed by the
//! recursion `N(M) = N(M') - t^deg(m) * N(M' : m)` over the minimal
//! generators (inclusion–exclusion on the staircase).

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::polyring::Monomial;

fn minimalize(gens: &[Monomial]) -> Vec<Monomial> {
    let mut sorted: Vec<Monomial> = gens.to_vec();
    sorted.sort_by_key(Monomial::degree);
    let mut out: Vec<Monomial> = Vec::new();
    for g in sorted {
        if !out.iter().any(|o| o.divides(&g)) {
            out.push(g);
        }
    }
    out
}

fn poly_sub_shifted(a: &mut Vec<BigInt>, b: &[BigInt], shift: usize) {
    if a.len() < b.len() + shift {
        a.resize(b.len() + shift, BigInt::zero());
    }
    for (i, c) in b.iter().enumerate() {
        a[i + shift] -= c;
    }
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Numerator coefficients (index = power of t).
pub(crate) fn numerator(gens: &[Monomial]) -> Vec<BigInt> {
    let gens = minimalize(gens);
    if gens.is_empty() {
        return vec![BigInt::one()];
    }
    let pairwise_coprime = gens
        .iter()
        .enumerate()
        .all(|(i, a)| gens[i + 1..].iter().all(|b| a.is_coprime(b)));
    if pairwise_coprime {
        return gens.iter().fold(vec![BigInt::one()], |acc, g| {
            let d = g.degree() as usize;
            let mut f = vec![BigInt::zero(); d + 1];
            f[0] = BigInt::one();
            f[d] -= BigInt::one();
            poly_mul(&acc, &f)
        });
    }
    let (pivot, rest) = gens.split_last().expect("nonempty");
    let mut out = numerator(rest);
    let colon: Vec<Monomial> = rest
        .iter()
        .map(|g| g.gcd(pivot).quotient_of(g).expect("gcd divides"))
        .collect();
    poly_sub_shifted(&mut out, &numerator(&colon), pivot.degree() as usize);
    out
}

/// `(projective dimension, degree)` of `k[X0..X_{nv-1}]/M`. Dimension -1
/// (with degree 0) means the Hilbert polynomial vanishes.
pub(crate) fn profile(gens: &[Monomial], num_vars: usize) -> (i64, u64) {
    let mut n = numerator(gens);
    while n.last().is_some_and(Zero::is_zero) {
        n.pop();
    }
    if n.is_empty() {
        return (-1, 0);
    }
    let mut poles = num_vars as i64;
    loop {
        let at_one: BigInt = n.iter().sum();
        if !at_one.is_zero() || poles == 0 {
            break;
        }
        // N(t) = (1 - t) Q(t)
        let mut q = Vec::with_capacity(n.len() - 1);
        let mut acc = BigInt::zero();
        for c in &n[..n.len() - 1] {
            acc += c;
            q.push(acc.clone());
        }
        n = q;
        poles -= 1;
    }
    if poles == 0 {
        return (-1, 0);
    }
    let degree: BigInt = n.iter().sum();
    let degree = u64::try_from(degree).expect("degree of a nonempty scheme is positive");
    (poles - 1, degree)
}
