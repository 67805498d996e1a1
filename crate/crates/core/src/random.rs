//! Seeded choices of "general position" data.
//!
//! All randomness in the crate flows through ChaCha8 seeded from a
//! caller-visible `u64`, with integer coefficients drawn from
//! `[-COEFF_BOX, COEFF_BOX]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{self, Matrix};
use crate::polyring::{scalar, Polynomial, Scalar};

pub const COEFF_BOX: i64 = 10_000;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn coefficient(rng: &mut SeededRng) -> Scalar {
    scalar(rng.gen_range(-COEFF_BOX..=COEFF_BOX))
}

pub fn linear_form(rng: &mut SeededRng, num_vars: usize) -> Polynomial {
    let coeffs: Vec<Scalar> = (0..num_vars).map(|_| coefficient(rng)).collect();
    Polynomial::linear_form(&coeffs)
}

/// Random invertible integer matrix.
pub fn invertible_matrix(rng: &mut SeededRng, size: usize) -> Matrix {
    loop {
        let m: Matrix = (0..size)
            .map(|_| (0..size).map(|_| coefficient(rng)).collect())
            .collect();
        if !num_traits::Zero::is_zero(&linalg::determinant(&m)) {
            return m;
        }
    }
}

/// The linear forms `sum_j m[i][j] * X_j`, suitable for `compose`.
pub fn linear_maps(m: &Matrix) -> Vec<Polynomial> {
    m.iter().map(|row| Polynomial::linear_form(row)).collect()
}
