//! Zero-dimensional projective schemes: counting and listing points.
//!
//! After a seeded random linear change of coordinates the scheme lies in
//! the chart `X0 = 1` and the last affine coordinate separates its points.
//! The quotient ring is then finite-dimensional and minimal polynomials of
//! coordinates come from linear dependencies among normal forms.

use num_traits::{One, Zero};
use serde::Serialize;

use super::{groebner, Ideal, IdealError, MAX_RESEEDS};
use crate::linalg::{self, Matrix};
use crate::polyring::{serde_scalar, Monomial, Polynomial, Scalar};
use crate::random;
use crate::univariate::UniPoly;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointCount {
    pub count: u64,
    /// Seed of the coordinate change that was accepted.
    pub seed: u64,
    pub attempts: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalPoints {
    /// Normalized so the first nonzero coordinate is 1.
    #[serde(serialize_with = "serde_scalar::matrix")]
    pub points: Vec<Vec<Scalar>>,
    pub non_rational: u64,
    pub seed: u64,
    pub attempts: u32,
}

/// The affine ideal in general position together with its quotient basis.
struct Chart {
    matrix: Matrix,
    affine: Ideal,
    basis: Vec<Monomial>,
    seed: u64,
    attempts: u32,
}

impl Chart {
    fn coords(&self, p: &Polynomial) -> Result<Vec<Scalar>, IdealError> {
        let nf = self.affine.normal_form(p)?;
        Ok(self.basis.iter().map(|m| nf.coefficient(m)).collect())
    }

    /// Minimal polynomial of `x` in the quotient ring.
    fn minimal_polynomial(&self, x: &Polynomial) -> Result<UniPoly, IdealError> {
        let nv = self.affine.num_vars();
        let mut power = Polynomial::one(nv);
        let mut columns: Vec<Vec<Scalar>> = Vec::new();
        loop {
            let c = self.coords(&power)?;
            if let Some(sol) = linalg::solve_columns(&columns, &c) {
                // x^k = sum sol_i x^i
                let mut coeffs: Vec<Scalar> = sol.into_iter().map(|s| -s).collect();
                coeffs.push(Scalar::one());
                return Ok(UniPoly::new(coeffs));
            }
            columns.push(c);
            power = self.affine.normal_form(&(&power * x))?;
        }
    }

    fn radical_count(&self, minpolys: &[UniPoly]) -> Result<usize, IdealError> {
        let nv = self.affine.num_vars();
        let extra = minpolys.iter().enumerate().map(|(i, mp)| {
            let sf = mp.squarefree_part();
            let x = Polynomial::var(nv, i);
            sf.coeffs()
                .iter()
                .enumerate()
                .fold(Polynomial::zero(nv), |acc, (k, c)| &acc + &x.pow(k as u32).scale(c))
        });
        let rad = self.affine.with_generators(extra);
        let gb = rad.groebner_basis()?;
        if gb.is_unit() {
            return Ok(0);
        }
        Ok(groebner::standard_monomials(&gb.leading_monomials(), nv, self.basis.len())
            .map_or(self.basis.len(), |s| s.len()))
    }
}

fn zero_dimensional(ideal: &Ideal) -> Result<Option<u64>, IdealError> {
    let profile = ideal.proj_profile()?;
    match profile.dimension {
        -1 => Ok(None),
        0 => Ok(Some(profile.degree)),
        dimension => Err(IdealError::PositiveDimensional { dimension }),
    }
}

/// Tries seeds `seed, seed + 1, ...` until the scheme avoids `X0 = 0` and
/// the last coordinate separates points (checked against the radical).
fn general_chart(ideal: &Ideal, seed: u64, length: u64) -> Result<(Chart, Vec<UniPoly>, u64), IdealError> {
    let nv = ideal.num_vars();
    for attempt in 0..MAX_RESEEDS {
        let s = seed.wrapping_add(attempt as u64);
        let mut rng = random::seeded(s);
        let matrix = random::invertible_matrix(&mut rng, nv);
        let moved = ideal.compose(&random::linear_maps(&matrix))?;
        let at_infinity = moved.with_generators([Polynomial::var(nv, 0)]);
        if !at_infinity.proj_profile()?.is_empty() {
            continue;
        }
        let affine_gens = moved
            .generators()
            .iter()
            .map(|g| g.dehomogenize(0))
            .collect::<Result<Vec<_>, _>>()?;
        let affine = Ideal::new(nv - 1, affine_gens).with_config(*ideal.config());
        let gb = affine.groebner_basis()?;
        let basis = groebner::standard_monomials(&gb.leading_monomials(), nv - 1, length as usize)
            .expect("length bounds the quotient dimension");
        let chart = Chart {
            matrix,
            affine,
            basis,
            seed: s,
            attempts: attempt + 1,
        };
        let minpolys = (0..nv - 1)
            .map(|i| chart.minimal_polynomial(&Polynomial::var(nv - 1, i)))
            .collect::<Result<Vec<_>, _>>()?;
        let separated = minpolys
            .last()
            .map_or(1, |mp| mp.squarefree_part().degree().unwrap_or(0) as u64);
        let radical = chart.radical_count(&minpolys)? as u64;
        if separated == radical {
            return Ok((chart, minpolys, separated));
        }
    }
    Err(IdealError::Degenerate {
        seed,
        attempts: MAX_RESEEDS,
    })
}

pub(crate) fn count_distinct_points(ideal: &Ideal, seed: u64) -> Result<PointCount, IdealError> {
    let Some(length) = zero_dimensional(ideal)? else {
        return Ok(PointCount {
            count: 0,
            seed,
            attempts: 0,
        });
    };
    let (chart, _, count) = general_chart(ideal, seed, length)?;
    Ok(PointCount {
        count,
        seed: chart.seed,
        attempts: chart.attempts,
    })
}

pub(crate) fn rational_points(ideal: &Ideal, seed: u64) -> Result<RationalPoints, IdealError> {
    let Some(length) = zero_dimensional(ideal)? else {
        return Ok(RationalPoints {
            points: vec![],
            non_rational: 0,
            seed,
            attempts: 0,
        });
    };
    let (chart, minpolys, count) = general_chart(ideal, seed, length)?;
    let nv = ideal.num_vars();
    let last = nv - 2;
    let mut points = Vec::new();
    for r in minpolys.last().map_or(vec![], UniPoly::rational_roots) {
        let y = Polynomial::var(nv - 1, last);
        let fibre = chart
            .affine
            .with_generators([&y - &Polynomial::constant(r.clone(), nv - 1)]);
        let fibre_chart = Chart {
            matrix: vec![],
            basis: {
                let gb = fibre.groebner_basis()?;
                groebner::standard_monomials(&gb.leading_monomials(), nv - 1, length as usize)
                    .expect("subscheme of a finite scheme")
            },
            affine: fibre,
            seed: chart.seed,
            attempts: chart.attempts,
        };
        let mut affine_point = vec![Scalar::one()];
        for i in 0..nv - 1 {
            // minimal polynomial (x - a)^k on a one-point fibre
            let mp = fibre_chart.minimal_polynomial(&Polynomial::var(nv - 1, i))?;
            let k = mp.degree().expect("nonzero");
            let a = -&mp.coeffs()[k - 1] / Scalar::from_integer((k as i64).into());
            affine_point.push(a);
        }
        let mut point = linalg::mat_vec(&chart.matrix, &affine_point);
        normalize(&mut point);
        points.push(point);
    }
    points.sort();
    let rational = points.len() as u64;
    Ok(RationalPoints {
        points,
        non_rational: count - rational,
        seed: chart.seed,
        attempts: chart.attempts,
    })
}

pub(crate) fn normalize(point: &mut [Scalar]) {
    if let Some(lead) = point.iter().find(|c| !c.is_zero()).cloned() {
        for c in point.iter_mut() {
            *c = &*c / &lead;
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::idealeng::Ideal;
    use crate::polyring::scalar;

    fn ideal(gens: &[&str], n: usize) -> Ideal {
        Ideal::parse(gens, n).unwrap()
    }

    #[test]
    fn counts() {
        let cases: &[(&[&str], usize, u64)] = &[
            (&["X0", "X1X2"], 3, 2),
            (&["X0", "X1"], 3, 1),
            (&["X0^2", "X1"], 3, 1),
            (&["X0", "X1", "X2"], 4, 1),
            (&["X0*X1 - X2^2", "X0 - X2"], 3, 2),
            (&["X0*X1", "X0*X2", "X1*X2"], 3, 3),
            (&["X0^2 - X1^2", "X2^2 - X1^2"], 3, 4),
            (&["X0^2", "X0*X1", "X1^2"], 3, 1),
            (&["X0^3 - 2*X1^3", "X2"], 3, 3),
        ];
        for (gens, n, want) in cases {
            let gens: Vec<String> = gens.iter().map(|g| g.replace("X1X2", "X1*X2")).collect();
            let refs: Vec<&str> = gens.iter().map(String::as_str).collect();
            let got = ideal(&refs, *n).count_distinct_points(5).unwrap();
            assert_eq!(got.count, *want, "{gens:?}");
        }
    }

    #[test]
    fn empty_and_positive_dimensional() {
        assert_eq!(Ideal::irrelevant(3).count_distinct_points(1).unwrap().count, 0);
        assert!(matches!(
            ideal(&["X0"], 3).count_distinct_points(1),
            Err(super::IdealError::PositiveDimensional { dimension: 1 })
        ));
    }

    #[test]
    fn seed_invariance() {
        let i = ideal(&["X0^2 - X1^2", "X2^2 - X1^2"], 3);
        for seed in 0..6 {
            assert_eq!(i.count_distinct_points(seed).unwrap().count, 4);
        }
    }

    #[test]
    fn rational_points_listed() {
        let r = ideal(&["X0*X1", "X0*X2", "X1*X2"], 3).rational_points(3).unwrap();
        assert_eq!(r.non_rational, 0);
        let one = scalar(1);
        let zero = scalar(0);
        assert_eq!(
            r.points,
            vec![
                vec![zero.clone(), zero.clone(), one.clone()],
                vec![zero.clone(), one.clone(), zero.clone()],
                vec![one.clone(), zero.clone(), zero.clone()],
            ]
        );
        let r = ideal(&["X0^3 - 2*X1^3", "X2"], 3).rational_points(3).unwrap();
        assert!(r.points.is_empty());
        assert_eq!(r.non_rational, 3);
    }
}
