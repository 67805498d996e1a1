//! Second Chern numbers of twisted logarithmic cotangent sheaves on `P^n`,
//! and the evaluation matrix of the global sections `d(X_i F)/F`.
//!
//! Every Chern quantity here is an integer coefficient of `H^2`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::divgeo::{self, DivGeoError, LocalChart, NCStatus};
use crate::linalg::{self, Matrix};
use crate::polyring::{parse_poly, serde_scalar, Polynomial, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogChernError {
    #[error("ambient dimension must be at least 2, got {n}")]
    Dimension { n: i64 },
    #[error("divisor degree {d} outside 1..={max}")]
    DegreeRange { d: i64, max: i64 },
    #[error("degree d = n + 1 = {d} is excluded for a prime divisor")]
    ExcludedDegree { d: i64 },
    #[error(transparent)]
    Geometry(#[from] DivGeoError),
    #[error("point is not a normal crossing of the divisor (multiplicity {multiplicity}, tangent cone rank {rank})")]
    NotNormalCrossing { multiplicity: u32, rank: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChernParams {
    pub n: i64,
    pub d: i64,
    pub m: i64,
    pub deg_z: u64,
}

impl ChernParams {
    pub fn new(n: i64, d: i64, m: i64, deg_z: u64) -> Result<Self, LogChernError> {
        if n < 2 {
            return Err(LogChernError::Dimension { n });
        }
        if d < 1 {
            return Err(LogChernError::DegreeRange { d, max: n + 1 });
        }
        Ok(ChernParams { n, d, m, deg_z })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct C2LogTwist {
    /// Coefficient of `H^2` before subtracting the class of `Z`.
    pub value: i128,
    pub deg_z: u64,
    /// `value - deg_z`.
    pub h2_coefficient: i128,
}

/// `c_2(Ω(log D) ⊗ O(m))` as `((n+1)(n-2d)/2 + d^2) - (n-1)(n+1-d) m + n(n-1)/2 m^2 - deg Z`.
pub fn c2_log_twist(p: &ChernParams) -> C2LogTwist {
    let (n, d, m) = (p.n as i128, p.d as i128, p.m as i128);
    let doubled = (n + 1) * (n - 2 * d) + 2 * d * d - 2 * (n - 1) * (n + 1 - d) * m + n * (n - 1) * m * m;
    assert!(doubled % 2 == 0, "odd doubled Chern number for {p:?}");
    let value = doubled / 2;
    C2LogTwist {
        value,
        deg_z: p.deg_z,
        h2_coefficient: value - p.deg_z as i128,
    }
}

/// `((d-1)^2 - deg Z) m^n`: the pulled-back `O(1)` twist restricted to a
/// general surface section.
pub fn c2_pullback_restricted(p: &ChernParams) -> BigInt {
    let base = BigInt::from((p.d - 1) * (p.d - 1)) - BigInt::from(p.deg_z);
    base * num_traits::pow(BigInt::from(p.m), p.n as usize)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct C2Comparison {
    pub n: i64,
    pub d: i64,
    pub deg_z: u64,
    /// Coefficients in `m`, index = power.
    pub lhs_m_poly: Vec<i64>,
    pub rhs_m_poly: Vec<i64>,
    /// `(d-1)^2 - deg Z <= n(n-1)/2`.
    pub leading_inequality: bool,
    pub leading_equality: bool,
    /// `m^{n-1}` coefficient of `rhs - lhs`, i.e. `-(n-1)(n+1-d)`.
    pub strictness_coefficient: i64,
    /// `lhs <= rhs` fails for all large `m`.
    pub contradiction: bool,
    pub threshold: i64,
}

/// Compares `((d-1)^2 - deg Z) m^n` with the restriction of the `O(m)`
/// twist to a surface section, as polynomials in `m`.
pub fn c2_comparison(n: i64, d: i64, deg_z: u64) -> Result<C2Comparison, LogChernError> {
    if n < 2 {
        return Err(LogChernError::Dimension { n });
    }
    if d == n + 1 {
        return Err(LogChernError::ExcludedDegree { d });
    }
    if d < 1 || d > n {
        return Err(LogChernError::DegreeRange { d, max: n });
    }
    let z = deg_z as i64;
    let top = n as usize;
    let mut lhs = vec![0i64; top + 1];
    lhs[top] = (d - 1) * (d - 1) - z;
    let mut rhs = vec![0i64; top + 1];
    rhs[top] = n * (n - 1) / 2;
    rhs[top - 1] = -(n - 1) * (n + 1 - d);
    rhs[top - 2] = (n + 1) * (n - 2 * d) / 2 + d * d - z;
    // rhs - lhs >= 0 for large m iff its leading nonzero coefficient is positive
    let diff_sign = (0..=top)
        .rev()
        .map(|k| rhs[k] - lhs[k])
        .find(|&c| c != 0)
        .map_or(0, i64::signum);
    Ok(C2Comparison {
        n,
        d,
        deg_z,
        leading_inequality: lhs[top] <= rhs[top],
        leading_equality: lhs[top] == rhs[top],
        strictness_coefficient: rhs[top - 1] - lhs[top - 1],
        contradiction: diff_sign < 0,
        threshold: (d - 1) * (d - 1) - n * (n - 1) / 2,
        lhs_m_poly: lhs,
        rhs_m_poly: rhs,
    })
}

/// Checks the `m = 1` specialization numerically on a grid and once as a
/// polynomial identity in formal `n`, `d`.
pub fn chern_identity_check(range_n: std::ops::RangeInclusive<i64>, range_d: impl Fn(i64) -> std::ops::RangeInclusive<i64>) -> bool {
    for n in range_n {
        for d in range_d(n) {
            let doubled = (n + 1) * (n - 2 * d) + 2 * d * d - 2 * (n - 1) * (n + 1 - d) + n * (n - 1);
            if doubled != 2 * (d - 1) * (d - 1) {
                return false;
            }
        }
    }
    formal_identity_difference().is_zero()
}

/// `(n+1)(n-2d)/2 + d^2 - (n-1)(n+1-d) + n(n-1)/2 - (d-1)^2` in `Q[n, d]`.
pub fn formal_identity_difference() -> Polynomial {
    parse_poly(
        "1/2*(x + 1)*(x - 2*y) + y^2 - (x - 1)*(x + 1 - y) + 1/2*x*(x - 1) - (y - 1)^2",
        2,
    )
    .expect("fixed expression")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "pivot", rename_all = "snake_case")]
pub enum BasisTag {
    /// Basis `dY_1..dY_n`.
    OffDivisor,
    /// Basis `df/f` and `dY_j` for `j != pivot` (affine index).
    SmoothPoint(usize),
    /// Residues along the two branches, then coordinates transverse to
    /// the tangent cone.
    #[serde(rename = "nc_point")]
    NCPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogSectionMatrix {
    pub chart: usize,
    #[serde(serialize_with = "serde_scalar::vec")]
    pub point: Vec<Scalar>,
    /// Row `i` is the section `d(X_i F)/F` at the point.
    #[serde(serialize_with = "serde_scalar::matrix")]
    pub rows: Matrix,
    pub basis_tag: BasisTag,
    pub rank: usize,
    pub rank_is_lower_bound: bool,
}

/// Evaluates the sections `d(X_i F)/F`, i = 0..n, at a rational point.
pub fn log_section_matrix(form: &Polynomial, point: &[Scalar]) -> Result<LogSectionMatrix, LogChernError> {
    let chart = LocalChart::new(form, point)?;
    let nv = form.num_vars();
    let n = nv - 1;
    let fb = &chart.dehomogenized;
    let a = &chart.affine;
    let value = fb.evaluate(a);
    let grad: Vec<Scalar> = fb.gradient().iter().map(|g| g.evaluate(a)).collect();

    // affine index of homogeneous coordinate i
    let affine_index = |i: usize| if i < chart.chart { i } else { i - 1 };
    let unit = |k: usize| -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); n];
        v[k] = Scalar::one();
        v
    };
    let combine = |base: &[Scalar], s: &Scalar, extra: &[Scalar]| -> Vec<Scalar> {
        base.iter().zip(extra).map(|(b, e)| s * b + e).collect()
    };

    let (log_row, dy, tag, lower): (Vec<Scalar>, Box<dyn Fn(usize) -> Vec<Scalar>>, BasisTag, bool) =
        if !value.is_zero() {
            let g: Vec<Scalar> = grad.iter().map(|c| c / &value).collect();
            (g, Box::new(unit), BasisTag::OffDivisor, false)
        } else {
            let cert = divgeo::nc_certificate(form, point)?;
            match cert.status {
                NCStatus::Smooth => {
                    let pivot = grad.iter().position(|c| !c.is_zero()).expect("smooth point");
                    // basis position of dY_j: 1 + j, shifted past the pivot
                    let slot = move |j: usize| if j < pivot { j + 1 } else { j };
                    let grad = grad.clone();
                    let dy = move |k: usize| -> Vec<Scalar> {
                        let mut v = vec![Scalar::zero(); n];
                        if k == pivot {
                            for j in (0..n).filter(|&j| j != pivot) {
                                v[slot(j)] = -(&grad[j] / &grad[pivot]);
                            }
                        } else {
                            v[slot(k)] = Scalar::one();
                        }
                        v
                    };
                    (unit(0), Box::new(dy), BasisTag::SmoothPoint(pivot), false)
                }
                NCStatus::NormalCrossing => {
                    let quad = chart.local.homogeneous_part(2);
                    let kernel = null_space(&divgeo::quadric_matrix(&quad));
                    let dy = move |k: usize| -> Vec<Scalar> {
                        let mut v = vec![Scalar::zero(), Scalar::zero()];
                        v.extend(kernel.iter().map(|w| w[k].clone()));
                        v
                    };
                    let mut residues = vec![Scalar::zero(); n];
                    residues[0] = Scalar::one();
                    residues[1] = Scalar::one();
                    (residues, Box::new(dy), BasisTag::NCPoint, true)
                }
                _ => {
                    return Err(LogChernError::NotNormalCrossing {
                        multiplicity: cert.multiplicity,
                        rank: cert.tangent_cone_rank,
                    })
                }
            }
        };

    let rows: Matrix = (0..nv)
        .map(|i| {
            if i == chart.chart {
                log_row.clone()
            } else {
                let k = affine_index(i);
                combine(&log_row, &a[k], &dy(k))
            }
        })
        .collect();
    Ok(LogSectionMatrix {
        chart: chart.chart,
        point: chart.affine.clone(),
        rank: linalg::rank(&rows),
        rows,
        basis_tag: tag,
        rank_is_lower_bound: lower,
    })
}

/// Basis of `{v : S v = 0}`.
fn null_space(s: &Matrix) -> Vec<Vec<Scalar>> {
    let n = s.len();
    let mut r = s.clone();
    let pivots = linalg::rref(&mut r);
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Scalar::zero(); n];
            v[free] = Scalar::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[row][free].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{parse_poly, ratio, scalar};
    use crate::random;
    use proptest::prelude::*;

    fn p(s: &str, n: usize) -> Polynomial {
        parse_poly(s, n).unwrap()
    }

    fn pt(c: &[i64]) -> Vec<Scalar> {
        c.iter().map(|&x| scalar(x)).collect()
    }

    fn params(n: i64, d: i64, m: i64, z: u64) -> ChernParams {
        ChernParams::new(n, d, m, z).unwrap()
    }

    #[test]
    fn log_twist_examples() {
        assert_eq!(c2_log_twist(&params(3, 2, 0, 0)).value, 2);
        assert_eq!(c2_log_twist(&params(2, 2, 2, 0)).value, 3);
        for n in 2..=10 {
            for d in 1..=n + 1 {
                for z in [0u64, 1, 5] {
                    let c = c2_log_twist(&params(n, d, 1, z));
                    assert_eq!(c.h2_coefficient, ((d - 1) * (d - 1)) as i128 - z as i128);
                }
            }
        }
    }

    #[test]
    fn pullback_examples() {
        assert_eq!(c2_pullback_restricted(&params(3, 3, 2, 1)), BigInt::from(24));
        assert!(c2_pullback_restricted(&params(4, 3, 7, 4)).is_zero());
        for n in 2..=6 {
            for d in 1..=n {
                let p1 = params(n, d, 1, 2);
                assert_eq!(
                    c2_pullback_restricted(&p1),
                    BigInt::from(c2_log_twist(&p1).h2_coefficient)
                );
            }
        }
    }

    #[test]
    fn comparison_examples() {
        let c = c2_comparison(3, 3, 1).unwrap();
        assert!(c.leading_equality);
        assert_eq!(c.strictness_coefficient, -2);
        assert!(c.contradiction);

        let c = c2_comparison(3, 2, 0).unwrap();
        assert!(c.leading_inequality && !c.leading_equality);
        assert!(!c.contradiction);

        let c = c2_comparison(2, 2, 0).unwrap();
        assert!(c.leading_equality);
        assert_eq!(c.strictness_coefficient, -1);
        assert!(c.contradiction);

        assert_eq!(c2_comparison(3, 4, 0), Err(LogChernError::ExcludedDegree { d: 4 }));
        assert!(c2_comparison(3, 0, 0).is_err());
    }

    #[test]
    fn comparison_reproduces_threshold() {
        for n in 2..=10 {
            for d in 2..=n {
                let threshold = (d - 1) * (d - 1) - n * (n - 1) / 2;
                for z in 0..=(threshold.max(0) + 3) as u64 {
                    let c = c2_comparison(n, d, z).unwrap();
                    assert_eq!(c.contradiction, (z as i64) <= threshold, "{n} {d} {z}");
                }
            }
        }
    }

    #[test]
    fn identity_check() {
        assert!(chern_identity_check(2..=10, |n| 1..=n + 1));
        assert!(formal_identity_difference().is_zero());
        let at = |n: i64, d: i64| c2_log_twist(&params(n, d, 1, 0)).value;
        assert_eq!(at(3, 3), 4);
        assert_eq!(at(2, 1), 0);
    }

    #[test]
    fn section_matrix_examples() {
        let conic = p("X0*X2 - X1^2", 3);
        let off = log_section_matrix(&conic, &pt(&[1, 1, 2])).unwrap();
        assert_eq!(off.basis_tag, BasisTag::OffDivisor);
        assert_eq!((off.rank, off.rank_is_lower_bound), (2, false));
        assert_eq!(off.rows.len(), 3);
        assert!(off.rows.iter().all(|r| r.len() == 2));

        let on = log_section_matrix(&conic, &pt(&[1, 0, 0])).unwrap();
        assert!(matches!(on.basis_tag, BasisTag::SmoothPoint(_)));
        assert_eq!(on.rank, 2);

        let nodal = p("X1^2*X2 - X0^2*(X0 + X2)", 3);
        let node = log_section_matrix(&nodal, &pt(&[0, 0, 1])).unwrap();
        assert_eq!(node.basis_tag, BasisTag::NCPoint);
        assert!(node.rank_is_lower_bound);
        assert!(node.rank >= 1);

        let cusp = p("X1^2*X2 - X0^3", 3);
        assert!(matches!(
            log_section_matrix(&cusp, &pt(&[0, 0, 1])),
            Err(LogChernError::NotNormalCrossing { .. })
        ));
    }

    #[test]
    fn section_matrix_hand_values() {
        // conic at (1:1:2), chart X0: f_b = Y2 - Y1^2, f_b = 1, grad = (-2, 1)
        let m = log_section_matrix(&p("X0*X2 - X1^2", 3), &pt(&[1, 1, 2])).unwrap();
        let want = vec![
            vec![scalar(-2), scalar(1)],
            vec![scalar(-1), scalar(1)],
            vec![scalar(-4), scalar(3)],
        ];
        assert_eq!(m.rows, want);
    }

    #[test]
    fn whitney_nc_points() {
        let w = p("X0^2*X3 - X1^2*X2", 4);
        for t in [1i64, 2, -3, 7] {
            let m = log_section_matrix(&w, &[scalar(0), scalar(0), scalar(1), ratio(t, 5)]).unwrap();
            assert_eq!(m.basis_tag, BasisTag::NCPoint);
            assert!(m.rank >= 2);
        }
    }

    fn change(seed: u64, nv: usize) -> (Vec<Polynomial>, Matrix) {
        let mut rng = random::seeded(seed);
        let a = random::invertible_matrix(&mut rng, nv);
        (random::linear_maps(&a), a)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(5))]

        #[test]
        fn rank_is_coordinate_free(seed in any::<u64>(), s in -6i64..6, t in 1i64..6) {
            let conic = p("X0*X2 - X1^2", 3);
            let nodal = p("X1^2*X2 - X0^2*(X0 + X2)", 3);
            let cases: Vec<(Polynomial, Vec<Scalar>)> = vec![
                (conic.clone(), vec![scalar(s * s), scalar(s * t), scalar(t * t)]),
                (conic.clone(), vec![scalar(1), scalar(s), scalar(t)]),
                (nodal.clone(), pt(&[0, 0, 1])),
                (nodal.clone(), vec![scalar(t * (s * s - t * t)), scalar(s * (s * s - t * t)), scalar(t * t * t)]),
            ];
            for (f, q) in cases {
                prop_assume!(q.iter().any(|c| !c.is_zero()));
                let before = match log_section_matrix(&f, &q) {
                    Ok(b) => b,
                    Err(LogChernError::NotNormalCrossing { .. }) => continue,
                    Err(e) => panic!("{e}"),
                };
                let (maps, a) = change(seed, 3);
                let g = f.compose(&maps).unwrap();
                let q2 = linalg::mat_vec(&linalg::inverse(&a).unwrap(), &q);
                let after = log_section_matrix(&g, &q2).unwrap();
                prop_assert_eq!(before.rank, after.rank);
                prop_assert_eq!(before.rank_is_lower_bound, after.rank_is_lower_bound);
            }
        }

        #[test]
        fn log_twist_is_integral(n in 2i64..40, d in 1i64..60, m in -50i64..50) {
            let c = c2_log_twist(&params(n, d, m, 0));
            let doubled = (n as i128 + 1) * (n as i128 - 2 * d as i128) + 2 * (d as i128).pow(2)
                - 2 * (n as i128 - 1) * (n as i128 + 1 - d as i128) * m as i128
                + n as i128 * (n as i128 - 1) * (m as i128).pow(2);
            prop_assert_eq!(2 * c.value, doubled);
        }
    }
}
