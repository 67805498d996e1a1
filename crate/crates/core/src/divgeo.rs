//! Singularities of a projective hypersurface `V(F)`.
//!
//! The non-normal locus is read as the top-dimensional part of the
//! singular locus when that part has codimension two in `P^n`; its degree
//! is the number of distinct points on a generic linear section.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::idealeng::{self, EngineConfig, Ideal, IdealError, ProjectiveProfile, MAX_RESEEDS};
use crate::linalg::{self, Matrix};
use crate::polyring::{serde_scalar, Monomial, PolyError, Polynomial, Scalar};
use crate::random;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DivGeoError {
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error("hypersurface equation is constant")]
    Constant,
    #[error("hypersurface equation is not homogeneous")]
    Inhomogeneous,
    #[error("point has {found} coordinates, expected {expected}")]
    PointArity { expected: usize, found: usize },
    #[error("all coordinates of the point are zero")]
    ZeroPoint,
    #[error("point does not lie on the hypersurface (value {value})")]
    NotOnDivisor { value: String },
}

impl From<PolyError> for DivGeoError {
    fn from(e: PolyError) -> Self {
        DivGeoError::Ideal(IdealError::Poly(e))
    }
}

impl DivGeoError {
    pub fn is_budget(&self) -> bool {
        matches!(self, DivGeoError::Ideal(e) if e.is_budget())
    }
}

fn check_form(form: &Polynomial) -> Result<u32, DivGeoError> {
    let d = form
        .is_homogeneous()
        .filter(|_| !form.is_zero())
        .ok_or(DivGeoError::Inhomogeneous)?;
    if d == 0 {
        return Err(DivGeoError::Constant);
    }
    Ok(d)
}

/// The ideal of all partial derivatives. By the Euler relation `F` itself
/// lies in it, so it cuts out `Sing V(F)`.
pub fn singular_locus(form: &Polynomial) -> Result<Ideal, DivGeoError> {
    check_form(form)?;
    Ok(Ideal::new(form.num_vars(), form.gradient()))
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularityReport {
    #[serde(skip)]
    pub sing_ideal: Ideal,
    pub sing_profile: ProjectiveProfile,
    /// Reduced degree of the codimension-two part of the singular locus.
    pub z_degree: u64,
    pub z_is_pure_expected_dim: bool,
    pub section_seed: u64,
    pub section_attempts: u32,
}

/// Restriction of `ideal` to a seeded random linear subspace of codimension
/// `count`, given by its parametrization (`num_vars` rows). `None` when the
/// parametrization drops rank.
fn linear_section(ideal: &Ideal, count: usize, seed: u64) -> Result<Option<(Ideal, Matrix)>, DivGeoError> {
    let mut rng = random::seeded(seed);
    let nv = ideal.num_vars();
    let k = nv - count;
    let m: Matrix = (0..nv)
        .map(|_| (0..k).map(|_| random::coefficient(&mut rng)).collect())
        .collect();
    if linalg::rank(&m) < k {
        return Ok(None);
    }
    Ok(Some((ideal.compose(&random::linear_maps(&m))?, m)))
}

/// Distinct points on a generic section of the top-dimensional part of
/// `ideal`, whose projective dimension is `dim`. Returns the count, the
/// accepted seed and the number of attempts.
fn section_degree(ideal: &Ideal, dim: i64, seed: u64) -> Result<(u64, u64, u32), DivGeoError> {
    for attempt in 0..MAX_RESEEDS {
        let s = seed.wrapping_add(attempt as u64);
        let Some((section, _)) = linear_section(ideal, dim as usize, s)? else {
            continue;
        };
        if section.proj_profile()?.dimension != 0 {
            continue;
        }
        let count = section.count_distinct_points(s)?;
        return Ok((count.count, s, attempt + 1));
    }
    Err(IdealError::Degenerate {
        seed,
        attempts: MAX_RESEEDS,
    }
    .into())
}

pub fn nonnormal_degree(form: &Polynomial, seed: u64) -> Result<SingularityReport, DivGeoError> {
    nonnormal_degree_with(form, seed, &EngineConfig::default())
}

pub fn nonnormal_degree_with(
    form: &Polynomial,
    seed: u64,
    config: &EngineConfig,
) -> Result<SingularityReport, DivGeoError> {
    let sing_ideal = singular_locus(form)?.with_config(*config);
    let n = form.num_vars() as i64 - 1;
    let sing_profile = sing_ideal.proj_profile()?;
    let mut report = SingularityReport {
        sing_ideal,
        sing_profile,
        z_degree: 0,
        z_is_pure_expected_dim: sing_profile.dimension <= n - 2,
        section_seed: seed,
        section_attempts: 0,
    };
    if sing_profile.dimension >= n - 2 && sing_profile.dimension >= 0 {
        let (count, s, attempts) = section_degree(&report.sing_ideal, sing_profile.dimension, seed)?;
        report.z_degree = count;
        report.section_seed = s;
        report.section_attempts = attempts;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NCStatus {
    Smooth,
    NormalCrossing,
    NotNormalCrossing,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchDiscriminant {
    /// `-d1*d2` for a diagonalization `d1*u^2 + d2*v^2` of the quadratic part.
    #[serde(serialize_with = "serde_scalar::one")]
    pub value: Scalar,
    /// Whether the two branches are defined over the rationals.
    pub rational_branches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NCCertificate {
    #[serde(serialize_with = "serde_scalar::vec")]
    pub point: Vec<Scalar>,
    pub status: NCStatus,
    pub tangent_cone_rank: usize,
    pub multiplicity: u32,
    pub branch_disc: Option<BranchDiscriminant>,
}

/// `F` in an affine chart around a point, moved so the point is the origin.
#[derive(Debug, Clone)]
pub struct LocalChart {
    /// Index of the homogeneous coordinate set to one.
    pub chart: usize,
    /// The point scaled so coordinate `chart` is 1.
    pub point: Vec<Scalar>,
    /// The point's affine coordinates (all but `chart`).
    pub affine: Vec<Scalar>,
    /// `F` dehomogenized at `chart`.
    pub dehomogenized: Polynomial,
    /// `dehomogenized(Y + affine)`.
    pub local: Polynomial,
}

impl LocalChart {
    pub fn new(form: &Polynomial, point: &[Scalar]) -> Result<Self, DivGeoError> {
        let nv = form.num_vars();
        if point.len() != nv {
            return Err(DivGeoError::PointArity {
                expected: nv,
                found: point.len(),
            });
        }
        let chart = point
            .iter()
            .position(|c| !c.is_zero())
            .ok_or(DivGeoError::ZeroPoint)?;
        Self::in_chart(form, point, chart)
    }

    pub fn in_chart(form: &Polynomial, point: &[Scalar], chart: usize) -> Result<Self, DivGeoError> {
        check_form(form)?;
        let nv = form.num_vars();
        assert!(!point[chart].is_zero(), "chart coordinate must be nonzero");
        let point: Vec<Scalar> = point.iter().map(|c| c / &point[chart]).collect();
        let affine: Vec<Scalar> = point
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != chart)
            .map(|(_, c)| c.clone())
            .collect();
        let dehomogenized = form.dehomogenize(chart)?;
        let shift: Vec<Polynomial> = affine
            .iter()
            .enumerate()
            .map(|(j, a)| &Polynomial::var(nv - 1, j) + &Polynomial::constant(a.clone(), nv - 1))
            .collect();
        let local = dehomogenized.compose(&shift)?;
        Ok(LocalChart {
            chart,
            point,
            affine,
            dehomogenized,
            local,
        })
    }

    /// Order of vanishing at the origin (0 off the hypersurface).
    pub fn multiplicity(&self) -> u32 {
        self.local.min_degree().unwrap_or(0)
    }
}

/// Symmetric matrix `S` with `Q(y) = y^T S y`.
pub(crate) fn quadric_matrix(q: &Polynomial) -> Matrix {
    let n = q.num_vars();
    let mut s = vec![vec![Scalar::zero(); n]; n];
    let two = Scalar::from_integer(2.into());
    for (m, c) in q.terms() {
        let support: Vec<usize> = (0..n).filter(|&i| m.exponents()[i] > 0).collect();
        match support[..] {
            [i] => s[i][i] = c.clone(),
            [i, j] => {
                s[i][j] = c / &two;
                s[j][i] = c / &two;
            }
            _ => unreachable!("quadratic form"),
        }
    }
    s
}

/// Nonzero diagonal entries of a congruence diagonalization.
fn diagonalize(mut s: Matrix) -> Vec<Scalar> {
    let n = s.len();
    let mut out = Vec::new();
    let mut alive: Vec<usize> = (0..n).collect();
    while !alive.is_empty() {
        let pivot = alive.iter().copied().find(|&i| !s[i][i].is_zero());
        let pivot = match pivot {
            Some(i) => i,
            None => {
                let Some((i, j)) = alive
                    .iter()
                    .flat_map(|&i| alive.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && !s[i][j].is_zero())
                else {
                    break;
                };
                // e_i -> e_i + e_j makes the diagonal entry 2*s_ij
                for k in 0..n {
                    let v = s[j][k].clone();
                    s[i][k] += v;
                }
                for k in 0..n {
                    let v = s[k][j].clone();
                    s[k][i] += v;
                }
                i
            }
        };
        let d = s[pivot][pivot].clone();
        alive.retain(|&k| k != pivot);
        for &k in &alive {
            let f = &s[k][pivot] / &d;
            if f.is_zero() {
                continue;
            }
            for l in 0..n {
                let v = &f * &s[pivot][l];
                s[k][l] -= v;
            }
            for l in 0..n {
                let v = &f * &s[l][pivot];
                s[l][k] -= v;
            }
        }
        out.push(d);
    }
    out
}

fn is_square(q: &Scalar) -> bool {
    if q.is_negative() {
        return false;
    }
    let sq = |b: &BigInt| {
        let r = b.sqrt();
        &r * &r == *b
    };
    sq(q.numer()) && sq(q.denom())
}

/// Rank of the span of the `(k-1)`-th partial derivatives of a form of
/// degree `k`: the number of variables it essentially depends on.
fn form_rank(form: &Polynomial) -> usize {
    let Some(k) = form.total_degree() else {
        return 0;
    };
    let n = form.num_vars();
    let mut derivs = vec![form.clone()];
    for _ in 1..k {
        derivs = derivs
            .iter()
            .flat_map(|g| (0..n).map(move |i| g.partial_derivative(i).expect("in range")))
            .filter(|g| !g.is_zero())
            .collect();
        derivs.sort_by_key(|g| g.to_string());
        derivs.dedup();
    }
    let rows: Matrix = derivs
        .iter()
        .map(|g| {
            (0..n)
                .map(|i| g.coefficient(&Monomial::var(n, i)))
                .collect()
        })
        .collect();
    if rows.is_empty() {
        0
    } else {
        linalg::rank(&rows)
    }
}

/// Tangent-cone test for normal crossings at a rational point of `V(F)`.
pub fn nc_certificate(form: &Polynomial, point: &[Scalar]) -> Result<NCCertificate, DivGeoError> {
    let chart = LocalChart::new(form, point)?;
    let value = chart.local.coefficient(&Monomial::one(chart.local.num_vars()));
    if !value.is_zero() || chart.local.is_zero() {
        return Err(DivGeoError::NotOnDivisor {
            value: value.to_string(),
        });
    }
    let multiplicity = chart.multiplicity();
    let cone = chart.local.homogeneous_part(multiplicity);
    let tangent_cone_rank = form_rank(&cone);
    let mut branch_disc = None;
    let status = match multiplicity {
        1 => NCStatus::Smooth,
        2 if tangent_cone_rank == 2 => {
            let d = diagonalize(quadric_matrix(&cone));
            let value = -(&d[0] * &d[1]);
            branch_disc = Some(BranchDiscriminant {
                rational_branches: is_square(&value),
                value,
            });
            NCStatus::NormalCrossing
        }
        _ => NCStatus::NotNormalCrossing,
    };
    Ok(NCCertificate {
        point: chart.point,
        status,
        tangent_cone_rank,
        multiplicity,
        branch_disc,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionSample {
    /// Set when the singular locus has no codimension-two part.
    pub vacuous: bool,
    pub trials: usize,
    pub samples: usize,
    pub normal_crossing: usize,
    pub not_normal_crossing: usize,
    /// Section points that are not rational, or sections that degenerated.
    pub indeterminate: usize,
    pub witnesses: Vec<NCCertificate>,
    pub seed: u64,
}

impl AssumptionSample {
    pub fn passed(&self) -> bool {
        self.not_normal_crossing == 0
    }
}

pub fn sample_assumption(form: &Polynomial, trials: usize, seed: u64) -> Result<AssumptionSample, DivGeoError> {
    sample_assumption_with(form, trials, seed, &EngineConfig::default())
}

/// Certifies rational points of generic sections of the codimension-two
/// part of `Sing V(F)`. For plane curves the singular points themselves
/// are examined once.
pub fn sample_assumption_with(
    form: &Polynomial,
    trials: usize,
    seed: u64,
    config: &EngineConfig,
) -> Result<AssumptionSample, DivGeoError> {
    let sing = singular_locus(form)?.with_config(*config);
    let n = form.num_vars() - 1;
    let profile = sing.proj_profile()?;
    let mut out = AssumptionSample {
        vacuous: profile.dimension != n as i64 - 2,
        trials,
        samples: 0,
        normal_crossing: 0,
        not_normal_crossing: 0,
        indeterminate: 0,
        witnesses: vec![],
        seed,
    };
    if out.vacuous {
        return Ok(out);
    }
    let rounds = if n == 2 { trials.min(1) } else { trials };
    for t in 0..rounds {
        let s = seed.wrapping_add(t as u64);
        let section = match linear_section(&sing, n - 2, s)? {
            Some((section, m)) if section.proj_profile()?.dimension == 0 => (section, m),
            _ => {
                out.indeterminate += 1;
                continue;
            }
        };
        let (section, param) = section;
        let pts = match section.rational_points(s) {
            Ok(pts) => pts,
            Err(IdealError::Degenerate { .. }) => {
                out.indeterminate += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        out.indeterminate += pts.non_rational as usize;
        for p in &pts.points {
            let mut p = linalg::mat_vec(&param, p);
            idealeng::normalize(&mut p);
            let cert = nc_certificate(form, &p)?;
            out.samples += 1;
            match cert.status {
                NCStatus::NormalCrossing => out.normal_crossing += 1,
                NCStatus::NotNormalCrossing => {
                    out.not_normal_crossing += 1;
                    out.witnesses.push(cert);
                }
                NCStatus::Smooth | NCStatus::Indeterminate => out.indeterminate += 1,
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{parse_poly, scalar};
    use proptest::prelude::*;

    fn p(s: &str, n: usize) -> Polynomial {
        parse_poly(s, n).unwrap()
    }

    fn pt(c: &[i64]) -> Vec<Scalar> {
        c.iter().map(|&x| scalar(x)).collect()
    }

    const WHITNEY: &str = "X0^2*X3 - X1^2*X2";
    const NODAL: &str = "X1^2*X2 - X0^2*(X0 + X2)";

    #[test]
    fn singular_locus_examples() {
        let prof = |f: &str, n| singular_locus(&p(f, n)).unwrap().proj_profile().unwrap();
        assert!(prof("X0*X3 - X1*X2", 4).is_empty());
        assert_eq!(prof(WHITNEY, 4), ProjectiveProfile { dimension: 1, degree: 1 });
        assert_eq!(prof(NODAL, 3).dimension, 0);
        assert!(matches!(singular_locus(&p("3", 3)), Err(DivGeoError::Inhomogeneous | DivGeoError::Constant)));
    }

    #[test]
    fn nonnormal_examples() {
        assert_eq!(nonnormal_degree(&p(WHITNEY, 4), 0).unwrap().z_degree, 1);
        assert_eq!(nonnormal_degree(&p("X0*X3 - X1*X2", 4), 0).unwrap().z_degree, 0);
        let nodal = nonnormal_degree(&p(NODAL, 3), 0).unwrap();
        assert_eq!(nodal.z_degree, 1);
        assert!(nodal.z_is_pure_expected_dim);
        // isolated cone point in P^3: below the expected dimension
        let cone = nonnormal_degree(&p("X0^3 + X1^3 + X2^3", 4), 0).unwrap();
        assert_eq!(cone.z_degree, 0);
    }

    #[test]
    fn nonnormal_seed_invariance() {
        let f = p(WHITNEY, 4);
        for seed in 0..10 {
            assert_eq!(nonnormal_degree(&f, seed).unwrap().z_degree, 1);
        }
    }

    #[test]
    fn plane_curve_delta_bound_on_nodal_catalog() {
        // irreducible plane curves whose singularities are nodes
        let catalog = [
            (NODAL, 3u64, 1u64),
            ("X0^2*X1^2 + X1^2*X2^2 + X2^2*X0^2", 4, 3),
            ("X0*X2 - X1^2", 2, 0),
            ("X0^3 + X1^3 + X2^3", 3, 0),
        ];
        for (f, k, want) in catalog {
            let z = nonnormal_degree(&p(f, 3), 3).unwrap().z_degree;
            assert_eq!(z, want, "{f}");
            assert!(z <= (k - 1) * (k - 2) / 2, "{f}: {z}");
        }
        // four general lines: reducible, six nodes
        assert_eq!(nonnormal_degree(&p("X0*X1*(X0 + X1 + X2)*X2", 3), 3).unwrap().z_degree, 6);
    }

    #[test]
    fn nc_examples() {
        let w = p(WHITNEY, 4);
        let c = nc_certificate(&w, &pt(&[0, 0, 1, 1])).unwrap();
        assert_eq!(c.status, NCStatus::NormalCrossing);
        assert_eq!((c.multiplicity, c.tangent_cone_rank), (2, 2));
        let disc = c.branch_disc.unwrap();
        assert!(disc.rational_branches);

        let c = nc_certificate(&w, &pt(&[0, 0, 1, 0])).unwrap();
        assert_eq!(c.status, NCStatus::NotNormalCrossing);
        assert_eq!(c.tangent_cone_rank, 1);

        let c = nc_certificate(&p("X0*X2 - X1^2", 3), &pt(&[1, 0, 0])).unwrap();
        assert_eq!(c.status, NCStatus::Smooth);

        // node with irrational tangents: x^2 + y^2 = z^2 branches over Q(i)
        let c = nc_certificate(&p("X0^2*X2 + X1^2*X2 + X0^3", 3), &pt(&[0, 0, 1])).unwrap();
        assert_eq!(c.status, NCStatus::NormalCrossing);
        assert!(!c.branch_disc.unwrap().rational_branches);

        // triple point
        let c = nc_certificate(&p("X0^3 + X1^3 + X2^3", 4), &pt(&[0, 0, 0, 1])).unwrap();
        assert_eq!((c.status, c.multiplicity), (NCStatus::NotNormalCrossing, 3));

        assert!(matches!(
            nc_certificate(&w, &pt(&[1, 0, 0, 1])),
            Err(DivGeoError::NotOnDivisor { .. })
        ));
        assert!(matches!(nc_certificate(&w, &pt(&[0, 0, 0, 0])), Err(DivGeoError::ZeroPoint)));
    }

    #[test]
    fn sampling_examples() {
        let s = sample_assumption(&p(WHITNEY, 4), 10, 0).unwrap();
        assert!(!s.vacuous);
        assert!(s.passed());
        assert_eq!(s.normal_crossing, s.samples);
        assert!(s.samples >= 10);

        let s = sample_assumption(&p("X0*X3 - X1*X2", 4), 10, 0).unwrap();
        assert!(s.vacuous && s.samples == 0 && s.passed());

        let s = sample_assumption(&p("X0^3 + X1^3 + X2^3", 4), 10, 0).unwrap();
        assert!(s.vacuous);

        // plane curve with a cusp fails
        let s = sample_assumption(&p("X1^2*X2 - X0^3", 3), 4, 0).unwrap();
        assert!(!s.passed());
        assert_eq!(s.witnesses.len(), 1);
    }

    #[test]
    fn squarefree_forms_have_small_singular_locus() {
        for (f, n) in [(WHITNEY, 4), (NODAL, 3), ("X0*X1*X2", 3), ("X0*X3 - X1*X2", 4)] {
            let dim = singular_locus(&p(f, n)).unwrap().proj_profile().unwrap().dimension;
            assert!(dim <= n as i64 - 3);
        }
        let dim = singular_locus(&p("X0^2*X1", 3)).unwrap().proj_profile().unwrap().dimension;
        assert_eq!(dim, 1);
    }

    fn random_change(seed: u64, n: usize) -> (Vec<Polynomial>, Matrix) {
        let mut rng = random::seeded(seed);
        let m = random::invertible_matrix(&mut rng, n);
        (random::linear_maps(&m), m)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(5))]

        #[test]
        fn nc_status_is_coordinate_free(seed in any::<u64>()) {
            let catalog: [(&str, usize, &[i64]); 4] = [
                (WHITNEY, 4, &[0, 0, 1, 1]),
                (WHITNEY, 4, &[0, 0, 1, 0]),
                (NODAL, 3, &[0, 0, 1]),
                ("X0*X2 - X1^2", 3, &[1, 0, 0]),
            ];
            for (f, n, q) in catalog {
                let f = p(f, n);
                let q = pt(q);
                let before = nc_certificate(&f, &q).unwrap();
                // F' = F∘A vanishes at A^{-1} q
                let (maps, m) = random_change(seed, n);
                let g = f.compose(&maps).unwrap();
                let inv = linalg::inverse(&m).unwrap();
                let after = nc_certificate(&g, &linalg::mat_vec(&inv, &q)).unwrap();
                prop_assert_eq!(before.status, after.status);
                prop_assert_eq!(before.multiplicity, after.multiplicity);
                prop_assert_eq!(before.tangent_cone_rank, after.tangent_cone_rank);
            }
        }
    }
}
