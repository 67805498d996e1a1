//! Endomorphisms of projective space given by homogeneous forms.

use serde::Serialize;
use thiserror::Error;

use crate::idealeng::{EngineConfig, Ideal, IdealError, ProjectiveProfile};
use crate::polyring::{jacobian_det, serde_scalar, PolyError, Polynomial, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EndoError {
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error("expected {expected} forms in {expected} variables, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("form {index} is not homogeneous")]
    InhomogeneousForm { index: usize },
    #[error("forms have different degrees ({first} and {other} at index {index})")]
    DegreeMismatch { first: u32, other: u32, index: usize },
    #[error("forms have degree 0")]
    ConstantForms,
    #[error(
        "forms have a common zero: base locus of dimension {} and degree {}",
        .profile.dimension,
        .profile.degree
    )]
    BaseLocus {
        profile: ProjectiveProfile,
        /// Number of distinct base points when the base locus is finite.
        distinct_points: Option<u64>,
    },
    #[error("divisor is the zero polynomial")]
    ZeroDivisor,
    #[error("divisor is constant")]
    ConstantDivisor,
    #[error("divisor is not homogeneous")]
    InhomogeneousDivisor,
    #[error("divisor lives in {found} variables, expected {expected}")]
    DivisorArity { expected: usize, found: usize },
    #[error(
        "divisor is not squarefree: its singular locus has dimension {} > {}",
        .singular.dimension,
        .bound
    )]
    NotSquarefree { singular: ProjectiveProfile, bound: i64 },
    #[error("jacobian determinant vanishes identically")]
    DegenerateJacobian,
    #[error("ramification divisor is not effective (division {failed_stage} by the divisor failed)")]
    NotEffective { failed_stage: u32 },
}

impl From<PolyError> for EndoError {
    fn from(e: PolyError) -> Self {
        EndoError::Ideal(IdealError::Poly(e))
    }
}

impl EndoError {
    pub fn is_budget(&self) -> bool {
        matches!(self, EndoError::Ideal(e) if e.is_budget())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Endomorphism {
    n: usize,
    m: u32,
    forms: Vec<Polynomial>,
}

impl Endomorphism {
    pub fn validate(forms: Vec<Polynomial>) -> Result<Self, EndoError> {
        Self::validate_with(forms, &EngineConfig::default())
    }

    /// Checks arity, a common degree `m >= 1` and an empty base locus.
    pub fn validate_with(forms: Vec<Polynomial>, config: &EngineConfig) -> Result<Self, EndoError> {
        let expected = forms.first().map_or(0, Polynomial::num_vars);
        if forms.len() < 2 || forms.iter().any(|f| f.num_vars() != forms.len()) {
            return Err(EndoError::Arity {
                expected: expected.max(2),
                found: forms.len(),
            });
        }
        let mut degree = None;
        for (index, f) in forms.iter().enumerate() {
            let d = f
                .is_homogeneous()
                .filter(|_| !f.is_zero())
                .ok_or(EndoError::InhomogeneousForm { index })?;
            match degree {
                None => degree = Some(d),
                Some(first) if first != d => {
                    return Err(EndoError::DegreeMismatch {
                        first,
                        other: d,
                        index,
                    })
                }
                _ => {}
            }
        }
        let m = degree.expect("at least two forms");
        if m == 0 {
            return Err(EndoError::ConstantForms);
        }
        let base = Ideal::new(forms.len(), forms.clone()).with_config(*config);
        let profile = base.proj_profile()?;
        if !profile.is_empty() {
            let distinct_points = match profile.dimension {
                0 => Some(base.count_distinct_points(0)?.count),
                _ => None,
            };
            return Err(EndoError::BaseLocus {
                profile,
                distinct_points,
            });
        }
        Ok(Endomorphism {
            n: forms.len() - 1,
            m,
            forms,
        })
    }

    /// Coordinate power map `X_i -> X_i^m` on `P^n`.
    pub fn power_map(n: usize, m: u32) -> Self {
        let nv = n + 1;
        Endomorphism {
            n,
            m,
            forms: (0..nv).map(|i| Polynomial::var(nv, i).pow(m)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn forms(&self) -> &[Polynomial] {
        &self.forms
    }

    /// `f^l`, with `f^l_i = f_i(f^{l-1})`.
    pub fn iterate(&self, l: u32) -> Endomorphism {
        assert!(l >= 1, "iterate count must be positive");
        let mut out = self.clone();
        for _ in 1..l {
            out = Endomorphism {
                n: self.n,
                m: out.m * self.m,
                forms: self
                    .forms
                    .iter()
                    .map(|g| g.compose(&out.forms).expect("arity checked"))
                    .collect(),
            };
        }
        out
    }

    /// `F ∘ f`.
    pub fn pullback(&self, form: &Polynomial) -> Result<Polynomial, EndoError> {
        Ok(form.compose(&self.forms)?)
    }

    /// Rescales every form by `c`.
    pub fn scaled(&self, c: &Scalar) -> Endomorphism {
        Endomorphism {
            n: self.n,
            m: self.m,
            forms: self.forms.iter().map(|g| g.scale(c)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum InvarianceCertificate {
    /// `F ∘ f = scalar * F^m`.
    Invariant {
        #[serde(serialize_with = "serde_scalar::one")]
        scalar: Scalar,
    },
    /// Division number `stage` (1-based) of `F ∘ f` by `F` left a remainder.
    DivisionFailed { stage: u32 },
    NonConstantQuotient { quotient: Polynomial },
}

impl InvarianceCertificate {
    pub fn is_invariant(&self) -> bool {
        matches!(self, InvarianceCertificate::Invariant { .. })
    }

    pub fn scalar(&self) -> Option<&Scalar> {
        match self {
            InvarianceCertificate::Invariant { scalar } => Some(scalar),
            _ => None,
        }
    }
}

/// Degree of a homogeneous, nonconstant divisor in the ring of `f`.
pub(crate) fn check_divisor(n: usize, form: &Polynomial) -> Result<u32, EndoError> {
    if form.num_vars() != n + 1 {
        return Err(EndoError::DivisorArity {
            expected: n + 1,
            found: form.num_vars(),
        });
    }
    if form.is_zero() {
        return Err(EndoError::ZeroDivisor);
    }
    let d = form.is_homogeneous().ok_or(EndoError::InhomogeneousDivisor)?;
    if d == 0 {
        return Err(EndoError::ConstantDivisor);
    }
    Ok(d)
}

/// Squarefree in characteristic 0 iff the singular locus has codimension
/// at least two in `P^n`.
pub fn check_squarefree(n: usize, form: &Polynomial, config: &EngineConfig) -> Result<ProjectiveProfile, EndoError> {
    check_divisor(n, form)?;
    let singular = Ideal::new(n + 1, form.gradient()).with_config(*config).proj_profile()?;
    let bound = n as i64 - 2;
    if singular.dimension > bound {
        return Err(EndoError::NotSquarefree { singular, bound });
    }
    Ok(singular)
}

pub fn is_totally_invariant(f: &Endomorphism, form: &Polynomial) -> Result<InvarianceCertificate, EndoError> {
    is_totally_invariant_with(f, form, &EngineConfig::default())
}

/// Decides `F ∘ f = c F^m` by `m` exact divisions and a constancy check.
pub fn is_totally_invariant_with(
    f: &Endomorphism,
    form: &Polynomial,
    config: &EngineConfig,
) -> Result<InvarianceCertificate, EndoError> {
    check_squarefree(f.n, form, config)?;
    let mut rest = f.pullback(form)?;
    for stage in 1..=f.m {
        match rest.exact_divide(form)? {
            Some(q) => rest = q,
            None => return Ok(InvarianceCertificate::DivisionFailed { stage }),
        }
    }
    Ok(match rest.constant_value() {
        Some(scalar) => InvarianceCertificate::Invariant { scalar },
        None => InvarianceCertificate::NonConstantQuotient { quotient: rest },
    })
}

/// Whether `f^{-1}(V(I)) = V(I)` as sets, by radical membership of
/// generators in both directions.
pub fn is_totally_invariant_subvariety(f: &Endomorphism, ideal: &Ideal) -> Result<bool, EndoError> {
    if !ideal.is_homogeneous() {
        return Err(IdealError::Inhomogeneous.into());
    }
    if ideal.num_vars() != f.n + 1 {
        return Err(EndoError::DivisorArity {
            expected: f.n + 1,
            found: ideal.num_vars(),
        });
    }
    let pulled = ideal.compose(&f.forms)?;
    for g in pulled.generators() {
        if !ideal.radical_member(g)? {
            return Ok(false);
        }
    }
    for g in ideal.generators() {
        if !pulled.radical_member(g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RamificationData {
    pub jac: Polynomial,
    /// Largest `a` with `F^a` dividing `jac`.
    pub divisor_multiplicity: u32,
    /// `jac / F^(m-1)` when that division is exact.
    pub log_residual: Option<Polynomial>,
    pub effective: bool,
    /// First of the `m - 1` divisions that failed.
    pub failed_stage: Option<u32>,
}

impl RamificationData {
    pub fn residual_degree(&self) -> Option<u32> {
        self.log_residual.as_ref().and_then(Polynomial::total_degree)
    }
}

/// Jacobian determinant of `f` with the divisor removed `m - 1` times.
pub fn log_ramification(f: &Endomorphism, form: &Polynomial) -> Result<RamificationData, EndoError> {
    check_divisor(f.n, form)?;
    let jac = jacobian_det(&f.forms)?;
    if jac.is_zero() {
        return Err(EndoError::DegenerateJacobian);
    }
    let mut multiplicity = 0;
    let mut rest = jac.clone();
    let mut log_residual = None;
    if f.m == 1 {
        log_residual = Some(jac.clone());
    }
    while let Some(q) = rest.exact_divide(form)? {
        multiplicity += 1;
        rest = q;
        if multiplicity == f.m - 1 {
            log_residual = Some(rest.clone());
        }
    }
    let effective = multiplicity + 1 >= f.m;
    Ok(RamificationData {
        jac,
        divisor_multiplicity: multiplicity,
        log_residual,
        effective,
        failed_stage: (!effective).then_some(multiplicity + 1),
    })
}

/// True iff the residual does not vanish identically on `V(Z)`.
pub fn component_avoids_r(ram: &RamificationData, z: &Ideal) -> Result<bool, EndoError> {
    let residual = match (&ram.log_residual, ram.failed_stage) {
        (Some(r), _) => r,
        (None, stage) => {
            return Err(EndoError::NotEffective {
                failed_stage: stage.unwrap_or(1),
            })
        }
    };
    Ok(!z.radical_member(residual)?)
}
