//! Decision pipeline for a candidate pair (endomorphism, divisor).
//!
//! Invariance is decided exactly. For invariant divisors the degree of the
//! non-normal locus is compared with the threshold `(d-1)^2 - n(n-1)/2`;
//! cases settled only by known results from the literature are labelled
//! as such and never justified by computation.

use serde::Serialize;
use thiserror::Error;

use crate::divgeo::{self, AssumptionSample, DivGeoError, SingularityReport};
use crate::endo::{self, EndoError, Endomorphism, InvarianceCertificate, RamificationData};
use crate::idealeng::EngineConfig;
use crate::logchern::{self, C2Comparison, LogChernError};
use crate::polyring::{serde_scalar, Polynomial, Scalar};

/// `(d-1)^2 - n(n-1)/2`; `n(n-1)` is even, so this is an integer.
pub fn bound_threshold(n: i64, d: i64) -> i64 {
    (d - 1) * (d - 1) - n * (n - 1) / 2
}

/// Maximal number of singular points of an irreducible plane curve of degree `k`.
pub fn plane_curve_delta_bound(k: u64) -> u64 {
    if k < 3 {
        0
    } else {
        (k - 1) * (k - 2) / 2
    }
}

/// `(d-1)^2 >= n(n-1)/2`, i.e. an invariant prime divisor of degree `d`
/// cannot be normal.
pub fn normality_obstruction(n: i64, d: i64) -> bool {
    2 * (d - 1) * (d - 1) >= n * (n - 1)
}

/// A degree-`n` invariant prime divisor needs `deg Z > threshold(n, n)`,
/// while a generic plane section caps `deg Z` by the plane-curve bound.
pub fn degree_n_exclusion(n: i64) -> bool {
    bound_threshold(n, n) >= plane_curve_delta_bound(n as u64) as i64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ComputedHere,
    CitedExternal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    InvarianceTest,
    DegreeOne,
    DegreeNPlusOne,
    DegreeNDeltaBound,
    ChernBound,
    QuadricInP3,
    DegreeAboveNPlusOne,
    MissingNonNormalDegree,
}

impl Rule {
    pub fn provenance(self) -> Provenance {
        match self {
            Rule::DegreeNPlusOne | Rule::QuadricInP3 => Provenance::CitedExternal,
            _ => Provenance::ComputedHere,
        }
    }

    pub fn note(self) -> &'static str {
        match self {
            Rule::InvarianceTest => "F∘f = c·F^m decided by exact division",
            Rule::DegreeOne => "hyperplane",
            Rule::DegreeNPlusOne => "known result: no totally invariant prime divisor of degree n+1",
            Rule::DegreeNDeltaBound => {
                "threshold(n, n) equals the plane-curve bound; strictness excludes degree n (presumes a prime divisor)"
            }
            Rule::ChernBound => "deg Z must exceed (d-1)^2 - n(n-1)/2",
            Rule::QuadricInP3 => "known result: no totally invariant quadric surface in P^3",
            Rule::DegreeAboveNPlusOne => "no rule covers d > n+1",
            Rule::MissingNonNormalDegree => "deg Z not available",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FiredRule {
    pub rule: Rule,
    pub provenance: Provenance,
    pub note: &'static str,
}

impl From<Rule> for FiredRule {
    fn from(rule: Rule) -> Self {
        FiredRule {
            rule,
            provenance: rule.provenance(),
            note: rule.note(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CitedCase {
    DegreeNPlusOne,
    P3Quadric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "case")]
pub enum Conclusion {
    HyperplaneOk,
    NotInvariant,
    ContradictionByBound,
    ContradictionByDeltaBound,
    ExcludedByCitedResult(CitedCase),
    Inconclusive,
}

impl Conclusion {
    pub fn is_conclusive(self) -> bool {
        self != Conclusion::Inconclusive
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    General,
    /// The four-row table for surfaces in `P^3`.
    P3,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decision {
    pub conclusion: Conclusion,
    pub rules_fired: Vec<FiredRule>,
    #[serde(serialize_with = "serde_scalar::one")]
    pub threshold: Scalar,
    pub delta_bound: Option<u64>,
    pub comparison: Option<C2Comparison>,
}

/// The decision table alone, for a claimed pair `(n, d)` with known
/// invariance and optional `deg Z`.
pub fn decide(n: i64, d: i64, invariant: bool, deg_z: Option<u64>, table: Table) -> Decision {
    let mut out = Decision {
        conclusion: Conclusion::Inconclusive,
        rules_fired: vec![Rule::InvarianceTest.into()],
        threshold: Scalar::from_integer(bound_threshold(n, d).into()),
        delta_bound: None,
        comparison: None,
    };
    if !invariant {
        out.conclusion = Conclusion::NotInvariant;
        return out;
    }
    let mut fire = |rule: Rule, conclusion| {
        out.rules_fired.push(rule.into());
        out.conclusion = conclusion;
    };
    if d == 1 {
        fire(Rule::DegreeOne, Conclusion::HyperplaneOk);
    } else if d == n + 1 {
        fire(Rule::DegreeNPlusOne, Conclusion::ExcludedByCitedResult(CitedCase::DegreeNPlusOne));
    } else if d > n + 1 {
        fire(Rule::DegreeAboveNPlusOne, Conclusion::Inconclusive);
    } else if table == Table::P3 && n == 3 && d == 2 {
        fire(Rule::QuadricInP3, Conclusion::ExcludedByCitedResult(CitedCase::P3Quadric));
    } else if d == n {
        if degree_n_exclusion(n) {
            fire(Rule::DegreeNDeltaBound, Conclusion::ContradictionByDeltaBound);
        }
        out.delta_bound = Some(plane_curve_delta_bound(n as u64));
    } else {
        match deg_z {
            None => fire(Rule::MissingNonNormalDegree, Conclusion::Inconclusive),
            Some(z) => {
                let cmp = logchern::c2_comparison(n, d, z).expect("2 <= d <= n - 1");
                let violated = (z as i64) <= bound_threshold(n, d);
                debug_assert_eq!(violated, cmp.contradiction);
                out.comparison = Some(cmp);
                if violated {
                    fire(Rule::ChernBound, Conclusion::ContradictionByBound);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerdictError {
    #[error(transparent)]
    Endo(#[from] EndoError),
    #[error(transparent)]
    Geometry(#[from] DivGeoError),
    #[error(transparent)]
    Chern(#[from] LogChernError),
    #[error("the P^3 table needs n = 3, got n = {n}")]
    NotP3 { n: usize },
}

impl VerdictError {
    pub fn is_budget(&self) -> bool {
        match self {
            VerdictError::Endo(e) => e.is_budget(),
            VerdictError::Geometry(e) => e.is_budget(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalyzeConfig {
    pub seed: u64,
    pub trials: usize,
    pub iterate: Option<u32>,
    pub engine: EngineConfig,
    /// Replaces the computed `deg Z` in the decision.
    pub deg_z_override: Option<u64>,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig {
            seed: 0,
            trials: 16,
            iterate: None,
            engine: EngineConfig::default(),
            deg_z_override: None,
        }
    }
}

/// Intermediate results, filled in pipeline order.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Stages {
    pub invariance: Option<InvarianceCertificate>,
    pub ramification: Option<RamificationData>,
    pub singularity: Option<SingularityReport>,
    pub z_totally_invariant: Option<bool>,
    pub z_avoids_ramification: Option<bool>,
    pub sampling: Option<AssumptionSample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Invariance,
    Ramification,
    Singularity,
    ComponentInvariance,
    Avoidance,
    Sampling,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub invariant: bool,
    pub n: usize,
    pub d: u32,
    pub m: u32,
    /// Iterate of `f` that was analyzed.
    pub iterate: u32,
    pub deg_z: Option<u64>,
    pub deg_z_overridden: bool,
    #[serde(flatten)]
    pub decision: Decision,
    pub stages: Stages,
}

impl Verdict {
    pub fn conclusion(&self) -> Conclusion {
        self.decision.conclusion
    }
}

#[derive(Debug, Clone, Error)]
#[error("{stage:?} stage failed: {error}")]
pub struct AnalysisError {
    pub stage: Stage,
    pub error: VerdictError,
    pub partial: Stages,
}

fn at<T, E: Into<VerdictError>>(stage: Stage, stages: &Stages, r: Result<T, E>) -> Result<T, Box<AnalysisError>> {
    r.map_err(|e| {
        Box::new(AnalysisError {
            stage,
            error: e.into(),
            partial: stages.clone(),
        })
    })
}

pub fn analyze(f: &Endomorphism, form: &Polynomial, config: &AnalyzeConfig) -> Result<Verdict, Box<AnalysisError>> {
    run(f, form, config, Table::General)
}

/// The four-case table for `P^3`: hyperplanes, quadrics, cubics, quartics.
pub fn classify_p3(f: &Endomorphism, form: &Polynomial, config: &AnalyzeConfig) -> Result<Verdict, Box<AnalysisError>> {
    if f.n() != 3 {
        return Err(Box::new(AnalysisError {
            stage: Stage::Invariance,
            error: VerdictError::NotP3 { n: f.n() },
            partial: Stages::default(),
        }));
    }
    run(f, form, config, Table::P3)
}

fn run(f: &Endomorphism, form: &Polynomial, config: &AnalyzeConfig, table: Table) -> Result<Verdict, Box<AnalysisError>> {
    let l = config.iterate.unwrap_or(1).max(1);
    let g = if l > 1 { f.iterate(l) } else { f.clone() };
    let engine = &config.engine;
    let mut stages = Stages::default();

    let cert = at(
        Stage::Invariance,
        &stages,
        endo::is_totally_invariant_with(&g, form, engine),
    )?;
    let invariant = cert.is_invariant();
    stages.invariance = Some(cert);
    let n = g.n();
    let d = form.total_degree().expect("checked nonzero");

    let mut deg_z = None;
    if invariant {
        let ram = at(Stage::Ramification, &stages, endo::log_ramification(&g, form))?;
        stages.ramification = Some(ram.clone());
        if d >= 2 {
            let sing = at(
                Stage::Singularity,
                &stages,
                divgeo::nonnormal_degree_with(form, config.seed, engine),
            )?;
            deg_z = Some(sing.z_degree);
            let has_z = sing.sing_profile.dimension == n as i64 - 2 && sing.sing_profile.dimension >= 0;
            let z_ideal = sing.sing_ideal.clone();
            stages.singularity = Some(sing);
            if has_z {
                let inv = at(
                    Stage::ComponentInvariance,
                    &stages,
                    endo::is_totally_invariant_subvariety(&g, &z_ideal),
                )?;
                stages.z_totally_invariant = Some(inv);
                if ram.effective {
                    let avoids = at(Stage::Avoidance, &stages, endo::component_avoids_r(&ram, &z_ideal))?;
                    stages.z_avoids_ramification = Some(avoids);
                }
            }
            let sampling = at(
                Stage::Sampling,
                &stages,
                divgeo::sample_assumption_with(form, config.trials, config.seed, engine),
            )?;
            stages.sampling = Some(sampling);
        }
    }
    let used_z = config.deg_z_override.or(deg_z);
    let decision = decide(n as i64, d as i64, invariant, used_z, table);
    Ok(Verdict {
        invariant,
        n,
        d,
        m: g.m(),
        iterate: l,
        deg_z: used_z,
        deg_z_overridden: config.deg_z_override.is_some(),
        decision,
        stages,
    })
}
