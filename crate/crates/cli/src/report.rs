//! Serializable report shapes. Field order is fixed, so output is
//! byte-identical for fixed input, seed and version unless timing is on.

use std::fmt::Write as _;
use std::time::Instant;

use invdiv_core::endo::Endomorphism;
use invdiv_core::logchern::{self, C2Comparison, C2LogTwist, ChernParams, LogSectionMatrix};
use invdiv_core::polyring::{MonomialOrder, Polynomial};
use invdiv_core::verdict::{self, AnalyzeConfig, Decision, Stage, Stages, Verdict};
use serde::Serialize;

use crate::problem::Echo;
use crate::{to_json, ExitStatus, Outcome, SCHEMA_VERSION, VERSION};

#[derive(Debug, Clone, Serialize)]
pub struct Validation {
    pub n: usize,
    pub m: u32,
    /// `m^n`.
    pub map_degree: String,
}

impl From<Endomorphism> for Validation {
    fn from(f: Endomorphism) -> Self {
        let deg = num_traits::pow(num_bigint::BigUint::from(f.m()), f.n());
        Validation {
            n: f.n(),
            m: f.m(),
            map_degree: deg.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParseReport {
    pub schema_version: u32,
    pub version: &'static str,
    pub command: &'static str,
    pub echo: Echo,
    pub validation: Option<Validation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub seed: u64,
    pub trials: usize,
    pub iterate: Option<u32>,
    pub order: &'static str,
    pub modular_probe: bool,
    pub max_basis: Option<usize>,
    pub max_coeff_bits: Option<u64>,
    pub deg_z_override: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChernStage {
    pub params: ChernParams,
    pub c2_log_twist: C2LogTwist,
    pub c2_pullback_restricted: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ReportStages {
    pub validation: Option<Validation>,
    #[serde(flatten)]
    pub pipeline: Stages,
    pub chern: Option<ChernStage>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictView {
    pub invariant: bool,
    pub n: usize,
    pub d: u32,
    pub m: u32,
    pub iterate: u32,
    pub deg_z: Option<u64>,
    pub deg_z_overridden: bool,
    #[serde(flatten)]
    pub decision: Decision,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Seeds {
    pub base: u64,
    pub section: Option<u64>,
    pub section_attempts: Option<u32>,
    pub sampling: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorInfo {
    pub stage: &'static str,
    pub kind: &'static str,
    pub message: String,
}

impl ErrorInfo {
    pub fn new(stage: &'static str, message: &str, budget: bool) -> Self {
        ErrorInfo {
            stage,
            kind: if budget { "budget" } else { "error" },
            message: message.to_string(),
        }
    }
}

pub fn stage_name(stage: Stage) -> &'static str {
    match stage {
        Stage::Invariance => "invariance",
        Stage::Ramification => "ramification",
        Stage::Singularity => "singularity",
        Stage::ComponentInvariance => "component_invariance",
        Stage::Avoidance => "avoidance",
        Stage::Sampling => "sampling",
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub schema_version: u32,
    pub version: &'static str,
    pub command: &'static str,
    pub echo: Echo,
    pub settings: Settings,
    pub stages: ReportStages,
    pub verdict: Option<VerdictView>,
    pub error: Option<ErrorInfo>,
    pub seeds: Seeds,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl AnalyzeReport {
    pub fn new(command: &'static str, echo: Echo, config: &AnalyzeConfig) -> Self {
        let limits = config.engine.limits;
        AnalyzeReport {
            schema_version: SCHEMA_VERSION,
            version: VERSION,
            command,
            echo,
            settings: Settings {
                seed: config.seed,
                trials: config.trials,
                iterate: config.iterate,
                order: match config.engine.order {
                    MonomialOrder::Lex => "lex",
                    _ => "grevlex",
                },
                modular_probe: config.engine.modular_probe.is_some(),
                max_basis: limits.max_basis,
                max_coeff_bits: limits.max_coeff_bits,
                deg_z_override: config.deg_z_override,
            },
            stages: ReportStages::default(),
            verdict: None,
            error: None,
            seeds: Seeds {
                base: config.seed,
                ..Seeds::default()
            },
            exit_code: 0,
            timing_ms: None,
        }
    }

    pub fn record(&mut self, v: &Verdict) {
        self.stages.pipeline = v.stages.clone();
        if let Some(s) = &v.stages.singularity {
            self.seeds.section = Some(s.section_seed);
            self.seeds.section_attempts = Some(s.section_attempts);
        }
        self.seeds.sampling = v.stages.sampling.as_ref().map(|s| s.seed);
    }

    pub fn set_verdict(&mut self, v: Verdict) {
        self.verdict = Some(VerdictView {
            invariant: v.invariant,
            n: v.n,
            d: v.d,
            m: v.m,
            iterate: v.iterate,
            deg_z: v.deg_z,
            deg_z_overridden: v.deg_z_overridden,
            decision: v.decision,
        });
    }

    pub fn finish(mut self, start: Instant, timing: bool, status: ExitStatus) -> Outcome {
        self.exit_code = status.code();
        if timing {
            self.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        }
        let stderr = match &self.error {
            Some(e) => format!("error ({} stage): {}\n", e.stage, e.message),
            None => String::new(),
        };
        Outcome {
            stdout: to_json(&self),
            stderr,
            status,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RankReport {
    pub schema_version: u32,
    pub version: &'static str,
    pub command: &'static str,
    pub divisor: Polynomial,
    pub on_divisor: bool,
    pub matrix: LogSectionMatrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub schema_version: u32,
    pub version: &'static str,
    pub command: &'static str,
    pub n: i64,
    pub d: i64,
    pub deg_z: Option<u64>,
    pub threshold: String,
    /// Plane-curve bound for degree `d`, a cap on `deg Z` for prime divisors.
    pub delta_cap: u64,
    pub normality_obstruction: bool,
    pub degree_n_exclusion: Option<bool>,
    pub comparison: Option<C2Comparison>,
    /// `deg Z` values for which the comparison fails.
    pub contradiction_range: String,
    pub verdict: String,
}

impl BoundReport {
    pub fn new(n: i64, d: i64, deg_z: Option<u64>) -> Self {
        let t = verdict::bound_threshold(n, d);
        let cap = verdict::plane_curve_delta_bound(d as u64);
        let applicable = d <= n;
        let comparison = match deg_z {
            Some(z) if applicable => logchern::c2_comparison(n, d, z).ok(),
            _ => None,
        };
        let contradiction_range = if !applicable {
            "not applicable".to_string()
        } else if t < 0 {
            "vacuous".to_string()
        } else {
            format!("deg Z <= {t}")
        };
        let verdict = if !applicable {
            format!("not applicable (d > n = {n})")
        } else if let Some(c) = &comparison {
            if c.contradiction { "contradiction" } else { "no contradiction" }.to_string()
        } else if (cap as i64) <= t {
            format!("contradiction (deg Z <= delta cap {cap} <= threshold {t})")
        } else if t < 0 {
            "vacuous".to_string()
        } else {
            format!("contradiction only for deg Z <= {t}")
        };
        BoundReport {
            schema_version: SCHEMA_VERSION,
            version: VERSION,
            command: "bound",
            n,
            d,
            deg_z,
            threshold: t.to_string(),
            delta_cap: cap,
            normality_obstruction: verdict::normality_obstruction(n, d),
            degree_n_exclusion: (d == n).then(|| verdict::degree_n_exclusion(n)),
            comparison,
            contradiction_range,
            verdict,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut row = |k: &str, v: String| {
            let _ = writeln!(s, "{k:<24}{v}");
        };
        row("n", self.n.to_string());
        row("d", self.d.to_string());
        if let Some(z) = self.deg_z {
            row("deg Z", z.to_string());
        }
        row("threshold", self.threshold.clone());
        row("delta cap", self.delta_cap.to_string());
        row("normality obstruction", self.normality_obstruction.to_string());
        if let Some(x) = self.degree_n_exclusion {
            row("degree-n exclusion", x.to_string());
        }
        if let Some(c) = &self.comparison {
            row("lhs (coeffs in m)", format!("{:?}", c.lhs_m_poly));
            row("rhs (coeffs in m)", format!("{:?}", c.rhs_m_poly));
            row("leading equality", c.leading_equality.to_string());
            row("m^(n-1) coefficient", c.strictness_coefficient.to_string());
        }
        row("contradiction range", self.contradiction_range.clone());
        row("verdict", self.verdict.clone());
        s
    }
}
