//! Problem files: JSON with polynomial strings in `n + 1` variables.

use std::path::Path;

use invdiv_core::polyring::{parse_poly, PolyError, Polynomial};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_basis: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_coeff_bits: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    #[serde(default)]
    pub endomorphism: Option<Vec<String>>,
    #[serde(default)]
    pub divisor: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub iterate: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub file: ProblemFile,
    pub endomorphism: Option<Vec<Polynomial>>,
    pub divisor: Option<Polynomial>,
}

/// Canonical form of the input, as echoed in reports.
#[derive(Debug, Clone, Serialize)]
pub struct Echo {
    pub n: usize,
    pub endomorphism: Option<Vec<Polynomial>>,
    pub divisor: Option<Polynomial>,
    pub seed: u64,
    pub budgets: Budgets,
    pub iterate: Option<u32>,
}

impl Problem {
    pub fn load(path: &Path) -> Result<Problem, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Problem::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Problem, CliError> {
        let file: ProblemFile = serde_json::from_str(text).map_err(|e| CliError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if file.n < 1 {
            return Err(CliError::Invalid("n must be at least 1".into()));
        }
        let nv = file.n + 1;
        let parse = |field: String, s: &str| {
            parse_poly(s, nv).map_err(|e| locate(text, field, s, e))
        };
        let endomorphism = match &file.endomorphism {
            None => None,
            Some(forms) => {
                if forms.len() != nv {
                    return Err(CliError::Invalid(format!(
                        "arity mismatch: endomorphism of P^{} needs {nv} forms, found {}",
                        file.n,
                        forms.len()
                    )));
                }
                Some(
                    forms
                        .iter()
                        .enumerate()
                        .map(|(i, s)| parse(format!("endomorphism[{i}]"), s))
                        .collect::<Result<Vec<_>, _>>()?,
                )
            }
        };
        let divisor = file
            .divisor
            .as_deref()
            .map(|s| parse("divisor".into(), s))
            .transpose()?;
        Ok(Problem {
            file,
            endomorphism,
            divisor,
        })
    }

    pub fn echo(&self) -> Echo {
        Echo {
            n: self.file.n,
            endomorphism: self.endomorphism.clone(),
            divisor: self.divisor.clone(),
            seed: self.file.seed,
            budgets: self.file.budgets.clone(),
            iterate: self.file.iterate,
        }
    }
}

/// Maps an error inside a polynomial string to a line and column of the file.
fn locate(text: &str, field: String, s: &str, e: PolyError) -> CliError {
    let PolyError::Parse(pe) = &e else {
        return CliError::Polynomial {
            field,
            line: None,
            column: None,
            message: e.to_string(),
        };
    };
    let quoted = serde_json::to_string(s).expect("string serializes");
    let (line, column) = match text.find(&quoted) {
        // positions are exact when the literal has no escapes
        Some(offset) if quoted.len() == s.len() + 2 => {
            let start = offset + 1 + s.char_indices().nth(pe.position).map_or(s.len(), |(b, _)| b);
            let before = &text[..start];
            let line = before.matches('\n').count() + 1;
            let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
            (Some(line), Some(column))
        }
        _ => (None, None),
    };
    CliError::Polynomial {
        field,
        line,
        column,
        message: pe.message.clone(),
    }
}
