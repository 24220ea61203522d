//! Folding mass files with a named rule under the acceptability checks.

use serde::{Deserialize, Serialize};

use reid_core::belief::as_probability;
use reid_core::combination::{combine_many_traced, rule_by_name, Clause, CombinationError};
use reid_core::compatibility::TrueProbability;

use crate::error::CliError;
use crate::massfile::SetFunctionFile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CombineReport {
    Combined {
        rule: String,
        mass: SetFunctionFile,
        /// Nonspecificity after each fold step.
        nonspecificity_trace: Vec<f64>,
        /// Present when the result carries all its mass on singletons.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        probability: Option<Vec<f64>>,
    },
    Failed {
        rule: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        step: Option<usize>,
        clause: String,
        message: String,
    },
}

impl CombineReport {
    pub fn is_failure(&self) -> bool {
        matches!(self, CombineReport::Failed { .. })
    }
}

fn clause_name(e: &CombinationError) -> &'static str {
    match e.root() {
        CombinationError::InputIncompatible { .. } => "input_compatibility",
        CombinationError::Conflict { .. } => "conflict",
        CombinationError::TotalConflict => "total_conflict",
        CombinationError::InvalidOutput(_) => "valid_mass",
        CombinationError::Unacceptable(Clause::Compatibility { .. }) => "compatibility",
        CombinationError::Unacceptable(Clause::Nonspecificity { .. }) => "nonspecificity",
        CombinationError::FrameMismatch => "frame",
        CombinationError::TooFewInputs(_) => "inputs",
        CombinationError::AtStep { .. } => unreachable!("root strips step annotations"),
    }
}

/// `truth` must be a mass file whose focal sets are singletons.
pub fn combine_files(
    masses: &[SetFunctionFile],
    truth: &SetFunctionFile,
    rule: &str,
    allow_normalization: bool,
) -> Result<CombineReport, CliError> {
    let combiner = rule_by_name(rule).ok_or_else(|| CliError::Config(format!("unknown rule `{rule}`")))?;
    if rule == "dempster" && !allow_normalization {
        return Err(CliError::Config(
            "the dempster rule renormalizes conflict away; pass --allow-normalization to use it".into(),
        ));
    }
    if masses.len() < 2 {
        return Err(CliError::Config(format!("need at least two mass files, got {}", masses.len())));
    }
    let truth_mass = truth.to_mass().map_err(|e| CliError::Config(format!("truth file: {e}")))?;
    let p = as_probability(&truth_mass)
        .ok_or_else(|| CliError::Config("truth file must put all mass on singletons".into()))?;
    let p = TrueProbability::stated(p);
    let mut inputs = Vec::with_capacity(masses.len());
    for (k, file) in masses.iter().enumerate() {
        let m = file.to_mass().map_err(|e| CliError::Config(format!("mass file {}: {e}", k + 1)))?;
        if m.frame() != p.frame() {
            return Err(CliError::Config(format!("mass file {} has a different frame", k + 1)));
        }
        inputs.push(m);
    }
    Ok(match combine_many_traced(combiner.as_ref(), &inputs, &p) {
        Ok(out) => CombineReport::Combined {
            rule: rule.to_owned(),
            probability: as_probability(&out.mass).map(|d| d.values().to_vec()),
            mass: SetFunctionFile::from_mass(&out.mass),
            nonspecificity_trace: out.nonspecificity_trace,
        },
        Err(e) => CombineReport::Failed {
            rule: rule.to_owned(),
            step: e.step(),
            clause: clause_name(&e).to_owned(),
            message: e.root().to_string(),
        },
    })
}
