//! JSON mass and belief files:
//! `{"frame": [labels], "assignments": [{"subset": [labels], "value": x}]}`.
//!
//! `kind` defaults to `"mass"`. For `"belief"` the assignments list `Bel(A)`;
//! subsets not listed have belief 0.

use std::path::Path;

use serde::{Deserialize, Serialize};

use reid_core::belief::{validate_belief, validate_mass, MassAssignment, MonotonicityCheck, Violation};
use reid_core::frame::{Frame, SubsetMask};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    #[default]
    Mass,
    Belief,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub subset: Vec<String>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetFunctionFile {
    #[serde(default, skip_serializing_if = "is_mass")]
    pub kind: Kind,
    pub frame: Vec<String>,
    pub assignments: Vec<Assignment>,
}

fn is_mass(kind: &Kind) -> bool {
    *kind == Kind::Mass
}

impl SetFunctionFile {
    pub fn from_mass(m: &MassAssignment) -> Self {
        let frame = m.frame();
        Self {
            kind: Kind::Mass,
            frame: frame.labels().to_vec(),
            assignments: m
                .focal_elements()
                .map(|(s, value)| Assignment {
                    subset: frame.subset_labels(s),
                    value,
                })
                .collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))
    }

    pub fn frame(&self) -> Result<Frame, String> {
        Frame::new(self.frame.iter().cloned()).map_err(|e| e.to_string())
    }

    /// Dense values over the frame's lattice.
    pub fn dense(&self) -> Result<(Frame, Vec<f64>), String> {
        let frame = self.frame()?;
        let mut values = vec![0.0; frame.lattice_len()];
        let mut seen = vec![false; frame.lattice_len()];
        for a in &self.assignments {
            let s: SubsetMask = frame.subset_from_labels(&a.subset).map_err(|e| e.to_string())?;
            if std::mem::replace(&mut seen[s.index()], true) {
                return Err(format!("subset {:?} assigned twice", a.subset));
            }
            values[s.index()] = a.value;
        }
        Ok((frame, values))
    }

    /// Validation violations; empty when the file is a valid mass or belief.
    pub fn validate(&self) -> Result<Vec<Violation>, String> {
        let (frame, values) = self.dense()?;
        let report = match self.kind {
            Kind::Mass => validate_mass(&frame, &values),
            Kind::Belief => validate_belief(&frame, &values, MonotonicityCheck::Mobius),
        }
        .map_err(|e| e.to_string())?;
        Ok(report.violations)
    }

    pub fn to_mass(&self) -> Result<MassAssignment, String> {
        if self.kind != Kind::Mass {
            return Err("expected a mass file".into());
        }
        let (frame, values) = self.dense()?;
        MassAssignment::new(frame, values).map_err(|e| e.to_string())
    }
}
