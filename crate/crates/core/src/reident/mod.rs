//! Tabular microdata, generalization masking and candidate-set
//! re-identification.
//!
//! Records are identified by their 0-based position in the table; two equal
//! rows are still two records.

mod attack;
mod noise;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::BeliefError;
use crate::combination::CombinationError;
use crate::frame::{Frame, FrameError};

pub use attack::{
    adversarial_missing_record, candidate_set, candidate_set_in, reidentify_belief, reidentify_prob,
    true_probability, true_probability_in, AuxiliaryInfo, CandidateSet, Evidence,
};
pub use noise::{
    draw_noise, n3_forward_distribution, n3_posterior, n3_posterior_given_alpha, n3_proposition_truth, n3_reident_belief, n3_scenario,
    noise_mask_n3, N3Record, N3Scenario,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReidentError {
    #[error("a table needs at least one record")]
    EmptyTable,
    #[error("a table needs at least one attribute")]
    NoAttributes,
    #[error("row {row} has {got} cells, expected {expected}")]
    Ragged { row: usize, expected: usize, got: usize },
    #[error("duplicate attribute `{0}`")]
    DuplicateAttribute(String),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("no generalizer for attribute `{0}`")]
    MissingGeneralizer(String),
    #[error("attribute `{attribute}`: {reason}")]
    BadGeneralizer { attribute: String, reason: String },
    #[error("attribute `{attribute}`: value `{value}` is not covered by the generalization")]
    Uncovered { attribute: String, value: String },
    #[error("masked row has {got} cells, expected {expected}")]
    RowLength { expected: usize, got: usize },
    #[error("attribute subsets must be non-empty")]
    EmptyAttributeSubset,
    #[error("attribute subset {mask:#b} refers to attributes beyond the {count} available")]
    AttributeOutOfRange { mask: u32, count: usize },
    #[error("no record can produce the masked row under the declared generalization")]
    EmptyCandidateSet,
    #[error("record {0} is not in the candidate set")]
    NotACandidate(usize),
    #[error("candidate set has {0} records; at least 2 are needed")]
    CandidateSetTooSmall(usize),
    #[error("noise flag alpha must be 0 or 1, got {0}")]
    AlphaOutOfRange(u8),
    #[error("noise coordinate beta must be 1, 2 or 3, got {0}")]
    BetaOutOfRange(u8),
    #[error("required preimage record {0:?} is absent from the table")]
    MissingPreimage(N3Record),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Combination(#[from] CombinationError),
}

/// A cell value: an integer or a category label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Cat(String),
}

impl Value {
    /// Integers where the text parses as one, category labels otherwise.
    pub fn parse(text: &str) -> Value {
        text.parse().map(Value::Int).unwrap_or_else(|_| Value::Cat(text.to_owned()))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Cat(s) => f.write_str(s),
        }
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Cat(v.to_owned())
    }
}

/// The original microdata `X`: rows are records, columns attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    attributes: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(attributes: Vec<String>, rows: Vec<Vec<Value>>) -> Result<Self, ReidentError> {
        if attributes.is_empty() {
            return Err(ReidentError::NoAttributes);
        }
        if attributes.len() > 32 {
            return Err(ReidentError::AttributeOutOfRange { mask: u32::MAX, count: attributes.len() });
        }
        if rows.is_empty() {
            return Err(ReidentError::EmptyTable);
        }
        for (i, a) in attributes.iter().enumerate() {
            if attributes[..i].contains(a) {
                return Err(ReidentError::DuplicateAttribute(a.clone()));
            }
        }
        for (row, cells) in rows.iter().enumerate() {
            if cells.len() != attributes.len() {
                return Err(ReidentError::Ragged {
                    row,
                    expected: attributes.len(),
                    got: cells.len(),
                });
            }
        }
        Ok(Self { attributes, rows })
    }

    /// Single-column convenience constructor.
    pub fn single_column(attribute: &str, values: impl IntoIterator<Item = Value>) -> Result<Self, ReidentError> {
        Self::new(vec![attribute.to_owned()], values.into_iter().map(|v| vec![v]).collect())
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn n_records(&self) -> usize {
        self.rows.len()
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Value] {
        &self.rows[i]
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a == name)
    }

    /// The record frame, labelled by position. Fails beyond the dense capacity.
    pub fn frame(&self) -> Result<Frame, FrameError> {
        Frame::indexed(self.n_records())
    }
}

/// Closed integer interval, rendered as `[lo,hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn label(&self) -> String {
        format!("[{},{}]", self.lo, self.hi)
    }
}

/// Named group of category labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryGroup {
    pub label: String,
    pub members: Vec<String>,
}

/// Per-attribute generalization `gen_V`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generalizer {
    /// Publishes values unchanged.
    Identity,
    /// Integer values to the disjoint interval containing them.
    Intervals(Vec<Interval>),
    /// Category labels to the group containing them.
    Groups(Vec<CategoryGroup>),
}

impl Generalizer {
    /// Generalization label for a value, or `None` if uncovered.
    pub fn generalize(&self, value: &Value) -> Option<String> {
        match (self, value) {
            (Generalizer::Identity, v) => Some(v.to_string()),
            (Generalizer::Intervals(ivs), Value::Int(v)) => ivs.iter().find(|iv| iv.contains(*v)).map(Interval::label),
            (Generalizer::Intervals(_), Value::Cat(_)) => None,
            (Generalizer::Groups(groups), v) => {
                let text = v.to_string();
                groups
                    .iter()
                    .find(|g| g.members.iter().any(|m| *m == text))
                    .map(|g| g.label.clone())
            }
        }
    }

    fn check(&self) -> Result<(), String> {
        match self {
            Generalizer::Identity => Ok(()),
            Generalizer::Intervals(ivs) => {
                if ivs.is_empty() {
                    return Err("no intervals".into());
                }
                for iv in ivs {
                    if iv.lo > iv.hi {
                        return Err(format!("interval {} has lo > hi", iv.label()));
                    }
                }
                let mut sorted = ivs.clone();
                sorted.sort_by_key(|iv| iv.lo);
                for w in sorted.windows(2) {
                    if w[1].lo <= w[0].hi {
                        return Err(format!("intervals {} and {} overlap", w[0].label(), w[1].label()));
                    }
                }
                Ok(())
            }
            Generalizer::Groups(groups) => {
                if groups.is_empty() {
                    return Err("no category groups".into());
                }
                let mut seen: Vec<&str> = Vec::new();
                for (i, g) in groups.iter().enumerate() {
                    if groups[..i].iter().any(|h| h.label == g.label) {
                        return Err(format!("duplicate group label `{}`", g.label));
                    }
                    for m in &g.members {
                        if seen.contains(&m.as_str()) {
                            return Err(format!("category `{m}` appears in two groups"));
                        }
                        seen.push(m);
                    }
                }
                Ok(())
            }
        }
    }
}

/// One generalizer per attribute, keyed by attribute name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizationScheme {
    entries: Vec<(String, Generalizer)>,
}

impl GeneralizationScheme {
    pub fn new<I, S>(entries: I) -> Result<Self, ReidentError>
    where
        I: IntoIterator<Item = (S, Generalizer)>,
        S: Into<String>,
    {
        let entries: Vec<(String, Generalizer)> = entries.into_iter().map(|(a, g)| (a.into(), g)).collect();
        for (i, (attribute, g)) in entries.iter().enumerate() {
            if entries[..i].iter().any(|(a, _)| a == attribute) {
                return Err(ReidentError::DuplicateAttribute(attribute.clone()));
            }
            g.check().map_err(|reason| ReidentError::BadGeneralizer {
                attribute: attribute.clone(),
                reason,
            })?;
        }
        Ok(Self { entries })
    }

    /// Identity generalization on every attribute of `table`.
    pub fn identity(table: &Table) -> Self {
        Self {
            entries: table.attributes().iter().map(|a| (a.clone(), Generalizer::Identity)).collect(),
        }
    }

    pub fn get(&self, attribute: &str) -> Option<&Generalizer> {
        self.entries.iter().find(|(a, _)| a == attribute).map(|(_, g)| g)
    }

    /// Generalizers aligned with the table's columns.
    pub fn aligned(&self, table: &Table) -> Result<Vec<&Generalizer>, ReidentError> {
        for (a, _) in &self.entries {
            if table.attribute_index(a).is_none() {
                return Err(ReidentError::UnknownAttribute(a.clone()));
            }
        }
        table
            .attributes()
            .iter()
            .map(|a| self.get(a).ok_or_else(|| ReidentError::MissingGeneralizer(a.clone())))
            .collect()
    }
}

/// The protected table `Y = ρ(X)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedTable {
    attributes: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl MaskedTable {
    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[String] {
        &self.rows[i]
    }

    pub fn n_records(&self) -> usize {
        self.rows.len()
    }
}

/// Applies each attribute's generalizer cellwise.
pub fn mask_generalize(x: &Table, scheme: &GeneralizationScheme) -> Result<MaskedTable, ReidentError> {
    let gens = scheme.aligned(x)?;
    let rows = x
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .zip(&gens)
                .zip(x.attributes())
                .map(|((v, g), a)| {
                    g.generalize(v).ok_or_else(|| ReidentError::Uncovered {
                        attribute: a.clone(),
                        value: v.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MaskedTable {
        attributes: x.attributes().to_vec(),
        rows,
    })
}

/// A non-empty subset of attribute positions, as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AttributeSubset(u32);

impl AttributeSubset {
    pub fn new(mask: u32, n_attributes: usize) -> Result<Self, ReidentError> {
        if mask == 0 {
            return Err(ReidentError::EmptyAttributeSubset);
        }
        if n_attributes < 32 && mask >> n_attributes != 0 {
            return Err(ReidentError::AttributeOutOfRange { mask, count: n_attributes });
        }
        Ok(Self(mask))
    }

    pub fn full(n_attributes: usize) -> Self {
        assert!((1..=32).contains(&n_attributes), "1..=32 attributes");
        Self(if n_attributes == 32 { u32::MAX } else { (1 << n_attributes) - 1 })
    }

    pub fn single(attribute: usize) -> Self {
        Self(1 << attribute)
    }

    pub fn from_names<S: AsRef<str>>(table_attributes: &[String], names: &[S]) -> Result<Self, ReidentError> {
        let mut mask = 0u32;
        for n in names {
            let n = n.as_ref();
            let i = table_attributes
                .iter()
                .position(|a| a == n)
                .ok_or_else(|| ReidentError::UnknownAttribute(n.to_owned()))?;
            mask |= 1 << i;
        }
        Self::new(mask, table_attributes.len())
    }

    /// Every non-empty subset of `n_attributes` attributes.
    pub fn all(n_attributes: usize) -> impl Iterator<Item = AttributeSubset> {
        (1u32..(1u32 << n_attributes)).map(AttributeSubset)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, attribute: usize) -> bool {
        attribute < 32 && self.0 >> attribute & 1 == 1
    }

    pub fn is_subset_of(self, other: AttributeSubset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }

    pub fn names(self, table_attributes: &[String]) -> Vec<String> {
        self.indices().filter_map(|i| table_attributes.get(i).cloned()).collect()
    }
}
