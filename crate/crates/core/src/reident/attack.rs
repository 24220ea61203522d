//! Candidate sets and the probability- and belief-valued re-identification
//! methods built on them.

use serde::{Deserialize, Serialize};

use super::{mask_generalize, AttributeSubset, GeneralizationScheme, MaskedTable, ReidentError, Table};
use crate::belief::{pignistic, BeliefError, MassAssignment, ProbabilityDistribution};
use crate::combination::{combine_many, conjunctive_rule};
use crate::compatibility::{Provenance, TrueProbability};
use crate::frame::{Frame, FrameError, SubsetMask};

/// Sorted record positions. Unlike [`SubsetMask`] it is not limited by the
/// dense frame capacity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CandidateSet(Vec<usize>);

impl CandidateSet {
    pub fn from_records(mut records: Vec<usize>) -> Self {
        records.sort_unstable();
        records.dedup();
        Self(records)
    }

    pub fn records(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, record: usize) -> bool {
        self.0.binary_search(&record).is_ok()
    }

    pub fn is_subset_of(&self, other: &CandidateSet) -> bool {
        self.0.iter().all(|&r| other.contains(r))
    }

    pub fn intersection(&self, other: &CandidateSet) -> CandidateSet {
        CandidateSet(self.0.iter().copied().filter(|&r| other.contains(r)).collect())
    }

    pub fn to_mask(&self, frame: &Frame) -> Result<SubsetMask, FrameError> {
        let mask = SubsetMask::from_elements(self.0.iter().copied().filter(|&r| r < 64));
        if mask.len() != self.0.len() {
            return Err(FrameError::TooLarge {
                size: self.0.last().map_or(0, |r| r + 1),
                max: frame.size(),
            });
        }
        frame.check(mask)?;
        Ok(mask)
    }
}

impl From<SubsetMask> for CandidateSet {
    fn from(mask: SubsetMask) -> Self {
        Self(mask.elements().collect())
    }
}

/// One item of auxiliary evidence about which record produced a row.
#[derive(Debug, Clone, PartialEq)]
pub enum Evidence {
    /// An explicit mass over the record frame.
    Mass(MassAssignment),
    /// Knowledge that the record is among these positions (a categorical mass).
    Records(Vec<usize>),
}

impl Evidence {
    pub fn to_mass(&self, frame: &Frame) -> Result<MassAssignment, ReidentError> {
        match self {
            Evidence::Mass(m) if m.frame() == frame => Ok(m.clone()),
            Evidence::Mass(_) => Err(BeliefError::FrameMismatch.into()),
            Evidence::Records(r) => {
                let set = CandidateSet::from_records(r.clone()).to_mask(frame)?;
                Ok(MassAssignment::categorical(frame.clone(), set)?)
            }
        }
    }
}

/// Auxiliary information `a`; empty by default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AuxiliaryInfo {
    items: Vec<Evidence>,
}

impl AuxiliaryInfo {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(items: Vec<Evidence>) -> Self {
        Self { items }
    }

    pub fn push(&mut self, item: Evidence) {
        self.items.push(item);
    }

    pub fn items(&self) -> &[Evidence] {
        &self.items
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

fn check_row(y_row: &[String], n_attributes: usize) -> Result<(), ReidentError> {
    if y_row.len() != n_attributes {
        return Err(ReidentError::RowLength {
            expected: n_attributes,
            got: y_row.len(),
        });
    }
    Ok(())
}

/// Records whose masked cells agree with `y_row` on every attribute in
/// `attrs`, given the already masked table.
pub fn candidate_set_in(y_row: &[String], masked: &MaskedTable, attrs: AttributeSubset) -> Result<CandidateSet, ReidentError> {
    check_row(y_row, masked.attributes().len())?;
    let cols: Vec<usize> = attrs.indices().collect();
    if let Some(&j) = cols.iter().find(|&&j| j >= y_row.len()) {
        return Err(ReidentError::AttributeOutOfRange {
            mask: attrs.bits(),
            count: j.min(y_row.len()),
        });
    }
    Ok(CandidateSet(
        masked
            .rows()
            .iter()
            .enumerate()
            .filter(|(_, row)| cols.iter().all(|&j| row[j] == y_row[j]))
            .map(|(i, _)| i)
            .collect(),
    ))
}

/// Records `x_i` with `gen_j(x_i[j]) = y_row[j]` for every `j ∈ attrs`.
pub fn candidate_set(
    y_row: &[String],
    x: &Table,
    scheme: &GeneralizationScheme,
    attrs: AttributeSubset,
) -> Result<CandidateSet, ReidentError> {
    candidate_set_in(y_row, &mask_generalize(x, scheme)?, attrs)
}

/// Uniform probability on the full-attribute candidate set, from a masked table.
pub fn true_probability_in(y_row: &[String], masked: &MaskedTable) -> Result<TrueProbability, ReidentError> {
    let full = AttributeSubset::full(masked.attributes().len());
    let cands = candidate_set_in(y_row, masked, full)?;
    let frame = Frame::indexed(masked.n_records())?;
    let dist = uniform_over(&frame, &cands)?;
    Ok(TrueProbability::new(
        dist,
        Provenance::Generalization {
            masked_row: y_row.to_vec(),
            candidate_set: cands.records().to_vec(),
        },
    ))
}

/// `P(x_i | y)`: uniform over the full-attribute candidate set.
pub fn true_probability(y_row: &[String], x: &Table, scheme: &GeneralizationScheme) -> Result<TrueProbability, ReidentError> {
    true_probability_in(y_row, &mask_generalize(x, scheme)?)
}

fn uniform_over(frame: &Frame, cands: &CandidateSet) -> Result<ProbabilityDistribution, ReidentError> {
    if cands.is_empty() {
        return Err(ReidentError::EmptyCandidateSet);
    }
    Ok(ProbabilityDistribution::uniform_on(frame.clone(), cands.to_mask(frame)?)?)
}

/// Categorical mass on the restricted candidate set, conjunctively combined
/// with any auxiliary evidence. Combination is checked against the true
/// probability of `y_row`.
pub fn reidentify_belief(
    y_row: &[String],
    attrs: AttributeSubset,
    x: &Table,
    scheme: &GeneralizationScheme,
    aux: &AuxiliaryInfo,
) -> Result<MassAssignment, ReidentError> {
    let masked = mask_generalize(x, scheme)?;
    let frame = x.frame()?;
    let cands = candidate_set_in(y_row, &masked, attrs)?;
    if cands.is_empty() {
        return Err(ReidentError::EmptyCandidateSet);
    }
    let base = MassAssignment::categorical(frame.clone(), cands.to_mask(&frame)?)?;
    if aux.is_empty() {
        return Ok(base);
    }
    let truth = true_probability_in(y_row, &masked)?;
    let mut masses = vec![base];
    for item in aux.items() {
        masses.push(item.to_mass(&frame)?);
    }
    Ok(combine_many(&conjunctive_rule(), &masses, &truth)?)
}

/// Uniform over the restricted candidate set; with auxiliary evidence, the
/// pignistic of [`reidentify_belief`].
pub fn reidentify_prob(
    y_row: &[String],
    attrs: AttributeSubset,
    x: &Table,
    scheme: &GeneralizationScheme,
    aux: &AuxiliaryInfo,
) -> Result<ProbabilityDistribution, ReidentError> {
    if !aux.is_empty() {
        return Ok(pignistic(&reidentify_belief(y_row, attrs, x, scheme, aux)?));
    }
    let cands = candidate_set(y_row, x, scheme, attrs)?;
    uniform_over(&x.frame()?, &cands)
}

/// Categorical mass on `C0 = (B ∪ CandidateSet(y)) \ {x0}`.
///
/// This deliberately drops a record the truth gives positive probability, so
/// the result is never compatible with [`true_probability`]: `Bel(C0) = 1`
/// while `P(C0) = 1 − 1/|CandidateSet(y)|`. It is not a valid
/// re-identification method and exists to exercise the compatibility check.
pub fn adversarial_missing_record(
    y_row: &[String],
    x: &Table,
    scheme: &GeneralizationScheme,
    b: SubsetMask,
    x0: usize,
) -> Result<MassAssignment, ReidentError> {
    let frame = x.frame()?;
    frame.check(b)?;
    let full = AttributeSubset::full(x.n_attributes());
    let cands = candidate_set(y_row, x, scheme, full)?;
    if !cands.contains(x0) {
        return Err(ReidentError::NotACandidate(x0));
    }
    if cands.len() < 2 {
        return Err(ReidentError::CandidateSetTooSmall(cands.len()));
    }
    let c0 = b.union(cands.to_mask(&frame)?).without(x0);
    Ok(MassAssignment::categorical(frame, c0)?)
}
