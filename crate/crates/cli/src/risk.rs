//! Per-record re-identification risk over a masked table.
//!
//! Tables of up to [`LATTICE_LIMIT`] records go through the belief-function
//! machinery on the full subset lattice. Larger tables use the closed forms
//! for a categorical mass on a candidate set `C`: nonspecificity `log2|C|`,
//! pignistic entropy `ln|C|`, and compatibility exactly when the true
//! candidate set lies inside `C`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use reid_core::belief::{belief_from_mass, pignistic, ProbabilityDistribution};
use reid_core::compatibility::{is_compatible, Compatibility};
use reid_core::measures::{nonspecificity, pignistic_entropy};
use reid_core::reident::{
    mask_generalize, reidentify_belief, true_probability_in, AttributeSubset, AuxiliaryInfo, CandidateSet,
    GeneralizationScheme, MaskedTable, Table,
};

use crate::config::Measure;
use crate::error::CliError;

/// Largest table evaluated on the dense subset lattice.
pub const LATTICE_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Lattice,
    ClosedForm,
}

/// A distribution listed on its support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseDistribution {
    pub records: Vec<usize>,
    pub probabilities: Vec<f64>,
}

impl SparseDistribution {
    fn uniform(c: &CandidateSet) -> Self {
        let p = 1.0 / c.len() as f64;
        Self {
            records: c.records().to_vec(),
            probabilities: vec![p; c.len()],
        }
    }

    fn from_dense(p: &ProbabilityDistribution) -> Self {
        let (records, probabilities) = p.values().iter().enumerate().filter(|(_, &v)| v > 0.0).unzip();
        Self { records, probabilities }
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Compatible,
    Incompatible {
        subset: Vec<usize>,
        probability: f64,
        belief: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetRisk {
    pub attributes: Vec<String>,
    pub candidates: Vec<usize>,
    pub candidate_size: usize,
    pub reidentification_probability: SparseDistribution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonspecificity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pignistic_entropy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compatibility: Option<Verdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordRisk {
    pub record: usize,
    pub masked_row: Vec<String>,
    pub true_probability: SparseDistribution,
    pub dirac_true_probability: bool,
    pub subsets: Vec<SubsetRisk>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetSummary {
    pub attributes: Vec<String>,
    pub unique_reidentification_fraction: f64,
    /// Candidate-set size to number of records.
    pub candidate_size_distribution: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub attributes: Vec<String>,
    pub n_records: usize,
    pub method: Method,
    /// Share of records whose full-attribute candidate set is a singleton.
    pub unique_reidentification_fraction: f64,
    pub summary: Vec<SubsetSummary>,
    pub records: Vec<RecordRisk>,
}

impl RiskReport {
    /// Records and subsets whose belief failed the compatibility check.
    pub fn incompatibilities(&self) -> Vec<(usize, Vec<String>)> {
        self.records
            .iter()
            .flat_map(|r| {
                r.subsets
                    .iter()
                    .filter(|s| matches!(s.compatibility, Some(Verdict::Incompatible { .. })))
                    .map(move |s| (r.record, s.attributes.clone()))
            })
            .collect()
    }
}

/// Candidate sets of every record for one attribute subset, grouped by the
/// projection of the masked row.
struct Classes {
    sets: Vec<CandidateSet>,
    of_record: Vec<usize>,
}

impl Classes {
    fn build(masked: &MaskedTable, attrs: AttributeSubset) -> Self {
        let cols: Vec<usize> = attrs.indices().collect();
        let mut index: HashMap<Vec<&str>, usize> = HashMap::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut of_record = Vec::with_capacity(masked.n_records());
        for (i, row) in masked.rows().iter().enumerate() {
            let key: Vec<&str> = cols.iter().map(|&j| row[j].as_str()).collect();
            let next = members.len();
            let id = *index.entry(key).or_insert(next);
            if id == next {
                members.push(Vec::new());
            }
            members[id].push(i);
            of_record.push(id);
        }
        Self {
            sets: members.into_iter().map(CandidateSet::from_records).collect(),
            of_record,
        }
    }

    fn of(&self, record: usize) -> &CandidateSet {
        &self.sets[self.of_record[record]]
    }
}

pub struct RiskOptions<'a> {
    pub subsets: &'a [AttributeSubset],
    pub measures: &'a [Measure],
    pub threads: Option<usize>,
}

pub fn assess(x: &Table, scheme: &GeneralizationScheme, opts: &RiskOptions<'_>) -> Result<RiskReport, CliError> {
    let masked = mask_generalize(x, scheme)?;
    let n = x.n_records();
    let method = if n <= LATTICE_LIMIT { Method::Lattice } else { Method::ClosedForm };
    let full = AttributeSubset::full(x.n_attributes());
    let truth_classes = Classes::build(&masked, full);
    let classes: Vec<Classes> = opts.subsets.iter().map(|&s| Classes::build(&masked, s)).collect();
    let wants = |m: Measure| opts.measures.contains(&m);

    let evaluate = |i: usize| -> Result<RecordRisk, CliError> {
        let y = masked.row(i);
        let truth = truth_classes.of(i);
        let mut subsets = Vec::with_capacity(opts.subsets.len());
        for (&attrs, cls) in opts.subsets.iter().zip(&classes) {
            let c = cls.of(i);
            let mut risk = SubsetRisk {
                attributes: attrs.names(x.attributes()),
                candidates: c.records().to_vec(),
                candidate_size: c.len(),
                reidentification_probability: SparseDistribution::uniform(c),
                nonspecificity: None,
                pignistic_entropy: None,
                compatibility: None,
            };
            match method {
                Method::Lattice => {
                    let m = reidentify_belief(y, attrs, x, scheme, &AuxiliaryInfo::none())?;
                    risk.reidentification_probability = SparseDistribution::from_dense(&pignistic(&m));
                    if wants(Measure::Nonspecificity) {
                        risk.nonspecificity = Some(nonspecificity(&m));
                    }
                    if wants(Measure::PignisticEntropy) {
                        risk.pignistic_entropy = Some(pignistic_entropy(&m));
                    }
                    if wants(Measure::Compatibility) {
                        let p = true_probability_in(y, &masked)?;
                        let verdict = is_compatible(&belief_from_mass(&m), &p)
                            .map_err(|e| CliError::Inconsistent(e.to_string()))?;
                        risk.compatibility = Some(match verdict {
                            Compatibility::Compatible => Verdict::Compatible,
                            Compatibility::Incompatible { subset, probability, belief } => Verdict::Incompatible {
                                subset: subset.elements().collect(),
                                probability,
                                belief,
                            },
                        });
                    }
                }
                Method::ClosedForm => {
                    let size = c.len() as f64;
                    if wants(Measure::Nonspecificity) {
                        risk.nonspecificity = Some(size.log2());
                    }
                    if wants(Measure::PignisticEntropy) {
                        risk.pignistic_entropy = Some(size.ln());
                    }
                    if wants(Measure::Compatibility) {
                        risk.compatibility = Some(if truth.is_subset_of(c) {
                            Verdict::Compatible
                        } else {
                            Verdict::Incompatible {
                                subset: c.records().to_vec(),
                                probability: truth.intersection(c).len() as f64 / truth.len() as f64,
                                belief: 1.0,
                            }
                        });
                    }
                }
            }
            subsets.push(risk);
        }
        Ok(RecordRisk {
            record: i,
            masked_row: y.to_vec(),
            true_probability: SparseDistribution::uniform(truth),
            dirac_true_probability: truth.len() == 1,
            subsets,
        })
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    // collect keeps record order whatever the scheduling
    let records: Vec<RecordRisk> = pool.install(|| (0..n).into_par_iter().map(evaluate).collect::<Result<_, _>>())?;

    let summary = opts
        .subsets
        .iter()
        .zip(&classes)
        .map(|(&attrs, cls)| summarize(attrs.names(x.attributes()), n, (0..n).map(|i| cls.of(i).len())))
        .collect();
    let unique = (0..n).filter(|&i| truth_classes.of(i).len() == 1).count();
    Ok(RiskReport {
        attributes: x.attributes().to_vec(),
        n_records: n,
        method,
        unique_reidentification_fraction: unique as f64 / n as f64,
        summary,
        records,
    })
}

fn summarize(attributes: Vec<String>, n: usize, sizes: impl Iterator<Item = usize>) -> SubsetSummary {
    let mut dist = BTreeMap::new();
    for s in sizes {
        *dist.entry(s).or_insert(0) += 1;
    }
    let unique = dist.get(&1).copied().unwrap_or(0);
    SubsetSummary {
        attributes,
        unique_reidentification_fraction: unique as f64 / n as f64,
        candidate_size_distribution: dist,
    }
}
