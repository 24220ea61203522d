//! Compatibility of belief functions and of pignistic probabilities with a
//! ground-truth re-identification probability.
//!
//! A belief function `Bel` is compatible with a probability `P` when
//! `P(A) ≥ Bel(A)` for every subset `A`. A probability `P'` is compatible with
//! `P` when it is the pignistic transform of some belief compatible with `P`.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use thiserror::Error;

use crate::belief::{
    belief_from_mass, pignistic, validate_mass, BeliefError, BeliefFunction, MassAssignment,
    ProbabilityDistribution, Violation,
};
use crate::frame::{Frame, FrameError, SubsetMask, TOL_SUM};

/// Largest frame for which the witness-free feasibility search is run.
pub const FEASIBILITY_MAX_FRAME: usize = 10;

/// Tolerance on pignistic equality when checking a witness.
pub const PIGNISTIC_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompatibilityError {
    #[error("frames differ")]
    FrameMismatch,
    #[error("frame of size {size} is too large for the feasibility search (max {max})")]
    TooLarge { size: usize, max: usize },
    #[error("linear solver failed: {0}")]
    Solver(String),
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// Where a [`TrueProbability`] came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// Uniform over the candidate set of a generalized record.
    Generalization {
        masked_row: Vec<String>,
        candidate_set: Vec<usize>,
    },
    /// Supplied directly, e.g. read from a file or built for an experiment.
    Stated,
}

/// The ground-truth posterior over original records for one protected record.
#[derive(Debug, Clone, PartialEq)]
pub struct TrueProbability {
    dist: ProbabilityDistribution,
    provenance: Provenance,
}

impl TrueProbability {
    pub fn new(dist: ProbabilityDistribution, provenance: Provenance) -> Self {
        Self { dist, provenance }
    }

    pub fn stated(dist: ProbabilityDistribution) -> Self {
        Self::new(dist, Provenance::Stated)
    }

    pub fn dist(&self) -> &ProbabilityDistribution {
        &self.dist
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn frame(&self) -> &Frame {
        self.dist.frame()
    }
}

/// Outcome of [`is_compatible`].
#[derive(Debug, Clone, PartialEq)]
pub enum Compatibility {
    Compatible,
    /// `P(subset) < Bel(subset)`; `subset` is the first such set in mask order.
    Incompatible {
        subset: SubsetMask,
        probability: f64,
        belief: f64,
    },
}

impl Compatibility {
    pub fn is_compatible(&self) -> bool {
        matches!(self, Compatibility::Compatible)
    }
}

/// Checks `P(A) ≥ Bel(A) − TOL_SUM` for every subset `A`.
pub fn is_compatible(bel: &BeliefFunction, p: &TrueProbability) -> Result<Compatibility, CompatibilityError> {
    check_compatible(bel, p.dist())
}

pub(crate) fn check_compatible(
    bel: &BeliefFunction,
    p: &ProbabilityDistribution,
) -> Result<Compatibility, CompatibilityError> {
    if bel.frame() != p.frame() {
        return Err(CompatibilityError::FrameMismatch);
    }
    let prob = p.set_function();
    let verdict = bel
        .values()
        .iter()
        .zip(&prob)
        .enumerate()
        .find(|(_, (&b, &q))| q < b - TOL_SUM)
        .map_or(Compatibility::Compatible, |(i, (&b, &q))| Compatibility::Incompatible {
            subset: SubsetMask::from_index(i),
            probability: q,
            belief: b,
        });
    Ok(verdict)
}

/// Why a proposed witness fails to show that `P'` is compatible with `P`.
#[derive(Debug, Clone, PartialEq)]
pub enum Refutation {
    InvalidWitness(Violation),
    WitnessIncompatible {
        subset: SubsetMask,
        probability: f64,
        belief: f64,
    },
    PignisticMismatch {
        element: usize,
        expected: f64,
        actual: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProbabilityVerdict {
    /// The supplied witness proves compatibility.
    Verified,
    /// The supplied witness does not prove compatibility.
    Refuted(Refutation),
    /// No witness was supplied; the search found (and verified) one.
    Feasible { witness: MassAssignment },
    /// No witness was supplied and none exists.
    Infeasible,
}

impl ProbabilityVerdict {
    pub fn is_compatible(&self) -> bool {
        matches!(self, ProbabilityVerdict::Verified | ProbabilityVerdict::Feasible { .. })
    }
}

/// Decides whether `p_prime` is the pignistic transform of a belief compatible
/// with `p`.
///
/// With a witness mass the three conditions are checked directly. Without one,
/// a linear feasibility problem over the masses `m(A), A ≠ ∅` is solved:
/// `m ≥ 0`, `Σ_{B⊆A} m(B) ≤ P(A)` for every `A`, and pignistic equality per
/// element (which also pins `Σ m = 1`).
pub fn is_compatible_probability(
    p_prime: &ProbabilityDistribution,
    p: &TrueProbability,
    witness: Option<&MassAssignment>,
) -> Result<ProbabilityVerdict, CompatibilityError> {
    if p_prime.frame() != p.frame() {
        return Err(CompatibilityError::FrameMismatch);
    }
    match witness {
        Some(w) => check_witness(p_prime, p.dist(), w),
        None => search_witness(p_prime, p.dist()),
    }
}

fn check_witness(
    p_prime: &ProbabilityDistribution,
    p: &ProbabilityDistribution,
    witness: &MassAssignment,
) -> Result<ProbabilityVerdict, CompatibilityError> {
    if witness.frame() != p.frame() {
        return Err(CompatibilityError::FrameMismatch);
    }
    let report = validate_mass(witness.frame(), witness.values())?;
    if let Some(v) = report.first() {
        return Ok(ProbabilityVerdict::Refuted(Refutation::InvalidWitness(v.clone())));
    }
    if let Compatibility::Incompatible { subset, probability, belief } =
        check_compatible(&belief_from_mass(witness), p)?
    {
        return Ok(ProbabilityVerdict::Refuted(Refutation::WitnessIncompatible {
            subset,
            probability,
            belief,
        }));
    }
    let actual = pignistic(witness);
    for (element, (&e, &a)) in p_prime.values().iter().zip(actual.values()).enumerate() {
        if (e - a).abs() > PIGNISTIC_TOL {
            return Ok(ProbabilityVerdict::Refuted(Refutation::PignisticMismatch {
                element,
                expected: e,
                actual: a,
            }));
        }
    }
    Ok(ProbabilityVerdict::Verified)
}

fn search_witness(
    p_prime: &ProbabilityDistribution,
    p: &ProbabilityDistribution,
) -> Result<ProbabilityVerdict, CompatibilityError> {
    let frame = p.frame();
    let n = frame.size();
    if n > FEASIBILITY_MAX_FRAME {
        return Err(CompatibilityError::TooLarge {
            size: n,
            max: FEASIBILITY_MAX_FRAME,
        });
    }
    let prob = p.set_function();
    let full = frame.full();

    // Sets disjoint from the support of P are forced to zero mass by the
    // constraint on themselves, so they get no variable.
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let mut vars = Vec::new();
    for set in frame.subsets().skip(1) {
        if prob[set.index()] > TOL_SUM {
            vars.push((set, problem.add_var(0.0, (0.0, f64::INFINITY))));
        }
    }
    for a in frame.subsets().skip(1) {
        if a == full || prob[a.index()] >= 1.0 - TOL_SUM {
            continue;
        }
        let terms: Vec<_> = vars
            .iter()
            .filter(|(b, _)| b.is_subset_of(a))
            .map(|&(_, v)| (v, 1.0))
            .collect();
        if !terms.is_empty() {
            problem.add_constraint(&terms[..], ComparisonOp::Le, prob[a.index()]);
        }
    }
    for x in 0..n {
        let terms: Vec<_> = vars
            .iter()
            .filter(|(b, _)| b.contains(x))
            .map(|&(b, v)| (v, 1.0 / b.len() as f64))
            .collect();
        let target = p_prime.prob(x);
        if terms.is_empty() {
            if target > PIGNISTIC_TOL {
                return Ok(ProbabilityVerdict::Infeasible);
            }
            continue;
        }
        problem.add_constraint(&terms[..], ComparisonOp::Eq, target);
    }

    let solution = match problem.solve() {
        Ok(s) => s,
        Err(minilp::Error::Infeasible) => return Ok(ProbabilityVerdict::Infeasible),
        Err(e) => return Err(CompatibilityError::Solver(e.to_string())),
    };

    let mut mass = vec![0.0; frame.lattice_len()];
    for &(set, v) in &vars {
        mass[set.index()] = solution[v].max(0.0);
    }
    let total: f64 = mass.iter().sum();
    for v in &mut mass {
        *v /= total;
    }
    repair_towards_vacuous(&mut mass, &prob);
    let witness = MassAssignment::new(frame.clone(), mass)?;
    match check_witness(p_prime, p, &witness)? {
        ProbabilityVerdict::Verified => Ok(ProbabilityVerdict::Feasible { witness }),
        ProbabilityVerdict::Refuted(r) => Err(CompatibilityError::Solver(format!(
            "solver witness failed verification: {r:?}"
        ))),
        _ => unreachable!("check_witness returns Verified or Refuted"),
    }
}

/// Restores `Bel ≤ P` on a dense mass vector by scaling down, for each violating
/// subset `A`, the masses of all subsets of `A` and moving the removed mass to
/// the full set. Each subset is repaired at most once, since later repairs only
/// lower beliefs of proper subsets.
pub(crate) fn repair_towards_vacuous(mass: &mut [f64], prob: &[f64]) {
    let full = mass.len() - 1;
    let mut bel = mass.to_vec();
    crate::frame::zeta_in_place(&mut bel);
    for a in 1..full {
        if bel[a] > prob[a] {
            let scale = if bel[a] > 0.0 { prob[a].max(0.0) / bel[a] } else { 0.0 };
            let mut moved = 0.0;
            for b in SubsetMask::from_index(a).subsets().skip(1) {
                let old = mass[b.index()];
                mass[b.index()] = old * scale;
                moved += old - old * scale;
            }
            mass[full] += moved;
            bel.copy_from_slice(mass);
            crate::frame::zeta_in_place(&mut bel);
        }
    }
}

/// Elements with probability above `TOL_SUM`.
pub fn support(p: &ProbabilityDistribution) -> SubsetMask {
    SubsetMask::from_elements(
        p.values()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > TOL_SUM)
            .map(|(i, _)| i),
    )
}

/// The element carrying (within `TOL_SUM`) all the probability, if any.
pub fn is_dirac(p: &ProbabilityDistribution) -> Option<usize> {
    p.values().iter().position(|&v| v >= 1.0 - TOL_SUM)
}
