//! Uncertainty measures on mass assignments.
//!
//! Pignistic entropy is reported in nats and nonspecificity in bits. The two
//! behave differently under a mass transfer to a more specific set:
//! nonspecificity never increases, entropy can move either way.

use thiserror::Error;

use crate::belief::{pignistic, MassAssignment, ProbabilityDistribution};
use crate::frame::{FrameError, SubsetMask};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransferError {
    #[error("target {target} is not a proper subset of {origin}")]
    NotNested { target: SubsetMask, origin: SubsetMask },
    #[error("cannot transfer mass onto the empty set")]
    EmptyTarget,
    #[error("transfer amount {delta} outside [0, {available}]")]
    DeltaOutOfRange { delta: f64, available: f64 },
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// Shannon entropy `−Σ p ln p` of a distribution, with `0·ln 0 = 0`.
pub fn entropy(p: &ProbabilityDistribution) -> f64 {
    -p.values()
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.ln())
        .sum::<f64>()
}

/// Entropy (nats) of the pignistic distribution of `m`.
pub fn pignistic_entropy(m: &MassAssignment) -> f64 {
    entropy(&pignistic(m))
}

/// Dubois–Prade nonspecificity `Σ_A m(A)·log2|A|`, in bits.
pub fn nonspecificity(m: &MassAssignment) -> f64 {
    m.focal_elements()
        .filter(|(s, _)| !s.is_empty())
        .map(|(s, v)| v * (s.len() as f64).log2())
        .sum()
}

/// Moves `delta` of mass from `source` to its proper, non-empty subset `target`.
pub fn transfer_mass(
    m: &MassAssignment,
    target: SubsetMask,
    source: SubsetMask,
    delta: f64,
) -> Result<MassAssignment, TransferError> {
    m.frame().check(source)?;
    if target.is_empty() {
        return Err(TransferError::EmptyTarget);
    }
    if !target.is_subset_of(source) || target == source {
        return Err(TransferError::NotNested { target, origin: source });
    }
    let available = m.mass(source);
    if !(0.0..=available).contains(&delta) {
        return Err(TransferError::DeltaOutOfRange { delta, available });
    }
    let mut mass = m.values().to_vec();
    mass[target.index()] += delta;
    mass[source.index()] -= delta;
    // Nonnegative entries summing to the same total as `m`.
    Ok(MassAssignment::from_parts_unchecked(m.frame().clone(), mass))
}

/// Whether `p` majorizes `q`: sorted descending, every prefix sum of `p` is at
/// least the matching prefix sum of `q` (within `tol`).
pub fn majorizes(p: &[f64], q: &[f64], tol: f64) -> bool {
    let sorted = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    };
    let (p, q) = (sorted(p), sorted(q));
    let (mut sp, mut sq) = (0.0, 0.0);
    for i in 0..p.len().max(q.len()) {
        sp += p.get(i).copied().unwrap_or(0.0);
        sq += q.get(i).copied().unwrap_or(0.0);
        if sp < sq - tol {
            return false;
        }
    }
    true
}
