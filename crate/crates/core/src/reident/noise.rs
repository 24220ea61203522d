//! Additive unit noise on records in ℕ³ and a re-identification belief whose
//! pignistic favours a record the stated truth rules out.
//!
//! A row `y` is masked as `y = x + α·e_β` with `α ∈ {0,1}` and `β ∈ {1,2,3}`.
//! For a protected row `y` the scenario singles out `x0 = y` and the three
//! records `A = {y + e_1, y + e_2, y + e_3}`. Three distributions over the
//! table are available and they do not agree:
//!
//! * [`n3_proposition_truth`]: uniform `1/3` on `A`, `x0` excluded. This is the
//!   probability the belief of [`n3_reident_belief`] is compatible with.
//! * [`n3_forward_distribution`]: `1/2` on `x0` and `1/6` on each record of
//!   `A`, i.e. the law of `x0 + α·e_β` read over the scenario's records.
//! * [`n3_posterior`]: the Bayes posterior of the masking given `y` under a
//!   uniform prior on records, which weighs `y` itself by `1/2` and each
//!   `y − e_β` by `1/6`.

use rand::Rng;

use super::ReidentError;
use crate::belief::{MassAssignment, ProbabilityDistribution};
use crate::compatibility::TrueProbability;
use crate::frame::{Frame, SubsetMask};

pub type N3Record = [u64; 3];

/// `x + α·e_β`.
pub fn noise_mask_n3(x: N3Record, alpha: u8, beta: u8) -> Result<N3Record, ReidentError> {
    if alpha > 1 {
        return Err(ReidentError::AlphaOutOfRange(alpha));
    }
    if !(1..=3).contains(&beta) {
        return Err(ReidentError::BetaOutOfRange(beta));
    }
    let mut y = x;
    y[usize::from(beta - 1)] += u64::from(alpha);
    Ok(y)
}

/// Uniform `(α, β)`.
pub fn draw_noise<R: Rng + ?Sized>(rng: &mut R) -> (u8, u8) {
    (rng.gen_range(0..=1), rng.gen_range(1..=3))
}

/// Positions of `x0` and of the three records of `A` in `records`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct N3Scenario {
    pub x0: usize,
    pub neighbours: [usize; 3],
}

impl N3Scenario {
    pub fn neighbour_set(&self) -> SubsetMask {
        SubsetMask::from_elements(self.neighbours)
    }
}

pub fn n3_scenario(y: N3Record, records: &[N3Record]) -> Result<N3Scenario, ReidentError> {
    let find = |r: N3Record| records.iter().position(|&x| x == r).ok_or(ReidentError::MissingPreimage(r));
    let x0 = find(y)?;
    let mut neighbours = [0; 3];
    for (beta, slot) in (1..=3).zip(neighbours.iter_mut()) {
        *slot = find(noise_mask_n3(y, 1, beta)?)?;
    }
    Ok(N3Scenario { x0, neighbours })
}

fn record_frame(records: &[N3Record]) -> Result<Frame, ReidentError> {
    Ok(Frame::indexed(records.len())?)
}

/// `m({x0, a}) = 1/3` for each `a ∈ A`.
pub fn n3_reident_belief(y: N3Record, records: &[N3Record]) -> Result<MassAssignment, ReidentError> {
    let s = n3_scenario(y, records)?;
    let frame = record_frame(records)?;
    let k = s.neighbours.len() as f64;
    let focal = s
        .neighbours
        .iter()
        .map(|&a| (SubsetMask::from_elements([s.x0, a]), 1.0 / k));
    Ok(MassAssignment::from_focal(frame, focal)?)
}

/// Uniform on `A`.
pub fn n3_proposition_truth(y: N3Record, records: &[N3Record]) -> Result<TrueProbability, ReidentError> {
    let s = n3_scenario(y, records)?;
    let dist = ProbabilityDistribution::uniform_on(record_frame(records)?, s.neighbour_set())?;
    Ok(TrueProbability::stated(dist))
}

/// `1/2` on `x0`, `1/6` on each record of `A`.
pub fn n3_forward_distribution(y: N3Record, records: &[N3Record]) -> Result<ProbabilityDistribution, ReidentError> {
    let s = n3_scenario(y, records)?;
    let mut p = vec![0.0; records.len()];
    p[s.x0] = 0.5;
    for &a in &s.neighbours {
        p[a] = 1.0 / 6.0;
    }
    Ok(ProbabilityDistribution::new(record_frame(records)?, p)?)
}

/// `P(x | y) ∝ P(y | x)` over the table, uniform prior on records.
pub fn n3_posterior(y: N3Record, records: &[N3Record]) -> Result<ProbabilityDistribution, ReidentError> {
    posterior(y, records, None)
}

/// The posterior once `α` is revealed: the records equal to `y` when
/// `α = 0`, the records `y − e_β` when `α = 1`.
pub fn n3_posterior_given_alpha(
    y: N3Record,
    records: &[N3Record],
    alpha: u8,
) -> Result<ProbabilityDistribution, ReidentError> {
    if alpha > 1 {
        return Err(ReidentError::AlphaOutOfRange(alpha));
    }
    posterior(y, records, Some(alpha))
}

fn posterior(y: N3Record, records: &[N3Record], alpha: Option<u8>) -> Result<ProbabilityDistribution, ReidentError> {
    let likelihood = |x: &N3Record| -> f64 {
        let mut l = 0.0;
        for a in [0u8, 1] {
            if alpha.is_some_and(|known| known != a) {
                continue;
            }
            for beta in 1..=3u8 {
                if noise_mask_n3(*x, a, beta).is_ok_and(|z| z == y) {
                    l += 1.0 / 6.0;
                }
            }
        }
        l
    };
    let mut p: Vec<f64> = records.iter().map(likelihood).collect();
    let total: f64 = p.iter().sum();
    if total == 0.0 {
        return Err(ReidentError::EmptyCandidateSet);
    }
    for v in &mut p {
        *v /= total;
    }
    Ok(ProbabilityDistribution::new(record_frame(records)?, p)?)
}
