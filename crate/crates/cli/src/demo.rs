//! The ℕ³ unit-noise scenario: a belief compatible with its stated truth whose
//! pignistic argmax is a record that truth rules out.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use reid_core::belief::{belief_from_mass, pignistic};
use reid_core::compatibility::is_compatible;
use reid_core::frame::MAX_FRAME;
use reid_core::reident::{
    draw_noise, n3_forward_distribution, n3_posterior, n3_posterior_given_alpha, n3_proposition_truth,
    n3_reident_belief, n3_scenario, noise_mask_n3, N3Record,
};

use crate::error::CliError;
use crate::massfile::SetFunctionFile;

pub const CANONICAL: [N3Record; 4] = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseDraw {
    pub alpha: u8,
    pub beta: u8,
    pub masked_x0: N3Record,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoReport {
    pub seed: u64,
    pub records: Vec<N3Record>,
    pub y: N3Record,
    pub x0: usize,
    pub neighbours: [usize; 3],
    pub belief: SetFunctionFile,
    pub pignistic: Vec<f64>,
    pub argmax: usize,
    pub argmax_in_neighbours: bool,
    /// Uniform on the neighbours; the probability the belief is built against.
    pub stated_truth: Vec<f64>,
    pub compatible_with_stated_truth: bool,
    /// The pignistic attains its maximum where the stated truth is zero.
    pub argmax_has_zero_true_probability: bool,
    /// `1/2` on `x0`, `1/6` on each neighbour.
    pub forward_distribution: Vec<f64>,
    /// Posterior of the masking given `y`, uniform prior on records.
    pub posterior: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub revealed_alpha: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub posterior_given_alpha: Option<Vec<f64>>,
    /// Present when `x0` carries no posterior probability once `α` is known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0_impossible_given_alpha: Option<bool>,
    pub noise_draw: NoiseDraw,
}

/// The canonical records plus `size − 4` distinct filler points of
/// `{0..5}³`, shuffled by `seed`. At most [`MAX_FRAME`] records.
pub fn generate_records(seed: u64, size: usize) -> Result<Vec<N3Record>, CliError> {
    if !(CANONICAL.len()..=MAX_FRAME).contains(&size) {
        return Err(CliError::Config(format!("table size must be between 4 and {MAX_FRAME}, got {size}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = CANONICAL.to_vec();
    while records.len() < size {
        let r = [rng.gen_range(0..6), rng.gen_range(0..6), rng.gen_range(0..6)];
        if !records.contains(&r) {
            records.push(r);
        }
    }
    records.shuffle(&mut rng);
    Ok(records)
}

pub fn run_demo(seed: u64, records: Vec<N3Record>, y: N3Record, alpha: Option<u8>) -> Result<DemoReport, CliError> {
    let scenario = n3_scenario(y, &records)?;
    let m = n3_reident_belief(y, &records)?;
    let truth = n3_proposition_truth(y, &records)?;
    let bet = pignistic(&m);
    let argmax = bet.argmax();
    let compatible = is_compatible(&belief_from_mass(&m), &truth)
        .map_err(|e| CliError::Inconsistent(e.to_string()))?
        .is_compatible();
    if !compatible {
        return Err(CliError::Inconsistent("scenario belief is incompatible with its stated truth".into()));
    }
    let given = alpha.map(|a| n3_posterior_given_alpha(y, &records, a)).transpose()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let (a, b) = draw_noise(&mut rng);
    let noise_draw = NoiseDraw {
        alpha: a,
        beta: b,
        masked_x0: noise_mask_n3(records[scenario.x0], a, b)?,
    };
    Ok(DemoReport {
        seed,
        y,
        x0: scenario.x0,
        neighbours: scenario.neighbours,
        belief: SetFunctionFile::from_mass(&m),
        pignistic: bet.values().to_vec(),
        argmax,
        argmax_in_neighbours: scenario.neighbours.contains(&argmax),
        stated_truth: truth.dist().values().to_vec(),
        compatible_with_stated_truth: compatible,
        argmax_has_zero_true_probability: truth.dist().prob(argmax) == 0.0,
        forward_distribution: n3_forward_distribution(y, &records)?.values().to_vec(),
        posterior: n3_posterior(y, &records)?.values().to_vec(),
        revealed_alpha: alpha,
        x0_impossible_given_alpha: given.as_ref().map(|g| g.prob(scenario.x0) == 0.0),
        posterior_given_alpha: given.map(|g| g.values().to_vec()),
        noise_draw,
        records,
    })
}
