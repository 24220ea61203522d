//! Belief functions over finite frames, compatibility with a true
//! probability, evidence combination and candidate-set re-identification of
//! generalized microdata.

pub mod belief;
pub mod combination;
pub mod compatibility;
pub mod frame;
pub mod measures;
pub mod reident;
pub mod sampling;

pub use belief::{
    belief_from_mass, mass_from_belief, pignistic, BeliefError, BeliefFunction, MassAssignment, ProbabilityDistribution,
};
pub use combination::{combine_checked, combine_many, rule_by_name, CombinationError, CombinationRule};
pub use compatibility::{
    is_compatible, is_compatible_probability, Compatibility, ProbabilityVerdict, Provenance, TrueProbability,
};
pub use frame::{Frame, FrameError, SubsetMask, MAX_FRAME, TOL_SUM};
pub use measures::{entropy, nonspecificity, pignistic_entropy, transfer_mass};
