//! Combination of belief-valued evidence under the acceptability contract:
//! the result must stay compatible with the true probability and must not be
//! less specific than either input.
//!
//! Rules only compute; [`combine_checked`] enforces the contract after the
//! fact, so a rule that is not acceptable in general can still be used on the
//! instances where it happens to be.

use thiserror::Error;

use crate::belief::{belief_from_mass, validate_mass, MassAssignment, Violation};
use crate::compatibility::{check_compatible, Compatibility, TrueProbability};
use crate::frame::{superset_mobius_in_place, superset_zeta_in_place, SubsetMask, TOL_SUM};
use crate::measures::nonspecificity;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CombinationError {
    #[error("frames differ")]
    FrameMismatch,
    #[error("at least two inputs are required, got {0}")]
    TooFewInputs(usize),
    #[error("input {input} is incompatible with the true probability at {subset}: P = {probability}, Bel = {belief}")]
    InputIncompatible {
        input: usize,
        subset: SubsetMask,
        probability: f64,
        belief: f64,
    },
    #[error("conflicting evidence: mass {mass} on the empty set")]
    Conflict { mass: f64 },
    #[error("total conflict: nothing left to normalize")]
    TotalConflict,
    #[error("rule produced an invalid mass: {0}")]
    InvalidOutput(Violation),
    #[error("result not acceptable: {0}")]
    Unacceptable(Clause),
    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<CombinationError>,
    },
}

impl CombinationError {
    /// Fold step at which the failure happened, if annotated.
    pub fn step(&self) -> Option<usize> {
        match self {
            CombinationError::AtStep { step, .. } => Some(*step),
            _ => None,
        }
    }

    /// The error with any step annotation removed.
    pub fn root(&self) -> &CombinationError {
        match self {
            CombinationError::AtStep { source, .. } => source.root(),
            other => other,
        }
    }
}

/// The acceptability clause a combination result broke.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Clause {
    #[error("compatibility: P({subset}) = {probability} < Bel = {belief}")]
    Compatibility {
        subset: SubsetMask,
        probability: f64,
        belief: f64,
    },
    #[error("nonspecificity {result} exceeds min of inputs {bound}")]
    Nonspecificity { result: f64, bound: f64 },
}

/// A binary combination rule. `apply` returns the dense, possibly
/// unnormalized, combined mass; index 0 holds any mass on the empty set.
pub trait CombinationRule: Send + Sync {
    fn name(&self) -> &str;

    fn apply(&self, m1: &MassAssignment, m2: &MassAssignment) -> Result<Vec<f64>, CombinationError>;
}

/// Unnormalized conjunctive rule: `m(C) = Σ_{A ∩ B = C} m1(A)·m2(B)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Conjunctive;

/// Conjunctive rule followed by Dempster's normalization of the conflict.
#[derive(Debug, Clone, Copy, Default)]
pub struct DempsterNormalized;

pub fn conjunctive_rule() -> Conjunctive {
    Conjunctive
}

pub fn dempster_normalized_rule() -> DempsterNormalized {
    DempsterNormalized
}

/// Looks up a rule by its name (`conjunctive` or `dempster`).
pub fn rule_by_name(name: &str) -> Option<Box<dyn CombinationRule>> {
    match name {
        "conjunctive" => Some(Box::new(Conjunctive)),
        "dempster" => Some(Box::new(DempsterNormalized)),
        _ => None,
    }
}

impl CombinationRule for Conjunctive {
    fn name(&self) -> &str {
        "conjunctive"
    }

    fn apply(&self, m1: &MassAssignment, m2: &MassAssignment) -> Result<Vec<f64>, CombinationError> {
        if m1.frame() != m2.frame() {
            return Err(CombinationError::FrameMismatch);
        }
        Ok(conjunctive(m1, m2))
    }
}

impl CombinationRule for DempsterNormalized {
    fn name(&self) -> &str {
        "dempster"
    }

    fn apply(&self, m1: &MassAssignment, m2: &MassAssignment) -> Result<Vec<f64>, CombinationError> {
        let mut mass = Conjunctive.apply(m1, m2)?;
        let kept = 1.0 - mass[0];
        if kept <= TOL_SUM {
            return Err(CombinationError::TotalConflict);
        }
        mass[0] = 0.0;
        for v in &mut mass[1..] {
            *v /= kept;
        }
        Ok(mass)
    }
}

/// Conjunctive combination, choosing between summing over focal pairs and
/// multiplying commonality functions, whichever is cheaper.
pub fn conjunctive(m1: &MassAssignment, m2: &MassAssignment) -> Vec<f64> {
    let f1 = m1.focal_elements().count();
    let f2 = m2.focal_elements().count();
    let len = m1.frame().lattice_len();
    let lattice_cost = 3 * m1.frame().size() * len;
    if f1 * f2 <= lattice_cost {
        conjunctive_by_pairs(m1, m2)
    } else {
        conjunctive_by_commonality(m1, m2)
    }
}

pub(crate) fn conjunctive_by_pairs(m1: &MassAssignment, m2: &MassAssignment) -> Vec<f64> {
    let mut out = vec![0.0; m1.frame().lattice_len()];
    for (a, va) in m1.focal_elements() {
        for (b, vb) in m2.focal_elements() {
            out[a.intersection(b).index()] += va * vb;
        }
    }
    out
}

/// Commonalities `q(A) = Σ_{B ⊇ A} m(B)` multiply under conjunction.
pub(crate) fn conjunctive_by_commonality(m1: &MassAssignment, m2: &MassAssignment) -> Vec<f64> {
    let mut q1 = m1.values().to_vec();
    let mut q2 = m2.values().to_vec();
    superset_zeta_in_place(&mut q1);
    superset_zeta_in_place(&mut q2);
    for (a, b) in q1.iter_mut().zip(&q2) {
        *a *= b;
    }
    superset_mobius_in_place(&mut q1);
    q1
}

fn require_compatible(m: &MassAssignment, p: &TrueProbability, input: usize) -> Result<(), CombinationError> {
    match check_compatible(&belief_from_mass(m), p.dist()).map_err(|_| CombinationError::FrameMismatch)? {
        Compatibility::Compatible => Ok(()),
        Compatibility::Incompatible { subset, probability, belief } => Err(CombinationError::InputIncompatible {
            input,
            subset,
            probability,
            belief,
        }),
    }
}

/// Applies `rule` and enforces acceptability against `p`.
pub fn combine_checked(
    rule: &dyn CombinationRule,
    m1: &MassAssignment,
    m2: &MassAssignment,
    p: &TrueProbability,
) -> Result<MassAssignment, CombinationError> {
    if m1.frame() != m2.frame() || m1.frame() != p.frame() {
        return Err(CombinationError::FrameMismatch);
    }
    let mut raw = rule.apply(m1, m2)?;
    if raw[0] > TOL_SUM {
        return Err(CombinationError::Conflict { mass: raw[0] });
    }
    require_compatible(m1, p, 1)?;
    require_compatible(m2, p, 2)?;
    raw[0] = 0.0;
    // rounding in the sweeps can leave tiny negatives
    for v in raw.iter_mut() {
        if *v < 0.0 && *v > -TOL_SUM {
            *v = 0.0;
        }
    }
    let report = validate_mass(m1.frame(), &raw).map_err(|_| CombinationError::FrameMismatch)?;
    if let Some(v) = report.first() {
        return Err(CombinationError::InvalidOutput(v.clone()));
    }
    let result = MassAssignment::new(m1.frame().clone(), raw)
        .map_err(|_| CombinationError::InvalidOutput(Violation::MassSum { total: f64::NAN }))?;

    if let Compatibility::Incompatible { subset, probability, belief } =
        check_compatible(&belief_from_mass(&result), p.dist()).map_err(|_| CombinationError::FrameMismatch)?
    {
        return Err(CombinationError::Unacceptable(Clause::Compatibility {
            subset,
            probability,
            belief,
        }));
    }
    let bound = nonspecificity(m1).min(nonspecificity(m2));
    let n = nonspecificity(&result);
    if n > bound + TOL_SUM {
        return Err(CombinationError::Unacceptable(Clause::Nonspecificity { result: n, bound }));
    }
    Ok(result)
}

/// Result of a left fold, with the nonspecificity after each step.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationOutcome {
    pub mass: MassAssignment,
    /// `trace[k]` is the nonspecificity after step `k + 1` (combining the first
    /// `k + 2` inputs).
    pub nonspecificity_trace: Vec<f64>,
}

/// Left fold `C(C(…C(m1, m2)…), mr)` with acceptability checked at each step.
/// Errors carry the 1-based step index.
pub fn combine_many_traced(
    rule: &dyn CombinationRule,
    masses: &[MassAssignment],
    p: &TrueProbability,
) -> Result<CombinationOutcome, CombinationError> {
    let (first, rest) = match masses {
        [first, rest @ ..] if !rest.is_empty() => (first, rest),
        _ => return Err(CombinationError::TooFewInputs(masses.len())),
    };
    let mut acc = first.clone();
    let mut trace = Vec::with_capacity(rest.len());
    for (k, m) in rest.iter().enumerate() {
        acc = combine_checked(rule, &acc, m, p).map_err(|e| CombinationError::AtStep {
            step: k + 1,
            source: Box::new(e),
        })?;
        trace.push(nonspecificity(&acc));
    }
    Ok(CombinationOutcome {
        mass: acc,
        nonspecificity_trace: trace,
    })
}

pub fn combine_many(
    rule: &dyn CombinationRule,
    masses: &[MassAssignment],
    p: &TrueProbability,
) -> Result<MassAssignment, CombinationError> {
    combine_many_traced(rule, masses, p).map(|o| o.mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::{as_probability, ProbabilityDistribution};
    use crate::frame::Frame;
    use crate::sampling::random_mass;
    use rand::SeedableRng;

    fn frame(n: usize) -> Frame {
        Frame::indexed(n).unwrap()
    }

    fn set(elems: &[usize]) -> SubsetMask {
        SubsetMask::from_elements(elems.iter().copied())
    }

    fn truth(n: usize, support: &[usize]) -> TrueProbability {
        TrueProbability::stated(ProbabilityDistribution::uniform_on(frame(n), set(support)).unwrap())
    }

    fn categorical(n: usize, s: &[usize]) -> MassAssignment {
        MassAssignment::categorical(frame(n), set(s)).unwrap()
    }

    #[test]
    fn vacuous_is_identity_of_conjunction() {
        let m = MassAssignment::from_focal(frame(3), [(set(&[0]), 0.3), (set(&[1, 2]), 0.7)]).unwrap();
        let out = Conjunctive.apply(&MassAssignment::vacuous(frame(3)), &m).unwrap();
        assert_eq!(out, m.values());
    }

    #[test]
    fn vacuous_pair_stays_vacuous() {
        let v = MassAssignment::vacuous(frame(4));
        let p = truth(4, &[1, 3]);
        assert_eq!(combine_checked(&Conjunctive, &v, &v, &p).unwrap(), v);
    }

    #[test]
    fn categorical_intersection() {
        let p = truth(6, &[2]);
        let c1 = categorical(6, &[0, 1, 2, 3]);
        let c2 = categorical(6, &[1, 2, 4]);
        let out = combine_checked(&Conjunctive, &c1, &c2, &p).unwrap();
        assert_eq!(out, categorical(6, &[1, 2]));
        assert_eq!(nonspecificity(&out), 1.0);
    }

    #[test]
    fn half_split_against_categorical() {
        let c = set(&[0, 1]);
        let m1 = MassAssignment::from_focal(frame(3), [(c, 0.5), (SubsetMask::full(3), 0.5)]).unwrap();
        let out = Conjunctive.apply(&m1, &categorical(3, &[0, 1])).unwrap();
        assert_eq!(out[c.index()], 1.0);
        assert_eq!(out.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn disjoint_categorical_evidence_conflicts() {
        let (c1, c2) = (categorical(4, &[0, 1]), categorical(4, &[2, 3]));
        let raw = Conjunctive.apply(&c1, &c2).unwrap();
        assert_eq!(raw[0], 1.0);
        // no truth is compatible with both, so the checked call always fails
        for support in [&[0][..], &[2], &[0, 2]] {
            assert!(combine_checked(&Conjunctive, &c1, &c2, &truth(4, support)).is_err());
        }
        let p = TrueProbability::stated(ProbabilityDistribution::uniform(frame(4)));
        assert!(matches!(
            combine_checked(&Conjunctive, &c1, &c2, &p),
            Err(CombinationError::Conflict { mass }) if mass == 1.0
        ));
        assert!(matches!(
            combine_checked(&DempsterNormalized, &c1, &c2, &p),
            Err(CombinationError::TotalConflict)
        ));
    }

    #[test]
    fn conflict_is_an_error_not_normalized() {
        // truth uniform on {0,1}; both singleton masses are compatible but disagree
        let p = truth(3, &[0, 1]);
        let a = MassAssignment::from_probability(p.dist());
        let err = combine_checked(&Conjunctive, &a, &a, &p).unwrap_err();
        assert!(matches!(err, CombinationError::Conflict { mass } if (mass - 0.5).abs() < 1e-12));
    }

    #[test]
    fn dempster_normalization_can_break_acceptability() {
        let p = truth(3, &[0, 1]);
        let a = MassAssignment::from_probability(p.dist());
        // renormalizing the self-conflict gives back p itself, which is acceptable here
        let out = combine_checked(&DempsterNormalized, &a, &a, &p).unwrap();
        assert_eq!(as_probability(&out).unwrap().values(), p.dist().values());

        let q = truth(2, &[0, 1]);
        let m1 = MassAssignment::from_focal(frame(2), [(set(&[0]), 0.5), (set(&[0, 1]), 0.5)]).unwrap();
        let m2 = MassAssignment::from_focal(frame(2), [(set(&[1]), 0.5), (set(&[0, 1]), 0.5)]).unwrap();
        let out = DempsterNormalized.apply(&m1, &m2).unwrap();
        assert!((out[set(&[0]).index()] - 1.0 / 3.0).abs() < 1e-12);
        assert!(combine_checked(&DempsterNormalized, &m1, &m2, &q).is_ok());
        assert!(matches!(
            DempsterNormalized.apply(&categorical(2, &[0]), &categorical(2, &[1])),
            Err(CombinationError::TotalConflict)
        ));
    }

    #[test]
    fn incompatible_input_is_rejected() {
        let p = truth(4, &[0, 1]);
        let err = combine_checked(&Conjunctive, &MassAssignment::vacuous(frame(4)), &categorical(4, &[1, 2]), &p)
            .unwrap_err();
        assert!(matches!(err, CombinationError::InputIncompatible { input: 2, subset, .. } if subset == set(&[1, 2])));
    }

    #[test]
    fn unacceptable_rule_output_is_caught() {
        struct Widen;
        impl CombinationRule for Widen {
            fn name(&self) -> &str {
                "widen"
            }
            fn apply(&self, m1: &MassAssignment, _: &MassAssignment) -> Result<Vec<f64>, CombinationError> {
                Ok(MassAssignment::vacuous(m1.frame().clone()).into_values())
            }
        }
        struct Wrong;
        impl CombinationRule for Wrong {
            fn name(&self) -> &str {
                "wrong"
            }
            fn apply(&self, m1: &MassAssignment, _: &MassAssignment) -> Result<Vec<f64>, CombinationError> {
                Ok(MassAssignment::categorical(m1.frame().clone(), SubsetMask::singleton(3))
                    .unwrap()
                    .into_values())
            }
        }
        let p = truth(4, &[0]);
        let c = categorical(4, &[0, 1]);
        assert!(matches!(
            combine_checked(&Widen, &c, &c, &p),
            Err(CombinationError::Unacceptable(Clause::Nonspecificity { .. }))
        ));
        assert!(matches!(
            combine_checked(&Wrong, &c, &c, &p),
            Err(CombinationError::Unacceptable(Clause::Compatibility { .. }))
        ));
    }

    #[test]
    fn fold_of_categorical_masses_is_the_intersection() {
        let p = truth(8, &[3]);
        let masses = vec![
            categorical(8, &[0, 1, 2, 3, 4]),
            categorical(8, &[1, 2, 3, 5, 6]),
            categorical(8, &[2, 3, 7]),
        ];
        let out = combine_many_traced(&Conjunctive, &masses, &p).unwrap();
        assert_eq!(out.mass, categorical(8, &[2, 3]));
        assert_eq!(out.nonspecificity_trace.len(), 2);
        assert!(out.nonspecificity_trace[0] >= out.nonspecificity_trace[1]);
        let two = combine_many(&Conjunctive, &masses[..2], &p).unwrap();
        assert_eq!(two, combine_checked(&Conjunctive, &masses[0], &masses[1], &p).unwrap());
    }

    #[test]
    fn fold_reaching_probability_is_fixed() {
        let p = truth(5, &[2]);
        let masses = vec![
            categorical(5, &[0, 1, 2, 3]),
            categorical(5, &[1, 2, 3]),
            categorical(5, &[2, 3, 4]),
            categorical(5, &[2, 4]),
            categorical(5, &[0, 2]),
        ];
        let out = combine_many_traced(&Conjunctive, &masses, &p).unwrap();
        assert_eq!(as_probability(&out.mass).unwrap().values(), p.dist().values());
        assert_eq!(out.nonspecificity_trace, vec![3f64.log2(), 1.0, 0.0, 0.0]);
    }

    #[test]
    fn fold_errors_carry_step() {
        let p = truth(4, &[0]);
        assert!(matches!(
            combine_many(&Conjunctive, &[categorical(4, &[0])], &p),
            Err(CombinationError::TooFewInputs(1))
        ));
        let err = combine_many(
            &Conjunctive,
            &[categorical(4, &[0, 1]), categorical(4, &[0, 1, 2]), categorical(4, &[1, 2])],
            &p,
        )
        .unwrap_err();
        assert_eq!(err.step(), Some(2));
        assert!(matches!(err.root(), CombinationError::InputIncompatible { input: 2, .. }));
    }

    #[test]
    fn pair_and_commonality_routes_agree() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for n in 1..=7 {
            for _ in 0..20 {
                let f = frame(n);
                let a = random_mass(&f, 8, &mut rng);
                let b = random_mass(&f, 8, &mut rng);
                let x = conjunctive_by_pairs(&a, &b);
                let y = conjunctive_by_commonality(&a, &b);
                for (u, v) in x.iter().zip(&y) {
                    assert!((u - v).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rules_by_name() {
        assert_eq!(rule_by_name("conjunctive").unwrap().name(), "conjunctive");
        assert_eq!(rule_by_name("dempster").unwrap().name(), "dempster");
        assert!(rule_by_name("yager").is_none());
    }
}
