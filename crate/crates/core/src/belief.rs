//! Basic probability assignments, belief functions and probability
//! distributions over a [`Frame`], with validation and the pignistic
//! transformation.

use std::fmt;

use thiserror::Error;

use crate::frame::{mobius_in_place, zeta_in_place, Frame, FrameError, SubsetMask, TOL_SUM};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeliefError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("expected {expected} values for the frame, got {got}")]
    Length { expected: usize, got: usize },
    #[error("invalid set function: {0}")]
    Invalid(Violation),
    #[error("probability vector has {got} entries for a frame of size {expected}")]
    ProbabilityLength { expected: usize, got: usize },
    #[error("invalid probability: {0}")]
    InvalidProbability(String),
    #[error("frames differ")]
    FrameMismatch,
}

/// A single broken axiom, with the subsets that witness it.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// A value that must be exact (`m(∅)`, `Bel(∅)`, `Bel(X)`) is off.
    Boundary { subset: SubsetMask, value: f64, expected: f64 },
    /// A value falls outside `[0, 1]` or is not finite.
    OutOfRange { subset: SubsetMask, value: f64 },
    NegativeMass { subset: SubsetMask, value: f64 },
    MassSum { total: f64 },
    /// `subset ⊂ superset` but `Bel(subset) > Bel(superset)`.
    Monotonicity { subset: SubsetMask, superset: SubsetMask, lower: f64, upper: f64 },
    /// Möbius inverse of the candidate belief is negative at `subset`.
    TotalMonotonicity { subset: SubsetMask, mobius: f64 },
    /// The inclusion–exclusion inequality fails for the family `sets`.
    InclusionExclusion { sets: Vec<SubsetMask>, union_value: f64, bound: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Boundary { subset, value, expected } => {
                write!(f, "boundary condition at {subset}: value {value}, expected {expected}")
            }
            Violation::OutOfRange { subset, value } => {
                write!(f, "value {value} at {subset} is outside [0, 1]")
            }
            Violation::NegativeMass { subset, value } => write!(f, "negative mass {value} at {subset}"),
            Violation::MassSum { total } => write!(f, "masses sum to {total}, not 1"),
            Violation::Monotonicity { subset, superset, lower, upper } => write!(
                f,
                "monotonicity: Bel({subset}) = {lower} exceeds Bel({superset}) = {upper}"
            ),
            Violation::TotalMonotonicity { subset, mobius } => {
                write!(f, "total monotonicity: Möbius mass {mobius} at {subset}")
            }
            Violation::InclusionExclusion { sets, union_value, bound } => {
                write!(f, "inclusion-exclusion for [")?;
                for (i, s) in sets.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, "]: Bel(union) = {union_value} < {bound}")
            }
        }
    }
}

/// Every violation found by a validation pass, in discovery order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }

    fn into_result(self) -> Result<(), BeliefError> {
        match self.violations.into_iter().next() {
            None => Ok(()),
            Some(v) => Err(BeliefError::Invalid(v)),
        }
    }
}

/// How axiom (iii) of belief functions is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MonotonicityCheck {
    /// Nonnegativity of the Möbius inverse.
    #[default]
    Mobius,
    /// Möbius nonnegativity plus the inclusion–exclusion inequality enumerated
    /// directly for every family of two and three subsets. Frames up to 7 only.
    DirectUpToThree,
}

/// Largest frame accepted by [`MonotonicityCheck::DirectUpToThree`].
pub const DIRECT_CHECK_MAX_FRAME: usize = 7;

fn check_len(frame: &Frame, values: &[f64]) -> Result<(), BeliefError> {
    if values.len() != frame.lattice_len() {
        return Err(BeliefError::Length {
            expected: frame.lattice_len(),
            got: values.len(),
        });
    }
    Ok(())
}

/// Checks the basic probability assignment axioms on a dense mass vector.
pub fn validate_mass(frame: &Frame, mass: &[f64]) -> Result<ValidationReport, BeliefError> {
    check_len(frame, mass)?;
    let mut report = ValidationReport::default();
    if mass[0].abs() > TOL_SUM {
        report.violations.push(Violation::Boundary {
            subset: SubsetMask::EMPTY,
            value: mass[0],
            expected: 0.0,
        });
    }
    for (i, &v) in mass.iter().enumerate() {
        let subset = SubsetMask::from_index(i);
        if !v.is_finite() || v > 1.0 + TOL_SUM {
            report.violations.push(Violation::OutOfRange { subset, value: v });
        } else if v < -TOL_SUM {
            report.violations.push(Violation::NegativeMass { subset, value: v });
        }
    }
    let total: f64 = mass.iter().sum();
    if (total - 1.0).abs() > TOL_SUM || !total.is_finite() {
        report.violations.push(Violation::MassSum { total });
    }
    Ok(report)
}

/// Checks the belief function axioms on a dense vector of `Bel` values.
pub fn validate_belief(
    frame: &Frame,
    bel: &[f64],
    mode: MonotonicityCheck,
) -> Result<ValidationReport, BeliefError> {
    check_len(frame, bel)?;
    let full = frame.full();
    let mut report = ValidationReport::default();

    if bel[0].abs() > TOL_SUM {
        report.violations.push(Violation::Boundary {
            subset: SubsetMask::EMPTY,
            value: bel[0],
            expected: 0.0,
        });
    }
    if (bel[full.index()] - 1.0).abs() > TOL_SUM {
        report.violations.push(Violation::Boundary {
            subset: full,
            value: bel[full.index()],
            expected: 1.0,
        });
    }
    for (i, &v) in bel.iter().enumerate() {
        if !v.is_finite() || !(-TOL_SUM..=1.0 + TOL_SUM).contains(&v) {
            report.violations.push(Violation::OutOfRange {
                subset: SubsetMask::from_index(i),
                value: v,
            });
        }
    }
    // Covering pairs A ⊂ A ∪ {e} suffice for monotonicity.
    for a in frame.subsets() {
        for e in full.difference(a).elements() {
            let sup = a.with(e);
            if bel[a.index()] > bel[sup.index()] + TOL_SUM {
                report.violations.push(Violation::Monotonicity {
                    subset: a,
                    superset: sup,
                    lower: bel[a.index()],
                    upper: bel[sup.index()],
                });
            }
        }
    }
    let mut mobius = bel.to_vec();
    mobius_in_place(&mut mobius);
    for (i, &m) in mobius.iter().enumerate() {
        if m < -TOL_SUM {
            report.violations.push(Violation::TotalMonotonicity {
                subset: SubsetMask::from_index(i),
                mobius: m,
            });
        }
    }
    if mode == MonotonicityCheck::DirectUpToThree {
        if frame.size() > DIRECT_CHECK_MAX_FRAME {
            return Err(FrameError::TooLarge {
                size: frame.size(),
                max: DIRECT_CHECK_MAX_FRAME,
            }
            .into());
        }
        direct_inclusion_exclusion(bel, &mut report);
    }
    Ok(report)
}

fn direct_inclusion_exclusion(bel: &[f64], report: &mut ValidationReport) {
    let len = bel.len();
    for a in 0..len {
        for b in a + 1..len {
            let bound = bel[a] + bel[b] - bel[a & b];
            if bel[a | b] < bound - TOL_SUM {
                report.violations.push(Violation::InclusionExclusion {
                    sets: vec![SubsetMask::from_index(a), SubsetMask::from_index(b)],
                    union_value: bel[a | b],
                    bound,
                });
            }
            for c in b + 1..len {
                let bound = bel[a] + bel[b] + bel[c] - bel[a & b] - bel[a & c] - bel[b & c]
                    + bel[a & b & c];
                if bel[a | b | c] < bound - TOL_SUM {
                    report.violations.push(Violation::InclusionExclusion {
                        sets: vec![
                            SubsetMask::from_index(a),
                            SubsetMask::from_index(b),
                            SubsetMask::from_index(c),
                        ],
                        union_value: bel[a | b | c],
                        bound,
                    });
                }
            }
        }
    }
}

/// A basic probability assignment `m: 2^X → [0, 1]` stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct MassAssignment {
    frame: Frame,
    mass: Vec<f64>,
}

impl MassAssignment {
    /// Validates and wraps a dense mass vector indexed by subset mask.
    pub fn new(frame: Frame, mass: Vec<f64>) -> Result<Self, BeliefError> {
        validate_mass(&frame, &mass)?.into_result()?;
        Ok(Self { frame, mass })
    }

    /// Builds a mass from `(subset, value)` pairs; repeated subsets accumulate.
    pub fn from_focal<I>(frame: Frame, focal: I) -> Result<Self, BeliefError>
    where
        I: IntoIterator<Item = (SubsetMask, f64)>,
    {
        let mut mass = vec![0.0; frame.lattice_len()];
        for (subset, value) in focal {
            frame.check(subset)?;
            mass[subset.index()] += value;
        }
        Self::new(frame, mass)
    }

    /// Total ignorance: `m(X) = 1`.
    pub fn vacuous(frame: Frame) -> Self {
        let full = frame.full();
        Self::categorical(frame, full).expect("full set is non-empty")
    }

    /// `m(set) = 1`.
    pub fn categorical(frame: Frame, set: SubsetMask) -> Result<Self, BeliefError> {
        Self::from_focal(frame, [(set, 1.0)])
    }

    /// The singleton-carried mass whose belief is the given probability.
    pub fn from_probability(p: &ProbabilityDistribution) -> Self {
        let mut mass = vec![0.0; p.frame.lattice_len()];
        for (i, &v) in p.p.iter().enumerate() {
            mass[SubsetMask::singleton(i).index()] = v;
        }
        Self {
            frame: p.frame.clone(),
            mass,
        }
    }

    pub(crate) fn from_parts_unchecked(frame: Frame, mass: Vec<f64>) -> Self {
        Self { frame, mass }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn mass(&self, subset: SubsetMask) -> f64 {
        self.mass.get(subset.index()).copied().unwrap_or(0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.mass
    }

    pub fn into_values(self) -> Vec<f64> {
        self.mass
    }

    /// Subsets with nonzero mass, in increasing mask order.
    pub fn focal_elements(&self) -> impl Iterator<Item = (SubsetMask, f64)> + '_ {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (SubsetMask::from_index(i), v))
    }

    /// True when every set of two or more elements carries mass below `TOL_SUM`.
    pub fn is_singleton_carried(&self) -> bool {
        self.focal_elements()
            .all(|(s, v)| s.len() <= 1 || v.abs() < TOL_SUM)
    }

    /// Convex mixture `λ·self + (1 − λ)·other`.
    pub fn mix(&self, other: &MassAssignment, lambda: f64) -> Result<MassAssignment, BeliefError> {
        if self.frame != other.frame {
            return Err(BeliefError::FrameMismatch);
        }
        let mass = self
            .mass
            .iter()
            .zip(&other.mass)
            .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
            .collect();
        MassAssignment::new(self.frame.clone(), mass)
    }
}

/// A belief function `Bel: 2^X → [0, 1]` stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefFunction {
    frame: Frame,
    bel: Vec<f64>,
}

impl BeliefFunction {
    /// Validates (boundary, monotonicity, total monotonicity) and wraps.
    pub fn new(frame: Frame, bel: Vec<f64>) -> Result<Self, BeliefError> {
        validate_belief(&frame, &bel, MonotonicityCheck::Mobius)?.into_result()?;
        Ok(Self { frame, bel })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn value(&self, subset: SubsetMask) -> f64 {
        self.bel.get(subset.index()).copied().unwrap_or(0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.bel
    }
}

/// `Bel(A) = Σ_{B ⊆ A} m(B)`.
pub fn belief_from_mass(m: &MassAssignment) -> BeliefFunction {
    let mut bel = m.mass.clone();
    zeta_in_place(&mut bel);
    BeliefFunction {
        frame: m.frame.clone(),
        bel,
    }
}

/// `m(A) = Σ_{B ⊆ A} (−1)^{|A|−|B|} Bel(B)`.
///
/// Fails with the first subset whose Möbius coefficient is negative beyond
/// tolerance, which happens only if `bel` is not totally monotone.
pub fn mass_from_belief(bel: &BeliefFunction) -> Result<MassAssignment, BeliefError> {
    let mut mass = bel.bel.clone();
    mobius_in_place(&mut mass);
    if let Some((i, &v)) = mass.iter().enumerate().find(|(_, &v)| v < -TOL_SUM) {
        return Err(BeliefError::Invalid(Violation::TotalMonotonicity {
            subset: SubsetMask::from_index(i),
            mobius: v,
        }));
    }
    MassAssignment::new(bel.frame.clone(), mass)
}

/// A point-mass probability vector over the elements of a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution {
    frame: Frame,
    p: Vec<f64>,
}

impl ProbabilityDistribution {
    pub fn new(frame: Frame, p: Vec<f64>) -> Result<Self, BeliefError> {
        if p.len() != frame.size() {
            return Err(BeliefError::ProbabilityLength {
                expected: frame.size(),
                got: p.len(),
            });
        }
        if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < -TOL_SUM) {
            return Err(BeliefError::InvalidProbability(format!(
                "p({}) = {v}",
                frame.label(i)
            )));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > TOL_SUM {
            return Err(BeliefError::InvalidProbability(format!("sums to {total}")));
        }
        Ok(Self { frame, p })
    }

    pub fn uniform(frame: Frame) -> Self {
        let n = frame.size();
        Self {
            frame,
            p: vec![1.0 / n as f64; n],
        }
    }

    /// Uniform over a non-empty subset, zero elsewhere.
    pub fn uniform_on(frame: Frame, support: SubsetMask) -> Result<Self, BeliefError> {
        frame.check(support)?;
        if support.is_empty() {
            return Err(BeliefError::InvalidProbability("empty support".into()));
        }
        let w = 1.0 / support.len() as f64;
        let p = (0..frame.size())
            .map(|i| if support.contains(i) { w } else { 0.0 })
            .collect();
        Ok(Self { frame, p })
    }

    pub fn dirac(frame: Frame, element: usize) -> Result<Self, BeliefError> {
        Self::uniform_on(frame, SubsetMask::singleton(element))
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    pub fn prob(&self, element: usize) -> f64 {
        self.p[element]
    }

    /// `P(A) = Σ_{x ∈ A} p(x)`.
    pub fn prob_of(&self, subset: SubsetMask) -> f64 {
        subset.elements().filter_map(|i| self.p.get(i)).sum()
    }

    /// `P(A)` for every subset, as a dense lattice vector.
    pub fn set_function(&self) -> Vec<f64> {
        let mut values = vec![0.0; self.frame.lattice_len()];
        for (i, &v) in self.p.iter().enumerate() {
            values[SubsetMask::singleton(i).index()] = v;
        }
        zeta_in_place(&mut values);
        values
    }

    /// Elements attaining the maximum probability.
    pub fn argmax(&self) -> usize {
        self.p
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best })
            .0
    }
}

/// `P_Bel({x}) = Σ_{B ∋ x} m(B) / |B|`.
pub fn pignistic(m: &MassAssignment) -> ProbabilityDistribution {
    let mut p = vec![0.0; m.frame.size()];
    for (set, v) in m.focal_elements() {
        let share = v / set.len() as f64;
        for e in set.elements() {
            p[e] += share;
        }
    }
    ProbabilityDistribution {
        frame: m.frame.clone(),
        p,
    }
}

/// The singleton masses as a distribution, or `None` if any set with two or
/// more elements carries mass of at least `TOL_SUM`.
pub fn as_probability(m: &MassAssignment) -> Option<ProbabilityDistribution> {
    if !m.is_singleton_carried() {
        return None;
    }
    let p = (0..m.frame.size())
        .map(|i| m.mass(SubsetMask::singleton(i)))
        .collect();
    Some(ProbabilityDistribution {
        frame: m.frame.clone(),
        p,
    })
}
