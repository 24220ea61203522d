//! Random masses, distributions and compatible beliefs for experiments and
//! property tests.
//!
//! The compatible-belief sampler draws an arbitrary mass and then repairs it
//! toward the vacuous mass until `Bel ≤ P`. It reaches only part of the
//! compatible polytope: repaired masses are biased toward the full frame.

use rand::Rng;

use crate::belief::{MassAssignment, ProbabilityDistribution};
use crate::compatibility::repair_towards_vacuous;
use crate::frame::{Frame, SubsetMask};
use crate::reident::{CategoryGroup, GeneralizationScheme, Generalizer, Interval, Table, Value};

/// A mass with between one and `max_focal` focal elements drawn uniformly
/// among the non-empty subsets, with uniform random weights.
pub fn random_mass<R: Rng + ?Sized>(frame: &Frame, max_focal: usize, rng: &mut R) -> MassAssignment {
    let n = frame.size();
    let focal = rng.gen_range(1..=max_focal.max(1));
    let mut mass = vec![0.0; frame.lattice_len()];
    for _ in 0..focal {
        let set = rng.gen_range(1..1u64 << n) as usize;
        mass[set] += rng.gen_range(0.05..1.0);
    }
    normalize(&mut mass);
    MassAssignment::new(frame.clone(), mass).expect("normalized nonnegative mass")
}

/// A distribution with random weights on a random non-empty support.
pub fn random_distribution<R: Rng + ?Sized>(frame: &Frame, rng: &mut R) -> ProbabilityDistribution {
    let n = frame.size();
    let support = SubsetMask::from_bits(rng.gen_range(1..1u64 << n));
    let mut p: Vec<f64> = (0..n)
        .map(|i| if support.contains(i) { rng.gen_range(0.05..1.0) } else { 0.0 })
        .collect();
    normalize(&mut p);
    ProbabilityDistribution::new(frame.clone(), p).expect("normalized nonnegative vector")
}

/// A random mass whose belief is compatible with `p`.
pub fn sample_compatible_mass<R: Rng + ?Sized>(
    p: &ProbabilityDistribution,
    max_focal: usize,
    rng: &mut R,
) -> MassAssignment {
    let frame = p.frame();
    let mut mass = random_mass(frame, max_focal, rng).into_values();
    repair_towards_vacuous(&mut mass, &p.set_function());
    MassAssignment::new(frame.clone(), mass).expect("repair preserves validity")
}

/// A random mass whose focal elements all contain `core`. Such a belief is
/// compatible with every probability supported inside `core`.
pub fn random_mass_containing<R: Rng + ?Sized>(
    frame: &Frame,
    core: SubsetMask,
    max_focal: usize,
    rng: &mut R,
) -> MassAssignment {
    let n = frame.size();
    let focal = rng.gen_range(1..=max_focal.max(1));
    let mut mass = vec![0.0; frame.lattice_len()];
    for _ in 0..focal {
        let extra = SubsetMask::from_bits(rng.gen_range(0..1u64 << n));
        let set = core.union(extra);
        if set.is_empty() {
            continue;
        }
        mass[set.index()] += rng.gen_range(0.05..1.0);
    }
    if mass.iter().all(|&v| v == 0.0) {
        mass[frame.full().index()] = 1.0;
    }
    normalize(&mut mass);
    MassAssignment::new(frame.clone(), mass).expect("normalized nonnegative mass")
}

/// A table of `n` records and `m` attributes with a covering scheme. Each
/// attribute is, at random, an integer column in `0..20` cut into intervals,
/// a categorical column partitioned into groups, or an integer column published
/// as is.
pub fn random_generalized_table<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> (Table, GeneralizationScheme) {
    let names: Vec<String> = (0..m).map(|j| format!("v{j}")).collect();
    let mut columns: Vec<Vec<Value>> = Vec::with_capacity(m);
    let mut gens = Vec::with_capacity(m);
    for _ in 0..m {
        match rng.gen_range(0..3) {
            0 => {
                columns.push((0..n).map(|_| Value::Int(rng.gen_range(0..20))).collect());
                let mut cuts: Vec<i64> = (1..20).filter(|_| rng.gen_bool(0.3)).collect();
                cuts.insert(0, 0);
                cuts.push(20);
                let ivs = cuts.windows(2).map(|w| Interval::new(w[0], w[1] - 1)).collect();
                gens.push(Generalizer::Intervals(ivs));
            }
            1 => {
                let k = rng.gen_range(2..=6);
                columns.push((0..n).map(|_| Value::Cat(format!("c{}", rng.gen_range(0..k)))).collect());
                let n_groups = rng.gen_range(1..=k);
                let mut groups: Vec<CategoryGroup> = (0..n_groups)
                    .map(|g| CategoryGroup { label: format!("g{g}"), members: Vec::new() })
                    .collect();
                for c in 0..k {
                    let g = if c < n_groups { c } else { rng.gen_range(0..n_groups) };
                    groups[g].members.push(format!("c{c}"));
                }
                gens.push(Generalizer::Groups(groups));
            }
            _ => {
                columns.push((0..n).map(|_| Value::Int(rng.gen_range(0..4))).collect());
                gens.push(Generalizer::Identity);
            }
        }
    }
    let rows = (0..n).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect();
    let table = Table::new(names.clone(), rows).expect("rectangular table");
    let scheme = GeneralizationScheme::new(names.into_iter().zip(gens)).expect("well-formed scheme");
    (table, scheme)
}

fn normalize(values: &mut [f64]) {
    let total: f64 = values.iter().sum();
    for v in values.iter_mut() {
        *v /= total;
    }
}
