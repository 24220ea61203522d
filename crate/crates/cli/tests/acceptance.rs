//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use reid_cli::risk::RiskReport;
use reid_core::belief::{belief_from_mass, mass_from_belief, pignistic, MassAssignment, ProbabilityDistribution};
use reid_core::combination::{combine_checked, conjunctive_rule};
use reid_core::compatibility::{
    is_compatible, is_compatible_probability, support, Compatibility, ProbabilityVerdict, TrueProbability,
};
use reid_core::frame::{zeta_transform, Frame, SubsetMask, TOL_SUM};
use reid_core::measures::{nonspecificity, pignistic_entropy, transfer_mass};
use reid_core::reident::{
    adversarial_missing_record, candidate_set, mask_generalize, n3_proposition_truth, n3_reident_belief,
    n3_scenario, reidentify_belief, true_probability, AttributeSubset, AuxiliaryInfo, GeneralizationScheme,
    Generalizer, Interval, Table, Value,
};
use reid_core::sampling::{
    random_distribution, random_generalized_table, random_mass, random_mass_containing, sample_compatible_mass,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn frame(n: usize) -> Frame {
    Frame::indexed(n).unwrap()
}

fn set(elems: &[usize]) -> SubsetMask {
    SubsetMask::from_elements(elems.iter().copied())
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

// Masses of the two transfer examples, with the exact rationals behind the
// printed decimals.
fn first_example() -> (MassAssignment, MassAssignment) {
    let before = MassAssignment::from_focal(frame(8), [(set(&[0, 1, 2, 3, 4]), 5.0 / 13.0), (SubsetMask::full(8), 8.0 / 13.0)])
        .unwrap();
    let after = transfer_mass(&before, set(&[0, 1]), SubsetMask::full(8), 4.0 / 13.0).unwrap();
    (before, after)
}

fn second_example() -> (MassAssignment, MassAssignment) {
    let before =
        MassAssignment::from_focal(frame(10), [(SubsetMask::full(10), 5.0 / 6.0), (set(&[0, 1]), 1.0 / 6.0)]).unwrap();
    let after = transfer_mass(&before, set(&[2, 3, 4, 5, 6, 7, 8, 9]), SubsetMask::full(10), 5.0 / 6.0).unwrap();
    (before, after)
}

fn entropy_golden() -> Outcome {
    let (b1, a1) = first_example();
    let (b2, a2) = second_example();
    let cases = [
        (&b1, 2.0317593),
        (&a1, 1.8300099),
        (&b2, 2.2538579),
        (&a2, 2.2989538),
    ];
    let mut worst_err: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    for (m, expected) in cases {
        let (h, t) = timed(|| pignistic_entropy(m));
        worst_err = worst_err.max((h - expected).abs());
        slowest = slowest.max(t);
    }
    outcome(
        worst_err < 1e-4 && slowest < Duration::from_millis(1),
        format!("max |err| = {worst_err:.2e}, slowest {slowest:?}"),
    )
}

fn pignistic_golden() -> Outcome {
    let (b1, _) = first_example();
    let (b2, a2) = second_example();
    let p1 = pignistic(&b1);
    let p2 = pignistic(&b2);
    let q2 = pignistic(&a2);
    let checks = [
        (p1.prob(0), 0.15384614),
        (p1.prob(5), 0.07692307),
        (p2.prob(0), 0.16666664),
        (p2.prob(2), 0.08333332),
        (q2.prob(0), 0.08333332),
        (q2.prob(2), 0.10416665),
    ];
    let mut worst: f64 = 0.0;
    let mut pass = true;
    for (got, want) in checks {
        worst = worst.max((got - want).abs());
        pass &= (got - want).abs() < 1e-6;
    }
    // components within each group are equal
    pass &= (0..5).all(|i| p1.prob(i) == p1.prob(0)) && (5..8).all(|i| p1.prob(i) == p1.prob(5));
    pass &= (2..10).all(|i| q2.prob(i) == q2.prob(2)) && q2.prob(1) == q2.prob(0);
    outcome(pass, format!("max |err| = {worst:.2e}"))
}

fn nonspecificity_transfer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let start = Instant::now();
    let (mut violations, mut done, mut worst) = (0, 0, 0.0f64);
    while done < 1000 {
        let n = rng.gen_range(2..=8);
        let f = frame(n);
        let m = random_mass(&f, 8, &mut rng);
        let sources: Vec<SubsetMask> = m.focal_elements().map(|(s, _)| s).filter(|s| s.len() >= 2).collect();
        if sources.is_empty() {
            continue;
        }
        let c2 = sources[rng.gen_range(0..sources.len())];
        let c1 = loop {
            let c = SubsetMask::from_bits(rng.gen::<u64>() & c2.bits());
            if !c.is_empty() && c != c2 {
                break c;
            }
        };
        let delta = rng.gen_range(0.0..=m.mass(c2));
        let after = transfer_mass(&m, c1, c2, delta).unwrap();
        let (n0, n1) = (nonspecificity(&m), nonspecificity(&after));
        let closed = n0 + delta * ((c1.len() as f64).log2() - (c2.len() as f64).log2());
        worst = worst.max((n1 - closed).abs());
        if n1 > n0 || (n1 - closed).abs() >= 1e-9 {
            violations += 1;
        }
        done += 1;
    }
    let elapsed = start.elapsed();
    outcome(
        violations == 0 && elapsed < Duration::from_secs(5),
        format!("{violations} violations in 1000, closed-form max err {worst:.2e}, {elapsed:?}"),
    )
}

fn naive_zeta(values: &[f64]) -> Vec<f64> {
    (0..values.len())
        .map(|a| (0..values.len()).filter(|b| b & !a == 0).map(|b| values[b]).sum())
        .collect()
}

fn mobius_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut zeta_worst: f64 = 0.0;
    for k in 0..500 {
        let n = rng.gen_range(1..=8);
        let f = frame(n);
        let m = random_mass(&f, 1 << n, &mut rng);
        let back = mass_from_belief(&belief_from_mass(&m)).unwrap();
        for (a, b) in m.values().iter().zip(back.values()) {
            worst = worst.max((a - b).abs());
        }
        if n <= 6 && k % 2 == 0 {
            let fast = zeta_transform(m.values()).unwrap();
            for (a, b) in fast.iter().zip(naive_zeta(m.values())) {
                zeta_worst = zeta_worst.max((a - b).abs());
            }
        }
    }
    outcome(
        worst < 1e-9 && zeta_worst < 1e-12,
        format!("round trip max err {worst:.2e}, zeta vs naive max err {zeta_worst:.2e}"),
    )
}

fn random_tables() -> Vec<(Table, GeneralizationScheme)> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    (0..200)
        .map(|_| {
            let n = rng.gen_range(1..=16);
            let m = rng.gen_range(1..=4);
            random_generalized_table(n, m, &mut rng)
        })
        .collect()
}

fn compatibility_of_candidate_beliefs(tables: &[(Table, GeneralizationScheme)]) -> Outcome {
    let (mut checks, mut violations) = (0, 0);
    for (x, scheme) in tables {
        let y = mask_generalize(x, scheme).unwrap();
        for row in y.rows() {
            let truth = true_probability(row, x, scheme).unwrap();
            for attrs in AttributeSubset::all(x.n_attributes()) {
                let m = reidentify_belief(row, attrs, x, scheme, &AuxiliaryInfo::none()).unwrap();
                checks += 1;
                if !is_compatible(&belief_from_mass(&m), &truth).unwrap().is_compatible() {
                    violations += 1;
                }
            }
        }
    }
    outcome(violations == 0, format!("{violations} violations in {checks} beliefs"))
}

fn missing_record_incompatibility(tables: &[(Table, GeneralizationScheme)]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut checks, mut failures) = (0, 0);
    for (x, scheme) in tables {
        let y = mask_generalize(x, scheme).unwrap();
        let full = AttributeSubset::full(x.n_attributes());
        for row in y.rows() {
            let cands = candidate_set(row, x, scheme, full).unwrap();
            if cands.len() < 2 {
                continue;
            }
            let truth = true_probability(row, x, scheme).unwrap();
            let cmask = cands.to_mask(&x.frame().unwrap()).unwrap();
            for &x0 in cands.records() {
                let random_b = SubsetMask::from_bits(rng.gen::<u64>() & SubsetMask::full(x.n_records()).bits());
                for b in [SubsetMask::EMPTY, random_b] {
                    let m = adversarial_missing_record(row, x, scheme, b, x0).unwrap();
                    let c0 = b.union(cmask).without(x0);
                    checks += 1;
                    let ok = match is_compatible(&belief_from_mass(&m), &truth).unwrap() {
                        Compatibility::Incompatible { subset, probability, .. } => {
                            subset == c0 && (probability - (1.0 - 1.0 / cands.len() as f64)).abs() < 1e-9
                        }
                        Compatibility::Compatible => false,
                    };
                    if !ok {
                        failures += 1;
                    }
                }
            }
        }
    }
    outcome(failures == 0 && checks > 0, format!("{failures} failures in {checks} constructions"))
}

/// Compatible beliefs from two samplers: repair of an arbitrary mass, and
/// masses whose focal sets all contain the support.
fn sample_belief(p: &ProbabilityDistribution, rng: &mut ChaCha8Rng) -> MassAssignment {
    if rng.gen_bool(0.5) {
        sample_compatible_mass(p, 6, rng)
    } else {
        random_mass_containing(p.frame(), support(p), 6, rng)
    }
}

fn support_inclusion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = 0;
    for _ in 0..500 {
        let f = frame(rng.gen_range(1..=8));
        let p = random_distribution(&f, &mut rng);
        let m = sample_belief(&p, &mut rng);
        let compatible = is_compatible(&belief_from_mass(&m), &TrueProbability::stated(p.clone()))
            .unwrap()
            .is_compatible();
        if !compatible || !support(&p).is_subset_of(support(&pignistic(&m))) {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{failures} failures in 500 pairs"))
}

fn dirac_results() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=8);
        let x0 = rng.gen_range(0..n);
        let p = ProbabilityDistribution::dirac(frame(n), x0).unwrap();
        let m = sample_belief(&p, &mut rng);
        let compatible = is_compatible(&belief_from_mass(&m), &TrueProbability::stated(p.clone()))
            .unwrap()
            .is_compatible();
        let no_mass_off_x0 = m.focal_elements().all(|(a, v)| a.contains(x0) || v <= TOL_SUM);
        let bet = pignistic(&m);
        let max = bet.values().iter().cloned().fold(f64::MIN, f64::max);
        if !compatible || !no_mass_off_x0 || bet.prob(x0) < max - TOL_SUM {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{failures} failures in 200 beliefs"))
}

fn outside_candidate_construction() -> Outcome {
    let records = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]];
    let y = [0, 0, 0];
    let m = n3_reident_belief(y, &records).unwrap();
    let truth = n3_proposition_truth(y, &records).unwrap();
    let s = n3_scenario(y, &records).unwrap();
    let compatible = is_compatible(&belief_from_mass(&m), &truth).unwrap().is_compatible();
    let bet = pignistic(&m);
    let expected = [0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0];
    let err = bet
        .values()
        .iter()
        .zip(expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let argmax = bet.argmax();
    outcome(
        compatible && err < 1e-12 && argmax == s.x0 && !s.neighbours.contains(&argmax),
        format!("compatible = {compatible}, max |err| = {err:.2e}, argmax = record {argmax}"),
    )
}

fn k_anonymity_example() -> Outcome {
    let x = Table::single_column("age", [18, 16, 19, 22, 24, 24].map(Value::Int)).unwrap();
    let scheme = GeneralizationScheme::new([(
        "age",
        Generalizer::Intervals(vec![Interval::new(15, 19), Interval::new(20, 25)]),
    )])
    .unwrap();
    let y = mask_generalize(&x, &scheme).unwrap();
    let mut classes: Vec<(String, usize)> = Vec::new();
    for row in y.rows() {
        match classes.iter_mut().find(|(l, _)| *l == row[0]) {
            Some((_, c)) => *c += 1,
            None => classes.push((row[0].clone(), 1)),
        }
    }
    let two_classes_of_three = classes.len() == 2 && classes.iter().all(|(_, c)| *c == 3);

    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("ages.csv"), "age\n18\n16\n19\n22\n24\n24\n").unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "input = \"ages.csv\"\n[scheme.age]\nintervals = [[15, 19], [20, 25]]\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_reid"))
        .args(["risk", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    let report: Option<RiskReport> = serde_json::from_slice(&out.stdout).ok();
    let risk_ok = out.status.success()
        && report.as_ref().is_some_and(|r| {
            r.records.iter().all(|rec| {
                rec.true_probability.probabilities.iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-12)
                    && rec.subsets.iter().all(|s| s.candidate_size == 3)
            })
        });
    outcome(
        two_classes_of_three && risk_ok,
        format!("classes {classes:?}, risk report candidate size 3 and P = 1/3 everywhere: {risk_ok}"),
    )
}

fn combination_convergence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut failures, mut reached) = (0, 0);
    let rule = conjunctive_rule();
    for _ in 0..100 {
        let n = rng.gen_range(1..=8);
        let f = frame(n);
        let p = random_distribution(&f, &mut rng);
        let truth = TrueProbability::stated(p.clone());
        let core = support(&p);
        let len = rng.gen_range(2..=5);
        let mut stream: Vec<MassAssignment> = (0..len).map(|_| random_mass_containing(&f, core, 4, &mut rng)).collect();
        if rng.gen_bool(0.6) {
            let at = rng.gen_range(0..len);
            stream[at] = MassAssignment::from_probability(&p);
        }
        let mut acc = stream[0].clone();
        let mut prev_n = nonspecificity(&acc);
        let mut fixed: Option<MassAssignment> = None;
        let mut ok = true;
        for m in &stream[1..] {
            let next = match combine_checked(&rule, &acc, m, &truth) {
                Ok(next) => next,
                Err(_) => {
                    ok = false;
                    break;
                }
            };
            let n_next = nonspecificity(&next);
            ok &= n_next <= prev_n + TOL_SUM;
            ok &= is_compatible(&belief_from_mass(&next), &truth).unwrap().is_compatible();
            if let Some(f) = &fixed {
                ok &= close(next.values(), f.values());
            }
            if fixed.is_none() && next.is_singleton_carried() {
                ok &= close(pignistic(&next).values(), p.values());
                // any further evidence containing the support leaves it unchanged
                let extra = random_mass_containing(&f, core, 4, &mut rng);
                let again = combine_checked(&rule, &next, &extra, &truth);
                ok &= again.is_ok_and(|a| close(a.values(), next.values()));
                fixed = Some(next.clone());
                reached += 1;
            }
            prev_n = n_next;
            acc = next;
        }
        if !ok {
            failures += 1;
        }
    }
    outcome(
        failures == 0 && reached > 0,
        format!("{failures} violations in 100 streams, {reached} reached a probability"),
    )
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= TOL_SUM)
}

/// A belief with one or two focal sets and weights in quarters, drawn
/// uniformly; compatibility and pignistic are evaluated directly from the
/// focal sets.
struct SmallBelief {
    focal: Vec<(u64, f64)>,
}

impl SmallBelief {
    fn draw(n: usize, rng: &mut ChaCha8Rng) -> Self {
        let pick = |rng: &mut ChaCha8Rng| rng.gen_range(1..1u64 << n);
        if rng.gen_bool(0.3) {
            return SmallBelief { focal: vec![(pick(rng), 1.0)] };
        }
        let (a, b) = loop {
            let (a, b) = (pick(rng), pick(rng));
            if a != b {
                break (a, b);
            }
        };
        let w = [0.25, 0.5, 0.75][rng.gen_range(0..3)];
        SmallBelief {
            focal: vec![(a, w), (b, 1.0 - w)],
        }
    }

    fn compatible_with(&self, p: &[f64]) -> bool {
        let prob = |s: u64| -> f64 { (0..p.len()).filter(|i| s >> i & 1 == 1).map(|i| p[i]).sum() };
        // Bel(A) ≤ P(A) only needs checking at unions of focal sets
        let sets: Vec<u64> = match self.focal.as_slice() {
            [(a, _)] => vec![*a],
            [(a, _), (b, _)] => vec![*a, *b, a | b],
            _ => unreachable!(),
        };
        sets.iter().all(|&s| {
            let bel: f64 = self.focal.iter().filter(|(f, _)| f & !s == 0).map(|(_, w)| w).sum();
            prob(s) >= bel - TOL_SUM
        })
    }

    fn pignistic(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for &(s, w) in &self.focal {
            let size = s.count_ones() as f64;
            for (i, o) in out.iter_mut().enumerate() {
                if s >> i & 1 == 1 {
                    *o += w / size;
                }
            }
        }
        out
    }
}

fn random_witness_search(p: &[f64], target: &[f64], draws: usize, rng: &mut ChaCha8Rng) -> bool {
    let n = p.len();
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < draws && attempts < 20 * draws {
        attempts += 1;
        let b = SmallBelief::draw(n, rng);
        if !b.compatible_with(p) {
            continue;
        }
        accepted += 1;
        if b.pignistic(n).iter().zip(target).all(|(x, y)| (x - y).abs() <= 1e-6) {
            return true;
        }
    }
    false
}

fn witness_free_feasibility() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut disagreements, mut feasible, mut found) = (0, 0, 0);
    let start = Instant::now();
    for k in 0..50 {
        let n = rng.gen_range(2..=6);
        let f = frame(n);
        let (p, target) = match k % 4 {
            // the pignistic of some compatible small belief
            0 | 1 => {
                let p = random_distribution(&f, &mut rng);
                let b = loop {
                    let b = SmallBelief::draw(n, &mut rng);
                    if b.compatible_with(p.values()) {
                        break b;
                    }
                };
                let t = b.pignistic(n);
                (p, t)
            }
            // an arbitrary distribution
            2 => (random_distribution(&f, &mut rng), random_distribution(&f, &mut rng).values().to_vec()),
            // a Dirac truth with the target's maximum elsewhere
            _ => {
                let x0 = rng.gen_range(0..n);
                let p = ProbabilityDistribution::dirac(f.clone(), x0).unwrap();
                let mut t = vec![0.0; n];
                t[(x0 + 1) % n] = 0.6;
                t[x0] = 0.4;
                (p, t)
            }
        };
        let target_dist = ProbabilityDistribution::new(f.clone(), target.clone()).unwrap();
        let truth = TrueProbability::stated(p.clone());
        let verdict = is_compatible_probability(&target_dist, &truth, None).unwrap();
        let random_found = random_witness_search(p.values(), &target, 100_000, &mut rng);
        found += usize::from(random_found);
        let ok = match &verdict {
            ProbabilityVerdict::Feasible { witness } => {
                feasible += 1;
                matches!(
                    is_compatible_probability(&target_dist, &truth, Some(witness)).unwrap(),
                    ProbabilityVerdict::Verified
                )
            }
            ProbabilityVerdict::Infeasible => !random_found,
            _ => false,
        };
        if !ok {
            disagreements += 1;
        }
    }
    outcome(
        disagreements == 0,
        format!(
            "{disagreements} disagreements in 50 instances ({feasible} feasible, {found} witnessed by random search), {:?}",
            start.elapsed()
        ),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let tables = random_tables();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("entropy golden values", Box::new(entropy_golden)),
        ("pignistic golden values", Box::new(pignistic_golden)),
        ("nonspecificity under mass transfer", Box::new(nonspecificity_transfer)),
        ("Moebius/zeta round trip", Box::new(mobius_round_trip)),
        ("candidate-set beliefs are compatible", Box::new(|| compatibility_of_candidate_beliefs(&tables))),
        ("dropping a candidate is incompatible", Box::new(|| missing_record_incompatibility(&tables))),
        ("support inclusion", Box::new(support_inclusion)),
        ("Dirac truth", Box::new(dirac_results)),
        ("belief favouring a zero-probability record", Box::new(outside_candidate_construction)),
        ("k-anonymity example", Box::new(k_anonymity_example)),
        ("combination convergence", Box::new(combination_convergence)),
        ("witness-free compatible-probability feasibility", Box::new(witness_free_feasibility)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (o, t) = timed(run);
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {} ({}; {:.2?})",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            name,
            o.detail,
            t
        );
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.2?}",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
