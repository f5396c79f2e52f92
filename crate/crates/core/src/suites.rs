//! Seeded random instances and the verification suites built on them.
//!
//! Every trial draws from its own ChaCha8 stream (`seed`, stream = trial
//! number), so a single failing trial can be replayed in isolation. The
//! sampling scheme is versioned by [`GENERATOR_VERSION`]; changing any draw
//! below must bump it.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnf::CnfFormula;
use crate::dpll::dpll_sat;
use crate::instance::{fmt_set, Element, ElementSet, ProblemInstance, SplitStrategy};
use crate::manifest::SupersetPredicate;
use crate::qx::{qx_traced, QxOutcome};
use crate::trace::{check_tree, TraceTree};
use crate::verify::{check_monotone, enumerate_minimal_p_sets, truth_table_sat, MonotoneMode, ParityPredicate};

pub const GENERATOR_VERSION: &str = "gen/1";

pub const DEFAULT_SEED: u64 = 20240601;
pub const DEFAULT_ORACLE_TRIALS: usize = 500;
pub const DEFAULT_LEMMA_TRIALS: usize = 200;
pub const DEFAULT_DPLL_FORMULAS: usize = 100;

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Clone, Debug)]
pub struct RandomInstance {
    pub instance: ProblemInstance,
    pub predicate: SupersetPredicate,
}

impl fmt::Display for RandomInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let targets: Vec<String> = self.predicate.targets().iter().map(fmt_set).collect();
        write!(
            f,
            "A=[{}] B={} targets=[{}]",
            self.instance
                .analyzed()
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(","),
            fmt_set(self.instance.background()),
            targets.join(" ")
        )
    }
}

/// `|A| ∈ [1, max_analyzed]` in shuffled order, up to 3 background elements,
/// and 1–3 non-empty targets drawn from `A ∪ B`, sometimes including one
/// element outside `A ∪ B` so that no p-set exists.
pub fn random_superset_instance(rng: &mut impl Rng, max_analyzed: usize) -> RandomInstance {
    let n = rng.gen_range(1..=max_analyzed) as u32;
    let m = rng.gen_range(0..=3u32);
    let mut analyzed: Vec<Element> = (1..=n).map(Element).collect();
    analyzed.shuffle(rng);
    let background: Vec<Element> = (n + 1..=n + m).map(Element).collect();

    let mut pool: Vec<Element> = (1..=n + m).map(Element).collect();
    if rng.gen_bool(0.2) {
        pool.push(Element(n + m + 1));
    }
    let count = rng.gen_range(1..=3);
    let targets = (0..count)
        .map(|_| {
            let size = rng.gen_range(1..=pool.len().min(4));
            pool.choose_multiple(rng, size).copied().collect::<ElementSet>()
        })
        .collect();
    RandomInstance {
        instance: ProblemInstance::new(analyzed, background).expect("disjoint ids"),
        predicate: SupersetPredicate::new(targets).expect("targets are non-empty"),
    }
}

/// Random CNF with `1..=max_vars` variables, up to `5·vars` clauses of 1–3
/// distinct variables each (so no tautologies).
pub fn random_cnf(rng: &mut impl Rng, max_vars: u32) -> CnfFormula {
    let vars = rng.gen_range(1..=max_vars);
    let count = rng.gen_range(1..=5 * vars as usize);
    let all: Vec<i32> = (1..=vars as i32).collect();
    let clauses = (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=3.min(vars as usize));
            all.choose_multiple(rng, len)
                .map(|&v| if rng.gen_bool(0.5) { v } else { -v })
                .collect()
        })
        .collect();
    CnfFormula::new(vars, clauses).expect("generated clauses are well-formed")
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub trial: u64,
    pub seed: u64,
    pub detail: String,
    pub trace: Option<TraceTree>,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub trials: usize,
    pub failures: Vec<Counterexample>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            trials: 0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, seed: u64, trial: u64, detail: String, trace: Option<TraceTree>) {
        self.failures.push(Counterexample {
            trial,
            seed,
            detail,
            trace,
        });
    }
}

/// One seeded QX run on a random superset instance.
pub struct TrialRun {
    pub case: RandomInstance,
    pub tree: TraceTree,
}

pub fn random_trial(seed: u64, trial: u64, split: SplitStrategy) -> TrialRun {
    let mut rng = trial_rng(seed, trial);
    let case = random_superset_instance(&mut rng, 10);
    let tree = qx_traced(&case.instance, &case.predicate, split).expect("superset predicates never fail");
    TrialRun { case, tree }
}

/// QX's answer is one of the oracle's minimal p-sets, and "no p-set" exactly
/// when the oracle finds none.
pub fn oracle_agreement(seed: u64, trials: usize, split: SplitStrategy) -> SuiteReport {
    let mut report = SuiteReport::new("oracle agreement");
    for trial in 0..trials as u64 {
        report.trials += 1;
        let run = random_trial(seed, trial, split);
        let oracle = enumerate_minimal_p_sets(&run.case.instance, &run.case.predicate)
            .expect("|A| ≤ 10 is within the oracle limit");
        let agrees = match &run.tree.outcome {
            QxOutcome::NoPSet => !oracle.exists,
            QxOutcome::MinimalPSet { elements } => oracle.contains(elements),
        };
        if !agrees {
            let detail = format!(
                "{}: qx returned {:?}, oracle found {}",
                run.case,
                run.tree.outcome,
                oracle.minimal_p_sets.iter().map(fmt_set).collect::<Vec<_>>().join(" ")
            );
            report.fail(seed, trial, detail, Some(run.tree));
        }
    }
    report
}

/// Runs [`check_tree`] on the trace of every random trial.
pub fn invariant_trees(seed: u64, trials: usize, split: SplitStrategy) -> SuiteReport {
    let mut report = SuiteReport::new("invariant tree check");
    for trial in 0..trials as u64 {
        report.trials += 1;
        let run = random_trial(seed, trial, split);
        let tree_report = check_tree(&run.tree, &run.case.predicate).expect("superset predicates never fail");
        if !tree_report.passed() {
            report.fail(seed, trial, format!("{}\n{tree_report}", run.case), Some(run.tree));
        }
    }
    report
}

/// A random instance with `p(A ∪ B) = 1` and a partition of `A` into two
/// non-empty parts.
#[derive(Clone, Debug)]
pub struct LemmaCase {
    pub case: RandomInstance,
    pub first: Vec<Element>,
    pub second: Vec<Element>,
}

pub fn random_lemma_case(rng: &mut impl Rng) -> LemmaCase {
    loop {
        let case = random_superset_instance(rng, 10);
        let a = case.instance.analyzed();
        if a.len() < 2 || !case.predicate.holds(&case.instance.universe()) {
            continue;
        }
        let mut shuffled = a.to_vec();
        shuffled.shuffle(rng);
        let k = rng.gen_range(1..shuffled.len());
        let second = shuffled.split_off(k);
        return LemmaCase {
            case,
            first: shuffled,
            second,
        };
    }
}

/// For `A = A1 ⊎ A2`: every minimal `X2` wrt. `<A2, B ∪ A1>` combined with
/// every minimal `X1` wrt. `<A1, B ∪ X2>` gives a minimal p-set wrt. `<A, B>`.
/// All minimality judgements come from the oracle.
pub fn lemma_composition(seed: u64, trials: usize) -> SuiteReport {
    let mut report = SuiteReport::new("composition of partial results");
    for trial in 0..trials as u64 {
        report.trials += 1;
        let mut rng = trial_rng(seed, trial);
        let lemma = random_lemma_case(&mut rng);
        let p = &lemma.case.predicate;
        let background = lemma.case.instance.background();
        let full = enumerate_minimal_p_sets(&lemma.case.instance, p).expect("small");

        let first_set: ElementSet = lemma.first.iter().copied().collect();
        let b_second: ElementSet = background.union(&first_set).copied().collect();
        let second_inst = ProblemInstance::new(lemma.second.iter().copied(), b_second).expect("disjoint");
        let x2s = enumerate_minimal_p_sets(&second_inst, p).expect("small");
        if !x2s.exists {
            report.fail(seed, trial, format!("{}: no X2 although p(A ∪ B) = 1", lemma.case), None);
            continue;
        }
        for x2 in &x2s.minimal_p_sets {
            let b_first: ElementSet = background.union(x2).copied().collect();
            let first_inst = ProblemInstance::new(lemma.first.iter().copied(), b_first).expect("disjoint");
            let x1s = enumerate_minimal_p_sets(&first_inst, p).expect("small");
            for x1 in &x1s.minimal_p_sets {
                let union: ElementSet = x1.union(x2).copied().collect();
                if !full.contains(&union) {
                    report.fail(
                        seed,
                        trial,
                        format!(
                            "{} A1={} A2={}: X1={} ∪ X2={} is not minimal",
                            lemma.case,
                            fmt_set(&lemma.first),
                            fmt_set(&lemma.second),
                            fmt_set(x1),
                            fmt_set(x2)
                        ),
                        None,
                    );
                }
            }
        }
    }
    report
}

/// DPLL against truth-table enumeration on random formulas with at most 15
/// variables, for the full clause set and one random sub-selection each.
pub fn dpll_equivalence(seed: u64, formulas: usize) -> SuiteReport {
    let mut report = SuiteReport::new("dpll vs truth table");
    for trial in 0..formulas as u64 {
        report.trials += 1;
        let mut rng = trial_rng(seed, trial);
        let f = random_cnf(&mut rng, 15);
        let all: Vec<usize> = (1..=f.num_clauses()).collect();
        let some: Vec<usize> = all.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        for active in [all, some] {
            let dpll = dpll_sat(&f, active.iter().copied());
            let table = truth_table_sat(&f, active.iter().copied());
            if dpll != table {
                report.fail(
                    seed,
                    trial,
                    format!("dpll={dpll} table={table} clauses={active:?}\n{}", f.to_dimacs()),
                    None,
                );
            }
        }
    }
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PredicateFamily {
    #[default]
    Superset,
    Parity,
}

impl std::str::FromStr for PredicateFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "superset" => Ok(PredicateFamily::Superset),
            "parity" => Ok(PredicateFamily::Parity),
            other => Err(format!("unknown predicate family `{other}` (expected superset or parity)")),
        }
    }
}

/// Exhaustive monotonicity check of the predicate family on each trial's
/// universe (`A ∪ B` plus one outside element).
pub fn monotonicity(seed: u64, trials: usize, family: PredicateFamily) -> SuiteReport {
    let mut report = SuiteReport::new("monotonicity");
    for trial in 0..trials as u64 {
        report.trials += 1;
        let mut rng = trial_rng(seed, trial);
        let case = random_superset_instance(&mut rng, 10);
        let mut universe = case.instance.universe();
        universe.insert(Element(universe.len() as u32 + 1));
        let result = match family {
            PredicateFamily::Superset => check_monotone(&case.predicate, &universe, MonotoneMode::Exhaustive),
            PredicateFamily::Parity => check_monotone(&ParityPredicate, &universe, MonotoneMode::Exhaustive),
        }
        .expect("universe within exhaustive limit");
        if !result.contract_ok() {
            let detail = match &result.witness {
                Some((small, big)) => format!(
                    "p({}) = 1 but p({}) = 0 over universe {}",
                    fmt_set(small),
                    fmt_set(big),
                    fmt_set(&universe)
                ),
                None => format!("p(∅) = 1 over universe {}", fmt_set(&universe)),
            };
            let trace = match family {
                PredicateFamily::Superset => qx_traced(&case.instance, &case.predicate, SplitStrategy::Half),
                PredicateFamily::Parity => qx_traced(&case.instance, &ParityPredicate, SplitStrategy::Half),
            }
            .ok();
            report.fail(seed, trial, format!("{}: {detail}", case), trace);
            // one witness is enough
            break;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trials_are_reproducible() {
        let a = random_trial(7, 3, SplitStrategy::Half);
        let b = random_trial(7, 3, SplitStrategy::Half);
        assert_eq!(a.tree, b.tree);
        assert_eq!(a.case.instance, b.case.instance);
    }

    #[test]
    fn generator_covers_both_outcomes() {
        let mut none = 0;
        let mut empty = 0;
        for t in 0..300 {
            let run = random_trial(1, t, SplitStrategy::Half);
            match &run.tree.outcome {
                QxOutcome::NoPSet => none += 1,
                QxOutcome::MinimalPSet { elements } if elements.is_empty() => empty += 1,
                _ => {}
            }
        }
        assert!(none > 0, "no 'no p-set' instances generated");
        assert!(empty > 0, "no background-satisfied instances generated");
    }

    #[test]
    fn small_suites_pass() {
        for split in [SplitStrategy::Half, SplitStrategy::Prefix, SplitStrategy::Suffix] {
            assert!(oracle_agreement(11, 50, split).passed());
            assert!(invariant_trees(11, 50, split).passed());
        }
        assert!(lemma_composition(11, 30).passed());
        assert!(dpll_equivalence(11, 20).passed());
        assert!(monotonicity(11, 10, PredicateFamily::Superset).passed());
    }

    #[test]
    fn parity_family_fails_monotonicity() {
        let r = monotonicity(11, 5, PredicateFamily::Parity);
        assert!(!r.passed());
        assert!(r.failures[0].detail.contains("but p("));
        assert!(r.failures[0].trace.is_some());
    }

    #[test]
    fn cnf_generator_mixes_sat_and_unsat() {
        let mut sat = 0;
        for t in 0..100 {
            let f = random_cnf(&mut trial_rng(5, t), 15);
            if dpll_sat(&f, 1..=f.num_clauses()) {
                sat += 1;
            }
        }
        assert!(sat > 5 && sat < 95, "sat count {sat}");
    }
}
