//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Expected minimal sets come from brute-force enumeration written here, not
//! from the library's own oracle.

use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use msmp_core::cnf::CnfFormula;
use msmp_core::dpll::Dpll;
use msmp_core::instance::fmt_set;
use msmp_core::manifest::{mus_instance, MusPredicate, SupersetPredicate};
use msmp_core::suites::{self, random_cnf, random_lemma_case, random_trial, trial_rng, DEFAULT_SEED};
use msmp_core::trace::{check_tree, TraceTree};
use msmp_core::verify::enumerate_minimal_p_sets;
use msmp_core::{qx_traced, set_of, Element, ElementSet, ProblemInstance, QxOutcome, SplitStrategy};

const INTRO_DIMACS: &str = "p cnf 3 5\n-3 0\n1 -2 0\n3 -2 0\n-1 0\n2 0\n";

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let took = start.elapsed();
    check(took < limit, || format!("took {took:?}, limit {limit:?}"))?;
    Ok(took)
}

/// Every subset of `a`, as sets.
fn subsets(a: &[Element]) -> Vec<ElementSet> {
    (0u32..1 << a.len())
        .map(|m| a.iter().enumerate().filter(|(i, _)| m & (1 << i) != 0).map(|(_, &e)| e).collect())
        .collect()
}

/// Minimal p-sets by checking every subset against every other subset.
fn brute_minimal(a: &[Element], b: &ElementSet, p: impl Fn(&ElementSet) -> bool) -> Vec<ElementSet> {
    let with_b = |x: &ElementSet| -> bool { p(&x.union(b).copied().collect()) };
    let psets: Vec<ElementSet> = subsets(a).into_iter().filter(|x| with_b(x)).collect();
    let mut minimal: Vec<ElementSet> = psets
        .iter()
        .filter(|x| !psets.iter().any(|y| y != *x && y.is_subset(x)))
        .cloned()
        .collect();
    minimal.sort();
    minimal
}

fn table_sat(f: &CnfFormula, clauses: &[usize]) -> bool {
    (0u64..1 << f.num_vars()).any(|bits| {
        clauses.iter().all(|&i| {
            f.clause(i)
                .unwrap()
                .iter()
                .any(|&l| (bits >> (l.unsigned_abs() - 1) & 1 == 1) == (l > 0))
        })
    })
}

fn example_one() -> TraceTree {
    let inst = ProblemInstance::from_ids(1..=8, []).unwrap();
    qx_traced(&inst, &SupersetPredicate::example_one(), SplitStrategy::Half).unwrap()
}

fn intro_run() -> (CnfFormula, TraceTree) {
    let f = CnfFormula::intro_example();
    let inst = mus_instance(&f, &[]).unwrap();
    let tree = qx_traced(&inst, &MusPredicate::new(&f, Dpll::default()), SplitStrategy::Half).unwrap();
    (f, tree)
}

fn criterion_1() -> Outcome {
    let golden: [&[u32]; 9] = [
        &[1, 2, 3, 4],
        &[1, 2, 3, 4, 5, 6],
        &[1, 2, 3, 4, 5, 6, 7],
        &[1, 2, 3, 4, 7],
        &[7],
        &[1, 2, 7],
        &[1, 2, 3, 7],
        &[1, 2, 4, 7],
        &[3, 4, 7],
    ];
    let bits = [false, false, true, true, false, false, false, false, true];
    let start = Instant::now();
    let tree = example_one();
    let evals = tree.line10_evaluations();
    check(evals.len() == 9, || format!("{} line-10 evaluations", evals.len()))?;
    for (i, (e, (want, bit))) in evals.iter().zip(golden.iter().zip(bits)).enumerate() {
        let want = set_of(want.iter().copied());
        check(e.tested == want && e.bit == bit, || {
            format!("step {}: tested {:?} => {}, expected {:?} => {}", i + 1, e.tested, e.bit, want, bit)
        })?;
    }
    check(tree.outcome == QxOutcome::MinimalPSet { elements: set_of([3, 4, 7]) }, || {
        format!("returned {:?}", tree.outcome)
    })?;
    let took = within(Duration::from_secs(1), start)?;
    Ok(format!("9 evaluations match, result {{3,4,7}}, {took:?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let (f, tree) = intro_run();
    let all: Vec<Element> = (1..=5).map(Element).collect();
    let brute = brute_minimal(&all, &ElementSet::new(), |x| {
        !table_sat(&f, &x.iter().map(|e| e.0 as usize).collect::<Vec<_>>())
    });
    let expected = vec![set_of([1, 3, 5]), set_of([2, 4, 5])];
    check(brute == expected, || format!("brute force found {brute:?}"))?;
    let inst = mus_instance(&f, &[]).unwrap();
    let oracle = enumerate_minimal_p_sets(&inst, &MusPredicate::new(&f, Dpll::default())).unwrap();
    check(oracle.minimal_p_sets == expected, || format!("oracle found {:?}", oracle.minimal_p_sets))?;
    let got = tree.outcome.elements().cloned().unwrap_or_default();
    check(expected.contains(&got), || format!("mus returned {got:?}"))?;
    let took = within(Duration::from_secs(1), start)?;
    Ok(format!("mus {}, oracle finds both MUSes, {took:?}", fmt_set(&got)))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut none = 0;
    for trial in 0..suites::DEFAULT_ORACLE_TRIALS as u64 {
        let run = random_trial(DEFAULT_SEED, trial, SplitStrategy::Half);
        let inst = &run.case.instance;
        let brute = brute_minimal(inst.analyzed(), inst.background(), |x| run.case.predicate.holds(x));
        let oracle = enumerate_minimal_p_sets(inst, &run.case.predicate).unwrap();
        let mut sorted = oracle.minimal_p_sets.clone();
        sorted.sort();
        check(sorted == brute, || format!("trial {trial}: oracle {sorted:?} vs brute force {brute:?}"))?;
        match &run.tree.outcome {
            QxOutcome::NoPSet => {
                none += 1;
                check(brute.is_empty() && !oracle.exists, || format!("trial {trial}: spurious no p-set"))?;
            }
            QxOutcome::MinimalPSet { elements } => {
                check(brute.contains(elements), || format!("trial {trial}: {elements:?} is not minimal ({})", run.case))?;
            }
        }
    }
    let took = within(Duration::from_secs(30), start)?;
    Ok(format!("500/500 agree ({none} without p-set), {took:?}"))
}

fn criterion_4() -> Outcome {
    let mut nodes = 0;
    let tree = example_one();
    let report = check_tree(&tree, &SupersetPredicate::example_one()).unwrap();
    check(report.passed(), || format!("example one: {report}"))?;
    nodes += report.nodes_checked;

    let (f, tree) = intro_run();
    let report = check_tree(&tree, &MusPredicate::new(&f, Dpll::default())).unwrap();
    check(report.passed(), || format!("intro mus: {report}"))?;
    nodes += report.nodes_checked;

    for trial in 0..suites::DEFAULT_ORACLE_TRIALS as u64 {
        let run = random_trial(DEFAULT_SEED, trial, SplitStrategy::Half);
        let report = check_tree(&run.tree, &run.case.predicate).unwrap();
        check(report.passed(), || format!("trial {trial}: {report}"))?;
        nodes += report.nodes_checked;
    }
    Ok(format!("502 traces, {nodes} nodes checked"))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut combos = 0;
    for trial in 0..suites::DEFAULT_LEMMA_TRIALS as u64 {
        let lemma = random_lemma_case(&mut trial_rng(DEFAULT_SEED, trial));
        let p = |x: &ElementSet| lemma.case.predicate.holds(x);
        let b = lemma.case.instance.background();
        let full = brute_minimal(lemma.case.instance.analyzed(), b, p);
        let a1: ElementSet = lemma.first.iter().copied().collect();
        let b2: ElementSet = b.union(&a1).copied().collect();
        let x2s = brute_minimal(&lemma.second, &b2, p);
        check(!x2s.is_empty(), || format!("trial {trial}: no X2"))?;
        for x2 in &x2s {
            let b1: ElementSet = b.union(x2).copied().collect();
            for x1 in brute_minimal(&lemma.first, &b1, p) {
                combos += 1;
                let union: ElementSet = x1.union(x2).copied().collect();
                check(full.contains(&union), || format!("trial {trial}: {x1:?} ∪ {x2:?} not minimal"))?;
            }
        }
    }
    let report = suites::lemma_composition(DEFAULT_SEED, suites::DEFAULT_LEMMA_TRIALS);
    check(report.passed(), || format!("library suite: {:?}", report.failures.first().map(|c| &c.detail)))?;
    let took = within(Duration::from_secs(30), start)?;
    Ok(format!("200 tuples, {combos} compositions minimal, {took:?}"))
}

fn criterion_6() -> Outcome {
    let mut checks = 0;
    let mut formulas = vec![CnfFormula::intro_example()];
    formulas.extend((0..suites::DEFAULT_DPLL_FORMULAS as u64).map(|t| random_cnf(&mut trial_rng(DEFAULT_SEED, t), 15)));
    for (n, f) in formulas.iter().enumerate() {
        check(f.num_vars() <= 15, || format!("formula {n} has {} vars", f.num_vars()))?;
        let m = f.num_clauses();
        let mut selections: Vec<Vec<usize>> = vec![(1..=m).collect(), vec![]];
        selections.extend((1..=m).map(|skip| (1..=m).filter(|&i| i != skip).collect()));
        for active in selections {
            checks += 1;
            let dpll = Dpll::default().is_sat(f, active.iter().copied()).unwrap();
            check(dpll == table_sat(f, &active), || format!("formula {n}, clauses {active:?}: dpll says {dpll}"))?;
        }
    }
    let report = suites::dpll_equivalence(DEFAULT_SEED, suites::DEFAULT_DPLL_FORMULAS);
    check(report.passed(), || "library suite failed".into())?;
    Ok(format!("{} formulas, {checks} clause selections agree", formulas.len()))
}

fn run_cli(args: &[&str]) -> Result<(Vec<u8>, Vec<u8>), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let trace = dir.path().join("trace.json");
    let cnf = dir.path().join("intro.cnf");
    fs::write(&cnf, INTRO_DIMACS).map_err(|e| e.to_string())?;
    let mut full: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    if full[0] != "demo" {
        full.extend(["--cnf".into(), cnf.display().to_string()]);
    }
    full.extend(["--format".into(), "json".into(), "--trace".into(), trace.display().to_string()]);
    let out = Command::new(env!("CARGO_BIN_EXE_msmp-kit"))
        .args(&full)
        .output()
        .map_err(|e| e.to_string())?;
    check(out.status.success(), || format!("{args:?} exited with {}", out.status))?;
    let trace_bytes = fs::read(&trace).map_err(|e| e.to_string())?;
    TraceTree::from_json_str(std::str::from_utf8(&trace_bytes).unwrap()).map_err(|e| e.to_string())?;
    Ok((out.stdout, trace_bytes))
}

fn criterion_7() -> Outcome {
    let first = (example_one().to_json_string(), intro_run().1.to_json_string());
    for i in 1..10 {
        let again = (example_one().to_json_string(), intro_run().1.to_json_string());
        check(again == first, || format!("in-process repeat {i} differs"))?;
    }
    for cmd in [&["demo"][..], &["mus"][..]] {
        let baseline = run_cli(cmd)?;
        for i in 1..10 {
            check(run_cli(cmd)? == baseline, || format!("{cmd:?} repeat {i} differs"))?;
        }
    }
    let (demo_out, _) = run_cli(&["demo"])?;
    let doc: serde_json::Value = serde_json::from_slice(&demo_out).map_err(|e| e.to_string())?;
    check(doc["result"] == serde_json::json!([3, 4, 7]) && doc["evaluations"] == 10, || format!("demo json {doc}"))?;
    Ok("10 repeats byte-identical in process and through the binary".into())
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("example one golden trace", criterion_1),
        ("intro formula MUS", criterion_2),
        ("oracle agreement", criterion_3),
        ("invariant checks on all traces", criterion_4),
        ("composition of partial results", criterion_5),
        ("dpll against truth table", criterion_6),
        ("determinism", criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(note) => println!("criterion {}: PASS  {name}: {note}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 7 criteria passed");
}
