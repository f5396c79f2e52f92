//! Ground truth for desk-scale instances: exhaustive enumeration of minimal
//! p-sets, monotonicity checking, evaluation counting, and truth-table SAT.
//!
//! Nothing here calls into [`crate::qx`]; the suites in [`crate::suites`]
//! compare the two.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cnf::CnfFormula;
use crate::instance::{Element, ElementSet, ProblemInstance};
use crate::predicate::{EvalError, Predicate};

/// Largest analyzed set the oracle will enumerate.
pub const ORACLE_LIMIT: usize = 20;
/// Largest universe for exhaustive monotonicity checks.
pub const EXHAUSTIVE_LIMIT: usize = 15;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    /// All minimal p-sets, in discovery order (by size, then lexicographic).
    pub minimal_p_sets: Vec<ElementSet>,
    pub exists: bool,
    pub evaluations_used: u64,
}

impl OracleReport {
    pub fn contains(&self, x: &ElementSet) -> bool {
        self.minimal_p_sets.contains(x)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("analyzed set has {0} elements; the oracle enumerates at most {ORACLE_LIMIT}")]
    TooLarge(usize),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Enumerates every minimal p-set of `<A, B>`.
///
/// Subsets of `A` are visited by ascending size, then in lexicographic id
/// order. A subset is collected when `p(X ∪ B) = 1` and no already collected
/// set is contained in it; supersets of collected sets are not evaluated.
pub fn enumerate_minimal_p_sets<P: Predicate + ?Sized>(
    instance: &ProblemInstance,
    p: &P,
) -> Result<OracleReport, OracleError> {
    let n = instance.analyzed().len();
    if n > ORACLE_LIMIT {
        return Err(OracleError::TooLarge(n));
    }
    let ids: Vec<Element> = instance.analyzed_set().into_iter().collect();
    let background = instance.background();
    let mut found: Vec<ElementSet> = Vec::new();
    let mut evaluations = 0;

    for size in 0..=n {
        for combo in ids.iter().copied().combinations(size) {
            let x: ElementSet = combo.into_iter().collect();
            if found.iter().any(|m| m.is_subset(&x)) {
                continue;
            }
            let mut tested = x.clone();
            tested.extend(background.iter().copied());
            evaluations += 1;
            if p.evaluate(&tested)? {
                found.push(x);
            }
        }
    }
    Ok(OracleReport {
        exists: !found.is_empty(),
        minimal_p_sets: found,
        evaluations_used: evaluations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    VerifiedExhaustive,
    VerifiedSampled,
    Violated,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonicityReport {
    pub verdict: Verdict,
    /// `(X', X'')` with `X' ⊂ X''` and `p(X') = 1 > p(X'') = 0`.
    pub witness: Option<(ElementSet, ElementSet)>,
    pub empty_set_ok: bool,
}

impl MonotonicityReport {
    /// Both halves of the contract: `p(∅) = 0` and no violation found.
    pub fn contract_ok(&self) -> bool {
        self.empty_set_ok && self.verdict != Verdict::Violated
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonotoneMode {
    Exhaustive,
    Sampled { trials: usize, seed: u64 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonotoneError {
    #[error("universe has {0} elements; exhaustive checking supports at most {EXHAUSTIVE_LIMIT}")]
    TooLarge(usize),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Checks `p(∅) = 0` and `p(X) ≤ p(X ∪ {e})` over adjacent pairs.
///
/// Any violation of monotonicity along a chain `X' ⊂ X''` shows up on some
/// adjacent pair of that chain, so the exhaustive mode is complete. The
/// witness is the first violating pair by size of `X'`; sampled witnesses are
/// shrunk greedily by removing one or two elements at a time.
pub fn check_monotone<P: Predicate + ?Sized>(
    p: &P,
    universe: &ElementSet,
    mode: MonotoneMode,
) -> Result<MonotonicityReport, MonotoneError> {
    let empty_set_ok = !p.evaluate(&ElementSet::new())?;
    let elems: Vec<Element> = universe.iter().copied().collect();
    match mode {
        MonotoneMode::Exhaustive => {
            if elems.len() > EXHAUSTIVE_LIMIT {
                return Err(MonotoneError::TooLarge(elems.len()));
            }
            let to_set = |mask: usize| -> ElementSet {
                elems
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &e)| e)
                    .collect()
            };
            let mut values = Vec::with_capacity(1 << elems.len());
            for mask in 0..(1usize << elems.len()) {
                values.push(p.evaluate(&to_set(mask))?);
            }
            for size in 0..elems.len() {
                for combo in (0..elems.len()).combinations(size) {
                    let mask: usize = combo.iter().map(|i| 1 << i).sum();
                    if !values[mask] {
                        continue;
                    }
                    for i in (0..elems.len()).filter(|i| mask & (1 << i) == 0) {
                        if !values[mask | (1 << i)] {
                            return Ok(MonotonicityReport {
                                verdict: Verdict::Violated,
                                witness: Some((to_set(mask), to_set(mask | (1 << i)))),
                                empty_set_ok,
                            });
                        }
                    }
                }
            }
            Ok(MonotonicityReport {
                verdict: Verdict::VerifiedExhaustive,
                witness: None,
                empty_set_ok,
            })
        }
        MonotoneMode::Sampled { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if elems.is_empty() {
                return Ok(MonotonicityReport {
                    verdict: Verdict::VerifiedSampled,
                    witness: None,
                    empty_set_ok,
                });
            }
            for _ in 0..trials {
                let e = elems[rng.gen_range(0..elems.len())];
                let x: ElementSet = elems
                    .iter()
                    .copied()
                    .filter(|&f| f != e && rng.gen_bool(0.5))
                    .collect();
                if violates(p, &x, e)? {
                    let x = shrink_witness(p, x, e)?;
                    let mut bigger = x.clone();
                    bigger.insert(e);
                    return Ok(MonotonicityReport {
                        verdict: Verdict::Violated,
                        witness: Some((x, bigger)),
                        empty_set_ok,
                    });
                }
            }
            Ok(MonotonicityReport {
                verdict: Verdict::VerifiedSampled,
                witness: None,
                empty_set_ok,
            })
        }
    }
}

fn violates<P: Predicate + ?Sized>(p: &P, x: &ElementSet, e: Element) -> Result<bool, EvalError> {
    if !p.evaluate(x)? {
        return Ok(false);
    }
    let mut bigger = x.clone();
    bigger.insert(e);
    Ok(!p.evaluate(&bigger)?)
}

fn shrink_witness<P: Predicate + ?Sized>(
    p: &P,
    mut x: ElementSet,
    e: Element,
) -> Result<ElementSet, EvalError> {
    // single removals first, then pairs (a pair is needed when p flips per element)
    'outer: loop {
        let elems: Vec<Element> = x.iter().copied().collect();
        for size in 1..=2 {
            for drop in elems.iter().copied().combinations(size) {
                let smaller: ElementSet = x.iter().copied().filter(|f| !drop.contains(f)).collect();
                if violates(p, &smaller, e)? {
                    x = smaller;
                    continue 'outer;
                }
            }
        }
        return Ok(x);
    }
}

/// Counts evaluations and optionally memoizes results.
///
/// The logical count includes every call made through the wrapper; the
/// distinct count is the number of different sets seen. With memoization
/// on, the inner predicate is called once per distinct set.
pub struct Counting<P> {
    inner: P,
    memoize: bool,
    logical: AtomicU64,
    inner_calls: AtomicU64,
    seen: Mutex<HashMap<ElementSet, bool>>,
}

impl<P: Predicate> Counting<P> {
    pub fn new(inner: P) -> Self {
        Self::with_memo(inner, false)
    }

    pub fn memoized(inner: P) -> Self {
        Self::with_memo(inner, true)
    }

    fn with_memo(inner: P, memoize: bool) -> Self {
        Counting {
            inner,
            memoize,
            logical: AtomicU64::new(0),
            inner_calls: AtomicU64::new(0),
            seen: Mutex::new(HashMap::new()),
        }
    }

    pub fn logical_count(&self) -> u64 {
        self.logical.load(Ordering::Relaxed)
    }

    pub fn distinct_count(&self) -> u64 {
        self.seen.lock().expect("memo lock").len() as u64
    }

    /// Calls that reached the wrapped predicate.
    pub fn inner_count(&self) -> u64 {
        self.inner_calls.load(Ordering::Relaxed)
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<P: Predicate> Predicate for Counting<P> {
    fn evaluate(&self, set: &ElementSet) -> Result<bool, EvalError> {
        self.logical.fetch_add(1, Ordering::Relaxed);
        if self.memoize {
            if let Some(&bit) = self.seen.lock().expect("memo lock").get(set) {
                return Ok(bit);
            }
        }
        self.inner_calls.fetch_add(1, Ordering::Relaxed);
        let bit = self.inner.evaluate(set)?;
        self.seen.lock().expect("memo lock").insert(set.clone(), bit);
        Ok(bit)
    }
}

/// `p(X) = |X| mod 2`. Not monotone; used to exercise failure paths.
#[derive(Clone, Copy, Debug, Default)]
pub struct ParityPredicate;

impl Predicate for ParityPredicate {
    fn evaluate(&self, set: &ElementSet) -> Result<bool, EvalError> {
        Ok(set.len() % 2 == 1)
    }
}

/// Satisfiability of the given clauses by enumerating all assignments.
pub fn truth_table_sat(formula: &CnfFormula, active: impl IntoIterator<Item = usize>) -> bool {
    let clauses: Vec<&Vec<i32>> = active
        .into_iter()
        .map(|i| formula.clause(i).expect("clause index in range"))
        .collect();
    let n = formula.num_vars();
    assert!(n <= 24, "truth table over {n} variables is too large");
    (0u32..(1 << n)).any(|bits| {
        clauses.iter().all(|clause| {
            clause.iter().any(|&lit| {
                let value = bits & (1 << (lit.unsigned_abs() - 1)) != 0;
                value == (lit > 0)
            })
        })
    })
}
