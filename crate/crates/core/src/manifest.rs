//! Concrete monotone predicates and the MUS / MCS drivers built on them.

use thiserror::Error;

use crate::cnf::CnfFormula;
use crate::dpll::Dpll;
use crate::instance::{set_of, Element, ElementSet, ProblemInstance, SplitStrategy};
use crate::predicate::{EvalError, Predicate};
use crate::qx::{qx, QxError, QxOutcome, TraceSink};

/// `p(X) = 1` iff some target is a subset of `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupersetPredicate {
    targets: Vec<ElementSet>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SupersetError {
    #[error("at least one target is required")]
    NoTargets,
    #[error("target {0} is empty")]
    EmptyTarget(usize),
}

impl SupersetPredicate {
    pub fn new(targets: Vec<ElementSet>) -> Result<Self, SupersetError> {
        if targets.is_empty() {
            return Err(SupersetError::NoTargets);
        }
        if let Some(i) = targets.iter().position(|t| t.is_empty()) {
            return Err(SupersetError::EmptyTarget(i));
        }
        Ok(SupersetPredicate { targets })
    }

    /// Targets `{3,4,7}` and `{4,5,8}`.
    pub fn example_one() -> Self {
        SupersetPredicate::new(vec![set_of([3, 4, 7]), set_of([4, 5, 8])]).expect("non-empty")
    }

    pub fn targets(&self) -> &[ElementSet] {
        &self.targets
    }

    pub fn holds(&self, set: &ElementSet) -> bool {
        self.targets.iter().any(|t| t.is_subset(set))
    }
}

impl Predicate for SupersetPredicate {
    fn evaluate(&self, set: &ElementSet) -> Result<bool, EvalError> {
        Ok(self.holds(set))
    }
}

fn clause_index(formula: &CnfFormula, e: Element) -> Result<usize, EvalError> {
    let i = e.0 as usize;
    if i == 0 || i > formula.num_clauses() {
        Err(EvalError::UnknownElement(e))
    } else {
        Ok(i)
    }
}

/// `p(X) = 1` iff the clauses indexed by `X` are jointly unsatisfiable.
#[derive(Clone, Debug)]
pub struct MusPredicate<'f> {
    formula: &'f CnfFormula,
    solver: Dpll,
}

impl<'f> MusPredicate<'f> {
    pub fn new(formula: &'f CnfFormula, solver: Dpll) -> Self {
        MusPredicate { formula, solver }
    }
}

impl Predicate for MusPredicate<'_> {
    fn evaluate(&self, set: &ElementSet) -> Result<bool, EvalError> {
        let active = set
            .iter()
            .map(|&e| clause_index(self.formula, e))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(!self.solver.is_sat(self.formula, active)?)
    }
}

/// `q(X) = 1` iff the scope clauses minus `X` are satisfiable.
///
/// Construction checks that the whole scope is unsatisfiable, which is
/// exactly `q(∅) = 0`.
#[derive(Clone, Debug)]
pub struct McsPredicate<'f> {
    formula: &'f CnfFormula,
    scope: ElementSet,
    solver: Dpll,
}

impl<'f> McsPredicate<'f> {
    pub fn new(formula: &'f CnfFormula, scope: ElementSet, solver: Dpll) -> Result<Self, ManifestError> {
        for &e in &scope {
            clause_index(formula, e).map_err(|_| ManifestError::ClauseOutOfRange(e.0 as usize))?;
        }
        let q = McsPredicate {
            formula,
            scope,
            solver,
        };
        if q.evaluate(&ElementSet::new())? {
            return Err(ManifestError::SatisfiableScope);
        }
        Ok(q)
    }

    pub fn scope(&self) -> &ElementSet {
        &self.scope
    }
}

impl Predicate for McsPredicate<'_> {
    fn evaluate(&self, set: &ElementSet) -> Result<bool, EvalError> {
        for &e in set {
            clause_index(self.formula, e)?;
        }
        let kept = self.scope.difference(set).map(|e| e.0 as usize);
        self.solver.is_sat(self.formula, kept)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ManifestError {
    #[error("background clause {0} is out of range")]
    ClauseOutOfRange(usize),
    #[error("background clause {0} listed twice")]
    DuplicateBackground(usize),
    #[error("the formula is satisfiable, so there is nothing to correct")]
    SatisfiableScope,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Qx(#[from] QxError),
}

fn split_clauses(formula: &CnfFormula, background: &[usize]) -> Result<(Vec<Element>, ElementSet), ManifestError> {
    let mut hard = ElementSet::new();
    for &i in background {
        if i == 0 || i > formula.num_clauses() {
            return Err(ManifestError::ClauseOutOfRange(i));
        }
        if !hard.insert(Element(i as u32)) {
            return Err(ManifestError::DuplicateBackground(i));
        }
    }
    let analyzed = (1..=formula.num_clauses() as u32)
        .map(Element)
        .filter(|e| !hard.contains(e))
        .collect();
    Ok((analyzed, hard))
}

/// Instance for MUS extraction: `A` = non-background clauses in file order,
/// `B` = background.
pub fn mus_instance(formula: &CnfFormula, background: &[usize]) -> Result<ProblemInstance, ManifestError> {
    let (analyzed, hard) = split_clauses(formula, background)?;
    Ok(ProblemInstance::new(analyzed, hard).expect("disjoint by construction"))
}

/// A minimal subset `X` of the non-background clauses such that `X ∪ B` is
/// unsatisfiable.
pub fn mus(
    formula: &CnfFormula,
    background: &[usize],
    split: SplitStrategy,
    solver: Dpll,
    trace_sink: Option<&mut TraceSink>,
) -> Result<QxOutcome, ManifestError> {
    let instance = mus_instance(formula, background)?;
    let p = MusPredicate::new(formula, solver);
    Ok(qx(&instance, &p, split, trace_sink)?)
}

/// Instance and predicate for MCS extraction.
///
/// Background clauses are hard: they are never candidates for removal, so
/// they stay out of `A` and are always kept by the predicate. The MSMP
/// background is empty. If the hard clauses alone are unsatisfiable no
/// correction exists and QX reports "no p-set".
pub fn mcs_problem<'f>(
    formula: &'f CnfFormula,
    background: &[usize],
    solver: Dpll,
) -> Result<(ProblemInstance, McsPredicate<'f>), ManifestError> {
    let (analyzed, _hard) = split_clauses(formula, background)?;
    let scope: ElementSet = (1..=formula.num_clauses() as u32).map(Element).collect();
    let q = McsPredicate::new(formula, scope, solver)?;
    let instance = ProblemInstance::new(analyzed, []).expect("no background");
    Ok((instance, q))
}

/// A minimal set `X` of soft clauses whose removal makes the formula satisfiable.
pub fn mcs(
    formula: &CnfFormula,
    background: &[usize],
    split: SplitStrategy,
    solver: Dpll,
    trace_sink: Option<&mut TraceSink>,
) -> Result<QxOutcome, ManifestError> {
    let (instance, q) = mcs_problem(formula, background, solver)?;
    Ok(qx(&instance, &q, split, trace_sink)?)
}
