//! A small deterministic DPLL decision procedure.
//!
//! Unit propagation runs to a fixpoint, then the solver branches on the
//! lowest-index variable that is still unassigned in some open clause,
//! trying `true` before `false`. No learning, no restarts, no randomness.

use crate::cnf::{Clause, CnfFormula};
use crate::predicate::EvalError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Dpll {
    /// Maximum number of branching decisions per call; `None` is unlimited.
    pub decision_limit: Option<u64>,
}

impl Dpll {
    pub fn with_limit(limit: Option<u64>) -> Self {
        Dpll { decision_limit: limit }
    }

    /// Is the conjunction of the clauses at the given 1-based indices satisfiable?
    /// Panics on indices outside the formula.
    pub fn is_sat(&self, formula: &CnfFormula, active: impl IntoIterator<Item = usize>) -> Result<bool, EvalError> {
        let clauses: Vec<&Clause> = active
            .into_iter()
            .map(|i| formula.clause(i).unwrap_or_else(|| panic!("clause index {i} out of range")))
            .collect();
        let mut assignment = vec![None; formula.num_vars() as usize + 1];
        let mut decisions = 0;
        self.search(&clauses, &mut assignment, &mut decisions)
    }

    fn search(
        &self,
        clauses: &[&Clause],
        assignment: &mut [Option<bool>],
        decisions: &mut u64,
    ) -> Result<bool, EvalError> {
        if !propagate(clauses, assignment) {
            return Ok(false);
        }
        let Some(var) = branch_variable(clauses, assignment) else {
            return Ok(true);
        };
        *decisions += 1;
        if let Some(limit) = self.decision_limit {
            if *decisions > limit {
                return Err(EvalError::DecisionLimit { limit });
            }
        }
        for value in [true, false] {
            let mut next = assignment.to_vec();
            next[var] = Some(value);
            if self.search(clauses, &mut next, decisions)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Convenience wrapper with no decision limit.
pub fn dpll_sat(formula: &CnfFormula, active: impl IntoIterator<Item = usize>) -> bool {
    Dpll::default()
        .is_sat(formula, active)
        .expect("unlimited search cannot hit a limit")
}

fn value(lit: i32, assignment: &[Option<bool>]) -> Option<bool> {
    assignment[lit.unsigned_abs() as usize].map(|v| v == (lit > 0))
}

/// Unit propagation to fixpoint. Returns false on a conflict.
fn propagate(clauses: &[&Clause], assignment: &mut [Option<bool>]) -> bool {
    loop {
        let mut changed = false;
        for clause in clauses {
            let mut satisfied = false;
            let mut unassigned = None;
            let mut open = 0;
            for &lit in clause.iter() {
                match value(lit, assignment) {
                    Some(true) => {
                        satisfied = true;
                        break;
                    }
                    Some(false) => {}
                    None => {
                        open += 1;
                        unassigned = Some(lit);
                    }
                }
            }
            if satisfied {
                continue;
            }
            match (open, unassigned) {
                (0, _) => return false,
                (1, Some(lit)) => {
                    assignment[lit.unsigned_abs() as usize] = Some(lit > 0);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return true;
        }
    }
}

fn branch_variable(clauses: &[&Clause], assignment: &[Option<bool>]) -> Option<usize> {
    clauses
        .iter()
        .filter(|c| !c.iter().any(|&l| value(l, assignment) == Some(true)))
        .flat_map(|c| c.iter())
        .map(|&l| l.unsigned_abs() as usize)
        .filter(|&v| assignment[v].is_none())
        .min()
}
