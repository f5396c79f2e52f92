//! QuickXPlain: the `QX` entry procedure and the recursive `QX'`.
//!
//! The two procedures follow the published pseudocode line for line. Line
//! numbers referenced below (2, 4, 7, 10–18) are the pseudocode's own and
//! are also what the trace records as call sites and return lines.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{get, Element, ElementSet, GetError, ProblemInstance, SplitError, SplitStrategy};
use crate::predicate::{EvalError, Predicate};
use crate::trace::{CallSite, Counters, Evaluation, ReturnLine, TraceNode, TraceTree};

/// Result of a QuickXPlain run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QxOutcome {
    /// A minimal p-set, ids ascending.
    MinimalPSet { elements: ElementSet },
    /// `p(A ∪ B) = 0`, so no p-set exists.
    NoPSet,
}

impl QxOutcome {
    pub fn elements(&self) -> Option<&ElementSet> {
        match self {
            QxOutcome::MinimalPSet { elements } => Some(elements),
            QxOutcome::NoPSet => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QxError {
    #[error("configuration error: {0}")]
    Split(#[from] SplitError),
    #[error("internal error: {0}")]
    Get(#[from] GetError),
    #[error("predicate evaluation failed: {0}")]
    Eval(#[from] EvalError),
}

/// Receives the call-recursion tree of a run.
///
/// The sink is filled only when the run completes; on error it stays empty.
#[derive(Debug, Default)]
pub struct TraceSink {
    tree: Option<TraceTree>,
}

impl TraceSink {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tree(&self) -> Option<&TraceTree> {
        self.tree.as_ref()
    }

    pub fn take(&mut self) -> Option<TraceTree> {
        self.tree.take()
    }
}

/// Runs `QX(<A, B>)`.
pub fn qx<P: Predicate + ?Sized>(
    instance: &ProblemInstance,
    p: &P,
    split: SplitStrategy,
    trace_sink: Option<&mut TraceSink>,
) -> Result<QxOutcome, QxError> {
    let engine = Engine {
        p,
        split,
        record: trace_sink.is_some(),
    };
    let (outcome, tree) = engine.run(instance)?;
    if let Some(sink) = trace_sink {
        sink.tree = tree;
    }
    Ok(outcome)
}

/// Runs `QX` and returns the full trace, which also carries the outcome.
pub fn qx_traced<P: Predicate + ?Sized>(
    instance: &ProblemInstance,
    p: &P,
    split: SplitStrategy,
) -> Result<TraceTree, QxError> {
    let mut sink = TraceSink::new();
    qx(instance, p, split, Some(&mut sink))?;
    Ok(sink.take().expect("completed run fills the sink"))
}

/// Runs `QX'(C, <A, B>)` directly.
///
/// The result is a minimal p-set wrt. `<A, B>` whenever
/// `(C ≠ ∅ ∨ p(B) = 0) ∧ p(A ∪ B) = 1` holds on entry.
pub fn qx_prime<P: Predicate + ?Sized>(
    c: &ElementSet,
    instance: &ProblemInstance,
    p: &P,
    split: SplitStrategy,
) -> Result<ElementSet, QxError> {
    let engine = Engine {
        p,
        split,
        record: false,
    };
    let step = engine.prime(c, instance.analyzed(), instance.background(), CallSite::Line7)?;
    Ok(step.returned)
}

/// Like [`qx_prime`] but returns the recorded subtree rooted at this call.
pub fn qx_prime_traced<P: Predicate + ?Sized>(
    c: &ElementSet,
    instance: &ProblemInstance,
    p: &P,
    split: SplitStrategy,
) -> Result<TraceNode, QxError> {
    let engine = Engine {
        p,
        split,
        record: true,
    };
    let step = engine.prime(c, instance.analyzed(), instance.background(), CallSite::Line7)?;
    Ok(step.node.expect("recording engine produces a node"))
}

struct Engine<'p, P: ?Sized> {
    p: &'p P,
    split: SplitStrategy,
    record: bool,
}

struct Step {
    returned: ElementSet,
    node: Option<TraceNode>,
}

impl<P: Predicate + ?Sized> Engine<'_, P> {
    fn run(&self, instance: &ProblemInstance) -> Result<(QxOutcome, Option<TraceTree>), QxError> {
        let a = instance.analyzed();
        let b = instance.background();

        // line 2
        let everything = instance.universe();
        let exists = self.p.evaluate(&everything)?;
        let root_check = Evaluation {
            tested: everything,
            bit: exists,
        };

        let (outcome, root) = if !exists {
            // line 3
            (QxOutcome::NoPSet, None)
        } else if a.is_empty() {
            // lines 4-5
            (
                QxOutcome::MinimalPSet {
                    elements: ElementSet::new(),
                },
                None,
            )
        } else {
            // line 7: QX'(B, <A, B>)
            let step = self.prime(b, a, b, CallSite::Line7)?;
            (
                QxOutcome::MinimalPSet {
                    elements: step.returned,
                },
                step.node,
            )
        };

        let tree = self.record.then(|| {
            let counters = Counters::of(root.as_ref());
            TraceTree {
                root_check,
                root,
                outcome: outcome.clone(),
                counters,
            }
        });
        Ok((outcome, tree))
    }

    fn prime(
        &self,
        c: &ElementSet,
        a: &[Element],
        b: &ElementSet,
        site: CallSite,
    ) -> Result<Step, QxError> {
        // line 10: p(B) is evaluated only when C ≠ ∅
        let line10 = if c.is_empty() {
            None
        } else {
            let bit = self.p.evaluate(b)?;
            Some(Evaluation {
                tested: b.clone(),
                bit,
            })
        };

        let leaf = |returned: ElementSet, return_line: ReturnLine, line10: Option<Evaluation>| Step {
            node: self.record.then(|| TraceNode {
                site,
                c: c.clone(),
                a: a.to_vec(),
                b: b.clone(),
                line10,
                split_k: None,
                return_line,
                returned: returned.clone(),
                left: None,
                right: None,
            }),
            returned,
        };

        if line10.as_ref().is_some_and(|e| e.bit) {
            // line 11
            return Ok(leaf(ElementSet::new(), ReturnLine::Line11, line10));
        }
        if a.len() == 1 {
            // line 12
            return Ok(leaf(a.iter().copied().collect(), ReturnLine::Line12, line10));
        }

        // lines 13-15
        let k = self.split.checked(a.len())?;
        let a1 = get(a, 1, k)?;
        let a2 = get(a, k + 1, a.len())?;
        let a1_set: ElementSet = a1.iter().copied().collect();

        // line 16: X2 <- QX'(A1, <A2, B ∪ A1>)
        let b_left: ElementSet = b.union(&a1_set).copied().collect();
        let left = self.prime(&a1_set, &a2, &b_left, CallSite::Line16)?;

        // line 17: X1 <- QX'(X2, <A1, B ∪ X2>)
        let x2 = &left.returned;
        let b_right: ElementSet = b.union(x2).copied().collect();
        let right = self.prime(x2, &a1, &b_right, CallSite::Line17)?;

        // line 18
        let returned: ElementSet = right.returned.union(&left.returned).copied().collect();
        let node = self.record.then(|| TraceNode {
            site,
            c: c.clone(),
            a: a.to_vec(),
            b: b.clone(),
            line10,
            split_k: Some(k),
            return_line: ReturnLine::Line18,
            returned: returned.clone(),
            left: left.node.map(Box::new),
            right: right.node.map(Box::new),
        });
        Ok(Step { returned, node })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::set_of;
    use crate::predicate::FnPredicate;

    fn example_one(s: &ElementSet) -> bool {
        let x = set_of([3, 4, 7]);
        let y = set_of([4, 5, 8]);
        x.is_subset(s) || y.is_subset(s)
    }

    #[test]
    fn example_one_returns_347() {
        let inst = ProblemInstance::from_ids(1..=8, []).unwrap();
        let out = qx(&inst, &FnPredicate(example_one), SplitStrategy::Half, None).unwrap();
        assert_eq!(out, QxOutcome::MinimalPSet { elements: set_of([3, 4, 7]) });
    }

    #[test]
    fn all_zero_predicate_has_no_p_set() {
        let inst = ProblemInstance::from_ids([1, 2], []).unwrap();
        let out = qx(&inst, &FnPredicate(|_: &ElementSet| false), SplitStrategy::Half, None).unwrap();
        assert_eq!(out, QxOutcome::NoPSet);
    }

    #[test]
    fn empty_analyzed_with_satisfied_background() {
        let inst = ProblemInstance::from_ids([], [9]).unwrap();
        let p = FnPredicate(|s: &ElementSet| s.contains(&Element(9)));
        let out = qx(&inst, &p, SplitStrategy::Half, None).unwrap();
        assert_eq!(out, QxOutcome::MinimalPSet { elements: ElementSet::new() });
    }

    #[test]
    fn prime_left_subtree_of_example_one() {
        let inst = ProblemInstance::from_ids(5..=8, 1..=4).unwrap();
        let c = set_of(1..=4);
        let got = qx_prime(&c, &inst, &FnPredicate(example_one), SplitStrategy::Half).unwrap();
        assert_eq!(got, set_of([7]));
    }

    #[test]
    fn prime_returns_empty_at_line_11() {
        let inst = ProblemInstance::from_ids([1, 2], [3, 4, 7]).unwrap();
        let node =
            qx_prime_traced(&set_of([3, 4]), &inst, &FnPredicate(example_one), SplitStrategy::Half)
                .unwrap();
        assert_eq!(node.return_line, ReturnLine::Line11);
        assert!(node.returned.is_empty());
    }

    #[test]
    fn prime_singleton_transition_element() {
        // p(B) = 0, p(A ∪ B) = 1, |A| = 1
        let inst = ProblemInstance::from_ids([2], [1]).unwrap();
        let p = FnPredicate(|s: &ElementSet| s.contains(&Element(1)) && s.contains(&Element(2)));
        let node = qx_prime_traced(&set_of([1]), &inst, &p, SplitStrategy::Half).unwrap();
        assert_eq!(node.return_line, ReturnLine::Line12);
        assert_eq!(node.returned, set_of([2]));
        assert_eq!(node.line10, Some(Evaluation { tested: set_of([1]), bit: false }));
    }

    #[test]
    fn bad_split_aborts_without_trace() {
        let inst = ProblemInstance::from_ids(1..=4, []).unwrap();
        let mut sink = TraceSink::new();
        let err = qx(
            &inst,
            &FnPredicate(|s: &ElementSet| s.contains(&Element(4))),
            SplitStrategy::Custom(|n| n),
            Some(&mut sink),
        )
        .unwrap_err();
        assert_eq!(err, QxError::Split(SplitError { n: 4, k: 4 }));
        assert!(sink.tree().is_none());
    }

    #[test]
    fn eval_errors_propagate() {
        struct Failing;
        impl Predicate for Failing {
            fn evaluate(&self, s: &ElementSet) -> Result<bool, EvalError> {
                if s.len() < 3 {
                    Err(EvalError::DecisionLimit { limit: 7 })
                } else {
                    Ok(true)
                }
            }
        }
        let inst = ProblemInstance::from_ids(1..=4, []).unwrap();
        let err = qx(&inst, &Failing, SplitStrategy::Half, None).unwrap_err();
        assert_eq!(err, QxError::Eval(EvalError::DecisionLimit { limit: 7 }));
    }

    #[test]
    fn background_alone_satisfies_predicate() {
        // line 10 fires at the root because C = B ≠ ∅ and p(B) = 1
        let inst = ProblemInstance::from_ids([1, 2, 3], [4]).unwrap();
        let p = FnPredicate(|s: &ElementSet| s.contains(&Element(4)));
        let tree = qx_traced(&inst, &p, SplitStrategy::Half).unwrap();
        assert_eq!(tree.outcome, QxOutcome::MinimalPSet { elements: ElementSet::new() });
        let root = tree.root.unwrap();
        assert_eq!(root.return_line, ReturnLine::Line11);
    }
}
