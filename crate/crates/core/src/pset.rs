//! Membership tests for p-sets and minimal p-sets.

use crate::instance::{ElementSet, ProblemInstance};
use crate::predicate::{EvalError, Predicate};

/// `X ⊆ A` and `p(X ∪ B) = 1`.
pub fn is_p_set<P: Predicate + ?Sized>(
    x: &ElementSet,
    instance: &ProblemInstance,
    p: &P,
) -> Result<bool, EvalError> {
    if !x.is_subset(&instance.analyzed_set()) {
        return Ok(false);
    }
    is_p_set_unchecked(x, instance.background(), p)
}

fn is_p_set_unchecked<P: Predicate + ?Sized>(
    x: &ElementSet,
    background: &ElementSet,
    p: &P,
) -> Result<bool, EvalError> {
    let with_background: ElementSet = x.union(background).copied().collect();
    p.evaluate(&with_background)
}

/// A p-set none of whose single-element deletions is still a p-set.
///
/// Checking single deletions is enough only because `p` is monotone: if some
/// proper subset `X' ⊂ X` were a p-set, so would be every `X ∖ {e}` with
/// `X' ⊆ X ∖ {e}`. For a non-monotone predicate this test can accept sets
/// that are not minimal.
pub fn is_minimal_p_set<P: Predicate + ?Sized>(
    x: &ElementSet,
    instance: &ProblemInstance,
    p: &P,
) -> Result<bool, EvalError> {
    if !is_p_set(x, instance, p)? {
        return Ok(false);
    }
    for e in x {
        let mut smaller = x.clone();
        smaller.remove(e);
        if is_p_set_unchecked(&smaller, instance.background(), p)? {
            return Ok(false);
        }
    }
    Ok(true)
}
