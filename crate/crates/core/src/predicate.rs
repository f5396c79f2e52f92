//! The monotone predicate abstraction.
//!
//! A predicate maps finite element sets to a bit. QuickXPlain relies on the
//! contract `p(∅) = 0` and `X' ⊂ X'' ⇒ p(X') ≤ p(X'')` but never checks it;
//! see [`crate::verify::check_monotone`] for that.

use thiserror::Error;

use crate::instance::{Element, ElementSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("solver decision limit of {limit} exceeded")]
    DecisionLimit { limit: u64 },
    #[error("element {0} is not known to the predicate")]
    UnknownElement(Element),
    #[error("{0}")]
    Other(String),
}

pub trait Predicate {
    fn evaluate(&self, set: &ElementSet) -> Result<bool, EvalError>;
}

impl<P: Predicate + ?Sized> Predicate for &P {
    fn evaluate(&self, set: &ElementSet) -> Result<bool, EvalError> {
        (**self).evaluate(set)
    }
}

impl<P: Predicate + ?Sized> Predicate for Box<P> {
    fn evaluate(&self, set: &ElementSet) -> Result<bool, EvalError> {
        (**self).evaluate(set)
    }
}

/// Adapts an infallible closure.
pub struct FnPredicate<F>(pub F);

impl<F: Fn(&ElementSet) -> bool> Predicate for FnPredicate<F> {
    fn evaluate(&self, set: &ElementSet) -> Result<bool, EvalError> {
        Ok((self.0)(set))
    }
}
