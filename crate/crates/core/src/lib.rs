//! Minimal sets over monotone predicates.
//!
//! [`qx`] implements QuickXPlain: given an ordered analyzed set `A`, a
//! disjoint background `B` and a monotone predicate `p`, it returns a
//! subset-minimal `X ⊆ A` with `p(X ∪ B) = 1`, or reports that none exists.
//!
//! Around it:
//! - [`manifest`]: MUS and MCS extraction over CNF, plus synthetic predicates;
//! - [`verify`]: brute-force oracle, monotonicity checks, evaluation counting;
//! - [`trace`]: call-recursion trees, runtime invariant checks, flat rendering;
//! - [`suites`]: seeded randomized agreement suites.

pub mod cnf;
pub mod dpll;
pub mod instance;
pub mod manifest;
pub mod predicate;
pub mod pset;
pub mod qx;
pub mod suites;
pub mod trace;
pub mod verify;

pub use instance::{get, set_of, split_half, Element, ElementSet, ProblemInstance, SplitStrategy};
pub use predicate::{EvalError, FnPredicate, Predicate};
pub use pset::{is_minimal_p_set, is_p_set};
pub use qx::{qx, qx_prime, qx_prime_traced, qx_traced, QxError, QxOutcome, TraceSink};

/// Name carried by every JSON document this crate produces.
pub const TOOL_NAME: &str = "msmp-kit";
