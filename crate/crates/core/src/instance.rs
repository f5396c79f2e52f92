//! Elements, problem instances and split strategies.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An element of the universe, identified by a non-negative integer id.
///
/// For CNF manifestations the id is the 1-based clause index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(pub u32);

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for Element {
    fn from(id: u32) -> Self {
        Element(id)
    }
}

/// Sets are kept ordered by id so iteration and rendering are deterministic.
pub type ElementSet = BTreeSet<Element>;

/// Builds an [`ElementSet`] from raw ids.
pub fn set_of<I: IntoIterator<Item = u32>>(ids: I) -> ElementSet {
    ids.into_iter().map(Element).collect()
}

/// Renders ids as `{1,2,3}`.
pub fn fmt_set<'a, I: IntoIterator<Item = &'a Element>>(set: I) -> String {
    let ids: Vec<String> = set.into_iter().map(|e| e.0.to_string()).collect();
    format!("{{{}}}", ids.join(","))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("element {0} occurs more than once in the analyzed set")]
    DuplicateAnalyzed(Element),
    #[error("element {0} is in both the analyzed set and the background")]
    Overlap(Element),
}

/// A problem instance `<A, B>`: an ordered analyzed set and a disjoint background.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemInstance {
    analyzed: Vec<Element>,
    background: ElementSet,
}

impl ProblemInstance {
    pub fn new(
        analyzed: impl IntoIterator<Item = Element>,
        background: impl IntoIterator<Item = Element>,
    ) -> Result<Self, InstanceError> {
        let analyzed: Vec<Element> = analyzed.into_iter().collect();
        let background: ElementSet = background.into_iter().collect();
        let mut seen = ElementSet::new();
        for &e in &analyzed {
            if !seen.insert(e) {
                return Err(InstanceError::DuplicateAnalyzed(e));
            }
            if background.contains(&e) {
                return Err(InstanceError::Overlap(e));
            }
        }
        Ok(ProblemInstance {
            analyzed,
            background,
        })
    }

    /// Convenience constructor from raw ids.
    pub fn from_ids(
        analyzed: impl IntoIterator<Item = u32>,
        background: impl IntoIterator<Item = u32>,
    ) -> Result<Self, InstanceError> {
        Self::new(
            analyzed.into_iter().map(Element),
            background.into_iter().map(Element),
        )
    }

    pub fn analyzed(&self) -> &[Element] {
        &self.analyzed
    }

    pub fn background(&self) -> &ElementSet {
        &self.background
    }

    pub fn analyzed_set(&self) -> ElementSet {
        self.analyzed.iter().copied().collect()
    }

    /// `A ∪ B`.
    pub fn universe(&self) -> ElementSet {
        let mut all = self.background.clone();
        all.extend(self.analyzed.iter().copied());
        all
    }
}

/// Chooses `k` for splitting an analyzed sequence of length `n ≥ 2` into
/// the prefix `1..=k` and the suffix `k+1..=n`.
#[derive(Clone, Copy, Debug, Default)]
pub enum SplitStrategy {
    /// `k = ⌈n/2⌉`
    #[default]
    Half,
    /// `k = 1`
    Prefix,
    /// `k = n - 1`
    Suffix,
    /// Arbitrary function; the result is validated before use.
    Custom(fn(usize) -> usize),
}

impl SplitStrategy {
    /// Raw split point. Callers validate it with [`SplitStrategy::checked`].
    pub fn k(&self, n: usize) -> usize {
        match self {
            SplitStrategy::Half => split_half(n),
            SplitStrategy::Prefix => 1,
            SplitStrategy::Suffix => n.saturating_sub(1),
            SplitStrategy::Custom(f) => f(n),
        }
    }

    /// Split point with `1 ≤ k ≤ n-1` enforced.
    pub fn checked(&self, n: usize) -> Result<usize, SplitError> {
        let k = self.k(n);
        if n >= 2 && (1..n).contains(&k) {
            Ok(k)
        } else {
            Err(SplitError { n, k })
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SplitStrategy::Half => "half",
            SplitStrategy::Prefix => "prefix",
            SplitStrategy::Suffix => "suffix",
            SplitStrategy::Custom(_) => "custom",
        }
    }
}

impl std::str::FromStr for SplitStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "half" => Ok(SplitStrategy::Half),
            "prefix" => Ok(SplitStrategy::Prefix),
            "suffix" => Ok(SplitStrategy::Suffix),
            other => Err(format!(
                "unknown split strategy `{other}` (expected half, prefix or suffix)"
            )),
        }
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("split strategy returned k = {k} for n = {n}; need 1 <= k <= n-1")]
pub struct SplitError {
    pub n: usize,
    pub k: usize,
}

/// `⌈n/2⌉`. Panics for `n < 2`, where no split into two non-empty halves exists.
pub fn split_half(n: usize) -> usize {
    assert!(n >= 2, "split_half requires n >= 2, got {n}");
    n.div_ceil(2)
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("GET({i}, {j}) out of range for a sequence of length {len}")]
pub struct GetError {
    pub i: usize,
    pub j: usize,
    pub len: usize,
}

/// Contiguous subsequence at 1-based inclusive positions `i..=j`.
pub fn get(analyzed: &[Element], i: usize, j: usize) -> Result<Vec<Element>, GetError> {
    if i == 0 || i > j || j > analyzed.len() {
        return Err(GetError {
            i,
            j,
            len: analyzed.len(),
        });
    }
    Ok(analyzed[i - 1..j].to_vec())
}
