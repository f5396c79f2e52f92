//! Call-recursion trees of `QX'`: recording types, the `qx-trace/1` JSON
//! form, runtime invariant checks, and the flat text rendering.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::instance::{fmt_set, Element, ElementSet, ProblemInstance};
use crate::predicate::{EvalError, Predicate};
use crate::pset::is_minimal_p_set;
use crate::qx::QxOutcome;

pub const TRACE_SCHEMA: &str = "qx-trace/1";

/// One predicate evaluation: the tested set and the returned bit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluation {
    pub tested: ElementSet,
    #[serde(with = "bit")]
    pub bit: bool,
}

/// Where a `QX'` call was issued from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CallSite {
    Line7,
    Line16,
    Line17,
}

/// The line at which a `QX'` call returned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum ReturnLine {
    /// `C ≠ ∅ ∧ p(B) = 1`: returns ∅.
    Line11,
    /// `|A| = 1`: returns A.
    Line12,
    /// `X1 ∪ X2` after both recursive calls.
    Line18,
}

impl From<ReturnLine> for u8 {
    fn from(r: ReturnLine) -> u8 {
        match r {
            ReturnLine::Line11 => 11,
            ReturnLine::Line12 => 12,
            ReturnLine::Line18 => 18,
        }
    }
}

impl TryFrom<u8> for ReturnLine {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            11 => Ok(ReturnLine::Line11),
            12 => Ok(ReturnLine::Line12),
            18 => Ok(ReturnLine::Line18),
            other => Err(format!("invalid return line {other}")),
        }
    }
}

/// One `QX'(C, <A, B>)` invocation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceNode {
    pub site: CallSite,
    #[serde(rename = "C")]
    pub c: ElementSet,
    #[serde(rename = "A")]
    pub a: Vec<Element>,
    #[serde(rename = "B")]
    pub b: ElementSet,
    /// Absent iff `C = ∅`.
    pub line10: Option<Evaluation>,
    pub split_k: Option<usize>,
    pub return_line: ReturnLine,
    pub returned: ElementSet,
    /// Line-16 call; present iff `return_line` is 18.
    pub left: Option<Box<TraceNode>>,
    /// Line-17 call; present iff `return_line` is 18.
    pub right: Option<Box<TraceNode>>,
}

impl TraceNode {
    pub fn a_set(&self) -> ElementSet {
        self.a.iter().copied().collect()
    }

    pub fn instance(&self) -> ProblemInstance {
        ProblemInstance::new(self.a.iter().copied(), self.b.iter().copied())
            .expect("recorded node arguments are a valid instance")
    }

    pub fn children(&self) -> impl Iterator<Item = &TraceNode> {
        self.left.iter().chain(self.right.iter()).map(|b| &**b)
    }

    /// Pre-order walk, which is also the order calls were made.
    pub fn walk(&self) -> Vec<&TraceNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            if let Some(r) = &n.right {
                stack.push(r);
            }
            if let Some(l) = &n.left {
                stack.push(l);
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counters {
    /// Number of `QX'` calls.
    pub nodes: usize,
    /// Line-2 evaluation plus every line-10 evaluation.
    pub evaluations: usize,
    /// Longest root-to-leaf path counted in nodes; 0 without recursion.
    pub max_depth: usize,
}

impl Counters {
    pub fn of(root: Option<&TraceNode>) -> Counters {
        fn depth(n: &TraceNode) -> usize {
            1 + n.children().map(depth).max().unwrap_or(0)
        }
        match root {
            None => Counters {
                nodes: 0,
                evaluations: 1,
                max_depth: 0,
            },
            Some(r) => {
                let nodes = r.walk();
                Counters {
                    nodes: nodes.len(),
                    evaluations: 1 + nodes.iter().filter(|n| n.line10.is_some()).count(),
                    max_depth: depth(r),
                }
            }
        }
    }
}

/// Everything recorded about one `QX` run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceTree {
    /// The line-2 evaluation of `p(A ∪ B)`.
    pub root_check: Evaluation,
    /// The line-7 call, if the recursion was entered.
    pub root: Option<TraceNode>,
    pub outcome: QxOutcome,
    pub counters: Counters,
}

impl TraceTree {
    /// Line-10 evaluations in the order they were made.
    pub fn line10_evaluations(&self) -> Vec<&Evaluation> {
        self.root
            .iter()
            .flat_map(|r| r.walk())
            .filter_map(|n| n.line10.as_ref())
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": TRACE_SCHEMA,
            "tool": crate::TOOL_NAME,
            "root_check": self.root_check,
            "root": self.root,
            "outcome": self.outcome,
            "counters": self.counters,
        })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("trace serializes");
        s.push('\n');
        s
    }

    pub fn from_json_str(text: &str) -> Result<TraceTree, TraceParseError> {
        #[derive(Deserialize)]
        struct Doc {
            schema: String,
            root_check: Evaluation,
            root: Option<TraceNode>,
            outcome: QxOutcome,
            counters: Counters,
        }
        let doc: Doc = serde_json::from_str(text).map_err(TraceParseError::Json)?;
        if doc.schema != TRACE_SCHEMA {
            return Err(TraceParseError::Schema(doc.schema));
        }
        Ok(TraceTree {
            root_check: doc.root_check,
            root: doc.root,
            outcome: doc.outcome,
            counters: doc.counters,
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TraceParseError {
    #[error("invalid trace JSON: {0}")]
    Json(serde_json::Error),
    #[error("unsupported trace schema `{0}`")]
    Schema(String),
}

mod bit {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(u8::from(*b))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(serde::de::Error::custom(format!("bit must be 0 or 1, got {other}"))),
        }
    }
}

/// `(C ≠ ∅ ∨ p(B) = 0) ∧ p(A ∪ B) = 1`, evaluated with fresh predicate calls.
pub fn check_invar<P: Predicate + ?Sized>(node: &TraceNode, p: &P) -> Result<bool, EvalError> {
    let first = !node.c.is_empty() || !p.evaluate(&node.b)?;
    if !first {
        return Ok(false);
    }
    let mut all = node.b.clone();
    all.extend(node.a.iter().copied());
    p.evaluate(&all)
}

/// Which rule a node violated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    /// The entry invariant `(C ≠ ∅ ∨ p(B)=0) ∧ p(A ∪ B)=1`.
    Invariant,
    /// Return at line 11 iff `C ≠ ∅` and the recorded `p(B)` is 1.
    EmptyReturn,
    /// Return at line 12 iff `|A| = 1` (and line 11 did not fire).
    SingletonReturn,
    /// Every call returns a minimal p-set wrt. its own `<A, B>`.
    Minimality,
    /// Argument formation of child calls, result unions, tree shape.
    Structure,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Invariant => "invariant",
            Rule::EmptyReturn => "line-11 return",
            Rule::SingletonReturn => "line-12 return",
            Rule::Minimality => "minimality",
            Rule::Structure => "structure",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeFailure {
    /// `root`, `root.L`, `root.L.R`, ...
    pub path: String,
    pub rule: Rule,
    pub message: String,
}

impl fmt::Display for TreeFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: [{}] {}", self.path, self.rule, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TreeReport {
    pub nodes_checked: usize,
    pub failures: Vec<TreeFailure>,
}

impl TreeReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn violates(&self, rule: Rule) -> bool {
        self.failures.iter().any(|f| f.rule == rule)
    }
}

impl fmt::Display for TreeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "{} nodes checked, all rules hold", self.nodes_checked);
        }
        writeln!(
            f,
            "{} nodes checked, {} violation(s):",
            self.nodes_checked,
            self.failures.len()
        )?;
        for fail in &self.failures {
            writeln!(f, "  {fail}")?;
        }
        Ok(())
    }
}

/// Checks a complete trace node by node.
pub fn check_tree<P: Predicate + ?Sized>(tree: &TraceTree, p: &P) -> Result<TreeReport, EvalError> {
    let mut report = TreeReport::default();
    let mut fail = |path: &str, rule: Rule, message: String| {
        report.failures.push(TreeFailure {
            path: path.to_string(),
            rule,
            message,
        })
    };

    // run-level consistency
    match (&tree.outcome, tree.root_check.bit, &tree.root) {
        (QxOutcome::NoPSet, false, None) => {}
        (QxOutcome::NoPSet, _, _) => fail(
            "run",
            Rule::Structure,
            "'no p-set' requires a failed line-2 check and no recursion".into(),
        ),
        (QxOutcome::MinimalPSet { .. }, false, _) => fail(
            "run",
            Rule::Structure,
            "a p-set was returned although p(A ∪ B) = 0".into(),
        ),
        (QxOutcome::MinimalPSet { elements }, true, Some(root)) => {
            if &root.returned != elements {
                fail(
                    "run",
                    Rule::Structure,
                    format!(
                        "outcome {} differs from the root's return {}",
                        fmt_set(elements),
                        fmt_set(&root.returned)
                    ),
                );
            }
            let mut universe = root.b.clone();
            universe.extend(root.a.iter().copied());
            if universe != tree.root_check.tested {
                fail(
                    "run",
                    Rule::Structure,
                    "line-2 tested set is not A ∪ B of the root call".into(),
                );
            }
            if root.site != CallSite::Line7 || root.c != root.b {
                fail(
                    "root",
                    Rule::Structure,
                    "root call must come from line 7 with C = B".into(),
                );
            }
        }
        (QxOutcome::MinimalPSet { elements }, true, None) => {
            if !elements.is_empty() {
                fail(
                    "run",
                    Rule::Structure,
                    "without recursion only ∅ can be returned".into(),
                );
            }
        }
    }
    if tree.counters != Counters::of(tree.root.as_ref()) {
        fail("run", Rule::Structure, "counters do not match the tree".into());
    }

    if let Some(root) = &tree.root {
        check_node(root, "root", p, &mut report)?;
    }
    Ok(report)
}

fn check_node<P: Predicate + ?Sized>(
    node: &TraceNode,
    path: &str,
    p: &P,
    report: &mut TreeReport,
) -> Result<(), EvalError> {
    report.nodes_checked += 1;
    let mut fail = |rule: Rule, message: String| {
        report.failures.push(TreeFailure {
            path: path.to_string(),
            rule,
            message,
        })
    };

    let a_set = node.a_set();
    if node.a.is_empty() || a_set.len() != node.a.len() || !a_set.is_disjoint(&node.b) {
        fail(
            Rule::Structure,
            "A must be non-empty, duplicate-free and disjoint from B".into(),
        );
        return Ok(());
    }

    if !check_invar(node, p)? {
        fail(
            Rule::Invariant,
            format!(
                "invariant fails for C={}, A={}, B={}",
                fmt_set(&node.c),
                fmt_set(&node.a),
                fmt_set(&node.b)
            ),
        );
    }

    // line 10 bookkeeping
    let fired = match (&node.line10, node.c.is_empty()) {
        (None, true) => false,
        (Some(ev), false) => {
            if ev.tested != node.b {
                fail(Rule::Structure, "line-10 tested set is not B".into());
            }
            if p.evaluate(&node.b)? != ev.bit {
                fail(
                    Rule::Structure,
                    "recorded line-10 bit disagrees with the predicate".into(),
                );
            }
            ev.bit
        }
        (Some(_), true) => {
            fail(Rule::Structure, "p(B) evaluated although C = ∅".into());
            false
        }
        (None, false) => {
            fail(Rule::Structure, "p(B) not evaluated although C ≠ ∅".into());
            false
        }
    };

    match node.return_line {
        ReturnLine::Line11 => {
            if !fired {
                fail(
                    Rule::EmptyReturn,
                    "returned at line 11 without C ≠ ∅ ∧ p(B) = 1".into(),
                );
            }
            if !node.returned.is_empty() {
                fail(Rule::EmptyReturn, "line 11 must return ∅".into());
            }
        }
        ReturnLine::Line12 | ReturnLine::Line18 if fired => {
            fail(
                Rule::EmptyReturn,
                "C ≠ ∅ ∧ p(B) = 1 but the call did not return at line 11".into(),
            );
        }
        ReturnLine::Line12 => {
            if node.a.len() != 1 {
                fail(
                    Rule::SingletonReturn,
                    format!("returned at line 12 with |A| = {}", node.a.len()),
                );
            }
            if node.returned != a_set {
                fail(Rule::SingletonReturn, "line 12 must return A".into());
            }
        }
        ReturnLine::Line18 => {
            if node.a.len() == 1 {
                fail(
                    Rule::SingletonReturn,
                    "|A| = 1 but the call did not return at line 12".into(),
                );
            }
        }
    }

    if node.return_line == ReturnLine::Line18 {
        check_children(node, &mut fail);
    } else if node.left.is_some() || node.right.is_some() || node.split_k.is_some() {
        fail(
            Rule::Structure,
            "leaf call carries children or a split point".into(),
        );
    }

    if !is_minimal_p_set(&node.returned, &node.instance(), p)? {
        fail(
            Rule::Minimality,
            format!(
                "returned {} is not a minimal p-set wrt. <A={}, B={}>",
                fmt_set(&node.returned),
                fmt_set(&node.a),
                fmt_set(&node.b)
            ),
        );
    }

    if let Some(l) = &node.left {
        check_node(l, &format!("{path}.L"), p, report)?;
    }
    if let Some(r) = &node.right {
        check_node(r, &format!("{path}.R"), p, report)?;
    }
    Ok(())
}

fn check_children(node: &TraceNode, fail: &mut impl FnMut(Rule, String)) {
    let (Some(left), Some(right)) = (&node.left, &node.right) else {
        fail(
            Rule::Structure,
            "line-18 return requires both recursive calls".into(),
        );
        return;
    };
    let Some(k) = node.split_k.filter(|k| (1..node.a.len()).contains(k)) else {
        fail(
            Rule::Structure,
            format!("split point {:?} out of range", node.split_k),
        );
        return;
    };
    let a1 = &node.a[..k];
    let a2 = &node.a[k..];
    let a1_set: ElementSet = a1.iter().copied().collect();

    if left.site != CallSite::Line16 {
        fail(Rule::Structure, "left child was not issued at line 16".into());
    }
    if right.site != CallSite::Line17 {
        fail(Rule::Structure, "right child was not issued at line 17".into());
    }
    let b_left: ElementSet = node.b.union(&a1_set).copied().collect();
    if left.c != a1_set || left.a != a2 || left.b != b_left {
        fail(
            Rule::Structure,
            "left child arguments are not (A1, A2, B ∪ A1)".into(),
        );
    }
    let x2 = &left.returned;
    let b_right: ElementSet = node.b.union(x2).copied().collect();
    if &right.c != x2 || right.a != a1 || right.b != b_right {
        fail(
            Rule::Structure,
            "right child arguments are not (X2, A1, B ∪ X2)".into(),
        );
    }
    let union: ElementSet = left.returned.union(&right.returned).copied().collect();
    if node.returned != union {
        fail(Rule::Structure, "line 18 must return X1 ∪ X2".into());
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    Plain,
    Tested,
    Fixed,
    Eliminated,
}

fn render_row(order: &[Element], marks: impl Fn(Element) -> Mark) -> String {
    let mut out = String::new();
    let mut prev = None;
    for &e in order {
        let mark = marks(e);
        // adjacent tested elements form one continuous underline run
        if prev.is_some() && !(prev == Some(Mark::Tested) && mark == Mark::Tested) {
            out.push(' ');
        }
        match mark {
            Mark::Plain => out.push_str(&e.to_string()),
            Mark::Tested => out.push_str(&format!("_{e}_")),
            Mark::Fixed => out.push_str(&format!("#{e}#")),
            Mark::Eliminated => out.push_str(&format!("({e})")),
        }
        prev = Some(mark);
    }
    out
}

fn join_ids(ids: &[Element]) -> String {
    ids.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
}

/// Flat, one-line-per-evaluation rendering.
///
/// Markers: `_e_` tested and not yet fixed, `#e#` fixed in the result,
/// `(e)` eliminated, plain otherwise. Markers show the state just before the
/// evaluation. Line `(0)` is the line-2 check; lines `(1)`.. are the line-10
/// evaluations in chronological order.
pub fn render_flat(tree: &TraceTree) -> String {
    let mut out = String::new();
    let Some(root) = &tree.root else {
        out.push_str(&format!(
            "QX on A ∪ B = {}\n",
            fmt_set(&tree.root_check.tested)
        ));
        out.push_str(&format!(
            "(0) p(A ∪ B) => {}  {}\n",
            u8::from(tree.root_check.bit),
            if tree.root_check.bit { "p-set exists" } else { "no p-set" }
        ));
        out.push_str("no recursion entered\n");
        out.push_str(&format!("result: {}\n", outcome_text(&tree.outcome)));
        return out;
    };

    let order = &root.a;
    out.push_str(&format!(
        "QX on A = [{}], B = {}\n",
        join_ids(order),
        fmt_set(&root.b)
    ));
    out.push_str(&format!(
        "(0) {} => {}  p-set exists\n",
        render_row(order, |_| Mark::Tested),
        u8::from(tree.root_check.bit)
    ));

    let mut fixed = ElementSet::new();
    let mut eliminated = ElementSet::new();
    let mut rows: Vec<(String, Vec<String>)> = Vec::new();
    let mut pending_found: Vec<String> = Vec::new();

    for node in root.walk() {
        if let Some(ev) = &node.line10 {
            let row = render_row(order, |e| {
                if fixed.contains(&e) {
                    Mark::Fixed
                } else if eliminated.contains(&e) {
                    Mark::Eliminated
                } else if ev.tested.contains(&e) {
                    Mark::Tested
                } else {
                    Mark::Plain
                }
            });
            let verdict = if ev.bit {
                format!("{} irrelevant", join_ids(&node.a))
            } else if node.a.len() == 1 {
                format!("{} found", node.a[0])
            } else {
                format!("some element of p-set among {}", join_ids(&node.a))
            };
            rows.push((format!("{row} => {}", u8::from(ev.bit)), vec![verdict]));
        }
        match node.return_line {
            ReturnLine::Line11 => eliminated.extend(node.a.iter().copied()),
            ReturnLine::Line12 => {
                fixed.extend(node.a.iter().copied());
                if node.line10.is_none() {
                    // found without its own test; credited to the test that settled it
                    let note = format!("{} found", node.a[0]);
                    match rows.last_mut() {
                        Some((_, notes)) => notes.insert(0, note),
                        None => pending_found.push(note),
                    }
                }
            }
            ReturnLine::Line18 => {}
        }
    }

    for (i, (row, notes)) in rows.iter().enumerate() {
        out.push_str(&format!("({}) {row}  {}\n", i + 1, notes.join(", ")));
    }
    for note in pending_found {
        out.push_str(&format!("{note} without a line-10 test\n"));
    }
    out.push_str(&format!("result: {}\n", outcome_text(&tree.outcome)));
    out
}

fn outcome_text(outcome: &QxOutcome) -> String {
    match outcome {
        QxOutcome::MinimalPSet { elements } => fmt_set(elements),
        QxOutcome::NoPSet => "no p-set".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{set_of, SplitStrategy};
    use crate::manifest::SupersetPredicate;
    use crate::qx::qx_traced;

    fn example_one() -> (ProblemInstance, SupersetPredicate) {
        (
            ProblemInstance::from_ids(1..=8, []).unwrap(),
            SupersetPredicate::example_one(),
        )
    }

    fn example_tree() -> (TraceTree, SupersetPredicate) {
        let (inst, p) = example_one();
        (qx_traced(&inst, &p, SplitStrategy::Half).unwrap(), p)
    }

    fn find<'a>(tree: &'a TraceTree, c: &[u32], a: &[u32]) -> &'a TraceNode {
        tree.root
            .as_ref()
            .unwrap()
            .walk()
            .into_iter()
            .find(|n| n.c == set_of(c.iter().copied()) && n.a_set() == set_of(a.iter().copied()))
            .expect("node present")
    }

    #[test]
    fn invar_at_example_nodes() {
        let (tree, p) = example_tree();
        let root = tree.root.as_ref().unwrap();
        assert!(root.c.is_empty() && root.b.is_empty());
        assert!(check_invar(root, &p).unwrap());
        let inner = find(&tree, &[1, 2, 3, 4], &[5, 6, 7, 8]);
        assert_eq!(inner.b, set_of(1..=4));
        assert!(check_invar(inner, &p).unwrap());
    }

    #[test]
    fn invar_fails_on_satisfied_background_without_c() {
        let p = SupersetPredicate::new(vec![set_of([1])]).unwrap();
        let node = TraceNode {
            site: CallSite::Line17,
            c: ElementSet::new(),
            a: vec![Element(2)],
            b: set_of([1]),
            line10: None,
            split_k: None,
            return_line: ReturnLine::Line12,
            returned: set_of([2]),
            left: None,
            right: None,
        };
        assert!(!check_invar(&node, &p).unwrap());
    }

    #[test]
    fn example_tree_passes_all_checks() {
        let (tree, p) = example_tree();
        let report = check_tree(&tree, &p).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.nodes_checked, tree.counters.nodes);
    }

    #[test]
    fn swapped_children_are_a_structural_failure() {
        let (mut tree, p) = example_tree();
        let root = tree.root.as_mut().unwrap();
        std::mem::swap(&mut root.left, &mut root.right);
        let report = check_tree(&tree, &p).unwrap();
        assert!(report.violates(Rule::Structure), "{report}");
        assert!(report
            .failures
            .iter()
            .any(|f| f.path == "root" && f.message.contains("line 16")));
    }

    #[test]
    fn non_minimal_return_is_flagged() {
        let (mut tree, p) = example_tree();
        // {3,4,7} ∪ {8} is a p-set but not minimal
        let root = tree.root.as_mut().unwrap();
        root.returned.insert(Element(8));
        let report = check_tree(&tree, &p).unwrap();
        assert!(report.violates(Rule::Minimality), "{report}");
        assert!(report
            .failures
            .iter()
            .any(|f| f.path == "root" && f.rule == Rule::Minimality));
    }

    #[test]
    fn json_round_trip() {
        let (tree, _) = example_tree();
        let text = tree.to_json_string();
        let back = TraceTree::from_json_str(&text).unwrap();
        assert_eq!(back, tree);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["schema"], "qx-trace/1");
        assert_eq!(v["root"]["site"], "line7");
        assert_eq!(v["root"]["line10"], serde_json::Value::Null);
        assert_eq!(v["root"]["left"]["line10"]["bit"], 0);
        assert_eq!(v["root"]["return_line"], 18);
        assert_eq!(v["outcome"]["elements"], serde_json::json!([3, 4, 7]));
    }

    #[test]
    fn json_rejects_other_schema() {
        let (tree, _) = example_tree();
        let text = tree.to_json_string().replace("qx-trace/1", "qx-trace/9");
        assert!(matches!(
            TraceTree::from_json_str(&text),
            Err(TraceParseError::Schema(_))
        ));
    }

    #[test]
    fn flat_rendering_of_steps() {
        let (tree, _) = example_tree();
        let text = render_flat(&tree);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[2], "(1) _1__2__3__4_ 5 6 7 8 => 0  some element of p-set among 5,6,7,8");
        assert_eq!(lines[4], "(3) _1__2__3__4__5__6__7_ 8 => 1  7 found, 8 irrelevant");
        assert_eq!(lines[5], "(4) _1__2__3__4_ 5 6 #7# (8) => 1  5,6 irrelevant");
        assert_eq!(lines[6], "(5) 1 2 3 4 (5) (6) #7# (8) => 0  some element of p-set among 1,2,3,4");
        assert_eq!(lines[8], "(7) _1__2__3_ 4 (5) (6) #7# (8) => 0  4 found");
        assert_eq!(lines[10], "(9) 1 2 #3# #4# (5) (6) #7# (8) => 1  1,2 irrelevant");
        assert_eq!(lines.last().unwrap(), &"result: {3,4,7}");
    }

    #[test]
    fn flat_rendering_without_recursion() {
        let inst = ProblemInstance::from_ids([], [9]).unwrap();
        let p = SupersetPredicate::new(vec![set_of([9])]).unwrap();
        let tree = qx_traced(&inst, &p, SplitStrategy::Half).unwrap();
        let text = render_flat(&tree);
        assert!(text.starts_with("QX on A ∪ B = {9}\n"));
        assert!(text.contains("no recursion entered"));
    }
}
