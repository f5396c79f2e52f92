//! `msmp-kit`: MUS/MCS extraction from DIMACS files, the built-in demo run,
//! and the randomized verification harness.

use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use msmp_core::cnf::{parse_dimacs, CnfFormula};
use msmp_core::dpll::Dpll;
use msmp_core::manifest::{mcs_problem, mus_instance, ManifestError, MusPredicate, SupersetPredicate};
use msmp_core::suites::{self, Counterexample, PredicateFamily, SuiteReport};
use msmp_core::trace::{render_flat, TraceTree};
use msmp_core::verify::Counting;
use msmp_core::{qx, qx_traced, EvalError, ElementSet, ProblemInstance, QxError, QxOutcome, SplitStrategy, TraceSink, TOOL_NAME};

const OUTPUT_SCHEMA: &str = "msmp-kit-output/1";

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "msmp-kit", version, about = "Minimal sets subject to monotone predicates via QuickXPlain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimal unsatisfiable subset of a DIMACS formula
    Mus(SolveArgs),
    /// Minimal correction subset of a DIMACS formula
    Mcs(SolveArgs),
    /// Run the built-in eight-element example and print its flat trace
    Demo(DemoArgs),
    /// Run the seeded verification suites
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Split {
    #[default]
    Half,
    Prefix,
    Suffix,
}

impl From<Split> for SplitStrategy {
    fn from(s: Split) -> Self {
        match s {
            Split::Half => SplitStrategy::Half,
            Split::Prefix => SplitStrategy::Prefix,
            Split::Suffix => SplitStrategy::Suffix,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Family {
    #[default]
    Superset,
    Parity,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// DIMACS CNF input file
    #[arg(long)]
    cnf: PathBuf,
    /// 1-based clause indices forming the background (hard clauses for mcs)
    #[arg(long, value_delimiter = ',')]
    background: Vec<usize>,
    #[arg(long, value_enum, default_value_t)]
    split: Split,
    /// Write the qx-trace/1 document of the run here
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Maximum DPLL decisions per satisfiability check
    #[arg(long)]
    decision_limit: Option<u64>,
}

#[derive(Args, Debug)]
struct DemoArgs {
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = suites::DEFAULT_SEED)]
    seed: u64,
    /// Trials per suite; defaults differ per suite
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    split: Split,
    /// Predicate family for the monotonicity suite
    #[arg(long, value_enum, default_value_t)]
    predicate: Family,
    /// Where to write the trace of the first counterexample
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        let code = match e {
            EvalError::DecisionLimit { .. } => EXIT_RESOURCE,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<QxError> for Failure {
    fn from(e: QxError) -> Self {
        match e {
            QxError::Eval(e) => e.into(),
            other => Failure::input(other.to_string()),
        }
    }
}

impl From<ManifestError> for Failure {
    fn from(e: ManifestError) -> Self {
        match e {
            ManifestError::Eval(e) => e.into(),
            ManifestError::Qx(e) => e.into(),
            other => Failure::input(other.to_string()),
        }
    }
}

struct Style {
    enabled: bool,
}

impl Style {
    fn detect() -> Self {
        Style {
            enabled: std::env::var_os("QX_NO_COLOR").is_none() && io::stdout().is_terminal(),
        }
    }

    fn paint(&self, code: &str, text: &str) -> String {
        if self.enabled {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    fn verdict(&self, passed: bool) -> String {
        if passed {
            self.paint("32", "PASS")
        } else {
            self.paint("31", "FAIL")
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let style = Style::detect();
    let result = match cli.command {
        Command::Mus(args) => cmd_solve(Kind::Mus, &args),
        Command::Mcs(args) => cmd_solve(Kind::Mcs, &args),
        Command::Demo(args) => cmd_demo(&args, &style),
        Command::Verify(args) => cmd_verify(&args, &style),
    };
    match result {
        Ok(out) => {
            print!("{}", out.stdout);
            let _ = io::stdout().flush();
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

struct Output {
    stdout: String,
    code: u8,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output { stdout, code: 0 }
    }
}

fn envelope(command: &str, mut body: Value) -> String {
    let mut doc = json!({ "tool": TOOL_NAME, "schema": OUTPUT_SCHEMA, "command": command });
    if let (Value::Object(doc), Value::Object(body)) = (&mut doc, body.take()) {
        doc.extend(body);
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
    s.push('\n');
    s
}

fn write_trace(path: &Path, tree: &TraceTree) -> Result<(), Failure> {
    fs::write(path, tree.to_json_string())
        .map_err(|e| Failure::input(format!("cannot write trace to {}: {e}", path.display())))
}

fn ids(set: &ElementSet) -> Vec<u32> {
    set.iter().map(|e| e.0).collect()
}

fn fmt_ids(set: &ElementSet) -> String {
    ids(set).iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

#[derive(Clone, Copy)]
enum Kind {
    Mus,
    Mcs,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Mus => "mus",
            Kind::Mcs => "mcs",
        }
    }
}

fn read_formula(path: &Path) -> Result<CnfFormula, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    parse_dimacs(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn run_counted<P: msmp_core::Predicate>(
    instance: &ProblemInstance,
    p: P,
    split: SplitStrategy,
) -> Result<(QxOutcome, TraceTree, u64), QxError> {
    let counting = Counting::new(p);
    let mut sink = TraceSink::new();
    let outcome = qx(instance, &counting, split, Some(&mut sink))?;
    let tree = sink.take().expect("sink is filled on success");
    Ok((outcome, tree, counting.logical_count()))
}

fn cmd_solve(kind: Kind, args: &SolveArgs) -> Result<Output, Failure> {
    let formula = read_formula(&args.cnf)?;
    let solver = Dpll::with_limit(args.decision_limit);
    let split = SplitStrategy::from(args.split);

    let run = match kind {
        Kind::Mus => {
            let instance = mus_instance(&formula, &args.background)?;
            Some(run_counted(&instance, MusPredicate::new(&formula, solver), split)?)
        }
        Kind::Mcs => match mcs_problem(&formula, &args.background, solver) {
            Ok((instance, q)) => Some(run_counted(&instance, q, split)?),
            // already satisfiable: nothing needs to be removed
            Err(ManifestError::SatisfiableScope) => None,
            Err(e) => return Err(e.into()),
        },
    };

    let (clauses, evaluations) = match &run {
        Some((outcome, tree, evaluations)) => {
            if let Some(path) = &args.trace {
                write_trace(path, tree)?;
            }
            (outcome.elements().cloned(), *evaluations)
        }
        None => (Some(ElementSet::new()), 1),
    };

    let stdout = match args.format {
        Format::Json => {
            let body = match &clauses {
                Some(set) => json!({ "result": kind.name(), "clauses": ids(set), "evaluations": evaluations }),
                None => json!({ "result": "none", "evaluations": evaluations }),
            };
            envelope(kind.name(), body)
        }
        Format::Text => match (&clauses, kind) {
            (Some(set), _) => format!("{}: {}\n", kind.name(), fmt_ids(set)),
            (None, Kind::Mus) => "no p-set: the clauses are satisfiable\n".to_string(),
            (None, Kind::Mcs) => "no p-set: the background clauses alone are unsatisfiable\n".to_string(),
        },
    };
    Ok(Output::ok(stdout))
}

fn cmd_demo(args: &DemoArgs, style: &Style) -> Result<Output, Failure> {
    let instance = ProblemInstance::from_ids(1..=8, []).expect("valid demo instance");
    let tree = qx_traced(&instance, &SupersetPredicate::example_one(), SplitStrategy::Half)?;
    if let Some(path) = &args.trace {
        write_trace(path, &tree)?;
    }
    let result = tree.outcome.elements().map(ids).unwrap_or_default();
    let stdout = match args.format {
        Format::Json => envelope(
            "demo",
            json!({ "result": result, "evaluations": tree.counters.evaluations }),
        ),
        Format::Text => {
            let flat = render_flat(&tree);
            match flat.split_once('\n') {
                Some((header, rest)) => format!("{}\n{rest}", style.paint("1", header)),
                None => flat,
            }
        }
    };
    Ok(Output::ok(stdout))
}

fn counterexample_trace_path(args: &VerifyArgs, suite: &str, cx: &Counterexample, first: bool) -> PathBuf {
    match (&args.trace, first) {
        (Some(path), true) => path.clone(),
        _ => {
            let slug = suite.replace(' ', "-");
            std::env::temp_dir().join(format!("msmp-kit-{slug}-seed{}-trial{}.json", cx.seed, cx.trial))
        }
    }
}

fn cmd_verify(args: &VerifyArgs, style: &Style) -> Result<Output, Failure> {
    let split = SplitStrategy::from(args.split);
    let trials = |default: usize| args.trials.unwrap_or(default);
    if args.trials == Some(0) {
        eprintln!("warning: --trials 0 runs no trials, every suite passes vacuously");
    }
    let family = match args.predicate {
        Family::Superset => PredicateFamily::Superset,
        Family::Parity => PredicateFamily::Parity,
    };

    let reports: Vec<SuiteReport> = vec![
        suites::oracle_agreement(args.seed, trials(suites::DEFAULT_ORACLE_TRIALS), split),
        suites::invariant_trees(args.seed, trials(suites::DEFAULT_ORACLE_TRIALS), split),
        suites::lemma_composition(args.seed, trials(suites::DEFAULT_LEMMA_TRIALS)),
        suites::dpll_equivalence(args.seed, trials(suites::DEFAULT_DPLL_FORMULAS)),
        suites::monotonicity(args.seed, trials(suites::DEFAULT_LEMMA_TRIALS), family),
    ];

    let mut first_dump = true;
    let mut suite_docs = Vec::new();
    let mut text = String::new();
    for report in &reports {
        text.push_str(&format!(
            "{} {} ({} trials, {} failures)\n",
            style.verdict(report.passed()),
            report.name,
            report.trials,
            report.failures.len()
        ));
        let mut failure_docs = Vec::new();
        // only the first counterexample of a suite is dumped
        if let Some(cx) = report.failures.first() {
            let trace_path = match &cx.trace {
                Some(tree) => {
                    let path = counterexample_trace_path(args, report.name, cx, first_dump);
                    first_dump = false;
                    write_trace(&path, tree)?;
                    Some(path)
                }
                None => None,
            };
            let shown = trace_path.as_ref().map(|p| p.display().to_string());
            text.push_str(&format!("  seed: {}  trial: {}\n", cx.seed, cx.trial));
            for line in cx.detail.lines() {
                text.push_str(&format!("  {line}\n"));
            }
            text.push_str(&format!("  trace: {}\n", shown.as_deref().unwrap_or("none")));
            failure_docs.push(json!({
                "seed": cx.seed,
                "trial": cx.trial,
                "detail": cx.detail,
                "trace_path": shown,
            }));
        }
        suite_docs.push(json!({
            "name": report.name,
            "trials": report.trials,
            "passed": report.passed(),
            "failure_count": report.failures.len(),
            "counterexamples": failure_docs,
        }));
    }

    let passed = reports.iter().all(SuiteReport::passed);
    let stdout = match args.format {
        Format::Json => envelope(
            "verify",
            json!({
                "generator": suites::GENERATOR_VERSION,
                "seed": args.seed,
                "passed": passed,
                "suites": suite_docs,
            }),
        ),
        Format::Text => {
            text.push_str(&format!("{}\n", if passed { "all suites passed" } else { "verification failed" }));
            text
        }
    };
    Ok(Output {
        stdout,
        code: if passed { 0 } else { EXIT_VERIFY_FAILED },
    })
}
