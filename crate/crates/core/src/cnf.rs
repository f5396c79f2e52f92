//! CNF formulas and DIMACS input.

use std::fmt::Write as _;

use thiserror::Error;

pub type Literal = i32;
pub type Clause = Vec<Literal>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<Clause>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("number of variables must be positive")]
    NoVariables,
    #[error("clause {clause} is empty")]
    EmptyClause { clause: usize },
    #[error("clause {clause}: literal {literal} out of range for {num_vars} variables")]
    LiteralOutOfRange {
        clause: usize,
        literal: Literal,
        num_vars: u32,
    },
    #[error("clause {clause} is a tautology (contains {var} and -{var})")]
    Tautology { clause: usize, var: u32 },
}

impl CnfFormula {
    /// Builds a formula, rejecting tautological clauses.
    pub fn new(num_vars: u32, clauses: Vec<Clause>) -> Result<Self, CnfError> {
        Self::build(num_vars, clauses, false)
    }

    pub fn build(num_vars: u32, clauses: Vec<Clause>, allow_tautologies: bool) -> Result<Self, CnfError> {
        if num_vars == 0 {
            return Err(CnfError::NoVariables);
        }
        for (i, clause) in clauses.iter().enumerate() {
            let index = i + 1;
            if clause.is_empty() {
                return Err(CnfError::EmptyClause { clause: index });
            }
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() > num_vars {
                    return Err(CnfError::LiteralOutOfRange {
                        clause: index,
                        literal: lit,
                        num_vars,
                    });
                }
            }
            if !allow_tautologies {
                if let Some(&lit) = clause.iter().find(|&&l| clause.contains(&-l)) {
                    return Err(CnfError::Tautology {
                        clause: index,
                        var: lit.unsigned_abs(),
                    });
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Clause by 1-based index.
    pub fn clause(&self, index: usize) -> Option<&Clause> {
        index.checked_sub(1).and_then(|i| self.clauses.get(i))
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                let _ = write!(out, "{lit} ");
            }
            out.push_str("0\n");
        }
        out
    }

    /// The five-clause example `{¬C, A∨¬B, C∨¬B, ¬A, B}` with A=1, B=2, C=3.
    pub fn intro_example() -> CnfFormula {
        CnfFormula::new(3, vec![vec![-3], vec![1, -2], vec![3, -2], vec![-1], vec![2]])
            .expect("well-formed")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("missing `p cnf <vars> <clauses>` header")]
    MissingHeader,
    #[error("malformed header `{0}`")]
    MalformedHeader(String),
    #[error("duplicate header")]
    DuplicateHeader,
    #[error("invalid literal `{0}`")]
    InvalidLiteral(String),
    #[error("literal {literal} out of range for {num_vars} variables")]
    LiteralOutOfRange { literal: Literal, num_vars: u32 },
    #[error("empty clause")]
    EmptyClause,
    #[error("clause {clause} contains {var} and -{var}")]
    Tautology { clause: usize, var: u32 },
    #[error("last clause is not terminated by 0")]
    UnterminatedClause,
    #[error("header declares {declared} clauses but {found} were found")]
    CountMismatch { declared: usize, found: usize },
    #[error("number of variables must be positive")]
    NoVariables,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Keep clauses containing both `v` and `-v` instead of rejecting them.
    pub allow_tautologies: bool,
}

pub fn parse_dimacs(text: &str) -> Result<CnfFormula, ParseError> {
    parse_dimacs_with(text, ParseOptions::default())
}

pub fn parse_dimacs_with(text: &str, options: ParseOptions) -> Result<CnfFormula, ParseError> {
    let err = |line: usize, kind: ParseErrorKind| ParseError { line, kind };

    let mut header: Option<(u32, usize)> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut current: Clause = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(line_no, ParseErrorKind::DuplicateHeader));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["p", "cnf", v, c] => v.parse::<u32>().ok().zip(c.parse::<usize>().ok()),
                _ => None,
            };
            let (vars, count) =
                parsed.ok_or_else(|| err(line_no, ParseErrorKind::MalformedHeader(line.to_string())))?;
            if vars == 0 {
                return Err(err(line_no, ParseErrorKind::NoVariables));
            }
            header = Some((vars, count));
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(err(line_no, ParseErrorKind::MissingHeader));
        };
        for token in line.split_whitespace() {
            let lit: Literal = token
                .parse()
                .map_err(|_| err(line_no, ParseErrorKind::InvalidLiteral(token.to_string())))?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(err(line_no, ParseErrorKind::EmptyClause));
                }
                if !options.allow_tautologies {
                    if let Some(&l) = current.iter().find(|&&l| current.contains(&-l)) {
                        return Err(err(
                            line_no,
                            ParseErrorKind::Tautology {
                                clause: clauses.len() + 1,
                                var: l.unsigned_abs(),
                            },
                        ));
                    }
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() > num_vars {
                    return Err(err(
                        line_no,
                        ParseErrorKind::LiteralOutOfRange {
                            literal: lit,
                            num_vars,
                        },
                    ));
                }
                current.push(lit);
            }
        }
    }

    let Some((num_vars, declared)) = header else {
        return Err(err(last_line.max(1), ParseErrorKind::MissingHeader));
    };
    if !current.is_empty() {
        return Err(err(last_line, ParseErrorKind::UnterminatedClause));
    }
    if clauses.len() != declared {
        return Err(err(
            last_line,
            ParseErrorKind::CountMismatch {
                declared,
                found: clauses.len(),
            },
        ));
    }
    Ok(CnfFormula::build(num_vars, clauses, options.allow_tautologies)
        .expect("parser enforces the formula invariants"))
}
