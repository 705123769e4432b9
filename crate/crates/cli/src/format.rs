//! Line-oriented text format for models.
//!
//! ```text
//! # comments start with '#'
//! vars N
//! clause <weight|hard> L1 L2 ...     literals are +/-(1-based variable)
//! factor K v1 .. vK t0 .. tK        1-based variables, log-space table
//! evidence true
//! evidence card (eq|le|ge) B v1 .. vn
//! ```
//!
//! Weights are written in log-space with Rust's shortest round-trip float
//! formatting, so `parse(serialize(m))` reproduces the model exactly.

use std::fmt::Write as _;

use thiserror::Error;

use symlift::model::{
    ClauseWeight, CmpOp, EvidencePredicate, Literal, Model, ModelError, SymFactor, VarId,
    WeightedClause,
};

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Structure {
        line: usize,
        #[source]
        source: ModelError,
    },
    #[error("{0}")]
    Model(#[from] ModelError),
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

struct Builder {
    num_vars: Option<(usize, usize)>, // (count, declared-at line)
    clauses: Vec<WeightedClause>,
    factors: Vec<SymFactor>,
    evidence: Option<EvidencePredicate>,
}

impl Builder {
    fn var(&self, line: usize, token: &str) -> Result<VarId, ParseError> {
        let Some((num_vars, _)) = self.num_vars else {
            return Err(syntax(line, "directive appears before 'vars'"));
        };
        let idx: i64 = token
            .parse()
            .map_err(|_| syntax(line, format!("expected a variable, found '{token}'")))?;
        if idx < 1 || idx as usize > num_vars {
            return Err(syntax(
                line,
                format!("variable {idx} out of range 1..={num_vars}"),
            ));
        }
        Ok(VarId((idx - 1) as u32))
    }
}

/// Parses the text model format, reporting the offending line on error.
pub fn parse_model(text: &str) -> Result<Model, ParseError> {
    let mut b = Builder {
        num_vars: None,
        clauses: Vec::new(),
        factors: Vec::new(),
        evidence: None,
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens[0] {
            "vars" => {
                if b.num_vars.is_some() {
                    return Err(syntax(line, "duplicate 'vars' directive"));
                }
                let n: usize = tokens
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| syntax(line, "usage: vars N"))?;
                if tokens.len() != 2 {
                    return Err(syntax(line, "usage: vars N"));
                }
                if n == 0 {
                    return Err(ParseError::Structure {
                        line,
                        source: ModelError::NoVariables,
                    });
                }
                b.num_vars = Some((n, line));
            }
            "clause" => {
                if tokens.len() < 3 {
                    return Err(syntax(line, "usage: clause <weight|hard> L1 [L2 ...]"));
                }
                let weight = if tokens[1] == "hard" {
                    ClauseWeight::Hard
                } else {
                    let w: f64 = tokens[1].parse().map_err(|_| {
                        syntax(line, format!("expected a weight or 'hard', found '{}'", tokens[1]))
                    })?;
                    if !w.is_finite() {
                        return Err(ParseError::Structure {
                            line,
                            source: ModelError::NonFiniteWeight,
                        });
                    }
                    ClauseWeight::Soft(w)
                };
                let mut literals = Vec::new();
                for tok in &tokens[2..] {
                    let (positive, var_tok) = match tok.strip_prefix('-') {
                        Some(rest) => (false, rest),
                        None => (true, tok.strip_prefix('+').unwrap_or(tok)),
                    };
                    literals.push(Literal {
                        var: b.var(line, var_tok)?,
                        positive,
                    });
                }
                let mut seen = std::collections::HashSet::new();
                for lit in &literals {
                    if !seen.insert(lit.var) {
                        return Err(ParseError::Structure {
                            line,
                            source: ModelError::DuplicateVar { var: lit.var.0 },
                        });
                    }
                }
                b.clauses.push(WeightedClause { weight, literals });
            }
            "factor" => {
                let arity: usize = tokens
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| syntax(line, "usage: factor K v1..vK t0..tK"))?;
                if tokens.len() != 2 + arity + arity + 1 {
                    return Err(syntax(
                        line,
                        format!(
                            "factor of arity {arity} needs {arity} variables and {} table entries",
                            arity + 1
                        ),
                    ));
                }
                let mut scope = Vec::with_capacity(arity);
                for tok in &tokens[2..2 + arity] {
                    scope.push(b.var(line, tok)?);
                }
                let mut table = Vec::with_capacity(arity + 1);
                for tok in &tokens[2 + arity..] {
                    let w: f64 = tok
                        .parse()
                        .map_err(|_| syntax(line, format!("expected a table entry, found '{tok}'")))?;
                    table.push(w);
                }
                b.factors.push(SymFactor {
                    scope,
                    count_table: table,
                });
            }
            "evidence" => {
                if b.evidence.is_some() {
                    return Err(syntax(line, "duplicate 'evidence' directive"));
                }
                match tokens.get(1) {
                    Some(&"true") if tokens.len() == 2 => {
                        b.evidence = Some(EvidencePredicate::True);
                    }
                    Some(&"card") => {
                        let cmp = match tokens.get(2) {
                            Some(&"eq") => CmpOp::Eq,
                            Some(&"le") => CmpOp::Le,
                            Some(&"ge") => CmpOp::Ge,
                            _ => return Err(syntax(line, "usage: evidence card (eq|le|ge) B v1..vn")),
                        };
                        let bound: usize = tokens
                            .get(3)
                            .and_then(|t| t.parse().ok())
                            .ok_or_else(|| syntax(line, "usage: evidence card (eq|le|ge) B v1..vn"))?;
                        if tokens.len() < 5 {
                            return Err(syntax(line, "cardinality evidence needs at least one variable"));
                        }
                        let mut subset = Vec::new();
                        for tok in &tokens[4..] {
                            subset.push(b.var(line, tok)?);
                        }
                        b.evidence = Some(EvidencePredicate::Cardinality { subset, cmp, bound });
                    }
                    _ => return Err(syntax(line, "usage: evidence (true | card (eq|le|ge) B v1..vn)")),
                }
            }
            other => {
                return Err(syntax(line, format!("unknown directive '{other}'")));
            }
        }
    }
    let Some((num_vars, _)) = b.num_vars else {
        return Err(syntax(0, "missing 'vars' directive"));
    };
    Ok(Model::new(
        num_vars,
        b.clauses,
        b.factors,
        b.evidence.unwrap_or(EvidencePredicate::True),
    )?)
}

/// Serializes a model; `parse_model(serialize_model(m))` is structurally
/// equal to `m`.
pub fn serialize_model(m: &Model) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "vars {}", m.num_vars);
    for clause in &m.clauses {
        let _ = match clause.weight {
            ClauseWeight::Hard => write!(out, "clause hard"),
            ClauseWeight::Soft(w) => write!(out, "clause {w}"),
        };
        for lit in &clause.literals {
            let sign = if lit.positive { "" } else { "-" };
            let _ = write!(out, " {sign}{}", lit.var.0 + 1);
        }
        out.push('\n');
    }
    for factor in &m.factors {
        let _ = write!(out, "factor {}", factor.scope.len());
        for v in &factor.scope {
            let _ = write!(out, " {}", v.0 + 1);
        }
        for w in &factor.count_table {
            let _ = write!(out, " {w}");
        }
        out.push('\n');
    }
    match &m.evidence {
        EvidencePredicate::True => out.push_str("evidence true\n"),
        EvidencePredicate::Cardinality { subset, cmp, bound } => {
            let cmp = match cmp {
                CmpOp::Eq => "eq",
                CmpOp::Le => "le",
                CmpOp::Ge => "ge",
            };
            let _ = write!(out, "evidence card {cmp} {bound}");
            for v in subset {
                let _ = write!(out, " {}", v.0 + 1);
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use symlift::model::{gen_pairwise, gen_pigeonhole};

    #[test]
    #[allow(clippy::approx_constant)] // the decimal literal is the point here
    fn parse_minimal_model() {
        let m = parse_model("vars 1\nclause 0.693147 1\nevidence true\n").unwrap();
        assert_eq!(m.num_vars, 1);
        assert_eq!(m.clauses.len(), 1);
        assert_eq!(m.clauses[0].weight, ClauseWeight::Soft(0.693147));
        assert!(m.clauses[0].literals[0].positive);
    }

    #[test]
    fn round_trip_generators() {
        for m in [
            gen_pigeonhole(3, 2, 2.0, true).unwrap(),
            gen_pigeonhole(4, 3, 0.5, false).unwrap(),
            gen_pairwise(5, [0.25, -1.5, 0.0], [0.0, 1.0]).unwrap(),
        ] {
            let text = serialize_model(&m);
            let parsed = parse_model(&text).unwrap();
            assert_eq!(parsed, m);
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_model("vars 2\nclause hard 1 1\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::Structure {
                line: 2,
                source: ModelError::DuplicateVar { var: 0 }
            }
        );

        let err = parse_model("vars 2\nclause 1.0 3\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }));

        let err = parse_model("clause 1.0 1\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, .. }));

        let err = parse_model("vars 2\nfrobnicate 3\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let m = parse_model("# header\nvars 2 # two variables\n\nclause 1.5 1 -2\n").unwrap();
        assert_eq!(m.num_vars, 2);
        assert_eq!(m.clauses[0].literals.len(), 2);
    }

    #[test]
    fn evidence_forms() {
        let m = parse_model("vars 3\nevidence card le 2 1 2 3\n").unwrap();
        assert_eq!(
            m.evidence,
            EvidencePredicate::Cardinality {
                subset: vec![VarId(0), VarId(1), VarId(2)],
                cmp: CmpOp::Le,
                bound: 2
            }
        );
        let text = serialize_model(&m);
        assert_eq!(parse_model(&text).unwrap(), m);
    }
}
