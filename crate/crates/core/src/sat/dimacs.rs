// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write;

use super::Lit;
use crate::error::{Error, Result};

/// A parsed DIMACS CNF formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dimacs {
    pub num_vars: u32,
    pub clauses: Vec<Vec<Lit>>,
}

pub(super) fn format(num_vars: u32, clauses: &[Vec<Lit>]) -> String {
    let mut out = format!("p cnf {num_vars} {}\n", clauses.len());
    for c in clauses {
        for l in c {
            write!(out, "{} ", l.dimacs()).unwrap();
        }
        out.push_str("0\n");
    }
    out
}

/// Parses DIMACS CNF. Comment lines and a trailing `%` marker are ignored.
pub fn parse_dimacs(text: &str) -> Result<Dimacs> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        let bad = |msg: String| Error::Parse {
            line: Some(i + 1),
            msg,
        };
        if let Some(rest) = line.strip_prefix('p') {
            let f: Vec<&str> = rest.split_whitespace().collect();
            if f.len() != 3 || f[0] != "cnf" {
                return Err(bad(format!("bad header `{line}`")));
            }
            let nv = f[1].parse().map_err(|_| bad("bad variable count".into()))?;
            let nc = f[2].parse().map_err(|_| bad("bad clause count".into()))?;
            header = Some((nv, nc));
            continue;
        }
        let (nv, _) = header.ok_or_else(|| bad("clause before header".into()))?;
        for tok in line.split_whitespace() {
            let v: i32 = tok.parse().map_err(|_| bad(format!("bad literal `{tok}`")))?;
            if v == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if v.unsigned_abs() > nv {
                return Err(bad(format!("literal {v} exceeds declared {nv} variables")));
            } else {
                current.push(Lit::from_dimacs(v));
            }
        }
    }
    let (num_vars, nc) = header.ok_or_else(|| Error::Parse {
        line: None,
        msg: "missing `p cnf` header".into(),
    })?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != nc {
        return Err(Error::Parse {
            line: None,
            msg: format!("header declares {nc} clauses, found {}", clauses.len()),
        });
    }
    Ok(Dimacs { num_vars, clauses })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_agree() {
        let text = "c hello\np cnf 3 2\n1 -2 0\n3 0\n";
        let d = parse_dimacs(text).unwrap();
        assert_eq!(d.num_vars, 3);
        assert_eq!(format(d.num_vars, &d.clauses), "p cnf 3 2\n1 -2 0\n3 0\n");
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_dimacs("1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 1\n2 0\n").is_err());
        assert!(parse_dimacs("p cnf 2 2\n1 0\n").is_err());
        assert!(parse_dimacs("p dnf 2 0\n").is_err());
    }
}
