// SPDX-License-Identifier: Apache-2.0

use super::{Cell, CellOp, RawNetlist};
use crate::error::{Error, Result};

/// Parses the ISCAS `.bench` dialect.
///
/// Accepts `INPUT(w)`, `OUTPUT(w)` and `w = OP(a, b, ...)` lines; `#` starts
/// a comment. Several statements may share a line when separated by
/// whitespace. Operand order is kept, since it fixes left/right inputs later.
pub fn parse_bench(text: &str) -> Result<RawNetlist> {
    let mut nl = RawNetlist::default();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("");
        let mut rest = line.trim();
        while !rest.is_empty() {
            rest = parse_statement(rest, line_no, &mut nl)?.trim_start();
        }
    }
    nl.validate()?;
    Ok(nl)
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line: Some(line),
        msg: msg.into(),
    }
}

fn is_wire_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | ',' | '=' | '#')
}

fn take_ident(s: &str) -> (&str, &str) {
    let end = s.find(|c: char| !is_wire_char(c)).unwrap_or(s.len());
    (&s[..end], &s[end..])
}

/// Consumes `( a, b, ... )` and returns the operand names.
fn take_args(s: &str, line: usize) -> Result<(Vec<String>, &str)> {
    let s = s.trim_start();
    let s = s
        .strip_prefix('(')
        .ok_or_else(|| err(line, "expected `(`"))?;
    let close = s.find(')').ok_or_else(|| err(line, "missing `)`"))?;
    let args = s[..close]
        .split(',')
        .map(str::trim)
        .filter(|a| !a.is_empty())
        .map(|a| {
            if a.chars().all(is_wire_char) {
                Ok(a.to_string())
            } else {
                Err(err(line, format!("malformed wire name `{a}`")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((args, &s[close + 1..]))
}

fn parse_statement<'a>(s: &'a str, line: usize, nl: &mut RawNetlist) -> Result<&'a str> {
    let (head, rest) = take_ident(s);
    if head.is_empty() {
        return Err(err(line, format!("unexpected `{}`", s.chars().next().unwrap())));
    }
    let after = rest.trim_start();
    if let Some(rhs) = after.strip_prefix('=') {
        let (label, rhs) = take_ident(rhs.trim_start());
        let op = CellOp::from_label(label)
            .ok_or_else(|| err(line, format!("unknown operator `{label}`")))?;
        let (operands, rest) = take_args(rhs, line)?;
        if operands.is_empty() {
            return Err(err(line, format!("{op} cell without operands")));
        }
        nl.cells.push(Cell {
            output: head.to_string(),
            op,
            operands,
            line: Some(line),
        });
        return Ok(rest);
    }
    let kind = head.to_ascii_uppercase();
    if kind == "INPUT" || kind == "OUTPUT" {
        let (args, rest) = take_args(after, line)?;
        if args.len() != 1 {
            return Err(err(line, format!("{kind} takes exactly one wire")));
        }
        let name = args.into_iter().next().unwrap();
        if kind == "INPUT" {
            if nl.inputs.contains(&name) {
                return Err(err(line, format!("input `{name}` declared twice")));
            }
            nl.inputs.push(name);
        } else {
            nl.outputs.push(name);
        }
        return Ok(rest);
    }
    Err(err(line, format!("expected INPUT, OUTPUT or assignment, found `{head}`")))
}
