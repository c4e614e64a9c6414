// SPDX-License-Identifier: Apache-2.0

//! External netlists and their normalization into the two-input gate model.
//!
//! The pipeline is [`parse_bench`] → [`unroll_sequential`] →
//! [`decompose_multi_input`] → [`normalize`]. [`RawNetlist::evaluate`] is an
//! independent interpreter over wire names used to cross-check the result.

mod bench;
mod json;

use std::collections::{HashMap, HashSet};
use std::fmt;

pub use bench::parse_bench;
pub use json::{read_json, write_json, CircuitFile, GateEntry};

use crate::circuit::{Assignment, BitVector, Gate, NodeRef, Topology};
use crate::error::{Error, Result};
use crate::gate::GateType;

/// Cell operators understood by the front end.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum CellOp {
    And,
    Nand,
    Or,
    Nor,
    Xor,
    Xnor,
    Not,
    Buff,
    Dff,
}

impl CellOp {
    pub fn from_label(label: &str) -> Option<CellOp> {
        Some(match label.to_ascii_uppercase().as_str() {
            "AND" => CellOp::And,
            "NAND" => CellOp::Nand,
            "OR" => CellOp::Or,
            "NOR" => CellOp::Nor,
            "XOR" => CellOp::Xor,
            "XNOR" => CellOp::Xnor,
            "NOT" | "INV" => CellOp::Not,
            "BUFF" | "BUF" => CellOp::Buff,
            "DFF" => CellOp::Dff,
            _ => return None,
        })
    }

    pub fn label(self) -> &'static str {
        match self {
            CellOp::And => "AND",
            CellOp::Nand => "NAND",
            CellOp::Or => "OR",
            CellOp::Nor => "NOR",
            CellOp::Xor => "XOR",
            CellOp::Xnor => "XNOR",
            CellOp::Not => "NOT",
            CellOp::Buff => "BUFF",
            CellOp::Dff => "DFF",
        }
    }

    /// Associative base operator and whether the result is complemented.
    fn base(self) -> Option<(CellOp, bool)> {
        match self {
            CellOp::And => Some((CellOp::And, false)),
            CellOp::Nand => Some((CellOp::And, true)),
            CellOp::Or => Some((CellOp::Or, false)),
            CellOp::Nor => Some((CellOp::Or, true)),
            CellOp::Xor => Some((CellOp::Xor, false)),
            CellOp::Xnor => Some((CellOp::Xor, true)),
            _ => None,
        }
    }

    fn two_input_type(self) -> Option<GateType> {
        match self {
            CellOp::And => Some(GateType::AND),
            CellOp::Nand => Some(GateType::NAND),
            CellOp::Or => Some(GateType::OR),
            CellOp::Nor => Some(GateType::NOR),
            CellOp::Xor => Some(GateType::XOR),
            CellOp::Xnor => Some(GateType::XNOR),
            _ => None,
        }
    }
}

impl fmt::Display for CellOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cell {
    pub output: String,
    pub op: CellOp,
    pub operands: Vec<String>,
    /// Source line, when the cell came from a file.
    pub line: Option<usize>,
}

/// A named-wire netlist with arbitrary fan-in cells.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RawNetlist {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub cells: Vec<Cell>,
}

impl RawNetlist {
    pub fn dff_count(&self) -> usize {
        self.cells.iter().filter(|c| c.op == CellOp::Dff).count()
    }

    /// Checks single definitions and that every referenced wire is defined.
    pub fn validate(&self) -> Result<()> {
        let mut defined: HashMap<&str, Option<usize>> = HashMap::new();
        for name in &self.inputs {
            if defined.insert(name, None).is_some() {
                return Err(Error::Parse {
                    line: None,
                    msg: format!("input `{name}` declared twice"),
                });
            }
        }
        for c in &self.cells {
            if defined.insert(&c.output, c.line).is_some() {
                return Err(Error::Parse {
                    line: c.line,
                    msg: format!("wire `{}` defined more than once", c.output),
                });
            }
        }
        for c in &self.cells {
            let arity_ok = match c.op {
                CellOp::Not | CellOp::Buff | CellOp::Dff => c.operands.len() == 1,
                _ => !c.operands.is_empty(),
            };
            if !arity_ok {
                return Err(Error::Parse {
                    line: c.line,
                    msg: format!("{} cell with {} operands", c.op, c.operands.len()),
                });
            }
            if let Some(w) = c.operands.iter().find(|w| !defined.contains_key(w.as_str())) {
                return Err(Error::Parse {
                    line: c.line,
                    msg: format!("undefined wire `{w}`"),
                });
            }
        }
        if let Some(w) = self.outputs.iter().find(|w| !defined.contains_key(w.as_str())) {
            return Err(Error::Parse {
                line: None,
                msg: format!("output `{w}` is never defined"),
            });
        }
        Ok(())
    }

    /// Cell indices in dependency order. DFF outputs are treated as sources.
    pub fn topological_cells(&self) -> Result<Vec<usize>> {
        let producer: HashMap<&str, usize> = self
            .cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.op != CellOp::Dff)
            .map(|(i, c)| (c.output.as_str(), i))
            .collect();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.cells.len()];
        let mut order = Vec::with_capacity(self.cells.len());
        for root in 0..self.cells.len() {
            if state[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            state[root] = 1;
            while let Some(&mut (c, ref mut next)) = stack.last_mut() {
                let cell = &self.cells[c];
                let deps: &[String] = if cell.op == CellOp::Dff { &[] } else { &cell.operands };
                if *next < deps.len() {
                    let w = &deps[*next];
                    *next += 1;
                    if let Some(&p) = producer.get(w.as_str()) {
                        match state[p] {
                            0 => {
                                state[p] = 1;
                                stack.push((p, 0));
                            }
                            1 => {
                                return Err(Error::Normalize(format!(
                                    "combinational cycle through wire `{w}`"
                                )))
                            }
                            _ => {}
                        }
                    }
                } else {
                    state[c] = 2;
                    order.push(c);
                    stack.pop();
                }
            }
        }
        Ok(order)
    }

    /// Reference semantics by wire name. Requires a DFF-free netlist.
    pub fn evaluate(&self, x: &BitVector) -> Result<BitVector> {
        if x.len() != self.inputs.len() {
            return Err(Error::Shape {
                expected: self.inputs.len(),
                got: x.len(),
            });
        }
        let mut val: HashMap<&str, bool> = self
            .inputs
            .iter()
            .map(String::as_str)
            .zip(x.iter())
            .collect();
        for i in self.topological_cells()? {
            let c = &self.cells[i];
            let ops: Vec<bool> = c.operands.iter().map(|w| val[w.as_str()]).collect();
            let v = match c.op {
                CellOp::And => ops.iter().all(|&b| b),
                CellOp::Nand => !ops.iter().all(|&b| b),
                CellOp::Or => ops.iter().any(|&b| b),
                CellOp::Nor => !ops.iter().any(|&b| b),
                CellOp::Xor => ops.iter().fold(false, |a, &b| a ^ b),
                CellOp::Xnor => !ops.iter().fold(false, |a, &b| a ^ b),
                CellOp::Not => !ops[0],
                CellOp::Buff => ops[0],
                CellOp::Dff => {
                    return Err(Error::Normalize(
                        "cannot evaluate a netlist with flip-flops; unroll it first".into(),
                    ))
                }
            };
            val.insert(&c.output, v);
        }
        Ok(self.outputs.iter().map(|w| val[w.as_str()]).collect())
    }
}

/// Cuts every flip-flop: its output becomes a new primary input and its data
/// wire a new primary output, both appended in cell order.
pub fn unroll_sequential(nl: &RawNetlist) -> RawNetlist {
    let mut out = RawNetlist {
        inputs: nl.inputs.clone(),
        outputs: nl.outputs.clone(),
        cells: Vec::with_capacity(nl.cells.len()),
    };
    for c in &nl.cells {
        if c.op == CellOp::Dff {
            out.inputs.push(c.output.clone());
            out.outputs.push(c.operands[0].clone());
        } else {
            out.cells.push(c.clone());
        }
    }
    out
}

/// Replaces every cell with more than two operands by a left-deep chain of
/// two-input cells. Inverting operators keep their inversion on the last link.
/// Single-operand logic cells become BUFF or NOT.
pub fn decompose_multi_input(nl: &RawNetlist) -> RawNetlist {
    let mut taken: HashSet<String> = nl
        .inputs
        .iter()
        .cloned()
        .chain(nl.cells.iter().map(|c| c.output.clone()))
        .collect();
    let mut fresh = |base: &str| {
        let mut i = 0;
        loop {
            let name = format!("{base}__{i}");
            if taken.insert(name.clone()) {
                return name;
            }
            i += 1;
        }
    };
    let mut cells = Vec::with_capacity(nl.cells.len());
    for c in &nl.cells {
        let Some((base, inverted)) = c.op.base() else {
            cells.push(c.clone());
            continue;
        };
        match c.operands.len() {
            1 => cells.push(Cell {
                op: if inverted { CellOp::Not } else { CellOp::Buff },
                ..c.clone()
            }),
            2 => cells.push(c.clone()),
            p => {
                let mut acc = c.operands[0].clone();
                for (i, w) in c.operands[1..].iter().enumerate() {
                    let last = i == p - 2;
                    let (op, output) = if last {
                        (c.op, c.output.clone())
                    } else {
                        (base, fresh(&c.output))
                    };
                    cells.push(Cell {
                        output: output.clone(),
                        op,
                        operands: vec![acc, w.clone()],
                        line: c.line,
                    });
                    acc = output;
                }
            }
        }
    }
    RawNetlist {
        inputs: nl.inputs.clone(),
        outputs: nl.outputs.clone(),
        cells,
    }
}

/// Converts a DFF-free netlist of fan-in ≤ 2 cells into a NOT-free topology.
///
/// Each wire carries a polarity flag. Two-input cells absorb the polarity of
/// their operands; NOT flips it and BUFF forwards it. A complemented wire that
/// drives outputs is fixed at its driving gate when no gate consumes that
/// gate and all its output references want the complement; otherwise a `¬A`
/// gate with both inputs tied to the wire is appended.
pub fn normalize(nl: &RawNetlist) -> Result<(Topology, Assignment)> {
    nl.validate()?;
    if nl.dff_count() > 0 {
        return Err(Error::Normalize(
            "netlist still contains flip-flops; unroll it first".into(),
        ));
    }
    let n = nl.inputs.len();
    let mut wire: HashMap<&str, (NodeRef, bool)> = nl
        .inputs
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_str(), (NodeRef::Input(i), false)))
        .collect();
    let mut gates = Vec::new();
    let mut types = Vec::new();
    for i in nl.topological_cells()? {
        let c = &nl.cells[i];
        let resolved = match c.op {
            CellOp::Not => {
                let (node, pol) = wire[c.operands[0].as_str()];
                (node, !pol)
            }
            CellOp::Buff => wire[c.operands[0].as_str()],
            op => {
                if c.operands.len() != 2 {
                    return Err(Error::Normalize(format!(
                        "{op} cell driving `{}` has {} operands; decompose first",
                        c.output,
                        c.operands.len()
                    )));
                }
                let t = op.two_input_type().ok_or_else(|| {
                    Error::Normalize(format!("unsupported cell {op} in normalization"))
                })?;
                let (l, lp) = wire[c.operands[0].as_str()];
                let (r, rp) = wire[c.operands[1].as_str()];
                gates.push(Gate::new(l, r));
                types.push(t.with_polarity(lp, rp, false));
                (NodeRef::Gate(gates.len() - 1), false)
            }
        };
        wire.insert(&c.output, resolved);
    }

    let drivers: Vec<(NodeRef, bool)> = nl.outputs.iter().map(|w| wire[w.as_str()]).collect();
    let mut consumed = vec![false; gates.len()];
    for g in &gates {
        for r in [g.left, g.right] {
            if let NodeRef::Gate(j) = r {
                consumed[j] = true;
            }
        }
    }
    let mut absorb = vec![true; gates.len()];
    let mut wanted = vec![false; gates.len()];
    for &(node, pol) in &drivers {
        if let NodeRef::Gate(j) = node {
            wanted[j] |= pol;
            absorb[j] &= pol && !consumed[j];
        }
    }
    let mut projection: HashMap<NodeRef, usize> = HashMap::new();
    let mut outputs = Vec::with_capacity(drivers.len());
    for &(node, pol) in &drivers {
        if !pol {
            outputs.push(node);
            continue;
        }
        if let NodeRef::Gate(j) = node {
            if absorb[j] && wanted[j] {
                outputs.push(node);
                continue;
            }
        }
        let j = *projection.entry(node).or_insert_with(|| {
            gates.push(Gate::new(node, node));
            types.push(GateType::NOT_A);
            gates.len() - 1
        });
        outputs.push(NodeRef::Gate(j));
    }
    for (j, t) in types.iter_mut().enumerate().take(absorb.len()) {
        if absorb[j] && wanted[j] {
            *t = t.neg_out();
        }
    }
    Ok((Topology::new(n, gates, outputs)?, Assignment::new(types)))
}

/// Full front-end pipeline for a `.bench` source.
pub fn bench_to_circuit(text: &str) -> Result<(Topology, Assignment)> {
    let raw = parse_bench(text)?;
    normalize(&decompose_multi_input(&unroll_sequential(&raw)))
}
