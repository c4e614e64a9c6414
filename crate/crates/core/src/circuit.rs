// SPDX-License-Identifier: Apache-2.0

//! Public circuit topology, secret gate-type assignments and evaluation.

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::{GateType, TypeSet};

/// Source of a gate input or of a primary output.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum NodeRef {
    #[serde(rename = "in")]
    Input(usize),
    #[serde(rename = "g")]
    Gate(usize),
}

/// A two-input gate node; only its wiring is public.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Gate {
    pub left: NodeRef,
    pub right: NodeRef,
}

impl Gate {
    pub fn new(left: NodeRef, right: NodeRef) -> Gate {
        Gate { left, right }
    }
}

/// Directed acyclic circuit graph with ordered gate inputs.
///
/// The gate list is a topological order: a gate may only reference primary
/// inputs and strictly earlier gates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Topology {
    n: usize,
    gates: Vec<Gate>,
    outputs: Vec<NodeRef>,
}

impl Topology {
    pub fn new(n: usize, gates: Vec<Gate>, outputs: Vec<NodeRef>) -> Result<Topology> {
        let check = |r: NodeRef, limit: usize, what: &str| -> Result<()> {
            match r {
                NodeRef::Input(i) if i >= n => Err(Error::Topology(format!(
                    "{what} references input {i} but n = {n}"
                ))),
                NodeRef::Gate(j) if j >= limit => Err(Error::Topology(format!(
                    "{what} references gate {j}, which is not defined before it"
                ))),
                _ => Ok(()),
            }
        };
        for (j, g) in gates.iter().enumerate() {
            check(g.left, j, &format!("gate {j}"))?;
            check(g.right, j, &format!("gate {j}"))?;
        }
        for (h, o) in outputs.iter().enumerate() {
            check(*o, gates.len(), &format!("output {h}"))?;
        }
        Ok(Topology { n, gates, outputs })
    }

    /// Number of primary inputs.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of primary outputs.
    pub fn m(&self) -> usize {
        self.outputs.len()
    }

    /// Number of gates.
    pub fn k(&self) -> usize {
        self.gates.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, j: usize) -> Gate {
        self.gates[j]
    }

    pub fn outputs(&self) -> &[NodeRef] {
        &self.outputs
    }

    /// Index of a node in the flat `[inputs..., gates...]` numbering.
    #[inline]
    pub fn node_index(&self, r: NodeRef) -> usize {
        match r {
            NodeRef::Input(i) => i,
            NodeRef::Gate(j) => self.n + j,
        }
    }

    /// Fanout of every gate. Each gate-input edge and each output reference
    /// counts once, so a gate wired twice into the same consumer counts twice.
    pub fn gate_fanout(&self) -> Vec<usize> {
        let mut fo = vec![0; self.k()];
        let mut bump = |r: NodeRef| {
            if let NodeRef::Gate(j) = r {
                fo[j] += 1;
            }
        };
        for g in &self.gates {
            bump(g.left);
            bump(g.right);
        }
        for &o in &self.outputs {
            bump(o);
        }
        fo
    }

    /// Fanout of every primary input, counted the same way as [`Self::gate_fanout`].
    pub fn input_fanout(&self) -> Vec<usize> {
        let mut fo = vec![0; self.n];
        let refs = self
            .gates
            .iter()
            .flat_map(|g| [g.left, g.right])
            .chain(self.outputs.iter().copied());
        for r in refs {
            if let NodeRef::Input(i) = r {
                fo[i] += 1;
            }
        }
        fo
    }

    /// Gates referenced directly by at least one primary output.
    pub fn output_layer(&self) -> Vec<bool> {
        let mut layer = vec![false; self.k()];
        for &o in &self.outputs {
            if let NodeRef::Gate(j) = o {
                layer[j] = true;
            }
        }
        layer
    }

    /// For every gate, the gates consuming its output (with multiplicity).
    pub fn gate_consumers(&self) -> Vec<Vec<usize>> {
        let mut cons = vec![Vec::new(); self.k()];
        for (j, g) in self.gates.iter().enumerate() {
            for r in [g.left, g.right] {
                if let NodeRef::Gate(p) = r {
                    cons[p].push(j);
                }
            }
        }
        cons
    }

    /// Evaluates the circuit on a single input vector.
    pub fn eval(&self, asg: &Assignment, x: &BitVector) -> Result<BitVector> {
        if x.len() != self.n {
            return Err(Error::Shape {
                expected: self.n,
                got: x.len(),
            });
        }
        self.check_assignment(asg)?;
        let mut vals = Vec::with_capacity(self.n + self.k());
        vals.extend(x.iter());
        for (g, t) in self.gates.iter().zip(asg.types()) {
            let a = vals[self.node_index(g.left)];
            let b = vals[self.node_index(g.right)];
            vals.push(t.apply(a, b));
        }
        Ok(self
            .outputs
            .iter()
            .map(|&o| vals[self.node_index(o)])
            .collect())
    }

    /// Bit-parallel evaluation: `inputs[i]` carries 64 patterns for input `i`.
    /// Returns one word per output.
    pub fn eval_words(&self, asg: &Assignment, inputs: &[u64]) -> Vec<u64> {
        let mut vals = Vec::with_capacity(self.n + self.k());
        vals.extend_from_slice(&inputs[..self.n]);
        for (g, t) in self.gates.iter().zip(asg.types()) {
            let a = vals[self.node_index(g.left)];
            let b = vals[self.node_index(g.right)];
            vals.push(t.apply_words(a, b));
        }
        self.outputs
            .iter()
            .map(|&o| vals[self.node_index(o)])
            .collect()
    }

    pub fn check_assignment(&self, asg: &Assignment) -> Result<()> {
        if asg.len() != self.k() {
            return Err(Error::Topology(format!(
                "assignment has {} types for {} gates",
                asg.len(),
                self.k()
            )));
        }
        Ok(())
    }
}

/// The secret map from gates to gate types, index-aligned with the gate list.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct Assignment(Vec<GateType>);

impl Assignment {
    pub fn new(types: Vec<GateType>) -> Assignment {
        Assignment(types)
    }

    pub fn uniform(k: usize, t: GateType) -> Assignment {
        Assignment(vec![t; k])
    }

    pub fn types(&self) -> &[GateType] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, j: usize) -> GateType {
        self.0[j]
    }

    pub fn set(&mut self, j: usize, t: GateType) {
        self.0[j] = t;
    }

    pub fn into_inner(self) -> Vec<GateType> {
        self.0
    }
}

impl From<Vec<GateType>> for Assignment {
    fn from(v: Vec<GateType>) -> Self {
        Assignment(v)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, t) in self.0.iter().enumerate() {
            if j > 0 {
                f.write_str(" ")?;
            }
            write!(f, "g{j}:{t}")?;
        }
        Ok(())
    }
}

/// An ordered bit string: input vectors, output vectors and hidden inputs.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVector(Vec<bool>);

impl BitVector {
    pub fn new(bits: Vec<bool>) -> BitVector {
        BitVector(bits)
    }

    pub fn zeros(width: usize) -> BitVector {
        BitVector(vec![false; width])
    }

    /// The low `width` bits of `value`, least significant bit first.
    pub fn from_u64(value: u64, width: usize) -> BitVector {
        BitVector((0..width).map(|i| i < 64 && value >> i & 1 == 1).collect())
    }

    /// Inverse of [`Self::from_u64`]; bits beyond 64 are ignored.
    pub fn to_u64(&self) -> u64 {
        self.0
            .iter()
            .take(64)
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (b as u64) << i)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, v: bool) {
        self.0[i] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    /// Parses a string of `0`/`1` characters, index 0 first.
    pub fn parse_bits(s: &str) -> Result<BitVector> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse {
                    line: None,
                    msg: format!("unexpected character `{other}` in bit string"),
                }),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitVector)
    }
}

impl FromIterator<bool> for BitVector {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        BitVector(iter.into_iter().collect())
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl Serialize for BitVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BitVector::parse_bits(&s).map_err(serde::de::Error::custom)
    }
}

/// Split of the primary inputs into attacker-controlled and hidden parts.
///
/// Visible inputs keep their relative order, as do hidden ones; a full input
/// vector is rebuilt by interleaving them back into their original positions.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct HiddenPartition {
    n: usize,
    hidden: Vec<usize>,
    is_hidden: Vec<bool>,
}

impl HiddenPartition {
    pub fn new(n: usize, mut hidden: Vec<usize>) -> Result<HiddenPartition> {
        hidden.sort_unstable();
        hidden.dedup();
        if let Some(&i) = hidden.iter().find(|&&i| i >= n) {
            return Err(Error::Config(format!(
                "hidden input index {i} out of range for n = {n}"
            )));
        }
        let mut is_hidden = vec![false; n];
        for &i in &hidden {
            is_hidden[i] = true;
        }
        Ok(HiddenPartition {
            n,
            hidden,
            is_hidden,
        })
    }

    /// Every input visible.
    pub fn none(n: usize) -> HiddenPartition {
        HiddenPartition {
            n,
            hidden: Vec::new(),
            is_hidden: vec![false; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hidden(&self) -> &[usize] {
        &self.hidden
    }

    pub fn hidden_width(&self) -> usize {
        self.hidden.len()
    }

    pub fn visible_width(&self) -> usize {
        self.n - self.hidden.len()
    }

    pub fn is_hidden(&self, i: usize) -> bool {
        self.is_hidden[i]
    }

    pub fn visible(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| !self.is_hidden[i])
    }

    /// Where input `i` comes from: `Ok(pos)` in the visible vector or
    /// `Err(pos)` in the hidden vector.
    pub fn locate(&self) -> Vec<std::result::Result<usize, usize>> {
        let (mut v, mut h) = (0, 0);
        (0..self.n)
            .map(|i| {
                if self.is_hidden[i] {
                    h += 1;
                    Err(h - 1)
                } else {
                    v += 1;
                    Ok(v - 1)
                }
            })
            .collect()
    }

    /// Rebuilds the full input vector from its visible and hidden parts.
    pub fn merge(&self, x: &BitVector, y: &BitVector) -> Result<BitVector> {
        if x.len() != self.visible_width() {
            return Err(Error::Shape {
                expected: self.visible_width(),
                got: x.len(),
            });
        }
        if y.len() != self.hidden_width() {
            return Err(Error::Shape {
                expected: self.hidden_width(),
                got: y.len(),
            });
        }
        Ok(self
            .locate()
            .into_iter()
            .map(|src| match src {
                Ok(p) => x.get(p),
                Err(p) => y.get(p),
            })
            .collect())
    }

    pub fn split(&self, full: &BitVector) -> (BitVector, BitVector) {
        let x = (0..self.n)
            .filter(|&i| !self.is_hidden[i])
            .map(|i| full.get(i))
            .collect();
        let y = self.hidden.iter().map(|&i| full.get(i)).collect();
        (x, y)
    }
}

/// Exact size of the assignment space, `∏ |D(g)|`.
pub fn search_space_size(domains: &[TypeSet]) -> Result<BigUint> {
    let mut size = BigUint::from(1u32);
    for (g, d) in domains.iter().enumerate() {
        if d.is_empty() {
            return Err(Error::Domain {
                gate: g,
                msg: "empty domain".into(),
            });
        }
        size *= d.len() as u32;
    }
    Ok(size)
}

/// Input words enumerating all `2^n` patterns, 64 at a time.
///
/// Block `w` covers patterns `64w .. 64w+63`; pattern `p` sets input `i` to
/// bit `i` of `p`.
pub fn exhaustive_input_words(n: usize, block: u64) -> Vec<u64> {
    const LOW: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    (0..n)
        .map(|i| {
            if i < 6 {
                LOW[i]
            } else if block >> (i - 6) & 1 == 1 {
                u64::MAX
            } else {
                0
            }
        })
        .collect()
}

/// Mask of the valid pattern lanes in a block when `2^n < 64`.
pub fn exhaustive_lane_mask(n: usize) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << n)) - 1
    }
}
