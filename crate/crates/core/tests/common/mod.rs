// SPDX-License-Identifier: Apache-2.0

//! Reference implementations used as test oracles. They deliberately avoid
//! the library's own evaluation and enumeration code.

#![allow(dead_code)]

use gatehide::{Assignment, BitVector, GateType, HiddenPartition, NodeRef, Topology, TypeSet};

/// Truth-table lookup written out independently of `GateType::apply`.
pub fn ref_gate(t: GateType, a: bool, b: bool) -> bool {
    let row = (a as u8) * 2 + b as u8;
    (t.tt() >> row) & 1 == 1
}

/// Straight-line interpreter over a full input vector.
pub fn ref_eval(topo: &Topology, asg: &Assignment, x: &[bool]) -> Vec<bool> {
    assert_eq!(x.len(), topo.n());
    let mut gates: Vec<bool> = Vec::with_capacity(topo.k());
    let val = |r: NodeRef, gates: &[bool]| match r {
        NodeRef::Input(i) => x[i],
        NodeRef::Gate(j) => gates[j],
    };
    for (j, g) in topo.gates().iter().enumerate() {
        let v = ref_gate(asg.get(j), val(g.left, &gates), val(g.right, &gates));
        gates.push(v);
    }
    topo.outputs().iter().map(|&o| val(o, &gates)).collect()
}

pub fn bits_of(v: u64, width: usize) -> Vec<bool> {
    (0..width).map(|i| v >> i & 1 == 1).collect()
}

/// Full input vector from visible bits `x` and hidden bits `y`.
pub fn ref_merge(part: &HiddenPartition, x: &[bool], y: &[bool]) -> Vec<bool> {
    let (mut vi, mut hi) = (0, 0);
    (0..part.n())
        .map(|i| {
            if part.hidden().contains(&i) {
                hi += 1;
                y[hi - 1]
            } else {
                vi += 1;
                x[vi - 1]
            }
        })
        .collect()
}

/// Exhaustive equivalence over the visible inputs with per-side hidden values.
pub fn ref_equiv(topo: &Topology, part: &HiddenPartition, a1: &Assignment, y1: &[bool], a2: &Assignment, y2: &[bool]) -> bool {
    let nv = part.visible_width();
    assert!(nv <= 20, "reference equivalence is exhaustive");
    (0..1u64 << nv).all(|v| {
        let x = bits_of(v, nv);
        ref_eval(topo, a1, &ref_merge(part, &x, y1)) == ref_eval(topo, a2, &ref_merge(part, &x, y2))
    })
}

pub fn ref_equiv_plain(topo: &Topology, a1: &Assignment, a2: &Assignment) -> bool {
    ref_equiv(topo, &HiddenPartition::none(topo.n()), a1, &[], a2, &[])
}

/// Every assignment over `domains` consistent with `rows`, by enumeration.
pub fn ref_consistent(topo: &Topology, domains: &[TypeSet], rows: &[(BitVector, BitVector)]) -> Vec<Assignment> {
    let choices: Vec<Vec<GateType>> = domains
        .iter()
        .map(|d| GateType::all().filter(|&t| d.contains(t)).collect())
        .collect();
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(
        topo: &Topology,
        choices: &[Vec<GateType>],
        rows: &[(BitVector, BitVector)],
        current: &mut Vec<GateType>,
        out: &mut Vec<Assignment>,
    ) {
        if current.len() == choices.len() {
            let asg = Assignment::new(current.clone());
            if rows.iter().all(|(x, z)| ref_eval(topo, &asg, x.bits()) == z.bits()) {
                out.push(asg);
            }
            return;
        }
        for &t in &choices[current.len()] {
            current.push(t);
            rec(topo, choices, rows, current, out);
            current.pop();
        }
    }
    rec(topo, &choices, rows, &mut current, &mut out);
    out
}

pub fn non_output_gates(topo: &Topology) -> Vec<usize> {
    let outs: Vec<usize> = topo
        .outputs()
        .iter()
        .filter_map(|o| match o {
            NodeRef::Gate(j) => Some(*j),
            NodeRef::Input(_) => None,
        })
        .collect();
    (0..topo.k()).filter(|j| !outs.contains(j)).collect()
}
