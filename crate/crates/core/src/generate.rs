// SPDX-License-Identifier: Apache-2.0

//! Benchmark circuit families. Multi-bit operands are LSB first; two-operand
//! families take `a` on inputs `0..w` and `b` on inputs `w..2w`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Assignment, BitVector, Gate, NodeRef, Topology};
use crate::error::{Error, Result};
use crate::gate::GateType;

/// Incremental circuit builder used by the generators.
#[derive(Default)]
struct Builder {
    gates: Vec<Gate>,
    types: Vec<GateType>,
}

impl Builder {
    fn gate(&mut self, t: GateType, l: NodeRef, r: NodeRef) -> NodeRef {
        self.gates.push(Gate::new(l, r));
        self.types.push(t);
        NodeRef::Gate(self.gates.len() - 1)
    }

    fn finish(self, n: usize, outputs: Vec<NodeRef>) -> (Topology, Assignment) {
        let topo = Topology::new(n, self.gates, outputs).expect("generator emits valid wiring");
        (topo, Assignment::new(self.types))
    }

    /// `x + y + c` on single bits; returns `(sum, carry)`.
    fn full_add(&mut self, x: NodeRef, y: NodeRef, c: NodeRef) -> (NodeRef, NodeRef) {
        let t = self.gate(GateType::XOR, x, y);
        let s = self.gate(GateType::XOR, t, c);
        let g = self.gate(GateType::AND, x, y);
        let p = self.gate(GateType::AND, t, c);
        (s, self.gate(GateType::OR, g, p))
    }

    fn half_add(&mut self, x: NodeRef, y: NodeRef) -> (NodeRef, NodeRef) {
        (self.gate(GateType::XOR, x, y), self.gate(GateType::AND, x, y))
    }
}

fn check_width(w: usize) -> Result<()> {
    if w == 0 {
        return Err(Error::Config("width must be at least 1".into()));
    }
    Ok(())
}

fn operands(w: usize) -> (Vec<NodeRef>, Vec<NodeRef>) {
    ((0..w).map(NodeRef::Input).collect(), (w..2 * w).map(NodeRef::Input).collect())
}

/// Ripple-carry adder: `2w` inputs, `w + 1` outputs (sum then carry out).
pub fn gen_adder(w: usize) -> Result<(Topology, Assignment)> {
    check_width(w)?;
    let (a, b) = operands(w);
    let mut bld = Builder::default();
    let (s0, mut carry) = bld.half_add(a[0], b[0]);
    let mut outs = vec![s0];
    for i in 1..w {
        let (s, c) = bld.full_add(a[i], b[i], carry);
        outs.push(s);
        carry = c;
    }
    outs.push(carry);
    Ok(bld.finish(2 * w, outs))
}

/// Magnitude comparator with outputs `(a < b, a == b)`.
pub fn gen_comparator(w: usize) -> Result<(Topology, Assignment)> {
    check_width(w)?;
    let (a, b) = operands(w);
    let mut bld = Builder::default();
    let mut lt = bld.gate(GateType::NOT_A_AND_B, a[0], b[0]);
    let mut eq = bld.gate(GateType::XNOR, a[0], b[0]);
    for i in 1..w {
        let e = bld.gate(GateType::XNOR, a[i], b[i]);
        let l = bld.gate(GateType::NOT_A_AND_B, a[i], b[i]);
        let keep = bld.gate(GateType::AND, e, lt);
        lt = bld.gate(GateType::OR, l, keep);
        eq = bld.gate(GateType::AND, e, eq);
    }
    Ok(bld.finish(2 * w, vec![lt, eq]))
}

/// Bits needed to represent `v`.
fn bit_width(v: usize) -> usize {
    (usize::BITS - v.leading_zeros()) as usize
}

/// Hamming distance of `a` and `b`: bitwise XOR followed by a popcount
/// adder tree. Every partial sum uses the minimal width for its range, so
/// the result has `⌈log2(w+1)⌉` bits.
pub fn gen_hamming(w: usize) -> Result<(Topology, Assignment)> {
    check_width(w)?;
    let (a, b) = operands(w);
    let mut bld = Builder::default();
    // (bits LSB first, largest representable value)
    let mut queue: std::collections::VecDeque<(Vec<NodeRef>, usize)> = (0..w)
        .map(|i| (vec![bld.gate(GateType::XOR, a[i], b[i])], 1))
        .collect();
    while queue.len() > 1 {
        let (x, mx) = queue.pop_front().unwrap();
        let (y, my) = queue.pop_front().unwrap();
        let width = bit_width(mx + my);
        let mut out = Vec::with_capacity(width);
        let mut carry: Option<NodeRef> = None;
        for i in 0..width {
            let bits: Vec<NodeRef> = [x.get(i), y.get(i), carry.as_ref()]
                .into_iter()
                .flatten()
                .copied()
                .collect();
            let (s, c) = match bits[..] {
                [p, q, r] => {
                    let (s, c) = bld.full_add(p, q, r);
                    (s, Some(c))
                }
                [p, q] => {
                    let (s, c) = bld.half_add(p, q);
                    (s, Some(c))
                }
                [p] => (p, None),
                _ => unreachable!("sum width exceeds operand range"),
            };
            out.push(s);
            carry = c;
        }
        queue.push_back((out, mx + my));
    }
    let (bits, _) = queue.pop_front().unwrap();
    Ok(bld.finish(2 * w, bits))
}

/// Point function: 1 exactly on `x = target`.
///
/// Each input passes through a literal gate with both operands tied to it
/// (type `A` where the target bit is 1, `¬A` where it is 0), and the literals
/// are joined by a left-deep AND chain.
pub fn gen_point(n: usize, target: &BitVector) -> Result<(Topology, Assignment)> {
    check_width(n)?;
    if target.len() != n {
        return Err(Error::Shape {
            expected: n,
            got: target.len(),
        });
    }
    let mut bld = Builder::default();
    let lits: Vec<NodeRef> = (0..n)
        .map(|i| {
            let t = if target.get(i) { GateType::A } else { GateType::NOT_A };
            bld.gate(t, NodeRef::Input(i), NodeRef::Input(i))
        })
        .collect();
    let mut acc = lits[0];
    for &l in &lits[1..] {
        acc = bld.gate(GateType::AND, acc, l);
    }
    Ok(bld.finish(n, vec![acc]))
}

/// Random circuit with `n ≥ 1` inputs, `k` gates and `m` outputs.
///
/// Gate operands are drawn uniformly from all earlier nodes, types uniformly
/// from the full library. Outputs prefer the later half of the gates so that
/// most of the circuit is observable.
pub fn random_circuit(n: usize, k: usize, m: usize, seed: u64) -> (Topology, Assignment) {
    random_circuit_with(&mut ChaCha8Rng::seed_from_u64(seed), n, k, m)
}

pub fn random_circuit_with<R: Rng>(rng: &mut R, n: usize, k: usize, m: usize) -> (Topology, Assignment) {
    assert!(n >= 1, "random circuits need at least one input");
    let node = |rng: &mut R, limit: usize| {
        let i = rng.gen_range(0..n + limit);
        if i < n {
            NodeRef::Input(i)
        } else {
            NodeRef::Gate(i - n)
        }
    };
    let mut bld = Builder::default();
    for j in 0..k {
        let l = node(rng, j);
        let r = node(rng, j);
        bld.gate(GateType::from_tt(rng.gen_range(0..16)), l, r);
    }
    let outputs = (0..m)
        .map(|_| {
            if k == 0 {
                NodeRef::Input(rng.gen_range(0..n))
            } else {
                NodeRef::Gate(rng.gen_range(k / 2..k))
            }
        })
        .collect();
    bld.finish(n, outputs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split(v: u64, w: usize) -> (u64, u64) {
        (v & ((1 << w) - 1), v >> w)
    }

    #[test]
    fn adder_matches_integer_sum() {
        for w in 1..=4 {
            let (topo, asg) = gen_adder(w).unwrap();
            assert_eq!((topo.n(), topo.m()), (2 * w, w + 1));
            for v in 0..1u64 << (2 * w) {
                let (a, b) = split(v, w);
                let z = topo.eval(&asg, &BitVector::from_u64(v, 2 * w)).unwrap();
                assert_eq!(z.to_u64(), a + b);
            }
        }
        let (topo, asg) = gen_adder(2).unwrap();
        let z = topo.eval(&asg, &BitVector::parse_bits("1010").unwrap()).unwrap();
        assert_eq!(z.to_string(), "010");
    }

    #[test]
    fn comparator_matches_integer_order() {
        for w in 1..=4 {
            let (topo, asg) = gen_comparator(w).unwrap();
            for v in 0..1u64 << (2 * w) {
                let (a, b) = split(v, w);
                let z = topo.eval(&asg, &BitVector::from_u64(v, 2 * w)).unwrap();
                assert_eq!((z.get(0), z.get(1)), (a < b, a == b), "w={w} a={a} b={b}");
            }
        }
    }

    #[test]
    fn hamming_matches_popcount() {
        for w in 1..=6 {
            let (topo, asg) = gen_hamming(w).unwrap();
            let expected_m = ((w + 1) as f64).log2().ceil() as usize;
            assert_eq!(topo.m(), expected_m, "w={w}");
            for v in 0..1u64 << (2 * w) {
                let (a, b) = split(v, w);
                let z = topo.eval(&asg, &BitVector::from_u64(v, 2 * w)).unwrap();
                assert_eq!(z.to_u64(), u64::from((a ^ b).count_ones()));
            }
        }
        let (topo, asg) = gen_hamming(3).unwrap();
        let z = topo.eval(&asg, &BitVector::parse_bits("110011").unwrap()).unwrap();
        assert_eq!(z.to_u64(), 2);
    }

    #[test]
    fn point_fires_once() {
        let t = BitVector::parse_bits("10110010").unwrap();
        let (topo, asg) = gen_point(8, &t).unwrap();
        for v in 0..256 {
            let x = BitVector::from_u64(v, 8);
            assert_eq!(topo.eval(&asg, &x).unwrap().get(0), x == t);
        }
        assert!(gen_point(3, &t).is_err());
    }

    #[test]
    fn zero_width_rejected() {
        assert!(gen_adder(0).is_err());
        assert!(gen_comparator(0).is_err());
        assert!(gen_hamming(0).is_err());
    }

    #[test]
    fn random_circuits_are_reproducible() {
        assert_eq!(random_circuit(4, 10, 2, 7), random_circuit(4, 10, 2, 7));
        let (topo, _) = random_circuit(1, 0, 2, 0);
        assert_eq!(topo.outputs(), &[NodeRef::Input(0), NodeRef::Input(0)]);
    }
}
