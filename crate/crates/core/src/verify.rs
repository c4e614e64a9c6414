// SPDX-License-Identifier: Apache-2.0

//! Equivalence checks and the brute-force consistency counter.

use crate::circuit::{exhaustive_input_words, exhaustive_lane_mask, Assignment, BitVector, HiddenPartition, Topology};
use crate::error::{Error, Result};
use crate::gate::{GateType, TypeSet};
use crate::sat::{Encoder, Session, SolverKind};

/// Largest visible input width accepted by [`equiv_exhaustive`].
pub const EXHAUSTIVE_LIMIT: usize = 24;

/// Largest assignment space accepted by [`count_consistent`].
pub const COUNT_LIMIT: u64 = 10_000_000;

/// A concrete circuit instance: gate types plus the hidden input value.
#[derive(Clone, Copy, Debug)]
pub struct Instance<'a> {
    pub asg: &'a Assignment,
    pub hidden: &'a BitVector,
}

/// Whether two assignments agree on all `2^n` inputs.
pub fn equiv_exhaustive(topo: &Topology, a1: &Assignment, a2: &Assignment) -> Result<bool> {
    let part = HiddenPartition::none(topo.n());
    let y = BitVector::default();
    equiv_exhaustive_hidden(topo, &part, Instance { asg: a1, hidden: &y }, Instance { asg: a2, hidden: &y })
}

/// Exhaustive equivalence over the visible inputs, each side with its own
/// fixed hidden value.
pub fn equiv_exhaustive_hidden(
    topo: &Topology,
    part: &HiddenPartition,
    c1: Instance,
    c2: Instance,
) -> Result<bool> {
    topo.check_assignment(c1.asg)?;
    topo.check_assignment(c2.asg)?;
    let nv = part.visible_width();
    if nv > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge(format!(
            "exhaustive check over {nv} inputs (limit {EXHAUSTIVE_LIMIT})"
        )));
    }
    for y in [c1.hidden, c2.hidden] {
        if y.len() != part.hidden_width() {
            return Err(Error::Shape {
                expected: part.hidden_width(),
                got: y.len(),
            });
        }
    }
    let mask = exhaustive_lane_mask(nv);
    let blocks = if nv > 6 { 1u64 << (nv - 6) } else { 1 };
    let locate = part.locate();
    let spread = |vis: &[u64], y: &BitVector| -> Vec<u64> {
        locate
            .iter()
            .map(|src| match *src {
                Ok(p) => vis[p],
                Err(p) => {
                    if y.get(p) {
                        u64::MAX
                    } else {
                        0
                    }
                }
            })
            .collect()
    };
    for block in 0..blocks {
        let vis = exhaustive_input_words(nv, block);
        let o1 = topo.eval_words(c1.asg, &spread(&vis, c1.hidden));
        let o2 = topo.eval_words(c2.asg, &spread(&vis, c2.hidden));
        if o1.iter().zip(&o2).any(|(p, q)| (p ^ q) & mask != 0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// SAT miter: equivalent exactly when no input makes an output differ.
pub fn equiv_miter(topo: &Topology, a1: &Assignment, a2: &Assignment) -> Result<bool> {
    let part = HiddenPartition::none(topo.n());
    let y = BitVector::default();
    equiv_miter_hidden(topo, &part, Instance { asg: a1, hidden: &y }, Instance { asg: a2, hidden: &y }, SolverKind::default())
}

pub fn equiv_miter_hidden(
    topo: &Topology,
    part: &HiddenPartition,
    c1: Instance,
    c2: Instance,
    solver: SolverKind,
) -> Result<bool> {
    Ok(distinguishing_input(topo, part, c1, c2, solver)?.is_none())
}

/// A visible input on which the two instances disagree, if any.
pub fn distinguishing_input(
    topo: &Topology,
    part: &HiddenPartition,
    c1: Instance,
    c2: Instance,
    solver: SolverKind,
) -> Result<Option<BitVector>> {
    let mut enc = Encoder::new(topo, part.clone(), Session::with_backend(solver))?;
    let p = enc.add_frozen_copy(c1.asg, Some(c1.hidden))?;
    let q = enc.add_frozen_copy(c2.asg, Some(c2.hidden))?;
    let x = enc.diff_constr(p, q)?;
    if enc.session_mut().solve()? {
        Ok(Some(enc.decode_bits(&x)))
    } else {
        Ok(None)
    }
}

/// Number of assignments drawn from `domains` that reproduce every row.
pub fn count_consistent(
    topo: &Topology,
    domains: &[TypeSet],
    di: &[(BitVector, BitVector)],
) -> Result<u64> {
    count_consistent_hidden(topo, &HiddenPartition::none(topo.n()), domains, di)
}

/// Number of `(assignment, hidden value)` pairs consistent with every row,
/// by explicit enumeration.
pub fn count_consistent_hidden(
    topo: &Topology,
    part: &HiddenPartition,
    domains: &[TypeSet],
    di: &[(BitVector, BitVector)],
) -> Result<u64> {
    if domains.len() != topo.k() {
        return Err(Error::Config(format!("{} domains for {} gates", domains.len(), topo.k())));
    }
    let mut space: u64 = 1u64 << part.hidden_width().min(63);
    for (g, d) in domains.iter().enumerate() {
        if d.is_empty() {
            return Err(Error::Domain {
                gate: g,
                msg: "empty domain".into(),
            });
        }
        space = space.saturating_mul(d.len() as u64);
    }
    if space > COUNT_LIMIT {
        return Err(Error::TooLarge(format!(
            "{space} candidates exceed the enumeration limit {COUNT_LIMIT}"
        )));
    }
    for (x, z) in di {
        if x.len() != part.visible_width() || z.len() != topo.m() {
            return Err(Error::Shape {
                expected: part.visible_width(),
                got: x.len(),
            });
        }
    }
    let choices: Vec<Vec<GateType>> = domains.iter().map(|d| d.iter().collect()).collect();
    let mut idx = vec![0usize; topo.k()];
    let mut count = 0;
    loop {
        let asg = Assignment::new(idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect());
        for yv in 0..1u64 << part.hidden_width() {
            let y = BitVector::from_u64(yv, part.hidden_width());
            let ok = di.iter().all(|(x, z)| {
                let full = part.merge(x, &y).expect("widths checked");
                topo.eval(&asg, &full).expect("widths checked") == *z
            });
            count += ok as u64;
        }
        // mixed-radix increment
        let mut g = 0;
        loop {
            if g == idx.len() {
                return Ok(count);
            }
            idx[g] += 1;
            if idx[g] < choices[g].len() {
                break;
            }
            idx[g] = 0;
            g += 1;
        }
    }
}
