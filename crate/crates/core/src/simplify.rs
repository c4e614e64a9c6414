// SPDX-License-Identifier: Apache-2.0

//! Topology-only reduction of per-gate type domains.
//!
//! Two independent facts shrink the search space without changing which
//! functions the circuit can compute:
//!
//! * Negations can be pushed forward through any wire, so every gate outside
//!   the output layer can be taken from the 8-type set `R` (its complement
//!   covers the rest of the library).
//! * A gate fed by fanout-1 gates can delegate input negations and constant
//!   projections to those predecessors. With both predecessors fanout-1 it
//!   needs only `S = {AND, NAND, XOR}` (S-class); with one, a 6-type `Z` set
//!   oriented by which input carries the fanout-1 wire (Z-class).
//!
//! Predecessors that absorb this work must keep the full library, which is
//! why the `R` restriction skips them.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Serialize, Serializer};

use crate::circuit::{exhaustive_input_words, Assignment, BitVector, NodeRef, Topology};
use crate::error::{Error, Result};
use crate::gate::TypeSet;
use crate::sat::{Encoder, Session, SolverKind};
use crate::verify::equiv_exhaustive;

/// Largest input width [`validate_domains_sat`] will enumerate.
pub const VALIDATE_LIMIT: usize = 12;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum GateClass {
    S,
    ZLeft,
    ZRight,
    R,
    Full,
}

impl GateClass {
    pub fn domain(self) -> TypeSet {
        match self {
            GateClass::S => TypeSet::S,
            GateClass::ZLeft => TypeSet::Z_LEFT,
            GateClass::ZRight => TypeSet::Z_RIGHT,
            GateClass::R => TypeSet::R,
            GateClass::Full => TypeSet::L,
        }
    }

    pub fn is_sz(self) -> bool {
        matches!(self, GateClass::S | GateClass::ZLeft | GateClass::ZRight)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SimplifyMode {
    None,
    R,
    Zs,
    #[default]
    Zsr,
}

impl SimplifyMode {
    pub const ALL: [SimplifyMode; 4] = [SimplifyMode::None, SimplifyMode::R, SimplifyMode::Zs, SimplifyMode::Zsr];
}

impl FromStr for SimplifyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "full" => Ok(SimplifyMode::None),
            "r" => Ok(SimplifyMode::R),
            "zs" => Ok(SimplifyMode::Zs),
            "zsr" => Ok(SimplifyMode::Zsr),
            other => Err(Error::Config(format!("unknown simplification mode `{other}`"))),
        }
    }
}

impl fmt::Display for SimplifyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimplifyMode::None => "none",
            SimplifyMode::R => "r",
            SimplifyMode::Zs => "zs",
            SimplifyMode::Zsr => "zsr",
        })
    }
}

impl<'de> serde::Deserialize<'de> for SimplifyMode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Per-gate classes and admissible type sets.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DomainMap {
    pub classes: Vec<GateClass>,
    pub domains: Vec<TypeSet>,
    /// Fanout-1 predecessors of S/Z gates; they must keep a full domain
    /// unless they are S/Z themselves.
    pub retain_full: Vec<bool>,
}

impl DomainMap {
    pub fn all_full(k: usize) -> DomainMap {
        DomainMap {
            classes: vec![GateClass::Full; k],
            domains: vec![TypeSet::L; k],
            retain_full: vec![false; k],
        }
    }

    pub fn count(&self, pred: impl Fn(GateClass) -> bool) -> usize {
        self.classes.iter().filter(|&&c| pred(c)).count()
    }
}

/// Classifies every gate in one pass over the fanout table.
pub fn classify_gates(topo: &Topology, mode: SimplifyMode) -> DomainMap {
    let k = topo.k();
    let mut map = DomainMap::all_full(k);
    if mode == SimplifyMode::None {
        return map;
    }
    let out_layer = topo.output_layer();
    if mode == SimplifyMode::R {
        for j in (0..k).filter(|&j| !out_layer[j]) {
            map.classes[j] = GateClass::R;
        }
    } else {
        let fanout = topo.gate_fanout();
        let single = |r: NodeRef| matches!(r, NodeRef::Gate(p) if fanout[p] == 1);
        for (j, g) in topo.gates().iter().enumerate() {
            let (NodeRef::Gate(l), NodeRef::Gate(r)) = (g.left, g.right) else {
                continue;
            };
            map.classes[j] = match (single(g.left), single(g.right)) {
                (true, true) => {
                    map.retain_full[l] = true;
                    map.retain_full[r] = true;
                    GateClass::S
                }
                (true, false) => {
                    map.retain_full[l] = true;
                    GateClass::ZLeft
                }
                (false, true) => {
                    map.retain_full[r] = true;
                    GateClass::ZRight
                }
                (false, false) => GateClass::Full,
            };
        }
        if mode == SimplifyMode::Zsr {
            for j in 0..k {
                if map.classes[j] == GateClass::Full && !out_layer[j] && !map.retain_full[j] {
                    map.classes[j] = GateClass::R;
                }
            }
        }
    }
    map.domains = map.classes.iter().map(|c| c.domain()).collect();
    map
}

/// Rewrites `asg` into an equivalent assignment whose non-output-layer gates
/// all lie in `R`, by pushing output negations into consumers.
pub fn rewrite_r_wave(topo: &Topology, asg: &Assignment) -> Result<Assignment> {
    topo.check_assignment(asg)?;
    let out_layer = topo.output_layer();
    let mut negated = vec![false; topo.k()];
    let inverted = |r: NodeRef, negated: &[bool]| matches!(r, NodeRef::Gate(p) if negated[p]);
    let mut out = Vec::with_capacity(topo.k());
    for (j, g) in topo.gates().iter().enumerate() {
        let mut t = asg.get(j);
        if inverted(g.left, &negated) {
            t = t.neg_left();
        }
        if inverted(g.right, &negated) {
            t = t.neg_right();
        }
        if !out_layer[j] && !TypeSet::R.contains(t) {
            t = t.neg_out();
            negated[j] = true;
        }
        out.push(t);
    }
    Ok(Assignment::new(out))
}

/// Whether some assignment drawn from `domains` reproduces the full truth
/// table of `(topo, asg)`. A model is re-checked by exhaustive evaluation.
pub fn validate_domains_sat(topo: &Topology, asg: &Assignment, domains: &[TypeSet]) -> Result<bool> {
    validate_domains_with(topo, asg, domains, SolverKind::default())
}

pub fn validate_domains_with(
    topo: &Topology,
    asg: &Assignment,
    domains: &[TypeSet],
    solver: SolverKind,
) -> Result<bool> {
    topo.check_assignment(asg)?;
    if topo.n() > VALIDATE_LIMIT {
        return Err(Error::TooLarge(format!(
            "witness search over {} inputs (limit {VALIDATE_LIMIT})",
            topo.n()
        )));
    }
    if domains.iter().any(|d| d.is_empty()) {
        return Ok(false);
    }
    let mut enc = Encoder::visible(topo, Session::with_backend(solver));
    let c = enc.add_copy(domains)?;
    let n = topo.n();
    let blocks = if n > 6 { 1u64 << (n - 6) } else { 1 };
    for block in 0..blocks {
        let words = exhaustive_input_words(n, block);
        let outs = topo.eval_words(asg, &words);
        let lanes = (1u64 << n).min(64);
        for lane in 0..lanes {
            let x: BitVector = words.iter().map(|w| w >> lane & 1 == 1).collect();
            let z: BitVector = outs.iter().map(|w| w >> lane & 1 == 1).collect();
            enc.encode_sample(c, &x, &z)?;
        }
    }
    if !enc.session_mut().solve()? {
        return Ok(false);
    }
    let witness = enc.decode_assignment(c)?;
    equiv_exhaustive(topo, asg, &witness)
}

fn ser_big<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplifyReport {
    pub mode: SimplifyMode,
    pub gates: usize,
    pub s: usize,
    pub z: usize,
    pub r: usize,
    pub full: usize,
    #[serde(serialize_with = "ser_big")]
    pub space_before: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub space_after: BigUint,
    /// `log10(before / after)`.
    pub reduction_log10: f64,
    pub classes: Vec<GateClass>,
}

pub fn simplification_report(topo: &Topology, mode: SimplifyMode, map: &DomainMap) -> Result<SimplifyReport> {
    let before = crate::circuit::search_space_size(&vec![TypeSet::L; topo.k()])?;
    let after = crate::circuit::search_space_size(&map.domains)?;
    Ok(SimplifyReport {
        mode,
        gates: topo.k(),
        s: map.count(|c| c == GateClass::S),
        z: map.count(|c| matches!(c, GateClass::ZLeft | GateClass::ZRight)),
        r: map.count(|c| c == GateClass::R),
        full: map.count(|c| c == GateClass::Full),
        reduction_log10: log10_big(&before) - log10_big(&after),
        space_before: before,
        space_after: after,
        classes: map.classes.clone(),
    })
}

fn log10_big(v: &BigUint) -> f64 {
    let shift = v.bits().saturating_sub(53);
    let top = (v >> shift).to_u64_digits().first().copied().unwrap_or(0) as f64;
    top.log10() + shift as f64 * std::f64::consts::LOG10_2
}
