// SPDX-License-Identifier: Apache-2.0

//! JSON circuit interchange.
//!
//! ```json
//! { "n": 2, "m": 1,
//!   "gates": [ { "l": {"in": 0}, "r": {"in": 1}, "type": "AND" } ],
//!   "outputs": [ {"g": 0} ] }
//! ```
//!
//! Gates are listed in topological order and may only reference inputs and
//! earlier gates. `type` uses the canonical gate names (`AND`, `NOT_A_OR_B`,
//! ...), whose truth tables index `f(a, b)` at bit `2a + b` with `a` the left
//! input. Either every gate carries a type or none does; a file without types
//! is the attacker's view of the topology. Multi-bit values are LSB first.

use serde::{Deserialize, Serialize};

use crate::circuit::{Assignment, Gate, NodeRef, Topology};
use crate::error::{Error, Result};
use crate::gate::GateType;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateEntry {
    pub l: NodeRef,
    pub r: NodeRef,
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub ty: Option<GateType>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CircuitFile {
    pub n: usize,
    pub m: usize,
    pub gates: Vec<GateEntry>,
    pub outputs: Vec<NodeRef>,
}

impl CircuitFile {
    pub fn from_circuit(topo: &Topology, asg: Option<&Assignment>) -> CircuitFile {
        CircuitFile {
            n: topo.n(),
            m: topo.m(),
            gates: topo
                .gates()
                .iter()
                .enumerate()
                .map(|(j, g)| GateEntry {
                    l: g.left,
                    r: g.right,
                    ty: asg.map(|a| a.get(j)),
                })
                .collect(),
            outputs: topo.outputs().to_vec(),
        }
    }

    pub fn into_circuit(self) -> Result<(Topology, Option<Assignment>)> {
        if self.m != self.outputs.len() {
            return Err(Error::Parse {
                line: None,
                msg: format!("m = {} but {} outputs listed", self.m, self.outputs.len()),
            });
        }
        let typed = self.gates.iter().filter(|g| g.ty.is_some()).count();
        if typed != 0 && typed != self.gates.len() {
            return Err(Error::Parse {
                line: None,
                msg: format!("{typed} of {} gates carry a type", self.gates.len()),
            });
        }
        let asg = (typed > 0 || self.gates.is_empty())
            .then(|| Assignment::new(self.gates.iter().filter_map(|g| g.ty).collect()));
        let gates = self.gates.iter().map(|g| Gate::new(g.l, g.r)).collect();
        let topo = Topology::new(self.n, gates, self.outputs).map_err(|e| Error::Parse {
            line: None,
            msg: e.to_string(),
        })?;
        // an empty gate list has a trivially complete assignment
        let asg = if topo.k() == 0 { Some(Assignment::default()) } else { asg };
        Ok((topo, asg))
    }
}

pub fn write_json(topo: &Topology, asg: Option<&Assignment>) -> String {
    serde_json::to_string_pretty(&CircuitFile::from_circuit(topo, asg))
        .expect("circuit serialization cannot fail")
}

pub fn read_json(text: &str) -> Result<(Topology, Option<Assignment>)> {
    let file: CircuitFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: Some(e.line()),
        msg: e.to_string(),
    })?;
    file.into_circuit()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::random_circuit;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn round_trip(seed in any::<u64>(), n in 1usize..6, k in 0usize..12, typed in any::<bool>()) {
            let (topo, asg) = random_circuit(n, k, 3, seed);
            let text = write_json(&topo, typed.then_some(&asg));
            let (t2, a2) = read_json(&text).unwrap();
            prop_assert_eq!(&t2, &topo);
            if typed || k == 0 {
                prop_assert_eq!(a2.as_ref(), Some(&asg));
            } else {
                prop_assert!(a2.is_none());
            }
        }
    }

    #[test]
    fn topology_only_file_has_no_types() {
        let (topo, asg) = random_circuit(3, 4, 2, 1);
        let text = write_json(&topo, None);
        assert!(!text.contains("\"type\""));
        let (_, a) = read_json(&text).unwrap();
        assert!(a.is_none());
        let text = write_json(&topo, Some(&asg));
        assert!(text.contains("\"type\""));
    }

    #[test]
    fn schema_violations() {
        let bad_ref = r#"{"n":1,"m":1,"gates":[{"l":{"in":0},"r":{"in":0}}],"outputs":[{"g":3}]}"#;
        assert!(read_json(bad_ref).is_err());
        let bad_m = r#"{"n":1,"m":2,"gates":[],"outputs":[{"in":0}]}"#;
        assert!(read_json(bad_m).is_err());
        let bad_kind = r#"{"n":1,"m":1,"gates":[],"outputs":[{"w":0}]}"#;
        assert!(read_json(bad_kind).is_err());
        let partial = r#"{"n":1,"m":1,"gates":[{"l":{"in":0},"r":{"in":0},"type":"AND"},
            {"l":{"g":0},"r":{"in":0}}],"outputs":[{"g":1}]}"#;
        assert!(read_json(partial).is_err());
        let bad_type = r#"{"n":1,"m":1,"gates":[{"l":{"in":0},"r":{"in":0},"type":"MUX"}],"outputs":[{"g":0}]}"#;
        assert!(read_json(bad_type).is_err());
    }

    #[test]
    fn explicit_example() {
        let text = r#"{"n":2,"m":1,"gates":[{"l":{"in":0},"r":{"in":1},"type":"AND"}],"outputs":[{"g":0}]}"#;
        let (topo, asg) = read_json(text).unwrap();
        assert_eq!(topo.gate(0), Gate::new(NodeRef::Input(0), NodeRef::Input(1)));
        assert_eq!(asg.unwrap().get(0), GateType::AND);
    }
}
