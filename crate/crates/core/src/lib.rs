// SPDX-License-Identifier: Apache-2.0

//! Recovery of hidden gate types in Boolean circuits whose wiring is public.
//!
//! An attacker knows a circuit's topology and can query it as a black box.
//! The crate encodes the unknown gate types as SAT selector variables, narrows
//! their domains from the topology alone ([`simplify`]), and runs a
//! counterexample-guided loop that asks the oracle only on inputs that
//! separate surviving candidates ([`attack`]). Everything needed to build
//! targets and check results lives alongside: netlist ingestion, benchmark
//! generators, equivalence checking and an experiment runner.

pub mod attack;
pub mod circuit;
pub mod error;
pub mod experiment;
pub mod gate;
pub mod generate;
pub mod netlist;
pub mod sat;
pub mod simplify;
pub mod verify;

pub use circuit::{search_space_size, Assignment, BitVector, Gate, HiddenPartition, NodeRef, Topology};
pub use error::{Error, Result};
pub use gate::{GateType, TypeSet};
