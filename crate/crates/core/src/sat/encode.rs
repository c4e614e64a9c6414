// SPDX-License-Identifier: Apache-2.0

//! CNF encodings of a topology with symbolic gate types.
//!
//! Every circuit copy owns its selector variables `Sel[g][t]` and, when some
//! inputs are hidden, one variable per hidden input bit shared by all samples
//! of that copy. Each sample (a concrete observation or a symbolic input
//! vector) allocates fresh signal variables for that copy only, so copies
//! never share anything except explicitly shared input variables.

use super::{Lit, Session};
use crate::circuit::{Assignment, BitVector, HiddenPartition, NodeRef, Topology};
use crate::error::{Error, Result};
use crate::gate::{GateType, TypeSet};

/// Handle of one circuit copy inside an [`Encoder`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct CopyId(usize);

#[derive(Debug)]
struct CopyVars {
    domains: Vec<TypeSet>,
    sel: Vec<[Option<Lit>; 16]>,
    hidden: Vec<Lit>,
    samples: usize,
}

/// Variable manager and encoding primitives bound to one session.
#[derive(Debug)]
pub struct Encoder<'t> {
    topo: &'t Topology,
    partition: HiddenPartition,
    session: Session,
    copies: Vec<CopyVars>,
}

impl<'t> Encoder<'t> {
    pub fn new(topo: &'t Topology, partition: HiddenPartition, session: Session) -> Result<Self> {
        if partition.n() != topo.n() {
            return Err(Error::Config(format!(
                "hidden partition covers {} inputs, circuit has {}",
                partition.n(),
                topo.n()
            )));
        }
        Ok(Encoder {
            topo,
            partition,
            session,
            copies: Vec::new(),
        })
    }

    /// Encoder where every input is attacker-controlled.
    pub fn visible(topo: &'t Topology, session: Session) -> Self {
        Encoder::new(topo, HiddenPartition::none(topo.n()), session)
            .expect("trivial partition always matches")
    }

    pub fn topology(&self) -> &'t Topology {
        self.topo
    }

    pub fn partition(&self) -> &HiddenPartition {
        &self.partition
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    pub fn session_mut(&mut self) -> &mut Session {
        &mut self.session
    }

    pub fn into_session(self) -> Session {
        self.session
    }

    pub fn domains(&self, copy: CopyId) -> &[TypeSet] {
        &self.copies[copy.0].domains
    }

    /// Number of samples encoded into a copy so far.
    pub fn sample_count(&self, copy: CopyId) -> usize {
        self.copies[copy.0].samples
    }

    /// Adds a namespace-isolated copy with one-hot selectors over `domains`.
    pub fn add_copy(&mut self, domains: &[TypeSet]) -> Result<CopyId> {
        if domains.len() != self.topo.k() {
            return Err(Error::Config(format!(
                "{} domains for {} gates",
                domains.len(),
                self.topo.k()
            )));
        }
        let id = CopyId(self.copies.len());
        self.copies.push(CopyVars {
            domains: domains.to_vec(),
            sel: vec![[None; 16]; domains.len()],
            hidden: Vec::new(),
            samples: 0,
        });
        for (g, &d) in domains.iter().enumerate() {
            self.encode_onehot(id, g, d)?;
        }
        let hidden = self
            .session
            .new_vars(self.partition.hidden_width(), format!("copy {} hidden inputs", id.0));
        self.copies[id.0].hidden = hidden;
        Ok(id)
    }

    /// Allocates the selectors of gate `g` and constrains exactly one to hold:
    /// one clause over all of them plus one binary clause per pair.
    pub fn encode_onehot(&mut self, copy: CopyId, gate: usize, domain: TypeSet) -> Result<()> {
        if domain.is_empty() {
            return Err(Error::Domain {
                gate,
                msg: "empty domain".into(),
            });
        }
        let sels = self.session.new_vars(
            domain.len(),
            format!("copy {} gate {gate} selectors {:?}", copy.0, domain),
        );
        for (t, &s) in domain.iter().zip(&sels) {
            self.copies[copy.0].sel[gate][t.tt() as usize] = Some(s);
        }
        self.session.add_clause(&sels);
        for (i, &a) in sels.iter().enumerate() {
            for &b in &sels[i + 1..] {
                self.session.add_clause(&[!a, !b]);
            }
        }
        Ok(())
    }

    /// A copy whose gate types (and hidden inputs) are fixed by unit clauses.
    pub fn add_frozen_copy(
        &mut self,
        asg: &Assignment,
        hidden: Option<&BitVector>,
    ) -> Result<CopyId> {
        self.topo.check_assignment(asg)?;
        let domains: Vec<TypeSet> = asg.types().iter().map(|&t| TypeSet::singleton(t)).collect();
        let id = self.add_copy(&domains)?;
        for unit in self.freeze_literals(id, asg)? {
            self.session.add_clause(&[unit]);
        }
        if let Some(y) = hidden {
            for unit in self.hidden_literals(id, y)? {
                self.session.add_clause(&[unit]);
            }
        } else if self.partition.hidden_width() > 0 {
            return Err(Error::Config(
                "frozen copy needs a hidden input value".into(),
            ));
        }
        Ok(id)
    }

    /// Assumption literals that pin a symbolic copy to `asg`.
    pub fn freeze_literals(&self, copy: CopyId, asg: &Assignment) -> Result<Vec<Lit>> {
        self.topo.check_assignment(asg)?;
        asg.types()
            .iter()
            .enumerate()
            .map(|(g, &t)| {
                self.selector(copy, g, t).ok_or_else(|| Error::Domain {
                    gate: g,
                    msg: format!("type {t} is outside the domain"),
                })
            })
            .collect()
    }

    /// Assumption literals that pin a copy's hidden inputs to `y`.
    pub fn hidden_literals(&self, copy: CopyId, y: &BitVector) -> Result<Vec<Lit>> {
        let vars = &self.copies[copy.0].hidden;
        if y.len() != vars.len() {
            return Err(Error::Shape {
                expected: vars.len(),
                got: y.len(),
            });
        }
        Ok(vars.iter().zip(y.iter()).map(|(&v, b)| v.with_value(b)).collect())
    }

    pub fn selector(&self, copy: CopyId, gate: usize, t: GateType) -> Option<Lit> {
        self.copies[copy.0].sel[gate][t.tt() as usize]
    }

    pub fn hidden_vars(&self, copy: CopyId) -> &[Lit] {
        &self.copies[copy.0].hidden
    }

    /// Fresh variables for a symbolic visible input vector.
    pub fn input_vars(&mut self) -> Vec<Lit> {
        self.session
            .new_vars(self.partition.visible_width(), "symbolic inputs")
    }

    /// Encodes one observation `(x, z)` into a copy: fresh signal variables,
    /// unit clauses on inputs and outputs, and per-type cofactor clauses.
    pub fn encode_sample(&mut self, copy: CopyId, x: &BitVector, z: &BitVector) -> Result<()> {
        if x.len() != self.partition.visible_width() {
            return Err(Error::Shape {
                expected: self.partition.visible_width(),
                got: x.len(),
            });
        }
        if z.len() != self.topo.m() {
            return Err(Error::Shape {
                expected: self.topo.m(),
                got: z.len(),
            });
        }
        let sample = self.copies[copy.0].samples;
        let xs = self.session.new_vars(
            x.len(),
            format!("copy {} sample {sample} inputs", copy.0),
        );
        for (&v, b) in xs.iter().zip(x.iter()) {
            self.session.add_clause(&[v.with_value(b)]);
        }
        let outs = self.encode_gates(copy, &xs);
        for (&o, b) in outs.iter().zip(z.iter()) {
            self.session.add_clause(&[o.with_value(b)]);
        }
        Ok(())
    }

    /// Encodes the copy on a symbolic visible input; returns the output literals.
    pub fn encode_symbolic(&mut self, copy: CopyId, x: &[Lit]) -> Result<Vec<Lit>> {
        if x.len() != self.partition.visible_width() {
            return Err(Error::Shape {
                expected: self.partition.visible_width(),
                got: x.len(),
            });
        }
        Ok(self.encode_gates(copy, x))
    }

    fn encode_gates(&mut self, copy: CopyId, visible: &[Lit]) -> Vec<Lit> {
        let topo = self.topo;
        let sample = self.copies[copy.0].samples;
        self.copies[copy.0].samples += 1;
        let mut vals = Vec::with_capacity(topo.n() + topo.k());
        for src in self.partition.locate() {
            vals.push(match src {
                Ok(p) => visible[p],
                Err(p) => self.copies[copy.0].hidden[p],
            });
        }
        let gate_vars = self.session.new_vars(
            topo.k(),
            format!("copy {} sample {sample} gate signals", copy.0),
        );
        vals.extend_from_slice(&gate_vars);
        let mut clause = Vec::with_capacity(4);
        for (j, g) in topo.gates().iter().enumerate() {
            let vl = vals[topo.node_index(g.left)];
            let vr = vals[topo.node_index(g.right)];
            let vg = gate_vars[j];
            let same = vl == vr;
            for t in self.copies[copy.0].domains[j].iter() {
                let s = self.copies[copy.0].sel[j][t.tt() as usize].expect("selector in domain");
                for a in [false, true] {
                    for b in [false, true] {
                        if same && a != b {
                            continue;
                        }
                        clause.clear();
                        clause.push(!s);
                        clause.push(vl.with_value(!a));
                        if !same {
                            clause.push(vr.with_value(!b));
                        }
                        clause.push(vg.with_value(t.apply(a, b)));
                        self.session.add_clause(&clause);
                    }
                }
            }
        }
        topo.outputs()
            .iter()
            .map(|&o| match o {
                NodeRef::Input(i) => vals[i],
                NodeRef::Gate(j) => gate_vars[j],
            })
            .collect()
    }

    /// Adds a symbolic input `X` shared by both copies and requires at least
    /// one output to differ: `d_h ↔ (o1_h ⊕ o2_h)` and `⋁ d_h`. Returns `X`.
    pub fn diff_constr(&mut self, a: CopyId, b: CopyId) -> Result<Vec<Lit>> {
        let x = self.input_vars();
        let oa = self.encode_symbolic(a, &x)?;
        let ob = self.encode_symbolic(b, &x)?;
        let ds = self.session.new_vars(oa.len(), "output differences");
        for ((&d, &p), &q) in ds.iter().zip(&oa).zip(&ob) {
            self.session.add_clause(&[!d, p, q]);
            self.session.add_clause(&[!d, !p, !q]);
            self.session.add_clause(&[d, !p, q]);
            self.session.add_clause(&[d, p, !q]);
        }
        self.session.add_clause(&ds);
        Ok(x)
    }

    /// Excludes one concrete assignment (and hidden value) from a copy:
    /// `⋁ ¬Sel[g][asg(g)] ∨ ⋁ (y_j ≠ y(j))`. Gates whose type lies outside
    /// their domain drop out of the clause, which stays sound. With a guard,
    /// the clause only binds while the guard is assumed.
    pub fn block(
        &mut self,
        copy: CopyId,
        asg: &Assignment,
        hidden: Option<&BitVector>,
        guard: Option<Lit>,
    ) -> Result<()> {
        self.topo.check_assignment(asg)?;
        let mut clause: Vec<Lit> = asg
            .types()
            .iter()
            .enumerate()
            .filter_map(|(g, &t)| self.selector(copy, g, t))
            .map(|s| !s)
            .collect();
        if let Some(y) = hidden {
            clause.extend(self.hidden_literals(copy, y)?.into_iter().map(|l| !l));
        }
        if clause.is_empty() {
            return Err(Error::Domain {
                gate: 0,
                msg: "blocking clause would be empty".into(),
            });
        }
        match guard {
            Some(g) => self.session.add_guarded(&clause, g),
            None => self.session.add_clause(&clause),
        }
        Ok(())
    }

    /// Gate types selected by the last model.
    pub fn decode_assignment(&self, copy: CopyId) -> Result<Assignment> {
        let c = &self.copies[copy.0];
        (0..self.topo.k())
            .map(|g| {
                c.domains[g]
                    .iter()
                    .find(|t| {
                        c.sel[g][t.tt() as usize].is_some_and(|s| self.session.value(s))
                    })
                    .ok_or_else(|| Error::Internal(format!("no selector true for gate {g}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Assignment::new)
    }

    /// Hidden input value chosen by the last model.
    pub fn decode_hidden(&self, copy: CopyId) -> BitVector {
        self.decode_bits(&self.copies[copy.0].hidden)
    }

    pub fn decode_bits(&self, lits: &[Lit]) -> BitVector {
        lits.iter().map(|&l| self.session.value(l)).collect()
    }
}
