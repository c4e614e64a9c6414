// SPDX-License-Identifier: Apache-2.0

use batsat::{lbool, BasicSolver, SolverInterface};

use super::{Lit, SolverKind};
use crate::error::{Error, Result};

/// Minimal incremental solver contract.
pub trait SatBackend {
    /// Adds a permanent clause. Variables are created on first use.
    fn add_clause(&mut self, lits: &[Lit]);

    /// Solves under assumptions that hold for this call only.
    fn solve(&mut self, assumptions: &[Lit]) -> Result<bool>;

    /// Model value of `lit` after a satisfiable call. Unassigned variables
    /// read as false.
    fn value(&self, lit: Lit) -> bool;
}

pub(super) fn create(kind: SolverKind) -> Box<dyn SatBackend> {
    match kind {
        SolverKind::Cadical => Box::new(Cadical(cadical::Solver::new())),
        SolverKind::Batsat => Box::new(Batsat {
            solver: BasicSolver::default(),
            buf: Vec::new(),
        }),
    }
}

struct Cadical(cadical::Solver);

impl SatBackend for Cadical {
    fn add_clause(&mut self, lits: &[Lit]) {
        self.0.add_clause(lits.iter().map(|l| l.dimacs()));
    }

    fn solve(&mut self, assumptions: &[Lit]) -> Result<bool> {
        self.0
            .solve_with(assumptions.iter().map(|l| l.dimacs()))
            .ok_or_else(|| Error::Solver("cadical returned without an answer".into()))
    }

    fn value(&self, lit: Lit) -> bool {
        self.0.value(lit.dimacs()).unwrap_or(false)
    }
}

struct Batsat {
    solver: BasicSolver,
    buf: Vec<batsat::Lit>,
}

impl Batsat {
    fn lit(&mut self, l: Lit) -> batsat::Lit {
        let var = self.solver.var_of_int(l.var() - 1);
        batsat::Lit::new(var, !l.is_negated())
    }
}

impl SatBackend for Batsat {
    fn add_clause(&mut self, lits: &[Lit]) {
        let mut buf = std::mem::take(&mut self.buf);
        buf.clear();
        buf.extend(lits.iter().map(|&l| self.lit(l)));
        // returns false once the formula is unsat at level 0; later solves report it
        self.solver.add_clause_reuse(&mut buf);
        self.buf = buf;
    }

    fn solve(&mut self, assumptions: &[Lit]) -> Result<bool> {
        let assumps: Vec<batsat::Lit> = assumptions.iter().map(|&l| self.lit(l)).collect();
        let r = self.solver.solve_limited(&assumps);
        if r == lbool::TRUE {
            Ok(true)
        } else if r == lbool::FALSE {
            Ok(false)
        } else {
            Err(Error::Solver("batsat returned without an answer".into()))
        }
    }

    fn value(&self, lit: Lit) -> bool {
        let idx = lit.var() - 1;
        if idx >= self.solver.num_vars() {
            return false;
        }
        let v = batsat::Lit::new(batsat::Var::unsafe_from_idx(idx), !lit.is_negated());
        self.solver.value_lit(v) == lbool::TRUE
    }
}
