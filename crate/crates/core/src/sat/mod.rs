// SPDX-License-Identifier: Apache-2.0

//! Incremental SAT sessions over pluggable CDCL backends.
//!
//! A backend only has to add clauses, solve under assumptions and report
//! model values. Clauses persist across `solve` calls; assumptions last for
//! one call. The backend is chosen by [`SolverKind`], which defaults to the
//! `GATEHIDE_SOLVER` environment variable (`cadical` or `batsat`).

mod backend;
mod dimacs;
mod encode;

use std::fmt;
use std::ops::Not;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

pub use backend::SatBackend;
pub use dimacs::{parse_dimacs, Dimacs};
pub use encode::{CopyId, Encoder};

use crate::error::{Error, Result};

/// Environment variable selecting the solver backend.
pub const SOLVER_ENV: &str = "GATEHIDE_SOLVER";

/// A literal in DIMACS numbering: variable `v ≥ 1`, negative when complemented.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(i32);

impl Lit {
    pub fn positive(var: u32) -> Lit {
        debug_assert!(var >= 1);
        Lit(var as i32)
    }

    pub fn from_dimacs(v: i32) -> Lit {
        assert!(v != 0, "0 is not a literal");
        Lit(v)
    }

    pub fn var(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_negated(self) -> bool {
        self.0 < 0
    }

    pub fn dimacs(self) -> i32 {
        self.0
    }

    /// `self` if `value` holds, its complement otherwise.
    pub fn with_value(self, value: bool) -> Lit {
        if value {
            self
        } else {
            !self
        }
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    #[default]
    Cadical,
    Batsat,
}

impl SolverKind {
    /// Backend named by `GATEHIDE_SOLVER`, or the default when unset.
    pub fn from_env() -> Result<SolverKind> {
        match std::env::var(SOLVER_ENV) {
            Ok(v) if !v.trim().is_empty() => v.parse(),
            _ => Ok(SolverKind::default()),
        }
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cadical" => Ok(SolverKind::Cadical),
            "batsat" | "minisat" => Ok(SolverKind::Batsat),
            other => Err(Error::Config(format!("unknown solver backend `{other}`"))),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Cadical => "cadical",
            SolverKind::Batsat => "batsat",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct SolverStats {
    pub solve_calls: usize,
    pub sat_results: usize,
    pub vars: usize,
    pub clauses: usize,
    #[serde(serialize_with = "ser_secs")]
    pub solve_time: Duration,
}

fn ser_secs<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl SolverStats {
    pub fn absorb(&mut self, other: &SolverStats) {
        self.solve_calls += other.solve_calls;
        self.sat_results += other.sat_results;
        self.vars += other.vars;
        self.clauses += other.clauses;
        self.solve_time += other.solve_time;
    }
}

/// Named block of variables, reported in the DIMACS header.
#[derive(Clone, Debug)]
struct VarRange {
    label: String,
    first: u32,
    last: u32,
}

/// One solver instance plus variable bookkeeping.
///
/// A session is single-threaded; independent sessions may run in parallel.
pub struct Session {
    backend: Box<dyn SatBackend>,
    kind: SolverKind,
    num_vars: u32,
    stats: SolverStats,
    record: Option<Vec<Vec<Lit>>>,
    ranges: Vec<VarRange>,
    has_model: bool,
}

impl Session {
    /// Session on the backend selected by the environment.
    pub fn new() -> Result<Session> {
        Ok(Session::with_backend(SolverKind::from_env()?))
    }

    pub fn with_backend(kind: SolverKind) -> Session {
        Session {
            backend: backend::create(kind),
            kind,
            num_vars: 0,
            stats: SolverStats::default(),
            record: None,
            ranges: Vec::new(),
            has_model: false,
        }
    }

    /// Keeps a copy of every clause so the formula can be exported later.
    pub fn recording(mut self) -> Session {
        self.record = Some(Vec::new());
        self
    }

    pub fn kind(&self) -> SolverKind {
        self.kind
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    pub fn new_var(&mut self) -> Lit {
        self.num_vars += 1;
        self.stats.vars += 1;
        Lit::positive(self.num_vars)
    }

    /// Allocates `count` consecutive variables under a label.
    pub fn new_vars(&mut self, count: usize, label: impl Into<String>) -> Vec<Lit> {
        let first = self.num_vars + 1;
        let vars: Vec<Lit> = (0..count).map(|_| self.new_var()).collect();
        if count > 0 && self.record.is_some() {
            self.ranges.push(VarRange {
                label: label.into(),
                first,
                last: self.num_vars,
            });
        }
        vars
    }

    pub fn label(&mut self, lit: Lit, label: impl Into<String>) {
        if self.record.is_some() {
            self.ranges.push(VarRange {
                label: label.into(),
                first: lit.var(),
                last: lit.var(),
            });
        }
    }

    pub fn add_clause(&mut self, lits: &[Lit]) {
        debug_assert!(lits.iter().all(|l| l.var() <= self.num_vars));
        self.stats.clauses += 1;
        self.has_model = false;
        if let Some(rec) = &mut self.record {
            rec.push(lits.to_vec());
        }
        self.backend.add_clause(lits);
    }

    /// Fresh literal whose assumption enables clauses added through
    /// [`Self::add_guarded`].
    pub fn new_activation(&mut self) -> Lit {
        let a = self.new_var();
        self.label(a, "activation");
        a
    }

    /// Adds `clause ∨ ¬guard`.
    pub fn add_guarded(&mut self, clause: &[Lit], guard: Lit) {
        let mut c = Vec::with_capacity(clause.len() + 1);
        c.extend_from_slice(clause);
        c.push(!guard);
        self.add_clause(&c);
    }

    /// Permanently disables everything guarded by `guard`.
    pub fn retire(&mut self, guard: Lit) {
        self.add_clause(&[!guard]);
    }

    pub fn solve(&mut self) -> Result<bool> {
        self.solve_with(&[])
    }

    pub fn solve_with(&mut self, assumptions: &[Lit]) -> Result<bool> {
        let start = Instant::now();
        let sat = self.backend.solve(assumptions)?;
        self.stats.solve_time += start.elapsed();
        self.stats.solve_calls += 1;
        if sat {
            self.stats.sat_results += 1;
        }
        self.has_model = sat;
        Ok(sat)
    }

    /// Value of a literal in the last model. Only meaningful directly after a
    /// satisfiable `solve`.
    pub fn value(&self, lit: Lit) -> bool {
        debug_assert!(self.has_model, "no model available");
        self.backend.value(lit)
    }

    /// Formula snapshot in DIMACS CNF. Requires [`Self::recording`].
    pub fn export_dimacs(&self) -> Result<String> {
        let clauses = self.record.as_ref().ok_or_else(|| {
            Error::Config("DIMACS export needs a recording session".into())
        })?;
        let mut out = String::new();
        for r in &self.ranges {
            if r.first == r.last {
                out.push_str(&format!("c var {} : {}\n", r.first, r.label));
            } else {
                out.push_str(&format!("c vars {}-{} : {}\n", r.first, r.last, r.label));
            }
        }
        out.push_str(&dimacs::format(self.num_vars, clauses));
        Ok(out)
    }
}

impl fmt::Debug for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Session")
            .field("backend", &self.kind)
            .field("vars", &self.num_vars)
            .field("stats", &self.stats)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lits(v: &[i32]) -> Vec<Lit> {
        v.iter().map(|&x| Lit::from_dimacs(x)).collect()
    }

    #[test]
    fn incremental_contract_on_both_backends() {
        for kind in [SolverKind::Cadical, SolverKind::Batsat] {
            let mut s = Session::with_backend(kind);
            let a = s.new_var();
            let b = s.new_var();
            s.add_clause(&[a, b]);
            assert!(s.solve_with(&[!a]).unwrap(), "{kind}");
            assert!(s.value(b));
            // assumptions do not persist
            assert!(s.solve_with(&[!b]).unwrap());
            assert!(s.value(a));
            assert!(!s.solve_with(&[!a, !b]).unwrap());
            s.add_clause(&[!a]);
            assert!(s.solve().unwrap());
            assert!(!s.value(a) && s.value(b));
            s.add_clause(&[!b]);
            assert!(!s.solve().unwrap());
            assert_eq!(s.stats().solve_calls, 5);
        }
    }

    #[test]
    fn guarded_clauses_follow_their_activation() {
        let mut s = Session::with_backend(SolverKind::Cadical);
        let x = s.new_var();
        let g = s.new_activation();
        s.add_guarded(&[x], g);
        assert!(s.solve_with(&[g, !x]).is_ok_and(|sat| !sat));
        assert!(s.solve_with(&[!x]).unwrap());
        s.retire(g);
        assert!(s.solve_with(&[!x]).unwrap());
    }

    #[test]
    fn dimacs_export_format() {
        let s = Session::with_backend(SolverKind::Batsat).recording();
        assert_eq!(s.export_dimacs().unwrap(), "p cnf 0 0\n");
        let mut s = Session::with_backend(SolverKind::Batsat).recording();
        s.new_vars(2, "demo");
        s.add_clause(&lits(&[1, -2]));
        assert_eq!(s.export_dimacs().unwrap(), "c vars 1-2 : demo\np cnf 2 1\n1 -2 0\n");
        assert!(Session::with_backend(SolverKind::Batsat).export_dimacs().is_err());
    }

    #[test]
    fn solver_kind_parsing() {
        assert_eq!("CaDiCaL".parse::<SolverKind>().unwrap(), SolverKind::Cadical);
        assert_eq!("batsat".parse::<SolverKind>().unwrap(), SolverKind::Batsat);
        assert!("glucose".parse::<SolverKind>().is_err());
    }
}
