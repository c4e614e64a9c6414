// SPDX-License-Identifier: Apache-2.0

//! Oracle-guided recovery of gate types.
//!
//! Both procedures maintain a discriminating set `DI` of observed
//! input/output rows and search for two candidates that agree with all of
//! `DI` yet disagree somewhere else. The input where they disagree is sent to
//! the oracle, which refutes at least one of them. When no such pair exists,
//! every surviving candidate is functionally equivalent to the target and any
//! one of them is returned.
//!
//! * [`run_baseline`] asks a single monolithic two-copy formula for both
//!   candidates and the separating input at once.
//! * [`run_optimized`] keeps one incremental single-copy session, checks
//!   candidate pairs with small concrete miters, and only falls back to the
//!   two-copy formula after `n_max` pairs in a row turn out equivalent.
//!
//! When some inputs are hidden (a fixed secret the attacker cannot set), each
//! candidate also carries a guess for the hidden value. With no hidden inputs
//! this reduces to the plain setting.

mod baseline;
mod optimized;
mod oracle;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize, Serializer};

pub use oracle::{Oracle, OracleBackend};

use crate::circuit::{search_space_size, Assignment, BitVector, HiddenPartition, Topology};
use crate::error::{Error, Result};
use crate::gate::TypeSet;
use crate::sat::{Encoder, Session, SolverKind, SolverStats};
use crate::simplify::{classify_gates, SimplifyMode};
use crate::verify::Instance;

pub use baseline::run_baseline;
pub use optimized::run_optimized;

/// Default wall-clock budget per attack.
pub const DEFAULT_TIME_BUDGET: Duration = Duration::from_secs(3600);

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThreatModel {
    /// Every input is attacker-controlled.
    #[default]
    A,
    /// Some inputs are fixed to a secret value.
    B,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Baseline,
    #[default]
    Optimized,
}

impl FromStr for ThreatModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(ThreatModel::A),
            "b" => Ok(ThreatModel::B),
            other => Err(Error::Config(format!("unknown threat model `{other}`"))),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "baseline" => Ok(Algorithm::Baseline),
            "optimized" | "optimised" => Ok(Algorithm::Optimized),
            other => Err(Error::Config(format!("unknown algorithm `{other}`"))),
        }
    }
}

impl fmt::Display for ThreatModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThreatModel::A => "a",
            ThreatModel::B => "b",
        })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Baseline => "baseline",
            Algorithm::Optimized => "optimized",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttackConfig {
    pub model: ThreatModel,
    pub algorithm: Algorithm,
    pub simplify: SimplifyMode,
    /// Equivalent candidate pairs tolerated before the two-copy fallback.
    pub n_max: usize,
    pub time_budget: Duration,
    pub seed: u64,
    /// Indices of the hidden inputs (model B only).
    pub hidden: Vec<usize>,
    pub solver: SolverKind,
}

impl Default for AttackConfig {
    fn default() -> Self {
        AttackConfig {
            model: ThreatModel::A,
            algorithm: Algorithm::Optimized,
            simplify: SimplifyMode::Zsr,
            n_max: 3,
            time_budget: DEFAULT_TIME_BUDGET,
            seed: 0,
            hidden: Vec::new(),
            solver: SolverKind::default(),
        }
    }
}

impl AttackConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_max == 0 {
            return Err(Error::Config("n_max must be at least 1".into()));
        }
        match self.model {
            ThreatModel::B if self.hidden.is_empty() => {
                Err(Error::Config("model B needs at least one hidden input".into()))
            }
            ThreatModel::A if !self.hidden.is_empty() => {
                Err(Error::Config("model A has no hidden inputs".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn partition(&self, n: usize) -> Result<HiddenPartition> {
        HiddenPartition::new(n, self.hidden.clone())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Recovered,
    Timeout,
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Recovered => "recovered",
            Status::Timeout => "timeout",
            Status::Error => "error",
        })
    }
}

/// One oracle observation: visible input and the full output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Observation {
    pub x: BitVector,
    pub z: BitVector,
}

fn ser_big<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_secs<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Clone, Debug, Serialize)]
pub struct RecoveryResult {
    pub status: Status,
    pub assignment: Option<Assignment>,
    /// Recovered hidden value (model B).
    pub hidden: Option<BitVector>,
    pub di: Vec<Observation>,
    pub query_count: usize,
    #[serde(serialize_with = "ser_secs")]
    pub wall_time: Duration,
    pub solver: SolverStats,
    /// Outer iterations, each ending in a query or in termination.
    pub iterations: usize,
    /// Candidate pairs found equivalent by the concrete miter.
    pub equivalent_pairs: usize,
    pub fallback_calls: usize,
    #[serde(serialize_with = "ser_big")]
    pub space_before: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub space_after: BigUint,
    pub error: Option<String>,
}

impl RecoveryResult {
    /// Result for a run that could not start.
    pub fn failed(topo: &Topology, e: Error) -> RecoveryResult {
        let size = search_space_size(&vec![TypeSet::L; topo.k()]).unwrap_or_default();
        RecoveryResult {
            status: Status::Error,
            assignment: None,
            hidden: None,
            di: Vec::new(),
            query_count: 0,
            wall_time: Duration::ZERO,
            solver: SolverStats::default(),
            iterations: 0,
            equivalent_pairs: 0,
            fallback_calls: 0,
            space_before: size.clone(),
            space_after: size,
            error: Some(e.to_string()),
        }
    }

    pub fn di_rows(&self) -> Vec<(BitVector, BitVector)> {
        self.di.iter().map(|o| (o.x.clone(), o.z.clone())).collect()
    }
}

/// Runs the configured algorithm against `oracle`.
pub fn attack(topo: &Topology, oracle: &mut Oracle, cfg: &AttackConfig) -> RecoveryResult {
    match cfg.algorithm {
        Algorithm::Baseline => run_baseline(topo, oracle, cfg),
        Algorithm::Optimized => run_optimized(topo, oracle, cfg),
    }
}

/// The hidden-input variant; identical control flow, candidates carry a
/// hidden value.
pub fn run_model_b(topo: &Topology, oracle: &mut Oracle, cfg: &AttackConfig) -> RecoveryResult {
    let mut cfg = cfg.clone();
    cfg.model = ThreatModel::B;
    attack(topo, oracle, &cfg)
}

/// A candidate: gate types plus a guess for the hidden inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Candidate {
    pub asg: Assignment,
    pub y: BitVector,
}

impl Candidate {
    fn instance(&self) -> Instance<'_> {
        Instance {
            asg: &self.asg,
            hidden: &self.y,
        }
    }

    fn predicts(&self, topo: &Topology, part: &HiddenPartition, x: &BitVector, z: &BitVector) -> Result<bool> {
        Ok(topo.eval(&self.asg, &part.merge(x, &self.y)?)? == *z)
    }
}

/// A visible input separating two concrete candidates, from a fresh miter.
pub fn find_discriminating_input(
    topo: &Topology,
    part: &HiddenPartition,
    c1: Instance,
    c2: Instance,
    solver: SolverKind,
) -> Result<Option<BitVector>> {
    crate::verify::distinguishing_input(topo, part, c1, c2, solver)
}

/// Shared bookkeeping for both algorithms.
pub(crate) struct Run<'a> {
    pub topo: &'a Topology,
    pub cfg: &'a AttackConfig,
    pub part: HiddenPartition,
    pub domains: Vec<TypeSet>,
    pub start: Instant,
    pub di: Vec<Observation>,
    pub stats: SolverStats,
    pub iterations: usize,
    pub equivalent_pairs: usize,
    pub fallback_calls: usize,
    queries_before: usize,
}

/// Why a run stopped early.
pub(crate) enum Stop {
    Timeout,
    Failed(Error),
}

impl From<Error> for Stop {
    fn from(e: Error) -> Self {
        Stop::Failed(e)
    }
}

impl<'a> Run<'a> {
    pub fn new(topo: &'a Topology, oracle: &Oracle, cfg: &'a AttackConfig) -> Result<Run<'a>> {
        cfg.validate()?;
        let part = cfg.partition(topo.n())?;
        if oracle.input_width() != part.visible_width() || oracle.output_width() != topo.m() {
            return Err(Error::Config(format!(
                "oracle has {} inputs and {} outputs, topology expects {} and {}",
                oracle.input_width(),
                oracle.output_width(),
                part.visible_width(),
                topo.m()
            )));
        }
        Ok(Run {
            topo,
            cfg,
            domains: classify_gates(topo, cfg.simplify).domains,
            part,
            start: Instant::now(),
            di: Vec::new(),
            stats: SolverStats::default(),
            iterations: 0,
            equivalent_pairs: 0,
            fallback_calls: 0,
            queries_before: oracle.query_count(),
        })
    }

    pub fn session(&self) -> Session {
        Session::with_backend(self.cfg.solver)
    }

    pub fn encoder(&self) -> Encoder<'a> {
        Encoder::new(self.topo, self.part.clone(), self.session()).expect("partition built from this topology")
    }

    pub fn check_time(&self) -> std::result::Result<(), Stop> {
        if self.start.elapsed() > self.cfg.time_budget {
            Err(Stop::Timeout)
        } else {
            Ok(())
        }
    }

    pub fn observe(&mut self, oracle: &mut Oracle, x: BitVector) -> Result<BitVector> {
        let z = oracle.query(&x)?;
        if self.di.iter().any(|o| o.x == x) {
            return Err(Error::Internal(format!("input {x} was already observed")));
        }
        self.di.push(Observation { x, z: z.clone() });
        Ok(z)
    }

    pub fn decode(enc: &Encoder, copy: crate::sat::CopyId) -> Result<Candidate> {
        Ok(Candidate {
            asg: enc.decode_assignment(copy)?,
            y: enc.decode_hidden(copy),
        })
    }

    pub fn finish(self, oracle: &Oracle, outcome: std::result::Result<Candidate, Stop>) -> RecoveryResult {
        let (status, cand, error) = match outcome {
            Ok(c) => (Status::Recovered, Some(c), None),
            Err(Stop::Timeout) => (Status::Timeout, None, None),
            Err(Stop::Failed(e)) => (Status::Error, None, Some(e.to_string())),
        };
        let all_full = vec![TypeSet::L; self.topo.k()];
        let hidden_space = BigUint::from(1u32) << self.part.hidden_width();
        RecoveryResult {
            status,
            hidden: cand.as_ref().filter(|_| self.part.hidden_width() > 0).map(|c| c.y.clone()),
            assignment: cand.map(|c| c.asg),
            query_count: oracle.query_count() - self.queries_before,
            di: self.di,
            wall_time: self.start.elapsed(),
            solver: self.stats,
            iterations: self.iterations,
            equivalent_pairs: self.equivalent_pairs,
            fallback_calls: self.fallback_calls,
            space_before: search_space_size(&all_full).unwrap_or_default() * &hidden_space,
            space_after: search_space_size(&self.domains).unwrap_or_default() * &hidden_space,
            error,
        }
    }

    /// Fresh single-copy session over `DI`; any model is a valid answer.
    pub fn extract(&mut self) -> std::result::Result<Candidate, Stop> {
        self.check_time()?;
        let mut enc = self.encoder();
        let c = enc.add_copy(&self.domains)?;
        for o in &self.di {
            enc.encode_sample(c, &o.x, &o.z)?;
        }
        let sat = enc.session_mut().solve()?;
        self.stats.absorb(&enc.session().stats());
        if !sat {
            return Err(Stop::Failed(Error::Internal(
                "no assignment reproduces the observations".into(),
            )));
        }
        Ok(Run::decode(&enc, c)?)
    }
}
