// SPDX-License-Identifier: Apache-2.0

//! Batch experiments over a grid of circuits and attack configurations.
//!
//! A spec file is JSON:
//!
//! ```json
//! {
//!   "circuits": [
//!     { "id": "add4", "source": "gen", "family": "adder", "size": 4 },
//!     { "id": "s27", "source": "bench", "path": "benchmarks/s27.bench" },
//!     { "id": "rnd", "source": "random", "n": 6, "k": 12, "m": 2, "seed": 3 }
//!   ],
//!   "configs": [
//!     { "algorithm": "optimized", "simplify": "zsr" },
//!     { "algorithm": "baseline", "simplify": "none", "timeout": 60 }
//!   ],
//!   "seeds": [0, 1],
//!   "jsonl": "out/report.jsonl",
//!   "csv": "out/report.csv"
//! }
//! ```
//!
//! Relative paths resolve against the spec file's directory. Each grid cell
//! runs in isolation (own oracle, own solver sessions) and may run in
//! parallel; records come back in grid order. A recovered result is only
//! reported as such after it passes certification against the known target.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attack::{attack, AttackConfig, Algorithm, Oracle, RecoveryResult, Status, ThreatModel};
use crate::circuit::{Assignment, BitVector, HiddenPartition, Topology};
use crate::error::{Error, Result};
use crate::generate;
use crate::netlist::{bench_to_circuit, read_json};
use crate::sat::SolverKind;
use crate::simplify::{classify_gates, GateClass, SimplifyMode};
use crate::verify::{equiv_exhaustive_hidden, equiv_miter_hidden, Instance};

/// Inputs up to this width are additionally certified by exhaustive evaluation.
pub const EXHAUSTIVE_CERT_LIMIT: usize = 16;

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase", deny_unknown_fields)]
pub enum CircuitSource {
    Gen {
        family: String,
        size: usize,
        /// Point-function target bits; random per seed when absent.
        #[serde(default)]
        target: Option<String>,
    },
    Bench {
        path: PathBuf,
    },
    Json {
        path: PathBuf,
    },
    Random {
        n: usize,
        k: usize,
        m: usize,
        seed: u64,
    },
}

#[derive(Clone, Debug, Deserialize)]
pub struct CircuitSpec {
    pub id: String,
    #[serde(flatten)]
    pub source: CircuitSource,
}

fn default_n_max() -> usize {
    3
}

fn default_timeout() -> f64 {
    crate::attack::DEFAULT_TIME_BUDGET.as_secs_f64()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigSpec {
    #[serde(default)]
    pub model: ThreatModel,
    #[serde(default)]
    pub algorithm: Algorithm,
    #[serde(default)]
    pub simplify: SimplifyMode,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Seconds.
    #[serde(default = "default_timeout")]
    pub timeout: f64,
    #[serde(default)]
    pub hidden: Vec<usize>,
    #[serde(default)]
    pub solver: Option<String>,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub circuits: Vec<CircuitSpec>,
    pub configs: Vec<ConfigSpec>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub jsonl: Option<PathBuf>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    /// Worker threads; all cores when absent.
    #[serde(default)]
    pub threads: Option<usize>,
}

impl ExperimentSpec {
    pub fn from_file(path: &Path) -> Result<ExperimentSpec> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            line: Some(e.line()),
            msg: e.to_string(),
        })
    }
}

/// A circuit whose gate types are known to the harness.
#[derive(Clone, Debug)]
pub struct Target {
    pub id: String,
    pub topo: Topology,
    pub asg: Assignment,
}

/// Builds a generator family member. `target` only applies to `point`.
pub fn generate_family(family: &str, size: usize, target: Option<&BitVector>) -> Result<(Topology, Assignment)> {
    match family {
        "adder" => generate::gen_adder(size),
        "comparator" => generate::gen_comparator(size),
        "hamming" => generate::gen_hamming(size),
        "point" => {
            let t = target.cloned().unwrap_or_else(|| BitVector::zeros(size));
            generate::gen_point(size, &t)
        }
        other => Err(Error::Config(format!("unknown circuit family `{other}`"))),
    }
}

impl CircuitSpec {
    pub fn load(&self, base: &Path, seed: u64) -> Result<Target> {
        let (topo, asg) = match &self.source {
            CircuitSource::Gen { family, size, target } => {
                let t = match target {
                    Some(bits) => BitVector::parse_bits(bits)?,
                    None => random_bits(*size, seed ^ 0x9E37_79B9),
                };
                generate_family(family, *size, Some(&t))?
            }
            CircuitSource::Bench { path } => bench_to_circuit(&fs::read_to_string(base.join(path))?)?,
            CircuitSource::Json { path } => {
                let (topo, asg) = read_json(&fs::read_to_string(base.join(path))?)?;
                let asg = asg.ok_or_else(|| {
                    Error::Config(format!("circuit `{}` has no gate types to attack", self.id))
                })?;
                (topo, asg)
            }
            CircuitSource::Random { n, k, m, seed } => generate::random_circuit(*n, *k, *m, *seed),
        };
        Ok(Target {
            id: self.id.clone(),
            topo,
            asg,
        })
    }
}

fn random_bits(width: usize, seed: u64) -> BitVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..width).map(|_| rng.gen::<bool>()).collect()
}

impl ConfigSpec {
    pub fn to_config(&self, seed: u64) -> Result<AttackConfig> {
        let solver = match &self.solver {
            Some(s) => s.parse()?,
            None => SolverKind::from_env()?,
        };
        if !(self.timeout.is_finite() && self.timeout >= 0.0) {
            return Err(Error::Config(format!("bad timeout {}", self.timeout)));
        }
        let cfg = AttackConfig {
            model: self.model,
            algorithm: self.algorithm,
            simplify: self.simplify,
            n_max: self.n_max,
            time_budget: Duration::from_secs_f64(self.timeout),
            seed,
            hidden: self.hidden.clone(),
            solver,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// One line of the report.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub circuit: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub s: usize,
    pub z: usize,
    pub r: usize,
    pub full: usize,
    pub model: ThreatModel,
    pub algorithm: Algorithm,
    pub simplify: SimplifyMode,
    pub solver: String,
    pub seed: u64,
    pub status: Status,
    pub certified: bool,
    pub wall_time: f64,
    pub query_count: usize,
    pub di_size: usize,
    pub space_before: String,
    pub space_after: String,
    pub solve_calls: usize,
    pub vars: usize,
    pub clauses: usize,
    pub iterations: usize,
    pub equivalent_pairs: usize,
    pub fallback_calls: usize,
    pub error: Option<String>,
}

/// Checks a recovered result against the target: SAT miter, plus exhaustive
/// evaluation when the visible input is small.
pub fn certify(target: &Target, part: &HiddenPartition, secret: &BitVector, result: &RecoveryResult, solver: SolverKind) -> Result<bool> {
    let Some(asg) = &result.assignment else {
        return Ok(false);
    };
    let empty = BitVector::default();
    let y = result.hidden.as_ref().unwrap_or(&empty);
    let truth = Instance {
        asg: &target.asg,
        hidden: secret,
    };
    let got = Instance { asg, hidden: y };
    if !equiv_miter_hidden(&target.topo, part, truth, got, solver)? {
        return Ok(false);
    }
    if part.visible_width() <= EXHAUSTIVE_CERT_LIMIT {
        return equiv_exhaustive_hidden(&target.topo, part, truth, got);
    }
    Ok(true)
}

/// Secret hidden value used for a model-B run.
pub fn secret_for(part: &HiddenPartition, seed: u64) -> BitVector {
    random_bits(part.hidden_width(), seed)
}

/// Attacks one target with the harness-side oracle and certifies the result.
pub fn run_single(target: &Target, cfg: &AttackConfig) -> (RecoveryResult, ExperimentReport) {
    let part = cfg.partition(target.topo.n());
    let attempt = part.and_then(|part| {
        let secret = secret_for(&part, cfg.seed);
        let mut oracle = Oracle::fixed_hidden(target.topo.clone(), target.asg.clone(), part.clone(), secret.clone())?;
        let res = attack(&target.topo, &mut oracle, cfg);
        let certified = if res.status == Status::Recovered {
            certify(target, &part, &secret, &res, cfg.solver)?
        } else {
            false
        };
        Ok((res, certified))
    });
    let (mut res, certified) = match attempt {
        Ok(pair) => pair,
        Err(e) => (RecoveryResult::failed(&target.topo, e), false),
    };
    if res.status == Status::Recovered && !certified {
        res.status = Status::Error;
        res.error = Some("recovered assignment failed certification".into());
    }
    let report = make_report(target, cfg, &res, certified);
    (res, report)
}

fn make_report(target: &Target, cfg: &AttackConfig, res: &RecoveryResult, certified: bool) -> ExperimentReport {
    let map = classify_gates(&target.topo, cfg.simplify);
    ExperimentReport {
        circuit: target.id.clone(),
        n: target.topo.n(),
        m: target.topo.m(),
        k: target.topo.k(),
        s: map.count(|c| c == GateClass::S),
        z: map.count(|c| matches!(c, GateClass::ZLeft | GateClass::ZRight)),
        r: map.count(|c| c == GateClass::R),
        full: map.count(|c| c == GateClass::Full),
        model: cfg.model,
        algorithm: cfg.algorithm,
        simplify: cfg.simplify,
        solver: cfg.solver.to_string(),
        seed: cfg.seed,
        status: res.status,
        certified,
        wall_time: res.wall_time.as_secs_f64(),
        query_count: res.query_count,
        di_size: res.di.len(),
        space_before: res.space_before.to_string(),
        space_after: res.space_after.to_string(),
        solve_calls: res.solver.solve_calls,
        vars: res.solver.vars,
        clauses: res.solver.clauses,
        iterations: res.iterations,
        equivalent_pairs: res.equivalent_pairs,
        fallback_calls: res.fallback_calls,
        error: res.error.clone(),
    }
}

/// Runs the whole grid and writes the configured report files.
pub fn run_experiment(spec: &ExperimentSpec, base: &Path) -> Result<Vec<ExperimentReport>> {
    let mut cells = Vec::new();
    for c in &spec.circuits {
        for (ci, conf) in spec.configs.iter().enumerate() {
            for &seed in &spec.seeds {
                cells.push((c, ci, conf, seed));
            }
        }
    }
    let run_cell = |&(c, _, conf, seed): &(&CircuitSpec, usize, &ConfigSpec, u64)| -> ExperimentReport {
        let loaded = c.load(base, seed).and_then(|t| Ok((t, conf.to_config(seed)?)));
        match loaded {
            Ok((target, cfg)) => run_single(&target, &cfg).1,
            Err(e) => {
                let topo = Topology::new(0, vec![], vec![]).expect("empty topology");
                let target = Target {
                    id: c.id.clone(),
                    topo,
                    asg: Assignment::default(),
                };
                let cfg = AttackConfig {
                    model: conf.model,
                    algorithm: conf.algorithm,
                    simplify: conf.simplify,
                    seed,
                    ..AttackConfig::default()
                };
                let res = RecoveryResult::failed(&target.topo, e);
                make_report(&target, &cfg, &res, false)
            }
        }
    };
    let reports: Vec<ExperimentReport> = match spec.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| cells.par_iter().map(run_cell).collect()),
        None => cells.par_iter().map(run_cell).collect(),
    };
    if let Some(p) = &spec.jsonl {
        write_jsonl(&base.join(p), &reports)?;
    }
    if let Some(p) = &spec.csv {
        write_csv(&base.join(p), &reports)?;
    }
    Ok(reports)
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(())
}

pub fn write_jsonl(path: &Path, reports: &[ExperimentReport]) -> Result<()> {
    ensure_parent(path)?;
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_csv(path: &Path, reports: &[ExperimentReport]) -> Result<()> {
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path)?;
    for r in reports {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
