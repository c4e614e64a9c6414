// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::io::{self, BufRead, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand};
use gatehide::attack::{attack, Algorithm, AttackConfig, Oracle, Status, ThreatModel};
use gatehide::experiment::{certify, generate_family, run_experiment, secret_for, ExperimentSpec, Target};
use gatehide::generate::random_circuit;
use gatehide::netlist::{bench_to_circuit, read_json, write_json, CircuitFile};
use gatehide::sat::{SolverKind, SolverStats};
use gatehide::simplify::{classify_gates, simplification_report, SimplifyMode};
use gatehide::verify::{equiv_exhaustive, equiv_miter, EXHAUSTIVE_LIMIT};
use gatehide::{Assignment, BitVector, HiddenPartition, Topology};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Recover hidden gate types of circuits with public topology.
#[derive(Parser)]
#[command(name = "gatehide", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Convert a .bench netlist into the JSON circuit format.
    Convert {
        input: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Omit gate types (the attacker's view).
        #[arg(long)]
        topology_only: bool,
    },
    /// Print the gate classification and search-space reduction as JSON.
    Simplify {
        /// Circuit JSON; stdin when omitted.
        input: Option<PathBuf>,
        #[arg(long, default_value = "zsr")]
        mode: SimplifyMode,
    },
    /// Recover the gate types of a circuit through its oracle.
    Attack(AttackArgs),
    /// Check two typed circuits with the same topology for equivalence.
    Verify { first: PathBuf, second: PathBuf },
    /// Generate a benchmark circuit (adder, comparator, hamming, point, random).
    Gen {
        family: String,
        /// Operand width, input count for `point`, gate count for `random`.
        size: usize,
        /// Target bits for `point`; random from --seed when omitted.
        #[arg(long)]
        target: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Inputs of a `random` circuit.
        #[arg(long, default_value_t = 6)]
        inputs: usize,
        /// Outputs of a `random` circuit.
        #[arg(long, default_value_t = 2)]
        outputs: usize,
    },
    /// Run an experiment grid from a JSON spec file.
    Bench { spec: PathBuf },
    /// Serve a typed circuit over the line protocol on stdin/stdout.
    Oracle {
        circuit: PathBuf,
        #[arg(long, value_delimiter = ',')]
        hidden: Vec<usize>,
        #[arg(long)]
        secret: Option<String>,
    },
}

#[derive(clap::Args)]
struct AttackArgs {
    /// Circuit JSON; stdin when omitted. Gate types, if present, are only
    /// used as the oracle when --oracle is not given.
    input: Option<PathBuf>,
    #[arg(long, default_value = "a", value_parser = parse_model)]
    model: ThreatModel,
    #[arg(long, default_value = "optimized", value_parser = parse_algo)]
    algo: Algorithm,
    #[arg(long, default_value = "zsr")]
    simplify: SimplifyMode,
    #[arg(long, default_value_t = 3)]
    nmax: usize,
    /// Time budget in seconds.
    #[arg(long, default_value_t = 3600.0)]
    timeout: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated hidden input indices (model b).
    #[arg(long, value_delimiter = ',')]
    hidden: Vec<usize>,
    /// Secret hidden value for a circuit oracle; random from --seed otherwise.
    #[arg(long)]
    secret: Option<String>,
    /// `circuit:FILE` or `cmd:COMMAND`.
    #[arg(long)]
    oracle: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    solver: Option<SolverKind>,
}

fn parse_model(s: &str) -> Result<ThreatModel, String> {
    s.parse().map_err(|e: gatehide::Error| e.to_string())
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: gatehide::Error| e.to_string())
}

fn read_input(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) if p != Path::new("-") => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading stdin")?;
            Ok(s)
        }
    }
}

/// Prints a line to stdout; a closed pipe downstream is not an error.
fn say(text: &str) -> Result<()> {
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display())),
        None => say(text),
    }
}

fn typed(text: &str, what: &str) -> Result<(Topology, Assignment)> {
    let (topo, asg) = read_json(text)?;
    let asg = asg.with_context(|| format!("{what} carries no gate types"))?;
    Ok((topo, asg))
}

fn usage_error(kind: ErrorKind, msg: &str) -> ! {
    Cli::command().error(kind, msg).exit()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Convert { input, out, topology_only } => {
            let (topo, asg) = bench_to_circuit(&read_input(Some(&input))?)?;
            emit(&write_json(&topo, (!topology_only).then_some(&asg)), out.as_deref())?;
            eprintln!("{} inputs, {} outputs, {} gates", topo.n(), topo.m(), topo.k());
        }
        Cmd::Simplify { input, mode } => {
            let (topo, _) = read_json(&read_input(input.as_deref())?)?;
            let report = simplification_report(&topo, mode, &classify_gates(&topo, mode))?;
            say(&serde_json::to_string_pretty(&report)?)?;
        }
        Cmd::Attack(args) => return run_attack(args),
        Cmd::Verify { first, second } => {
            let (t1, a1) = typed(&read_input(Some(&first))?, "first circuit")?;
            let (t2, a2) = typed(&read_input(Some(&second))?, "second circuit")?;
            if t1 != t2 {
                bail!("the circuits have different topologies");
            }
            let same = if t1.n() <= EXHAUSTIVE_LIMIT {
                equiv_exhaustive(&t1, &a1, &a2)?
            } else {
                equiv_miter(&t1, &a1, &a2)?
            };
            say(if same { "equivalent" } else { "not equivalent" })?;
            return Ok(if same { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Cmd::Gen { family, size, target, seed, inputs, outputs } => {
            let (topo, asg) = if family == "random" {
                if inputs == 0 {
                    usage_error(ErrorKind::InvalidValue, "--inputs must be at least 1");
                }
                random_circuit(inputs, size, outputs, seed)
            } else {
                let t = match target {
                    Some(bits) => BitVector::parse_bits(&bits)?,
                    None => {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        (0..size).map(|_| rng.gen::<bool>()).collect()
                    }
                };
                generate_family(&family, size, Some(&t))?
            };
            say(&write_json(&topo, Some(&asg)))?;
        }
        Cmd::Bench { spec } => {
            let parsed = ExperimentSpec::from_file(&spec)?;
            let base = spec.parent().unwrap_or(Path::new("."));
            let reports = run_experiment(&parsed, base)?;
            let mut failed = 0;
            for r in &reports {
                say(&serde_json::to_string(r)?)?;
                failed += (r.status != Status::Recovered) as usize;
            }
            eprintln!("{} runs, {} not recovered", reports.len(), failed);
            return Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Cmd::Oracle { circuit, hidden, secret } => {
            let (topo, asg) = typed(&read_input(Some(&circuit))?, "oracle circuit")?;
            let part = HiddenPartition::new(topo.n(), hidden)?;
            let y = match secret {
                Some(bits) => BitVector::parse_bits(&bits)?,
                None => BitVector::zeros(part.hidden_width()),
            };
            let mut oracle = Oracle::fixed_hidden(topo, asg, part, y)?;
            let stdin = io::stdin();
            let mut stdout = io::stdout().lock();
            for line in stdin.lock().lines() {
                let line = line?;
                let z = oracle.query(&BitVector::parse_bits(line.trim())?)?;
                writeln!(stdout, "{z}")?;
                stdout.flush()?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct AttackReport {
    status: Status,
    certified: Option<bool>,
    query_count: usize,
    di_size: usize,
    wall_time: f64,
    hidden: Option<String>,
    space_before: String,
    space_after: String,
    solver: SolverStats,
    iterations: usize,
    fallback_calls: usize,
    error: Option<String>,
    circuit: Option<CircuitFile>,
}

fn run_attack(args: AttackArgs) -> Result<ExitCode> {
    match (args.model, args.hidden.is_empty()) {
        (ThreatModel::B, true) => usage_error(ErrorKind::MissingRequiredArgument, "--model b requires --hidden"),
        (ThreatModel::A, false) => usage_error(ErrorKind::ArgumentConflict, "--hidden only applies to --model b"),
        _ => {}
    }
    if !(args.timeout.is_finite() && args.timeout >= 0.0) {
        usage_error(ErrorKind::InvalidValue, "--timeout must be a non-negative number of seconds");
    }
    let (topo, own_types) = read_json(&read_input(args.input.as_deref())?)?;
    let cfg = AttackConfig {
        model: args.model,
        algorithm: args.algo,
        simplify: args.simplify,
        n_max: args.nmax,
        time_budget: Duration::from_secs_f64(args.timeout),
        seed: args.seed,
        hidden: args.hidden.clone(),
        solver: match args.solver {
            Some(s) => s,
            None => SolverKind::from_env()?,
        },
    };
    cfg.validate()?;
    let part = cfg.partition(topo.n())?;

    // the harness knows the target unless the oracle is an external process
    let (mut oracle, target) = match args.oracle.as_deref() {
        Some(spec) if spec.starts_with("cmd:") => {
            let o = Oracle::external(&spec[4..], part.visible_width(), topo.m())?;
            (o, None)
        }
        other => {
            let (t, asg) = match other {
                Some(spec) => {
                    let Some(path) = spec.strip_prefix("circuit:") else {
                        usage_error(ErrorKind::InvalidValue, "--oracle must be circuit:FILE or cmd:COMMAND");
                    };
                    typed(&read_input(Some(Path::new(path)))?, "oracle circuit")?
                }
                None => (topo.clone(), own_types.context("circuit has no gate types; pass --oracle")?),
            };
            if t != topo {
                bail!("oracle circuit topology differs from the attacked topology");
            }
            let y = match &args.secret {
                Some(bits) => BitVector::parse_bits(bits)?,
                None => secret_for(&part, cfg.seed),
            };
            let o = Oracle::fixed_hidden(t.clone(), asg.clone(), part.clone(), y.clone())?;
            (o, Some((Target { id: "target".into(), topo: t, asg }, y)))
        }
    };

    let res = attack(&topo, &mut oracle, &cfg);
    let certified = match (&target, res.status) {
        (Some((t, y)), Status::Recovered) => Some(certify(t, &part, y, &res, cfg.solver)?),
        _ => None,
    };
    let doc = AttackReport {
        status: res.status,
        certified,
        query_count: res.query_count,
        di_size: res.di.len(),
        wall_time: res.wall_time.as_secs_f64(),
        hidden: res.hidden.as_ref().map(|y| y.to_string()),
        space_before: res.space_before.to_string(),
        space_after: res.space_after.to_string(),
        solver: res.solver,
        iterations: res.iterations,
        fallback_calls: res.fallback_calls,
        error: res.error.clone(),
        circuit: res.assignment.as_ref().map(|a| CircuitFile::from_circuit(&topo, Some(a))),
    };
    emit(&serde_json::to_string_pretty(&doc)?, args.out.as_deref())?;
    eprintln!(
        "{}: {} queries in {:.3}s{}",
        res.status,
        res.query_count,
        res.wall_time.as_secs_f64(),
        match certified {
            Some(true) => ", certified",
            Some(false) => ", CERTIFICATION FAILED",
            None => "",
        }
    );
    let ok = res.status == Status::Recovered && certified != Some(false);
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
